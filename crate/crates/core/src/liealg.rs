//! Brackets of vector fields, structure constants over a given basis, the
//! Jacobi check and structural invariants of the resulting algebra.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalogue::PrintedBracket;
use crate::expr::{equals_zero, seed_from_env, Atom, Expr, Monomial, ZeroTest};
use crate::jet::JetSpec;
use crate::linalg::{rank, solve, Matrix};
use crate::symmetry::VectorField;
use crate::{Error, Rational, Result};

/// `[X, Y]^i = X(Y^i) - Y(X^i)`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    if !x.same_space(y) {
        return Err(Error::JetMismatch);
    }
    let mut out = VectorField::zero(&x.jet);
    for i in 0..x.component_count() {
        let c = &x.apply(y.component(i))? - &y.apply(x.component(i))?;
        out.set_component(i, c);
    }
    Ok(out)
}

fn is_coordinate(a: &Atom, jet: &JetSpec) -> bool {
    match a {
        Atom::Jet(_) => true,
        Atom::Sym(n) => jet.independents.iter().any(|i| **i == **n),
        _ => a.argument().is_some_and(|e| e.any_atom(&|b| is_coordinate(b, jet))),
    }
}

/// Coefficients of a field over (slot, coordinate monomial); the values are
/// parameter-only expressions.
fn expand(x: &VectorField) -> BTreeMap<(usize, Monomial), Expr> {
    let mut out = BTreeMap::new();
    for (slot, c) in x.components().enumerate() {
        for (key, coef) in c.split_by(|a| is_coordinate(a, &x.jet)) {
            out.insert((slot, key), coef);
        }
    }
    out
}

/// Linear system whose columns are the basis fields over the shared
/// functional basis.
struct Membership {
    keys: Vec<(usize, Monomial)>,
    matrix: Matrix<Expr>,
}

impl Membership {
    fn new(basis: &[VectorField]) -> Membership {
        let expanded: Vec<_> = basis.iter().map(expand).collect();
        let keys: BTreeSet<(usize, Monomial)> = expanded.iter().flat_map(|e| e.keys().cloned()).collect();
        let keys: Vec<_> = keys.into_iter().collect();
        let rows = keys
            .iter()
            .map(|k| expanded.iter().map(|e| e.get(k).cloned().unwrap_or_else(Expr::zero)).collect())
            .collect();
        Membership {
            matrix: Matrix::new(rows, basis.len()),
            keys,
        }
    }

    /// Coordinates of `z` in the basis, or `None` if `z` leaves the span.
    fn coordinates(&self, z: &VectorField) -> Result<Option<Vec<Expr>>> {
        let ez = expand(z);
        if ez.keys().any(|k| !self.keys.contains(k)) {
            return Ok(None);
        }
        let b: Vec<Expr> = self
            .keys
            .iter()
            .map(|k| ez.get(k).cloned().unwrap_or_else(Expr::zero))
            .collect();
        solve(&self.matrix, &b)
    }
}

/// `[X_i, X_j] = sum_k c[i][j][k] X_k`, with parameter-valued constants.
#[derive(Clone, Debug)]
pub struct StructureTable {
    pub basis: Vec<VectorField>,
    pub constants: Vec<Vec<Vec<Expr>>>,
    pub closed: Vec<Vec<bool>>,
    /// Brackets that do not lie in the span, keyed by `(i, j)` with `i < j`.
    pub residuals: BTreeMap<(usize, usize), VectorField>,
}

impl StructureTable {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn is_closed(&self) -> bool {
        self.residuals.is_empty()
    }

    /// `sum_k c[i][j][k] X_k`.
    pub fn combination(&self, i: usize, j: usize) -> Result<VectorField> {
        let mut out = VectorField::zero(&self.basis[0].jet);
        for (k, c) in self.constants[i][j].iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.basis[k].scale(c))?;
            }
        }
        Ok(out)
    }

    /// Human-readable `[X_i, X_j] = ...` lines (1-based) for nonzero entries.
    pub fn lines(&self) -> Vec<String> {
        let n = self.dimension();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if let Some(r) = self.residuals.get(&(i, j)) {
                    out.push(format!("[X{}, X{}] = {} (not in span)", i + 1, j + 1, r.operator_string()));
                    continue;
                }
                let terms = combination_string(&self.constants[i][j]);
                if terms != "0" {
                    out.push(format!("[X{}, X{}] = {terms}", i + 1, j + 1));
                }
            }
        }
        out
    }

    /// Constants as strings `c^k_ij`, keyed `"k,i,j"` with 1-based indices.
    pub fn constant_strings(&self) -> BTreeMap<String, String> {
        let n = self.dimension();
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = &self.constants[i][j][k];
                    if !c.is_zero() {
                        out.insert(format!("{},{},{}", k + 1, i + 1, j + 1), c.to_string());
                    }
                }
            }
        }
        out
    }
}

fn combination_string(coefs: &[Expr]) -> String {
    let parts: Vec<String> = coefs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| match c.as_rational() {
            Some(q) if q == Rational::from_integer(1.into()) => format!("X{}", k + 1),
            Some(q) if q == Rational::from_integer((-1).into()) => format!("-X{}", k + 1),
            _ => format!("({c})*X{}", k + 1),
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

pub fn structure_constants(basis: &[VectorField]) -> Result<StructureTable> {
    let n = basis.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty basis".into()));
    }
    if basis.iter().any(|b| !b.same_space(&basis[0])) {
        return Err(Error::JetMismatch);
    }
    let member = Membership::new(basis);
    if rank(&member.matrix)? < n {
        return Err(Error::DependentBasis);
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let solved = pairs
        .par_iter()
        .map(|&(i, j)| {
            let z = lie_bracket(&basis[i], &basis[j])?;
            Ok((i, j, member.coordinates(&z)?, z))
        })
        .collect::<Result<Vec<_>>>()?;
    let zero = vec![Expr::zero(); n];
    let mut constants = vec![vec![zero.clone(); n]; n];
    let mut closed = vec![vec![true; n]; n];
    let mut residuals = BTreeMap::new();
    for (i, j, coords, z) in solved {
        match coords {
            Some(c) => {
                constants[j][i] = c.iter().map(|x| -x.clone()).collect();
                constants[i][j] = c;
            }
            None => {
                closed[i][j] = false;
                closed[j][i] = false;
                residuals.insert((i, j), z);
            }
        }
    }
    Ok(StructureTable {
        basis: basis.to_vec(),
        constants,
        closed,
        residuals,
    })
}

fn vanishes(e: &Expr) -> Result<bool> {
    if e.is_zero() {
        return Ok(true);
    }
    Ok(equals_zero(e)? != ZeroTest::Nonzero)
}

/// Exact Jacobi identity on the constants; false for tables that do not close.
pub fn jacobi_check(t: &StructureTable) -> Result<bool> {
    if !t.is_closed() {
        return Ok(false);
    }
    let c = &t.constants;
    let n = t.dimension();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in 0..n {
                    let mut s = Expr::zero();
                    for m in 0..n {
                        s += &c[i][j][m] * &c[m][k][l];
                        s += &c[j][k][m] * &c[m][i][l];
                        s += &c[k][i][m] * &c[m][j][l];
                    }
                    if !vanishes(&s)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Series dimensions and derived flags of a closed table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraSignature {
    pub dimension: usize,
    pub derived_series: Vec<usize>,
    pub lower_central_series: Vec<usize>,
    pub center: usize,
    pub abelian: bool,
    pub nilpotent: bool,
    pub solvable: bool,
    /// Dimension of the largest abelian direct summand.
    pub abelian_summand: usize,
    /// Values substituted for parameters before the rank computations.
    pub specialisation: BTreeMap<String, String>,
}

/// Replaces every parameter by a random perfect square, so that square
/// roots of parameters become rational too.
fn specialise(t: &StructureTable) -> Result<(Vec<Vec<Vec<Rational>>>, BTreeMap<String, String>)> {
    let mut names = BTreeSet::new();
    for e in t.constants.iter().flatten().flatten() {
        for a in e.leaf_atoms() {
            if let Atom::Sym(n) | Atom::Sqrt(n) = a {
                names.insert(n.to_string());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed_from_env());
    let mut bindings = BTreeMap::new();
    let mut shown = BTreeMap::new();
    for n in names {
        let q: i64 = rng.gen_range(2..=40);
        bindings.insert(Atom::sym(&n), Expr::from_int(q * q));
        shown.insert(n, (q * q).to_string());
    }
    let constants = t
        .constants
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| {
                    v.iter()
                        .map(|e| {
                            e.substitute(&bindings)?.as_rational().ok_or_else(|| {
                                Error::NotConcrete(format!("structure constant {e} is not numeric"))
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((constants, shown))
}

fn bracket_vectors(c: &[Vec<Vec<Rational>>], a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len();
    let mut out = vec![Rational::from_integer(0.into()); n];
    for i in 0..n {
        if num_traits::Zero::is_zero(&a[i]) {
            continue;
        }
        for j in 0..n {
            if num_traits::Zero::is_zero(&b[j]) {
                continue;
            }
            let ab = &a[i] * &b[j];
            for (k, o) in out.iter_mut().enumerate() {
                *o += &ab * &c[i][j][k];
            }
        }
    }
    out
}

/// Row basis of the span of `vectors`.
fn span_basis(vectors: Vec<Vec<Rational>>, n: usize) -> Result<Vec<Vec<Rational>>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let mut m = Matrix::new(vectors, n);
    crate::linalg::rref(&mut m)?;
    Ok(m.rows)
}

fn span_dim(vectors: Vec<Vec<Rational>>, n: usize) -> Result<usize> {
    Ok(span_basis(vectors, n)?.len())
}

fn commutator_space(
    c: &[Vec<Vec<Rational>>],
    a: &[Vec<Rational>],
    b: &[Vec<Rational>],
    n: usize,
) -> Result<Vec<Vec<Rational>>> {
    let mut v = Vec::new();
    for x in a {
        for y in b {
            v.push(bracket_vectors(c, x, y));
        }
    }
    span_basis(v, n)
}

pub fn algebra_signature(t: &StructureTable) -> Result<AlgebraSignature> {
    if !t.is_closed() {
        return Err(Error::NotClosed);
    }
    let n = t.dimension();
    let (c, specialisation) = specialise(t)?;
    let full: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut e = vec![Rational::from_integer(0.into()); n];
            e[i] = Rational::from_integer(1.into());
            e
        })
        .collect();

    let mut derived = vec![n];
    let mut cur = full.clone();
    loop {
        let next = commutator_space(&c, &cur, &cur, n)?;
        if next.len() == cur.len() {
            break;
        }
        derived.push(next.len());
        cur = next;
        if cur.is_empty() {
            break;
        }
    }

    let mut lower = vec![n];
    let mut cur = full.clone();
    loop {
        let next = commutator_space(&c, &full, &cur, n)?;
        if next.len() == cur.len() {
            break;
        }
        lower.push(next.len());
        cur = next;
        if cur.is_empty() {
            break;
        }
    }

    // center: x with sum_i x_i c[i][j][k] = 0 for all j, k
    let rows: Vec<Vec<Rational>> = (0..n)
        .flat_map(|j| (0..n).map(move |k| (j, k)))
        .map(|(j, k)| (0..n).map(|i| c[i][j][k].clone()).collect())
        .collect();
    let center_basis = crate::linalg::nullspace_fraction_free(&rows, n);
    let center = center_basis.len();
    let derived_space = commutator_space(&c, &full, &full, n)?;
    let sum = span_dim(center_basis.iter().chain(&derived_space).cloned().collect(), n)?;
    let intersection = center + derived_space.len() - sum;

    let solvable = *derived.last().unwrap() == 0;
    let nilpotent = *lower.last().unwrap() == 0;
    Ok(AlgebraSignature {
        dimension: n,
        abelian: derived_space.is_empty(),
        derived_series: derived,
        lower_central_series: lower,
        center,
        nilpotent,
        solvable,
        abelian_summand: center - intersection,
        specialisation,
    })
}

/// A printed bracket that disagrees with the computed table (1-based).
#[derive(Clone, Debug, Serialize)]
pub struct BracketDisagreement {
    pub left: usize,
    pub right: usize,
    pub printed: String,
    pub computed: String,
}

/// Compares a printed list of nonzero brackets with the computed table;
/// brackets missing from the printed list count as printed zero.
pub fn compare_with_printed(t: &StructureTable, printed: &[PrintedBracket]) -> Result<Vec<BracketDisagreement>> {
    let n = t.dimension();
    let mut expected: BTreeMap<(usize, usize), Vec<Expr>> = BTreeMap::new();
    for p in printed {
        if p.left == 0 || p.right == 0 || p.left > n || p.right > n {
            return Err(Error::InvalidParameter(format!("bracket [{}, {}] out of range", p.left, p.right)));
        }
        let (i, j, sign) = if p.left < p.right {
            (p.left - 1, p.right - 1, Expr::one())
        } else {
            (p.right - 1, p.left - 1, -Expr::one())
        };
        let row = expected.entry((i, j)).or_insert_with(|| vec![Expr::zero(); n]);
        for (coef, k) in &p.combination {
            if *k == 0 || *k > n {
                return Err(Error::InvalidParameter(format!("index {k} out of range")));
            }
            row[k - 1] += &sign * coef;
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let zero = vec![Expr::zero(); n];
            let want = expected.get(&(i, j)).unwrap_or(&zero);
            let computed = match t.residuals.get(&(i, j)) {
                Some(r) => {
                    out.push(BracketDisagreement {
                        left: i + 1,
                        right: j + 1,
                        printed: combination_string(want),
                        computed: format!("{} (not in span)", r.operator_string()),
                    });
                    continue;
                }
                None => &t.constants[i][j],
            };
            let mut same = true;
            for k in 0..n {
                if !vanishes(&(&want[k] - &computed[k]))? {
                    same = false;
                    break;
                }
            }
            if !same {
                out.push(BracketDisagreement {
                    left: i + 1,
                    right: j + 1,
                    printed: combination_string(want),
                    computed: combination_string(computed),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue;

    fn field(text: &str, jet: &JetSpec) -> VectorField {
        VectorField::parse(text, jet).unwrap()
    }

    #[test]
    fn bracket_examples() {
        let jet = JetSpec::real_pde(2);
        let dt = field("xi_t = 1", &jet);
        let dx = field("xi_x = 1", &jet);
        assert!(lie_bracket(&dt, &dx).unwrap().is_zero());
        let scaling = field("xi_t = t; xi_x = x/2", &jet);
        assert_eq!(lie_bracket(&scaling, &dx).unwrap(), field("xi_x = -1/2", &jet));
        let g = catalogue::member3_generators().unwrap();
        let b = lie_bracket(&g[4], &g[6]).unwrap();
        assert_eq!(b, g[5].scale_rational(&Rational::from_integer((-2).into())));
        assert!(lie_bracket(&dt, &field("xi_s = 1", &JetSpec::ode(&["f", "g"], &[], 2))).is_err());
    }

    #[test]
    fn abelian_and_corrupted_tables() {
        let t = structure_constants(&catalogue::member4_generators().unwrap()).unwrap();
        assert!(t.is_closed() && jacobi_check(&t).unwrap());
        let s = algebra_signature(&t).unwrap();
        assert!(s.abelian && s.center == 4 && s.abelian_summand == 4);

        let g = catalogue::member2_generators().unwrap();
        let mut t = structure_constants(&g).unwrap();
        assert!(t.is_closed());
        assert!(jacobi_check(&t).unwrap());
        for i in 0..7 {
            for j in 0..7 {
                let z = lie_bracket(&g[i], &g[j]).unwrap();
                assert_eq!(t.combination(i, j).unwrap(), z);
            }
        }
        t.constants[0][2][0] += Expr::one();
        t.constants[2][0][0] -= Expr::one();
        assert!(!jacobi_check(&t).unwrap());
        let dep = vec![g[0].clone(), g[0].scale_rational(&Rational::from_integer(2.into()))];
        assert!(matches!(structure_constants(&dep), Err(Error::DependentBasis)));
    }

    #[test]
    fn rotation_triple_is_perfect() {
        let g = catalogue::member3_wave_generators().unwrap();
        let t = structure_constants(&g[2..5]).unwrap();
        assert!(t.is_closed() && jacobi_check(&t).unwrap());
        let s = algebra_signature(&t).unwrap();
        assert_eq!(s.derived_series, vec![3]);
        assert!(!s.solvable);
    }
}
