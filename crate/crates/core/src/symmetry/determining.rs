use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::expr::{Atom, Expr, Monomial, ZeroTest};
use crate::jet::JetSpec;
use crate::linalg::{independent_rows, nullspace_fraction_free, primitive_direction};
use crate::{Error, Integer, Rational, Result};

use super::field::VectorField;
use super::prolong::{residual_with, verify_generator, VerificationReport};
use super::DiffSystem;

/// Dictionary for the coefficient ansatz: monomials `t^a x^b` with
/// `a + b <= degree`, optionally times `sin(m u1)`, `cos(m u1)` for
/// `m <= trig` and `exp(k u2)` for `|k| <= expw`, where `u1`, `u2` are the
/// first and second dependents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AnsatzSpec {
    pub degree: usize,
    pub trig: usize,
    pub expw: usize,
    /// Whether the trig/exp factors are also used on the `xi` slots.
    pub trig_on_xi: bool,
}

impl AnsatzSpec {
    pub fn polynomial(degree: usize) -> AnsatzSpec {
        AnsatzSpec {
            degree,
            trig: 0,
            expw: 0,
            trig_on_xi: false,
        }
    }

    /// Smallest dictionaries that realise the finite algebras of members 1-4.
    pub fn default_for_member(k: usize) -> AnsatzSpec {
        match k {
            1 => AnsatzSpec::polynomial(1),
            2 => AnsatzSpec::polynomial(2),
            3 => AnsatzSpec {
                degree: 1,
                trig: 2,
                expw: 1,
                trig_on_xi: false,
            },
            _ => AnsatzSpec {
                degree: 2,
                trig: 2,
                expw: 1,
                trig_on_xi: true,
            },
        }
    }
}

/// One basis field per (slot, dictionary monomial); coefficient `c_k` of the
/// general ansatz multiplies `fields[k]`.
#[derive(Clone, Debug)]
pub struct AnsatzBasis {
    pub jet: JetSpec,
    pub labels: Vec<String>,
    pub fields: Vec<VectorField>,
    slots: HashMap<(usize, Monomial), usize>,
}

fn polynomial_monomials(vars: &[String], degree: usize) -> Vec<Expr> {
    let mut out = vec![Expr::one()];
    let mut frontier: Vec<(Expr, usize)> = vec![(Expr::one(), 0)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for (i, v) in vars.iter().enumerate().skip(*start) {
                let e = m * &Expr::sym(v);
                out.push(e.clone());
                next.push((e, i));
            }
        }
        frontier = next;
    }
    out
}

fn functional_factors(jet: &JetSpec, spec: &AnsatzSpec) -> Result<Vec<Expr>> {
    let mut trig = vec![Expr::one()];
    if spec.trig > 0 {
        let u = jet
            .dependents
            .first()
            .ok_or_else(|| Error::InvalidParameter("trig ansatz needs a dependent".into()))?;
        for m in 1..=spec.trig as i64 {
            let arg = Expr::from_int(m) * Expr::jet(u, "");
            trig.push(Expr::sin(arg.clone())?);
            trig.push(Expr::cos(arg)?);
        }
    }
    let mut exps = vec![Expr::one()];
    if spec.expw > 0 {
        let w = jet
            .dependents
            .get(1)
            .ok_or_else(|| Error::InvalidParameter("exp ansatz needs a second dependent".into()))?;
        for k in 1..=spec.expw as i64 {
            for s in [-k, k] {
                exps.push(Expr::exp(Expr::from_int(s) * Expr::jet(w, ""))?);
            }
        }
    }
    let mut out = Vec::new();
    for a in &trig {
        for b in &exps {
            out.push(a * b);
        }
    }
    Ok(out)
}

impl AnsatzBasis {
    pub fn new(jet: &JetSpec, spec: &AnsatzSpec) -> Result<AnsatzBasis> {
        let poly = polynomial_monomials(&jet.independents, spec.degree);
        let funcs = functional_factors(jet, spec)?;
        let labels_slot = VectorField::labels(jet);
        let nxi = jet.independents.len();
        let mut basis = AnsatzBasis {
            jet: jet.clone(),
            labels: Vec::new(),
            fields: Vec::new(),
            slots: HashMap::new(),
        };
        for (slot, slot_label) in labels_slot.iter().enumerate() {
            let dictionary: Vec<Expr> = if slot < nxi && !spec.trig_on_xi {
                poly.clone()
            } else {
                poly.iter().flat_map(|p| funcs.iter().map(move |f| p * f)).collect()
            };
            for e in dictionary {
                basis.push(slot, slot_label, e)?;
            }
        }
        Ok(basis)
    }

    /// A basis from explicit per-slot expressions, each a single monomial.
    pub fn from_slots(jet: &JetSpec, slots: &[Vec<Expr>]) -> Result<AnsatzBasis> {
        let labels_slot = VectorField::labels(jet);
        let mut basis = AnsatzBasis {
            jet: jet.clone(),
            labels: Vec::new(),
            fields: Vec::new(),
            slots: HashMap::new(),
        };
        for (slot, exprs) in slots.iter().enumerate() {
            let label = labels_slot
                .get(slot)
                .ok_or_else(|| Error::InvalidParameter(format!("slot {slot} out of range")))?;
            for e in exprs {
                basis.push(slot, label, e.clone())?;
            }
        }
        Ok(basis)
    }

    fn push(&mut self, slot: usize, slot_label: &str, e: Expr) -> Result<()> {
        let m = match e.as_monomial() {
            Some((m, c)) if c == &Rational::from_integer(1.into()) => m.clone(),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "ansatz element {e} is not a unit monomial"
                )))
            }
        };
        if self.slots.contains_key(&(slot, m.clone())) {
            return Err(Error::InvalidParameter(format!("duplicate ansatz element {e}")));
        }
        let mut f = VectorField::zero(&self.jet);
        f.set_component(slot, e.clone());
        self.slots.insert((slot, m), self.fields.len());
        self.labels.push(format!("{slot_label}:{e}"));
        self.fields.push(f);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Coordinates of `x` in this basis, or `None` if some coefficient term
    /// is outside the dictionary.
    pub fn coordinates(&self, x: &VectorField) -> Option<Vec<Rational>> {
        if !x.same_space(&VectorField::zero(&self.jet)) {
            return None;
        }
        let mut v = vec![Rational::from_integer(0.into()); self.len()];
        for (slot, c) in x.components().enumerate() {
            for (m, q) in c.terms() {
                let k = self.slots.get(&(slot, m.clone()))?;
                v[*k] = q.clone();
            }
        }
        Some(v)
    }

    pub fn combine(&self, coefficients: &[Rational]) -> Result<VectorField> {
        let terms: Vec<(Rational, &VectorField)> =
            coefficients.iter().cloned().zip(self.fields.iter()).collect();
        VectorField::combination(&self.jet, &terms)
    }
}

/// Homogeneous linear system on the ansatz coefficients. Rows identical up to
/// scaling are stored once.
#[derive(Clone, Debug)]
pub struct DeterminingSystem {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<Rational>>,
    /// Equation index, jet monomial and functional class each row came from.
    pub provenance: Vec<String>,
}

impl DeterminingSystem {
    pub fn ncols(&self) -> usize {
        self.labels.len()
    }

    /// Canonical nullspace basis: fraction-free elimination, pivots in
    /// declared column order normalised to 1.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let sparse: Vec<Vec<(usize, Rational)>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, q)| !num_traits::Zero::is_zero(*q))
                    .map(|(i, q)| (i, q.clone()))
                    .collect()
            })
            .collect();
        let keep = independent_rows(&sparse);
        let selected: Vec<Vec<Rational>> = keep.iter().map(|&i| self.rows[i].clone()).collect();
        nullspace_fraction_free(&selected, self.ncols())
    }

    pub fn rank(&self) -> usize {
        self.ncols() - self.nullspace().len()
    }
}

fn is_jet_factor(jet: &JetSpec, a: &Atom) -> bool {
    matches!(a, Atom::Jet(j) if jet.is_dependent(&j.var) && j.order() > 0)
}

/// Builds the determining system of `system` for the ansatz `basis`: the
/// residual of each basis field is computed in parallel, and the coefficient
/// of every canonical monomial (jet monomial times functional class) across
/// the basis gives one row.
pub fn determining_system<S: DiffSystem + Sync + ?Sized>(
    system: &S,
    basis: &AnsatzBasis,
) -> Result<DeterminingSystem> {
    let jet = system.jet().clone();
    let solved = system.solved()?;
    let residuals: Vec<Vec<Expr>> = basis
        .fields
        .par_iter()
        .map(|f| residual_with(system, f, &jet, &solved))
        .collect::<Result<_>>()?;
    let mut entries: BTreeMap<(usize, Monomial), Vec<(usize, Rational)>> = BTreeMap::new();
    for (k, rs) in residuals.iter().enumerate() {
        for (eq, r) in rs.iter().enumerate() {
            for (m, q) in r.terms() {
                entries.entry((eq, m.clone())).or_default().push((k, q.clone()));
            }
        }
    }
    let n = basis.len();
    let mut seen: BTreeMap<Vec<Integer>, usize> = BTreeMap::new();
    let mut rows = Vec::new();
    let mut provenance = Vec::new();
    for ((eq, m), sparse) in entries {
        let mut row = vec![Rational::from_integer(0.into()); n];
        for (k, q) in sparse {
            row[k] += q;
        }
        let key = primitive_direction(&row);
        if key.iter().all(num_traits::Zero::is_zero) || seen.contains_key(&key) {
            continue;
        }
        seen.insert(key, rows.len());
        let (jets, functional) = m.split(|a| is_jet_factor(&jet, a));
        provenance.push(format!("eq{}: [{}] x [{}]", eq + 1, jets, functional));
        rows.push(row);
    }
    Ok(DeterminingSystem {
        labels: basis.labels.clone(),
        rows,
        provenance,
    })
}

/// Result of a discovery run: the nullspace basis as fields together with
/// their verification reports.
#[derive(Clone, Debug)]
pub struct Discovery {
    pub system: DeterminingSystem,
    pub coefficients: Vec<Vec<Rational>>,
    pub fields: Vec<VectorField>,
    pub reports: Vec<VerificationReport>,
}

impl Discovery {
    pub fn dimension(&self) -> usize {
        self.fields.len()
    }

    pub fn all_verified(&self) -> bool {
        self.reports.iter().all(|r| r.status == ZeroTest::Zero)
    }

    /// Whether a field lies in the discovered span (exact coordinate solve).
    pub fn spans(&self, basis: &AnsatzBasis, x: &VectorField) -> Result<bool> {
        match basis.coordinates(x) {
            Some(v) => crate::linalg::span_contains(&self.coefficients, &v),
            None => Ok(false),
        }
    }
}

pub fn discover_symmetries<S: DiffSystem + Sync + ?Sized>(system: &S, basis: &AnsatzBasis) -> Result<Discovery> {
    let ds = determining_system(system, basis)?;
    let coefficients = ds.nullspace();
    let fields: Vec<VectorField> = coefficients
        .iter()
        .map(|c| basis.combine(c))
        .collect::<Result<_>>()?;
    let reports = fields
        .par_iter()
        .map(|f| verify_generator(system, f))
        .collect::<Result<Vec<_>>>()?;
    Ok(Discovery {
        system: ds,
        coefficients,
        fields,
        reports,
    })
}
