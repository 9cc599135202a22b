use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::expr::{equals_zero, Atom, Expr, Jet, ZeroTest};
use crate::jet::{total_derivative, JetSpec};
use crate::{Error, Result};

use super::field::VectorField;
use super::solved::{Reducer, SolvedSystem};
use super::DiffSystem;

/// Jet space of `base` extended by the unknowns and parameters of `x`.
pub(crate) fn merged_jet(base: &JetSpec, x: &VectorField) -> Result<JetSpec> {
    if base.independents != x.jet.independents || base.dependents != x.jet.dependents {
        return Err(Error::JetMismatch);
    }
    let mut jet = base.clone();
    for u in &x.jet.unknowns {
        if jet.unknown(&u.name).is_none() {
            jet.unknowns.push(u.clone());
        }
    }
    let params: Vec<&str> = x.jet.parameters.iter().map(String::as_str).collect();
    Ok(jet.with_parameters(&params))
}

fn check_point_field(x: &VectorField) -> Result<()> {
    for c in x.components() {
        if let Some(j) = c
            .jets()
            .into_iter()
            .find(|j| x.jet.is_dependent(&j.var) && j.order() > 0)
        {
            return Err(Error::Unsupported(format!(
                "coefficient depends on the derivative {}",
                Atom::Jet(j)
            )));
        }
    }
    Ok(())
}

/// Computes extended coefficients `eta^{A,J}` on demand, optionally reducing
/// each one on solutions of a system.
struct Prolonger<'a> {
    x: &'a VectorField,
    jet: JetSpec,
    letters: Vec<char>,
    memo: HashMap<Jet, Expr>,
    reducer: Option<Reducer<'a>>,
}

impl<'a> Prolonger<'a> {
    fn new(x: &'a VectorField, jet: JetSpec, reducer: Option<Reducer<'a>>) -> Self {
        let letters = jet.independent_letters();
        Prolonger {
            x,
            jet,
            letters,
            memo: HashMap::new(),
            reducer,
        }
    }

    fn reduce(&mut self, e: Expr) -> Result<Expr> {
        match &mut self.reducer {
            Some(r) => r.reduce(&e),
            None => Ok(e),
        }
    }

    fn coefficient(&mut self, j: &Jet) -> Result<Expr> {
        if let Some(e) = self.memo.get(j) {
            return Ok(e.clone());
        }
        let out = if j.order() == 0 {
            let idx = self
                .jet
                .dependents
                .iter()
                .position(|d| **d == *j.var)
                .ok_or_else(|| Error::UnknownIdentifier(j.var.to_string()))?;
            self.x.eta[idx].clone()
        } else {
            // peel off the largest letter: J = K + i
            let mut letters: Vec<char> = j.deriv.chars().collect();
            let i = letters.pop().unwrap_or_default();
            let lower = Jet::new(&j.var, &letters.iter().collect::<String>());
            let base = self.coefficient(&lower)?;
            let mut e = total_derivative(&base, i, &self.jet);
            for (k, &letter) in self.letters.iter().enumerate() {
                let xi = &self.x.xi[k];
                if xi.is_zero() {
                    continue;
                }
                let dxi = total_derivative(xi, i, &self.jet);
                if dxi.is_zero() {
                    continue;
                }
                e -= &dxi * &Expr::atom(Atom::Jet(lower.extend(letter)));
            }
            self.reduce(e)?
        };
        self.memo.insert(j.clone(), out.clone());
        Ok(out)
    }
}

/// Extended coefficients `eta^{A,J}` for every dependent and every
/// multi-index up to `order`, without any reduction on solutions.
pub fn prolong_generator(x: &VectorField, order: usize) -> Result<BTreeMap<Jet, Expr>> {
    check_point_field(x)?;
    let mut p = Prolonger::new(x, x.jet.clone(), None);
    let letters = x.jet.independent_letters();
    let mut indices = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..order {
        let mut next = Vec::new();
        for d in &frontier {
            let start = d.chars().last();
            for &c in &letters {
                if start.is_some_and(|s| c < s) {
                    continue;
                }
                let mut e = d.clone();
                e.push(c);
                next.push(e);
            }
        }
        indices.extend(next.iter().cloned());
        frontier = next;
    }
    let mut out = BTreeMap::new();
    for dep in &x.jet.dependents {
        for idx in &indices {
            let j = Jet::new(dep, idx);
            let e = p.coefficient(&j)?;
            out.insert(j, e);
        }
    }
    Ok(out)
}

fn prepare<'a, S: DiffSystem + ?Sized>(system: &S, x: &'a VectorField) -> Result<(JetSpec, SolvedSystem)> {
    check_point_field(x)?;
    let jet = merged_jet(system.jet(), x)?;
    let solved = system.solved()?.with_constraints(&jet, &x.constraints)?;
    Ok((jet, solved))
}

/// `X^[n](H)` for every equation `H = 0` of the system, evaluated on
/// solutions: principal derivatives (time derivatives of an evolution system,
/// leading derivatives of an ODE system, and those of constrained unknown
/// functions) are eliminated.
pub fn symmetry_residual<S: DiffSystem + ?Sized>(system: &S, x: &VectorField) -> Result<Vec<Expr>> {
    let (jet, solved) = prepare(system, x)?;
    residual_with(system, x, &jet, &solved)
}

pub(crate) fn residual_with<S: DiffSystem + ?Sized>(
    system: &S,
    x: &VectorField,
    jet: &JetSpec,
    solved: &SolvedSystem,
) -> Result<Vec<Expr>> {
    let mut p = Prolonger::new(x, jet.clone(), Some(solved.reducer()));
    let mut out = Vec::new();
    for h in system.equations() {
        let mut r = Expr::zero();
        for (k, name) in jet.independents.iter().enumerate() {
            let xi = &x.xi[k];
            if xi.is_zero() {
                continue;
            }
            r += xi * &h.derive(&Atom::sym(name))?;
        }
        for j in h.jets() {
            let eta = p.coefficient(&j)?;
            if eta.is_zero() {
                continue;
            }
            r += &eta * &h.derive(&Atom::Jet(j))?;
        }
        out.push(solved.reduce(&r)?);
    }
    Ok(out)
}

/// Independent route through the characteristic `Q^A = eta^A - xi^i u^A_i`:
/// `sum_J D_J(Q^A) dH/du^A_J`, evaluated on solutions.
pub fn characteristic_residual<S: DiffSystem + ?Sized>(system: &S, x: &VectorField) -> Result<Vec<Expr>> {
    let (jet, solved) = prepare(system, x)?;
    let letters = jet.independent_letters();
    let mut q = HashMap::new();
    for (a, dep) in jet.dependents.iter().enumerate() {
        let mut e = x.eta[a].clone();
        for (k, &l) in letters.iter().enumerate() {
            e -= &x.xi[k] * &Expr::jet(dep, &l.to_string());
        }
        q.insert(dep.clone(), e);
    }
    let mut reducer = solved.reducer();
    let mut memo: HashMap<Jet, Expr> = HashMap::new();
    let mut out = Vec::new();
    for h in system.equations() {
        let mut r = Expr::zero();
        for j in h.jets() {
            if !jet.is_dependent(&j.var) {
                continue;
            }
            let dq = characteristic_derivative(&j, &q, &jet, &mut reducer, &mut memo)?;
            r += &dq * &h.derive(&Atom::Jet(j))?;
        }
        out.push(reducer.reduce(&r)?);
    }
    Ok(out)
}

fn characteristic_derivative(
    j: &Jet,
    q: &HashMap<String, Expr>,
    jet: &JetSpec,
    reducer: &mut Reducer<'_>,
    memo: &mut HashMap<Jet, Expr>,
) -> Result<Expr> {
    if let Some(e) = memo.get(j) {
        return Ok(e.clone());
    }
    let out = if j.order() == 0 {
        reducer.reduce(&q[&*j.var])?
    } else {
        let mut letters: Vec<char> = j.deriv.chars().collect();
        let i = letters.pop().unwrap_or_default();
        let lower = Jet::new(&j.var, &letters.iter().collect::<String>());
        let base = characteristic_derivative(&lower, q, jet, reducer, memo)?;
        reducer.reduce(&total_derivative(&base, i, jet))?
    };
    memo.insert(j.clone(), out.clone());
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub status: ZeroTest,
    /// Reduced residual per equation, in expression syntax.
    pub remainders: Vec<String>,
    /// Outcome of the characteristic route.
    pub characteristic: ZeroTest,
}

impl VerificationReport {
    pub fn is_symmetry(&self) -> bool {
        self.status.is_zero() && self.characteristic.is_zero()
    }

    pub fn routes_agree(&self) -> bool {
        self.status.is_zero() == self.characteristic.is_zero()
    }
}

fn combine(rs: &[Expr]) -> Result<ZeroTest> {
    let mut status = ZeroTest::Zero;
    for r in rs {
        match equals_zero(r)? {
            ZeroTest::Nonzero => return Ok(ZeroTest::Nonzero),
            ZeroTest::ProbablyZero => status = ZeroTest::ProbablyZero,
            ZeroTest::Zero => {}
        }
    }
    Ok(status)
}

/// Checks `X^[n](H) = 0` on solutions by both the prolongation and the
/// characteristic route; derivatives of unknown functions are reduced modulo
/// their constraint equations.
pub fn verify_generator<S: DiffSystem + ?Sized>(system: &S, x: &VectorField) -> Result<VerificationReport> {
    let residual = symmetry_residual(system, x)?;
    let characteristic = characteristic_residual(system, x)?;
    Ok(VerificationReport {
        status: combine(&residual)?,
        remainders: residual.iter().map(|r| r.to_string()).collect(),
        characteristic: combine(&characteristic)?,
    })
}
