use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::expr::{equals_zero, parse_expr, Atom, Compiled, Expr, ZeroTest};
use crate::jet::{total_derivative, JetSpec};
use crate::{Error, Result};

use super::numeric::jacobi_sn_cn_dn;
use super::OdeSystem;

#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    Closed(Expr),
    /// `amplitude * sn(s, k)` with the modulus taken from parameter `k`.
    Sn { amplitude: Expr },
}

/// Proposed solution: one component per dependent, plus parameter
/// constraints `C = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionCandidate {
    pub jet: JetSpec,
    pub components: Vec<(String, Component)>,
    pub constraints: Vec<Expr>,
}

impl SolutionCandidate {
    pub fn from_exprs(jet: JetSpec, components: Vec<(String, Expr)>, constraints: Vec<Expr>) -> SolutionCandidate {
        SolutionCandidate {
            jet,
            components: components
                .into_iter()
                .map(|(d, e)| (d, Component::Closed(e)))
                .collect(),
            constraints,
        }
    }

    pub fn parse(jet: &JetSpec, components: &[(&str, &str)], constraints: &[&str]) -> Result<SolutionCandidate> {
        let comps = components
            .iter()
            .map(|(d, t)| Ok((d.to_string(), parse_expr(t, jet)?)))
            .collect::<Result<Vec<_>>>()?;
        let cons = constraints
            .iter()
            .map(|t| parse_expr(t, jet))
            .collect::<Result<Vec<_>>>()?;
        Ok(SolutionCandidate::from_exprs(jet.clone(), comps, cons))
    }

    /// `dep = amplitude * sn(s, k)`, `zero_dep = 0`, under the constraints
    /// `c = -(1 + k^2)` and `amplitude^2 = 2 k^2`.
    pub fn elliptic(jet: &JetSpec, dep: &str, amplitude: &str, zero_dep: &str) -> Result<SolutionCandidate> {
        let jet = jet.clone().with_parameters(&[amplitude, "k"]);
        let constraints = vec![
            parse_expr("c + 1 + k^2", &jet)?,
            parse_expr(&format!("{amplitude}^2 - 2*k^2"), &jet)?,
        ];
        Ok(SolutionCandidate {
            components: vec![
                (
                    dep.to_string(),
                    Component::Sn {
                        amplitude: Expr::sym(amplitude),
                    },
                ),
                (zero_dep.to_string(), Component::Closed(Expr::zero())),
            ],
            jet,
            constraints,
        })
    }

    pub fn component(&self, dep: &str) -> Option<&Component> {
        self.components.iter().find(|(d, _)| d == dep).map(|(_, c)| c)
    }

    /// Variable order used by [`Self::compile_closed`]: the independent
    /// variable, then the parameters.
    fn variables(&self) -> Vec<Atom> {
        let mut vars = vec![Atom::sym(&self.jet.independents[0])];
        vars.extend(self.jet.parameters.iter().map(|p| Atom::sym(p)));
        vars
    }

    fn values(&self, s: f64, params: &BTreeMap<String, f64>) -> Result<Vec<Complex64>> {
        let mut values = vec![Complex64::new(s, 0.0)];
        for p in &self.jet.parameters {
            values.push(Complex64::new(value_of(params, p)?, 0.0));
        }
        Ok(values)
    }

    /// Compiled `dep, dep', ..., dep^(order)` of a closed-form component,
    /// evaluated through [`ClosedEvaluator::at`].
    pub fn compile_closed(&self, dep: &str, order: usize, params: &BTreeMap<String, f64>) -> Result<ClosedEvaluator> {
        let Some(Component::Closed(e)) = self.component(dep) else {
            return Err(Error::InvalidParameter(format!("candidate has no closed component for {dep}")));
        };
        let by = self.jet.independent_letters()[0];
        let vars = self.variables();
        let mut exprs = Vec::with_capacity(order + 1);
        let mut d = e.clone();
        for n in 0..=order {
            if n > 0 {
                d = total_derivative(&d, by, &self.jet);
            }
            exprs.push(Compiled::new(&d, &vars)?);
        }
        Ok(ClosedEvaluator {
            exprs,
            values: self.values(0.0, params)?,
        })
    }

    /// Values of `dep, dep', ..., dep^(order)` at `s`.
    pub fn derivatives(
        &self,
        dep: &str,
        order: usize,
        s: f64,
        params: &BTreeMap<String, f64>,
    ) -> Result<Vec<Complex64>> {
        let comp = self
            .component(dep)
            .ok_or_else(|| Error::InvalidParameter(format!("candidate has no component for {dep}")))?;
        match comp {
            Component::Closed(_) => self.compile_closed(dep, order, params)?.at(s),
            Component::Sn { amplitude } => {
                if order > 3 {
                    return Err(Error::Unsupported("sn derivatives above third order".into()));
                }
                let a = Compiled::new(amplitude, &self.variables())?.eval(&self.values(s, params)?)?;
                let d = sn_derivatives(s, value_of(params, "k")?)?;
                Ok(d[..=order].iter().map(|x| a * x).collect())
            }
        }
    }

    /// Closed-form expression of a component, if it has one.
    pub fn closed(&self, dep: &str) -> Option<&Expr> {
        match self.component(dep)? {
            Component::Closed(e) => Some(e),
            Component::Sn { .. } => None,
        }
    }
}

/// Precompiled derivatives of one closed-form component at fixed parameters.
#[derive(Clone, Debug)]
pub struct ClosedEvaluator {
    exprs: Vec<Compiled>,
    values: Vec<Complex64>,
}

impl ClosedEvaluator {
    pub fn at(&self, s: f64) -> Result<Vec<Complex64>> {
        let mut values = self.values.clone();
        values[0] = Complex64::new(s, 0.0);
        self.exprs.iter().map(|c| c.eval(&values)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleDomain {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl Default for SampleDomain {
    fn default() -> Self {
        SampleDomain {
            lo: 0.0,
            hi: 2.0 * std::f64::consts::PI,
            samples: 200,
        }
    }
}

impl SampleDomain {
    /// Cell midpoints, so that interval endpoints (often poles) are avoided.
    pub fn points(&self) -> Vec<f64> {
        let h = (self.hi - self.lo) / self.samples as f64;
        (0..self.samples).map(|i| self.lo + (i as f64 + 0.5) * h).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericCheck {
    pub params: BTreeMap<String, f64>,
    pub domain: SampleDomain,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VerifyMode {
    Symbolic,
    Numeric(NumericCheck),
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionReport {
    pub passed: bool,
    /// Symbolic outcome; `None` in numeric mode.
    pub status: Option<ZeroTest>,
    /// Residual per equation after substitution (symbolic mode).
    pub residuals: Vec<String>,
    /// How each constraint was used: solved for a parameter, or its numeric value.
    pub constraints: Vec<String>,
    pub max_residual: Option<f64>,
    pub samples: usize,
    pub excluded: usize,
}

fn check_dependents(system: &OdeSystem, cand: &SolutionCandidate) -> Result<()> {
    for d in &system.jet.dependents {
        if cand.component(d).is_none() {
            return Err(Error::InvalidParameter(format!("candidate has no component for {d}")));
        }
    }
    Ok(())
}

fn working_jet(system: &OdeSystem, cand: &SolutionCandidate) -> JetSpec {
    let params: Vec<&str> = cand.jet.parameters.iter().map(String::as_str).collect();
    system.jet.clone().with_parameters(&params)
}

/// Solves `constraint = 0` for the first parameter in which it is linear with
/// an invertible coefficient.
fn solve_constraint(constraint: &Expr, params: &[String]) -> Option<(Atom, Expr)> {
    for p in params {
        let a = Atom::sym(p);
        if !constraint.contains_atom(&a) {
            continue;
        }
        let Ok(alpha) = constraint.derive(&a) else { continue };
        if alpha.contains_atom(&a) || alpha.as_monomial().is_none() {
            continue;
        }
        let beta = constraint - &(&alpha * &Expr::atom(a.clone()));
        let Ok(inv) = alpha.recip() else { continue };
        return Some((a, -(&beta * &inv)));
    }
    None
}

/// Substitutes the candidate into the system, symbolically (expect zero
/// after imposing the constraints) or numerically at concrete parameters.
pub fn verify_solution(system: &OdeSystem, cand: &SolutionCandidate, mode: &VerifyMode) -> Result<SolutionReport> {
    check_dependents(system, cand)?;
    match mode {
        VerifyMode::Symbolic => verify_symbolic(system, cand),
        VerifyMode::Numeric(check) => verify_numeric(system, cand, check),
    }
}

fn verify_symbolic(system: &OdeSystem, cand: &SolutionCandidate) -> Result<SolutionReport> {
    let jet = working_jet(system, cand);
    let by = system.independent();
    let mut bindings = BTreeMap::new();
    for e in &system.equations {
        for j in e.jets() {
            let comp = match cand.component(&j.var) {
                Some(Component::Closed(c)) => c.clone(),
                Some(Component::Sn { .. }) => {
                    return Err(Error::Unsupported(
                        "elliptic components are checked numerically".into(),
                    ))
                }
                None => continue,
            };
            let mut d = comp;
            for _ in 0..j.order() {
                d = total_derivative(&d, by, &jet);
            }
            bindings.insert(Atom::Jet(j), d);
        }
    }
    let mut residuals = system
        .equations
        .iter()
        .map(|e| e.substitute(&bindings))
        .collect::<Result<Vec<_>>>()?;
    let mut notes = Vec::new();
    for c in &cand.constraints {
        let (p, value) = solve_constraint(c, &jet.parameters).ok_or_else(|| {
            Error::Unsupported(format!("constraint {c} = 0 is not linear in any parameter"))
        })?;
        notes.push(format!("{p} = {value}"));
        residuals = residuals
            .iter()
            .map(|r| r.substitute_one(&p, &value))
            .collect::<Result<_>>()?;
    }
    let mut status = ZeroTest::Zero;
    for r in &residuals {
        match equals_zero(r)? {
            ZeroTest::Nonzero => status = ZeroTest::Nonzero,
            ZeroTest::ProbablyZero if status == ZeroTest::Zero => status = ZeroTest::ProbablyZero,
            _ => {}
        }
    }
    Ok(SolutionReport {
        passed: status.is_zero(),
        status: Some(status),
        residuals: residuals.iter().map(|r| r.to_string()).collect(),
        constraints: notes,
        max_residual: None,
        samples: 0,
        excluded: 0,
    })
}

/// `sn` and its first three derivatives in `s`.
fn sn_derivatives(s: f64, k: f64) -> Result<[f64; 4]> {
    let (sn, cn, dn) = jacobi_sn_cn_dn(s, k)?;
    let k2 = k * k;
    Ok([
        sn,
        cn * dn,
        2.0 * k2 * sn.powi(3) - (1.0 + k2) * sn,
        (6.0 * k2 * sn * sn - (1.0 + k2)) * cn * dn,
    ])
}

/// Evaluates derivatives `0..=order` of each component at a point.
struct ComponentEval {
    dep: String,
    kind: CompKind,
}

enum CompKind {
    Closed(Vec<Compiled>),
    Sn { amplitude: Compiled, k_index: usize },
}

fn value_of(params: &BTreeMap<String, f64>, name: &str) -> Result<f64> {
    params
        .get(name)
        .copied()
        .ok_or_else(|| Error::InvalidParameter(format!("missing value for parameter {name}")))
}

fn verify_numeric(system: &OdeSystem, cand: &SolutionCandidate, check: &NumericCheck) -> Result<SolutionReport> {
    let jet = working_jet(system, cand);
    let by = system.independent();
    let s_atom = Atom::sym(&jet.independents[0]);
    let mut vars = vec![s_atom];
    let mut base_values = vec![Complex64::new(0.0, 0.0)];
    for p in &jet.parameters {
        vars.push(Atom::sym(p));
        base_values.push(Complex64::new(value_of(&check.params, p)?, 0.0));
    }
    let order = system.order();
    let mut comps = Vec::new();
    for (dep, c) in &cand.components {
        if !system.jet.is_dependent(dep) {
            continue;
        }
        let kind = match c {
            Component::Closed(e) => {
                let mut ds = Vec::new();
                let mut d = e.clone();
                for n in 0..=order {
                    if n > 0 {
                        d = total_derivative(&d, by, &jet);
                    }
                    ds.push(Compiled::new(&d, &vars)?);
                }
                CompKind::Closed(ds)
            }
            Component::Sn { amplitude } => {
                if order > 3 {
                    return Err(Error::Unsupported("sn derivatives above third order".into()));
                }
                let k_index = vars
                    .iter()
                    .position(|a| *a == Atom::sym("k"))
                    .ok_or_else(|| Error::InvalidParameter("missing modulus k".into()))?;
                CompKind::Sn {
                    amplitude: Compiled::new(amplitude, &vars)?,
                    k_index,
                }
            }
        };
        comps.push(ComponentEval { dep: dep.clone(), kind });
    }
    // equations are compiled against jets followed by s and the parameters
    let mut eq_vars: Vec<Atom> = Vec::new();
    for d in &system.jet.dependents {
        for n in 0..=order {
            eq_vars.push(Atom::jet(d, &by.to_string().repeat(n)));
        }
    }
    let njets = eq_vars.len();
    eq_vars.extend(vars.iter().cloned());
    let compiled = system
        .equations
        .iter()
        .map(|e| Compiled::new(e, &eq_vars))
        .collect::<Result<Vec<_>>>()?;

    let mut notes = Vec::new();
    let mut constraints_ok = true;
    for c in &cand.constraints {
        let v = Compiled::new(c, &vars)?.eval(&base_values)?;
        notes.push(format!("{c} = {:.3e}", v.norm()));
        if v.norm() > check.tol {
            constraints_ok = false;
        }
    }

    let mut max_res: f64 = 0.0;
    let mut used = 0;
    let mut excluded = 0;
    'points: for s in check.domain.points() {
        let mut values = base_values.clone();
        values[0] = Complex64::new(s, 0.0);
        let mut jets = vec![Complex64::new(0.0, 0.0); njets];
        for (di, d) in system.jet.dependents.iter().enumerate() {
            let comp = comps.iter().find(|c| &c.dep == d).expect("checked above");
            let derivs: Vec<Complex64> = match &comp.kind {
                CompKind::Closed(ds) => {
                    let mut out = Vec::new();
                    for c in ds {
                        match c.eval(&values) {
                            Ok(v) => out.push(v),
                            Err(Error::Pole(_)) => {
                                excluded += 1;
                                continue 'points;
                            }
                            Err(e) => return Err(e),
                        }
                    }
                    out
                }
                CompKind::Sn { amplitude, k_index } => {
                    let a = amplitude.eval(&values)?;
                    let d = sn_derivatives(s, values[*k_index].re)?;
                    d[..=order].iter().map(|x| a * x).collect()
                }
            };
            for (n, v) in derivs.into_iter().enumerate() {
                jets[di * (order + 1) + n] = v;
            }
        }
        let mut point = jets;
        point.extend(values.iter().copied());
        for c in &compiled {
            match c.eval(&point) {
                Ok(r) => max_res = max_res.max(r.norm()),
                Err(Error::Pole(_)) => {
                    excluded += 1;
                    continue 'points;
                }
                Err(e) => return Err(e),
            }
        }
        used += 1;
    }
    if used == 0 {
        return Err(Error::AllSamplesFailed);
    }
    Ok(SolutionReport {
        passed: constraints_ok && max_res < check.tol,
        status: None,
        residuals: Vec::new(),
        constraints: notes,
        max_residual: Some(max_res),
        samples: used,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::{self, PrintedOde};

    #[test]
    fn tan_branch_is_symbolically_zero() {
        let sys = PrintedOde::Member2FirstOrder.system().unwrap();
        let r = verify_solution(&sys, &catalogue::tan_solution().unwrap(), &VerifyMode::Symbolic).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn perturbed_candidate_fails() {
        let sys = PrintedOde::Member2FirstOrder.system().unwrap();
        let cand = SolutionCandidate::parse(
            &JetSpec::ode(&["F", "G"], &["c", "s0"], 1),
            &[("F", "c/2"), ("G", "-1/2*c*tan(1/2*c*s - 1/2*c*s0) + s")],
            &[],
        )
        .unwrap();
        let r = verify_solution(&sys, &cand, &VerifyMode::Symbolic).unwrap();
        assert!(!r.passed);
        let params = [("c", 1.0), ("s0", 0.0)].map(|(k, v)| (k.to_string(), v)).into();
        let num = NumericCheck {
            params,
            domain: SampleDomain {
                lo: 0.0,
                hi: 2.0,
                samples: 50,
            },
            tol: 1e-9,
        };
        let r = verify_solution(&sys, &catalogue::tan_solution().unwrap(), &VerifyMode::Numeric(num)).unwrap();
        assert!(r.passed && r.max_residual.unwrap() < 1e-12);
    }
}
