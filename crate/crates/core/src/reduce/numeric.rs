use std::collections::BTreeMap;

use num_complex::{Complex, Complex64};
use num_traits::Float;

use crate::expr::{Atom, Compiled, Jet};
use crate::{Error, Result};

use super::{OdeSystem, SolutionCandidate};
use crate::symmetry::DiffSystem;

fn modulus_check<T: Float>(k: T) -> Result<T> {
    let k = k.abs();
    if !(k < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "elliptic modulus must lie in [0, 1), got {}",
            k.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(k)
}

/// Arithmetic-geometric mean ladder `(a_n, c_n)` starting from
/// `a_0 = 1, b_0 = sqrt(1 - k^2), c_0 = k`.
fn agm_ladder<T: Float>(k: T) -> Vec<(T, T)> {
    let tol = T::from(1e-15).unwrap();
    let two = T::one() + T::one();
    let mut a = T::one();
    let mut b = (T::one() - k * k).sqrt();
    let mut c = k;
    let mut ladder = vec![(a, c)];
    while c.abs() > tol && ladder.len() < 64 {
        let an = (a + b) / two;
        let bn = (a * b).sqrt();
        c = (a - b) / two;
        a = an;
        b = bn;
        ladder.push((a, c));
    }
    ladder
}

/// Complete elliptic integral of the first kind, `K(k) = pi / (2 agm(1, k'))`.
pub fn complete_elliptic_k<T: Float>(k: T) -> Result<T> {
    let k = modulus_check(k)?;
    let (a, _) = *agm_ladder(k).last().expect("ladder is never empty");
    let pi = T::from(std::f64::consts::PI).unwrap();
    Ok(pi / ((T::one() + T::one()) * a))
}

/// `(sn, cn, dn)(u, k)` by the descending Landen transformation.
pub fn jacobi_sn_cn_dn<T: Float>(u: T, k: T) -> Result<(T, T, T)> {
    let k = modulus_check(k)?;
    let ladder = agm_ladder(k);
    let n = ladder.len() - 1;
    let two = T::one() + T::one();
    let (an, _) = ladder[n];
    let mut phi = two.powi(n as i32) * an * u;
    for i in (1..=n).rev() {
        let (a, c) = ladder[i];
        phi = (phi + (c / a * phi.sin()).asin()) / two;
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (T::one() - k * k * sn * sn).sqrt();
    Ok((sn, cn, dn))
}

pub fn jacobi_sn<T: Float>(u: T, k: T) -> Result<T> {
    Ok(jacobi_sn_cn_dn(u, k)?.0)
}

/// Fixed-step samples of a first-order system `y' = F(s, y)`.
#[derive(Clone, Debug)]
pub struct Trajectory<T = f64> {
    pub labels: Vec<String>,
    pub s: Vec<T>,
    pub states: Vec<Vec<Complex<T>>>,
    pub step: T,
    pub method: String,
    /// Where integration stopped because the state exceeded the guard.
    pub pole: Option<T>,
}

impl<T: Float> Trajectory<T> {
    pub fn component(&self, label: &str) -> Option<Vec<Complex<T>>> {
        let i = self.labels.iter().position(|l| l == label)?;
        Some(self.states.iter().map(|y| y[i]).collect())
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

fn axpy<T: Float>(y: &[Complex<T>], h: T, k: &[Complex<T>]) -> Vec<Complex<T>> {
    y.iter().zip(k).map(|(a, b)| *a + *b * h).collect()
}

/// Classical RK4 from `s0` to `s1` with step `h`. Integration stops early,
/// recording the abscissa, once any component exceeds `guard` in modulus or
/// stops being finite.
pub fn integrate_rk4<T, F>(
    f: F,
    labels: Vec<String>,
    init: Vec<Complex<T>>,
    range: (T, T),
    h: T,
    guard: T,
) -> Result<Trajectory<T>>
where
    T: Float,
    F: Fn(T, &[Complex<T>]) -> Result<Vec<Complex<T>>>,
{
    if !(h > T::zero()) || !(range.1 > range.0) {
        return Err(Error::InvalidParameter("need h > 0 and a nonempty range".into()));
    }
    let two = T::one() + T::one();
    let six = T::from(6.0).unwrap();
    let steps = ((range.1 - range.0) / h).round().to_usize().unwrap_or(0);
    let mut traj = Trajectory {
        labels,
        s: vec![range.0],
        states: vec![init.clone()],
        step: h,
        method: "rk4".into(),
        pole: None,
    };
    let mut y = init;
    for n in 0..steps {
        let s = range.0 + h * T::from(n).unwrap();
        let k1 = f(s, &y)?;
        let k2 = f(s + h / two, &axpy(&y, h / two, &k1))?;
        let k3 = f(s + h / two, &axpy(&y, h / two, &k2))?;
        let k4 = f(s + h, &axpy(&y, h, &k3))?;
        y = y
            .iter()
            .enumerate()
            .map(|(i, yi)| *yi + (k1[i] + (k2[i] + k3[i]) * two + k4[i]) * (h / six))
            .collect();
        let next = range.0 + h * T::from(n + 1).unwrap();
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite() || z.norm() > guard) {
            traj.pole = Some(next);
            break;
        }
        traj.s.push(next);
        traj.states.push(y.clone());
    }
    Ok(traj)
}

/// An ODE system rewritten as a first-order system in the state
/// `(u, u', ..., u^(n-1))` per dependent, with parameters bound.
#[derive(Clone, Debug)]
pub struct ExplicitSystem {
    pub labels: Vec<String>,
    state_jets: Vec<Atom>,
    /// For each state slot: index of the slot holding its derivative, or the
    /// compiled right-hand side of the rule.
    slots: Vec<Slot>,
    params: Vec<Complex64>,
}

#[derive(Clone, Debug)]
enum Slot {
    Shift(usize),
    Rule(Compiled),
}

fn state_label(var: &str, k: usize) -> String {
    format!("{var}{}", "'".repeat(k))
}

impl ExplicitSystem {
    pub fn new(system: &OdeSystem, params: &BTreeMap<String, f64>) -> Result<ExplicitSystem> {
        let solved = system.solved()?;
        let by = system.independent().to_string();
        let mut state_jets = Vec::new();
        let mut labels = Vec::new();
        let mut leads = Vec::new();
        for d in &system.jet.dependents {
            let rule = solved
                .rules
                .iter()
                .find(|r| r.var == *d)
                .ok_or_else(|| Error::NotSolved(format!("no rule for {d}")))?;
            if rule.lead.deriv.chars().any(|c| c.to_string() != by) {
                return Err(Error::NotSolved(format!("unexpected lead {}", Atom::Jet(rule.lead.clone()))));
            }
            for k in 0..rule.lead.order() {
                state_jets.push(Atom::Jet(Jet::new(d, &by.repeat(k))));
                labels.push(state_label(d, k));
            }
            leads.push((rule.lead.order(), rule.rhs.clone()));
        }
        let mut vars = state_jets.clone();
        vars.push(Atom::sym(&by));
        let mut values = Vec::new();
        for p in &system.jet.parameters {
            vars.push(Atom::sym(p));
            let v = params
                .get(p)
                .ok_or_else(|| Error::InvalidParameter(format!("missing value for parameter {p}")))?;
            values.push(Complex64::new(*v, 0.0));
        }
        let mut slots = Vec::new();
        let mut offset = 0;
        for (order, rhs) in leads {
            for k in 0..order {
                if k + 1 < order {
                    slots.push(Slot::Shift(offset + k + 1));
                } else {
                    let c = Compiled::new(&rhs, &vars).map_err(|e| match e {
                        Error::UnboundAtom(a) => Error::NotSolved(format!("right-hand side uses {a}")),
                        other => other,
                    })?;
                    slots.push(Slot::Rule(c));
                }
            }
            offset += order;
        }
        Ok(ExplicitSystem {
            labels,
            state_jets,
            slots,
            params: values,
        })
    }

    pub fn dimension(&self) -> usize {
        self.slots.len()
    }

    pub fn rhs(&self, s: f64, y: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut point = Vec::with_capacity(y.len() + 1 + self.params.len());
        point.extend_from_slice(y);
        point.push(Complex64::new(s, 0.0));
        point.extend_from_slice(&self.params);
        self.slots
            .iter()
            .map(|slot| match slot {
                Slot::Shift(i) => Ok(y[*i]),
                Slot::Rule(c) => c.eval(&point),
            })
            .collect()
    }

    /// Initial state read off a closed-form candidate at `s0`.
    pub fn initial_state(
        &self,
        cand: &SolutionCandidate,
        s0: f64,
        params: &BTreeMap<String, f64>,
    ) -> Result<Vec<Complex64>> {
        self.state_jets
            .iter()
            .map(|a| {
                let j = a.as_jet().expect("state coordinates are jets");
                let d = cand.derivatives(&j.var, j.order(), s0, params)?;
                Ok(d[j.order()])
            })
            .collect()
    }
}

pub const DEFAULT_GUARD: f64 = 1e8;

/// RK4 on an explicit system with the default pole guard.
pub fn integrate_system(
    system: &ExplicitSystem,
    init: Vec<Complex64>,
    range: (f64, f64),
    h: f64,
) -> Result<Trajectory<f64>> {
    if init.len() != system.dimension() {
        return Err(Error::InvalidParameter(format!(
            "initial state has {} entries, system needs {}",
            init.len(),
            system.dimension()
        )));
    }
    integrate_rk4(|s, y| system.rhs(s, y), system.labels.clone(), init, range, h, DEFAULT_GUARD)
}
