use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::expr::{Atom, Compiled, Expr};
use crate::hierarchy::PdeSystem;
use crate::jet::{total_derivative, JetSpec};
use crate::{Error, Rational, Result};

use super::candidate::{Component, SolutionCandidate};

/// One summand of a closed-form antiderivative.
#[derive(Clone, Debug, PartialEq)]
pub enum AntiTerm {
    Closed(Expr),
    /// `scale * ln|arg|`
    LogAbs { scale: Expr, arg: Expr },
    /// `scale * ln|cos(arg)|`
    LogAbsCos { scale: Expr, arg: Expr },
    /// Integrated numerically from `s = 0`.
    Quadrature(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Antiderivative {
    pub var: String,
    pub terms: Vec<AntiTerm>,
}

impl fmt::Display for Antiderivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match t {
                AntiTerm::Closed(e) => write!(f, "({e})")?,
                AntiTerm::LogAbs { scale, arg } => write!(f, "({scale})*ln|{arg}|")?,
                AntiTerm::LogAbsCos { scale, arg } => write!(f, "({scale})*ln|cos({arg})|")?,
                AntiTerm::Quadrature(e) => write!(f, "integral_0^{} ({e})", self.var)?,
            }
        }
        Ok(())
    }
}

fn depends_on(e: &Expr, s: &Atom) -> bool {
    e.contains_atom(s)
}

/// `d/ds arg` when it is free of `s`.
fn linear_rate(arg: &Expr, s: &Atom) -> Result<Option<Expr>> {
    let rate = arg.derive(s)?;
    Ok((!rate.is_zero() && !depends_on(&rate, s)).then_some(rate))
}

fn single_term(m: &crate::expr::Monomial, c: &Rational) -> Expr {
    Expr::term(m.clone(), c.clone())
}

/// Antiderivative in `var` from a small table: powers of `var`, single
/// `tan`, `sin`, `cos`, `exp` factors with linear argument, and logarithmic
/// derivatives `k d'/d`. Anything else is integrated numerically.
pub fn antiderivative(e: &Expr, jet: &JetSpec) -> Result<Antiderivative> {
    let var = jet.independents[0].clone();
    let s = Atom::sym(&var);
    let sv = Expr::atom(s.clone());
    let mut terms = Vec::new();
    let mut closed = Expr::zero();
    let mut quad = Expr::zero();
    let by = jet.independent_letters()[0];
    for (key, coef) in e.split_by(|a| matches!(a, Atom::Inv(_))) {
        if key.is_one() {
            for (m, q) in coef.terms() {
                let t = single_term(m, q);
                let (special, rest) = m.split(|a| a.argument().is_some_and(|x| depends_on(x, &s)));
                let rest = Expr::term(rest, q.clone());
                if special.is_one() {
                    let p = m.power_of(&s);
                    if p == -1 {
                        terms.push(AntiTerm::LogAbs {
                            scale: (&rest * &sv),
                            arg: sv.clone(),
                        });
                    } else {
                        closed += (&t * &sv).scale(&Rational::new(1.into(), (p + 1).into()));
                    }
                    continue;
                }
                if depends_on(&rest, &s) || special.factors().len() != 1 || special.factors()[0].1 != 1 {
                    quad += t;
                    continue;
                }
                let atom = special.factors()[0].0.clone();
                let arg = atom.argument().cloned().expect("special atoms carry an argument");
                let Some(rate) = linear_rate(&arg, &s)? else {
                    quad += t;
                    continue;
                };
                let over = &rest * &rate.recip()?;
                match atom {
                    Atom::Tan(_) => terms.push(AntiTerm::LogAbsCos { scale: -over, arg }),
                    Atom::Sin(_) => closed += -(&over * &Expr::cos(arg)?),
                    Atom::Cos(_) => closed += &over * &Expr::sin(arg)?,
                    Atom::Exp(_) => closed += &over * &Expr::exp(arg)?,
                    _ => quad += t,
                }
            }
            continue;
        }
        let whole = &coef * &Expr::term(key.clone(), Rational::from_integer(1.into()));
        let log = match key.factors() {
            [(Atom::Inv(d), 1)] => {
                let dd = total_derivative(d, by, jet);
                let found = dd.terms().next().and_then(|(m, q)| {
                    let lambda = coef.coefficient(m) / q;
                    (!num_traits::Zero::is_zero(&lambda) && (&coef - &dd.scale(&lambda)).is_zero()).then(|| {
                        AntiTerm::LogAbs {
                            scale: Expr::from_rational(lambda),
                            arg: (**d).clone(),
                        }
                    })
                });
                found
            }
            _ => None,
        };
        match log {
            Some(l) => terms.push(l),
            None => quad += whole,
        }
    }
    if !closed.is_zero() {
        terms.insert(0, AntiTerm::Closed(closed));
    }
    if !quad.is_zero() {
        terms.push(AntiTerm::Quadrature(quad));
    }
    Ok(Antiderivative { var, terms })
}

const SIMPSON_TOL: f64 = 1e-10;

fn simpson(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    fn rec(
        f: &dyn Fn(f64) -> Result<f64>,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm)?, f(rm)?);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return Ok(left + right + (left + right - whole) / 15.0);
        }
        Ok(rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
            + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    let (fa, fb, fm) = (f(a)?, f(b)?, f(0.5 * (a + b))?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, SIMPSON_TOL, 40)
}

#[derive(Clone, Debug)]
enum Piece {
    Plain(Compiled),
    LogAbs(Compiled, Compiled),
    LogAbsCos(Compiled, Compiled),
    Quadrature(Compiled),
}

/// A real function of `s` with parameters bound, for lifting.
#[derive(Clone, Debug)]
pub struct ScalarProfile {
    pieces: Vec<Piece>,
    params: Vec<Complex64>,
    pub description: String,
}

fn bind(jet: &JetSpec, params: &BTreeMap<String, f64>) -> Result<(Vec<Atom>, Vec<Complex64>)> {
    let mut vars = vec![Atom::sym(&jet.independents[0])];
    let mut values = Vec::new();
    for p in &jet.parameters {
        vars.push(Atom::sym(p));
        let v = params
            .get(p)
            .ok_or_else(|| Error::InvalidParameter(format!("missing value for parameter {p}")))?;
        values.push(Complex64::new(*v, 0.0));
    }
    Ok((vars, values))
}

impl ScalarProfile {
    pub fn from_expr(e: &Expr, jet: &JetSpec, params: &BTreeMap<String, f64>) -> Result<ScalarProfile> {
        let (vars, values) = bind(jet, params)?;
        Ok(ScalarProfile {
            pieces: vec![Piece::Plain(Compiled::new(e, &vars)?)],
            params: values,
            description: e.to_string(),
        })
    }

    pub fn from_antiderivative(
        a: &Antiderivative,
        jet: &JetSpec,
        params: &BTreeMap<String, f64>,
    ) -> Result<ScalarProfile> {
        let (vars, values) = bind(jet, params)?;
        let c = |e: &Expr| Compiled::new(e, &vars);
        let pieces = a
            .terms
            .iter()
            .map(|t| {
                Ok(match t {
                    AntiTerm::Closed(e) => Piece::Plain(c(e)?),
                    AntiTerm::LogAbs { scale, arg } => Piece::LogAbs(c(scale)?, c(arg)?),
                    AntiTerm::LogAbsCos { scale, arg } => Piece::LogAbsCos(c(scale)?, c(arg)?),
                    AntiTerm::Quadrature(e) => Piece::Quadrature(c(e)?),
                })
            })
            .collect::<Result<_>>()?;
        Ok(ScalarProfile {
            pieces,
            params: values,
            description: a.to_string(),
        })
    }

    fn point(&self, s: f64) -> Vec<Complex64> {
        let mut p = Vec::with_capacity(self.params.len() + 1);
        p.push(Complex64::new(s, 0.0));
        p.extend_from_slice(&self.params);
        p
    }

    /// Real part of the profile at `s`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        let p = self.point(s);
        let mut out = 0.0;
        for piece in &self.pieces {
            out += match piece {
                Piece::Plain(c) => c.eval(&p)?.re,
                Piece::LogAbs(k, a) => {
                    let v = a.eval(&p)?.norm();
                    if v < 1e-300 {
                        return Err(Error::Pole(format!("ln at s = {s}")));
                    }
                    k.eval(&p)?.re * v.ln()
                }
                Piece::LogAbsCos(k, a) => {
                    let v = a.eval(&p)?.cos().norm();
                    if v < 1e-300 {
                        return Err(Error::Pole(format!("ln|cos| at s = {s}")));
                    }
                    k.eval(&p)?.re * v.ln()
                }
                Piece::Quadrature(c) => simpson(&|x| Ok(c.eval(&self.point(x))?.re), 0.0, s)?,
            };
        }
        Ok(out)
    }
}

/// Antiderivatives of every component of a candidate for an order-reduced
/// system, named by the lower-case dependents they define.
pub fn integrate_candidate(
    cand: &SolutionCandidate,
    params: &BTreeMap<String, f64>,
) -> Result<Vec<(String, ScalarProfile)>> {
    cand.components
        .iter()
        .map(|(d, c)| match c {
            Component::Closed(e) => {
                let a = antiderivative(e, &cand.jet)?;
                Ok((d.to_lowercase(), ScalarProfile::from_antiderivative(&a, &cand.jet, params)?))
            }
            Component::Sn { .. } => Err(Error::Unsupported("no antiderivative table entry for sn".into())),
        })
        .collect()
}

/// Rectangular `(t, x)` window sampled on an `n x n` grid, with the
/// finite-difference step.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftGrid {
    pub t: (f64, f64),
    pub x: (f64, f64),
    pub n: usize,
    pub h: f64,
}

impl Default for LiftGrid {
    fn default() -> Self {
        LiftGrid {
            t: (0.0, 1.0),
            x: (-1.0, 1.0),
            n: 50,
            h: 1e-2,
        }
    }
}

/// Finite-difference weights for the `m`-th derivative at 0 on the given
/// nodes.
fn fd_weights(m: usize, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Central stencil `(offset, weight)` for the `k`-th derivative, eighth order
/// for `k <= 2`.
fn stencil(k: usize) -> Vec<(i32, f64)> {
    if k == 0 {
        return vec![(0, 1.0)];
    }
    let half = if k <= 2 { 4 } else { 5 };
    let offsets: Vec<i32> = (-half..=half).collect();
    let nodes: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    offsets.into_iter().zip(fd_weights(k, &nodes)).collect()
}

/// Maximum PDE residual of `u^A(t, x) = profile_A(x - c t)` over the grid,
/// with all jets approximated by central finite differences.
pub fn lift_and_check(
    pde: &PdeSystem,
    c: f64,
    profiles: &[(String, ScalarProfile)],
    params: &BTreeMap<String, f64>,
    grid: &LiftGrid,
) -> Result<f64> {
    let jet = &pde.jet;
    let letters = jet.independent_letters();
    let time = letters[0].to_string();
    let mut residual_exprs = Vec::new();
    for (d, rhs) in &pde.equations {
        residual_exprs.push(&Expr::jet(d, &time) - rhs);
    }
    let mut jets: Vec<Atom> = residual_exprs
        .iter()
        .flat_map(|e| e.jets())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(Atom::Jet)
        .collect();
    jets.retain(|a| a.as_jet().is_some_and(|j| jet.is_dependent(&j.var)));
    let mut vars = jets.clone();
    vars.extend(jet.independents.iter().map(|i| Atom::sym(i)));
    let mut param_values = Vec::new();
    for p in &jet.parameters {
        vars.push(Atom::sym(p));
        param_values.push(Complex64::new(
            *params
                .get(p)
                .ok_or_else(|| Error::InvalidParameter(format!("missing value for parameter {p}")))?,
            0.0,
        ));
    }
    let compiled = residual_exprs
        .iter()
        .map(|e| Compiled::new(e, &vars))
        .collect::<Result<Vec<_>>>()?;
    let profile = |name: &str| {
        profiles
            .iter()
            .find(|(d, _)| d == name)
            .map(|(_, p)| p)
            .ok_or_else(|| Error::InvalidParameter(format!("no profile for {name}")))
    };
    let plans = jets
        .iter()
        .map(|a| {
            let j = a.as_jet().expect("filtered to jets");
            let (kt, kx) = (j.count(letters[0]), j.count(letters[1]));
            Ok((profile(&j.var)?, stencil(kt), stencil(kx), (kt + kx) as i32))
        })
        .collect::<Result<Vec<_>>>()?;
    let h = grid.h;
    let step = |(lo, hi): (f64, f64)| if grid.n > 1 { (hi - lo) / (grid.n - 1) as f64 } else { 0.0 };
    let (dt, dx) = (step(grid.t), step(grid.x));
    let points: Vec<(f64, f64)> = (0..grid.n)
        .flat_map(|i| (0..grid.n).map(move |j| (i, j)))
        .map(|(i, j)| (grid.t.0 + i as f64 * dt, grid.x.0 + j as f64 * dx))
        .collect();
    let worst = points
        .par_iter()
        .map(|&(t, x)| -> Result<f64> {
            let mut point = Vec::with_capacity(vars.len());
            for (prof, st, sx, order) in &plans {
                let mut v = 0.0;
                for (ot, wt) in st {
                    for (ox, wx) in sx {
                        let tt = t + *ot as f64 * h;
                        let xx = x + *ox as f64 * h;
                        let u = prof.eval(xx - c * tt)?;
                        if !u.is_finite() {
                            return Err(Error::Pole(format!("profile at s = {}", xx - c * tt)));
                        }
                        v += wt * wx * u;
                    }
                }
                point.push(Complex64::new(v / h.powi(*order), 0.0));
            }
            point.push(Complex64::new(t, 0.0));
            point.push(Complex64::new(x, 0.0));
            point.extend_from_slice(&param_values);
            let mut m: f64 = 0.0;
            for c in &compiled {
                m = m.max(c.eval(&point)?.norm());
            }
            Ok(m)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue;
    use crate::expr::parse_expr;

    #[test]
    fn weights_are_exact_on_polynomials() {
        let w = stencil(2);
        let second: f64 = w.iter().map(|(o, c)| c * (*o as f64).powi(2)).sum();
        assert!((second - 2.0).abs() < 1e-10);
        let zeroth: f64 = w.iter().map(|(_, c)| c).sum();
        assert!(zeroth.abs() < 1e-10);
    }

    #[test]
    fn table_entries() {
        let jet = JetSpec::ode(&["F", "G"], &["c", "s0"], 1);
        let p = |s: &str| parse_expr(s, &jet).unwrap();
        let a = antiderivative(&p("c/2 + 3*s^2"), &jet).unwrap();
        assert_eq!(a.terms, vec![AntiTerm::Closed(p("c*s/2 + s^3"))]);
        let g = antiderivative(&p("-1/2*c*tan(1/2*c*s - 1/2*c*s0)"), &jet).unwrap();
        assert!(matches!(&g.terms[..], [AntiTerm::LogAbsCos { .. }]), "{g}");
        let l = antiderivative(&p("2*s*(s^2 + 1)^-1"), &jet).unwrap();
        assert!(matches!(&l.terms[..], [AntiTerm::LogAbs { .. }]), "{l}");
        let q = antiderivative(&p("(s^3 + 2)^-1"), &jet).unwrap();
        assert!(matches!(&q.terms[..], [AntiTerm::Quadrature(_)]));
        let params = [("c", 1.0), ("s0", 0.0)].map(|(k, v)| (k.to_string(), v)).into();
        let prof = ScalarProfile::from_antiderivative(&q, &jet, &params).unwrap();
        // integral_0^1 ds / (s^3 + 2)
        assert!((prof.eval(1.0).unwrap() - 0.450_822_129_263_754_9).abs() < 1e-9);
    }

    #[test]
    fn tan_branch_lifts_to_member_two() {
        let params: BTreeMap<String, f64> = [("c", 1.0), ("s0", 0.0)].map(|(k, v)| (k.to_string(), v)).into();
        let cand = catalogue::tan_solution().unwrap();
        let profiles = integrate_candidate(&cand, &params).unwrap();
        let pde = catalogue::member(2).unwrap();
        let named: Vec<(String, ScalarProfile)> = profiles
            .into_iter()
            .map(|(d, p)| (if d == "f" { "v".into() } else { "w".into() }, p))
            .collect();
        let r = lift_and_check(&pde, 1.0, &named, &params, &LiftGrid::default()).unwrap();
        assert!(r < 1e-6, "{r}");
    }
}
