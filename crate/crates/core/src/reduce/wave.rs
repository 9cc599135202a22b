use std::collections::BTreeMap;

use crate::expr::{equals_zero, Atom, Expr, Jet, Monomial, ZeroTest};
use crate::hierarchy::PdeSystem;
use crate::jet::{total_derivative, JetSpec};
use crate::symmetry::VectorField;
use crate::{Error, Rational, Result};

use super::OdeSystem;

const ODE_NAMES: [&str; 2] = ["f", "g"];

/// Invariants of a translation generator: `s` as a function of `(t, x)`, and
/// `u^A = f^A(s) + shift^A(t, x)` with linear shifts.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMap {
    pub s: Expr,
    /// `ds/dt` and `ds/dx`.
    pub ds: [Expr; 2],
    /// `(pde dependent, ode dependent, shift)`.
    pub dependents: Vec<(String, String, Expr)>,
    pub ode_jet: JetSpec,
}

fn is_constant(e: &Expr, jet: &JetSpec) -> bool {
    !e.any_atom(&|a| match a {
        Atom::Jet(_) => true,
        Atom::Sym(n) => jet.independents.iter().any(|i| **i == **n),
        _ => false,
    })
}

fn parameters_of(e: &Expr, out: &mut Vec<String>) {
    for a in e.leaf_atoms() {
        let name = match &a {
            Atom::Sym(n) | Atom::Sqrt(n) => n.to_string(),
            _ => continue,
        };
        if !out.contains(&name) {
            out.push(name);
        }
    }
}

/// Similarity variable and invariant dependents of `X` with constant
/// coefficients on a `(t, x)` jet space.
pub fn invariants_of_translation(x: &VectorField) -> Result<SimilarityMap> {
    let jet = &x.jet;
    if jet.independents.len() != 2 {
        return Err(Error::NotTranslation("expected two independents".into()));
    }
    if jet.dependents.len() > ODE_NAMES.len() {
        return Err(Error::Unsupported(format!(
            "{} dependents; at most two are supported",
            jet.dependents.len()
        )));
    }
    if let Some(c) = x.components().find(|c| !is_constant(c, jet)) {
        return Err(Error::NotTranslation(format!("coefficient {c} is not constant")));
    }
    let t = Expr::sym(&jet.independents[0]);
    let xs = Expr::sym(&jet.independents[1]);
    let (xt, xx) = (&x.xi[0], &x.xi[1]);
    let (s, ds, along, divisor) = if !xt.is_zero() {
        let speed = xx * &xt.recip()?;
        (&xs - &(&speed * &t), [-speed, Expr::one()], t, xt.clone())
    } else if !xx.is_zero() {
        (t, [Expr::one(), Expr::zero()], xs, xx.clone())
    } else {
        return Err(Error::NotTranslation("no independent is translated".into()));
    };
    let inv = divisor.recip()?;
    let mut params = jet.parameters.clone();
    for c in x.components() {
        parameters_of(c, &mut params);
    }
    params.retain(|p| !jet.independents.contains(p));
    let mut dependents = Vec::new();
    for (i, d) in jet.dependents.iter().enumerate() {
        let shift = &(&x.eta[i] * &inv) * &along;
        dependents.push((d.clone(), ODE_NAMES[i].to_string(), shift));
    }
    let names: Vec<&str> = dependents.iter().map(|(_, o, _)| o.as_str()).collect();
    let param_refs: Vec<&str> = params.iter().map(String::as_str).collect();
    let ode_jet = JetSpec::ode(&names, &param_refs, jet.max_order);
    Ok(SimilarityMap {
        s,
        ds,
        dependents,
        ode_jet,
    })
}

impl SimilarityMap {
    /// Image of a PDE jet coordinate under the map.
    fn image(&self, pde: &JetSpec, j: &Jet) -> Option<Expr> {
        let (_, ode, shift) = self.dependents.iter().find(|(d, _, _)| **d == *j.var)?;
        let letters = pde.independent_letters();
        let mut factor = Expr::one();
        let mut shift_part = shift.clone();
        for (k, l) in letters.iter().enumerate() {
            let n = j.count(*l);
            for _ in 0..n {
                factor = &factor * &self.ds[k];
                shift_part = total_derivative(&shift_part, *l, pde);
            }
        }
        let base = Expr::jet(ode, &"s".repeat(j.order()));
        Some(&(&factor * &base) + &shift_part)
    }

    /// Substitutes the map into an expression on the PDE jet space.
    pub fn apply(&self, pde: &JetSpec, e: &Expr) -> Result<Expr> {
        let mut bindings = BTreeMap::new();
        for j in e.jets() {
            if let Some(img) = self.image(pde, &j) {
                bindings.insert(Atom::Jet(j), img);
            }
        }
        e.substitute(&bindings)
    }
}

/// Result of a travelling-wave reduction together with any parameter-only
/// factors that were divided out.
#[derive(Clone, Debug)]
pub struct WaveReduction {
    pub map: SimilarityMap,
    pub system: OdeSystem,
    pub removed_factors: Vec<String>,
}

fn is_jet_or_independent(a: &Atom, jet: &JetSpec) -> bool {
    match a {
        Atom::Jet(_) => true,
        Atom::Sym(n) => jet.independents.iter().any(|i| **i == **n),
        _ => a.argument().is_some_and(|e| e.any_atom(&|b| matches!(b, Atom::Jet(_)))),
    }
}

/// Splits off a factor depending only on parameters, e.g. `(1 - c) f' -> f'`.
fn remove_content(e: &Expr, jet: &JetSpec) -> (Expr, Option<Expr>) {
    let groups = e.split_by(|a| is_jet_or_independent(a, jet));
    let Some(first) = groups.values().next() else {
        return (e.clone(), None);
    };
    if first.as_rational().is_some() {
        return (e.clone(), None);
    }
    let lead = first.leading_coefficient().cloned().unwrap_or_else(|| Rational::from_integer(1.into()));
    let content = first.scale(&lead.recip());
    let mut out = Expr::zero();
    for (key, coef) in &groups {
        let q = coef.leading_coefficient().cloned().unwrap_or_else(|| Rational::from_integer(0.into()));
        if !(coef - &content.scale(&q)).is_zero() {
            return (e.clone(), None);
        }
        out += Expr::term(key.clone(), q);
    }
    (out, Some(content))
}

/// Divides by the coefficient of the highest-order jet when it is rational.
fn normalise(e: &Expr) -> Expr {
    let Some(j) = e.jets().into_iter().max_by_key(|j| (j.order(), j.clone())) else {
        return e.clone();
    };
    let groups = e.split_by(|a| *a == Atom::Jet(j.clone()));
    let key = Monomial::from_factors(vec![(Atom::Jet(j), 1)]);
    match groups.get(&key).and_then(Expr::as_rational) {
        Some(q) if !num_traits::Zero::is_zero(&q) => e.scale(&q.recip()),
        _ => e.clone(),
    }
}

/// Reduces an evolution system by the invariants of a translation generator.
pub fn reduce_by_translation(system: &PdeSystem, x: &VectorField) -> Result<WaveReduction> {
    let map = invariants_of_translation(x)?;
    let time = system.jet.independent_letters()[0].to_string();
    let mut equations = Vec::new();
    let mut removed = Vec::new();
    for (d, rhs) in &system.equations {
        let h = rhs - &Expr::jet(d, &time);
        let mapped = map.apply(&system.jet, &h)?;
        if let Some(a) = mapped
            .leaf_atoms()
            .into_iter()
            .find(|a| matches!(a, Atom::Sym(n) if system.jet.independents.iter().any(|i| **i == **n)))
        {
            return Err(Error::Reduction(format!(
                "reduced equation for {d} still depends on {a}: {mapped}"
            )));
        }
        let (stripped, content) = remove_content(&mapped, &map.ode_jet);
        if let Some(c) = content {
            removed.push(format!("{c} (assumed nonzero)"));
        }
        equations.push(normalise(&stripped));
    }
    let label = format!("{} reduced by {}", system.label, x.operator_string());
    let ode = OdeSystem::new(map.ode_jet.clone(), equations, &label)?;
    Ok(WaveReduction {
        map,
        system: ode,
        removed_factors: removed,
    })
}

/// Travelling waves `s = x - c t` of a `(t, x)` evolution system.
pub fn travelling_wave_reduce(system: &PdeSystem, c: &Expr) -> Result<WaveReduction> {
    let mut x = VectorField::zero(&system.jet);
    x.set_component(0, Expr::one());
    x.set_component(1, c.clone());
    reduce_by_translation(system, &x)
}

fn rename_jet(e: &Expr, f: &dyn Fn(&Jet) -> Result<Jet>) -> Result<Expr> {
    let mut bindings = BTreeMap::new();
    for j in e.jets() {
        let k = f(&j)?;
        bindings.insert(Atom::Jet(j), Expr::atom(Atom::Jet(k)));
    }
    e.substitute(&bindings)
}

fn shifted_system(
    system: &OdeSystem,
    rename: fn(&str) -> String,
    shift: &dyn Fn(&Jet, char) -> Result<Jet>,
    order: usize,
) -> Result<OdeSystem> {
    let by = system.independent();
    let names: Vec<String> = system.jet.dependents.iter().map(|d| rename(d)).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let params: Vec<&str> = system.jet.parameters.iter().map(String::as_str).collect();
    let jet = JetSpec::new(&[&system.jet.independents[0]], &name_refs, order).with_parameters(&params);
    let equations = system
        .equations
        .iter()
        .map(|e| rename_jet(e, &|j| shift(j, by)))
        .collect::<Result<Vec<_>>>()?;
    OdeSystem::new(jet, equations, &system.label)
}

/// Replaces `f^(k)` by `F^(k-1)` for an autonomous system in which the
/// dependents only occur differentiated.
pub fn order_reduce(system: &OdeSystem) -> Result<OdeSystem> {
    let order = system.order().saturating_sub(1);
    shifted_system(
        system,
        |d| d.to_uppercase(),
        &|j, by| {
            if j.order() == 0 {
                return Err(Error::Reduction(format!("{} appears undifferentiated", j.var)));
            }
            Ok(Jet::new(&j.var.to_uppercase(), &by.to_string().repeat(j.order() - 1)))
        },
        order,
    )
}

/// Inverse of [`order_reduce`]: `F^(k) -> f^(k+1)`.
pub fn raise_order(system: &OdeSystem) -> Result<OdeSystem> {
    shifted_system(
        system,
        |d| d.to_lowercase(),
        &|j, by| Ok(Jet::new(&j.var.to_lowercase(), &by.to_string().repeat(j.order() + 1))),
        system.order() + 1,
    )
}

/// Multiplies through by the denominators hidden in top-level reciprocal
/// atoms, to the lowest power that clears them.
pub fn clear_denominators(e: &Expr) -> Result<Expr> {
    let mut cur = e.clone();
    loop {
        let inv = cur
            .terms()
            .flat_map(|(m, _)| m.factors().iter())
            .find_map(|(a, _)| matches!(a, Atom::Inv(_)).then(|| a.clone()));
        let Some(inv) = inv else { return Ok(cur) };
        let d = inv.argument().cloned().expect("reciprocal atom has an argument");
        let top = cur.terms().map(|(m, _)| m.power_of(&inv)).max().unwrap_or(0).max(0);
        let mut next = Expr::zero();
        for (m, c) in cur.terms() {
            let k = m.power_of(&inv);
            let (_, rest) = m.split(|a| *a == inv);
            next += &Expr::term(rest, c.clone()) * &d.pow(top - k)?;
        }
        cur = next;
    }
}

/// Equation linear in a dependent that is not differentiated there, with
/// that dependent and its coefficient: `E = alpha * G + beta`.
fn pivot_equation(system: &OdeSystem) -> Result<(usize, String, Expr, Expr)> {
    if system.equations.len() != 2 || system.jet.dependents.len() != 2 || system.order() != 1 {
        return Err(Error::Unsupported("elimination needs a first-order pair".into()));
    }
    for (i, e) in system.equations.iter().enumerate() {
        for d in &system.jet.dependents {
            let g = Atom::jet(d, "");
            if !e.contains_atom(&g) || e.jets().iter().any(|j| *j.var == **d && j.order() > 0) {
                continue;
            }
            let alpha = e.derive(&g)?;
            if alpha.contains_atom(&g) {
                continue;
            }
            let beta = e - &(&alpha * &Expr::atom(g));
            return Ok((i, d.clone(), alpha, beta));
        }
    }
    Err(Error::Reduction("no equation is linear in an undifferentiated dependent".into()))
}

/// Coefficient of the eliminated dependent in the pivot equation, e.g.
/// `2F - c` for `F' + (2F - c) G = 0`.
pub fn elimination_pivot(system: &OdeSystem) -> Result<Expr> {
    Ok(pivot_equation(system)?.2)
}

/// Solves the pivot equation for one dependent and substitutes into the other
/// equation, giving one second-order equation with denominators cleared.
pub fn eliminate_to_second_order(system: &OdeSystem) -> Result<Expr> {
    eliminate(system, &BTreeMap::new())
}

/// Elimination restricted to the branch `dep = value`; fails when the pivot
/// vanishes there.
pub fn eliminate_on_branch(system: &OdeSystem, dep: &str, value: &Expr) -> Result<Expr> {
    let by = system.independent();
    let mut bindings = BTreeMap::new();
    let mut d = value.clone();
    for k in 0..=system.order() + 1 {
        bindings.insert(Atom::jet(dep, &by.to_string().repeat(k)), d.clone());
        d = total_derivative(&d, by, &system.jet);
    }
    eliminate(system, &bindings)
}

fn eliminate(system: &OdeSystem, branch: &BTreeMap<Atom, Expr>) -> Result<Expr> {
    let (idx, g, alpha, beta) = pivot_equation(system)?;
    let pivot = alpha.substitute(branch)?;
    if equals_zero(&pivot)? != ZeroTest::Nonzero {
        return Err(Error::DegeneratePivot(alpha.to_string()));
    }
    let by = system.independent();
    let solved = -(&beta * &alpha.recip()?);
    let mut bindings = BTreeMap::new();
    bindings.insert(Atom::jet(&g, ""), solved.clone());
    bindings.insert(Atom::jet(&g, &by.to_string()), total_derivative(&solved, by, &system.jet));
    let other = &system.equations[1 - idx];
    let e = clear_denominators(&other.substitute(&bindings)?)?;
    Ok(normalise(&e.substitute(branch)?))
}

/// Whether `a / b` is free of every jet coordinate and of the independent.
pub fn proportional(a: &Expr, b: &Expr, jet: &JetSpec) -> Result<bool> {
    if a.is_zero() || b.is_zero() {
        return Ok(a.is_zero() && b.is_zero());
    }
    let mut atoms: Vec<Atom> = a.jets().union(&b.jets()).cloned().map(Atom::Jet).collect();
    atoms.extend(jet.independents.iter().map(|i| Atom::sym(i)));
    for v in atoms {
        let w = &(a * &b.derive(&v)?) - &(b * &a.derive(&v)?);
        if equals_zero(&w)? == ZeroTest::Nonzero {
            return Ok(false);
        }
    }
    Ok(true)
}

fn rational_multiple(a: &Expr, b: &Expr) -> bool {
    let Some((m, ca)) = a.terms().next() else {
        return b.is_zero();
    };
    let cb = b.coefficient(m);
    if num_traits::Zero::is_zero(&cb) {
        return false;
    }
    (a - &b.scale(&(ca / cb))).is_zero()
}

/// Equal as sets of equations, each up to a nonzero rational factor.
pub fn same_equations(a: &[Expr], b: &[Expr]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        match (0..b.len()).find(|&k| !used[k] && rational_multiple(x, &b[k])) {
            Some(k) => {
                used[k] = true;
                true
            }
            None => false,
        }
    })
}
