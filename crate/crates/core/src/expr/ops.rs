use std::collections::{BTreeMap, BTreeSet};


use super::{Atom, Expr, Monomial};
use crate::{Error, Rational, Result};

impl Expr {
    /// Applies the derivation determined by its values on symbols and jet
    /// coordinates. Chain rules through `sqrt`, trig, `exp`, `tan` and
    /// reciprocal atoms are handled here, so `base` is only ever called with
    /// `Atom::Sym` or `Atom::Jet`.
    pub fn derivation(&self, base: &dyn Fn(&Atom) -> Expr) -> Expr {
        let mut cache: BTreeMap<Atom, Expr> = BTreeMap::new();
        self.derivation_cached(base, &mut cache)
    }

    fn derivation_cached(&self, base: &dyn Fn(&Atom) -> Expr, cache: &mut BTreeMap<Atom, Expr>) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in self.terms() {
            for (idx, (a, k)) in m.factors().iter().enumerate() {
                let d = match cache.get(a) {
                    Some(d) => d.clone(),
                    None => {
                        let d = atom_derivative(a, base, cache);
                        cache.insert(a.clone(), d.clone());
                        d
                    }
                };
                if d.is_zero() {
                    continue;
                }
                let rest = Expr::term(m.lowered(idx), c * Rational::from_integer((*k).into()));
                out += &rest * &d;
            }
        }
        out
    }

    /// Partial derivative treating every other atom as independent.
    pub fn derive(&self, a: &Atom) -> Result<Expr> {
        if !matches!(a, Atom::Sym(_) | Atom::Jet(_)) {
            return Err(Error::NotDifferentiable(a.to_string()));
        }
        Ok(self.derivation(&|x| if x == a { Expr::one() } else { Expr::zero() }))
    }

    /// Simultaneous substitution of atoms (matched at any depth, including
    /// inside transcendental arguments), followed by canonicalisation.
    pub fn substitute(&self, bindings: &BTreeMap<Atom, Expr>) -> Result<Expr> {
        check_acyclic(bindings)?;
        let mut cache = BTreeMap::new();
        self.subst_inner(bindings, &mut cache)
    }

    fn subst_inner(&self, b: &BTreeMap<Atom, Expr>, cache: &mut BTreeMap<Atom, Expr>) -> Result<Expr> {
        let mut out = Expr::zero();
        for (m, c) in self.terms() {
            let mut acc = Expr::from_rational(c.clone());
            for (a, k) in m.factors() {
                let base = match cache.get(a) {
                    Some(e) => e.clone(),
                    None => {
                        let e = subst_atom(a, b, cache)?;
                        cache.insert(a.clone(), e.clone());
                        e
                    }
                };
                acc = &acc * &base.pow(*k)?;
                if acc.is_zero() {
                    break;
                }
            }
            out += acc;
        }
        Ok(out)
    }

    pub fn substitute_one(&self, a: &Atom, by: &Expr) -> Result<Expr> {
        let mut b = BTreeMap::new();
        b.insert(a.clone(), by.clone());
        self.substitute(&b)
    }

    /// Rebuilds the expression from its terms. Expressions are canonical by
    /// construction, so this is the identity up to representation.
    pub fn to_canonical(&self) -> Expr {
        Expr::from_terms(self.terms().map(|(m, c)| (m.clone(), c.clone())))
    }
}

fn atom_derivative(a: &Atom, base: &dyn Fn(&Atom) -> Expr, cache: &mut BTreeMap<Atom, Expr>) -> Expr {
    match a {
        Atom::I => Expr::zero(),
        Atom::Sym(_) | Atom::Jet(_) => base(a),
        Atom::Sqrt(n) => {
            let dc = base(&Atom::Sym(n.clone()));
            if dc.is_zero() {
                return dc;
            }
            // d sqrt(c) = sqrt(c) / (2c) dc
            let f = Expr::term(
                Monomial::from_factors(vec![(Atom::Sqrt(n.clone()), 1), (Atom::Sym(n.clone()), -1)]),
                Rational::new(1.into(), 2.into()),
            );
            &f * &dc
        }
        Atom::Sin(l) => {
            let dl = l.derivation_cached(base, cache);
            if dl.is_zero() {
                return dl;
            }
            &Expr::atom(Atom::Cos(l.clone())) * &dl
        }
        Atom::Cos(l) => {
            let dl = l.derivation_cached(base, cache);
            if dl.is_zero() {
                return dl;
            }
            -(&Expr::atom(Atom::Sin(l.clone())) * &dl)
        }
        Atom::Tan(l) => {
            let dl = l.derivation_cached(base, cache);
            if dl.is_zero() {
                return dl;
            }
            let t = Expr::atom(Atom::Tan(l.clone()));
            &(Expr::one() + &t * &t) * &dl
        }
        Atom::Exp(m) => {
            let dm = m.derivation_cached(base, cache);
            if dm.is_zero() {
                return dm;
            }
            &Expr::atom(a.clone()) * &dm
        }
        Atom::Inv(d) => {
            let dd = d.derivation_cached(base, cache);
            if dd.is_zero() {
                return dd;
            }
            let inv = Expr::atom(a.clone());
            -(&(&inv * &inv) * &dd)
        }
    }
}

fn subst_atom(a: &Atom, b: &BTreeMap<Atom, Expr>, cache: &mut BTreeMap<Atom, Expr>) -> Result<Expr> {
    if let Some(e) = b.get(a) {
        return Ok(e.clone());
    }
    Ok(match a {
        Atom::Sqrt(n) => match b.get(&Atom::Sym(n.clone())) {
            Some(e) => Expr::sqrt(e.clone())?,
            None => Expr::atom(a.clone()),
        },
        Atom::Sin(l) => Expr::sin(l.subst_inner(b, cache)?)?,
        Atom::Cos(l) => Expr::cos(l.subst_inner(b, cache)?)?,
        Atom::Tan(l) => Expr::tan(l.subst_inner(b, cache)?)?,
        Atom::Exp(m) => Expr::exp(m.subst_inner(b, cache)?)?,
        Atom::Inv(d) => d.subst_inner(b, cache)?.recip()?,
        _ => Expr::atom(a.clone()),
    })
}

/// Rejects binding sets in which two or more distinct atoms refer to each
/// other in a loop. A binding mentioning its own atom is a plain simultaneous
/// substitution and is allowed.
fn check_acyclic(b: &BTreeMap<Atom, Expr>) -> Result<()> {
    let edges: BTreeMap<&Atom, BTreeSet<Atom>> = b
        .iter()
        .map(|(k, v)| {
            let mut deps = BTreeSet::new();
            collect_atoms(v, &mut deps);
            deps.retain(|x| x != k && b.contains_key(x));
            (k, deps)
        })
        .collect();
    // depth-first search with colouring
    let mut state: BTreeMap<&Atom, u8> = BTreeMap::new();
    fn visit<'a>(
        n: &'a Atom,
        edges: &'a BTreeMap<&'a Atom, BTreeSet<Atom>>,
        state: &mut BTreeMap<&'a Atom, u8>,
    ) -> Result<()> {
        match state.get(n) {
            Some(1) => return Err(Error::CyclicBinding(n.to_string())),
            Some(_) => return Ok(()),
            None => {}
        }
        state.insert(n, 1);
        if let Some(deps) = edges.get(n) {
            for d in deps {
                let key = edges.get_key_value(d).map(|(k, _)| *k).unwrap();
                visit(key, edges, state)?;
            }
        }
        state.insert(n, 2);
        Ok(())
    }
    for k in edges.keys() {
        visit(k, &edges, &mut state)?;
    }
    Ok(())
}

fn collect_atoms(e: &Expr, out: &mut BTreeSet<Atom>) {
    for (m, _) in e.terms() {
        for (a, _) in m.factors() {
            out.insert(a.clone());
            if let Some(arg) = a.argument() {
                collect_atoms(arg, out);
            }
        }
    }
}

/// Splits `e` by the given monomial classes. The classifying atoms are those
/// occurring in `family`; every term's classifying part must be one of the
/// listed classes.
pub fn collect_terms(e: &Expr, family: &[Monomial]) -> Result<BTreeMap<Monomial, Expr>> {
    let mut seen = BTreeSet::new();
    for m in family {
        if !seen.insert(m.clone()) {
            return Err(Error::NonPartition(format!("class {m} listed twice")));
        }
    }
    let classifying: BTreeSet<Atom> = family
        .iter()
        .flat_map(|m| m.factors().iter().map(|(a, _)| a.clone()))
        .collect();
    let groups = e.split_by(|a| classifying.contains(a));
    let mut out: BTreeMap<Monomial, Expr> = family.iter().map(|m| (m.clone(), Expr::zero())).collect();
    for (k, v) in groups {
        match out.get_mut(&k) {
            Some(slot) => *slot = v,
            None => {
                return Err(Error::NonPartition(format!(
                    "monomial class {k} is not in the family"
                )))
            }
        }
    }
    Ok(out)
}
