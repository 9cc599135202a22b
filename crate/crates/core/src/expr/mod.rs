//! Exact symbolic expressions in canonical form.
//!
//! An [`Expr`] is a finite map from [`Monomial`]s to nonzero rational
//! coefficients. Every constructor keeps the following normal form:
//!
//! - the imaginary unit appears with power 0 or 1 (`I^2 = -1`);
//! - `sqrt(c)` appears with power 0 or 1 (`sqrt(c)^2 = c`);
//! - a monomial carries at most one `exp(..)` factor, whose argument is real;
//! - a monomial carries at most one `sin(..)`/`cos(..)` factor (products are
//!   expanded to Fourier form), and trig arguments are sign-normalised so that
//!   their leading coefficient is positive.
//!
//! Transcendental arguments must be polynomials (Laurent in symbols) without
//! a constant term. Under these rules the canonical form of the
//! polynomial/trig/exp class is unique, so zero-testing is exact. `tan` and
//! reciprocal atoms `Inv(..)` are carried through but are not reduced against
//! each other; [`equals_zero`] falls back to sampling when they are present.

mod eval;
mod ops;
mod parse;
mod print;
mod zero;

#[cfg(test)]
mod tests;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;
use crate::{Error, Rational, Result};

pub use eval::{eval_numeric, Compiled};
pub use ops::collect_terms;
pub use parse::parse_expr;
pub use zero::{equals_zero, equals_zero_with, seed_from_env, SampleConfig, ZeroTest};

pub type Name = Arc<str>;

/// A jet coordinate: a dependent (or unknown) function together with the
/// multiset of independents it is differentiated by, stored as sorted letters.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Jet {
    pub var: Name,
    pub deriv: Name,
}

impl Jet {
    pub fn new(var: &str, deriv: &str) -> Jet {
        let mut letters: Vec<char> = deriv.chars().collect();
        letters.sort_unstable();
        Jet {
            var: var.into(),
            deriv: letters.into_iter().collect::<String>().into(),
        }
    }

    pub fn order(&self) -> usize {
        self.deriv.chars().count()
    }

    /// The coordinate obtained by one more differentiation in `by`.
    pub fn extend(&self, by: char) -> Jet {
        let mut d = self.deriv.to_string();
        d.push(by);
        Jet::new(&self.var, &d)
    }

    /// How many times this coordinate is differentiated in `by`.
    pub fn count(&self, by: char) -> usize {
        self.deriv.chars().filter(|&c| c == by).count()
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    I,
    Sym(Name),
    Sqrt(Name),
    Jet(Jet),
    Tan(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Exp(Arc<Expr>),
    Inv(Arc<Expr>),
}

impl Atom {
    pub fn sym(name: &str) -> Atom {
        Atom::Sym(name.into())
    }

    pub fn jet(var: &str, deriv: &str) -> Atom {
        Atom::Jet(Jet::new(var, deriv))
    }

    pub fn as_jet(&self) -> Option<&Jet> {
        match self {
            Atom::Jet(j) => Some(j),
            _ => None,
        }
    }

    /// Argument of a transcendental or reciprocal atom.
    pub fn argument(&self) -> Option<&Expr> {
        match self {
            Atom::Tan(a) | Atom::Sin(a) | Atom::Cos(a) | Atom::Exp(a) | Atom::Inv(a) => Some(a),
            _ => None,
        }
    }

    fn is_special(&self) -> bool {
        matches!(
            self,
            Atom::I | Atom::Sqrt(_) | Atom::Sin(_) | Atom::Cos(_) | Atom::Exp(_)
        )
    }

    /// Atoms whose algebraic relations the normal form does not fully capture.
    pub fn is_incomplete(&self) -> bool {
        matches!(self, Atom::Tan(_) | Atom::Inv(_))
    }
}

/// Product of atom powers, sorted by atom, with nonzero exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<(Atom, i32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    pub fn power_of(&self, a: &Atom) -> i32 {
        self.0
            .binary_search_by(|(x, _)| x.cmp(a))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// Builds a monomial from arbitrary factors, merging repeated atoms.
    /// No normalisation of special atoms happens here.
    pub fn from_factors(mut f: Vec<(Atom, i32)>) -> Monomial {
        f.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Atom, i32)> = Vec::with_capacity(f.len());
        for (a, k) in f {
            match out.last_mut() {
                Some((b, j)) if *b == a => *j += k,
                _ => out.push((a, k)),
            }
        }
        out.retain(|(_, k)| *k != 0);
        Monomial(out)
    }

    fn merge(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let k = a[i].1 + b[j].1;
                    if k != 0 {
                        out.push((a[i].0.clone(), k));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn has_special(&self) -> bool {
        self.0.iter().any(|(a, _)| a.is_special())
    }

    /// Splits into (factors matching `pred`, the rest).
    pub fn split(&self, pred: impl Fn(&Atom) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(x, _)| pred(x));
        (Monomial(a), Monomial(b))
    }

    /// The monomial with the exponent of factor `idx` lowered by one.
    fn lowered(&self, idx: usize) -> Monomial {
        let mut v = self.0.clone();
        v[idx].1 -= 1;
        if v[idx].1 == 0 {
            v.remove(idx);
        }
        Monomial(v)
    }

    pub fn total_degree(&self) -> i32 {
        self.0.iter().map(|(_, k)| *k).sum()
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

fn add_term(map: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Trig {
    Sin,
    Cos,
}

type TrigFactor = Option<(Trig, Arc<Expr>)>;

/// Sign-normalises a trig factor; `None` means the factor vanishes.
fn trig_term(kind: Trig, arg: Expr) -> Option<(Rational, TrigFactor)> {
    if arg.is_zero() {
        return match kind {
            Trig::Sin => None,
            Trig::Cos => Some((Rational::one(), None)),
        };
    }
    let (neg, arg) = sign_normalize(arg);
    let sign = if neg && kind == Trig::Sin {
        -Rational::one()
    } else {
        Rational::one()
    };
    Some((sign, Some((kind, Arc::new(arg)))))
}

/// Returns (was_negated, arg) with the leading coefficient made positive.
fn sign_normalize(arg: Expr) -> (bool, Expr) {
    match arg.terms.values().next() {
        Some(c) if c.is_negative() => (true, -arg),
        _ => (false, arg),
    }
}

fn trig_mul(a: &(Trig, Arc<Expr>), b: &(Trig, Arc<Expr>)) -> Vec<(Rational, TrigFactor)> {
    let half = Rational::new(1.into(), 2.into());
    let sum = (*a.1).clone() + (*b.1).clone();
    let diff = (*a.1).clone() - (*b.1).clone();
    // (kind, arg, coefficient) pairs from the product-to-sum identities
    let parts: [(Trig, Expr, Rational); 2] = match (a.0, b.0) {
        (Trig::Sin, Trig::Sin) => [
            (Trig::Cos, diff, half.clone()),
            (Trig::Cos, sum, -half.clone()),
        ],
        (Trig::Cos, Trig::Cos) => [
            (Trig::Cos, diff, half.clone()),
            (Trig::Cos, sum, half.clone()),
        ],
        (Trig::Sin, Trig::Cos) => [
            (Trig::Sin, sum, half.clone()),
            (Trig::Sin, diff, half.clone()),
        ],
        (Trig::Cos, Trig::Sin) => [
            (Trig::Sin, sum, half.clone()),
            (Trig::Sin, diff, -half.clone()),
        ],
    };
    parts
        .into_iter()
        .filter_map(|(k, arg, c)| trig_term(k, arg).map(|(s, t)| (s * c, t)))
        .collect()
}

/// Multiplies trig factors out into a sum of single-factor terms.
fn trig_product(factors: Vec<(Trig, Arc<Expr>)>) -> Vec<(Rational, TrigFactor)> {
    let mut acc: BTreeMap<TrigFactor, Rational> = BTreeMap::new();
    acc.insert(None, Rational::one());
    for f in factors {
        let mut next: BTreeMap<TrigFactor, Rational> = BTreeMap::new();
        for (t, c) in acc {
            let products = match &t {
                None => vec![(Rational::one(), Some(f.clone()))],
                Some(g) => trig_mul(g, &f),
            };
            for (pc, pt) in products {
                let e = next.entry(pt).or_insert_with(Rational::zero);
                *e += &c * pc;
            }
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
    }
    acc.into_iter().map(|(t, c)| (c, t)).collect()
}

/// Adds `coef * factors` to `out`, bringing the factors to normal form.
fn normalize_into(coef: Rational, factors: Monomial, out: &mut BTreeMap<Monomial, Rational>) {
    if coef.is_zero() {
        return;
    }
    if !factors.has_special() {
        add_term(out, factors, coef);
        return;
    }
    let mut coef = coef;
    let mut plain: Vec<(Atom, i32)> = Vec::new();
    let mut i_pow = 0i32;
    let mut exp_arg = Expr::zero();
    let mut trig: Vec<(Trig, Arc<Expr>)> = Vec::new();
    for (a, k) in factors.0 {
        match a {
            Atom::I => i_pow += k,
            Atom::Sqrt(n) => {
                let (q, r) = (k.div_euclid(2), k.rem_euclid(2));
                if q != 0 {
                    plain.push((Atom::Sym(n.clone()), q));
                }
                if r != 0 {
                    plain.push((Atom::Sqrt(n), 1));
                }
            }
            Atom::Exp(m) => exp_arg += (*m).clone() * Expr::from_int(k as i64),
            Atom::Sin(l) => {
                debug_assert!(k > 0);
                trig.extend(std::iter::repeat((Trig::Sin, l)).take(k as usize));
            }
            Atom::Cos(l) => {
                debug_assert!(k > 0);
                trig.extend(std::iter::repeat((Trig::Cos, l)).take(k as usize));
            }
            other => plain.push((other, k)),
        }
    }
    match i_pow.rem_euclid(4) {
        1 => plain.push((Atom::I, 1)),
        2 => coef = -coef,
        3 => {
            coef = -coef;
            plain.push((Atom::I, 1));
        }
        _ => {}
    }
    if !exp_arg.is_zero() {
        plain.push((Atom::Exp(Arc::new(exp_arg)), 1));
    }
    let base = Monomial::from_factors(plain);
    if trig.is_empty() {
        add_term(out, base, coef);
        return;
    }
    for (tc, t) in trig_product(trig) {
        let m = match t {
            None => base.clone(),
            Some((Trig::Sin, l)) => base.merge(&Monomial(vec![(Atom::Sin(l), 1)])),
            Some((Trig::Cos, l)) => base.merge(&Monomial(vec![(Atom::Cos(l), 1)])),
        };
        add_term(out, m, &coef * tc);
    }
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn one() -> Expr {
        Expr::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Expr {
        let mut terms = BTreeMap::new();
        add_term(&mut terms, Monomial::one(), q);
        Expr { terms }
    }

    pub fn from_int(n: i64) -> Expr {
        Expr::from_rational(Rational::from_integer(n.into()))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::from_rational(Rational::new(n.into(), d.into()))
    }

    /// A single atom; special atoms are normalised (e.g. a bare `Exp` with an
    /// imaginary argument is not accepted here, use [`Expr::exp`]).
    pub fn atom(a: Atom) -> Expr {
        Expr::term(Monomial(vec![(a, 1)]), Rational::one())
    }

    pub fn sym(name: &str) -> Expr {
        Expr::atom(Atom::sym(name))
    }

    pub fn jet(var: &str, deriv: &str) -> Expr {
        Expr::atom(Atom::jet(var, deriv))
    }

    pub fn imag() -> Expr {
        Expr::atom(Atom::I)
    }

    /// `coef * m`, normalising `m` if it carries special atoms.
    pub fn term(m: Monomial, coef: Rational) -> Expr {
        let mut terms = BTreeMap::new();
        normalize_into(coef, m, &mut terms);
        Expr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value if this expression is a rational constant.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next()
    }

    pub fn scale(&self, q: &Rational) -> Expr {
        if q.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Rational)>) -> Expr {
        let mut terms = BTreeMap::new();
        for (m, c) in it {
            normalize_into(c, m, &mut terms);
        }
        Expr { terms }
    }

    pub fn pow(&self, k: i32) -> Result<Expr> {
        if k < 0 {
            return self.recip()?.pow(-k);
        }
        let mut result = Expr::one();
        let mut base = self.clone();
        let mut k = k as u32;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Multiplicative inverse. Monomials built from symbols, jets, `I`,
    /// `sqrt` and `exp` invert exactly; anything else becomes an `Inv` atom
    /// of its monic form.
    pub fn recip(&self) -> Result<Expr> {
        if self.is_zero() {
            return Err(Error::Pole("1/0".into()));
        }
        if let Some((m, c)) = self.as_monomial() {
            let mut plain = Vec::new();
            let mut rest = Vec::new();
            for (a, k) in m.factors() {
                match a {
                    Atom::Sin(_) | Atom::Cos(_) | Atom::Tan(_) => rest.push((a.clone(), *k)),
                    Atom::Inv(d) => {
                        // 1/Inv(d)^k = d^k
                        rest.push((Atom::Inv(d.clone()), *k));
                    }
                    _ => plain.push((a.clone(), -*k)),
                }
            }
            let mut out = Expr::term(Monomial::from_factors(plain), c.recip());
            let mut wrapped = Vec::new();
            for (a, k) in rest {
                match a {
                    Atom::Inv(d) => out = &out * &(*d).pow(k)?,
                    other => wrapped.push((other, k)),
                }
            }
            if !wrapped.is_empty() {
                let inner = Expr::term(Monomial::from_factors(wrapped), Rational::one());
                out = &out * &Expr::atom(Atom::Inv(Arc::new(inner)));
            }
            return Ok(out);
        }
        let lc = self.leading_coefficient().unwrap().clone();
        let monic = self.scale(&lc.recip());
        Ok(Expr::atom(Atom::Inv(Arc::new(monic))).scale(&lc.recip()))
    }

    fn validate_argument(arg: &Expr) -> Result<()> {
        for (m, _) in arg.terms() {
            if m.is_one() {
                return Err(Error::InvalidArgument {
                    arg: arg.to_string(),
                    reason: "constant term".into(),
                });
            }
            for (a, _) in m.factors() {
                if !matches!(a, Atom::Sym(_) | Atom::Sqrt(_) | Atom::Jet(_) | Atom::I) {
                    return Err(Error::InvalidArgument {
                        arg: arg.to_string(),
                        reason: "argument must be polynomial in symbols and jet coordinates".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Splits into (real, imaginary) parts with respect to the `I` atom.
    pub fn split_imaginary(&self) -> (Expr, Expr) {
        let mut re = BTreeMap::new();
        let mut im = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.power_of(&Atom::I) == 1 {
                let (_, rest) = m.split(|a| *a == Atom::I);
                add_term(&mut im, rest, c.clone());
            } else {
                add_term(&mut re, m.clone(), c.clone());
            }
        }
        (Expr { terms: re }, Expr { terms: im })
    }

    fn real_trig(kind: Trig, arg: Expr) -> Expr {
        match trig_term(kind, arg) {
            None => Expr::zero(),
            Some((s, None)) => Expr::from_rational(s),
            Some((s, Some((Trig::Sin, l)))) => Expr::atom(Atom::Sin(l)).scale(&s),
            Some((s, Some((Trig::Cos, l)))) => Expr::atom(Atom::Cos(l)).scale(&s),
        }
    }

    fn real_exp(arg: Expr) -> Expr {
        if arg.is_zero() {
            Expr::one()
        } else {
            Expr::atom(Atom::Exp(Arc::new(arg)))
        }
    }

    pub fn sin(arg: Expr) -> Result<Expr> {
        Expr::validate_argument(&arg)?;
        let (a, b) = arg.split_imaginary();
        if b.is_zero() {
            return Ok(Expr::real_trig(Trig::Sin, a));
        }
        // sin(a + ib) = sin a cosh b + i cos a sinh b
        let (ch, sh) = Expr::cosh_sinh(b);
        Ok(&Expr::real_trig(Trig::Sin, a.clone()) * &ch
            + &(&Expr::imag() * &Expr::real_trig(Trig::Cos, a)) * &sh)
    }

    pub fn cos(arg: Expr) -> Result<Expr> {
        Expr::validate_argument(&arg)?;
        let (a, b) = arg.split_imaginary();
        if b.is_zero() {
            return Ok(Expr::real_trig(Trig::Cos, a));
        }
        // cos(a + ib) = cos a cosh b - i sin a sinh b
        let (ch, sh) = Expr::cosh_sinh(b);
        Ok(&Expr::real_trig(Trig::Cos, a.clone()) * &ch
            - &(&Expr::imag() * &Expr::real_trig(Trig::Sin, a)) * &sh)
    }

    fn cosh_sinh(b: Expr) -> (Expr, Expr) {
        let half = Rational::new(1.into(), 2.into());
        let ep = Expr::real_exp(b.clone());
        let em = Expr::real_exp(-b);
        ((&ep + &em).scale(&half), (&ep - &em).scale(&half))
    }

    pub fn tan(arg: Expr) -> Result<Expr> {
        Expr::validate_argument(&arg)?;
        let (_, b) = arg.split_imaginary();
        if !b.is_zero() {
            return Err(Error::InvalidArgument {
                arg: arg.to_string(),
                reason: "tan of a complex argument".into(),
            });
        }
        if arg.is_zero() {
            return Ok(Expr::zero());
        }
        let (neg, a) = sign_normalize(arg);
        let t = Expr::atom(Atom::Tan(Arc::new(a)));
        Ok(if neg { -t } else { t })
    }

    pub fn exp(arg: Expr) -> Result<Expr> {
        Expr::validate_argument(&arg)?;
        let (a, b) = arg.split_imaginary();
        let e = Expr::real_exp(a);
        if b.is_zero() {
            return Ok(e);
        }
        // exp(a + ib) = exp(a) (cos b + i sin b)
        let rot = Expr::real_trig(Trig::Cos, b.clone())
            + &Expr::imag() * &Expr::real_trig(Trig::Sin, b);
        Ok(&e * &rot)
    }

    /// Square root of a perfect-square rational, optionally times one symbol.
    pub fn sqrt(arg: Expr) -> Result<Expr> {
        let unsupported = || Error::Unsupported(format!("sqrt({arg})"));
        let (m, c) = match arg.as_monomial() {
            Some(mc) => mc,
            None if arg.is_zero() => return Ok(Expr::zero()),
            None => return Err(unsupported()),
        };
        if c.is_negative() {
            return Err(unsupported());
        }
        let root = rational_sqrt(c).ok_or_else(unsupported)?;
        match m.factors() {
            [] => Ok(Expr::from_rational(root)),
            [(Atom::Sym(n), 1)] => Ok(Expr::atom(Atom::Sqrt(n.clone())).scale(&root)),
            _ => Err(unsupported()),
        }
    }

    /// Leaf atoms (symbols, sqrt-symbols, jets, `I`), including those inside
    /// transcendental arguments.
    pub fn leaf_atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut std::collections::BTreeSet<Atom>) {
        for m in self.terms.keys() {
            for (a, _) in m.factors() {
                match a.argument() {
                    Some(arg) => arg.collect_leaves(out),
                    None => {
                        out.insert(a.clone());
                    }
                }
            }
        }
    }

    /// Whether any atom (at any depth) satisfies `pred`.
    pub fn any_atom(&self, pred: &dyn Fn(&Atom) -> bool) -> bool {
        self.terms.keys().any(|m| {
            m.factors().iter().any(|(a, _)| {
                pred(a) || a.argument().map(|e| e.any_atom(pred)).unwrap_or(false)
            })
        })
    }

    pub fn jets(&self) -> std::collections::BTreeSet<Jet> {
        self.leaf_atoms()
            .into_iter()
            .filter_map(|a| match a {
                Atom::Jet(j) => Some(j),
                _ => None,
            })
            .collect()
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.any_atom(&|x| x == a)
    }

    pub fn is_incomplete(&self) -> bool {
        self.any_atom(&|a| a.is_incomplete())
    }

    /// Groups terms by the part of each monomial whose atoms satisfy `pred`.
    pub fn split_by(&self, pred: impl Fn(&Atom) -> bool) -> BTreeMap<Monomial, Expr> {
        let mut out: BTreeMap<Monomial, BTreeMap<Monomial, Rational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (key, rest) = m.split(&pred);
            add_term(out.entry(key).or_default(), rest, c.clone());
        }
        out.into_iter()
            .map(|(k, terms)| (k, Expr { terms }))
            .filter(|(_, e)| !e.is_zero())
            .collect()
    }
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Self {
        Expr::from_rational(q)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::from_int(n)
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Self {
        Expr::atom(a)
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            add_term(&mut self.terms, m.clone(), c.clone());
        }
    }
}

impl AddAssign for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        if self.terms.len() < rhs.terms.len() {
            let lhs = std::mem::replace(self, rhs);
            *self += &lhs;
            return;
        }
        for (m, c) in rhs.terms {
            add_term(&mut self.terms, m, c);
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            add_term(&mut self.terms, m.clone(), -c.clone());
        }
    }
}

impl SubAssign for Expr {
    fn sub_assign(&mut self, rhs: Expr) {
        *self -= &rhs;
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                normalize_into(c1 * c2, m1.merge(m2), &mut terms);
            }
        }
        Expr { terms }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(mut self) -> Expr {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(mut self, rhs: Expr) -> Expr {
        self += rhs;
        self
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(mut self, rhs: Expr) -> Expr {
        self -= &rhs;
        self
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl Add<Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        rhs + self.clone()
    }
}

impl Add<&Expr> for Expr {
    type Output = Expr;
    fn add(mut self, rhs: &Expr) -> Expr {
        self += rhs;
        self
    }
}

impl Sub<&Expr> for Expr {
    type Output = Expr;
    fn sub(mut self, rhs: &Expr) -> Expr {
        self -= rhs;
        self
    }
}

impl Mul<&Expr> for Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        &self * rhs
    }
}

impl Mul<Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        self * &rhs
    }
}

impl Zero for Expr {
    fn zero() -> Self {
        Expr::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Expr {
    fn one() -> Self {
        Expr::from_rational(Rational::one())
    }
}

/// Parameter-valued scalars: expressions free of variables. Only Laurent
/// monomials are treated as invertible.
impl Scalar for Expr {
    fn try_recip(&self) -> Option<Self> {
        self.as_monomial()?;
        let r = self.recip().ok()?;
        (!r.is_incomplete()).then_some(r)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::fmt_atom(self, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::fmt_expr(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::fmt_monomial(self, f)
    }
}
