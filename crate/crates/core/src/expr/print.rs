use std::fmt::{self, Write as _};

use num_traits::{One, Signed};

use super::{Atom, Expr, Monomial};

pub(super) fn fmt_atom(a: &Atom, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match a {
        Atom::I => f.write_str("I"),
        Atom::Sym(n) => f.write_str(n),
        Atom::Sqrt(n) => write!(f, "sqrt({n})"),
        Atom::Jet(j) => {
            if j.deriv.is_empty() {
                f.write_str(&j.var)
            } else if j.deriv.chars().all(|c| c == 's') {
                f.write_str(&j.var)?;
                for _ in 0..j.order() {
                    f.write_char('\'')?;
                }
                Ok(())
            } else {
                write!(f, "{}_{}", j.var, j.deriv)
            }
        }
        Atom::Sin(l) => write!(f, "sin({l})"),
        Atom::Cos(l) => write!(f, "cos({l})"),
        Atom::Tan(l) => write!(f, "tan({l})"),
        Atom::Exp(m) => write!(f, "exp({m})"),
        Atom::Inv(d) => write!(f, "({d})^-1"),
    }
}

fn fmt_factor(a: &Atom, k: i32, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match a {
        Atom::Inv(d) => write!(f, "({d})^{}", -k),
        _ => {
            fmt_atom(a, f)?;
            if k != 1 {
                write!(f, "^{k}")?;
            }
            Ok(())
        }
    }
}

pub(super) fn fmt_monomial(m: &Monomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if m.is_one() {
        return f.write_str("1");
    }
    for (i, (a, k)) in m.factors().iter().enumerate() {
        if i > 0 {
            f.write_char('*')?;
        }
        fmt_factor(a, *k, f)?;
    }
    Ok(())
}

pub(super) fn fmt_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if e.is_zero() {
        return f.write_str("0");
    }
    for (i, (m, c)) in e.terms().enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => f.write_char('-')?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        let a = c.abs();
        if m.is_one() {
            write!(f, "{a}")?;
        } else {
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            fmt_monomial(m, f)?;
        }
    }
    Ok(())
}
