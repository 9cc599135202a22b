use std::fmt;

use num_traits::Zero;

use crate::expr::{parse_expr, Atom, Expr, Jet};
use crate::jet::JetSpec;
use crate::{Error, Rational, Result};

/// Evolution-form constraint `lead = rhs` on an unknown function, e.g.
/// `a_t = a_xx`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub function: String,
    pub lead: Jet,
    pub rhs: Expr,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", Atom::Jet(self.lead.clone()), self.rhs)
    }
}

/// Generator `xi^i d_i + eta^A d_{u^A}` on the jet space of a system.
/// Component vectors follow the order of `jet.independents` and
/// `jet.dependents`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub jet: JetSpec,
    pub xi: Vec<Expr>,
    pub eta: Vec<Expr>,
    pub constraints: Vec<Constraint>,
}

impl VectorField {
    pub fn zero(jet: &JetSpec) -> VectorField {
        VectorField {
            jet: jet.clone(),
            xi: vec![Expr::zero(); jet.independents.len()],
            eta: vec![Expr::zero(); jet.dependents.len()],
            constraints: Vec::new(),
        }
    }

    /// Component labels in order: `xi_t, xi_x, eta_v, eta_w`.
    pub fn labels(jet: &JetSpec) -> Vec<String> {
        jet.independents
            .iter()
            .map(|i| format!("xi_{i}"))
            .chain(jet.dependents.iter().map(|d| format!("eta_{d}")))
            .collect()
    }

    pub fn components(&self) -> impl Iterator<Item = &Expr> {
        self.xi.iter().chain(self.eta.iter())
    }

    pub fn components_mut(&mut self) -> impl Iterator<Item = &mut Expr> {
        self.xi.iter_mut().chain(self.eta.iter_mut())
    }

    pub fn component_count(&self) -> usize {
        self.xi.len() + self.eta.len()
    }

    pub fn component(&self, idx: usize) -> &Expr {
        if idx < self.xi.len() {
            &self.xi[idx]
        } else {
            &self.eta[idx - self.xi.len()]
        }
    }

    pub fn set_component(&mut self, idx: usize, e: Expr) {
        let n = self.xi.len();
        if idx < n {
            self.xi[idx] = e;
        } else {
            self.eta[idx - n] = e;
        }
    }

    /// The coordinate atom a component differentiates along.
    pub fn coordinate(&self, idx: usize) -> Atom {
        let n = self.jet.independents.len();
        if idx < n {
            Atom::sym(&self.jet.independents[idx])
        } else {
            Atom::jet(&self.jet.dependents[idx - n], "")
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components().all(|e| e.is_zero())
    }

    pub fn is_concrete(&self) -> bool {
        self.constraints.is_empty() && self.jet.unknowns.is_empty()
    }

    pub fn same_space(&self, other: &VectorField) -> bool {
        self.jet.independents == other.jet.independents && self.jet.dependents == other.jet.dependents
    }

    pub fn scale(&self, k: &Expr) -> VectorField {
        let mut out = self.clone();
        out.components_mut().for_each(|e| *e = &*e * k);
        out
    }

    pub fn scale_rational(&self, q: &Rational) -> VectorField {
        let mut out = self.clone();
        out.components_mut().for_each(|e| *e = e.scale(q));
        out
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        if !self.same_space(other) {
            return Err(Error::JetMismatch);
        }
        let mut out = self.clone();
        for (a, b) in out.components_mut().zip(other.components()) {
            *a += b;
        }
        for c in &other.constraints {
            if !out.constraints.contains(c) {
                out.constraints.push(c.clone());
            }
        }
        for u in &other.jet.unknowns {
            if out.jet.unknown(&u.name).is_none() {
                out.jet.unknowns.push(u.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        self.add(&other.scale_rational(&-Rational::from_integer(1.into())))
    }

    /// Linear combination `sum q_k X_k`; all fields must share a jet space.
    pub fn combination(jet: &JetSpec, terms: &[(Rational, &VectorField)]) -> Result<VectorField> {
        let mut out = VectorField::zero(jet);
        for (q, x) in terms {
            if q.is_zero() {
                continue;
            }
            out = out.add(&x.scale_rational(q))?;
        }
        Ok(out)
    }

    /// Applies the field as a first-order operator to a coefficient function.
    pub fn apply(&self, f: &Expr) -> Result<Expr> {
        let mut out = Expr::zero();
        for (i, c) in self.components().enumerate() {
            if c.is_zero() {
                continue;
            }
            out += c * &f.derive(&self.coordinate(i))?;
        }
        Ok(out)
    }

    /// Parses the text form: one `xi_<indep> = expr` or `eta_<dep> = expr`
    /// per line (or separated by `;`), plus optional declarations
    /// `unknown a(t,x): a_t = a_xx` for unknown functions and their
    /// constraints (`unknown a(t,x)` leaves `a` unconstrained). Lines starting with `#` are comments. Missing components
    /// are zero.
    pub fn parse(text: &str, base: &JetSpec) -> Result<VectorField> {
        let items: Vec<&str> = text
            .split(['\n', ';'])
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let mut jet = base.clone();
        let mut pending = Vec::new();
        for item in &items {
            if let Some(decl) = item.strip_prefix("unknown ") {
                let (sig, constraint) = match decl.split_once(':') {
                    Some((sig, c)) => (sig, Some(c.trim().to_string())),
                    None => (decl, None),
                };
                let sig = sig.trim();
                let open = sig.find('(').ok_or_else(|| Error::Syntax {
                    pos: 0,
                    msg: format!("missing argument list in `{sig}`"),
                })?;
                let name = sig[..open].trim();
                let args: Vec<&str> = sig[open + 1..]
                    .trim_end_matches(')')
                    .split(',')
                    .map(str::trim)
                    .filter(|a| !a.is_empty())
                    .collect();
                for a in &args {
                    if !jet.independents.iter().any(|i| i == a) {
                        return Err(Error::UnknownIdentifier(a.to_string()));
                    }
                }
                jet = jet.with_unknown(name, &args);
                if let Some(c) = constraint {
                    pending.push((name.to_string(), c));
                }
            }
        }
        let mut field = VectorField::zero(&jet);
        for (name, text) in pending {
            let (lhs, rhs) = text.split_once('=').ok_or_else(|| Error::Syntax {
                pos: 0,
                msg: format!("constraint `{text}` has no `=`"),
            })?;
            let lead = match parse_expr(lhs.trim(), &jet)?.as_monomial() {
                Some((m, c)) if c == &Rational::from_integer(1.into()) => match m.factors() {
                    [(Atom::Jet(j), 1)] if *j.var == *name => j.clone(),
                    _ => return Err(Error::NotSolved(format!("constraint lhs `{lhs}`"))),
                },
                _ => return Err(Error::NotSolved(format!("constraint lhs `{lhs}`"))),
            };
            let rhs = parse_expr(rhs.trim(), &jet)?;
            field.constraints.push(Constraint {
                function: name,
                lead,
                rhs,
            });
        }
        for item in items.iter().filter(|l| !l.starts_with("unknown ")) {
            let (lhs, rhs) = item.split_once('=').ok_or_else(|| Error::Syntax {
                pos: 0,
                msg: format!("expected `component = expr` in `{item}`"),
            })?;
            let label = lhs.trim();
            let idx = VectorField::labels(&jet)
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::UnknownIdentifier(label.to_string()))?;
            field.set_component(idx, parse_expr(rhs.trim(), &jet)?);
        }
        Ok(field)
    }

    /// Operator notation, e.g. `t^2*D_t + t*x*D_x + 1/4*x^2*D_v`.
    pub fn operator_string(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.components().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = self.coordinate(i).to_string();
            let coef = if c.len() > 1 { format!("({c})") } else { c.to_string() };
            parts.push(match coef.as_str() {
                "1" => format!("D_{name}"),
                "-1" => format!("-D_{name}"),
                _ => format!("{coef}*D_{name}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

impl fmt::Display for VectorField {
    /// The parseable text form; zero components are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = VectorField::labels(&self.jet);
        let mut first = true;
        for u in &self.jet.unknowns {
            if let Some(c) = self.constraints.iter().find(|c| c.function == u.name) {
                if !first {
                    f.write_str("; ")?;
                }
                first = false;
                write!(f, "unknown {}({}): {c}", u.name, u.args.join(","))?;
            }
        }
        for (i, c) in self.components().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str("; ")?;
            }
            first = false;
            write!(f, "{} = {c}", labels[i])?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
