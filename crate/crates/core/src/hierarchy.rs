//! Members of the complex Burgers hierarchy `u_t = L^n P(i u_x e^{-i(u - ubar)})`,
//! their real/imaginary splitting and an audit against the printed systems.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalogue;
use crate::expr::{parse_expr, Atom, Expr};
use crate::jet::{total_derivative, JetSpec};
use crate::{Error, Result};

/// Largest `n` accepted by [`hierarchy_member`] unless overridden.
pub const DEFAULT_MAX_MEMBER: usize = 6;

/// An evolution system `u^A_t = Phi^A`, one equation per dependent.
#[derive(Clone, Debug, PartialEq)]
pub struct PdeSystem {
    pub jet: JetSpec,
    pub equations: Vec<(String, Expr)>,
    pub label: String,
}

impl PdeSystem {
    pub fn new(jet: JetSpec, equations: Vec<(String, Expr)>, label: &str) -> Result<PdeSystem> {
        let s = PdeSystem {
            jet,
            equations,
            label: label.to_string(),
        };
        s.check_evolution_form()?;
        Ok(s)
    }

    /// Parses `dependent = rhs` pairs in the given jet space.
    pub fn parse(jet: JetSpec, equations: &[(&str, &str)], label: &str) -> Result<PdeSystem> {
        let eqs = equations
            .iter()
            .map(|(d, rhs)| Ok((d.to_string(), parse_expr(rhs, &jet)?)))
            .collect::<Result<Vec<_>>>()?;
        PdeSystem::new(jet, eqs, label)
    }

    pub fn rhs(&self, dependent: &str) -> Option<&Expr> {
        self.equations.iter().find(|(d, _)| d == dependent).map(|(_, e)| e)
    }

    /// Every dependent has one equation and no right-hand side contains a
    /// time derivative.
    pub fn check_evolution_form(&self) -> Result<()> {
        let time = self.jet.independent_letters()[0];
        for d in &self.jet.dependents {
            if self.rhs(d).is_none() {
                return Err(Error::NotSolved(format!("no equation for {d}")));
            }
        }
        for (d, rhs) in &self.equations {
            if let Some(j) = rhs.jets().into_iter().find(|j| j.count(time) > 0) {
                return Err(Error::NotSolved(format!(
                    "right-hand side of {d}_{time} contains {}",
                    Atom::Jet(j)
                )));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.equations
            .iter()
            .flat_map(|(_, e)| e.jets())
            .map(|j| j.order())
            .max()
            .unwrap_or(0)
    }
}

fn complex_jet() -> JetSpec {
    JetSpec::complex_pde(8)
}

fn reject_real_split(e: &Expr) -> Result<()> {
    if let Some(j) = e.jets().into_iter().find(|j| &*j.var != "u" && &*j.var != "ubar") {
        return Err(Error::RealSplitVariable(Atom::Jet(j).to_string()));
    }
    Ok(())
}

/// `P(beta) = i exp(i(u - ubar)) beta`.
pub fn apply_operator_p(beta: &Expr) -> Result<Expr> {
    reject_real_split(beta)?;
    let phase = Expr::exp(&Expr::imag() * &(Expr::jet("u", "") - Expr::jet("ubar", "")))?;
    Ok(&(&Expr::imag() * &phase) * beta)
}

/// `L(tau) = i D_x tau + u_x tau`.
pub fn apply_operator_l(tau: &Expr) -> Result<Expr> {
    reject_real_split(tau)?;
    let dx = total_derivative(tau, 'x', &complex_jet());
    Ok(&Expr::imag() * &dx + &Expr::jet("u", "x") * tau)
}

/// The seed `i u_x exp(-i(u - ubar))` to which `P` is applied.
pub fn hierarchy_seed() -> Result<Expr> {
    let phase = Expr::exp(-(&Expr::imag() * &(Expr::jet("u", "") - Expr::jet("ubar", ""))))?;
    Ok(&(&Expr::imag() * &Expr::jet("u", "x")) * &phase)
}

/// Complex right-hand side of `u_t` for `t(L) = L^n`.
pub fn hierarchy_member(n: usize) -> Result<Expr> {
    hierarchy_member_bounded(n, DEFAULT_MAX_MEMBER)
}

pub fn hierarchy_member_bounded(n: usize, max: usize) -> Result<Expr> {
    if n > max {
        return Err(Error::MemberTooLarge { n, max });
    }
    let mut e = apply_operator_p(&hierarchy_seed()?)?;
    for _ in 0..n {
        e = apply_operator_l(&e)?;
    }
    Ok(e)
}

/// Substitutes `u = v + i w`, `ubar = v - i w` (with all jet coordinates)
/// and returns the real and imaginary parts.
pub fn complex_split(rhs: &Expr) -> Result<(Expr, Expr)> {
    let mut b = BTreeMap::new();
    for j in rhs.jets() {
        let (v, w) = (Expr::jet("v", &j.deriv), Expr::jet("w", &j.deriv));
        let iw = &Expr::imag() * &w;
        let image = match &*j.var {
            "u" => v + iw,
            "ubar" => v - iw,
            other => return Err(Error::RealSplitVariable(other.to_string())),
        };
        b.insert(Atom::Jet(j), image);
    }
    let e = rhs.substitute(&b)?;
    let (re, im) = e.split_imaginary();
    for part in [&re, &im] {
        if part.contains_atom(&Atom::I) {
            return Err(Error::ResidualImaginary(part.to_string()));
        }
    }
    Ok((re, im))
}

/// The real system `v_t = Re, w_t = Im` generated for hierarchy index `n`.
pub fn generated_system(n: usize) -> Result<PdeSystem> {
    let (re, im) = complex_split(&hierarchy_member(n)?)?;
    PdeSystem::new(
        JetSpec::real_pde(n + 1),
        vec![("v".into(), re), ("w".into(), im)],
        &format!("generated member {}", n + 1),
    )
}

/// The printed real/imaginary system of member `k` (1 to 4).
pub fn catalogue_member(k: usize) -> Result<PdeSystem> {
    catalogue::member(k)
}

#[derive(Clone, Debug, Serialize)]
pub struct TermDelta {
    pub monomial: String,
    pub generated: String,
    pub printed: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquationDelta {
    pub dependent: String,
    /// `generated - printed`, in expression syntax.
    pub difference: String,
    pub terms: Vec<TermDelta>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub member: usize,
    pub matches: bool,
    pub equations: Vec<EquationDelta>,
}

/// Compares the split of `L^{k-1} P(..)` with the printed system of member `k`.
pub fn audit_member(k: usize) -> Result<AuditReport> {
    let printed = catalogue_member(k)?;
    let generated = generated_system(k - 1)?;
    let mut equations = Vec::new();
    for (dep, p) in &printed.equations {
        let g = generated.rhs(dep).cloned().unwrap_or_default();
        let diff = &g - p;
        let mut terms = Vec::new();
        for (m, _) in diff.terms() {
            let show = |e: &Expr| {
                let c = e.coefficient(m);
                c.to_string()
            };
            terms.push(TermDelta {
                monomial: m.to_string(),
                generated: show(&g),
                printed: show(p),
            });
        }
        equations.push(EquationDelta {
            dependent: dep.clone(),
            difference: diff.to_string(),
            terms,
        });
    }
    Ok(AuditReport {
        member: k,
        matches: equations.iter().all(|e| e.terms.is_empty()),
        equations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(s: &str) -> Expr {
        parse_expr(s, &complex_jet()).unwrap()
    }

    fn re(s: &str) -> Expr {
        parse_expr(s, &JetSpec::real_pde(4)).unwrap()
    }

    #[test]
    fn operator_p() {
        assert_eq!(apply_operator_p(&hierarchy_seed().unwrap()).unwrap(), cx("-u_x"));
        assert!(apply_operator_p(&Expr::zero()).unwrap().is_zero());
        assert_eq!(apply_operator_p(&cx("exp(-I*(u - ubar))")).unwrap(), Expr::imag());
        assert!(matches!(
            apply_operator_p(&re("v_x")),
            Err(Error::RealSplitVariable(_))
        ));
    }

    #[test]
    fn operator_l() {
        assert_eq!(apply_operator_l(&cx("-u_x")).unwrap(), cx("-u_x^2 - I*u_xx"));
        assert!(apply_operator_l(&Expr::zero()).unwrap().is_zero());
        assert_eq!(
            apply_operator_l(&cx("-u_x^2 - I*u_xx")).unwrap(),
            cx("-u_x^3 - 3*I*u_x*u_xx + u_xxx")
        );
    }

    #[test]
    fn members_and_split() {
        assert_eq!(hierarchy_member(0).unwrap(), cx("-u_x"));
        assert_eq!(hierarchy_member(1).unwrap(), cx("-u_x^2 - I*u_xx"));
        assert!(matches!(hierarchy_member(7), Err(Error::MemberTooLarge { n: 7, max: 6 })));
        assert_eq!(complex_split(&cx("-u_x")).unwrap(), (re("-v_x"), re("-w_x")));
        assert_eq!(
            complex_split(&cx("-u_x^2 - I*u_xx")).unwrap(),
            (re("-v_x^2 + w_x^2 + w_xx"), re("-2*v_x*w_x - v_xx"))
        );
        assert_eq!(complex_split(&Expr::zero()).unwrap(), (Expr::zero(), Expr::zero()));
        for n in 0..4 {
            let m = hierarchy_member(n).unwrap();
            assert_eq!(hierarchy_member(n + 1).unwrap(), apply_operator_l(&m).unwrap());
        }
    }

    #[test]
    fn audits() {
        for k in 1..=3 {
            let a = audit_member(k).unwrap();
            assert!(a.matches, "member {k}: {:?}", a.equations);
        }
        let a = audit_member(4).unwrap();
        assert!(!a.matches);
        assert!(a.equations.iter().any(|e| !e.terms.is_empty()));
    }
}
