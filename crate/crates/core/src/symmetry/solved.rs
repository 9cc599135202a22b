use std::collections::{BTreeMap, HashMap};

use crate::expr::{Atom, Expr, Jet};
use crate::jet::{total_derivative, JetSpec};
use crate::{Error, Rational, Result};

use super::field::Constraint;

/// `lead = rhs`, used to eliminate `lead` and all of its derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub var: String,
    pub lead: Jet,
    pub rhs: Expr,
}

/// A system solved for one leading derivative per function. Jets that are
/// derivatives of a leading jet are principal; everything else is parametric.
#[derive(Clone, Debug)]
pub struct SolvedSystem {
    pub jet: JetSpec,
    pub rules: Vec<Rule>,
    pub order_bound: usize,
}

const DEFAULT_ORDER_BOUND: usize = 48;

impl SolvedSystem {
    pub fn new(jet: JetSpec, rules: Vec<Rule>) -> Result<SolvedSystem> {
        let s = SolvedSystem {
            jet,
            rules,
            order_bound: DEFAULT_ORDER_BOUND,
        };
        for r in &s.rules {
            if let Some(j) = r.rhs.jets().into_iter().find(|j| s.principal(j).is_some()) {
                return Err(Error::NotSolved(format!(
                    "rule for {} has principal jet {} on the right",
                    Atom::Jet(r.lead.clone()),
                    Atom::Jet(j)
                )));
            }
        }
        Ok(s)
    }

    /// `u^A_t = Phi^A` for every equation of an evolution system.
    pub fn from_evolution(jet: &JetSpec, equations: &[(String, Expr)]) -> Result<SolvedSystem> {
        let time = jet.independent_letters()[0];
        let rules = equations
            .iter()
            .map(|(d, rhs)| Rule {
                var: d.clone(),
                lead: Jet::new(d, &time.to_string()),
                rhs: rhs.clone(),
            })
            .collect();
        SolvedSystem::new(jet.clone(), rules)
    }

    /// Solves each equation `H = 0` for its unique highest-order jet, which
    /// must occur linearly with a constant (or invertible monomial)
    /// coefficient.
    pub fn from_equations(jet: &JetSpec, equations: &[Expr]) -> Result<SolvedSystem> {
        let mut rules = Vec::new();
        for h in equations {
            let jets = h.jets();
            let top = jets.iter().map(|j| j.order()).max().ok_or_else(|| {
                Error::NotSolved(format!("equation {h} has no derivatives"))
            })?;
            let leads: Vec<&Jet> = jets.iter().filter(|j| j.order() == top).collect();
            if leads.len() != 1 {
                return Err(Error::NotSolved(format!(
                    "equation {h} has no unique highest derivative"
                )));
            }
            let lead = leads[0].clone();
            let atom = Atom::Jet(lead.clone());
            let alpha = h.derive(&atom)?;
            if alpha.contains_atom(&atom) || alpha.is_zero() {
                return Err(Error::NotSolved(format!(
                    "equation {h} is not linear in {atom}"
                )));
            }
            let beta = h - &(&alpha * &Expr::atom(atom.clone()));
            let inv = match alpha.as_rational() {
                Some(q) => Expr::from_rational(Rational::from_integer(1.into()) / q),
                None => alpha
                    .recip()
                    .map_err(|_| Error::NonInvertiblePivot(alpha.to_string()))?,
            };
            rules.push(Rule {
                var: lead.var.to_string(),
                lead,
                rhs: -(&beta * &inv),
            });
        }
        SolvedSystem::new(jet.clone(), rules)
    }

    /// Adds evolution constraints of unknown functions.
    pub fn with_constraints(mut self, jet: &JetSpec, constraints: &[Constraint]) -> Result<SolvedSystem> {
        for u in &jet.unknowns {
            if self.jet.unknown(&u.name).is_none() {
                self.jet.unknowns.push(u.clone());
            }
        }
        for p in &jet.parameters {
            if !self.jet.parameters.contains(p) {
                self.jet.parameters.push(p.clone());
            }
        }
        for c in constraints {
            if c.lead.order() == 0 {
                return Err(Error::NotSolved(format!("constraint {c}")));
            }
            self.rules.push(Rule {
                var: c.function.clone(),
                lead: c.lead.clone(),
                rhs: c.rhs.clone(),
            });
        }
        let rules = std::mem::take(&mut self.rules);
        SolvedSystem::new(self.jet, rules)
    }

    /// The rule whose leading jet divides `j`, with the remaining letters.
    fn principal(&self, j: &Jet) -> Option<(&Rule, String)> {
        self.rules.iter().find_map(|r| {
            if r.lead.var != j.var {
                return None;
            }
            let mut rest: Vec<char> = j.deriv.chars().collect();
            for c in r.lead.deriv.chars() {
                let pos = rest.iter().position(|&x| x == c)?;
                rest.remove(pos);
            }
            Some((r, rest.into_iter().collect()))
        })
    }

    pub fn reducer(&self) -> Reducer<'_> {
        Reducer {
            system: self,
            memo: HashMap::new(),
        }
    }

    pub fn reduce(&self, e: &Expr) -> Result<Expr> {
        self.reducer().reduce(e)
    }
}

/// Rewrites principal jets to parametric ones, memoising each jet's image.
pub struct Reducer<'a> {
    system: &'a SolvedSystem,
    memo: HashMap<Jet, Expr>,
}

impl Reducer<'_> {
    pub fn reduce(&mut self, e: &Expr) -> Result<Expr> {
        let mut bindings = BTreeMap::new();
        for j in e.jets() {
            if self.system.principal(&j).is_some() {
                let image = self.image(&j)?;
                bindings.insert(Atom::Jet(j), image);
            }
        }
        if bindings.is_empty() {
            return Ok(e.clone());
        }
        e.substitute(&bindings)
    }

    fn image(&mut self, j: &Jet) -> Result<Expr> {
        if let Some(e) = self.memo.get(j) {
            return Ok(e.clone());
        }
        if j.order() > self.system.order_bound {
            return Err(Error::OrderBound(self.system.order_bound));
        }
        let (rule, rest) = self
            .system
            .principal(j)
            .map(|(r, rest)| (r.clone(), rest))
            .expect("image called on a principal jet");
        let out = if rest.is_empty() {
            rule.rhs.clone()
        } else {
            // differentiate the image of the jet one letter lower
            let mut letters: Vec<char> = j.deriv.chars().collect();
            let by = rest.chars().last().unwrap_or_default();
            let pos = letters.iter().rposition(|&c| c == by).unwrap_or_default();
            letters.remove(pos);
            let lower = Jet::new(&j.var, &letters.into_iter().collect::<String>());
            let base = self.image(&lower)?;
            let d = total_derivative(&base, by, &self.system.jet);
            self.reduce(&d)?
        };
        self.memo.insert(j.clone(), out.clone());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    #[test]
    fn eliminates_time_derivatives() {
        let jet = JetSpec::real_pde(3);
        let p = |s: &str| parse_expr(s, &jet).unwrap();
        let s = SolvedSystem::from_evolution(
            &jet,
            &[("v".into(), p("-v_x^2 + w_x^2 + w_xx")), ("w".into(), p("-2*v_x*w_x - v_xx"))],
        )
        .unwrap();
        assert_eq!(s.reduce(&p("v_t")).unwrap(), p("-v_x^2 + w_x^2 + w_xx"));
        let vtx = s.reduce(&p("v_tx")).unwrap();
        assert_eq!(vtx, p("-2*v_x*v_xx + 2*w_x*w_xx + w_xxx"));
        let vtt = s.reduce(&p("v_tt")).unwrap();
        assert!(vtt.jets().iter().all(|j| j.count('t') == 0));
        assert_eq!(s.reduce(&p("v_x*w")).unwrap(), p("v_x*w"));
    }

    #[test]
    fn solves_ode_for_highest_derivative() {
        let jet = JetSpec::ode(&["f", "g"], &["c"], 3);
        let p = |s: &str| parse_expr(s, &jet).unwrap();
        let s = SolvedSystem::from_equations(
            &jet,
            &[p("g'' - f'^2 + g'^2 + c*f'"), p("f'' + 2*f'*g' - c*g'")],
        )
        .unwrap();
        assert_eq!(s.reduce(&p("g''")).unwrap(), p("f'^2 - g'^2 - c*f'"));
        let third = s.reduce(&p("f'''")).unwrap();
        assert!(third.jets().iter().all(|j| j.order() <= 1));
        assert!(SolvedSystem::from_equations(&jet, &[p("f''^2 + g")]).is_err());
    }
}
