//! Jet-space metadata: which names are independents, dependents, constant
//! parameters and unknown functions, and how identifiers resolve to atoms.

use serde::{Deserialize, Serialize};

use crate::expr::{Atom, Expr, Jet};
use crate::{Error, Result};

/// An arbitrary function of some independents appearing in a generator,
/// e.g. `a(t,x)` subject to a linear constraint PDE.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownFunction {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JetSpec {
    /// Single-letter independent variables, in declared order.
    pub independents: Vec<String>,
    pub dependents: Vec<String>,
    pub parameters: Vec<String>,
    pub unknowns: Vec<UnknownFunction>,
    pub max_order: usize,
}

impl JetSpec {
    pub fn new(independents: &[&str], dependents: &[&str], max_order: usize) -> JetSpec {
        JetSpec {
            independents: independents.iter().map(|s| s.to_string()).collect(),
            dependents: dependents.iter().map(|s| s.to_string()).collect(),
            parameters: Vec::new(),
            unknowns: Vec::new(),
            max_order,
        }
    }

    /// `(t, x)` with dependents `v, w`.
    pub fn real_pde(max_order: usize) -> JetSpec {
        JetSpec::new(&["t", "x"], &["v", "w"], max_order)
    }

    /// `(t, x)` with the complex pair `u, ubar`.
    pub fn complex_pde(max_order: usize) -> JetSpec {
        JetSpec::new(&["t", "x"], &["u", "ubar"], max_order)
    }

    /// Single independent `s` with the given dependents and parameters.
    pub fn ode(dependents: &[&str], parameters: &[&str], max_order: usize) -> JetSpec {
        JetSpec::new(&["s"], dependents, max_order).with_parameters(parameters)
    }

    pub fn with_parameters(mut self, params: &[&str]) -> JetSpec {
        for p in params {
            if !self.parameters.iter().any(|q| q == p) {
                self.parameters.push(p.to_string());
            }
        }
        self
    }

    pub fn with_unknown(mut self, name: &str, args: &[&str]) -> JetSpec {
        self.unknowns.retain(|u| u.name != name);
        self.unknowns.push(UnknownFunction {
            name: name.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
        });
        self
    }

    pub fn is_dependent(&self, name: &str) -> bool {
        self.dependents.iter().any(|d| d == name)
    }

    pub fn unknown(&self, name: &str) -> Option<&UnknownFunction> {
        self.unknowns.iter().find(|u| u.name == name)
    }

    /// Argument letters of a dependent or unknown function.
    pub fn args_of(&self, name: &str) -> Option<Vec<char>> {
        if self.is_dependent(name) {
            return Some(self.independent_letters());
        }
        self.unknown(name)
            .map(|u| u.args.iter().filter_map(|a| a.chars().next()).collect())
    }

    pub fn independent_letters(&self) -> Vec<char> {
        self.independents
            .iter()
            .filter_map(|s| s.chars().next())
            .collect()
    }

    /// Whether jet coordinate `j` depends on independent `by`.
    pub fn depends_on(&self, j: &Jet, by: char) -> bool {
        self.args_of(&j.var)
            .map(|a| a.contains(&by))
            .unwrap_or(false)
    }

    /// Resolves an identifier as written in expression text.
    pub fn resolve(&self, ident: &str) -> Result<Atom> {
        let unknown = || Error::UnknownIdentifier(ident.to_string());
        if ident == "I" {
            return Ok(Atom::I);
        }
        if self.independents.iter().any(|s| s == ident) || self.parameters.iter().any(|s| s == ident) {
            return Ok(Atom::sym(ident));
        }
        let primes = ident.chars().rev().take_while(|&c| c == '\'').count();
        if primes > 0 {
            let base = &ident[..ident.len() - primes];
            let args = self.args_of(base).ok_or_else(unknown)?;
            if args.len() != 1 {
                return Err(unknown());
            }
            let letters: String = std::iter::repeat(args[0]).take(primes).collect();
            return Ok(Atom::jet(base, &letters));
        }
        if self.args_of(ident).is_some() {
            return Ok(Atom::jet(ident, ""));
        }
        if let Some((base, letters)) = ident.rsplit_once('_') {
            if let Some(args) = self.args_of(base) {
                if !letters.is_empty() && letters.chars().all(|c| args.contains(&c)) {
                    return Ok(Atom::jet(base, letters));
                }
            }
        }
        Err(unknown())
    }
}

/// Total derivative `D_by`: independents differentiate to 1, jet coordinates
/// of functions depending on `by` gain one more derivative, everything else
/// (parameters, coordinates of functions not depending on `by`) is constant.
pub fn total_derivative(e: &Expr, by: char, spec: &JetSpec) -> Expr {
    let name = by.to_string();
    e.derivation(&|a| match a {
        Atom::Sym(n) if **n == *name => Expr::one(),
        Atom::Jet(j) if spec.depends_on(j, by) => Expr::atom(Atom::Jet(j.extend(by))),
        _ => Expr::zero(),
    })
}
