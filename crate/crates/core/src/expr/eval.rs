use std::collections::HashMap;

use num_complex::Complex64;

use super::{Atom, Expr};
use crate::scalar::rational_to_float;
use crate::{Error, Result};

/// Magnitude below which a denominator or `cos` of a `tan` counts as a pole.
const POLE_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
enum Code {
    I,
    Var(usize),
    Sqrt(usize),
    Sin(Box<Compiled>),
    Cos(Box<Compiled>),
    Tan(Box<Compiled>),
    Exp(Box<Compiled>),
    Inv(Box<Compiled>),
}

/// An expression compiled against a fixed variable ordering, for repeated
/// numeric evaluation.
#[derive(Clone, Debug)]
pub struct Compiled {
    terms: Vec<(Complex64, Vec<(Code, i32)>)>,
    text: String,
}

impl Compiled {
    /// `vars` lists the symbols and jet coordinates that will be supplied to
    /// [`Compiled::eval`], in order.
    pub fn new(e: &Expr, vars: &[Atom]) -> Result<Compiled> {
        let index = |a: &Atom| {
            vars.iter()
                .position(|v| v == a)
                .ok_or_else(|| Error::UnboundAtom(a.to_string()))
        };
        let mut terms = Vec::with_capacity(e.len());
        for (m, c) in e.terms() {
            let coef = Complex64::new(rational_to_float(c), 0.0);
            let mut codes = Vec::with_capacity(m.factors().len());
            for (a, k) in m.factors() {
                let code = match a {
                    Atom::I => Code::I,
                    Atom::Sym(_) | Atom::Jet(_) => Code::Var(index(a)?),
                    Atom::Sqrt(n) => Code::Sqrt(index(&Atom::Sym(n.clone()))?),
                    Atom::Sin(l) => Code::Sin(Box::new(Compiled::new(l, vars)?)),
                    Atom::Cos(l) => Code::Cos(Box::new(Compiled::new(l, vars)?)),
                    Atom::Tan(l) => Code::Tan(Box::new(Compiled::new(l, vars)?)),
                    Atom::Exp(l) => Code::Exp(Box::new(Compiled::new(l, vars)?)),
                    Atom::Inv(l) => Code::Inv(Box::new(Compiled::new(l, vars)?)),
                };
                codes.push((code, *k));
            }
            terms.push((coef, codes));
        }
        Ok(Compiled {
            terms,
            text: e.to_string(),
        })
    }

    pub fn eval(&self, values: &[Complex64]) -> Result<Complex64> {
        Ok(self.eval_with_scale(values)?.0)
    }

    /// Value together with the sum of absolute values of the terms, which
    /// gives a scale for relative zero tests.
    pub fn eval_with_scale(&self, values: &[Complex64]) -> Result<(Complex64, f64)> {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (coef, codes) in &self.terms {
            let mut t = *coef;
            for (code, k) in codes {
                let base = match code {
                    Code::I => Complex64::i(),
                    Code::Var(i) => values[*i],
                    Code::Sqrt(i) => values[*i].sqrt(),
                    Code::Sin(l) => l.eval(values)?.sin(),
                    Code::Cos(l) => l.eval(values)?.cos(),
                    Code::Tan(l) => {
                        let z = l.eval(values)?;
                        if z.cos().norm() < POLE_EPS {
                            return Err(Error::Pole(format!("tan({})", l.text)));
                        }
                        z.tan()
                    }
                    Code::Exp(l) => l.eval(values)?.exp(),
                    Code::Inv(l) => {
                        let d = l.eval(values)?;
                        if d.norm() < POLE_EPS {
                            return Err(Error::Pole(format!("1/({})", l.text)));
                        }
                        d.inv()
                    }
                };
                if *k < 0 && base.norm() < POLE_EPS {
                    return Err(Error::Pole(self.text.clone()));
                }
                t *= base.powi(*k);
            }
            scale += t.norm();
            sum += t;
        }
        Ok((sum, scale))
    }
}

/// Evaluates at a point given as a map from atoms (symbols and jet
/// coordinates) to complex values.
pub fn eval_numeric(e: &Expr, point: &HashMap<Atom, Complex64>) -> Result<Complex64> {
    let vars: Vec<Atom> = point.keys().cloned().collect();
    let values: Vec<Complex64> = vars.iter().map(|a| point[a]).collect();
    Compiled::new(e, &vars)?.eval(&values)
}
