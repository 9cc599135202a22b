//! Travelling-wave and order reductions, closed-form solution checks and the
//! numeric side: Jacobi elliptic functions, RK4 integration, lifting back to
//! the PDE and CSV series output.

mod candidate;
mod lift;
mod numeric;
mod series;
mod wave;

pub use candidate::{
    verify_solution, ClosedEvaluator, Component, NumericCheck, SampleDomain, SolutionCandidate, SolutionReport, VerifyMode,
};
pub use lift::{
    antiderivative, integrate_candidate, lift_and_check, AntiTerm, Antiderivative, LiftGrid, ScalarProfile,
};
pub use numeric::{
    complete_elliptic_k, integrate_rk4, integrate_system, jacobi_sn, jacobi_sn_cn_dn, ExplicitSystem, Trajectory,
    DEFAULT_GUARD,
};
pub use series::{
    emit_series_csv, fig1_checks, fig1_path, fig1_series, rational_exp_profile, rows_from_trajectory, Fig1Check,
    RationalExpProfile, SeriesRow,
};
pub use wave::{
    clear_denominators, eliminate_on_branch, eliminate_to_second_order, elimination_pivot, invariants_of_translation,
    order_reduce, proportional, raise_order, reduce_by_translation, same_equations, travelling_wave_reduce,
    SimilarityMap, WaveReduction,
};

use crate::expr::{parse_expr, Expr};
use crate::jet::JetSpec;
use crate::symmetry::{DiffSystem, SolvedSystem};
use crate::{Error, Result};

/// An ODE system `H_k(s, u, u', ...) = 0` in one independent variable.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeSystem {
    pub jet: JetSpec,
    pub equations: Vec<Expr>,
    pub label: String,
}

impl OdeSystem {
    pub fn new(mut jet: JetSpec, equations: Vec<Expr>, label: &str) -> Result<OdeSystem> {
        if jet.independents.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "ODE system needs one independent, got {}",
                jet.independents.len()
            )));
        }
        for e in &equations {
            if let Some(j) = e.jets().into_iter().find(|j| jet.args_of(&j.var).is_none()) {
                return Err(Error::UnknownIdentifier(j.var.to_string()));
            }
        }
        let s = OdeSystem {
            jet: jet.clone(),
            equations,
            label: label.to_string(),
        };
        jet.max_order = jet.max_order.max(s.order());
        Ok(OdeSystem { jet, ..s })
    }

    pub fn parse(jet: JetSpec, equations: &[&str], label: &str) -> Result<OdeSystem> {
        let eqs = equations
            .iter()
            .map(|t| parse_expr(t, &jet))
            .collect::<Result<Vec<_>>>()?;
        OdeSystem::new(jet, eqs, label)
    }

    pub fn order(&self) -> usize {
        self.equations
            .iter()
            .flat_map(|e| e.jets())
            .map(|j| j.order())
            .max()
            .unwrap_or(0)
    }

    pub fn independent(&self) -> char {
        self.jet.independent_letters()[0]
    }
}

impl DiffSystem for OdeSystem {
    fn jet(&self) -> &JetSpec {
        &self.jet
    }

    fn equations(&self) -> Vec<Expr> {
        self.equations.clone()
    }

    fn solved(&self) -> Result<SolvedSystem> {
        SolvedSystem::from_equations(&self.jet, &self.equations)
    }
}

impl std::fmt::Display for OdeSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, e) in self.equations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e} = 0")?;
        }
        Ok(())
    }
}
