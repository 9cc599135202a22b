//! Point symmetries of evolution systems and of ODE systems solved for their
//! highest derivatives: prolongation, residuals on solutions, determining
//! systems over a finite ansatz, and verification of given generators
//! (including families with constrained unknown functions).

mod determining;
mod field;
mod prolong;
mod solved;

pub use determining::{
    determining_system, discover_symmetries, AnsatzBasis, AnsatzSpec, DeterminingSystem, Discovery,
};
pub use field::{Constraint, VectorField};
pub use prolong::{
    characteristic_residual, prolong_generator, symmetry_residual, verify_generator, VerificationReport,
};
pub use solved::{Reducer, Rule, SolvedSystem};

use crate::expr::Expr;
use crate::hierarchy::PdeSystem;
use crate::jet::JetSpec;
use crate::Result;

/// A differential system `H = 0` with a solved form for eliminating
/// principal derivatives.
pub trait DiffSystem {
    fn jet(&self) -> &JetSpec;
    /// Left-hand sides `H` of the equations `H = 0`.
    fn equations(&self) -> Vec<Expr>;
    fn solved(&self) -> Result<SolvedSystem>;
}

impl DiffSystem for PdeSystem {
    fn jet(&self) -> &JetSpec {
        &self.jet
    }

    fn equations(&self) -> Vec<Expr> {
        let time = self.jet.independent_letters()[0].to_string();
        self.equations
            .iter()
            .map(|(d, rhs)| Expr::jet(d, &time) - rhs)
            .collect()
    }

    fn solved(&self) -> Result<SolvedSystem> {
        SolvedSystem::from_evolution(&self.jet, &self.equations)
    }
}
