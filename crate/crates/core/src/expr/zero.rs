use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Atom, Compiled, Expr};
use crate::{Error, Result, DEFAULT_SEED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroTest {
    /// The canonical form is empty.
    Zero,
    /// Not decided symbolically, but every sample evaluated to (relative) zero.
    ProbablyZero,
    Nonzero,
}

impl ZeroTest {
    pub fn is_zero(self) -> bool {
        !matches!(self, ZeroTest::Nonzero)
    }
}

#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub seed: u64,
    pub samples: usize,
    pub rel_tol: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: seed_from_env(),
            samples: 200,
            rel_tol: 1e-10,
        }
    }
}

/// `LIEFORGE_SEED` if set and valid, otherwise the crate default.
pub fn seed_from_env() -> u64 {
    std::env::var("LIEFORGE_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

pub fn equals_zero(e: &Expr) -> Result<ZeroTest> {
    equals_zero_with(e, &SampleConfig::default())
}

/// Decides zero exactly for the fully normalised class; expressions with
/// `tan` or reciprocal atoms are sampled at random rational points.
pub fn equals_zero_with(e: &Expr, cfg: &SampleConfig) -> Result<ZeroTest> {
    if e.is_zero() {
        return Ok(ZeroTest::Zero);
    }
    if !e.is_incomplete() {
        return Ok(ZeroTest::Nonzero);
    }
    let vars = sample_variables(e);
    let compiled = Compiled::new(e, &vars)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ok = 0;
    let mut attempts = 0;
    while ok < cfg.samples && attempts < cfg.samples * 10 {
        attempts += 1;
        let values = random_point(&mut rng, vars.len());
        match compiled.eval_with_scale(&values) {
            Ok((v, scale)) => {
                ok += 1;
                if v.norm() > cfg.rel_tol * scale.max(1.0) {
                    return Ok(ZeroTest::Nonzero);
                }
            }
            Err(Error::Pole(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    if ok == 0 {
        return Err(Error::AllSamplesFailed);
    }
    Ok(ZeroTest::ProbablyZero)
}

/// Symbols and jet coordinates to bind when sampling (`sqrt(c)` binds `c`).
pub(crate) fn sample_variables(e: &Expr) -> Vec<Atom> {
    let mut vars: Vec<Atom> = e
        .leaf_atoms()
        .into_iter()
        .filter_map(|a| match a {
            Atom::Sqrt(n) => Some(Atom::Sym(n)),
            Atom::I => None,
            other => Some(other),
        })
        .collect();
    vars.sort();
    vars.dedup();
    vars
}

/// Nonzero rationals `n/d` in `[-2, 2]` with `d <= 7`.
pub(crate) fn random_point(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let d: i64 = rng.gen_range(1..=7);
            let mut k: i64 = rng.gen_range(-2 * d..=2 * d);
            if k == 0 {
                k = 1;
            }
            Complex64::new(k as f64 / d as f64, 0.0)
        })
        .collect()
}
