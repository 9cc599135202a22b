#![allow(dead_code)]

use std::collections::HashMap;

use lieforge::expr::{equals_zero, eval_numeric, parse_expr};
use lieforge::jet::total_derivative;
use lieforge::{Atom, Complex, Error, Expr, JetSpec, ZeroTest};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn jet() -> JetSpec {
    JetSpec::real_pde(3).with_parameters(&["c"])
}

const LEAVES: &[&str] = &[
    "1", "2", "-3", "1/2", "-5/3", "t", "x", "c", "v", "w", "v_x", "w_x", "v_xx", "w_t", "sin(v)", "cos(2*x)",
    "exp(w)", "exp(-w)", "sin(x - c*t)", "sqrt(c)",
];

const INCOMPLETE_LEAVES: &[&str] = &["tan(x)", "(1 + x^2)^-1", "(c + v_x^2)^-1", "tan(v - t)"];

fn leaf(pool: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    prop::sample::select(pool).prop_map(|s| parse_expr(s, &jet()).unwrap())
}

fn grow(inner: BoxedStrategy<Expr>) -> BoxedStrategy<Expr> {
    prop_oneof![
        (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
        (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
        (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
        (inner.clone(), 0..3i32).prop_map(|(a, k)| a.pow(k).unwrap()),
        inner.prop_filter_map("non-polynomial argument", |a| Expr::sin(a).ok()),
    ]
    .boxed()
}

/// Random expressions in the exactly decidable class.
pub fn arb_expr() -> BoxedStrategy<Expr> {
    leaf(LEAVES).boxed().prop_recursive(3, 24, 2, |inner| grow(inner)).boxed()
}

/// Random expressions that may contain `tan` and reciprocals.
pub fn arb_incomplete_expr() -> BoxedStrategy<Expr> {
    prop_oneof![3 => leaf(LEAVES), 1 => leaf(INCOMPLETE_LEAVES)]
        .boxed()
        .prop_recursive(2, 12, 2, |inner| grow(inner))
        .boxed()
}

/// A numeric point for every leaf atom, off the real axis so that samples
/// rarely land on a pole.
pub fn point(e: &Expr, seed: u64) -> HashMap<Atom, Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    e.leaf_atoms()
        .into_iter()
        .filter_map(|a| match a {
            Atom::Sqrt(n) => Some(Atom::Sym(n)),
            Atom::Sym(_) | Atom::Jet(_) => Some(a),
            _ => None,
        })
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|a| (a, Complex::new(rng.gen_range(0.3..1.3), rng.gen_range(0.1..0.6))))
        .collect()
}

pub fn canonical_idempotent(e: &Expr) -> Result<(), TestCaseError> {
    let once = e.to_canonical();
    prop_assert_eq!(once.to_canonical(), once);
    Ok(())
}

pub fn product_rule(a: &Expr, b: &Expr, by: char) -> Result<(), TestCaseError> {
    let j = jet();
    let lhs = total_derivative(&(a * b), by, &j);
    let rhs = &total_derivative(a, by, &j) * b + a * &total_derivative(b, by, &j);
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn print_round_trip(e: &Expr) -> Result<(), TestCaseError> {
    let text = e.to_string();
    let back = parse_expr(&text, &jet());
    prop_assert!(back.is_ok(), "{} failed to parse: {:?}", text, back);
    prop_assert_eq!(back.unwrap(), e.clone());
    Ok(())
}

/// `a*b - b*a` must be judged zero; anything judged zero must evaluate to
/// zero at a random point.
pub fn zero_test_sound(a: &Expr, b: &Expr, seed: u64) -> Result<(), TestCaseError> {
    for (e, must_vanish) in [(a * b - b * a, true), (a + b, false)] {
        let verdict = equals_zero(&e).unwrap();
        if must_vanish {
            prop_assert!(verdict.is_zero());
        }
        if verdict.is_zero() {
            match eval_numeric(&e, &point(&e, seed)) {
                Ok(z) => prop_assert!(z.norm() < 1e-6, "{} judged zero, evaluates to {}", e, z),
                Err(Error::Pole(_)) => {}
                Err(other) => prop_assert!(false, "{}", other),
            }
        }
        if verdict == ZeroTest::Nonzero {
            prop_assert!(!e.is_zero());
        }
    }
    Ok(())
}
