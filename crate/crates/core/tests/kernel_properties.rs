mod common;

use common::{arb_expr, arb_incomplete_expr};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_form_is_idempotent(e in arb_expr()) {
        common::canonical_idempotent(&e)?;
    }

    #[test]
    fn total_derivative_obeys_product_rule(a in arb_expr(), b in arb_expr(), by in prop::sample::select(vec!['t', 'x'])) {
        common::product_rule(&a, &b, by)?;
    }

    #[test]
    fn printing_round_trips(e in arb_incomplete_expr()) {
        common::print_round_trip(&e)?;
    }

    #[test]
    fn zero_verdicts_agree_with_evaluation(a in arb_incomplete_expr(), b in arb_expr(), seed in any::<u64>()) {
        common::zero_test_sound(&a, &b, seed)?;
    }
}
