use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use lieforge::catalogue::{self, PrintedOde};
use lieforge::expr::parse_expr;
use lieforge::reduce::{
    complete_elliptic_k, eliminate_to_second_order, jacobi_sn_cn_dn, order_reduce, raise_order, same_equations,
    travelling_wave_reduce, verify_solution, NumericCheck, SampleDomain, VerifyMode,
};
use lieforge::Expr;

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn elimination_matches_independent_derivation() {
    let first = PrintedOde::Member2FirstOrder.system().unwrap();
    let e = eliminate_to_second_order(&first).unwrap();
    // sympy: numerator of G' + c F + G^2 - F^2 with G = F'/(c - 2F)
    let oracle = parse_expr(
        "c^3*F - 5*c^2*F^2 + c*F'' + 8*c*F^3 + 3*F'^2 - 2*F*F'' - 4*F^4",
        &first.jet,
    )
    .unwrap();
    assert!(e == oracle || e == -oracle.clone(), "{e}");
}

#[test]
fn member_three_order_reduction_flips_the_sign_of_c() {
    let r = travelling_wave_reduce(&catalogue::member(3).unwrap(), &Expr::sym("c")).unwrap();
    assert!(same_equations(&r.system.equations, &PrintedOde::Member3Wave.system().unwrap().equations));
    let lowered = order_reduce(&r.system).unwrap();
    let printed = PrintedOde::Member3Reduced.system().unwrap();
    assert!(!same_equations(&lowered.equations, &printed.equations));
    let flipped: Vec<Expr> = printed
        .equations
        .iter()
        .map(|e| e.substitute_one(&lieforge::Atom::sym("c"), &-Expr::sym("c")).unwrap())
        .collect();
    assert!(same_equations(&lowered.equations, &flipped));
    assert!(same_equations(&raise_order(&lowered).unwrap().equations, &r.system.equations));
}

#[test]
fn numeric_speed_gives_numeric_coefficients() {
    let r = travelling_wave_reduce(&catalogue::member(2).unwrap(), &Expr::from_int(3)).unwrap();
    let jet = &r.system.jet;
    let expected = [
        parse_expr("g'' - f'^2 + g'^2 + 3*f'", jet).unwrap(),
        parse_expr("f'' + 2*f'*g' - 3*g'", jet).unwrap(),
    ];
    assert!(same_equations(&r.system.equations, &expected), "{}", r.system);
}

#[test]
fn member_one_wave_is_degenerate() {
    let r = travelling_wave_reduce(&catalogue::member(1).unwrap(), &Expr::sym("c")).unwrap();
    assert_eq!(r.system.order(), 1);
    assert!(!r.removed_factors.is_empty(), "{:?}", r.removed_factors);
}

#[test]
fn jacobi_values_match_reference() {
    // scipy.special.ellipj(u, k^2)
    let cases = [
        (0.7, 0.9, 0.611965845576637, 0.7908841911731904, 0.8346575472111983),
        (2.3, 0.5, 0.8577670130602737, -0.5140386671308455, 0.9033598052970992),
        (-1.1, 0.3, -0.8840029810594762, 0.46748126109819577, 0.9641931785970154),
        (5.0, 0.99, 0.9406100807515353, -0.33948884516076544, 0.36449848797548834),
    ];
    for (u, k, sn, cn, dn) in cases {
        let (s, c, d) = jacobi_sn_cn_dn(u, k).unwrap();
        assert_abs_diff_eq!(s, sn, epsilon = 1e-13);
        assert_abs_diff_eq!(c, cn, epsilon = 1e-13);
        assert_abs_diff_eq!(d, dn, epsilon = 1e-13);
    }
    // scipy.special.ellipk(k^2)
    assert_abs_diff_eq!(complete_elliptic_k(0.5).unwrap(), 1.685750354812596, epsilon = 1e-13);
    assert_abs_diff_eq!(complete_elliptic_k(0.9).unwrap(), 2.2805491384227703, epsilon = 1e-13);
}

#[test]
fn sn_branch_solves_first_equation_only() {
    let k: f64 = 0.6;
    let sys = PrintedOde::Member3Reduced.system().unwrap();
    let cand = catalogue::elliptic_solution().unwrap();
    let mode = VerifyMode::Numeric(NumericCheck {
        params: params(&[("c", -(1.0 + k * k)), ("F0", 2f64.sqrt() * k), ("k", k)]),
        domain: SampleDomain::default(),
        tol: 1e-8,
    });
    let both = verify_solution(&sys, &cand, &mode).unwrap();
    assert!(!both.passed);
    let first = lieforge::reduce::OdeSystem::new(sys.jet.clone(), vec![sys.equations[0].clone()], "first").unwrap();
    let r = verify_solution(&first, &cand, &mode).unwrap();
    assert!(r.passed, "{:?}", r.max_residual);
    // unconstrained amplitude fails even the first equation
    let mode = VerifyMode::Numeric(NumericCheck {
        params: params(&[("c", -(1.0 + k * k)), ("F0", 1.0), ("k", k)]),
        domain: SampleDomain::default(),
        tol: 1e-8,
    });
    assert!(!verify_solution(&first, &cand, &mode).unwrap().passed);
}

#[test]
fn linear_solution_requires_constraint() {
    let sys = PrintedOde::Member4Wave.system().unwrap();
    let r = verify_solution(&sys, &catalogue::linear_solution().unwrap(), &VerifyMode::Symbolic).unwrap();
    assert!(r.passed);
    let bare = lieforge::reduce::SolutionCandidate::parse(
        &lieforge::JetSpec::ode(&["f", "g"], &["c", "f0", "f1", "g0"], 4),
        &[("f", "f1*s + f0"), ("g", "g0")],
        &[],
    )
    .unwrap();
    assert!(!verify_solution(&sys, &bare, &VerifyMode::Symbolic).unwrap().passed);
}
