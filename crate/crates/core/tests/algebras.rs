use lieforge::catalogue;
use lieforge::liealg::{algebra_signature, jacobi_check, lie_bracket, structure_constants};
use lieforge::symmetry::VectorField;
use lieforge::JetSpec;

#[test]
fn member_two_signature() {
    let t = structure_constants(&catalogue::member2_generators().unwrap()).unwrap();
    assert!(jacobi_check(&t).unwrap());
    let sig = algebra_signature(&t).unwrap();
    // by hand from the table: sl(2) acting on a Heisenberg algebra, plus D_w
    // which is central but not a commutator
    assert_eq!(sig.dimension, 7);
    assert_eq!(sig.derived_series, vec![7, 6]);
    assert_eq!(sig.lower_central_series, vec![7, 6]);
    assert_eq!(sig.center, 2);
    assert_eq!(sig.abelian_summand, 1);
    assert!(!sig.solvable && !sig.nilpotent && !sig.abelian);
}

#[test]
fn member_three_wave_algebra() {
    let t = structure_constants(&catalogue::member3_wave_generators().unwrap()).unwrap();
    assert!(t.is_closed());
    let sig = algebra_signature(&t).unwrap();
    // two central translations and a perfect three-dimensional part
    assert_eq!(sig.derived_series, vec![5, 3]);
    assert_eq!(sig.center, 2);
    assert_eq!(sig.abelian_summand, 2);
}

#[test]
fn member_four_translations_commute() {
    let t = structure_constants(&catalogue::member4_generators().unwrap()).unwrap();
    let sig = algebra_signature(&t).unwrap();
    assert!(sig.abelian);
    assert_eq!(sig.center, 4);
}

#[test]
fn bracket_is_antisymmetric_on_samples() {
    let jet = JetSpec::real_pde(2);
    let x = VectorField::parse("xi_t = t^2; xi_x = t*x; eta_v = x^2/4; eta_w = -t/2", &jet).unwrap();
    let y = VectorField::parse("eta_v = sin(v)*exp(-w); xi_x = x", &jet).unwrap();
    let xy = lie_bracket(&x, &y).unwrap();
    let yx = lie_bracket(&y, &x).unwrap();
    assert!(xy.add(&yx).unwrap().is_zero());
    assert!(lie_bracket(&x, &x).unwrap().is_zero());
}
