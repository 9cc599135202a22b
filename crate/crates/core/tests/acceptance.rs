//! Acceptance gate: one PASS/FAIL line per criterion, each preceded by the
//! individual checks and the measured values.
//!
//! Criteria listed in `KNOWN_FAILURES` fail because the published data they
//! compare against is wrong; the harness still runs them in full and exits
//! nonzero only when the outcome differs from that list.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use lieforge::catalogue::{self, PrintedBracket, PrintedOde};
use lieforge::expr::parse_expr;
use lieforge::hierarchy::{audit_member, complex_split, hierarchy_member};
use lieforge::liealg::{compare_with_printed, jacobi_check, structure_constants};
use lieforge::reduce::{
    clear_denominators, eliminate_to_second_order, emit_series_csv, fig1_checks, fig1_path, fig1_series,
    integrate_candidate, integrate_system, jacobi_sn, jacobi_sn_cn_dn, lift_and_check, order_reduce,
    proportional, same_equations, travelling_wave_reduce, verify_solution, ExplicitSystem, LiftGrid,
    NumericCheck, OdeSystem, SampleDomain, SolutionCandidate, VerifyMode,
};
use lieforge::symmetry::{discover_symmetries, verify_generator, AnsatzBasis, AnsatzSpec, DiffSystem, VectorField};
use lieforge::{Expr, JetSpec, ZeroTest};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestError, TestRunner};

const KNOWN_FAILURES: &[usize] = &[3, 7, 8, 9];

struct Criterion {
    ok: bool,
}

impl Criterion {
    fn check(&mut self, name: &str, ok: bool, detail: impl std::fmt::Display) {
        self.ok &= ok;
        println!("    [{}] {name}: {detail}", if ok { "ok" } else { "FAIL" });
    }

    fn note(&self, name: &str, detail: impl std::fmt::Display) {
        println!("    [info] {name}: {detail}");
    }
}

fn run(n: usize, title: &str, body: impl FnOnce(&mut Criterion) -> lieforge::Result<()>) -> bool {
    println!("criterion {n}: {title}");
    let mut c = Criterion { ok: true };
    if let Err(e) = body(&mut c) {
        c.check("no errors", false, e);
    }
    println!("criterion {n}: {}", if c.ok { "PASS" } else { "FAIL" });
    c.ok
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn verdict<S: DiffSystem + ?Sized>(sys: &S, x: &VectorField) -> lieforge::Result<(ZeroTest, ZeroTest)> {
    let r = verify_generator(sys, x)?;
    Ok((r.status, r.characteristic))
}

fn hierarchy_golden(c: &mut Criterion) -> lieforge::Result<()> {
    let start = Instant::now();
    let as_pair = |k: usize| -> lieforge::Result<(Expr, Expr)> {
        let m = catalogue::member(k)?;
        Ok((m.rhs("v").cloned().unwrap_or_default(), m.rhs("w").cloned().unwrap_or_default()))
    };
    c.check(
        "split of member 1 equals printed pair",
        complex_split(&hierarchy_member(0)?)? == as_pair(1)?,
        "exact",
    );
    c.check(
        "complex member 2 equals printed form",
        hierarchy_member(1)? == catalogue::complex_member(2)?,
        "canonical",
    );
    c.check(
        "split of member 3 equals printed pair",
        complex_split(&hierarchy_member(2)?)? == as_pair(3)?,
        "exact",
    );
    let audit = audit_member(4)?;
    let terms: usize = audit.equations.iter().map(|e| e.terms.len()).sum();
    c.check("member 4 audit delta is itemised", !audit.matches && terms > 0, format!("{terms} differing terms"));
    let secs = start.elapsed().as_secs_f64();
    c.check("runtime < 1 s", secs < 1.0, format!("{secs:.3} s"));
    Ok(())
}

fn member2_discovery(c: &mut Criterion) -> lieforge::Result<()> {
    let start = Instant::now();
    let sys = catalogue::member(2)?;
    let basis = AnsatzBasis::new(&sys.jet, &AnsatzSpec::polynomial(2))?;
    let d = discover_symmetries(&sys, &basis)?;
    c.check("nullity", d.dimension() == 7, format!("{} (ansatz size {})", d.dimension(), basis.len()));
    for (i, g) in catalogue::member2_generators()?.iter().enumerate() {
        let inside = d.spans(&basis, g)?;
        let (p, ch) = verdict(&sys, g)?;
        c.check(
            &format!("generator {}", i + 1),
            inside && p == ZeroTest::Zero && ch == ZeroTest::Zero,
            format!("in span {inside}, prolongation {p:?}, characteristic {ch:?}"),
        );
    }
    let secs = start.elapsed().as_secs_f64();
    c.check("runtime < 60 s", secs < 60.0, format!("{secs:.2} s"));
    Ok(())
}

fn member2_family(c: &mut Criterion) -> lieforge::Result<()> {
    let sys = catalogue::member(2)?;
    let (p, ch) = verdict(&sys, &catalogue::member2_family()?)?;
    c.check(
        "family with heat-equation constraints",
        p == ZeroTest::Zero && ch == ZeroTest::Zero,
        format!("prolongation {p:?}, characteristic {ch:?}"),
    );
    let (p, _) = verdict(&sys, &catalogue::member2_family_with("a_t = a_xx", "")?)?;
    c.check("negative control without the b constraint", p == ZeroTest::Nonzero, format!("{p:?}"));
    let (p, ch) = verdict(&sys, &catalogue::member2_family_with("a_t = b_xx", "b_t = -a_xx")?)?;
    c.note(
        "family with coupled constraints a_t = b_xx, b_t = -a_xx",
        format!("prolongation {p:?}, characteristic {ch:?}"),
    );
    Ok(())
}

fn member3(c: &mut Criterion) -> lieforge::Result<()> {
    let sys = catalogue::member(3)?;
    let gens = catalogue::member3_generators()?;
    for i in [0, 2, 3, 4, 5, 6] {
        let (p, ch) = verdict(&sys, &gens[i])?;
        c.check(
            &format!("generator {}", i + 1),
            p == ZeroTest::Zero && ch == ZeroTest::Zero,
            format!("{p:?} / {ch:?}"),
        );
    }
    let (p, _) = verdict(&sys, &catalogue::member3_scaling()?)?;
    c.check("scaling t D_t + x/3 D_x", p == ZeroTest::Zero, format!("{p:?}"));
    let r = verify_generator(&sys, &gens[1])?;
    c.check(
        "printed D_t + x/3 D_x is rejected",
        r.status == ZeroTest::Nonzero && r.characteristic == ZeroTest::Nonzero,
        format!("remainder {}", r.remainders.join("; ")),
    );
    let (p, ch) = verdict(&sys, &catalogue::member3_family()?)?;
    c.check("c,d family", p == ZeroTest::Zero && ch == ZeroTest::Zero, format!("{p:?} / {ch:?}"));
    Ok(())
}

fn member4_discovery(c: &mut Criterion) -> lieforge::Result<()> {
    let start = Instant::now();
    let sys = catalogue::member(4)?;
    let spec = AnsatzSpec::default_for_member(4);
    let basis = AnsatzBasis::new(&sys.jet, &spec)?;
    let d = discover_symmetries(&sys, &basis)?;
    c.check(
        "nullity",
        d.dimension() == 4,
        format!(
            "{} (D={}, M={}, K={}, ansatz size {})",
            d.dimension(),
            spec.degree,
            spec.trig,
            spec.expw,
            basis.len()
        ),
    );
    let translations = catalogue::member4_generators()?;
    let all_in = translations.iter().map(|g| d.spans(&basis, g)).collect::<lieforge::Result<Vec<_>>>()?;
    c.check("translations lie in the span", all_in.iter().all(|b| *b), format!("{all_in:?}"));
    c.check("all verified", d.all_verified(), format!("{:.2} s", start.elapsed().as_secs_f64()));
    Ok(())
}

fn brackets(c: &mut Criterion) -> lieforge::Result<()> {
    let t = structure_constants(&catalogue::member2_generators()?)?;
    c.check("member 2 table closes", t.is_closed(), format!("{} residual brackets", t.residuals.len()));
    let n = t.dimension();
    let mut antisymmetric = true;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                antisymmetric &= (&t.constants[i][j][k] + &t.constants[j][i][k]).is_zero();
            }
        }
    }
    c.check("antisymmetric", antisymmetric, "exact");
    c.check("Jacobi identity", jacobi_check(&t)?, "exact");
    for line in t.lines() {
        c.note("member 2", line);
    }
    let mismatches = compare_with_printed(&t, &catalogue::member2_printed_brackets()?)?;
    c.check(
        "printed member 2 table disagrees somewhere",
        !mismatches.is_empty(),
        format!("{} disagreements", mismatches.len()),
    );
    for m in &mismatches {
        c.note(
            &format!("[X{}, X{}]", m.left, m.right),
            format!("printed {}, computed {}", m.printed, m.computed),
        );
    }

    let mut gens = catalogue::member3_generators()?;
    gens[1] = catalogue::member3_scaling()?;
    let t3 = structure_constants(&gens)?;
    let expect = |coef: &str, want: usize, got: &[Expr]| {
        got.iter().enumerate().all(|(k, e)| {
            if k == want {
                *e == parse_expr(coef, &JetSpec::real_pde(3)).unwrap()
            } else {
                e.is_zero()
            }
        })
    };
    c.check(
        "[X5, X7] = -2 X6",
        expect("-2", 5, &t3.constants[4][6]),
        t3.combination(4, 6)?.operator_string(),
    );
    c.check(
        "[X5, X6] = -X7/2",
        expect("-1/2", 6, &t3.constants[4][5]),
        t3.combination(4, 5)?.operator_string(),
    );
    Ok(())
}

fn reduced_algebras(c: &mut Criterion) -> lieforge::Result<()> {
    let wave2 = PrintedOde::Member2Wave.system()?;
    for (i, g) in catalogue::member2_wave_generators()?.iter().enumerate() {
        let (p, ch) = verdict(&wave2, g)?;
        c.check(
            &format!("member 2 wave generator {}", i + 1),
            p == ZeroTest::Zero && ch == ZeroTest::Zero,
            format!("{p:?} / {ch:?}"),
        );
    }
    let wave3 = PrintedOde::Member3Wave.system()?;
    let gens3 = catalogue::member3_wave_generators()?;
    for (i, g) in gens3.iter().enumerate() {
        let (p, ch) = verdict(&wave3, g)?;
        c.check(
            &format!("member 3 wave generator {}", i + 1),
            p == ZeroTest::Zero && ch == ZeroTest::Zero,
            format!("{p:?} / {ch:?}"),
        );
    }
    let t = structure_constants(&gens3[2..5])?;
    let shifted: Vec<PrintedBracket> = catalogue::member3_wave_printed_brackets()?
        .into_iter()
        .map(|b| PrintedBracket {
            left: b.left - 2,
            right: b.right - 2,
            combination: b.combination.into_iter().map(|(e, k)| (e, k - 2)).collect(),
        })
        .collect();
    let mismatches = compare_with_printed(&t, &shifted)?;
    c.check(
        "so(2,1) constants of generators 3-5",
        t.is_closed() && mismatches.is_empty(),
        format!("{:?}", t.lines()),
    );
    Ok(())
}

fn reductions(c: &mut Criterion) -> lieforge::Result<()> {
    let cc = Expr::sym("c");
    let pairs = [
        (2, PrintedOde::Member2Wave, PrintedOde::Member2FirstOrder),
        (3, PrintedOde::Member3Wave, PrintedOde::Member3Reduced),
    ];
    for (k, wave, first) in pairs {
        let r = travelling_wave_reduce(&catalogue::member(k)?, &cc)?;
        let printed = wave.system()?;
        c.check(
            &format!("member {k} travelling wave"),
            same_equations(&r.system.equations, &printed.equations),
            &r.system,
        );
        let lowered = order_reduce(&r.system)?;
        let printed = first.system()?;
        let ok = same_equations(&lowered.equations, &printed.equations);
        c.check(&format!("member {k} order reduction"), ok, &lowered);
        if !ok {
            c.note("printed", &printed);
        }
    }
    let r4 = travelling_wave_reduce(&catalogue::member(4)?, &cc)?;
    c.note(
        "member 4 travelling wave matches printed",
        same_equations(&r4.system.equations, &PrintedOde::Member4Wave.system()?.equations),
    );
    let first = PrintedOde::Member2FirstOrder.system()?;
    let e = eliminate_to_second_order(&first)?;
    let printed = PrintedOde::SecondOrderF.system()?;
    let target = clear_denominators(&printed.equations[0])?;
    c.check(
        "second-order F equation up to a factor",
        proportional(&e, &target, &first.jet)?,
        format!("derived {e}"),
    );
    let corrected = parse_expr("F'' - 3*F'^2*(2*F - c)^-1 + F*(F - c)*(2*F - c)", &first.jet)?;
    c.note(
        "proportional to the form with -3 F'^2/(2F - c)",
        proportional(&e, &clear_denominators(&corrected)?, &first.jet)?,
    );
    Ok(())
}

fn numeric(params: BTreeMap<String, f64>, tol: f64) -> VerifyMode {
    VerifyMode::Numeric(NumericCheck {
        params,
        domain: SampleDomain::default(),
        tol,
    })
}

fn solution_line(c: &mut Criterion, name: &str, sys: &OdeSystem, cand: &SolutionCandidate, mode: &VerifyMode) -> lieforge::Result<()> {
    let r = verify_solution(sys, cand, mode)?;
    let detail = match r.max_residual {
        Some(m) => format!(
            "max residual {m:.3e} over {} samples ({} excluded); constraints {:?}",
            r.samples - r.excluded,
            r.excluded,
            r.constraints
        ),
        None => format!("{:?}; residuals {:?}; constraints {:?}", r.status, r.residuals, r.constraints),
    };
    let enough = r.max_residual.is_none() || r.samples - r.excluded >= 200;
    c.check(name, r.passed && enough, detail);
    Ok(())
}

fn solutions(c: &mut Criterion) -> lieforge::Result<()> {
    let first = PrintedOde::Member2FirstOrder.system()?;
    solution_line(c, "tangent branch", &first, &catalogue::tan_solution()?, &VerifyMode::Symbolic)?;
    let rat = catalogue::rational_exp_solution()?;
    for f1 in [0.0, 1.0, 2.0] {
        let mode = numeric(params(&[("c", 1.0), ("F0", 1.0), ("F1", f1)]), 1e-9);
        solution_line(c, &format!("rational-exponential F1 = {f1}"), &first, &rat, &mode)?;
    }
    let reduced = PrintedOde::Member3Reduced.system()?;
    let mode = numeric(params(&[("c", 1.0), ("G0", 0.5), ("G1", 0.25)]), 1e-9);
    solution_line(c, "rational-trigonometric G", &reduced, &catalogue::rational_trig_solution()?, &mode)?;
    let k: f64 = 0.9;
    let mode = numeric(
        params(&[("c", -(1.0 + k * k)), ("F0", (2.0f64).sqrt() * k), ("k", k)]),
        1e-8,
    );
    let sn = catalogue::elliptic_solution()?;
    solution_line(c, "elliptic sn branch", &reduced, &sn, &mode)?;
    for (i, eq) in reduced.equations.iter().enumerate() {
        let single = OdeSystem::new(reduced.jet.clone(), vec![eq.clone()], "single equation")?;
        let r = verify_solution(&single, &sn, &mode)?;
        c.note(
            &format!("elliptic sn branch, equation {} alone", i + 1),
            format!("max residual {:.3e}", r.max_residual.unwrap_or(f64::NAN)),
        );
    }
    let wave4 = PrintedOde::Member4Wave.system()?;
    solution_line(c, "linear solution of member 4", &wave4, &catalogue::linear_solution()?, &VerifyMode::Symbolic)?;
    Ok(())
}

fn rk4_error(h: f64) -> lieforge::Result<f64> {
    let sys = PrintedOde::Member2FirstOrder.system()?;
    let p = params(&[("c", 1.0), ("s0", 0.0)]);
    let ex = ExplicitSystem::new(&sys, &p)?;
    let cand = catalogue::tan_solution()?;
    let init = ex.initial_state(&cand, 0.0, &p)?;
    let traj = integrate_system(&ex, init, (0.0, 2.0), h)?;
    let mut err: f64 = 0.0;
    for (s, y) in traj.s.iter().zip(&traj.states) {
        for (i, label) in traj.labels.iter().enumerate() {
            let exact = cand.derivatives(label, 0, *s, &p)?[0];
            err = err.max((y[i] - exact).norm());
        }
    }
    if traj.pole.is_some() || traj.s.last().map_or(true, |s| (s - 2.0).abs() > 1e-9) {
        return Err(lieforge::Error::InvalidParameter("trajectory stopped early".into()));
    }
    Ok(err)
}

fn numerics(c: &mut Criterion) -> lieforge::Result<()> {
    let e1 = rk4_error(1e-3)?;
    c.check("RK4 error at h = 1e-3", e1 < 1e-6, format!("{e1:.3e}"));
    let e_half = rk4_error(5e-4)?;
    c.note("error ratio for h = 1e-3 vs 5e-4 (rounding level)", format!("{:.2}", e1 / e_half));
    for h in [2e-2, 1e-2] {
        let ratio = rk4_error(h)? / rk4_error(h / 2.0)?;
        c.check(
            &format!("error ratio for h = {h:e} vs {:e}", h / 2.0),
            (12.0..=20.0).contains(&ratio),
            format!("{ratio:.2}"),
        );
    }

    let p = params(&[("c", 1.0), ("s0", 0.0)]);
    let named: Vec<_> = integrate_candidate(&catalogue::tan_solution()?, &p)?
        .into_iter()
        .map(|(d, prof)| (if d == "f" { "v".to_string() } else { "w".to_string() }, prof))
        .collect();
    let grid = LiftGrid::default();
    let r = lift_and_check(&catalogue::member(2)?, 1.0, &named, &p, &grid)?;
    c.check("lift of tangent branch to member 2", r < 1e-6, format!("{r:.3e} on {0}x{0} grid", grid.n));

    let k = 0.9;
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for i in 0..400 {
        let u = -6.0 + 12.0 * (i as f64 + 0.5) / 400.0;
        let sn = |s: f64| jacobi_sn(s, k).unwrap();
        let d = (8.0 * (sn(u + h) - sn(u - h)) - (sn(u + 2.0 * h) - sn(u - 2.0 * h))) / (12.0 * h);
        let (s, cn, dn) = jacobi_sn_cn_dn(u, k)?;
        worst = worst
            .max((d * d - (1.0 - s * s) * (1.0 - k * k * s * s)).abs())
            .max((s * s + cn * cn - 1.0).abs())
            .max((dn * dn + k * k * s * s - 1.0).abs());
    }
    c.check("sn'^2 = (1 - sn^2)(1 - k^2 sn^2)", worst < 1e-10, format!("{worst:.3e}"));
    Ok(())
}

fn fig1(c: &mut Criterion) -> lieforge::Result<()> {
    let dir = std::env::temp_dir().join(format!("lieforge-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| lieforge::Error::Io {
        path: dir.display().to_string(),
        msg: e.to_string(),
    })?;
    let base = dir.join("fig1.csv");
    let f1s = [0.0, 1.0, 2.0];
    for f1 in f1s {
        let rows = fig1_series(1.0, 1.0, f1, (0.0, 4.0 * PI), 1000)?;
        let path = fig1_path(&base, f1);
        emit_series_csv(&rows, &path)?;
        let lines = std::fs::read_to_string(&path).map(|t| t.lines().count()).unwrap_or(0);
        c.check(&format!("CSV for F1 = {f1}"), lines == rows.len() + 1 && lines > 1, format!("{} rows", lines - 1));
    }
    let _ = std::fs::remove_dir_all(&dir);
    let checks = fig1_checks(1.0, 1.0, &f1s)?;
    for ch in &checks {
        c.check(
            &format!("period 2 pi/c for F1 = {}", ch.f1),
            ch.periodicity_error < 1e-6,
            format!("error {:.3e}, {} sign changes of Re F'", ch.periodicity_error, ch.sign_changes),
        );
    }
    c.check(
        "more sign changes at F1 = 2 than at F1 = 0",
        checks[2].sign_changes > checks[0].sign_changes,
        format!("{} vs {}", checks[2].sign_changes, checks[0].sign_changes),
    );
    Ok(())
}

fn report<T: std::fmt::Debug>(c: &mut Criterion, name: &str, cases: u32, r: Result<(), TestError<T>>) {
    let detail = match &r {
        Ok(()) => format!("{cases} cases"),
        Err(e) => format!("{e:?}"),
    };
    c.check(name, r.is_ok(), detail);
}

fn property_suite(c: &mut Criterion) -> lieforge::Result<()> {
    let cases = 1000;
    let config = || Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let r = TestRunner::new(config()).run(&common::arb_expr(), |e| common::canonical_idempotent(&e));
    report(c, "canonical idempotence", cases, r);
    let r = TestRunner::new(config()).run(
        &(common::arb_expr(), common::arb_expr(), prop::sample::select(vec!['t', 'x'])),
        |(a, b, by)| common::product_rule(&a, &b, by),
    );
    report(c, "product rule", cases, r);
    let r = TestRunner::new(config()).run(&common::arb_incomplete_expr(), |e| common::print_round_trip(&e));
    report(c, "parse/print round trip", cases, r);
    let r = TestRunner::new(config()).run(
        &(common::arb_incomplete_expr(), common::arb_expr(), any::<u64>()),
        |(a, b, seed)| common::zero_test_sound(&a, &b, seed),
    );
    report(c, "zero-test soundness", cases, r);
    Ok(())
}

fn main() {
    let results = [
        run(1, "hierarchy golden tests", hierarchy_golden),
        run(2, "member 2 symmetry discovery", member2_discovery),
        run(3, "member 2 infinite family", member2_family),
        run(4, "member 3 generators", member3),
        run(5, "member 4 discovery", member4_discovery),
        run(6, "bracket tables", brackets),
        run(7, "reduced-system algebras", reduced_algebras),
        run(8, "reductions", reductions),
        run(9, "closed-form solutions", solutions),
        run(10, "numerics", numerics),
        run(11, "wave profile series", fig1),
        run(12, "kernel property suite", property_suite),
    ];
    let mut unexpected = Vec::new();
    for (i, ok) in results.iter().enumerate() {
        let n = i + 1;
        if *ok == KNOWN_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    let passed = results.iter().filter(|ok| **ok).count();
    println!("summary: {passed}/{} criteria pass; known failures {KNOWN_FAILURES:?}", results.len());
    if !unexpected.is_empty() {
        println!("outcome differs from the known-failure list for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
