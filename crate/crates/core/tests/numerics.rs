use std::collections::BTreeMap;

use lieforge::catalogue::{self, PrintedOde};
use lieforge::reduce::{
    emit_series_csv, fig1_path, fig1_series, integrate_system, rows_from_trajectory, ExplicitSystem, OdeSystem,
};
use lieforge::JetSpec;

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn rk4_follows_sn_on_the_amplitude_equation() {
    let k: f64 = 0.9;
    let p = params(&[("c", -(1.0 + k * k)), ("F0", 2f64.sqrt() * k), ("k", k)]);
    let sys = OdeSystem::parse(JetSpec::ode(&["F"], &["c"], 2), &["F'' - c*F - F^3"], "amplitude").unwrap();
    let ex = ExplicitSystem::new(&sys, &p).unwrap();
    let cand = catalogue::elliptic_solution().unwrap();
    let init = ex.initial_state(&cand, 0.0, &p).unwrap();
    let traj = integrate_system(&ex, init, (0.0, 10.0), 1e-3).unwrap();
    assert!(traj.pole.is_none());
    let mut err: f64 = 0.0;
    for (s, y) in traj.s.iter().zip(&traj.states) {
        err = err.max((y[0] - cand.derivatives("F", 0, *s, &p).unwrap()[0]).norm());
    }
    assert!(err < 1e-5, "{err}");
}

#[test]
fn rk4_is_fourth_order_on_tangent_branch() {
    let sys = PrintedOde::Member2FirstOrder.system().unwrap();
    let p = params(&[("c", 1.0), ("s0", -1.0)]);
    let ex = ExplicitSystem::new(&sys, &p).unwrap();
    let cand = catalogue::tan_solution().unwrap();
    let error = |h: f64| {
        let traj = integrate_system(&ex, ex.initial_state(&cand, 0.0, &p).unwrap(), (0.0, 2.0), h).unwrap();
        traj.s
            .iter()
            .zip(&traj.states)
            .map(|(s, y)| (y[1] - cand.derivatives("G", 0, *s, &p).unwrap()[0]).norm())
            .fold(0.0, f64::max)
    };
    let ratio = error(0.04) / error(0.02);
    assert!((12.0..=20.0).contains(&ratio), "{ratio}");
}

#[test]
fn trajectory_stops_at_the_tangent_pole() {
    let sys = PrintedOde::Member2FirstOrder.system().unwrap();
    let p = params(&[("c", 1.0), ("s0", 0.0)]);
    let ex = ExplicitSystem::new(&sys, &p).unwrap();
    let cand = catalogue::tan_solution().unwrap();
    let traj = integrate_system(&ex, ex.initial_state(&cand, 0.0, &p).unwrap(), (0.0, 5.0), 1e-3).unwrap();
    // G = -tan(s/2)/2 blows up at s = pi
    let at = traj.pole.expect("pole");
    assert!((at - std::f64::consts::PI).abs() < 1e-2, "{at}");
    let rows = rows_from_trajectory(&traj);
    assert_eq!(rows.len(), traj.len());
}

#[test]
fn profile_csv_round_trip() {
    let dir = tempdir();
    let base = dir.join("profile.csv");
    let rows = fig1_series(1.0, 1.0, 2.0, (0.0, 6.0), 50).unwrap();
    let path = fig1_path(&base, 2.0);
    emit_series_csv(&rows, &path).unwrap();
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["s", "F_re", "F_im", "G_re", "G_im"]);
    let back: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(back.len(), rows.len());
    for (r, b) in rows.iter().zip(&back) {
        assert_eq!([r.s, r.f.re, r.f.im, r.g.re, r.g.im].to_vec(), *b);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

fn tempdir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("lieforge-numerics-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
