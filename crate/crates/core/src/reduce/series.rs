use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use crate::catalogue;
use crate::{Error, Result};

use super::numeric::Trajectory;
use super::ClosedEvaluator;

/// One CSV row: `s, F, G` with complex values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesRow {
    pub s: f64,
    pub f: Complex64,
    pub g: Complex64,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `s,F_re,F_im,G_re,G_im` with 17 significant digits.
pub fn emit_series_csv(rows: &[SeriesRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    w.write_record(["s", "F_re", "F_im", "G_re", "G_im"])
        .map_err(|e| io_error(path, e))?;
    for r in rows {
        w.write_record([fmt(r.s), fmt(r.f.re), fmt(r.f.im), fmt(r.g.re), fmt(r.g.im)])
            .map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Rows from a trajectory whose first two state components are `F` and `G`
/// (a missing `G` is written as zero).
pub fn rows_from_trajectory(traj: &Trajectory<f64>) -> Vec<SeriesRow> {
    let fi = traj.labels.iter().position(|l| l == "F").unwrap_or(0);
    let gi = traj.labels.iter().position(|l| l == "G");
    traj.s
        .iter()
        .zip(&traj.states)
        .map(|(s, y)| SeriesRow {
            s: *s,
            f: y[fi],
            g: gi.map(|i| y[i]).unwrap_or_default(),
        })
        .collect()
}

/// `F, F', G` of the rational-exponential solution at fixed `c, F0, F1`.
pub struct RationalExpProfile {
    f: ClosedEvaluator,
    g: ClosedEvaluator,
}

impl RationalExpProfile {
    /// Returns `None` at a pole.
    pub fn at(&self, s: f64) -> Result<Option<(Complex64, Complex64, Complex64)>> {
        let f = match self.f.at(s) {
            Ok(f) => f,
            Err(Error::Pole(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        match self.g.at(s) {
            Ok(g) => Ok(Some((f[0], f[1], g[0]))),
            Err(Error::Pole(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

pub fn rational_exp_profile(c: f64, f0: f64, f1: f64) -> Result<RationalExpProfile> {
    let params: BTreeMap<String, f64> = [("c", c), ("F0", f0), ("F1", f1)]
        .map(|(k, v)| (k.to_string(), v))
        .into();
    let cand = catalogue::rational_exp_solution()?;
    Ok(RationalExpProfile {
        f: cand.compile_closed("F", 1, &params)?,
        g: cand.compile_closed("G", 0, &params)?,
    })
}

/// `n` equally spaced samples of the rational-exponential solution on
/// `[lo, hi]`; samples at poles are dropped.
pub fn fig1_series(c: f64, f0: f64, f1: f64, range: (f64, f64), n: usize) -> Result<Vec<SeriesRow>> {
    let p = rational_exp_profile(c, f0, f1)?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let s = if n > 1 {
            range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
        } else {
            range.0
        };
        if let Some((f, _, g)) = p.at(s)? {
            rows.push(SeriesRow { s, f, g });
        }
    }
    Ok(rows)
}

/// `<stem>_F1_<value>.<ext>` next to `base`.
pub fn fig1_path(base: &Path, f1: f64) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("fig1");
    let name = match base.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_F1_{f1}.{ext}"),
        None => format!("{stem}_F1_{f1}"),
    };
    base.with_file_name(name)
}

/// Qualitative features of one curve: how far `F, G` are from being
/// `2 pi / c`-periodic, and how often `Re F'` changes sign in one period.
#[derive(Clone, Debug, Serialize)]
pub struct Fig1Check {
    pub f1: f64,
    pub period: f64,
    pub periodicity_error: f64,
    pub sign_changes: usize,
}

pub fn fig1_checks(c: f64, f0: f64, f1_values: &[f64]) -> Result<Vec<Fig1Check>> {
    let period = 2.0 * PI / c.abs();
    f1_values
        .iter()
        .map(|&f1| {
            let p = rational_exp_profile(c, f0, f1)?;
            let n = 4000;
            let mut err: f64 = 0.0;
            let mut signs = Vec::with_capacity(n);
            for i in 0..n {
                let s = period * (i as f64 + 0.5) / n as f64;
                let (Some(a), Some(b)) = (p.at(s)?, p.at(s + period)?) else {
                    continue;
                };
                err = err.max((a.0.re - b.0.re).abs()).max((a.2.re - b.2.re).abs());
                let d = a.1.re;
                if d != 0.0 {
                    signs.push(d > 0.0);
                }
            }
            if signs.is_empty() {
                return Err(Error::AllSamplesFailed);
            }
            let mut changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
            if signs.len() > 1 && signs[0] != signs[signs.len() - 1] {
                changes += 1;
            }
            Ok(Fig1Check {
                f1,
                period,
                periodicity_error: err,
                sign_changes: changes,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_series_is_header_only() {
        let dir = std::env::temp_dir().join(format!("lieforge-series-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.csv");
        emit_series_csv(&[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "s,F_re,F_im,G_re,G_im\n");
        let row = SeriesRow {
            s: 0.1,
            f: Complex64::new(1.0 / 3.0, 0.0),
            g: Complex64::new(0.0, -2.0),
        };
        emit_series_csv(&[row], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with("1.0000000000000001e-1,3.3333333333333331e-1,0.0000000000000000e0,0.0000000000000000e0,-2.0000000000000000e0\n"), "{text}");
        std::fs::remove_dir_all(&dir).unwrap();
        assert_eq!(fig1_path(Path::new("out/fig1.csv"), 2.0), PathBuf::from("out/fig1_F1_2.csv"));
    }
}
