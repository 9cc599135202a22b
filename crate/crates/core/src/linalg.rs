//! Row reduction, rank and nullspace over any [`Scalar`].
//!
//! Two routes are provided for exact rational matrices: the generic
//! [`rref`] (division-based) and [`nullspace_fraction_free`], which clears
//! denominators and runs Bareiss elimination over the integers before the
//! final normalisation. Determining systems use the fraction-free route; the
//! generic one is used for membership solves and as a cross-check.

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;
use crate::{Error, Integer, Rational, Result};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    pub rows: Vec<Vec<S>>,
    pub ncols: usize,
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: Vec<Vec<S>>, ncols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == ncols));
        Matrix { rows, ncols }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix {
            rows: vec![vec![S::zero(); ncols]; nrows],
            ncols,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }
}

/// Reduced row-echelon form in place. Pivots are taken column by column in
/// declared order; within a column the first admissible row wins (exact
/// types) or the heaviest one (floating types). Returns pivot columns.
pub fn rref<S: Scalar>(m: &mut Matrix<S>) -> Result<Vec<usize>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.ncols {
        if row == m.rows.len() {
            break;
        }
        let mut best: Option<(usize, S)> = None;
        let mut saw_nonzero = false;
        for r in row..m.rows.len() {
            let v = &m.rows[r][col];
            if v.negligible() {
                continue;
            }
            saw_nonzero = true;
            if let Some(inv) = v.try_recip() {
                let better = match &best {
                    None => true,
                    Some((b, _)) => v.pivot_weight() > m.rows[*b][col].pivot_weight(),
                };
                if better {
                    best = Some((r, inv));
                }
            }
        }
        let Some((prow, inv)) = best else {
            if saw_nonzero {
                return Err(Error::NonInvertiblePivot(format!("column {col}")));
            }
            continue;
        };
        m.rows.swap(row, prow);
        let pivot_row: Vec<S> = m.rows[row].iter().map(|x| x.clone() * inv.clone()).collect();
        m.rows[row] = pivot_row;
        for r in 0..m.rows.len() {
            if r == row {
                continue;
            }
            let factor = m.rows[r][col].clone();
            if factor.negligible() {
                continue;
            }
            for c in col..m.ncols {
                let delta = factor.clone() * m.rows[row][c].clone();
                let cur = std::mem::replace(&mut m.rows[r][c], S::zero());
                m.rows[r][c] = cur - delta;
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.rows.truncate(pivots.len().max(row));
    m.rows.retain(|r| r.iter().any(|x| !x.negligible()));
    Ok(pivots)
}

pub fn rank<S: Scalar>(m: &Matrix<S>) -> Result<usize> {
    let mut m = m.clone();
    Ok(rref(&mut m)?.len())
}

/// Nullspace basis from a reduced matrix: one vector per free column, in
/// increasing column order, with a 1 in the free slot.
pub fn nullspace_from_rref<S: Scalar>(m: &Matrix<S>, pivots: &[usize]) -> Vec<Vec<S>> {
    let free: Vec<usize> = (0..m.ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); m.ncols];
            v[f] = S::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m.rows[i][f].clone();
            }
            v
        })
        .collect()
}

pub fn nullspace<S: Scalar>(m: &Matrix<S>) -> Result<Vec<Vec<S>>> {
    let mut r = m.clone();
    let pivots = rref(&mut r)?;
    Ok(nullspace_from_rref(&r, &pivots))
}

/// Solves `A x = b`; returns one particular solution or `None` if inconsistent.
/// Free variables are set to zero.
pub fn solve<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<Option<Vec<S>>> {
    let n = a.ncols;
    let rows = a
        .rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let mut aug = Matrix::new(rows, n + 1);
    let pivots = rref(&mut aug)?;
    if pivots.contains(&n) {
        return Ok(None);
    }
    let mut x = vec![S::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug.rows[i][n].clone();
    }
    Ok(Some(x))
}

/// Whether `v` lies in the span of `basis` (vectors of equal length).
pub fn span_contains<S: Scalar>(basis: &[Vec<S>], v: &[S]) -> Result<bool> {
    if basis.is_empty() {
        return Ok(v.iter().all(|x| x.negligible()));
    }
    let ncols = basis.len();
    let rows: Vec<Vec<S>> = (0..v.len())
        .map(|i| basis.iter().map(|b| b[i].clone()).collect())
        .collect();
    Ok(solve(&Matrix::new(rows, ncols), v)?.is_some())
}

/// Exact nullspace by fraction-free (Bareiss) elimination.
///
/// Each row is scaled to a primitive integer vector, reduced to echelon form
/// with exact integer arithmetic, then back-substituted to the unique reduced
/// row-echelon form over the rationals. Pivots follow declared column order
/// and are normalised to 1, so the returned basis is canonical.
pub fn nullspace_fraction_free(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (echelon, pivots) = integer_echelon(rows, ncols);
    let reduced = back_substitute(&echelon, &pivots, ncols);
    nullspace_from_rref(&reduced, &pivots)
}

pub fn rank_fraction_free(rows: &[Vec<Rational>], ncols: usize) -> usize {
    integer_echelon(rows, ncols).1.len()
}

/// Indices of a maximal linearly independent subset of sparse rows, chosen
/// greedily in input order. Rows are `(column, value)` lists.
pub fn independent_rows(rows: &[Vec<(usize, Rational)>]) -> Vec<usize> {
    use std::collections::BTreeMap;
    let mut echelon: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
    let mut keep = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut r: BTreeMap<usize, Rational> = row
            .iter()
            .filter(|(_, q)| !q.is_zero())
            .map(|(c, q)| (*c, q.clone()))
            .collect();
        while let Some((&c, lead)) = r.iter().next() {
            let Some(piv) = echelon.get(&c) else {
                break;
            };
            let f = lead.clone();
            for (col, v) in piv {
                let entry = r.entry(*col).or_insert_with(Rational::zero);
                *entry -= &f * v;
                if entry.is_zero() {
                    r.remove(col);
                }
            }
        }
        if let Some((&c, lead)) = r.iter().next() {
            let inv = lead.recip();
            let normalised = r.into_iter().map(|(k, v)| (k, v * &inv)).collect();
            echelon.insert(c, normalised);
            keep.push(idx);
        }
    }
    keep
}

fn to_primitive_integers(row: &[Rational]) -> Vec<Integer> {
    let lcm = row
        .iter()
        .fold(Integer::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<Integer> = row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let g = ints.iter().fold(Integer::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

fn integer_echelon(rows: &[Vec<Rational>], ncols: usize) -> (Vec<Vec<Integer>>, Vec<usize>) {
    let mut m: Vec<Vec<Integer>> = rows
        .iter()
        .map(|r| to_primitive_integers(r))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    let mut prev = Integer::one();
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        for r in row + 1..m.len() {
            if m[r][col].is_zero() {
                // Bareiss step still has to rescale this row to keep divisibility.
                for c in col..ncols {
                    let v = &m[r][c] * &m[row][col];
                    m[r][c] = v / &prev;
                }
                continue;
            }
            for c in col + 1..ncols {
                let v = &m[row][col] * &m[r][c] - &m[r][col] * &m[row][c];
                m[r][c] = v / &prev;
            }
            m[r][col] = Integer::zero();
        }
        prev = m[row][col].clone();
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    (m, pivots)
}

fn back_substitute(echelon: &[Vec<Integer>], pivots: &[usize], ncols: usize) -> Matrix<Rational> {
    let mut rows: Vec<Vec<Rational>> = echelon
        .iter()
        .zip(pivots)
        .map(|(r, &p)| {
            let lead = Rational::from_integer(r[p].clone());
            r.iter()
                .map(|x| Rational::from_integer(x.clone()) / &lead)
                .collect()
        })
        .collect();
    for i in (0..rows.len()).rev() {
        let p = pivots[i];
        for k in 0..i {
            let f = rows[k][p].clone();
            if f.is_zero() {
                continue;
            }
            for c in p..ncols {
                let d = &f * &rows[i][c];
                rows[k][c] -= d;
            }
        }
    }
    Matrix::new(rows, ncols)
}

/// Sign-normalised primitive integer form of a rational vector (first nonzero
/// entry positive). Useful for comparing spans independently of scaling.
pub fn primitive_direction(v: &[Rational]) -> Vec<Integer> {
    let mut ints = to_primitive_integers(v);
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            ints.iter_mut().for_each(|x| *x = -x.clone());
        }
    }
    ints
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| q(x, 1)).collect())
            .collect()
    }

    #[test]
    fn fraction_free_matches_generic_rref() {
        let rows = m(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, -1, 2], &[3, 7, 8, 14]]);
        let ff = nullspace_fraction_free(&rows, 4);
        let generic = nullspace(&Matrix::new(rows.clone(), 4)).unwrap();
        assert_eq!(ff, generic);
        assert_eq!(ff.len(), 2);
        for v in &ff {
            for r in &rows {
                let dot: Rational = r.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn rational_entries_and_empty_system() {
        let rows = vec![vec![q(1, 2), q(-1, 3)], vec![q(3, 4), q(-1, 2)]];
        assert_eq!(rank_fraction_free(&rows, 2), 1);
        assert_eq!(nullspace_fraction_free(&rows, 2), vec![vec![q(2, 3), q(1, 1)]]);
        assert!(nullspace_fraction_free(&[], 0).is_empty());
        assert_eq!(nullspace_fraction_free(&[], 2).len(), 2);
    }

    #[test]
    fn float_and_exact_agree_on_rank() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![1.0, 0.0, 1.0]];
        assert_eq!(rank(&Matrix::new(rows, 3)).unwrap(), 2);
        let rows32 = vec![vec![1.0f32, 2.0], vec![3.0, 4.0]];
        assert_eq!(rank(&Matrix::new(rows32, 2)).unwrap(), 2);
    }

    #[test]
    fn solve_and_span() {
        let a = Matrix::new(m(&[&[1, 0], &[0, 1], &[1, 1]]), 2);
        assert_eq!(solve(&a, &[q(1, 1), q(2, 1), q(3, 1)]).unwrap(), Some(vec![q(1, 1), q(2, 1)]));
        assert_eq!(solve(&a, &[q(1, 1), q(2, 1), q(4, 1)]).unwrap(), None);
        let basis = m(&[&[1, 1, 0], &[0, 1, 1]]);
        assert!(span_contains(&basis, &[q(1, 1), q(2, 1), q(1, 1)]).unwrap());
        assert!(!span_contains(&basis, &[q(1, 1), q(0, 1), q(0, 1)]).unwrap());
    }
}
