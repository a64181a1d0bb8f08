//! Orientation predicates with an exact rational fallback.
//!
//! The f64 determinant is trusted only when its magnitude clearly exceeds a
//! relative error threshold; otherwise the sign is recomputed in exact
//! rational arithmetic (every f64 is a rational, so the fallback is lossless).

use crate::geom::{det_in_place, Point, MAX_DIM};
use num::rational::BigRational;
use num::{FromPrimitive, Signed, Zero};

/// Relative tolerance below which the floating determinant is not trusted.
pub const PREDICATE_REL_TOL: f64 = 1e-10;

/// Counters for how often the exact path was taken.
#[derive(Clone, Copy, Debug, Default)]
pub struct PredicateStats {
    /// Number of predicates whose float value fell inside the tolerance band.
    pub exact_fallbacks: u64,
    /// Number of predicates that were exactly zero (true degeneracy).
    pub exact_zeros: u64,
}

/// Sign of `det(p_1 - p_0, ..., p_d - p_0)` for `simplex = [p_0, ..., p_d]`
/// in dimension `d`. Returns -1, 0 or +1.
pub fn orientation(simplex: &[&Point], d: usize, stats: &mut PredicateStats) -> i8 {
    debug_assert_eq!(simplex.len(), d + 1);
    let base = simplex[0];
    let mut m = [[0.0f64; MAX_DIM]; MAX_DIM];
    let mut magnitude = 1.0f64;
    for (row, p) in simplex[1..].iter().enumerate() {
        let mut row_max = 0.0f64;
        for col in 0..d {
            let v = p[col] - base[col];
            m[row][col] = v;
            row_max = row_max.max(v.abs());
        }
        magnitude *= row_max.max(1e-300);
    }
    let det = det_in_place(&mut m, d);
    let tol = PREDICATE_REL_TOL * magnitude;
    if det.abs() > tol {
        return if det > 0.0 { 1 } else { -1 };
    }
    stats.exact_fallbacks += 1;
    let sign = exact_orientation(simplex, d);
    if sign == 0 {
        stats.exact_zeros += 1;
    }
    sign
}

fn exact_orientation(simplex: &[&Point], d: usize) -> i8 {
    let base = simplex[0];
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(d);
    for p in &simplex[1..] {
        let row = (0..d)
            .map(|c| {
                BigRational::from_f64(p[c]).expect("finite coordinate")
                    - BigRational::from_f64(base[c]).expect("finite coordinate")
            })
            .collect();
        rows.push(row);
    }
    exact_det_sign(rows)
}

/// Sign of the determinant of a square rational matrix via Gaussian elimination.
fn exact_det_sign(mut rows: Vec<Vec<BigRational>>) -> i8 {
    let n = rows.len();
    let mut sign = 1i8;
    for col in 0..n {
        let pivot = (col..n).find(|&r| !rows[r][col].is_zero());
        let Some(pivot) = pivot else {
            return 0;
        };
        if pivot != col {
            rows.swap(pivot, col);
            sign = -sign;
        }
        if rows[col][col].is_negative() {
            sign = -sign;
        }
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] / &rows[col][col];
            for c in col..n {
                let sub = &f * &rows[col][c];
                rows[r][c] = &rows[r][c] - sub;
            }
        }
    }
    sign
}
