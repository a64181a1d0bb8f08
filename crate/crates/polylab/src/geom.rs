//! Small dense linear algebra for dimensions 2..=6, plus ball constants.
//!
//! Points are inline fixed-capacity coordinate vectors; nothing here
//! allocates on the hot paths.

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

/// Maximum supported ambient dimension.
pub const MAX_DIM: usize = 6;

/// A point of `R^d`, `d <= 6`, stored inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    coords: ArrayVec<f64, MAX_DIM>,
}

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        assert!(
            !coords.is_empty() && coords.len() <= MAX_DIM,
            "dimension must be in 1..={MAX_DIM}"
        );
        Point {
            coords: coords.iter().copied().collect(),
        }
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1 && d <= MAX_DIM);
        Point {
            coords: (0..d).map(|_| 0.0).collect(),
        }
    }

    /// Standard basis vector `e_i` in `R^d`.
    pub fn unit(d: usize, i: usize) -> Self {
        let mut p = Self::zeros(d);
        p.coords[i] = 1.0;
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    #[inline]
    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.coords, &other.coords)
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, t: f64) -> Point {
        Point {
            coords: self.coords.iter().map(|c| c * t).collect(),
        }
    }

    pub fn add(&self, other: &Point) -> Point {
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn normalized(&self) -> Option<Point> {
        let n = self.norm();
        if n > 0.0 {
            Some(self.scaled(1.0 / n))
        } else {
            None
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    /// Lexicographic comparison of coordinate vectors (total order on finite points).
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        for (a, b) in self.coords.iter().zip(&other.coords) {
            match a.partial_cmp(b) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Volume `kappa_k` of the k-dimensional unit ball, `kappa_0 = 1`.
pub fn unit_ball_volume(k: usize) -> f64 {
    // kappa_k = pi^(k/2) / Gamma(k/2 + 1); even/odd split avoids a Gamma call.
    let k = k as u32;
    if k % 2 == 0 {
        let m = (k / 2) as i32;
        std::f64::consts::PI.powi(m) / factorial(k / 2)
    } else {
        let m = ((k - 1) / 2) as i32;
        // kappa_{2m+1} = 2 (4 pi)^m m! / (2m+1)!
        2.0 * (4.0 * std::f64::consts::PI).powi(m) * factorial((k - 1) / 2) / factorial(k)
    }
}

/// Surface measure of the unit sphere in `R^d`: `d * kappa_d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Determinant of the leading `n x n` block, destroying `m`. Partial pivoting.
pub fn det_in_place(m: &mut [[f64; MAX_DIM]; MAX_DIM], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

/// Affine rank of a point set (dimension of its affine hull), with a relative
/// tolerance for discarding noise directions.
pub fn affine_rank(points: &[&Point], tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let d = points[0].dim();
    let base = points[0];
    // Gram-Schmidt over the difference vectors.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut scale: f64 = 0.0;
    for p in &points[1..] {
        let mut v: Vec<f64> = p.sub(base).coords().to_vec();
        scale = scale.max(v.iter().map(|x| x.abs()).fold(0.0, f64::max));
        for b in &basis {
            let c = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > tol * scale.max(1e-300) {
            for vi in v.iter_mut() {
                *vi /= n;
            }
            basis.push(v);
            if basis.len() == d {
                break;
            }
        }
    }
    basis.len()
}

/// Extends `fixed` (orthonormal) to an orthonormal set by projecting the raw
/// vectors out of the span; returns the new vectors only.
pub fn gram_schmidt_extend(fixed: &[Vec<f64>], raw: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in raw {
        let mut v = r.clone();
        for b in fixed.iter().chain(out.iter()) {
            let c = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        let n = dot(&v, &v).sqrt();
        if n > 1e-12 {
            for vi in v.iter_mut() {
                *vi /= n;
            }
            out.push(v);
        }
    }
    out
}
