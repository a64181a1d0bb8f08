//! The parabolic scaling transformation and growth-process diagnostics.
//!
//! Points of the ball near the sphere are re-parametrized as pairs `(v, h)`:
//! a spatial coordinate `v` in the tangent space at the north pole (stretched
//! by `lambda^{1/(d+1)}`) and a height `h` proportional to the boundary
//! distance (stretched by `lambda^{2/(d+1)}`). In this picture the hull
//! boundary becomes the lower boundary of a union of upward quasi-paraboloids
//! and spatial correlations localize.

use crate::geom::Point;
use crate::hull::Polytope;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RescaleError {
    #[error("outside the injectivity region of the spherical exponential map")]
    OutOfInjectivityRegion,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Image of a ball point: spatial coordinate `v` in `R^{d-1}`, height `h >= 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledPoint {
    pub v: Vec<f64>,
    pub h: f64,
}

/// Per-vertex height and adjacency radius in the rescaled picture.
#[derive(Clone, Debug, Serialize)]
pub struct VertexHeight {
    pub vertex: u32,
    pub height: f64,
    /// Largest rescaled spatial distance to a vertex sharing an edge: a
    /// measurable stand-in for the localization radius (the functional value
    /// at a vertex is determined by its facial neighbourhood).
    pub adjacency_radius: f64,
}

/// Heights and adjacency radii of all hull vertices.
pub type HeightProfile = Vec<VertexHeight>;

/// Spatial scaling factor `lambda^{1/(d+1)}`.
pub fn spatial_scale(lambda: f64, d: usize) -> f64 {
    lambda.powf(1.0 / (d as f64 + 1.0))
}

/// Height scaling factor `lambda^{2/(d+1)}`.
pub fn height_scale(lambda: f64, d: usize) -> f64 {
    lambda.powf(2.0 / (d as f64 + 1.0))
}

/// Spherical exponential map at the north pole `n = (0, ..., 0, 1)`:
/// `u -> (sin||u|| * u/||u||, cos||u||)`, defined for `||u|| < pi`.
pub fn exp_map(u: &[f64]) -> Result<Point, RescaleError> {
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm >= std::f64::consts::PI {
        return Err(RescaleError::OutOfInjectivityRegion);
    }
    let d = u.len() + 1;
    let mut coords = vec![0.0; d];
    if norm > 0.0 {
        let s = norm.sin() / norm;
        for (c, x) in coords.iter_mut().zip(u) {
            *c = s * x;
        }
    }
    coords[d - 1] = norm.cos();
    Ok(Point::new(&coords))
}

/// Inverse of [`exp_map`], defined on the sphere minus the south pole.
pub fn exp_inv(y: &Point) -> Result<Vec<f64>, RescaleError> {
    let d = y.dim();
    let cos_theta = y[d - 1].clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    let tangential: Vec<f64> = y.coords()[..d - 1].to_vec();
    let t_norm = tangential.iter().map(|x| x * x).sum::<f64>().sqrt();
    if t_norm == 0.0 {
        if cos_theta < 0.0 {
            return Err(RescaleError::OutOfInjectivityRegion); // south pole
        }
        return Ok(vec![0.0; d - 1]);
    }
    Ok(tangential.iter().map(|x| theta * x / t_norm).collect())
}

/// The scaling transformation: `x -> (lambda^{1/(d+1)} exp^{-1}(x/||x||),
/// lambda^{2/(d+1)} (1 - ||x||))`.
pub fn scale_t(x: &Point, lambda: f64) -> Result<ScaledPoint, RescaleError> {
    let d = x.dim();
    let r = x.norm();
    if r == 0.0 {
        return Err(RescaleError::OutOfInjectivityRegion);
    }
    let u = exp_inv(&x.scaled(1.0 / r))?;
    let s = spatial_scale(lambda, d);
    Ok(ScaledPoint {
        v: u.into_iter().map(|c| s * c).collect(),
        h: height_scale(lambda, d) * (1.0 - r),
    })
}

/// Inverse of [`scale_t`].
pub fn scale_t_inv(sp: &ScaledPoint, lambda: f64) -> Result<Point, RescaleError> {
    let d = sp.v.len() + 1;
    let s = spatial_scale(lambda, d);
    let u: Vec<f64> = sp.v.iter().map(|c| c / s).collect();
    let dir = exp_map(&u)?;
    let r = 1.0 - sp.h / height_scale(lambda, d);
    Ok(dir.scaled(r))
}

/// Density of the rescaled process intensity with respect to Lebesgue measure
/// on the image region: `(sin t / t)^{d-2} (1 - lambda^{-2/(d+1)} h)^{d-1}`
/// with `t = lambda^{-1/(d+1)} ||v||` (the sine factor is 1 at `v = 0`).
pub fn intensity_density(v: &[f64], h: f64, lambda: f64, d: usize) -> f64 {
    let t = v.iter().map(|x| x * x).sum::<f64>().sqrt() / spatial_scale(lambda, d);
    let sinc = if t == 0.0 { 1.0 } else { t.sin() / t };
    sinc.powi(d as i32 - 2) * (1.0 - h / height_scale(lambda, d)).powi(d as i32 - 1)
}

/// Rescaled defect support function:
/// `lambda^{2/(d+1)} (1 - h_P(exp(lambda^{-1/(d+1)} v)))`.
pub fn rescaled_defect_support(p: &Polytope, v: &[f64], lambda: f64) -> Result<f64, RescaleError> {
    let d = p.dim();
    if v.len() + 1 != d {
        return Err(RescaleError::DimensionMismatch {
            expected: d - 1,
            got: v.len() + 1,
        });
    }
    let s = spatial_scale(lambda, d);
    let u: Vec<f64> = v.iter().map(|c| c / s).collect();
    let dir = exp_map(&u)?;
    Ok(height_scale(lambda, d) * (1.0 - p.support_function(&dir)))
}

/// Heights and adjacency radii of the hull vertices in the rescaled picture.
/// Vertices mapped to the south pole (or the origin) are skipped; for points
/// of a continuous sample this has probability zero.
pub fn vertex_heights(p: &Polytope, lambda: f64) -> HeightProfile {
    let d = p.dim();
    let hs = height_scale(lambda, d);
    let scaled: Vec<Option<ScaledPoint>> = p
        .vertices()
        .iter()
        .map(|x| scale_t(x, lambda).ok())
        .collect();
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); p.vertices().len()];
    for e in p.faces(1.min(d - 1)) {
        if d >= 2 && e.len() == 2 {
            neighbors[e[0] as usize].push(e[1]);
            neighbors[e[1] as usize].push(e[0]);
        }
    }
    let mut profile = Vec::with_capacity(p.vertices().len());
    for (i, x) in p.vertices().iter().enumerate() {
        let Some(sp) = &scaled[i] else { continue };
        let mut r_hat = 0.0f64;
        for &nb in &neighbors[i] {
            if let Some(other) = &scaled[nb as usize] {
                let dist = sp
                    .v
                    .iter()
                    .zip(&other.v)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                r_hat = r_hat.max(dist);
            }
        }
        profile.push(VertexHeight {
            vertex: i as u32,
            height: hs * (1.0 - x.norm()),
            adjacency_radius: r_hat,
        });
    }
    profile
}

/// Membership of `candidate` in the upward quasi-paraboloid grown from
/// `apex`. For finite `lambda` the grain is the rescaled image of the flower
/// ball of the apex: with `omega` the geodesic angle between the two spatial
/// directions, the condition is
/// `h' >= h cos(omega) + lambda^{2/(d+1)} (1 - cos(omega))`.
/// With `lambda = None` (the scaling limit) it is the ideal paraboloid
/// `h' >= h + ||v' - v||^2 / 2`.
///
/// Both points must lie in the image region of the transformation when
/// `lambda` is finite.
pub fn paraboloid_up_contains(
    candidate: &ScaledPoint,
    apex: &ScaledPoint,
    lambda: Option<f64>,
    d: usize,
) -> bool {
    match lambda {
        None => {
            let dist_sq: f64 = candidate
                .v
                .iter()
                .zip(&apex.v)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            candidate.h >= apex.h + dist_sq / 2.0
        }
        Some(lambda) => {
            candidate.h >= quasi_paraboloid_boundary(apex, &candidate.v, lambda, d)
        }
    }
}

/// Boundary height of the upward quasi-paraboloid of `apex` above spatial
/// coordinate `v`.
pub fn quasi_paraboloid_boundary(apex: &ScaledPoint, v: &[f64], lambda: f64, d: usize) -> f64 {
    let s = spatial_scale(lambda, d);
    let ua: Vec<f64> = apex.v.iter().map(|c| c / s).collect();
    let uc: Vec<f64> = v.iter().map(|c| c / s).collect();
    let cos_omega = match (exp_map(&ua), exp_map(&uc)) {
        (Ok(a), Ok(c)) => a.dot(&c).clamp(-1.0, 1.0),
        _ => -1.0,
    };
    apex.h * cos_omega + height_scale(lambda, d) * (1.0 - cos_omega)
}

/// Lower boundary of the generalized growth process over the scaled cloud at
/// spatial coordinate `v`: the minimum of the quasi-paraboloid boundaries.
/// Coincides with the rescaled defect support function of the cloud's hull.
pub fn growth_boundary_height(scaled_cloud: &[ScaledPoint], v: &[f64], lambda: f64, d: usize) -> f64 {
    scaled_cloud
        .iter()
        .map(|x| quasi_paraboloid_boundary(x, v, lambda, d))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::convex_hull;
    use crate::sampling::{sample_uniform_ball, BallProcessConfig, RngStream};

    #[test]
    fn exp_map_basics() {
        let n = exp_map(&[0.0]).unwrap();
        assert_eq!(n.coords(), &[0.0, 1.0]);
        // d=2: a quarter-turn lands on the equator.
        let e = exp_map(&[std::f64::consts::FRAC_PI_2]).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-12 && e[1].abs() < 1e-12);
        assert!(exp_map(&[std::f64::consts::PI]).is_err());
    }

    #[test]
    fn exp_map_geodesic_distance() {
        let mut rng = RngStream::new(3, 0).rng();
        use rand::Rng;
        for _ in 0..200 {
            let u: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = (u[0] * u[0] + u[1] * u[1]).sqrt();
            let y = exp_map(&u).unwrap();
            let north = Point::new(&[0.0, 0.0, 1.0]);
            let geo = y.dot(&north).clamp(-1.0, 1.0).acos();
            assert!((geo - norm).abs() < 1e-10);
            let back = exp_inv(&y).unwrap();
            for (a, b) in u.iter().zip(&back) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn scale_t_reads_off_boundary_distance() {
        // x = (1 - t) n maps to (0, lambda^{2/(d+1)} t).
        let lambda = 100.0;
        let x = Point::new(&[0.0, 0.9]);
        let sp = scale_t(&x, lambda).unwrap();
        assert!(sp.v[0].abs() < 1e-12);
        assert!((sp.h - height_scale(lambda, 2) * 0.1).abs() < 1e-12);

        // Sphere points have height zero; e_1 at lambda=1 sits at ||v|| = pi/2.
        let e1 = Point::new(&[1.0, 0.0]);
        let sp = scale_t(&e1, 1.0).unwrap();
        assert!(sp.h.abs() < 1e-12);
        assert!((sp.v[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn scale_roundtrip() {
        let mut rng = RngStream::new(17, 0).rng();
        for &lambda in &[100.0, 10_000.0] {
            for _ in 0..5000 {
                let x = crate::sampling::uniform_in_ball(3, &mut rng);
                if x.norm() < 1e-6 || x[2] < -0.99 * x.norm() {
                    continue;
                }
                let sp = scale_t(&x, lambda).unwrap();
                let back = scale_t_inv(&sp, lambda).unwrap();
                assert!(back.sub(&x).norm() < 1e-10, "lambda {lambda}");
            }
        }
    }

    #[test]
    fn intensity_density_values() {
        assert!((intensity_density(&[0.0], 0.0, 50.0, 2) - 1.0).abs() < 1e-12);
        // d=2 has no sine factor at all.
        assert!(
            (intensity_density(&[1.3], 0.5, 50.0, 2)
                - (1.0 - 0.5 / height_scale(50.0, 2)))
            .abs()
                < 1e-12
        );
        // Pointwise limit 1 as lambda grows.
        let v = vec![0.7, -0.4];
        assert!((intensity_density(&v, 1.2, 1e12, 3) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn pushforward_density_histogram() {
        // Chi-square against the stated density on a coarse (v, h) grid, d=2.
        let lambda = 200.0;
        let d = 2;
        let cfg = BallProcessConfig::stationary(d, lambda);
        let reps = 400;
        let (v_lo, v_hi, h_lo, h_hi) = (-2.0, 2.0, 0.0, 2.0);
        let (nv, nh) = (4usize, 4usize);
        let mut counts = vec![0.0f64; nv * nh];
        for i in 0..reps {
            let pts = sample_uniform_ball(&cfg, RngStream::new(404, i)).unwrap();
            for x in &pts {
                let Ok(sp) = scale_t(&x, lambda) else { continue };
                if sp.v[0] < v_lo || sp.v[0] >= v_hi || sp.h < h_lo || sp.h >= h_hi {
                    continue;
                }
                let iv = ((sp.v[0] - v_lo) / (v_hi - v_lo) * nv as f64) as usize;
                let ih = ((sp.h - h_lo) / (h_hi - h_lo) * nh as f64) as usize;
                counts[iv * nh + ih] += 1.0;
            }
        }
        // Expected counts by midpoint rule on a fine subgrid of each cell.
        let mut chi2 = 0.0;
        for iv in 0..nv {
            for ih in 0..nh {
                let (a, b) = (
                    v_lo + (v_hi - v_lo) * iv as f64 / nv as f64,
                    v_lo + (v_hi - v_lo) * (iv as f64 + 1.0) / nv as f64,
                );
                let (c, e) = (
                    h_lo + (h_hi - h_lo) * ih as f64 / nh as f64,
                    h_lo + (h_hi - h_lo) * (ih as f64 + 1.0) / nh as f64,
                );
                let mut integral = 0.0;
                let sub = 8;
                for p in 0..sub {
                    for q in 0..sub {
                        let vv = a + (b - a) * (p as f64 + 0.5) / sub as f64;
                        let hh = c + (e - c) * (q as f64 + 0.5) / sub as f64;
                        integral += intensity_density(&[vv], hh, lambda, d);
                    }
                }
                integral *= (b - a) * (e - c) / (sub * sub) as f64;
                let expected = reps as f64 * integral;
                chi2 += (counts[iv * nh + ih] - expected).powi(2) / expected;
            }
        }
        // 16 cells: very generous bound, catches wrong scalings immediately.
        assert!(chi2 < 60.0, "chi2 {chi2}, counts {counts:?}");
    }

    #[test]
    fn defect_support_properties() {
        let cfg = BallProcessConfig::stationary(2, 400.0);
        let cloud = sample_uniform_ball(&cfg, RngStream::new(19, 0)).unwrap();
        let p = convex_hull(&cloud, 2).unwrap();
        let lambda = 400.0;
        // Nonnegative for polytopes inside the ball, increases under shrinking.
        for k in 0..50 {
            let v = [-3.0 + 6.0 * k as f64 / 49.0];
            let s = rescaled_defect_support(&p, &v, lambda).unwrap();
            assert!(s >= -1e-12);
            let shrunk_pts: Vec<Point> = cloud.iter().map(|x| x.scaled(0.9)).collect();
            let shrunk = convex_hull(&shrunk_pts, 2).unwrap();
            assert!(rescaled_defect_support(&shrunk, &v, lambda).unwrap() >= s - 1e-12);
        }
        // Zero exactly at a vertex direction on the sphere.
        let sq = convex_hull(
            &[
                Point::new(&[1.0, 0.0]),
                Point::new(&[0.0, 1.0]),
                Point::new(&[-1.0, 0.0]),
                Point::new(&[0.0, -1.0]),
            ],
            2,
        )
        .unwrap();
        // Vertex (0,1) is the north pole: v = 0.
        let s = rescaled_defect_support(&sq, &[0.0], lambda).unwrap();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn growth_boundary_matches_defect_support() {
        // The lower boundary of the union of quasi-paraboloids over the cloud
        // equals the rescaled defect support function of its hull, exactly.
        let lambda = 300.0;
        let cfg = BallProcessConfig::stationary(3, lambda);
        let cloud = sample_uniform_ball(&cfg, RngStream::new(23, 1)).unwrap();
        let p = convex_hull(&cloud, 3).unwrap();
        let scaled: Vec<ScaledPoint> = cloud.iter().map(|x| scale_t(x, lambda).unwrap()).collect();
        let mut rng = RngStream::new(23, 2).rng();
        use rand::Rng;
        for _ in 0..200 {
            let v = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            let lower = growth_boundary_height(&scaled, &v, lambda, 3);
            let defect = rescaled_defect_support(&p, &v, lambda).unwrap();
            assert!((lower - defect).abs() < 1e-9, "lower {lower} defect {defect}");
        }
    }

    #[test]
    fn paraboloid_membership_basics() {
        let apex = ScaledPoint { v: vec![0.0], h: 0.5 };
        assert!(paraboloid_up_contains(&apex, &apex, Some(500.0), 2));
        assert!(paraboloid_up_contains(&apex, &apex, None, 2));
        // Ideal paraboloid boundary point.
        let cand = ScaledPoint { v: vec![1.0], h: 0.5 + 0.5 };
        assert!(paraboloid_up_contains(&cand, &apex, None, 2));
        let below = ScaledPoint { v: vec![1.0], h: 0.99 };
        assert!(!paraboloid_up_contains(&below, &apex, None, 2));
    }

    #[test]
    fn finite_lambda_membership_converges_to_limit() {
        // On a grid of strict apex/candidate pairs, finite-lambda membership
        // agrees with the ideal paraboloid for large lambda.
        let apexes = [
            ScaledPoint { v: vec![0.0, 0.0], h: 0.2 },
            ScaledPoint { v: vec![0.5, -0.3], h: 1.0 },
        ];
        let candidates = [
            ScaledPoint { v: vec![0.4, 0.1], h: 0.9 },
            ScaledPoint { v: vec![1.0, 0.0], h: 0.25 },
            ScaledPoint { v: vec![-0.8, 0.6], h: 2.4 },
            ScaledPoint { v: vec![0.1, 0.0], h: 0.1 },
        ];
        for apex in &apexes {
            for cand in &candidates {
                let limit = paraboloid_up_contains(cand, apex, None, 3);
                let finite = paraboloid_up_contains(cand, apex, Some(1e10), 3);
                assert_eq!(limit, finite, "apex {apex:?} cand {cand:?}");
            }
        }
    }

    #[test]
    fn vertex_heights_profile() {
        // Vertices on the sphere have height zero; interior points are absent.
        let mut pts: Vec<Point> = (0..12)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / 12.0;
                Point::new(&[0.99 * t.cos(), 0.99 * t.sin()])
            })
            .collect();
        pts.push(Point::new(&[0.01, 0.02]));
        let p = convex_hull(&pts, 2).unwrap();
        let profile = vertex_heights(&p, 1000.0);
        assert_eq!(profile.len(), 12);
        for vh in &profile {
            assert!((vh.height - height_scale(1000.0, 2) * 0.01).abs() < 1e-9);
            assert!(vh.adjacency_radius > 0.0);
        }
    }
}
