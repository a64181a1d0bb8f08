//! Key geometric functionals of a random polytope in the unit ball, as totals
//! and as spatial empirical measures.
//!
//! Each functional scores individual points of the cloud so that the scores
//! sum to a global quantity: face counts, missed volume, intrinsic-volume
//! deficits and the Voronoi-flower deficit. Faces and missed regions are
//! attributed to the face's owner vertex (the vertex closest to the sphere,
//! lexicographic ties), which realizes the empirical measures whose scaling
//! behaviour the statistical suites probe.

use crate::geom::{dot, gram_schmidt_extend, unit_ball_volume, Point};
use crate::hull::{HullError, Polytope};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionalError {
    #[error("polytope is not contained in the unit ball")]
    NotInBall,
    #[error("origin is not strictly interior to the polytope")]
    OriginNotInterior,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Hull(#[from] HullError),
}

/// One of the key geometric functionals, with its scaling exponent `e`,
/// moment weight `w` and diagonal weight `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunctionalKind {
    /// Missed volume of the hull in the ball.
    MissedVolume,
    /// Deficit of the j-th intrinsic volume, `1 <= j <= d-1`.
    IntrinsicDeficit(usize),
    /// Number of j-dimensional faces, `0 <= j <= d-1`.
    FaceCount(usize),
    /// Missed volume of the Voronoi flower in the ball.
    FlowerVolume,
}

impl FunctionalKind {
    /// Scaling exponent `e`: 1 for volume-type functionals, 0 for face counts.
    pub fn e(&self) -> i32 {
        match self {
            FunctionalKind::FaceCount(_) => 0,
            _ => 1,
        }
    }

    /// Moment weight `w`: 2 for volume-type functionals, `j` for face counts.
    pub fn w(&self) -> f64 {
        match self {
            FunctionalKind::FaceCount(j) => *j as f64,
            _ => 2.0,
        }
    }

    /// Diagonal weight `v`: 2 for volume-type functionals, `2j` for face counts.
    pub fn v(&self) -> f64 {
        match self {
            FunctionalKind::FaceCount(j) => 2.0 * *j as f64,
            _ => 2.0,
        }
    }

    pub fn tag(&self) -> String {
        match self {
            FunctionalKind::MissedVolume => "vd".into(),
            FunctionalKind::IntrinsicDeficit(j) => format!("v{j}"),
            FunctionalKind::FaceCount(j) => format!("f{j}"),
            FunctionalKind::FlowerVolume => "vf".into(),
        }
    }

    pub fn parse(tag: &str) -> Option<FunctionalKind> {
        match tag {
            "vd" => Some(FunctionalKind::MissedVolume),
            "vf" => Some(FunctionalKind::FlowerVolume),
            _ => {
                if tag.len() < 2 {
                    return None;
                }
                let (head, idx) = tag.split_at(1);
                let j: usize = idx.parse().ok()?;
                match head {
                    "f" => Some(FunctionalKind::FaceCount(j)),
                    "v" => Some(FunctionalKind::IntrinsicDeficit(j)),
                    _ => None,
                }
            }
        }
    }
}

/// A weighted atom of an empirical measure, sitting at a hull vertex.
#[derive(Clone, Debug, Serialize)]
pub struct Atom {
    pub vertex: u32,
    pub location: Point,
    pub weight: f64,
}

/// Weighted Dirac atoms at hull vertices; the total weight realizes the
/// corresponding global functional.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<Atom>,
}

impl EmpiricalMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn pair(&self, f: &TestFunction) -> f64 {
        pair(f, self)
    }
}

/// Bounded continuous test functions on the ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestFunction {
    /// Constant 1.
    One,
    /// Coordinate map `x -> x_i`.
    Coordinate(usize),
    /// Quadratic map `x -> x_i^2`.
    Square(usize),
}

impl TestFunction {
    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            TestFunction::One => 1.0,
            TestFunction::Coordinate(i) => x[*i],
            TestFunction::Square(i) => x[*i] * x[*i],
        }
    }

    pub fn tag(&self) -> String {
        match self {
            TestFunction::One => "one".into(),
            TestFunction::Coordinate(i) => format!("x{}", i + 1),
            TestFunction::Square(i) => format!("x{}sq", i + 1),
        }
    }
}

/// `<f, mu>`: sum of `f(location) * weight` over the atoms.
pub fn pair(f: &TestFunction, m: &EmpiricalMeasure) -> f64 {
    m.atoms.iter().map(|a| f.eval(&a.location) * a.weight).sum()
}

/// The f-vector `(f_0, ..., f_{d-1})` read off the face lattice.
pub fn face_counts(p: &Polytope) -> Vec<usize> {
    p.f_vector()
}

/// Exact missed volume `kappa_d - V_d(p)` for `p` inside the unit ball.
pub fn missed_volume(p: &Polytope) -> Result<f64, FunctionalError> {
    let tol = 1e-9;
    if p.vertices().iter().any(|v| v.norm() > 1.0 + tol) {
        return Err(FunctionalError::NotInBall);
    }
    Ok(unit_ball_volume(p.dim()) - p.volume())
}

/// Owner vertex of a face: the vertex of maximal norm (the point of the face
/// closest to the sphere is attained at a vertex since the norm is convex);
/// ties broken by the lexicographically smallest coordinate vector.
pub fn owner_vertex(p: &Polytope, face: &[u32]) -> u32 {
    const NORM_TIE_TOL: f64 = 1e-12;
    let mut best = face[0];
    let mut best_norm = p.vertex(best).norm_sq();
    for &v in &face[1..] {
        let n = p.vertex(v).norm_sq();
        if n > best_norm + NORM_TIE_TOL {
            best = v;
            best_norm = n;
        } else if (n - best_norm).abs() <= NORM_TIE_TOL
            && p.vertex(v).lex_cmp(p.vertex(best)) == std::cmp::Ordering::Less
        {
            best = v;
            best_norm = best_norm.max(n);
        }
    }
    best
}

/// Empirical measure of the j-face functional: weight 1 at the owner vertex
/// of every j-face. Total mass equals `f_j(p)` exactly.
pub fn attribute_faces(p: &Polytope, j: usize) -> EmpiricalMeasure {
    let mut weight_of: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
    for face in p.faces(j) {
        *weight_of.entry(owner_vertex(p, face)).or_insert(0.0) += 1.0;
    }
    let atoms = weight_of
        .into_iter()
        .map(|(vertex, weight)| Atom {
            vertex,
            location: p.vertex(vertex).clone(),
            weight,
        })
        .collect();
    EmpiricalMeasure { atoms }
}

/// Which missed region a hit-or-miss attribution integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MissedVariant {
    /// Complement of the hull in the ball.
    Hull,
    /// Complement of the Voronoi flower in the ball.
    Flower,
}

/// Hit-or-miss empirical measure of a missed-volume functional: miss points
/// are attributed to the owner vertex of the facet their origin ray crosses.
/// Atom weights are `kappa_d / n` per miss; the reported standard error is
/// for the total mass.
pub fn attribute_missed_volume(
    p: &Polytope,
    variant: MissedVariant,
    n: usize,
    rng: &mut ChaCha12Rng,
    cloud: Option<&[Point]>,
) -> Result<(EmpiricalMeasure, f64), FunctionalError> {
    if !p.origin_interior() {
        return Err(FunctionalError::OriginNotInterior);
    }
    if variant == MissedVariant::Flower && cloud.is_none() {
        return Err(FunctionalError::InvalidInput(
            "flower attribution needs the generating cloud".into(),
        ));
    }
    let d = p.dim();
    let kd = unit_ball_volume(d);
    let mut weight_of: std::collections::BTreeMap<u32, u64> = std::collections::BTreeMap::new();
    let mut misses = 0u64;
    for _ in 0..n {
        let z = crate::sampling::uniform_in_ball(d, rng);
        let miss = match variant {
            MissedVariant::Hull => !p.contains(&z),
            MissedVariant::Flower => !flower_contains(cloud.unwrap(), &z),
        };
        if !miss {
            continue;
        }
        misses += 1;
        let Some(dir) = z.normalized() else { continue };
        let facet_id = p.ray_facet(&dir)?;
        let owner = owner_vertex(p, &p.facets()[facet_id]);
        *weight_of.entry(owner).or_insert(0) += 1;
    }
    let atoms = weight_of
        .into_iter()
        .map(|(vertex, count)| Atom {
            vertex,
            location: p.vertex(vertex).clone(),
            weight: kd * count as f64 / n as f64,
        })
        .collect();
    let p_hat = misses as f64 / n as f64;
    let se = kd * (p_hat * (1.0 - p_hat) / n as f64).sqrt();
    Ok((EmpiricalMeasure { atoms }, se))
}

/// Whether `z` lies in the Voronoi flower of the cloud, the union of the
/// balls `B(x/2, ||x||/2)`. `z` is covered by the ball of `x` iff
/// `||z||^2 <= <z, x>`; the origin lies on every flower ball's boundary.
pub fn flower_contains(cloud: &[Point], z: &Point) -> bool {
    let zz = z.norm_sq();
    if zz == 0.0 {
        return true;
    }
    cloud.iter().any(|x| zz <= z.dot(x))
}

/// Hit-or-miss Monte Carlo estimate of the flower missed volume
/// `V_d(B^d \ VF(cloud))`, with its standard error.
pub fn flower_missed_volume(
    cloud: &[Point],
    d: usize,
    n: usize,
    rng: &mut ChaCha12Rng,
) -> Result<(f64, f64), FunctionalError> {
    if cloud.is_empty() {
        return Err(FunctionalError::InvalidInput("empty cloud".into()));
    }
    let kd = unit_ball_volume(d);
    let mut misses = 0u64;
    for _ in 0..n {
        let z = crate::sampling::uniform_in_ball(d, rng);
        if !flower_contains(cloud, &z) {
            misses += 1;
        }
    }
    let p_hat = misses as f64 / n as f64;
    Ok((kd * p_hat, kd * (p_hat * (1.0 - p_hat) / n as f64).sqrt()))
}

/// Exact intrinsic-volume deficit `V_j(B^d) - V_j(p)` for `d <= 3`.
///
/// - `d = 2, j = 1`: `pi - perimeter / 2`.
/// - `d = 3, j = 2`: `2 pi - surface_area / 2`.
/// - `d = 3, j = 1`: `4 - sum_e len(e) * exterior_angle(e) / (2 pi)`.
pub fn intrinsic_deficit_exact(p: &Polytope, j: usize) -> Result<f64, FunctionalError> {
    let d = p.dim();
    if d > 3 {
        return Err(FunctionalError::Unsupported(format!(
            "exact intrinsic deficits are implemented for d <= 3, got d = {d}"
        )));
    }
    if j == 0 || j >= d {
        return Err(FunctionalError::InvalidInput(format!(
            "need 1 <= j <= d-1, got j = {j}"
        )));
    }
    match (d, j) {
        (2, 1) => Ok(std::f64::consts::PI - perimeter(p) / 2.0),
        (3, 2) => Ok(2.0 * std::f64::consts::PI - surface_area(p) / 2.0),
        (3, 1) => Ok(4.0 - mean_width_v1(p)?),
        _ => unreachable!(),
    }
}

fn perimeter(p: &Polytope) -> f64 {
    p.faces(1)
        .iter()
        .map(|e| p.vertex(e[0]).sub(p.vertex(e[1])).norm())
        .sum()
}

/// Total facet area of a 3-polytope (polygonal facets via in-plane shoelace).
pub fn surface_area(p: &Polytope) -> f64 {
    (0..p.facets().len()).map(|f| facet_area(p, f)).sum()
}

fn facet_area(p: &Polytope, facet_id: usize) -> f64 {
    let facet = &p.facets()[facet_id];
    let normal = p.facet_planes()[facet_id].normal.coords().to_vec();
    let d = p.dim();
    let raw: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            e
        })
        .collect();
    let basis = gram_schmidt_extend(std::slice::from_ref(&normal), &raw);
    let coords: Vec<(f64, f64)> = facet
        .iter()
        .map(|&v| {
            let pt = p.vertex(v);
            (dot(pt.coords(), &basis[0]), dot(pt.coords(), &basis[1]))
        })
        .collect();
    // Order the convex polygon by angle around its centroid, then shoelace.
    let cx = coords.iter().map(|c| c.0).sum::<f64>() / coords.len() as f64;
    let cy = coords.iter().map(|c| c.1).sum::<f64>() / coords.len() as f64;
    let mut ordered = coords;
    ordered.sort_by(|a, b| {
        let ta = (a.1 - cy).atan2(a.0 - cx);
        let tb = (b.1 - cy).atan2(b.0 - cx);
        ta.partial_cmp(&tb).unwrap()
    });
    let mut twice_area = 0.0;
    for i in 0..ordered.len() {
        let (x1, y1) = ordered[i];
        let (x2, y2) = ordered[(i + 1) % ordered.len()];
        twice_area += x1 * y2 - x2 * y1;
    }
    twice_area.abs() / 2.0
}

/// `V_1` of a 3-polytope from edge lengths and exterior dihedral angles.
fn mean_width_v1(p: &Polytope) -> Result<f64, FunctionalError> {
    let mut total = 0.0;
    for edge in p.faces(1) {
        let incident: Vec<usize> = p
            .facets()
            .iter()
            .enumerate()
            .filter(|(_, f)| edge.iter().all(|v| f.contains(v)))
            .map(|(i, _)| i)
            .collect();
        if incident.len() != 2 {
            return Err(FunctionalError::Unsupported(
                "edge without exactly two incident facets".into(),
            ));
        }
        let n1 = &p.facet_planes()[incident[0]].normal;
        let n2 = &p.facet_planes()[incident[1]].normal;
        let angle = n1.dot(n2).clamp(-1.0, 1.0).acos();
        let len = p.vertex(edge[0]).sub(p.vertex(edge[1])).norm();
        total += len * angle;
    }
    Ok(total / (2.0 * std::f64::consts::PI))
}

/// Monte Carlo estimate (value, standard error) of the intrinsic-volume
/// deficit `V_j(B^d) - V_j(p)` via the projection-average representation:
/// sample `x` uniform in the ball, discard if `x` is in `p`; draw a uniform
/// j-subspace `M` containing the line through `x`; score
/// `1(x not in p|M) * ||x||^{-(d-j)}` and rescale by
/// `kappa_d * C(d-1, j-1) / kappa_{d-j}`.
pub fn intrinsic_deficit_mc(
    p: &Polytope,
    j: usize,
    n: usize,
    rng: &mut ChaCha12Rng,
) -> Result<(f64, f64), FunctionalError> {
    let d = p.dim();
    if j == 0 || j >= d {
        return Err(FunctionalError::InvalidInput(format!(
            "need 1 <= j <= d-1, got j = {j}"
        )));
    }
    if !p.origin_interior() {
        return Err(FunctionalError::OriginNotInterior);
    }
    let factor = unit_ball_volume(d) * binomial(d - 1, j - 1) / unit_ball_volume(d - j);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(j);
    for _ in 0..n {
        let x = crate::sampling::uniform_in_ball(d, rng);
        let r = x.norm();
        if r == 0.0 || p.contains(&x) {
            continue;
        }
        // Basis of M: the direction of x plus j-1 uniform orthonormal
        // directions of its orthogonal complement.
        basis.clear();
        basis.push(x.scaled(1.0 / r).coords().to_vec());
        while basis.len() < j {
            let raw: Vec<f64> = (0..d)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let added = gram_schmidt_extend(&basis, std::slice::from_ref(&raw));
            basis.extend(added);
        }
        // x|M has in-plane coordinates (r, 0, ..., 0).
        if !projected_hull_contains(p, &basis, r) {
            let w = r.powi(-((d - j) as i32));
            sum += w;
            sum_sq += w * w;
        }
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0) / nf;
    Ok((factor * mean, factor * var.sqrt()))
}

/// Membership of the point with in-plane coordinates `(r, 0, ..., 0)` in the
/// projection of `p` onto the span of `basis`.
fn projected_hull_contains(p: &Polytope, basis: &[Vec<f64>], r: f64) -> bool {
    let j = basis.len();
    match j {
        1 => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for v in p.vertices() {
                let c = dot(v.coords(), &basis[0]);
                lo = lo.min(c);
                hi = hi.max(c);
            }
            r >= lo && r <= hi
        }
        2 => {
            let pts: Vec<(f64, f64)> = p
                .vertices()
                .iter()
                .map(|v| (dot(v.coords(), &basis[0]), dot(v.coords(), &basis[1])))
                .collect();
            point_in_convex_2d(&pts, (r, 0.0))
        }
        _ => {
            let pts: Vec<Point> = p
                .vertices()
                .iter()
                .map(|v| {
                    let coords: Vec<f64> = basis.iter().map(|b| dot(v.coords(), b)).collect();
                    Point::new(&coords)
                })
                .collect();
            let mut z = vec![0.0; j];
            z[0] = r;
            match crate::hull::convex_hull(&pts, j) {
                Ok(hull) => hull.contains(&Point::new(&z)),
                // A full-dimensional body has a full-dimensional shadow; a
                // degenerate hull here is numerical collapse, so err on the
                // inclusive side (contributes zero to the deficit).
                Err(_) => true,
            }
        }
    }
}

/// Point-in-convex-hull test in the plane (monotone chain, then half-planes).
fn point_in_convex_2d(pts: &[(f64, f64)], z: (f64, f64)) -> bool {
    let mut sorted = pts.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    if sorted.len() < 3 {
        return false;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &pt in &sorted {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], pt) <= 0.0 {
            lower.pop();
        }
        lower.push(pt);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &pt in sorted.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], pt) <= 0.0 {
            upper.pop();
        }
        upper.push(pt);
    }
    lower.pop();
    upper.pop();
    let hull: Vec<(f64, f64)> = lower.into_iter().chain(upper).collect();
    if hull.len() < 3 {
        return false;
    }
    for i in 0..hull.len() {
        if cross(hull[i], hull[(i + 1) % hull.len()], z) < 0.0 {
            return false;
        }
    }
    true
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}
