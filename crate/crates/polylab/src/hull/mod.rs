//! Exact convex hulls with full face lattices in dimensions 2..=6.
//!
//! Construction is randomized incremental over simplicial facets with
//! orientation predicates that fall back to exact rational arithmetic inside
//! a relative tolerance band, so combinatorial decisions are deterministic.
//! Coplanar facets are merged afterwards, and the complete face lattice
//! (every dimension, not just facets) is stored explicitly.
//!
//! Polytopes are immutable after construction and safe to share across
//! threads.

mod build;
mod lattice;
mod predicates;

pub use predicates::PredicateStats;

use crate::geom::Point;
use serde::Serialize;
use thiserror::Error;

/// Tolerance for membership tests against facet hyperplanes.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Relative tolerance for declaring a tie in ray-facet selection.
const RAY_TIE_TOL: f64 = 1e-9;
/// Facet offsets at or below this are treated as "origin not interior".
const ORIGIN_INTERIOR_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HullError {
    #[error("input is affinely degenerate (or has too few points) for the requested dimension")]
    DegenerateInput,
    #[error("origin is not strictly interior to the polytope")]
    OriginNotInterior,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0} (supported: 1..=6)")]
    UnsupportedDimension(usize),
    #[error("projection basis is not orthonormal or collapses the polytope")]
    InvalidBasis,
}

/// Closed halfspace `{ z : <z, normal> <= offset }` with a unit normal.
#[derive(Clone, Debug, Serialize)]
pub struct Halfspace {
    pub normal: Point,
    pub offset: f64,
}

/// A full-dimensional convex polytope with explicit face lattice.
#[derive(Clone, Debug)]
pub struct Polytope {
    d: usize,
    vertices: Vec<Point>,
    input_index: Vec<usize>,
    /// `faces[j]` lists the j-faces as sorted vertex-id tuples, for
    /// `j = 0..=d-1`; `faces[d-1]` is aligned with `facet_planes`.
    faces: Vec<Vec<Vec<u32>>>,
    facet_planes: Vec<Halfspace>,
    volume: f64,
    merged_facets: bool,
    stats: PredicateStats,
}

/// Convex hull of `points` in `R^d` with complete face lattice.
///
/// The input must contain at least `d + 1` affinely independent points.
/// The polytope's vertices are exactly the extreme points of the input, in
/// input order.
pub fn convex_hull(points: &[Point], d: usize) -> Result<Polytope, HullError> {
    if d == 0 || d > crate::geom::MAX_DIM {
        return Err(HullError::UnsupportedDimension(d));
    }
    for p in points {
        if p.dim() != d {
            return Err(HullError::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
        if !p.is_finite() {
            return Err(HullError::DegenerateInput);
        }
    }
    if points.len() < d + 1 {
        return Err(HullError::DegenerateInput);
    }
    if d == 1 {
        return hull_1d(points);
    }
    let out = build::build(points, d).map_err(|_| HullError::DegenerateInput)?;
    let lat = lattice::assemble(&out, d).map_err(|_| HullError::DegenerateInput)?;
    Ok(Polytope {
        d,
        vertices: lat.vertices,
        input_index: lat.input_index,
        faces: lat.faces,
        facet_planes: lat.planes,
        volume: lat.volume,
        merged_facets: lat.merged,
        stats: out.stats,
    })
}

/// Segment hull on the line: two extreme vertices double as the facets.
fn hull_1d(points: &[Point]) -> Result<Polytope, HullError> {
    let (mut lo, mut hi) = (0usize, 0usize);
    for (i, p) in points.iter().enumerate() {
        if p[0] < points[lo][0] {
            lo = i;
        }
        if p[0] > points[hi][0] {
            hi = i;
        }
    }
    if points[lo][0] == points[hi][0] {
        return Err(HullError::DegenerateInput);
    }
    let (first, second) = if lo < hi { (lo, hi) } else { (hi, lo) };
    let vertices = vec![points[first].clone(), points[second].clone()];
    let planes = vertices
        .iter()
        .map(|v| {
            let sign = if v[0] == points[hi][0] { 1.0 } else { -1.0 };
            Halfspace {
                normal: Point::new(&[sign]),
                offset: sign * v[0],
            }
        })
        .collect();
    Ok(Polytope {
        d: 1,
        vertices,
        input_index: vec![first, second],
        faces: vec![vec![vec![0], vec![1]]],
        facet_planes: planes,
        volume: points[hi][0] - points[lo][0],
        merged_facets: false,
        stats: PredicateStats::default(),
    })
}

/// Extreme points of a cloud, as indices into the input. Used internally for
/// facet pruning; `None` on degenerate input.
pub(crate) fn extreme_subset(points: &[Point], d: usize) -> Option<Vec<usize>> {
    if d == 1 {
        let (mut lo, mut hi) = (0usize, 0usize);
        for (i, p) in points.iter().enumerate() {
            if p[0] < points[lo][0] {
                lo = i;
            }
            if p[0] > points[hi][0] {
                hi = i;
            }
        }
        return if lo == hi { None } else { Some(vec![lo.min(hi), lo.max(hi)]) };
    }
    convex_hull(points, d).ok().map(|p| p.input_index)
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, id: u32) -> &Point {
        &self.vertices[id as usize]
    }

    /// For each vertex, its index in the point cloud the hull was built from.
    pub fn input_indices(&self) -> &[usize] {
        &self.input_index
    }

    /// The j-faces as sorted vertex-id tuples, `0 <= j <= d-1`.
    pub fn faces(&self, j: usize) -> &[Vec<u32>] {
        &self.faces[j]
    }

    /// Facet list; index positions are the facet identifiers used by
    /// [`Polytope::ray_facet`] and aligned with [`Polytope::facet_planes`].
    pub fn facets(&self) -> &[Vec<u32>] {
        &self.faces[self.d - 1]
    }

    pub fn facet_planes(&self) -> &[Halfspace] {
        &self.facet_planes
    }

    /// `(f_0, ..., f_{d-1})`.
    pub fn f_vector(&self) -> Vec<usize> {
        self.faces.iter().map(|level| level.len()).collect()
    }

    /// `sum_j (-1)^j f_j - (1 - (-1)^d)`; zero iff the Euler relation holds.
    pub fn euler_defect(&self) -> i64 {
        let alt: i64 = self
            .faces
            .iter()
            .enumerate()
            .map(|(j, level)| {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * level.len() as i64
            })
            .sum();
        let expected = 1 - if self.d % 2 == 0 { 1 } else { -1 };
        alt - expected
    }

    /// Exact Lebesgue volume (cone decomposition from the vertex centroid).
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Whether coplanar simplicial facets were merged during construction.
    pub fn has_merged_facets(&self) -> bool {
        self.merged_facets
    }

    /// Predicate robustness counters from construction.
    pub fn predicate_stats(&self) -> PredicateStats {
        self.stats
    }

    /// `h_P(u) = max_v <u, v>` over the vertices.
    pub fn support_function(&self, u: &Point) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest vertex norm.
    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(Point::norm).fold(0.0, f64::max)
    }

    /// Smallest facet distance from the origin; meaningful when the origin is
    /// interior (then it is the inradius of the largest centred ball).
    pub fn min_facet_offset(&self) -> f64 {
        self.facet_planes
            .iter()
            .map(|h| h.offset)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn origin_interior(&self) -> bool {
        self.min_facet_offset() > ORIGIN_INTERIOR_TOL
    }

    /// Membership with tolerance: `<z, n_F> <= offset_F + tol` for all facets.
    pub fn contains(&self, z: &Point) -> bool {
        self.facet_planes
            .iter()
            .all(|h| z.dot(&h.normal) <= h.offset + MEMBERSHIP_TOL * (1.0 + h.offset.abs()))
    }

    /// Polar dual `{ z : <z, v> <= 1 for all vertices v }`.
    ///
    /// Requires the origin strictly interior. In general position,
    /// `f_j(dual) = f_{d-1-j}(self)`.
    pub fn polar_dual(&self) -> Result<Polytope, HullError> {
        if self.d < 2 {
            return Err(HullError::UnsupportedDimension(self.d));
        }
        if !self.origin_interior() {
            return Err(HullError::OriginNotInterior);
        }
        let dual_points: Vec<Point> = self
            .facet_planes
            .iter()
            .map(|h| h.normal.scaled(1.0 / h.offset))
            .collect();
        convex_hull(&dual_points, self.d)
    }

    /// The facet crossed by the ray `{ t * direction : t > 0 }`.
    ///
    /// Ties within a relative tolerance (ray through a ridge or vertex) are
    /// broken by the smallest facet identifier.
    pub fn ray_facet(&self, direction: &Point) -> Result<usize, HullError> {
        if !self.origin_interior() {
            return Err(HullError::OriginNotInterior);
        }
        let mut best_t = f64::INFINITY;
        for h in &self.facet_planes {
            let denom = direction.dot(&h.normal);
            if denom > 1e-14 {
                best_t = best_t.min(h.offset / denom);
            }
        }
        let tie = RAY_TIE_TOL * (1.0 + best_t);
        let id = self
            .facet_planes
            .iter()
            .position(|h| {
                let denom = direction.dot(&h.normal);
                denom > 1e-14 && (h.offset / denom - best_t).abs() <= tie
            })
            .expect("bounded polytope with interior origin: ray must exit");
        Ok(id)
    }

    /// Orthogonal projection onto the span of an orthonormal `basis`,
    /// returned as a polytope in `R^j` coordinates.
    pub fn project(&self, basis: &[Vec<f64>]) -> Result<Polytope, HullError> {
        let j = basis.len();
        if j == 0 || j > self.d {
            return Err(HullError::InvalidBasis);
        }
        for (a, va) in basis.iter().enumerate() {
            if va.len() != self.d {
                return Err(HullError::InvalidBasis);
            }
            for (b, vb) in basis.iter().enumerate() {
                let g = crate::geom::dot(va, vb);
                let expect = if a == b { 1.0 } else { 0.0 };
                if (g - expect).abs() > 1e-8 {
                    return Err(HullError::InvalidBasis);
                }
            }
        }
        let projected: Vec<Point> = self
            .vertices
            .iter()
            .map(|v| {
                let coords: Vec<f64> = basis
                    .iter()
                    .map(|b| v.coords().iter().zip(b).map(|(x, y)| x * y).sum())
                    .collect();
                Point::new(&coords)
            })
            .collect();
        convex_hull(&projected, j)
    }
}
