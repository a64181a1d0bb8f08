//! Randomized incremental (beneath-beyond) hull construction.
//!
//! Facets are kept simplicial during construction; coplanar groups are merged
//! afterwards when the face lattice is assembled. Large inputs first pass
//! through an interior prefilter: points strictly inside the hull of a strided
//! subsample cannot be extreme and are dropped before the incremental run.

use super::predicates::{orientation, PredicateStats};
use crate::geom::{det_in_place, dot, Point, MAX_DIM};
use arrayvec::ArrayVec;
use std::collections::HashMap;

/// Inputs larger than this are run through the interior prefilter.
pub(super) const PREFILTER_THRESHOLD: usize = 2048;
const PREFILTER_SAMPLE: usize = 1024;
/// Points deeper inside the sample hull than this margin are discarded.
const PREFILTER_MARGIN: f64 = 1e-7;

pub(super) type VertexTuple = ArrayVec<u32, MAX_DIM>;

#[derive(Clone, Debug)]
pub(super) struct SimplicialFacet {
    /// Vertex indices into the candidate point slice, ordered so that the
    /// orientation against the interior reference point is positive.
    pub verts: VertexTuple,
    pub normal: Point,
    pub offset: f64,
    pub alive: bool,
}

pub(super) struct BuildOutput {
    /// Candidate points the facets index into.
    pub points: Vec<Point>,
    /// Mapping candidate index -> index in the original input slice.
    pub input_index: Vec<usize>,
    pub facets: Vec<SimplicialFacet>,
    pub stats: PredicateStats,
}

#[derive(Debug)]
pub(super) enum BuildError {
    Degenerate,
}

/// Builds the simplicial hull of `points` (full-dimensional input required).
pub(super) fn build(points: &[Point], d: usize) -> Result<BuildOutput, BuildError> {
    if points.len() > PREFILTER_THRESHOLD {
        let (candidates, input_index) = prefilter(points, d);
        let mut out = incremental(&candidates, d)?;
        out.input_index = out.input_index.iter().map(|&i| input_index[i]).collect();
        Ok(out)
    } else {
        incremental(points, d)
    }
}

/// Drops points that are strictly inside the hull of a strided subsample.
/// Every extreme point of the full cloud survives: it can never lie in the
/// interior of the hull of any subset of the cloud.
fn prefilter(points: &[Point], d: usize) -> (Vec<Point>, Vec<usize>) {
    let n = points.len();
    let stride = n.div_ceil(PREFILTER_SAMPLE);
    let sample: Vec<Point> = points.iter().step_by(stride).cloned().collect();
    let Ok(sample_hull) = incremental(&sample, d) else {
        return (points.to_vec(), (0..n).collect());
    };
    let planes: Vec<(&Point, f64)> = sample_hull
        .facets
        .iter()
        .filter(|f| f.alive)
        .map(|f| (&f.normal, f.offset))
        .collect();
    if planes.is_empty() {
        return (points.to_vec(), (0..n).collect());
    }
    let margin = PREFILTER_MARGIN
        * planes
            .iter()
            .map(|(_, o)| o.abs())
            .fold(1.0f64, f64::max);
    let mut kept = Vec::new();
    let mut index = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let inside = planes
            .iter()
            .all(|(normal, offset)| p.dot(normal) < offset - margin);
        if !inside {
            kept.push(p.clone());
            index.push(i);
        }
    }
    (kept, index)
}

fn incremental(points: &[Point], d: usize) -> Result<BuildOutput, BuildError> {
    let mut stats = PredicateStats::default();
    let simplex = initial_simplex(points, d).ok_or(BuildError::Degenerate)?;
    let interior = centroid(points, &simplex);

    let mut facets: Vec<SimplicialFacet> = Vec::new();
    for skip in 0..=d {
        let verts: VertexTuple = simplex
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != skip)
            .map(|(_, &v)| v as u32)
            .collect();
        facets.push(make_facet(points, verts, &interior, &mut stats).ok_or(BuildError::Degenerate)?);
    }

    let mut order: Vec<u32> = (0..points.len() as u32)
        .filter(|i| !simplex.contains(&(*i as usize)))
        .collect();
    shuffle(&mut order);

    let mut visible: Vec<usize> = Vec::new();
    let mut horizon: HashMap<VertexTuple, u32> = HashMap::new();
    for &q_idx in &order {
        let q = &points[q_idx as usize];
        visible.clear();
        for (fi, f) in facets.iter().enumerate() {
            if !f.alive {
                continue;
            }
            let mut refs: ArrayVec<&Point, { MAX_DIM + 1 }> = f
                .verts
                .iter()
                .map(|&v| &points[v as usize])
                .collect();
            refs.push(q);
            if orientation(&refs, d, &mut stats) < 0 {
                visible.push(fi);
            }
        }
        if visible.is_empty() {
            continue;
        }
        // A ridge of exactly one visible facet lies on the horizon.
        horizon.clear();
        for &fi in &visible {
            let verts = facets[fi].verts.clone();
            for skip in 0..verts.len() {
                let mut ridge: VertexTuple = verts
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                ridge.sort_unstable();
                *horizon.entry(ridge).or_insert(0) += 1;
            }
            facets[fi].alive = false;
        }
        let mut new_ridges: Vec<&VertexTuple> = horizon
            .iter()
            .filter(|(_, &count)| count == 1)
            .map(|(ridge, _)| ridge)
            .collect();
        new_ridges.sort_unstable();
        for ridge in new_ridges {
            let mut verts = ridge.clone();
            verts.push(q_idx);
            let facet =
                make_facet(points, verts, &interior, &mut stats).ok_or(BuildError::Degenerate)?;
            facets.push(facet);
        }
    }

    facets.retain(|f| f.alive);
    Ok(BuildOutput {
        points: points.to_vec(),
        input_index: (0..points.len()).collect(),
        facets,
        stats,
    })
}

/// Greedy affinely-independent start simplex; `None` if the cloud is flat.
fn initial_simplex(points: &[Point], d: usize) -> Option<Vec<usize>> {
    if points.len() < d + 1 {
        return None;
    }
    let mut chosen = vec![0usize];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let base = &points[0];
    let mut scale = base.norm().max(1.0);
    while basis.len() < d {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut v = p.sub(base).coords().to_vec();
            for b in &basis {
                let c = dot(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
            let res = dot(&v, &v).sqrt();
            if best.as_ref().map_or(true, |(_, _, r)| res > *r) {
                best = Some((i, v, res));
            }
        }
        let (i, mut v, res) = best?;
        scale = scale.max(points[i].norm());
        if res <= 1e-12 * scale {
            return None;
        }
        for vi in v.iter_mut() {
            *vi /= res;
        }
        basis.push(v);
        chosen.push(i);
    }
    Some(chosen)
}

fn centroid(points: &[Point], ids: &[usize]) -> Point {
    let d = points[ids[0]].dim();
    let mut acc = Point::zeros(d);
    for &i in ids {
        acc = acc.add(&points[i]);
    }
    acc.scaled(1.0 / ids.len() as f64)
}

/// Builds a facet from `d` vertex indices: hyperplane, outward orientation,
/// and vertex order canonicalized to positive orientation against `interior`.
fn make_facet(
    points: &[Point],
    mut verts: VertexTuple,
    interior: &Point,
    stats: &mut PredicateStats,
) -> Option<SimplicialFacet> {
    let d = interior.dim();
    let refs: ArrayVec<&Point, { MAX_DIM + 1 }> = verts
        .iter()
        .map(|&v| &points[v as usize])
        .chain(std::iter::once(interior))
        .collect();
    match orientation(&refs, d, stats) {
        0 => return None,
        -1 => verts.swap(0, 1),
        _ => {}
    }
    let (normal, offset) = hyperplane(points, &verts, interior)?;
    Some(SimplicialFacet {
        verts,
        normal,
        offset,
        alive: true,
    })
}

/// Hyperplane through the facet vertices, normal pointing away from `interior`.
fn hyperplane(points: &[Point], verts: &VertexTuple, interior: &Point) -> Option<(Point, f64)> {
    let d = interior.dim();
    let base = &points[verts[0] as usize];
    // Generalized cross product: cofactors of the (d-1) x d difference matrix.
    let mut rows = [[0.0f64; MAX_DIM]; MAX_DIM];
    for (r, &v) in verts[1..].iter().enumerate() {
        let p = &points[v as usize];
        for c in 0..d {
            rows[r][c] = p[c] - base[c];
        }
    }
    let mut n = [0.0f64; MAX_DIM];
    for skip in 0..d {
        let mut minor = [[0.0f64; MAX_DIM]; MAX_DIM];
        for r in 0..d - 1 {
            let mut cc = 0;
            for c in 0..d {
                if c == skip {
                    continue;
                }
                minor[r][cc] = rows[r][c];
                cc += 1;
            }
        }
        let sign = if skip % 2 == 0 { 1.0 } else { -1.0 };
        n[skip] = sign * det_in_place(&mut minor, d - 1);
    }
    let norm = dot(&n[..d], &n[..d]).sqrt();
    if norm == 0.0 {
        return None;
    }
    for v in n[..d].iter_mut() {
        *v /= norm;
    }
    let mut normal = Point::new(&n[..d]);
    let mut offset = normal.dot(base);
    if normal.dot(interior) > offset {
        normal = normal.scaled(-1.0);
        offset = -offset;
    }
    Some((normal, offset))
}

/// Deterministic Fisher-Yates shuffle (splitmix64 stream, fixed seed).
fn shuffle(order: &mut [u32]) {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut next = || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    for i in (1..order.len()).rev() {
        let j = (next() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
}
