//! Coplanar facet merging and face lattice assembly.

use super::build::{BuildError, BuildOutput, SimplicialFacet};
use super::Halfspace;
use crate::geom::{affine_rank, gram_schmidt_extend, Point};
use std::collections::{BTreeSet, HashMap};

/// Two adjacent simplicial facets closer than this (in 1 - <n1,n2> and in
/// offset gap) are treated as parts of one polytope facet.
const MERGE_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-8;

pub(super) struct LatticeOutput {
    pub vertices: Vec<Point>,
    pub input_index: Vec<usize>,
    /// `faces[j]` is the sorted list of j-faces, each a sorted vertex-id tuple.
    /// `faces[d-1]` is aligned with `planes`.
    pub faces: Vec<Vec<Vec<u32>>>,
    pub planes: Vec<Halfspace>,
    pub volume: f64,
    pub merged: bool,
}

pub(super) fn assemble(out: &BuildOutput, d: usize) -> Result<LatticeOutput, BuildError> {
    let facets = &out.facets;
    debug_assert!(facets.iter().all(|f| f.alive));

    let groups = merge_groups(facets, d);
    let merged = groups.iter().any(|g| g.len() > 1);

    // Vertex set of each merged facet, pruned to the extreme points of the
    // facet polygon when a merge produced more than d candidate vertices.
    let mut facet_vertex_sets: Vec<BTreeSet<u32>> = Vec::with_capacity(groups.len());
    for group in &groups {
        let mut set: BTreeSet<u32> = group
            .iter()
            .flat_map(|&fi| facets[fi].verts.iter().copied())
            .collect();
        if group.len() > 1 && set.len() > d && d >= 2 {
            prune_to_extreme(&mut set, &out.points, &facets[group[0]])?;
        }
        facet_vertex_sets.push(set);
    }

    // Compact vertex ids, keeping input order.
    let vertex_ids: BTreeSet<u32> = facet_vertex_sets.iter().flatten().copied().collect();
    let old_ids: Vec<u32> = vertex_ids.into_iter().collect();
    let remap: HashMap<u32, u32> = old_ids
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new as u32))
        .collect();
    let vertices: Vec<Point> = old_ids
        .iter()
        .map(|&i| out.points[i as usize].clone())
        .collect();
    let input_index: Vec<usize> = old_ids
        .iter()
        .map(|&i| out.input_index[i as usize])
        .collect();

    // Canonical facet order: lexicographic in the remapped vertex tuples.
    let mut facet_entries: Vec<(Vec<u32>, usize)> = facet_vertex_sets
        .iter()
        .enumerate()
        .map(|(gi, set)| {
            let mut verts: Vec<u32> = set.iter().map(|v| remap[v]).collect();
            verts.sort_unstable();
            (verts, gi)
        })
        .collect();
    facet_entries.sort();
    let planes: Vec<Halfspace> = facet_entries
        .iter()
        .map(|(_, gi)| {
            let rep = &facets[groups[*gi][0]];
            Halfspace {
                normal: rep.normal.clone(),
                offset: rep.offset,
            }
        })
        .collect();
    let facet_tuples: Vec<Vec<u32>> = facet_entries.into_iter().map(|(v, _)| v).collect();

    let volume = cone_volume(&out.points, facets, &vertices, d);

    let faces = if d == 1 {
        vec![facet_tuples.clone()]
    } else if merged {
        lattice_by_intersection(&facet_tuples, &vertices, d)
    } else {
        lattice_simplicial(&facet_tuples, vertices.len(), d)
    };

    Ok(LatticeOutput {
        vertices,
        input_index,
        faces,
        planes,
        volume,
        merged,
    })
}

/// Groups simplicial facets into coplanar classes by flood fill across ridges.
fn merge_groups(facets: &[SimplicialFacet], d: usize) -> Vec<Vec<usize>> {
    // Ridge -> facets sharing it.
    let mut ridge_map: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    for (fi, f) in facets.iter().enumerate() {
        for skip in 0..f.verts.len() {
            let mut ridge: Vec<u32> = f
                .verts
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, &v)| v)
                .collect();
            ridge.sort_unstable();
            ridge_map.entry(ridge).or_default().push(fi);
        }
    }
    let mut group_of = vec![usize::MAX; facets.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..facets.len() {
        if group_of[start] != usize::MAX {
            continue;
        }
        let gid = groups.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        group_of[start] = gid;
        while let Some(fi) = stack.pop() {
            members.push(fi);
            let f = &facets[fi];
            for skip in 0..f.verts.len() {
                let mut ridge: Vec<u32> = f
                    .verts
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                ridge.sort_unstable();
                for &other in &ridge_map[&ridge] {
                    if group_of[other] != usize::MAX || other == fi {
                        continue;
                    }
                    if coplanar(f, &facets[other], d) {
                        group_of[other] = gid;
                        stack.push(other);
                    }
                }
            }
        }
        groups.push(members);
    }
    groups
}

fn coplanar(a: &SimplicialFacet, b: &SimplicialFacet, _d: usize) -> bool {
    (1.0 - a.normal.dot(&b.normal)).abs() < MERGE_TOL
        && (a.offset - b.offset).abs() < MERGE_TOL * (1.0 + a.offset.abs())
}

/// Restricts a merged facet's vertex set to the extreme points of the facet
/// polygon, working in in-plane coordinates one dimension down.
fn prune_to_extreme(
    set: &mut BTreeSet<u32>,
    points: &[Point],
    rep: &SimplicialFacet,
) -> Result<(), BuildError> {
    let d = rep.normal.dim();
    let normal = rep.normal.coords().to_vec();
    let raw: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            e
        })
        .collect();
    let basis = gram_schmidt_extend(std::slice::from_ref(&normal), &raw);
    if basis.len() != d - 1 {
        return Err(BuildError::Degenerate);
    }
    let ids: Vec<u32> = set.iter().copied().collect();
    let projected: Vec<Point> = ids
        .iter()
        .map(|&i| {
            let p = &points[i as usize];
            let coords: Vec<f64> = basis.iter().map(|b| dot_slice(p, b)).collect();
            Point::new(&coords)
        })
        .collect();
    let keep = super::extreme_subset(&projected, d - 1).ok_or(BuildError::Degenerate)?;
    let keep: BTreeSet<u32> = keep.into_iter().map(|k| ids[k]).collect();
    set.retain(|v| keep.contains(v));
    Ok(())
}

fn dot_slice(p: &Point, b: &[f64]) -> f64 {
    p.coords().iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Volume as a sum of cones from the vertex centroid over simplicial facets.
fn cone_volume(points: &[Point], facets: &[SimplicialFacet], vertices: &[Point], d: usize) -> f64 {
    let mut apex = Point::zeros(d);
    for v in vertices {
        apex = apex.add(v);
    }
    let apex = apex.scaled(1.0 / vertices.len() as f64);
    let d_factorial: f64 = (1..=d).map(|i| i as f64).product();
    let mut total = 0.0;
    let mut m = [[0.0f64; crate::geom::MAX_DIM]; crate::geom::MAX_DIM];
    for f in facets {
        for (r, &vi) in f.verts.iter().enumerate() {
            let p = &points[vi as usize];
            for c in 0..d {
                m[r][c] = p[c] - apex[c];
            }
        }
        total += crate::geom::det_in_place(&mut m, d).abs();
    }
    total / d_factorial
}

/// Face lattice of a simplicial polytope: the j-faces are exactly the
/// (j+1)-subsets of facet vertex tuples.
fn lattice_simplicial(facet_tuples: &[Vec<u32>], n_vertices: usize, d: usize) -> Vec<Vec<Vec<u32>>> {
    let mut faces: Vec<Vec<Vec<u32>>> = vec![Vec::new(); d];
    faces[d - 1] = facet_tuples.to_vec();
    faces[0] = (0..n_vertices as u32).map(|v| vec![v]).collect();
    for j in 1..d - 1 {
        let mut level: BTreeSet<Vec<u32>> = BTreeSet::new();
        for facet in facet_tuples {
            for subset in subsets(facet, j + 1) {
                level.insert(subset);
            }
        }
        faces[j] = level.into_iter().collect();
    }
    faces
}

fn subsets(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // Next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// General face lattice: each j-face is the intersection of a (j+1)-face with
/// a facet, collected level by level with affine-rank filtering.
fn lattice_by_intersection(
    facet_tuples: &[Vec<u32>],
    vertices: &[Point],
    d: usize,
) -> Vec<Vec<Vec<u32>>> {
    let mut faces: Vec<Vec<Vec<u32>>> = vec![Vec::new(); d];
    faces[d - 1] = facet_tuples.to_vec();
    faces[0] = (0..vertices.len() as u32).map(|v| vec![v]).collect();
    let facet_sets: Vec<BTreeSet<u32>> = facet_tuples
        .iter()
        .map(|f| f.iter().copied().collect())
        .collect();
    for j in (1..d - 1).rev() {
        let mut level: BTreeSet<Vec<u32>> = BTreeSet::new();
        for upper in &faces[j + 1] {
            let upper_set: BTreeSet<u32> = upper.iter().copied().collect();
            for fset in &facet_sets {
                if upper_set.is_subset(fset) {
                    continue;
                }
                let inter: Vec<u32> = upper_set.intersection(fset).copied().collect();
                if inter.len() < j + 1 {
                    continue;
                }
                let refs: Vec<&Point> = inter.iter().map(|&v| &vertices[v as usize]).collect();
                if affine_rank(&refs, RANK_TOL) == j {
                    level.insert(inter);
                }
            }
        }
        faces[j] = level.into_iter().collect();
    }
    faces
}
