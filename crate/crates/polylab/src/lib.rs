//! Monte Carlo laboratory for random polytopes in the unit ball and for the
//! zero cells of Poisson hyperplane mosaics.
//!
//! The crate is organised around a small number of building blocks:
//!
//! - [`hull`] — exact d-dimensional convex hulls (2 ≤ d ≤ 6) with the full
//!   face lattice, volume, support function, polar duality, projection and
//!   origin-ray shooting. Orientation predicates fall back to exact rational
//!   arithmetic near ties, so the combinatorics are deterministic.
//! - [`sampling`] — seeded, reproducible Poisson point process samplers:
//!   the stationary process restricted to the unit ball, the inversion-tilted
//!   process on an annulus, and the radial-power hyperplane generator process
//!   with an adaptive shell stop rule.
//! - [`functionals`] — the key geometric functionals of a random polytope
//!   (face counts, missed volume, intrinsic-volume deficits, Voronoi-flower
//!   deficit) both as totals and as spatial empirical measures attributed to
//!   hull vertices.
//! - [`rescale`] — the parabolic scaling transformation that maps the
//!   neighbourhood of the sphere to a product picture of spatial coordinate
//!   and height, plus diagnostics for the associated growth process.
//! - [`cumulants`] — set partitions, moment/cumulant conversions, unbiased
//!   k-statistics, scaling-exponent fits, tail-bound evaluators and
//!   brute-force verifiers for closed-form identities.
//! - [`zerocell`] — zero cells of Poisson hyperplane processes, including the
//!   rescaled typical Poisson-Voronoi cell conditioned on a large inradius,
//!   built by polarity so that the face-count duality is a structural
//!   identity.
//! - [`experiment`] — experiment orchestration: flat key/value configs,
//!   seeded parallel replication with JSON-Lines persistence, resume, and
//!   CSV summary/plot tables.
//!
//! The `examples/` directory contains one runnable example per capability;
//! the thin `polylab` binary drives full experiments from config files.

pub mod cumulants;
pub mod experiment;
pub mod functionals;
pub mod geom;
pub mod hull;
pub mod rescale;
pub mod sampling;
pub mod zerocell;

pub use hull::{convex_hull, Halfspace, HullError, Polytope};
pub use sampling::RngStream;
