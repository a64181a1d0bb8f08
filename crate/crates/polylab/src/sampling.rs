//! Seeded, reproducible Poisson point process samplers.
//!
//! Replicates draw from counter-based ChaCha streams: the same
//! `(master_seed, stream_index)` always reproduces the same sample path, and
//! distinct stream indices are independent by construction, so one stream per
//! worker parallelizes without coordination.

use crate::geom::{unit_ball_volume, Point};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("shell sampling did not terminate within {max_shells} shells (intensity too small for a bounded cell at this scale)")]
    NonTerminating { max_shells: usize },
}

/// A replicate's random stream: `(master_seed, stream_index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngStream {
            master_seed,
            stream_index,
        }
    }

    /// Materialize the stream. Identical `(seed, index)` yields identical
    /// draws; distinct indices give independent ChaCha streams.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Which intensity measure drives the ball process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BallMeasure {
    /// Restriction of the stationary process: intensity `lambda dx` on the ball.
    Stationary,
    /// Inversion-tilted density `lambda ||x||^{-2d} dx`, truncated to the
    /// annulus `inner_radius <= ||x|| <= 1`.
    Tilted { inner_radius: f64 },
}

/// Poisson process on the unit ball.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BallProcessConfig {
    pub d: usize,
    pub lambda: f64,
    pub measure: BallMeasure,
}

impl BallProcessConfig {
    pub fn stationary(d: usize, lambda: f64) -> Self {
        BallProcessConfig {
            d,
            lambda,
            measure: BallMeasure::Stationary,
        }
    }

    pub fn tilted(d: usize, lambda: f64, inner_radius: f64) -> Self {
        BallProcessConfig {
            d,
            lambda,
            measure: BallMeasure::Tilted { inner_radius },
        }
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        if self.d < 2 || self.d > crate::geom::MAX_DIM {
            return Err(SamplingError::InvalidConfig(format!(
                "dimension {} out of range 2..=6",
                self.d
            )));
        }
        if !(self.lambda > 0.0) {
            return Err(SamplingError::InvalidConfig("lambda must be > 0".into()));
        }
        if let BallMeasure::Tilted { inner_radius } = self.measure {
            if !(inner_radius > 0.0 && inner_radius < 1.0) {
                return Err(SamplingError::InvalidConfig(
                    "inner_radius must lie in (0, 1)".into(),
                ));
            }
        }
        Ok(())
    }

    /// Expected point count of the process.
    pub fn mean_count(&self) -> f64 {
        match self.measure {
            BallMeasure::Stationary => self.lambda * unit_ball_volume(self.d),
            BallMeasure::Tilted { inner_radius } => {
                // integral of ||x||^{-2d} over the annulus.
                self.lambda * unit_ball_volume(self.d) * (inner_radius.powi(-(self.d as i32)) - 1.0)
            }
        }
    }
}

/// Hyperplane generator process: intensity `lambda ||x||^{alpha - d} dx`
/// outside the unit ball; each generator `x` encodes the hyperplane with unit
/// normal `x/||x||` at distance `||x||/2` from the origin.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HyperplaneProcessConfig {
    pub d: usize,
    pub lambda: f64,
    pub alpha: f64,
}

impl HyperplaneProcessConfig {
    pub fn new(d: usize, lambda: f64, alpha: f64) -> Self {
        HyperplaneProcessConfig { d, lambda, alpha }
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        if self.d < 2 || self.d > crate::geom::MAX_DIM {
            return Err(SamplingError::InvalidConfig(format!(
                "dimension {} out of range 2..=6",
                self.d
            )));
        }
        if !(self.lambda > 0.0) {
            return Err(SamplingError::InvalidConfig("lambda must be > 0".into()));
        }
        if self.alpha < 1.0 {
            return Err(SamplingError::InvalidConfig("alpha must be >= 1".into()));
        }
        Ok(())
    }

    /// Mass of the radial shell `r_in <= ||x|| <= r_out`.
    pub fn shell_mass(&self, r_in: f64, r_out: f64) -> f64 {
        let d = self.d as f64;
        self.lambda * d * unit_ball_volume(self.d) * (r_out.powf(self.alpha) - r_in.powf(self.alpha))
            / self.alpha
    }
}

/// Adaptive stop rule for shell-by-shell generator sampling.
#[derive(Clone, Copy, Debug)]
pub struct StopRule {
    /// Hard cap on the number of geometric shells (radii double per shell).
    pub max_shells: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { max_shells: 48 }
    }
}

/// Poisson count with the given mean.
pub fn poisson_count(mean: f64, rng: &mut ChaCha12Rng) -> u64 {
    assert!(mean >= 0.0 && mean.is_finite(), "mean must be finite and >= 0");
    if mean == 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    let x: f64 = dist.sample(rng);
    x as u64
}

/// Uniform direction on the unit sphere in `R^d`.
pub fn uniform_direction(d: usize, rng: &mut ChaCha12Rng) -> Point {
    loop {
        let coords: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let p = Point::new(&coords);
        if let Some(u) = p.normalized() {
            return u;
        }
    }
}

/// Uniform point in the unit ball of `R^d` (direction times `U^{1/d}` radius).
pub fn uniform_in_ball(d: usize, rng: &mut ChaCha12Rng) -> Point {
    let u = uniform_direction(d, rng);
    let r: f64 = rng.gen::<f64>().powf(1.0 / d as f64);
    u.scaled(r)
}

/// Stationary Poisson process restricted to the unit ball:
/// `N ~ Poisson(lambda * kappa_d)` points i.i.d. uniform.
pub fn sample_uniform_ball(
    cfg: &BallProcessConfig,
    stream: RngStream,
) -> Result<Vec<Point>, SamplingError> {
    cfg.validate()?;
    if !matches!(cfg.measure, BallMeasure::Stationary) {
        return Err(SamplingError::InvalidConfig(
            "sample_uniform_ball requires the stationary measure".into(),
        ));
    }
    let mut rng = stream.rng();
    let n = poisson_count(cfg.mean_count(), &mut rng);
    Ok((0..n).map(|_| uniform_in_ball(cfg.d, &mut rng)).collect())
}

/// Inversion-tilted Poisson process on the annulus `rho <= ||x|| <= 1` with
/// density `lambda ||x||^{-2d}`: radial part follows `r^{-d-1}` on `[rho, 1]`,
/// directions are uniform.
pub fn sample_tilted_ball(
    cfg: &BallProcessConfig,
    stream: RngStream,
) -> Result<Vec<Point>, SamplingError> {
    cfg.validate()?;
    let BallMeasure::Tilted { inner_radius: rho } = cfg.measure else {
        return Err(SamplingError::InvalidConfig(
            "sample_tilted_ball requires the tilted measure".into(),
        ));
    };
    let mut rng = stream.rng();
    let n = poisson_count(cfg.mean_count(), &mut rng);
    let d = cfg.d as f64;
    let rho_pow = rho.powf(-d);
    let points = (0..n)
        .map(|_| {
            // Inverse CDF of density ∝ r^{-d-1} on [rho, 1]:
            // r = (rho^{-d} - u (rho^{-d} - 1))^{-1/d}.
            let u: f64 = rng.gen();
            let r = (rho_pow - u * (rho_pow - 1.0)).powf(-1.0 / d);
            uniform_direction(cfg.d, &mut rng).scaled(r)
        })
        .collect();
    Ok(points)
}

/// All generators of the hyperplane process whose hyperplanes can intersect
/// the zero cell, sampled shell by shell (`R_k = 2^k`).
///
/// After each shell, `can_stop(generators_so_far, shell_outer_radius)` is
/// consulted; once it reports that no hyperplane at distance
/// `>= shell_outer_radius / 2` can cut the cell, sampling stops. The callback
/// owns the geometry (typically a zero-cell circumradius test), keeping this
/// sampler free of hull knowledge.
pub fn sample_hyperplane_generators<F>(
    cfg: &HyperplaneProcessConfig,
    stop: StopRule,
    stream: RngStream,
    mut can_stop: F,
) -> Result<Vec<Point>, SamplingError>
where
    F: FnMut(&[Point], f64) -> bool,
{
    cfg.validate()?;
    let mut rng = stream.rng();
    let mut generators: Vec<Point> = Vec::new();
    let mut r_in = 1.0f64;
    for _ in 0..stop.max_shells {
        let r_out = 2.0 * r_in;
        let n = poisson_count(cfg.shell_mass(r_in, r_out), &mut rng);
        let a = cfg.alpha;
        let lo = r_in.powf(a);
        let hi = r_out.powf(a);
        for _ in 0..n {
            // Radial density ∝ r^{alpha-1} on the shell.
            let u: f64 = rng.gen();
            let r = (lo + u * (hi - lo)).powf(1.0 / a);
            generators.push(uniform_direction(cfg.d, &mut rng).scaled(r));
        }
        if can_stop(&generators, r_out) {
            return Ok(generators);
        }
        r_in = r_out;
    }
    Err(SamplingError::NonTerminating {
        max_shells: stop.max_shells,
    })
}
