//! Scaling-exponent fits, tail-bound evaluators and tail diagnostics.

use super::normal::{normal_cdf, normal_sf};
use super::CumulantError;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Ordinary least squares fit of `log(value)` against `log(lambda)`.
#[derive(Clone, Debug)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// 95% confidence interval for the slope (t-based, df = n - 2).
    pub ci95: (f64, f64),
    pub n: usize,
}

/// Fits the scaling exponent of `value ~ c * lambda^slope` from
/// `(lambda, value)` pairs. Needs at least 4 distinct positive lambdas and
/// strictly positive values.
pub fn fit_scaling_exponent(pairs: &[(f64, f64)]) -> Result<ExponentFit, CumulantError> {
    if pairs.iter().any(|&(x, y)| !(x > 0.0) || !y.is_finite()) {
        return Err(CumulantError::InvalidInput(
            "lambdas must be positive and values finite".into(),
        ));
    }
    if pairs.iter().any(|&(_, y)| y <= 0.0) {
        return Err(CumulantError::NonPositiveValue);
    }
    let mut xs: Vec<f64> = pairs.iter().map(|&(x, _)| x).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < f64::EPSILON * a.abs());
    if xs.len() < 4 {
        return Err(CumulantError::InvalidInput(
            "need at least 4 distinct lambda values".into(),
        ));
    }

    let n = pairs.len() as f64;
    let logs: Vec<(f64, f64)> = pairs.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let df = n - 2.0;
    let s2 = ssr / df;
    let slope_se = (s2 / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, df)
        .expect("valid dof")
        .inverse_cdf(0.975);
    Ok(ExponentFit {
        slope,
        intercept,
        slope_se,
        ci95: (slope - t * slope_se, slope + t * slope_se),
        n: pairs.len(),
    })
}

/// Parameters of the cumulant-based concentration bound: `gamma = d + w + 3`
/// and `Delta_lambda = c * lambda^{(d-1)/(2(d+1))}`. The constant `c` is an
/// explicit input; existence, not value, is what the theory provides.
#[derive(Clone, Copy, Debug)]
pub struct BoundParams {
    pub d: usize,
    pub w: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl BoundParams {
    /// Standard parametrization from dimension, functional weight, constant
    /// and intensity.
    pub fn new(d: usize, w: f64, c: f64, lambda: f64) -> Self {
        let gamma = d as f64 + w + 3.0;
        let delta = c * lambda.powf((d as f64 - 1.0) / (2.0 * (d as f64 + 1.0)));
        BoundParams { d, w, gamma, delta }
    }

    /// Direct `(gamma, delta)` form of the generic concentration lemma.
    pub fn with_gamma_delta(gamma: f64, delta: f64) -> Self {
        BoundParams {
            d: 0,
            w: 0.0,
            gamma,
            delta,
        }
    }
}

/// Concentration bound `2 exp(-1/4 min{ y^2 / 2^{1+gamma},
/// (delta y)^{1/(1+gamma)} })` for a standardized variable with
/// Statulevicius-type cumulant growth.
pub fn thm_tail_bound(bp: &BoundParams, y: f64) -> f64 {
    assert!(y >= 0.0, "y must be nonnegative");
    let quad = y * y / 2f64.powf(1.0 + bp.gamma);
    let stretched = (bp.delta * y).powf(1.0 / (1.0 + bp.gamma));
    2.0 * (-0.25 * quad.min(stretched)).exp()
}

/// Closed form of the incomplete-gamma-type integral
/// `int_a^inf t^{(d-1)(p-1)} e^{-bt} dt`:
/// `sum_{i=1}^{m+1} (m)_{i-1} / b^i * e^{-ab} * a^{m-(i-1)}` with
/// `m = (d-1)(p-1)` and falling factorials `(m)_j = m!/(m-j)!`.
pub fn lemma51_eval(a: f64, b: f64, d: usize, p: usize) -> f64 {
    assert!(a > 0.0 && b > 0.0 && d >= 2 && p >= 1);
    let m = (d - 1) * (p - 1);
    let eab = (-a * b).exp();
    let mut falling = 1.0; // (m)_0
    let mut sum = 0.0;
    for i in 1..=m + 1 {
        sum += falling / b.powi(i as i32) * eab * a.powi((m - (i - 1)) as i32);
        falling *= (m - (i - 1)) as f64; // (m)_i from (m)_{i-1}
    }
    sum
}

/// Standardizes samples to mean 0 and unit (n-1) variance; if the variance
/// vanishes the samples are only centered.
pub fn standardize(samples: &[f64]) -> Vec<f64> {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let sd = var.sqrt();
    if sd > 0.0 {
        samples.iter().map(|x| (x - mean) / sd).collect()
    } else {
        samples.iter().map(|x| x - mean).collect()
    }
}

/// Kolmogorov-Smirnov distance between the empirical distribution of the
/// samples (taken as given, standardize first if needed) and the standard
/// normal.
pub fn ks_distance(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        let phi = normal_cdf(*x);
        d = d.max((i as f64 + 1.0) / n - phi).max(phi - i as f64 / n);
    }
    d
}

/// One tail's log-ratio against the Gaussian tail, with a 95% Wilson interval.
#[derive(Clone, Copy, Debug)]
pub struct TailRatio {
    pub log_ratio: f64,
    pub lo: f64,
    pub hi: f64,
    pub hits: usize,
}

/// Upper (`P(X >= y)` vs `1 - Phi(y)`) and lower (`P(X <= -y)` vs `Phi(-y)`)
/// relative errors on the log scale, for internally standardized samples.
#[derive(Clone, Copy, Debug)]
pub struct TailRatios {
    pub upper: TailRatio,
    pub lower: TailRatio,
}

/// Relative error of the central limit approximation in both tails at level
/// `y >= 0`, on the log scale. The samples are standardized internally.
pub fn relative_error_tail(samples: &[f64], y: f64) -> Result<TailRatios, CumulantError> {
    if samples.len() < 2 {
        return Err(CumulantError::InsufficientSamples {
            n: samples.len(),
            needed: 2,
        });
    }
    assert!(y >= 0.0, "y must be nonnegative");
    let xs = standardize(samples);
    let n = xs.len();
    let upper_hits = xs.iter().filter(|&&x| x >= y).count();
    let lower_hits = xs.iter().filter(|&&x| x <= -y).count();
    let gauss = normal_sf(y); // = Phi(-y)
    let side = |hits: usize| -> Result<TailRatio, CumulantError> {
        if hits == 0 {
            // One-sided Wilson bound with zero successes.
            let (_, hi) = wilson95(0, n);
            return Err(CumulantError::EmptyTail {
                threshold: y,
                one_sided_bound_log_ratio: (hi / gauss).ln(),
            });
        }
        let p_hat = hits as f64 / n as f64;
        let (lo, hi) = wilson95(hits, n);
        Ok(TailRatio {
            log_ratio: (p_hat / gauss).ln(),
            lo: (lo / gauss).ln(),
            hi: (hi / gauss).ln(),
            hits,
        })
    };
    Ok(TailRatios {
        upper: side(upper_hits)?,
        lower: side(lower_hits)?,
    })
}

fn wilson95(hits: usize, n: usize) -> (f64, f64) {
    let z = 1.959963984540054f64; // Phi^{-1}(0.975)
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Moderate-deviation plug-in `(1/a^2) log P(X/a >= y)` for internally
/// standardized samples; to be compared against `-y^2/2`.
#[derive(Clone, Copy, Debug)]
pub struct MdpValue {
    pub value: f64,
    pub hits: usize,
    /// Fewer than 5 tail hits: the plug-in is reported but flagged.
    pub censored: bool,
}

pub fn mdp_functional(samples: &[f64], a: f64, y: f64) -> Result<MdpValue, CumulantError> {
    if a < 1.0 {
        return Err(CumulantError::InvalidInput("need a >= 1".into()));
    }
    let xs = standardize(samples);
    let n = xs.len();
    let hits = xs.iter().filter(|&&x| x >= a * y).count();
    if hits == 0 {
        let (_, hi) = wilson95(0, n);
        return Err(CumulantError::EmptyTail {
            threshold: a * y,
            one_sided_bound_log_ratio: hi.ln() / (a * a),
        });
    }
    Ok(MdpValue {
        value: (hits as f64 / n as f64).ln() / (a * a),
        hits,
        censored: hits < 5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulants::adaptive_simpson;

    #[test]
    fn exact_power_law_fit() {
        let pairs: Vec<(f64, f64)> = [100.0, 300.0, 1000.0, 3000.0, 10000.0]
            .iter()
            .map(|&l: &f64| (l, l.powf(1.0 / 3.0)))
            .collect();
        let fit = fit_scaling_exponent(&pairs).unwrap();
        assert!((fit.slope - 1.0 / 3.0).abs() < 1e-12);
        assert!(fit.ci95.1 - fit.ci95.0 < 1e-10);

        let flat: Vec<(f64, f64)> = [10.0, 100.0, 1000.0, 10000.0]
            .iter()
            .map(|&l| (l, 7.0))
            .collect();
        let fit = fit_scaling_exponent(&flat).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law_within_ci() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2);
        let pairs: Vec<(f64, f64)> = [100.0, 300.0, 1000.0, 3000.0, 10000.0, 30000.0]
            .iter()
            .map(|&l: &f64| {
                let noise = 1.0 + rng.gen_range(-0.05..0.05);
                (l, l.powf(1.0 / 3.0) * noise)
            })
            .collect();
        let fit = fit_scaling_exponent(&pairs).unwrap();
        assert!(fit.ci95.0 <= 1.0 / 3.0 && 1.0 / 3.0 <= fit.ci95.1);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let too_few = [(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)];
        assert!(fit_scaling_exponent(&too_few).is_err());
        let nonpos = [(1.0, 1.0), (2.0, -2.0), (4.0, 4.0), (8.0, 8.0)];
        assert_eq!(
            fit_scaling_exponent(&nonpos).unwrap_err(),
            CumulantError::NonPositiveValue
        );
    }

    #[test]
    fn tail_bound_shape() {
        let bp = BoundParams::new(2, 0.0, 0.5, 1000.0);
        assert!((thm_tail_bound(&bp, 0.0) - 2.0).abs() < 1e-12);
        let mut prev = 2.0;
        for i in 1..200 {
            let y = i as f64 / 10.0;
            let b = thm_tail_bound(&bp, y);
            assert!(b <= prev + 1e-15, "not nonincreasing at y={y}");
            prev = b;
        }
        // Nondecreasing in gamma for fixed y >= 1.
        for &y in &[1.0, 2.0, 5.0] {
            let mut last = 0.0;
            for g in [3.0, 4.0, 6.0, 9.0] {
                let b = thm_tail_bound(&BoundParams::with_gamma_delta(g, 10.0), y);
                assert!(b >= last - 1e-15);
                last = b;
            }
        }
    }

    #[test]
    fn tail_bound_branch_crossover() {
        // The min switches branches exactly where bisection says it should.
        let bp = BoundParams::with_gamma_delta(5.0, 30.0);
        let f = |y: f64| y * y / 2f64.powf(1.0 + bp.gamma) - (bp.delta * y).powf(1.0 / (1.0 + bp.gamma));
        let (mut lo, mut hi) = (1e-6, 1e6);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y_star = 0.5 * (lo + hi);
        for &y in &[y_star / 2.0, y_star * 2.0] {
            let quad = y * y / 2f64.powf(1.0 + bp.gamma);
            let stretched = (bp.delta * y).powf(1.0 / (1.0 + bp.gamma));
            let expect = if y < y_star { quad } else { stretched };
            assert!((quad.min(stretched) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn lemma51_against_quadrature() {
        // p = 1 collapses to e^{-ab}/b.
        assert!((lemma51_eval(2.0, 3.0, 4, 1) - (-6.0f64).exp() / 3.0).abs() < 1e-15);

        // (1,1,2,2): integral of t e^{-t} over [1, inf) = 2/e.
        let v = lemma51_eval(1.0, 1.0, 2, 2);
        assert!((v - 2.0 / std::f64::consts::E).abs() < 1e-12 * v);

        for &a in &[0.5, 1.0, 2.0] {
            for &b in &[0.5, 1.0, 2.0] {
                for &d in &[2usize, 3] {
                    for &p in &[1usize, 2, 3] {
                        let m = ((d - 1) * (p - 1)) as i32;
                        let f = |t: f64| t.powi(m) * (-b * t).exp();
                        let upper = a + (40.0 + 14.0 * m as f64) / b;
                        let quad = adaptive_simpson(&f, a, upper, 1e-14);
                        let closed = lemma51_eval(a, b, d, p);
                        assert!(
                            (closed - quad).abs() < 1e-10 * closed.abs().max(1e-12),
                            "a={a} b={b} d={d} p={p}: {closed} vs {quad}"
                        );
                    }
                }
            }
        }

        // a -> 0 limit is Gamma(m+1)/b^{m+1}.
        let m = 2usize; // d=3, p=2
        let v = lemma51_eval(1e-8, 1.5, 3, 2);
        let gamma = 2.0; // Gamma(3) = 2
        assert!((v - gamma / 1.5f64.powi((m + 1) as i32)).abs() < 1e-6);
    }

    #[test]
    fn ks_distance_cases() {
        // Exact normal quantile grid: distance about 1/(2n).
        let n = 500;
        let grid: Vec<f64> = (0..n)
            .map(|i| {
                let p = (i as f64 + 0.5) / n as f64;
                // crude inverse via bisection on Phi
                let (mut lo, mut hi) = (-8.0, 8.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if normal_cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let d = ks_distance(&grid);
        assert!((d - 0.5 / n as f64).abs() < 0.2 / n as f64, "d={d}");

        // All zeros: 0.5 exactly.
        assert!((ks_distance(&vec![0.0; 200]) - 0.5).abs() < 1e-12);

        // Raw U(0,1) samples are far from standard normal.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let unif: Vec<f64> = (0..2000).map(|_| rng.gen::<f64>()).collect();
        assert!(ks_distance(&unif) > 0.2);
    }

    #[test]
    fn relative_error_tail_on_normal_quantiles() {
        let n = 4000;
        let grid: Vec<f64> = (0..n)
            .map(|i| {
                let p = (i as f64 + 0.5) / n as f64;
                let (mut lo, mut hi) = (-8.0, 8.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if normal_cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        for &y in &[0.5, 1.0, 1.5] {
            let r = relative_error_tail(&grid, y).unwrap();
            assert!(r.upper.log_ratio.abs() < 0.05, "y={y}: {:?}", r.upper);
            assert!(r.lower.log_ratio.abs() < 0.05, "y={y}: {:?}", r.lower);
            // Symmetric input: the two sides agree.
            assert!((r.upper.log_ratio - r.lower.log_ratio).abs() < 1e-9);
        }
        // y = 0: log(P(X >= 0) / 0.5).
        let r = relative_error_tail(&grid, 0.0).unwrap();
        assert!((r.upper.log_ratio - (0.5f64 / 0.5).ln()).abs() < 0.01);

        let tiny = vec![0.0, 0.1, -0.1, 0.2];
        assert!(matches!(
            relative_error_tail(&tiny, 3.0),
            Err(CumulantError::EmptyTail { .. })
        ));
    }

    #[test]
    fn mdp_functional_values() {
        let n = 20_000;
        let grid: Vec<f64> = (0..n)
            .map(|i| {
                let p = (i as f64 + 0.5) / n as f64;
                let (mut lo, mut hi) = (-8.0, 8.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if normal_cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        // y = 0: value (1/a^2) log(1/2), tends to 0 as a grows.
        let v = mdp_functional(&grid, 2.0, 0.0).unwrap();
        assert!((v.value - 0.25 * 0.5f64.ln()).abs() < 0.01);
        // a = 1: plain log tail probability.
        let v = mdp_functional(&grid, 1.0, 1.0).unwrap();
        assert!((v.value - normal_sf(1.0).ln()).abs() < 0.05);
        // Gaussian tail: (1/a^2) log P(X >= a y) approaches -y^2/2.
        let v = mdp_functional(&grid, 3.0, 1.0).unwrap();
        assert!((v.value - (-0.5)).abs() < 0.15, "{}", v.value);
    }
}
