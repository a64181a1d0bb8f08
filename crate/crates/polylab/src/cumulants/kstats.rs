//! Unbiased k-statistics from power sums, with delete-one jackknife errors.
//!
//! For each order `r` the estimator is the unique polynomial
//! `k_r = sum_{partitions L of r} c_L(n) * prod_a S_{L_a}` in the power sums
//! with `E[k_r] = c_r` for every distribution. The coefficients are obtained
//! at the concrete sample size by solving the moment-expansion linear system
//! in exact rational arithmetic, which removes any transcription risk in the
//! classical order-5/6 formulas. Samples are centered first (k-statistics of
//! order >= 2 are translation invariant), which keeps the evaluation
//! well-conditioned at large n.

use super::partitions::{integer_partitions, set_partitions};
use super::CumulantError;
use num::rational::BigRational;
use num::{BigInt, One, ToPrimitive, Zero};

const MAX_KSTAT_ORDER: usize = 6;

/// k-statistics (unbiased cumulant estimates) of orders `1..=max_order`.
#[derive(Clone, Debug)]
pub struct CumulantEstimates {
    pub n: usize,
    /// `values[r-1]` estimates the r-th cumulant.
    pub values: Vec<f64>,
    /// Delete-one jackknife standard errors, aligned with `values`.
    pub jackknife_se: Vec<f64>,
}

pub fn k_statistics(samples: &[f64], max_order: usize) -> Result<CumulantEstimates, CumulantError> {
    if max_order == 0 || max_order > MAX_KSTAT_ORDER {
        return Err(CumulantError::TooLarge {
            k: max_order,
            max: MAX_KSTAT_ORDER,
        });
    }
    let n = samples.len();
    if n <= max_order {
        return Err(CumulantError::InsufficientSamples {
            n,
            needed: max_order,
        });
    }

    let mean = samples.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = samples.iter().map(|x| x - mean).collect();

    // Power sums S_1..S_max of the centered sample.
    let power_sums = |data: &[f64]| -> Vec<f64> {
        let mut sums = vec![0.0; max_order];
        for &x in data {
            let mut p = 1.0;
            for s in sums.iter_mut() {
                p *= x;
                *s += p;
            }
        }
        sums
    };
    let sums_full = power_sums(&centered);

    let coeffs_n: Vec<Vec<(Vec<usize>, f64)>> = (1..=max_order)
        .map(|r| kstat_coefficients(r, n))
        .collect::<Result<_, _>>()?;
    let coeffs_n1: Vec<Vec<(Vec<usize>, f64)>> = (1..=max_order)
        .map(|r| kstat_coefficients(r, n - 1))
        .collect::<Result<_, _>>()?;

    let eval = |coeffs: &[(Vec<usize>, f64)], sums: &[f64]| -> f64 {
        coeffs
            .iter()
            .map(|(partition, c)| {
                c * partition.iter().map(|&a| sums[a - 1]).product::<f64>()
            })
            .sum()
    };

    let mut values = Vec::with_capacity(max_order);
    for (r, coeffs) in coeffs_n.iter().enumerate() {
        let v = if r == 0 {
            mean
        } else {
            eval(coeffs, &sums_full)
        };
        values.push(v);
    }

    // Delete-one jackknife: update power sums by removing each observation.
    let mut jack_means = vec![0.0; max_order];
    let mut jack_sq = vec![0.0; max_order];
    let mut sums_i = vec![0.0; max_order];
    for (idx, &y) in centered.iter().enumerate() {
        let mut p = 1.0;
        for (a, s) in sums_i.iter_mut().enumerate() {
            p *= y;
            *s = sums_full[a] - p;
        }
        for r in 1..=max_order {
            let v = if r == 1 {
                // Mean of the sample with observation idx removed.
                mean + sums_i[0] / (n as f64 - 1.0)
            } else {
                eval(&coeffs_n1[r - 1], &sums_i)
            };
            jack_means[r - 1] += v;
            jack_sq[r - 1] += v * v;
        }
        let _ = idx;
    }
    let nf = n as f64;
    let jackknife_se = (0..max_order)
        .map(|r| {
            let m = jack_means[r] / nf;
            let var = (jack_sq[r] / nf - m * m).max(0.0);
            ((nf - 1.0) * var).sqrt()
        })
        .collect();

    Ok(CumulantEstimates {
        n,
        values,
        jackknife_se,
    })
}

/// Coefficients `c_L(n)` of the order-r k-statistic in the power-sum basis,
/// solved exactly at sample size `n` and converted to f64.
fn kstat_coefficients(r: usize, n: usize) -> Result<Vec<(Vec<usize>, f64)>, CumulantError> {
    let partitions = integer_partitions(r);
    let p = partitions.len();
    let index_of = |key: &Vec<usize>| partitions.iter().position(|q| q == key).unwrap();

    // Matrix column j: expansion of E[prod_a S_{L_a}] over raw-moment
    // monomials (rows), via sum over set partitions of the index set.
    let mut matrix = vec![vec![BigRational::zero(); p]; p];
    for (col, s_partition) in partitions.iter().enumerate() {
        let m = s_partition.len();
        for grouping in set_partitions(m)? {
            let blocks = grouping.len();
            let mut falling = BigInt::one();
            for i in 0..blocks {
                falling *= BigInt::from(n - i);
            }
            let mut key: Vec<usize> = grouping
                .iter()
                .map(|block| block.iter().map(|&i| s_partition[i]).sum())
                .collect();
            key.sort_unstable_by(|a, b| b.cmp(a));
            matrix[index_of(&key)][col] += BigRational::from_integer(falling);
        }
    }

    // Target: the r-th cumulant expanded over the same raw-moment monomials.
    let mut target = vec![BigRational::zero(); p];
    for grouping in set_partitions(r)? {
        let blocks = grouping.len();
        let mut fac = BigInt::one();
        for i in 1..blocks {
            fac *= BigInt::from(i);
        }
        if blocks % 2 == 0 {
            fac = -fac;
        }
        let mut key: Vec<usize> = grouping.iter().map(|b| b.len()).collect();
        key.sort_unstable_by(|a, b| b.cmp(a));
        target[index_of(&key)] += BigRational::from_integer(fac);
    }

    let coeffs = solve_exact(matrix, target)?;
    Ok(partitions
        .into_iter()
        .zip(coeffs)
        .map(|(partition, c)| (partition, c.to_f64().unwrap()))
        .collect())
}

/// Exact Gaussian elimination; the k-statistic system is always solvable.
fn solve_exact(
    mut m: Vec<Vec<BigRational>>,
    mut b: Vec<BigRational>,
) -> Result<Vec<BigRational>, CumulantError> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| CumulantError::InvalidInput("singular k-statistic system".into()))?;
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..n {
            if row == col || m[row][col].is_zero() {
                continue;
            }
            let f = &m[row][col] / &m[col][col];
            for k in col..n {
                let sub = &f * &m[col][k];
                m[row][k] = &m[row][k] - sub;
            }
            let sub = &f * &b[col];
            b[row] = &b[row] - sub;
        }
    }
    Ok((0..n).map(|i| &b[i] / &m[i][i]).collect())
}
