//! Set partitions, integer partitions, and the moment/cumulant conversions
//! built on the partition sum with sign `(-1)^{p-1} (p-1)!`.

use super::CumulantError;
use num::rational::BigRational;
use num::{BigInt, FromPrimitive, One, ToPrimitive, Zero};

const MAX_PARTITION_ORDER: usize = 10;

/// All unordered partitions of `{0, .., k-1}`, deterministic order
/// (lexicographic restricted-growth strings). Blocks are sorted internally
/// and ordered by their smallest element.
pub fn set_partitions(k: usize) -> Result<Vec<Vec<Vec<usize>>>, CumulantError> {
    if k == 0 || k > MAX_PARTITION_ORDER {
        return Err(CumulantError::TooLarge {
            k,
            max: MAX_PARTITION_ORDER,
        });
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; k];
    loop {
        let blocks = rgs.iter().copied().max().unwrap() + 1;
        let mut partition: Vec<Vec<usize>> = vec![Vec::new(); blocks];
        for (i, &b) in rgs.iter().enumerate() {
            partition[b].push(i);
        }
        out.push(partition);
        // Next restricted-growth string in lexicographic order.
        let mut i = k;
        loop {
            if i <= 1 {
                return Ok(out);
            }
            i -= 1;
            let cap = rgs[..i].iter().copied().max().unwrap() + 1;
            if rgs[i] < cap {
                rgs[i] += 1;
                for v in rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
    }
}

/// All integer partitions of `k` into positive parts, each sorted descending,
/// enumerated in descending lexicographic order.
pub fn integer_partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn recurse(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            current.push(part);
            recurse(remaining - part, part, current, out);
            current.pop();
        }
    }
    recurse(k, k, &mut current, &mut out);
    out
}

/// Cumulants from raw moments (orders 1..=k), exact arithmetic:
/// `c_k = sum over partitions (-1)^{p-1} (p-1)! prod m_{|block|}`.
pub fn moments_to_cumulants_exact(
    moments: &[BigRational],
) -> Result<Vec<BigRational>, CumulantError> {
    let k = moments.len();
    if k > MAX_PARTITION_ORDER {
        return Err(CumulantError::TooLarge {
            k,
            max: MAX_PARTITION_ORDER,
        });
    }
    let mut out = Vec::with_capacity(k);
    for order in 1..=k {
        let mut acc = BigRational::zero();
        for partition in set_partitions(order)? {
            let p = partition.len();
            let mut term = sign_factorial(p);
            for block in &partition {
                term *= &moments[block.len() - 1];
            }
            acc += term;
        }
        out.push(acc);
    }
    Ok(out)
}

/// Raw moments from cumulants (orders 1..=k), exact arithmetic:
/// `m_k = sum over partitions prod c_{|block|}`.
pub fn cumulants_to_moments_exact(
    cumulants: &[BigRational],
) -> Result<Vec<BigRational>, CumulantError> {
    let k = cumulants.len();
    if k > MAX_PARTITION_ORDER {
        return Err(CumulantError::TooLarge {
            k,
            max: MAX_PARTITION_ORDER,
        });
    }
    let mut out = Vec::with_capacity(k);
    for order in 1..=k {
        let mut acc = BigRational::zero();
        for partition in set_partitions(order)? {
            let mut term = BigRational::one();
            for block in &partition {
                term *= &cumulants[block.len() - 1];
            }
            acc += term;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `(-1)^{p-1} (p-1)!` as a rational.
fn sign_factorial(p: usize) -> BigRational {
    let mut f = BigInt::one();
    for i in 1..p {
        f *= BigInt::from_usize(i).unwrap();
    }
    if p % 2 == 0 {
        f = -f;
    }
    BigRational::from_integer(f)
}

pub fn moments_to_cumulants(moments: &[f64]) -> Result<Vec<f64>, CumulantError> {
    let exact: Vec<BigRational> = moments
        .iter()
        .map(|&m| BigRational::from_f64(m).ok_or(CumulantError::InvalidInput("non-finite moment".into())))
        .collect::<Result<_, _>>()?;
    Ok(moments_to_cumulants_exact(&exact)?
        .iter()
        .map(|c| c.to_f64().unwrap())
        .collect())
}

pub fn cumulants_to_moments(cumulants: &[f64]) -> Result<Vec<f64>, CumulantError> {
    let exact: Vec<BigRational> = cumulants
        .iter()
        .map(|&c| BigRational::from_f64(c).ok_or(CumulantError::InvalidInput("non-finite cumulant".into())))
        .collect::<Result<_, _>>()?;
    Ok(cumulants_to_moments_exact(&exact)?
        .iter()
        .map(|m| m.to_f64().unwrap())
        .collect())
}

/// Exhaustive maximum of `k_1 * ... * k_l` over all ways to write
/// `k = k_1 + ... + k_l` with positive parts, with the witness partition and
/// the bound `4 * 3^k` it is checked against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionMax {
    pub max_product: u128,
    pub witness: Vec<usize>,
    pub bound: u128,
}

pub fn lemma56_max_product(k: usize) -> Result<CompositionMax, CumulantError> {
    if k == 0 || k > 22 {
        return Err(CumulantError::TooLarge { k, max: 22 });
    }
    let mut best: u128 = 0;
    let mut witness = Vec::new();
    for partition in integer_partitions(k) {
        let prod: u128 = partition.iter().map(|&p| p as u128).product();
        if prod > best {
            best = prod;
            witness = partition;
        }
    }
    Ok(CompositionMax {
        max_product: best,
        witness,
        bound: 4 * 3u128.pow(k as u32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let bell = [1usize, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];
        for (k, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(k + 1).unwrap().len(), b, "k={}", k + 1);
        }
        assert!(set_partitions(11).is_err());
    }

    #[test]
    fn set_partitions_are_partitions_and_deterministic() {
        let parts = set_partitions(5).unwrap();
        for p in &parts {
            let mut all: Vec<usize> = p.iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, vec![0, 1, 2, 3, 4]);
        }
        assert_eq!(parts, set_partitions(5).unwrap());
    }

    #[test]
    fn low_order_cumulant_formulas() {
        // c2 = m2 - m1^2, c3 = m3 - 3 m1 m2 + 2 m1^3.
        let m = [1.5, 4.0, 12.0];
        let c = moments_to_cumulants(&m).unwrap();
        assert!((c[0] - 1.5).abs() < 1e-12);
        assert!((c[1] - (4.0 - 1.5 * 1.5)).abs() < 1e-12);
        assert!((c[2] - (12.0 - 3.0 * 1.5 * 4.0 + 2.0 * 1.5f64.powi(3))).abs() < 1e-12);
    }

    #[test]
    fn roundtrip_exact_to_order_8() {
        // Rational inputs: the double conversion must be the identity, exactly.
        let m: Vec<BigRational> = (1..=8)
            .map(|i| BigRational::new(BigInt::from(3 * i + 1), BigInt::from(7)))
            .collect();
        let c = moments_to_cumulants_exact(&m).unwrap();
        let back = cumulants_to_moments_exact(&c).unwrap();
        assert_eq!(m, back);
        let c2 = moments_to_cumulants_exact(&back).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn poisson_cumulants_all_equal_mu() {
        // Raw Poisson moments by the recursion m_{k+1} = mu * sum C(k,i) m_i.
        let mu = BigRational::new(BigInt::from(7), BigInt::from(2));
        let mut m: Vec<BigRational> = vec![mu.clone()];
        for k in 1..6usize {
            let mut acc = BigRational::one(); // i = 0 term: m_0 = 1
            let mut binom = BigInt::one();
            for i in 1..=k {
                binom = binom * BigInt::from(k - i + 1) / BigInt::from(i);
                acc += BigRational::from_integer(binom.clone()) * &m[i - 1];
            }
            m.push(mu.clone() * acc);
        }
        let c = moments_to_cumulants_exact(&m).unwrap();
        for (k, ck) in c.iter().enumerate() {
            assert_eq!(*ck, mu, "order {}", k + 1);
        }
    }

    #[test]
    fn integer_partition_counts() {
        // p(k) for k = 1..10.
        let p = [1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (k, &count) in p.iter().enumerate() {
            assert_eq!(integer_partitions(k + 1).len(), count);
        }
    }

    #[test]
    fn lemma56_examples_and_bound() {
        let r = lemma56_max_product(3).unwrap();
        assert_eq!(r.max_product, 3);
        assert_eq!(r.witness, vec![3]);
        let r = lemma56_max_product(6).unwrap();
        assert_eq!(r.max_product, 9);
        assert_eq!(r.witness, vec![3, 3]);
        let r = lemma56_max_product(1).unwrap();
        assert_eq!(r.max_product, 1);
        for k in 1..=22 {
            let r = lemma56_max_product(k).unwrap();
            assert!(r.max_product <= r.bound, "k={k}");
        }
        assert!(lemma56_max_product(23).is_err());
    }
}
