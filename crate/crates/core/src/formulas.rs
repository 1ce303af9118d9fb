//! Exact counting formulas and log-space bound evaluators.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("k must be at least {min} (got {k})")]
    KTooSmall { k: usize, min: usize },
    #[error("n must be at least {min} (got {n})")]
    NTooSmall { n: usize, min: usize },
    #[error("need k > r (got k={k}, r={r})")]
    KNotAboveR { k: usize, r: usize },
    #[error("{t} does not divide {n}")]
    NotDivisible { n: usize, t: usize },
}

/// Natural logarithm of a bound expression.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogBound(pub f64);

impl LogBound {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Slack used when comparing an exact count against a log-space bound.
pub const LOG_SLACK: f64 = 1e-9;

/// Natural logarithm of a big integer, accurate to a few ulps.
///
/// Keeps the top 64 bits as the mantissa and accounts for the rest as a
/// power of two. Returns `-inf` for zero.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Bell numbers `B(0..=n_max)` from the Bell triangle.
pub fn bell_sequence(n_max: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    let mut row = vec![BigUint::one()];
    for _ in 0..n_max {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("nonempty").clone());
        for v in &row {
            let s = next.last().expect("nonempty") + v;
            next.push(s);
        }
        out.push(next[0].clone());
        row = next;
    }
    out
}

pub fn bell(n: usize) -> BigUint {
    bell_sequence(n).pop().expect("nonempty")
}

/// Stirling numbers of the second kind, `S(n, j)` for `j = 0..=n`.
pub fn stirling2_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); row.len() + 1];
        for (j, v) in row.iter().enumerate() {
            // S(m+1, j) += j * S(m, j); S(m+1, j+1) += S(m, j)
            next[j] += v * j;
            next[j + 1] += v;
        }
        row = next;
    }
    row
}

pub fn stirling2(n: usize, j: usize) -> BigUint {
    if j > n {
        return BigUint::zero();
    }
    stirling2_row(n).swap_remove(j)
}

pub fn binomial(n: usize, i: usize) -> BigUint {
    if i > n {
        return BigUint::zero();
    }
    let i = i.min(n - i);
    let mut acc = BigUint::one();
    for t in 0..i {
        acc = acc * (n - t) / (t + 1);
    }
    acc
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, t| acc * t)
}

/// Counts of partitions with all blocks of size at most `k - 1`, i.e. of
/// partitions avoiding the one-block pattern of size `k`, via
/// `f(m+1) = sum_{i=0}^{k-2} C(m, i) f(m-i)` with `f(0) = 1`.
///
/// Returns `f(0..=n_max)`.
pub fn block_recursion_from_zero(k: usize, n_max: usize) -> Result<Vec<BigUint>, FormulaError> {
    if k < 2 {
        return Err(FormulaError::KTooSmall { k, min: 2 });
    }
    let mut f = Vec::with_capacity(n_max + 1);
    f.push(BigUint::one());
    for m in 0..n_max {
        let mut next = BigUint::zero();
        for i in 0..=(k - 2).min(m) {
            next += binomial(m, i) * &f[m - i];
        }
        f.push(next);
    }
    Ok(f)
}

/// `f(1..=n_max)` for the one-block pattern of size `k`.
pub fn block_recursion(k: usize, n_max: usize) -> Result<Vec<BigUint>, FormulaError> {
    if n_max < 1 {
        return Err(FormulaError::NTooSmall { n: n_max, min: 1 });
    }
    let mut f = block_recursion_from_zero(k, n_max)?;
    f.remove(0);
    Ok(f)
}

/// Partitions of `[n]` avoiding `1/2/.../k`: those with at most `k - 1`
/// blocks.
pub fn singleton_count(k: usize, n: usize) -> Result<BigUint, FormulaError> {
    if k < 2 {
        return Err(FormulaError::KTooSmall { k, min: 2 });
    }
    Ok(stirling2_row(n).into_iter().take(k).sum())
}

/// `ln(k^n n^{n(1 - 1/(k-1))})`. For `k = 2` the exponent vanishes and the
/// bound is `n ln 2`.
pub fn log_upper_bound_block(k: usize, n: usize) -> Result<LogBound, FormulaError> {
    if k < 2 {
        return Err(FormulaError::KTooSmall { k, min: 2 });
    }
    if n < 1 {
        return Err(FormulaError::NTooSmall { n, min: 1 });
    }
    let (k, n) = (k as f64, n as f64);
    if k == 2.0 {
        return Ok(LogBound(n * 2f64.ln()));
    }
    Ok(LogBound(n * k.ln() + n * (1.0 - 1.0 / (k - 1.0)) * n.ln()))
}

/// `ln(((k+1)/2)^{2n} n^{n(1 - 1/(k-r))})`, the bound for layered patterns of
/// size `k` with `r` blocks.
pub fn log_upper_bound_layered(k: usize, r: usize, n: usize) -> Result<LogBound, FormulaError> {
    if k <= r || r < 1 {
        return Err(FormulaError::KNotAboveR { k, r });
    }
    if n < 1 {
        return Err(FormulaError::NTooSmall { n, min: 1 });
    }
    let t = (k - r) as f64;
    let (k, n) = (k as f64, n as f64);
    Ok(LogBound(2.0 * n * ((k + 1.0) / 2.0).ln() + n * (1.0 - 1.0 / t) * n.ln()))
}

/// `ln((n/t)!^{t-1})`, the log of the number of uniform partitions with `t`
/// sections.
pub fn log_lower_bound_uniform(t: usize, n: usize) -> Result<LogBound, FormulaError> {
    if t < 1 {
        return Err(FormulaError::KTooSmall { k: t, min: 1 });
    }
    if !n.is_multiple_of(t) {
        return Err(FormulaError::NotDivisible { n, t });
    }
    Ok(LogBound((t - 1) as f64 * ln_big(&factorial(n / t))))
}

/// Exact count `(n/t)!^{t-1}` of uniform partitions.
pub fn uniform_count(t: usize, n: usize) -> Result<BigUint, FormulaError> {
    if t < 1 {
        return Err(FormulaError::KTooSmall { k: t, min: 1 });
    }
    if !n.is_multiple_of(t) {
        return Err(FormulaError::NotDivisible { n, t });
    }
    Ok(factorial(n / t).pow((t - 1) as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::all_partitions;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn bell_examples() {
        assert_eq!(bell(0), big(1));
        assert_eq!(bell(5), big(52));
        assert_eq!(bell(7), big(877));
        for n in 0..=7 {
            assert_eq!(bell(n), big(all_partitions(n).count() as u64));
        }
    }

    #[test]
    fn stirling_examples() {
        for n in 1..10 {
            assert_eq!(stirling2(n, 1), big(1));
        }
        assert_eq!(stirling2(4, 2), big(7));
        assert_eq!(
            stirling2(4, 2),
            big(all_partitions(4).filter(|p| p.num_blocks() == 2).count() as u64)
        );
        assert_eq!(stirling2(3, 3), big(1));
        assert_eq!(stirling2(3, 5), big(0));
    }

    #[test]
    fn bell_is_row_sum_of_stirling() {
        let bells = bell_sequence(25);
        for (n, b) in bells.iter().enumerate() {
            let sum: BigUint = stirling2_row(n).into_iter().sum();
            assert_eq!(&sum, b, "n={n}");
        }
    }

    #[test]
    fn block_recursion_examples() {
        let f: Vec<u64> =
            block_recursion(3, 10).unwrap().iter().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(f, vec![1, 2, 4, 10, 26, 76, 232, 764, 2620, 9496]);
        assert!(block_recursion(2, 12).unwrap().iter().all(|v| v == &big(1)));
        assert_eq!(block_recursion(1, 3), Err(FormulaError::KTooSmall { k: 1, min: 2 }));
    }

    #[test]
    fn singleton_examples() {
        for n in 1..8 {
            assert_eq!(singleton_count(2, n).unwrap(), big(1));
        }
        assert_eq!(singleton_count(3, 4).unwrap(), big(8));
        assert_eq!(singleton_count(4, 3).unwrap(), bell(3));
        assert_eq!(singleton_count(3, 0).unwrap(), big(1));
    }

    #[test]
    fn bound_examples() {
        let l3 = 3f64.ln();
        let l10 = 10f64.ln();
        assert!((log_upper_bound_block(3, 1).unwrap().0 - l3).abs() < 1e-12);
        let b = log_upper_bound_block(3, 10).unwrap().0;
        assert!((b - (10.0 * l3 + 5.0 * l10)).abs() < 1e-12);
        assert!((b - 22.4989).abs() < 1e-3);
        assert!(b > 9496f64.ln());
        let b = log_upper_bound_block(5, 8).unwrap().0;
        assert!((b - (8.0 * 5f64.ln() + 6.0 * 8f64.ln())).abs() < 1e-12);
        assert!((log_upper_bound_block(2, 7).unwrap().0 - 7.0 * 2f64.ln()).abs() < 1e-12);

        let b = log_upper_bound_layered(3, 1, 10).unwrap().0;
        assert!((b - (20.0 * 2f64.ln() + 5.0 * l10)).abs() < 1e-12);
        let b = log_upper_bound_layered(4, 2, 1).unwrap().0;
        assert!((b - 2.0 * 2.5f64.ln()).abs() < 1e-12);
        let b = log_upper_bound_layered(5, 2, 9).unwrap().0;
        assert!((b - (18.0 * l3 + 6.0 * 9f64.ln())).abs() < 1e-12);
        assert_eq!(log_upper_bound_layered(3, 3, 4), Err(FormulaError::KNotAboveR { k: 3, r: 3 }));

        assert!((log_lower_bound_uniform(2, 4).unwrap().0 - 2f64.ln()).abs() < 1e-12);
        assert_eq!(log_lower_bound_uniform(2, 2).unwrap().0, 0.0);
        assert!((log_lower_bound_uniform(3, 6).unwrap().0 - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(log_lower_bound_uniform(3, 7), Err(FormulaError::NotDivisible { n: 7, t: 3 }));
    }

    #[test]
    fn ln_big_matches_f64_and_scales() {
        assert_eq!(ln_big(&big(1)), 0.0);
        assert!((ln_big(&big(9496)) - 9496f64.ln()).abs() < 1e-15);
        // 100! has ln = lgamma(101) = 363.73937555556347
        let l = ln_big(&factorial(100));
        assert!((l - 363.739_375_555_563_47).abs() / l < 1e-12);
    }
}
