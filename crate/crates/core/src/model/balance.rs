use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use super::graph::Weight;
use crate::error::{Error, Result};

/// Allowed imbalance as an exact fraction.
pub type Epsilon = Ratio<i64>;

/// `L_max = ceil((1 + eps) * total_weight / k)` in exact integer arithmetic.
pub fn compute_lmax(epsilon: Epsilon, k: usize, total_weight: Weight) -> Result<Weight> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if epsilon < Epsilon::zero() {
        return Err(Error::InvalidParameter(format!(
            "imbalance must be non-negative, got {epsilon}"
        )));
    }
    if total_weight < 0 {
        return Err(Error::InvalidParameter(format!(
            "total weight must be non-negative, got {total_weight}"
        )));
    }
    let p = *epsilon.numer() as i128;
    let q = *epsilon.denom() as i128;
    let num = (q + p) * total_weight as i128;
    let den = q * k as i128;
    let lmax = (num + den - 1) / den;
    Weight::try_from(lmax)
        .map_err(|_| Error::InvalidParameter("L_max overflows the weight type".into()))
}

/// Parses a non-negative decimal such as `0.03` or a fraction such as `3/100`
/// into an exact ratio.
pub fn parse_epsilon(text: &str) -> Result<Epsilon> {
    let bad = || Error::InvalidParameter(format!("cannot parse imbalance '{text}'"));
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d <= 0 || n < 0 {
            return Err(bad());
        }
        return Ok(Epsilon::new(n, d));
    }
    let (int_part, frac_part) = t.split_once('.').unwrap_or((t, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) || frac_part.len() > 15 {
        return Err(bad());
    }
    let int: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| bad())?
    };
    let scale = 10i64.pow(frac_part.len() as u32);
    let frac: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| bad())?
    };
    let numer = int
        .checked_mul(scale)
        .and_then(|x| x.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Epsilon::new(numer, scale))
}

/// Balance constraint of a k-way mapping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceSpec {
    pub epsilon: Epsilon,
    pub k: usize,
    pub total_weight: Weight,
    pub lmax: Weight,
}

impl BalanceSpec {
    pub fn new(epsilon: Epsilon, k: usize, total_weight: Weight) -> Result<Self> {
        Ok(Self {
            lmax: compute_lmax(epsilon, k, total_weight)?,
            epsilon,
            k,
            total_weight,
        })
    }

    /// A block is `lambda`-underloaded when it can still take `lambda` weight.
    #[inline]
    pub fn is_underloaded(&self, block_weight: Weight, lambda: Weight) -> bool {
        block_weight + lambda <= self.lmax
    }

    #[inline]
    pub fn is_overloaded(&self, block_weight: Weight) -> bool {
        block_weight > self.lmax
    }

    /// Total weight above `L_max` summed over blocks.
    pub fn overload(&self, block_weights: &[Weight]) -> Weight {
        block_weights.iter().map(|&w| (w - self.lmax).max(0)).sum()
    }

    pub fn epsilon_f64(&self) -> f64 {
        self.epsilon.to_f64().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lmax_examples() {
        assert_eq!(compute_lmax(Epsilon::zero(), 4, 8).unwrap(), 2);
        assert_eq!(compute_lmax(Epsilon::new(3, 100), 8, 100).unwrap(), 13);
        // 103 * 100 / 700 = 14.714..., rounded up
        assert_eq!(compute_lmax(Epsilon::new(3, 100), 7, 100).unwrap(), 15);
        assert_eq!(compute_lmax(Epsilon::zero(), 3, 0).unwrap(), 0);
    }

    #[test]
    fn lmax_rejects_zero_k() {
        assert!(matches!(
            compute_lmax(Epsilon::zero(), 0, 10),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_epsilon("0.03").unwrap(), Epsilon::new(3, 100));
        assert_eq!(parse_epsilon("0").unwrap(), Epsilon::zero());
        assert_eq!(parse_epsilon(".5").unwrap(), Epsilon::new(1, 2));
        assert_eq!(parse_epsilon("1.25").unwrap(), Epsilon::new(5, 4));
        assert_eq!(parse_epsilon("3/100").unwrap(), Epsilon::new(3, 100));
        assert!(parse_epsilon("-0.1").is_err());
        assert!(parse_epsilon("abc").is_err());
        assert!(parse_epsilon(".").is_err());
    }

    #[test]
    fn underloaded_uses_weights() {
        let b = BalanceSpec::new(Epsilon::zero(), 2, 10).unwrap();
        assert_eq!(b.lmax, 5);
        assert!(b.is_underloaded(3, 2));
        assert!(!b.is_underloaded(4, 2));
        assert_eq!(b.overload(&[7, 3]), 2);
    }
}
