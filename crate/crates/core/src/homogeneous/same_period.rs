//! Flows sharing one period but carrying different packet sizes. Sizes are
//! given in decreasing order `l_1 >= ... >= l_n`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::polynomial::no_crossing_probability;
use super::thresholds::OrderStatThresholds;
use super::{check_eps, dkw_expression};
use crate::curve::{Prob, TailBoundCurve};
use crate::error::{BoundError, Result};
use crate::rational::{self, Rational};

fn check_sizes(sizes: &[Rational], burst: &Rational) -> Result<Rational> {
    if sizes.len() < 2 {
        return Err(BoundError::InvalidArg(format!("need at least 2 flows, got {}", sizes.len())));
    }
    if sizes.iter().any(|s| !s.is_positive()) {
        return Err(BoundError::InvalidArg("packet sizes must be > 0".into()));
    }
    if sizes.windows(2).any(|w| w[1] > w[0]) {
        return Err(BoundError::InvalidArg("packet sizes must be sorted in decreasing order".into()));
    }
    if burst.is_negative() {
        return Err(BoundError::InvalidArg("burst must be >= 0".into()));
    }
    Ok(sizes.iter().fold(Rational::zero(), |a, s| a + s))
}

/// `min { k/(n-1) - sum_{j<=k+1} l_j / l_tot : 1 <= k <= n-1, sum_{j<=k+1} l_j > b }`.
///
/// The index set is empty only when `b >= l_tot`.
pub fn same_period_eta(sizes: &[Rational], burst: &Rational) -> Result<Rational> {
    let total = check_sizes(sizes, burst)?;
    let n1 = Rational::from_integer(BigInt::from(sizes.len() - 1));
    let mut prefix = sizes[0].clone();
    let mut eta: Option<Rational> = None;
    for (k, size) in sizes.iter().enumerate().skip(1) {
        prefix += size;
        if &prefix > burst {
            let cand = Rational::from_integer(BigInt::from(k)) / &n1 - &prefix / &total;
            if eta.as_ref().is_none_or(|e| cand < *e) {
                eta = Some(cand);
            }
        }
    }
    eta.ok_or_else(|| BoundError::EmptyIndexSet(rational::format_rational(burst)))
}

/// `min(1, n exp(-2 (n-1) (eta + b/l_tot)^2))`, zero once `b >= l_tot`.
pub fn same_period_dkw(sizes: &[Rational], burst: &Rational) -> Result<f64> {
    let total = check_sizes(sizes, burst)?;
    if burst >= &total {
        return Ok(0.0);
    }
    let eta = same_period_eta(sizes, burst)?;
    let x = eta + burst / &total;
    Ok(dkw_expression(sizes.len() as u64, rational::to_f64(&x)))
}

/// Smallest cumulative size `l_1 + ... + l_m` at which [`same_period_dkw`]
/// is at most `eps`. With equal sizes this is the closed-form homogeneous
/// burst, capped at `l_tot`.
pub fn same_period_burst(sizes: &[Rational], eps: f64) -> Result<Rational> {
    check_sizes(sizes, &Rational::zero())?;
    check_eps(eps)?;
    let prefix: Vec<Rational> = sizes
        .iter()
        .scan(Rational::zero(), |acc, s| {
            *acc += s;
            Some(acc.clone())
        })
        .collect();
    // The bound decreases in b and is zero at the last prefix (l_tot).
    let (mut lo, mut hi) = (0usize, prefix.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if same_period_dkw(sizes, &prefix[mid])? <= eps {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(prefix[lo].clone())
}

/// Exact bound `min(1, n (1 - p))` with thresholds
/// `u_k = [sum_{j<=k+1} l_j - b]^+ / l_tot`; zero once `b >= l_tot`.
pub fn same_period_exact(sizes: &[Rational], burst: &Rational) -> Result<Rational> {
    let total = check_sizes(sizes, burst)?;
    if burst >= &total {
        return Ok(Rational::zero());
    }
    let thresholds = OrderStatThresholds::same_period(sizes, burst);
    let p = no_crossing_probability(&thresholds);
    Ok((Rational::from_integer(BigInt::from(sizes.len())) * (Rational::one() - p)).clamp01())
}

/// [`same_period_dkw`] at each `b = k * quantum` for `k` in `grid`.
pub fn same_period_dkw_curve(sizes: &[Rational], quantum: &Rational, grid: &[u64]) -> Result<TailBoundCurve<f64>> {
    let eps = grid
        .par_iter()
        .map(|&k| same_period_dkw(sizes, &(quantum * Rational::from_integer(BigInt::from(k)))))
        .collect::<Result<_>>()?;
    TailBoundCurve::new(grid.to_vec(), eps)
}

/// [`same_period_exact`] at each `b = k * quantum` for `k` in `grid`.
pub fn same_period_exact_curve(
    sizes: &[Rational],
    quantum: &Rational,
    grid: &[u64],
) -> Result<TailBoundCurve<Rational>> {
    let eps = grid
        .par_iter()
        .map(|&k| same_period_exact(sizes, &(quantum * Rational::from_integer(BigInt::from(k)))))
        .collect::<Result<_>>()?;
    TailBoundCurve::new(grid.to_vec(), eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homogeneous::{dkw_tail_bound, exact_tail_bound, quasi_det_burst};
    use crate::rational::{int, ratio};

    fn ones(n: usize) -> Vec<Rational> {
        vec![int(1); n]
    }

    #[test]
    fn eta_unit_sizes() {
        // k = 1: 1/2 - 2/3, k = 2: 1 - 1
        assert_eq!(same_period_eta(&ones(3), &ratio(3, 2)).unwrap(), ratio(-1, 6));
        assert_eq!(same_period_eta(&ones(2), &int(0)).unwrap(), int(0));
    }

    #[test]
    fn eta_errors() {
        assert!(matches!(same_period_eta(&[int(1), int(2)], &int(0)), Err(BoundError::InvalidArg(_))));
        assert!(matches!(same_period_eta(&ones(3), &int(3)), Err(BoundError::EmptyIndexSet(_))));
        assert!(same_period_eta(&ones(1), &int(0)).is_err());
    }

    #[test]
    fn dkw_reduces_to_homogeneous_at_multiples() {
        for n in [2usize, 3, 7, 40] {
            for b in 0..=n as i64 {
                let a = same_period_dkw(&ones(n), &int(b)).unwrap();
                let h = dkw_tail_bound(n as u64, &int(1), &int(b)).unwrap();
                assert_eq!(a, h, "n={n} b={b}");
            }
        }
    }

    #[test]
    fn dkw_mixed_sizes() {
        let sizes = [int(2), int(1), int(1)];
        // b = 3: only k = 2 qualifies, eta = 2/2 - 4/4 = 0
        let v = same_period_dkw(&sizes, &int(3)).unwrap();
        assert!((v - 3.0 * (-4.0f64 * 0.5625).exp()).abs() < 1e-15);
        assert_eq!(same_period_dkw(&sizes, &int(4)).unwrap(), 0.0);
    }

    #[test]
    fn burst_reduces_to_closed_form() {
        for n in [2u64, 3, 10, 57, 300] {
            for eps in [0.9, 0.5, 1e-2, 1e-7] {
                let sp = same_period_burst(&ones(n as usize), eps).unwrap();
                let cf = quasi_det_burst(n, &int(1), eps).unwrap().min(int(n as i64));
                assert_eq!(sp, cf, "n={n} eps={eps}");
            }
        }
    }

    #[test]
    fn burst_round_trip_and_monotone() {
        let sizes: Vec<Rational> = [5, 5, 4, 3, 3, 3, 2, 1, 1, 1, 1, 1].iter().map(|&s| int(s)).collect();
        let mut prev = None;
        for eps in [1e-7, 1e-4, 1e-2, 0.3, 0.99] {
            let b = same_period_burst(&sizes, eps).unwrap();
            assert!(same_period_dkw(&sizes, &b).unwrap() <= eps);
            if let Some(p) = prev {
                assert!(b <= p);
            }
            prev = Some(b);
        }
    }

    #[test]
    fn exact_hand_value_two_flows() {
        assert_eq!(same_period_exact(&[int(2), int(1)], &ratio(5, 2)).unwrap(), ratio(1, 3));
        assert_eq!(same_period_exact(&[int(2), int(1)], &int(3)).unwrap(), int(0));
    }

    #[test]
    fn exact_reduces_to_homogeneous() {
        for n in [2usize, 3, 6, 15] {
            for b2 in 0..=(2 * n as i64) {
                let b = ratio(b2, 2);
                assert_eq!(same_period_exact(&ones(n), &b).unwrap(), exact_tail_bound(n as u64, &int(1), &b).unwrap());
            }
        }
    }
}
