use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{BoundError, Result};
use crate::rational::{positive_part, Rational};

/// Crossing thresholds `u_1 <= ... <= u_{n-1}` for the order statistics of
/// `n - 1` iid uniforms. The bad event is `U_(k) < u_k` for some `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderStatThresholds {
    u: Vec<Rational>,
}

impl OrderStatThresholds {
    pub fn new(u: Vec<Rational>) -> Result<Self> {
        if u.iter().any(|x| x.is_negative() || *x >= Rational::from_integer(1.into())) {
            return Err(BoundError::InvalidArg("thresholds must lie in [0, 1)".into()));
        }
        if u.windows(2).any(|w| w[1] < w[0]) {
            return Err(BoundError::InvalidArg("thresholds must be wide-sense increasing".into()));
        }
        Ok(Self { u })
    }

    /// `u_k = [(k + 1) - b/l]^+ / n` for `n` flows of packet size `l`.
    pub fn homogeneous(n: u64, packet_size: &Rational, burst: &Rational) -> Self {
        let n_r = Rational::from_integer(BigInt::from(n));
        let scaled = burst / packet_size;
        let u = (1..n)
            .map(|k| {
                let raw = Rational::from_integer(BigInt::from(k + 1)) - &scaled;
                positive_part(raw) / &n_r
            })
            .collect();
        Self { u }
    }

    /// `u_k = [sum_{j<=k+1} l_j - b]^+ / l_tot` for sizes sorted in
    /// decreasing order.
    pub fn same_period(sizes: &[Rational], burst: &Rational) -> Self {
        let total: Rational = sizes.iter().fold(Rational::zero(), |a, s| a + s);
        let mut prefix = sizes.first().cloned().unwrap_or_else(Rational::zero);
        let mut u = Vec::with_capacity(sizes.len().saturating_sub(1));
        for s in sizes.iter().skip(1) {
            prefix += s;
            u.push(positive_part(&prefix - burst) / &total);
        }
        Self { u }
    }

    /// Number of flows `n`; there are `n - 1` thresholds.
    pub fn flows(&self) -> usize {
        self.u.len() + 1
    }

    pub fn values(&self) -> &[Rational] {
        &self.u
    }

    /// `u_k` for `k` in `1..=n-1`.
    pub fn get(&self, k: usize) -> &Rational {
        &self.u[k - 1]
    }

    /// Length of the all-zero prefix: the largest `m` with `u_1 = ... = u_m = 0`.
    pub fn zero_prefix(&self) -> usize {
        self.u.iter().take_while(|x| x.is_zero()).count()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.u.iter().map(crate::rational::to_f64).collect()
    }
}
