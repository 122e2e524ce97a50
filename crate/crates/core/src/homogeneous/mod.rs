//! Bounds for a single group of flows sharing one period.
//!
//! With `n` flows of packet size `l`, `P(B > b) <= n * P(E)` where `E` is the
//! event that some order statistic of `n - 1` iid uniforms falls below its
//! threshold. [`dkw_tail_bound`] bounds `P(E)` in closed form,
//! [`exact_tail_bound`] computes it exactly. The `same_period_*` functions
//! handle flows with a common period but different packet sizes.

mod polynomial;
mod same_period;
mod thresholds;

pub mod oracle;

pub use polynomial::{integrate_scaled, integrate_stages, no_crossing_probability, PolynomialCoeffs, ScaledStage};
pub use same_period::{
    same_period_burst, same_period_dkw, same_period_dkw_curve, same_period_eta, same_period_exact,
    same_period_exact_curve,
};
pub use thresholds::OrderStatThresholds;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::curve::Prob;
use crate::error::{BoundError, Result};
use crate::rational::{self, Rational};

pub(crate) fn check_group(n: u64, packet_size: &Rational, burst: &Rational) -> Result<()> {
    if n < 2 {
        return Err(BoundError::InvalidArg(format!("need at least 2 flows, got {n}")));
    }
    if !packet_size.is_positive() {
        return Err(BoundError::InvalidArg("packet size must be > 0".into()));
    }
    if burst.is_negative() {
        return Err(BoundError::InvalidArg("burst must be >= 0".into()));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(BoundError::InvalidArg(format!("violation probability must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// `floor(b / l)` in exact arithmetic, saturated to `u64`.
fn packets_in(packet_size: &Rational, burst: &Rational) -> u64 {
    rational::floor_int(&(burst / packet_size)).to_u64().unwrap_or(u64::MAX)
}

/// `n * exp(-2 (n-1) x^2)` clamped to one; one when `x <= 0`, where the
/// inequality behind it does not apply.
pub(crate) fn dkw_expression(n: u64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let n_f = n as f64;
    (n_f * (-2.0 * (n_f - 1.0) * x * x).exp()).min(1.0)
}

/// Closed-form tail bound for `n` homogeneous flows:
/// `min(1, n exp(-2 (n-1) (floor(b/l)/(n-1) - 1/n)^2))`, and zero once
/// `b >= n l`.
pub fn dkw_tail_bound(n: u64, packet_size: &Rational, burst: &Rational) -> Result<f64> {
    check_group(n, packet_size, burst)?;
    let k = packets_in(packet_size, burst);
    if k >= n {
        return Ok(0.0);
    }
    // Exact exponent argument, so equal inputs from other routes round identically.
    let x = Rational::new(BigInt::from(k), BigInt::from(n - 1)) - Rational::new(BigInt::from(1), BigInt::from(n));
    Ok(dkw_expression(n, rational::to_f64(&x)))
}

/// Smallest `floor(b/l)` at which [`dkw_tail_bound`] can drop below one:
/// `1 - 1/n + sqrt((n-1) ln 2 / 2)`.
pub fn dkw_nontrivial_threshold(n: u64) -> f64 {
    let n_f = n as f64;
    1.0 - 1.0 / n_f + ((n_f - 1.0) * std::f64::consts::LN_2 / 2.0).sqrt()
}

/// True when the closed-form bound at `b` is only at most one because of the clamp.
pub fn dkw_is_trivial(n: u64, packet_size: &Rational, burst: &Rational) -> bool {
    let k = packets_in(packet_size, burst);
    k < n && (k as f64) < dkw_nontrivial_threshold(n)
}

/// Quasi-deterministic burst `l * ceil(1 - 1/n + sqrt((n-1)(ln n - ln eps)/2))`
/// for which [`dkw_tail_bound`] is at most `eps`.
pub fn quasi_det_burst(n: u64, packet_size: &Rational, eps: f64) -> Result<Rational> {
    check_group(n, packet_size, &Rational::zero())?;
    check_eps(eps)?;
    let n_f = n as f64;
    let packets = (1.0 - 1.0 / n_f + ((n_f - 1.0) * (n_f.ln() - eps.ln()) / 2.0).sqrt()).ceil();
    let mut packets = packets as u64;
    // Rounding in exp/sqrt can disagree by an ulp at the boundary.
    while dkw_tail_bound(n, packet_size, &(packet_size * Rational::from_integer(BigInt::from(packets))))? > eps {
        packets += 1;
    }
    Ok(packet_size * Rational::from_integer(BigInt::from(packets)))
}

/// Exact tail bound `min(1, n (1 - p))` where `p` is the no-crossing
/// probability of the homogeneous thresholds; zero once `b >= n l`.
pub fn exact_tail_bound(n: u64, packet_size: &Rational, burst: &Rational) -> Result<Rational> {
    check_group(n, packet_size, burst)?;
    if packets_in(packet_size, burst) >= n {
        return Ok(Rational::zero());
    }
    let thresholds = OrderStatThresholds::homogeneous(n, packet_size, burst);
    let p = no_crossing_probability(&thresholds);
    Ok((Rational::from_integer(BigInt::from(n)) * (Rational::from_integer(1.into()) - p)).clamp01())
}

/// Smallest multiple of `l` whose [`exact_tail_bound`] is at most `eps`.
pub fn exact_quasi_det_burst(n: u64, packet_size: &Rational, eps: f64) -> Result<Rational> {
    check_group(n, packet_size, &Rational::zero())?;
    check_eps(eps)?;
    let eps_r = rational::from_f64(eps).expect("finite");
    let at = |k: u64| packet_size * Rational::from_integer(BigInt::from(k));
    let ok = |k: u64| exact_tail_bound(n, packet_size, &at(k)).map(|e| e <= eps_r);
    // The exact bound sits below the dkw one and is decreasing in b, so the
    // closed-form burst is an upper end; gallop down from it.
    let mut hi = packets_in(packet_size, &quasi_det_burst(n, packet_size, eps)?).min(n);
    if !ok(hi)? {
        hi = n;
    }
    let mut lo = 0;
    let mut step = 1;
    while step <= hi {
        if ok(hi - step)? {
            hi -= step;
            step *= 2;
        } else {
            lo = hi - step + 1;
            break;
        }
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(at(lo))
}

/// Tail of a lone periodic flow, whose burstiness is exactly its packet size.
pub fn single_flow_tail(packet_size: &Rational, burst: &Rational) -> Rational {
    if burst >= packet_size {
        Rational::zero()
    } else {
        Rational::from_integer(1.into())
    }
}
