//! Independent estimates of the order-statistic crossing event
//! `E = { U_(k) < u_k for some k }`, used to check the exact engine.
//!
//! Two routes, neither touching the rational recurrence: Monte Carlo over
//! sorted uniforms, and nested Gauss-Legendre quadrature of the order
//! statistic density (exact for these polynomial integrands up to rounding).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::thresholds::OrderStatThresholds;
use crate::error::{BoundError, Result};

pub const MIN_SAMPLES: usize = 10_000;

/// Largest flow count accepted by [`nested_quadrature_event_probability`];
/// the cost is `8^(n-1)` integrand evaluations.
pub const MAX_QUADRATURE_FLOWS: usize = 8;

const GL_NODES: [f64; 4] =
    [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_WEIGHTS: [f64; 4] =
    [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventEstimate {
    pub probability: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of `P(E)` from `samples` sorted draws of `n - 1`
/// uniforms.
pub fn event_probability_oracle(thresholds: &OrderStatThresholds, samples: usize, seed: u64) -> Result<EventEstimate> {
    if samples < MIN_SAMPLES {
        return Err(BoundError::InvalidArg(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let u = thresholds.to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = vec![0.0f64; u.len()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for d in draws.iter_mut() {
            *d = rng.gen::<f64>();
        }
        draws.sort_unstable_by(f64::total_cmp);
        if draws.iter().zip(&u).any(|(x, t)| x < t) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(EventEstimate { probability: p, std_error: (p * (1.0 - p) / samples as f64).sqrt(), samples })
}

fn gauss_legendre(lo: f64, hi: f64, f: &mut impl FnMut(f64) -> f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        acc += w * (f(mid - half * x) + f(mid + half * x));
    }
    acc * half
}

/// `m * int_{u_m}^{y} inner(x) dx`, recursively down to the constant one.
fn nested(u: &[f64], m: usize, y: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    m as f64 * gauss_legendre(u[m - 1], y, &mut |x| nested(u, m - 1, x))
}

/// `P(E) = 1 - (n-1)! * int ... int 1` by nested quadrature.
pub fn nested_quadrature_event_probability(thresholds: &OrderStatThresholds) -> Result<f64> {
    let n = thresholds.flows();
    if n > MAX_QUADRATURE_FLOWS {
        return Err(BoundError::InvalidArg(format!("quadrature oracle supports n <= {MAX_QUADRATURE_FLOWS}, got {n}")));
    }
    let u = thresholds.to_f64();
    Ok(1.0 - nested(&u, n - 1, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio, Rational};

    #[test]
    fn all_zero_thresholds_never_cross() {
        let t = OrderStatThresholds::new(vec![int(0); 4]).unwrap();
        assert_eq!(event_probability_oracle(&t, 10_000, 1).unwrap().probability, 0.0);
        assert!(nested_quadrature_event_probability(&t).unwrap().abs() < 1e-14);
    }

    #[test]
    fn top_threshold_near_one_always_crosses() {
        // u_{n-1} -> 1 forces P(U_(n-1) < u_{n-1}) -> 1.
        let mut u = vec![Rational::from_integer(0.into()); 3];
        u.push(Rational::new((1u64 << 52).into(), ((1u64 << 52) + 1).into()));
        let t = OrderStatThresholds::new(u).unwrap();
        assert!(event_probability_oracle(&t, 10_000, 2).unwrap().probability > 0.999);
    }

    #[test]
    fn three_flow_hand_value() {
        let t = OrderStatThresholds::homogeneous(3, &int(1), &int(2));
        assert!((nested_quadrature_event_probability(&t).unwrap() - 1.0 / 9.0).abs() < 1e-14);
        let est = event_probability_oracle(&t, 100_000, 7).unwrap();
        assert!((est.probability - 1.0 / 9.0).abs() <= 3.0 * est.std_error);
    }

    #[test]
    fn quadrature_two_flows() {
        let t = OrderStatThresholds::new(vec![ratio(1, 4)]).unwrap();
        assert!((nested_quadrature_event_probability(&t).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn preconditions() {
        let t = OrderStatThresholds::new(vec![int(0)]).unwrap();
        assert!(event_probability_oracle(&t, 10, 0).is_err());
        let big = OrderStatThresholds::new(vec![int(0); 9]).unwrap();
        assert!(nested_quadrature_event_probability(&big).is_err());
    }
}
