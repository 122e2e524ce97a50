//! Aggregate bounds for several mutually independent homogeneous groups.
//!
//! Each group gets its own tail-bound curve `eps_i` on the scenario's burst
//! grid. [`convolve_groups`] combines them through the CDF lower bounds
//! `Psi_i = 1 - eps_i` as `1 - (psi_1 * ... * psi_{g-1} * Psi_g)(b)`;
//! [`union_bound_combine`] takes the best split of `b` across groups under the
//! union bound instead (valid without independence, never tighter).

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::curve::{monotone_envelope, CdfLowerBound, Prob, TailBoundCurve};
use crate::error::{BoundError, Result};
use crate::homogeneous::{dkw_tail_bound, exact_tail_bound, single_flow_tail};
use crate::rational::{self, Rational};
use crate::scenario::{FlowGroupSpec, Scenario};

/// Per-group bound used on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupMethod {
    /// Closed-form DKW bound.
    Dkw,
    /// Exact order-statistic bound (converted to `f64` by [`build_group_bound`]).
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combiner {
    Convolution,
    Union,
}

/// Tail curve of one group on the contiguous grid `0..=ceil(n l / quantum)`,
/// with its CDF lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupBound<P = f64> {
    pub group: FlowGroupSpec,
    pub quantum: Rational,
    pub curve: TailBoundCurve<P>,
    pub cdf: CdfLowerBound<P>,
}

impl<P: Prob> GroupBound<P> {
    /// Wraps an arbitrary curve; it is clamped and made monotone first.
    pub fn from_curve(group: FlowGroupSpec, quantum: Rational, curve: &TailBoundCurve<P>) -> Result<Self> {
        let curve = monotone_envelope(curve);
        let cdf = CdfLowerBound::from_tail(&curve)?;
        Ok(Self { group, quantum, curve, cdf })
    }

    /// Last grid index; the curve is zero from here on.
    pub fn support_end(&self) -> usize {
        self.curve.len() - 1
    }
}

fn grid_end(group: &FlowGroupSpec, quantum: &Rational) -> Result<u64> {
    rational::ceil_int(&(group.burst() / quantum))
        .to_u64()
        .ok_or_else(|| BoundError::InvalidArg("burst grid does not fit in u64".into()))
}

fn check_group_args(group: &FlowGroupSpec, quantum: &Rational) -> Result<()> {
    use num_traits::Signed;
    if group.count == 0 || !group.packet_size.is_positive() || !group.period.is_positive() {
        return Err(BoundError::InvalidArg("group fields must be positive".into()));
    }
    if !quantum.is_positive() {
        return Err(BoundError::InvalidArg("quantum must be > 0".into()));
    }
    Ok(())
}

fn burst_at(quantum: &Rational, k: u64) -> Rational {
    quantum * Rational::from_integer(BigInt::from(k))
}

/// Raw single-group bound at each `b = k * quantum` for `k` in `grid`, no
/// envelope.
pub fn evaluate_group(
    group: &FlowGroupSpec,
    quantum: &Rational,
    method: GroupMethod,
    grid: &[u64],
) -> Result<TailBoundCurve<f64>> {
    check_group_args(group, quantum)?;
    let n = group.count;
    let l = &group.packet_size;
    let eps: Vec<f64> = grid
        .par_iter()
        .map(|&k| {
            let b = burst_at(quantum, k);
            if n == 1 {
                return Ok(rational::to_f64(&single_flow_tail(l, &b)));
            }
            match method {
                GroupMethod::Dkw => dkw_tail_bound(n, l, &b),
                GroupMethod::Exact => exact_tail_bound(n, l, &b).map(|v| rational::to_f64(&v)),
            }
        })
        .collect::<Result<_>>()?;
    TailBoundCurve::new(grid.to_vec(), eps)
}

/// Exact-rational version of [`evaluate_group`].
pub fn evaluate_group_exact(
    group: &FlowGroupSpec,
    quantum: &Rational,
    grid: &[u64],
) -> Result<TailBoundCurve<Rational>> {
    check_group_args(group, quantum)?;
    let n = group.count;
    let l = &group.packet_size;
    let eps: Vec<Rational> = grid
        .par_iter()
        .map(|&k| {
            let b = burst_at(quantum, k);
            if n == 1 {
                Ok(single_flow_tail(l, &b))
            } else {
                exact_tail_bound(n, l, &b)
            }
        })
        .collect::<Result<_>>()?;
    TailBoundCurve::new(grid.to_vec(), eps)
}

/// Evaluates the chosen single-group bound at every grid point
/// `b = k * quantum` up to `ceil(n l / quantum)` and applies the monotone
/// envelope.
pub fn build_group_bound(group: &FlowGroupSpec, quantum: &Rational, method: GroupMethod) -> Result<GroupBound<f64>> {
    check_group_args(group, quantum)?;
    let grid: Vec<u64> = (0..=grid_end(group, quantum)?).collect();
    let curve = evaluate_group(group, quantum, method, &grid)?;
    GroupBound::from_curve(group.clone(), quantum.clone(), &curve)
}

/// Exact-rational version of [`build_group_bound`] with [`GroupMethod::Exact`].
pub fn build_group_bound_exact(group: &FlowGroupSpec, quantum: &Rational) -> Result<GroupBound<Rational>> {
    check_group_args(group, quantum)?;
    let grid: Vec<u64> = (0..=grid_end(group, quantum)?).collect();
    let curve = evaluate_group_exact(group, quantum, &grid)?;
    GroupBound::from_curve(group.clone(), quantum.clone(), &curve)
}

fn check_quanta<P>(bounds: &[GroupBound<P>]) -> Result<()> {
    let first = bounds.first().ok_or_else(|| BoundError::InvalidArg("no group bounds to combine".into()))?;
    for b in &bounds[1..] {
        if b.quantum != first.quantum {
            return Err(BoundError::QuantumMismatch(
                rational::format_rational(&first.quantum),
                rational::format_rational(&b.quantum),
            ));
        }
    }
    Ok(())
}

/// Full discrete convolution of two finitely supported sequences.
pub fn discrete_convolution<P: Prob>(f: &[P], g: &[P]) -> Vec<P> {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![P::zero(); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.iter().enumerate() {
            out[i + j] = out[i + j].clone() + a.clone() * b.clone();
        }
    }
    out
}

fn held<P: Prob>(v: &[P], i: usize) -> P {
    v.get(i).cloned().unwrap_or_else(|| v[v.len() - 1].clone())
}

/// `eps(b) = 1 - (psi_1 * ... * psi_{g-1} * Psi_g)(b)` on the grid
/// `0..=sum_i support_end_i`, clamped and enveloped. A single group comes back
/// unchanged.
///
/// Evaluated in the tail domain: with `M` the running mass and `T` its tail,
/// `T_{M * psi}(b) = T(b) + sum_{j <= b} M(j) eps(b - j)`. This equals the
/// CDF form term by term but never subtracts from one, so deep tails keep
/// full relative precision.
pub fn convolve_groups<P: Prob>(bounds: &[GroupBound<P>]) -> Result<TailBoundCurve<P>> {
    check_quanta(bounds)?;
    if bounds.len() == 1 {
        return Ok(bounds[0].curve.clone());
    }
    let mut mass = bounds[0].cdf.psi_mass.clone();
    let mut tail = bounds[0].curve.eps.clone();
    for (k, b) in bounds.iter().enumerate().skip(1) {
        let eps = &b.curve.eps;
        let len = mass.len() + eps.len() - 1;
        tail = (0..len)
            .map(|x| {
                let mut acc = held(&tail, x);
                for (j, m) in mass.iter().enumerate().take(x + 1) {
                    if !m.is_zero() {
                        acc = acc + m.clone() * held(eps, x - j);
                    }
                }
                acc
            })
            .collect();
        if k + 1 < bounds.len() {
            mass = discrete_convolution(&mass, &b.cdf.psi_mass);
        }
    }
    Ok(monotone_envelope(&TailBoundCurve::contiguous(tail)))
}

/// Min-plus convolution `(f (x) g)(b) = min_j f(j) + g(b - j)` for `b` in
/// `0..f.len() + g.len() - 1`, each input held at its last value past its end.
pub fn min_plus_convolution<P: Prob>(f: &[P], g: &[P]) -> Vec<P> {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let len = f.len() + g.len() - 1;
    (0..len)
        .map(|b| {
            let mut best: Option<P> = None;
            for j in 0..=b {
                let cand = held(f, j) + held(g, b - j);
                if best.as_ref().is_none_or(|cur| cand < *cur) {
                    best = Some(cand);
                }
            }
            best.expect("b + 1 >= 1 candidates")
        })
        .collect()
}

/// `eps(b) = min over b_1 + ... + b_g = b of sum_i eps_i(b_i)`, clamped to
/// `[0, 1]`, folded left as min-plus convolutions.
pub fn union_bound_combine<P: Prob>(bounds: &[GroupBound<P>]) -> Result<TailBoundCurve<P>> {
    check_quanta(bounds)?;
    if bounds.len() == 1 {
        return Ok(bounds[0].curve.clone());
    }
    let mut acc = bounds[0].curve.eps.clone();
    for b in &bounds[1..] {
        acc = min_plus_convolution(&acc, &b.curve.eps);
    }
    Ok(monotone_envelope(&TailBoundCurve::contiguous(acc)))
}

/// Builds every group's bound for a validated scenario and combines them.
pub fn scenario_bound(scenario: &Scenario, method: GroupMethod, combiner: Combiner) -> Result<TailBoundCurve<f64>> {
    let bounds: Vec<GroupBound<f64>> =
        scenario.groups.iter().map(|g| build_group_bound(g, &scenario.quantum, method)).collect::<Result<_>>()?;
    let curve = match combiner {
        Combiner::Convolution => convolve_groups(&bounds)?,
        Combiner::Union => union_bound_combine(&bounds)?,
    };
    Ok(truncate_to_total(curve, scenario))
}

/// Restricts a curve to `0..=ceil(l_tot / quantum)` and forces zero from the
/// deterministic bound on.
pub fn truncate_to_total<P: Prob>(curve: TailBoundCurve<P>, scenario: &Scenario) -> TailBoundCurve<P> {
    let end = scenario.grid_len();
    let mut grid = Vec::new();
    let mut eps = Vec::new();
    for (g, e) in curve.grid.into_iter().zip(curve.eps) {
        if g > end {
            break;
        }
        let deterministic = scenario.burst_at(g) >= scenario.total_burst;
        grid.push(g);
        eps.push(if deterministic { P::zero() } else { e });
    }
    TailBoundCurve { grid, eps }
}
