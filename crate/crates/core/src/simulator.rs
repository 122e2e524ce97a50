//! Monte Carlo validation: draw phases, compute each sample's exact aggregate
//! burstiness, and estimate `P(B > b)` with a Kolmogorov-Smirnov band.
//!
//! The aggregate arrival process repeats with the hyperperiod `HP` (the lcm of
//! the periods), and a full hyperperiod carries exactly `r_tot * HP` bits, so
//! the supremum `B = sup_{s <= t} A[s, t) - r_tot (t - s)` is reached with the
//! first packet in `[0, HP)` and the last one less than `HP` later. Running the
//! token bucket over `[0, 2 HP)` therefore sees every candidate pair.
//!
//! Default trial count is `10^5`, which resolves tails down to about `1e-4`.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::format_prob;
use crate::error::{BoundError, Result};
use crate::rational::{self, Rational};
use crate::scenario::Scenario;

pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_ALPHA: f64 = 0.01;
pub const DEFAULT_EVENT_CAP: usize = 100_000;
pub const MIN_TRIALS: usize = 1_000;

/// Relative slack when comparing a simulated burst against a grid value;
/// covers float rounding in the bucket recursion.
pub const BURST_TOLERANCE: f64 = 1e-9;

/// One phase per flow, groups in scenario order; `phases[f]` lies in `[0, period_f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSample {
    pub phases: Vec<f64>,
}

/// Arrival of `bits` at `time`; simultaneous packets are merged into one event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalEvent {
    pub time: f64,
    pub bits: f64,
}

/// Iid uniform phases, one per flow.
pub fn sample_phases<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> PhaseSample {
    let mut phases = Vec::with_capacity(scenario.total_flows() as usize);
    for g in &scenario.groups {
        let tau = rational::to_f64(&g.period);
        for _ in 0..g.count {
            phases.push(rng.gen_range(0.0..tau));
        }
    }
    PhaseSample { phases }
}

/// Generator for trial `trial` of a run seeded with `seed`. Every trial has
/// its own stream, so results do not depend on how trials are scheduled.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn sample_phases_seeded(scenario: &Scenario, seed: u64) -> PhaseSample {
    sample_phases(scenario, &mut trial_rng(seed, 0))
}

fn check_phases(scenario: &Scenario, phases: &PhaseSample) -> Result<()> {
    if phases.phases.len() as u64 != scenario.total_flows() {
        return Err(BoundError::InvalidArg(format!(
            "expected {} phases, got {}",
            scenario.total_flows(),
            phases.phases.len()
        )));
    }
    let mut idx = 0;
    for g in &scenario.groups {
        let tau = rational::to_f64(&g.period);
        for _ in 0..g.count {
            let p = phases.phases[idx];
            if !(0.0..tau).contains(&p) {
                return Err(BoundError::InvalidArg(format!("phase {p} of flow {idx} outside [0, {tau})")));
            }
            idx += 1;
        }
    }
    Ok(())
}

/// Number of arrivals in one hyperperiod.
pub fn events_per_hyperperiod(scenario: &Scenario) -> u128 {
    let hp = scenario.hyperperiod();
    scenario
        .groups
        .iter()
        .map(|g| {
            let per_flow = (&hp / &g.period).to_integer().to_u128().unwrap_or(u128::MAX);
            per_flow.saturating_mul(g.count as u128)
        })
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// All arrivals in `[0, hyperperiods * HP)`, sorted, ties merged.
pub fn arrival_events(
    scenario: &Scenario,
    phases: &PhaseSample,
    hyperperiods: u32,
    cap: usize,
) -> Result<Vec<ArrivalEvent>> {
    check_phases(scenario, phases)?;
    let per_hp = events_per_hyperperiod(scenario);
    if per_hp > cap as u128 {
        return Err(BoundError::HyperperiodOverflow { events: per_hp, cap });
    }
    let hp = scenario.hyperperiod();
    let mut events = Vec::with_capacity(per_hp as usize * hyperperiods as usize);
    let mut idx = 0;
    for g in &scenario.groups {
        let tau = rational::to_f64(&g.period);
        let bits = rational::to_f64(&g.packet_size);
        let per_flow = (&hp / &g.period).to_integer().to_u64().expect("bounded by cap") * hyperperiods as u64;
        for _ in 0..g.count {
            let phase = phases.phases[idx];
            idx += 1;
            for k in 0..per_flow {
                events.push(ArrivalEvent { time: phase + k as f64 * tau, bits });
            }
        }
    }
    events.sort_unstable_by(|a, b| a.time.total_cmp(&b.time));
    let mut merged: Vec<ArrivalEvent> = Vec::with_capacity(events.len());
    for e in events {
        match merged.last_mut() {
            Some(last) if last.time == e.time => last.bits += e.bits,
            _ => merged.push(e),
        }
    }
    Ok(merged)
}

/// Exact aggregate burstiness of one phase sample, by running an initially
/// empty token bucket of rate `r_tot` over two hyperperiods.
pub fn exact_burstiness(scenario: &Scenario, phases: &PhaseSample) -> Result<f64> {
    exact_burstiness_capped(scenario, phases, DEFAULT_EVENT_CAP)
}

pub fn exact_burstiness_capped(scenario: &Scenario, phases: &PhaseSample, cap: usize) -> Result<f64> {
    let events = arrival_events(scenario, phases, 2, cap)?;
    let rate = rational::to_f64(&scenario.total_rate);
    let mut content = 0.0f64;
    let mut best = 0.0f64;
    let mut prev = 0.0f64;
    for e in &events {
        content = (content - rate * (e.time - prev)).max(0.0) + e.bits;
        prev = e.time;
        best = best.max(content);
    }
    Ok(best.min(rational::to_f64(&scenario.total_burst)))
}

/// Same quantity by explicit enumeration: first packet `i` in `[0, HP)`, last
/// packet `j` with `T_i <= T_j < T_i + HP`, value `bits(i..=j) - r_tot (T_j - T_i)`.
/// Quadratic in the number of events per hyperperiod.
pub fn exact_burstiness_pairs(scenario: &Scenario, phases: &PhaseSample) -> Result<f64> {
    let events = arrival_events(scenario, phases, 2, DEFAULT_EVENT_CAP)?;
    let rate = rational::to_f64(&scenario.total_rate);
    let hp = rational::to_f64(&scenario.hyperperiod());
    let mut best = 0.0f64;
    for (i, first) in events.iter().enumerate() {
        if first.time >= hp {
            break;
        }
        let mut bits = 0.0;
        for last in &events[i..] {
            if last.time >= first.time + hp {
                break;
            }
            bits += last.bits;
            best = best.max(bits - rate * (last.time - first.time));
        }
    }
    Ok(best.min(rational::to_f64(&scenario.total_burst)))
}

/// `sqrt(ln(2 / alpha) / (2 n))`.
pub fn ks_band_halfwidth(trials: usize, alpha: f64) -> Result<f64> {
    if trials == 0 {
        return Err(BoundError::InvalidArg("need at least one trial".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundError::InvalidArg(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(((2.0 / alpha).ln() / (2.0 * trials as f64)).sqrt())
}

/// Empirical `P(B > b)` on a grid of bursts (in quanta) with its KS band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalTail {
    pub grid: Vec<u64>,
    #[serde(serialize_with = "rational::serialize")]
    pub quantum: Rational,
    pub tail: Vec<f64>,
    pub band_halfwidth: f64,
    pub alpha: f64,
    pub trials: usize,
    pub seed: u64,
}

impl EmpiricalTail {
    /// Standard error of the estimate at grid index `i`.
    pub fn std_error(&self, i: usize) -> f64 {
        let p = self.tail[i];
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("b,tail_emp,band\n");
        for (g, t) in self.grid.iter().zip(&self.tail) {
            let b = &self.quantum * Rational::from_integer((*g).into());
            out.push_str(&format!(
                "{},{},{}\n",
                rational::format_rational(&b),
                format_prob(*t),
                format_prob(self.band_halfwidth)
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Exact burstiness of `trials` independent phase samples, in trial order.
pub fn monte_carlo_bursts(scenario: &Scenario, trials: usize, seed: u64) -> Result<Vec<f64>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let phases = sample_phases(scenario, &mut trial_rng(seed, t));
            exact_burstiness(scenario, &phases)
        })
        .collect()
}

/// Fraction of bursts strictly above each grid value.
pub fn tail_from_bursts(scenario: &Scenario, bursts: &[f64], grid: &[u64]) -> Vec<f64> {
    let mut sorted = bursts.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let scale = rational::to_f64(&scenario.total_burst).max(1.0);
    grid.iter()
        .map(|&g| {
            let b = rational::to_f64(&scenario.burst_at(g)) + BURST_TOLERANCE * scale;
            let at_or_below = sorted.partition_point(|&x| x <= b);
            (sorted.len() - at_or_below) as f64 / sorted.len().max(1) as f64
        })
        .collect()
}

/// Monte Carlo estimate of `P(B > b)` for every grid burst.
pub fn monte_carlo_tail(
    scenario: &Scenario,
    trials: usize,
    seed: u64,
    grid: &[u64],
    alpha: f64,
) -> Result<EmpiricalTail> {
    if trials < MIN_TRIALS {
        return Err(BoundError::InvalidArg(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BoundError::InvalidArg("grid must be strictly ascending".into()));
    }
    let band_halfwidth = ks_band_halfwidth(trials, alpha)?;
    let bursts = monte_carlo_bursts(scenario, trials, seed)?;
    Ok(EmpiricalTail {
        grid: grid.to_vec(),
        quantum: scenario.quantum.clone(),
        tail: tail_from_bursts(scenario, &bursts, grid),
        band_halfwidth,
        alpha,
        trials,
        seed,
    })
}
