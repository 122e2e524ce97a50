//! Randomized invariant checks shared by the property suite and the
//! acceptance runner.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use qdburst::heterogeneous::{build_group_bound_exact, convolve_groups, union_bound_combine, GroupBound};
use qdburst::homogeneous::{dkw_tail_bound, exact_tail_bound};
use qdburst::rational::{int, ratio, to_f64};
use qdburst::simulator::{exact_burstiness, exact_burstiness_pairs, monte_carlo_bursts, PhaseSample};
use qdburst::{monotone_envelope, validate_scenario, FlowGroupSpec, Rational, Scenario, ScenarioSpec, TailBoundCurve};

pub type Check = std::result::Result<(), TestCaseError>;

/// Relative slack for float comparisons of burstiness values.
pub const BURST_SLACK: f64 = 1e-9;

pub fn raw_curve() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-0.5f64..1.5, 1..40)
}

pub fn check_envelope(raw: Vec<f64>) -> Check {
    let curve = TailBoundCurve::contiguous(raw.clone());
    let env = monotone_envelope(&curve);
    prop_assert!(env.is_monotone());
    prop_assert!(env.eps.iter().all(|e| (0.0..=1.0).contains(e)));
    prop_assert_eq!(&monotone_envelope(&env), &env);
    for (e, r) in env.eps.iter().zip(&raw) {
        prop_assert!(*e <= r.clamp(0.0, 1.0));
    }
    Ok(())
}

/// `(count, packet_size)` of a small homogeneous group with unit period.
pub fn small_groups() -> impl Strategy<Value = Vec<(u64, i64)>> {
    prop::collection::vec((1u64..=4, 1i64..=3), 2..=3)
}

fn exact_bounds(groups: &[(u64, i64)]) -> Vec<GroupBound<Rational>> {
    groups
        .iter()
        .map(|&(n, l)| build_group_bound_exact(&FlowGroupSpec::new(n, int(1), int(l)), &int(1)).expect("valid group"))
        .collect()
}

/// Convolution is invariant under reordering of the groups and never worse
/// than the union bound, in exact arithmetic.
pub fn check_convolution_order(groups: Vec<(u64, i64)>, rotate: usize) -> Check {
    let bounds = exact_bounds(&groups);
    let conv = convolve_groups(&bounds).unwrap();
    let mut permuted = bounds.clone();
    permuted.rotate_left(rotate % bounds.len());
    permuted.swap(0, bounds.len() - 1);
    prop_assert_eq!(&convolve_groups(&permuted).unwrap(), &conv);
    let uni = union_bound_combine(&bounds).unwrap();
    prop_assert_eq!(&union_bound_combine(&permuted).unwrap(), &uni);
    prop_assert!(conv.is_monotone());
    for (c, u) in conv.eps.iter().zip(&uni.eps) {
        prop_assert!(c <= u);
    }
    Ok(())
}

/// `exact <= dkw`, and the exact bound does not increase with the burst.
pub fn check_exact_dominance(n: u64, num: i64, den: i64) -> Check {
    let b = ratio(num, den);
    let b2 = &b + ratio(1, den);
    let exact = exact_tail_bound(n, &int(1), &b).unwrap();
    let dkw = dkw_tail_bound(n, &int(1), &b).unwrap();
    prop_assert!(to_f64(&exact) <= dkw * (1.0 + 1e-12), "n={} b={}: exact {} > dkw {}", n, b, to_f64(&exact), dkw);
    prop_assert!(exact_tail_bound(n, &int(1), &b2).unwrap() <= exact);
    Ok(())
}

/// `(count, period as (num, den), packet_size)` per group.
pub type GroupDraw = (u64, (i64, i64), i64);

pub fn scenario_draw() -> impl Strategy<Value = Vec<GroupDraw>> {
    let period = prop::sample::select(vec![(1i64, 1i64), (2, 1), (3, 1), (1, 2), (3, 2)]);
    prop::collection::vec((1u64..=4, period, 1i64..=3), 1..=3)
}

pub fn build_scenario(draw: &[GroupDraw]) -> Scenario {
    let groups = draw.iter().map(|&(n, (p, q), l)| FlowGroupSpec::new(n, ratio(p, q), int(l))).collect();
    validate_scenario(&ScenarioSpec::new(groups, None)).expect("valid scenario")
}

/// Phases from unit draws scaled into each flow's period.
pub fn phases_from_units(scenario: &Scenario, units: &[f64]) -> PhaseSample {
    let mut phases = Vec::new();
    let mut it = units.iter().cycle();
    for g in &scenario.groups {
        let tau = to_f64(&g.period);
        for _ in 0..g.count {
            phases.push((it.next().unwrap() * tau).min(tau * (1.0 - f64::EPSILON)));
        }
    }
    PhaseSample { phases }
}

pub fn unit_phases() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 12)
}

/// `max l <= B <= l_tot`, and the token-bucket and pair-enumeration routes agree.
pub fn check_burstiness_range(draw: Vec<GroupDraw>, units: Vec<f64>) -> Check {
    let s = build_scenario(&draw);
    let phases = phases_from_units(&s, &units);
    let b = exact_burstiness(&s, &phases).unwrap();
    let slack = BURST_SLACK * to_f64(&s.total_burst);
    prop_assert!(b >= to_f64(&s.max_packet_size()) - slack);
    prop_assert!(b <= to_f64(&s.total_burst) + slack);
    let pairs = exact_burstiness_pairs(&s, &phases).unwrap();
    prop_assert!((b - pairs).abs() <= slack, "token bucket {} vs pairs {}", b, pairs);
    Ok(())
}

/// Shifting every phase of a common-period scenario by the same amount
/// (modulo the period) leaves the burstiness unchanged.
pub fn check_shift_invariance(counts: Vec<(u64, i64)>, units: Vec<f64>, shift: f64) -> Check {
    let draw: Vec<GroupDraw> = counts.iter().map(|&(n, l)| (n, (1, 1), l)).collect();
    let s = build_scenario(&draw);
    let phases = phases_from_units(&s, &units);
    let shifted = PhaseSample {
        phases: phases.phases.iter().map(|p| (p + shift).rem_euclid(1.0).min(1.0 - f64::EPSILON)).collect(),
    };
    let a = exact_burstiness(&s, &phases).unwrap();
    let b = exact_burstiness(&s, &shifted).unwrap();
    prop_assert!((a - b).abs() <= 1e-9 * to_f64(&s.total_burst), "{} vs {}", a, b);
    Ok(())
}

/// Same seed, same bursts, whatever the thread schedule.
pub fn check_reproducibility(draw: Vec<GroupDraw>, seed: u64) -> Check {
    let s = build_scenario(&draw);
    let a = monte_carlo_bursts(&s, 4, seed).unwrap();
    let b = monte_carlo_bursts(&s, 4, seed).unwrap();
    prop_assert_eq!(a, b);
    Ok(())
}
