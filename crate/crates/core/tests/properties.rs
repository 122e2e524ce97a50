mod common;

use common::*;
use proptest::prelude::*;
use qdburst::heterogeneous::{build_group_bound, GroupMethod};
use qdburst::homogeneous::{
    dkw_tail_bound, exact_quasi_det_burst, exact_tail_bound, quasi_det_burst, same_period_burst, same_period_dkw,
    same_period_exact,
};
use qdburst::rational::{int, ratio, to_f64};
use qdburst::simulator::{arrival_events, exact_burstiness, monte_carlo_tail};
use qdburst::{CdfLowerBound, FlowGroupSpec, Rational, TailBoundCurve};

/// `sup_{s <= t} A[s, t) - r (t - s)` over a uniform grid of step `h` on two
/// hyperperiods.
fn brute_force_burstiness(events: &[(f64, f64)], rate: f64, horizon: f64, h: f64) -> f64 {
    let steps = (horizon / h).ceil() as usize;
    let points: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    let mut best = 0.0f64;
    for (i, &s) in points.iter().enumerate() {
        let mut bits = 0.0;
        let mut k = events.partition_point(|e| e.0 < s);
        for &t in &points[i..] {
            while k < events.len() && events[k].0 < t {
                bits += events[k].1;
                k += 1;
            }
            best = best.max(bits - rate * (t - s));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn envelope_is_monotone_and_idempotent(raw in raw_curve()) {
        check_envelope(raw)?;
    }

    #[test]
    fn convolution_order_invariant_and_below_union(groups in small_groups(), rotate in 0usize..3) {
        check_convolution_order(groups, rotate)?;
    }

    #[test]
    fn exact_below_dkw_and_monotone(n in 2u64..=30, num in 0i64..120, den in 1i64..=4) {
        check_exact_dominance(n, num, den)?;
    }

    #[test]
    fn burstiness_range_and_routes_agree(draw in scenario_draw(), units in unit_phases()) {
        check_burstiness_range(draw, units)?;
    }

    #[test]
    fn burstiness_shift_invariant(counts in small_groups(), units in unit_phases(), shift in 0.0f64..1.0) {
        check_shift_invariance(counts, units, shift)?;
    }

    #[test]
    fn monte_carlo_reproducible(draw in scenario_draw(), seed in any::<u64>()) {
        check_reproducibility(draw, seed)?;
    }

    #[test]
    fn cdf_mass_is_conserved(n in 1u64..=20, l in 1i64..=3) {
        let g = build_group_bound(&FlowGroupSpec::new(n, int(1), int(l)), &int(1), GroupMethod::Dkw).unwrap();
        let total: f64 = g.cdf.psi_mass.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(g.cdf.psi_mass.iter().all(|m| *m >= 0.0));
        for (a, b) in g.cdf.tail().eps.iter().zip(&g.curve.eps) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cdf_round_trip_exact(raw in prop::collection::vec(0i64..=8, 1..12)) {
        let eps: Vec<Rational> = raw.iter().map(|&k| ratio(k, 8)).collect();
        let curve = qdburst::monotone_envelope(&TailBoundCurve::contiguous(eps));
        let cdf = CdfLowerBound::from_tail(&curve).unwrap();
        prop_assert_eq!(cdf.tail(), curve);
    }

    #[test]
    fn quasi_burst_round_trip(n in 2u64..=400, exp in 1i32..=9) {
        let eps = 10f64.powi(-exp);
        let b = quasi_det_burst(n, &int(1), eps).unwrap();
        prop_assert!(dkw_tail_bound(n, &int(1), &b).unwrap() <= eps);
        prop_assert!(b > int(0));
        let e = exact_quasi_det_burst(n.min(60), &int(1), eps).unwrap();
        prop_assert!(to_f64(&exact_tail_bound(n.min(60), &int(1), &e).unwrap()) <= eps);
        prop_assert!(e <= quasi_det_burst(n.min(60), &int(1), eps).unwrap().min(int(n.min(60) as i64)));
    }

    #[test]
    fn same_period_exact_below_dkw(sizes in prop::collection::vec(1i64..=5, 2..=12), frac in 0.0f64..1.0) {
        let mut sizes: Vec<Rational> = sizes.into_iter().map(int).collect();
        sizes.sort_by(|a, b| b.cmp(a));
        let total: i64 = sizes.iter().map(|s| s.to_integer().try_into().unwrap_or(0i64)).sum();
        let b = int((frac * total as f64).floor() as i64);
        let exact = to_f64(&same_period_exact(&sizes, &b).unwrap());
        let dkw = same_period_dkw(&sizes, &b).unwrap();
        prop_assert!(exact <= dkw * (1.0 + 1e-12), "exact {} dkw {}", exact, dkw);
        let burst = same_period_burst(&sizes, 1e-3).unwrap();
        prop_assert!(same_period_dkw(&sizes, &burst).unwrap() <= 1e-3);
    }

    #[test]
    fn empirical_tail_is_one_below_largest_packet(draw in scenario_draw(), seed in any::<u64>()) {
        let s = build_scenario(&draw);
        let below = (&s.max_packet_size() / &s.quantum).ceil().to_integer();
        let below: u64 = below.try_into().unwrap();
        let grid: Vec<u64> = (0..below).collect();
        let tail = monte_carlo_tail(&s, 1_000, seed, &grid, 0.01).unwrap();
        prop_assert!(tail.tail.iter().all(|t| *t == 1.0));
        prop_assert!(tail.tail.iter().all(|t| (0.0..=1.0).contains(t)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dense_grid_brute_force_agrees(draw in scenario_draw(), units in unit_phases()) {
        let s = build_scenario(&draw);
        let phases = phases_from_units(&s, &units);
        let b = exact_burstiness(&s, &phases).unwrap();
        let events: Vec<(f64, f64)> = arrival_events(&s, &phases, 2, 100_000)
            .unwrap()
            .iter()
            .map(|e| (e.time, e.bits))
            .collect();
        let rate = to_f64(&s.total_rate);
        let horizon = 2.0 * to_f64(&s.hyperperiod());
        let h = 1e-3;
        let brute = brute_force_burstiness(&events, rate, horizon, h).min(to_f64(&s.total_burst));
        let slack = 1e-9 * to_f64(&s.total_burst);
        prop_assert!(brute <= b + slack, "brute {} > exact {}", brute, b);
        prop_assert!(brute >= b - 2.0 * rate * h - slack, "brute {} << exact {}", brute, b);
    }
}
