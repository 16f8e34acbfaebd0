use mub_eve::attack::{build_isometry, disturbance_per_state, AttackParams, ErrorLayout};
use mub_eve::info::{guess_pair, lambda_d, phi_d};
use mub_eve::mc::{simulate, SimConfig, WChoice};
use mub_eve::optimize::{
    appendix_checks_for, critical_disturbance, i_ae_opt, maximize_w_with, search_interval, w_bar,
    Method, DEFAULT_DC_TOL, STATIONARITY_STEP,
};
use mub_eve::ProtocolSpec;
use proptest::prelude::*;

fn two(d: usize) -> ProtocolSpec {
    ProtocolSpec::two_bases(d).unwrap()
}

fn three_sigma(p: f64, n: u64) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn critical_disturbance_grows_with_dimension(d in 2usize..10) {
        let lo = critical_disturbance(&two(d), DEFAULT_DC_TOL).unwrap().critical;
        let hi = critical_disturbance(&two(d + 1), DEFAULT_DC_TOL).unwrap().critical;
        prop_assert!(hi > lo);
    }

    #[test]
    fn optimal_eve_information_is_monotone(
        three in any::<bool>(),
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let spec = if three { ProtocolSpec::qutrit_three_bases() } else { two(3) };
        let top = critical_disturbance(&spec, 1e-9).unwrap().critical + 0.1;
        let (x, y) = if a < b { (a * top, b * top) } else { (b * top, a * top) };
        prop_assert!(i_ae_opt(&spec, y).unwrap() >= i_ae_opt(&spec, x).unwrap() - 1e-12);
    }

    #[test]
    fn fixed_point_of_guess_probabilities(d in 2usize..=6, frac in 0.001f64..0.999) {
        let dist = two(d).max_disturbance() * frac;
        let wb = w_bar(d, dist).unwrap();
        prop_assert!((phi_d(dist, wb, d).unwrap() - lambda_d(wb, d).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn any_admissible_overlap_gives_a_symmetric_attack(
        d in 2usize..=6,
        frac in 0.01f64..0.99,
        t in 0.0f64..1.0,
    ) {
        let spec = two(d);
        let dist = spec.max_disturbance() * frac;
        let (lo, hi) = search_interval(&spec, dist).unwrap();
        let w = lo + (hi - lo) * t;
        let iso = build_isometry(&AttackParams::new(spec, dist, w).unwrap()).unwrap();
        prop_assert!(iso.isometry_residual() <= 1e-12);
        for basis in spec.bases() {
            for x in disturbance_per_state(&iso, &basis).unwrap() {
                prop_assert!((x - dist).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn session_tallies_are_consistent(
        d in 2usize..=5,
        frac in 0.0f64..1.0,
        rounds in 1u64..3000,
        shards in 1usize..6,
        seed in any::<u64>(),
    ) {
        let spec = two(d);
        let dist = spec.max_disturbance() * frac;
        let stats = simulate(&SimConfig::new(spec, dist, WChoice::Auto, rounds, seed).with_shards(shards)).unwrap();
        prop_assert_eq!(stats.rounds_per_basis.iter().sum::<u64>(), rounds);
        for (b, h) in stats.bob_histograms.iter().enumerate() {
            prop_assert_eq!(h.total(), stats.rounds_per_basis[b]);
        }
        prop_assert!(stats.bob_error_rate.iter().all(|r| (0.0..=1.0).contains(r)));
        prop_assert_eq!(stats.eve_joint_histogram.total(), stats.rounds_per_basis[0]);
        prop_assert_eq!(stats.partition_mismatches, 0);
    }
}

#[test]
fn golden_section_recovers_closed_form_optimum() {
    // qutrit, two bases, D = 0.02, 0.04, .., 0.20
    let mut misses = Vec::new();
    for k in 1..=10 {
        let dist = 0.02 * k as f64;
        let r = maximize_w_with(&two(3), dist, 1e-12, Method::GoldenSection).unwrap();
        let wb = w_bar(3, dist).unwrap();
        if (r.w_opt - wb).abs() > 1e-6 {
            misses.push(format!(
                "D={dist:.2}: golden {:.6} vs w_bar {wb:.6}",
                r.w_opt
            ));
        }
    }
    assert!(misses.is_empty(), "{misses:#?}");
}

#[test]
fn stationarity_and_derivative_ratio_at_w_bar() {
    for d in 2..=6 {
        let top = two(d).max_disturbance();
        for k in 1..=12 {
            let dist = 0.05 * k as f64;
            if dist >= top {
                continue;
            }
            let r = appendix_checks_for(d, dist, STATIONARITY_STEP).unwrap();
            assert!(r.stationarity <= 1e-6, "d={d} D={dist}: {}", r.stationarity);
            assert!(
                r.derivative_ratio <= 1e-4,
                "d={d} D={dist}: {}",
                r.derivative_ratio
            );
            assert!(r.phi_equals_lambda <= 1e-12);
        }
    }
}

#[test]
fn bob_errors_are_uniform_over_wrong_symbols() {
    let spec = two(4);
    let stats =
        simulate(&SimConfig::new(spec, 0.2, WChoice::Auto, 2_000_000, 11).with_shards(8)).unwrap();
    for h in &stats.bob_histograms {
        let errors: u64 = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| h.get(a, b))
            .sum();
        for shift in 1..4 {
            let count: u64 = (0..4).map(|a| h.get(a, (a + shift) % 4)).sum();
            let p = count as f64 / errors as f64;
            assert!(
                (p - 1.0 / 3.0).abs() <= three_sigma(1.0 / 3.0, errors),
                "shift {shift}: {p}"
            );
        }
    }
}

#[test]
fn eve_success_splits_by_bob_outcome() {
    for (spec, dist, w) in [
        (two(3), 0.1, 0.85),
        (two(5), 0.2, 0.6),
        (ProtocolSpec::qutrit_three_bases(), 0.15, 0.3),
    ] {
        let stats =
            simulate(&SimConfig::new(spec, dist, WChoice::Value(w), 3_000_000, 3).with_shards(8))
                .unwrap();
        let (g1, g2) = guess_pair(&spec, dist, w).unwrap();
        let ok = &stats.eve_joint_given_bob.correct;
        let err = &stats.eve_joint_given_bob.error;
        let p1 = ok.diagonal() as f64 / ok.total() as f64;
        let p2 = err.diagonal() as f64 / err.total() as f64;
        assert!(
            (p1 - g1).abs() <= three_sigma(g1, ok.total()),
            "{p1} vs {g1}"
        );
        assert!(
            (p2 - g2).abs() <= three_sigma(g2, err.total()),
            "{p2} vs {g2}"
        );
    }
}

#[test]
fn eve_block_predicts_bob_shift() {
    let spec = two(5);
    let stats =
        simulate(&SimConfig::new(spec, 0.3, WChoice::Auto, 500_000, 8).with_shards(4)).unwrap();
    let h = &stats.eve_block_vs_bob_shift;
    assert_eq!(h.diagonal(), h.total());
    assert_eq!(stats.partition_mismatches, 0);

    // the listing layout keeps Eve's block consistent with (alice, bob) too
    let mut cfg = SimConfig::new(two(4), 0.2, WChoice::Auto, 200_000, 8).with_shards(4);
    cfg.layout = ErrorLayout::Listing;
    let stats = simulate(&cfg).unwrap();
    assert_eq!(stats.partition_mismatches, 0);
    assert!(stats.eve_block_vs_bob_shift.diagonal() < stats.eve_block_vs_bob_shift.total());
}
