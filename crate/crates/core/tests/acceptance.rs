//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line straight to
//! stderr, bypassing output capture, so the verdicts show up in every run.

use std::io::Write;
use std::time::{Duration, Instant};

use mub_eve::attack::{
    build_eve_states, build_isometry, disturbance_per_state, s_from_dw, solve_coeff_pair,
    AttackParams,
};
use mub_eve::cli::main_with_args;
use mub_eve::info::{i_ab, i_ae, lambda_d, mu_nu_threebasis, phi_d};
use mub_eve::mc::{compare_to_analytic, simulate, SimConfig, WChoice, MI_ABS_TOL, Z_LIMIT};
use mub_eve::optimize::{
    appendix_checks, critical_disturbance, d_c_closed_form, maximize_w, search_interval, w_bar,
    DEFAULT_DC_TOL, DEFAULT_W_TOL, STATIONARITY_STEP,
};
use mub_eve::table::parse_curve_csv;
use mub_eve::ProtocolSpec;

fn report(criterion: u32, title: &str, pass: bool, elapsed: Duration, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "[{verdict}] criterion {criterion}: {title} ({:.2} s) {detail}",
        elapsed.as_secs_f64()
    );
}

fn two(d: usize) -> ProtocolSpec {
    ProtocolSpec::two_bases(d).unwrap()
}

#[test]
fn criterion_1_critical_disturbance_closed_form() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in 2..=10 {
        let bisected = critical_disturbance(&two(d), DEFAULT_DC_TOL)
            .unwrap()
            .critical;
        worst = worst.max((bisected - d_c_closed_form(d).unwrap()).abs());
    }
    let d3 = critical_disturbance(&two(3), DEFAULT_DC_TOL)
        .unwrap()
        .critical;
    let d4 = critical_disturbance(&two(4), DEFAULT_DC_TOL)
        .unwrap()
        .critical;
    let elapsed = start.elapsed();
    let pass = worst <= 1e-6
        && (d3 - 0.211_325).abs() <= 1e-6
        && (d4 - 0.25).abs() <= 1e-6
        && elapsed < Duration::from_secs(5);
    report(
        1,
        "D_c = (1 - 1/sqrt d)/2 for d = 2..10",
        pass,
        elapsed,
        &format!("max |diff| = {worst:.3e}, d=3: {d3:.7}, d=4: {d4:.7}"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_three_basis_qutrit_crossing() {
    let start = Instant::now();
    let point = critical_disturbance(&ProtocolSpec::qutrit_three_bases(), DEFAULT_DC_TOL).unwrap();
    let elapsed = start.elapsed();
    let pass = (point.critical - 0.2247).abs() <= 5e-4 && elapsed < Duration::from_secs(10);
    report(
        2,
        "three-basis qutrit D_c = 0.2247 +- 5e-4",
        pass,
        elapsed,
        &format!(
            "D_c,3 = {:.7}, gap = {:.2e}",
            point.critical, point.gap_at_dc
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_ordering() {
    let start = Instant::now();
    let dc: Vec<f64> = (2..=10)
        .map(|d| {
            critical_disturbance(&two(d), DEFAULT_DC_TOL)
                .unwrap()
                .critical
        })
        .collect();
    let increasing = dc.windows(2).all(|p| p[1] > p[0]);
    let three = critical_disturbance(&ProtocolSpec::qutrit_three_bases(), DEFAULT_DC_TOL)
        .unwrap()
        .critical;
    let elapsed = start.elapsed();
    let pass = increasing && three > dc[1] && elapsed < Duration::from_secs(5);
    report(
        3,
        "D_c increasing in d; three bases beat two for qutrits",
        pass,
        elapsed,
        &format!("D_c,3 = {three:.6} vs D_c(3) = {:.6}", dc[1]),
    );
    assert!(pass);
}

#[test]
fn criterion_4_attack_validity() {
    let start = Instant::now();
    let mut cases: Vec<(ProtocolSpec, f64, f64)> = Vec::new();
    for d in 2..=6 {
        let spec = two(d);
        for k in 1..=9 {
            let dist = spec.max_disturbance() * k as f64 / 10.0;
            cases.push((spec, dist, w_bar(d, dist).unwrap()));
        }
    }
    let three = ProtocolSpec::qutrit_three_bases();
    for k in 1..=9 {
        let dist = three.max_disturbance() * k as f64 / 10.0;
        cases.push((
            three,
            dist,
            maximize_w(&three, dist, DEFAULT_W_TOL).unwrap().w_opt,
        ));
    }

    let (mut iso_worst, mut dist_worst, mut prof_worst, mut overlap_worst) =
        (0f64, 0f64, 0f64, 0f64);
    for &(spec, dist, w) in &cases {
        let params = AttackParams::new(spec, dist, w).unwrap();
        let iso = build_isometry(&params).unwrap();
        iso_worst = iso_worst.max(iso.isometry_residual());
        for basis in spec.bases() {
            for x in disturbance_per_state(&iso, &basis).unwrap() {
                dist_worst = dist_worst.max((x - dist).abs());
            }
        }
        let prof = build_eve_states(&params).unwrap().profile();
        prof_worst = prof_worst.max(prof.max_vanishing());
        overlap_worst = overlap_worst
            .max((prof.w - w).abs())
            .max(prof.w_spread)
            .max((prof.s - params.s()).abs())
            .max(prof.s_spread);
    }
    let elapsed = start.elapsed();
    let pass = iso_worst <= 1e-12
        && dist_worst <= 1e-12
        && prof_worst <= 1e-12
        && overlap_worst <= 1e-12
        && elapsed < Duration::from_secs(10);
    report(
        4,
        "attack validity for d = 2..6 and the three-basis qutrit",
        pass,
        elapsed,
        &format!(
            "{} cases; isometry {iso_worst:.1e}, disturbance {dist_worst:.1e}, xyzt {prof_worst:.1e}, w/s {overlap_worst:.1e}",
            cases.len()
        ),
    );
    assert!(pass);
}

fn phi3_display(dist: f64, w: f64) -> f64 {
    let root = (2.0 * dist * (3.0 - 2.0 * dist * (2.0 + w)) * (1.0 + 2.0 * w)).sqrt();
    (3.0 + 2.0 * dist * (w - 1.0)) / (9.0 * (1.0 - dist)) + 2.0 * root / (9.0 * (1.0 - dist))
}

fn lambda3_display(w: f64) -> f64 {
    (5.0 - 2.0 * w + 4.0 * (1.0 + w - 2.0 * w * w).sqrt()) / 9.0
}

fn phi4_display(dist: f64, w: f64) -> f64 {
    let root = (3.0 * dist * (1.0 + 3.0 * w) * (4.0 - dist * (5.0 + 3.0 * w))).sqrt();
    (4.0 - 2.0 * dist * (1.0 - 3.0 * w)) / (16.0 * (1.0 - dist))
        + 2.0 * root / (16.0 * (1.0 - dist))
}

fn lambda4_display(w: f64) -> f64 {
    (5.0 - 3.0 * w + 3.0 * (1.0 + 2.0 * w - 3.0 * w * w).sqrt()) / 8.0
}

fn mu_display(dist: f64, w: f64) -> f64 {
    let root = (2.0 * dist * (3.0 + dist * (w - 4.0)) * (1.0 - w)).sqrt();
    (3.0 - dist * (w + 2.0)) / (9.0 * (1.0 - dist)) + 2.0 * root / (9.0 * (1.0 - dist))
}

/// Eve's success probability from the constructed coefficients: `major²`.
fn constructive(overlap: f64, d: usize) -> f64 {
    solve_coeff_pair(overlap, d).unwrap().major.powi(2)
}

#[test]
fn criterion_5_formula_cross_checks() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut note = |x: f64, y: f64| worst = worst.max((x - y).abs());
    let grid = |spec: &ProtocolSpec, dist: f64| {
        let (lo, hi) = search_interval(spec, dist).unwrap();
        (1..8).map(move |k| lo + (hi - lo) * k as f64 / 8.0)
    };
    for k in 1..=12 {
        let dist = 0.05 * k as f64;
        let (q2, q4, q3) = (two(3), two(4), ProtocolSpec::qutrit_three_bases());
        for w in grid(&q2, dist) {
            let s = s_from_dw(3, 2, dist, w).unwrap();
            note(phi3_display(dist, w), constructive(s, 3));
            note(phi_d(dist, w, 3).unwrap(), constructive(s, 3));
            note(lambda3_display(w), constructive(w, 3));
            note(lambda_d(w, 3).unwrap(), constructive(w, 3));
        }
        if dist < q4.max_disturbance() {
            for w in grid(&q4, dist) {
                let s = s_from_dw(4, 2, dist, w).unwrap();
                note(phi4_display(dist, w), constructive(s, 4));
                note(phi_d(dist, w, 4).unwrap(), constructive(s, 4));
                note(lambda4_display(w), constructive(w, 4));
                note(lambda_d(w, 4).unwrap(), constructive(w, 4));
            }
        }
        for w in grid(&q3, dist) {
            let s = s_from_dw(3, 3, dist, w).unwrap();
            let (mu, nu) = mu_nu_threebasis(dist, w).unwrap();
            note(mu_display(dist, w), constructive(s, 3));
            note(mu, constructive(s, 3));
            note(lambda3_display(w), constructive(w, 3));
            note(nu, constructive(w, 3));
        }
    }
    let mut fixed_point: f64 = 0.0;
    for d in 2..=10 {
        let top = two(d).max_disturbance();
        for k in 1..20 {
            let dist = top * k as f64 / 20.0;
            let wb = w_bar(d, dist).unwrap();
            fixed_point =
                fixed_point.max((phi_d(dist, wb, d).unwrap() - lambda_d(wb, d).unwrap()).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-12 && fixed_point <= 1e-12 && elapsed < Duration::from_secs(5);
    report(
        5,
        "closed forms agree with the constructed coefficients",
        pass,
        elapsed,
        &format!("max |display - constructive| = {worst:.1e}, max |phi - lambda| at w_bar = {fixed_point:.1e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_optimality_witnesses() {
    let start = Instant::now();
    let mut stationary = true;
    let mut ratio = true;
    let mut concave_fail = Vec::new();
    let mut lines = Vec::new();
    for k in 1..=12 {
        let dist = 0.05 * k as f64;
        let r = appendix_checks(dist, STATIONARITY_STEP).unwrap();
        stationary &= r.stationarity <= 1e-6;
        ratio &= r.derivative_ratio <= 1e-4;
        if !r.concave_on_grid() {
            concave_fail.push(format!("{dist:.2}"));
        }
        lines.push(format!(
            "D={dist:.2}: |dI/dw|={:.1e} ratio={:.1e} max d2={:+.3e} at w={:.6}",
            r.stationarity, r.derivative_ratio, r.max_second_difference, r.worst_w
        ));
    }
    let elapsed = start.elapsed();
    let concave = concave_fail.is_empty();
    let pass = stationary && ratio && concave && elapsed < Duration::from_secs(5);
    report(
        6,
        "stationarity, derivative ratio and concavity of I_AE,3 in w",
        pass,
        elapsed,
        &format!(
            "stationarity {}, ratio {}, concavity {}{}",
            if stationary { "ok" } else { "violated" },
            if ratio { "ok" } else { "violated" },
            if concave { "ok" } else { "violated at D = " },
            concave_fail.join(", ")
        ),
    );
    for line in &lines {
        let _ = writeln!(std::io::stderr(), "    {line}");
    }
    assert!(stationary, "stationarity");
    assert!(ratio, "derivative ratio");
    assert!(
        concave,
        "positive second differences at D = {concave_fail:?}"
    );
}

#[test]
fn criterion_7_monte_carlo_equivalence() {
    let start = Instant::now();
    const ROUNDS: u64 = 10_000_000;
    let cases = [(3usize, 0.05), (3, 0.1), (3, 0.2113), (4, 0.1), (4, 0.25)];
    let mut pass = true;
    let mut details = Vec::new();
    for (i, &(d, dist)) in cases.iter().enumerate() {
        let spec = two(d);
        let cfg =
            SimConfig::new(spec, dist, WChoice::Auto, ROUNDS, 0x5eed + i as u64).with_shards(16);
        let stats = simulate(&cfg).unwrap();
        let verdict = compare_to_analytic(&stats, &spec, dist, stats.w).unwrap();
        let worst_z = verdict.checks.iter().map(|c| c.z.abs()).fold(0.0, f64::max);
        let iae = verdict.check("I_AE").unwrap();
        pass &=
            verdict.pass && worst_z <= Z_LIMIT && (iae.observed - iae.expected).abs() <= MI_ABS_TOL;
        if d == 4 && dist == 0.25 {
            // at the critical point Eve's information equals Bob's
            let target = i_ab(4, 0.25).unwrap();
            pass &= (iae.observed - target).abs() <= iae.abs_tolerance.unwrap();
            pass &= (i_ae(&spec, dist, stats.w).unwrap() - target).abs() <= 1e-9;
        }
        details.push(format!(
            "d={d} D={dist}: max|z|={worst_z:.2}, dI_AE={:+.1e}",
            iae.observed - iae.expected
        ));
    }
    let small = SimConfig::new(two(3), 0.1, WChoice::Auto, 1_000_000, 99).with_shards(7);
    let deterministic = simulate(&small).unwrap() == simulate(&small).unwrap();
    let elapsed = start.elapsed();
    pass &= deterministic && elapsed < Duration::from_secs(120);
    report(
        7,
        "Monte Carlo agrees with the closed forms (1e7 rounds each)",
        pass,
        elapsed,
        &format!("{}; deterministic: {deterministic}", details.join("; ")),
    );
    assert!(pass);
}

fn curves_csv(dim: usize, bases: usize) -> Vec<[f64; 6]> {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let code = main_with_args([
        "mub-eve".to_string(),
        "curves".into(),
        "--dim".into(),
        dim.to_string(),
        "--bases".into(),
        bases.to_string(),
        "--steps".into(),
        "201".into(),
        "--out".into(),
        path.display().to_string(),
        "--no-timestamp".into(),
    ]);
    assert_eq!(code, 0);
    parse_curve_csv(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

#[test]
fn criterion_8_figure_structure() {
    let start = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for (dim, bases, expected) in [(3, 2, 0.211_325), (3, 3, 0.2247), (4, 2, 0.25)] {
        let rows = curves_csv(dim, bases);
        let ab_decreasing = rows.windows(2).all(|p| p[1][2] < p[0][2]);
        let ae_increasing = rows.windows(2).all(|p| p[1][3] > p[0][3]);
        let gap = |r: &[f64; 6]| r[3] - r[2];
        let changes: Vec<usize> = (0..rows.len() - 1)
            .filter(|&k| (gap(&rows[k]) < 0.0) != (gap(&rows[k + 1]) < 0.0))
            .collect();
        let bracket = changes
            .first()
            .map(|&k| (rows[k][0], rows[k + 1][0]))
            .unwrap_or((f64::NAN, f64::NAN));
        let ok = ab_decreasing
            && ae_increasing
            && changes.len() == 1
            && bracket.0 <= expected + 5e-4
            && expected - 5e-4 <= bracket.1;
        pass &= ok;
        details.push(format!(
            "d={dim}/{bases} bases: crossing in [{:.5}, {:.5}]{}",
            bracket.0,
            bracket.1,
            if ok { "" } else { " (shape violated)" }
        ));
    }
    let elapsed = start.elapsed();
    report(
        8,
        "curves: I_AB falls, I_AE rises, one crossing at D_c",
        pass,
        elapsed,
        &details.join("; "),
    );
    assert!(pass);
}
