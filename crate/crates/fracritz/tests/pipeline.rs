//! Cross-module integration checks: scheme-level convergence behaviour,
//! reference-mode agreement, fit-range stability, emission determinism,
//! and thread-safety of shared immutable state.

use fracritz::assembly::assemble;
use fracritz::basis::{m_norm, sine_coeffs, CoeffVector, SineBasis};
use fracritz::bifurcation::{
    euler_eigenfunction, euler_lambda, nu1, BifurcationSpec, EulerReference,
};
use fracritz::expr::DensitySpec;
use fracritz::harness::emit::{csv_string, json_string};
use fracritz::harness::{fit_loglog, run_sweep, ReferenceMode, SweepConfig};
use fracritz::quadrature::PanelScheme;
use fracritz::ritz::{align_sign, normalize_h0, solve, aposteriori_check, TauScheme};
use std::f64::consts::E;

fn euler_grams(n: usize, with_t0: bool) -> fracritz::assembly::GramSet {
    let density = DensitySpec::preset("euler").unwrap();
    let basis = SineBasis::new(1.0, E, n);
    let scheme = PanelScheme::default_for(n, 1);
    assemble(&density, &basis, n, &scheme, with_t0).unwrap()
}

#[test]
fn eigenvalue_slopes_per_scheme() {
    // regular tracks the order-7 tail; harmonic and dual are asserted
    // loosely against their slower/faster theoretical orders
    let grams = euler_grams(24, true);
    let lam1 = euler_lambda(1);
    let mut slopes = Vec::new();
    for scheme in [TauScheme::Regular, TauScheme::Harmonic, TauScheme::Dual] {
        let pts: Vec<(f64, f64)> = (8..=24)
            .map(|n| {
                let sol = solve(&grams, scheme, n).unwrap();
                (n as f64, sol.values[0] - lam1)
            })
            .collect();
        slopes.push((scheme, fit_loglog(&pts).unwrap().slope));
    }
    let slope_of = |s: TauScheme| slopes.iter().find(|(t, _)| *t == s).unwrap().1;
    assert!(
        (slope_of(TauScheme::Regular) + 7.0).abs() <= 0.5,
        "regular slope {}",
        slope_of(TauScheme::Regular)
    );
    assert!(slope_of(TauScheme::Harmonic) <= -4.0);
    assert!(slope_of(TauScheme::Dual) <= -7.5);
}

#[test]
fn regular_gap_at_n20_matches_reference_value() {
    // the n = 20 reference figure: Lambda_1 - lambda_1 = 2.795e-8
    let grams = euler_grams(20, false);
    let sol = solve(&grams, TauScheme::Regular, 20).unwrap();
    let gap = sol.values[0] - euler_lambda(1);
    assert!(
        (gap / 2.795e-8 - 1.0).abs() < 1e-3,
        "gap {gap:.6e} vs 2.795e-8"
    );
}

#[test]
fn ritz_values_bound_exact_for_first_three_modes() {
    let grams = euler_grams(24, true);
    for scheme in [TauScheme::Regular, TauScheme::Harmonic, TauScheme::Dual] {
        let mut prev: Option<Vec<f64>> = None;
        for n in 4..=24 {
            let sol = solve(&grams, scheme, n).unwrap();
            for j in 0..3 {
                assert!(sol.values[j] >= euler_lambda(j + 1) - 1e-10);
                if let Some(p) = &prev {
                    assert!(sol.values[j] <= p[j] + 1e-10);
                }
            }
            prev = Some(sol.values[..3].to_vec());
        }
    }
}

#[test]
fn nu1_error_rates_are_high_order() {
    // measured (and independently cross-checked) slopes over n in 8..=20:
    // -7.08 (t=1), -7.67 (t=2), -7.89 (t=3); all far ahead of the
    // guaranteed -3.5 energy-norm rate
    let config = SweepConfig {
        n_min: 8,
        n_max: 20,
        fit_lo: Some(8),
        fit_hi: Some(20),
        taus: vec![],
        ts: vec![1, 2, 3],
        ..SweepConfig::euler_default()
    };
    let report = run_sweep(&config).unwrap();
    let windows = [
        ("err_nu1_t1", -7.4, -6.8),
        ("err_nu1_t2", -8.0, -7.3),
        ("err_nu1_t3", -8.2, -7.6),
    ];
    for (quantity, lo, hi) in windows {
        let slope = report
            .fits
            .iter()
            .find(|f| f.quantity == quantity)
            .unwrap()
            .fit
            .slope;
        assert!(
            (lo..=hi).contains(&slope),
            "{quantity}: slope {slope} outside [{lo}, {hi}]"
        );
    }
    // every nu1 along the sweep is negative (subcritical branch)
    for row in &report.rows {
        for &v in &row.nu1 {
            assert!(v < 0.0);
        }
    }
}

#[test]
fn aposteriori_rhs_shrinks_with_n() {
    let reference = EulerReference::new(512);
    let (_, coeffs) = reference.exact(1);
    let exacts = vec![coeffs];
    let lambdas = [euler_lambda(1), euler_lambda(2)];
    let grams = euler_grams(24, false);
    let mut prev_rhs = f64::INFINITY;
    for n in [8usize, 12, 16, 20, 24] {
        let sol = solve(&grams, TauScheme::Regular, n).unwrap();
        let report = aposteriori_check(&sol, &exacts, &lambdas, 1, 0.5, &reference.basis).unwrap();
        assert!(report.lhs >= 0.0);
        assert!(report.lhs <= report.rhs);
        assert!(report.rhs < prev_rhs);
        assert!(report.delta > 0.0);
        prev_rhs = report.rhs;
    }
}

#[test]
fn tail_ratio_bounded_for_exact_coefficients() {
    // the boundedness condition behind rate transfer, on a shorter
    // reference than the acceptance run
    let reference = EulerReference::new(256);
    let (_, coeffs) = reference.exact(1);
    for tau in [0.75, 1.0, 1.25] {
        for n in (4..=48).step_by(4) {
            let ratio = fracritz::ritz::tail_ratio(&coeffs, &reference.basis, tau, n).unwrap();
            let scaled = ratio / reference.basis.mu(n + 1).powf(2.0 * tau - 1.0);
            assert!(scaled <= 10.0, "tau={tau} n={n}: {scaled}");
        }
    }
}

#[test]
fn nu1_scheme_difference_shrinks() {
    // harmonic- and regular-scheme nu1 approach the same limit
    let density = DensitySpec::preset("euler").unwrap();
    let basis = SineBasis::new(1.0, E, 24);
    let scheme = PanelScheme::default_for(24, 1);
    let grams = assemble(&density, &basis, 24, &scheme, false).unwrap();
    let reference = EulerReference::new(64).exact(1).1;
    let spec = BifurcationSpec::new(1, 1, 1);
    let mut prev = f64::INFINITY;
    for n in 12..=24 {
        let nu = |tag: TauScheme| {
            let sol = align_sign(
                normalize_h0(solve(&grams, tag, n).unwrap(), &grams.s0),
                &reference,
            );
            nu1(&sol, &density, &spec, &basis, &scheme).unwrap()
        };
        let diff = (nu(TauScheme::Harmonic) - nu(TauScheme::Regular)).abs();
        assert!(diff <= prev + 1e-12, "n={n}: {diff} vs {prev}");
        prev = diff;
    }
    assert!(prev < 2e-5);
}

#[test]
fn reference_modes_agree() {
    // error curves against the exact eigenpair and against a high-n solve
    // stay close for n <= 20 (the tau = 1 norm is the loosest; measured
    // worst deviation is just above 5%)
    let base = SweepConfig {
        n_min: 8,
        n_max: 20,
        fit_lo: Some(8),
        fit_hi: Some(20),
        taus: vec![0.0, 0.5, 1.0],
        ts: vec![],
        ..SweepConfig::euler_default()
    };
    let exact = run_sweep(&base).unwrap();
    let mut config = base.clone();
    config.reference = ReferenceMode::HighN;
    let high_n = run_sweep(&config).unwrap();
    for (re, rh) in exact.rows.iter().zip(&high_n.rows) {
        assert_eq!(re.n, rh.n);
        for ((&tau, &ee), &eh) in base.taus.iter().zip(&re.err_tau).zip(&rh.err_tau) {
            let dev = (ee - eh).abs() / ee;
            let max_dev = if tau >= 1.0 { 0.06 } else { 0.05 };
            assert!(
                dev <= max_dev,
                "n={} tau={}: deviation {:.3}",
                re.n,
                tau,
                dev
            );
        }
    }
}

#[test]
fn fit_range_stability() {
    let mut config = SweepConfig::euler_default();
    config.n_min = 8;
    config.n_max = 20;
    config.taus = vec![];
    config.ts = vec![];
    config.fit_lo = Some(8);
    config.fit_hi = Some(20);
    let wide = run_sweep(&config).unwrap();
    config.fit_lo = Some(10);
    let narrow = run_sweep(&config).unwrap();
    let slope = |r: &fracritz::harness::ConvergenceReport| r.fits[0].fit.slope;
    assert!((slope(&wide) - slope(&narrow)).abs() < 0.5);
}

#[test]
fn outputs_are_deterministic() {
    let mut config = SweepConfig::euler_default();
    config.n_min = 8;
    config.n_max = 14;
    config.fit_lo = Some(8);
    config.fit_hi = Some(14);
    config.taus = vec![0.5];
    config.ts = vec![1];
    let a = run_sweep(&config).unwrap();
    let b = run_sweep(&config).unwrap();
    assert_eq!(csv_string(&a), csv_string(&b));
    assert_eq!(json_string(&a).unwrap(), json_string(&b).unwrap());
}

#[test]
fn shared_state_is_thread_safe() {
    // immutable inputs may be used from any number of threads
    let density = DensitySpec::preset("euler").unwrap();
    let basis = SineBasis::new(1.0, E, 16);
    let scheme = PanelScheme::default_for(16, 1);
    let grams = assemble(&density, &basis, 16, &scheme, true).unwrap();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (tag, n) in [
            (TauScheme::Regular, 16usize),
            (TauScheme::Harmonic, 12),
            (TauScheme::Dual, 10),
            (TauScheme::Regular, 8),
        ] {
            let grams = &grams;
            let density = &density;
            handles.push(scope.spawn(move || {
                let sol = solve(grams, tag, n).unwrap();
                let x = 1.0 + 0.3 * n as f64 / 16.0;
                density.eval(x) + sol.values[0]
            }));
        }
        for h in handles {
            assert!(h.join().unwrap().is_finite());
        }
    });
}

#[test]
fn exact_coefficients_track_the_eigenfunction() {
    // synthesis of the computed coefficients reproduces the closed form
    let reference = EulerReference::new(128);
    let (_, coeffs) = reference.exact(2);
    for x in [1.1, 1.6, 2.2, 2.7] {
        let synth = fracritz::basis::synth(&coeffs, &reference.basis, x, 0);
        let exact = euler_eigenfunction(2, x);
        assert!((synth - exact).abs() < 1e-6, "x={x}");
    }
    // and the tau = 0 norm is the plain L2 norm of the eigenfunction
    let scheme = PanelScheme::new(16, 128);
    let l2 =
        fracritz::quadrature::integrate(|x| euler_eigenfunction(2, x).powi(2), 1.0, E, &scheme)
            .sqrt();
    assert!((m_norm(&coeffs, &reference.basis, 0.0) - l2).abs() < 1e-8);

    // sanity: sine_coeffs on a basis function is a unit vector
    let basis = SineBasis::new(1.0, E, 8);
    let c = sine_coeffs(|x| basis.eval(5, x, 0), &basis, &scheme);
    let expect = CoeffVector::unit(8, 5);
    for k in 1..=8 {
        assert!((c.get(k) - expect.get(k)).abs() < 1e-12);
    }
}
