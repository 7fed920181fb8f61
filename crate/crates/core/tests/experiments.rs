use adiabatic_search::experiments::{
    linear_comparison_trace, minimal_time_with, optimality_check_with, scaling_sweep_with,
    EngineChoice, PairMode, SearchOptions,
};
use adiabatic_search::{
    fit_power_law, local_time_of_s, local_total_time, minimal_time, optimality_check,
    schedule_trace, spectrum_trace, Error, IntegratorConfig, Schedule, ScheduleFamily,
};

const SWEEP_SIZES: [usize; 6] = [16, 32, 64, 128, 256, 512];

#[test]
fn spectrum_trace_shape() {
    let rows = spectrum_trace(64, 101).unwrap();
    assert_eq!(rows.len(), 101);
    assert!((rows[50].s - 0.5).abs() < 1e-15);
    assert!((rows[50].gap - 0.125).abs() < 1e-12);
    for end in [&rows[0], &rows[100]] {
        assert!((end.gap - 1.0).abs() < 1e-12);
        assert!(end.e0.abs() < 1e-12);
    }
    for r in &rows {
        assert!((r.e0 + r.e1 - 1.0).abs() < 1e-14);
        assert_eq!(r.e2, 1.0);
    }
    assert!(spectrum_trace(64, 1).is_err());
}

#[test]
fn schedule_trace_shape() {
    let (n, eps) = (64, 0.1);
    let rows = schedule_trace(n, eps, 201).unwrap();
    let total = local_total_time(n, eps).unwrap();
    assert_eq!((rows[0].t, rows[0].s), (0.0, 0.0));
    assert!((rows[200].t - total).abs() < 1e-9);
    assert_eq!(rows[200].s, 1.0);
    assert!((rows[100].s - 0.5).abs() < 1e-12);
    assert!((rows[100].rate - eps / n as f64).abs() < 1e-10);

    let linear = linear_comparison_trace(n, eps, 201).unwrap();
    for (l, r) in linear.iter().zip(&rows) {
        assert_eq!(l.t, r.t);
        assert!((l.s - l.t / total).abs() < 1e-15);
    }
}

#[test]
fn minimal_time_near_initial_overlap() {
    let cfg = IntegratorConfig::default();
    let t = minimal_time(4, ScheduleFamily::LocalAdiabatic, 0.26, &cfg, 1e-4).unwrap();
    assert!(t > 0.0 && t < 1.0, "{t}");
    assert!(matches!(
        minimal_time(4, ScheduleFamily::Linear, 0.25, &cfg, 1e-4),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn minimal_time_against_closed_form_scales() {
    let cfg = IntegratorConfig::default();
    let n = 64;
    let local = minimal_time(n, ScheduleFamily::LocalAdiabatic, 0.99, &cfg, 1e-4).unwrap();
    // the eps = 0.1 closed form is a conservative upper scale
    assert!(local <= local_total_time(n, 0.1).unwrap());
    let matched_eps = local_time_of_s(1.0, n, 0.5).unwrap() * 0.5 / local;
    let linear = minimal_time(n, ScheduleFamily::Linear, 0.99, &cfg, 1e-4).unwrap();
    let scale = n as f64 / matched_eps;
    assert!(linear / scale < 2.0 && scale / linear < 2.0, "{linear} vs {scale}");
    assert!(linear > local);
}

#[test]
fn minimal_time_bracket_cap() {
    let opts = SearchOptions {
        time_cap: 4.0,
        ..SearchOptions::default()
    };
    let err = minimal_time_with(
        256,
        ScheduleFamily::Linear,
        0.99,
        &IntegratorConfig::default(),
        &opts,
    )
    .unwrap_err();
    assert!(matches!(err, Error::BracketNotFound { .. }));
}

#[test]
fn full_and_reduced_searches_agree() {
    let cfg = IntegratorConfig::default();
    let run = |engine| {
        let opts = SearchOptions {
            engine,
            tolerance: 1e-6,
            ..SearchOptions::default()
        };
        minimal_time_with(32, ScheduleFamily::LocalAdiabatic, 0.9, &cfg, &opts).unwrap()
    };
    let full = run(EngineChoice::Full);
    let reduced = run(EngineChoice::Reduced);
    assert!(((full - reduced) / full).abs() < 1e-5, "{full} vs {reduced}");
}

#[test]
fn power_law_fits() {
    let exact: Vec<(f64, f64)> = (1..8).map(|k| (k as f64, 3.0 * (k * k) as f64)).collect();
    let fit = fit_power_law(&exact).unwrap();
    assert!((fit.exponent - 2.0).abs() < 1e-12);
    assert!((fit.prefactor - 3.0).abs() < 1e-12);
    assert!(fit.residual < 1e-12);

    let flat: Vec<(f64, f64)> = (1..5).map(|k| (k as f64, 7.0)).collect();
    assert!(fit_power_law(&flat).unwrap().exponent.abs() < 1e-12);

    // deterministic 1% multiplicative noise
    let noise = [0.01, -0.01, 0.007, -0.004, 0.0, -0.009];
    let noisy: Vec<(f64, f64)> = SWEEP_SIZES
        .iter()
        .zip(noise)
        .map(|(&x, e)| (x as f64, (x as f64).sqrt() * (1.0 + e)))
        .collect();
    assert!((fit_power_law(&noisy).unwrap().exponent - 0.5).abs() < 0.03);

    assert!(matches!(
        fit_power_law(&[(1.0, 1.0)]),
        Err(Error::InsufficientPoints { .. })
    ));
    assert!(matches!(
        fit_power_law(&[(1.0, 1.0), (2.0, -1.0)]),
        Err(Error::NonPositiveData { .. })
    ));
}

#[test]
fn sweep_rejects_bad_size_lists() {
    let cfg = IntegratorConfig::default();
    let opts = SearchOptions::default();
    let fam = ScheduleFamily::LocalAdiabatic;
    assert!(matches!(
        scaling_sweep_with(&[16], fam, 0.9, &cfg, &opts),
        Err(Error::InsufficientPoints { .. })
    ));
    assert!(scaling_sweep_with(&[16, 32, 32, 64], fam, 0.9, &cfg, &opts).is_err());
    assert!(scaling_sweep_with(&[16, 20, 24, 32], fam, 0.9, &cfg, &opts).is_err());
}

#[test]
fn sweep_exponents_are_stable() {
    let base = IntegratorConfig::default();
    let half_step = IntegratorConfig::fixed(0.005);
    let coarse = SearchOptions::default();
    let fine = SearchOptions {
        tolerance: coarse.tolerance / 2.0,
        ..coarse
    };
    for (family, expected) in [(ScheduleFamily::LocalAdiabatic, 0.5), (ScheduleFamily::Linear, 1.0)] {
        let a = scaling_sweep_with(&SWEEP_SIZES, family, 0.9, &base, &coarse).unwrap();
        assert!((a.exponent - expected).abs() < 0.05, "{family}: {}", a.exponent);
        let b = scaling_sweep_with(&SWEEP_SIZES, family, 0.9, &half_step, &fine).unwrap();
        assert!((a.exponent - b.exponent).abs() < 0.02, "{family}: {} vs {}", a.exponent, b.exponent);
        assert!(a.points.windows(2).all(|w| w[1].size > w[0].size));
        assert!(a.points.iter().all(|p| p.t_min > 0.0));
    }
}

#[test]
fn appendix_bound_holds_for_local_schedules() {
    let cfg = IntegratorConfig::default();
    for n in [4usize, 8, 16] {
        let sch = Schedule::local_adiabatic(n, 0.1).unwrap();
        let r = optimality_check(n, &sch, &cfg).unwrap();
        assert!(r.d_final >= 0.0 && r.d_final <= r.bound && r.margin > 0.0, "N={n}");
        assert!(r.distinguishes_all_pairs);
        assert!(r.total_time >= r.lower_bound_time);
        assert!(r.lower_bound_satisfied);
        assert_eq!(r.pair_mode, PairMode::AllPairs);
        let nf = n as f64;
        assert!((r.lower_bound_time - 0.5 / 4.0 * (nf - 1.0) / nf.sqrt()).abs() < 1e-15);
    }
}

#[test]
fn appendix_bound_holds_across_durations() {
    // the inequality must hold for any schedule, including ones too short to search
    let cfg = IntegratorConfig::default();
    for family in [ScheduleFamily::Linear, ScheduleFamily::LocalAdiabatic] {
        for t in [0.5, 2.0, 8.0, 30.0] {
            let sch = family.with_duration(8, t).unwrap();
            let r = optimality_check_with(8, &sch, &cfg, 0.3).unwrap();
            assert!(r.d_final <= r.bound, "{family} T={t}");
            assert!(r.lower_bound_satisfied);
        }
    }
    let sch = Schedule::local_adiabatic(32, 0.1).unwrap();
    let r = optimality_check(32, &sch, &cfg).unwrap();
    assert_eq!(r.pair_mode, PairMode::Symmetry);
    assert!(r.margin > 0.0 && r.distinguishability.is_none());
}
