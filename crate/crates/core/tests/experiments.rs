use besov_core::besov::{besov_norm, z_norm, BesovIndex, Exponent, TimeExponent};
use besov_core::experiments::{
    calibrate_constants, class_coincidence, datum_with_g0, default_class_tuples, make_initial_data, run_property_suites,
    scaling_experiment, taylor_green_2d, verify_calibration, CalibrationSettings, CorpusSpec, DataKind, DataParams,
    VerifyOptions,
};
use besov_core::solver::{picard_solve, CalibrationTable, SolverConfig};
use besov_core::spectral::{leray_project, Grid, LittlewoodPaley, SpectralField};

fn small_options() -> VerifyOptions {
    VerifyOptions { size_2d: 32, size_3d: 16, fields: 6, calibration_fields: 4, ..VerifyOptions::default() }
}

fn calibration() -> CalibrationTable {
    verify_calibration(&small_options()).unwrap().table
}

#[test]
fn gradient_fields_lie_in_the_leray_kernel() {
    for dim in [2, 3] {
        let grid = Grid::new(dim, 16).unwrap();
        let mut p = DataParams::new(DataKind::GradientField { sigma: -0.25 }, 11);
        p.max_wavenumber = 7.0;
        let g = make_initial_data(grid, &p).unwrap();
        assert!(g.l2_norm() > 0.0);
        assert!(leray_project(&g).unwrap().l2_norm() < 1e-14 * g.l2_norm());
    }
}

#[test]
fn taylor_green_is_divergence_free_and_mean_zero() {
    let f = taylor_green_2d(Grid::new(2, 32).unwrap()).unwrap();
    assert!(f.homogeneous());
    assert_eq!(f.mode(0, &[0, 0]).norm() + f.mode(1, &[0, 0]).norm(), 0.0);
    assert!(f.divergence().unwrap().max_coeff() < 1e-16);
    assert!(taylor_green_2d(Grid::new(3, 8).unwrap()).is_err());
}

#[test]
fn random_besov_hits_its_amplitude_and_is_flat_across_shells() {
    let grid = Grid::new(2, 64).unwrap();
    let lp = LittlewoodPaley::standard(grid);
    for eps in [0.25, 0.5, 0.75] {
        for seed in 0..5 {
            let sigma = -1.0 + eps;
            let mut p = DataParams::new(DataKind::RandomBesov { sigma, p: Exponent::INFINITY }, seed);
            p.amplitude = 0.7;
            p.max_wavenumber = 31.0;
            let f = make_initial_data(grid, &p).unwrap();
            let report = besov_norm(&lp, &f, BesovIndex::sup(sigma)).unwrap();
            assert!((report.value / 0.7 - 1.0).abs() <= 0.2, "eps {eps} seed {seed}: {}", report.value);
            let populated: Vec<f64> = report.per_shell.iter().map(|s| s.1).filter(|v| *v > 0.05 * report.value).collect();
            let (lo, hi) = populated.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
            assert!(hi / lo <= 1.2 / 0.8, "eps {eps} seed {seed}: shells in [{lo}, {hi}]");
        }
    }
}

#[test]
fn unknown_data_kind_is_rejected() {
    assert!(matches!("vortex_sheet".parse::<DataKind>(), Err(besov_core::Error::UnknownDataKind(_))));
}

#[test]
fn calibration_entries_grow_with_the_corpus() {
    let settings = CalibrationSettings { eps: vec![0.5], horizons: vec![0.1, 1.0], steps: 8, ..Default::default() };
    let spec = |count| {
        let mut s = CorpusSpec::new(count, 2, 16, DataKind::RandomSmooth { decay: 1.0 }, 99);
        s.data.max_wavenumber = 6.0;
        s.data.divergence_free = true;
        s
    };
    let small = calibrate_constants(&[spec(3)], &settings).unwrap();
    let large = calibrate_constants(&[spec(6)], &settings).unwrap();
    for entry in &small.ratios {
        let grown = large.entry(&entry.name, &entry.description).expect("entry present in both");
        assert!(grown.worst >= entry.worst, "{} {}: {} < {}", entry.name, entry.description, grown.worst, entry.worst);
    }
    let (a, b) = (&small.table.eps[0], &large.table.eps[0]);
    assert!(b.a_phi >= a.a_phi && b.a_tilde >= a.a_tilde && b.heat_z >= a.heat_z && b.heat_y >= a.heat_y);
}

#[test]
fn doubling_the_amplitude_divides_the_horizon_by_sixteen_at_half_eps() {
    let calib = calibration();
    let lp = LittlewoodPaley::standard(Grid::new(2, 32).unwrap());
    let config = SolverConfig::new(0.5, 1.0, 16).unwrap();
    let f = datum_with_g0(&lp, 5, 0.05, &config, &calib).unwrap();
    let report = scaling_experiment(&lp, &f, &[1.0, 2.0], 0.5, 16, &calib).unwrap();
    assert!(report.pass, "{}", report.summary());
    let t = |name: &str| report.case(name).unwrap().metric("guaranteed_T").unwrap().value;
    assert!((t("lambda_2") / t("lambda_1") - 1.0 / 16.0).abs() <= 1e-12 / 16.0);
    assert_eq!(report.case("lambda_1").unwrap().metric("horizon_relation_error").unwrap().value, 0.0);
}

#[test]
fn coincidence_on_zero_data_reports_zero_norms() {
    let calib = calibration();
    let grid = Grid::new(2, 32).unwrap();
    let lp = LittlewoodPaley::standard(grid);
    let zero = SpectralField::zeros(grid, 2, true);
    let config = SolverConfig::new(0.5, 0.5, 8).unwrap();
    let report = class_coincidence(&lp, &zero, &default_class_tuples(2, 0.5), &config, &calib).unwrap();
    assert!(report.pass, "{}", report.summary());
    for case in &report.cases {
        assert_eq!(case.metric("x_norm").unwrap().value, 0.0, "{}", case.name);
    }
}

#[test]
fn coincidence_on_taylor_green_follows_the_decay() {
    let calib = calibration();
    let grid = Grid::new(2, 32).unwrap();
    let lp = LittlewoodPaley::standard(grid);
    let f = taylor_green_2d(grid).unwrap().scaled(0.5);
    let tuples = default_class_tuples(2, 0.5);
    assert!(tuples.len() >= 2);
    let config = SolverConfig::new(0.5, 0.25, 8).unwrap();
    let report = class_coincidence(&lp, &f, &tuples, &config, &calib).unwrap();
    assert!(report.pass, "{}", report.summary());
    for case in &report.cases {
        let x = case.metric("x_norm").unwrap().value;
        assert!(x.is_finite() && x > 0.0, "{}: {x}", case.name);
    }
    let mut monitored = config.clone();
    monitored.monitored = vec![(TimeExponent::INFINITY, Exponent::new(2.0).unwrap(), 0.5)];
    let run = picard_solve(&lp, &f, &monitored, &calib).unwrap();
    for (m, u) in run.record.u.values().iter().enumerate() {
        let t = run.record.u.time().node(m);
        assert!(u.relative_l2_distance(&f.scaled((-2.0 * t).exp()), 1e-300).unwrap() < 1e-12);
    }
}

#[test]
fn picard_preserves_divergence_freedom() {
    let calib = calibration();
    let lp = LittlewoodPaley::standard(Grid::new(2, 32).unwrap());
    let config = SolverConfig::new(0.5, 1.0, 16).unwrap();
    let f = datum_with_g0(&lp, 21, 0.15, &config, &calib).unwrap();
    let run = picard_solve(&lp, &f, &config, &calib).unwrap();
    assert!(run.trace.converged);
    for u in run.record.u.values().iter().skip(1) {
        assert!(u.relative_divergence().unwrap() < 1e-12);
    }
}

#[test]
fn step_refinement_barely_moves_the_z_norm_on_smooth_data() {
    let calib = calibration();
    let lp = LittlewoodPaley::standard(Grid::new(2, 32).unwrap());
    let coarse = SolverConfig::new(0.5, 1.0, 16).unwrap();
    let f = datum_with_g0(&lp, 31, 0.1, &coarse, &calib).unwrap();
    let z = |steps| {
        let config = SolverConfig::new(0.5, 1.0, steps).unwrap();
        let run = picard_solve(&lp, &f, &config, &calib).unwrap();
        z_norm(&lp, &run.record.u, -0.5, Exponent::INFINITY, Exponent::INFINITY).unwrap().value
    };
    let (a, b) = (z(16), z(32));
    assert!((a - b).abs() / b < 1e-6, "{a} vs {b}");
}

#[test]
fn scaled_phi_breaks_the_partition_suite() {
    let opts = VerifyOptions { suites: vec!["cutoff_axioms".into()], phi_scale: 0.99, ..small_options() };
    let report = run_property_suites(&opts).unwrap();
    assert!(!report.pass);
    let case = report.case("cutoff_axioms").unwrap();
    assert!(!case.metric("partition_of_unity").unwrap().pass);
    assert!(case.reproduce.contains("--phi-scale 0.99"));
}

#[test]
fn verify_is_deterministic_and_reports_unknown_suites() {
    let opts = VerifyOptions { suites: vec!["leray".into(), "duhamel".into(), "no_such_suite".into()], ..small_options() };
    let a = serde_json::to_string(&run_property_suites(&opts).unwrap()).unwrap();
    let b = run_property_suites(&opts).unwrap();
    assert_eq!(a, serde_json::to_string(&b).unwrap());
    assert!(b.case("leray").unwrap().pass && b.case("duhamel").unwrap().pass);
    assert!(!b.case("no_such_suite").unwrap().pass);
}
