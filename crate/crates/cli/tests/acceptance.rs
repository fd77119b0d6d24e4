//! Acceptance gate: criteria 1 through 13, one PASS/FAIL line each.
//!
//! Each criterion needs both the matching case of a default `verify` run through
//! the CLI and an oracle computed here from closed forms or a separate route.

use std::fs;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde_json::Value;

use besov_core::besov::{inequality_suite, z_norm, ConstantKind, Exponent, TimeGrid, TimeSeriesField};
use besov_core::experiments::{
    datum_with_g0, make_initial_data, scaling_experiment, taylor_green_2d, verify_calibration, DataKind, DataParams,
    VerifyOptions,
};
use besov_core::io::read_snapshot;
use besov_core::paraproduct::{bony_product, pdiv_blockwise, pointwise_tensor};
use besov_core::solver::{
    bilinear, duhamel, picard_solve, picard_solve_perturbed, BilinearForm, CalibrationTable, SolverConfig,
};
use besov_core::spectral::{
    forward_transform, gradient, heat_flow, inverse_transform, leray_project, pdiv, CutoffPair, Grid, LittlewoodPaley,
    PhysicalField, SpectralField,
};

type Check = Result<String, String>;

fn ensure(ok: bool, what: String) -> Check {
    if ok {
        Ok(what)
    } else {
        Err(what)
    }
}

fn core(e: impl std::fmt::Display) -> String {
    format!("error: {e}")
}

fn run_cli(args: &[&str]) -> i32 {
    besov_cli::run(std::iter::once("besov-ns").chain(args.iter().copied()))
}

fn random_fields(grid: Grid, count: usize, seed: u64, kind: DataKind, radius: f64, components: usize) -> Vec<SpectralField> {
    (0..count as u64)
        .map(|i| {
            let mut p = DataParams::new(kind, seed + i);
            p.max_wavenumber = radius;
            p.components = Some(components);
            make_initial_data(grid, &p).expect("corpus field")
        })
        .collect()
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm().max(1e-300)
}

/// Frequency vector of flat coefficient index `i`.
fn freq(grid: Grid, i: usize) -> [f64; 3] {
    let k = grid.frequency(i % grid.len());
    [k[0] as f64, k[1] as f64, k[2] as f64]
}

fn criterion_1() -> Check {
    let pair = CutoffPair::default();
    let mut worst = 0.0f64;
    let samples = 100_000;
    for i in 0..samples {
        let r = 2f64.powf(-8.0 + 20.0 * (i as f64 + 0.5) / samples as f64);
        let phi = |j: i32| pair.phi(r / 2f64.powi(j));
        let chi = pair.chi(r);
        let all: Vec<f64> = (-30..=30).map(phi).collect();
        worst = worst.max((all.iter().sum::<f64>() - 1.0).abs());
        worst = worst.max((chi + (0..=30).map(phi).sum::<f64>() - 1.0).abs());
        worst = worst.max((pair.phi(r) - (pair.chi(r / 2.0) - pair.chi(r))).abs());
        if r >= 4.0 / 3.0 {
            worst = worst.max(chi);
        }
        if r <= 0.75 {
            worst = worst.max((chi - 1.0).abs());
        }
        if r <= 0.75 || r >= 8.0 / 3.0 {
            worst = worst.max(pair.phi(r).abs());
        }
        for (a, x) in all.iter().enumerate() {
            worst = worst.max(-x).max(x - 1.0);
            for y in all.iter().skip(a + 2) {
                worst = worst.max(x * y);
            }
        }
        worst = worst.max(-chi).max(chi - 1.0);
    }
    ensure(worst <= 1e-12, format!("largest axiom defect {worst:e} over {samples} radii"))
}

fn criterion_2() -> Check {
    let grid = Grid::new(2, 64).unwrap();
    let lp = LittlewoodPaley::standard(grid);
    let fields = random_fields(grid, 50, 7001, DataKind::RandomBesov { sigma: -0.5, p: Exponent::INFINITY }, 31.0, 2);
    let mut worst = 0.0f64;
    for u in &fields {
        let mut sum = SpectralField::zeros(grid, u.components(), true);
        for j in lp.range().iter() {
            sum.axpy(1.0, &lp.block(u, j).map_err(core)?).map_err(core)?;
        }
        worst = worst.max(rel(&sum, u));
    }
    ensure(worst < 1e-10, format!("worst reconstruction error {worst:e} on 50 fields"))
}

fn criterion_3() -> Check {
    let grid = Grid::new(2, 64).unwrap();
    let lp = LittlewoodPaley::standard(grid);
    let fields = random_fields(grid, 50, 7101, DataKind::RandomBesov { sigma: -0.5, p: Exponent::INFINITY }, 31.0, 1);
    let (mut lo, mut hi, mut excess) = (f64::INFINITY, 0.0f64, f64::NEG_INFINITY);
    for u in &fields {
        for j in lp.range().iter() {
            let b = lp.block(u, j).map_err(core)?;
            let norm = b.l2_norm();
            if norm == 0.0 {
                continue;
            }
            let ratio = gradient(&b).map_err(core)?.l2_norm() / (2f64.powi(j) * norm);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            for t in [1e-3, 1e-2, 0.1] {
                let bound = (-(9.0 / 16.0) * t * 4f64.powi(j)).exp() * norm;
                let flowed = heat_flow(&b, t).map_err(core)?.l2_norm();
                excess = excess.max((flowed - bound) / norm);
            }
        }
    }
    ensure(
        lo >= 0.75 - 1e-12 && hi <= 8.0 / 3.0 + 1e-12 && excess <= 1e-12,
        format!("gradient/block ratios in [{lo:.4}, {hi:.4}], heat bound excess {excess:e}"),
    )
}

fn criterion_4() -> Check {
    let grid = Grid::new(2, 64).unwrap();
    let gradients = random_fields(grid, 50, 7201, DataKind::GradientField { sigma: -0.5 }, 31.0, 2);
    let mut grad = 0.0f64;
    for g in &gradients {
        grad = grad.max(leray_project(g).map_err(core)?.l2_norm() / g.l2_norm());
    }
    let fields = random_fields(grid, 50, 7301, DataKind::RandomBesov { sigma: -0.5, p: Exponent::INFINITY }, 31.0, 2);
    let (mut idem, mut div) = (0.0f64, 0.0f64);
    for u in &fields {
        let pu = leray_project(u).map_err(core)?;
        idem = idem.max(rel(&leray_project(&pu).map_err(core)?, &pu));
        let (mut num, mut den) = (0.0, 0.0);
        let len = grid.len();
        for i in 0..len {
            let k = freq(grid, i);
            let d: Complex64 = (0..2).map(|c| pu.coeffs()[c * len + i] * k[c]).sum();
            num += d.norm_sqr();
            den += (k[0] * k[0] + k[1] * k[1]) * (0..2).map(|c| pu.coeffs()[c * len + i].norm_sqr()).sum::<f64>();
        }
        div = div.max((num / den.max(1e-300)).sqrt());
    }
    ensure(
        grad < 1e-12 && idem < 1e-12 && div < 1e-12,
        format!("gradient residual {grad:e}, idempotence {idem:e}, divergence {div:e}"),
    )
}

/// Product by sampling both factors and multiplying at the collocation points.
fn direct_product(u: &SpectralField, v: &SpectralField) -> SpectralField {
    let (a, b) = (inverse_transform(u), inverse_transform(v));
    let values = a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect();
    forward_transform(&PhysicalField::new(u.grid(), 1, values).unwrap())
}

fn criterion_5() -> Check {
    let grid = Grid::new(2, 64).unwrap();
    let lp = LittlewoodPaley::standard(grid);
    // Radius 10 keeps every product inside the resolved band.
    let scalars = random_fields(grid, 51, 7401, DataKind::RandomSmooth { decay: 1.0 }, 10.0, 1);
    let mut bony = 0.0f64;
    for w in scalars.windows(2) {
        let direct = direct_product(&w[0], &w[1]);
        bony = bony.max(rel(&bony_product(&lp, &w[0], &w[1]).map_err(core)?, &direct));
    }
    let vectors = random_fields(grid, 51, 7501, DataKind::RandomSmooth { decay: 1.0 }, 10.0, 2);
    let mut blockwise = 0.0f64;
    for w in vectors.windows(2) {
        let t = pointwise_tensor(&w[0], &w[1]).map_err(core)?;
        blockwise = blockwise.max(rel(&pdiv_blockwise(&lp, &t).map_err(core)?, &pdiv(&t).map_err(core)?));
    }
    ensure(
        bony < 1e-10 && blockwise < 1e-12,
        format!("Bony vs sampled product {bony:e} on 50 pairs, blockwise P div {blockwise:e}"),
    )
}

fn criterion_6() -> Check {
    let grid = Grid::new(2, 32).unwrap();
    let time = TimeGrid::new(1.3, 20).unwrap();
    let mut single = 0.0f64;
    for (k, amp) in [([3i64, 1], Complex64::new(1.0, 0.5)), ([-2, 7], Complex64::new(-0.4, 2.0)), ([0, 1], Complex64::new(0.0, -1.0))] {
        let mut w = SpectralField::zeros(grid, 1, true);
        w.set_real_mode(0, &k, amp);
        let g = duhamel(&TimeSeriesField::constant(time, &w)).map_err(core)?;
        let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
        for m in 0..=time.steps() {
            let exact = amp * (1.0 - (-time.node(m) * k2).exp()) / k2;
            single = single.max((g.at(m).mode(0, &k) - exact).norm() / (amp.norm() / k2));
        }
    }
    // w(t) = a sin(3t): ∫₀ᵗ e^{-λ(t-s)} sin(ωs) ds = (λ sin ωt − ω cos ωt + ω e^{-λt}) / (λ² + ω²).
    let omega = 3.0;
    let mut p = DataParams::new(DataKind::RandomSmooth { decay: 2.0 }, 7601);
    p.components = Some(1);
    let a = make_initial_data(grid, &p).map_err(core)?;
    let wn = grid.wavenumbers();
    let mut errors = Vec::new();
    for steps in [8usize, 16, 32, 64] {
        let time = TimeGrid::new(1.0, steps).unwrap();
        let values = time.nodes().iter().map(|t| a.scaled((omega * t).sin())).collect();
        let g = duhamel(&TimeSeriesField::new(time, values).unwrap()).map_err(core)?;
        let mut err = 0.0f64;
        for m in 0..=steps {
            let t = time.node(m);
            let exact = a.apply_radial(&wn, |r| {
                let l = r * r;
                if l == 0.0 {
                    0.0
                } else {
                    (l * (omega * t).sin() - omega * (omega * t).cos() + omega * (-l * t).exp()) / (l * l + omega * omega)
                }
            });
            err = err.max(g.at(m).sub(&exact).unwrap().l2_norm());
        }
        errors.push(err);
    }
    let factors: Vec<f64> = errors.windows(2).map(|e| e[0] / e[1]).collect();
    let in_window = factors.iter().all(|f| (f - 4.0).abs() <= 0.8);
    ensure(
        single < 1e-12 && in_window,
        format!("single-mode error {single:e}, halving factors {factors:.3?}"),
    )
}

fn criterion_7(dir: &Path) -> Check {
    let calibration = dir.join("tg_calibration.json");
    let out = dir.join("tg");
    let cal = calibration.to_str().unwrap();
    let code = run_cli(&["calibrate", "--corpus-fields", "6", "--calibration-eps", "0.5", "--calibration", cal, "--output", dir.join("tg_cal").to_str().unwrap()]);
    if code != 0 {
        return Err(format!("calibrate exited {code}"));
    }
    let config = dir.join("tg.conf");
    fs::write(&config, "data = taylor_green_2d\nsize = 32\neps = 0.5\nhorizon = 0.5\nsteps = 16\n").unwrap();
    let code = run_cli(&["solve", "-c", config.to_str().unwrap(), "--calibration", cal, "--output", out.to_str().unwrap()]);
    if code != 0 {
        return Err(format!("solve exited {code}"));
    }
    let grid = Grid::new(2, 32).unwrap();
    // |f(x)|² = cos²x sin²y + sin²x cos²y, maximised over the collocation points.
    let f_inf = (0..grid.len())
        .map(|i| {
            let [x, y, _] = grid.point(i);
            ((x.cos() * y.sin()).powi(2) + (x.sin() * y.cos()).powi(2)).sqrt()
        })
        .fold(0.0, f64::max);
    let csv = fs::read_to_string(out.join("norms.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let (ti, li) = (header.iter().position(|h| *h == "t"), header.iter().position(|h| *h == "linf"));
    let (Some(ti), Some(li)) = (ti, li) else { return Err(format!("unexpected CSV header {header:?}")) };
    let mut csv_error = 0.0f64;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        csv_error = csv_error.max((cols[li] - (-2.0 * cols[ti]).exp() * f_inf).abs());
    }
    let trace: Value = serde_json::from_str(&fs::read_to_string(out.join("trace.json")).unwrap()).unwrap();
    let residual = trace["residual_abs"].as_f64().unwrap_or(f64::INFINITY);
    let f = taylor_green_2d(grid).unwrap();
    let last = read_snapshot(&out.join("snapshots").join("snapshot_00016.bsnf")).map_err(core)?;
    let field_error = rel(&last, &f.scaled((-2.0f64 * 0.5).exp()));
    let nonlinear = pdiv(&pointwise_tensor(&f, &f).map_err(core)?).map_err(core)?.l2_norm() / f.l2_norm();
    ensure(
        nonlinear < 1e-12 && residual < 1e-12 && field_error < 1e-12 && csv_error <= 1e-10,
        format!("P div(f⊗f) {nonlinear:e}, residual {residual:e}, field error {field_error:e}, CSV linf error {csv_error:e}"),
    )
}

fn criterion_8(lp: &LittlewoodPaley, calib: &CalibrationTable) -> Check {
    let config = SolverConfig::new(0.5, 1.0, 16).map_err(core)?;
    let f = datum_with_g0(lp, 8101, 3.0 / 16.0, &config, calib).map_err(core)?;
    let run = picard_solve(lp, &f, &config, calib).map_err(core)?;
    let t = &run.trace;
    let v: Vec<f64> = t.iterates.iter().map(|r| if t.clause == 0 { r.v0 } else { r.v1 }).collect();
    let max_v = v.iter().copied().fold(0.0, f64::max);
    let max_ratio = t.differences.iter().skip(1).filter_map(|d| d.ratio).fold(0.0, f64::max);
    let iterations = t.differences.len();
    ensure(
        (t.g0 - 3.0 / 16.0).abs() < 1e-9 && max_v <= 0.27 && max_ratio <= 0.55 && iterations <= 30 && t.residual_rel < 1e-9,
        format!("g0 {:.4}, max V {max_v:.4}, max ratio {max_ratio:.4}, {iterations} iterations, residual {:e}", t.g0, t.residual_rel),
    )
}

fn criterion_9(lp: &LittlewoodPaley, calib: &CalibrationTable) -> Check {
    let config = SolverConfig::new(0.5, 1.0, 16).map_err(core)?;
    let mut worst = 0.0f64;
    for i in 0..5u64 {
        let f = datum_with_g0(lp, 9100 + 2 * i, 0.125, &config, calib).map_err(core)?;
        let g = datum_with_g0(lp, 9101 + 2 * i, 0.125, &config, calib).map_err(core)?;
        let u = picard_solve(lp, &f, &config, calib).map_err(core)?.record.u;
        let v = picard_solve_perturbed(lp, &f, &g, 0.1, &config, calib).map_err(core)?.record.u;
        let d = z_norm(lp, &u.sub(&v).map_err(core)?, -0.5, Exponent::INFINITY, Exponent::INFINITY).map_err(core)?;
        worst = worst.max(d.value);
    }
    ensure(worst < 1e-8, format!("largest Z distance between standard and perturbed limits {worst:e} on 5 data"))
}

fn criterion_10(lp: &LittlewoodPaley, calib: &CalibrationTable) -> Check {
    let grid = lp.grid();
    let time = TimeGrid::new(0.5, 16).unwrap();
    let fields = random_fields(grid, 3, 10_001, DataKind::RandomSmooth { decay: 1.0 }, 8.0, 2);
    let series = |a: &SpectralField, b: &SpectralField| {
        let values = time
            .nodes()
            .iter()
            .map(|&t| {
                let mut u = heat_flow(a, t).unwrap();
                u.axpy((3.0 * t).cos(), b).unwrap();
                u
            })
            .collect();
        TimeSeriesField::new(time, values).unwrap()
    };
    let (u, v) = (series(&fields[0], &fields[1]), series(&fields[1], &fields[2]));
    let mut semigroup = 0.0f64;
    for form in [BilinearForm::Pointwise, BilinearForm::Bony] {
        let whole = bilinear(lp, form, &u, &v).map_err(core)?;
        for m0 in 1..time.steps() {
            let tail = bilinear(lp, form, &u.shifted(m0).map_err(core)?, &v.shifted(m0).map_err(core)?).map_err(core)?;
            for k in 1..=time.steps() - m0 {
                let mut glued = heat_flow(whole.at(m0), time.node(k)).map_err(core)?;
                glued.axpy(1.0, tail.at(k)).map_err(core)?;
                semigroup = semigroup.max(rel(&glued, whole.at(m0 + k)));
            }
        }
    }
    let config = SolverConfig::new(0.5, 1.0, 16).map_err(core)?;
    let f = datum_with_g0(lp, 10_101, 3.0 / 16.0, &config, calib).map_err(core)?;
    let first = picard_solve(lp, &f, &config, calib).map_err(core)?.record.u;
    let m0 = 8;
    let mut rest = config.clone();
    rest.horizon = config.horizon - first.time().node(m0);
    rest.steps = config.steps - m0;
    rest.override_smallness = true;
    let second = picard_solve(lp, first.at(m0), &rest, calib).map_err(core)?.record.u;
    let mut restart = 0.0f64;
    for k in 0..=rest.steps {
        restart = restart.max(rel(second.at(k), first.at(m0 + k)));
    }
    ensure(
        semigroup < 1e-10 && restart < 1e-8,
        format!("semigroup discrepancy {semigroup:e}, restart overlap {restart:e}"),
    )
}

fn criterion_11(lp: &LittlewoodPaley, calib: &CalibrationTable) -> Check {
    let mut p = DataParams::new(DataKind::RandomSmooth { decay: 2.0 }, 11_001);
    p.divergence_free = true;
    let f = make_initial_data(lp.grid(), &p).map_err(core)?;
    let report = scaling_experiment(lp, &f, &[1.0, 2.0, 4.0], 0.5, 16, calib).map_err(core)?;
    let horizon = |name: &str| report.case(name).and_then(|c| c.metric("guaranteed_T")).map(|m| m.value).unwrap_or(f64::NAN);
    let base = horizon("lambda_1");
    let e2 = (horizon("lambda_2") / base * 16.0 - 1.0).abs();
    let e4 = (horizon("lambda_4") / base * 256.0 - 1.0).abs();
    let converged = report
        .cases
        .iter()
        .all(|c| c.errors.is_empty() && c.metric("converged").is_some_and(|m| m.value == 1.0));
    ensure(
        e2 <= 1e-12 && e4 <= 1e-12 && converged,
        format!("T(2f)/T(f) error vs 1/16 {e2:e}, T(4f)/T(f) error vs 1/256 {e4:e}, all runs converged {converged}"),
    )
}

fn criterion_12(verify: &Value) -> Check {
    let case = verify["cases"].as_array().and_then(|c| c.iter().find(|c| c["name"] == "inequalities"));
    let Some(case) = case else { return Err("no inequalities case in the verify report".into()) };
    let mut drift = 0.0f64;
    let mut exact_ok = true;
    for m in case["metrics"].as_array().into_iter().flatten() {
        let name = m["name"].as_str().unwrap_or("");
        let value = m["value"].as_f64().unwrap_or(f64::INFINITY);
        if name.ends_with(" drift") {
            drift = drift.max(value);
        } else if name.ends_with(" finite") {
            exact_ok &= value == 1.0;
        } else {
            exact_ok &= value <= 1.0 + 1e-12;
        }
    }
    let histograms = case["details"]
        .as_array()
        .map(|d| d.iter().flat_map(|x| x.as_array().cloned().unwrap_or_default()).filter(|e| e["histogram"].is_array()).count())
        .unwrap_or(0);
    // Exact-constant entries on a fresh corpus.
    let grid = Grid::new(2, 32).unwrap();
    let lp = LittlewoodPaley::standard(grid);
    let corpus = random_fields(grid, 12, 12_001, DataKind::RandomSmooth { decay: 1.0 }, 8.0, 1);
    let entries = inequality_suite(&lp, &corpus).map_err(core)?.entries;
    let fresh = entries.iter().filter(|e| e.kind == ConstantKind::Exact).map(|e| e.worst).fold(0.0, f64::max);
    ensure(
        exact_ok && drift <= 0.15 && histograms > 0 && fresh <= 1.0 + 1e-12,
        format!("largest N→2N drift {drift:.4}, {histograms} histograms emitted, exact worst ratio on a fresh corpus {fresh:.6}"),
    )
}

fn criterion_13(dir: &Path) -> Check {
    let args = ["--size-2d", "32", "--size-3d", "16", "--size", "32", "--fields", "6", "--calibration-fields", "4"];
    let mut reports = Vec::new();
    for k in 0..2 {
        let out = dir.join(format!("determinism_{k}"));
        let mut full = vec!["verify", "--output", out.to_str().unwrap()];
        full.extend(args);
        let code = run_cli(&full);
        if code != 0 {
            return Err(format!("reduced verify run {k} exited {code}"));
        }
        reports.push((fs::read(out.join("verify_report.json")).unwrap(), fs::read(out.join("verify_report.txt")).unwrap()));
    }
    ensure(
        reports[0] == reports[1],
        format!("two reduced verify runs wrote {} identical JSON bytes", reports[0].0.len()),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("scratch directory");
    let verify_out = dir.path().join("verify");
    let started = Instant::now();
    let code = run_cli(&["verify", "--output", verify_out.to_str().unwrap()]);
    println!("default verify run exited {code} after {:.0?}", started.elapsed());
    let verify: Value = fs::read_to_string(verify_out.join("verify_report.json"))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok())
        .unwrap_or(Value::Null);
    let suite_pass = |names: &[&str]| -> Result<(), String> {
        for name in names {
            let case = verify["cases"].as_array().and_then(|c| c.iter().find(|c| c["name"] == *name));
            match case {
                Some(c) if c["pass"] == true => {}
                Some(_) => return Err(format!("verify case {name} failed")),
                None => return Err(format!("verify case {name} missing")),
            }
        }
        Ok(())
    };

    let grid = Grid::new(2, 32).unwrap();
    let lp = LittlewoodPaley::standard(grid);
    let calib = verify_calibration(&VerifyOptions::default()).expect("verify calibration").table;

    type Criterion<'a> = (&'a str, &'a [&'a str], Box<dyn Fn() -> Check + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("cutoff axioms", &["cutoff_axioms"], Box::new(criterion_1)),
        ("Littlewood-Paley reconstruction", &["lp_reconstruction"], Box::new(criterion_2)),
        ("L2 Bernstein and heat decay", &["bernstein_heat"], Box::new(criterion_3)),
        ("Leray projector", &["leray"], Box::new(criterion_4)),
        ("Bony equals pointwise", &["bony"], Box::new(criterion_5)),
        ("Duhamel oracle", &["duhamel"], Box::new(criterion_6)),
        ("Taylor-Green end to end", &["taylor_green"], Box::new(|| criterion_7(dir.path()))),
        ("contraction and confinement", &["contraction"], Box::new(|| criterion_8(&lp, &calib))),
        ("uniqueness", &["uniqueness"], Box::new(|| criterion_9(&lp, &calib))),
        ("semigroup identity and restart", &["semigroup"], Box::new(|| criterion_10(&lp, &calib))),
        ("scaling law", &["scaling"], Box::new(|| criterion_11(&lp, &calib))),
        ("inequality suite", &["inequalities", "calibration_refinement"], Box::new(|| criterion_12(&verify))),
        ("determinism", &[], Box::new(|| criterion_13(dir.path()))),
    ];

    let mut failed = 0;
    for (k, (name, suites, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = suite_pass(suites).and_then(|_| check());
        let elapsed = started.elapsed();
        let (verdict, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{verdict} criterion {:>2} {name}: {detail} ({elapsed:.1?})", k + 1);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
