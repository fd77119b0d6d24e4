//! Scaling-law and class-coincidence experiments.

use serde::Serialize;

use super::report::{inputs_digest, Case, ExperimentReport, Metric};
use crate::besov::{check_ale, Exponent, TimeExponent};
use crate::error::{Error, Result};
use crate::io::encode_snapshot;
use crate::solver::{data_norms, picard_solve, smallness_from_norms, CalibrationTable, SolverConfig};
use crate::spectral::{LittlewoodPaley, SpectralField};

/// Relative error allowed on `T(λf) = λ^{-2/ε} T(f)`.
pub const SCALING_TOLERANCE: f64 = 1e-12;
/// Fraction of the guaranteed horizon the solver is asked to reach.
pub const HORIZON_FRACTION: f64 = 0.9;
/// Largest relative `L²` distance between runs that differ only in monitoring.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-10;

#[derive(Serialize)]
struct ScalingInputs<'a> {
    datum: String,
    lambdas: &'a [f64],
    eps: f64,
    steps: usize,
    calibration: &'a str,
}

fn datum_digest(f: &SpectralField) -> String {
    inputs_digest(&hex::encode(encode_snapshot(f)))
}

/// For each `λ`: the Besov-clause horizon of `λf` against `λ^{-2/ε}` times that of `f`,
/// then a Picard run on `0.9` of the `λf` horizon.
pub fn scaling_experiment(
    lp: &LittlewoodPaley,
    f: &SpectralField,
    lambdas: &[f64],
    eps: f64,
    steps: usize,
    calib: &CalibrationTable,
) -> Result<ExperimentReport> {
    let c = calib.for_eps(eps)?;
    let (besov, linf) = data_norms(lp, f, eps)?;
    let base = smallness_from_norms(besov, linf, 1.0, c).besov_horizon;
    if !base.is_finite() {
        return Err(Error::DegenerateCorpus("scaling needs nonzero data".into()));
    }
    let mut cases = Vec::new();
    for &lambda in lambdas {
        let name = format!("lambda_{lambda}");
        let reproduce = format!("besov-ns scaling --eps {eps} --lambdas {lambda}");
        let scaled = f.scaled(lambda);
        let (b, l) = data_norms(lp, &scaled, eps)?;
        let horizon = smallness_from_norms(b, l, 1.0, c).besov_horizon;
        let predicted = base * lambda.powf(-2.0 / eps);
        let mut metrics = vec![
            Metric::record("guaranteed_T", horizon),
            Metric::at_most("horizon_relation_error", (horizon / predicted - 1.0).abs(), SCALING_TOLERANCE),
        ];
        let run = SolverConfig::new(eps, HORIZON_FRACTION * horizon, steps).and_then(|config| picard_solve(lp, &scaled, &config, calib));
        let case = match run {
            Ok(run) => {
                metrics.push(Metric::flag("converged", run.trace.converged));
                metrics.push(Metric::record("rho", run.trace.smallness.rho));
                metrics.push(Metric::record("iterations", run.trace.iterations() as f64));
                metrics.push(Metric::record("residual_rel", run.trace.residual_rel));
                Case::new(&name, metrics, reproduce)
            }
            Err(e) => {
                let mut case = Case::new(&name, metrics, reproduce);
                case.pass = false;
                case.errors.push(format!("solver failure inside the guaranteed horizon, calibration suspect: {e}"));
                case
            }
        };
        cases.push(case);
    }
    let inputs = ScalingInputs { datum: datum_digest(f), lambdas, eps, steps, calibration: &calib.corpus_digest };
    Ok(ExperimentReport::new("scaling", inputs_digest(&inputs), cases))
}

#[derive(Serialize)]
struct CoincidenceInputs<'a> {
    datum: String,
    tuples: Vec<String>,
    config: &'a SolverConfig,
    calibration: &'a str,
}

/// One Picard run per `(α, ℓ)` with that class norm monitored; the runs must
/// agree and every monitored norm must be finite.
pub fn class_coincidence(
    lp: &LittlewoodPaley,
    f: &SpectralField,
    tuples: &[(TimeExponent, Exponent)],
    base: &SolverConfig,
    calib: &CalibrationTable,
) -> Result<ExperimentReport> {
    let dim = lp.grid().dim();
    for &(alpha, ell) in tuples {
        check_ale(alpha, ell, base.eps, dim)?;
    }
    let mut cases = Vec::new();
    let mut reference: Option<crate::besov::TimeSeriesField> = None;
    for &(alpha, ell) in tuples {
        let name = format!("alpha_{alpha}_ell_{ell}");
        let reproduce = format!("besov-ns coincidence --eps {} --classes {alpha}:{ell}", base.eps);
        let mut config = base.clone();
        config.monitored = vec![(alpha, ell, base.eps)];
        let run = match picard_solve(lp, f, &config, calib) {
            Ok(run) => run,
            Err(e) => {
                cases.push(Case::failed(&name, e.to_string(), reproduce));
                continue;
            }
        };
        let x = run.record.x[0].value;
        let mut metrics = vec![Metric::flag("x_norm_finite", x.is_finite()), Metric::record("x_norm", x)];
        match &reference {
            None => reference = Some(run.record.u.clone()),
            Some(u) => {
                let d = u.max_relative_l2_distance(&run.record.u, 1e-300)?;
                metrics.push(Metric::at_most("field_distance", d, COINCIDENCE_TOLERANCE));
            }
        }
        metrics.push(Metric::flag("converged", run.trace.converged));
        cases.push(Case::new(&name, metrics, reproduce));
    }
    let inputs = CoincidenceInputs {
        datum: datum_digest(f),
        tuples: tuples.iter().map(|(a, l)| format!("{a}:{l}")).collect(),
        config: base,
        calibration: &calib.corpus_digest,
    };
    Ok(ExperimentReport::new("coincidence", inputs_digest(&inputs), cases))
}
