//! `besov-ns` subcommands: calibrate, verify, solve, norms, scaling, coincidence.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgAction, ArgMatches, Command};
use serde_json::json;

use besov_core::besov::{besov_norm, lp_norm, BesovIndex, Exponent, TimeExponent};
use besov_core::experiments::{
    calibrate_constants, class_coincidence, default_class_tuples, make_initial_data, run_property_suites,
    scaling_experiment, CalibrationSettings, CorpusSpec, DataKind, ExperimentReport,
};
use besov_core::io::{write_json, write_norm_series, write_snapshots};
use besov_core::solver::{blowup_monitor, persistence_check, picard_solve, CalibrationTable};
use besov_core::spectral::{Grid, LittlewoodPaley};

pub use config::{parse_config, ConfigError, RunConfig, SCHEMA};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Variable that caps the worker thread count.
pub const THREADS_VAR: &str = "BESOV_NS_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] besov_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use besov_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(e) => match e {
                E::Io(_) | E::Json(_) | E::BadMagic | E::UnknownVersion(_) | E::Corrupt(_) => EXIT_IO,
                E::MissingCalibration(_) | E::EpsilonRange(_) | E::AleViolation(_) | E::InvalidLambda(_) => EXIT_USAGE,
                _ => EXIT_FAIL,
            },
        }
    }
}

pub const SUBCOMMANDS: &[(&str, &str)] = &[
    ("calibrate", "calibrate the estimate constants on a seeded corpus"),
    ("verify", "run the property suites"),
    ("solve", "run Picard on one datum and write its norm series"),
    ("norms", "report the norms of a snapshot"),
    ("scaling", "check the horizon scaling law"),
    ("coincidence", "solve once per monitored solution class"),
];

fn schema_help() -> String {
    let mut out = String::from("Keys (config file `key = value`, or `--key-name value`):\n");
    for (key, kind, default, about) in SCHEMA {
        let default = if default.is_empty() { "unset" } else { default };
        out.push_str(&format!("  {key:<20} {kind:<9} [{default}] {about}\n"));
    }
    out
}

pub fn command() -> Command {
    let mut root = Command::new("besov-ns")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Mild Navier-Stokes solutions with subcritical Besov data on the periodic torus")
        .subcommand_required(true)
        .after_long_help(schema_help());
    for (name, about) in SUBCOMMANDS {
        let mut sub = Command::new(*name).about(*about).arg(
            Arg::new("config").long("config").short('c').value_name("FILE").value_parser(clap::value_parser!(PathBuf)),
        );
        for (key, _, _, help) in SCHEMA {
            sub = sub.arg(Arg::new(*key).long(config::flag_name(key)).value_name("VALUE").help(*help).action(ArgAction::Set));
        }
        root = root.subcommand(sub);
    }
    root
}

fn flags_of(m: &ArgMatches) -> Vec<(String, String)> {
    SCHEMA
        .iter()
        .filter_map(|(key, ..)| m.get_one::<String>(key).map(|v| (key.to_string(), v.clone())))
        .collect()
}

/// Parses `args` (program name first), runs the subcommand and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let outcome = parse_config(sub.get_one::<PathBuf>("config").map(PathBuf::as_path), &flags_of(sub))
        .and_then(|config| dispatch(name, &config));
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("besov-ns {name}: {e}");
            e.exit_code()
        }
    }
}

/// Runs one subcommand; `Ok(pass)` where `pass` means every declared threshold held.
pub fn dispatch(name: &str, config: &RunConfig) -> Result<bool, CliError> {
    match name {
        "calibrate" => calibrate(config),
        "verify" => verify(config),
        "solve" => solve(config),
        "norms" => norms(config),
        "scaling" => scaling(config),
        "coincidence" => coincidence(config),
        other => Err(CliError::Usage(format!("unknown subcommand '{other}'"))),
    }
}

fn output_dir(config: &RunConfig) -> Result<&Path, CliError> {
    fs::create_dir_all(&config.output).map_err(|e| CliError::Io(format!("{}: {e}", config.output.display())))?;
    Ok(&config.output)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_report(config: &RunConfig, report: &ExperimentReport) -> Result<bool, CliError> {
    let dir = output_dir(config)?;
    write_json(&dir.join(format!("{}_report.json", report.name)), report)?;
    let summary = report.summary();
    write_text(&dir.join(format!("{}_report.txt", report.name)), &summary)?;
    print!("{summary}");
    Ok(report.pass)
}

fn load_calibration(config: &RunConfig) -> Result<CalibrationTable, CliError> {
    let path = &config.calibration;
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(CliError::Core(besov_core::Error::MissingCalibration(format!(
                "{} not found; run `besov-ns calibrate` first",
                path.display()
            ))))
        }
        Err(e) => return Err(CliError::Io(format!("{}: {e}", path.display()))),
    };
    let table = CalibrationTable::from_json(&text)?;
    if table.dim != config.dim {
        return Err(CliError::Usage(format!(
            "{} was calibrated for n = {}, run uses n = {}; run `besov-ns calibrate` for this dimension",
            path.display(),
            table.dim,
            config.dim
        )));
    }
    table.for_eps(config.eps)?;
    Ok(table)
}

fn grid(config: &RunConfig) -> Result<Grid, CliError> {
    Ok(Grid::new(config.dim, config.size)?)
}

fn calibrate(config: &RunConfig) -> Result<bool, CliError> {
    let specs: Vec<CorpusSpec> = config
        .corpus_kinds
        .iter()
        .enumerate()
        .map(|(k, kind)| {
            let mut spec = CorpusSpec::new(config.corpus_fields, config.dim, config.size, *kind, config.seed ^ ((k as u64) << 32));
            spec.data.max_wavenumber = config.data.max_wavenumber;
            spec.data.divergence_free = config.data.divergence_free;
            spec
        })
        .collect();
    let defaults = CalibrationSettings::default();
    let mut persistence = defaults.persistence.clone();
    if config.persistence != BesovIndex::sup(-1.0 + config.eps) && !persistence.contains(&config.persistence) {
        persistence.push(config.persistence);
    }
    let settings = CalibrationSettings {
        eps: config.calibration_eps.clone(),
        horizons: config.horizons.clone(),
        steps: config.steps,
        safety: config.safety,
        persistence,
        lambdas: config.lambda.map(|l| vec![l]).unwrap_or(defaults.lambdas),
        uniqueness: true,
    };
    let calibration = calibrate_constants(&specs, &settings)?;
    if let Some(parent) = config.calibration.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    write_json(&config.calibration, &calibration.table)?;
    let dir = output_dir(config)?;
    write_json(&dir.join("calibration_ratios.json"), &calibration.ratios)?;
    for c in &calibration.table.eps {
        println!("eps {}: A_phi {:e}  A_tilde {:e}  C_phi {:e}  C_tilde {:e}", c.eps, c.a_phi, c.a_tilde, c.c_phi, c.c_tilde);
    }
    println!("wrote {}", config.calibration.display());
    Ok(true)
}

fn verify(config: &RunConfig) -> Result<bool, CliError> {
    let report = run_property_suites(&config.verify)?;
    write_report(config, &report)
}

fn solve(config: &RunConfig) -> Result<bool, CliError> {
    let calib = load_calibration(config)?;
    let lp = LittlewoodPaley::standard(grid(config)?);
    let f = make_initial_data(lp.grid(), &config.data)?;
    let solver = config.solver_config()?;
    let run = picard_solve(&lp, &f, &solver, &calib)?;
    let dir = output_dir(config)?;
    write_norm_series(&dir.join("norms.csv"), &run.record.rows)?;
    write_json(&dir.join("trace.json"), &run.trace)?;
    write_json(&dir.join("summary.json"), &run.record.summary())?;
    write_snapshots(&dir.join("snapshots"), &run.record, config.snapshot_stride)?;
    let mut pass = run.trace.converged;
    if let Some(lambda) = config.lambda {
        let trace = persistence_check(&lp, &run.iterates, config.persistence, config.eps, lambda, Some(&calib))?;
        pass &= trace.bound_holds != Some(false) && trace.n_monotone;
        write_json(&dir.join("persistence.json"), &trace)?;
    }
    if let Some(candidate) = config.blowup_candidate {
        let series = blowup_monitor(&run.record, candidate, &calib)?;
        pass &= series.consistent;
        write_json(&dir.join("blowup.json"), &series)?;
    }
    println!(
        "gate {:?}  g0 {:e}  iterations {}  residual {:e}  converged {}",
        run.trace.gate,
        run.trace.g0,
        run.trace.iterations(),
        run.trace.residual_rel,
        run.trace.converged
    );
    Ok(pass)
}

fn norms(config: &RunConfig) -> Result<bool, CliError> {
    let input = config.require_input()?;
    let u = besov_core::io::read_snapshot(input)?;
    let lp = LittlewoodPaley::standard(u.grid());
    let critical = besov_norm(&lp, &u, BesovIndex::sup(-1.0 + config.eps))?;
    let persistence = besov_norm(&lp, &u, config.persistence)?;
    let report = json!({
        "input": input.display().to_string(),
        "grid": { "dim": u.grid().dim(), "size": u.grid().size() },
        "l2": lp_norm(&u, Exponent::TWO),
        "linf": lp_norm(&u, Exponent::INFINITY),
        "besov_minus1_eps": critical,
        "persistence": persistence,
    });
    let dir = output_dir(config)?;
    write_json(&dir.join("norms.json"), &report)?;
    println!("{}", serde_json::to_string_pretty(&report).map_err(besov_core::Error::from)?);
    Ok(true)
}

fn scaling(config: &RunConfig) -> Result<bool, CliError> {
    let calib = load_calibration(config)?;
    let lp = LittlewoodPaley::standard(grid(config)?);
    let f = make_initial_data(lp.grid(), &config.data)?;
    let report = scaling_experiment(&lp, &f, &config.lambdas, config.eps, config.steps, &calib)?;
    write_report(config, &report)
}

/// `−1 + n/ℓ`.
fn critical_regularity(dim: usize, ell: Exponent) -> f64 {
    -1.0 + if ell.is_infinite() { 0.0 } else { dim as f64 / ell.value() }
}

fn coincidence(config: &RunConfig) -> Result<bool, CliError> {
    let calib = load_calibration(config)?;
    let lp = LittlewoodPaley::standard(grid(config)?);
    let tuples: Vec<(TimeExponent, Exponent)> =
        if config.classes.is_empty() { default_class_tuples(config.dim, config.eps) } else { config.classes.clone() };
    let mut data = config.data.clone();
    // A random profile is placed in the smallest-ℓ class, which embeds in the others.
    if let DataKind::RandomBesov { .. } = data.kind {
        let ell = tuples.iter().map(|t| t.1).min_by(|a, b| a.value().total_cmp(&b.value())).unwrap_or(Exponent::INFINITY);
        data.kind = DataKind::RandomBesov { sigma: critical_regularity(config.dim, ell) + config.eta, p: ell };
    }
    let f = make_initial_data(lp.grid(), &data)?;
    let report = class_coincidence(&lp, &f, &tuples, &config.solver_config()?, &calib)?;
    write_report(config, &report)
}

/// Sizes the global worker pool from [`THREADS_VAR`] when set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} = '{value}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("{THREADS_VAR}: {e}")))
}
