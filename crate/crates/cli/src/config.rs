//! Flat `key = value` run configuration.
//!
//! One entry per line; `#` starts a comment; keys are the names in [`SCHEMA`].
//! A repeated key keeps its last value and logs a warning. Every key is also a
//! long flag (`max_iterations` → `--max-iterations`); flags override the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use besov_core::besov::{BesovIndex, Exponent, TimeExponent};
use besov_core::experiments::{DataKind, DataParams, VerifyOptions};
use besov_core::solver::{BilinearForm, SolverConfig};

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag(String),
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag(name) => write!(f, "flag --{name}"),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{origin}: unknown key '{key}'")]
    UnknownKey { key: String, origin: Origin },
    #[error("{origin}: expected 'key = value', found '{text}'")]
    Syntax { text: String, origin: Origin },
    #[error("{origin}: {key} = '{value}' is not {expected}")]
    TypeMismatch { key: String, value: String, expected: &'static str, origin: Origin },
    #[error("{origin}: {key}: {reason}")]
    Invalid { key: String, reason: String, origin: Origin },
    #[error("missing required key '{key}' (set it in the config file or pass --{flag})")]
    Missing { key: String, flag: String },
}

/// `(key, type, default, description)`; an empty default means "unset".
pub const SCHEMA: &[(&str, &str, &str, &str)] = &[
    ("dim", "integer", "2", "spatial dimension n, 2 or 3"),
    ("size", "integer", "32", "grid points per axis N, a power of two >= 8"),
    ("eps", "float", "0.5", "subcriticality eps in (0,1)"),
    ("s", "float", "", "persistence regularity; defaults to -1+eps"),
    ("p", "exponent", "inf", "persistence spatial exponent"),
    ("q", "exponent", "inf", "persistence shell exponent"),
    ("horizon", "float", "1.0", "time horizon T"),
    ("steps", "integer", "16", "time steps M"),
    ("tol", "float", "1e-10", "relative Picard stopping tolerance"),
    ("max_iterations", "integer", "100", "Picard iteration cap"),
    ("form", "form", "pointwise", "bilinear form: pointwise or bony"),
    ("override_smallness", "bool", "false", "run Picard when the smallness gate fails"),
    ("leray_initial", "bool", "false", "Leray-project the initial datum"),
    ("lambda", "float", "", "interpolation index; enables the persistence trace"),
    ("blowup_candidate", "float", "", "candidate blowup time for the monitor"),
    ("seed", "integer", "20240601", "master seed"),
    ("data", "kind", "random_smooth", "initial data kind"),
    ("amplitude", "float", "1.0", "initial data amplitude"),
    ("max_wavenumber", "float", "6.0", "radius of the random-content box"),
    ("divergence_free", "bool", "true", "Leray-project random data"),
    ("sigma", "float", "-0.5", "Besov profile of random_besov and gradient_field"),
    ("besov_p", "exponent", "inf", "Lebesgue exponent of the random_besov profile"),
    ("decay", "float", "2.0", "spectral decay of random_smooth"),
    ("shell", "integer", "1", "shell of single_shell"),
    ("output", "path", "out", "output directory"),
    ("calibration", "path", "calibration.json", "calibration table file"),
    ("input", "path", "", "input snapshot for norms"),
    ("snapshot_stride", "integer", "4", "write every k-th node as a snapshot"),
    ("corpus_kinds", "list", "random_smooth,random_besov", "corpus kinds for calibrate"),
    ("corpus_fields", "integer", "50", "fields per corpus kind"),
    ("calibration_eps", "list", "0.25,0.5,0.75", "eps grid for calibrate"),
    ("horizons", "list", "0.01,0.1,1", "horizons probed by calibrate"),
    ("safety", "float", "1.5", "safety factor on corpus maxima"),
    ("lambdas", "list", "1,2,4", "amplitude factors for scaling"),
    ("classes", "list", "", "alpha:ell pairs for coincidence; defaults depend on n and eps"),
    ("eta", "float", "0.1", "regularity excess of coincidence data"),
    ("suite", "list", "", "verify suites to run; empty runs all"),
    ("fields", "integer", "50", "corpus size of the verify static suites"),
    ("size_2d", "integer", "64", "two-dimensional grid of the verify static suites"),
    ("size_3d", "integer", "32", "three-dimensional grid of the verify static suites"),
    ("calibration_fields", "integer", "12", "corpus size of the verify calibration"),
    ("phi_scale", "float", "1.0", "multiplier on phi; not 1 only for fault injection"),
];

pub fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

fn schema_entry(key: &str) -> Option<&'static (&'static str, &'static str, &'static str, &'static str)> {
    SCHEMA.iter().find(|e| e.0 == key)
}

/// Raw values by key, with their origin, after applying last-one-wins.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    values: BTreeMap<String, (String, Origin)>,
    pub warnings: Vec<String>,
}

impl RawConfig {
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut raw = Self::default();
        for (k, line) in text.lines().enumerate() {
            let origin = Origin::Line(k + 1);
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { text: body.to_string(), origin: origin.clone() })?;
            raw.set(key.trim(), value.trim(), origin)?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        if schema_entry(key).is_none() {
            return Err(ConfigError::UnknownKey { key: key.to_string(), origin });
        }
        if let Some((_, previous)) = self.values.get(key) {
            if let (Origin::Line(a), Origin::Line(b)) = (previous, &origin) {
                let msg = format!("key '{key}' set on line {a} and again on line {b}; line {b} wins");
                log::warn!("{msg}");
                self.warnings.push(msg);
            }
        }
        self.values.insert(key.to_string(), (value.to_string(), origin));
        Ok(())
    }

    fn get(&self, key: &str) -> (String, Origin) {
        match self.values.get(key) {
            Some(v) => v.clone(),
            None => (schema_entry(key).map(|e| e.2).unwrap_or("").to_string(), Origin::Default),
        }
    }
}

/// Validated configuration with every key typed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub size: usize,
    pub eps: f64,
    pub persistence: BesovIndex,
    pub horizon: f64,
    pub steps: usize,
    pub tol: f64,
    pub max_iterations: usize,
    pub form: BilinearForm,
    pub override_smallness: bool,
    pub leray_initial: bool,
    pub lambda: Option<f64>,
    pub blowup_candidate: Option<f64>,
    pub seed: u64,
    pub data: DataParams,
    pub output: PathBuf,
    pub calibration: PathBuf,
    pub input: Option<PathBuf>,
    pub snapshot_stride: usize,
    pub corpus_kinds: Vec<DataKind>,
    pub corpus_fields: usize,
    pub calibration_eps: Vec<f64>,
    pub horizons: Vec<f64>,
    pub safety: f64,
    pub lambdas: Vec<f64>,
    pub classes: Vec<(TimeExponent, Exponent)>,
    pub eta: f64,
    pub verify: VerifyOptions,
    pub warnings: Vec<String>,
}

struct Reader<'a> {
    raw: &'a RawConfig,
}

impl Reader<'_> {
    fn parse<T>(&self, key: &str, expected: &'static str, f: impl Fn(&str) -> Option<T>) -> Result<T, ConfigError> {
        let (value, origin) = self.raw.get(key);
        f(&value).ok_or(ConfigError::TypeMismatch { key: key.into(), value, expected, origin })
    }

    fn optional<T>(&self, key: &str, expected: &'static str, f: impl Fn(&str) -> Option<T>) -> Result<Option<T>, ConfigError> {
        if self.raw.get(key).0.is_empty() {
            Ok(None)
        } else {
            self.parse(key, expected, f).map(Some)
        }
    }

    fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.parse(key, "a nonnegative integer", |v| v.parse().ok())
    }

    fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.parse(key, "a finite number", |v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
    }

    fn bool(&self, key: &str) -> Result<bool, ConfigError> {
        self.parse(key, "true or false", |v| match v {
            "true" | "yes" | "1" => Some(true),
            "false" | "no" | "0" => Some(false),
            _ => None,
        })
    }

    fn exponent(&self, key: &str) -> Result<Exponent, ConfigError> {
        self.parse(key, "an exponent in [1, inf]", |v| v.parse().ok())
    }

    fn list<T>(&self, key: &str, expected: &'static str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, ConfigError> {
        let (value, _) = self.raw.get(key);
        let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        self.parse(key, expected, |_| items.iter().map(|s| f(s)).collect())
    }

    fn check(&self, key: &str, ok: bool, reason: impl Into<String>) -> Result<(), ConfigError> {
        if ok {
            Ok(())
        } else {
            Err(ConfigError::Invalid { key: key.into(), reason: reason.into(), origin: self.raw.get(key).1 })
        }
    }

    fn origin(&self, key: &str) -> Origin {
        self.raw.get(key).1
    }
}

fn parse_kind(name: &str, r: &Reader) -> Result<DataKind, ConfigError> {
    let base: DataKind = name.parse().map_err(|_| ConfigError::TypeMismatch {
        key: "data".into(),
        value: name.into(),
        expected: "one of taylor_green_2d, single_shell, random_besov, gradient_field, random_smooth",
        origin: r.origin("data"),
    })?;
    Ok(match base {
        DataKind::SingleShell { .. } => DataKind::SingleShell {
            shell: r.parse("shell", "an integer", |v| v.parse().ok())?,
        },
        DataKind::RandomBesov { .. } => DataKind::RandomBesov { sigma: r.f64("sigma")?, p: r.exponent("besov_p")? },
        DataKind::GradientField { .. } => DataKind::GradientField { sigma: r.f64("sigma")? },
        DataKind::RandomSmooth { .. } => DataKind::RandomSmooth { decay: r.f64("decay")? },
        other => other,
    })
}

fn parse_class(item: &str) -> Option<(TimeExponent, Exponent)> {
    let (a, l) = item.split_once(':')?;
    let alpha = if a == "inf_bar" { TimeExponent::SupBar } else { TimeExponent::Lebesgue(a.parse().ok()?) };
    Some((alpha, l.parse().ok()?))
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let r = Reader { raw };
        let dim = r.usize("dim")?;
        r.check("dim", dim == 2 || dim == 3, "n must be 2 or 3")?;
        let size = r.usize("size")?;
        r.check("size", size >= 8 && size.is_power_of_two(), "N must be a power of two >= 8")?;
        let eps = r.f64("eps")?;
        r.check("eps", eps > 0.0 && eps < 1.0, "ε must lie in (0,1)")?;
        let s = r.optional("s", "a finite number", |v| v.parse::<f64>().ok().filter(|x| x.is_finite()))?.unwrap_or(-1.0 + eps);
        r.check("s", s > -1.0, "persistence regularity must exceed -1")?;
        let persistence = BesovIndex::new(s, r.exponent("p")?, r.exponent("q")?);
        let horizon = r.f64("horizon")?;
        r.check("horizon", horizon > 0.0, "T must be positive")?;
        let steps = r.usize("steps")?;
        r.check("steps", steps >= 1, "M must be at least 1")?;
        let tol = r.f64("tol")?;
        r.check("tol", tol > 0.0, "tolerance must be positive")?;
        let max_iterations = r.usize("max_iterations")?;
        r.check("max_iterations", max_iterations >= 1, "at least one iteration")?;
        let form = r.parse("form", "pointwise or bony", |v| match v {
            "pointwise" => Some(BilinearForm::Pointwise),
            "bony" => Some(BilinearForm::Bony),
            _ => None,
        })?;
        let lambda = r.optional("lambda", "a finite number", |v| v.parse().ok())?;
        if let Some(l) = lambda {
            r.check("lambda", l > 0.0 && l < 1.0, "λ must lie in (0,1)")?;
        }
        let blowup_candidate = r.optional("blowup_candidate", "a finite number", |v| v.parse().ok())?;
        let seed = r.parse("seed", "a nonnegative integer", |v| v.parse::<u64>().ok())?;
        let kind_name = r.raw.get("data").0;
        let kind = parse_kind(&kind_name, &r)?;
        let mut data = DataParams::new(kind, seed);
        data.amplitude = r.f64("amplitude")?;
        data.max_wavenumber = r.f64("max_wavenumber")?;
        r.check("max_wavenumber", data.max_wavenumber >= 1.0, "content radius must be at least 1")?;
        data.divergence_free = r.bool("divergence_free")?;
        let corpus_kinds = r
            .list("corpus_kinds", "a comma-separated list of data kinds", |v| v.parse::<DataKind>().ok())?
            .into_iter()
            .map(|k| parse_kind(k.name(), &r))
            .collect::<Result<Vec<_>, _>>()?;
        r.check("corpus_kinds", !corpus_kinds.is_empty(), "at least one kind")?;
        let corpus_fields = r.usize("corpus_fields")?;
        r.check("corpus_fields", corpus_fields >= 1, "at least one field")?;
        let calibration_eps = r.list("calibration_eps", "a comma-separated list of numbers", |v| v.parse().ok())?;
        r.check("calibration_eps", calibration_eps.iter().all(|e: &f64| *e > 0.0 && *e < 1.0), "ε must lie in (0,1)")?;
        let horizons = r.list("horizons", "a comma-separated list of numbers", |v| v.parse().ok())?;
        r.check("horizons", !horizons.is_empty() && horizons.iter().all(|t: &f64| *t > 0.0), "positive horizons")?;
        let safety = r.f64("safety")?;
        r.check("safety", safety >= 1.0, "safety factor must be at least 1")?;
        let lambdas = r.list("lambdas", "a comma-separated list of numbers", |v| v.parse().ok())?;
        r.check("lambdas", lambdas.iter().all(|l: &f64| *l > 0.0), "positive factors")?;
        let classes = r.list("classes", "a comma-separated list of alpha:ell pairs", parse_class)?;
        let suite = r.list("suite", "a comma-separated list of suite names", |v| Some(v.to_string()))?;
        let verify = VerifyOptions {
            seed,
            size_2d: r.usize("size_2d")?,
            size_3d: r.usize("size_3d")?,
            fields: r.usize("fields")?,
            solver_size: size,
            steps,
            eps,
            calibration_fields: r.usize("calibration_fields")?,
            phi_scale: r.f64("phi_scale")?,
            suites: suite,
        };
        r.check("size_2d", verify.size_2d >= 8 && verify.size_2d.is_power_of_two(), "N must be a power of two >= 8")?;
        r.check("size_3d", verify.size_3d >= 8 && verify.size_3d.is_power_of_two(), "N must be a power of two >= 8")?;
        r.check("fields", verify.fields >= 2, "at least two fields")?;
        Ok(Self {
            dim,
            size,
            eps,
            persistence,
            horizon,
            steps,
            tol,
            max_iterations,
            form,
            override_smallness: r.bool("override_smallness")?,
            leray_initial: r.bool("leray_initial")?,
            lambda,
            blowup_candidate,
            seed,
            data,
            output: PathBuf::from(r.raw.get("output").0),
            calibration: PathBuf::from(r.raw.get("calibration").0),
            input: r.optional("input", "a path", |v| Some(PathBuf::from(v)))?,
            snapshot_stride: r.usize("snapshot_stride")?,
            corpus_kinds,
            corpus_fields,
            calibration_eps,
            horizons,
            safety,
            lambdas,
            classes,
            eta: r.f64("eta")?,
            verify,
            warnings: raw.warnings.clone(),
        })
    }

    pub fn solver_config(&self) -> besov_core::Result<SolverConfig> {
        let mut c = SolverConfig::new(self.eps, self.horizon, self.steps)?;
        c.persistence = self.persistence;
        c.tolerance = self.tol;
        c.max_iterations = self.max_iterations;
        c.form = self.form;
        c.override_smallness = self.override_smallness;
        c.leray_initial = self.leray_initial;
        c.store_iterates = self.lambda.is_some();
        c.validate()?;
        Ok(c)
    }

    pub fn require_input(&self) -> Result<&Path, ConfigError> {
        self.input.as_deref().ok_or(ConfigError::Missing { key: "input".into(), flag: flag_name("input") })
    }
}

/// Reads `path` if given, then applies `flags` as `(key, value)` overrides.
pub fn parse_config(path: Option<&Path>, flags: &[(String, String)]) -> Result<RunConfig, crate::CliError> {
    let mut raw = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| crate::CliError::Io(format!("{}: {e}", p.display())))?;
            RawConfig::parse_str(&text)?
        }
        None => RawConfig::default(),
    };
    for (key, value) in flags {
        raw.set(key, value, Origin::Flag(flag_name(key)))?;
    }
    Ok(RunConfig::from_raw(&raw)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        RunConfig::from_raw(&RawConfig::parse_str(text)?)
    }

    #[test]
    fn defaults_are_valid() {
        let c = parse("").unwrap();
        assert_eq!((c.dim, c.size, c.eps), (2, 32, 0.5));
        assert_eq!(c.persistence, BesovIndex::sup(-0.5));
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let err = parse("dim = 2\n\nviscosity = 1\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { key: "viscosity".into(), origin: Origin::Line(3) });
    }

    #[test]
    fn duplicate_key_last_wins_with_warning() {
        let c = parse("eps = 0.25\neps = 0.75 # later\n").unwrap();
        assert_eq!(c.eps, 0.75);
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn eps_out_of_range_is_rejected() {
        let err = parse("eps = 1.5").unwrap_err();
        assert!(err.to_string().contains("ε must lie in (0,1)"), "{err}");
    }

    #[test]
    fn type_mismatch_names_the_line() {
        let err = parse("# header\nsteps = many").unwrap_err();
        assert!(matches!(err, ConfigError::TypeMismatch { origin: Origin::Line(2), .. }));
    }

    #[test]
    fn data_kind_takes_its_parameters() {
        let c = parse("data = random_besov\nsigma = -0.25\nbesov_p = 2").unwrap();
        assert_eq!(c.data.kind, DataKind::RandomBesov { sigma: -0.25, p: Exponent::TWO });
        let c = parse("classes = 4:4, inf:2").unwrap();
        assert_eq!(c.classes.len(), 2);
    }
}
