//! Picard iteration `u^{m+1} = S[f] − B[u^m, u^m]` with `V`-norm tracking.

use serde::{Deserialize, Serialize};

use super::bilinear::{bilinear, BilinearForm};
use super::calibration::{lambda_root, smallness_condition, CalibrationTable, EpsConstants, LambdaRoots, Smallness};
use super::duhamel::heat_source;
use super::record::{build_record, SolutionRecord};
use crate::besov::{
    lp_series, y_from_table, z_from_table, BesovIndex, Exponent, ShellNormTable, TimeExponent, TimeGrid,
    TimeSeriesField,
};
use crate::error::{Error, Result};
use crate::spectral::{leray_project, LittlewoodPaley, SpectralField};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;
/// Relative slack allowed on the `V`-norm confinement `‖u^m‖_V ≤ Λ`.
pub const CONFINEMENT_SLACK: f64 = 0.02;
/// Slack allowed on the contraction ratio `d_{m+1}/d_m ≤ 2Λ`.
pub const CONTRACTION_SLACK: f64 = 0.05;
/// Iterates whose `Z` norm exceeds this multiple of `‖S[f]‖_Z` abort the run.
pub const DIVERGENCE_FACTOR: f64 = 4.0;
const NORM_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub eps: f64,
    /// Index `(s, p, q)` of the persistence space `Z^s_{p,q}`.
    pub persistence: BesovIndex,
    pub horizon: f64,
    pub steps: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub leray_initial: bool,
    /// Run even when the smallness gate fails; the trace records it.
    pub override_smallness: bool,
    pub form: BilinearForm,
    /// Keep every iterate for the persistence recursion.
    pub store_iterates: bool,
    /// `(α, ℓ, ε)` tuples whose `X` norms the record reports.
    pub monitored: Vec<(TimeExponent, Exponent, f64)>,
}

impl SolverConfig {
    pub fn new(eps: f64, horizon: f64, steps: usize) -> Result<Self> {
        let config = Self {
            eps,
            persistence: BesovIndex::sup(-1.0 + eps),
            horizon,
            steps,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            leray_initial: false,
            override_smallness: false,
            form: BilinearForm::Pointwise,
            store_iterates: false,
            monitored: Vec::new(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::EpsilonRange(self.eps));
        }
        if !(self.persistence.s > -1.0) {
            return Err(Error::InvalidIndex(format!("persistence index needs s > -1, got {}", self.persistence.s)));
        }
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidIndex("tolerance and max iterations must be positive".into()));
        }
        TimeGrid::new(self.horizon, self.steps).map(|_| ())
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.horizon, self.steps)
    }
}

/// `‖u‖_{Z^{-1+ε}_{∞,∞}}` and `‖u‖_{Y_{ε/2}}` of one series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PathNorms {
    pub z: f64,
    pub y: f64,
}

pub(crate) fn path_norms(lp: &LittlewoodPaley, u: &TimeSeriesField, eps: f64) -> Result<PathNorms> {
    let table = ShellNormTable::new(lp, u, Exponent::INFINITY)?;
    let z = z_from_table(&table, -1.0 + eps, Exponent::INFINITY)?.value;
    let linf = lp_series(u, Exponent::INFINITY);
    let y = y_from_table(&table, &linf, eps)?.value;
    Ok(PathNorms { z, y })
}

/// `(‖u‖_{V⁰}, ‖u‖_{V¹})`.
fn v_norms(n: PathNorms, c: &EpsConstants, horizon: f64) -> [f64; 2] {
    [c.v0_factor(horizon) * n.z, c.v1_factor(horizon) * n.y]
}

/// `(‖S[f]‖_{V⁰}, ‖S[f]‖_{V¹})` on the configured horizon; linear in `f`.
pub fn source_v_norms(
    lp: &LittlewoodPaley,
    f: &SpectralField,
    config: &SolverConfig,
    calib: &CalibrationTable,
) -> Result<[f64; 2]> {
    config.validate()?;
    let c = calib.for_eps(config.eps)?;
    let f = if config.leray_initial { leray_project(f)? } else { f.clone() };
    let source = heat_source(&f, config.time_grid()?)?;
    Ok(v_norms(path_norms(lp, &source, config.eps)?, c, config.horizon))
}

/// Which test admitted the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    /// The `Ḃ^{-1+ε}_{∞,∞}` clause of the smallness condition.
    BesovClause,
    /// The `L^∞` clause.
    LinfClause,
    /// Neither clause, but `min_j ‖S[f]‖_{V^j} < 1/4` directly.
    Direct,
    Override,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub m: usize,
    pub v0: f64,
    pub v1: f64,
    pub z: f64,
}

/// `d_m = u^{m+1} − u^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceRecord {
    pub m: usize,
    pub z: f64,
    /// In the selected `V^j` norm.
    pub v: f64,
    /// `d_m / d_{m-1}` in `V^j`; absent when `d_{m-1} = 0`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardTrace {
    pub eps: f64,
    pub horizon: f64,
    pub steps: usize,
    pub tolerance: f64,
    pub form: BilinearForm,
    pub smallness: Smallness,
    pub gate: Gate,
    /// `j ∈ {0, 1}` minimising `‖S[f]‖_{V^j}`.
    pub clause: usize,
    pub g0: f64,
    pub roots: Option<LambdaRoots>,
    /// `‖S[f]‖_{Z^{-1+ε}_{∞,∞}}`.
    pub initial_bound: f64,
    pub iterates: Vec<IterateRecord>,
    pub differences: Vec<DifferenceRecord>,
    pub converged: bool,
    /// `‖u − S[f] + B[u,u]‖_{Z^{-1+ε}_{∞,∞}}`.
    pub residual_abs: f64,
    pub residual_rel: f64,
    /// Every iterate has `‖u^m‖_{V^j} ≤ Λ + slack`; absent without `Λ`.
    pub confined: Option<bool>,
    /// Every ratio for `m ≥ 1` is at most `2Λ + slack`; absent without `Λ`.
    pub contracting: Option<bool>,
}

impl PicardTrace {
    pub fn iterations(&self) -> usize {
        self.differences.len()
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.differences.iter().skip(1).filter_map(|d| d.ratio).reduce(f64::max)
    }

    pub fn max_selected_v(&self) -> f64 {
        self.iterates.iter().map(|r| if self.clause == 0 { r.v0 } else { r.v1 }).fold(0.0, f64::max)
    }
}

pub struct PicardRun {
    pub record: SolutionRecord,
    pub trace: PicardTrace,
    /// `u^0, u^1, …, u^K` when requested.
    pub iterates: Vec<TimeSeriesField>,
}

/// Smallness gate, heat source and selected `V` clause for one datum.
struct Setup {
    source: TimeSeriesField,
    smallness: Smallness,
    gate: Gate,
    clause: usize,
    g0: f64,
    roots: Option<LambdaRoots>,
    initial_bound: f64,
}

fn setup(lp: &LittlewoodPaley, f: &SpectralField, config: &SolverConfig, calib: &CalibrationTable) -> Result<Setup> {
    config.validate()?;
    let c = calib.for_eps(config.eps)?;
    let f = if config.leray_initial { leray_project(f)? } else { f.clone() };
    let smallness = smallness_condition(lp, &f, config.horizon, config.eps, calib)?;
    let source = heat_source(&f, config.time_grid()?)?;
    let norms = path_norms(lp, &source, config.eps)?;
    let v = v_norms(norms, c, config.horizon);
    let clause = if v[0] <= v[1] { 0 } else { 1 };
    let g0 = v[clause];
    let gate = if smallness.holds {
        if smallness.besov_clause < 1.0 {
            Gate::BesovClause
        } else {
            Gate::LinfClause
        }
    } else if g0 < 0.25 {
        Gate::Direct
    } else if config.override_smallness {
        log::warn!("smallness fails (rho = {:.4}, g0 = {g0:.4}); running under override", smallness.rho);
        Gate::Override
    } else {
        return Err(Error::SmallnessViolated { margin: smallness.margin });
    };
    let roots = lambda_root(g0).ok();
    Ok(Setup { source, smallness, gate, clause, g0, roots, initial_bound: norms.z })
}

/// Iterates from `start` (normally `S[f]`) to the fixed point of `u = S[f] − B[u,u]`.
fn iterate(
    lp: &LittlewoodPaley,
    setup: &Setup,
    start: TimeSeriesField,
    config: &SolverConfig,
    calib: &CalibrationTable,
) -> Result<(TimeSeriesField, PicardTrace, Vec<TimeSeriesField>)> {
    let c = calib.for_eps(config.eps)?;
    let horizon = config.horizon;
    let j = setup.clause;
    let mut u = start;
    let mut norms = path_norms(lp, &u, config.eps)?;
    let first = v_norms(norms, c, horizon);
    let mut iterates = vec![IterateRecord { m: 0, v0: first[0], v1: first[1], z: norms.z }];
    let mut differences: Vec<DifferenceRecord> = Vec::new();
    let mut stored = Vec::new();
    let mut converged = false;
    for m in 0..config.max_iterations {
        let next = setup.source.sub(&bilinear(lp, config.form, &u, &u)?)?;
        let d = next.sub(&u)?;
        let dn = path_norms(lp, &d, config.eps)?;
        let next_norms = path_norms(lp, &next, config.eps)?;
        let dv = v_norms(dn, c, horizon)[j];
        let ratio = differences.last().filter(|p| p.v > 0.0).map(|p| dv / p.v);
        differences.push(DifferenceRecord { m, z: dn.z, v: dv, ratio });
        let nv = v_norms(next_norms, c, horizon);
        iterates.push(IterateRecord { m: m + 1, v0: nv[0], v1: nv[1], z: next_norms.z });
        let bound = DIVERGENCE_FACTOR * setup.initial_bound;
        if next_norms.z > bound.max(NORM_FLOOR) || !next_norms.z.is_finite() {
            return Err(Error::Divergence { iteration: m + 1, norm: next_norms.z, bound });
        }
        if config.store_iterates {
            stored.push(std::mem::replace(&mut u, next));
        } else {
            u = next;
        }
        norms = next_norms;
        if dn.z <= config.tolerance * norms.z.max(NORM_FLOOR) {
            converged = true;
            break;
        }
    }
    if !converged {
        let last_diff = differences.last().map_or(0.0, |d| d.z / norms.z.max(NORM_FLOOR));
        return Err(Error::NotConverged { iterations: config.max_iterations, last_diff });
    }
    if config.store_iterates {
        stored.push(u.clone());
    }
    let residual = u.sub(&setup.source)?.add(&bilinear(lp, config.form, &u, &u)?)?;
    let residual_abs = path_norms(lp, &residual, config.eps)?.z;
    let residual_rel = residual_abs / norms.z.max(NORM_FLOOR);
    let selected = |r: &IterateRecord| if j == 0 { r.v0 } else { r.v1 };
    let confined = setup.roots.map(|r| iterates.iter().all(|it| selected(it) <= r.lambda + CONFINEMENT_SLACK));
    let contracting = setup
        .roots
        .map(|r| differences.iter().skip(1).filter_map(|d| d.ratio).all(|q| q <= 2.0 * r.lambda + CONTRACTION_SLACK));
    let trace = PicardTrace {
        eps: config.eps,
        horizon,
        steps: config.steps,
        tolerance: config.tolerance,
        form: config.form,
        smallness: setup.smallness,
        gate: setup.gate,
        clause: j,
        g0: setup.g0,
        roots: setup.roots,
        initial_bound: setup.initial_bound,
        iterates,
        differences,
        converged,
        residual_abs,
        residual_rel,
        confined,
        contracting,
    };
    Ok((u, trace, stored))
}

/// Solves `u = S[f] − B[u,u]` on `[0, T]` by Picard iteration from `u⁰ = S[f]`.
pub fn picard_solve(
    lp: &LittlewoodPaley,
    f: &SpectralField,
    config: &SolverConfig,
    calib: &CalibrationTable,
) -> Result<PicardRun> {
    let setup = setup(lp, f, config, calib)?;
    let (u, trace, iterates) = iterate(lp, &setup, setup.source.clone(), config, calib)?;
    let record = build_record(lp, u, config, calib, 0.0)?;
    Ok(PicardRun { record, trace, iterates })
}

/// Picard run whose first iterate is `S[f] + δ‖S[f]‖_Z · S[g]/‖S[g]‖_Z`.
pub fn picard_solve_perturbed(
    lp: &LittlewoodPaley,
    f: &SpectralField,
    perturbation: &SpectralField,
    delta: f64,
    config: &SolverConfig,
    calib: &CalibrationTable,
) -> Result<PicardRun> {
    let setup = setup(lp, f, config, calib)?;
    let mut start = setup.source.clone();
    if delta != 0.0 {
        let p = heat_source(perturbation, config.time_grid()?)?;
        let pz = path_norms(lp, &p, config.eps)?.z;
        if pz == 0.0 {
            return Err(Error::DegenerateCorpus("perturbation has zero norm".into()));
        }
        start = start.add(&p.scaled(delta * setup.initial_bound / pz))?;
    }
    let (u, trace, iterates) = iterate(lp, &setup, start, config, calib)?;
    let record = build_record(lp, u, config, calib, 0.0)?;
    Ok(PicardRun { record, trace, iterates })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub delta: f64,
    pub iterations_standard: usize,
    pub iterations_perturbed: usize,
    /// `‖u − v‖_{Z^{-1+ε}_{∞,∞}}` of the two limits.
    pub z_difference: f64,
    pub z_difference_rel: f64,
    pub pass: bool,
}

/// Threshold on the `Z` distance between the standard and perturbed limits.
pub const UNIQUENESS_THRESHOLD: f64 = 1e-8;

/// Runs Picard from `S[f]` and from a perturbed first iterate and compares the limits.
pub fn uniqueness_check(
    lp: &LittlewoodPaley,
    f: &SpectralField,
    perturbation: &SpectralField,
    delta: f64,
    config: &SolverConfig,
    calib: &CalibrationTable,
) -> Result<UniquenessReport> {
    if !(0.0..=0.1).contains(&delta) {
        return Err(Error::InvalidIndex(format!("perturbation size must lie in [0, 0.1], got {delta}")));
    }
    let a = picard_solve(lp, f, config, calib)?;
    let b = picard_solve_perturbed(lp, f, perturbation, delta, config, calib)?;
    let diff = a.record.u.sub(&b.record.u)?;
    let z_difference = path_norms(lp, &diff, config.eps)?.z;
    let scale = path_norms(lp, &a.record.u, config.eps)?.z;
    let z_difference_rel = z_difference / scale.max(NORM_FLOOR);
    Ok(UniquenessReport {
        delta,
        iterations_standard: a.trace.iterations(),
        iterations_perturbed: b.trace.iterations(),
        z_difference,
        z_difference_rel,
        pass: z_difference < UNIQUENESS_THRESHOLD && z_difference_rel < UNIQUENESS_THRESHOLD,
    })
}
