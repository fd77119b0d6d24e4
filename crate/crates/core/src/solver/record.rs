//! Solution records, the blowup monitor, the restart identity and continuation.

use serde::{Deserialize, Serialize};

use super::bilinear::{bilinear, BilinearForm};
use super::calibration::{smallness_from_norms, CalibrationTable};
use super::duhamel::heat_source;
use super::picard::{picard_solve, PicardRun, SolverConfig};
use crate::besov::{
    check_ale, lp_series, x_norm, y_from_table, z_from_table, z_norm, BesovIndex, Exponent, NormReport,
    ShellNormTable, TimeExponent, TimeSeriesField,
};
use crate::error::{Error, Result};
use crate::spectral::LittlewoodPaley;

/// One node of the norm time series; the CSV columns in order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub t: f64,
    pub besov_minus1_eps: f64,
    pub linf: f64,
    /// `‖u‖_{Z^s_{p,q}(t)}` over `[0, t]` for the persistence index.
    pub z_norm: f64,
    /// `ρ(T − t, u(t))`.
    pub rho: f64,
    #[serde(with = "crate::io::json_f64")]
    pub guaranteed_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub u: TimeSeriesField,
    pub eps: f64,
    pub persistence: BesovIndex,
    /// Absolute time of node 0; nonzero for continuation runs.
    pub origin: f64,
    pub rows: Vec<NormRow>,
    pub z_eps: NormReport,
    pub z_persistence: NormReport,
    pub y: NormReport,
    pub x: Vec<NormReport>,
}

/// Summary of a record without the field data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub eps: f64,
    pub persistence: BesovIndex,
    pub origin: f64,
    pub horizon: f64,
    pub steps: usize,
    pub z_eps: NormReport,
    pub z_persistence: NormReport,
    pub y: NormReport,
    pub x: Vec<NormReport>,
}

impl SolutionRecord {
    pub fn summary(&self) -> RecordSummary {
        RecordSummary {
            eps: self.eps,
            persistence: self.persistence,
            origin: self.origin,
            horizon: self.u.time().horizon(),
            steps: self.u.time().steps(),
            z_eps: self.z_eps.clone(),
            z_persistence: self.z_persistence.clone(),
            y: self.y.clone(),
            x: self.x.clone(),
        }
    }
}

/// `‖u‖_{Z^s_{p,q}(t_m)}` for every node, from a table with spatial exponent `p`.
pub fn running_z(table: &ShellNormTable, s: f64, q: Exponent) -> Vec<f64> {
    let steps = table.time.steps();
    let h = table.time.dt();
    let shells = table.norms[0].len();
    let mut integral = vec![0.0; shells];
    let mut sup: Vec<f64> = table.norms[0].clone();
    let weight = |k: usize, r: f64| 2f64.powf((table.j_min + k as i32) as f64 * r);
    let mut out = Vec::with_capacity(steps + 1);
    for m in 0..=steps {
        if m > 0 {
            for k in 0..shells {
                integral[k] += 0.5 * h * (table.norms[m - 1][k] + table.norms[m][k]);
                sup[k] = sup[k].max(table.norms[m][k]);
            }
        }
        let smooth = q.sequence_norm((0..shells).map(|k| weight(k, s + 2.0) * integral[k]));
        let rough = q.sequence_norm((0..shells).map(|k| weight(k, s) * sup[k]));
        out.push(smooth.max(rough));
    }
    out
}

pub(crate) fn build_record(
    lp: &LittlewoodPaley,
    u: TimeSeriesField,
    config: &SolverConfig,
    calib: &CalibrationTable,
    origin: f64,
) -> Result<SolutionRecord> {
    let eps = config.eps;
    let c = calib.for_eps(eps)?;
    let inf = Exponent::INFINITY;
    let table_inf = ShellNormTable::new(lp, &u, inf)?;
    let besov = table_inf.besov_series(-1.0 + eps, inf);
    let linf = lp_series(&u, inf);
    let idx = config.persistence;
    let table_p = if idx.p == inf { table_inf.clone() } else { ShellNormTable::new(lp, &u, idx.p)? };
    let running = running_z(&table_p, idx.s, idx.q);
    let time = u.time();
    let rows = (0..=time.steps())
        .map(|m| {
            let t = time.node(m);
            let small = smallness_from_norms(besov[m], linf[m], time.horizon() - t, c);
            let rest = smallness_from_norms(besov[m], linf[m], 1.0, c);
            NormRow {
                t: origin + t,
                besov_minus1_eps: besov[m],
                linf: linf[m],
                z_norm: running[m],
                rho: small.rho,
                guaranteed_t: rest.guaranteed_t,
            }
        })
        .collect();
    let x = config
        .monitored
        .iter()
        .map(|&(alpha, ell, e)| x_norm(lp, &u, alpha, ell, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(SolutionRecord {
        z_eps: z_from_table(&table_inf, -1.0 + eps, inf)?,
        z_persistence: z_from_table(&table_p, idx.s, idx.q)?,
        y: y_from_table(&table_inf, &linf, eps)?,
        x,
        rows,
        u,
        eps,
        persistence: idx,
        origin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub t: f64,
    /// `ρ(T* − t, u(t))`.
    pub rho: f64,
    /// Horizon the smallness condition guarantees from `u(t)`.
    #[serde(with = "crate::io::json_f64")]
    pub guaranteed_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupSeries {
    pub candidate: f64,
    pub rows: Vec<BlowupRow>,
    /// `t + guaranteed_T(u(t)) ≥ T` at every node: the guarantee never undershoots
    /// the lifespan the run actually achieved.
    pub consistent: bool,
}

/// `ρ(T* − t, u(t))` and the guaranteed continuation horizon at each node.
pub fn blowup_monitor(record: &SolutionRecord, candidate: f64, calib: &CalibrationTable) -> Result<BlowupSeries> {
    let time = record.u.time();
    let horizon = time.horizon();
    if candidate > horizon * (1.0 + 1e-12) || !(candidate > 0.0) {
        return Err(Error::IncompleteRecord(format!("record covers [0, {horizon}], candidate is {candidate}")));
    }
    let c = calib.for_eps(record.eps)?;
    let rows: Vec<BlowupRow> = record
        .rows
        .iter()
        .enumerate()
        .filter(|(m, _)| time.node(*m) <= candidate * (1.0 + 1e-12))
        .map(|(m, r)| {
            let t = time.node(m);
            let rho = smallness_from_norms(r.besov_minus1_eps, r.linf, (candidate - t).max(0.0), c).rho;
            BlowupRow { t: r.t, rho, guaranteed_t: r.guaranteed_t }
        })
        .collect();
    let consistent = rows.iter().enumerate().all(|(m, r)| time.node(m) + r.guaranteed_t >= horizon * (1.0 - 1e-12));
    Ok(BlowupSeries { candidate, rows, consistent })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupReport {
    pub t0: f64,
    pub discrepancy: f64,
    pub lhs_norm: f64,
}

/// Relative `Z^s_{p,q}` distance between `τ_{t0}B[u,v]` and
/// `S[B[u,v](t0)] + B[τ_{t0}u, τ_{t0}v]` at the interior node `m0`.
pub fn semigroup_check(
    lp: &LittlewoodPaley,
    form: BilinearForm,
    u: &TimeSeriesField,
    v: &TimeSeriesField,
    m0: usize,
    z: BesovIndex,
) -> Result<SemigroupReport> {
    let time = u.time();
    if m0 == 0 || m0 >= time.steps() {
        return Err(Error::NotANode(time.node(m0)));
    }
    let full = bilinear(lp, form, u, v)?;
    let lhs = full.shifted(m0)?;
    let tail = lhs.time();
    let rhs = heat_source(full.at(m0), tail)?.add(&bilinear(lp, form, &u.shifted(m0)?, &v.shifted(m0)?)?)?;
    let lhs_norm = z_norm(lp, &lhs, z.s, z.p, z.q)?.value;
    let diff = z_norm(lp, &lhs.sub(&rhs)?, z.s, z.p, z.q)?.value;
    Ok(SemigroupReport { t0: time.node(m0), discrepancy: diff / lhs_norm.max(1e-300), lhs_norm })
}

/// `semigroup_check` at a time that must coincide with an interior node.
pub fn semigroup_check_at(
    lp: &LittlewoodPaley,
    form: BilinearForm,
    u: &TimeSeriesField,
    v: &TimeSeriesField,
    t0: f64,
    z: BesovIndex,
) -> Result<SemigroupReport> {
    let m0 = u.time().node_index(t0).ok_or(Error::NotANode(t0))?;
    semigroup_check(lp, form, u, v, m0, z)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartReport {
    pub t0: f64,
    /// Largest relative `L²` distance between the two runs on the overlap.
    pub max_relative_l2: f64,
    /// Relative `Z^{-1+ε}_{∞,∞}` distance on the overlap.
    pub z_relative: f64,
}

/// Re-solves from `u(t0)` on `[t0, T]` and compares with the original run.
pub fn restart(
    lp: &LittlewoodPaley,
    record: &SolutionRecord,
    m0: usize,
    config: &SolverConfig,
    calib: &CalibrationTable,
) -> Result<(PicardRun, RestartReport)> {
    let time = record.u.time();
    if m0 == 0 || m0 >= time.steps() {
        return Err(Error::NotANode(time.node(m0)));
    }
    let mut tail_config = config.clone();
    tail_config.horizon = time.horizon() - time.node(m0);
    tail_config.steps = time.steps() - m0;
    tail_config.leray_initial = false;
    let mut run = picard_solve(lp, record.u.at(m0), &tail_config, calib)?;
    run.record.origin = record.origin + time.node(m0);
    for row in run.record.rows.iter_mut() {
        row.t += record.origin + time.node(m0);
    }
    let overlap = record.u.shifted(m0)?;
    // Same node set up to rounding of `T − t0`.
    let aligned = TimeSeriesField::new(overlap.time(), run.record.u.values().to_vec())?;
    let max_relative_l2 = overlap.max_relative_l2_distance(&aligned, 1e-300)?;
    let inf = Exponent::INFINITY;
    let scale = z_norm(lp, &overlap, -1.0 + config.eps, inf, inf)?.value;
    let diff = z_norm(lp, &overlap.sub(&aligned)?, -1.0 + config.eps, inf, inf)?.value;
    let report = RestartReport { t0: record.origin + time.node(m0), max_relative_l2, z_relative: diff / scale.max(1e-300) };
    Ok((run, report))
}

/// Checks `(α, ℓ, ε)` and returns the `X` norm of a series.
pub fn class_norm(lp: &LittlewoodPaley, u: &TimeSeriesField, alpha: TimeExponent, ell: Exponent, eps: f64) -> Result<NormReport> {
    check_ale(alpha, ell, eps, u.grid().dim())?;
    x_norm(lp, u, alpha, ell, eps)
}
