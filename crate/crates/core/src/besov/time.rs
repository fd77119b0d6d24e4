//! Uniform time grids, time series of fields, and Chemin-Lerner norms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::{BesovIndex, Exponent, TimeExponent};
use super::norms::{samples_lp_norm, shell_norms, NormIndex, NormReport};
use crate::error::{Error, Result};
use crate::spectral::{inverse_transform, LittlewoodPaley, SpectralField};

/// Nodes `t_m = m T / M` for `m = 0..=M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 time steps, got {steps}")));
        }
        Self::with_steps(horizon, steps)
    }

    /// As `new` but allowing a single step; used for tails of a longer grid.
    pub(crate) fn with_steps(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) || steps == 0 {
            return Err(Error::InvalidGrid(format!("bad time grid T={horizon}, M={steps}")));
        }
        Ok(Self { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn node(&self, m: usize) -> f64 {
        self.horizon * m as f64 / self.steps as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|m| self.node(m)).collect()
    }

    /// Index of the node equal to `t` up to rounding.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let x = t / self.dt();
        let m = x.round();
        ((x - m).abs() < 1e-9 && m >= 0.0 && m <= self.steps as f64).then_some(m as usize)
    }

    /// Grid on `[0, T − t_{m0}]` made of the trailing nodes.
    pub fn tail(&self, m0: usize) -> Result<Self> {
        if m0 >= self.steps {
            return Err(Error::NotANode(self.node(m0)));
        }
        Self::with_steps(self.horizon - self.node(m0), self.steps - m0)
    }

    /// Grid with the same horizon and twice as many steps.
    pub fn refined(&self) -> Self {
        Self { horizon: self.horizon, steps: self.steps * 2 }
    }
}

/// `L^α(0,T)` norm of node samples: trapezoid rule on `|g|^α`, node max for `α = ∞`.
pub fn time_norm(values: &[f64], horizon: f64, alpha: TimeExponent) -> f64 {
    if alpha.is_max() {
        return values.iter().fold(0.0, |a, &b| a.max(b.abs()));
    }
    let a = 1.0 / alpha.reciprocal();
    let steps = values.len() - 1;
    let h = horizon / steps as f64;
    let powered: Vec<f64> = values.iter().map(|v| v.abs().powf(a)).collect();
    let inner: f64 = powered[1..steps].iter().sum();
    let integral = h * (inner + 0.5 * (powered[0] + powered[steps]));
    integral.powf(1.0 / a)
}

/// One field per node of a time grid, all on one spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesField {
    time: TimeGrid,
    values: Vec<SpectralField>,
}

impl TimeSeriesField {
    pub fn new(time: TimeGrid, values: Vec<SpectralField>) -> Result<Self> {
        if values.len() != time.steps + 1 {
            return Err(Error::ShapeMismatch { expected: time.steps + 1, got: values.len() });
        }
        let first = &values[0];
        for v in &values[1..] {
            if v.grid() != first.grid() {
                return Err(Error::GridMismatch);
            }
            if v.components() != first.components() {
                return Err(Error::ComponentCount { expected: first.components(), got: v.components() });
            }
        }
        Ok(Self { time, values })
    }

    pub fn constant(time: TimeGrid, u: &SpectralField) -> Self {
        Self { time, values: vec![u.clone(); time.steps + 1] }
    }

    pub fn zeros_like(&self) -> Self {
        let z = SpectralField::zeros(self.values[0].grid(), self.values[0].components(), true);
        Self::constant(self.time, &z)
    }

    pub fn time(&self) -> TimeGrid {
        self.time
    }

    pub fn values(&self) -> &[SpectralField] {
        &self.values
    }

    pub fn into_values(self) -> Vec<SpectralField> {
        self.values
    }

    pub fn at(&self, m: usize) -> &SpectralField {
        &self.values[m]
    }

    pub fn last(&self) -> &SpectralField {
        &self.values[self.time.steps]
    }

    pub fn grid(&self) -> crate::spectral::Grid {
        self.values[0].grid()
    }

    pub fn components(&self) -> usize {
        self.values[0].components()
    }

    /// Node-wise map.
    pub fn map(&self, f: impl Fn(&SpectralField) -> Result<SpectralField> + Sync + Send) -> Result<Self> {
        let values = self.values.par_iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.time, values)
    }

    fn check_time(&self, other: &Self) -> Result<()> {
        if self.time != other.time {
            return Err(Error::InvalidGrid("time grids differ".into()));
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_time(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Self::new(self.time, values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_time(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Self::new(self.time, values)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { time: self.time, values: self.values.iter().map(|v| v.scaled(a)).collect() }
    }

    /// `τ_{t0} u` restricted to the remaining nodes: `values[m0..]` on `[0, T − t0]`.
    pub fn shifted(&self, m0: usize) -> Result<Self> {
        Ok(Self { time: self.time.tail(m0)?, values: self.values[m0..].to_vec() })
    }

    /// Largest relative `L²` distance between matching nodes.
    pub fn max_relative_l2_distance(&self, other: &Self, floor: f64) -> Result<f64> {
        self.check_time(other)?;
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.relative_l2_distance(b, floor))
            .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
    }
}

/// `‖Δ̇_j u(t_m)‖_{L^p}` for every node `m` and shell `j`; reused across norms.
#[derive(Debug, Clone)]
pub struct ShellNormTable {
    pub p: Exponent,
    pub time: TimeGrid,
    pub j_min: i32,
    /// `norms[m][j - j_min]`.
    pub norms: Vec<Vec<f64>>,
}

impl ShellNormTable {
    pub fn new(lp: &LittlewoodPaley, ts: &TimeSeriesField, p: Exponent) -> Result<Self> {
        let norms = ts.values.par_iter().map(|u| shell_norms(lp, u, p)).collect::<Result<Vec<_>>>()?;
        Ok(Self { p, time: ts.time, j_min: lp.range().j_min, norms })
    }

    fn shells(&self) -> usize {
        self.norms[0].len()
    }

    /// Chemin-Lerner norm `‖2^{js} ‖Δ̇_j u‖_{L^α_T L^p}‖_{ℓ^q}`.
    pub fn chemin_lerner(&self, alpha: TimeExponent, s: f64, q: Exponent) -> NormReport {
        let per_shell = (0..self.shells())
            .map(|k| {
                let series: Vec<f64> = self.norms.iter().map(|row| row[k]).collect();
                let j = self.j_min + k as i32;
                (j, 2f64.powf(j as f64 * s) * time_norm(&series, self.time.horizon, alpha))
            })
            .collect();
        let index = NormIndex { s: Some(s), p: Some(self.p), q: Some(q), alpha: Some(alpha), ..NormIndex::default() };
        NormReport::from_shells("chemin_lerner", index, q, per_shell)
    }

    /// Pointwise-in-time Besov norms `‖u(t_m)‖_{Ḃ^s_{p,q}}`.
    pub fn besov_series(&self, s: f64, q: Exponent) -> Vec<f64> {
        self.norms
            .iter()
            .map(|row| {
                q.sequence_norm(row.iter().enumerate().map(|(k, v)| 2f64.powf((self.j_min + k as i32) as f64 * s) * v))
            })
            .collect()
    }
}

/// `‖u(t_m)‖_{L^p}` per node.
pub fn lp_series(ts: &TimeSeriesField, p: Exponent) -> Vec<f64> {
    let grid = ts.grid();
    let cell = grid.spacing().powi(grid.dim() as i32);
    ts.values.par_iter().map(|u| samples_lp_norm(&inverse_transform(u).magnitudes(), cell, p)).collect()
}

/// Mixed norm `‖u‖_{L^α_T L^p}` with the per-node values as breakdown.
pub fn lebesgue_time_norm(ts: &TimeSeriesField, alpha: TimeExponent, p: Exponent) -> NormReport {
    let per_time = ts.time.nodes().into_iter().zip(lp_series(ts, p)).collect();
    let index = NormIndex { p: Some(p), alpha: Some(alpha), ..NormIndex::default() };
    NormReport::from_times("lebesgue_time", index, alpha, ts.time.horizon, per_time)
}

/// `‖u‖_{L̃^α_T Ḃ^s_{p,q}}`.
pub fn chemin_lerner_norm(
    lp: &LittlewoodPaley,
    ts: &TimeSeriesField,
    alpha: TimeExponent,
    idx: BesovIndex,
) -> Result<NormReport> {
    Ok(ShellNormTable::new(lp, ts, idx.p)?.chemin_lerner(alpha, idx.s, idx.q))
}
