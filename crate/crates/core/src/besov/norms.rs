//! Lebesgue and Besov norms of a single field, and the `NormReport` carrier.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::{BesovIndex, Exponent, TimeExponent};
use crate::error::{Error, Result};
use crate::spectral::field::pointwise_magnitudes;
use crate::spectral::{heat_flow, inverse_transform, LittlewoodPaley, SpectralField};

/// How `value` is rebuilt from the breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Aggregation {
    /// `ℓ^q` over `per_shell`.
    Shells { q: Exponent },
    /// Trapezoid `L^α` (or node max) over `per_time`.
    Time { alpha: TimeExponent, horizon: f64 },
    /// Maximum over `parts`.
    Max,
    /// A single value with no breakdown.
    Scalar,
}

/// Parameters a norm was computed with; absent entries are omitted from JSON.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NormIndex {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Exponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<TimeExponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<Exponent>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl From<BesovIndex> for NormIndex {
    fn from(idx: BesovIndex) -> Self {
        Self { s: Some(idx.s), p: Some(idx.p), q: Some(idx.q), ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub norm_kind: String,
    pub index: NormIndex,
    pub value: f64,
    pub per_shell: Vec<(i32, f64)>,
    pub per_time: Vec<(f64, f64)>,
    pub aggregation: Aggregation,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<NormReport>,
}

impl NormReport {
    pub fn from_shells(kind: &str, index: NormIndex, q: Exponent, per_shell: Vec<(i32, f64)>) -> Self {
        let value = q.sequence_norm(per_shell.iter().map(|&(_, v)| v));
        Self {
            norm_kind: kind.to_string(),
            index,
            value,
            per_shell,
            per_time: Vec::new(),
            aggregation: Aggregation::Shells { q },
            parts: Vec::new(),
        }
    }

    pub fn from_times(
        kind: &str,
        index: NormIndex,
        alpha: TimeExponent,
        horizon: f64,
        per_time: Vec<(f64, f64)>,
    ) -> Self {
        let values: Vec<f64> = per_time.iter().map(|&(_, v)| v).collect();
        let value = super::time::time_norm(&values, horizon, alpha);
        Self {
            norm_kind: kind.to_string(),
            index,
            value,
            per_shell: Vec::new(),
            per_time,
            aggregation: Aggregation::Time { alpha, horizon },
            parts: Vec::new(),
        }
    }

    pub fn max_of(kind: &str, index: NormIndex, parts: Vec<NormReport>) -> Self {
        let value = parts.iter().map(|p| p.value).fold(0.0, f64::max);
        Self {
            norm_kind: kind.to_string(),
            index,
            value,
            per_shell: Vec::new(),
            per_time: Vec::new(),
            aggregation: Aggregation::Max,
            parts,
        }
    }

    pub fn scalar(kind: &str, index: NormIndex, value: f64) -> Self {
        Self {
            norm_kind: kind.to_string(),
            index,
            value,
            per_shell: Vec::new(),
            per_time: Vec::new(),
            aggregation: Aggregation::Scalar,
            parts: Vec::new(),
        }
    }

    /// Rebuilds the value from the stored breakdown.
    pub fn aggregate(&self) -> f64 {
        match self.aggregation {
            Aggregation::Shells { q } => q.sequence_norm(self.per_shell.iter().map(|&(_, v)| v)),
            Aggregation::Time { alpha, horizon } => {
                let values: Vec<f64> = self.per_time.iter().map(|&(_, v)| v).collect();
                super::time::time_norm(&values, horizon, alpha)
            }
            Aggregation::Max => self.parts.iter().map(|p| p.aggregate()).fold(0.0, f64::max),
            Aggregation::Scalar => self.value,
        }
    }
}

/// Collocation `L^p` norm over the torus of the pointwise Euclidean magnitude.
pub fn lp_norm(u: &SpectralField, p: Exponent) -> f64 {
    let phys = inverse_transform(u);
    samples_lp_norm(&phys.magnitudes(), u.grid().spacing().powi(u.grid().dim() as i32), p)
}

pub(crate) fn samples_lp_norm(magnitudes: &[f64], cell: f64, p: Exponent) -> f64 {
    if p.is_infinite() {
        return magnitudes.iter().fold(0.0, |a, &b| a.max(b));
    }
    let pv = p.value();
    if pv == 2.0 {
        return (cell * magnitudes.iter().map(|m| m * m).sum::<f64>()).sqrt();
    }
    if pv == 1.0 {
        return cell * magnitudes.iter().sum::<f64>();
    }
    (cell * magnitudes.iter().map(|m| m.powf(pv)).sum::<f64>()).powf(1.0 / pv)
}

/// `‖Δ̇_j u‖_{L^p}` for every shell of the range, ordered from `j_min`.
pub fn shell_norms(lp: &LittlewoodPaley, u: &SpectralField, p: Exponent) -> Result<Vec<f64>> {
    lp.check_grid(u)?;
    let grid = u.grid();
    let cell = grid.spacing().powi(grid.dim() as i32);
    let m = u.components();
    let len = grid.len();
    lp.range()
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|j| {
            if lp.shell(j).iter().all(|&(i, _)| (0..m).all(|c| u.component(c)[i].norm_sqr() == 0.0)) {
                return Ok(0.0);
            }
            let block = lp.block(u, j)?;
            if p == Exponent::TWO {
                return Ok(block.l2_norm());
            }
            let phys = inverse_transform(&block);
            Ok(samples_lp_norm(&pointwise_magnitudes(phys.values(), m, len), cell, p))
        })
        .collect()
}

/// `‖u‖_{Ḃ^s_{p,q}} = ‖2^{js}‖Δ̇_j u‖_{L^p}‖_{ℓ^q}` over the shell range.
pub fn besov_norm(lp: &LittlewoodPaley, u: &SpectralField, idx: BesovIndex) -> Result<NormReport> {
    let norms = shell_norms(lp, u, idx.p)?;
    Ok(besov_from_shells(lp, &norms, idx))
}

pub(crate) fn besov_from_shells(lp: &LittlewoodPaley, norms: &[f64], idx: BesovIndex) -> NormReport {
    let per_shell = lp
        .range()
        .iter()
        .zip(norms)
        .map(|(j, &v)| (j, 2f64.powf(j as f64 * idx.s) * v))
        .collect();
    NormReport::from_shells("besov", idx.into(), idx.q, per_shell)
}

/// Log-spaced probe times covering `[2^{-2 j_max - 2}, 2^{-2 j_min + 2}]`, 8 per octave of `t`.
pub fn default_probe_times(lp: &LittlewoodPaley) -> Vec<f64> {
    let r = lp.range();
    let lo = (-2 * r.j_max - 2) as f64;
    let hi = (-2 * r.j_min + 2) as f64;
    let steps = ((hi - lo) * 8.0).round() as usize;
    (0..=steps).map(|i| 2f64.powf(lo + (hi - lo) * i as f64 / steps as f64)).collect()
}

/// `sup_t t^{-s/2} ‖e^{tΔ}u‖_{L^∞}` over the probe times, for `s < 0`.
pub fn heat_char_norm(u: &SpectralField, s: f64, probes: &[f64]) -> Result<f64> {
    if !(s < 0.0) {
        return Err(Error::InvalidIndex(format!("heat characterisation needs s < 0, got {s}")));
    }
    probes
        .par_iter()
        .map(|&t| Ok(t.powf(-s / 2.0) * lp_norm(&heat_flow(u, t)?, Exponent::INFINITY)))
        .collect::<Result<Vec<f64>>>()
        .map(|v| v.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, Grid, PhysicalField};

    #[test]
    fn cosine_norms() {
        let g = Grid::new(2, 16).unwrap();
        let u = forward_transform(&PhysicalField::from_fn(g, 1, |_, x| (2.0 * x[0] + x[1]).cos()));
        let two_pi = 2.0 * std::f64::consts::PI;
        assert!((lp_norm(&u, Exponent::INFINITY) - 1.0).abs() < 1e-14);
        assert!((lp_norm(&u, Exponent::TWO) - two_pi / 2f64.sqrt()).abs() < 1e-12);
        // On the grid, 2x + y takes the values 2πk/16 equally often.
        let mean_abs = (0..16).map(|k| (two_pi * k as f64 / 16.0).cos().abs()).sum::<f64>() / 16.0;
        let l1 = lp_norm(&u, Exponent::ONE);
        assert!((l1 - two_pi * two_pi * mean_abs).abs() < 1e-12, "{l1}");
    }

    #[test]
    fn single_mode_besov_norm_from_two_shells() {
        let g = Grid::new(2, 32).unwrap();
        let lp = LittlewoodPaley::standard(g);
        let u = forward_transform(&PhysicalField::from_fn(g, 1, |_, x| (3.0 * x[0] + 2.0 * x[1]).cos()))
            .without_mean();
        let r = 13f64.sqrt();
        let s = -0.4;
        let report = besov_norm(&lp, &u, BesovIndex::sup(s)).unwrap();
        let cut = lp.cutoffs();
        let expect = (-3..8)
            .map(|j| 2f64.powf(j as f64 * s) * cut.phi(r * 2f64.powi(-j)))
            .fold(0.0, f64::max);
        assert!((report.value - expect).abs() < 1e-13);
        assert!((report.aggregate() - report.value).abs() < 1e-15);
    }
}
