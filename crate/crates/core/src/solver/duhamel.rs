//! Heat source `S[f]` and the Duhamel operator `G` on a uniform time grid.
//!
//! `G` treats each Fourier mode of the source as piecewise linear in time and
//! integrates against the exact heat factor, so it is exact on per-mode affine
//! sources and the restart identity holds node for node.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::besov::{TimeGrid, TimeSeriesField};
use crate::error::{Error, Result};
use crate::spectral::{heat_flow, SpectralField};

/// Per-step weights for one mode: `G_{m+1} = decay·G_m + prev·w_m + next·w_{m+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepWeights {
    pub decay: f64,
    pub prev: f64,
    pub next: f64,
}

/// `ψ(z) = (1 − e^{-z}(1 + z)) / z²`, by series below `z = 0.1`.
pub fn psi(z: f64) -> f64 {
    if z < 0.1 {
        // Σ_k (−1)^k (k+1)/(k+2)! z^k
        let mut sum = 0.0;
        let mut fact = 2.0;
        let mut zk = 1.0;
        for k in 0..16 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (k as f64 + 1.0) / fact * zk;
            zk *= z;
            fact *= k as f64 + 3.0;
        }
        sum
    } else {
        (1.0 - (-z).exp() * (1.0 + z)) / (z * z)
    }
}

/// `φ₁(z) = (1 − e^{-z}) / z`, with `φ₁(0) = 1`.
pub fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        -(-z).exp_m1() / z
    }
}

impl StepWeights {
    /// Weights for decay rate `lambda = |k|²` over a step `h`.
    pub fn new(lambda: f64, h: f64) -> Self {
        let z = lambda * h;
        let p = psi(z);
        Self { decay: (-z).exp(), prev: h * p, next: h * (phi1(z) - p) }
    }
}

fn check_mean_zero(u: &SpectralField, what: &str) -> Result<()> {
    if u.mean_magnitude() > 1e-12 * u.max_coeff().max(f64::MIN_POSITIVE) {
        return Err(Error::NonzeroMean { context: what.to_string() });
    }
    Ok(())
}

/// `S[f](t_m) = e^{t_m Δ} f` at every node.
pub fn heat_source(f: &SpectralField, time: TimeGrid) -> Result<TimeSeriesField> {
    check_mean_zero(f, "heat source data")?;
    let values = time
        .nodes()
        .into_par_iter()
        .map(|t| heat_flow(f, t))
        .collect::<Result<Vec<_>>>()?;
    TimeSeriesField::new(time, values)
}

/// `G[w](t_m) = ∫₀^{t_m} e^{(t_m − s)Δ} w(s) ds` with `w` linear between nodes.
pub fn duhamel(w: &TimeSeriesField) -> Result<TimeSeriesField> {
    for (m, v) in w.values().iter().enumerate() {
        check_mean_zero(v, &format!("Duhamel source at node {m}"))?;
    }
    let grid = w.grid();
    let len = grid.len();
    let components = w.components();
    let time = w.time();
    let h = time.dt();
    let weights: Vec<StepWeights> = grid.wavenumbers().iter().map(|r| StepWeights::new(r * r, h)).collect();
    let mut g = vec![Complex64::new(0.0, 0.0); components * len];
    let mut out = Vec::with_capacity(time.steps() + 1);
    out.push(SpectralField::zeros(grid, components, true));
    for m in 0..time.steps() {
        let (a, b) = (w.at(m).coeffs(), w.at(m + 1).coeffs());
        g.par_iter_mut().enumerate().for_each(|(i, gi)| {
            let wt = &weights[i % len];
            *gi = *gi * wt.decay + a[i] * wt.prev + b[i] * wt.next;
        });
        // Mean-zero sources keep the zero mode exactly zero.
        out.push(SpectralField::new(grid, components, g.clone(), true)?);
    }
    TimeSeriesField::new(time, out)
}
