//! `B[u,v] = Gℙ∇·(u⊗v)` and `B̃[u,v] = G Σ_j ℙ∇·Δ̇_j Bony(u,v)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::duhamel::duhamel;
use crate::besov::{AleVerdict, TimeSeriesField};
use crate::error::{Error, Result};
use crate::paraproduct::{bony_product, pdiv_blockwise, pointwise_tensor};
use crate::spectral::{pdiv, LittlewoodPaley, SpectralField};

/// Which product feeds the Duhamel operator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BilinearForm {
    /// `B`: pointwise product, direct `ℙ∇·`.
    #[default]
    Pointwise,
    /// `B̃`: Bony product, blockwise `ℙ∇·`.
    Bony,
}

fn check_series(u: &TimeSeriesField, v: &TimeSeriesField) -> Result<()> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    if u.time() != v.time() {
        return Err(Error::InvalidGrid("time grids differ".into()));
    }
    Ok(())
}

fn source(
    u: &TimeSeriesField,
    v: &TimeSeriesField,
    node: impl Fn(&SpectralField, &SpectralField) -> Result<SpectralField> + Sync,
) -> Result<TimeSeriesField> {
    check_series(u, v)?;
    let values = u
        .values()
        .par_iter()
        .zip(v.values())
        .map(|(a, b)| node(a, b))
        .collect::<Result<Vec<_>>>()?;
    TimeSeriesField::new(u.time(), values)
}

/// `ℙ∇·(u⊗v)` at every node.
pub fn nonlinear_source(u: &TimeSeriesField, v: &TimeSeriesField) -> Result<TimeSeriesField> {
    source(u, v, |a, b| pdiv(&pointwise_tensor(a, b)?))
}

/// `Σ_j ℙ∇·Δ̇_j Bony(u,v)` at every node.
pub fn nonlinear_source_bony(lp: &LittlewoodPaley, u: &TimeSeriesField, v: &TimeSeriesField) -> Result<TimeSeriesField> {
    source(u, v, |a, b| pdiv_blockwise(lp, &bony_product(lp, a, b)?))
}

pub fn bilinear_b(u: &TimeSeriesField, v: &TimeSeriesField) -> Result<TimeSeriesField> {
    duhamel(&nonlinear_source(u, v)?)
}

pub fn bilinear_btilde(lp: &LittlewoodPaley, u: &TimeSeriesField, v: &TimeSeriesField) -> Result<TimeSeriesField> {
    duhamel(&nonlinear_source_bony(lp, u, v)?)
}

pub fn bilinear(lp: &LittlewoodPaley, form: BilinearForm, u: &TimeSeriesField, v: &TimeSeriesField) -> Result<TimeSeriesField> {
    match form {
        BilinearForm::Pointwise => bilinear_b(u, v),
        BilinearForm::Bony => bilinear_btilde(lp, u, v),
    }
}

/// `B_{α,ℓ,ε}`: `B` in the critical case, `B̃` otherwise.
pub fn bilinear_ale(lp: &LittlewoodPaley, verdict: &AleVerdict, u: &TimeSeriesField, v: &TimeSeriesField) -> Result<TimeSeriesField> {
    let form = if verdict.uses_btilde { BilinearForm::Bony } else { BilinearForm::Pointwise };
    bilinear(lp, form, u, v)
}
