//! Dealiased pointwise products, Bony paraproducts and remainder, and the blockwise `ℙ∇·`.
//!
//! Every product is formed on a zero-padded grid of `3N/2` points per axis and
//! truncated back to modes with all components strictly inside `(-N/2, N/2)`.
//! Retained modes are exact for inputs on the `N` grid. Sums of products are
//! accumulated in padded physical space and transformed once, so the Bony
//! decomposition and the pointwise product share one truncation.

use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::besov::{besov_norm, lp_norm, BesovIndex, ConstantKind, Exponent, InequalityEntry};
use crate::error::{Error, Result};
use crate::spectral::field::truncate_padded;
use crate::spectral::{pdiv, CutoffPair, Grid, LittlewoodPaley, SpectralField};

/// Discarded relative tail mass above which a product logs a warning.
pub const TAIL_WARNING: f64 = 1e-13;

/// Only the first tail warning of a process goes out at warn level; later ones at debug.
static TAIL_WARNED: AtomicBool = AtomicBool::new(false);

fn padded_size(grid: &Grid) -> usize {
    grid.size() * 3 / 2
}

fn check_pair(a: &SpectralField, b: &SpectralField) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Padded samples of each component.
fn pad(u: &SpectralField) -> Vec<Vec<f64>> {
    let m = padded_size(&u.grid());
    (0..u.components()).into_par_iter().map(|c| u.padded_samples(c, m)).collect()
}

fn truncate_all(grid: Grid, samples: Vec<Vec<f64>>) -> Result<SpectralField> {
    let m = padded_size(&grid);
    let parts: Vec<(Vec<_>, f64)> = samples.into_par_iter().map(|s| truncate_padded(grid, &s, m)).collect();
    let worst = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    if worst > TAIL_WARNING {
        if TAIL_WARNED.swap(true, Ordering::Relaxed) {
            log::debug!("dealiased product discarded a relative tail of {worst:.3e}");
        } else {
            log::warn!("dealiased product discarded a relative tail of {worst:.3e}; further tails are logged at debug level");
        }
    }
    let components = parts.len();
    let coeffs = parts.into_iter().flat_map(|p| p.0).collect();
    SpectralField::new(grid, components, coeffs, false)
}

/// Relative tail mass a product of `u` and `v` would discard.
pub fn product_tail(u: &SpectralField, v: &SpectralField) -> Result<f64> {
    check_pair(u, v)?;
    let grid = u.grid();
    let m = padded_size(&grid);
    let (pu, pv) = (pad(u), pad(v));
    let mut worst = 0.0f64;
    for a in &pu {
        for b in &pv {
            let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
            worst = worst.max(truncate_padded(grid, &prod, m).1);
        }
    }
    Ok(worst)
}

/// `(u ⊗ v)_{ij} = u_i v_j`, stored with `(i, j) → i·m_v + j`.
pub fn pointwise_tensor(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    check_pair(u, v)?;
    let (pu, pv) = (pad(u), pad(v));
    let mv = v.components();
    let samples = (0..u.components() * mv)
        .into_par_iter()
        .map(|ij| pu[ij / mv].iter().zip(&pv[ij % mv]).map(|(a, b)| a * b).collect())
        .collect();
    truncate_all(u.grid(), samples)
}

/// Padded physical blocks `Δ̇_j w` of a scalar field, one per shell of the range.
struct PaddedBlocks {
    j_min: i32,
    blocks: Vec<Vec<f64>>,
}

impl PaddedBlocks {
    fn new(lp: &LittlewoodPaley, w: &SpectralField, c: usize) -> Result<Self> {
        let m = padded_size(&lp.grid());
        let scalar = w.component_field(c);
        let blocks = lp
            .range()
            .iter()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|j| Ok(lp.block(&scalar, j)?.padded_samples(0, m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { j_min: lp.range().j_min, blocks })
    }

    fn block(&self, j: i32) -> Option<&[f64]> {
        let k = j - self.j_min;
        (k >= 0 && (k as usize) < self.blocks.len()).then(|| self.blocks[k as usize].as_slice())
    }

    /// `Ṡ_{j-1} w = Σ_{j' ≤ j-2} Δ̇_{j'} w` for mean-zero `w`.
    fn low(&self, j: i32) -> Vec<f64> {
        let len = self.blocks[0].len();
        let mut acc = vec![0.0; len];
        for jj in self.j_min..=j - 2 {
            if let Some(b) = self.block(jj) {
                for (a, x) in acc.iter_mut().zip(b) {
                    *a += x;
                }
            }
        }
        acc
    }

    fn shells(&self) -> impl Iterator<Item = i32> {
        self.j_min..self.j_min + self.blocks.len() as i32
    }
}

fn accumulate_product(acc: &mut [f64], a: &[f64], b: &[f64]) {
    for ((s, x), y) in acc.iter_mut().zip(a).zip(b) {
        *s += x * y;
    }
}

/// Which Bony pieces to accumulate.
#[derive(Debug, Clone, Copy)]
struct Pieces {
    t_uv: bool,
    t_vu: bool,
    r: bool,
}

fn bony_samples(bu: &PaddedBlocks, bv: &PaddedBlocks, pieces: Pieces) -> Vec<f64> {
    let len = bu.blocks[0].len();
    let mut acc = vec![0.0; len];
    for j in bu.shells() {
        if pieces.t_uv {
            if let Some(dv) = bv.block(j) {
                accumulate_product(&mut acc, &bu.low(j), dv);
            }
        }
        if pieces.t_vu {
            if let Some(du) = bu.block(j) {
                accumulate_product(&mut acc, &bv.low(j), du);
            }
        }
        if pieces.r {
            if let Some(du) = bu.block(j) {
                for nu in -1..=1 {
                    if let Some(dv) = bv.block(j - nu) {
                        accumulate_product(&mut acc, du, dv);
                    }
                }
            }
        }
    }
    acc
}

fn check_scalar_pair(u: &SpectralField, v: &SpectralField) -> Result<()> {
    check_pair(u, v)?;
    for w in [u, v] {
        if w.components() != 1 {
            return Err(Error::ComponentCount { expected: 1, got: w.components() });
        }
        if w.mean_magnitude() > 1e-12 * w.max_coeff().max(f64::MIN_POSITIVE) {
            return Err(Error::NonzeroMean { context: "paraproduct operand".into() });
        }
    }
    Ok(())
}

fn scalar_piece(lp: &LittlewoodPaley, u: &SpectralField, v: &SpectralField, pieces: Pieces) -> Result<SpectralField> {
    check_scalar_pair(u, v)?;
    lp.check_grid(u)?;
    let bu = PaddedBlocks::new(lp, u, 0)?;
    let bv = PaddedBlocks::new(lp, v, 0)?;
    truncate_all(u.grid(), vec![bony_samples(&bu, &bv, pieces)])
}

/// `Ṫ_u v = Σ_j Ṡ_{j-1}u Δ̇_j v` for mean-zero scalars.
pub fn paraproduct_t(lp: &LittlewoodPaley, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    scalar_piece(lp, u, v, Pieces { t_uv: true, t_vu: false, r: false })
}

/// `Ṙ(u, v) = Σ_j Σ_{|ν|≤1} Δ̇_j u Δ̇_{j-ν} v` for mean-zero scalars.
pub fn remainder_r(lp: &LittlewoodPaley, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    scalar_piece(lp, u, v, Pieces { t_uv: false, t_vu: false, r: true })
}

/// The shell-`j` summands `Ṡ_{j-1}u Δ̇_j v` of `Ṫ_u v`, each transformed separately.
pub fn paraproduct_summands(lp: &LittlewoodPaley, u: &SpectralField, v: &SpectralField) -> Result<Vec<(i32, SpectralField)>> {
    check_scalar_pair(u, v)?;
    let bu = PaddedBlocks::new(lp, u, 0)?;
    let bv = PaddedBlocks::new(lp, v, 0)?;
    bv.shells()
        .map(|j| {
            let mut acc = vec![0.0; bu.blocks[0].len()];
            accumulate_product(&mut acc, &bu.low(j), bv.block(j).expect("shell in range"));
            Ok((j, truncate_all(u.grid(), vec![acc])?))
        })
        .collect()
}

/// Fraction of `w`'s spectral energy outside the annulus `2^j·C̃`, `C̃ = B(0,2/3) + C`.
pub fn energy_outside_annulus(lp: &LittlewoodPaley, w: &SpectralField, j: i32) -> f64 {
    let (lo, hi) = CutoffPair::shell_support(j);
    let scale = 2f64.powi(j);
    let (lo, hi) = (lo - 2.0 / 3.0 * scale, hi + 2.0 / 3.0 * scale);
    let len = lp.grid().len();
    let mut total = 0.0;
    let mut outside = 0.0;
    for (i, z) in w.coeffs().iter().enumerate() {
        let r = lp.wavenumbers()[i % len];
        let e = z.norm_sqr();
        total += e;
        if r <= lo || r >= hi {
            outside += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

/// `Bony(u, v)_{ij} = Ṫ_{u_i} v_j + Ṫ_{v_j} u_i + Ṙ(u_i, v_j)`; the zero mode is kept.
pub fn bony_product(lp: &LittlewoodPaley, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    bony_pieces(lp, u, v, Pieces { t_uv: true, t_vu: true, r: true })
}

fn bony_pieces(lp: &LittlewoodPaley, u: &SpectralField, v: &SpectralField, pieces: Pieces) -> Result<SpectralField> {
    check_pair(u, v)?;
    lp.check_grid(u)?;
    let bu = (0..u.components()).map(|c| PaddedBlocks::new(lp, u, c)).collect::<Result<Vec<_>>>()?;
    let bv = (0..v.components()).map(|c| PaddedBlocks::new(lp, v, c)).collect::<Result<Vec<_>>>()?;
    let mv = v.components();
    let samples = (0..u.components() * mv)
        .into_par_iter()
        .map(|ij| bony_samples(&bu[ij / mv], &bv[ij % mv], pieces))
        .collect();
    truncate_all(u.grid(), samples)
}

/// `Σ_j ℙ∇·Δ̇_j W`, summed shell by shell.
pub fn pdiv_blockwise(lp: &LittlewoodPaley, w: &SpectralField) -> Result<SpectralField> {
    let n = w.grid().dim();
    if w.components() != n * n {
        return Err(Error::ComponentCount { expected: n * n, got: w.components() });
    }
    let mut acc = SpectralField::zeros(w.grid(), n, true);
    for j in lp.range().iter() {
        acc.axpy(1.0, &pdiv(&lp.block(w, j)?)?)?;
    }
    Ok(acc)
}

/// Bony-versus-pointwise comparison for a pair of vector fields.
#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    #[serde(skip)]
    pub bony_result: SpectralField,
    #[serde(skip)]
    pub pointwise_result: SpectralField,
    /// `‖bony − pointwise‖_{L²} / max(‖pointwise‖_{L²}, floor)`.
    pub discrepancy: f64,
    pub norm_t_uv: f64,
    pub norm_t_vu: f64,
    pub norm_r: f64,
    pub tail_mass: f64,
}

pub const DISCREPANCY_FLOOR: f64 = 1e-300;

pub fn product_report(lp: &LittlewoodPaley, u: &SpectralField, v: &SpectralField) -> Result<ProductReport> {
    let bony_result = bony_product(lp, u, v)?;
    let pointwise_result = pointwise_tensor(u, v)?;
    let discrepancy = bony_result.relative_l2_distance(&pointwise_result, DISCREPANCY_FLOOR)?;
    let piece = |pieces| bony_pieces(lp, u, v, pieces).map(|f| f.l2_norm());
    Ok(ProductReport {
        discrepancy,
        norm_t_uv: piece(Pieces { t_uv: true, t_vu: false, r: false })?,
        norm_t_vu: piece(Pieces { t_uv: false, t_vu: true, r: false })?,
        norm_r: piece(Pieces { t_uv: false, t_vu: false, r: true })?,
        tail_mass: product_tail(u, v)?,
        bony_result,
        pointwise_result,
    })
}

/// Hölder-conjugate exponent `p` with `1/p = 1/p1 + 1/p2`.
fn product_exponent(p1: Exponent, p2: Exponent) -> Result<Exponent> {
    Exponent::from_reciprocal(p1.reciprocal() + p2.reciprocal())
}

fn e(p: f64) -> Exponent {
    Exponent::new(p).expect("valid exponent")
}

/// Corpus ratios for the paraproduct and remainder estimates, constants stripped
/// and explicit `1/|s|` structure multiplied back in.
pub fn paraproduct_estimates(lp: &LittlewoodPaley, pairs: &[(SpectralField, SpectralField)]) -> Result<Vec<InequalityEntry>> {
    if pairs.is_empty() {
        return Err(Error::DegenerateCorpus("no paraproduct pairs".into()));
    }
    let inf = Exponent::INFINITY;
    let evaluated = pairs
        .par_iter()
        .map(|(u, v)| Ok((paraproduct_t(lp, u, v)?, remainder_r(lp, u, v)?, u, v)))
        .collect::<Result<Vec<_>>>()?;
    let b = |w: &SpectralField, s: f64, p: Exponent, q: Exponent| besov_norm(lp, w, BesovIndex::new(s, p, q)).map(|r| r.value);
    let mut entries = Vec::new();

    for (s, p1, p2, q) in [(0.5, inf, e(2.0), e(2.0)), (1.5, inf, e(2.0), e(2.0)), (0.5, e(4.0), e(4.0), inf)] {
        let p = product_exponent(p1, p2)?;
        let ratios = evaluated
            .iter()
            .map(|(t, _, u, v)| Ok(b(t, s, p, q)? / (lp_norm(u, p1) * b(v, s, p2, q)?)))
            .collect::<Result<Vec<f64>>>()?;
        entries.push(InequalityEntry::new("paraproduct_lebesgue", format!("s={s} p1={p1} p2={p2} q={q}"), ConstantKind::Implicit, ratios));
    }

    for (s1, s2, p1, p2, q1, q2) in [(-0.5, 1.0, inf, e(2.0), inf, e(2.0)), (-0.25, 0.75, e(4.0), e(4.0), e(2.0), e(2.0)), (-1.0, 1.5, inf, e(2.0), inf, inf)] {
        let (p, q) = (product_exponent(p1, p2)?, product_exponent(q1, q2)?);
        let ratios = evaluated
            .iter()
            .map(|(t, _, u, v)| Ok(-s1 * b(t, s1 + s2, p, q)? / (b(u, s1, p1, q1)? * b(v, s2, p2, q2)?)))
            .collect::<Result<Vec<f64>>>()?;
        entries.push(InequalityEntry::new(
            "paraproduct_negative",
            format!("s1={s1} s2={s2} p1={p1} p2={p2} q1={q1} q2={q2}"),
            ConstantKind::Implicit,
            ratios,
        ));
    }

    for (s1, s2, p1, p2, q1, q2) in [(-0.25, 0.75, inf, e(2.0), inf, e(2.0)), (0.5, 0.5, e(4.0), e(4.0), e(2.0), e(2.0)), (-0.5, 1.5, inf, e(2.0), inf, inf)] {
        let (p, q) = (product_exponent(p1, p2)?, product_exponent(q1, q2)?);
        let s = s1 + s2;
        let ratios = evaluated
            .iter()
            .map(|(_, r, u, v)| Ok(s * b(r, s, p, q)? / (b(u, s1, p1, q1)? * b(v, s2, p2, q2)?)))
            .collect::<Result<Vec<f64>>>()?;
        entries.push(InequalityEntry::new(
            "remainder_positive",
            format!("s1={s1} s2={s2} p1={p1} p2={p2} q1={q1} q2={q2}"),
            ConstantKind::Implicit,
            ratios,
        ));
    }

    for (s1, s2, p1, p2, q1, q2) in [(-0.5, 0.5, inf, e(2.0), e(2.0), e(2.0)), (-0.25, 0.25, e(4.0), e(4.0), inf, e(1.0))] {
        let p = product_exponent(p1, p2)?;
        let s = s1 + s2;
        let ratios = evaluated
            .iter()
            .map(|(_, r, u, v)| Ok(b(r, s, p, inf)? / (b(u, s1, p1, q1)? * b(v, s2, p2, q2)?)))
            .collect::<Result<Vec<f64>>>()?;
        entries.push(InequalityEntry::new(
            "remainder_endpoint",
            format!("s1={s1} s2={s2} p1={p1} p2={p2} q1={q1} q2={q2}"),
            ConstantKind::Implicit,
            ratios,
        ));
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward_transform, PhysicalField};

    fn scalar(g: Grid, f: impl Fn([f64; 3]) -> f64) -> SpectralField {
        forward_transform(&PhysicalField::from_fn(g, 1, |_, x| f(x))).into_homogeneous().unwrap()
    }

    #[test]
    fn cosine_square_identity() {
        let g = Grid::new(2, 16).unwrap();
        let u = scalar(g, |x| (x[0] + 2.0 * x[1]).cos());
        let w = pointwise_tensor(&u, &u).unwrap();
        assert!((w.mode(0, &[0, 0]).re - 0.5).abs() < 1e-15);
        assert!((w.mode(0, &[2, 4]).re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn bony_equals_pointwise_for_scalars() {
        let g = Grid::new(2, 32).unwrap();
        let lp = LittlewoodPaley::standard(g);
        let u = scalar(g, |x| (x[0] + 2.0 * x[1]).sin() + 0.3 * (5.0 * x[0]).cos() + 0.1 * (3.0 * x[0] - 7.0 * x[1]).sin());
        let v = scalar(g, |x| (2.0 * x[0] - x[1]).cos() + 0.2 * (6.0 * x[1] + x[0]).sin());
        let report = product_report(&lp, &u, &v).unwrap();
        assert!(report.discrepancy < 1e-13, "{}", report.discrepancy);
    }

    #[test]
    fn remainder_vanishes_on_separated_spectra() {
        let g = Grid::new(2, 64).unwrap();
        let lp = LittlewoodPaley::standard(g);
        let u = scalar(g, |x| x[0].cos());
        let v = scalar(g, |x| (20.0 * x[1]).cos());
        assert!(remainder_r(&lp, &u, &v).unwrap().max_coeff() < 1e-15);
        // Low u, high v: Ṫ_v u = 0 and Ṫ_u v = u v.
        assert!(paraproduct_t(&lp, &v, &u).unwrap().max_coeff() < 1e-15);
        let tv = paraproduct_t(&lp, &u, &v).unwrap();
        let uv = pointwise_tensor(&u, &v).unwrap();
        assert!(tv.sub(&uv).unwrap().max_coeff() < 1e-15);
    }
}
