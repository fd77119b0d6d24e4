//! Dyadic blocks `Δ̇_j` and low-pass operators `Ṡ_j` on a fixed grid.

use super::cutoff::{CutoffPair, DyadicRange};
use super::field::SpectralField;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Precomputed `|k|` table and sparse shell multipliers for one grid.
#[derive(Debug, Clone)]
pub struct LittlewoodPaley {
    grid: Grid,
    cutoffs: CutoffPair,
    range: DyadicRange,
    wavenumbers: Vec<f64>,
    /// Per shell: `(flat index, φ(2^{-j}|k|))` for every frequency with nonzero weight.
    shells: Vec<Vec<(usize, f64)>>,
}

impl LittlewoodPaley {
    pub fn new(grid: Grid, cutoffs: CutoffPair) -> Self {
        let range = DyadicRange::for_grid(&grid);
        let wavenumbers = grid.wavenumbers();
        let shells = range
            .iter()
            .map(|j| {
                let scale = 2f64.powi(-j);
                wavenumbers
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &r)| {
                        let w = cutoffs.phi(r * scale);
                        (w != 0.0).then_some((i, w))
                    })
                    .collect()
            })
            .collect();
        Self { grid, cutoffs, range, wavenumbers, shells }
    }

    pub fn standard(grid: Grid) -> Self {
        Self::new(grid, CutoffPair::default())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn cutoffs(&self) -> &CutoffPair {
        &self.cutoffs
    }

    pub fn range(&self) -> DyadicRange {
        self.range
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Nonzero `(index, weight)` pairs of shell `j`; empty outside the range.
    pub fn shell(&self, j: i32) -> &[(usize, f64)] {
        if self.range.contains(j) {
            &self.shells[(j - self.range.j_min) as usize]
        } else {
            &[]
        }
    }

    pub(crate) fn check_grid(&self, u: &SpectralField) -> Result<()> {
        if u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `Δ̇_j u`; zero for shells outside the range.
    pub fn block(&self, u: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_grid(u)?;
        let len = self.grid.len();
        let mut out = SpectralField::zeros(self.grid, u.components(), true);
        for c in 0..u.components() {
            let src = u.component(c);
            let dst = out.component_mut(c);
            for &(i, w) in self.shell(j) {
                dst[i] = src[i] * w;
            }
        }
        debug_assert_eq!(out.coeffs().len(), len * u.components());
        Ok(out)
    }

    /// `Ṡ_j u = χ(2^{-j}D) u`.
    pub fn low_pass(&self, u: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_grid(u)?;
        let scale = 2f64.powi(-j);
        let cut = self.cutoffs;
        Ok(u.apply_radial(&self.wavenumbers, |r| cut.chi(r * scale)))
    }

    /// `Σ_{j' ≤ j} Δ̇_{j'} u`, the low-pass built from blocks (equal to `Ṡ_{j+1} u` on mean-zero u).
    pub fn partial_sum(&self, u: &SpectralField, j: i32) -> Result<SpectralField> {
        self.check_grid(u)?;
        let mut out = SpectralField::zeros(self.grid, u.components(), true);
        for jj in self.range.j_min..=j.min(self.range.j_max) {
            for c in 0..u.components() {
                let src = u.component(c);
                let dst = out.component_mut(c);
                for &(i, w) in self.shell(jj) {
                    dst[i] += src[i] * w;
                }
            }
        }
        Ok(out)
    }

    /// All nonempty blocks of `u` paired with their shell index.
    pub fn blocks(&self, u: &SpectralField) -> Result<Vec<(i32, SpectralField)>> {
        self.range.iter().map(|j| Ok((j, self.block(u, j)?))).collect()
    }

    /// `Σ_j φ(2^{-j}|k|)` over the range, per flat index.
    pub fn partition_sum(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.grid.len()];
        for shell in &self.shells {
            for &(i, w) in shell {
                total[i] += w;
            }
        }
        total
    }

    /// `Σ_j φ(2^{-j}|k|)²` over the range, per flat index.
    pub fn partition_sum_sq(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.grid.len()];
        for shell in &self.shells {
            for &(i, w) in shell {
                total[i] += w * w;
            }
        }
        total
    }

    /// Shells whose weight at flat index `i` is nonzero.
    pub fn shells_at(&self, i: usize) -> Vec<i32> {
        self.range.iter().filter(|&j| self.shell(j).iter().any(|&(idx, _)| idx == i)).collect()
    }

    /// `φ(2^{-j}|k|)` at flat index `i`.
    pub fn weight(&self, j: i32, i: usize) -> f64 {
        self.cutoffs.phi(self.wavenumbers[i] * 2f64.powi(-j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::{forward_transform, PhysicalField};

    #[test]
    fn blocks_reconstruct_mean_zero_field() {
        let g = Grid::new(2, 32).unwrap();
        let lp = LittlewoodPaley::standard(g);
        let phys = PhysicalField::from_fn(g, 2, |c, x| {
            (x[0] + 2.0 * x[1]).sin() + (7.0 * x[0] - 3.0 * x[1] + c as f64).cos() + (15.0 * x[1]).sin()
        });
        let u = forward_transform(&phys).without_mean();
        let mut sum = SpectralField::zeros(g, 2, true);
        for (_, b) in lp.blocks(&u).unwrap() {
            sum.axpy(1.0, &b).unwrap();
        }
        assert!(sum.relative_l2_distance(&u, 1e-300).unwrap() < 1e-14);
    }

    #[test]
    fn every_nonzero_frequency_is_covered_by_one_or_two_adjacent_shells() {
        let g = Grid::new(3, 16).unwrap();
        let lp = LittlewoodPaley::standard(g);
        let sums = lp.partition_sum();
        let mut count = vec![Vec::new(); g.len()];
        for j in lp.range().iter() {
            for &(i, _) in lp.shell(j) {
                count[i].push(j);
            }
        }
        for i in 1..g.len() {
            assert!((sums[i] - 1.0).abs() < 1e-12);
            let js = &count[i];
            assert!(!js.is_empty() && js.len() <= 2);
            if js.len() == 2 {
                assert_eq!(js[1] - js[0], 1);
            }
        }
        assert!(count[0].is_empty());
    }
}
