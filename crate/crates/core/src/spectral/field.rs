//! Spectral and physical representations of real m-component fields.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fft;
use super::grid::{axis_frequency, Grid};
use crate::error::{Error, Result};

/// Relative size of a zero mode that is still treated as rounding noise.
const MEAN_TOLERANCE: f64 = 1e-12;

/// Fourier coefficients of a real m-component field.
///
/// Coefficients are component-major: component `c` occupies
/// `coeffs[c * len .. (c + 1) * len]` in the grid's row-major frequency order.
/// `coeff(k)` is the coefficient of `e^{i k·x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
    homogeneous: bool,
}

/// Collocation samples of a real m-component field, component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    components: usize,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn new(grid: Grid, components: usize, values: Vec<f64>) -> Result<Self> {
        let expected = grid.len() * components;
        if components == 0 || values.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: values.len() });
        }
        Ok(Self { grid, components, values })
    }

    /// Samples `f(x)` at every collocation point for each component.
    pub fn from_fn(grid: Grid, components: usize, f: impl Fn(usize, [f64; 3]) -> f64) -> Self {
        let len = grid.len();
        let values = (0..components * len).map(|i| f(i / len, grid.point(i % len))).collect();
        Self { grid, components, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.values[c * len..(c + 1) * len]
    }

    /// Pointwise Euclidean norm across components.
    pub fn magnitudes(&self) -> Vec<f64> {
        pointwise_magnitudes(&self.values, self.components, self.grid.len())
    }
}

pub(crate) fn pointwise_magnitudes(values: &[f64], components: usize, len: usize) -> Vec<f64> {
    if components == 1 {
        return values.iter().map(|v| v.abs()).collect();
    }
    (0..len)
        .map(|i| (0..components).map(|c| values[c * len + i].powi(2)).sum::<f64>().sqrt())
        .collect()
}

/// Forward transform, normalized so `coeff(k)` is the Fourier coefficient of `e^{i k·x}`.
///
/// Parseval: `‖u‖²_{L²} = (2π)^n Σ_k |coeff(k)|²`.
pub fn forward_transform(samples: &PhysicalField) -> SpectralField {
    let grid = samples.grid;
    let len = grid.len();
    let scale = 1.0 / len as f64;
    let coeffs = (0..samples.components)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut data: Vec<Complex64> =
                samples.component(c).iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft::transform(&mut data, grid.dim(), grid.size(), false);
            data.into_iter().map(move |z| z * scale)
        })
        .collect();
    SpectralField { grid, components: samples.components, coeffs, homogeneous: false }
}

/// Real part of the inverse transform (the imaginary part is zero for Hermitian input).
pub fn inverse_transform(field: &SpectralField) -> PhysicalField {
    let grid = field.grid;
    let values = (0..field.components)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut data = field.component(c).to_vec();
            fft::transform(&mut data, grid.dim(), grid.size(), true);
            data.into_iter().map(|z| z.re)
        })
        .collect();
    PhysicalField { grid, components: field.components, values }
}

impl SpectralField {
    pub fn new(grid: Grid, components: usize, coeffs: Vec<Complex64>, homogeneous: bool) -> Result<Self> {
        let expected = grid.len() * components;
        if components == 0 || coeffs.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: coeffs.len() });
        }
        let field = Self { grid, components, coeffs, homogeneous: false };
        if homogeneous {
            field.into_homogeneous()
        } else {
            Ok(field)
        }
    }

    pub fn zeros(grid: Grid, components: usize, homogeneous: bool) -> Self {
        Self {
            grid,
            components,
            coeffs: vec![Complex64::default(); grid.len() * components],
            homogeneous,
        }
    }

    /// Builds a field from a coefficient rule `f(component, k)`.
    pub fn from_modes(
        grid: Grid,
        components: usize,
        homogeneous: bool,
        f: impl Fn(usize, [i64; 3]) -> Complex64,
    ) -> Result<Self> {
        let len = grid.len();
        let coeffs = (0..components * len).map(|i| f(i / len, grid.frequency(i % len))).collect();
        Self::new(grid, components, coeffs, homogeneous)
    }

    /// Stacks scalar or vector fields into one field, in order.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts.first().ok_or(Error::ComponentCount { expected: 1, got: 0 })?;
        let mut coeffs = Vec::with_capacity(first.coeffs.len() * parts.len());
        let mut components = 0;
        for part in parts {
            if part.grid != first.grid {
                return Err(Error::GridMismatch);
            }
            coeffs.extend_from_slice(&part.coeffs);
            components += part.components;
        }
        let homogeneous = parts.iter().all(|p| p.homogeneous);
        Ok(Self { grid: first.grid, components, coeffs, homogeneous })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.coeffs[c * len..(c + 1) * len]
    }

    pub(crate) fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.coeffs[c * len..(c + 1) * len]
    }

    /// Copy of component `c` as a scalar field.
    pub fn component_field(&self, c: usize) -> SpectralField {
        Self {
            grid: self.grid,
            components: 1,
            coeffs: self.component(c).to_vec(),
            homogeneous: self.homogeneous,
        }
    }

    pub fn mode(&self, c: usize, k: &[i64]) -> Complex64 {
        self.component(c)[self.grid.index_of(k)]
    }

    /// Sets `coeff(k) = z` and `coeff(-k) = conj(z)` so the field stays real.
    pub fn set_real_mode(&mut self, c: usize, k: &[i64], z: Complex64) {
        let grid = self.grid;
        let idx = grid.index_of(k);
        let conj = grid.conjugate_index(idx);
        let comp = self.component_mut(c);
        comp[idx] = z;
        comp[conj] = z.conj();
        if idx == conj {
            comp[idx] = Complex64::new(z.re, 0.0);
        }
    }

    /// Magnitude of the zero mode summed over components.
    pub fn mean_magnitude(&self) -> f64 {
        (0..self.components).map(|c| self.component(c)[0].norm()).sum()
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Marks the field as mean-zero after checking the zero mode is rounding noise.
    pub fn into_homogeneous(mut self) -> Result<Self> {
        let scale = self.max_coeff().max(f64::MIN_POSITIVE);
        if self.mean_magnitude() > MEAN_TOLERANCE * scale {
            return Err(Error::NonzeroMean {
                context: format!("zero mode magnitude {:e}", self.mean_magnitude()),
            });
        }
        self.zero_mean_in_place();
        Ok(self)
    }

    /// Drops the zero mode and marks the field mean-zero.
    pub fn without_mean(mut self) -> Self {
        self.zero_mean_in_place();
        self
    }

    fn zero_mean_in_place(&mut self) {
        for c in 0..self.components {
            self.component_mut(c)[0] = Complex64::default();
        }
        self.homogeneous = true;
    }

    /// Largest violation of `coeff(-k) = conj(coeff(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let grid = self.grid;
        let mut worst = 0.0f64;
        for c in 0..self.components {
            let comp = self.component(c);
            for (i, z) in comp.iter().enumerate() {
                let j = grid.conjugate_index(i);
                worst = worst.max((z - comp[j].conj()).norm());
            }
        }
        worst
    }

    /// Energy of modes with a component on the Nyquist plane.
    pub fn nyquist_energy(&self) -> f64 {
        let grid = self.grid;
        (0..self.components)
            .flat_map(|c| self.component(c).iter().enumerate())
            .filter(|(i, _)| grid.is_nyquist(*i))
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    fn check_compatible(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        if self.components != other.components {
            return Err(Error::ComponentCount { expected: self.components, got: other.components });
        }
        Ok(())
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { coeffs, homogeneous: self.homogeneous && other.homogeneous, ..*self.shape() })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { coeffs, homogeneous: self.homogeneous && other.homogeneous, ..*self.shape() })
    }

    pub fn scaled(&self, a: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|z| z * a).collect();
        Self { coeffs, homogeneous: self.homogeneous, ..*self.shape() }
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &SpectralField) -> Result<()> {
        self.check_compatible(x)?;
        for (y, xv) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += xv * a;
        }
        self.homogeneous &= x.homogeneous;
        Ok(())
    }

    /// Applies the real radial multiplier `m(|k|)` to every component.
    pub fn apply_radial(&self, wavenumbers: &[f64], m: impl Fn(f64) -> f64 + Sync) -> Self {
        let len = self.grid.len();
        let table: Vec<f64> = wavenumbers.iter().map(|&r| m(r)).collect();
        let coeffs = self.coeffs.iter().enumerate().map(|(i, z)| z * table[i % len]).collect();
        Self { coeffs, homogeneous: self.homogeneous, ..*self.shape() }
    }

    /// Multiplies by a real per-frequency table shared by all components.
    pub fn apply_table(&self, table: &[f64]) -> Self {
        let len = self.grid.len();
        let coeffs = self.coeffs.iter().enumerate().map(|(i, z)| z * table[i % len]).collect();
        Self { coeffs, homogeneous: self.homogeneous, ..*self.shape() }
    }

    /// `L²` norm over the torus by Parseval.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.volume() * self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `‖self − other‖_{L²} / max(‖other‖_{L²}, floor)`.
    pub fn relative_l2_distance(&self, other: &SpectralField, floor: f64) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.l2_norm() / other.l2_norm().max(floor))
    }

    /// Spectral divergence `Σ_i i k_i u_i` of an n-vector field, as a scalar field.
    pub fn divergence(&self) -> Result<SpectralField> {
        let n = self.grid.dim();
        if self.components != n {
            return Err(Error::ComponentCount { expected: n, got: self.components });
        }
        let grid = self.grid;
        let coeffs = (0..grid.len())
            .map(|i| {
                if grid.is_nyquist(i) {
                    return Complex64::default();
                }
                let k = grid.frequency(i);
                (0..n).map(|a| Complex64::new(0.0, k[a] as f64) * self.component(a)[i]).sum()
            })
            .collect();
        Ok(Self { grid, components: 1, coeffs, homogeneous: true })
    }

    /// Largest coefficient of the spectral divergence, relative to the field size.
    pub fn relative_divergence(&self) -> Result<f64> {
        let div = self.divergence()?;
        let grid = self.grid;
        let kmax = grid.max_wavenumber();
        Ok(div.max_coeff() / (kmax * self.max_coeff()).max(f64::MIN_POSITIVE))
    }

    fn shape(&self) -> &Self {
        self
    }

    /// Samples of component `c` on an `m^n` grid (`m ≥ N`) by zero padding.
    ///
    /// Modes on the Nyquist plane are split equally between their `±N/2` images
    /// so the padded field stays real.
    pub(crate) fn padded_samples(&self, c: usize, m: usize) -> Vec<f64> {
        let grid = self.grid;
        let dim = grid.dim();
        let size = grid.size();
        let nyq = grid.nyquist();
        let mut data = vec![Complex64::default(); m.pow(dim as u32)];
        let comp = self.component(c);
        for (i, z) in comp.iter().enumerate() {
            if *z == Complex64::default() {
                continue;
            }
            let k = grid.frequency(i);
            let splits: Vec<usize> = (0..dim).filter(|&a| k[a] == nyq).collect();
            if splits.is_empty() {
                data[padded_index(&k[..dim], m)] += z;
                continue;
            }
            let share = z / (1usize << splits.len()) as f64;
            for mask in 0..(1usize << splits.len()) {
                let mut kk = k;
                for (bit, &a) in splits.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        kk[a] = -nyq;
                    }
                }
                data[padded_index(&kk[..dim], m)] += share;
            }
        }
        debug_assert!(size <= m);
        fft::transform(&mut data, dim, m, true);
        data.into_iter().map(|z| z.re).collect()
    }
}

fn padded_index(k: &[i64], m: usize) -> usize {
    k.iter().fold(0, |acc, &ki| acc * m + ki.rem_euclid(m as i64) as usize)
}

/// Projects samples on an `m^n` grid back onto `grid`, keeping only modes with
/// every component strictly inside `(-N/2, N/2)`.
///
/// Returns the coefficients and the fraction of spectral energy discarded.
pub(crate) fn truncate_padded(grid: Grid, samples: &[f64], m: usize) -> (Vec<Complex64>, f64) {
    let dim = grid.dim();
    let nyq = grid.nyquist();
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::transform(&mut data, dim, m, false);
    let scale = 1.0 / data.len() as f64;
    let mut out = vec![Complex64::default(); grid.len()];
    let mut total = 0.0;
    let mut kept = 0.0;
    for (idx, z) in data.iter().enumerate() {
        let z = z * scale;
        let e = z.norm_sqr();
        total += e;
        let mut rest = idx;
        let mut k = [0i64; 3];
        for a in (0..dim).rev() {
            k[a] = axis_frequency(rest % m, m);
            rest /= m;
        }
        if k[..dim].iter().all(|&ki| ki.abs() < nyq) {
            out[grid.index_of(&k[..dim])] = z;
            kept += e;
        }
    }
    let tail = if total > 0.0 { (total - kept).max(0.0) / total } else { 0.0 };
    (out, tail)
}
