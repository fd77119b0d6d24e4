//! Fourier-multiplier operators: heat flow, Leray projection, `ℙ∇·`, and
//! degree-1 homogeneous symbols.
//!
//! Symbols that are not even in `k` cannot act on a Nyquist-plane mode without
//! breaking realness (that mode is its own `-k` image), so every symbol
//! operator here except the heat flow zeroes modes with a component equal to `N/2`.

use num_complex::Complex64;

use super::field::SpectralField;
use super::grid::Grid;
use super::littlewood_paley::LittlewoodPaley;
use crate::besov::{lp_norm, Exponent};
use crate::error::{Error, Result};

/// `e^{tΔ}u`: multiplies `coeff(k)` by `e^{-t|k|²}`.
pub fn heat_flow(u: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let grid = u.grid();
    let table = heat_table(&grid, t);
    Ok(u.apply_table(&table))
}

pub(crate) fn heat_table(grid: &Grid, t: f64) -> Vec<f64> {
    (0..grid.len())
        .map(|i| {
            let k = grid.frequency(i);
            (-t * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).exp()
        })
        .collect()
}

fn frequency_f64(grid: &Grid, i: usize) -> ([f64; 3], f64) {
    let k = grid.frequency(i);
    let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
    let k2 = kf[0] * kf[0] + kf[1] * kf[1] + kf[2] * kf[2];
    (kf, k2)
}

fn check_vector(u: &SpectralField, expected: usize) -> Result<()> {
    if u.components() != expected {
        return Err(Error::ComponentCount { expected, got: u.components() });
    }
    Ok(())
}

/// `ℙu`: `(δ_ij − k_i k_j/|k|²) u_j` for `k ≠ 0`, zero mean.
pub fn leray_project(u: &SpectralField) -> Result<SpectralField> {
    let grid = u.grid();
    let n = grid.dim();
    check_vector(u, n)?;
    let mut out = SpectralField::zeros(grid, n, true);
    let len = grid.len();
    let src = u.coeffs();
    let dst = out.coeffs_mut();
    for i in 1..len {
        if grid.is_nyquist(i) {
            continue;
        }
        let (k, k2) = frequency_f64(&grid, i);
        let dot: Complex64 = (0..n).map(|a| src[a * len + i] * k[a]).sum::<Complex64>() / k2;
        for a in 0..n {
            dst[a * len + i] = src[a * len + i] - dot * k[a];
        }
    }
    Ok(out)
}

/// `ℙ∇·W` for an `n×n` tensor stored with `(i, j) → i·n + j`:
/// `out_i(k) = i (δ_ij − k_i k_j/|k|²) k_l W_jl(k)`. The zero mode is discarded.
pub fn pdiv(w: &SpectralField) -> Result<SpectralField> {
    let grid = w.grid();
    let n = grid.dim();
    check_vector(w, n * n)?;
    let len = grid.len();
    let mut out = SpectralField::zeros(grid, n, true);
    let src = w.coeffs();
    let dst = out.coeffs_mut();
    let mut div = [Complex64::default(); 3];
    for i in 1..len {
        if grid.is_nyquist(i) {
            continue;
        }
        let (k, k2) = frequency_f64(&grid, i);
        for (a, d) in div.iter_mut().enumerate().take(n) {
            *d = (0..n).map(|l| src[(a * n + l) * len + i] * k[l]).sum();
        }
        let dot: Complex64 = (0..n).map(|a| div[a] * k[a]).sum::<Complex64>() / k2;
        for a in 0..n {
            dst[a * len + i] = Complex64::i() * (div[a] - dot * k[a]);
        }
    }
    Ok(out)
}

/// A symbol `σ(ξ)` that is smooth away from 0 and positively homogeneous.
pub trait HomogeneousSymbol: Sync {
    /// Evaluates `σ` at `ξ ≠ 0` (trailing entries beyond the dimension are 0).
    fn eval(&self, xi: [f64; 3]) -> Complex64;

    fn degree(&self) -> f64 {
        1.0
    }
}

/// `σ(ξ) = i ξ_m`.
#[derive(Debug, Clone, Copy)]
pub struct PartialDerivative(pub usize);

impl HomogeneousSymbol for PartialDerivative {
    fn eval(&self, xi: [f64; 3]) -> Complex64 {
        Complex64::new(0.0, xi[self.0])
    }
}

/// `σ(ξ) = i (δ_ab ξ_l − ξ_a ξ_b ξ_l/|ξ|²)`: the `(a; b, l)` entry of `ℙ∇·`.
#[derive(Debug, Clone, Copy)]
pub struct ProjectedDivergence {
    pub a: usize,
    pub b: usize,
    pub l: usize,
}

impl HomogeneousSymbol for ProjectedDivergence {
    fn eval(&self, xi: [f64; 3]) -> Complex64 {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let delta = if self.a == self.b { 1.0 } else { 0.0 };
        Complex64::new(0.0, delta * xi[self.l] - xi[self.a] * xi[self.b] * xi[self.l] / r2)
    }
}

/// Evaluates `σ` at an integer frequency, rejecting the origin.
pub fn symbol_at(sigma: &dyn HomogeneousSymbol, k: &[i64]) -> Result<Complex64> {
    if k.iter().all(|&ki| ki == 0) {
        return Err(Error::SymbolAtOrigin);
    }
    let mut xi = [0.0; 3];
    for (x, &ki) in xi.iter_mut().zip(k) {
        *x = ki as f64;
    }
    Ok(sigma.eval(xi))
}

/// `σ(D)u` on every component of a mean-zero field.
pub fn apply_first_order_symbol(sigma: &dyn HomogeneousSymbol, u: &SpectralField) -> Result<SpectralField> {
    if !u.homogeneous() && u.mean_magnitude() != 0.0 {
        return Err(Error::SymbolAtOrigin);
    }
    let grid = u.grid();
    let len = grid.len();
    let table: Vec<Complex64> = (0..len)
        .map(|i| {
            if i == 0 || grid.is_nyquist(i) {
                Complex64::default()
            } else {
                sigma.eval(frequency_f64(&grid, i).0)
            }
        })
        .collect();
    let mut out = SpectralField::zeros(grid, u.components(), true);
    for c in 0..u.components() {
        let src = u.component(c);
        for ((d, s), m) in out.component_mut(c).iter_mut().zip(src).zip(&table) {
            *d = s * m;
        }
    }
    Ok(out)
}

/// `∇u` with `(c, a) → c·n + a` holding `∂_a u_c`.
pub fn gradient(u: &SpectralField) -> Result<SpectralField> {
    let n = u.grid().dim();
    let parts = (0..u.components())
        .flat_map(|c| (0..n).map(move |a| (c, a)))
        .map(|(c, a)| apply_first_order_symbol(&PartialDerivative(a), &u.component_field(c).without_mean()))
        .collect::<Result<Vec<_>>>()?;
    SpectralField::stack(&parts)
}

/// `‖∇^d Δ̇_j u‖_{L^q} / (2^{jd} 2^{j(n/p − n/q)} ‖Δ̇_j u‖_{L^p})`.
pub fn bernstein_ratio(
    lp: &LittlewoodPaley,
    u: &SpectralField,
    j: i32,
    p: Exponent,
    q: Exponent,
    deriv: u32,
) -> Result<f64> {
    let block = lp.block(u, j)?;
    let base = lp_norm(&block, p);
    if base == 0.0 {
        return Err(Error::ZeroBlock(j));
    }
    let mut top = block;
    for _ in 0..deriv {
        top = gradient(&top)?;
    }
    let n = u.grid().dim() as f64;
    let scale = 2f64.powf(j as f64 * (deriv as f64 + n * (p.reciprocal() - q.reciprocal())));
    Ok(lp_norm(&top, q) / (scale * base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::{forward_transform, PhysicalField};

    fn taylor_green(grid: Grid) -> SpectralField {
        let phys = PhysicalField::from_fn(grid, 2, |c, x| {
            if c == 0 {
                x[0].cos() * x[1].sin()
            } else {
                -x[0].sin() * x[1].cos()
            }
        });
        forward_transform(&phys).into_homogeneous().unwrap()
    }

    #[test]
    fn heat_flow_rejects_negative_time() {
        let g = Grid::new(2, 8).unwrap();
        let u = SpectralField::zeros(g, 1, true);
        assert!(matches!(heat_flow(&u, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn single_mode_heat_decay() {
        let g = Grid::new(2, 16).unwrap();
        let mut u = SpectralField::zeros(g, 1, true);
        u.set_real_mode(0, &[2, -1], Complex64::new(0.5, 0.25));
        let v = heat_flow(&u, 0.3).unwrap();
        let expect = Complex64::new(0.5, 0.25) * (-0.3f64 * 5.0).exp();
        assert!((v.mode(0, &[2, -1]) - expect).norm() < 1e-15);
    }

    #[test]
    fn taylor_green_nonlinearity_is_a_gradient() {
        let g = Grid::new(2, 16).unwrap();
        let u = taylor_green(g);
        let w = crate::paraproduct::pointwise_tensor(&u, &u).unwrap();
        let out = pdiv(&w).unwrap();
        assert!(out.max_coeff() < 1e-15);
        assert!(u.relative_divergence().unwrap() < 1e-15);
    }

    #[test]
    fn pdiv_matches_symbol_route() {
        let g = Grid::new(3, 8).unwrap();
        let phys = PhysicalField::from_fn(g, 9, |c, x| ((c + 1) as f64 * x[0] - x[1] + 2.0 * x[2]).sin() + (x[1] * (c % 3) as f64).cos());
        let w = forward_transform(&phys);
        let direct = pdiv(&w).unwrap();
        for a in 0..3 {
            let mut acc = SpectralField::zeros(g, 1, true);
            for b in 0..3 {
                for l in 0..3 {
                    let wbl = w.component_field(b * 3 + l).without_mean();
                    let term = apply_first_order_symbol(&ProjectedDivergence { a, b, l }, &wbl).unwrap();
                    acc.axpy(1.0, &term).unwrap();
                }
            }
            let d = direct.component_field(a);
            assert!(acc.sub(&d).unwrap().max_coeff() < 1e-14);
        }
    }

    #[test]
    fn symbol_at_origin_is_rejected() {
        assert!(matches!(symbol_at(&PartialDerivative(0), &[0, 0]), Err(Error::SymbolAtOrigin)));
    }
}
