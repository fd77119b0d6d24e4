//! Radial Littlewood-Paley profiles `χ`, `φ` and the finite dyadic shell range of a grid.

use serde::{Deserialize, Serialize};

use super::grid::Grid;

pub const INNER_RADIUS: f64 = 3.0 / 4.0;
pub const OUTER_RADIUS: f64 = 4.0 / 3.0;

/// Transition profile used on `[3/4, 4/3]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Smoothstep {
    /// `e(t) / (e(t) + e(1 - t))` with `e(t) = exp(-1/t)`; C^∞.
    Exponential,
    /// Hermite smoothstep of the given order: C^order, degree `2·order + 1`.
    Polynomial(u32),
}

impl Smoothstep {
    /// Rises from 0 at `t ≤ 0` to 1 at `t ≥ 1`, with `s(t) + s(1 - t) = 1`.
    fn eval(self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        match self {
            Smoothstep::Exponential => {
                let a = (-1.0 / t).exp();
                let b = (-1.0 / (1.0 - t)).exp();
                a / (a + b)
            }
            Smoothstep::Polynomial(order) => polynomial_smoothstep(order as usize, t),
        }
    }
}

/// `t^{k+1} Σ_{i≤k} C(k+i, i) (1-t)^i` with `k = order`.
fn polynomial_smoothstep(order: usize, t: f64) -> f64 {
    let mut binom = 1.0;
    let mut sum = 0.0;
    let mut pow = 1.0;
    for i in 0..=order {
        if i > 0 {
            binom *= (order + i) as f64 / i as f64;
        }
        sum += binom * pow;
        pow *= 1.0 - t;
    }
    t.powi(order as i32 + 1) * sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffPair {
    pub smoothstep: Smoothstep,
    /// Multiplies `φ`; anything other than 1 breaks the partition of unity.
    pub phi_scale: f64,
}

impl Default for CutoffPair {
    fn default() -> Self {
        Self { smoothstep: Smoothstep::Exponential, phi_scale: 1.0 }
    }
}

impl CutoffPair {
    /// Smooth pair; `order = None` selects the C^∞ profile.
    pub fn build(order: Option<u32>) -> Self {
        let smoothstep = match order {
            None => Smoothstep::Exponential,
            Some(k) => Smoothstep::Polynomial(k.max(1)),
        };
        Self { smoothstep, phi_scale: 1.0 }
    }

    /// Copy with `φ` multiplied by `scale` (fault injection).
    pub fn with_phi_scale(self, scale: f64) -> Self {
        Self { phi_scale: scale, ..self }
    }

    pub fn chi(&self, r: f64) -> f64 {
        let t = (r - INNER_RADIUS) / (OUTER_RADIUS - INNER_RADIUS);
        1.0 - self.smoothstep.eval(t)
    }

    pub fn phi(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= INNER_RADIUS || r >= 2.0 * OUTER_RADIUS {
            return 0.0;
        }
        self.phi_scale * (self.chi(r / 2.0) - self.chi(r)).max(0.0)
    }

    /// Annulus of `φ(2^{-j}·)`: `2^j · [3/4, 8/3]`.
    pub fn shell_support(j: i32) -> (f64, f64) {
        let s = 2f64.powi(j);
        (INNER_RADIUS * s, 2.0 * OUTER_RADIUS * s)
    }

    /// Radii on which `φ(2^{-j}·)` equals 1: `2^j · [4/3, 3/2]`.
    pub fn shell_core(j: i32) -> (f64, f64) {
        let s = 2f64.powi(j);
        (OUTER_RADIUS * s, 2.0 * INNER_RADIUS * s)
    }
}

/// Shells `j_min..=j_max` whose annuli meet the nonzero grid frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicRange {
    pub j_min: i32,
    pub j_max: i32,
}

impl DyadicRange {
    pub fn for_grid(grid: &Grid) -> Self {
        // Smallest nonzero |k| is 1: lowest shell with 1 < (8/3)·2^j.
        let mut j_min = 0;
        while CutoffPair::shell_support(j_min - 1).1 > 1.0 {
            j_min -= 1;
        }
        while CutoffPair::shell_support(j_min).1 <= 1.0 {
            j_min += 1;
        }
        let kmax = grid.max_wavenumber();
        let mut j_max = j_min;
        while CutoffPair::shell_support(j_max + 1).0 < kmax {
            j_max += 1;
        }
        Self { j_min, j_max }
    }

    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub fn len(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_and_support_values() {
        for pair in [CutoffPair::build(None), CutoffPair::build(Some(3))] {
            assert_eq!(pair.chi(0.0), 1.0);
            assert_eq!(pair.chi(0.75), 1.0);
            assert_eq!(pair.chi(4.0 / 3.0), 0.0);
            assert_eq!(pair.phi(3.0), 0.0);
            assert_eq!(pair.phi(1.4), 1.0);
        }
    }

    #[test]
    fn polynomial_smoothstep_is_symmetric() {
        for order in 1..6 {
            for i in 0..=100 {
                let t = i as f64 / 100.0;
                let s = polynomial_smoothstep(order, t) + polynomial_smoothstep(order, 1.0 - t);
                assert!((s - 1.0).abs() < 1e-13, "order {order} t {t}");
            }
        }
    }

    #[test]
    fn dyadic_range_of_small_grids() {
        let g = Grid::new(2, 8).unwrap();
        let r = DyadicRange::for_grid(&g);
        assert_eq!(r.j_min, -1);
        // √2·4 ≈ 5.66 > (3/4)·4 = 3 but < (3/4)·8 = 6.
        assert_eq!(r.j_max, 2);
    }
}
