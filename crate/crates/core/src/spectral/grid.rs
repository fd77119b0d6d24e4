//! Uniform periodic grids on the torus `[0, 2π)^n`.
//!
//! Coefficient arrays are stored row-major: the multi-index `(i_0, .., i_{n-1})`
//! maps to `i_0 * N^{n-1} + .. + i_{n-1}`, and the axis index `i` carries the
//! integer frequency `i` for `i <= N/2` and `i - N` otherwise, so every axis
//! frequency lies in `(-N/2, N/2]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    size: usize,
}

impl Grid {
    pub fn new(dim: usize, size: usize) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if size < 8 || !size.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be a power of two >= 8, got {size}"
            )));
        }
        Ok(Self { dim, size })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of grid points, `N^n`.
    pub fn len(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nyquist(&self) -> i64 {
        (self.size / 2) as i64
    }

    /// Grid spacing `2π / N`.
    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.size as f64
    }

    /// Volume of the torus, `(2π)^n`.
    pub fn volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(self.dim as i32)
    }

    /// Same dimension with twice the resolution.
    pub fn refined(&self) -> Self {
        Self { dim: self.dim, size: self.size * 2 }
    }

    /// Largest frequency magnitude present on the grid.
    pub fn max_wavenumber(&self) -> f64 {
        (self.size as f64 / 2.0) * (self.dim as f64).sqrt()
    }

    pub fn axis_frequency(&self, i: usize) -> i64 {
        axis_frequency(i, self.size)
    }

    pub fn axis_index(&self, k: i64) -> usize {
        k.rem_euclid(self.size as i64) as usize
    }

    /// Integer frequency vector of a flat index. Unused trailing entries are 0.
    pub fn frequency(&self, index: usize) -> [i64; 3] {
        let mut k = [0i64; 3];
        let mut rest = index;
        for axis in (0..self.dim).rev() {
            k[axis] = self.axis_frequency(rest % self.size);
            rest /= self.size;
        }
        k
    }

    /// Flat index of a frequency vector (components are reduced mod `N`).
    pub fn index_of(&self, k: &[i64]) -> usize {
        k.iter()
            .take(self.dim)
            .fold(0, |acc, &ki| acc * self.size + self.axis_index(ki))
    }

    /// Flat index of `-k` for the mode stored at `index`.
    pub fn conjugate_index(&self, index: usize) -> usize {
        let k = self.frequency(index);
        let neg = [-k[0], -k[1], -k[2]];
        self.index_of(&neg[..self.dim])
    }

    /// True if any frequency component sits on the Nyquist plane `k_i = N/2`.
    pub fn is_nyquist(&self, index: usize) -> bool {
        let k = self.frequency(index);
        k[..self.dim].iter().any(|&ki| ki == self.nyquist())
    }

    /// `|k|` for every flat index.
    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let k = self.frequency(i);
                (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
            })
            .map(f64::sqrt)
            .collect()
    }

    /// Physical coordinates of a flat collocation index.
    pub fn point(&self, index: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        let mut rest = index;
        let h = self.spacing();
        for axis in (0..self.dim).rev() {
            x[axis] = (rest % self.size) as f64 * h;
            rest /= self.size;
        }
        x
    }
}

pub(crate) fn axis_frequency(i: usize, size: usize) -> i64 {
    if i <= size / 2 {
        i as i64
    } else {
        i as i64 - size as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1, 16).is_err());
        assert!(Grid::new(4, 16).is_err());
        assert!(Grid::new(2, 12).is_err());
        assert!(Grid::new(2, 4).is_err());
        assert!(Grid::new(3, 8).is_ok());
    }

    #[test]
    fn frequency_enumeration_is_a_bijection() {
        let g = Grid::new(2, 8).unwrap();
        let mut seen = std::collections::HashSet::new();
        for i in 0..g.len() {
            let k = g.frequency(i);
            assert!(k[0] > -4 && k[0] <= 4 && k[1] > -4 && k[1] <= 4);
            assert_eq!(g.index_of(&k[..2]), i);
            assert!(seen.insert((k[0], k[1])));
        }
        assert_eq!(g.frequency(1), [0, 1, 0]);
        assert_eq!(g.frequency(8), [1, 0, 0]);
        assert_eq!(g.frequency(7), [0, -1, 0]);
        assert_eq!(g.frequency(4), [0, 4, 0]);
    }

    #[test]
    fn conjugate_index_negates() {
        let g = Grid::new(3, 8).unwrap();
        for i in [1, 17, 100, 300] {
            let k = g.frequency(i);
            let kc = g.frequency(g.conjugate_index(i));
            for a in 0..3 {
                assert_eq!((k[a] + kc[a]).rem_euclid(8), 0);
            }
        }
    }
}
