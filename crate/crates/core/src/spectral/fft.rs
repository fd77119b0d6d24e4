//! n-dimensional complex FFTs on row-major cubes, built from 1-D rustfft plans.
//!
//! Plans are cached process-wide; scratch buffers are allocated per call so
//! concurrent transforms never share mutable state.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

type PlanKey = (usize, bool);

fn plan(size: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<(FftPlanner<f64>, HashMap<PlanKey, Arc<dyn Fft<f64>>>)>> =
        OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let (planner, plans) = &mut *guard;
    plans
        .entry((size, inverse))
        .or_insert_with(|| {
            let direction = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
            planner.plan_fft(size, direction)
        })
        .clone()
}

/// Unnormalized in-place transform of a `size^dim` cube: forward uses
/// `e^{-i k x}`, inverse `e^{+i k x}`.
pub fn transform(data: &mut [Complex64], dim: usize, size: usize, inverse: bool) {
    let len = size.pow(dim as u32);
    debug_assert_eq!(data.len(), len);
    let fft = plan(size, inverse);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    // Last axis: contiguous rows.
    fft.process_with_scratch(data, &mut scratch);

    let mut line = vec![Complex64::default(); size];
    for axis in (0..dim - 1).rev() {
        let stride = size.pow((dim - 1 - axis) as u32);
        let block = stride * size;
        for outer in (0..len).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, value) in line.iter().enumerate() {
                    data[base + i * stride] = *value;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_lands_on_its_bin() {
        let size = 8;
        let mut data: Vec<Complex64> = (0..size * size)
            .map(|idx| {
                let (a, b) = (idx / size, idx % size);
                let theta = 2.0 * std::f64::consts::PI * (2.0 * a as f64 - 3.0 * b as f64) / size as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        transform(&mut data, 2, size, false);
        let target = 2 * size + (size - 3);
        for (idx, c) in data.iter().enumerate() {
            let expect = if idx == target { (size * size) as f64 } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-9 && c.im.abs() < 1e-9, "{idx}: {c}");
        }
    }

    #[test]
    fn forward_then_inverse_scales_by_len() {
        let size = 8;
        let orig: Vec<Complex64> = (0..size * size * size)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        transform(&mut data, 3, size, false);
        transform(&mut data, 3, size, true);
        let len = (size * size * size) as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / len - b).norm() < 1e-12);
        }
    }
}
