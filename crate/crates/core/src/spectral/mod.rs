//! Periodic grids, transforms, Littlewood-Paley cutoffs and Fourier-multiplier operators.

pub mod cutoff;
pub mod fft;
pub mod field;
pub mod grid;
pub mod littlewood_paley;
pub mod operators;

pub use cutoff::{CutoffPair, DyadicRange, Smoothstep};
pub use field::{forward_transform, inverse_transform, PhysicalField, SpectralField};
pub use grid::Grid;
pub use littlewood_paley::LittlewoodPaley;
pub use operators::{
    apply_first_order_symbol, bernstein_ratio, gradient, heat_flow, leray_project, pdiv, symbol_at,
    HomogeneousSymbol, PartialDerivative, ProjectedDivergence,
};
