//! Littlewood-Paley and Besov calculus on the periodic torus, Bony paraproducts,
//! and a Picard solver for mild Navier-Stokes solutions with subcritical Besov data.

pub mod besov;
pub mod error;
pub mod experiments;
pub mod io;
pub mod paraproduct;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
