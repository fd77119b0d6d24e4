//! Lebesgue, Besov, Chemin-Lerner and path-space norms.

pub mod composite;
pub mod index;
pub mod inequalities;
pub mod norms;
pub mod time;

pub use composite::{check_ale, x_norm, y_from_table, y_norm, z_from_table, z_norm, AleVerdict};
pub use index::{BesovIndex, Exponent, TimeExponent};
pub use inequalities::{inequality_suite, ConstantKind, Histogram, InequalityEntry, InequalityReport};
pub use norms::{
    besov_norm, default_probe_times, heat_char_norm, lp_norm, shell_norms, Aggregation, NormIndex, NormReport,
};
pub use time::{
    chemin_lerner_norm, lebesgue_time_norm, lp_series, time_norm, ShellNormTable, TimeGrid, TimeSeriesField,
};
