//! Mild solutions `u = S[f] − B[u,u]` on a uniform time grid.

pub mod bilinear;
pub mod calibration;
pub mod duhamel;
pub mod persistence;
pub mod picard;
pub mod record;

pub use bilinear::{bilinear, bilinear_ale, bilinear_b, bilinear_btilde, nonlinear_source, nonlinear_source_bony, BilinearForm};
pub use calibration::{
    data_norms, lambda_root, smallness_condition, smallness_from_norms, CalibrationTable, EpsConstants, LambdaRoots,
    ObservedMaxima, PersistenceConstant, Smallness, UniquenessConstant,
};
pub use duhamel::{duhamel, heat_source, StepWeights};
pub use persistence::{check_lambda, persistence_check, recursion_constant, PersistenceTrace};
pub use picard::{
    picard_solve, picard_solve_perturbed, source_v_norms, uniqueness_check, DifferenceRecord, Gate, IterateRecord, PicardRun,
    PicardTrace, SolverConfig, UniquenessReport,
};
pub use record::{
    blowup_monitor, class_norm, restart, running_z, semigroup_check, semigroup_check_at, BlowupRow, BlowupSeries,
    NormRow, RecordSummary, RestartReport, SemigroupReport, SolutionRecord,
};
