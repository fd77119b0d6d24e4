//! Initial data, constant calibration and the experiment battery.

pub mod battery;
pub mod calibrate;
pub mod corpus;
pub mod data;
pub mod report;
pub mod suites;

pub use battery::{class_coincidence, scaling_experiment};
pub use calibrate::{calibrate_constants, default_class_tuples, Calibration, CalibrationSettings};
pub use corpus::{corpus_digest, CorpusSpec};
pub use data::{make_initial_data, taylor_green_2d, DataKind, DataParams};
pub use report::{Case, Comparison, Environment, ExperimentReport, Metric};
pub use suites::{datum_with_g0, run_property_suites, verify_calibration, VerifyOptions, SUITES};
