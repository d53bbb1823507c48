//! Learning-curve estimation, configuration, export, the acceptance suite
//! and the command-line front end.

pub mod cli;
pub mod config;
pub mod curve;
pub mod export;
pub mod fixtures;
pub mod summary;
pub mod verify;

pub use config::{ExperimentConfig, LearnerKind, LearnerSpec, NGrid};
pub use curve::{estimate_curve, estimate_curve_with, CurveReport, CurveRow, HoldOut, Population};
pub use export::{stamped_csv, stamped_json, svg_plot, Series, Stamp};
pub use summary::{fit_rate_summary, RateSummary};
pub use verify::{verify, Scale, VerifyOptions, VerifyReport};
