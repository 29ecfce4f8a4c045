//! pdpkit: power delay profile analysis for site-specific vs. statistical
//! channel models.
//!
//! The crate covers three jobs:
//!
//! * generate 3GPP TR 38.901 TDL-A/B/C reference profiles from embedded
//!   normalized tap tables, scaled to a desired RMS delay spread
//!   ([`tdl`]);
//! * turn deterministic ray-tracing path exports into peak-normalized,
//!   thresholded power delay profiles ([`ingest`], [`profile`]);
//! * quantify agreement between profiles with RMS delay spread, mean excess
//!   delay, effective maximum delay ([`metrics`]) and KL divergence in bits
//!   ([`divergence`]), and assemble per-receiver reports ([`report`]).
//!
//! The canonical processing chain for a site-specific profile is
//!
//! ```
//! use pdpkit::{CombineMode, MeanMode, PowerDelayProfile};
//!
//! let records = pdpkit::ingest::generate_synthetic(&pdpkit::ingest::SyntheticSpec {
//!     n_paths: 40,
//!     decay_constant_ns: 50.0,
//!     max_excess_ns: 400.0,
//!     base_power_dbm: -80.0,
//!     seed: 7,
//! })
//! .unwrap()
//! .records;
//!
//! let site = PowerDelayProfile::from_records(&records, 1.0, CombineMode::Noncoherent, "rx0")
//!     .unwrap()
//!     .normalize_to_peak()
//!     .apply_threshold(-30.0)
//!     .unwrap()
//!     .rezero_delays();
//!
//! let metrics = pdpkit::metrics::summarize(&site, -30.0, MeanMode::PowerWeighted).unwrap();
//! assert!(metrics.rms_ds_ns > 0.0);
//!
//! let tdl = pdpkit::tdl::scaled_profile(pdpkit::TdlModel::A, 36.0).unwrap();
//! let kl = pdpkit::divergence::compare(&site, &tdl, &Default::default()).unwrap();
//! assert!(kl.bits >= 0.0);
//! ```
//!
//! Everything is a pure function over immutable values; profiles can be
//! shared across threads and receivers processed in parallel.

pub mod divergence;
pub mod error;
pub mod ingest;
pub mod interchange;
pub mod metrics;
pub mod profile;
pub mod report;
pub mod tdl;

pub use divergence::{
    compare, CompareOptions, DelayGrid, KlResult, ProbabilityMass, ResampleMethod,
};
pub use error::{Error, Result};
pub use ingest::{PathDataset, SyntheticSpec};
pub use metrics::{summarize, DelayMetrics, MeanMode};
pub use profile::{
    db_to_linear, linear_to_db, CombineMode, MultipathRecord, PowerDelayProfile, PowerFrame, Tap,
};
pub use report::{run_batch, BatchConfig, BatchOutcome, ReportRow};
pub use tdl::{model_table, preset_ds, scaled_profile, Scenario, ScenarioPreset, TdlModel};
