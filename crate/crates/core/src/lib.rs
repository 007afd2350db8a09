//! Scalp EEG functional connectivity and the shape of connectivity-weight
//! distributions.
//!
//! The crate covers the whole chain from cortical sources to summary
//! statistics:
//!
//! - [`signal_model`]: source assembly, synthetic lead fields, forward projection
//! - [`spectral`]: Bartlett cross-spectra, coherency, band-limited analytic signals
//! - [`connectivity`]: COH, iCOH, PLV, PLI and AEC matrices
//! - [`distribution`]: upper-triangle weights, moments, normalized histogram entropy
//! - [`inference`]: Pearson correlation with exact t-based p-values
//! - [`pipeline`]: seeded experiment grids, cross-spectrum ingestion, result files
//!
//! Runnable walkthroughs for each stage live in the crate's `examples/`
//! directory; the `conndist` binary wraps the pipeline for batch use.

pub mod connectivity;
pub mod distribution;
pub mod error;
pub mod inference;
pub mod matrix_io;
pub mod montage;
pub mod pipeline;
pub mod seed;
pub mod signal_model;
pub mod spectral;

pub use connectivity::{ConnectivityMatrix, Metric, WindowConfig};
pub use distribution::{DistributionSummary, WeightVector};
pub use error::{Error, Result};
pub use inference::CorrelationResult;
pub use signal_model::{LeadField, MultichannelRecord, SourceActivity, SourceLibrary};
pub use spectral::{AnalyticRecord, Band, CoherencyMatrix, CrossSpectrum};
