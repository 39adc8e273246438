//! Topology-enhanced nonparametric change point detection.
//!
//! A series is normalized, cut into sliding windows, and each window is
//! summarised by its Betti-0 sequence over a fixed grid of Vietoris–Rips
//! scales. PCA compresses those sequences into a low-dimensional signature
//! series on which a nonparametric detector (E-Divisive, CvM CPM or a
//! Bartlett variance scan) locates distributional change points.
//!
//! ```
//! use tdacpd::{tda_transform, TdaConfig, TimeSeries};
//!
//! let y: Vec<f64> = (0..60).map(|t| ((t * 37) % 11) as f64).collect();
//! let series = TimeSeries::univariate(y).unwrap();
//! let derived = tda_transform(&series, &TdaConfig::new(5, 2)).unwrap();
//! assert_eq!(derived.values.len(), 56);
//! assert_eq!(derived.values.dim(), 2);
//! ```

pub mod cpd;
pub mod embedding;
mod error;
pub mod exec;
pub mod pipeline;
pub mod prewhiten;
pub mod series;
pub mod simulate;
pub mod topology;

pub use cpd::{DetectionResult, DetectorConfig, DetectorKind, SeriesKind};
pub use embedding::{tda_transform, DerivedSeries, PcaModel, TdaConfig};
pub use error::{Error, Result};
pub use exec::Execution;
pub use pipeline::{run_plan, DetectionPlan};
pub use series::{normalize, sliding_windows, PointCloud, TimeSeries, WindowConfig};
pub use topology::{BettiMatrix, BettiSequence, ScaleGrid};
