//! Monte Carlo estimation of outlier frequencies.
//!
//! An outlier is an observation with `|x| > k · s`, where `s` is the sample's
//! own dispersion. This crate samples Gaussian, Cauchy, α-stable and Laplace
//! laws, counts such events per sample, and estimates their probability as a
//! function of the sample size with a deterministic parallel engine.
//!
//! ```
//! use outlierfreq_core::{run_cell, DistributionSpec, OutlierQuery};
//!
//! let row = run_cell(&DistributionSpec::cauchy(), 3, &OutlierQuery::new(3.0), 1000, 42, 3)?;
//! assert!(row.p_hat > 0.0 && row.p_hat < 0.2);
//! # Ok::<(), outlierfreq_core::Error>(())
//! ```

pub mod distributions;
pub mod engine;
pub mod error;
pub mod gof;
pub mod reference;
pub mod rng;
pub mod stats;

pub use distributions::{cdf, sample, DistributionSpec, Family, Sampler};
pub use engine::{
    draw_replication, estimate_limit_moments, find_crossover, mean_and_stderr, run_cell, run_sweep,
    CrossoverPoint, CrossoverReport, CrossoverSearch, EstimateRow, ExperimentConfig, MomentReport,
    DEFAULT_PERSISTENCE, DEFAULT_REPLICATIONS,
};
pub use error::{Error, Result};
pub use reference::{
    gaussian_outlier_limit, limit_moments, std_normal_cdf, MomentQuadruple, EMPIRICAL_BAND,
};
pub use rng::RngState;
pub use stats::{
    compute_stats, count_outliers, outlier_fraction, self_normalized, symmetrize, OutlierQuery,
    SConvention, SampleStats,
};
