//! Scalar statistics used across the validation analyses.

mod bootstrap;
mod interval;
mod log_odds;
mod ranking;
mod reliability;

pub use bootstrap::{bootstrap_mean_ci, percentile, BootstrapCi};
pub use interval::{agresti_coull_interval, normal_quantile, BinomialEstimate};
pub use log_odds::{friend_follower_ratio, normalized_log_odds, raw_log_odds, CategoryContrast};
pub use ranking::{
    continuous_mean_ranking, count_correlation, pearson, rank_by_category, Contrast, MeanRank,
    RankedContrast, Side,
};
pub use reliability::{krippendorff_alpha, ReliabilityTable, ReliabilityUnit};

/// Pseudo-count added to each phrase under the Dirichlet prior.
pub const DEFAULT_PRIOR: f64 = 0.01;
/// Phrases shown in rankings must appear in at least this many bios.
pub const DEFAULT_MIN_BIOS: u64 = 10;
