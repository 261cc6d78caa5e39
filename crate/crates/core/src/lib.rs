//! Extraction of personal identifiers from social-media profile bios and
//! the statistics used to validate them: demographic log-odds contrasts,
//! spectral co-clustering, lexicon comparisons, annotation sampling and
//! inter-rater reliability.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`.

pub mod annotation;
pub mod cocluster;
pub mod corpus;
pub mod error;
pub mod extractor;
pub mod index;
pub mod lexicon;
pub mod scalar;
pub mod stats;
pub mod tsv;

pub use cocluster::CoClusterConfig;
pub use corpus::{AllowedLanguages, FilterReport, Schema, UserRecord};
pub use error::{Error, Result};
pub use extractor::{extract_identifiers, PhraseRecord, RuleSet};
pub use index::{build_index, build_matrix, BipartiteMatrix, IdentifierIndex, IndexBuilder};
pub use scalar::Scalar;

pub type BinomialEstimate = stats::BinomialEstimate<f64>;
pub type BootstrapCi = stats::BootstrapCi<f64>;
pub type CategoryContrast = stats::CategoryContrast<f64>;
pub type RankedContrast = stats::RankedContrast<f64>;
pub type MeanRank = stats::MeanRank<f64>;
pub type CoClusterResult = cocluster::CoClusterResult<f64>;
pub type Lexicon = lexicon::Lexicon<f64>;
pub type DimensionComparison = lexicon::DimensionComparison<f64>;
pub type MergeReport = annotation::MergeReport<f64>;
