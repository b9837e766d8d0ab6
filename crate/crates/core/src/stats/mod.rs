//! Statistics kernel: hypergeometric law, top-fraction selection, variance
//! decomposition, correlations, deciles and empirical CDFs.

mod correlation;
mod ecdf;
mod hypergeom;
mod selection;
mod variance;

use thiserror::Error;

use crate::model::{ClusterId, JournalId};

pub use correlation::{
    average_ranks, decile_bin_sizes, decile_correlations, paired_values, pearson, spearman,
    DecileBin,
};
pub use ecdf::{ecdf, ecdf_by_group, ks_two_sample, GroupEcdf};
pub use hypergeom::{ln_binomial, Hypergeometric};
pub use selection::{top_count, top_fraction, TopSelection};
pub use variance::{variance_decomposition, GroupMean, VarianceDecomposition};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("invalid hypergeometric parameters: population {population}, successes {successes}, draws {draws}")]
    InvalidHypergeometric {
        population: u64,
        successes: u64,
        draws: u64,
    },
    #[error("confidence level must lie strictly between 0 and 1, got {0}")]
    InvalidLevel(f64),
    #[error("percentage must lie in (0, 100], got {0}")]
    InvalidPercentage(f64),
    #[error("top {z}% of {population} journals selects nobody")]
    EmptySelection { z: f64, population: usize },
    #[error("no DEFINED values")]
    NoDefinedValues,
    #[error("cluster `{0}` has no DEFINED values")]
    EmptyCluster(ClusterId),
    #[error("journal `{0}` is not assigned to any cluster")]
    Unassigned(JournalId),
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("need at least 2 complete pairs, got {0}")]
    TooFewPairs(usize),
    #[error("x and y differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need k >= 2 bins, got {0}")]
    InvalidBins(usize),
    #[error("{support} shared values cannot fill {bins} bins")]
    SupportTooSmall { support: usize, bins: usize },
    #[error("empty sample")]
    EmptySample,
}
