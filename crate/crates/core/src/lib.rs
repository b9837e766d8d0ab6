//! Journal citation indicators under integer and fractional counting,
//! per-field mean rescaling, and statistics for judging whether an
//! indicator treats fields of science evenly.
//!
//! The pipeline is `ingest` → `indicators` → (`fairness`, `stats`), with
//! `synth` producing seeded datasets that flow through the same path.

pub mod exec;
pub mod fairness;
pub mod indicators;
pub mod ingest;
pub mod model;
pub mod stats;
pub mod synth;

pub use exec::Execution;
pub use fairness::{
    calibration, compare_reports, fairness_test, summarize_percentages, Calibration,
    ClusterFairness, Comparison, FairnessError, FairnessReport, Overall, PercentageSummary,
    Summary, Verdict,
};
pub use indicators::{
    compute_table, if_denominator, if_numerator, rank_table, read_table, rescale, write_table,
    Counting, IndicatorError, IndicatorKind, IndicatorSpec, IndicatorTable, Normalization,
    RankOrder, RankedEntry, RescaleBasis, TableMeta, Window,
};
pub use ingest::{
    assemble, parse_citations, parse_journals, parse_publications, read_bundle, write_bundle,
    Assembled, ExclusionSummary, IngestConfig, IngestError, TextFormat, UnknownCitedPolicy,
    ZeroRefsPolicy,
};
pub use model::{
    validate, CitationEvent, Cluster, ClusterId, Dataset, JournalId, JournalRecord, PaperId,
    Partition, PublicationCount, Rule, Violation,
};
pub use stats::{
    decile_correlations, ecdf, ecdf_by_group, ks_two_sample, pearson, spearman, top_fraction,
    variance_decomposition, DecileBin, GroupEcdf, Hypergeometric, StatsError, TopSelection,
    VarianceDecomposition,
};
pub use synth::{generate, paper2010_profile, ClusterProfile, SynthError, SynthProfile};
