//! Country-level research assessment from highly-cited-researcher rosters and
//! institution percentile counts.
//!
//! The pipeline reads rosters and metrics ([`ingest`]), resolves affiliations
//! and sums to countries ([`registry`]), then feeds correlation
//! ([`stats`]), tail extrapolation ([`extrapolation`]) and rankings
//! ([`ranking`]), with population and GDP denominators from [`worldbank`].

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod country;
pub mod error;
pub mod extrapolation;
pub mod ingest;
pub mod ranking;
pub mod registry;
pub mod stats;
pub mod worldbank;

pub use country::{Column, CountryRecord, CountryValues};
pub use error::{Error, Result};
pub use extrapolation::{
    ep_from_metrics, predict_wos, ptop_convert, ptop_from_total, EpModel, PercentileLevel,
};
pub use ingest::{
    read_metrics, read_roster, CountingMode, IngestReport, InstitutionMetrics, ListSource, Period,
    ResearcherRecord,
};
pub use ranking::{
    career_onset_distribution, comparison_filter, normalize, rank_countries, rank_scatter,
    Basis, Metric, OnsetDistribution, RankingEntry,
};
pub use registry::{
    aggregate_country, normalize_name, AggregationPolicy, CountryAggregate, MatchOutcome,
    Registry,
};
pub use stats::{
    pearson, rank_vector, spearman, t_sf_two_sided, CorrelationResult, Method, PairedSeries,
};
pub use worldbank::{fetch_indicators, FetchMode, FetchOptions, IndicatorSnapshot};
