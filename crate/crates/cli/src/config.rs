//! Run configuration. Every analyst choice lives here as a default rather
//! than a constant, and the whole struct is echoed into each run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use hcr_core::ranking::{Metric, IBB_GLOBAL_TOTAL};
use hcr_core::{Column, CountingMode, Period};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Country table used instead of the roster pipeline when set.
    pub countries: Option<PathBuf>,
    pub roster_ibb: Option<PathBuf>,
    pub roster_wos: Option<PathBuf>,
    pub metrics: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub aliases: Option<PathBuf>,
    pub indicator_cache: Option<PathBuf>,
    pub indicator_override: Option<PathBuf>,

    pub ibb_list_year: i32,
    pub wos_list_year: i32,
    pub period: Period,
    pub counting_mode: CountingMode,
    pub field_label: String,
    pub x: f64,
    pub y: f64,
    pub threshold: f64,
    pub min_wos: u64,
    pub pearson_exclusions: Vec<String>,
    pub filter_exclusions: Vec<String>,
    /// Apply the min_wos / exclusion filter before `validate`.
    pub apply_filter: bool,
    pub indicator_year: i32,
    pub global_total: Option<f64>,
    pub offline: bool,
    pub allow_unmatched: bool,
    pub use_record_country_on_unmatched: bool,
    pub country_remap: BTreeMap<String, String>,
    pub validate_x: Column,
    pub validate_y: Column,
    pub rank_metric: Metric,
    pub y_grid: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            countries: None,
            roster_ibb: None,
            roster_wos: None,
            metrics: None,
            registry: None,
            aliases: None,
            indicator_cache: None,
            indicator_override: None,
            ibb_list_year: 2020,
            wos_list_year: 2014,
            period: Period::new(2006),
            counting_mode: CountingMode::Fractional,
            field_label: hcr_core::ingest::DEFAULT_FIELD.to_string(),
            x: 5.0,
            y: 0.05,
            threshold: 30.0,
            min_wos: 3,
            pearson_exclusions: vec!["USA".into()],
            filter_exclusions: vec!["CHN".into()],
            apply_filter: false,
            indicator_year: 2019,
            global_total: Some(IBB_GLOBAL_TOTAL),
            offline: false,
            allow_unmatched: false,
            use_record_country_on_unmatched: true,
            country_remap: BTreeMap::new(),
            validate_x: Column::PTop5,
            validate_y: Column::IbbHcr,
            rank_metric: Metric::IbbHcr,
            y_grid: vec![0.5, 0.1, 0.05, 0.01],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::io(format!("config {}: {e}", path.display())))
    }
}
