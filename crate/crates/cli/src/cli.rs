use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hcr_core::ranking::Metric;
use hcr_core::{Column, Period};

use crate::commands;
use crate::config::RunConfig;
use crate::error::{CliError, EXIT_IO};
use crate::run::Run;

#[derive(Debug, Parser)]
#[command(name = "hcr", version, about = "Country-level assessment from highly-cited-researcher rosters")]
pub struct Cli {
    /// JSON run configuration; flags below override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Never contact the World Bank API; read indicators from the cache.
    #[arg(long, global = true)]
    pub offline: bool,

    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and normalize rosters and metrics, reporting rejected rows.
    Ingest,
    /// Match affiliations and sum researchers and metrics per country.
    Aggregate,
    /// Spearman and Pearson correlation between two country columns.
    Validate,
    /// Predict strict-tier counts from lenient-tier counts.
    PredictWos,
    /// Raw, per-capita and per-GDP rankings with cumulative shares.
    Rank,
    /// Compare predicted and reported counts over a grid of y levels.
    SweepY,
    /// Data series for the figures.
    Plotdata,
    /// Population and GDP for the configured year.
    FetchIndicators {
        /// Countries to fetch; defaults to those of the country input.
        #[arg(long, value_delimiter = ',')]
        country: Vec<String>,
    },
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub countries: Option<PathBuf>,
    #[arg(long, global = true)]
    pub roster_ibb: Option<PathBuf>,
    #[arg(long, global = true)]
    pub roster_wos: Option<PathBuf>,
    #[arg(long, global = true)]
    pub metrics: Option<PathBuf>,
    #[arg(long, global = true)]
    pub registry: Option<PathBuf>,
    #[arg(long, global = true)]
    pub aliases: Option<PathBuf>,
    #[arg(long, global = true)]
    pub indicator_cache: Option<PathBuf>,
    #[arg(long, global = true)]
    pub indicator_override: Option<PathBuf>,
    #[arg(long, global = true)]
    pub period: Option<Period>,
    #[arg(long, global = true)]
    pub x: Option<f64>,
    #[arg(long, global = true)]
    pub y: Option<f64>,
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long, global = true)]
    pub min_wos: Option<u64>,
    /// Countries left out of the Pearson coefficient (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub pearson_exclude: Option<Vec<String>>,
    /// Countries removed by the comparison filter (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub filter_exclude: Option<Vec<String>>,
    /// Apply the min-wos / exclusion filter before validating.
    #[arg(long, global = true)]
    pub apply_filter: bool,
    #[arg(long, global = true)]
    pub indicator_year: Option<i32>,
    #[arg(long, global = true)]
    pub global_total: Option<f64>,
    /// Count AMBIGUOUS affiliations as unmatched instead of failing.
    #[arg(long, global = true)]
    pub allow_unmatched: bool,
    #[arg(long, global = true)]
    pub validate_x: Option<Column>,
    #[arg(long, global = true)]
    pub validate_y: Option<Column>,
    #[arg(long, global = true)]
    pub metric: Option<Metric>,
    /// y levels for sweep-y (comma separated).
    #[arg(long, global = true, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

impl Overrides {
    pub fn apply(self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = self.$field { cfg.$target = Some(v); })*
            };
        }
        set!(
            countries => countries,
            roster_ibb => roster_ibb,
            roster_wos => roster_wos,
            metrics => metrics,
            registry => registry,
            aliases => aliases,
            indicator_cache => indicator_cache,
            indicator_override => indicator_override,
            global_total => global_total,
        );
        macro_rules! replace {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = self.$field { cfg.$target = v; })*
            };
        }
        replace!(
            period => period,
            x => x,
            y => y,
            threshold => threshold,
            min_wos => min_wos,
            pearson_exclude => pearson_exclusions,
            filter_exclude => filter_exclusions,
            indicator_year => indicator_year,
            validate_x => validate_x,
            validate_y => validate_y,
            metric => rank_metric,
            grid => y_grid,
        );
        cfg.apply_filter |= self.apply_filter;
        cfg.allow_unmatched |= self.allow_unmatched;
    }
}

fn execute(cli: Cli) -> Result<String, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cli.overrides.apply(&mut cfg);
    cfg.offline |= cli.offline;
    let name = match &cli.command {
        Command::Ingest => "ingest",
        Command::Aggregate => "aggregate",
        Command::Validate => "validate",
        Command::PredictWos => "predict-wos",
        Command::Rank => "rank",
        Command::SweepY => "sweep-y",
        Command::Plotdata => "plotdata",
        Command::FetchIndicators { .. } => "fetch-indicators",
    };
    let mut run = Run::new(name, cfg, &cli.out_dir)?;
    let summary = match &cli.command {
        Command::Ingest => commands::ingest(&mut run)?,
        Command::Aggregate => commands::aggregate(&mut run)?,
        Command::Validate => commands::validate(&mut run)?,
        Command::PredictWos => commands::predict_wos_cmd(&mut run)?,
        Command::Rank => commands::rank(&mut run)?,
        Command::SweepY => commands::sweep_y(&mut run)?,
        Command::Plotdata => commands::plotdata(&mut run)?,
        Command::FetchIndicators { country } => commands::fetch_indicators_cmd(&mut run, country)?,
    };
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    let files = run.outputs().len();
    let dir = run.out_dir().display().to_string();
    let manifest = run.finish()?;
    Ok(format!(
        "{summary}\nwrote {files} file(s) and {} to {dir}",
        manifest.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
    ))
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
