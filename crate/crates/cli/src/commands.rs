//! The subcommands. Each one reads its inputs through [`Run`], writes its
//! tables into the output directory and returns a short summary for stdout.

use std::path::PathBuf;

use hcr_core::country::read_country_table;
use hcr_core::extrapolation::round_display;
use hcr_core::ingest::{read_metrics, read_roster, write_metrics, write_roster, IngestReport, ListSource};
use hcr_core::ranking::{
    career_onset_distribution, comparison_filter, normalize, rank_countries, rank_scatter, rerank,
    Basis, Metric, RankOptions, RankingEntry, ScatterRow,
};
use hcr_core::registry::{aggregate_country, write_audit, Aggregation, AggregationPolicy, Registry};
use hcr_core::stats::{
    correlate, rank_vector, spearman_exact, CorrelationResult, Method, PairedSeries, MAX_EXACT_N,
};
use hcr_core::worldbank::{
    fetch_indicators, FetchMode, FetchOptions, IndicatorSnapshot, Source, BASE_URL_ENV, DEFAULT_BASE_URL,
};
use hcr_core::{
    ep_from_metrics, predict_wos, Column, CountryRecord, EpModel, PercentileLevel, ResearcherRecord,
};
use serde::Serialize;

use crate::error::CliError;
use crate::run::Run;

fn fixed(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}

fn full(v: f64) -> String {
    v.to_string()
}

fn opt_fixed(v: Option<f64>, decimals: usize) -> String {
    v.map(|v| fixed(v, decimals)).unwrap_or_default()
}

fn opt_full(v: Option<f64>) -> String {
    v.map(full).unwrap_or_default()
}

/// A correlation with display strings next to the full-precision numbers.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationOut {
    #[serde(flatten)]
    pub result: CorrelationResult,
    pub r_display: String,
    pub p_display: String,
}

impl From<CorrelationResult> for CorrelationOut {
    fn from(result: CorrelationResult) -> Self {
        CorrelationOut {
            r_display: fixed(result.r, 3),
            p_display: format!("{:.1e}", result.p_two_sided),
            result,
        }
    }
}

fn none() -> &'static [String] {
    &[]
}

fn required(value: &Option<PathBuf>, key: &str) -> Result<PathBuf, CliError> {
    value
        .clone()
        .ok_or_else(|| CliError::io(format!("missing input: set `{key}` in the config or on the command line")))
}

fn note_rejects(run: &mut Run, role: &str, report: &IngestReport) {
    if !report.rejects.is_empty() {
        let first = &report.rejects[0];
        run.warn(format!(
            "{role}: {} of {} rows rejected (first at line {}: {})",
            report.rejects.len(),
            report.rows_read,
            first.line,
            first.message
        ));
    }
}

fn read_rosters(run: &mut Run) -> Result<Vec<ResearcherRecord>, CliError> {
    let ibb_path = required(&run.config.roster_ibb, "roster_ibb")?;
    run.input("roster_ibb", &ibb_path)?;
    let (mut records, report) = read_roster(&ibb_path, ListSource::Ibb, run.config.ibb_list_year)?;
    note_rejects(run, "roster_ibb", &report);
    if let Some(wos_path) = run.config.roster_wos.clone() {
        run.input("roster_wos", &wos_path)?;
        let (wos, report) = read_roster(&wos_path, ListSource::Wos, run.config.wos_list_year)?;
        note_rejects(run, "roster_wos", &report);
        records.extend(wos);
    }
    Ok(records)
}

fn run_aggregation(run: &mut Run) -> Result<Aggregation, CliError> {
    let records = read_rosters(run)?;
    let metrics_path = required(&run.config.metrics, "metrics")?;
    run.input("metrics", &metrics_path)?;
    let (metrics, report) = read_metrics(&metrics_path)?;
    note_rejects(run, "metrics", &report);
    let registry_path = required(&run.config.registry, "registry")?;
    run.input("registry", &registry_path)?;
    let aliases = run.config.aliases.clone();
    if let Some(a) = &aliases {
        run.input("aliases", a)?;
    }
    let registry = Registry::from_csv(&registry_path, aliases.as_deref())?;
    let cfg = &run.config;
    let policy = AggregationPolicy {
        use_record_country_on_unmatched: cfg.use_record_country_on_unmatched,
        allow_unmatched: cfg.allow_unmatched,
        counting_mode: Some(cfg.counting_mode),
        field_label: Some(cfg.field_label.clone()),
        country_remap: cfg.country_remap.clone(),
    };
    let agg = aggregate_country(&records, &metrics, &registry, cfg.period, &policy)?;
    if agg.metrics_rows_unmatched > 0 {
        run.warn(format!(
            "{} metrics rows did not resolve to a registry institution",
            agg.metrics_rows_unmatched
        ));
    }
    Ok(agg)
}

/// Country rows from the country table if one is configured, otherwise
/// from the roster pipeline.
pub fn load_countries(run: &mut Run) -> Result<Vec<CountryRecord>, CliError> {
    if let Some(path) = run.config.countries.clone() {
        run.input("countries", &path)?;
        return Ok(read_country_table(&path)?);
    }
    if run.config.roster_ibb.is_none() {
        return Err(CliError::io(
            "no country input: set `countries`, or `roster_ibb` with `metrics` and `registry`",
        ));
    }
    let agg = run_aggregation(run)?;
    Ok(agg.aggregates.iter().map(CountryRecord::from).collect())
}

// ---------------------------------------------------------------- ingest

#[derive(Serialize)]
struct IngestSummary<'a> {
    file: &'a str,
    report: &'a IngestReport,
}

pub fn ingest(run: &mut Run) -> Result<String, CliError> {
    let cfg = run.config.clone();
    let mut summaries = Vec::new();
    let mut reports = Vec::new();
    for (role, path, source, year) in [
        ("roster_ibb", &cfg.roster_ibb, ListSource::Ibb, cfg.ibb_list_year),
        ("roster_wos", &cfg.roster_wos, ListSource::Wos, cfg.wos_list_year),
    ] {
        let Some(path) = path else { continue };
        run.input(role, path)?;
        let (records, report) = read_roster(path, source, year)?;
        let mut buf = Vec::new();
        write_roster(&records, &mut buf)?;
        run.write_bytes(&format!("ingest_{role}.csv"), &buf)?;
        note_rejects(run, role, &report);
        summaries.push(format!("{role}: {} of {} rows accepted", report.rows_accepted, report.rows_read));
        reports.push((role, report));
    }
    if let Some(path) = &cfg.metrics {
        run.input("metrics", path)?;
        let (rows, report) = read_metrics(path)?;
        let mut buf = Vec::new();
        write_metrics(&rows, &mut buf)?;
        run.write_bytes("ingest_metrics.csv", &buf)?;
        note_rejects(run, "metrics", &report);
        summaries.push(format!("metrics: {} of {} rows accepted", report.rows_accepted, report.rows_read));
        reports.push(("metrics", report));
    }
    if reports.is_empty() {
        return Err(CliError::io("nothing to ingest: set roster_ibb, roster_wos or metrics"));
    }
    let out: Vec<IngestSummary> = reports
        .iter()
        .map(|(role, report)| IngestSummary { file: role, report })
        .collect();
    run.write_json("ingest_report.json", &out)?;
    Ok(summaries.join("\n"))
}

// ------------------------------------------------------------- aggregate

pub fn aggregate(run: &mut Run) -> Result<String, CliError> {
    let agg = run_aggregation(run)?;
    let mut buf = Vec::new();
    hcr_core::country::write_aggregates(&agg.aggregates, &mut buf)?;
    run.write_bytes("aggregate.csv", &buf)?;
    let mut buf = Vec::new();
    write_audit(&agg.audit, &mut buf)?;
    run.write_bytes("aggregate_audit.csv", &buf)?;
    #[derive(Serialize)]
    struct Out<'a> {
        countries: usize,
        tally: &'a hcr_core::registry::RosterTally,
        metrics_rows_used: usize,
        metrics_rows_unmatched: usize,
    }
    run.write_json(
        "aggregate.json",
        &Out {
            countries: agg.aggregates.len(),
            tally: &agg.tally,
            metrics_rows_used: agg.metrics_rows_used,
            metrics_rows_unmatched: agg.metrics_rows_unmatched,
        },
    )?;
    Ok(format!(
        "{} countries; {} researchers counted, {} hospital-affiliated excluded, {} unmatched without country",
        agg.aggregates.len(),
        agg.tally.counted,
        agg.tally.hospital_excluded,
        agg.tally.unmatched_no_country
    ))
}

// -------------------------------------------------------------- validate

fn scatter_rows(rows: &[ScatterRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.country_code.clone(),
                full(r.rank_left),
                full(r.rank_right),
                full(r.deviation),
            ]
        })
        .collect()
}

#[derive(Serialize)]
struct ValidateOut {
    x_column: Column,
    y_column: Column,
    n: usize,
    countries: Vec<String>,
    filter_applied: bool,
    spearman: CorrelationOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    spearman_exact: Option<CorrelationOut>,
    pearson: CorrelationOut,
}

pub fn validate(run: &mut Run) -> Result<String, CliError> {
    let mut countries = load_countries(run)?;
    let cfg = run.config.clone();
    if cfg.apply_filter {
        countries = comparison_filter(&countries, cfg.min_wos, &cfg.filter_exclusions);
    }
    let (xc, yc) = (cfg.validate_x, cfg.validate_y);
    let mut labels = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for c in &countries {
        match (c.get(xc), c.get(yc)) {
            (Some(x), Some(y)) => {
                labels.push(c.country_code.clone());
                xs.push(x);
                ys.push(y);
            }
            _ => run.warn(format!("{}: missing {xc} or {yc}, skipped", c.country_code)),
        }
    }
    let series = PairedSeries::new(labels.clone(), xs.clone(), ys.clone())?;
    let spearman = correlate(&series, Method::Spearman, none())?;
    let pearson = correlate(&series, Method::Pearson, &cfg.pearson_exclusions)?;
    let exact = if series.len() <= MAX_EXACT_N {
        Some(spearman_exact(&series)?.into())
    } else {
        None
    };

    let data: Vec<Vec<String>> = labels
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(c, (x, y))| vec![c.clone(), full(*x), full(*y)])
        .collect();
    run.write_csv("validate_data.csv", &["country_code", xc.name(), yc.name()], &data)?;
    let left: Vec<(String, f64)> = labels.iter().cloned().zip(xs).collect();
    let right: Vec<(String, f64)> = labels.iter().cloned().zip(ys).collect();
    let scatter = rank_scatter(&left, &right)?;
    let rank_x = format!("rank_{}", xc.name());
    let rank_y = format!("rank_{}", yc.name());
    run.write_csv(
        "validate_ranks.csv",
        &["country_code", &rank_x, &rank_y, "deviation"],
        &scatter_rows(&scatter),
    )?;

    let summary = format!(
        "n={} spearman r={} p={:.1e}; pearson (excluding {}) r={} p={:.1e} n={}",
        series.len(),
        fixed(spearman.r, 3),
        spearman.p_two_sided,
        if pearson.excluded.is_empty() { "none".to_string() } else { pearson.excluded.join(",") },
        fixed(pearson.r, 3),
        pearson.p_two_sided,
        pearson.n
    );
    run.write_json(
        "validate.json",
        &ValidateOut {
            x_column: xc,
            y_column: yc,
            n: series.len(),
            countries: labels,
            filter_applied: cfg.apply_filter,
            spearman: spearman.into(),
            spearman_exact: exact,
            pearson: pearson.into(),
        },
    )?;
    Ok(summary)
}

// ----------------------------------------------------------- predict-wos

struct Prediction {
    country_code: String,
    ibb: f64,
    p: f64,
    p_top10: f64,
    model: EpModel,
    reported: Option<f64>,
}

fn predictions(run: &mut Run, countries: &[CountryRecord]) -> Vec<Prediction> {
    let mut out = Vec::new();
    for c in countries {
        let (Some(ibb), Some(p), Some(p_top10)) = (c.ibb_hcr, c.p, c.p_top10) else {
            run.warn(format!("{}: missing ibb_hcr, P or p_top10, skipped", c.country_code));
            continue;
        };
        let model = match ep_from_metrics(p, p_top10) {
            Ok(m) if !m.is_boundary() => m,
            Ok(m) => {
                run.warn(format!("{}: {}, skipped", c.country_code, m.warning().unwrap_or_default()));
                continue;
            }
            Err(e) => {
                run.warn(format!("{}: {e}, skipped", c.country_code));
                continue;
            }
        };
        out.push(Prediction {
            country_code: c.country_code.clone(),
            ibb,
            p,
            p_top10,
            model,
            reported: c.wos_hcr,
        });
    }
    out
}

fn levels(x: f64, y: f64) -> Result<(PercentileLevel, PercentileLevel), CliError> {
    Ok((PercentileLevel::new(x)?, PercentileLevel::new(y)?))
}

#[derive(Serialize)]
struct PairCorrelations {
    basis: &'static str,
    n: usize,
    spearman: CorrelationOut,
    pearson: CorrelationOut,
}

#[derive(Serialize)]
struct PredictOut {
    x: f64,
    y: f64,
    countries: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlations: Option<PairCorrelations>,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlations_full_precision: Option<PairCorrelations>,
}

fn pair_correlations(
    basis: &'static str,
    labels: &[String],
    xs: &[f64],
    ys: &[f64],
    exclusions: &[String],
) -> Result<PairCorrelations, CliError> {
    let series = PairedSeries::new(labels.to_vec(), xs.to_vec(), ys.to_vec())?;
    Ok(PairCorrelations {
        basis,
        n: series.len(),
        spearman: correlate(&series, Method::Spearman, none())?.into(),
        pearson: correlate(&series, Method::Pearson, exclusions)?.into(),
    })
}

pub fn predict_wos_cmd(run: &mut Run) -> Result<String, CliError> {
    let countries = load_countries(run)?;
    let cfg = run.config.clone();
    let (x, y) = levels(cfg.x, cfg.y)?;
    let preds = predictions(run, &countries);
    let mut rows = Vec::new();
    let mut calc = Vec::new();
    for p in &preds {
        let c = predict_wos(p.ibb, &p.model, x, y)?;
        calc.push(c);
        let rounded = round_display(c);
        rows.push(vec![
            p.country_code.clone(),
            full(p.ibb),
            full(p.p),
            full(p.p_top10),
            fixed(p.model.ep, 3),
            full(p.model.ep),
            rounded.to_string(),
            full(c),
            opt_full(p.reported),
            p.reported.map(|r| full(rounded as f64 - r)).unwrap_or_default(),
        ]);
    }
    run.write_csv(
        "predict_wos.csv",
        &[
            "country_code",
            "ibb_hcr",
            "P",
            "p_top10",
            "ratio",
            "ratio_full",
            "calculated",
            "calculated_full",
            "reported",
            "deviation",
        ],
        &rows,
    )?;

    // Correlate only countries with a reported count.
    let mut labels = Vec::new();
    let (mut rounded, mut exact, mut reported) = (Vec::new(), Vec::new(), Vec::new());
    for (p, &c) in preds.iter().zip(&calc) {
        if let Some(r) = p.reported {
            labels.push(p.country_code.clone());
            rounded.push(round_display(c) as f64);
            exact.push(c);
            reported.push(r);
        }
    }
    let mut summary = format!("{} countries predicted", preds.len());
    let (correlations, correlations_full_precision) = if labels.is_empty() {
        (None, None)
    } else {
        let main = pair_correlations("rounded", &labels, &rounded, &reported, &cfg.pearson_exclusions)?;
        let fp = pair_correlations("full_precision", &labels, &exact, &reported, &cfg.pearson_exclusions)?;
        summary.push_str(&format!(
            "; spearman r={} p={}; pearson (excluding {}) r={} p={}",
            main.spearman.r_display,
            main.spearman.p_display,
            main.pearson.result.excluded.join(","),
            main.pearson.r_display,
            main.pearson.p_display
        ));
        let left: Vec<(String, f64)> = labels.iter().cloned().zip(rounded.iter().copied()).collect();
        let right: Vec<(String, f64)> = labels.iter().cloned().zip(reported.iter().copied()).collect();
        run.write_csv(
            "predict_wos_ranks.csv",
            &["country_code", "rank_calculated", "rank_reported", "deviation"],
            &scatter_rows(&rank_scatter(&left, &right)?),
        )?;
        (Some(main), Some(fp))
    };
    run.write_json(
        "predict_wos.json",
        &PredictOut {
            x: cfg.x,
            y: cfg.y,
            countries: preds.len(),
            correlations,
            correlations_full_precision,
        },
    )?;
    Ok(summary)
}

// --------------------------------------------------------------- sweep-y

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub y: f64,
    pub sum_abs_deviation: f64,
    pub rank_deviation: f64,
    pub minimizer: bool,
}

#[derive(Serialize)]
struct SweepOut<'a> {
    x: f64,
    criterion: &'static str,
    countries: usize,
    minimizer_y: f64,
    rows: &'a [SweepRow],
}

pub fn sweep_y(run: &mut Run) -> Result<String, CliError> {
    let countries = load_countries(run)?;
    let cfg = run.config.clone();
    if cfg.y_grid.is_empty() {
        return Err(CliError::io("usage: the y grid is empty"));
    }
    let x = PercentileLevel::new(cfg.x)?;
    let grid: Vec<PercentileLevel> = cfg
        .y_grid
        .iter()
        .map(|&y| PercentileLevel::new(y))
        .collect::<Result<_, _>>()?;
    let preds: Vec<Prediction> = predictions(run, &countries)
        .into_iter()
        .filter(|p| p.reported.is_some())
        .collect();
    if preds.is_empty() {
        return Err(CliError::precondition("sweep-y needs reported wos_hcr values"));
    }
    let reported: Vec<f64> = preds.iter().map(|p| p.reported.unwrap()).collect();
    let reported_ranks = rank_vector(&reported);

    let mut rows = Vec::new();
    for level in grid {
        let calc: Vec<f64> = preds
            .iter()
            .map(|p| predict_wos(p.ibb, &p.model, x, level))
            .collect::<Result<_, _>>()?;
        let sum_abs = calc.iter().zip(&reported).map(|(c, r)| (c - r).abs()).sum();
        let rank_dev = rank_vector(&calc)
            .iter()
            .zip(&reported_ranks)
            .map(|(a, b)| (a - b).abs())
            .sum();
        rows.push(SweepRow {
            y: level.value(),
            sum_abs_deviation: sum_abs,
            rank_deviation: rank_dev,
            minimizer: false,
        });
    }
    let best = (0..rows.len())
        .reduce(|b, i| if rows[i].sum_abs_deviation < rows[b].sum_abs_deviation { i } else { b })
        .expect("grid is not empty");
    rows[best].minimizer = true;

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                full(r.y),
                fixed(r.sum_abs_deviation, 0),
                full(r.sum_abs_deviation),
                full(r.rank_deviation),
                r.minimizer.to_string(),
            ]
        })
        .collect();
    run.write_csv(
        "sweep_y.csv",
        &["y", "sum_abs_deviation", "sum_abs_deviation_full", "rank_deviation", "minimizer"],
        &table,
    )?;
    run.write_json(
        "sweep_y.json",
        &SweepOut {
            x: cfg.x,
            criterion: "sum_abs_deviation",
            countries: preds.len(),
            minimizer_y: rows[best].y,
            rows: &rows,
        },
    )?;
    Ok(format!("minimizing y = {} over {} countries", rows[best].y, preds.len()))
}

// ------------------------------------------------------------------ rank

fn fetch_options(run: &Run) -> Option<FetchOptions> {
    let cache = run.config.indicator_cache.clone()?;
    Some(FetchOptions {
        cache_path: cache,
        override_path: run.config.indicator_override.clone(),
        base_url: std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.into()),
        timeout: std::time::Duration::from_secs(20),
    })
}

fn snapshot_for(run: &mut Run, codes: &[String]) -> Result<Option<IndicatorSnapshot>, CliError> {
    let Some(opts) = fetch_options(run) else {
        run.warn("no indicator_cache configured; normalized columns left empty");
        return Ok(None);
    };
    if opts.cache_path.exists() {
        run.input("indicator_cache", &opts.cache_path)?;
    }
    if let Some(o) = &opts.override_path {
        run.input("indicator_override", o)?;
    }
    let mode = if run.config.offline { FetchMode::Offline } else { FetchMode::Live };
    let out = fetch_indicators(codes, run.config.indicator_year, mode, &opts)?;
    for w in out.warnings {
        run.warn(w);
    }
    for m in &out.missing {
        run.warn(format!("{m}: no indicators for {}", run.config.indicator_year));
    }
    Ok(Some(out.snapshot))
}

fn ranking_rows(entries: &[RankingEntry], total: f64) -> Vec<Vec<String>> {
    entries
        .iter()
        .map(|e| {
            vec![
                e.rank.to_string(),
                e.country_code.clone(),
                full(e.value),
                fixed(100.0 * e.value / total, 1),
                full(e.value / total),
                fixed(100.0 * e.cumulative_share, 1),
                full(e.cumulative_share),
                opt_fixed(e.per_million, 2),
                opt_full(e.per_million),
                opt_fixed(e.per_billion_gdp, 2),
                opt_full(e.per_billion_gdp),
            ]
        })
        .collect()
}

const RANK_HEADER: [&str; 11] = [
    "rank",
    "country_code",
    "value",
    "share_pct",
    "share_full",
    "cumulative_pct",
    "cumulative_full",
    "per_million",
    "per_million_full",
    "per_billion_gdp",
    "per_billion_gdp_full",
];

#[derive(Serialize)]
struct RankOut {
    metric: Metric,
    threshold: f64,
    global_total: f64,
    ranked: usize,
    indicator_year: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    indicator_source: Option<Source>,
    top10_share: Option<f64>,
}

pub fn rank(run: &mut Run) -> Result<String, CliError> {
    let countries = load_countries(run)?;
    let cfg = run.config.clone();
    let opts = RankOptions {
        threshold: cfg.threshold,
        global_total: cfg.global_total,
        x: cfg.x,
        y: cfg.y,
    };
    let mut entries = rank_countries(&countries, cfg.rank_metric, &opts)?;
    let total = match cfg.global_total {
        Some(t) => t,
        None => entries.iter().map(|e| e.value).sum(),
    };
    let codes: Vec<String> = entries.iter().map(|e| e.country_code.clone()).collect();
    let snapshot = if codes.is_empty() { None } else { snapshot_for(run, &codes)? };
    if let Some(snap) = &snapshot {
        for basis in [Basis::Population, Basis::Gdp] {
            let n = normalize(&entries, snap, basis)?;
            entries = n.entries;
            for w in n.warnings {
                run.warn(w);
            }
        }
    }
    let per_million = rerank(&entries, Basis::Population, total);
    let per_gdp = rerank(&entries, Basis::Gdp, total);
    run.write_csv("rank_raw.csv", &RANK_HEADER, &ranking_rows(&entries, total))?;
    run.write_csv("rank_per_million.csv", &RANK_HEADER, &ranking_rows(&per_million, total))?;
    run.write_csv("rank_per_gdp.csv", &RANK_HEADER, &ranking_rows(&per_gdp, total))?;
    let cumulative: Vec<Vec<String>> = entries
        .iter()
        .map(|e| vec![e.rank.to_string(), e.country_code.clone(), full(e.cumulative_share)])
        .collect();
    run.write_csv("rank_cumulative.csv", &["rank", "country_code", "cumulative_share"], &cumulative)?;
    let top10 = entries.get(9).or(entries.last()).map(|e| e.cumulative_share);
    run.write_json(
        "rank.json",
        &RankOut {
            metric: cfg.rank_metric,
            threshold: cfg.threshold,
            global_total: total,
            ranked: entries.len(),
            indicator_year: cfg.indicator_year,
            indicator_source: snapshot.as_ref().map(|s| s.source),
            top10_share: top10,
        },
    )?;
    let lead = |v: &[RankingEntry], basis: Basis| {
        v.first()
            .map(|e| format!("{} {}", e.country_code, opt_fixed(e.normalized(basis), 2)))
            .unwrap_or_else(|| "-".into())
    };
    Ok(format!(
        "{} countries ranked; top per million: {}; top per billion USD GDP: {}",
        entries.len(),
        lead(&per_million, Basis::Population),
        lead(&per_gdp, Basis::Gdp)
    ))
}

// -------------------------------------------------------------- plotdata

pub fn plotdata(run: &mut Run) -> Result<String, CliError> {
    let cfg = run.config.clone();
    let mut written = Vec::new();

    if cfg.countries.is_none() && cfg.roster_ibb.is_some() {
        let records = read_rosters(run)?;
        let ibb: Vec<ResearcherRecord> = records
            .into_iter()
            .filter(|r| r.list_source == ListSource::Ibb)
            .collect();
        match career_onset_distribution(&ibb) {
            Ok(d) => {
                let rows: Vec<Vec<String>> = d
                    .years
                    .iter()
                    .zip(d.counts.iter().zip(&d.cumulative))
                    .map(|(y, (c, cum))| vec![y.to_string(), c.to_string(), cum.to_string()])
                    .collect();
                run.write_csv("plot_onset.csv", &["first_pub_year", "count", "cumulative"], &rows)?;
                written.push(format!("onset (median {})", d.median_year));
            }
            Err(e) => run.warn(format!("onset histogram skipped: {e}")),
        }
    }

    let countries = load_countries(run)?;
    let ranked = rank_countries(
        &countries,
        Metric::IbbHcr,
        &RankOptions {
            threshold: cfg.threshold,
            global_total: cfg.global_total,
            x: cfg.x,
            y: cfg.y,
        },
    )?;
    if !ranked.is_empty() {
        let rows: Vec<Vec<String>> = ranked
            .iter()
            .map(|e| vec![e.rank.to_string(), e.country_code.clone(), full(e.cumulative_share)])
            .collect();
        run.write_csv("plot_cumulative_share.csv", &["rank", "country_code", "cumulative_share"], &rows)?;
        written.push("cumulative share".into());
    }

    let both: Vec<&CountryRecord> = countries
        .iter()
        .filter(|c| c.wos_hcr.is_some() && c.ibb_hcr.is_some())
        .collect();
    if !both.is_empty() {
        let left: Vec<(String, f64)> = both.iter().map(|c| (c.country_code.clone(), c.wos_hcr.unwrap())).collect();
        let right: Vec<(String, f64)> = both.iter().map(|c| (c.country_code.clone(), c.ibb_hcr.unwrap())).collect();
        run.write_csv(
            "plot_rank_wos_ibb.csv",
            &["country_code", "rank_wos_hcr", "rank_ibb_hcr", "deviation"],
            &scatter_rows(&rank_scatter(&left, &right)?),
        )?;
        written.push("WoS/IBB rank scatter".into());
    }

    let (x, y) = levels(cfg.x, cfg.y)?;
    let preds = predictions(run, &countries);
    if !preds.is_empty() {
        let mut rows = Vec::new();
        for p in &preds {
            let c = predict_wos(p.ibb, &p.model, x, y)?;
            rows.push(vec![p.country_code.clone(), full(c), opt_full(p.reported)]);
        }
        run.write_csv("plot_predicted.csv", &["country_code", "calculated", "reported"], &rows)?;
        written.push("predicted vs reported".into());
    }
    if written.is_empty() {
        return Err(CliError::precondition("no plot series could be derived from the inputs"));
    }
    Ok(format!("wrote {}", written.join(", ")))
}

// ------------------------------------------------------ fetch-indicators

pub fn fetch_indicators_cmd(run: &mut Run, requested: &[String]) -> Result<String, CliError> {
    let codes: Vec<String> = if requested.is_empty() {
        load_countries(run)?.into_iter().map(|c| c.country_code).collect()
    } else {
        requested.iter().map(|c| c.trim().to_ascii_uppercase()).collect()
    };
    if fetch_options(run).is_none() {
        return Err(CliError::io("missing input: set `indicator_cache`"));
    }
    let snap = snapshot_for(run, &codes)?.expect("options checked above");
    let rows: Vec<Vec<String>> = snap
        .countries()
        .into_iter()
        .map(|c| {
            vec![
                c.to_string(),
                snap.year.to_string(),
                opt_full(snap.population.get(c).copied()),
                opt_full(snap.gdp_usd.get(c).copied()),
                snap.sources.get(c).map(|s| format!("{s:?}").to_uppercase()).unwrap_or_default(),
            ]
        })
        .collect();
    run.write_csv(
        "indicators.csv",
        &["country_code", "year", "population", "gdp_usd", "source"],
        &rows,
    )?;
    Ok(format!("{} of {} countries with indicators for {}", rows.len(), codes.len(), snap.year))
}
