//! Population and GDP denominators from the World Bank indicator API.
//!
//! Every live response is validated and written to a CSV cache so that later
//! runs can work offline. An override CSV (same schema) supplies countries the
//! API does not cover and always wins over live or cached values.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ingest::normalize_country_code;

pub const POPULATION: &str = "SP.POP.TOTL";
pub const GDP_CURRENT_USD: &str = "NY.GDP.MKTP.CD";
pub const DEFAULT_BASE_URL: &str = "https://api.worldbank.org/v2";
/// Redirects the API base URL, e.g. to a local stub.
pub const BASE_URL_ENV: &str = "HCR_WORLDBANK_BASE_URL";
pub const CACHE_HEADER: [&str; 4] = ["country_code", "year", "population", "gdp_usd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Source {
    #[serde(rename = "LIVE")]
    Live,
    #[serde(rename = "CACHE")]
    Cache,
    #[serde(rename = "OVERRIDE")]
    Override,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorSnapshot {
    pub year: i32,
    pub population: BTreeMap<String, f64>,
    pub gdp_usd: BTreeMap<String, f64>,
    /// Where the bulk of the snapshot came from.
    pub source: Source,
    /// Per-country provenance.
    pub sources: BTreeMap<String, Source>,
    /// Unix seconds of the live fetch; `None` for cache reads.
    pub fetched_at: Option<u64>,
}

impl IndicatorSnapshot {
    pub fn empty(year: i32, source: Source) -> Self {
        IndicatorSnapshot {
            year,
            population: BTreeMap::new(),
            gdp_usd: BTreeMap::new(),
            source,
            sources: BTreeMap::new(),
            fetched_at: None,
        }
    }

    pub fn countries(&self) -> BTreeSet<&str> {
        self.population
            .keys()
            .chain(self.gdp_usd.keys())
            .map(String::as_str)
            .collect()
    }

    fn insert(&mut self, row: &CacheRow, source: Source) {
        if let Some(p) = row.population {
            self.population.insert(row.country_code.clone(), p);
        }
        if let Some(g) = row.gdp_usd {
            self.gdp_usd.insert(row.country_code.clone(), g);
        }
        self.sources.insert(row.country_code.clone(), source);
    }

    fn rows(&self) -> Vec<CacheRow> {
        self.countries()
            .into_iter()
            .map(|c| CacheRow {
                country_code: c.to_string(),
                year: self.year,
                population: self.population.get(c).copied(),
                gdp_usd: self.gdp_usd.get(c).copied(),
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_rows(&self.rows(), out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheRow {
    pub country_code: String,
    pub year: i32,
    pub population: Option<f64>,
    pub gdp_usd: Option<f64>,
}

fn positive(raw: &str, what: &str, line: u64) -> Result<Option<f64>> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::Invalid(format!("line {line}: {what} is not a number")))?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Invalid(format!("line {line}: {what} must be positive")));
    }
    Ok(Some(v))
}

pub fn parse_rows<R: Read>(input: R) -> Result<Vec<CacheRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header != CACHE_HEADER {
        return Err(Error::Header {
            path: PathBuf::from("<indicator csv>"),
            expected: CACHE_HEADER.join(","),
            found: header.join(","),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let (country_code, _) = normalize_country_code(&rec[0])
            .ok_or_else(|| Error::Invalid(format!("line {line}: invalid country code")))?;
        let year = rec[1]
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("line {line}: year is not an integer")))?;
        rows.push(CacheRow {
            country_code,
            year,
            population: positive(&rec[2], "population", line)?,
            gdp_usd: positive(&rec[3], "gdp_usd", line)?,
        });
    }
    Ok(rows)
}

pub fn read_rows(path: &Path) -> Result<Vec<CacheRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_rows(file).map_err(|e| match e {
        Error::Header {
            expected, found, ..
        } => Error::Header {
            path: path.to_path_buf(),
            expected,
            found,
        },
        other => other,
    })
}

/// Sorted by (year, country) for stable bytes.
pub fn write_rows<W: Write>(rows: &[CacheRow], out: W) -> Result<()> {
    let mut rows = rows.to_vec();
    rows.sort_by(|a, b| (a.year, &a.country_code).cmp(&(b.year, &b.country_code)));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CACHE_HEADER)?;
    let fmt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.country_code.clone(),
            r.year.to_string(),
            fmt(r.population),
            fmt(r.gdp_usd),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<indicator csv>", e))?;
    Ok(())
}

/// Reads a snapshot for `year` from a cache file.
pub fn read_snapshot(path: &Path, year: i32) -> Result<IndicatorSnapshot> {
    let mut snap = IndicatorSnapshot::empty(year, Source::Cache);
    for row in read_rows(path)?.iter().filter(|r| r.year == year) {
        snap.insert(row, Source::Cache);
    }
    Ok(snap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FetchMode {
    Live,
    Offline,
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub cache_path: PathBuf,
    pub override_path: Option<PathBuf>,
    pub base_url: String,
    pub timeout: Duration,
}

impl FetchOptions {
    /// Base URL from [`BASE_URL_ENV`] when set.
    pub fn new(cache_path: impl Into<PathBuf>, override_path: Option<PathBuf>) -> Self {
        FetchOptions {
            cache_path: cache_path.into(),
            override_path,
            base_url: std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.into()),
            timeout: Duration::from_secs(20),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FetchOutcome {
    pub snapshot: IndicatorSnapshot,
    /// Requested countries with neither population nor GDP anywhere.
    pub missing: Vec<String>,
    pub warnings: Vec<String>,
}

pub fn fetch_indicators(
    countries: &[String],
    year: i32,
    mode: FetchMode,
    options: &FetchOptions,
) -> Result<FetchOutcome> {
    let wanted: BTreeSet<String> = countries.iter().cloned().collect();
    let overrides: Vec<CacheRow> = match &options.override_path {
        Some(p) => read_rows(p)?
            .into_iter()
            .filter(|r| r.year == year)
            .collect(),
        None => Vec::new(),
    };
    let overridden: BTreeSet<&str> = overrides.iter().map(|r| r.country_code.as_str()).collect();
    let mut warnings = Vec::new();

    let base = match mode {
        FetchMode::Offline => read_snapshot(&options.cache_path, year)?,
        FetchMode::Live => {
            let remote: Vec<String> = wanted
                .iter()
                .filter(|c| !overridden.contains(c.as_str()))
                .cloned()
                .collect();
            match fetch_live(&remote, year, options) {
                Ok(snap) => {
                    store_in_cache(&snap, &options.cache_path)?;
                    snap
                }
                Err(e) => {
                    warnings.push(format!("live fetch failed ({e}); using cache"));
                    read_snapshot(&options.cache_path, year).map_err(|cache_err| {
                        Error::Http(format!("{e}; cache unavailable: {cache_err}"))
                    })?
                }
            }
        }
    };

    let mut snapshot = IndicatorSnapshot::empty(year, base.source);
    snapshot.fetched_at = base.fetched_at;
    for c in &wanted {
        if let Some(&p) = base.population.get(c) {
            snapshot.population.insert(c.clone(), p);
        }
        if let Some(&g) = base.gdp_usd.get(c) {
            snapshot.gdp_usd.insert(c.clone(), g);
        }
        if let Some(&s) = base.sources.get(c) {
            snapshot.sources.insert(c.clone(), s);
        }
    }
    for row in overrides.iter().filter(|r| wanted.contains(&r.country_code)) {
        snapshot.insert(row, Source::Override);
    }

    let missing = wanted
        .iter()
        .filter(|c| !snapshot.sources.contains_key(*c))
        .cloned()
        .collect();
    Ok(FetchOutcome {
        snapshot,
        missing,
        warnings,
    })
}

fn store_in_cache(snap: &IndicatorSnapshot, path: &Path) -> Result<()> {
    let mut rows: BTreeMap<(i32, String), CacheRow> = BTreeMap::new();
    if path.exists() {
        for r in read_rows(path)? {
            rows.insert((r.year, r.country_code.clone()), r);
        }
    }
    for r in snap.rows() {
        let entry = rows
            .entry((r.year, r.country_code.clone()))
            .or_insert_with(|| r.clone());
        entry.population = r.population.or(entry.population);
        entry.gdp_usd = r.gdp_usd.or(entry.gdp_usd);
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_rows(&rows.into_values().collect::<Vec<_>>(), file)
}

pub fn indicator_url(base: &str, countries: &[String], indicator: &str, year: i32) -> String {
    format!(
        "{}/country/{}/indicator/{}?date={}&format=json&per_page=500",
        base.trim_end_matches('/'),
        countries.join(";"),
        indicator,
        year
    )
}

fn fetch_live(countries: &[String], year: i32, options: &FetchOptions) -> Result<IndicatorSnapshot> {
    let mut snap = IndicatorSnapshot::empty(year, Source::Live);
    snap.fetched_at = Some(
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    );
    if countries.is_empty() {
        return Ok(snap);
    }
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(options.timeout))
        .build()
        .into();
    for indicator in [POPULATION, GDP_CURRENT_USD] {
        let url = indicator_url(&options.base_url, countries, indicator, year);
        let body = agent
            .get(&url)
            .call()
            .map_err(|e| Error::Http(e.to_string()))?
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Http(e.to_string()))?;
        let values = parse_indicator_json(&body, year)?;
        let target = if indicator == POPULATION {
            &mut snap.population
        } else {
            &mut snap.gdp_usd
        };
        for (country, v) in values {
            snap.sources.insert(country.clone(), Source::Live);
            target.insert(country, v);
        }
    }
    Ok(snap)
}

/// Extracts `(iso3, value)` pairs from a World Bank v2 JSON page. Null values
/// are skipped; a wrong year or a nonpositive value is an error.
pub fn parse_indicator_json(body: &str, year: i32) -> Result<Vec<(String, f64)>> {
    let doc: Value =
        serde_json::from_str(body).map_err(|e| Error::Http(format!("malformed JSON: {e}")))?;
    let pages = doc
        .as_array()
        .ok_or_else(|| Error::Http("expected a JSON array".into()))?;
    if let Some(msg) = pages.first().and_then(|m| m.get("message")) {
        return Err(Error::Http(format!("API error: {msg}")));
    }
    let Some(rows) = pages.get(1).and_then(Value::as_array) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for row in rows {
        let Some(value) = row.get("value").and_then(Value::as_f64) else {
            continue;
        };
        let iso3 = row
            .get("countryiso3code")
            .and_then(Value::as_str)
            .filter(|s| !s.is_empty())
            .or_else(|| row.pointer("/country/id").and_then(Value::as_str))
            .ok_or_else(|| Error::Http("row without a country code".into()))?;
        let date = row.get("date").and_then(Value::as_str).unwrap_or("");
        if date != year.to_string() {
            return Err(Error::Http(format!("{iso3}: got year {date}, wanted {year}")));
        }
        if !(value > 0.0) {
            return Err(Error::Http(format!("{iso3}: nonpositive value {value}")));
        }
        out.push((iso3.to_ascii_uppercase(), value));
    }
    Ok(out)
}
