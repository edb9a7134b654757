//! Typed readers for the researcher rosters and the institution metrics table.
//!
//! Both inputs are UTF-8 CSV with a mandatory header row. A header that does
//! not match the schema is fatal; a row that violates a record invariant is
//! rejected with its line number and reading continues.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ROSTER_HEADER: [&str; 7] = [
    "researcher_id",
    "full_name",
    "raw_affiliation",
    "country_code",
    "first_pub_year",
    "list_source",
    "list_year",
];

pub const METRICS_HEADER: [&str; 10] = [
    "institution_raw_name",
    "country_code",
    "period",
    "counting_mode",
    "field_label",
    "P",
    "p_top1",
    "p_top5",
    "p_top10",
    "p_top50",
];

pub const DEFAULT_FIELD: &str = "All sciences";
pub const UNKNOWN_COUNTRY: &str = "UNK";
pub const EARLIEST_YEAR: i32 = 1900;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ListSource {
    #[serde(rename = "IBB")]
    Ibb,
    #[serde(rename = "WOS")]
    Wos,
}

impl fmt::Display for ListSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ListSource::Ibb => "IBB",
            ListSource::Wos => "WOS",
        })
    }
}

impl FromStr for ListSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "IBB" => Ok(ListSource::Ibb),
            "WOS" => Ok(ListSource::Wos),
            other => Err(Error::Invalid(format!("unknown list source `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CountingMode {
    #[serde(rename = "FRACTIONAL")]
    Fractional,
    #[serde(rename = "FULL")]
    Full,
}

impl fmt::Display for CountingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountingMode::Fractional => "FRACTIONAL",
            CountingMode::Full => "FULL",
        })
    }
}

impl FromStr for CountingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FRACTIONAL" => Ok(CountingMode::Fractional),
            "FULL" => Ok(CountingMode::Full),
            other => Err(Error::Invalid(format!("unknown counting mode `{other}`"))),
        }
    }
}

/// A 4-year Leiden window such as `2006-2009`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Period {
    start: i32,
}

impl Period {
    pub fn new(start: i32) -> Self {
        Period { start }
    }

    pub fn start(&self) -> i32 {
        self.start
    }

    pub fn end(&self) -> i32 {
        self.start + 3
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end())
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid("period is not a 4-year window".into());
        let (a, b) = s.trim().split_once('-').ok_or_else(bad)?;
        let a: i32 = a.trim().parse().map_err(|_| bad())?;
        let b: i32 = b.trim().parse().map_err(|_| bad())?;
        if b != a + 3 {
            return Err(bad());
        }
        Ok(Period { start: a })
    }
}

impl Serialize for Period {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Period {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResearcherRecord {
    pub researcher_id: String,
    pub full_name: String,
    pub raw_affiliation: String,
    pub country_code: String,
    pub first_pub_year: Option<i32>,
    pub list_source: ListSource,
    pub list_year: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstitutionMetrics {
    pub institution_raw_name: String,
    pub country_code: String,
    pub period: Period,
    pub counting_mode: CountingMode,
    pub field_label: String,
    #[serde(rename = "P")]
    pub p: f64,
    pub p_top1: f64,
    pub p_top5: f64,
    pub p_top10: f64,
    pub p_top50: f64,
}

impl InstitutionMetrics {
    pub fn is_nested(&self) -> bool {
        is_nested([self.p_top1, self.p_top5, self.p_top10, self.p_top50, self.p])
    }
}

/// `0 <= v[0] <= v[1] <= ... <= v[n-1]`
pub(crate) fn is_nested<const N: usize>(values: [f64; N]) -> bool {
    values[0] >= 0.0 && values.windows(2).all(|w| w[0] <= w[1])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineMessage {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_accepted: usize,
    pub rejects: Vec<LineMessage>,
    /// Accepted rows that were normalized on the way in.
    pub notes: Vec<LineMessage>,
}

impl IngestReport {
    fn reject(&mut self, line: u64, message: impl Into<String>) {
        self.rows_read += 1;
        self.rejects.push(LineMessage {
            line,
            message: message.into(),
        });
    }

    fn accept(&mut self) {
        self.rows_read += 1;
        self.rows_accepted += 1;
    }

    pub fn is_balanced(&self) -> bool {
        self.rows_read == self.rows_accepted + self.rejects.len()
    }
}

/// Uppercases and validates an ISO-3166 alpha-3 code. Returns the code and
/// whether case-folding changed it.
pub fn normalize_country_code(raw: &str) -> Option<(String, bool)> {
    let trimmed = raw.trim();
    let upper = trimmed.to_ascii_uppercase();
    if upper.len() == 3 && upper.bytes().all(|b| b.is_ascii_uppercase()) {
        let changed = upper != trimmed;
        Some((upper, changed))
    } else {
        None
    }
}

pub fn is_valid_country_code(code: &str) -> bool {
    code.len() == 3 && code.bytes().all(|b| b.is_ascii_uppercase())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(input)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str], origin: &Path) -> Result<()> {
    let found = rdr.headers()?.clone();
    let found: Vec<&str> = found
        .iter()
        .map(|h| h.trim().trim_start_matches('\u{feff}'))
        .collect();
    if found != expected {
        return Err(Error::Header {
            path: origin.to_path_buf(),
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(())
}

fn parse_amount(raw: &str, column: &str) -> std::result::Result<f64, String> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| format!("{column} is not a number"))?;
    if !v.is_finite() || v < 0.0 {
        return Err(format!("{column} must be a finite nonnegative number"));
    }
    Ok(v)
}

pub fn read_roster(
    path: impl AsRef<Path>,
    source: ListSource,
    list_year: i32,
) -> Result<(Vec<ResearcherRecord>, IngestReport)> {
    let path = path.as_ref();
    parse_roster(open(path)?, path, source, list_year)
}

/// Same as [`read_roster`] over any reader; `origin` is only used in errors.
pub fn parse_roster<R: Read>(
    input: R,
    origin: &Path,
    source: ListSource,
    list_year: i32,
) -> Result<(Vec<ResearcherRecord>, IngestReport)> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &ROSTER_HEADER, origin)?;
    let mut report = IngestReport::default();
    let mut records = Vec::new();

    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        match roster_row(&row, source, list_year) {
            Ok((record, note)) => {
                report.accept();
                if let Some(message) = note {
                    report.notes.push(LineMessage { line, message });
                }
                records.push(record);
            }
            Err(reason) => report.reject(line, reason),
        }
    }
    Ok((records, report))
}

fn roster_row(
    row: &csv::StringRecord,
    source: ListSource,
    list_year: i32,
) -> std::result::Result<(ResearcherRecord, Option<String>), String> {
    if row.len() != ROSTER_HEADER.len() {
        return Err(format!(
            "expected {} fields, found {}",
            ROSTER_HEADER.len(),
            row.len()
        ));
    }
    let row_source: ListSource = row[5].parse().map_err(|e: Error| e.to_string())?;
    if row_source != source {
        return Err(format!("list_source {row_source} does not match {source}"));
    }
    let row_year: i32 = row[6]
        .trim()
        .parse()
        .map_err(|_| "list_year is not an integer".to_string())?;
    if row_year != list_year {
        return Err(format!("list_year {row_year} does not match {list_year}"));
    }
    let (country_code, folded) = normalize_country_code(&row[3])
        .ok_or_else(|| format!("invalid country code `{}`", &row[3]))?;
    let first_pub_year = match row[4].trim() {
        "" => None,
        s => {
            let y: i32 = s
                .parse()
                .map_err(|_| "first_pub_year is not an integer".to_string())?;
            if !(EARLIEST_YEAR..=list_year).contains(&y) {
                return Err("year out of range".into());
            }
            Some(y)
        }
    };
    let note = folded.then(|| format!("country code `{}` uppercased", row[3].trim()));
    Ok((
        ResearcherRecord {
            researcher_id: row[0].to_string(),
            full_name: row[1].to_string(),
            raw_affiliation: row[2].to_string(),
            country_code,
            first_pub_year,
            list_source: source,
            list_year,
        },
        note,
    ))
}

pub fn read_metrics(path: impl AsRef<Path>) -> Result<(Vec<InstitutionMetrics>, IngestReport)> {
    let path = path.as_ref();
    parse_metrics(open(path)?, path)
}

pub fn parse_metrics<R: Read>(
    input: R,
    origin: &Path,
) -> Result<(Vec<InstitutionMetrics>, IngestReport)> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &METRICS_HEADER, origin)?;
    let mut report = IngestReport::default();
    let mut rows = Vec::new();

    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        match metrics_row(&row) {
            Ok((m, note)) => {
                report.accept();
                if let Some(message) = note {
                    report.notes.push(LineMessage { line, message });
                }
                rows.push(m);
            }
            Err(reason) => report.reject(line, reason),
        }
    }
    Ok((rows, report))
}

fn metrics_row(
    row: &csv::StringRecord,
) -> std::result::Result<(InstitutionMetrics, Option<String>), String> {
    if row.len() != METRICS_HEADER.len() {
        return Err(format!(
            "expected {} fields, found {}",
            METRICS_HEADER.len(),
            row.len()
        ));
    }
    let (country_code, folded) = normalize_country_code(&row[1])
        .ok_or_else(|| format!("invalid country code `{}`", &row[1]))?;
    let period: Period = row[2].parse().map_err(|_| "period is not a 4-year window")?;
    let counting_mode: CountingMode = row[3].parse().map_err(|e: Error| e.to_string())?;
    let field_label = match row[4].trim() {
        "" => DEFAULT_FIELD.to_string(),
        s => s.to_string(),
    };
    let m = InstitutionMetrics {
        institution_raw_name: row[0].to_string(),
        country_code,
        period,
        counting_mode,
        field_label,
        p: parse_amount(&row[5], "P")?,
        p_top1: parse_amount(&row[6], "p_top1")?,
        p_top5: parse_amount(&row[7], "p_top5")?,
        p_top10: parse_amount(&row[8], "p_top10")?,
        p_top50: parse_amount(&row[9], "p_top50")?,
    };
    if !m.is_nested() {
        return Err("percentile nesting violated".into());
    }
    let note = folded.then(|| format!("country code `{}` uppercased", row[1].trim()));
    Ok((m, note))
}

/// Writes records in the canonical roster schema.
pub fn write_roster<W: Write>(records: &[ResearcherRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROSTER_HEADER)?;
    for r in records {
        let year = r.first_pub_year.map(|y| y.to_string()).unwrap_or_default();
        w.write_record([
            r.researcher_id.as_str(),
            r.full_name.as_str(),
            r.raw_affiliation.as_str(),
            r.country_code.as_str(),
            year.as_str(),
            &r.list_source.to_string(),
            &r.list_year.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<roster output>", e))?;
    Ok(())
}

pub fn write_metrics<W: Write>(rows: &[InstitutionMetrics], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_HEADER)?;
    for m in rows {
        w.write_record([
            m.institution_raw_name.clone(),
            m.country_code.clone(),
            m.period.to_string(),
            m.counting_mode.to_string(),
            m.field_label.clone(),
            m.p.to_string(),
            m.p_top1.to_string(),
            m.p_top5.to_string(),
            m.p_top10.to_string(),
            m.p_top50.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<metrics output>", e))?;
    Ok(())
}
