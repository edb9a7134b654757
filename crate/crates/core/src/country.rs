//! Country-level tables.
//!
//! [`CountryRecord`] is the loose form used when country totals come straight
//! from a published table, where some columns are unknown. Aggregates built
//! from rosters convert into it losslessly.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::normalize_country_code;
use crate::registry::CountryAggregate;

pub const COUNTRY_COLUMNS: [&str; 8] = [
    "country_code",
    "ibb_hcr",
    "wos_hcr",
    "P",
    "p_top1",
    "p_top5",
    "p_top10",
    "p_top50",
];

/// Extra columns tolerated (and ignored) when reading aggregate output back.
const PASSTHROUGH_COLUMNS: [&str; 2] = ["period", "matched_institutions"];

pub const AGGREGATE_HEADER: [&str; 10] = [
    "country_code",
    "period",
    "ibb_hcr",
    "wos_hcr",
    "P",
    "p_top1",
    "p_top5",
    "p_top10",
    "p_top50",
    "matched_institutions",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Column {
    #[serde(rename = "ibb_hcr")]
    IbbHcr,
    #[serde(rename = "wos_hcr")]
    WosHcr,
    #[serde(rename = "P")]
    P,
    #[serde(rename = "p_top1")]
    PTop1,
    #[serde(rename = "p_top5")]
    PTop5,
    #[serde(rename = "p_top10")]
    PTop10,
    #[serde(rename = "p_top50")]
    PTop50,
}

impl Column {
    pub const ALL: [Column; 7] = [
        Column::IbbHcr,
        Column::WosHcr,
        Column::P,
        Column::PTop1,
        Column::PTop5,
        Column::PTop10,
        Column::PTop50,
    ];

    pub fn name(self) -> &'static str {
        COUNTRY_COLUMNS[self as usize + 1]
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Column {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Column::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Invalid(format!("unknown column `{s}`")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CountryRecord {
    pub country_code: String,
    pub ibb_hcr: Option<f64>,
    pub wos_hcr: Option<f64>,
    #[serde(rename = "P")]
    pub p: Option<f64>,
    pub p_top1: Option<f64>,
    pub p_top5: Option<f64>,
    pub p_top10: Option<f64>,
    pub p_top50: Option<f64>,
}

impl CountryRecord {
    pub fn new(country_code: impl Into<String>) -> Self {
        CountryRecord {
            country_code: country_code.into(),
            ..Default::default()
        }
    }

    pub fn get(&self, column: Column) -> Option<f64> {
        match column {
            Column::IbbHcr => self.ibb_hcr,
            Column::WosHcr => self.wos_hcr,
            Column::P => self.p,
            Column::PTop1 => self.p_top1,
            Column::PTop5 => self.p_top5,
            Column::PTop10 => self.p_top10,
            Column::PTop50 => self.p_top50,
        }
    }

    pub fn set(&mut self, column: Column, value: Option<f64>) {
        let slot = match column {
            Column::IbbHcr => &mut self.ibb_hcr,
            Column::WosHcr => &mut self.wos_hcr,
            Column::P => &mut self.p,
            Column::PTop1 => &mut self.p_top1,
            Column::PTop5 => &mut self.p_top5,
            Column::PTop10 => &mut self.p_top10,
            Column::PTop50 => &mut self.p_top50,
        };
        *slot = value;
    }
}

impl From<&CountryAggregate> for CountryRecord {
    fn from(a: &CountryAggregate) -> Self {
        CountryRecord {
            country_code: a.country_code.clone(),
            ibb_hcr: Some(a.ibb_hcr as f64),
            wos_hcr: Some(a.wos_hcr as f64),
            p: Some(a.p),
            p_top1: Some(a.p_top1),
            p_top5: Some(a.p_top5),
            p_top10: Some(a.p_top10),
            p_top50: Some(a.p_top50),
        }
    }
}

/// Anything that exposes per-country columns.
pub trait CountryValues {
    fn country_code(&self) -> &str;
    fn value(&self, column: Column) -> Option<f64>;
}

impl CountryValues for CountryRecord {
    fn country_code(&self) -> &str {
        &self.country_code
    }

    fn value(&self, column: Column) -> Option<f64> {
        self.get(column)
    }
}

impl CountryValues for CountryAggregate {
    fn country_code(&self) -> &str {
        &self.country_code
    }

    fn value(&self, column: Column) -> Option<f64> {
        Some(match column {
            Column::IbbHcr => self.ibb_hcr as f64,
            Column::WosHcr => self.wos_hcr as f64,
            Column::P => self.p,
            Column::PTop1 => self.p_top1,
            Column::PTop5 => self.p_top5,
            Column::PTop10 => self.p_top10,
            Column::PTop50 => self.p_top50,
        })
    }
}

/// Reads a country table. Columns are matched by header name; only
/// `country_code` is required and empty cells read as absent.
pub fn read_country_table(path: impl AsRef<Path>) -> Result<Vec<CountryRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_country_table(file).map_err(|e| match e {
        Error::Invalid(msg) => Error::Invalid(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_country_table<R: Read>(input: R) -> Result<Vec<CountryRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().trim_start_matches('\u{feff}').to_string())
        .collect();
    let code_idx = header
        .iter()
        .position(|h| h == "country_code")
        .ok_or_else(|| Error::Invalid("country table needs a country_code column".into()))?;
    let mut columns = Vec::new();
    for (i, h) in header.iter().enumerate() {
        if i == code_idx || PASSTHROUGH_COLUMNS.contains(&h.as_str()) {
            continue;
        }
        columns.push((i, h.parse::<Column>()?));
    }

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let (code, _) = normalize_country_code(&rec[code_idx])
            .ok_or_else(|| Error::Invalid(format!("line {line}: invalid country code")))?;
        if !seen.insert(code.clone()) {
            return Err(Error::Invalid(format!("line {line}: duplicate country {code}")));
        }
        let mut row = CountryRecord::new(code);
        for &(i, col) in &columns {
            let cell = rec.get(i).unwrap_or("").trim();
            if cell.is_empty() {
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Invalid(format!("line {line}: {col} is not a number")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Invalid(format!("line {line}: {col} must be nonnegative")));
            }
            row.set(col, Some(v));
        }
        out.push(row);
    }
    Ok(out)
}

pub fn write_country_table<W: Write>(rows: &[CountryRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COUNTRY_COLUMNS)?;
    for r in rows {
        let mut rec = vec![r.country_code.clone()];
        rec.extend(
            Column::ALL
                .iter()
                .map(|&c| r.get(c).map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(rec)?;
    }
    w.flush().map_err(|e| Error::io("<country table>", e))?;
    Ok(())
}

pub fn write_aggregates<W: Write>(rows: &[CountryAggregate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AGGREGATE_HEADER)?;
    for a in rows {
        w.write_record([
            a.country_code.clone(),
            a.period.to_string(),
            a.ibb_hcr.to_string(),
            a.wos_hcr.to_string(),
            a.p.to_string(),
            a.p_top1.to_string(),
            a.p_top5.to_string(),
            a.p_top10.to_string(),
            a.p_top50.to_string(),
            a.matched_institutions.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<aggregates>", e))?;
    Ok(())
}
