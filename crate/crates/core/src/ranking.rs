//! Country rankings, normalization by population and GDP, rank scatters and
//! the career-onset histogram.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::country::{Column, CountryValues};
use crate::error::{Error, Result};
use crate::extrapolation::{ep_from_metrics, predict_wos, PercentileLevel};
use crate::ingest::ResearcherRecord;
use crate::stats::rank_vector;
use crate::worldbank::IndicatorSnapshot;

/// Size of the full lenient-tier roster.
pub const IBB_GLOBAL_TOTAL: f64 = 159_684.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingEntry {
    pub country_code: String,
    pub value: f64,
    pub rank: usize,
    pub per_million: Option<f64>,
    pub per_billion_gdp: Option<f64>,
    pub cumulative_share: f64,
}

impl RankingEntry {
    pub fn normalized(&self, basis: Basis) -> Option<f64> {
        match basis {
            Basis::Population => self.per_million,
            Basis::Gdp => self.per_billion_gdp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "IBB_HCR")]
    IbbHcr,
    #[serde(rename = "WOS_HCR")]
    WosHcr,
    #[serde(rename = "PREDICTED_WOS")]
    PredictedWos,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "IBB_HCR" => Ok(Metric::IbbHcr),
            "WOS_HCR" => Ok(Metric::WosHcr),
            "PREDICTED_WOS" => Ok(Metric::PredictedWos),
            other => Err(Error::Invalid(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    #[serde(rename = "POPULATION")]
    Population,
    #[serde(rename = "GDP")]
    Gdp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOptions {
    pub threshold: f64,
    /// Denominator of the cumulative share; `None` uses the unfiltered sum.
    pub global_total: Option<f64>,
    pub x: f64,
    pub y: f64,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            threshold: 30.0,
            global_total: Some(IBB_GLOBAL_TOTAL),
            x: crate::extrapolation::DEFAULT_IBB_LEVEL,
            y: crate::extrapolation::DEFAULT_WOS_LEVEL,
        }
    }
}

/// The value a country is ranked by; `None` when its inputs are missing.
pub fn metric_value<C: CountryValues>(c: &C, metric: Metric, x: f64, y: f64) -> Result<Option<f64>> {
    Ok(match metric {
        Metric::IbbHcr => c.value(Column::IbbHcr),
        Metric::WosHcr => c.value(Column::WosHcr),
        Metric::PredictedWos => {
            let (Some(ibb), Some(p), Some(p10)) = (
                c.value(Column::IbbHcr),
                c.value(Column::P),
                c.value(Column::PTop10),
            ) else {
                return Ok(None);
            };
            let model = ep_from_metrics(p, p10)?;
            Some(predict_wos(
                ibb,
                &model,
                PercentileLevel::new(x)?,
                PercentileLevel::new(y)?,
            )?)
        }
    })
}

pub fn rank_countries<C: CountryValues>(
    countries: &[C],
    metric: Metric,
    options: &RankOptions,
) -> Result<Vec<RankingEntry>> {
    let mut values = Vec::with_capacity(countries.len());
    for c in countries {
        if let Some(v) = metric_value(c, metric, options.x, options.y)? {
            values.push((c.country_code().to_string(), v));
        }
    }
    rank_values(&values, options.threshold, options.global_total)
}

fn by_value_then_code(a: &(String, f64), b: &(String, f64)) -> std::cmp::Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

/// Ranks `(country, value)` pairs: values below `threshold` are dropped,
/// ranks are dense and descending with ties broken by country code.
pub fn rank_values(
    values: &[(String, f64)],
    threshold: f64,
    global_total: Option<f64>,
) -> Result<Vec<RankingEntry>> {
    let mut sorted = values.to_vec();
    sorted.sort_by(by_value_then_code);
    // Summing in ranked order keeps the kept sum a prefix of the total.
    let total = global_total.unwrap_or_else(|| sorted.iter().map(|v| v.1).sum());
    let kept: Vec<(String, f64)> = sorted.into_iter().filter(|(_, v)| *v >= threshold).collect();
    let kept_sum: f64 = kept.iter().map(|v| v.1).sum();
    if !kept.is_empty() && !(total > 0.0 && kept_sum <= total) {
        return Err(Error::Invalid(format!(
            "global total {total} is smaller than the ranked sum {kept_sum}"
        )));
    }
    Ok(with_shares(kept, total, |_| (None, None)))
}

fn with_shares(
    ordered: Vec<(String, f64)>,
    total: f64,
    normalized: impl Fn(&str) -> (Option<f64>, Option<f64>),
) -> Vec<RankingEntry> {
    let mut running = 0.0;
    ordered
        .into_iter()
        .enumerate()
        .map(|(i, (country_code, value))| {
            running += value;
            let (per_million, per_billion_gdp) = normalized(&country_code);
            RankingEntry {
                country_code,
                value,
                rank: i + 1,
                per_million,
                per_billion_gdp,
                cumulative_share: running / total,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Normalized {
    pub entries: Vec<RankingEntry>,
    pub warnings: Vec<String>,
}

/// Fills `per_million` or `per_billion_gdp`; order, values and ranks are left
/// untouched. Countries absent from the snapshot keep an empty field.
pub fn normalize(
    entries: &[RankingEntry],
    snapshot: &IndicatorSnapshot,
    basis: Basis,
) -> Result<Normalized> {
    let (table, name) = match basis {
        Basis::Population => (&snapshot.population, "population"),
        Basis::Gdp => (&snapshot.gdp_usd, "GDP"),
    };
    let mut warnings = Vec::new();
    let mut out = entries.to_vec();
    for e in &mut out {
        let Some(&denominator) = table.get(&e.country_code) else {
            warnings.push(format!("{}: no {name} for {}", e.country_code, snapshot.year));
            continue;
        };
        if !(denominator > 0.0) {
            return Err(Error::DegenerateIndicator(format!(
                "{} {name} = {denominator}",
                e.country_code
            )));
        }
        match basis {
            Basis::Population => e.per_million = Some(e.value / denominator * 1e6),
            Basis::Gdp => e.per_billion_gdp = Some(e.value / (denominator / 1e9)),
        }
    }
    Ok(Normalized {
        entries: out,
        warnings,
    })
}

/// Re-ranks by the normalized value of `basis`. Entries without that value
/// are dropped; cumulative shares are recomputed in the new order.
pub fn rerank(entries: &[RankingEntry], basis: Basis, global_total: f64) -> Vec<RankingEntry> {
    let mut keyed: Vec<(&RankingEntry, f64)> = entries
        .iter()
        .filter_map(|e| e.normalized(basis).map(|v| (e, v)))
        .collect();
    keyed.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| a.0.country_code.cmp(&b.0.country_code))
    });
    let mut running = 0.0;
    keyed
        .into_iter()
        .enumerate()
        .map(|(i, (e, _))| {
            running += e.value;
            RankingEntry {
                rank: i + 1,
                cumulative_share: running / global_total,
                ..e.clone()
            }
        })
        .collect()
}

/// Keeps countries with at least `min_wos` strict-tier researchers that are
/// not excluded. Countries with an unknown count are dropped unless
/// `min_wos` is zero.
pub fn comparison_filter<C: CountryValues + Clone, S: AsRef<str>>(
    countries: &[C],
    min_wos: u64,
    exclusions: &[S],
) -> Vec<C> {
    let excluded: BTreeSet<&str> = exclusions.iter().map(AsRef::as_ref).collect();
    countries
        .iter()
        .filter(|c| !excluded.contains(c.country_code()))
        .filter(|c| min_wos == 0 || c.value(Column::WosHcr).is_some_and(|w| w >= min_wos as f64))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub country_code: String,
    pub rank_left: f64,
    pub rank_right: f64,
    pub deviation: f64,
}

/// Pairs descending ranks from two indicators over the same countries.
pub fn rank_scatter(left: &[(String, f64)], right: &[(String, f64)]) -> Result<Vec<ScatterRow>> {
    let l: BTreeMap<&str, f64> = left.iter().map(|(c, v)| (c.as_str(), *v)).collect();
    let r: BTreeMap<&str, f64> = right.iter().map(|(c, v)| (c.as_str(), *v)).collect();
    let lk: BTreeSet<&str> = l.keys().copied().collect();
    let rk: BTreeSet<&str> = r.keys().copied().collect();
    if lk != rk || l.len() != left.len() || r.len() != right.len() {
        let diff: Vec<String> = lk.symmetric_difference(&rk).map(|s| s.to_string()).collect();
        return Err(Error::MismatchedCountries(diff));
    }
    let codes: Vec<&str> = lk.into_iter().collect();
    let lr = rank_vector(&codes.iter().map(|c| l[c]).collect::<Vec<_>>());
    let rr = rank_vector(&codes.iter().map(|c| r[c]).collect::<Vec<_>>());
    let mut rows: Vec<ScatterRow> = codes
        .iter()
        .zip(lr.iter().zip(&rr))
        .map(|(c, (&a, &b))| ScatterRow {
            country_code: c.to_string(),
            rank_left: a,
            rank_right: b,
            deviation: a - b,
        })
        .collect();
    rows.sort_by(|a, b| {
        a.rank_left
            .total_cmp(&b.rank_left)
            .then_with(|| a.country_code.cmp(&b.country_code))
    });
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OnsetDistribution {
    pub years: Vec<i32>,
    pub counts: Vec<u64>,
    pub cumulative: Vec<u64>,
    pub median_year: i32,
    /// Records without a first-publication year.
    pub skipped: usize,
}

/// One-year bins over the observed span, zero-count years included.
pub fn career_onset_distribution(records: &[ResearcherRecord]) -> Result<OnsetDistribution> {
    let mut per_year: BTreeMap<i32, u64> = BTreeMap::new();
    let mut skipped = 0;
    for r in records {
        match r.first_pub_year {
            Some(y) => *per_year.entry(y).or_default() += 1,
            None => skipped += 1,
        }
    }
    let (Some(&first), Some(&last)) = (per_year.keys().next(), per_year.keys().next_back()) else {
        return Err(Error::Invalid("no record carries a first-publication year".into()));
    };
    let years: Vec<i32> = (first..=last).collect();
    let counts: Vec<u64> = years
        .iter()
        .map(|y| per_year.get(y).copied().unwrap_or(0))
        .collect();
    let cumulative: Vec<u64> = counts
        .iter()
        .scan(0, |acc, c| {
            *acc += c;
            Some(*acc)
        })
        .collect();
    let total = *cumulative.last().unwrap();
    let median_idx = cumulative
        .iter()
        .position(|&c| 2 * c >= total)
        .expect("final cumulative equals total");
    Ok(OnsetDistribution {
        median_year: years[median_idx],
        years,
        counts,
        cumulative,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ListSource;

    fn pairs(v: &[(&str, f64)]) -> Vec<(String, f64)> {
        v.iter().map(|(c, x)| (c.to_string(), *x)).collect()
    }

    fn rec(year: Option<i32>) -> ResearcherRecord {
        ResearcherRecord {
            researcher_id: "r".into(),
            full_name: "n".into(),
            raw_affiliation: "a".into(),
            country_code: "USA".into(),
            first_pub_year: year,
            list_source: ListSource::Ibb,
            list_year: 2020,
        }
    }

    #[test]
    fn usa_share() {
        let r = rank_values(&pairs(&[("USA", 68016.0), ("GBR", 15001.0)]), 30.0, Some(IBB_GLOBAL_TOTAL))
            .unwrap();
        assert!((r[0].cumulative_share - 0.4259).abs() < 5e-5);
        assert_eq!(r[1].rank, 2);
    }

    #[test]
    fn threshold_and_ties() {
        let r = rank_values(&pairs(&[("SWE", 2546.0), ("CHE", 2546.0), ("ISL", 20.0)]), 30.0, None)
            .unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].country_code, "CHE");
        assert_eq!(r[1].country_code, "SWE");
        let none = rank_values(&pairs(&[("USA", 10.0)]), 30.0, None).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn global_total_must_cover_ranked_sum() {
        assert!(rank_values(&pairs(&[("USA", 10.0)]), 0.0, Some(5.0)).is_err());
    }

    #[test]
    fn zero_population_is_degenerate() {
        let entries = rank_values(&pairs(&[("CHE", 2546.0)]), 0.0, None).unwrap();
        let mut snap = IndicatorSnapshot::empty(2019, crate::worldbank::Source::Cache);
        snap.population.insert("CHE".into(), 0.0);
        assert!(matches!(
            normalize(&entries, &snap, Basis::Population),
            Err(Error::DegenerateIndicator(_))
        ));
        let missing = normalize(&entries, &snap, Basis::Gdp).unwrap();
        assert_eq!(missing.entries[0].per_billion_gdp, None);
        assert_eq!(missing.warnings.len(), 1);
    }

    #[test]
    fn scatter_examples() {
        let same = pairs(&[("A", 3.0), ("B", 2.0), ("C", 1.0)]);
        assert!(rank_scatter(&same, &same).unwrap().iter().all(|r| r.deviation == 0.0));
        let swapped = pairs(&[("A", 2.0), ("B", 3.0), ("C", 1.0)]);
        let rows = rank_scatter(&same, &swapped).unwrap();
        assert_eq!(rows[0].country_code, "A");
        assert_eq!(rows[0].deviation, -1.0);
        assert_eq!(rows[1].deviation, 1.0);
        assert_eq!(rows[2].deviation, 0.0);
        let err = rank_scatter(&same, &pairs(&[("A", 1.0), ("B", 1.0), ("D", 1.0)]));
        match err {
            Err(Error::MismatchedCountries(d)) => assert_eq!(d, vec!["C", "D"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn onset_examples() {
        let d = career_onset_distribution(&[rec(Some(1980)), rec(Some(1980)), rec(Some(1990)), rec(None)])
            .unwrap();
        assert_eq!(d.median_year, 1980);
        assert_eq!(d.counts[0], 2);
        assert_eq!(*d.counts.last().unwrap(), 1);
        assert_eq!(d.counts.iter().sum::<u64>(), 3);
        assert_eq!(d.skipped, 1);

        let uniform: Vec<_> = (1970..1980).map(|y| rec(Some(y))).collect();
        assert_eq!(career_onset_distribution(&uniform).unwrap().median_year, 1974);

        assert!(career_onset_distribution(&[rec(None)]).is_err());
    }
}
