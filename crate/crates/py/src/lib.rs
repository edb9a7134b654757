//! Python bindings: extrapolation, correlation, name matching and ranking.

use std::collections::BTreeMap;
use std::path::PathBuf;

use hcr_core::country::{read_country_table, Column};
use hcr_core::extrapolation::{self, EpModel, PercentileLevel};
use hcr_core::ranking;
use hcr_core::registry::{self, MatchOutcome};
use hcr_core::stats::{self, CorrelationResult, Method, PairedSeries};
use hcr_core::Error;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn level(x: f64) -> PyResult<PercentileLevel> {
    PercentileLevel::new(x).map_err(py_err)
}

fn model(ep: f64) -> PyResult<EpModel> {
    EpModel::from_ratio(ep).map_err(py_err)
}

/// Result of a correlation test.
#[pyclass(frozen, get_all, module = "hcr_py")]
pub struct Correlation {
    method: String,
    r: f64,
    n: usize,
    p_two_sided: f64,
    ln_p: f64,
    p_method: String,
    excluded: Vec<String>,
}

#[pymethods]
impl Correlation {
    fn __repr__(&self) -> String {
        format!(
            "Correlation(method={:?}, r={}, n={}, p_two_sided={:e})",
            self.method, self.r, self.n, self.p_two_sided
        )
    }
}

impl From<CorrelationResult> for Correlation {
    fn from(c: CorrelationResult) -> Self {
        Correlation {
            method: match c.method {
                Method::Pearson => "PEARSON".into(),
                Method::Spearman => "SPEARMAN".into(),
            },
            r: c.r,
            n: c.n,
            p_two_sided: c.p_two_sided,
            ln_p: c.ln_p,
            p_method: match c.p_method {
                stats::PValueMethod::TApproximation => "t_approximation".into(),
                stats::PValueMethod::ExactPermutation => "exact_permutation".into(),
            },
            excluded: c.excluded,
        }
    }
}

fn series(xs: Vec<f64>, ys: Vec<f64>, labels: Option<Vec<String>>) -> PyResult<PairedSeries> {
    match labels {
        Some(l) => PairedSeries::new(l, xs, ys),
        None => PairedSeries::from_values(xs, ys),
    }
    .map_err(py_err)
}

#[pyfunction]
fn normalize_name(raw: &str) -> String {
    registry::normalize_name(raw)
}

/// `P_top10% / P` at full precision.
#[pyfunction]
fn ep_from_metrics(p: f64, p_top10: f64) -> PyResult<f64> {
    Ok(extrapolation::ep_from_metrics(p, p_top10).map_err(py_err)?.ep)
}

#[pyfunction]
fn ptop_from_total(p: f64, ep: f64, x: f64) -> PyResult<f64> {
    extrapolation::ptop_from_total(p, &model(ep)?, level(x)?).map_err(py_err)
}

#[pyfunction]
fn ptop_convert(p_top_x: f64, ep: f64, x: f64, y: f64) -> PyResult<f64> {
    extrapolation::ptop_convert(p_top_x, &model(ep)?, level(x)?, level(y)?).map_err(py_err)
}

/// Predicted strict-tier count from a lenient-tier count and the country's
/// `P` and `P_top10%`.
#[pyfunction]
#[pyo3(signature = (ibb_hcr, p, p_top10, x = 5.0, y = 0.05))]
fn predict_wos(ibb_hcr: f64, p: f64, p_top10: f64, x: f64, y: f64) -> PyResult<f64> {
    let m = extrapolation::ep_from_metrics(p, p_top10).map_err(py_err)?;
    extrapolation::predict_wos(ibb_hcr, &m, level(x)?, level(y)?).map_err(py_err)
}

/// Descending average ranks.
#[pyfunction]
fn rank_vector(values: Vec<f64>) -> Vec<f64> {
    stats::rank_vector(&values)
}

#[pyfunction]
#[pyo3(signature = (xs, ys, labels = None, exclude = Vec::new()))]
fn pearson(xs: Vec<f64>, ys: Vec<f64>, labels: Option<Vec<String>>, exclude: Vec<String>) -> PyResult<Correlation> {
    let s = series(xs, ys, labels)?;
    Ok(stats::correlate(&s, Method::Pearson, &exclude).map_err(py_err)?.into())
}

#[pyfunction]
#[pyo3(signature = (xs, ys, labels = None, exclude = Vec::new()))]
fn spearman(xs: Vec<f64>, ys: Vec<f64>, labels: Option<Vec<String>>, exclude: Vec<String>) -> PyResult<Correlation> {
    let s = series(xs, ys, labels)?;
    Ok(stats::correlate(&s, Method::Spearman, &exclude).map_err(py_err)?.into())
}

/// Spearman with a p-value from full enumeration, for n up to 10.
#[pyfunction]
fn spearman_exact(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<Correlation> {
    Ok(stats::spearman_exact(&series(xs, ys, None)?).map_err(py_err)?.into())
}

#[pyfunction]
fn t_sf_two_sided(t: f64, df: u32) -> PyResult<f64> {
    if df == 0 {
        return Err(PyValueError::new_err("df must be positive"));
    }
    Ok(stats::t_sf_two_sided(t, df))
}

/// Reads a country table into a list of dicts; unknown cells are `None`.
#[pyfunction]
fn read_countries(path: PathBuf) -> PyResult<Vec<BTreeMap<String, Option<PyCountryValue>>>> {
    let rows = read_country_table(&path).map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            let mut d = BTreeMap::new();
            d.insert("country_code".to_string(), Some(PyCountryValue::Code(r.country_code.clone())));
            for c in Column::ALL {
                d.insert(c.name().to_string(), r.get(c).map(PyCountryValue::Number));
            }
            d
        })
        .collect())
}

#[derive(IntoPyObject)]
enum PyCountryValue {
    Code(String),
    Number(f64),
}

/// Ranks `(country, value)` pairs descending; returns
/// `(rank, country, value, cumulative_share)` tuples.
#[pyfunction]
#[pyo3(signature = (values, threshold = 30.0, global_total = Some(ranking::IBB_GLOBAL_TOTAL)))]
fn rank_values(
    values: Vec<(String, f64)>,
    threshold: f64,
    global_total: Option<f64>,
) -> PyResult<Vec<(usize, String, f64, f64)>> {
    Ok(ranking::rank_values(&values, threshold, global_total)
        .map_err(py_err)?
        .into_iter()
        .map(|e| (e.rank, e.country_code, e.value, e.cumulative_share))
        .collect())
}

/// Canonical institutions with alias rules.
#[pyclass(frozen, module = "hcr_py")]
pub struct Registry {
    inner: registry::Registry,
}

#[pymethods]
impl Registry {
    #[new]
    #[pyo3(signature = (institutions, aliases = None))]
    fn new(institutions: PathBuf, aliases: Option<PathBuf>) -> PyResult<Self> {
        let inner = registry::Registry::from_csv(&institutions, aliases.as_deref()).map_err(py_err)?;
        Ok(Registry { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.institutions().len()
    }

    /// `(outcome, institution_id, distance, candidates)` for a raw affiliation.
    fn resolve(&self, raw: &str) -> (String, Option<String>, Option<f64>, Vec<String>) {
        let outcome = self.inner.resolve(raw);
        let label = outcome.label();
        match outcome {
            MatchOutcome::Matched {
                institution_id,
                distance,
                ..
            } => (label, Some(institution_id), Some(distance), Vec::new()),
            MatchOutcome::Unmatched => (label, None, None, Vec::new()),
            MatchOutcome::Ambiguous { candidates } => (label, None, None, candidates),
        }
    }
}

#[pymodule]
fn hcr_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("IBB_GLOBAL_TOTAL", ranking::IBB_GLOBAL_TOTAL)?;
    m.add_class::<Correlation>()?;
    m.add_class::<Registry>()?;
    m.add_function(wrap_pyfunction!(normalize_name, m)?)?;
    m.add_function(wrap_pyfunction!(ep_from_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(ptop_from_total, m)?)?;
    m.add_function(wrap_pyfunction!(ptop_convert, m)?)?;
    m.add_function(wrap_pyfunction!(predict_wos, m)?)?;
    m.add_function(wrap_pyfunction!(rank_vector, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(spearman_exact, m)?)?;
    m.add_function(wrap_pyfunction!(t_sf_two_sided, m)?)?;
    m.add_function(wrap_pyfunction!(read_countries, m)?)?;
    m.add_function(wrap_pyfunction!(rank_values, m)?)?;
    Ok(())
}
