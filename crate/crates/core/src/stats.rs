//! Pearson and Spearman correlation with two-sided p-values.
//!
//! p-values come from the Student t tail, evaluated through the regularized
//! incomplete beta function in log space so that values far below the
//! smallest normal `f64` keep a finite logarithm.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedSeries {
    pub labels: Vec<String>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl PairedSeries {
    pub fn new(labels: Vec<String>, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if labels.len() != xs.len() || xs.len() != ys.len() {
            return Err(Error::Invalid(format!(
                "series lengths differ: {} labels, {} xs, {} ys",
                labels.len(),
                xs.len(),
                ys.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::Invalid(format!("duplicate label {dup}")));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::Invalid("series contains a non-finite value".into()));
        }
        Ok(PairedSeries { labels, xs, ys })
    }

    /// Unlabeled convenience constructor; labels are the indices.
    pub fn from_values(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let labels = (0..xs.len()).map(|i| i.to_string()).collect();
        PairedSeries::new(labels, xs, ys)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Drops the listed labels; returns the reduced series and the labels
    /// that were actually present.
    pub fn excluding<S: AsRef<str>>(&self, labels: &[S]) -> (PairedSeries, Vec<String>) {
        let drop: HashSet<&str> = labels.iter().map(AsRef::as_ref).collect();
        let mut out = PairedSeries {
            labels: Vec::new(),
            xs: Vec::new(),
            ys: Vec::new(),
        };
        let mut excluded = Vec::new();
        for i in 0..self.len() {
            if drop.contains(self.labels[i].as_str()) {
                excluded.push(self.labels[i].clone());
            } else {
                out.labels.push(self.labels[i].clone());
                out.xs.push(self.xs[i]);
                out.ys.push(self.ys[i]);
            }
        }
        (out, excluded)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "PEARSON")]
    Pearson,
    #[serde(rename = "SPEARMAN")]
    Spearman,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PValueMethod {
    #[serde(rename = "t_approximation")]
    TApproximation,
    #[serde(rename = "exact_permutation")]
    ExactPermutation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub method: Method,
    pub r: f64,
    pub n: usize,
    /// Clamped to the smallest positive normal `f64` when it underflows;
    /// `ln_p` carries the true magnitude.
    pub p_two_sided: f64,
    pub ln_p: f64,
    pub p_method: PValueMethod,
    pub excluded: Vec<String>,
}

/// Ranks, 1 for the largest value; ties share the mean of the ranks they span.
pub fn rank_vector(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let mean = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    ranks
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample product-moment coefficient, two-pass.
pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantSeries(
            "one of the series has zero variance".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn finish(method: Method, r: f64, n: usize, ln_p: f64, p_method: PValueMethod) -> CorrelationResult {
    let p = ln_p.exp().clamp(f64::MIN_POSITIVE, 1.0);
    CorrelationResult {
        method,
        r,
        n,
        p_two_sided: p,
        ln_p: ln_p.min(0.0),
        p_method,
        excluded: Vec::new(),
    }
}

/// Two-sided `ln p` for a correlation `r` over `n` pairs via the t test with
/// `n - 2` degrees of freedom.
pub fn ln_p_for_r(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    // t^2 / (df + t^2) reduces to r^2, so the beta argument is 1 - r^2.
    let one_minus = (1.0 - r.abs()) * (1.0 + r.abs());
    ln_beta_reg_pair(df / 2.0, 0.5, one_minus, r * r)
}

fn check_n(series: &PairedSeries) -> Result<()> {
    if series.len() < 3 {
        return Err(Error::TooFewObservations(series.len()));
    }
    Ok(())
}

pub fn pearson(series: &PairedSeries) -> Result<CorrelationResult> {
    check_n(series)?;
    let r = pearson_r(&series.xs, &series.ys)?;
    Ok(finish(
        Method::Pearson,
        r,
        series.len(),
        ln_p_for_r(r, series.len()),
        PValueMethod::TApproximation,
    ))
}

pub fn spearman(series: &PairedSeries) -> Result<CorrelationResult> {
    check_n(series)?;
    let r = pearson_r(&rank_vector(&series.xs), &rank_vector(&series.ys))?;
    Ok(finish(
        Method::Spearman,
        r,
        series.len(),
        ln_p_for_r(r, series.len()),
        PValueMethod::TApproximation,
    ))
}

pub const MAX_EXACT_N: usize = 10;

/// Spearman with the p-value from the full permutation distribution of the
/// y ranks. Limited to `n <= 10`.
pub fn spearman_exact(series: &PairedSeries) -> Result<CorrelationResult> {
    check_n(series)?;
    let n = series.len();
    if n > MAX_EXACT_N {
        return Err(Error::Invalid(format!(
            "exact permutation p-value needs n <= {MAX_EXACT_N}, got {n}"
        )));
    }
    let rx = rank_vector(&series.xs);
    let mut ry = rank_vector(&series.ys);
    let r = pearson_r(&rx, &ry)?;

    // Mean and spread of the ranks are permutation invariant, so |r| orders
    // like |sum(rx * ry) - n * mx * my|.
    let centre = n as f64 * mean(&rx) * mean(&ry);
    let stat = |ry: &[f64]| (rx.iter().zip(ry).map(|(a, b)| a * b).sum::<f64>() - centre).abs();
    let observed = stat(&ry) * (1.0 - 1e-12);

    // Heap's algorithm.
    let mut extreme: u64 = 0;
    let mut total: u64 = 0;
    let mut c = vec![0usize; n];
    let mut visit = |ry: &[f64]| {
        total += 1;
        if stat(ry) >= observed {
            extreme += 1;
        }
    };
    visit(&ry);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                ry.swap(0, i);
            } else {
                ry.swap(c[i], i);
            }
            visit(&ry);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    let p = extreme as f64 / total as f64;
    Ok(finish(
        Method::Spearman,
        r,
        n,
        p.ln(),
        PValueMethod::ExactPermutation,
    ))
}

/// Correlation after removing `exclusions`; the result records what was
/// removed and `n` counts what remained.
pub fn correlate<S: AsRef<str>>(
    series: &PairedSeries,
    method: Method,
    exclusions: &[S],
) -> Result<CorrelationResult> {
    let (kept, excluded) = series.excluding(exclusions);
    let mut result = match method {
        Method::Pearson => pearson(&kept)?,
        Method::Spearman => spearman(&kept)?,
    };
    result.excluded = excluded;
    Ok(result)
}

/// `2 P(T >= |t|)` for Student's t with `df` degrees of freedom.
pub fn t_sf_two_sided(t: f64, df: u32) -> f64 {
    ln_t_sf_two_sided(t, df).exp()
}

/// Natural log of [`t_sf_two_sided`]; finite for any finite `t`.
pub fn ln_t_sf_two_sided(t: f64, df: u32) -> f64 {
    assert!(df >= 1, "df must be positive");
    let df = df as f64;
    let t2 = t * t;
    if t2 > 1e280 {
        // x = df / (df + t^2) ~ df / t^2, 1 - x ~ 1 and the fraction is ~1.
        let a = df / 2.0;
        let ln_x = df.ln() - 2.0 * t.abs().ln();
        return a * ln_x - ln_beta(a, 0.5) - a.ln();
    }
    // x = df / (df + t^2), 1 - x = t^2 / (df + t^2), each computed directly.
    let denom = df + t2;
    ln_beta_reg_pair(df / 2.0, 0.5, df / denom, t2 / denom)
}

/// `ln I_x(a, b)` given both `x` and `1 - x` (passed separately so neither
/// loses precision to cancellation).
fn ln_beta_reg_pair(a: f64, b: f64, x: f64, one_minus_x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if one_minus_x <= 0.0 {
        return 0.0;
    }
    let ln_front = a * x.ln() + b * one_minus_x.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front + beta_cf(a, b, x).ln() - a.ln()
    } else {
        let complement = (ln_front + beta_cf(b, a, one_minus_x).ln() - b.ln()).exp();
        (-complement).ln_1p()
    }
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    ln_beta_reg_pair(a, b, x, 1.0 - x).exp()
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` for `z > 0` (Lanczos, g = 7).
pub fn ln_gamma(z: f64) -> f64 {
    if z < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta, modified Lentz.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 10_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
