//! Percentile-tail algebra driven by the `P_top10% / P` efficiency ratio.
//!
//! For a research system with efficiency `ep`, the number of papers in the
//! world's top `x`% is `P * ep^(2 - lg x)`, and any two percentile counts are
//! related by `P_top y% = P_top x% * ep^(lg x - lg y)`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpModel {
    pub ep: f64,
    pub source_p: f64,
    pub source_p_top10: f64,
}

impl EpModel {
    /// Builds a model from a bare ratio, e.g. when only the ratio is known.
    pub fn from_ratio(ep: f64) -> Result<Self> {
        let m = EpModel {
            ep,
            source_p: 1.0,
            source_p_top10: ep,
        };
        m.check()?;
        Ok(m)
    }

    /// `ep` equal to 0 or 1 cannot describe a tail.
    pub fn is_boundary(&self) -> bool {
        self.ep <= 0.0 || self.ep >= 1.0
    }

    pub fn warning(&self) -> Option<String> {
        self.is_boundary().then(|| {
            format!(
                "ep = {} is on the boundary of (0, 1); tail model is degenerate",
                self.ep
            )
        })
    }

    fn check(&self) -> Result<()> {
        if !(self.ep > 0.0 && self.ep < 1.0) {
            return Err(Error::Degenerate(format!("ep = {} is outside (0, 1)", self.ep)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct PercentileLevel(f64);

impl PercentileLevel {
    pub fn new(x: f64) -> Result<Self> {
        if x > 0.0 && x <= 100.0 {
            Ok(PercentileLevel(x))
        } else {
            Err(Error::Invalid(format!("percentile level {x} outside (0, 100]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `ep` from raw totals at full precision. A ratio of exactly 0 or 1 is
/// returned (see [`EpModel::warning`]) but rejected by the conversions.
pub fn ep_from_metrics(p: f64, p_top10: f64) -> Result<EpModel> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Degenerate(format!("P = {p}")));
    }
    if !(p_top10 >= 0.0) {
        return Err(Error::Invalid(format!("p_top10 = {p_top10}")));
    }
    if p_top10 > p {
        return Err(Error::Nesting(format!("p_top10 = {p_top10} > P = {p}")));
    }
    Ok(EpModel {
        ep: p_top10 / p,
        source_p: p,
        source_p_top10: p_top10,
    })
}

/// `lg(from / to)`. When the quotient rounds to a power of ten, `log10` is
/// exact and the integer exponent goes through `powi`.
fn level_exponent(from: f64, to: f64) -> f64 {
    (from / to).log10()
}

fn scale(model: &EpModel, exponent: f64) -> f64 {
    if exponent == exponent.trunc() && exponent.abs() <= i32::MAX as f64 {
        model.ep.powi(exponent as i32)
    } else {
        model.ep.powf(exponent)
    }
}

/// `P * ep^(2 - lg x)`
pub fn ptop_from_total(p: f64, model: &EpModel, level: PercentileLevel) -> Result<f64> {
    model.check()?;
    Ok(p * scale(model, level_exponent(100.0, level.value())))
}

/// `P_top x% * ep^(lg x - lg y)`
pub fn ptop_convert(
    p_top_x: f64,
    model: &EpModel,
    from: PercentileLevel,
    to: PercentileLevel,
) -> Result<f64> {
    model.check()?;
    Ok(p_top_x * scale(model, level_exponent(from.value(), to.value())))
}

pub const DEFAULT_IBB_LEVEL: f64 = 5.0;
pub const DEFAULT_WOS_LEVEL: f64 = 0.05;

/// Strict-tier head count from a lenient-tier one: the lenient roster plays
/// the role of `P_top x%`, the strict roster that of `P_top y%`.
pub fn predict_wos(
    ibb_hcr: f64,
    model: &EpModel,
    x: PercentileLevel,
    y: PercentileLevel,
) -> Result<f64> {
    ptop_convert(ibb_hcr, model, x, y)
}

/// Round half away from zero, for display.
pub fn round_display(v: f64) -> i64 {
    v.round() as i64
}
