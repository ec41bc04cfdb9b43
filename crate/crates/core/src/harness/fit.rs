//! Power-law fits of `f_q` against system size.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitForm {
    /// `y = A L^κ`, least squares in log-log space.
    Pure,
    /// `y = a + b L^{1−2Δ}`.
    Offset,
}

impl FromStr for FitForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(FitForm::Pure),
            "offset" => Ok(FitForm::Offset),
            _ => Err(Error::Config(format!("unknown fit form '{s}'"))),
        }
    }
}

impl fmt::Display for FitForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitForm::Pure => "pure",
            FitForm::Offset => "offset",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub form: FitForm,
    /// κ for the pure form, `1 − 2Δ` for the offset form.
    pub exponent: f64,
    /// `A` (pure) or `b` (offset).
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Log-space residuals for the pure form, linear ones for the offset form.
    pub residuals: Vec<f64>,
    pub rss: f64,
}

fn distinct_sizes(points: &[(f64, f64)]) -> usize {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.len()
}

/// Ordinary least squares `y = c0 + c1 x`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

pub fn power_law_fit(points: &[(f64, f64)], form: FitForm) -> Result<ScalingFit> {
    if points.iter().any(|&(l, y)| !(l.is_finite() && y.is_finite() && l > 0.0)) {
        return Err(Error::Analysis("sizes must be positive and values finite".into()));
    }
    match form {
        FitForm::Pure => pure_fit(points),
        FitForm::Offset => offset_fit(points),
    }
}

fn pure_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if distinct_sizes(points) < 4 {
        return Err(Error::Analysis("pure power fit needs at least 4 sizes".into()));
    }
    let (lo, hi) = points.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    if hi / lo < 10.0 {
        return Err(Error::Analysis(format!("sizes span {lo}..{hi}, less than a decade")));
    }
    if points.iter().any(|p| p.1 <= 0.0) {
        return Err(Error::Analysis("pure power fit needs positive values".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (c0, c1) = linear_fit(&xs, &ys).ok_or_else(|| Error::Analysis("degenerate size spread".into()))?;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (c0 + c1 * x)).collect();
    let rss = residuals.iter().map(|r| r * r).sum();
    Ok(ScalingFit { form: FitForm::Pure, exponent: c1, amplitude: c0.exp(), offset: None, delta: None, residuals, rss })
}

/// For a fixed exponent the model is linear in `(a, b)`; the exponent is
/// found by a coarse scan followed by golden-section search.
fn offset_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if distinct_sizes(points) < 4 {
        return Err(Error::Analysis("offset power fit needs at least 4 sizes".into()));
    }
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let solve = |c: f64| -> Option<(f64, f64, f64)> {
        let xs: Vec<f64> = points.iter().map(|p| p.0.powf(c)).collect();
        let (a, b) = linear_fit(&xs, &ys)?;
        let rss = xs.iter().zip(&ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
        Some((a, b, rss))
    };
    let rss_at = |c: f64| solve(c).map_or(f64::INFINITY, |s| s.2);
    let (lo, hi) = (-3.0, 3.0);
    let steps = 600;
    let mut best = (0usize, f64::INFINITY);
    for k in 0..=steps {
        let c = lo + (hi - lo) * k as f64 / steps as f64;
        let r = rss_at(c);
        // skip c = 0, where the model is degenerate
        if c.abs() > 1e-9 && r < best.1 {
            best = (k, r);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::Analysis("offset power fit is degenerate".into()));
    }
    let h = (hi - lo) / steps as f64;
    let centre = lo + h * best.0 as f64;
    let (mut a, mut b) = (centre - h, centre + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c1 = b - g * (b - a);
        let c2 = a + g * (b - a);
        if rss_at(c1) < rss_at(c2) {
            b = c2;
        } else {
            a = c1;
        }
    }
    let mut c = 0.5 * (a + b);
    if rss_at(c) > best.1 {
        c = centre;
    }
    let (off, amp, rss) = solve(c).ok_or_else(|| Error::Analysis("offset power fit is degenerate".into()))?;
    let residuals = points.iter().map(|p| p.1 - off - amp * p.0.powf(c)).collect();
    Ok(ScalingFit {
        form: FitForm::Offset,
        exponent: c,
        amplitude: amp,
        offset: Some(off),
        delta: Some((1.0 - c) / 2.0),
        residuals,
        rss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = [8.0, 16.0, 32.0, 64.0, 128.0].iter().map(|&l: &f64| (l, 3.0 * l.powf(0.5))).collect();
        let fit = power_law_fit(&pts, FitForm::Pure).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-6);
        assert!((fit.amplitude - 3.0).abs() < 1e-6);
        assert!(fit.rss < 1e-20);
    }

    #[test]
    fn offset_form_gives_delta() {
        let pts: Vec<_> = [8.0, 16.0, 32.0, 64.0, 128.0, 256.0].iter().map(|&l: &f64| (l, 1.5 + 0.8 * l.powf(0.4))).collect();
        let fit = power_law_fit(&pts, FitForm::Offset).unwrap();
        assert!((fit.exponent - 0.4).abs() < 1e-5, "{fit:?}");
        assert!((fit.offset.unwrap() - 1.5).abs() < 1e-3);
        assert!((fit.delta.unwrap() - 0.3).abs() < 1e-5);
        assert!((1.0 - 2.0 * fit.delta.unwrap() - fit.exponent).abs() < 1e-12);
    }

    #[test]
    fn rejects_narrow_or_sparse_data() {
        let narrow: Vec<_> = [10.0, 12.0, 14.0, 16.0].iter().map(|&l| (l, l)).collect();
        assert!(matches!(power_law_fit(&narrow, FitForm::Pure), Err(Error::Analysis(_))));
        let few: Vec<_> = [1.0, 10.0, 100.0].iter().map(|&l| (l, l)).collect();
        assert!(matches!(power_law_fit(&few, FitForm::Pure), Err(Error::Analysis(_))));
        let flat: Vec<_> = [1.0, 10.0, 100.0, 1000.0].iter().map(|&l| (l, -1.0)).collect();
        assert!(power_law_fit(&flat, FitForm::Pure).is_err());
    }
}
