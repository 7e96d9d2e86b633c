//! Ordinary least-squares line fits used by the scaling studies.

use crate::error::{Error, Result};

/// `y ≈ intercept + slope · x`, with the root-mean-square residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

/// `y ≈ prefactor · x^exponent` fitted in log-log space; `residual` is the log-space RMS.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub residual: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DegenerateFit("x and y lengths differ".into()));
    }
    if xs.len() < 2 {
        return Err(Error::NotEnoughPoints { needed: 2, got: xs.len() });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite input".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= f64::EPSILON * n * mx.abs().max(1.0) {
        return Err(Error::DegenerateFit("all x values are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(LinearFit { slope, intercept, residual: (ss / n).sqrt() })
}

/// Power law through positive `(x, y)` points.
pub fn power_law_fit(points: &[(f64, f64)], min_points: usize) -> Result<PowerLawFit> {
    if points.len() < min_points {
        return Err(Error::NotEnoughPoints { needed: min_points, got: points.len() });
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::DegenerateFit("power-law fit needs positive values".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(PowerLawFit { exponent: fit.slope, prefactor: fit.intercept.exp(), residual: fit.residual })
}
