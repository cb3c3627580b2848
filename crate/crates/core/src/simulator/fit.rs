use serde::Serialize;

use super::SweepResult;
use crate::error::{Error, Result};

/// Amplitude range used for the branch fit.
pub const FIT_WINDOW: (f64, f64) = (0.1, 0.4);

/// Points at or above the lower window edge required before fitting.
const MIN_SUPERCRITICAL: usize = 5;
/// Points inside the window required for the line.
const MIN_LINE_POINTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BifurcationFit {
    /// Root of the fitted line `amp² = slope (K - k_hat)`.
    pub k_hat: f64,
    pub slope: f64,
    pub points: usize,
}

/// Least-squares line through `(K, amp²)` over the points whose amplitude
/// lies in `window`, provided at least five points reach the window's lower
/// edge. Negative slopes are allowed for branches that open towards
/// negative coupling.
pub fn fit_branch(k: &[f64], amp: &[f64], window: (f64, f64)) -> Result<BifurcationFit> {
    if k.len() != amp.len() {
        return Err(Error::SizeMismatch {
            expected: k.len(),
            got: amp.len(),
        });
    }
    let supercritical = amp.iter().filter(|a| **a >= window.0).count();
    if supercritical < MIN_SUPERCRITICAL {
        return Err(Error::Fit(format!(
            "{supercritical} points with amplitude at least {}, need {MIN_SUPERCRITICAL}",
            window.0
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = k
        .iter()
        .zip(amp)
        .filter(|(_, a)| **a >= window.0 && **a <= window.1)
        .map(|(k, a)| (*k, a * a))
        .unzip();
    if xs.len() < MIN_LINE_POINTS {
        return Err(Error::Fit(format!(
            "{} points with amplitude in [{}, {}], need {MIN_LINE_POINTS}",
            xs.len(),
            window.0,
            window.1
        )));
    }
    let m = xs.len() as f64;
    let x_bar = xs.iter().sum::<f64>() / m;
    let y_bar = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_bar) * (y - y_bar)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - x_bar).powi(2)).sum();
    if sxx == 0.0 || sxy == 0.0 {
        return Err(Error::Fit("degenerate data: the fitted line is flat".into()));
    }
    let slope = sxy / sxx;
    Ok(BifurcationFit {
        k_hat: x_bar - y_bar / slope,
        slope,
        points: xs.len(),
    })
}

/// Fits the `k = 0` order parameter `mean |r|` of a sweep.
pub fn fit_bifurcation_point(sweep: &SweepResult) -> Result<BifurcationFit> {
    fit_branch(&sweep.couplings(), &sweep.mean_r(), FIT_WINDOW)
}
