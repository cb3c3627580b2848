//! Normal-form constants of the supercritical pitchfork at `K_c` and the
//! predicted branch `|h| ≈ C √(K - K_c)`.
//!
//! ```text
//! ρ₁ = -1/𝒟′(0)
//! ρ₂ = -[ ½π g″(0) + 2 ∫₀^∞ g′(ω)/ω dω - ∫ R(ω) g(ω) dω ]
//! R(ω) = (4ω⁶ + 13ω⁴ + 25ω² + 10) / ((1+ω²)³ (1+4ω²))
//! C  = K_c⁻² (μ_max ρ₂ ρ₃)^(-1/2)
//! ```
//!
//! The reduced dynamics on the center manifold are
//! `dh/dt = ρ₁/(K_c² μ_max) h (ε² - K_c⁴ μ_max ρ₂ ρ₃ |h|²)` with `ε² = K - K_c`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq_dist::FrequencyDistribution;
use crate::graphon::{EigenShape, SpectrumW};
use crate::quadrature::Quadrature;
use crate::spectral;

/// Default upper end of the validity window, as a multiple of `K_c`.
pub const DEFAULT_WINDOW_FACTOR: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchforkPrediction {
    pub k_c: f64,
    /// Location of the negative-coupling bifurcation `1/(g₀ μ_min)`; the
    /// branch there lives on the heterogeneous mode `k_minus_mode`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_c_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_minus_mode: Option<i64>,
    pub mu_max: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub rho3: f64,
    pub amplitude_coeff: f64,
    pub validity_window: [f64; 2],
}

impl PitchforkPrediction {
    /// Predicted `|h|` at coupling `k`; zero at or below `K_c`.
    pub fn amplitude(&self, k: f64) -> f64 {
        if k <= self.k_c {
            0.0
        } else {
            self.amplitude_coeff * (k - self.k_c).sqrt()
        }
    }

    pub fn in_window(&self, k: f64) -> bool {
        k >= self.validity_window[0] && k <= self.validity_window[1]
    }

    /// Growth rate `ρ₁/(K_c² μ_max)` of the reduced equation.
    pub fn linear_rate(&self) -> f64 {
        self.rho1 / (self.k_c * self.k_c * self.mu_max)
    }

    /// Cubic coefficient `K_c⁴ μ_max ρ₂ ρ₃` of the reduced equation.
    pub fn cubic_coeff(&self) -> f64 {
        self.k_c.powi(4) * self.mu_max * self.rho2 * self.rho3
    }
}

fn quadrature() -> Quadrature {
    Quadrature::new(1e-13, 1e-12)
}

pub fn rho1(dist: &FrequencyDistribution) -> Result<f64> {
    Ok(-1.0 / spectral::d_prime0(dist)?)
}

/// The rational weight in the last term of `ρ₂`.
pub fn rational_weight(w: f64) -> f64 {
    let w2 = w * w;
    let num = ((4.0 * w2 + 13.0) * w2 + 25.0) * w2 + 10.0;
    let a = 1.0 + w2;
    num / (a * a * a * (1.0 + 4.0 * w2))
}

pub fn rho2(dist: &FrequencyDistribution) -> Result<f64> {
    let s = dist.scale();
    let q = quadrature();
    let breaks = [s, 0.5, 1.0, 5.0 * s];
    let deriv_term: f64 = q.integrate_half_line(|w| dist.deriv_over_omega(w), s, &breaks)?;
    let rational_term: f64 = q.integrate_half_line(|w| 2.0 * rational_weight(w) * dist.density(w), s, &breaks)?;
    let limit = 0.5 * PI * dist.density_deriv2(0.0) + 2.0 * deriv_term - rational_term;
    let rho2 = -limit;
    if !(rho2 > 0.0) {
        return Err(Error::AssumptionViolation(format!("ρ₂ = {rho2} is not positive")));
    }
    Ok(rho2)
}

/// The unexpanded `P₁(λ; 0, 0)` for even `g`, with its `π g(0)/λ` pole
/// removed:
///
/// ```text
/// ∫ (g(ω) - g(0))/(λ² + ω²) dω
///   - λ⁻² ∫ (g(λt) - g(0)) (1 - 3t²)/(1 + t²)³ dt
///   - ∫ R(ω) g(ω) dω
/// ```
///
/// The second line is `-∫ g/(λ - iω)³` after `ω = λt`; the `g(0)` part
/// integrates to zero. The odd terms of the original display vanish for
/// even `g`.
pub fn p1_regular_part(dist: &FrequencyDistribution, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain {
            re: lambda,
            reason: "P₁ is evaluated for λ > 0",
        });
    }
    let q = quadrature();
    let s = dist.scale();
    let g0 = dist.density(0.0);
    let l2 = lambda * lambda;
    let first: f64 = q.integrate_half_line(
        |w| 2.0 * (dist.density(w) - g0) / (l2 + w * w),
        s,
        &[lambda, s, 5.0 * s],
    )?;
    let cubic: f64 = q.integrate_half_line(
        |t| {
            let a = 1.0 + t * t;
            2.0 * (dist.density(lambda * t) - g0) * (1.0 - 3.0 * t * t) / (a * a * a)
        },
        1.0,
        &[1.0, s / lambda, 5.0 * s / lambda],
    )?;
    let rational: f64 = q.integrate_half_line(
        |w| 2.0 * rational_weight(w) * dist.density(w),
        s,
        &[s, 0.5, 1.0, 5.0 * s],
    )?;
    Ok(first - cubic / l2 - rational)
}

/// Comparison of the closed-form `ρ₂` with the unexpanded expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rho2CrossCheck {
    pub closed_form: f64,
    pub lambda: f64,
    /// `-P₁(λ)` with the pole removed, at `λ`.
    pub at_lambda: f64,
    /// Richardson extrapolation from `λ` and `2λ`.
    pub extrapolated: f64,
    pub relative_error: f64,
}

pub fn rho2_cross_check(dist: &FrequencyDistribution, lambda: f64) -> Result<Rho2CrossCheck> {
    let closed_form = rho2(dist)?;
    let p1 = -p1_regular_part(dist, lambda)?;
    let p2 = -p1_regular_part(dist, 2.0 * lambda)?;
    let extrapolated = 2.0 * p1 - p2;
    Ok(Rho2CrossCheck {
        closed_form,
        lambda,
        at_lambda: p1,
        extrapolated,
        relative_error: ((extrapolated - closed_form) / closed_form).abs(),
    })
}

pub fn rho3(shape: EigenShape) -> Result<f64> {
    match shape {
        EigenShape::Constant | EigenShape::FourierMode(_) => Ok(1.0),
        EigenShape::Other => Err(Error::Unsupported(
            "ρ₃ is only available for constant or single Fourier-mode eigenfunctions".into(),
        )),
    }
}

pub fn predict(dist: &FrequencyDistribution, spectrum: &SpectrumW) -> Result<PitchforkPrediction> {
    predict_with_window(dist, spectrum, DEFAULT_WINDOW_FACTOR)
}

pub fn predict_with_window(
    dist: &FrequencyDistribution,
    spectrum: &SpectrumW,
    window_factor: f64,
) -> Result<PitchforkPrediction> {
    if !(window_factor > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "validity window factor must exceed 1, got {window_factor}"
        )));
    }
    let crit = spectral::critical_coupling(dist, spectrum)?;
    let rho1 = -1.0 / crit.d_prime0;
    let rho2 = rho2(dist)?;
    let rho3 = rho3(spectrum.max_shape)?;
    let mu = spectrum.mu_max;
    let amplitude_coeff = 1.0 / (crit.k_c * crit.k_c * (mu * rho2 * rho3).sqrt());
    let (k_c_minus, k_minus_mode) = if spectrum.has_negative_branch() {
        (
            Some(spectral::threshold_coupling(dist, spectrum.mu_min)?),
            Some(spectrum.min_mode),
        )
    } else {
        (None, None)
    };
    Ok(PitchforkPrediction {
        k_c: crit.k_c,
        k_c_minus,
        k_minus_mode,
        mu_max: mu,
        rho1,
        rho2,
        rho3,
        amplitude_coeff,
        validity_window: [crit.k_c, window_factor * crit.k_c],
    })
}

/// Integrates the reduced amplitude equation for `|h|` from `|c0|` over
/// `[0, t_end]` with classical RK4 and returns `(t, |h|)` samples.
pub fn center_amplitude_ode(
    prediction: &PitchforkPrediction,
    epsilon: f64,
    c0: f64,
    t_end: f64,
    steps: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(epsilon > 0.0) || c0 == 0.0 || !(t_end > 0.0) || steps == 0 {
        return Err(Error::InvalidParameter(format!(
            "reduced equation needs ε > 0, c0 ≠ 0, T > 0 and steps > 0 (ε = {epsilon}, c0 = {c0}, T = {t_end})"
        )));
    }
    let a = prediction.linear_rate();
    let b = prediction.cubic_coeff();
    let e2 = epsilon * epsilon;
    let f = |h: f64| a * h * (e2 - b * h * h);
    let dt = t_end / steps as f64;
    let mut h = c0.abs();
    let mut out = Vec::with_capacity(steps + 1);
    out.push((0.0, h));
    for i in 1..=steps {
        let k1 = f(h);
        let k2 = f(h + 0.5 * dt * k1);
        let k3 = f(h + 0.5 * dt * k2);
        let k4 = f(h + dt * k3);
        h += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((i as f64 * dt, h));
    }
    Ok(out)
}
