//! Intrinsic-frequency densities and the scalar functionals built on them.
//!
//! Two families ship: the Gaussian and the Cauchy (Lorentzian) density. Both
//! are even, unimodal and real analytic, with Fourier transforms
//!
//! ```text
//! Gaussian σ:  ĝ(η) = exp(-σ²η²/2)
//! Cauchy Δ:    ĝ(η) = exp(-Δ|η|)
//! ```
//!
//! so both admit the decay bound `|ĝ(η)| e^{aη} → 0` for a suitable `a`
//! (any `a` for the Gaussian, `a < Δ` for the Cauchy). The Cauchy family has
//! closed forms for every downstream quantity and doubles as the oracle for
//! the spectral code.

use std::f64::consts::{FRAC_1_PI, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Density family and its width parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistKind {
    Gaussian { sigma: f64 },
    Cauchy { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyDistribution {
    pub kind: DistKind,
    /// Half-width `a` of the strip `Re λ > -a` where the continuation of `D` is used.
    pub decay_exponent: f64,
    /// `Ω` with `∫_{|ω|>Ω} g < 1e-12`.
    pub tail_cutoff: f64,
}

impl FrequencyDistribution {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("gaussian sigma must be positive, got {sigma}")));
        }
        Ok(Self {
            kind: DistKind::Gaussian { sigma },
            decay_exponent: 0.9,
            tail_cutoff: 12.0 * sigma,
        })
    }

    pub fn cauchy(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter(format!("cauchy delta must be positive, got {delta}")));
        }
        // Mass beyond Ω is 1 - (2/π)atan(Ω/Δ); 1e-12 puts Ω near 6.4e11·Δ.
        let tail_cutoff = delta * (0.5 * PI * (1.0 - 1e-12)).tan();
        Ok(Self {
            kind: DistKind::Cauchy { delta },
            decay_exponent: (0.5 * delta).min(0.9),
            tail_cutoff,
        })
    }

    /// Overrides the decay exponent `a`. Only the range `(0, 1)` is checked
    /// here; whether `ĝ` actually decays that fast is reported by
    /// [`check_assumptions`](Self::check_assumptions).
    pub fn with_decay_exponent(mut self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!("decay exponent must lie in (0,1), got {a}")));
        }
        self.decay_exponent = a;
        Ok(self)
    }

    /// σ or Δ: the natural width used to scale quadrature maps and grids.
    pub fn scale(&self) -> f64 {
        match self.kind {
            DistKind::Gaussian { sigma } => sigma,
            DistKind::Cauchy { delta } => delta,
        }
    }

    pub fn density(&self, omega: f64) -> f64 {
        match self.kind {
            DistKind::Gaussian { sigma } => {
                (-0.5 * (omega / sigma).powi(2)).exp() / (sigma * TAU.sqrt())
            }
            DistKind::Cauchy { delta } => delta * FRAC_1_PI / (omega * omega + delta * delta),
        }
    }

    pub fn density_deriv(&self, omega: f64) -> f64 {
        match self.kind {
            DistKind::Gaussian { sigma } => -omega / (sigma * sigma) * self.density(omega),
            DistKind::Cauchy { delta } => {
                let q = omega * omega + delta * delta;
                -2.0 * delta * FRAC_1_PI * omega / (q * q)
            }
        }
    }

    pub fn density_deriv2(&self, omega: f64) -> f64 {
        match self.kind {
            DistKind::Gaussian { sigma } => {
                let s2 = sigma * sigma;
                (omega * omega / s2 - 1.0) / s2 * self.density(omega)
            }
            DistKind::Cauchy { delta } => {
                let q = omega * omega + delta * delta;
                2.0 * delta * FRAC_1_PI * (3.0 * omega * omega - delta * delta) / (q * q * q)
            }
        }
    }

    /// `g⁗(0)`, used for the Taylor expansion of `g′(ω)/ω` near the origin.
    pub fn density_deriv4_at_zero(&self) -> f64 {
        match self.kind {
            DistKind::Gaussian { sigma } => 3.0 * self.density(0.0) / sigma.powi(4),
            DistKind::Cauchy { delta } => 24.0 * FRAC_1_PI / delta.powi(5),
        }
    }

    /// `g′(ω)/ω`, continuously extended through `ω = 0`.
    pub fn deriv_over_omega(&self, omega: f64) -> f64 {
        if omega.abs() < 1e-3 * self.scale() {
            self.density_deriv2(0.0) + self.density_deriv4_at_zero() * omega * omega / 6.0
        } else {
            self.density_deriv(omega) / omega
        }
    }

    /// The analytic extension `g(z)` for complex `z`. The Gaussian is entire;
    /// the Cauchy extension is valid for `|Im z| < Δ`.
    pub fn density_complex(&self, z: Complex64) -> Complex64 {
        match self.kind {
            DistKind::Gaussian { sigma } => {
                (-(z * z) / (2.0 * sigma * sigma)).exp() / (sigma * TAU.sqrt())
            }
            DistKind::Cauchy { delta } => delta * FRAC_1_PI / (z * z + delta * delta),
        }
    }

    /// The analytic extension of `g′`.
    pub fn density_deriv_complex(&self, z: Complex64) -> Complex64 {
        match self.kind {
            DistKind::Gaussian { sigma } => -z / (sigma * sigma) * self.density_complex(z),
            DistKind::Cauchy { delta } => {
                let q = z * z + delta * delta;
                -2.0 * delta * FRAC_1_PI * z / (q * q)
            }
        }
    }

    /// `ĝ(η) = ∫ e^{iηω} g(ω) dω`. Real for even `g`.
    pub fn fourier_hat(&self, eta: f64) -> Complex64 {
        Complex64::new(self.log_fourier_hat_abs(eta).exp(), 0.0)
    }

    /// `ln |ĝ(η)|`, finite even where `ĝ` underflows.
    pub fn log_fourier_hat_abs(&self, eta: f64) -> f64 {
        match self.kind {
            DistKind::Gaussian { sigma } => -0.5 * (sigma * eta).powi(2),
            DistKind::Cauchy { delta } => -delta * eta.abs(),
        }
    }

    /// `n` i.i.d. draws, reproducible for a fixed seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, n)
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::EmptyInput("sample size must be at least 1"));
        }
        let draws = match self.kind {
            DistKind::Gaussian { sigma } => (0..n)
                .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            DistKind::Cauchy { delta } => (0..n)
                .map(|_| {
                    // Inverse CDF on the open interval (0, 1).
                    let u: f64 = rng.random::<f64>();
                    let u = if u == 0.0 { f64::EPSILON } else { u };
                    delta * (PI * (u - 0.5)).tan()
                })
                .collect(),
        };
        Ok(draws)
    }

    /// `∫ φ(ω) g(ω) dω` over the real line for an even-friendly integrand.
    pub(crate) fn expect<F: Fn(f64) -> f64>(&self, phi: F) -> Result<f64> {
        let s = self.scale();
        Quadrature::default().integrate_line(|w| phi(w) * self.density(w), s, &[s, 5.0 * s])
    }

    /// `g₀` by the two equivalent formulas
    /// `π g(0) - ∫ g/(1+s²)` and `∫ (g(0) - g(s))/(1+s²)`.
    pub fn g0_both(&self) -> Result<(f64, f64)> {
        let s = self.scale();
        let q = Quadrature::default();
        let g_at_0 = self.density(0.0);
        let direct = PI * g_at_0 - self.expect(|w| 1.0 / (1.0 + w * w))?;
        let difference = q.integrate_line(
            |w| (g_at_0 - self.density(w)) / (1.0 + w * w),
            s,
            &[s, 1.0, 5.0 * s],
        )?;
        Ok((direct, difference))
    }

    /// `g₀ = π g(0) - ∫ g(s)/(1+s²) ds`, the value of the critical curve at
    /// `y = 0`. Both formulas are evaluated and required to agree to 1e-9.
    pub fn g0(&self) -> Result<f64> {
        let (direct, difference) = self.g0_both()?;
        if (direct - difference).abs() > 1e-9 {
            return Err(Error::AssumptionViolation(format!(
                "g0 formulas disagree: {direct} vs {difference}"
            )));
        }
        if direct <= 0.0 {
            return Err(Error::AssumptionViolation(format!("g0 = {direct} is not positive")));
        }
        Ok(direct)
    }

    pub fn check_assumptions(&self) -> AssumptionReport {
        let s = self.scale();
        let omega_max = self.tail_cutoff.min(50.0 * s);
        let grid: Vec<f64> = (1..=400).map(|i| omega_max * i as f64 / 400.0).collect();

        let even = grid
            .iter()
            .all(|&w| (self.density(w) - self.density(-w)).abs() <= 1e-15 * self.density(0.0));
        let unimodal = grid.iter().all(|&w| self.density_deriv(w) <= 0.0);
        let mass = self.expect(|_| 1.0).unwrap_or(f64::NAN);
        let normalized = (mass - 1.0).abs() < 1e-10;

        // ln(|ĝ(η)| e^{aη}) must be decreasing on the tail and deep below zero.
        let a = self.decay_exponent;
        let eta_max = 2000.0;
        let log_weighted: Vec<f64> = (0..=200)
            .map(|i| {
                let eta = eta_max * i as f64 / 200.0;
                self.log_fourier_hat_abs(eta) + a * eta
            })
            .collect();
        let tail = &log_weighted[150..];
        let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
        let decay = a > 0.0 && a < 1.0 && decreasing && *tail.last().unwrap() < (1e-6f64).ln();

        AssumptionReport {
            even,
            unimodal,
            normalized,
            mass,
            fourier_decay: decay,
        }
    }
}

/// Outcome of [`FrequencyDistribution::check_assumptions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub even: bool,
    pub unimodal: bool,
    pub normalized: bool,
    pub mass: f64,
    pub fourier_decay: bool,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.even && self.unimodal && self.normalized && self.fourier_decay
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss() -> FrequencyDistribution {
        FrequencyDistribution::gaussian(0.3).unwrap()
    }
    fn cauchy(d: f64) -> FrequencyDistribution {
        FrequencyDistribution::cauchy(d).unwrap()
    }

    #[test]
    fn density_values() {
        assert!((cauchy(1.0).density(0.0) - std::f64::consts::FRAC_1_PI).abs() < 1e-10);
        assert!((gauss().density(0.0) - 1.0 / (0.3 * TAU.sqrt())).abs() < 1e-15);
        assert!((cauchy(0.5).density(0.5) - FRAC_1_PI).abs() < 1e-15);
    }

    #[test]
    fn derivatives_at_origin() {
        for d in [gauss(), cauchy(0.5)] {
            assert_eq!(d.density_deriv(0.0), 0.0);
        }
        let c = cauchy(0.7);
        assert!((c.density_deriv2(0.0) + 2.0 / (PI * 0.7f64.powi(3))).abs() < 1e-12);
        let g = gauss();
        assert!((g.density_deriv2(0.0) + g.density(0.0) / 0.09).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-4;
        for d in [gauss(), cauchy(0.5), cauchy(1.3)] {
            let s = d.scale();
            for i in 0..50 {
                let w = -4.0 * s + 8.0 * s * i as f64 / 49.0;
                let fd1 = (d.density(w + h) - d.density(w - h)) / (2.0 * h);
                let fd2 = (d.density_deriv(w + h) - d.density_deriv(w - h)) / (2.0 * h);
                let tol1 = 1e-5 * d.density_deriv(w).abs().max(1e-3 * d.density(0.0) / s);
                let tol2 = 1e-5 * d.density_deriv2(w).abs().max(1e-3 * d.density(0.0) / (s * s));
                assert!((fd1 - d.density_deriv(w)).abs() < tol1, "{:?} g' at {w}", d.kind);
                assert!((fd2 - d.density_deriv2(w)).abs() < tol2, "{:?} g'' at {w}", d.kind);
            }
        }
    }

    #[test]
    fn fourier_hat_values() {
        for d in [gauss(), cauchy(0.5)] {
            assert_eq!(d.fourier_hat(0.0), Complex64::new(1.0, 0.0));
        }
        assert!((cauchy(0.5).fourier_hat(2.0).re - (-1.0f64).exp()).abs() < 1e-15);
        assert!((gauss().fourier_hat(10.0).re - (-4.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn fourier_hat_matches_oscillatory_quadrature() {
        let q = Quadrature {
            max_segments: 100_000,
            ..Quadrature::default()
        };
        for (d, eta) in [(cauchy(0.5), 2.0), (gauss(), 10.0), (gauss(), 3.0)] {
            // Even density: ĝ(η) = 2∫₀^L cos(ηω) g(ω) dω, one segment per half
            // period. For the Cauchy tail the truncation error is ~Δ/(πL²η).
            let length = match d.kind {
                DistKind::Cauchy { .. } => 2e4,
                DistKind::Gaussian { sigma } => 12.0 * sigma,
            };
            let period = PI / eta;
            let count = (length / period).ceil() as usize;
            let points: Vec<f64> = (0..=count).map(|k| k as f64 * period).collect();
            let v: f64 = q
                .integrate_points(|w| 2.0 * (eta * w).cos() * d.density(w), &points)
                .unwrap();
            assert!((v - d.fourier_hat(eta).re).abs() < 1e-8, "{:?}: {v}", d.kind);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = gauss();
        assert_eq!(d.sample(100, 42).unwrap(), d.sample(100, 42).unwrap());
        assert_ne!(d.sample(100, 42).unwrap(), d.sample(100, 43).unwrap());
        assert!(matches!(d.sample(0, 1), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn gaussian_sample_moments() {
        let n = 1_000_000;
        let x = gauss().sample(n, 7).unwrap();
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 5e-4 * 3.0, "mean {mean}");
        assert!((var.sqrt() - 0.3).abs() < 0.003, "std {}", var.sqrt());
    }

    #[test]
    fn cauchy_sample_median() {
        let mut x = cauchy(0.5).sample(1_000_000, 11).unwrap();
        x.sort_by(f64::total_cmp);
        let median = 0.5 * (x[499_999] + x[500_000]);
        assert!(median.abs() < 0.01, "median {median}");
    }

    #[test]
    fn normalization() {
        for d in [gauss(), cauchy(0.5), cauchy(0.05), cauchy(3.0)] {
            let m = d.expect(|_| 1.0).unwrap();
            assert!((m - 1.0).abs() < 1e-10, "{:?}: {m}", d.kind);
        }
    }

    #[test]
    fn g0_cauchy_closed_form() {
        for delta in [0.1, 0.25, 0.5, 1.0, 2.0] {
            let g0 = cauchy(delta).g0().unwrap();
            assert!((g0 - 1.0 / (delta * (1.0 + delta))).abs() < 1e-10, "Δ={delta}: {g0}");
        }
        assert!((cauchy(0.5).g0().unwrap() - 4.0 / 3.0).abs() < 1e-10);
    }

    /// Composite trapezoid on a dense grid; independent of the adaptive code.
    fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
        h * (0.5 * (f(a) + f(b)) + inner)
    }

    #[test]
    fn g0_gaussian_matches_brute_force() {
        let d = gauss();
        let g0 = d.g0().unwrap();
        let brute = PI * d.density(0.0) - trapezoid(|s| d.density(s) / (1.0 + s * s), -4.0, 4.0, 1_000_000);
        assert!((g0 - brute).abs() < 1e-10, "{g0} vs {brute}");
        // High-precision reference (30-digit adaptive quadrature).
        assert!((g0 - 3.250_384_096_427_353_5).abs() < 1e-12);
        let (a, b) = d.g0_both().unwrap();
        assert!((a - b).abs() < 1e-9);
        assert!(g0 < PI * d.density(0.0));
    }

    #[test]
    fn assumption_checks() {
        assert!(gauss().check_assumptions().all_pass());
        let ok = cauchy(0.5).with_decay_exponent(0.4).unwrap().check_assumptions();
        assert!(ok.all_pass(), "{ok:?}");
        let bad = cauchy(0.3).with_decay_exponent(0.5).unwrap().check_assumptions();
        assert!(!bad.fourier_decay);
        assert!(bad.even && bad.unimodal && bad.normalized);
    }

    #[test]
    fn default_decay_exponents() {
        assert_eq!(gauss().decay_exponent, 0.9);
        assert_eq!(cauchy(0.5).decay_exponent, 0.25);
        assert_eq!(cauchy(3.0).decay_exponent, 0.9);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FrequencyDistribution::gaussian(0.0).is_err());
        assert!(FrequencyDistribution::cauchy(-1.0).is_err());
        assert!(gauss().with_decay_exponent(1.0).is_err());
    }

    #[test]
    fn complex_extension_agrees_on_real_axis() {
        for d in [gauss(), cauchy(0.5)] {
            for w in [-1.0, -0.1, 0.0, 0.4, 2.0] {
                let z = Complex64::new(w, 0.0);
                assert!((d.density_complex(z).re - d.density(w)).abs() < 1e-14);
                assert!((d.density_deriv_complex(z).re - d.density_deriv(w)).abs() < 1e-13);
            }
        }
    }
}
