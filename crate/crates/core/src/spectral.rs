//! The dispersion function `D(λ)`, its analytic continuation `𝒟(λ)` into the
//! strip `Re λ > -a`, the critical curve `𝒢(y) = 𝒟(iy)`, and the
//! generalized eigenvalue equation `𝒟(λ) = 1/(Kμ)`.
//!
//! ```text
//! D(λ) = ∫ ( 1/(λ - iω) - 1/(λ + 1 - iω) ) g(ω) dω,          Re λ > 0
//! 𝒟(λ) = lim_{x→0+} D(x + iy),                               λ = iy
//! 𝒟(λ) = ∫ ( ... ) g(ω) dω + 2π g(-iλ),                      -a < Re λ < 0
//! ```
//!
//! Every evaluation reduces to the Cauchy-type transform
//! `T[f](x, y) = ∫ f(ω) / (x + i(y - ω)) dω`. Folding the integrand about
//! `ω = y` with `S(u) = f(y+u) + f(y-u)` and `A(u) = f(y+u) - f(y-u)` gives
//!
//! ```text
//! T[f](x, y) = sgn(x) π f(y) + ∫₀^∞ ( x (S(u) - 2f(y)) + i u A(u) ) / (x² + u²) du
//! ```
//!
//! which has no singularity left as `x → 0` and reproduces the
//! Sokhotski–Plemelj boundary value `π f(y) + i ∫₀^∞ A(u)/u du` at `x = 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freq_dist::FrequencyDistribution;
use crate::graphon::SpectrumW;
use crate::quadrature::Quadrature;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The eigenvalue equation `𝒟(λ) = 1/(Kμ)` for one eigenvalue `μ` of W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenProblem {
    pub dist: FrequencyDistribution,
    pub mu: f64,
    pub coupling: f64,
}

impl EigenProblem {
    pub fn new(dist: FrequencyDistribution, mu: f64, coupling: f64) -> Result<Self> {
        if mu == 0.0 || coupling == 0.0 || !mu.is_finite() || !coupling.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue problem needs finite nonzero K·μ (K = {coupling}, μ = {mu})"
            )));
        }
        Ok(Self { dist, mu, coupling })
    }

    pub fn target(&self) -> f64 {
        1.0 / (self.coupling * self.mu)
    }
}

/// Samples of `𝒢(y) = lim_{x→0+} 𝒟(x + iy)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalCurve {
    pub y: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl CriticalCurve {
    /// Grid indices where `Im 𝒢` changes sign or vanishes.
    pub fn real_axis_crossings(&self, tol: f64) -> Vec<usize> {
        let mut hits = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            if v.im.abs() <= tol {
                hits.push(i);
            } else if i + 1 < self.values.len() {
                let next = self.values[i + 1].im;
                if next.abs() > tol && v.im.signum() != next.signum() {
                    hits.push(i);
                }
            }
        }
        hits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalCoupling {
    pub k_c: f64,
    pub g0: f64,
    pub mu_max: f64,
    /// `𝒟′(0) < 0`.
    pub d_prime0: f64,
    /// `λ′(K_c) = -1/(μ_max K_c² 𝒟′(0)) > 0`.
    pub lambda_slope: f64,
}

fn quadrature() -> Quadrature {
    Quadrature::new(1e-13, 1e-12)
}

/// `T[f](x, y)`; at `x = 0` the limit from `x > 0` is returned.
fn cauchy_transform<F: Fn(f64) -> f64>(f: F, x: f64, y: f64, scale: f64) -> Result<Complex64> {
    let fy = f(y);
    let s0 = 2.0 * fy;
    let x2 = x * x;
    let integrand = |u: f64| {
        let (a, b) = (f(y + u), f(y - u));
        let denom = x2 + u * u;
        Complex64::new(x * (a + b - s0) / denom, u * (a - b) / denom)
    };
    let ay = y.abs();
    let breaks = [x.abs(), ay, ay + scale, ay - scale, ay + 5.0 * scale, scale, 5.0 * scale];
    let tail = quadrature().integrate_half_line(integrand, scale, &breaks)?;
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    Ok(Complex64::new(sign * PI * fy, 0.0) + tail)
}

fn check_strip(dist: &FrequencyDistribution, lambda: Complex64) -> Result<()> {
    let a = dist.decay_exponent;
    if !(lambda.re > -a) || !lambda.is_finite() {
        return Err(Error::OutOfStrip {
            re: lambda.re,
            im: lambda.im,
            a,
        });
    }
    Ok(())
}

/// `∫ (1/(λ-iω) - 1/(λ+1-iω)) g(ω) dω` evaluated directly (no residue).
fn direct_integral(dist: &FrequencyDistribution, lambda: Complex64) -> Result<Complex64> {
    let g = |w: f64| dist.density(w);
    let s = dist.scale();
    Ok(cauchy_transform(g, lambda.re, lambda.im, s)? - cauchy_transform(g, lambda.re + 1.0, lambda.im, s)?)
}

/// `D(λ)` for `Re λ > 0`.
pub fn d_lambda(dist: &FrequencyDistribution, lambda: Complex64) -> Result<Complex64> {
    if !(lambda.re > 0.0) {
        return Err(Error::Domain {
            re: lambda.re,
            reason: "D(λ) is defined for Re λ > 0; use d_continued",
        });
    }
    direct_integral(dist, lambda)
}

/// `𝒟(λ)` on the strip `Re λ > -a`, by the three-branch formula.
pub fn d_continued(dist: &FrequencyDistribution, lambda: Complex64) -> Result<Complex64> {
    check_strip(dist, lambda)?;
    let base = direct_integral(dist, lambda)?;
    if lambda.re < 0.0 {
        Ok(base + 2.0 * PI * dist.density_complex(-I * lambda))
    } else {
        Ok(base)
    }
}

/// `𝒟′(λ) = -i ∫ (1/(λ-is) - 1/(λ+1-is)) g′(s) ds`, continued the same way.
pub fn d_prime(dist: &FrequencyDistribution, lambda: Complex64) -> Result<Complex64> {
    check_strip(dist, lambda)?;
    let gp = |w: f64| dist.density_deriv(w);
    let s = dist.scale();
    let mut t = cauchy_transform(gp, lambda.re, lambda.im, s)? - cauchy_transform(gp, lambda.re + 1.0, lambda.im, s)?;
    if lambda.re < 0.0 {
        t += 2.0 * PI * dist.density_deriv_complex(-I * lambda);
    }
    Ok(-I * t)
}

/// `𝒟′(0) = 2 ∫₀^∞ g′(s) / (s (1+s²)) ds`. Fails unless strictly negative.
pub fn d_prime0(dist: &FrequencyDistribution) -> Result<f64> {
    let s = dist.scale();
    let v: f64 = quadrature().integrate_half_line(
        |u| 2.0 * dist.deriv_over_omega(u) / (1.0 + u * u),
        s,
        &[s, 1.0, 5.0 * s],
    )?;
    if v >= 0.0 {
        return Err(Error::AssumptionViolation(format!("𝒟′(0) = {v} is not negative")));
    }
    Ok(v)
}

/// `𝒢(y)` from the real/imaginary-part formulas
///
/// ```text
/// Re 𝒢(y) = π g(y) - ∫ g(s)/(1+(y-s)²) ds
/// Im 𝒢(y) = ∫ (y-s) g(s)/(1+(y-s)²) ds - pv∫ g(s)/(y-s) ds
/// ```
///
/// with the principal value written as `∫₀^∞ (g(y-u) - g(y+u))/u du`.
pub fn critical_value(dist: &FrequencyDistribution, y: f64) -> Result<Complex64> {
    let q = quadrature();
    let s = dist.scale();
    let g = |w: f64| dist.density(w);
    let ay = y.abs();
    let breaks = [ay, ay + s, ay - s, ay + 5.0 * s, s, 5.0 * s, 1.0];
    let smooth: f64 = q.integrate_half_line(|u| (g(y + u) + g(y - u)) / (1.0 + u * u), s, &breaks)?;
    let odd: f64 = q.integrate_half_line(|u| u * (g(y - u) - g(y + u)) / (1.0 + u * u), s, &breaks)?;
    let pv: f64 = q.integrate_half_line(|u| (g(y - u) - g(y + u)) / u, s, &breaks)?;
    Ok(Complex64::new(PI * g(y) - smooth, odd - pv))
}

pub fn critical_curve(dist: &FrequencyDistribution, y_grid: &[f64]) -> Result<CriticalCurve> {
    use rayon::prelude::*;
    let values = y_grid
        .par_iter()
        .map(|&y| critical_value(dist, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(CriticalCurve {
        y: y_grid.to_vec(),
        values,
    })
}

/// `K = 1/(μ g₀)` for an arbitrary nonzero eigenvalue `μ`; negative `μ`
/// gives the negative-coupling threshold.
pub fn threshold_coupling(dist: &FrequencyDistribution, mu: f64) -> Result<f64> {
    if mu == 0.0 {
        return Err(Error::InvalidParameter("μ must be nonzero".into()));
    }
    Ok(1.0 / (mu * dist.g0()?))
}

pub fn critical_coupling(dist: &FrequencyDistribution, spectrum: &SpectrumW) -> Result<CriticalCoupling> {
    let mu_max = spectrum.mu_max;
    if mu_max <= 0.0 {
        return Err(Error::NoPositiveEigenvalue(mu_max));
    }
    let g0 = dist.g0()?;
    let k_c = 1.0 / (mu_max * g0);
    let d_prime0 = d_prime0(dist)?;
    let lambda_slope = -1.0 / (mu_max * k_c * k_c * d_prime0);
    Ok(CriticalCoupling {
        k_c,
        g0,
        mu_max,
        d_prime0,
        lambda_slope,
    })
}

/// Damped Newton iteration for `𝒟(λ) = 1/(Kμ)`. The step is halved until
/// the residual decreases and the iterate stays inside the strip. A real
/// starting point is kept on the real axis, where `𝒟` is real for even `g`.
pub fn solve_eigenvalue(problem: &EigenProblem, lambda_init: Complex64) -> Result<Complex64> {
    const MAX_ITER: usize = 200;
    const TOL: f64 = 1e-10;
    let dist = &problem.dist;
    let target = problem.target();
    let real_only = lambda_init.im == 0.0;
    let project = |z: Complex64| if real_only { Complex64::new(z.re, 0.0) } else { z };

    let mut lambda = project(lambda_init);
    let mut residual = project(d_continued(dist, lambda)? - target);
    for _ in 0..MAX_ITER {
        if residual.norm() < TOL {
            return Ok(lambda);
        }
        let slope = project(d_prime(dist, lambda)?);
        let step = -residual / slope;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = project(lambda + step * t);
            if trial.re > -dist.decay_exponent {
                let r = project(d_continued(dist, trial)? - target);
                if r.norm() < residual.norm() {
                    lambda = trial;
                    residual = r;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if residual.norm() < TOL {
        return Ok(lambda);
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITER,
        re: lambda.re,
        im: lambda.im,
        residual: residual.norm(),
    })
}

/// `λ(K)` along a sorted list of couplings, each solve warm-started from the
/// previous root. The first guess is the linearization about `K_c`.
pub fn eigenvalue_trajectory(
    dist: &FrequencyDistribution,
    mu: f64,
    couplings: &[f64],
) -> Vec<(f64, Result<Complex64>)> {
    let mut out = Vec::with_capacity(couplings.len());
    let mut guess: Option<Complex64> = None;
    for &k in couplings {
        let result = EigenProblem::new(*dist, mu, k).and_then(|problem| {
            let init = match guess {
                Some(g) => g,
                None => {
                    let k_c = threshold_coupling(dist, mu)?;
                    let slope = -1.0 / (mu * k_c * k_c * d_prime0(dist)?);
                    let lin = (slope * (k - k_c)).max(-0.5 * dist.decay_exponent);
                    Complex64::new(lin, 0.0)
                }
            };
            solve_eigenvalue(&problem, init)
        });
        if let Ok(root) = result {
            guess = Some(root);
        }
        out.push((k, result));
    }
    out
}

/// True when `𝒟(λ) = 1/(Kμ_max)` has no root with positive real part,
/// decided by the winding number of `Kμ_max 𝒟(λ) - 1` along the rectangle
/// `Re λ ∈ [1e-6, 10]`, `|Im λ| ≤ Y`.
pub fn subcritical_check(dist: &FrequencyDistribution, spectrum: &SpectrumW, coupling: f64) -> Result<bool> {
    if !(coupling >= 0.0) {
        return Err(Error::InvalidParameter(format!("coupling must be non-negative, got {coupling}")));
    }
    if coupling == 0.0 {
        return Ok(true);
    }
    let k_mu = coupling * spectrum.mu_max;
    let y_half = contour_height(dist, k_mu)?;
    let winding = winding_number(dist, k_mu, 1e-6, 10.0, y_half)?;
    Ok(winding == 0)
}

/// Smallest `y` on a grid of step `scale/4` with `|𝒢(y)| < 1/(2Kμ)`, doubled.
fn contour_height(dist: &FrequencyDistribution, k_mu: f64) -> Result<f64> {
    let threshold = 0.5 / k_mu;
    let h = 0.25 * dist.scale();
    let mut y = 0.0;
    loop {
        if d_continued(dist, Complex64::new(0.0, y))?.norm() < threshold {
            return Ok((2.0 * y).max(2.0 * dist.scale()));
        }
        y += h;
        if y > 1e6 {
            return Err(Error::AssumptionViolation("critical curve does not decay".into()));
        }
    }
}

fn winding_number(dist: &FrequencyDistribution, k_mu: f64, x0: f64, x1: f64, y_half: f64) -> Result<i64> {
    let f = |z: Complex64| -> Result<Complex64> { Ok(k_mu * d_continued(dist, z)? - 1.0) };
    let corners = [
        Complex64::new(x0, -y_half),
        Complex64::new(x1, -y_half),
        Complex64::new(x1, y_half),
        Complex64::new(x0, y_half),
    ];
    let mut total = 0.0;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        const SAMPLES: usize = 64;
        let mut prev_z = a;
        let mut prev = f(a)?;
        for j in 1..=SAMPLES {
            let z = a + (b - a) * (j as f64 / SAMPLES as f64);
            let v = f(z)?;
            total += arg_increment(&f, prev_z, prev, z, v, 0)?;
            prev_z = z;
            prev = v;
        }
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Change of `arg f` from `za` to `zb`, bisecting until each piece turns by
/// less than π/4.
fn arg_increment<F>(f: &F, za: Complex64, fa: Complex64, zb: Complex64, fb: Complex64, depth: u32) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let d = (fb / fa).arg();
    if d.abs() < PI / 4.0 || depth >= 16 {
        return Ok(d);
    }
    let zm = 0.5 * (za + zb);
    let fm = f(zm)?;
    Ok(arg_increment(f, za, fa, zm, fm, depth + 1)? + arg_increment(f, zm, fm, zb, fb, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cauchy(d: f64) -> FrequencyDistribution {
        FrequencyDistribution::cauchy(d).unwrap()
    }
    fn gauss() -> FrequencyDistribution {
        FrequencyDistribution::gaussian(0.3).unwrap()
    }
    /// Closed form of the continuation for the Cauchy density.
    fn cauchy_d(delta: f64, l: Complex64) -> Complex64 {
        1.0 / (l + delta) - 1.0 / (l + 1.0 + delta)
    }
    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `D(λ) = ∫₀^∞ e^{-λt} (1 - e^{-t}) ĝ(t) dt`, valid wherever the
    /// Laplace integral converges (all λ for the Gaussian).
    fn laplace_route(dist: &FrequencyDistribution, l: Complex64) -> Complex64 {
        Quadrature::new(1e-14, 1e-13)
            .integrate_half_line(
                |t| (-l * t + dist.log_fourier_hat_abs(t)).exp() * (1.0 - (-t).exp()),
                1.0,
                &[1.0, 5.0],
            )
            .unwrap()
    }

    #[test]
    fn cauchy_d_lambda_at_one() {
        let d = d_lambda(&cauchy(0.5), c(1.0, 0.0)).unwrap();
        assert!((d - c(1.0 / 1.5 - 1.0 / 2.5, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn large_lambda_asymptotics() {
        for dist in [gauss(), cauchy(0.5)] {
            let l = 1e3;
            let d = d_lambda(&dist, c(l, 0.0)).unwrap();
            assert!(d.norm() < 1e-4);
            assert!((l * d.re).abs() < 1e-2);
            assert!((l * (l + 1.0) * d.re - 1.0).abs() < 1e-4 * 1e1, "{}", l * (l + 1.0) * d.re);
        }
    }

    #[test]
    fn gaussian_d_lambda_matches_trapezoid() {
        let dist = gauss();
        let l = 0.5;
        // Dense trapezoid over ±12σ with 10⁶ panels.
        let n = 1_000_000;
        let (a, b) = (-3.6, 3.6);
        let h = (b - a) / n as f64;
        let f = |w: f64| (c(l, -w).inv() - c(l + 1.0, -w).inv()) * dist.density(w);
        let mut sum = 0.5 * (f(a) + f(b));
        for i in 1..n {
            sum += f(a + i as f64 * h);
        }
        let brute = sum * h;
        let d = d_lambda(&dist, c(l, 0.0)).unwrap();
        assert!((d - brute).norm() < 1e-8, "{d} vs {brute}");
        assert!((d.re - 0.958_691_079_742_767_7).abs() < 1e-11);
    }

    #[test]
    fn d_lambda_rejects_left_half_plane() {
        assert!(matches!(d_lambda(&gauss(), c(0.0, 1.0)), Err(Error::Domain { .. })));
    }

    #[test]
    fn cauchy_continuation_inside_strip() {
        let dist = cauchy(0.5);
        let l = c(-0.25 + 1e-3, 0.0);
        let l_half = c(-0.5 * 0.5 * 0.9, 0.3);
        for z in [l, l_half, c(-0.1, -2.0)] {
            let v = d_continued(&dist, z).unwrap();
            assert!((v - cauchy_d(0.5, z)).norm() < 1e-8, "{z}: {v}");
        }
        let strip = FrequencyDistribution::cauchy(0.9).unwrap();
        let z = c(-0.44, 0.0);
        assert!((d_continued(&strip, z).unwrap() - cauchy_d(0.9, z)).norm() < 1e-8);
    }

    #[test]
    fn out_of_strip_is_rejected() {
        let dist = cauchy(0.5);
        assert!(matches!(d_continued(&dist, c(-0.25, 0.0)), Err(Error::OutOfStrip { .. })));
        assert!(matches!(d_prime(&dist, c(-0.3, 1.0)), Err(Error::OutOfStrip { .. })));
    }

    #[test]
    fn value_at_origin_is_g0() {
        for dist in [gauss(), cauchy(0.5)] {
            let v = d_continued(&dist, c(0.0, 0.0)).unwrap();
            assert!(v.im.abs() < 1e-14);
            assert!((v.re - dist.g0().unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn continuity_across_imaginary_axis() {
        for dist in [gauss(), cauchy(0.5)] {
            for y in [-1.3, -0.2, 0.0, 0.45, 2.0] {
                let right = d_continued(&dist, c(1e-4, y)).unwrap();
                let left = d_continued(&dist, c(-1e-4, y)).unwrap();
                let on = d_continued(&dist, c(0.0, y)).unwrap();
                let slope = d_prime(&dist, c(0.0, y)).unwrap();
                let fd = (right - left) / 2e-4;
                assert!((fd - slope).norm() < 1e-3 * slope.norm().max(1.0), "y={y}: {fd} vs {slope}");
                // Symmetric offsets cancel the first-order term.
                assert!((0.5 * (right + left) - on).norm() < 1e-5, "y={y}");
            }
        }
    }

    #[test]
    fn gaussian_matches_laplace_route() {
        let dist = gauss();
        for z in [c(0.5, 0.0), c(0.01, 0.7), c(-0.3, -0.4), c(-0.8, 1.5), c(1.7, -2.5), c(0.0, 0.3)] {
            let v = d_continued(&dist, z).unwrap();
            let oracle = laplace_route(&dist, z);
            assert!((v - oracle).norm() < 1e-9, "{z}: {v} vs {oracle}");
        }
    }

    #[test]
    fn schwarz_reflection() {
        for dist in [gauss(), cauchy(0.5)] {
            for z in [c(0.3, 0.8), c(-0.2, 1.1), c(0.0, 0.6), c(1.5, 2.9)] {
                let a = d_continued(&dist, z).unwrap();
                let b = d_continued(&dist, z.conj()).unwrap();
                assert!((a - b.conj()).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn d_prime_matches_closed_form_and_differences() {
        let dist = cauchy(0.5);
        for z in [c(0.7, 0.2), c(-0.1, 1.0), c(0.0, -0.5)] {
            let exact = -1.0 / ((z + 0.5) * (z + 0.5)) + 1.0 / ((z + 1.5) * (z + 1.5));
            assert!((d_prime(&dist, z).unwrap() - exact).norm() < 1e-8, "{z}");
        }
        let d0 = d_prime0(&dist).unwrap();
        assert!((d0 - (-4.0 + 4.0 / 9.0)).abs() < 1e-8);

        let g = gauss();
        let d0 = d_prime0(&g).unwrap();
        let h = 1e-4;
        let fd = (d_continued(&g, c(h, 0.0)).unwrap() - d_continued(&g, c(-h, 0.0)).unwrap()).re / (2.0 * h);
        assert!((d0 - fd).abs() < 1e-5, "{d0} vs {fd}");
        assert!((d0 + 10.303_663_273_603_488).abs() < 1e-10);
        assert!(d_prime(&g, c(0.0, 0.0)).unwrap().im.abs() < 1e-14);
        assert!((d_prime(&g, c(0.0, 0.0)).unwrap().re - d0).abs() < 1e-10);
    }

    #[test]
    fn critical_curve_properties() {
        for dist in [gauss(), cauchy(0.5)] {
            let y_max = (50.0 * dist.scale()).max(40.0);
            let grid: Vec<f64> = (-200..=200).map(|i| y_max * i as f64 / 200.0).collect();
            let curve = critical_curve(&dist, &grid).unwrap();
            let mid = 200;
            assert!(curve.values[mid].im.abs() < 1e-14);
            assert!((curve.values[mid].re - dist.g0().unwrap()).abs() < 1e-10);
            for i in 0..=200 {
                let (a, b) = (curve.values[mid + i], curve.values[mid - i]);
                assert!((a - b.conj()).norm() < 1e-10);
            }
            assert!(curve.values[0].norm() < 1e-3 && curve.values[400].norm() < 1e-3);
            // Im 𝒢 vanishes only at y = 0.
            for (y, v) in curve.y.iter().zip(&curve.values) {
                if *y != 0.0 {
                    assert!(v.im.abs() > 0.0 && v.im.signum() == -y.signum(), "y={y}: {v}");
                }
            }
            assert_eq!(curve.real_axis_crossings(1e-13), vec![mid]);
        }
    }

    #[test]
    fn critical_curve_agrees_with_continuation() {
        let dist = gauss();
        for y in [0.0, 0.1, -0.7, 3.0] {
            let a = critical_value(&dist, y).unwrap();
            let b = d_continued(&dist, c(0.0, y)).unwrap();
            assert!((a - b).norm() < 1e-10, "{y}: {a} vs {b}");
        }
    }

    #[test]
    fn all_to_all_cauchy_critical_coupling() {
        let spec = SpectrumW::constant(1.0).unwrap();
        for delta in [0.25, 0.5, 1.0] {
            let cc = critical_coupling(&cauchy(delta), &spec).unwrap();
            assert!((cc.k_c - delta * (1.0 + delta)).abs() < 1e-10);
            assert!((cc.lambda_slope - 1.0 / (2.0 * delta + 1.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn er_gaussian_critical_coupling() {
        let spec = crate::graphon::Graphon::erdos_renyi(0.5).unwrap().spectrum(512).unwrap();
        let cc = critical_coupling(&gauss(), &spec).unwrap();
        assert!((cc.k_c - 1.0 / (0.5 * 3.250_384_096_427_353_5)).abs() < 1e-10);
        assert!((cc.k_c - 0.615_311_895_661_282_6).abs() < 1e-10);
    }

    #[test]
    fn newton_on_cauchy_quadratic() {
        let dist = cauchy(0.5);
        let at_kc = EigenProblem::new(dist, 1.0, 0.75).unwrap();
        let l = solve_eigenvalue(&at_kc, c(0.05, 0.0)).unwrap();
        assert!(l.norm() < 1e-9);
        let above = EigenProblem::new(dist, 1.0, 1.0).unwrap();
        let l = solve_eigenvalue(&above, c(0.0, 0.0)).unwrap();
        assert!((l.re - (-1.0 + 1.25f64.sqrt())).abs() < 1e-9);
        assert_eq!(l.im, 0.0);
        let residual = d_continued(&dist, l).unwrap() - above.target();
        assert!(residual.norm() < 1e-10);
    }

    #[test]
    fn newton_below_threshold_is_continuous() {
        let dist = cauchy(0.5);
        let exact = |k: f64| -1.0 + (0.25 + k).sqrt();
        let ks: Vec<f64> = (0..11).map(|i| 0.70 + 0.01 * i as f64).collect();
        let traj = eigenvalue_trajectory(&dist, 1.0, &ks);
        let mut last = f64::NEG_INFINITY;
        for (k, root) in traj {
            let root = root.unwrap();
            assert!((root.re - exact(k)).abs() < 1e-9, "K={k}");
            assert!(root.re > last);
            last = root.re;
        }
    }

    #[test]
    fn complex_initial_guess() {
        let dist = cauchy(0.5);
        let p = EigenProblem::new(dist, 1.0, 1.0).unwrap();
        let l = solve_eigenvalue(&p, c(0.1, 0.05)).unwrap();
        assert!((l - c(-1.0 + 1.25f64.sqrt(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn eigen_problem_rejects_zero() {
        assert!(EigenProblem::new(gauss(), 0.0, 1.0).is_err());
        assert!(EigenProblem::new(gauss(), 1.0, 0.0).is_err());
    }

    #[test]
    fn subcritical_winding() {
        let dist = cauchy(0.5);
        let spec = SpectrumW::constant(1.0).unwrap();
        assert!(subcritical_check(&dist, &spec, 0.5).unwrap());
        assert!(!subcritical_check(&dist, &spec, 1.0).unwrap());
        assert!(subcritical_check(&dist, &spec, 0.0).unwrap());
        assert!(subcritical_check(&dist, &spec, -1.0).is_err());
    }
}
