//! Oracle and property checks runnable outside the test harness.

use num_complex::Complex64;
use serde::Serialize;

use crate::freq_dist::FrequencyDistribution;
use crate::graphon::Graphon;
use crate::simulator::{self, initial_state, integrate, OscillatorState, SimConfig, SweepMode};
use crate::spectral;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, check: impl FnOnce() -> crate::Result<(bool, String)>) -> CheckOutcome {
    match check() {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn families() -> [FrequencyDistribution; 2] {
    [
        FrequencyDistribution::gaussian(0.3).expect("valid σ"),
        FrequencyDistribution::cauchy(0.5).expect("valid Δ"),
    ]
}

pub fn normalization() -> CheckOutcome {
    outcome("quadrature normalization (1e-10)", || {
        let mut worst: f64 = 0.0;
        for d in families() {
            worst = worst.max((d.check_assumptions().mass - 1.0).abs());
        }
        Ok((worst < 1e-10, format!("max |∫g - 1| = {worst:.2e}")))
    })
}

pub fn g0_agreement() -> CheckOutcome {
    outcome("two-formula g₀ agreement (1e-9)", || {
        let mut worst: f64 = 0.0;
        for d in families() {
            let (a, b) = d.g0_both()?;
            worst = worst.max((a - b).abs());
        }
        Ok((worst < 1e-9, format!("max difference = {worst:.2e}")))
    })
}

pub fn schwarz_symmetry() -> CheckOutcome {
    outcome("𝒟 Schwarz symmetry (1e-8)", || {
        let mut worst: f64 = 0.0;
        for d in families() {
            let a = d.decay_exponent;
            for i in 0..8 {
                for j in 1..6 {
                    let z = Complex64::new(-0.9 * a + 0.4 * i as f64, 0.45 * j as f64);
                    let v = spectral::d_continued(&d, z)?;
                    let w = spectral::d_continued(&d, z.conj())?;
                    worst = worst.max((v - w.conj()).norm());
                }
            }
        }
        Ok((worst < 1e-8, format!("max |𝒟(λ̄) - conj 𝒟(λ)| = {worst:.2e}")))
    })
}

pub fn cauchy_closed_form() -> CheckOutcome {
    outcome("Cauchy closed form of 𝒟 (1e-8)", || {
        let delta = 0.5;
        let d = FrequencyDistribution::cauchy(delta)?;
        let mut worst: f64 = 0.0;
        for i in 0..7 {
            for j in -3..=3 {
                let z = Complex64::new(-0.24 + 0.2 * i as f64, 0.7 * j as f64);
                let exact = 1.0 / (z + delta) - 1.0 / (z + 1.0 + delta);
                worst = worst.max((spectral::d_continued(&d, z)? - exact).norm());
            }
        }
        Ok((worst < 1e-8, format!("max error = {worst:.2e}")))
    })
}

/// Checks that `Im 𝒢` vanishes only at `y = 0` on a symmetric grid and that
/// `|𝒢|` has decayed below `1e-3` at the ends.
pub fn critical_curve_shape() -> CheckOutcome {
    outcome("critical curve: unique crossing and decay", || {
        let mut ok = true;
        let mut notes = Vec::new();
        for d in families() {
            let y_max = (50.0 * d.scale()).max(40.0);
            let grid: Vec<f64> = (-100..=100).map(|i| y_max * i as f64 / 100.0).collect();
            let curve = spectral::critical_curve(&d, &grid)?;
            let crossings = curve.real_axis_crossings(1e-12);
            let end = curve.values[0].norm().max(curve.values[200].norm());
            let unique = crossings == vec![100];
            let at_g0 = (curve.values[100].re - d.g0()?).abs() < 1e-10;
            ok &= unique && at_g0 && end < 1e-3;
            notes.push(format!("crossings {crossings:?}, |𝒢(±{y_max})| = {end:.1e}"));
        }
        Ok((ok, notes.join("; ")))
    })
}

/// Ratio of RK4 global errors at `h` and `h/2`, both measured against a
/// `h/64` reference, on a ten-oscillator ER network.
pub fn rk4_order_ratio() -> crate::Result<f64> {
    let g = Graphon::erdos_renyi(0.6)?.sample_graph(10, 11)?;
    let dist = FrequencyDistribution::gaussian(0.5)?;
    let init = initial_state(&dist, &g.grid, 0, 0.3, 5)?;
    let run = |dt: f64| -> crate::Result<OscillatorState> {
        let mut s = init.clone();
        let steps = (4.0 / dt).round() as usize;
        integrate(&g, 2.0, dt, steps, &mut s, |_, _| {})?;
        Ok(s)
    };
    let reference = run(0.2 / 64.0)?;
    let err = |s: &OscillatorState| {
        s.theta
            .iter()
            .zip(&reference.theta)
            .chain(s.psi.iter().zip(&reference.psi))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    Ok(err(&run(0.2)?) / err(&run(0.1)?))
}

pub fn rk4_order() -> CheckOutcome {
    outcome("RK4 order ratio in [14, 18]", || {
        let ratio = rk4_order_ratio()?;
        Ok(((14.0..=18.0).contains(&ratio), format!("ratio = {ratio:.3}")))
    })
}

fn small_config() -> SimConfig {
    SimConfig {
        n: 120,
        coupling: 0.0,
        dt: 0.05,
        t_transient: 20.0,
        t_average: 50.0,
        seed: 3,
        ..SimConfig::default()
    }
}

pub fn determinism() -> CheckOutcome {
    outcome("determinism (identical bytes)", || {
        let d = FrequencyDistribution::gaussian(0.3)?;
        let w = Graphon::erdos_renyi(0.5)?;
        let grid = [0.3, 0.7, 1.2];
        let a = simulator::sweep(&d, &w, &grid, &small_config(), 2, SweepMode::Continuation)?.to_csv();
        let b = simulator::sweep(&d, &w, &grid, &small_config(), 2, SweepMode::Continuation)?.to_csv();
        Ok((a.as_bytes() == b.as_bytes(), format!("{} bytes", a.len())))
    })
}

pub fn omega_conservation() -> CheckOutcome {
    outcome("ω conservation (bit-exact)", || {
        let d = FrequencyDistribution::cauchy(0.5)?;
        let cfg = SimConfig {
            coupling: 2.0,
            ..small_config()
        };
        let g = Graphon::small_world(0.1, 0.3)?.sample_graph(cfg.n, 9)?;
        let mut s = initial_state(&d, &g.grid, 0, 0.01, 4)?;
        let before: Vec<u64> = s.omega.iter().map(|w| w.to_bits()).collect();
        simulator::run_from(&cfg, &g, &mut s)?;
        let same = s.omega.iter().map(|w| w.to_bits()).eq(before.iter().copied());
        Ok((same, format!("{} frequencies", before.len())))
    })
}

/// Decoupled oscillators keep `|r|` at the `3/√n` finite-size floor.
pub fn finite_size_floor() -> CheckOutcome {
    outcome("finite-size floor at K = 0 (3/√n)", || {
        let d = FrequencyDistribution::gaussian(0.3)?;
        let cfg = SimConfig { n: 400, ..small_config() };
        let g = Graphon::erdos_renyi(0.5)?.sample_graph(cfg.n, 2)?;
        let stats = simulator::run_steady(&cfg, &g, &d)?;
        let floor = 3.0 / (cfg.n as f64).sqrt();
        Ok((stats.mean_r < floor, format!("mean |r| = {:.4}, floor {floor:.4}", stats.mean_r)))
    })
}

pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        normalization(),
        g0_agreement(),
        schwarz_symmetry(),
        cauchy_closed_form(),
        critical_curve_shape(),
        rk4_order(),
        determinism(),
        omega_conservation(),
        finite_size_floor(),
    ]
}
