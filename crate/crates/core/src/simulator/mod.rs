//! Finite-`n` second-order Kuramoto dynamics on a sampled graph,
//!
//! ```text
//! θ̇_i = ψ_i + ω_i
//! ψ̇_i = -ψ_i + (2K/n) Σ_j a_ij sin(θ_j - θ_i)
//! ```
//!
//! integrated with fixed-step classical RK4.

mod fit;
mod sweep;

pub use fit::{fit_bifurcation_point, fit_branch, BifurcationFit, FIT_WINDOW};
pub use sweep::{sweep, SweepMode, SweepRecord, SweepResult, SWEEP_CSV_HEADER};

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq_dist::FrequencyDistribution;
use crate::graphon::GraphSample;

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorState {
    pub theta: Vec<f64>,
    /// `ψ_i = θ̇_i - ω_i`.
    pub psi: Vec<f64>,
    pub omega: Vec<f64>,
}

impl OscillatorState {
    pub fn new(theta: Vec<f64>, psi: Vec<f64>, omega: Vec<f64>) -> Result<Self> {
        let n = theta.len();
        for len in [psi.len(), omega.len()] {
            if len != n {
                return Err(Error::SizeMismatch { expected: n, got: len });
            }
        }
        let state = Self { theta, psi, omega };
        if !state.is_finite() {
            return Err(Error::InvalidParameter("state contains non-finite entries".into()));
        }
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().chain(&self.psi).chain(&self.omega).all(|v| v.is_finite())
    }
}

/// Integration and measurement settings. The damping is fixed at `γ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n: usize,
    pub coupling: f64,
    pub dt: f64,
    pub t_transient: f64,
    pub t_average: f64,
    pub seed: u64,
    /// Fourier mode of the seeded perturbation and of the measured `h_k`.
    #[serde(default)]
    pub mode: i64,
    /// Size of the seeded perturbation in that mode.
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
}

fn default_perturbation() -> f64 {
    1e-2
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 2000,
            coupling: 0.0,
            dt: 0.02,
            t_transient: 200.0,
            t_average: 200.0,
            seed: 0,
            mode: 0,
            perturbation: default_perturbation(),
        }
    }
}

impl SimConfig {
    pub const MAX_DT: f64 = 0.05;
    pub const MIN_T_AVERAGE: f64 = 50.0;

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.dt > 0.0 && self.dt <= Self::MAX_DT) {
            return Err(Error::InvalidParameter(format!("dt must lie in (0, 0.05], got {}", self.dt)));
        }
        if !(self.t_average >= Self::MIN_T_AVERAGE) {
            return Err(Error::InvalidParameter(format!(
                "t_average must be at least 50, got {}",
                self.t_average
            )));
        }
        if !(self.t_transient >= 0.0) || !self.t_transient.is_finite() || !self.t_average.is_finite() {
            return Err(Error::InvalidParameter("integration times must be finite and non-negative".into()));
        }
        if !self.coupling.is_finite() || !(self.perturbation >= 0.0) {
            return Err(Error::InvalidParameter("coupling and perturbation must be finite".into()));
        }
        Ok(())
    }

    fn steps(&self, t: f64) -> usize {
        (t / self.dt).round() as usize
    }
}

/// Evaluates `(2K/n) Σ_j a_ij sin(θ_j - θ_i)` through
/// `sin(θ_j - θ_i) = sin θ_j cos θ_i - cos θ_j sin θ_i`, so one pass over
/// the adjacency per evaluation suffices.
///
/// Dense graphs are stored as bit rows. Each group of eight columns gets a
/// 256-entry table of partial sums of `(sin θ_j, cos θ_j)`, and a row sum
/// becomes one table lookup per byte instead of one gather per edge.
struct Coupler<'g> {
    graph: &'g GraphSample,
    trig: Vec<[f64; 2]>,
    packed: Option<Packed>,
}

struct Packed {
    groups: usize,
    rows: Vec<u8>,
    table: Vec<[f64; 2]>,
}

/// Edge density above which the bit-row form is used.
const PACKED_DENSITY: f64 = 0.05;

impl<'g> Coupler<'g> {
    fn new(graph: &'g GraphSample) -> Self {
        let n = graph.n;
        let packed = (n >= 64 && graph.edge_density() >= PACKED_DENSITY).then(|| {
            let groups = n.div_ceil(8);
            let mut rows = vec![0u8; n * groups];
            for i in 0..n {
                let row = &mut rows[i * groups..(i + 1) * groups];
                for &j in graph.neighbors(i) {
                    let j = j as usize;
                    row[j / 8] |= 1 << (j % 8);
                }
            }
            Packed {
                groups,
                rows,
                table: vec![[0.0; 2]; groups * 256],
            }
        });
        Self {
            graph,
            trig: vec![[0.0; 2]; groups_padding(n)],
            packed,
        }
    }

    fn force(&mut self, coupling: f64, theta: &[f64], out: &mut [f64]) {
        let n = self.graph.n;
        for (t, th) in self.trig.iter_mut().zip(theta) {
            let (s, c) = th.sin_cos();
            *t = [s, c];
        }
        let factor = 2.0 * coupling / n as f64;
        match &mut self.packed {
            Some(p) => {
                for (g, table) in p.table.chunks_exact_mut(256).enumerate() {
                    let block = &self.trig[8 * g..8 * g + 8];
                    table[0] = [0.0, 0.0];
                    for b in 1..256usize {
                        let prev = table[b & (b - 1)];
                        let v = block[b.trailing_zeros() as usize];
                        table[b] = [prev[0] + v[0], prev[1] + v[1]];
                    }
                }
                for (i, row) in p.rows.chunks_exact(p.groups).enumerate() {
                    let (mut s, mut c) = (0.0, 0.0);
                    for (table, &bits) in p.table.chunks_exact(256).zip(row) {
                        let e = table[bits as usize];
                        s += e[0];
                        c += e[1];
                    }
                    let [si, ci] = self.trig[i];
                    out[i] = factor * (ci * s - si * c);
                }
            }
            None => {
                let (offsets, neighbors) = self.graph.csr();
                for i in 0..n {
                    let row = &neighbors[offsets[i]..offsets[i + 1]];
                    let (mut s0, mut c0, mut s1, mut c1) = (0.0, 0.0, 0.0, 0.0);
                    let mut pairs = row.chunks_exact(2);
                    for pair in &mut pairs {
                        let a = self.trig[pair[0] as usize];
                        let b = self.trig[pair[1] as usize];
                        s0 += a[0];
                        c0 += a[1];
                        s1 += b[0];
                        c1 += b[1];
                    }
                    if let [j] = pairs.remainder() {
                        let a = self.trig[*j as usize];
                        s0 += a[0];
                        c0 += a[1];
                    }
                    let [si, ci] = self.trig[i];
                    out[i] = factor * (ci * (s0 + s1) - si * (c0 + c1));
                }
            }
        }
    }
}

/// Trig buffer length: `n` rounded up to a multiple of 8, padded with zeros.
fn groups_padding(n: usize) -> usize {
    n.div_ceil(8) * 8
}

fn check_size(state: &OscillatorState, graph: &GraphSample) -> Result<()> {
    for len in [state.theta.len(), state.psi.len(), state.omega.len()] {
        if len != graph.n {
            return Err(Error::SizeMismatch { expected: graph.n, got: len });
        }
    }
    Ok(())
}

/// The vector field: returns `(θ̇, ψ̇)`.
pub fn rhs(state: &OscillatorState, graph: &GraphSample, coupling: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_size(state, graph)?;
    let mut force = vec![0.0; graph.n];
    Coupler::new(graph).force(coupling, &state.theta, &mut force);
    let dtheta = state.psi.iter().zip(&state.omega).map(|(p, w)| p + w).collect();
    let dpsi = state.psi.iter().zip(&force).map(|(p, f)| f - p).collect();
    Ok((dtheta, dpsi))
}

/// A fixed-step RK4 integrator bound to one graph and coupling, owning its
/// stage buffers.
pub struct Integrator<'g> {
    graph: &'g GraphSample,
    coupler: Coupler<'g>,
    coupling: f64,
    dt: f64,
    steps_taken: usize,
    force: Vec<f64>,
    theta_stage: Vec<f64>,
    psi_stage: Vec<f64>,
    theta_acc: Vec<f64>,
    psi_acc: Vec<f64>,
}

impl<'g> Integrator<'g> {
    pub fn new(graph: &'g GraphSample, coupling: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !coupling.is_finite() {
            return Err(Error::InvalidParameter(format!("need dt > 0 and finite K (dt = {dt}, K = {coupling})")));
        }
        let n = graph.n;
        Ok(Self {
            graph,
            coupler: Coupler::new(graph),
            coupling,
            dt,
            steps_taken: 0,
            force: vec![0.0; n],
            theta_stage: vec![0.0; n],
            psi_stage: vec![0.0; n],
            theta_acc: vec![0.0; n],
            psi_acc: vec![0.0; n],
        })
    }

    pub fn time(&self) -> f64 {
        self.steps_taken as f64 * self.dt
    }

    /// One RK4 step in place. Fails if the new state is not finite.
    pub fn step(&mut self, state: &mut OscillatorState) -> Result<()> {
        check_size(state, self.graph)?;
        let dt = self.dt;
        let weights = [1.0, 2.0, 2.0, 1.0];
        let offsets = [0.5 * dt, 0.5 * dt, dt];
        self.theta_stage.copy_from_slice(&state.theta);
        self.psi_stage.copy_from_slice(&state.psi);
        for (stage, &w) in weights.iter().enumerate() {
            self.coupler.force(self.coupling, &self.theta_stage, &mut self.force);
            let next = offsets.get(stage).copied();
            for i in 0..self.graph.n {
                let dth = self.psi_stage[i] + state.omega[i];
                let dps = self.force[i] - self.psi_stage[i];
                if stage == 0 {
                    self.theta_acc[i] = dth;
                    self.psi_acc[i] = dps;
                } else {
                    self.theta_acc[i] += w * dth;
                    self.psi_acc[i] += w * dps;
                }
                if let Some(h) = next {
                    self.theta_stage[i] = state.theta[i] + h * dth;
                    self.psi_stage[i] = state.psi[i] + h * dps;
                }
            }
        }
        let mut finite = true;
        for i in 0..self.graph.n {
            state.theta[i] += dt / 6.0 * self.theta_acc[i];
            state.psi[i] += dt / 6.0 * self.psi_acc[i];
            finite &= state.theta[i].is_finite() && state.psi[i].is_finite();
        }
        self.steps_taken += 1;
        if !finite {
            return Err(Error::Divergence {
                step: self.steps_taken,
                t: self.time(),
            });
        }
        Ok(())
    }
}

/// Integrates `state` for `steps` RK4 steps, calling `observe(t, state)`
/// after the initial state and after every step.
pub fn integrate<F>(
    graph: &GraphSample,
    coupling: f64,
    dt: f64,
    steps: usize,
    state: &mut OscillatorState,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(f64, &OscillatorState),
{
    check_size(state, graph)?;
    let mut integrator = Integrator::new(graph, coupling, dt)?;
    observe(0.0, state);
    for _ in 0..steps {
        integrator.step(state)?;
        observe(integrator.time(), state);
    }
    Ok(())
}

/// `n⁻¹ Σ_j e^{-2πik x_j} e^{iθ_j}`.
pub fn order_parameter(theta: &[f64], grid: &[f64], mode: i64) -> Complex64 {
    let n = theta.len();
    if n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let k = mode as f64;
    let sum: Complex64 = theta
        .iter()
        .zip(grid)
        .map(|(th, x)| Complex64::from_polar(1.0, th - TAU * k * x))
        .sum();
    sum / n as f64
}

/// Modulus of the order parameter for mode `k`. For `k ≠ 0` the `±k` modes
/// share an eigenvalue, so the pair amplitude `√(|z_k|² + |z_{-k}|²)` is
/// reported; it is invariant under the symmetry swapping the pair.
pub fn mode_amplitude(theta: &[f64], grid: &[f64], mode: i64) -> f64 {
    if mode == 0 {
        order_parameter(theta, grid, 0).norm()
    } else {
        let a = order_parameter(theta, grid, mode).norm_sqr();
        let b = order_parameter(theta, grid, -mode).norm_sqr();
        (a + b).sqrt()
    }
}

/// Incoherent state with a seeded perturbation of size `delta` in mode `k`:
/// a shuffled equispaced phase set `U_j` (so `r = 0` exactly before the
/// perturbation), then `θ_j = U_j + 2δ sin(U_j - 2πk x_j)`. To first order
/// this gives `|z_k| = δ`. `ψ = 0` and `ω` is left to the caller.
pub fn seeded_phases<R: Rng + ?Sized>(rng: &mut R, grid: &[f64], mode: i64, delta: f64) -> Vec<f64> {
    let n = grid.len();
    let mut slots: Vec<usize> = (0..n).collect();
    slots.shuffle(rng);
    let k = mode as f64;
    slots
        .iter()
        .zip(grid)
        .map(|(&slot, x)| {
            let u = TAU * (slot as f64 + 0.5) / n as f64;
            u + 2.0 * delta * (u - TAU * k * x).sin()
        })
        .collect()
}

pub fn initial_state(
    dist: &FrequencyDistribution,
    grid: &[f64],
    mode: i64,
    delta: f64,
    seed: u64,
) -> Result<OscillatorState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = dist.sample_with(&mut rng, grid.len())?;
    let theta = seeded_phases(&mut rng, grid, mode, delta);
    OscillatorState::new(theta, vec![0.0; grid.len()], omega)
}

/// Time averages over the measurement window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyStats {
    pub mean_r: f64,
    /// Standard deviation of `|r(t)|` over the window.
    pub std_r: f64,
    pub mean_h_mode: f64,
    pub mode: i64,
}

/// Integrates `t_transient`, then averages `|r|` and the mode amplitude over
/// `t_average`, sampling every step. `state` is left at the terminal state.
pub fn run_from(config: &SimConfig, graph: &GraphSample, state: &mut OscillatorState) -> Result<SteadyStats> {
    config.validate()?;
    check_size(state, graph)?;
    let mut integrator = Integrator::new(graph, config.coupling, config.dt)?;
    for _ in 0..config.steps(config.t_transient) {
        integrator.step(state)?;
    }
    let samples = config.steps(config.t_average);
    let (mut mean, mut m2, mut h_sum) = (0.0, 0.0, 0.0);
    for s in 1..=samples {
        integrator.step(state)?;
        let r = order_parameter(&state.theta, &graph.grid, 0).norm();
        let h = if config.mode == 0 {
            r
        } else {
            mode_amplitude(&state.theta, &graph.grid, config.mode)
        };
        let delta = r - mean;
        mean += delta / s as f64;
        m2 += delta * (r - mean);
        h_sum += h;
    }
    let samples = samples.max(1) as f64;
    Ok(SteadyStats {
        mean_r: mean,
        std_r: (m2 / samples).sqrt(),
        mean_h_mode: h_sum / samples,
        mode: config.mode,
    })
}

/// Draws `ω` and the seeded initial phases from `config.seed`, then runs
/// [`run_from`].
pub fn run_steady(config: &SimConfig, graph: &GraphSample, dist: &FrequencyDistribution) -> Result<SteadyStats> {
    config.validate()?;
    if graph.n != config.n {
        return Err(Error::SizeMismatch { expected: config.n, got: graph.n });
    }
    let mut state = initial_state(dist, &graph.grid, config.mode, config.perturbation, config.seed)?;
    run_from(config, graph, &mut state)
}

/// `(t, |r|, arg r)` samples of a single run, for trajectory dumps.
pub fn order_parameter_trace(
    graph: &GraphSample,
    coupling: f64,
    dt: f64,
    steps: usize,
    state: &mut OscillatorState,
    mode: i64,
) -> Result<Vec<(f64, Complex64)>> {
    let mut trace = Vec::with_capacity(steps + 1);
    integrate(graph, coupling, dt, steps, state, |t, s| {
        trace.push((t, order_parameter(&s.theta, &graph.grid, mode)));
    })?;
    Ok(trace)
}

/// Mixes a base seed with stream indices into an independent 64-bit seed.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h = splitmix(h ^ splitmix(p.wrapping_add(0xD1B5_4A32_D192_ED03)));
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
