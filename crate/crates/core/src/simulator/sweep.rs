use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, run_from, seeded_phases, OscillatorState, SimConfig, SteadyStats};
use crate::error::{Error, Result};
use crate::export::format_sig;
use crate::freq_dist::FrequencyDistribution;
use crate::graphon::{GraphSample, Graphon};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SWEEP_CSV_HEADER: &str = "K,mean_r,std_r,mean_h_mode,n,seed_count";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Each replica walks the grid starting from the end nearest zero
    /// coupling, warm-starting every coupling from the previous terminal
    /// state.
    #[default]
    Continuation,
    /// Every (coupling, replica) cell starts from fresh seeded phases.
    Cold,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub k: f64,
    /// Mean over replicas of the time-averaged `|r|`.
    pub mean_r: f64,
    /// Standard deviation of the time-averaged `|r|` across replicas.
    pub std_r: f64,
    pub mean_h_mode: f64,
    pub std_h_mode: f64,
    /// Replica seeds that produced a value.
    pub seeds: Vec<u64>,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub n: usize,
    pub mode: i64,
    pub seed: u64,
    pub sweep_mode: SweepMode,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn couplings(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.k).collect()
    }

    pub fn mean_r(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.mean_r).collect()
    }

    pub fn mean_h_mode(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.mean_h_mode).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                format_sig(r.k),
                format_sig(r.mean_r),
                format_sig(r.std_r),
                format_sig(r.mean_h_mode),
                self.n,
                r.seeds.len()
            ));
        }
        out
    }
}

fn replica_graph(graphon: &Graphon, n: usize, seed: u64, replica: usize) -> Result<GraphSample> {
    graphon.sample_graph(n, derive_seed(seed, &[0, replica as u64]))
}

fn replica_omega(dist: &FrequencyDistribution, n: usize, seed: u64, replica: usize) -> Result<Vec<f64>> {
    dist.sample(n, derive_seed(seed, &[1, replica as u64]))
}

fn fresh_state(
    omega: &[f64],
    graph: &GraphSample,
    config: &SimConfig,
    seed: u64,
    k_index: usize,
    replica: usize,
) -> Result<OscillatorState> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[2, k_index as u64, replica as u64]));
    let theta = seeded_phases(&mut rng, &graph.grid, config.mode, config.perturbation);
    OscillatorState::new(theta, vec![0.0; graph.n], omega.to_vec())
}

fn replica_chain(
    dist: &FrequencyDistribution,
    graphon: &Graphon,
    k_grid: &[f64],
    config: &SimConfig,
    replica: usize,
) -> Vec<Result<SteadyStats>> {
    let setup = replica_graph(graphon, config.n, config.seed, replica)
        .and_then(|g| Ok((replica_omega(dist, config.n, config.seed, replica)?, g)));
    let (omega, graph) = match setup {
        Ok(v) => v,
        Err(e) => return vec![Err(e); k_grid.len()],
    };
    let mut order: Vec<usize> = (0..k_grid.len()).collect();
    if k_grid.first().map(|k| k.abs()) > k_grid.last().map(|k| k.abs()) {
        order.reverse();
    }
    let mut carried: Option<OscillatorState> = None;
    let mut out: Vec<Option<Result<SteadyStats>>> = vec![None; k_grid.len()];
    for ki in order {
        let k = k_grid[ki];
        let result = (|| {
            let mut state = match carried.take() {
                Some(mut s) => {
                    s.theta.iter_mut().for_each(|t| *t = t.rem_euclid(std::f64::consts::TAU));
                    s
                }
                None => fresh_state(&omega, &graph, config, config.seed, ki, replica)?,
            };
            let cell = SimConfig { coupling: k, ..*config };
            let stats = run_from(&cell, &graph, &mut state)?;
            carried = Some(state);
            Ok(stats)
        })();
        out[ki] = Some(result);
    }
    out.into_iter().map(|r| r.expect("every index visited")).collect()
}

fn cold_cell(
    dist: &FrequencyDistribution,
    graph: &GraphSample,
    k: f64,
    ki: usize,
    config: &SimConfig,
    replica: usize,
) -> Result<SteadyStats> {
    let omega = replica_omega(dist, config.n, config.seed, replica)?;
    let mut state = fresh_state(&omega, graph, config, config.seed, ki, replica)?;
    let cell = SimConfig { coupling: k, ..*config };
    run_from(&cell, graph, &mut state)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Runs every (coupling, replica) cell and aggregates over replicas. Each
/// replica has its own graph and frequencies, keyed by `(seed, replica)`;
/// fresh initial phases are keyed by `(seed, K-index, replica)`. Cell
/// failures are recorded in the record rather than aborting the sweep.
/// `config.coupling` is ignored.
pub fn sweep(
    dist: &FrequencyDistribution,
    graphon: &Graphon,
    k_grid: &[f64],
    config: &SimConfig,
    replicas: usize,
    mode: SweepMode,
) -> Result<SweepResult> {
    config.validate()?;
    if replicas == 0 {
        return Err(Error::InvalidParameter("at least one replica is required".into()));
    }
    if k_grid.windows(2).any(|w| !(w[0] <= w[1])) || k_grid.iter().any(|k| !k.is_finite()) {
        return Err(Error::InvalidParameter("coupling grid must be finite and sorted ascending".into()));
    }
    if k_grid.is_empty() {
        return Ok(SweepResult {
            n: config.n,
            mode: config.mode,
            seed: config.seed,
            sweep_mode: mode,
            records: Vec::new(),
        });
    }
    // cells[replica][k_index]
    let cells: Vec<Vec<Result<SteadyStats>>> = match mode {
        SweepMode::Continuation => (0..replicas)
            .into_par_iter()
            .map(|r| replica_chain(dist, graphon, k_grid, config, r))
            .collect(),
        SweepMode::Cold => {
            let graphs: Vec<Result<GraphSample>> = (0..replicas)
                .into_par_iter()
                .map(|r| replica_graph(graphon, config.n, config.seed, r))
                .collect();
            let flat: Vec<Result<SteadyStats>> = (0..replicas * k_grid.len())
                .into_par_iter()
                .map(|idx| {
                    let (r, ki) = (idx / k_grid.len(), idx % k_grid.len());
                    let graph = graphs[r].as_ref().map_err(Clone::clone)?;
                    cold_cell(dist, graph, k_grid[ki], ki, config, r)
                })
                .collect();
            flat.chunks(k_grid.len()).map(|c| c.to_vec()).collect()
        }
    };

    let records = k_grid
        .iter()
        .enumerate()
        .map(|(ki, &k)| {
            let mut rs = Vec::new();
            let mut hs = Vec::new();
            let mut seeds = Vec::new();
            let mut errors = Vec::new();
            for (r, row) in cells.iter().enumerate() {
                match &row[ki] {
                    Ok(s) => {
                        rs.push(s.mean_r);
                        hs.push(s.mean_h_mode);
                        seeds.push(derive_seed(config.seed, &[0, r as u64]));
                    }
                    Err(e) => errors.push(format!("replica {r}: {e}")),
                }
            }
            let (mean_r, std_r) = mean_std(&rs);
            let (mean_h_mode, std_h_mode) = mean_std(&hs);
            SweepRecord {
                k,
                mean_r,
                std_r,
                mean_h_mode,
                std_h_mode,
                seeds,
                errors,
            }
        })
        .collect();
    Ok(SweepResult {
        n: config.n,
        mode: config.mode,
        seed: config.seed,
        sweep_mode: mode,
        records,
    })
}
