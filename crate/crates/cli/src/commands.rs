use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use inertial_kuramoto::bifurcation::{self, PitchforkPrediction};
use inertial_kuramoto::export::{self, format_sig};
use inertial_kuramoto::graphon::SpectrumW;
use inertial_kuramoto::{selftest as checks, simulator, spectral};

use crate::config::ExperimentConfig;
use crate::plot;

/// Fourier modes scanned for the graphon spectrum.
const K_RANGE: usize = 256;
const CURVE_POINTS: usize = 2001;

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn spectrum_and_prediction(config: &ExperimentConfig) -> Result<(SpectrumW, PitchforkPrediction)> {
    let dist = config.distribution.build()?;
    let spectrum = config.graphon.build()?.spectrum(K_RANGE)?;
    let prediction = bifurcation::predict(&dist, &spectrum)?;
    Ok((spectrum, prediction))
}

fn grid(config: &ExperimentConfig, prediction: &PitchforkPrediction) -> Result<Vec<f64>> {
    match &config.k_grid {
        Some(g) => g.couplings(prediction),
        None => bail!("this command needs a k_grid in the config"),
    }
}

pub fn predict(config: &ExperimentConfig) -> Result<()> {
    let (spectrum, p) = spectrum_and_prediction(config)?;
    let rows = [
        ("K_c".to_string(), format_sig(p.k_c)),
        ("mu_max".to_string(), format_sig(p.mu_max)),
        ("rho1".to_string(), format_sig(p.rho1)),
        ("rho2".to_string(), format_sig(p.rho2)),
        ("rho3".to_string(), format_sig(p.rho3)),
        ("amplitude_coeff".to_string(), format_sig(p.amplitude_coeff)),
        (
            "validity_window".to_string(),
            format!("[{}, {}]", format_sig(p.validity_window[0]), format_sig(p.validity_window[1])),
        ),
    ];
    for (name, value) in &rows {
        println!("{name:<16} {value}");
    }
    if let (Some(k), Some(mode)) = (p.k_c_minus, p.k_minus_mode) {
        println!("{:<16} {}", "K_c-", format_sig(k));
        println!("{:<16} {} (heterogeneous mode k*, mu_min = {})", "k*", mode, format_sig(spectrum.mu_min));
    }
    write(&config.output_dir, "prediction.json", &(serde_json::to_string_pretty(&p)? + "\n"))
}

pub fn curve(config: &ExperimentConfig) -> Result<()> {
    let dist = config.distribution.build()?;
    let y_max = (50.0 * dist.scale()).max(40.0);
    let half = (CURVE_POINTS / 2) as f64;
    let ys: Vec<f64> = (0..CURVE_POINTS).map(|i| y_max * (i as f64 - half) / half).collect();
    let curve = spectral::critical_curve(&dist, &ys)?;
    let g0 = dist.g0()?;
    println!("g0 = {}; real-axis crossings at y = {:?}", format_sig(g0), crossings(&curve));
    write(&config.output_dir, "curve.csv", &export::curve_csv(&curve))?;
    write(&config.output_dir, "curve.gp", &plot::curve_script(g0))
}

fn crossings(curve: &spectral::CriticalCurve) -> Vec<String> {
    curve.real_axis_crossings(1e-12).into_iter().map(|i| format_sig(curve.y[i])).collect()
}

pub fn eig(config: &ExperimentConfig) -> Result<()> {
    let dist = config.distribution.build()?;
    let (spectrum, prediction) = spectrum_and_prediction(config)?;
    let couplings = grid(config, &prediction)?;
    let mut rows = Vec::new();
    for (k, result) in spectral::eigenvalue_trajectory(&dist, spectrum.mu_max, &couplings) {
        match result {
            Ok(lambda) => rows.push((k, lambda)),
            Err(e) => eprintln!("K = {}: no eigenvalue ({e})", format_sig(k)),
        }
    }
    write(&config.output_dir, "eig.csv", &export::eig_csv(&rows))?;
    write(&config.output_dir, "eig.gp", &plot::eig_script())
}

pub fn sweep(config: &ExperimentConfig) -> Result<()> {
    let dist = config.distribution.build()?;
    let graphon = config.graphon.build()?;
    let (spectrum, prediction) = spectrum_and_prediction(config)?;
    let couplings = grid(config, &prediction)?;
    let negative = couplings.last().is_some_and(|k| *k < 0.0);
    let mode = config.simulation.mode.unwrap_or(match prediction.k_minus_mode {
        Some(k) if negative => k,
        _ => spectrum.max_mode,
    });
    let result = simulator::sweep(
        &dist,
        &graphon,
        &couplings,
        &config.sim_config(mode),
        config.replicas,
        config.simulation.sweep_mode,
    )?;
    for record in &result.records {
        for e in &record.errors {
            eprintln!("K = {}: {e}", format_sig(record.k));
        }
    }
    let mut marks = vec![(prediction.k_c, "K_c")];
    if let Some(k) = prediction.k_c_minus {
        marks.push((k, "K_c^-"));
    }
    if let (Some(lo), Some(hi)) = (couplings.first(), couplings.last()) {
        marks.retain(|(k, _)| k >= lo && k <= hi);
    }
    write(&config.output_dir, "sweep.csv", &result.to_csv())?;
    write(&config.output_dir, "sweep.gp", &plot::sweep_script(mode, &marks))
}

pub fn selftest() -> Result<()> {
    let outcomes = checks::run_all();
    let width = outcomes.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    for c in &outcomes {
        let pad = width - c.name.chars().count();
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict}  {}{}  {}", c.name, " ".repeat(pad), c.detail);
    }
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        bail!("{failed} of {} checks failed", outcomes.len());
    }
    println!("all {} checks passed", outcomes.len());
    Ok(())
}
