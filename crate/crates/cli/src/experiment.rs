//! Sweep execution: expands a specification into (devices, payload, mode)
//! cells, evaluates each cell analytically and optionally by simulation, and
//! returns rows in grid order regardless of completion order.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use lrfhss_core::analytic::evaluate;
use lrfhss_core::optim::{
    optimize, optimize_quantized, optimize_verified, two_setup_distribution, Objective,
};
use lrfhss_core::sim::simulate;
use lrfhss_core::{AllocationDistribution, NetworkConfig, SetupCatalog};

use crate::emit::{format_sig12, SweepRow};

/// What allocation a row evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum RowMode {
    /// One-point allocation on the DR8-equivalent setup.
    Dr8,
    /// One-point allocation on the DR9-equivalent setup.
    Dr9,
    /// A caller-supplied allocation.
    Fixed(AllocationDistribution),
    /// Simplex-grid search maximizing the metric.
    Optimize(Objective),
    /// Grid search re-scored by simulation over the spec seeds; the row
    /// reports the candidate with the best empirical metric.
    OptimizeVerified { objective: Objective, top_n: usize },
    /// Quantized two-setup search at the given resolution.
    Quantize { objective: Objective, bits: u8 },
}

impl RowMode {
    pub fn label(&self) -> String {
        fn short(objective: Objective) -> &'static str {
            match objective {
                Objective::Goodput => "goodput",
                Objective::EnergyEfficiency => "energy",
            }
        }
        match self {
            RowMode::Dr8 => "DR8".to_string(),
            RowMode::Dr9 => "DR9".to_string(),
            RowMode::Fixed(_) => "fixed".to_string(),
            RowMode::Optimize(objective) => format!("optimize-{}", short(*objective)),
            RowMode::OptimizeVerified { objective, .. } => {
                format!("optimize-{}-verified", short(*objective))
            }
            RowMode::Quantize { objective, bits } => {
                format!("quantize-{}-b{bits}", short(*objective))
            }
        }
    }
}

/// A full experiment: scenario template, sweep grids, modes and seeds.
///
/// `scenario.devices` and `scenario.payload_bytes` act as templates and are
/// overridden by the grids cell by cell.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub scenario: NetworkConfig,
    pub catalog: SetupCatalog,
    pub device_grid: Vec<u32>,
    pub payload_grid: Vec<u32>,
    pub modes: Vec<RowMode>,
    /// Simplex grid resolution for optimize modes (step = 1/resolution).
    pub step_resolution: u32,
    pub seeds: Vec<u64>,
    /// Fill the simulated columns by running every seed per cell.
    pub simulate: bool,
}

impl ExperimentSpec {
    /// Default spec: one cell, DR8 and DR9 rows, analytic only.
    pub fn new(scenario: NetworkConfig) -> Self {
        ExperimentSpec {
            device_grid: vec![scenario.devices],
            payload_grid: vec![scenario.payload_bytes],
            scenario,
            catalog: SetupCatalog::default(),
            modes: vec![RowMode::Dr8, RowMode::Dr9],
            step_resolution: 20,
            seeds: (1..=10).collect(),
            simulate: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.device_grid.is_empty() {
            bail!("device_grid: must not be empty");
        }
        if self.payload_grid.is_empty() {
            bail!("payload_grid: must not be empty");
        }
        if self.modes.is_empty() {
            bail!("modes: must not be empty");
        }
        if self.step_resolution == 0 {
            bail!("step: must be 1/L for a positive integer L");
        }
        let needs_seeds = self.simulate
            || self
                .modes
                .iter()
                .any(|m| matches!(m, RowMode::OptimizeVerified { .. }));
        if needs_seeds && self.seeds.is_empty() {
            bail!("seeds: must not be empty when simulation is requested");
        }
        for (i, mode) in self.modes.iter().enumerate() {
            if let RowMode::Fixed(delta) = mode {
                delta
                    .check_matches(&self.catalog)
                    .with_context(|| format!("modes[{i}].delta"))?;
            }
        }
        for (i, &devices) in self.device_grid.iter().enumerate() {
            if devices == 0 {
                bail!("device_grid[{i}]: must be strictly positive");
            }
        }
        for (i, &payload) in self.payload_grid.iter().enumerate() {
            if payload == 0 {
                bail!("payload_grid[{i}]: must be strictly positive");
            }
        }
        let mut probe = self.scenario.clone();
        probe.devices = self.device_grid[0];
        probe.payload_bytes = self.payload_grid[0];
        probe.validate().context("scenario")?;
        Ok(())
    }
}

/// Parses a `--delta` argument: `dr8`, `dr9`, or `k:weight` pairs joined by
/// `+` with 1-based setup indices, e.g. `1:0.35+6:0.65`.
pub fn parse_delta_arg(text: &str, catalog: &SetupCatalog) -> Result<RowMode> {
    match text.trim().to_ascii_lowercase().as_str() {
        "dr8" => return Ok(RowMode::Dr8),
        "dr9" => return Ok(RowMode::Dr9),
        _ => {}
    }
    let mut weights = vec![0.0; catalog.len()];
    for pair in text.split('+') {
        let (index, weight) = pair
            .split_once(':')
            .with_context(|| format!("delta: expected k:weight, got '{pair}'"))?;
        let index: usize = index
            .trim()
            .parse()
            .with_context(|| format!("delta: setup index in '{pair}'"))?;
        if index == 0 || index > catalog.len() {
            bail!(
                "delta: setup index {index} outside 1..={}",
                catalog.len()
            );
        }
        if weights[index - 1] != 0.0 {
            bail!("delta: setup {index} listed twice");
        }
        weights[index - 1] = weight
            .trim()
            .parse()
            .with_context(|| format!("delta: weight in '{pair}'"))?;
    }
    let delta = AllocationDistribution::new(weights).context("delta")?;
    Ok(RowMode::Fixed(delta))
}

/// Allocation weights as `k:weight` pairs, 1-based, zero weights omitted.
pub fn delta_string(delta: &AllocationDistribution) -> String {
    let parts: Vec<String> = delta
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0.0)
        .map(|(k, &w)| format!("{}:{}", k + 1, format_sig12(w)))
        .collect();
    parts.join("+")
}

/// Runs every (device, payload, mode) cell of the spec. Cells execute in
/// parallel; rows come back ordered by grid position.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &devices in &spec.device_grid {
        for &payload in &spec.payload_grid {
            for mode in &spec.modes {
                cells.push((devices, payload, mode.clone()));
            }
        }
    }
    cells
        .par_iter()
        .map(|(devices, payload, mode)| run_cell(spec, *devices, *payload, mode))
        .collect()
}

fn run_cell(spec: &ExperimentSpec, devices: u32, payload: u32, mode: &RowMode) -> Result<SweepRow> {
    let mut cfg = spec.scenario.clone();
    cfg.devices = devices;
    cfg.payload_bytes = payload;
    let context = || format!("cell M={devices} l={payload} mode={}", mode.label());

    let delta = match mode {
        RowMode::Dr8 => AllocationDistribution::dr8(&spec.catalog),
        RowMode::Dr9 => AllocationDistribution::dr9(&spec.catalog),
        RowMode::Fixed(delta) => Ok(delta.clone()),
        RowMode::Optimize(objective) => {
            optimize(&cfg, &spec.catalog, *objective, spec.step_resolution).map(|r| r.best_delta)
        }
        RowMode::OptimizeVerified { objective, top_n } => optimize_verified(
            &cfg,
            &spec.catalog,
            *objective,
            spec.step_resolution,
            *top_n,
            &spec.seeds,
        )
        .map(|candidates| candidates[0].delta.clone()),
        RowMode::Quantize { objective, bits } => {
            optimize_quantized(&cfg, &spec.catalog, *objective, *bits)
                .and_then(|q| two_setup_distribution(&spec.catalog, q.alpha))
        }
    }
    .with_context(context)?;

    let report = evaluate(&cfg, &spec.catalog, &delta).with_context(context)?;

    let simulate_row = spec.simulate || matches!(mode, RowMode::OptimizeVerified { .. });
    let (ps_sim_mean, ps_sim_stderr, g_sim_mean, e_sim_mean, seeds_used) = if simulate_row {
        let mut ps = Vec::with_capacity(spec.seeds.len());
        let mut goodput = Vec::with_capacity(spec.seeds.len());
        let mut energy = Vec::with_capacity(spec.seeds.len());
        for &seed in &spec.seeds {
            let run = simulate(&cfg, &spec.catalog, &delta, seed).with_context(context)?;
            if let (Some(p), Some(e)) = (run.empirical_ps, run.empirical_energy_eff_bpj) {
                ps.push(p);
                goodput.push(run.empirical_goodput_bps);
                energy.push(e);
            }
        }
        (
            mean(&ps),
            stderr(&ps),
            mean(&goodput),
            mean(&energy),
            ps.len() as u32,
        )
    } else {
        (None, None, None, None, 0)
    };

    Ok(SweepRow {
        devices,
        payload,
        mode: mode.label(),
        delta: delta_string(&delta),
        ps_analytic: report.packet_success,
        g_analytic: report.goodput_bps,
        e_analytic: report.energy_eff_bpj,
        ps_sim_mean,
        ps_sim_stderr,
        g_sim_mean,
        e_sim_mean,
        seeds: seeds_used,
    })
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Standard error of the mean; 0 for a single sample.
fn stderr(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    if n == 1 {
        return Some(0.0);
    }
    let m = values.iter().sum::<f64>() / n as f64;
    let variance = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
    Some((variance / n as f64).sqrt())
}
