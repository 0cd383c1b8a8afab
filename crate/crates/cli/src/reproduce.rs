//! Bundled experiment presets producing the canonical result tables and
//! figure data series.

use anyhow::{bail, Result};

use lrfhss_core::optim::Objective;
use lrfhss_core::NetworkConfig;

use crate::experiment::{ExperimentSpec, RowMode};

pub const TARGETS: &[&str] = &[
    "table3", "table4", "table5", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9",
];

fn device_grid() -> Vec<u32> {
    (20_000..=200_000).step_by(20_000).collect()
}

/// Builds the spec for one preset target.
///
/// - `table3`: goodput-optimal allocation per device count, 10-byte payload.
/// - `table4`: energy-optimal allocation per device count.
/// - `table5`: goodput-optimal allocations for 30- and 50-byte payloads.
/// - `fig4`..`fig6`: success probability / goodput / energy efficiency
///   versus device count for DR8, DR9 and the optimized allocations, with
///   seeded simulation alongside the closed form.
/// - `fig7`: payload-size study (30 and 50 bytes), analytic.
/// - `fig8`/`fig9`: quantized two-setup search at 1..3 bits against the
///   unconstrained optimum, for goodput / energy efficiency.
pub fn preset(target: &str) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(NetworkConfig::new(20_000));
    spec.device_grid = device_grid();
    match target {
        "table3" => {
            spec.modes = vec![RowMode::Optimize(Objective::Goodput)];
        }
        "table4" => {
            spec.modes = vec![RowMode::Optimize(Objective::EnergyEfficiency)];
        }
        "table5" => {
            spec.payload_grid = vec![30, 50];
            spec.modes = vec![RowMode::Optimize(Objective::Goodput)];
        }
        "fig4" => {
            spec.modes = vec![
                RowMode::Dr8,
                RowMode::Dr9,
                RowMode::Optimize(Objective::Goodput),
            ];
            spec.simulate = true;
        }
        "fig5" | "fig6" => {
            spec.modes = vec![
                RowMode::Dr8,
                RowMode::Dr9,
                RowMode::Optimize(Objective::Goodput),
                RowMode::Optimize(Objective::EnergyEfficiency),
            ];
            spec.simulate = true;
        }
        "fig7" => {
            spec.payload_grid = vec![30, 50];
            spec.modes = vec![
                RowMode::Dr8,
                RowMode::Dr9,
                RowMode::Optimize(Objective::Goodput),
                RowMode::Optimize(Objective::EnergyEfficiency),
            ];
        }
        "fig8" => {
            spec.modes = quantize_series(Objective::Goodput);
        }
        "fig9" => {
            spec.modes = quantize_series(Objective::EnergyEfficiency);
        }
        other => bail!(
            "unknown reproduce target '{other}' (expected one of {})",
            TARGETS.join(", ")
        ),
    }
    Ok(spec)
}

fn quantize_series(objective: Objective) -> Vec<RowMode> {
    let mut modes = vec![RowMode::Optimize(objective)];
    for bits in 1..=3 {
        modes.push(RowMode::Quantize { objective, bits });
    }
    modes
}
