use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lrfhss_cli::emit::{emit, Format};
use lrfhss_cli::experiment::{parse_delta_arg, ExperimentSpec, RowMode};
use lrfhss_cli::reproduce;
use lrfhss_cli::specfile::{parse_config, parse_seed_list, parse_u32_grid, step_to_resolution};
use lrfhss_core::optim::Objective;
use lrfhss_core::NetworkConfig;

/// LR-FHSS uplink toolkit: closed-form network metrics, seeded
/// discrete-event simulation, and setup-allocation optimization.
#[derive(Parser)]
#[command(name = "lrfhss", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate allocations with the closed-form model over a sweep.
    Analytic(AnalyticCmd),
    /// Run the seeded simulator alongside the closed form.
    Simulate(SimulateCmd),
    /// Exhaustive simplex-grid search for the metric-optimal allocation.
    Optimize(OptimizeCmd),
    /// Quantized two-setup search (the allocation that fits one downlink octet).
    Quantize(QuantizeCmd),
    /// Bundled presets: result tables and figure data series.
    Reproduce(ReproduceCmd),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Key = value config file; explicit flags win on conflict.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Device count grid: N | a,b,c | start:end:step.
    #[arg(long, value_name = "GRID")]
    devices: Option<String>,
    /// Payload bytes grid: N | a,b,c | start:end:step.
    #[arg(long, value_name = "GRID")]
    payload: Option<String>,
    /// Mean transmissions per device per second.
    #[arg(long, value_name = "HZ")]
    tx_rate: Option<f64>,
    /// Physical channels per frequency grid.
    #[arg(long)]
    channels: Option<u32>,
    /// Number of frequency grids.
    #[arg(long)]
    grids: Option<u32>,
    /// Transmit power in dBm.
    #[arg(long)]
    tx_power_dbm: Option<f64>,
    /// Header time-on-air in seconds.
    #[arg(long, value_name = "S")]
    header_toa: Option<f64>,
    /// Fragment time-on-air in seconds.
    #[arg(long, value_name = "S")]
    fragment_toa: Option<f64>,
    /// Simulation horizon in seconds.
    #[arg(long, value_name = "S")]
    duration: Option<f64>,
    /// Let consecutive hops reuse a channel.
    #[arg(long)]
    allow_channel_repeats: bool,
}

impl ScenarioArgs {
    /// Merges defaults, config file and flags into a spec template.
    fn resolve(&self) -> Result<ExperimentSpec> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                parse_config(&text).with_context(|| format!("{}", path.display()))?
            }
            None => Default::default(),
        };

        let mut scenario = NetworkConfig::new(20_000);
        if let Some(v) = self.tx_rate.or(file.tx_rate) {
            scenario.tx_rate_hz = v;
        }
        if let Some(v) = self.channels.or(file.channels) {
            scenario.channels = v;
        }
        if let Some(v) = self.grids.or(file.grids) {
            scenario.grids = v;
        }
        if let Some(v) = self.tx_power_dbm.or(file.tx_power_dbm) {
            scenario.tx_power_dbm = v;
        }
        if let Some(v) = self.header_toa.or(file.header_toa_s) {
            scenario.header_toa_s = v;
        }
        if let Some(v) = self.fragment_toa.or(file.fragment_toa_s) {
            scenario.fragment_toa_s = v;
        }
        if let Some(v) = self.duration.or(file.duration_s) {
            scenario.sim_duration_s = v;
        }
        scenario.allow_channel_repeats =
            self.allow_channel_repeats || file.allow_channel_repeats.unwrap_or(false);

        let mut spec = ExperimentSpec::new(scenario);
        spec.device_grid = match (&self.devices, &file.devices) {
            (Some(text), _) => parse_u32_grid(text).context("devices")?,
            (None, Some(grid)) => grid.clone(),
            (None, None) => vec![20_000],
        };
        spec.payload_grid = match (&self.payload, &file.payload) {
            (Some(text), _) => parse_u32_grid(text).context("payload")?,
            (None, Some(grid)) => grid.clone(),
            (None, None) => vec![NetworkConfig::DEFAULT_PAYLOAD_BYTES],
        };
        if let Some(step) = file.step {
            spec.step_resolution = step_to_resolution(step)?;
        }
        if let Some(seeds) = &file.seeds {
            spec.seeds = seeds.clone();
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output path; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(arg: FormatArg) -> Format {
        match arg {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Goodput,
    Energy,
}

impl From<ObjectiveArg> for Objective {
    fn from(arg: ObjectiveArg) -> Objective {
        match arg {
            ObjectiveArg::Goodput => Objective::Goodput,
            ObjectiveArg::Energy => Objective::EnergyEfficiency,
        }
    }
}

fn objectives(choice: Option<ObjectiveArg>) -> Vec<Objective> {
    match choice {
        Some(arg) => vec![arg.into()],
        None => vec![Objective::Goodput, Objective::EnergyEfficiency],
    }
}

#[derive(Args)]
struct AnalyticCmd {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Allocation per row: dr8 | dr9 | k:w+k:w (repeatable; default dr8, dr9).
    #[arg(long = "delta", value_name = "SPEC")]
    deltas: Vec<String>,
}

#[derive(Args)]
struct SimulateCmd {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Allocation per row: dr8 | dr9 | k:w+k:w (repeatable; default dr8, dr9).
    #[arg(long = "delta", value_name = "SPEC")]
    deltas: Vec<String>,
    /// Seed list: N | a,b,c | a..b (default 1..10).
    #[arg(long)]
    seeds: Option<String>,
}

#[derive(Args)]
struct OptimizeCmd {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Metric to maximize; both when omitted.
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    /// Simplex grid step (must be 1/L).
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Re-score the top N grid points by simulation and report the
    /// empirically best one.
    #[arg(long, value_name = "N")]
    verify_sim: Option<usize>,
    /// Seeds for --verify-sim: N | a,b,c | a..b (default 1..10).
    #[arg(long)]
    seeds: Option<String>,
}

#[derive(Args)]
struct QuantizeCmd {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Metric to maximize; both when omitted.
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    /// Quantizer resolutions in bits: N | a,b,c | a:b:step.
    #[arg(long, default_value = "3")]
    bits: String,
}

#[derive(Args)]
struct ReproduceCmd {
    /// Preset: table3 | table4 | table5 | fig4 .. fig9.
    target: String,
    #[command(flatten)]
    output: OutputArgs,
    /// Override the preset's seed list.
    #[arg(long)]
    seeds: Option<String>,
    /// Skip the simulation columns of simulation presets.
    #[arg(long)]
    analytic_only: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            machine_error(&err.to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            machine_error(&format!("{err:#}"));
            ExitCode::FAILURE
        }
    }
}

fn machine_error(message: &str) {
    eprintln!("{}", serde_json::json!({ "error": message }));
}

fn run(cli: Cli) -> Result<()> {
    let (spec, output) = match cli.command {
        Command::Analytic(cmd) => {
            let mut spec = cmd.scenario.resolve()?;
            spec.modes = delta_modes(&cmd.deltas, &spec)?;
            (spec, cmd.output)
        }
        Command::Simulate(cmd) => {
            let mut spec = cmd.scenario.resolve()?;
            spec.modes = delta_modes(&cmd.deltas, &spec)?;
            if let Some(seeds) = &cmd.seeds {
                spec.seeds = parse_seed_list(seeds).context("seeds")?;
            }
            spec.simulate = true;
            (spec, cmd.output)
        }
        Command::Optimize(cmd) => {
            let mut spec = cmd.scenario.resolve()?;
            spec.step_resolution = step_to_resolution(cmd.step)?;
            if let Some(seeds) = &cmd.seeds {
                spec.seeds = parse_seed_list(seeds).context("seeds")?;
            }
            spec.modes = objectives(cmd.objective)
                .into_iter()
                .map(|objective| match cmd.verify_sim {
                    Some(top_n) => RowMode::OptimizeVerified { objective, top_n },
                    None => RowMode::Optimize(objective),
                })
                .collect();
            (spec, cmd.output)
        }
        Command::Quantize(cmd) => {
            let mut spec = cmd.scenario.resolve()?;
            let bits = parse_u32_grid(&cmd.bits).context("bits")?;
            let mut modes = Vec::new();
            for objective in objectives(cmd.objective) {
                for &b in &bits {
                    if b == 0 || b > 16 {
                        anyhow::bail!("bits: {b} outside 1..=16");
                    }
                    modes.push(RowMode::Quantize {
                        objective,
                        bits: b as u8,
                    });
                }
            }
            spec.modes = modes;
            (spec, cmd.output)
        }
        Command::Reproduce(cmd) => {
            let mut spec = reproduce::preset(&cmd.target)?;
            if let Some(seeds) = &cmd.seeds {
                spec.seeds = parse_seed_list(seeds).context("seeds")?;
            }
            if cmd.analytic_only {
                spec.simulate = false;
            }
            (spec, cmd.output)
        }
    };

    let rows = lrfhss_cli::experiment::run_experiment(&spec)?;
    write_rows(&rows, output.format.into(), output.out.as_deref())
}

fn delta_modes(deltas: &[String], spec: &ExperimentSpec) -> Result<Vec<RowMode>> {
    if deltas.is_empty() {
        return Ok(vec![RowMode::Dr8, RowMode::Dr9]);
    }
    deltas
        .iter()
        .map(|text| parse_delta_arg(text, &spec.catalog))
        .collect()
}

fn write_rows(
    rows: &[lrfhss_cli::emit::SweepRow],
    format: Format,
    out: Option<&std::path::Path>,
) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("{}", path.display()))?;
            let mut writer = BufWriter::new(file);
            emit(rows, format, &mut writer).with_context(|| format!("{}", path.display()))?;
            writer.flush().with_context(|| format!("{}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut writer = BufWriter::new(stdout.lock());
            emit(rows, format, &mut writer)?;
            writer.flush()?;
        }
    }
    Ok(())
}
