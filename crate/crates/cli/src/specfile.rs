//! Flat key = value experiment config files.
//!
//! Line-oriented, `#` comments, one `key = value` per line. The file must
//! declare `schema_version = 1`. Unknown and duplicated keys are rejected so
//! typos fail fast. Command-line flags override file values.

use anyhow::{bail, Context, Result};

/// Values a config file may carry; every field optional except the schema
/// version.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub devices: Option<Vec<u32>>,
    pub payload: Option<Vec<u32>>,
    pub tx_rate: Option<f64>,
    pub channels: Option<u32>,
    pub grids: Option<u32>,
    pub tx_power_dbm: Option<f64>,
    pub header_toa_s: Option<f64>,
    pub fragment_toa_s: Option<f64>,
    pub duration_s: Option<f64>,
    pub allow_channel_repeats: Option<bool>,
    pub step: Option<f64>,
    pub seeds: Option<Vec<u64>>,
}

/// Grid syntax shared by config files and flags:
/// `N`, `a,b,c`, or `start:end:step` (inclusive end).
pub fn parse_u32_grid(text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    if let Some((start, rest)) = text.split_once(':') {
        let (end, step) = rest
            .split_once(':')
            .context("range needs start:end:step")?;
        let (start, end, step): (u32, u32, u32) = (
            start.trim().parse().context("range start")?,
            end.trim().parse().context("range end")?,
            step.trim().parse().context("range step")?,
        );
        if step == 0 {
            bail!("range step must be positive");
        }
        if end < start {
            bail!("range end below start");
        }
        return Ok((start..=end).step_by(step as usize).collect());
    }
    text.split(',')
        .map(|part| part.trim().parse::<u32>().context("list entry"))
        .collect()
}

/// Seed list syntax: `N`, `a,b,c`, or `a..b` (inclusive).
pub fn parse_seed_list(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    if let Some((start, end)) = text.split_once("..") {
        let start: u64 = start.trim().parse().context("seed range start")?;
        let end: u64 = end.trim().parse().context("seed range end")?;
        if end < start {
            bail!("seed range end below start");
        }
        return Ok((start..=end).collect());
    }
    text.split(',')
        .map(|part| part.trim().parse::<u64>().context("seed entry"))
        .collect()
}

/// Step must be the reciprocal of a positive integer (grid resolution).
pub fn step_to_resolution(step: f64) -> Result<u32> {
    if !(step > 0.0 && step <= 1.0) {
        bail!("step: must be in (0, 1]");
    }
    let resolution = (1.0 / step).round();
    if resolution < 1.0 || (step * resolution - 1.0).abs() > 1e-9 {
        bail!("step: must be 1/L for a positive integer L");
    }
    Ok(resolution as u32)
}

pub fn parse_config(text: &str) -> Result<FileConfig> {
    let mut config = FileConfig::default();
    let mut seen = Vec::new();
    let mut schema_seen = false;

    for (index, raw_line) in text.lines().enumerate() {
        let line_number = index + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {line_number}: expected key = value"))?;
        let key = key.trim();
        let value = value.trim();
        if seen.contains(&key.to_string()) {
            bail!("line {line_number}: duplicate key '{key}'");
        }
        seen.push(key.to_string());

        let context = || format!("line {line_number}: {key}");
        match key {
            "schema_version" => {
                if value != "1" {
                    bail!("line {line_number}: unsupported schema_version '{value}'");
                }
                schema_seen = true;
            }
            "devices" => config.devices = Some(parse_u32_grid(value).with_context(context)?),
            "payload" => config.payload = Some(parse_u32_grid(value).with_context(context)?),
            "tx_rate" => config.tx_rate = Some(value.parse().with_context(context)?),
            "channels" => config.channels = Some(value.parse().with_context(context)?),
            "grids" => config.grids = Some(value.parse().with_context(context)?),
            "tx_power_dbm" => config.tx_power_dbm = Some(value.parse().with_context(context)?),
            "header_toa_s" => config.header_toa_s = Some(value.parse().with_context(context)?),
            "fragment_toa_s" => {
                config.fragment_toa_s = Some(value.parse().with_context(context)?)
            }
            "duration_s" => config.duration_s = Some(value.parse().with_context(context)?),
            "allow_channel_repeats" => {
                config.allow_channel_repeats = Some(value.parse().with_context(context)?)
            }
            "step" => config.step = Some(value.parse().with_context(context)?),
            "seeds" => config.seeds = Some(parse_seed_list(value).with_context(context)?),
            other => bail!("line {line_number}: unknown key '{other}'"),
        }
    }
    if !schema_seen {
        bail!("missing schema_version");
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_config() {
        let text = "\
# experiment
schema_version = 1
devices = 20000:60000:20000
payload = 10,30
tx_rate = 0.001
seeds = 1..3
step = 0.05
allow_channel_repeats = true
";
        let config = parse_config(text).unwrap();
        assert_eq!(config.devices, Some(vec![20_000, 40_000, 60_000]));
        assert_eq!(config.payload, Some(vec![10, 30]));
        assert_eq!(config.seeds, Some(vec![1, 2, 3]));
        assert_eq!(config.step, Some(0.05));
        assert_eq!(config.allow_channel_repeats, Some(true));
    }

    #[test]
    fn unknown_keys_fail_fast() {
        let err = parse_config("schema_version = 1\ndevcies = 10\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("unknown key 'devcies'"), "{err}");
    }

    #[test]
    fn schema_version_is_mandatory() {
        let err = parse_config("devices = 10\n").unwrap_err().to_string();
        assert!(err.contains("schema_version"), "{err}");
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse_config("schema_version = 1\ndevices = 1\ndevices = 2\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("duplicate key"), "{err}");
    }

    #[test]
    fn step_resolution_round_trips() {
        assert_eq!(step_to_resolution(0.05).unwrap(), 20);
        assert_eq!(step_to_resolution(0.01).unwrap(), 100);
        assert_eq!(step_to_resolution(1.0).unwrap(), 1);
        assert!(step_to_resolution(0.3).is_err());
        assert!(step_to_resolution(0.0).is_err());
    }

    #[test]
    fn grid_syntax_variants() {
        assert_eq!(parse_u32_grid("7").unwrap(), vec![7]);
        assert_eq!(parse_u32_grid("1, 2,3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_u32_grid("10:30:10").unwrap(), vec![10, 20, 30]);
        assert!(parse_u32_grid("30:10:10").is_err());
        assert!(parse_u32_grid("10:30:0").is_err());
        assert_eq!(parse_seed_list("4..6").unwrap(), vec![4, 5, 6]);
    }
}
