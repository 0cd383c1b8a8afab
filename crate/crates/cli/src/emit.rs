//! Sweep-row serialization: CSV with a fixed header, JSON as an array of
//! row objects, numbers at 12 significant digits in both.

use std::io::{self, Write};

use serde::Serialize;

/// Fixed CSV column set; the JSON field names are identical.
pub const CSV_HEADER: &str =
    "M,l,mode,delta,Ps_analytic,G_analytic,E_analytic,Ps_sim_mean,Ps_sim_stderr,G_sim_mean,E_sim_mean,seeds";

/// One output row of a sweep: a (device count, payload, mode) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "M")]
    pub devices: u32,
    #[serde(rename = "l")]
    pub payload: u32,
    pub mode: String,
    /// Allocation as `k:weight` pairs joined by `+`, indices 1-based,
    /// zero-weight setups omitted, e.g. `1:0.35+6:0.65`.
    pub delta: String,
    #[serde(rename = "Ps_analytic")]
    pub ps_analytic: f64,
    #[serde(rename = "G_analytic")]
    pub g_analytic: f64,
    #[serde(rename = "E_analytic")]
    pub e_analytic: f64,
    #[serde(rename = "Ps_sim_mean")]
    pub ps_sim_mean: Option<f64>,
    #[serde(rename = "Ps_sim_stderr")]
    pub ps_sim_stderr: Option<f64>,
    #[serde(rename = "G_sim_mean")]
    pub g_sim_mean: Option<f64>,
    #[serde(rename = "E_sim_mean")]
    pub e_sim_mean: Option<f64>,
    pub seeds: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Renders a float with 12 significant digits, decimal where compact and
/// exponential otherwise; parses back to the same 12-digit value.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let scientific = format!("{:.11e}", x);
    let (mantissa, exponent) = scientific.split_once('e').expect("exponential form");
    let exponent: i32 = exponent.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);

    let body = if (-4..12).contains(&exponent) {
        if exponent >= 0 {
            let int_len = exponent as usize + 1;
            if int_len >= digits.len() {
                let mut s = digits.clone();
                s.push_str(&"0".repeat(int_len - digits.len()));
                s
            } else {
                let (int_part, frac) = digits.split_at(int_len);
                let frac = frac.trim_end_matches('0');
                if frac.is_empty() {
                    int_part.to_string()
                } else {
                    format!("{int_part}.{frac}")
                }
            }
        } else {
            let padded = format!("{}{}", "0".repeat((-exponent - 1) as usize), digits);
            format!("0.{}", padded.trim_end_matches('0'))
        }
    } else {
        let (lead, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        if rest.is_empty() {
            format!("{lead}e{exponent}")
        } else {
            format!("{lead}.{rest}e{exponent}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Rounds to the 12-significant-digit value that serialization emits.
pub fn round_sig12(x: f64) -> f64 {
    format_sig12(x).parse().expect("own formatting parses")
}

fn optional(x: Option<f64>) -> String {
    x.map(format_sig12).unwrap_or_default()
}

/// Writes rows in the chosen format. Output is byte-deterministic for a
/// given row list.
pub fn emit<W: Write>(rows: &[SweepRow], format: Format, writer: &mut W) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(writer, "{CSV_HEADER}")?;
            for row in rows {
                writeln!(
                    writer,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    row.devices,
                    row.payload,
                    row.mode,
                    row.delta,
                    format_sig12(row.ps_analytic),
                    format_sig12(row.g_analytic),
                    format_sig12(row.e_analytic),
                    optional(row.ps_sim_mean),
                    optional(row.ps_sim_stderr),
                    optional(row.g_sim_mean),
                    optional(row.e_sim_mean),
                    row.seeds,
                )?;
            }
        }
        Format::Json => {
            let rounded: Vec<SweepRow> = rows
                .iter()
                .map(|row| SweepRow {
                    ps_analytic: round_sig12(row.ps_analytic),
                    g_analytic: round_sig12(row.g_analytic),
                    e_analytic: round_sig12(row.e_analytic),
                    ps_sim_mean: row.ps_sim_mean.map(round_sig12),
                    ps_sim_stderr: row.ps_sim_stderr.map(round_sig12),
                    g_sim_mean: row.g_sim_mean.map(round_sig12),
                    e_sim_mean: row.e_sim_mean.map(round_sig12),
                    ..row.clone()
                })
                .collect();
            serde_json::to_writer_pretty(&mut *writer, &rounded)?;
            writeln!(writer)?;
        }
    }
    Ok(())
}

pub fn emit_to_string(rows: &[SweepRow], format: Format) -> String {
    let mut buffer = Vec::new();
    emit(rows, format, &mut buffer).expect("in-memory write");
    String::from_utf8(buffer).expect("utf-8 output")
}

/// Parses CSV produced by [`emit`] back into rows.
pub fn parse_rows(csv: &str) -> Result<Vec<SweepRow>, String> {
    let mut lines = csv.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => return Err(format!("unexpected header: {other:?}")),
    }
    let mut rows = Vec::new();
    for (number, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(format!("line {}: expected 12 fields", number + 2));
        }
        let required = |i: usize| -> Result<f64, String> {
            fields[i]
                .parse()
                .map_err(|e| format!("line {}: field {}: {e}", number + 2, i + 1))
        };
        let opt = |i: usize| -> Result<Option<f64>, String> {
            if fields[i].is_empty() {
                Ok(None)
            } else {
                required(i).map(Some)
            }
        };
        rows.push(SweepRow {
            devices: fields[0]
                .parse()
                .map_err(|e| format!("line {}: M: {e}", number + 2))?,
            payload: fields[1]
                .parse()
                .map_err(|e| format!("line {}: l: {e}", number + 2))?,
            mode: fields[2].to_string(),
            delta: fields[3].to_string(),
            ps_analytic: required(4)?,
            g_analytic: required(5)?,
            e_analytic: required(6)?,
            ps_sim_mean: opt(7)?,
            ps_sim_stderr: opt(8)?,
            g_sim_mean: opt(9)?,
            e_sim_mean: opt(10)?,
            seeds: fields[11]
                .parse()
                .map_err(|e| format!("line {}: seeds: {e}", number + 2))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row() -> SweepRow {
        SweepRow {
            devices: 20000,
            payload: 10,
            mode: "DR8".to_string(),
            delta: "6:1".to_string(),
            ps_analytic: 0.9849718347529597,
            g_analytic: 218.88262994510214,
            e_analytic: 69.50047379883938,
            ps_sim_mean: Some(0.97),
            ps_sim_stderr: Some(0.0012345678901234),
            g_sim_mean: None,
            e_sim_mean: None,
            seeds: 10,
        }
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(1.0), "1");
        assert_eq!(format_sig12(0.05), "0.05");
        assert_eq!(format_sig12(0.35), "0.35");
        assert_eq!(format_sig12(218.88262994510214), "218.882629945");
        assert_eq!(format_sig12(1e15), "1e15");
        assert_eq!(format_sig12(-2.5e-7), "-2.5e-7");
        assert_eq!(format_sig12(0.0001), "0.0001");
        // Longest decimal still parses to the rounded value.
        let x = 0.9849718347529597;
        assert_eq!(format_sig12(x).parse::<f64>().unwrap(), round_sig12(x));
    }

    #[test]
    fn single_row_csv_has_header_plus_one_line() {
        let csv = emit_to_string(&[sample_row()], Format::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("20000,10,DR8,6:1,"));
    }

    #[test]
    fn csv_round_trip_preserves_rows_at_output_precision() {
        let rows = vec![sample_row()];
        let parsed = parse_rows(&emit_to_string(&rows, Format::Csv)).unwrap();
        assert_eq!(parsed.len(), 1);
        let (a, b) = (&rows[0], &parsed[0]);
        assert_eq!(a.devices, b.devices);
        assert_eq!(a.mode, b.mode);
        assert_eq!(a.delta, b.delta);
        assert_eq!(round_sig12(a.ps_analytic), b.ps_analytic);
        assert_eq!(round_sig12(a.g_analytic), b.g_analytic);
        assert_eq!(a.ps_sim_stderr.map(round_sig12), b.ps_sim_stderr);
        assert_eq!(b.g_sim_mean, None);
    }

    #[test]
    fn json_uses_csv_field_names_and_nulls() {
        let json = emit_to_string(&[sample_row()], Format::Json);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let row = &value.as_array().unwrap()[0];
        assert_eq!(row["M"], 20000);
        assert_eq!(row["l"], 10);
        assert_eq!(row["Ps_analytic"], 0.984971834753);
        assert!(row["G_sim_mean"].is_null());
    }
}
