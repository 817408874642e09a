//! CSV and JSON writers. Every file opens with the tool version and the
//! config hash; floats are written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::CliError;
use crate::analytic::EnergyTrace;
use crate::bathdesign::SpectralRow;
use crate::thermocycle::{CycleReport, LevelRow};
use crate::VERSION;

const HEADER_PREFIX: &str = "# optocycle ";
const HASH_KEY: &str = "config_sha256=";

pub fn header_line(config_hash: &str) -> String {
    format!("{HEADER_PREFIX}{VERSION} {HASH_KEY}{config_hash}\n")
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn bad_file(path: &Path, reason: impl Into<String>) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, reason.into()),
    }
}

/// `t,value` columns.
pub fn emit_trace_csv(trace: &EnergyTrace, path: &Path, config_hash: &str) -> Result<(), CliError> {
    if trace.is_empty() {
        return Err(bad_file(path, "refusing to write an empty trace"));
    }
    let mut out = header_line(config_hash);
    out.push_str("t,value\n");
    for (t, v) in trace.times().iter().zip(trace.values()) {
        let _ = writeln!(out, "{},{}", num(*t), num(*v));
    }
    write_file(path, &out)
}

/// Times and values of a file written by [`emit_trace_csv`].
pub fn read_trace_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = read_file(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    if lines.next() != Some("t,value") {
        return Err(bad_file(path, "missing `t,value` header row"));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let parsed = line
            .split_once(',')
            .and_then(|(t, v)| Some((t.parse::<f64>().ok()?, v.parse::<f64>().ok()?)));
        let Some((t, v)) = parsed else {
            return Err(bad_file(path, format!("malformed row {}: `{line}`", i + 1)));
        };
        times.push(t);
        values.push(v);
    }
    if times.is_empty() {
        return Err(bad_file(path, "no samples"));
    }
    Ok((times, values))
}

/// Config hash from a file header (CSV comment line or JSON field).
pub fn read_config_hash(path: &Path) -> Result<String, CliError> {
    let text = read_file(path)?;
    if let Some(line) = text.lines().next().filter(|l| l.starts_with(HEADER_PREFIX)) {
        if let Some((_, hash)) = line.split_once(HASH_KEY) {
            return Ok(hash.trim().to_string());
        }
    }
    serde_json::from_str::<serde_json::Value>(&text)
        .ok()
        .and_then(|v| v.get("config_sha256")?.as_str().map(str::to_string))
        .ok_or_else(|| bad_file(path, "no config hash header"))
}

/// One designed table per inversion.
pub fn emit_spectral_csv(tables: &[(f64, Vec<SpectralRow>)], path: &Path, config_hash: &str) -> Result<(), CliError> {
    let mut out = header_line(config_hash);
    out.push_str("inversion,j,omega,eta,weight,alpha,phase,printed_phase\n");
    for (inversion, rows) in tables {
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                num(*inversion),
                r.j,
                num(r.omega),
                num(r.eta),
                num(r.weight),
                num(r.alpha),
                num(r.phase),
                num(r.printed_phase)
            );
        }
    }
    write_file(path, &out)
}

/// `columns` header, then rows of floats.
pub fn emit_columns_csv(columns: &str, rows: &[Vec<f64>], path: &Path, config_hash: &str) -> Result<(), CliError> {
    let mut out = header_line(config_hash);
    out.push_str(columns);
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|x| num(*x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}

pub fn emit_level_csv(rows: &[LevelRow], path: &Path, config_hash: &str) -> Result<(), CliError> {
    let mut out = header_line(config_hash);
    out.push_str("period,kind,t_start,t_end,m,energy_start,energy_end\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.period_index,
            r.kind.as_str(),
            num(r.t_start),
            num(r.t_end),
            r.level,
            num(r.energy_start),
            num(r.energy_end)
        );
    }
    write_file(path, &out)
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    optocycle_version: &'a str,
    config_sha256: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn emit_cycle_json(report: &CycleReport, path: &Path, config_hash: &str) -> Result<(), CliError> {
    let stamped = Stamped {
        optocycle_version: VERSION,
        config_sha256: config_hash,
        body: report,
    };
    let mut text = serde_json::to_string_pretty(&stamped).expect("report serializes");
    text.push('\n');
    write_file(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::TraceKind;

    #[test]
    fn trace_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let values: Vec<f64> = times.iter().map(|t| (t * 1.7).sin() / 3.0 + 1e-300).collect();
        let trace = EnergyTrace::new(times.clone(), values.clone(), TraceKind::SigmaZCoefficient, 0.0).unwrap();
        emit_trace_csv(&trace, &path, "abc").unwrap();
        let (t, v) = read_trace_csv(&path).unwrap();
        assert_eq!(t, times);
        assert_eq!(v, values);
        assert_eq!(read_config_hash(&path).unwrap(), "abc");
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().nth(1), Some("t,value"));
    }

    #[test]
    fn empty_trace_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let trace = EnergyTrace::new(vec![], vec![], TraceKind::SigmaZCoefficient, 0.0).unwrap();
        assert!(emit_trace_csv(&trace, &dir.path().join("e.csv"), "x").is_err());
    }

    #[test]
    fn io_errors_carry_the_path() {
        let trace = EnergyTrace::new(vec![0.0], vec![1.0], TraceKind::SigmaZCoefficient, 0.0).unwrap();
        let path = Path::new("/nonexistent-dir/x.csv");
        let err = emit_trace_csv(&trace, path, "x").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
