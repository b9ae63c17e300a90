//! Result-file formats: CSV with round-trippable doubles and the run
//! manifest written beside every experiment's outputs.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

/// Formats a double with 17 significant digits so that parsing the text
/// recovers the exact bit pattern.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Exponential-fit report for model-error sweeps: n * epsilon(t)
/// approximated by c (e^{t / t_ent} - 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub c: f64,
    pub t_ent: f64,
    pub rss: f64,
    pub n_points: usize,
}

/// Wall-clock fields, excluded from reproducibility comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timestamp {
    pub started_unix: u64,
    pub wall_seconds: f64,
}

/// Manifest written as `run_manifest.json` beside the result files.
/// Everything except `timestamp` is reproducible for a fixed config,
/// seed, and machine.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub experiment: String,
    pub seed: u64,
    pub threads: usize,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub failed_cells: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitReport>,
    pub timestamp: Timestamp,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> anyhow::Result<PathBuf> {
        let path = dir.join("run_manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Builds a CSV from a header and formatted rows.
pub fn write_csv(path: &Path, header: &str, rows: &[String]) -> anyhow::Result<()> {
    let mut text = String::with_capacity(rows.len() * 64 + header.len() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatted_doubles_round_trip() {
        for &x in &[
            0.0,
            1.0,
            -1.0 / 3.0,
            std::f64::consts::PI,
            1.234_567_890_123_456_7e-200,
            f64::MAX,
        ] {
            let parsed: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits(), "{x}");
        }
        assert!(fmt_f64(f64::NAN).contains("NaN"));
    }
}
