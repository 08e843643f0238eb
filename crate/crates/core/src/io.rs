//! Plot-ready text outputs: trajectory CSV, histogram document, run manifest.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::ensemble::{hex_digest, EnsembleResult, SliceReport, StatusCounts};
use crate::error::{QtrajError, Result};
use crate::sampling::Theory;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const TRAJECTORY_HEADER: &str = "traj_id,t,x,p,status";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trajectories(result: &EnsembleResult, path: &Path) -> Result<()> {
    let wrap = |e| QtrajError::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(wrap)?);
    writeln!(out, "{TRAJECTORY_HEADER}").map_err(wrap)?;
    for (id, traj) in result.trajectories.iter().enumerate() {
        let status = traj.status.as_str();
        for s in &traj.samples {
            writeln!(out, "{id},{},{},{},{status}", fmt_f64(s.t), fmt_f64(s.x), fmt_f64(s.p))
                .map_err(wrap)?;
        }
    }
    out.flush().map_err(wrap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub traj_id: usize,
    pub t: f64,
    pub x: f64,
    pub p: f64,
    pub status: String,
}

pub fn read_trajectories(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let wrap = |e| QtrajError::io(path, e);
    let reader = BufReader::new(File::open(path).map_err(wrap)?);
    let bad = |line: usize| {
        QtrajError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("malformed row {line}")),
        )
    };
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(wrap)?;
        if i == 0 {
            if line != TRAJECTORY_HEADER {
                return Err(bad(1));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad(i + 1));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(i + 1));
        rows.push(TrajectoryRow {
            traj_id: fields[0].parse().map_err(|_| bad(i + 1))?,
            t: num(fields[1])?,
            x: num(fields[2])?,
            p: num(fields[3])?,
            status: fields[4].to_string(),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub theory: Theory,
    pub config_digest: String,
    pub status_counts: StatusCounts,
    pub slices: Vec<SliceReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramDocument {
    pub tool_version: String,
    pub runs: Vec<RunSection>,
}

impl HistogramDocument {
    pub fn new(runs: Vec<RunSection>) -> Self {
        HistogramDocument {
            tool_version: TOOL_VERSION.to_string(),
            runs,
        }
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let wrap = |e| QtrajError::io(path, e);
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| QtrajError::io(path, std::io::Error::other(e)))?;
    text.push('\n');
    std::fs::write(path, text).map_err(wrap)
}

pub fn write_histograms(doc: &HistogramDocument, path: &Path) -> Result<()> {
    write_json(doc, path)
}

pub fn read_histograms(path: &Path) -> Result<HistogramDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| QtrajError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| QtrajError::io(path, std::io::Error::other(e)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub config: RunConfig,
    pub master_seed: u64,
    /// Seconds since the Unix epoch.
    pub started_unix: f64,
    pub finished_unix: f64,
    pub status_counts: Vec<(Theory, StatusCounts)>,
    pub outputs: Vec<OutputEntry>,
}

pub fn file_digest(path: &Path) -> Result<OutputEntry> {
    let bytes = std::fs::read(path).map_err(|e| QtrajError::io(path, e))?;
    Ok(OutputEntry {
        file: path
            .file_name()
            .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned()),
        sha256: hex_digest(&bytes),
        bytes: bytes.len() as u64,
    })
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<()> {
    write_json(manifest, path)
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| QtrajError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| QtrajError::io(path, std::io::Error::other(e)))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| QtrajError::io(dir, e))?;
    Ok(dir.to_path_buf())
}
