//! Run directories: `<out>/<subcommand>-<timestamp>/` holding the result
//! table, `summary.json` and `manifest.json`, moved into place only once
//! complete.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};
use crate::error::{LabError, LabResult};
use crate::table::Table;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub version: String,
    pub started: String,
    pub finished: String,
    pub status: String,
    /// File name to SHA-256 hex digest.
    pub checksums: BTreeMap<String, String>,
    /// `(row, column)` of every NaN written to the results.
    pub nan_cells: Vec<(usize, String)>,
    pub error: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write(path: &Path, bytes: &[u8]) -> LabResult<()> {
    fs::write(path, bytes).map_err(|e| LabError::io(path, e))
}

fn pretty(v: &impl Serialize) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable");
    s.push(b'\n');
    s
}

/// Creates a fresh staging directory next to the final location.
fn staging(out: &Path, name: &str) -> LabResult<PathBuf> {
    fs::create_dir_all(out).map_err(|e| LabError::io(out, e))?;
    let tmp = out.join(format!(".{name}.tmp"));
    if tmp.exists() {
        fs::remove_dir_all(&tmp).map_err(|e| LabError::io(&tmp, e))?;
    }
    fs::create_dir(&tmp).map_err(|e| LabError::io(&tmp, e))?;
    Ok(tmp)
}

/// Final directory name, suffixed when a run with the same timestamp exists.
fn final_dir(out: &Path, base: &str) -> PathBuf {
    let mut dir = out.join(base);
    let mut i = 1;
    while dir.exists() {
        dir = out.join(format!("{base}-{i}"));
        i += 1;
    }
    dir
}

fn stamp(t: DateTime<Utc>) -> String {
    t.format("%Y%m%dT%H%M%S%.3fZ").to_string()
}

/// Outcome of a run that was written to disk.
pub struct Written {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

/// Writes a finished or failed run. `outcome` carries the table and summary,
/// or the error message for a diagnostic run.
pub fn write_run(
    cfg: &RunConfig,
    started: DateTime<Utc>,
    outcome: std::result::Result<(&Table, &Json), &str>,
) -> LabResult<Written> {
    let base = format!("{}-{}", cfg.subcommand, stamp(started));
    let tmp = staging(&cfg.out, &base)?;
    let mut checksums = BTreeMap::new();
    let mut nan_cells = Vec::new();
    let (status, error) = match outcome {
        Ok((table, summary)) => {
            let (name, bytes) = match cfg.format {
                Format::Csv => ("results.csv", table.to_csv().into_bytes()),
                Format::Json => ("results.json", pretty(&table.to_json())),
            };
            write(&tmp.join(name), &bytes)?;
            checksums.insert(name.to_string(), sha256_hex(&bytes));
            nan_cells = table.nan_cells();
            let s = pretty(&json!({
                "subcommand": cfg.subcommand,
                "seed": cfg.seed,
                "config": cfg.echo(),
                "rows": table.len(),
                "nan_cells": nan_cells.len(),
                "summary": summary,
            }));
            write(&tmp.join("summary.json"), &s)?;
            checksums.insert("summary.json".to_string(), sha256_hex(&s));
            ("ok", None)
        }
        Err(msg) => {
            let d = format!("{msg}\n").into_bytes();
            write(&tmp.join("diagnostic.txt"), &d)?;
            checksums.insert("diagnostic.txt".to_string(), sha256_hex(&d));
            ("failed", Some(msg.to_string()))
        }
    };
    let manifest = RunManifest {
        subcommand: cfg.subcommand.clone(),
        config: cfg.echo(),
        seed: cfg.seed,
        workers: cfg.workers,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started: started.to_rfc3339(),
        finished: Utc::now().to_rfc3339(),
        status: status.to_string(),
        checksums,
        nan_cells,
        error,
    };
    write(&tmp.join("manifest.json"), &pretty(&manifest))?;
    let dir = final_dir(&cfg.out, &base);
    fs::rename(&tmp, &dir).map_err(|e| LabError::io(&dir, e))?;
    Ok(Written { dir, manifest })
}
