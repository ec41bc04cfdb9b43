//! JSON-Lines rows plus a summary file next to them.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ensemble::{Aggregates, EnsembleResult, Row, SCHEMA_VERSION};
use crate::circuit::CircuitSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub spec: CircuitSpec,
    pub trajectories: usize,
    pub aggregates: Aggregates,
}

/// `rows.jsonl` → `rows.jsonl.summary.json`.
pub fn summary_path(rows_path: &Path) -> PathBuf {
    let mut name = rows_path.as_os_str().to_owned();
    name.push(".summary.json");
    PathBuf::from(name)
}

fn check_version(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::Schema { expected: SCHEMA_VERSION, found });
    }
    Ok(())
}

pub fn write_rows(path: &Path, rows: &[Row]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)?;
        let found = value.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0);
        check_version(found as u32)?;
        rows.push(serde_json::from_value(value)?);
    }
    Ok(rows)
}

/// Writes the rows to `path` and the summary alongside.
pub fn persist(result: &EnsembleResult, path: &Path) -> Result<()> {
    write_rows(path, &result.rows)?;
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        spec: result.spec.clone(),
        trajectories: result.rows.len(),
        aggregates: result.aggregates.clone(),
    };
    fs::write(summary_path(path), serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<EnsembleResult> {
    let summary: Summary = {
        let text = fs::read_to_string(summary_path(path))?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        check_version(value.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32)?;
        serde_json::from_value(value)?
    };
    let rows = read_rows(path)?;
    if rows.len() != summary.trajectories {
        return Err(Error::Analysis(format!(
            "summary lists {} trajectories but {} rows were found",
            summary.trajectories,
            rows.len()
        )));
    }
    let aggregates = Aggregates::from_rows(&rows);
    Ok(EnsembleResult { spec: summary.spec, rows, aggregates })
}

/// Reads every `*.jsonl` under `path` (or `path` itself when it is a file).
pub fn read_rows_from(path: &Path) -> Result<Vec<Row>> {
    if !path.is_dir() {
        return read_rows(path);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for f in files {
        rows.extend(read_rows(&f)?);
    }
    Ok(rows)
}

fn canonical_line(row: &Row) -> Result<String> {
    let mut value = serde_json::to_value(row)?;
    if let Some(map) = value.as_object_mut() {
        map.remove("wall_ms");
    }
    Ok(value.to_string())
}

/// Rows sorted by `(master_seed, trajectory_index)`, with wall time removed
/// and keys in lexicographic order. Two runs of the same ensemble produce
/// identical output whatever the worker count or shard layout.
pub fn canonical_jsonl(rows: &[Row]) -> Result<String> {
    let mut keyed: Vec<(u64, u64, String)> =
        rows.iter().map(|r| Ok((r.master_seed, r.trajectory_index, canonical_line(r)?))).collect::<Result<_>>()?;
    keyed.sort();
    let mut out = String::new();
    for (_, _, line) in keyed {
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Concatenates shard files into `out`, ordered by `(master_seed,
/// trajectory_index)` with ties broken by the row's canonical text.
pub fn merge_shards(shards: &[PathBuf], out: &Path) -> Result<Vec<Row>> {
    let mut keyed = Vec::new();
    for shard in shards {
        for row in read_rows(shard)? {
            keyed.push((row.master_seed, row.trajectory_index, canonical_line(&row)?, row));
        }
    }
    keyed.sort_by(|a, b| (a.0, a.1, &a.2).cmp(&(b.0, b.1, &b.2)));
    let rows: Vec<Row> = keyed.into_iter().map(|k| k.3).collect();
    write_rows(out, &rows)?;
    Ok(rows)
}
