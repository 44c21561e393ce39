//! Writes a study's tables and a plain-text manifest describing them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Result, SimError};
use crate::scenario::OutputFormat;
use crate::studies::{StudyOutput, TableOutput};

pub const MANIFEST: &str = "manifest.txt";

fn unit_of(t: &TableOutput, column: &str) -> String {
    t.table
        .columns
        .iter()
        .find(|c| c.name == column)
        .map(|c| format!("{} [{}]", c.name, c.unit))
        .unwrap_or_else(|| column.to_string())
}

/// The manifest text: metadata, then one block per file.
pub fn manifest(output: &StudyOutput, format: OutputFormat) -> String {
    let m = &output.metadata;
    let mut s = String::new();
    let _ = writeln!(s, "study: {}", m.study);
    let _ = writeln!(s, "seed: {}", m.seed);
    let _ = writeln!(s, "scale: {}", m.scale);
    let _ = writeln!(s, "generator: {}", m.generator);
    let _ = writeln!(s, "scenario_hash: {}", m.scenario_hash);
    for t in &output.tables {
        let _ = writeln!(s);
        let _ = writeln!(s, "{}.{}", t.table.name, format.extension());
        let _ = writeln!(s, "  {}", t.description);
        let _ = writeln!(s, "  rows: {}", t.table.rows.len());
        let _ = writeln!(s, "  columns:");
        for c in &t.table.columns {
            let _ = writeln!(s, "    {} [{}]", c.name, c.unit);
        }
        if let Some(p) = &t.plot {
            let ys: Vec<String> = p.y.iter().map(|y| unit_of(t, y)).collect();
            let _ = write!(s, "  plot: x = {}, y = {}", unit_of(t, p.x), ys.join(", "));
            if let Some(series) = p.series {
                let _ = write!(s, ", one curve per {series}");
            }
            let _ = writeln!(s);
        }
    }
    s
}

/// Writes every table into `dir` (created if missing) and returns the paths
/// written, manifest last.
pub fn write_results(output: &StudyOutput, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| SimError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::with_capacity(output.tables.len() + 1);
    for t in &output.tables {
        let path = dir.join(format!("{}.{}", t.table.name, format.extension()));
        match format {
            OutputFormat::Csv => t.table.write_csv(&path)?,
            OutputFormat::Json => t.table.write_json(&path, &output.metadata)?,
        }
        log::debug!("wrote {}", path.display());
        written.push(path);
    }
    let path = dir.join(MANIFEST);
    fs::write(&path, manifest(output, format)).map_err(|source| SimError::Io {
        path: path.clone(),
        source,
    })?;
    written.push(path);
    Ok(written)
}
