//! Text formats for cluster tables, element pattern tables and array geometry.
//!
//! The formats are line based. Blank lines and lines starting with `#` are
//! ignored and fields may be separated by whitespace or commas.
//!
//! Cluster table:
//!
//! ```text
//! spread.asd 10      # intra-cluster spreads, degrees
//! spread.asa 22
//! spread.zsd 3
//! spread.zsa 7
//! xpr 8              # cross-polarization ratio, dB
//! # delay(normalized) power(dB) aod(deg) aoa(deg) zod(deg) zoa(deg)
//! 0.0000 0 9.3 -173.3 105.8 78.9
//! ```
//!
//! Pattern table, one row per grid point in any order:
//!
//! ```text
//! # theta(deg) phi(deg) re(F_theta) im(F_theta) re(F_phi) im(F_phi)
//! 0 0 1 0 0 0
//! ```
//!
//! The θ samples must cover [0°, 90°] and every (θ, φ) pair of the grid must
//! appear exactly once.
//!
//! Array geometry: one `x y z` row per element, in metres. The first row is
//! the reference element.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use eit_core::cdl::{CdlCluster, CdlTable, ClusterSpreads};
use eit_core::pattern::PatternTable;
use eit_core::{Complex64, Position3};

/// Prefix that selects a table shipped with the crate instead of a file.
pub const BUILTIN_PREFIX: &str = "builtin:";

const CDL_B: &str = include_str!("../data/cdl_b.txt");

pub fn builtin_cluster_table(name: &str) -> Option<&'static str> {
    match name {
        "cdl-b" => Some(CDL_B),
        _ => None,
    }
}

fn fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn number(tok: &str, line: usize, what: &str, errors: &mut Vec<String>) -> f64 {
    match tok.parse::<f64>() {
        Ok(v) if v.is_finite() => v,
        _ => {
            errors.push(format!("line {line}: {what} '{tok}' is not a finite number"));
            f64::NAN
        }
    }
}

/// Parses a cluster table; every problem is reported with its line.
pub fn parse_cluster_table(text: &str) -> Result<CdlTable, Vec<String>> {
    let mut errors = Vec::new();
    let mut header: BTreeMap<&str, f64> = BTreeMap::new();
    let mut clusters = Vec::new();
    for (ln, line) in content_lines(text) {
        let f = fields(line);
        if f[0].parse::<f64>().is_err() {
            let key = f[0];
            if !["spread.asd", "spread.asa", "spread.zsd", "spread.zsa", "xpr"].contains(&key) {
                errors.push(format!("line {ln}: unknown header '{key}'"));
                continue;
            }
            if f.len() != 2 {
                errors.push(format!("line {ln}: header '{key}' takes exactly one value"));
                continue;
            }
            let v = number(f[1], ln, key, &mut errors);
            if header.insert(key, v).is_some() {
                errors.push(format!("line {ln}: header '{key}' repeated"));
            }
            continue;
        }
        if f.len() != 6 {
            errors.push(format!("line {ln}: cluster rows have 6 columns, found {}", f.len()));
            continue;
        }
        let names = ["delay", "power", "aod", "aoa", "zod", "zoa"];
        let v: Vec<f64> = f.iter().zip(names).map(|(t, n)| number(t, ln, n, &mut errors)).collect();
        if v.iter().any(|x| x.is_nan()) {
            continue;
        }
        if v[0] < 0.0 {
            errors.push(format!("line {ln}: delay must be nonnegative"));
        }
        if !(0.0..=180.0).contains(&v[4]) || !(0.0..=180.0).contains(&v[5]) {
            errors.push(format!("line {ln}: zenith angles must lie in [0, 180] deg"));
        }
        clusters.push(CdlCluster {
            delay: v[0],
            power_db: v[1],
            aod_deg: v[2],
            aoa_deg: v[3],
            zod_deg: v[4],
            zoa_deg: v[5],
        });
    }
    for key in ["spread.asd", "spread.asa", "spread.zsd", "spread.zsa", "xpr"] {
        if !header.contains_key(key) {
            errors.push(format!("missing header '{key}'"));
        }
    }
    for key in ["spread.asd", "spread.asa", "spread.zsd", "spread.zsa"] {
        if header.get(key).is_some_and(|v| *v < 0.0) {
            errors.push(format!("'{key}' must be nonnegative"));
        }
    }
    if clusters.is_empty() {
        errors.push("no cluster rows".into());
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let spreads = ClusterSpreads {
        asd_deg: header["spread.asd"],
        asa_deg: header["spread.asa"],
        zsd_deg: header["spread.zsd"],
        zsa_deg: header["spread.zsa"],
    };
    CdlTable::new(clusters, spreads, header["xpr"]).map_err(|e| vec![e.to_string()])
}

/// Parses a pattern table into the core representation (angles in radians).
pub fn parse_pattern_table(text: &str) -> Result<PatternTable, Vec<String>> {
    let mut errors = Vec::new();
    let mut points: BTreeMap<(u64, u64), (usize, Complex64, Complex64)> = BTreeMap::new();
    let key = |v: f64| (v + 0.0).to_bits();
    for (ln, line) in content_lines(text) {
        let f = fields(line);
        if f.len() != 6 {
            errors.push(format!("line {ln}: pattern rows have 6 columns, found {}", f.len()));
            continue;
        }
        let names = ["theta", "phi", "re(F_theta)", "im(F_theta)", "re(F_phi)", "im(F_phi)"];
        let v: Vec<f64> = f.iter().zip(names).map(|(t, n)| number(t, ln, n, &mut errors)).collect();
        if v.iter().any(|x| x.is_nan()) {
            continue;
        }
        if !(0.0..=180.0).contains(&v[0]) {
            errors.push(format!("line {ln}: theta {} outside [0, 180] deg", v[0]));
            continue;
        }
        let k = (key(v[0]), key(v[1]));
        let val = (ln, Complex64::new(v[2], v[3]), Complex64::new(v[4], v[5]));
        if let Some((first, ..)) = points.insert(k, val) {
            errors.push(format!("line {ln}: grid point ({}, {}) already given on line {first}", v[0], v[1]));
        }
    }
    let mut thetas: Vec<f64> = points.keys().map(|k| f64::from_bits(k.0)).collect();
    let mut phis: Vec<f64> = points.keys().map(|k| f64::from_bits(k.1)).collect();
    for axis in [&mut thetas, &mut phis] {
        axis.sort_by(f64::total_cmp);
        axis.dedup();
    }
    if points.is_empty() {
        errors.push("no pattern rows".into());
    } else if points.len() != thetas.len() * phis.len() {
        errors.push(format!(
            "{} rows do not form a full grid of {} theta x {} phi values",
            points.len(),
            thetas.len(),
            phis.len()
        ));
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let mut f_theta = Vec::with_capacity(points.len());
    let mut f_phi = Vec::with_capacity(points.len());
    for t in &thetas {
        for p in &phis {
            let (_, a, b) = points[&(key(*t), key(*p))];
            f_theta.push(a);
            f_phi.push(b);
        }
    }
    let rad = |v: Vec<f64>| v.into_iter().map(f64::to_radians).collect();
    PatternTable::new(rad(thetas), rad(phis), f_theta, f_phi).map_err(|e| vec![e.to_string()])
}

pub fn parse_geometry(text: &str) -> Result<Vec<Position3>, Vec<String>> {
    let mut errors = Vec::new();
    let mut out: Vec<Position3> = Vec::new();
    for (ln, line) in content_lines(text) {
        let f = fields(line);
        if f.len() != 3 {
            errors.push(format!("line {ln}: geometry rows have 3 columns, found {}", f.len()));
            continue;
        }
        let v: Vec<f64> = f.iter().zip(["x", "y", "z"]).map(|(t, n)| number(t, ln, n, &mut errors)).collect();
        if v.iter().any(|x| x.is_nan()) {
            continue;
        }
        let p = Position3::new(v[0], v[1], v[2]);
        if out.iter().any(|q| q.distance(&p) == 0.0) {
            errors.push(format!("line {ln}: duplicate element position"));
        }
        out.push(p);
    }
    if out.is_empty() && errors.is_empty() {
        errors.push("no element rows".into());
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

/// Resolves `reference` (a path relative to `base`, or `builtin:<name>`) and
/// parses it. Errors are prefixed with `field` and the file name.
pub fn load_cluster_table(reference: &str, base: &Path, field: &str) -> Result<CdlTable, Vec<String>> {
    let (text, label) = read_reference(reference, base, field, builtin_cluster_table)?;
    parse_cluster_table(&text).map_err(|errs| prefix(errs, field, &label))
}

pub fn load_pattern_table(reference: &str, base: &Path, field: &str) -> Result<PatternTable, Vec<String>> {
    let (text, label) = read_reference(reference, base, field, |_| None)?;
    parse_pattern_table(&text).map_err(|errs| prefix(errs, field, &label))
}

pub fn load_geometry(reference: &str, base: &Path, field: &str) -> Result<Vec<Position3>, Vec<String>> {
    let (text, label) = read_reference(reference, base, field, |_| None)?;
    parse_geometry(&text).map_err(|errs| prefix(errs, field, &label))
}

pub fn resolve(reference: &str, base: &Path) -> PathBuf {
    let p = Path::new(reference);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn read_reference(
    reference: &str,
    base: &Path,
    field: &str,
    builtin: impl Fn(&str) -> Option<&'static str>,
) -> Result<(String, String), Vec<String>> {
    if let Some(name) = reference.strip_prefix(BUILTIN_PREFIX) {
        return builtin(name)
            .map(|t| (t.to_string(), reference.to_string()))
            .ok_or_else(|| vec![format!("{field}: no built-in table named '{name}'")]);
    }
    let path = resolve(reference, base);
    std::fs::read_to_string(&path)
        .map(|t| (t, path.display().to_string()))
        .map_err(|e| vec![format!("{field}: cannot read {}: {e}", path.display())])
}

fn prefix(errors: Vec<String>, field: &str, label: &str) -> Vec<String> {
    errors.into_iter().map(|e| format!("{field}: {label}: {e}")).collect()
}
