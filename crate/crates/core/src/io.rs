//! File formats: group and differential JSON inputs, point CSVs, fields as
//! JSON header + CSV + raw little-endian `f64` column, patch dumps.
//!
//! Floats in CSV are written with 17 significant digits; `∞` is the token
//! `inf`. Lines starting with `#` in CSV files are comments.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss_equation::{ConformalFactorField, BOUNDARY_CONDITION};
use crate::grid::DiskGrid;
use crate::kleinian::GroupPresentation;
use crate::moebius::{BoundaryPoint, MoebiusTransform};
use crate::quad_diff::QuadDifferential;
use crate::surface::ImmersedPatch;

/// Upper bound on generators accepted from a file.
pub const MAX_GENERATORS: usize = 64;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{what}: {e} (line {}, column {})", e.line(), e.column()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    label: String,
    generators: Vec<[[[f64; 2]; 2]; 2]>,
}

fn complex(c: [f64; 2]) -> Complex64 {
    Complex64::new(c[0], c[1])
}

/// `{"label": ..., "generators": [[[a, b], [c, d]], ...]}` with every entry a
/// `[re, im]` pair.
pub fn parse_group_json(text: &str) -> Result<GroupPresentation> {
    let file: GroupFile = serde_json::from_str(text).map_err(|e| json_error("group file", e))?;
    if file.generators.len() > MAX_GENERATORS {
        return Err(Error::Parse(format!(
            "group file: {} generators exceeds the limit of {MAX_GENERATORS}",
            file.generators.len()
        )));
    }
    let generators = file
        .generators
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let entries = [m[0][0], m[0][1], m[1][0], m[1][1]];
            if entries.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Parse(format!("group file: generator {i} has a non-finite entry")));
            }
            MoebiusTransform::new(complex(m[0][0]), complex(m[0][1]), complex(m[1][0]), complex(m[1][1]))
                .map_err(|e| Error::Parse(format!("group file: generator {i}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    GroupPresentation::new(file.label, generators).map_err(|e| Error::Parse(format!("group file: {e}")))
}

pub fn group_to_json(group: &GroupPresentation) -> String {
    let pair = |c: Complex64| [c.re, c.im];
    let file = GroupFile {
        label: group.label.clone(),
        generators: group
            .generators
            .iter()
            .map(|g| [[pair(g.a), pair(g.b)], [pair(g.c), pair(g.d)]])
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

/// A JSON list of Taylor coefficients `[re, im]`, constant term first.
pub fn parse_differential_json(text: &str) -> Result<QuadDifferential> {
    let coeffs: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| json_error("differential file", e))?;
    if coeffs.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Parse("differential file: non-finite coefficient".into()));
    }
    QuadDifferential::new(coeffs.into_iter().map(complex).collect())
        .map_err(|e| Error::Parse(format!("differential file: {e}")))
}

pub fn differential_to_json(alpha: &QuadDifferential) -> String {
    let coeffs: Vec<[f64; 2]> = alpha.coefficients().iter().map(|c| [c.re, c.im]).collect();
    serde_json::to_string(&coeffs).expect("plain data serializes")
}

fn comment_lines(comments: &[String]) -> String {
    comments.iter().map(|c| format!("# {c}\n")).collect()
}

/// `re,im` rows; `∞` is written as `inf,inf`.
pub fn points_to_csv(points: &[BoundaryPoint], comments: &[String]) -> String {
    let mut out = comment_lines(comments);
    out.push_str("re,im\n");
    for p in points {
        match p {
            BoundaryPoint::Finite(z) => {
                let _ = writeln!(out, "{},{}", fmt_f64(z.re), fmt_f64(z.im));
            }
            BoundaryPoint::Infinity => out.push_str("inf,inf\n"),
        }
    }
    out
}

fn parse_number(field: &str, line: usize, column: usize) -> Result<f64> {
    let field = field.trim();
    field
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}, column {column}: '{field}' is not a number")))
}

/// Inverse of [`points_to_csv`].
pub fn parse_points_csv(text: &str) -> Result<Vec<BoundaryPoint>> {
    let mut points = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        if !seen_header {
            if row != "re,im" {
                return Err(Error::Parse(format!("line {line}: expected header 're,im'")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!("line {line}: expected 2 fields, found {}", fields.len())));
        }
        if fields[0].trim() == "inf" && fields[1].trim() == "inf" {
            points.push(BoundaryPoint::Infinity);
            continue;
        }
        let re = parse_number(fields[0], line, 1)?;
        let im = parse_number(fields[1], line, 2)?;
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Parse(format!("line {line}: infinity must be written 'inf,inf'")));
        }
        points.push(BoundaryPoint::from_re_im(re, im));
    }
    if !seen_header {
        return Err(Error::Parse("missing header 're,im'".into()));
    }
    Ok(points)
}

/// Raw little-endian `f64` column.
pub fn encode_f64_column(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn decode_f64_column(bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() % 8 != 0 {
        return Err(Error::Parse(format!("binary column length {} is not a multiple of 8", bytes.len())));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk"))).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub format: String,
    pub radius: f64,
    pub side: usize,
    pub nodes: usize,
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    pub boundary_condition: String,
    pub config_hash: String,
}

pub const FIELD_FORMAT: &str = "afk-field-v1";
pub const PATCH_FORMAT: &str = "afk-patch-v1";

/// Largest grid side accepted from a header.
pub const MAX_GRID_SIDE: usize = 4097;

pub fn field_header(u: &ConformalFactorField, config_hash: &str) -> FieldHeader {
    FieldHeader {
        format: FIELD_FORMAT.into(),
        radius: u.grid.radius(),
        side: u.grid.side(),
        nodes: u.grid.len(),
        residual_norm: u.residual_norm,
        converged: u.converged,
        iterations: u.iterations,
        boundary_condition: BOUNDARY_CONDITION.into(),
        config_hash: config_hash.into(),
    }
}

pub fn field_to_csv(u: &ConformalFactorField, comments: &[String]) -> String {
    let mut out = comment_lines(comments);
    out.push_str("node,x,y,u\n");
    for (k, v) in u.values.iter().enumerate() {
        let z = u.grid.point(k);
        let _ = writeln!(out, "{k},{},{},{}", fmt_f64(z.re), fmt_f64(z.im), fmt_f64(*v));
    }
    out
}

fn header_grid(radius: f64, side: usize) -> Result<DiskGrid> {
    if side > MAX_GRID_SIDE {
        return Err(Error::Parse(format!("grid side {side} exceeds {MAX_GRID_SIDE}")));
    }
    DiskGrid::new(radius, side).map_err(|e| Error::Parse(format!("header: {e}")))
}

/// Rebuilds a field from its JSON header and binary column.
pub fn decode_field(header_json: &str, column: &[u8]) -> Result<ConformalFactorField> {
    let header: FieldHeader = serde_json::from_str(header_json).map_err(|e| json_error("field header", e))?;
    if header.format != FIELD_FORMAT {
        return Err(Error::Parse(format!("unknown field format '{}'", header.format)));
    }
    if Some(column.len()) != header.nodes.checked_mul(8) {
        return Err(Error::Parse(format!("header lists {} nodes, column holds {} bytes", header.nodes, column.len())));
    }
    let grid = header_grid(header.radius, header.side)?;
    if grid.len() != header.nodes {
        return Err(Error::Parse(format!("header lists {} nodes, grid has {}", header.nodes, grid.len())));
    }
    let values = decode_f64_column(column)?;
    let mut u = ConformalFactorField::from_values(grid, values).map_err(|e| Error::Parse(e.to_string()))?;
    u.residual_norm = header.residual_norm;
    u.converged = header.converged;
    u.iterations = header.iterations;
    Ok(u)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchHeader {
    pub format: String,
    pub radius: f64,
    pub side: usize,
    pub nodes: usize,
    /// Column names, stored one after another in the binary file.
    pub columns: Vec<String>,
    pub loop_error: f64,
    pub gram_defect: f64,
    pub valid: bool,
    pub config_hash: String,
}

pub const PATCH_COLUMNS: [&str; 6] = ["z_re", "z_im", "t", "normal_x", "normal_y", "normal_t"];

/// Header and column-after-column binary payload.
pub fn encode_patch(patch: &ImmersedPatch, config_hash: &str) -> (PatchHeader, Vec<u8>) {
    let header = PatchHeader {
        format: PATCH_FORMAT.into(),
        radius: patch.grid.radius(),
        side: patch.grid.side(),
        nodes: patch.grid.len(),
        columns: PATCH_COLUMNS.iter().map(|s| s.to_string()).collect(),
        loop_error: patch.loop_error,
        gram_defect: patch.gram_defect,
        valid: patch.valid,
        config_hash: config_hash.into(),
    };
    let f = &patch.frames;
    let cols: [Vec<f64>; 6] = [
        f.iter().map(|p| p.position.z.re).collect(),
        f.iter().map(|p| p.position.z.im).collect(),
        f.iter().map(|p| p.position.t).collect(),
        f.iter().map(|p| p.normal[0]).collect(),
        f.iter().map(|p| p.normal[1]).collect(),
        f.iter().map(|p| p.normal[2]).collect(),
    ];
    let bytes = cols.iter().flat_map(|c| encode_f64_column(c)).collect();
    (header, bytes)
}

/// Splits a patch payload back into its named columns.
pub fn decode_patch_columns(header_json: &str, bytes: &[u8]) -> Result<Vec<(String, Vec<f64>)>> {
    let header: PatchHeader = serde_json::from_str(header_json).map_err(|e| json_error("patch header", e))?;
    if header.format != PATCH_FORMAT {
        return Err(Error::Parse(format!("unknown patch format '{}'", header.format)));
    }
    let values = decode_f64_column(bytes)?;
    let expected = header.nodes.checked_mul(header.columns.len());
    if expected != Some(values.len()) || header.columns.is_empty() || header.nodes == 0 {
        return Err(Error::Parse(format!(
            "payload has {} values, header expects {} columns of {} nodes",
            values.len(),
            header.columns.len(),
            header.nodes
        )));
    }
    Ok(header
        .columns
        .iter()
        .zip(values.chunks(header.nodes))
        .map(|(name, chunk)| (name.clone(), chunk.to_vec()))
        .collect())
}
