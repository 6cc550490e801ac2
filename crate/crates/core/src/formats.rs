//! On-disk formats. Reals are written as decimal strings with 17 significant
//! digits; an optional parallel `*_hex` field carries the raw bit patterns.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::construct::Design;
use crate::error::{Error, Result};
use crate::exact_moments::JacobiWeight;
use crate::numeric::{format_f64, format_hex, parse_f64, parse_hex};
use crate::quadrature::Quadrature;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureFile {
    pub m: u32,
    pub n: u32,
    pub degree: u32,
    pub nodes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes_hex: Option<Vec<String>>,
    #[serde(rename = "K")]
    pub k: usize,
    pub max_abs_residual: Option<f64>,
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl QuadratureFile {
    pub fn from_quadrature(q: &Quadrature, with_hex: bool) -> Self {
        let w = q.weight();
        Self {
            m: w.m(),
            n: w.n(),
            degree: q.degree(),
            nodes: q.nodes().iter().copied().map(format_f64).collect(),
            nodes_hex: with_hex.then(|| q.nodes().iter().copied().map(format_hex).collect()),
            k: q.k(),
            max_abs_residual: finite(q.max_abs_residual()),
            certified: q.is_certified(),
            tolerance: finite(q.tolerance()),
        }
    }

    pub fn to_quadrature(&self) -> Result<Quadrature> {
        let w = JacobiWeight::new(self.m, self.n)?;
        let nodes = match &self.nodes_hex {
            Some(hex) => parse_all(hex, parse_hex, "nodes_hex")?,
            None => parse_all(&self.nodes, parse_f64, "nodes")?,
        };
        if nodes.len() != self.k {
            return Err(Error::invalid(format!(
                "K = {} but {} nodes listed",
                self.k,
                nodes.len()
            )));
        }
        Quadrature::from_parts(
            w,
            self.degree,
            nodes,
            self.certified,
            self.tolerance.unwrap_or(f64::NAN),
            self.max_abs_residual.unwrap_or(f64::NAN),
        )
    }
}

fn parse_all(items: &[String], parse: fn(&str) -> Option<f64>, field: &str) -> Result<Vec<f64>> {
    items
        .iter()
        .map(|s| parse(s).ok_or_else(|| Error::invalid(format!("bad number {s:?} in {field}"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignFile {
    pub ambient_dim: usize,
    pub degree: u32,
    pub count: usize,
    pub points: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_hex: Option<Vec<Vec<String>>>,
}

impl DesignFile {
    pub fn from_design(d: &Design, with_hex: bool) -> Self {
        let encode = |f: fn(f64) -> String| -> Vec<Vec<String>> {
            d.points()
                .map(|p| p.iter().copied().map(f).collect())
                .collect()
        };
        Self {
            ambient_dim: d.ambient_dim(),
            degree: d.degree(),
            count: d.len(),
            points: encode(format_f64),
            points_hex: with_hex.then(|| encode(format_hex)),
        }
    }

    pub fn to_design(&self) -> Result<Design> {
        let (rows, parse, field): (_, fn(&str) -> Option<f64>, _) = match &self.points_hex {
            Some(hex) => (hex, parse_hex, "points_hex"),
            None => (&self.points, parse_f64, "points"),
        };
        if rows.len() != self.count {
            return Err(Error::invalid(format!(
                "count = {} but {} points listed",
                self.count,
                rows.len()
            )));
        }
        let mut coords = Vec::with_capacity(self.count * self.ambient_dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != self.ambient_dim {
                return Err(Error::invalid(format!(
                    "point {i} has {} coordinates, expected {}",
                    row.len(),
                    self.ambient_dim
                )));
            }
            coords.extend(parse_all(row, parse, field)?);
        }
        Design::new(self.ambient_dim, self.degree, coords)
    }
}

fn json_error(source_name: &str, e: serde_json::Error) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn quadrature_to_json(q: &Quadrature, with_hex: bool) -> String {
    let mut s = serde_json::to_string_pretty(&QuadratureFile::from_quadrature(q, with_hex))
        .expect("quadrature file serializes");
    s.push('\n');
    s
}

pub fn quadrature_from_json(text: &str, source_name: &str) -> Result<Quadrature> {
    let file: QuadratureFile =
        serde_json::from_str(text).map_err(|e| json_error(source_name, e))?;
    file.to_quadrature()
}

pub fn design_to_json(d: &Design, with_hex: bool) -> String {
    let mut s = serde_json::to_string_pretty(&DesignFile::from_design(d, with_hex))
        .expect("design file serializes");
    s.push('\n');
    s
}

pub fn design_from_json(text: &str, source_name: &str) -> Result<Design> {
    let file: DesignFile = serde_json::from_str(text).map_err(|e| json_error(source_name, e))?;
    file.to_design()
}

/// One point per row, comma-separated, no header.
pub fn design_to_csv(d: &Design) -> String {
    let mut out = String::new();
    for p in d.points() {
        let row: Vec<String> = p.iter().copied().map(format_f64).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses CSV points; CSV carries no degree, so the caller supplies it.
pub fn design_from_csv(text: &str, degree: u32, source_name: &str) -> Result<Design> {
    let mut coords = Vec::new();
    let mut dim = None;
    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut column = 1;
        let mut count = 0;
        for field in line.split(',') {
            let value = parse_f64(field).ok_or_else(|| Error::Parse {
                source_name: source_name.to_string(),
                line: line_no,
                column,
                message: format!("not a number: {:?}", field.trim()),
            })?;
            coords.push(value);
            count += 1;
            column += field.len() + 1;
        }
        match dim {
            None => dim = Some(count),
            Some(d) if d != count => {
                return Err(Error::Parse {
                    source_name: source_name.to_string(),
                    line: line_no,
                    column: 1,
                    message: format!("row has {count} values, earlier rows have {d}"),
                })
            }
            Some(_) => {}
        }
    }
    let dim = dim.ok_or_else(|| Error::Parse {
        source_name: source_name.to_string(),
        line: 1,
        column: 1,
        message: "no points".to_string(),
    })?;
    Design::new(dim, degree, coords)
}

/// Loads a design from JSON or CSV, sniffing the format from the content.
/// `degree` overrides the stored degree (and is required for CSV).
pub fn load_design(path: &Path, degree: Option<u32>) -> Result<Design> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    if text.trim().is_empty() {
        return Err(Error::Parse {
            source_name: name,
            line: 1,
            column: 1,
            message: "empty file".to_string(),
        });
    }
    if text.trim_start().starts_with('{') {
        let d = design_from_json(&text, &name)?;
        Ok(match degree {
            Some(t) => d.with_degree(t),
            None => d,
        })
    } else {
        let degree = degree.ok_or_else(|| {
            Error::invalid(format!(
                "{name}: CSV designs carry no degree; pass one explicitly"
            ))
        })?;
        design_from_csv(&text, degree, &name)
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory
/// and an atomic rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
