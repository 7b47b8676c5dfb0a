//! CSV ingestion: one-hot coding of categorical columns, optional pairwise
//! interactions, constant-column removal, and a lossless matrix writer.

use std::collections::{BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use log::info;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::linalg::{DesignMatrix, ResponseVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseColumn {
    Name(String),
    Index(usize),
}

impl From<&str> for ResponseColumn {
    /// A bare non-negative integer is read as a column index, anything else as a name.
    fn from(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => ResponseColumn::Index(i),
            Err(_) => ResponseColumn::Name(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CategoricalColumns {
    /// A column is categorical when any of its cells is not a finite number.
    #[default]
    Auto,
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interactions {
    #[default]
    None,
    /// Products of every pair of distinct encoded features, named `a:b`.
    AllPairs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestionSpec {
    pub input_path: PathBuf,
    pub has_header: bool,
    pub response: ResponseColumn,
    pub categorical: CategoricalColumns,
    pub interactions: Interactions,
    pub drop_constant: bool,
}

impl IngestionSpec {
    pub fn new(input_path: impl Into<PathBuf>, response: impl Into<ResponseColumn>) -> Self {
        IngestionSpec {
            input_path: input_path.into(),
            has_header: true,
            response: response.into(),
            categorical: CategoricalColumns::Auto,
            interactions: Interactions::None,
            drop_constant: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub x: DesignMatrix,
    pub y: ResponseVector,
    pub feature_names: Vec<String>,
    pub response_name: String,
    pub dropped_constant: Vec<String>,
}

pub fn ingest(spec: &IngestionSpec) -> Result<Ingested> {
    let file = std::fs::File::open(&spec.input_path)?;
    ingest_reader(file, spec)
}

/// As [`ingest`], reading from `reader` instead of `spec.input_path`.
pub fn ingest_reader<R: Read>(reader: R, spec: &IngestionSpec) -> Result<Ingested> {
    let (header, rows) = read_table(reader, spec.has_header)?;
    let width = header.len();
    let n = rows.len();

    let response_idx = match &spec.response {
        ResponseColumn::Name(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingResponse(name.clone()))?,
        ResponseColumn::Index(i) if *i < width => *i,
        ResponseColumn::Index(i) => return Err(Error::MissingResponse(format!("#{i}"))),
    };

    let mut seen = HashSet::new();
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(Error::DuplicateFeature(h.clone()));
        }
    }

    let categorical: Vec<bool> = match &spec.categorical {
        CategoricalColumns::Auto => (0..width)
            .map(|j| j != response_idx && rows.iter().any(|r| parse_cell(&r[j]).is_none()))
            .collect(),
        CategoricalColumns::Explicit(names) => {
            for name in names {
                if !header.contains(name) {
                    return Err(Error::InvalidConfig(format!(
                        "categorical column `{name}` not found"
                    )));
                }
            }
            header.iter().map(|h| names.contains(h)).collect()
        }
    };
    if categorical[response_idx] {
        return Err(Error::InvalidConfig(format!(
            "response column `{}` cannot be categorical",
            header[response_idx]
        )));
    }

    let numeric_column = |j: usize| -> Result<Vec<f64>> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                parse_cell(&r[j]).ok_or_else(|| Error::NonNumericCell {
                    row: i + 1,
                    column: header[j].clone(),
                    value: r[j].clone(),
                })
            })
            .collect()
    };

    let y = numeric_column(response_idx)?;

    let mut names: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for j in (0..width).filter(|&j| j != response_idx) {
        if categorical[j] {
            let levels: BTreeSet<&str> = rows.iter().map(|r| r[j].as_str()).collect();
            for level in levels.into_iter().skip(1) {
                names.push(format!("{}={}", header[j], level));
                columns.push(
                    rows.iter()
                        .map(|r| if r[j] == level { 1.0 } else { 0.0 })
                        .collect(),
                );
            }
        } else {
            names.push(header[j].clone());
            columns.push(numeric_column(j)?);
        }
    }

    if spec.interactions == Interactions::AllPairs {
        let base = columns.len();
        for a in 0..base {
            for b in a + 1..base {
                names.push(format!("{}:{}", names[a], names[b]));
                let prod = columns[a]
                    .iter()
                    .zip(&columns[b])
                    .map(|(u, v)| u * v)
                    .collect();
                columns.push(prod);
            }
        }
    }

    let mut seen = HashSet::new();
    for name in &names {
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateFeature(name.clone()));
        }
    }

    let mut dropped_constant = Vec::new();
    if spec.drop_constant {
        let mut kept_names = Vec::with_capacity(names.len());
        let mut kept_cols = Vec::with_capacity(columns.len());
        for (name, col) in names.into_iter().zip(columns) {
            if col.iter().all(|&v| v == col[0]) {
                info!("dropping constant feature `{name}`");
                dropped_constant.push(name);
            } else {
                kept_names.push(name);
                kept_cols.push(col);
            }
        }
        names = kept_names;
        columns = kept_cols;
    }

    let p = columns.len();
    if p == 0 {
        return Err(Error::AllColumnsConstant);
    }
    let x = Array2::from_shape_fn((n, p), |(i, j)| columns[j][i]);
    info!(
        "ingested {n} rows, {p} features ({} constant dropped)",
        dropped_constant.len()
    );

    Ok(Ingested {
        x: DesignMatrix::new(x)?,
        y: ResponseVector::new(Array1::from(y))?,
        feature_names: names,
        response_name: header[response_idx].clone(),
        dropped_constant,
    })
}

fn parse_cell(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn read_table<R: Read>(reader: R, has_header: bool) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .from_reader(reader);
    let offset = u64::from(has_header);
    let data_row = |pos: &Option<csv::Position>| {
        pos.as_ref().map_or(0, |p| p.line().saturating_sub(offset) as usize)
    };
    let map_csv = |e: csv::Error| -> Error {
        match e.kind() {
            csv::ErrorKind::UnequalLengths {
                pos,
                expected_len,
                len,
            } => Error::Parse {
                row: data_row(pos),
                column: (*len).min(*expected_len) as usize + 1,
                message: format!("expected {expected_len} fields, found {len}"),
            },
            csv::ErrorKind::Utf8 { pos, err } => Error::Parse {
                row: data_row(pos),
                column: err.field() + 1,
                message: "invalid UTF-8".to_string(),
            },
            _ => Error::Csv(e),
        }
    };

    let mut header: Vec<String> = if has_header {
        rdr.headers()
            .map_err(map_csv)?
            .iter()
            .map(|h| h.trim().to_string())
            .collect()
    } else {
        Vec::new()
    };
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(map_csv)?;
        rows.push(record.iter().map(str::to_string).collect::<Vec<_>>());
    }
    if !has_header {
        let width = rows.first().map_or(0, Vec::len);
        header = (0..width).map(|j| format!("c{j}")).collect();
    }
    if rows.is_empty() || header.is_empty() {
        return Err(Error::InvalidDimensions("input table is empty".into()));
    }
    Ok((header, rows))
}

/// Writes `x` and `y` as CSV with a header row. Every value carries 17
/// significant digits so that reading the file back reproduces it bit for bit.
pub fn write_matrix_csv<W: Write>(
    writer: W,
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    feature_names: &[String],
    response_name: &str,
) -> Result<()> {
    for (what, expected, found) in [
        ("response", x.nrows(), y.len()),
        ("feature names", x.ncols(), feature_names.len()),
    ] {
        if expected != found {
            return Err(Error::DimensionMismatch { what, expected, found });
        }
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(feature_names.iter().map(String::as_str).chain([response_name]))?;
    let mut fields = Vec::with_capacity(x.ncols() + 1);
    for (row, &yi) in x.rows().into_iter().zip(y) {
        fields.clear();
        fields.extend(row.iter().map(|v| format!("{v:.16e}")));
        fields.push(format!("{yi:.16e}"));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix_file(
    path: &Path,
    x: ArrayView2<f64>,
    y: ArrayView1<f64>,
    feature_names: &[String],
    response_name: &str,
) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_matrix_csv(file, x, y, feature_names, response_name)
}

/// Default feature names `x0, x1, ...`.
pub fn default_feature_names(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("x{j}")).collect()
}
