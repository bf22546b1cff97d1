//! CSV formats for measurement records, threshold curves and histograms.
//!
//! | file        | header                                   |
//! |-------------|------------------------------------------|
//! | quadratures | `x3,p4` or `x3,p4,theta`                 |
//! | z outcomes  | `z`                                      |
//! | SPD curve   | `threshold,efficiency,dark_count,ratio`  |
//! | histogram   | `n,probability`                          |
//!
//! Floats are written in shortest round-trip form, so re-reading a file
//! reproduces the values bit for bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::measurement::{QuadratureBatch, ZBatch};
use crate::spd::ThresholdCurvePoint;
use crate::states::PhotonDistribution;

pub const QUADRATURE_HEADER: &[&str] = &["x3", "p4"];
pub const QUADRATURE_PHASE_HEADER: &[&str] = &["x3", "p4", "theta"];
pub const Z_HEADER: &[&str] = &["z"];
pub const CURVE_HEADER: &[&str] = &["threshold", "efficiency", "dark_count", "ratio"];
pub const HISTOGRAM_HEADER: &[&str] = &["n", "probability"];

/// A measurement file of either kind, told apart by its header.
#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Quadratures(QuadratureBatch),
    Z(ZBatch),
}

impl Record {
    /// The `Z` outcomes, squaring quadratures when needed.
    pub fn into_z(self) -> ZBatch {
        match self {
            Record::Quadratures(q) => crate::measurement::to_z(&q),
            Record::Z(z) => z,
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:?}")
}

/// Header plus numeric rows, with 1-based line numbers.
struct Table {
    header: Vec<String>,
    rows: Vec<(usize, Vec<f64>)>,
}

fn read_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "file is empty; expected a header".into(),
            })
        }
        Some(rec) => rec
            .map_err(csv_error)?
            .iter()
            .map(str::to_owned)
            .collect::<Vec<_>>(),
    };
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let values = rec
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("column {}: `{field}` is not a number", col + 1),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, values));
    }
    Ok(Table { header, rows })
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Parse {
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn header_is(table: &Table, expected: &[&str]) -> bool {
    table.header.len() == expected.len() && table.header.iter().zip(expected).all(|(a, b)| a == b)
}

fn expect_header(table: &Table, expected: &[&str]) -> Result<()> {
    if header_is(table, expected) {
        Ok(())
    } else {
        Err(missing_header(table, &[expected]))
    }
}

fn missing_header(table: &Table, options: &[&[&str]]) -> Error {
    let wanted: Vec<String> = options
        .iter()
        .map(|h| format!("`{}`", h.join(",")))
        .collect();
    Error::Parse {
        line: 1,
        message: format!(
            "expected header {}, found `{}`",
            wanted.join(" or "),
            table.header.join(",")
        ),
    }
}

fn require_rows(table: &Table) -> Result<()> {
    if table.rows.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "no data rows".into(),
        });
    }
    Ok(())
}

fn quadratures_from(table: Table, tag: &str) -> Result<QuadratureBatch> {
    require_rows(&table)?;
    let with_phase = table.header.len() == 3;
    let mut samples = Vec::with_capacity(table.rows.len());
    let mut phases = with_phase.then(|| Vec::with_capacity(table.rows.len()));
    for (line, row) in table.rows {
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse {
                line,
                message: format!("non-finite value {bad}"),
            });
        }
        samples.push((row[0], row[1]));
        if let Some(ph) = phases.as_mut() {
            ph.push(row[2]);
        }
    }
    QuadratureBatch::new(samples, phases, false, tag)
}

fn z_from(table: Table, tag: &str) -> Result<ZBatch> {
    require_rows(&table)?;
    let mut values = Vec::with_capacity(table.rows.len());
    for (line, row) in table.rows {
        let z = row[0];
        if !(z.is_finite() && z >= 0.0) {
            return Err(Error::Parse {
                line,
                message: format!("z = {z} must be finite and >= 0"),
            });
        }
        values.push(z);
    }
    ZBatch::new(values, tag)
}

pub fn read_quadratures<R: Read>(reader: R, tag: &str) -> Result<QuadratureBatch> {
    let table = read_table(reader)?;
    if !(header_is(&table, QUADRATURE_HEADER) || header_is(&table, QUADRATURE_PHASE_HEADER)) {
        return Err(missing_header(
            &table,
            &[QUADRATURE_HEADER, QUADRATURE_PHASE_HEADER],
        ));
    }
    quadratures_from(table, tag)
}

pub fn read_z<R: Read>(reader: R, tag: &str) -> Result<ZBatch> {
    let table = read_table(reader)?;
    expect_header(&table, Z_HEADER)?;
    z_from(table, tag)
}

/// Reads either a quadrature or a `z` file.
pub fn read_record<R: Read>(reader: R, tag: &str) -> Result<Record> {
    let table = read_table(reader)?;
    if header_is(&table, Z_HEADER) {
        z_from(table, tag).map(Record::Z)
    } else if header_is(&table, QUADRATURE_HEADER) || header_is(&table, QUADRATURE_PHASE_HEADER) {
        quadratures_from(table, tag).map(Record::Quadratures)
    } else {
        Err(missing_header(
            &table,
            &[Z_HEADER, QUADRATURE_HEADER, QUADRATURE_PHASE_HEADER],
        ))
    }
}

pub fn read_record_file(path: &Path) -> Result<Record> {
    read_record(
        BufReader::new(File::open(path)?),
        &path.display().to_string(),
    )
}

pub fn read_quadrature_file(path: &Path) -> Result<QuadratureBatch> {
    read_quadratures(
        BufReader::new(File::open(path)?),
        &path.display().to_string(),
    )
}

pub fn write_quadratures<W: Write>(mut w: W, batch: &QuadratureBatch) -> Result<()> {
    match batch.phases() {
        Some(phases) => {
            writeln!(w, "{}", QUADRATURE_PHASE_HEADER.join(","))?;
            for (&(x, p), &th) in batch.samples().iter().zip(phases) {
                writeln!(w, "{},{},{}", fmt(x), fmt(p), fmt(th))?;
            }
        }
        None => {
            writeln!(w, "{}", QUADRATURE_HEADER.join(","))?;
            for &(x, p) in batch.samples() {
                writeln!(w, "{},{}", fmt(x), fmt(p))?;
            }
        }
    }
    Ok(w.flush()?)
}

pub fn write_z<W: Write>(mut w: W, batch: &ZBatch) -> Result<()> {
    writeln!(w, "{}", Z_HEADER.join(","))?;
    for &z in batch.values() {
        writeln!(w, "{}", fmt(z))?;
    }
    Ok(w.flush()?)
}

pub fn write_curve<W: Write>(mut w: W, curve: &[ThresholdCurvePoint]) -> Result<()> {
    writeln!(w, "{}", CURVE_HEADER.join(","))?;
    for p in curve {
        writeln!(
            w,
            "{},{},{},{}",
            fmt(p.threshold),
            fmt(p.efficiency),
            fmt(p.dark_count),
            fmt(p.ratio)
        )?;
    }
    Ok(w.flush()?)
}

pub fn read_curve<R: Read>(reader: R) -> Result<Vec<ThresholdCurvePoint>> {
    let table = read_table(reader)?;
    expect_header(&table, CURVE_HEADER)?;
    Ok(table
        .rows
        .into_iter()
        .map(|(_, r)| ThresholdCurvePoint {
            threshold: r[0],
            efficiency: r[1],
            dark_count: r[2],
            ratio: r[3],
        })
        .collect())
}

/// Unit-width integer bins: one `n,probability` row per photon number.
pub fn write_histogram<W: Write>(mut w: W, dist: &PhotonDistribution) -> Result<()> {
    writeln!(w, "{}", HISTOGRAM_HEADER.join(","))?;
    for (n, &p) in dist.probs().iter().enumerate() {
        writeln!(w, "{n},{}", fmt(p))?;
    }
    Ok(w.flush()?)
}

pub fn read_histogram<R: Read>(reader: R) -> Result<PhotonDistribution> {
    let table = read_table(reader)?;
    expect_header(&table, HISTOGRAM_HEADER)?;
    require_rows(&table)?;
    let mut probs = Vec::with_capacity(table.rows.len());
    for (line, row) in table.rows {
        if row[0] != probs.len() as f64 {
            return Err(Error::Parse {
                line,
                message: format!("expected n = {}, found {}", probs.len(), row[0]),
            });
        }
        probs.push(row[1]);
    }
    PhotonDistribution::from_probs(probs)
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn write_file<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)
}
