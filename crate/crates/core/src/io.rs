//! File formats: norm series and snapshots as CSV, reports as JSON.
//!
//! Floats are written with 17 significant digits so every value reads back
//! bit-for-bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::analysis::NormSeries;
use crate::{DomainConfig, Error, RealField, Result, SpectralField};

pub const NORMS_HEADER: [&str; 6] = ["t", "l2", "h1", "h2", "linf", "mean"];
pub const SNAPSHOT_HEADER: [&str; 2] = ["x", "u"];

/// Shortest exact form with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::config(format!("not a number: {s:?}")))
}

pub fn write_norms_csv<W: Write>(out: W, series: &NormSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(NORMS_HEADER)?;
    for i in 0..series.len() {
        w.write_record(series.row(i).iter().map(|&v| format_f64(v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_norms_csv<R: Read>(input: R) -> Result<NormSeries> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(NORMS_HEADER.iter().copied()) {
        return Err(Error::config(format!(
            "unexpected norms header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut series = NormSeries::default();
    for record in r.records() {
        let record = record?;
        let v = record.iter().map(parse_f64).collect::<Result<Vec<_>>>()?;
        if v.len() != 6 {
            return Err(Error::config("norms row must have 6 columns"));
        }
        series.push_row(v[0], v[1], v[2], v[3], v[4], v[5]);
    }
    Ok(series)
}

pub fn save_norms(path: impl AsRef<Path>, series: &NormSeries) -> Result<()> {
    write_norms_csv(BufWriter::new(File::create(path)?), series)
}

pub fn load_norms(path: impl AsRef<Path>) -> Result<NormSeries> {
    read_norms_csv(BufReader::new(File::open(path)?))
}

/// A field snapshot as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub alpha: f64,
    pub field: RealField,
}

impl Snapshot {
    pub fn from_spectral(t: f64, alpha: f64, u: &SpectralField) -> Result<Self> {
        Ok(Snapshot {
            t,
            alpha,
            field: u.to_real()?,
        })
    }
}

pub fn write_snapshot<W: Write>(mut out: W, snap: &Snapshot) -> Result<()> {
    let d = snap.field.domain();
    writeln!(
        out,
        "# t={},alpha={},half_length={},grid_size={}",
        format_f64(snap.t),
        format_f64(snap.alpha),
        format_f64(d.half_length),
        d.grid_size
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SNAPSHOT_HEADER)?;
    for (x, u) in d.grid().iter().zip(snap.field.values()) {
        w.write_record([format_f64(*x), format_f64(*u)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot<R: Read>(input: R) -> Result<Snapshot> {
    let mut input = BufReader::new(input);
    let mut meta = String::new();
    input.read_line(&mut meta)?;
    let meta = meta
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::config("snapshot must start with a '#' metadata line"))?;
    let mut t = None;
    let mut alpha = None;
    let mut half_length = None;
    let mut grid_size = None;
    for item in meta.split(',') {
        let (key, value) = item
            .trim()
            .split_once('=')
            .ok_or_else(|| Error::config(format!("bad metadata item {item:?}")))?;
        match key {
            "t" => t = Some(parse_f64(value)?),
            "alpha" => alpha = Some(parse_f64(value)?),
            "half_length" => half_length = Some(parse_f64(value)?),
            "grid_size" => {
                grid_size = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| Error::config(format!("bad grid_size {value:?}")))?,
                )
            }
            _ => {}
        }
    }
    let missing = || Error::config("snapshot metadata incomplete");
    let domain = DomainConfig::new(half_length.ok_or_else(missing)?, grid_size.ok_or_else(missing)?)?;

    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(SNAPSHOT_HEADER.iter().copied()) {
        return Err(Error::config("unexpected snapshot header"));
    }
    let mut values = Vec::with_capacity(domain.grid_size);
    for record in r.records() {
        let record = record?;
        let u = record
            .get(1)
            .ok_or_else(|| Error::config("snapshot row must have 2 columns"))?;
        values.push(parse_f64(u)?);
    }
    Ok(Snapshot {
        t: t.ok_or_else(missing)?,
        alpha: alpha.ok_or_else(missing)?,
        field: RealField::new(domain, values)?,
    })
}

pub fn save_snapshot(path: impl AsRef<Path>, snap: &Snapshot) -> Result<()> {
    write_snapshot(BufWriter::new(File::create(path)?), snap)
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    read_snapshot(File::open(path)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn save_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}
