//! CSV dumps of grid functions with a JSON header carrying axis metadata.
//!
//! The CSV has one row per grid point in storage order: the coordinates
//! followed by the value (`value`, or `re,im` for complex data). The header is
//! a separate JSON document; callers may attach arbitrary metadata to it.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Axis, GridFn, Scalar, ScalarKind};
use crate::{Complex64, Error, Result};

/// JSON header written next to a CSV grid dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub axis_names: Vec<String>,
    pub axes: Vec<Axis>,
    pub scalar_kind: ScalarKind,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub metadata: serde_json::Value,
}

impl GridHeader {
    pub fn new<T: Scalar>(f: &GridFn<T>, axis_names: &[&str], metadata: serde_json::Value) -> Self {
        Self {
            axis_names: axis_names.iter().map(|s| s.to_string()).collect(),
            axes: f.axes().to_vec(),
            scalar_kind: T::KIND,
            metadata,
        }
    }
}

/// Writes the CSV body of `f`.
pub fn write_csv<T: Scalar, W: Write>(f: &GridFn<T>, names: &[&str], out: W) -> Result<()> {
    if names.len() != f.ndim() {
        return Err(Error::ShapeMismatch(format!(
            "{} axis names for a {}-dimensional grid",
            names.len(),
            f.ndim()
        )));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut head: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    match T::KIND {
        ScalarKind::Real => head.push("value".into()),
        ScalarKind::Complex => head.extend(["re".into(), "im".into()]),
    }
    w.write_record(&head)?;
    let mut row = Vec::with_capacity(head.len());
    for (k, v) in f.values().iter().enumerate() {
        row.clear();
        row.extend(f.coords(k).iter().map(|c| format_num(*c)));
        let z = v.to_complex();
        row.push(format_num(z.re));
        if T::KIND == ScalarKind::Complex {
            row.push(format_num(z.im));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn format_num(x: f64) -> String {
    // Shortest representation that round-trips exactly.
    format!("{x:?}")
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`; returns both paths.
pub fn save<T: Scalar>(
    f: &GridFn<T>,
    dir: &Path,
    stem: &str,
    names: &[&str],
    metadata: serde_json::Value,
) -> Result<(std::path::PathBuf, std::path::PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    write_csv(f, names, BufWriter::new(File::create(&csv_path)?))?;
    let header = GridHeader::new(f, names, metadata);
    let mut jw = BufWriter::new(File::create(&json_path)?);
    serde_json::to_writer_pretty(&mut jw, &header)?;
    jw.write_all(b"\n")?;
    jw.flush()?;
    Ok((csv_path, json_path))
}

/// Reads the value columns of a CSV dump against a known header.
pub fn read_values<R: Read>(header: &GridHeader, input: R) -> Result<Vec<Complex64>> {
    let mut r = csv::Reader::from_reader(input);
    let dims = header.axes.len();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Parse(format!("missing column {i}")))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(e.to_string()))
        };
        let re = parse(dims)?;
        let im = match header.scalar_kind {
            ScalarKind::Real => 0.0,
            ScalarKind::Complex => parse(dims + 1)?,
        };
        values.push(Complex64::new(re, im));
    }
    Ok(values)
}

/// Loads a dump written by [`save`] as a complex grid function.
pub fn load(csv_path: &Path, json_path: &Path) -> Result<(GridHeader, GridFn<Complex64>)> {
    let header: GridHeader = serde_json::from_reader(BufReader::new(File::open(json_path)?))?;
    let values = read_values(&header, BufReader::new(File::open(csv_path)?))?;
    let f = GridFn::new(header.axes.clone(), values)?;
    Ok((header, f))
}

/// Loads a real-valued dump; fails if it was written as complex.
pub fn load_real(csv_path: &Path, json_path: &Path) -> Result<(GridHeader, GridFn<f64>)> {
    let (header, f) = load(csv_path, json_path)?;
    if header.scalar_kind != ScalarKind::Real {
        return Err(Error::Parse("expected a real-valued grid dump".into()));
    }
    Ok((header, f.re()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_dump_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let a = Axis::new(-1.0, 1.0, 5).unwrap();
        let b = Axis::new(0.0, 2.0, 3).unwrap();
        let f = GridFn::from_fn(vec![a, b], |c| (c[0] * 1.1).exp() / 3.0 + c[1]);
        let (c, j) = save(&f, dir.path(), "f", &["x", "y"], serde_json::json!({"tag": 1})).unwrap();
        let (h, g) = load_real(&c, &j).unwrap();
        assert_eq!(h.metadata["tag"], 1);
        assert_eq!(g, f);
        let text = std::fs::read_to_string(&c).unwrap();
        assert_eq!(text.lines().count(), 16);
        assert!(text.starts_with("x,y,value"));
    }

    #[test]
    fn complex_dump_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let a = Axis::new(0.0, 1.0, 4).unwrap();
        let f = GridFn::from_fn(vec![a], |c| Complex64::new(c[0], -c[0] / 7.0));
        let (c, j) = save(&f, dir.path(), "z", &["q"], serde_json::Value::Null).unwrap();
        let (h, g) = load(&c, &j).unwrap();
        assert_eq!(h.scalar_kind, ScalarKind::Complex);
        assert_eq!(g, f);
        assert!(load_real(&c, &j).is_err());
    }
}
