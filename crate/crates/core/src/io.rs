//! CSV and JSON artifacts. Floats are written in shortest round-trip form, so every
//! file reads back bit-for-bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::displacement::{CurveKind, DisplacementCurve, ExplicitMap, Matching};
use crate::error::{NetError, Result};
use crate::geom;
use crate::growth::{GrowthFunction, RadiusSchedule};

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| NetError::Io(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| NetError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| NetError::Format(e.to_string()))
}

fn parse(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| NetError::Format(format!("not a number: {field:?}")))
}

/// A numeric table with a header row.
pub fn write_table(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = writer();
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(NetError::Format("row width differs from header".into()));
        }
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    finish(w)
}

pub fn read_table(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(parse).collect::<Result<Vec<f64>>>()?);
    }
    Ok((header, rows))
}

/// Two-column table `(name_x, name_y)`.
pub fn write_pairs(x: &str, y: &str, rows: &[(f64, f64)]) -> Result<String> {
    let rows: Vec<Vec<f64>> = rows.iter().map(|&(a, b)| vec![a, b]).collect();
    write_table(&[x, y], &rows)
}

pub fn read_pairs(text: &str) -> Result<Vec<(f64, f64)>> {
    let (header, rows) = read_table(text)?;
    if header.len() != 2 {
        return Err(NetError::Format("expected two columns".into()));
    }
    Ok(rows.into_iter().map(|r| (r[0], r[1])).collect())
}

/// `R,value,kind`, curves one after another.
pub fn write_curves(curves: &[&DisplacementCurve]) -> Result<String> {
    let mut w = writer();
    w.write_record(["R", "value", "kind"])?;
    for c in curves {
        for &(r, v) in &c.samples {
            w.write_record([r.to_string(), v.to_string(), c.kind.as_str().to_string()])?;
        }
    }
    finish(w)
}

/// Inverse of [`write_curves`]; consecutive rows of one kind form one curve.
pub fn read_curves(text: &str) -> Result<Vec<DisplacementCurve>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out: Vec<DisplacementCurve> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(NetError::Format("expected R,value,kind".into()));
        }
        let kind = CurveKind::parse(&rec[2])?;
        let sample = (parse(&rec[0])?, parse(&rec[1])?);
        match out.last_mut() {
            Some(c) if c.kind == kind && c.last_radius().is_some_and(|r| sample.0 > r) => {
                c.samples.push(sample)
            }
            _ => out.push(DisplacementCurve::new(kind, vec![sample])?),
        }
    }
    Ok(out)
}

fn point_header(dim: usize, with_dist: bool) -> Vec<String> {
    let mut h: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    h.extend((1..=dim).map(|i| format!("y{i}")));
    if with_dist {
        h.push("dist".into());
    }
    h
}

/// `x1..xd,y1..yd` per pair.
pub fn write_map(f: &ExplicitMap) -> Result<String> {
    let mut w = writer();
    w.write_record(point_header(f.dim(), false))?;
    for (x, y) in f.pairs() {
        w.write_record(x.iter().chain(y).map(|v| v.to_string()))?;
    }
    finish(w)
}

pub fn read_map(text: &str, complete_radius: f64) -> Result<ExplicitMap> {
    let (header, rows) = read_table(text)?;
    if header.is_empty() || header.len() % 2 != 0 {
        return Err(NetError::Format("expected x1..xd,y1..yd".into()));
    }
    let dim = header.len() / 2;
    let pairs = rows
        .into_iter()
        .map(|r| (r[..dim].to_vec(), r[dim..].to_vec()))
        .collect();
    ExplicitMap::new(dim, pairs, complete_radius)
}

/// `x1..xd,y1..yd,dist` per pair.
pub fn write_matching(m: &Matching) -> Result<String> {
    let dim = m.pairs.first().map_or(1, |p| p.0.len());
    let mut w = writer();
    w.write_record(point_header(dim, true))?;
    for (x, y) in &m.pairs {
        let d = geom::dist(x, y);
        w.write_record(x.iter().chain(y).chain([&d]).map(|v| v.to_string()))?;
    }
    finish(w)
}

pub fn read_matching(text: &str) -> Result<Matching> {
    let (header, rows) = read_table(text)?;
    if header.len() < 3 || header.len() % 2 != 1 {
        return Err(NetError::Format("expected x1..xd,y1..yd,dist".into()));
    }
    let dim = header.len() / 2;
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = rows
        .into_iter()
        .map(|r| (r[..dim].to_vec(), r[dim..2 * dim].to_vec()))
        .collect();
    Ok(Matching::from_pairs(pairs, true))
}

/// `i,R_i,phi_R_i`.
pub fn write_schedule(s: &RadiusSchedule, phi: &GrowthFunction) -> Result<String> {
    let rows = s
        .radii
        .iter()
        .enumerate()
        .map(|(i, &r)| Ok(vec![(i + 1) as f64, r, phi.evaluate(r)?]))
        .collect::<Result<Vec<_>>>()?;
    write_table(&["i", "R_i", "phi_R_i"], &rows)
}
