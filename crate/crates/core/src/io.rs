//! CSV and JSON files. Floats in CSV are written with 17 significant digits
//! so that values read back are bit-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{FunkError, Result};
use crate::funk::SectionField;
use crate::planes::{Frame, PlaneThrough};
use crate::sphere::{Center, GridFunction, SphereGrid, SpherePoint};
use crate::two_center::ConvergenceReport;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse(field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| FunkError::invalid(format!("bad number {field:?}: {e}")))
}

fn plane_header(dim: usize, cols: usize) -> Vec<String> {
    let mut h = vec!["k".to_string()];
    h.extend((1..=dim).map(|i| format!("a{i}")));
    for c in 1..=cols {
        h.extend((1..=dim).map(|i| format!("xi{c}_{i}")));
    }
    h
}

fn plane_row(p: &PlaneThrough) -> Vec<String> {
    let mut row = vec![p.k().to_string()];
    row.extend(p.center().coords().iter().map(|v| fmt_f64(*v)));
    row.extend(p.frame().matrix().iter().map(|v| fmt_f64(*v)));
    row
}

fn plane_from_row(rec: &csv::StringRecord, offset: usize, dim: usize) -> Result<PlaneThrough> {
    let k: usize = rec[offset]
        .trim()
        .parse()
        .map_err(|e| FunkError::invalid(format!("bad k: {e}")))?;
    let a: Vec<f64> = (0..dim).map(|i| parse(&rec[offset + 1 + i])).collect::<Result<_>>()?;
    let cols = dim - k;
    let xi: Vec<f64> = (0..dim * cols)
        .map(|i| parse(&rec[offset + 1 + dim + i]))
        .collect::<Result<_>>()?;
    PlaneThrough::new(Center::from_slice(&a)?, Frame::new(DMatrix::from_column_slice(dim, cols, &xi))?)
}

fn plane_shape(planes: &[PlaneThrough]) -> Result<(usize, usize)> {
    let first = planes
        .first()
        .ok_or_else(|| FunkError::invalid("cannot write an empty plane family"))?;
    let shape = (first.frame().ambient_dim(), first.frame().matrix().ncols());
    for (index, p) in planes.iter().enumerate() {
        if (p.frame().ambient_dim(), p.frame().matrix().ncols()) != shape {
            return Err(FunkError::PlaneFamilyMismatch { index });
        }
    }
    Ok(shape)
}

/// Columns: k, a1..a_d, xi1_1..xi1_d, xi2_1.. (frame columns in order).
pub fn write_plane_family_csv(path: &Path, planes: &[PlaneThrough]) -> Result<()> {
    let (dim, cols) = plane_shape(planes)?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(plane_header(dim, cols))?;
    for p in planes {
        w.write_record(plane_row(p))?;
    }
    w.flush()?;
    Ok(())
}

/// Columns: plane_id, then the plane columns, then value.
pub fn write_section_field_csv(path: &Path, field: &SectionField) -> Result<()> {
    let (dim, cols) = plane_shape(field.planes())?;
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["plane_id".to_string()];
    header.extend(plane_header(dim, cols));
    header.push("value".into());
    w.write_record(header)?;
    for (i, (p, v)) in field.planes().iter().zip(field.values()).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(plane_row(p));
        row.push(fmt_f64(*v));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_section_field_csv(path: &Path) -> Result<SectionField> {
    let mut r = csv::Reader::from_path(path)?;
    let dim = r.headers()?.iter().filter(|h| h.starts_with('a')).count();
    let mut planes = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        planes.push(plane_from_row(&rec, 1, dim)?);
        values.push(parse(&rec[rec.len() - 1])?);
    }
    SectionField::new(planes, values)
}

/// Columns: node_id, x1..x_d, weight, value.
pub fn write_grid_function_csv(path: &Path, f: &GridFunction) -> Result<()> {
    let grid = f.grid();
    let dim = grid.n() + 1;
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["node_id".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    header.push("weight".into());
    header.push("value".into());
    w.write_record(header)?;
    for (i, ((x, wt), v)) in grid.nodes().iter().zip(grid.weights()).zip(f.values()).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(x.iter().map(|c| fmt_f64(*c)));
        row.push(fmt_f64(*wt));
        row.push(fmt_f64(*v));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid_function_csv(path: &Path) -> Result<GridFunction> {
    let mut r = csv::Reader::from_path(path)?;
    let dim = r.headers()?.len() - 3;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let x: Vec<f64> = (0..dim).map(|i| parse(&rec[1 + i])).collect::<Result<_>>()?;
        nodes.push(SpherePoint::from_unit(nalgebra::DVector::from_vec(x))?);
        weights.push(parse(&rec[1 + dim])?);
        values.push(parse(&rec[2 + dim])?);
    }
    GridFunction::new(Arc::new(SphereGrid::from_parts(nodes, weights)?), values)
}

/// Columns: m, sup_Kdelta, L{p} per p, val_at_astar, val_at_bstar.
pub fn write_convergence_csv(path: &Path, report: &ConvergenceReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["m".to_string(), "sup_Kdelta".to_string()];
    header.extend(report.p_list.iter().map(|p| {
        if p.is_infinite() {
            "Linf".to_string()
        } else {
            format!("L{p}")
        }
    }));
    header.push("val_at_astar".into());
    header.push("val_at_bstar".into());
    w.write_record(header)?;
    for rec in &report.records {
        let mut row = vec![rec.m.to_string(), fmt_f64(rec.sup_kdelta)];
        row.extend(rec.lp.iter().map(|v| fmt_f64(*v)));
        row.push(fmt_f64(rec.at_a_star));
        row.push(fmt_f64(rec.at_b_star));
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON; serde_json prints the shortest representation that reads
/// back to the same f64.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
