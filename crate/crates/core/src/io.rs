//! File formats: fields and metrics as CSV, masks as binary PGM, everything
//! else as JSON.
//!
//! CSV layout: a `nx,ny,h,topology` header, one line of header values, then
//! (metrics only) a `conformal` or `tensor` line, then `ny` rows of `nx`
//! values, bottom row first. Undefined entries are written as `nan`; tensor
//! entries are space-separated `g11 g12 g22` triples.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Metric, MetricGrid, Region, ScalarField, Topology};

const HEADER: &str = "nx,ny,h,topology";

fn header(grid_dims: (usize, usize), h: f64, topo: Topology) -> String {
    format!("{HEADER}\n{},{},{},{}\n", grid_dims.0, grid_dims.1, h, topo.as_str())
}

fn parse_header<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<(usize, usize, f64, Topology)> {
    let first = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
    if first.trim() != HEADER {
        return Err(Error::Parse(format!("expected header '{HEADER}', got '{first}'")));
    }
    let vals = lines.next().ok_or_else(|| Error::Parse("missing header values".into()))?;
    let f: Vec<&str> = vals.split(',').map(str::trim).collect();
    if f.len() != 4 {
        return Err(Error::Parse(format!("bad header values '{vals}'")));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("{s}: {e}")));
    let h = f[2].parse::<f64>().map_err(|e| Error::Parse(format!("{}: {e}", f[2])))?;
    Ok((num(f[0])?, num(f[1])?, h, Topology::parse(f[3])?))
}

fn parse_value(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("nan") {
        return Ok(f64::NAN);
    }
    s.parse::<f64>().map_err(|e| Error::Parse(format!("'{s}': {e}")))
}

fn rows<'a>(lines: impl Iterator<Item = &'a str>, nx: usize, ny: usize) -> Result<Vec<Vec<&'a str>>> {
    let rows: Vec<Vec<&str>> = lines.filter(|l| !l.trim().is_empty()).map(|l| l.split(',').collect()).collect();
    if rows.len() != ny || rows.iter().any(|r| r.len() != nx) {
        return Err(Error::Parse(format!("expected {ny} rows of {nx} values")));
    }
    Ok(rows)
}

fn fmt_value(out: &mut String, v: f64) {
    if v.is_finite() {
        // `{:?}` prints the shortest representation that round-trips.
        let _ = write!(out, "{v:?}");
    } else {
        out.push_str("nan");
    }
}

/// Serializes a field; values are written with full round-trip precision.
pub fn field_to_csv(grid: &MetricGrid, field: &ScalarField) -> Result<String> {
    field.check(grid)?;
    let mut s = header((grid.nx(), grid.ny()), grid.h(), grid.topology());
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            if i > 0 {
                s.push(',');
            }
            let k = grid.index(i, j);
            fmt_value(&mut s, field.get(k).unwrap_or(f64::NAN));
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn field_from_csv(grid: &MetricGrid, text: &str) -> Result<ScalarField> {
    let mut lines = text.lines();
    let (nx, ny, _, _) = parse_header(&mut lines)?;
    if (nx, ny) != (grid.nx(), grid.ny()) {
        return Err(Error::ShapeMismatch(format!("field {nx}x{ny} on grid {}x{}", grid.nx(), grid.ny())));
    }
    let mut vals = Vec::with_capacity(nx * ny);
    for r in rows(lines, nx, ny)? {
        for v in r {
            vals.push(parse_value(v)?);
        }
    }
    ScalarField::new(grid, vals)
}

pub fn write_field_csv(path: &Path, grid: &MetricGrid, field: &ScalarField) -> Result<()> {
    Ok(fs::write(path, field_to_csv(grid, field)?)?)
}

pub fn read_field_csv(path: &Path, grid: &MetricGrid) -> Result<ScalarField> {
    field_from_csv(grid, &fs::read_to_string(path)?)
}

/// Serializes the metric; nodes outside the domain are written as `nan`.
/// The origin is not stored: a metric read back sits at the origin.
pub fn metric_to_csv(grid: &MetricGrid) -> String {
    let mut s = header((grid.nx(), grid.ny()), grid.h(), grid.topology());
    s.push_str(if grid.metric().is_tensor() { "tensor\n" } else { "conformal\n" });
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            if i > 0 {
                s.push(',');
            }
            let k = grid.index(i, j);
            match grid.metric() {
                _ if !grid.in_domain(k) => s.push_str("nan"),
                Metric::Conformal(l) => fmt_value(&mut s, l[k]),
                Metric::Tensor(g) => {
                    for (c, v) in g[k].iter().enumerate() {
                        if c > 0 {
                            s.push(' ');
                        }
                        fmt_value(&mut s, *v);
                    }
                }
            }
        }
        s.push('\n');
    }
    s
}

pub fn metric_from_csv(text: &str) -> Result<MetricGrid> {
    let mut lines = text.lines();
    let (nx, ny, h, topo) = parse_header(&mut lines)?;
    let kind = lines.next().map(str::trim).ok_or_else(|| Error::Parse("missing metric kind".into()))?;
    let rows = rows(lines, nx, ny)?;
    let mut dom = Vec::with_capacity(nx * ny);
    let metric = match kind {
        "conformal" => {
            let mut l = Vec::with_capacity(nx * ny);
            for r in &rows {
                for v in r {
                    let x = parse_value(v)?;
                    dom.push(x.is_finite());
                    l.push(x);
                }
            }
            Metric::Conformal(l)
        }
        "tensor" => {
            let mut g = Vec::with_capacity(nx * ny);
            for r in &rows {
                for v in r {
                    let parts: Vec<&str> = v.split_whitespace().collect();
                    if parts.len() == 1 && parse_value(parts[0])?.is_nan() {
                        dom.push(false);
                        g.push([1.0, 0.0, 1.0]);
                        continue;
                    }
                    if parts.len() != 3 {
                        return Err(Error::Parse(format!("tensor entry '{v}' needs three values")));
                    }
                    let t = [parse_value(parts[0])?, parse_value(parts[1])?, parse_value(parts[2])?];
                    dom.push(true);
                    g.push(t);
                }
            }
            Metric::Tensor(g)
        }
        other => return Err(Error::Parse(format!("unknown metric kind '{other}'"))),
    };
    MetricGrid::new(nx, ny, h, [0.0, 0.0], topo, metric, Some(dom))
}

pub fn write_metric_csv(path: &Path, grid: &MetricGrid) -> Result<()> {
    Ok(fs::write(path, metric_to_csv(grid))?)
}

pub fn read_metric_csv(path: &Path) -> Result<MetricGrid> {
    metric_from_csv(&fs::read_to_string(path)?)
}

/// Binary PGM, top row first (so images show y upwards), 255 = inside.
pub fn region_to_pgm(region: &Region) -> Vec<u8> {
    let (nx, ny) = region.dims();
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    for j in (0..ny).rev() {
        for i in 0..nx {
            out.push(if region.contains(j * nx + i) { 255 } else { 0 });
        }
    }
    out
}

pub fn region_from_pgm(grid: &MetricGrid, bytes: &[u8]) -> Result<Region> {
    // Header: magic, width, height, maxval, separated by whitespace.
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("truncated PGM header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" {
        return Err(Error::Parse("not a binary PGM".into()));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("{s}: {e}")));
    let (nx, ny) = (num(&fields[1])?, num(&fields[2])?);
    if (nx, ny) != (grid.nx(), grid.ny()) {
        return Err(Error::ShapeMismatch(format!("mask {nx}x{ny} on grid {}x{}", grid.nx(), grid.ny())));
    }
    let data = bytes.get(pos..pos + nx * ny).ok_or_else(|| Error::Parse("truncated PGM data".into()))?;
    let mut mask = vec![false; nx * ny];
    for (r, row) in data.chunks(nx).enumerate() {
        let j = ny - 1 - r;
        for (i, &b) in row.iter().enumerate() {
            mask[j * nx + i] = b > 127;
        }
    }
    Region::from_mask(grid, mask)
}

pub fn write_pgm(path: &Path, region: &Region) -> Result<()> {
    Ok(fs::write(path, region_to_pgm(region))?)
}

pub fn read_pgm(path: &Path, grid: &MetricGrid) -> Result<Region> {
    region_from_pgm(grid, &fs::read(path)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(fs::write(path, s)?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Parse(e.to_string()))
}
