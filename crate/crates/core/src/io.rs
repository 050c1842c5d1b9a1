//! Text formats for grids, fields, patterns, densities and ensembles.
//!
//! Grid-bound files start with one `# {json}` header line followed by a CSV
//! header row and one row per cell or node. Floats are written in shortest
//! round-trip scientific notation so identical data gives identical bytes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, FieldRole};
use crate::geometry::{DomainGrid, DomainSpec, Vec3};
use crate::particles::{DensityField, ParticleEnsemble};
use crate::pattern::FarFieldPattern;
use crate::quadrature::SphereQuadrature;

const FIELD_COLUMNS: &str = "x,y,z,re,im";
const GRID_COLUMNS: &str = "x,y,z,w";
const PATTERN_COLUMNS: &str = "bx,by,bz,w,re,im";
const DENSITY_COLUMNS: &str = "x,y,z,n";
const ENSEMBLE_COLUMNS: &str = "x,y,z,a,re_C,im_C";

/// Tolerance when matching stored cell centers against the rebuilt grid.
const POSITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub domain_spec: DomainSpec,
    pub resolution: usize,
    pub role: FieldRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub domain_spec: DomainSpec,
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternHeader {
    pub k: f64,
    pub alpha: Vec3,
    /// Product-rule order when the nodes came from one, else 0.
    #[serde(default)]
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityHeader {
    pub domain_spec: DomainSpec,
    pub resolution: usize,
    pub capacitance: [f64; 2],
    pub total_expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSidecar {
    pub k: f64,
    pub alpha: Vec3,
    pub seed: u64,
    #[serde(rename = "M")]
    pub m: usize,
}

fn fmt(v: f64) -> String {
    format!("{v:e}")
}

fn write_header<W: Write, H: Serialize>(w: &mut W, header: &H, columns: &str) -> Result<()> {
    let json = serde_json::to_string(header).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w, "# {json}")?;
    writeln!(w, "{columns}")?;
    Ok(())
}

pub fn write_field<W: Write>(w: &mut W, field: &ComplexField, k: Option<f64>, alpha: Option<Vec3>) -> Result<()> {
    let header = FieldHeader {
        domain_spec: field.grid.domain.clone(),
        resolution: field.grid.resolution,
        role: field.role,
        k,
        alpha,
    };
    write_header(w, &header, FIELD_COLUMNS)?;
    for (x, v) in field.grid.cell_centers.iter().zip(&field.values) {
        writeln!(w, "{},{},{},{},{}", fmt(x[0]), fmt(x[1]), fmt(x[2]), fmt(v.re), fmt(v.im))?;
    }
    Ok(())
}

pub fn write_grid<W: Write>(w: &mut W, grid: &DomainGrid) -> Result<()> {
    let header = GridHeader {
        domain_spec: grid.domain.clone(),
        resolution: grid.resolution,
    };
    write_header(w, &header, GRID_COLUMNS)?;
    for (x, wt) in grid.cell_centers.iter().zip(&grid.cell_weights) {
        writeln!(w, "{},{},{},{}", fmt(x[0]), fmt(x[1]), fmt(x[2]), fmt(*wt))?;
    }
    Ok(())
}

pub fn write_pattern<W: Write>(w: &mut W, p: &FarFieldPattern) -> Result<()> {
    let header = PatternHeader {
        k: p.k,
        alpha: p.alpha,
        order: p.quadrature.order,
    };
    write_header(w, &header, PATTERN_COLUMNS)?;
    for ((b, wt), v) in p.quadrature.nodes.iter().zip(&p.quadrature.weights).zip(&p.values) {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt(b[0]),
            fmt(b[1]),
            fmt(b[2]),
            fmt(*wt),
            fmt(v.re),
            fmt(v.im)
        )?;
    }
    Ok(())
}

pub fn write_density<W: Write>(w: &mut W, n: &DensityField) -> Result<()> {
    let header = DensityHeader {
        domain_spec: n.grid.domain.clone(),
        resolution: n.grid.resolution,
        capacitance: [n.capacitance.re, n.capacitance.im],
        total_expected: n.total_expected,
    };
    write_header(w, &header, DENSITY_COLUMNS)?;
    for (x, v) in n.grid.cell_centers.iter().zip(&n.values) {
        writeln!(w, "{},{},{},{}", fmt(x[0]), fmt(x[1]), fmt(x[2]), fmt(*v))?;
    }
    Ok(())
}

/// Writes the ensemble CSV (no header line) and returns nothing; the JSON
/// sidecar goes to a separate writer.
pub fn write_ensemble<W: Write, S: Write>(
    csv: &mut W,
    sidecar: &mut S,
    ens: &ParticleEnsemble,
    meta: &EnsembleSidecar,
) -> Result<()> {
    writeln!(csv, "{ENSEMBLE_COLUMNS}")?;
    for ((x, a), c) in ens.positions.iter().zip(&ens.radii).zip(&ens.capacitances) {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            fmt(x[0]),
            fmt(x[1]),
            fmt(x[2]),
            fmt(*a),
            fmt(c.re),
            fmt(c.im)
        )?;
    }
    let json = serde_json::to_string_pretty(meta).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(sidecar, "{json}")?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Self {
            inner: r.lines(),
            line: 0,
        }
    }

    fn next_line(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            None => Ok(None),
            Some(l) => {
                self.line += 1;
                Ok(Some(l?))
            }
        }
    }

    fn expect_line(&mut self, what: &str) -> Result<String> {
        self.next_line()?.ok_or_else(|| Error::Parse {
            line: self.line + 1,
            message: format!("unexpected end of file, expected {what}"),
        })
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn header<H: for<'de> Deserialize<'de>>(&mut self, columns: &str) -> Result<H> {
        let first = self.expect_line("a '# {json}' header")?;
        let json = first
            .strip_prefix('#')
            .ok_or_else(|| self.err("header line must start with '#'"))?;
        let header: H = serde_json::from_str(json.trim()).map_err(|e| self.err(format!("invalid header: {e}")))?;
        let cols = self.expect_line("a column header")?;
        if cols.trim() != columns {
            return Err(self.err(format!("expected columns '{columns}', found '{}'", cols.trim())));
        }
        Ok(header)
    }

    fn row(&mut self, width: usize) -> Result<Option<Vec<f64>>> {
        loop {
            let Some(line) = self.next_line()? else {
                return Ok(None);
            };
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != width {
                return Err(self.err(format!("expected {width} columns, found {}", parts.len())));
            }
            let mut out = Vec::with_capacity(width);
            for p in parts {
                let v: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| self.err(format!("cannot parse '{}' as a number", p.trim())))?;
                out.push(v);
            }
            return Ok(Some(out));
        }
    }

    fn rows_for_grid(&mut self, grid: &DomainGrid, width: usize) -> Result<Vec<Vec<f64>>> {
        let mut rows = Vec::with_capacity(grid.len());
        while let Some(r) = self.row(width)? {
            let idx = rows.len();
            if idx >= grid.len() {
                return Err(self.err(format!("more rows than the {} grid cells", grid.len())));
            }
            let c = &grid.cell_centers[idx];
            let scale = grid.spacing.iter().copied().fold(0.0, f64::max);
            if (0..3).any(|a| (r[a] - c[a]).abs() > POSITION_TOL * scale.max(1.0)) {
                return Err(self.err(format!("cell position {:?} does not match grid cell {idx} at {c:?}", &r[..3])));
            }
            rows.push(r);
        }
        if rows.len() != grid.len() {
            return Err(Error::Parse {
                line: self.line + 1,
                message: format!("file ends after {} rows but the grid has {} cells", rows.len(), grid.len()),
            });
        }
        Ok(rows)
    }
}

pub fn read_field<R: BufRead>(r: R) -> Result<(ComplexField, FieldHeader)> {
    let mut lines = Lines::new(r);
    let header: FieldHeader = lines.header(FIELD_COLUMNS)?;
    let grid = DomainGrid::build(header.domain_spec.clone(), header.resolution)
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    let rows = lines.rows_for_grid(&grid, 5)?;
    let values = rows.iter().map(|r| Complex64::new(r[3], r[4])).collect();
    let field = ComplexField::new(Arc::new(grid), values, header.role)?;
    Ok((field, header))
}

pub fn read_pattern<R: BufRead>(r: R) -> Result<FarFieldPattern> {
    let mut lines = Lines::new(r);
    let header: PatternHeader = lines.header(PATTERN_COLUMNS)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut values = Vec::new();
    while let Some(r) = lines.row(6)? {
        nodes.push([r[0], r[1], r[2]]);
        weights.push(r[3]);
        values.push(Complex64::new(r[4], r[5]));
    }
    if nodes.is_empty() {
        return Err(Error::Parse {
            line: lines.line + 1,
            message: "pattern file has no nodes".into(),
        });
    }
    let mut quad = SphereQuadrature::from_parts(nodes, weights).map_err(|e| Error::Parse {
        line: 2,
        message: e.to_string(),
    })?;
    if header.order > 0 {
        let rebuilt = SphereQuadrature::new(header.order)?;
        if rebuilt.len() == quad.len() {
            quad.order = header.order;
        }
    }
    FarFieldPattern::new(Arc::new(quad), values, header.k, header.alpha).map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })
}

pub fn read_density<R: BufRead>(r: R) -> Result<DensityField> {
    let mut lines = Lines::new(r);
    let header: DensityHeader = lines.header(DENSITY_COLUMNS)?;
    let grid = DomainGrid::build(header.domain_spec.clone(), header.resolution)
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    let rows = lines.rows_for_grid(&grid, 4)?;
    let values = rows.iter().map(|r| r[3]).collect();
    DensityField::new(
        Arc::new(grid),
        values,
        Complex64::new(header.capacitance[0], header.capacitance[1]),
    )
}

/// Which kind of grid file a path holds, judged by its column header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFileKind {
    Field,
    Density,
    Grid,
    Pattern,
}

pub fn sniff_kind(path: &Path) -> Result<GridFileKind> {
    let mut lines = Lines::new(BufReader::new(File::open(path)?));
    lines.expect_line("a header")?;
    let cols = lines.expect_line("a column header")?;
    match cols.trim() {
        FIELD_COLUMNS => Ok(GridFileKind::Field),
        DENSITY_COLUMNS => Ok(GridFileKind::Density),
        GRID_COLUMNS => Ok(GridFileKind::Grid),
        PATTERN_COLUMNS => Ok(GridFileKind::Pattern),
        other => Err(Error::Parse {
            line: 2,
            message: format!("unrecognized columns '{other}'"),
        }),
    }
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
