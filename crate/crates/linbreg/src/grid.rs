use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Dense 2D array of finite `f64` values, row-major.
///
/// `Grid` is the common currency of the whole crate: it holds primal
/// iterates, dual variables, data channels, and transform coefficients
/// alike. All entries are guaranteed finite; all binary operations demand
/// matching shapes and never broadcast.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Grid {
    /// Builds a grid from row-major values, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGrid(format!(
                "dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::InvalidGrid(format!(
                "expected {} values for {rows}x{cols}, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "non-finite value {} at flat index {idx}",
                values[idx]
            )));
        }
        Ok(Grid { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "grid dimensions must be positive");
        Grid {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn constant(rows: usize, cols: usize, value: f64) -> Self {
        assert!(value.is_finite(), "grid entries must be finite");
        let mut g = Grid::zeros(rows, cols);
        g.values.fill(value);
        g
    }

    /// Builds a grid by evaluating `f(row, col)` at every cell.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut g = Grid::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert!(v.is_finite(), "grid entries must be finite, got {v} at ({i},{j})");
                g.values[i * cols + j] = v;
            }
        }
        g
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // dimensions are always positive
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    fn require_same_shape(&self, other: &Grid) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ))
        }
    }

    /// Euclidean inner product Σᵢ aᵢ·bᵢ.
    ///
    /// Summation is sequential in index order, so results are
    /// bit-reproducible across runs.
    pub fn inner(&self, other: &Grid) -> Result<f64> {
        self.require_same_shape(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn add(&self, other: &Grid) -> Result<Grid> {
        self.require_same_shape(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Grid) -> Result<Grid> {
        self.require_same_shape(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn scale(&self, factor: f64) -> Grid {
        self.map(|v| factor * v)
    }

    /// Applies `f` elementwise; the result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Grid {
        let values: Vec<f64> = self.values.iter().map(|&v| f(v)).collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "map produced a non-finite entry"
        );
        Grid {
            rows: self.rows,
            cols: self.cols,
            values,
        }
    }

    fn zip(&self, other: &Grid, f: impl Fn(f64, f64) -> f64) -> Grid {
        let values: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "elementwise operation produced a non-finite entry"
        );
        Grid {
            rows: self.rows,
            cols: self.cols,
            values,
        }
    }

    /// Serialises as CSV: first line `rows,cols`, then one line per row.
    ///
    /// Values are printed with Rust's shortest round-trip formatting, so
    /// reading the file back reproduces every entry bit for bit.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{},{}", self.rows, self.cols);
        for i in 0..self.rows {
            let row = &self.values[i * self.cols..(i + 1) * self.cols];
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn from_csv_string(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse("grid csv", "empty input"))?;
        let mut dims = header.split(',');
        let rows: usize = dims
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse("grid csv", format!("bad header `{header}`")))?;
        let cols: usize = dims
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse("grid csv", format!("bad header `{header}`")))?;
        if dims.next().is_some() {
            return Err(Error::parse("grid csv", format!("bad header `{header}`")));
        }
        let mut values = Vec::with_capacity(rows * cols);
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            for field in line.split(',') {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::parse(
                        "grid csv",
                        format!("bad value `{field}` on data line {}", lineno + 1),
                    )
                })?;
                values.push(v);
            }
        }
        Grid::new(rows, cols, values)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::MissingArtifact(path.display().to_string())
            } else {
                Error::Io(e)
            }
        })?;
        Grid::from_csv_string(&text)
    }
}

/// Returns `alpha * x + y` elementwise.
pub fn axpy(alpha: f64, x: &Grid, y: &Grid) -> Result<Grid> {
    y.require_same_shape(x)?;
    Ok(y.zip(x, |yv, xv| alpha * xv + yv))
}

/// Two grids of identical shape; holds vector fields such as discrete
/// gradients and the two data channels (cos, sin) of the phase problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPair {
    first: Grid,
    second: Grid,
}

impl GridPair {
    pub fn new(first: Grid, second: Grid) -> Result<Self> {
        first.require_same_shape(&second)?;
        Ok(GridPair { first, second })
    }

    pub fn first(&self) -> &Grid {
        &self.first
    }

    pub fn second(&self) -> &Grid {
        &self.second
    }

    pub fn shape(&self) -> (usize, usize) {
        self.first.shape()
    }

    /// Inner product on the product space: Σ (a₁b₁ + a₂b₂).
    pub fn inner(&self, other: &GridPair) -> Result<f64> {
        Ok(self.first.inner(&other.first)? + self.second.inner(&other.second)?)
    }

    pub fn norm_sq(&self) -> f64 {
        self.first.norm_sq() + self.second.norm_sq()
    }
}
