//! Uniform periodic grid on `[-L, L)` and the sampled functions living on it.
//!
//! Quadrature is the periodic rectangle rule, derivatives are Fourier
//! multipliers and point evaluation is local four-point cubic interpolation.

use std::io::{Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, Parity};

/// Default half width of the periodic box.
pub const DEFAULT_HALF_WIDTH: f64 = 30.0;
/// Default number of nodes.
pub const DEFAULT_POINTS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    half_width: f64,
    n_points: usize,
}

impl UniformGrid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidHalfWidth(half_width));
        }
        if n_points < 16 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGridSize(n_points));
        }
        Ok(Self { half_width, n_points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    /// Always false; grids have at least 16 nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_width
    }

    /// Node `x_j = -L + j h`.
    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.point(j))
    }

    /// The same box with twice as many nodes.
    pub fn refined(&self) -> Self {
        Self { half_width: self.half_width, n_points: self.n_points * 2 }
    }

    /// Maps `x` onto the fundamental interval `[-L, L)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let p = self.period();
        let w = (x + self.half_width).rem_euclid(p) - self.half_width;
        if w >= self.half_width {
            w - p
        } else {
            w
        }
    }

    /// Signed minimal-image displacement `x - y`.
    pub fn displacement(&self, x: f64, y: f64) -> f64 {
        self.wrap(x - y)
    }

    /// Index of the node closest to `x` (periodically).
    pub fn nearest_index(&self, x: f64) -> usize {
        let s = (self.wrap(x) + self.half_width) / self.spacing();
        (s.round() as usize) % self.n_points
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= -self.half_width && x < self.half_width
    }
}

impl Default for UniformGrid {
    fn default() -> Self {
        Self { half_width: DEFAULT_HALF_WIDTH, n_points: DEFAULT_POINTS }
    }
}

/// Sup and L² norms of a grid function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Norms {
    pub l2: f64,
    pub linf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(j));
        }
        Ok(Self { grid, values })
    }

    /// Internal constructor for values produced by finite arithmetic on
    /// finite inputs.
    pub(crate) fn from_parts(grid: UniformGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self::from_parts(grid, vec![0.0; grid.len()])
    }

    pub fn constant(grid: UniformGrid, value: f64) -> Self {
        Self::from_parts(grid, vec![value; grid.len()])
    }

    /// Samples `f` at every node. Panics if `f` returns a non-finite value.
    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = grid.points().map(&f).collect();
        assert!(values.iter().all(|v| v.is_finite()), "sampled function returned a non-finite value");
        Self::from_parts(grid, values)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_parts(self.grid, self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|v| factor * v)
    }

    /// Periodic rectangle rule `h Σ f_j`.
    pub fn integrate(&self) -> f64 {
        self.grid.spacing() * self.values.iter().sum::<f64>()
    }

    /// Fourier derivative of order 1 or 2. Odd orders drop the Nyquist mode.
    pub fn spectral_derivative(&self, order: u32) -> Result<Self> {
        let values = match order {
            1 => self.apply_multiplier(Parity::Odd, |k| Complex64::new(0.0, k)),
            2 => self.apply_multiplier(Parity::Even, |k| Complex64::new(-k * k, 0.0)),
            other => return Err(Error::UnsupportedOrder(other)),
        };
        Ok(values)
    }

    /// `f(x - shift)`, i.e. the function translated right by `shift`, via a
    /// Fourier phase. Exact for band-limited data.
    pub fn translate(&self, shift: f64) -> Self {
        self.apply_multiplier(Parity::Even, |k| Complex64::from_polar(1.0, -k * shift))
    }

    pub(crate) fn apply_multiplier(&self, parity: Parity, m: impl Fn(f64) -> Complex64) -> Self {
        Self::from_parts(self.grid, spectral::apply_multiplier(&self.values, self.grid.spacing(), parity, m))
    }

    /// Local cubic interpolation through the four nearest nodes.
    pub fn eval_at(&self, x: f64) -> Result<f64> {
        let l = self.grid.half_width();
        if !self.grid.contains(x) {
            return Err(Error::OutOfDomain { x, lo: -l, hi: l });
        }
        Ok(self.interpolate(x))
    }

    /// Cubic interpolation at any real `x`, reduced periodically.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.grid.len();
        let s = (self.grid.wrap(x) + self.grid.half_width()) / self.grid.spacing();
        let base = s.floor();
        let t = s - base;
        let i = base as isize;
        let at = |offset: isize| self.values[(i + offset).rem_euclid(n as isize) as usize];
        let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        w0 * at(-1) + w1 * at(0) + w2 * at(1) + w3 * at(2)
    }

    pub fn norms(&self) -> Norms {
        Norms { l2: self.map(|v| v * v).integrate().sqrt(), linf: self.max_abs() }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Index of the first node attaining the maximum.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = j;
            }
        }
        best
    }

    /// Index of the first node attaining the minimum.
    pub fn argmin(&self) -> usize {
        let mut best = 0;
        for (j, &v) in self.values.iter().enumerate() {
            if v < self.values[best] {
                best = j;
            }
        }
        best
    }

    /// Writes `x,value` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["x", "value"])?;
        for (x, v) in self.grid.points().zip(&self.values) {
            out.write_record([format!("{x:.16e}"), format!("{v:.16e}")])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads a CSV written by [`GridFunction::write_csv`]. The grid is
    /// reconstructed from the first node and the row count.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut input = csv::Reader::from_reader(reader);
        let headers = input.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "value" {
            return Err(Error::Csv("expected header `x,value`".into()));
        }
        let mut xs = Vec::new();
        let mut values = Vec::new();
        for record in input.records() {
            let record = record?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Csv(format!("bad number {s:?}: {e}")));
            xs.push(parse(&record[0])?);
            values.push(parse(&record[1])?);
        }
        let first = *xs.first().ok_or_else(|| Error::Csv("no rows".into()))?;
        let grid = UniformGrid::new(-first, values.len())?;
        let h = grid.spacing();
        if let Some(j) = xs.iter().enumerate().position(|(j, &x)| (x - grid.point(j)).abs() > 1e-9 * h.max(1.0)) {
            return Err(Error::Csv(format!("row {j} is not on a uniform grid starting at {first}")));
        }
        Self::new(grid, values)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
