//! Periodic collocation grid and real-valued grid functions.
//!
//! The domain is `[-X, X) x [-Y, Y)` sampled at `Nx x Ny` uniformly spaced
//! nodes, `x_i = -X + i*h_x` and `y_j = -Y + j*h_y`. Storage is row-major
//! with the y-index outer, so the row at fixed `j` is contiguous.

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-X, X) x [-Y, Y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Half-width of the domain in x.
    pub x: f64,
    /// Half-width of the domain in y.
    pub y: f64,
    /// Number of collocation nodes in x (even, >= 4).
    pub nx: usize,
    /// Number of collocation nodes in y (even, >= 4).
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x: f64, y: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(x > 0.0 && x.is_finite() && y > 0.0 && y.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "half-widths must be positive and finite, got X = {x}, Y = {y}"
            )));
        }
        for (name, n) in [("Nx", nx), ("Ny", ny)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "{name} must be even and >= 4, got {n}"
                )));
            }
        }
        Ok(Self { x, y, nx, ny })
    }

    /// Square grid on `[-1, 1)^2` with `n` nodes per direction.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(1.0, 1.0, n, n)
    }

    pub fn hx(&self) -> f64 {
        2.0 * self.x / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        2.0 * self.y / self.ny as f64
    }

    /// Domain area `|Omega| = 4XY`.
    pub fn area(&self) -> f64 {
        4.0 * self.x * self.y
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// x coordinate of the node with storage index `i` in `0..Nx`.
    pub fn node_x(&self, i: usize) -> f64 {
        -self.x + i as f64 * self.hx()
    }

    /// y coordinate of the node with storage index `j` in `0..Ny`.
    pub fn node_y(&self, j: usize) -> f64 {
        -self.y + j as f64 * self.hy()
    }

    /// Signed x frequency for an FFT-order index: `0..=Nx/2` then negative.
    ///
    /// The image is exactly the index range `-Nx/2+1 ..= Nx/2`.
    pub fn freq_x(&self, i: usize) -> i64 {
        debug_assert!(i < self.nx);
        if i <= self.nx / 2 {
            i as i64
        } else {
            i as i64 - self.nx as i64
        }
    }

    /// Signed y frequency for an FFT-order index.
    pub fn freq_y(&self, j: usize) -> i64 {
        debug_assert!(j < self.ny);
        if j <= self.ny / 2 {
            j as i64
        } else {
            j as i64 - self.ny as i64
        }
    }

    /// Squared wavenumber `(k pi / X)^2 + (l pi / Y)^2` for signed frequencies.
    pub fn wavenumber_sq(&self, k: i64, l: i64) -> f64 {
        let kx = k as f64 * std::f64::consts::PI / self.x;
        let ky = l as f64 * std::f64::consts::PI / self.y;
        kx * kx + ky * ky
    }

    fn describe(&self) -> String {
        format!("{}x{} on [-{},{})x[-{},{})", self.nx, self.ny, self.x, self.x, self.y, self.y)
    }
}

/// Real-valued periodic grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Sample `f(x, y)` at the collocation nodes.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            let y = grid.node_y(j);
            for i in 0..grid.nx {
                values.push(f(grid.node_x(i), y));
            }
        }
        Self { grid, values }
    }

    /// Wrap raw values (row-major, y-index outer). Rejects non-finite entries.
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "value buffer has length {}, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Value at storage indices `(i, j)`, `0 <= i < Nx`, `0 <= j < Ny`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.grid.nx + i] = v;
    }

    /// Periodic accessor: indices are taken modulo `(Nx, Ny)`.
    pub fn at(&self, i: isize, j: isize) -> f64 {
        let nx = self.grid.nx as isize;
        let ny = self.grid.ny as isize;
        let i = i.rem_euclid(nx) as usize;
        let j = j.rem_euclid(ny) as usize;
        self.get(i, j)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid. Panics on
    /// mismatched grids; use [`Field::inner`] for the checked bilinear form.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(self.grid, other.grid, "zip_map requires matching grids");
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// In-place `self += c * other`.
    pub fn add_scaled(&mut self, c: f64, other: &Field) {
        assert_eq!(self.grid, other.grid, "add_scaled requires matching grids");
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// Discrete mean `<f, 1>_h / |Omega|`.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.grid.len() as f64
    }

    /// Discrete L2 inner product `<f, g>_h = h_x h_y sum f_ij g_ij`.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                expected: self.grid.describe(),
                found: other.grid.describe(),
            });
        }
        let dot: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| a * b)
            .sum();
        Ok(self.grid.hx() * self.grid.hy() * dot)
    }

    /// Discrete L2 norm.
    pub fn norm_l2(&self) -> f64 {
        let sq: f64 = self.values.iter().map(|&v| v * v).sum();
        (self.grid.hx() * self.grid.hy() * sq).sqrt()
    }

    /// Discrete L-infinity norm.
    pub fn norm_linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }
}
