//! Rectangular sampling lattices and the 2D fields sampled on them.

use crate::error::{Error, Result};

/// Uniform lattice over `[x_min, x_max] × [y_min, y_max]` with `nx × ny`
/// nodes (endpoints included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        let g = GridSpec { x_range, y_range, nx, ny };
        g.validate()?;
        Ok(g)
    }

    /// Square grid `[-half, half]²` with `n` nodes per axis.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new((-half, half), (-half, half), n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
        if !ok(self.x_range) {
            return Err(Error::invalid("grid", format!("bad x range {:?}", self.x_range)));
        }
        if !ok(self.y_range) {
            return Err(Error::invalid("grid", format!("bad y range {:?}", self.y_range)));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::invalid("grid", "need at least 2 nodes per axis"));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / (self.nx - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_range.1 - self.y_range.0) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_range.1
        } else {
            self.x_range.0 + i as f64 * self.dx()
        }
    }

    pub fn y(&self, j: usize) -> f64 {
        if j + 1 == self.ny {
            self.y_range.1
        } else {
            self.y_range.0 + j as f64 * self.dy()
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same extent with the spacing halved (`n → 2n - 1` nodes per axis),
    /// so every old node is also a new node.
    pub fn refined(&self) -> Self {
        GridSpec { nx: 2 * self.nx - 1, ny: 2 * self.ny - 1, ..*self }
    }

    /// Same shape translated by `(sx, sy)`.
    pub fn shifted(&self, sx: f64, sy: f64) -> Self {
        GridSpec {
            x_range: (self.x_range.0 + sx, self.x_range.1 + sx),
            y_range: (self.y_range.0 + sy, self.y_range.1 + sy),
            ..*self
        }
    }
}

/// Values sampled on a [`GridSpec`], stored row-major with row `j`
/// holding the nodes at `y(j)` (rows run from `y_min` upward).
#[derive(Debug, Clone, PartialEq)]
pub struct Field2<T> {
    grid: GridSpec,
    values: Vec<T>,
}

impl<T: Copy + Send + Sync> Field2<T> {
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(f64, f64) -> T + Sync,
    {
        use rayon::prelude::*;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(grid.x(idx % grid.nx), grid.y(idx / grid.nx)))
            .collect();
        Field2 { grid, values }
    }

    pub fn from_values(grid: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "field",
                format!("{} values for a {}x{} grid", values.len(), grid.nx, grid.ny),
            ));
        }
        Ok(Field2 { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[j * self.grid.nx + i]
    }

    pub fn map<U: Copy + Send + Sync>(&self, f: impl Fn(T) -> U) -> Field2<U> {
        Field2 { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `(i, j, x, y, value)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64, f64, T)> + '_ {
        let g = self.grid;
        self.values.iter().enumerate().map(move |(idx, &v)| {
            let (i, j) = (idx % g.nx, idx / g.nx);
            (i, j, g.x(i), g.y(j), v)
        })
    }
}

impl Field2<f64> {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Composite trapezoid rule over the grid rectangle.
    pub fn trapezoid(&self) -> f64 {
        let g = &self.grid;
        let mut total = 0.0;
        for j in 0..g.ny {
            let wy = if j == 0 || j + 1 == g.ny { 0.5 } else { 1.0 };
            let mut row = 0.0;
            for i in 0..g.nx {
                let wx = if i == 0 || i + 1 == g.nx { 0.5 } else { 1.0 };
                row += wx * self.get(i, j);
            }
            total += wy * row;
        }
        total * g.dx() * g.dy()
    }
}
