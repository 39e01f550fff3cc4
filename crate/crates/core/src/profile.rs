//! Sampled radial functions.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Rule used to evaluate a profile between its samples.
#[derive(Clone)]
pub enum Interp<T> {
    /// Four-point Lagrange interpolation on the nearest nodes.
    Cubic,
    /// The generating closure, evaluated directly.
    Exact(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T> fmt::Debug for Interp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interp::Cubic => f.write_str("Cubic"),
            Interp::Exact(_) => f.write_str("Exact"),
        }
    }
}

/// A radial function `r ↦ u(r)` sampled on a strictly increasing grid.
///
/// Evaluation outside `[grid.first, grid.last]` is a coverage error. Profiles
/// flagged even are also defined on `[0, grid.first)` through the mirror image
/// `u(-r) = u(r)`.
#[derive(Clone, Debug)]
pub struct RadialProfile<T> {
    grid: Vec<T>,
    values: Vec<T>,
    even: bool,
    interp: Interp<T>,
}

impl<T: Real> RadialProfile<T> {
    pub fn new(grid: Vec<T>, values: Vec<T>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidParams(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 4 {
            return Err(Error::GridTooCoarse { count: grid.len(), needed: 4 });
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParams("grid must be strictly increasing".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite sample {v}")));
        }
        Ok(Self { grid, values, even: false, interp: Interp::Cubic })
    }

    /// Samples `f` on `grid`; evaluation interpolates the samples.
    pub fn from_fn<F: Fn(T) -> T>(grid: Vec<T>, f: F) -> Result<Self> {
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    /// Samples `f` on `grid` and keeps `f` for exact evaluation.
    pub fn analytic<F>(grid: Vec<T>, f: F) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        let values = grid.iter().map(|&r| f(r)).collect();
        let mut p = Self::new(grid, values)?;
        p.interp = Interp::Exact(Arc::new(f));
        Ok(p)
    }

    pub fn with_even(mut self, even: bool) -> Self {
        self.even = even;
        self
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn interp(&self) -> &Interp<T> {
        &self.interp
    }

    pub fn first(&self) -> T {
        self.grid[0]
    }

    pub fn last(&self) -> T {
        self.grid[self.grid.len() - 1]
    }

    /// Lower end of the evaluation domain.
    pub fn domain_start(&self) -> T {
        if self.even {
            T::zero()
        } else {
            self.first()
        }
    }

    pub fn covers(&self, r: T) -> bool {
        r >= self.domain_start() && r <= self.last()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Common spacing if the grid is uniform to relative 1e-9.
    pub fn spacing(&self) -> Option<T> {
        let n = self.grid.len();
        let h = (self.last() - self.first()) / T::of_usize(n - 1);
        let tol = h * T::of(1e-9);
        self.grid.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= tol).then_some(h)
    }

    /// Uniform grid whose first node sits half a step from the origin.
    pub fn is_half_shifted(&self) -> bool {
        match self.spacing() {
            Some(h) => (self.first() - h * T::of(0.5)).abs() <= h * T::of(1e-9),
            None => false,
        }
    }

    pub fn eval(&self, r: T) -> Result<T> {
        if !self.covers(r) {
            return Err(Error::Coverage { r: r.to64(), lo: self.domain_start().to64(), hi: self.last().to64() });
        }
        if let Interp::Exact(f) = &self.interp {
            return Ok(f(r));
        }
        Ok(self.lagrange(r))
    }

    fn node(&self, j: isize) -> (T, T) {
        if j >= 0 {
            let j = j as usize;
            (self.grid[j], self.values[j])
        } else {
            let m = (-j - 1) as usize;
            (-self.grid[m], self.values[m])
        }
    }

    fn lagrange(&self, r: T) -> T {
        let n = self.grid.len() as isize;
        let i = self.grid.partition_point(|&g| g <= r) as isize - 1;
        let lowest = if self.even { -2 } else { 0 };
        let start = (i - 1).clamp(lowest, n - 4);
        let pts: [(T, T); 4] = core::array::from_fn(|q| self.node(start + q as isize));
        for &(x, y) in &pts {
            if x == r {
                return y;
            }
        }
        let mut acc = T::zero();
        for a in 0..4 {
            let mut w = T::one();
            for b in 0..4 {
                if a != b {
                    w = w * (r - pts[b].0) / (pts[a].0 - pts[b].0);
                }
            }
            acc = acc + w * pts[a].1;
        }
        acc
    }

    /// Applies `f` to every sample; the result interpolates.
    pub fn map_values<F: Fn(T, T) -> T>(&self, f: F) -> Result<Self> {
        let values = self.grid.iter().zip(&self.values).map(|(&r, &v)| f(r, v)).collect();
        Ok(Self::new(self.grid.clone(), values)?.with_even(self.even))
    }

    /// Like [`RadialProfile::map_values`], also passing the sample index.
    pub fn map_values_indexed<F: Fn(usize, T, T) -> T>(&self, f: F) -> Result<Self> {
        let values = self.grid.iter().zip(&self.values).enumerate().map(|(i, (&r, &v))| f(i, r, v)).collect();
        Ok(Self::new(self.grid.clone(), values)?.with_even(self.even))
    }

    /// Resamples onto `grid` through [`RadialProfile::eval`].
    pub fn resample(&self, grid: Vec<T>) -> Result<Self> {
        let values = grid.iter().map(|&r| self.eval(r)).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    /// Samples with indices in `range`.
    pub fn slice(&self, range: core::ops::Range<usize>) -> Result<Self> {
        let keeps_origin = range.start == 0;
        Ok(Self::new(self.grid[range.clone()].to_vec(), self.values[range].to_vec())?
            .with_even(self.even && keeps_origin))
    }

    /// Converts every sample with `f`, e.g. between scalar types.
    pub fn convert<U: Real, F: Fn(T) -> U>(&self, f: F) -> Result<RadialProfile<U>> {
        Ok(RadialProfile::new(
            self.grid.iter().map(|&x| f(x)).collect(),
            self.values.iter().map(|&x| f(x)).collect(),
        )?
        .with_even(self.even))
    }
}

/// Uniform grid `r_i = (i + ½)h`, `i = 0..count`.
pub fn half_shifted_grid<T: Real>(h: T, count: usize) -> Vec<T> {
    (0..count).map(|i| (T::of_usize(i) + T::of(0.5)) * h).collect()
}

/// Uniform grid of `count` points from `a` to `b` inclusive.
pub fn uniform_grid<T: Real>(a: T, b: T, count: usize) -> Vec<T> {
    let step = (b - a) / T::of_usize(count - 1);
    (0..count).map(|i| if i + 1 == count { b } else { a + step * T::of_usize(i) }).collect()
}
