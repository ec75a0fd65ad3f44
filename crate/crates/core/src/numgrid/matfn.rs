#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::grid::TimeGrid;
use super::linalg::{self, c, CMat};
use crate::error::{Result, VesselError};

pub const DEFAULT_COND_LIMIT: f64 = 1e8;

/// Matrix-valued function of t₂: samples on a uniform grid joined by a
/// clamped cubic spline. Evaluation at a node returns the sample as stored.
#[derive(Debug, Clone)]
pub struct MatFn {
    grid: TimeGrid,
    rows: usize,
    cols: usize,
    samples: Vec<CMat>,
    // second derivatives of the spline at the nodes
    curv: Vec<CMat>,
}

impl MatFn {
    pub fn from_samples(grid: TimeGrid, samples: Vec<CMat>) -> Result<Self> {
        if samples.len() != grid.points() {
            return Err(VesselError::Shape {
                what: String::from("samples"),
                detail: format!("expected {} nodes, got {}", grid.points(), samples.len()),
            });
        }
        let (rows, cols) = samples[0].shape();
        for (i, s) in samples.iter().enumerate() {
            if s.shape() != (rows, cols) {
                return Err(VesselError::Shape {
                    what: String::from("samples"),
                    detail: format!("node {i} is {:?}, node 0 is {:?}", s.shape(), (rows, cols)),
                });
            }
            if !linalg::is_finite(s) {
                return Err(VesselError::Shape {
                    what: String::from("samples"),
                    detail: format!("non-finite entry at node {i}"),
                });
            }
        }
        let curv = spline_curvatures(&grid, &samples);
        Ok(Self { grid, rows, cols, samples, curv })
    }

    pub fn constant(grid: TimeGrid, m: CMat) -> Self {
        let (rows, cols) = m.shape();
        let zero = linalg::zeros(rows, cols);
        Self {
            grid,
            rows,
            cols,
            curv: alloc::vec![zero; grid.points()],
            samples: alloc::vec![m; grid.points()],
        }
    }

    pub fn zeros(grid: TimeGrid, rows: usize, cols: usize) -> Self {
        Self::constant(grid, linalg::zeros(rows, cols))
    }

    pub fn identity(grid: TimeGrid, n: usize) -> Self {
        Self::constant(grid, linalg::eye(n))
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> CMat) -> Result<Self> {
        Self::from_samples(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub fn try_from_fn(grid: TimeGrid, f: impl Fn(f64) -> Result<CMat>) -> Result<Self> {
        let s = grid.nodes().into_iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::from_samples(grid, s)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn samples(&self) -> &[CMat] {
        &self.samples
    }

    pub fn sample(&self, i: usize) -> &CMat {
        &self.samples[i]
    }

    pub fn eval(&self, t: f64) -> Result<CMat> {
        let (i, off) = self.grid.locate(t)?;
        if off == 0.0 {
            return Ok(self.samples[i].clone());
        }
        let h = self.grid.spacing();
        let a = (h - off) / h;
        let b = off / h;
        let h2 = h * h / 6.0;
        let ca = a * (a * a - 1.0) * h2;
        let cb = b * (b * b - 1.0) * h2;
        Ok(&self.samples[i] * c(a, 0.0)
            + &self.samples[i + 1] * c(b, 0.0)
            + &self.curv[i] * c(ca, 0.0)
            + &self.curv[i + 1] * c(cb, 0.0))
    }

    /// Derivative of the interpolant at `t`.
    pub fn eval_derivative(&self, t: f64) -> Result<CMat> {
        let (i, off) = self.grid.locate(t)?;
        let n = self.grid.points();
        let h = self.grid.spacing();
        if off == 0.0 && i + 1 == n {
            let j = n - 2;
            return Ok((&self.samples[j + 1] - &self.samples[j]) * c(1.0 / h, 0.0)
                + (&self.curv[j] + &self.curv[j + 1] * c(2.0, 0.0)) * c(h / 6.0, 0.0));
        }
        let a = (h - off) / h;
        let b = off / h;
        let ca = -(3.0 * a * a - 1.0) * h / 6.0;
        let cb = (3.0 * b * b - 1.0) * h / 6.0;
        Ok((&self.samples[i + 1] - &self.samples[i]) * c(1.0 / h, 0.0)
            + &self.curv[i] * c(ca, 0.0)
            + &self.curv[i + 1] * c(cb, 0.0))
    }

    /// Derivative of the interpolant, sampled on the same grid.
    pub fn derivative(&self) -> MatFn {
        let s = (0..self.grid.points())
            .map(|i| self.eval_derivative(self.grid.node(i)).expect("node inside grid"))
            .collect();
        MatFn::from_samples(self.grid, s).expect("derivative samples are finite")
    }

    /// Pointwise inverse. Fails at the first node whose condition number exceeds `cond_limit`.
    pub fn inverse_fn(&self, cond_limit: f64) -> Result<MatFn> {
        self.inverse_named("matrix function", cond_limit)
    }

    pub(crate) fn inverse_named(&self, what: &str, cond_limit: f64) -> Result<MatFn> {
        if self.rows != self.cols {
            return Err(VesselError::Shape {
                what: String::from(what),
                detail: format!("{}x{} is not square", self.rows, self.cols),
            });
        }
        self.check_invertible(what, cond_limit)?;
        let inv = self
            .samples
            .iter()
            .map(|m| linalg::inverse(m).expect("conditioning checked"))
            .collect();
        MatFn::from_samples(self.grid, inv)
    }

    /// First node at which the sample is singular or worse conditioned than `cond_limit`.
    pub fn check_invertible(&self, what: &str, cond_limit: f64) -> Result<()> {
        for (node, m) in self.samples.iter().enumerate() {
            let cond = linalg::condition(m);
            if !(cond <= cond_limit) {
                return Err(VesselError::Invertibility { what: String::from(what), node, cond });
            }
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> MatFn {
        MatFn::from_samples(self.grid, self.samples.iter().map(f).collect())
            .expect("pointwise map keeps a uniform shape")
    }

    pub fn try_map(&self, f: impl Fn(usize, &CMat) -> Result<CMat>) -> Result<MatFn> {
        let s = self.samples.iter().enumerate().map(|(i, m)| f(i, m)).collect::<Result<Vec<_>>>()?;
        MatFn::from_samples(self.grid, s)
    }

    pub fn zip_map(&self, other: &MatFn, f: impl Fn(&CMat, &CMat) -> CMat) -> MatFn {
        debug_assert!(self.grid == other.grid);
        MatFn::from_samples(
            self.grid,
            self.samples.iter().zip(&other.samples).map(|(a, b)| f(a, b)).collect(),
        )
        .expect("pointwise map keeps a uniform shape")
    }

    pub fn mul(&self, other: &MatFn) -> MatFn {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn add(&self, other: &MatFn) -> MatFn {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &MatFn) -> MatFn {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, z: num_complex::Complex64) -> MatFn {
        self.map(|m| m * z)
    }

    pub fn adjoint(&self) -> MatFn {
        self.map(|m| m.adjoint())
    }

    /// Max over nodes of the Frobenius norm.
    pub fn max_norm(&self) -> f64 {
        self.samples.iter().map(linalg::norm).fold(0.0, f64::max)
    }

    /// Max over nodes of the Frobenius distance.
    pub fn max_dist(&self, other: &MatFn) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| linalg::dist(a, b))
            .fold(0.0, f64::max)
    }

    pub fn is_constant(&self) -> bool {
        self.samples.iter().all(|m| m == &self.samples[0])
    }
}

/// One-sided first-derivative weights (exact for polynomials of degree < len).
fn end_weights(n: usize) -> &'static [f64] {
    match n {
        4 => &[-11.0 / 6.0, 3.0, -1.5, 1.0 / 3.0],
        5 => &[-25.0 / 12.0, 4.0, -3.0, 4.0 / 3.0, -0.25],
        _ => &[-137.0 / 60.0, 5.0, -5.0, 10.0 / 3.0, -1.25, 0.2],
    }
}

/// Second derivatives of the clamped cubic spline through uniform samples.
///
/// End slopes come from one-sided differences of order up to five, so cubics
/// are reproduced exactly and node derivatives stay fourth-order accurate up
/// to the boundary.
fn spline_curvatures(grid: &TimeGrid, y: &[CMat]) -> Vec<CMat> {
    let n = y.len();
    let h = grid.spacing();
    let (rows, cols) = y[0].shape();
    let w = end_weights(n.min(6));
    let mut s0 = linalg::zeros(rows, cols);
    let mut s1 = linalg::zeros(rows, cols);
    for (k, &wk) in w.iter().enumerate() {
        s0 += &y[k] * c(wk / h, 0.0);
        s1 -= &y[n - 1 - k] * c(wk / h, 0.0);
    }
    let k6 = 6.0 / h;
    let r: Vec<CMat> = (0..n)
        .map(|i| {
            if i == 0 {
                ((&y[1] - &y[0]) / c(h, 0.0) - &s0) * c(k6, 0.0)
            } else if i + 1 == n {
                (&s1 - (&y[n - 1] - &y[n - 2]) / c(h, 0.0)) * c(k6, 0.0)
            } else {
                (&y[i + 1] - &y[i] * c(2.0, 0.0) + &y[i - 1]) * c(k6 / h, 0.0)
            }
        })
        .collect();
    // Thomas algorithm: diagonal [2, 4, …, 4, 2], unit off-diagonals.
    let diag = |i: usize| if i == 0 || i + 1 == n { 2.0 } else { 4.0 };
    let mut cp = alloc::vec![0.0; n];
    let mut dp: Vec<CMat> = Vec::with_capacity(n);
    cp[0] = 1.0 / diag(0);
    dp.push(&r[0] / c(diag(0), 0.0));
    for i in 1..n {
        let denom = diag(i) - cp[i - 1];
        cp[i] = 1.0 / denom;
        let v = (&r[i] - &dp[i - 1]) / c(denom, 0.0);
        dp.push(v);
    }
    for i in (0..n - 1).rev() {
        let v = &dp[i] - &dp[i + 1] * c(cp[i], 0.0);
        dp[i] = v;
    }
    dp
}
