#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Result, VesselError};

/// Uniform grid on `[t_start, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    points: usize,
}

impl TimeGrid {
    pub const DEFAULT_POINTS: usize = 129;

    pub fn new(t_start: f64, t_end: f64, points: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite()) || t_start >= t_end {
            return Err(VesselError::Grid(format!("need t_start < t_end, got [{t_start}, {t_end}]")));
        }
        if points < 4 {
            return Err(VesselError::Grid(format!("need at least 4 nodes, got {points}")));
        }
        Ok(Self { t_start, t_end, points })
    }

    /// `[0, 1]` with the default node count.
    pub fn unit() -> Self {
        Self { t_start: 0.0, t_end: 1.0, points: Self::DEFAULT_POINTS }
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.t_end
        } else {
            self.t_start + (self.t_end - self.t_start) * (i as f64 / (self.points - 1) as f64)
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && t <= self.t_end
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(VesselError::Domain { t, start: self.t_start, end: self.t_end })
        }
    }

    /// Interval index `i` and offset `t - node(i)`; `Ok((i, 0.0))` on a node.
    pub(crate) fn locate(&self, t: f64) -> Result<(usize, f64)> {
        self.check(t)?;
        let s = (t - self.t_start) / self.spacing();
        let near = s.round() as usize;
        if near < self.points && self.node(near) == t {
            return Ok((near, 0.0));
        }
        let i = (s.floor() as usize).min(self.points - 2);
        Ok((i, t - self.node(i)))
    }

    /// Index of the node equal to `t`, if any.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        match self.locate(t) {
            Ok((i, 0.0)) => Some(i),
            _ => None,
        }
    }

    /// `m` evenly spaced sample times; a single sample sits at `t_start`.
    pub fn samples(&self, m: usize) -> Vec<f64> {
        match m {
            0 => Vec::new(),
            1 => alloc::vec![self.t_start],
            _ => (0..m)
                .map(|k| {
                    if k + 1 == m {
                        self.t_end
                    } else {
                        self.t_start + (self.t_end - self.t_start) * (k as f64 / (m - 1) as f64)
                    }
                })
                .collect(),
        }
    }

    pub fn same_as(&self, other: &TimeGrid) -> bool {
        self == other
    }
}
