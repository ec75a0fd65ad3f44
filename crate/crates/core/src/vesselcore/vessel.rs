use alloc::format;

use super::signature::{expect_grid, expect_shape, Signature};
use crate::error::Result;
use crate::numgrid::{MatFn, TimeGrid};

/// Differential vessel (A₁, A₂, B̃, C, D, D̃; σ) on the state space ℂⁿ.
#[derive(Debug, Clone)]
pub struct DiffVessel {
    pub a1: MatFn,
    pub a2: MatFn,
    pub bt: MatFn,
    pub c: MatFn,
    pub d: MatFn,
    pub dt: MatFn,
    pub sig: Signature,
}

impl DiffVessel {
    /// Checks shapes and grids; the axioms are checked separately by `verify_vessel`.
    pub fn new(a1: MatFn, a2: MatFn, bt: MatFn, c: MatFn, d: MatFn, dt: MatFn, sig: Signature) -> Result<Self> {
        let n = a1.rows();
        let e = sig.input_dim();
        let es = sig.output_dim();
        let grid = *sig.grid();
        for (name, f, shape) in [
            ("A1", &a1, (n, n)),
            ("A2", &a2, (n, n)),
            ("B", &bt, (n, e)),
            ("C", &c, (es, n)),
            ("D", &d, (es, e)),
            ("Dt", &dt, (es, e)),
        ] {
            expect_shape(name, f, shape)?;
            expect_grid(name, f, &grid)?;
        }
        Ok(Self { a1, a2, bt, c, d, dt, sig })
    }

    pub fn grid(&self) -> &TimeGrid {
        self.sig.grid()
    }

    pub fn state_dim(&self) -> usize {
        self.a1.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.sig.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.sig.output_dim()
    }

    /// B̃σ₁.
    pub fn b1(&self) -> MatFn {
        self.bt.mul(&self.sig.sigma1)
    }

    /// B̃σ₂.
    pub fn b2(&self) -> MatFn {
        self.bt.mul(&self.sig.sigma2)
    }

    pub fn describe(&self) -> alloc::string::String {
        format!(
            "vessel n={} e={} e*={} on [{}, {}] with {} nodes",
            self.state_dim(),
            self.input_dim(),
            self.output_dim(),
            self.grid().t_start(),
            self.grid().t_end(),
            self.grid().points()
        )
    }
}
