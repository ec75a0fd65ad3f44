use alloc::format;
use alloc::string::String;

use crate::error::{Result, VesselError};
use crate::numgrid::{MatFn, TimeGrid, DEFAULT_COND_LIMIT};
use crate::odeflow::SpectralOde;

/// External data σ₁, σ₂, γ (input side) and σ₁*, σ₂*, γ* (output side).
#[derive(Debug, Clone)]
pub struct Signature {
    pub sigma1: MatFn,
    pub sigma2: MatFn,
    pub gamma: MatFn,
    pub sigma1s: MatFn,
    pub sigma2s: MatFn,
    pub gammas: MatFn,
}

pub(crate) fn shape_err(what: &str, detail: String) -> VesselError {
    VesselError::Shape { what: String::from(what), detail }
}

pub(crate) fn expect_shape(what: &str, f: &MatFn, shape: (usize, usize)) -> Result<()> {
    if f.shape() != shape {
        return Err(shape_err(what, format!("expected {:?}, got {:?}", shape, f.shape())));
    }
    Ok(())
}

pub(crate) fn expect_grid(what: &str, f: &MatFn, grid: &TimeGrid) -> Result<()> {
    if f.grid() != grid {
        return Err(shape_err(what, String::from("grid differs from the vessel grid")));
    }
    Ok(())
}

impl Signature {
    pub fn new(
        sigma1: MatFn,
        sigma2: MatFn,
        gamma: MatFn,
        sigma1s: MatFn,
        sigma2s: MatFn,
        gammas: MatFn,
    ) -> Result<Self> {
        let e = sigma1.rows();
        let es = sigma1s.rows();
        let grid = *sigma1.grid();
        for (name, f, n) in [
            ("sigma1", &sigma1, e),
            ("sigma2", &sigma2, e),
            ("gamma", &gamma, e),
            ("sigma1s", &sigma1s, es),
            ("sigma2s", &sigma2s, es),
            ("gammas", &gammas, es),
        ] {
            expect_shape(name, f, (n, n))?;
            expect_grid(name, f, &grid)?;
        }
        Ok(Self { sigma1, sigma2, gamma, sigma1s, sigma2s, gammas })
    }

    /// Same data on both sides.
    pub fn symmetric(sigma1: MatFn, sigma2: MatFn, gamma: MatFn) -> Result<Self> {
        Self::new(sigma1.clone(), sigma2.clone(), gamma.clone(), sigma1, sigma2, gamma)
    }

    pub fn grid(&self) -> &TimeGrid {
        self.sigma1.grid()
    }

    pub fn input_dim(&self) -> usize {
        self.sigma1.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.sigma1s.rows()
    }

    /// σ₁ and σ₁* invertible at every node within `cond_limit`.
    pub fn check_invertible(&self, cond_limit: f64) -> Result<()> {
        self.sigma1.check_invertible("sigma1", cond_limit)?;
        self.sigma1s.check_invertible("sigma1s", cond_limit)
    }

    /// σ₁u′ = (λσ₂ + γ)u.
    pub fn input_ode(&self) -> SpectralOde {
        SpectralOde::new(self.sigma1.clone(), self.sigma2.clone(), self.gamma.clone())
    }

    /// σ₁*y′ = (λσ₂* + γ*)y.
    pub fn output_ode(&self) -> SpectralOde {
        SpectralOde::new(self.sigma1s.clone(), self.sigma2s.clone(), self.gammas.clone())
    }

    /// Signature of the adjoint vessel: input (σ₁*ᴴ, σ₂*ᴴ, −γ*ᴴ − (σ₁*ᴴ)′),
    /// output (σ₁ᴴ, σ₂ᴴ, −γᴴ − (σ₁ᴴ)′).
    pub fn adjoint(&self) -> Signature {
        let s1sh = self.sigma1s.adjoint();
        let s1h = self.sigma1.adjoint();
        let gamma = self.gammas.adjoint().add(&s1sh.derivative()).scale(crate::numgrid::linalg::c(-1.0, 0.0));
        let gammas = self.gamma.adjoint().add(&s1h.derivative()).scale(crate::numgrid::linalg::c(-1.0, 0.0));
        Signature {
            sigma1: s1sh,
            sigma2: self.sigma2s.adjoint(),
            gamma,
            sigma1s: s1h,
            sigma2s: self.sigma2.adjoint(),
            gammas,
        }
    }

    /// Input and output families exchanged.
    pub fn swapped(&self) -> Signature {
        Signature {
            sigma1: self.sigma1s.clone(),
            sigma2: self.sigma2s.clone(),
            gamma: self.gammas.clone(),
            sigma1s: self.sigma1.clone(),
            sigma2s: self.sigma2.clone(),
            gammas: self.gamma.clone(),
        }
    }

    /// Signature with input family from `self` and output family from `out`.
    pub fn with_output_of(&self, out: &Signature) -> Signature {
        Signature {
            sigma1: self.sigma1.clone(),
            sigma2: self.sigma2.clone(),
            gamma: self.gamma.clone(),
            sigma1s: out.sigma1s.clone(),
            sigma2s: out.sigma2s.clone(),
            gammas: out.gammas.clone(),
        }
    }

    /// Largest node-wise distance between corresponding members.
    pub fn max_dist(&self, other: &Signature) -> f64 {
        if self.input_dim() != other.input_dim() || self.output_dim() != other.output_dim() {
            return f64::INFINITY;
        }
        [
            self.sigma1.max_dist(&other.sigma1),
            self.sigma2.max_dist(&other.sigma2),
            self.gamma.max_dist(&other.gamma),
            self.sigma1s.max_dist(&other.sigma1s),
            self.sigma2s.max_dist(&other.sigma2s),
            self.gammas.max_dist(&other.gammas),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn default_cond_limit() -> f64 {
        DEFAULT_COND_LIMIT
    }
}
