use alloc::string::String;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VesselError {
    #[error("time {t} outside [{start}, {end}]")]
    Domain { t: f64, start: f64, end: f64 },
    #[error("shape mismatch in {what}: {detail}")]
    Shape { what: String, detail: String },
    #[error("{what} is not invertible at node {node} (condition number {cond:e})")]
    Invertibility { what: String, node: usize, cond: f64 },
    #[error("ODE integration failed at t = {t}: {reason}")]
    Solver { t: f64, reason: &'static str },
    #[error("lambda = {lambda} lies within {distance:e} of the spectrum")]
    Resolvent { lambda: Complex64, distance: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("linkage violated: residuals [{0:e}, {1:e}, {2:e}]", residuals[0], residuals[1], residuals[2])]
    Linkage { residuals: [f64; 3] },
    #[error("pole chain residual {residual:e} exceeds {tol:e}")]
    InvalidChain { residual: f64, tol: f64 },
    #[error("contour of radius {radius} passes within {distance:e} of the spectrum")]
    Contour { radius: f64, distance: f64 },
    #[error("Laurent coefficient of order {order} has norm {norm:e}, beyond max order")]
    OrderOverflow { order: usize, norm: f64 },
    #[error("no similarity: intertwining residual {residual:e}")]
    NoSimilarity { residual: f64 },
    #[error("grid error: {0}")]
    Grid(String),
}

pub type Result<T> = core::result::Result<T, VesselError>;
