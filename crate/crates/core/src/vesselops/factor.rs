use alloc::format;
use alloc::vec::Vec;

use crate::error::{Result, VesselError};
use crate::numgrid::linalg::{self, CMat};
use crate::numgrid::{MatFn, DEFAULT_COND_LIMIT};
use crate::vesselcore::{DiffVessel, Signature};

use super::subspace::{check_invariant, SubspaceFamily, SubspaceKind, INVARIANCE_TOL};

/// How the feed-through is shared between the two factors:
/// D = d_second·d_first and D̃ = dt_second·dt_first.
#[derive(Debug, Clone)]
pub struct FeedthroughSplit {
    pub d_first: MatFn,
    pub d_second: MatFn,
    pub dt_first: MatFn,
    pub dt_second: MatFn,
}

impl FeedthroughSplit {
    /// The first factor keeps D and D̃, the second gets identities.
    pub fn first_takes_all(v: &DiffVessel) -> Self {
        let g = *v.grid();
        Self {
            d_first: v.d.clone(),
            d_second: MatFn::identity(g, v.output_dim()),
            dt_first: v.dt.clone(),
            dt_second: MatFn::identity(g, v.output_dim()),
        }
    }

    /// The second factor keeps D and D̃, the first gets identities.
    pub fn second_takes_all(v: &DiffVessel) -> Self {
        let g = *v.grid();
        Self {
            d_first: MatFn::identity(g, v.input_dim()),
            d_second: v.d.clone(),
            dt_first: MatFn::identity(g, v.input_dim()),
            dt_second: v.dt.clone(),
        }
    }

    fn check(&self, v: &DiffVessel) -> Result<()> {
        let d = self.d_second.mul(&self.d_first);
        let dt = self.dt_second.mul(&self.dt_first);
        let defect = d.max_dist(&v.d).max(dt.max_dist(&v.dt));
        if defect > 1e-10 * (1.0 + v.d.max_norm().max(v.dt.max_norm())) {
            return Err(VesselError::Precondition(format!(
                "feed-through split does not multiply back to (D, Dt): defect {defect:e}"
            )));
        }
        Ok(())
    }
}

/// Adapted coordinates for a splitting ℂⁿ = 𝒢× ⊕ 𝒢: bases and the matching
/// rows of the inverse of [Q× Q].
struct Coordinates {
    qx: MatFn,
    lx: MatFn,
    q: MatFn,
    l: MatFn,
}

impl Coordinates {
    fn orthogonal_from_g(g: &SubspaceFamily) -> Self {
        let q = g.basis().clone();
        let grid = *q.grid();
        let n = q.rows();
        let qx = pointwise(grid, n, n - q.cols(), |k| linalg::complement(q.sample(k)));
        Self { lx: qx.adjoint(), l: q.adjoint(), qx, q }
    }

    fn orthogonal_from_gx(gx: &SubspaceFamily) -> Self {
        let qx = gx.basis().clone();
        let grid = *qx.grid();
        let n = qx.rows();
        let q = pointwise(grid, n, n - qx.cols(), |k| linalg::complement(qx.sample(k)));
        Self { lx: qx.adjoint(), l: q.adjoint(), qx, q }
    }

    fn oblique(g: &SubspaceFamily, gx: &SubspaceFamily) -> Result<Self> {
        let (q, qx) = (g.basis(), gx.basis());
        let n = q.rows();
        let kx = qx.cols();
        if kx + q.cols() != n {
            return Err(VesselError::Precondition(format!(
                "subspaces of dimensions {} and {} do not split the {n}-dimensional state space",
                q.cols(),
                kx
            )));
        }
        let mut lx = Vec::with_capacity(q.grid().points());
        let mut l = Vec::with_capacity(q.grid().points());
        for k in 0..q.grid().points() {
            let mut frame = linalg::zeros(n, n);
            frame.view_mut((0, 0), (n, kx)).copy_from(qx.sample(k));
            frame.view_mut((0, kx), (n, n - kx)).copy_from(q.sample(k));
            let cond = linalg::condition(&frame);
            let inv = linalg::inverse(&frame).filter(|_| cond <= DEFAULT_COND_LIMIT).ok_or_else(|| {
                VesselError::Precondition(format!("subspaces are not complementary at node {k} (cond {cond:e})"))
            })?;
            lx.push(inv.rows(0, kx).into_owned());
            l.push(inv.rows(kx, n - kx).into_owned());
        }
        let grid = *q.grid();
        Ok(Self {
            qx: qx.clone(),
            lx: MatFn::from_samples(grid, lx)?,
            q: q.clone(),
            l: MatFn::from_samples(grid, l)?,
        })
    }

    /// Oblique projector onto 𝒢× along 𝒢.
    fn px(&self) -> MatFn {
        self.qx.mul(&self.lx)
    }
}

fn pointwise(grid: crate::numgrid::TimeGrid, rows: usize, cols: usize, f: impl Fn(usize) -> CMat) -> MatFn {
    if rows == 0 || cols == 0 {
        return MatFn::zeros(grid, rows, cols);
    }
    MatFn::from_samples(grid, (0..grid.points()).map(f).collect()).expect("uniform shape")
}

fn require(v: &DiffVessel, fam: &SubspaceFamily, kind: SubspaceKind) -> Result<()> {
    if fam.dim() == 0 {
        return Ok(());
    }
    let report = check_invariant(v, &fam.with_kind(kind))?;
    if !report.passes(INVARIANCE_TOL) {
        let what = match kind {
            SubspaceKind::Invariant => "invariant",
            SubspaceKind::CoInvariant => "co-invariant",
        };
        return Err(VesselError::Precondition(format!(
            "subspace is not {what}: operator residual {:e}, flow residual {:e}",
            report.operator, report.flow
        )));
    }
    Ok(())
}

/// Signature between the two factors of a decomposition.
fn middle_signature(v: &DiffVessel, split: &FeedthroughSplit, px: &MatFn) -> Result<Signature> {
    let df_inv = split.d_first.inverse_named("D_first", DEFAULT_COND_LIMIT)?;
    let ds_inv = split.d_second.inverse_named("D_second", DEFAULT_COND_LIMIT)?;
    let s = &v.sig;
    let sigma1 = split.dt_first.mul(&s.sigma1).mul(&df_inv);
    let sigma2 = split.dt_first.mul(&s.sigma2).mul(&df_inv);
    let cbx = ds_inv.mul(&v.c).mul(px).mul(&v.bt);
    let gamma = split
        .dt_first
        .mul(&s.gamma)
        .sub(&sigma2.mul(&cbx).mul(&s.sigma1))
        .add(&sigma1.mul(&cbx).mul(&s.sigma2))
        .add(&sigma1.mul(&split.d_first.derivative()))
        .mul(&df_inv);
    Signature::new(sigma1, sigma2, gamma, s.sigma1s.clone(), s.sigma2s.clone(), s.gammas.clone())
}

fn restrict(a: &MatFn, l: &MatFn, q: &MatFn) -> MatFn {
    l.mul(a).mul(q)
}

fn first_factor(v: &DiffVessel, co: &Coordinates, split: &FeedthroughSplit) -> Result<DiffVessel> {
    let mid = middle_signature(v, split, &co.px())?;
    let ds_inv = split.d_second.inverse_named("D_second", DEFAULT_COND_LIMIT)?;
    let a1 = restrict(&v.a1, &co.lx, &co.qx);
    let a2 = restrict(&v.a2, &co.lx, &co.qx).sub(&co.lx.mul(&co.qx.derivative()));
    let sig = Signature::new(
        v.sig.sigma1.clone(),
        v.sig.sigma2.clone(),
        v.sig.gamma.clone(),
        mid.sigma1,
        mid.sigma2,
        mid.gamma,
    )?;
    DiffVessel::new(
        a1,
        a2,
        co.lx.mul(&v.bt),
        ds_inv.mul(&v.c).mul(&co.qx),
        split.d_first.clone(),
        split.dt_first.clone(),
        sig,
    )
}

fn second_factor(v: &DiffVessel, co: &Coordinates, split: &FeedthroughSplit) -> Result<DiffVessel> {
    let mid = middle_signature(v, split, &co.px())?;
    let dtf_inv = split.dt_first.inverse_named("Dt_first", DEFAULT_COND_LIMIT)?;
    let a1 = restrict(&v.a1, &co.l, &co.q);
    let a2 = restrict(&v.a2, &co.l, &co.q).sub(&co.l.mul(&co.q.derivative()));
    DiffVessel::new(
        a1,
        a2,
        co.l.mul(&v.bt).mul(&dtf_inv),
        v.c.mul(&co.q),
        split.d_second.clone(),
        split.dt_second.clone(),
        mid,
    )
}

fn check_split_shapes(v: &DiffVessel, split: &FeedthroughSplit) -> Result<()> {
    let (p, m) = (v.output_dim(), v.input_dim());
    if split.d_first.rows() != split.d_second.cols() || split.d_second.rows() != p || split.d_first.cols() != m {
        return Err(VesselError::Precondition(format!(
            "feed-through split shapes {:?}·{:?} do not match D of shape {p}x{m}",
            split.d_second.shape(),
            split.d_first.shape()
        )));
    }
    if split.d_first.rows() != m || split.dt_first.shape() != (m, m) {
        return Err(VesselError::Precondition(format!(
            "intermediate dimension must equal the input dimension {m}"
        )));
    }
    split.check(v)
}

/// Restriction to an invariant family 𝒢 in its basis coordinates. The
/// orthogonal complement plays the role of 𝒢×; the factor keeps D.
pub fn project(v: &DiffVessel, g: &SubspaceFamily) -> Result<DiffVessel> {
    project_with(v, g, &FeedthroughSplit::second_takes_all(v))
}

pub fn project_with(v: &DiffVessel, g: &SubspaceFamily, split: &FeedthroughSplit) -> Result<DiffVessel> {
    require(v, g, SubspaceKind::Invariant)?;
    check_split_shapes(v, split)?;
    second_factor(v, &Coordinates::orthogonal_from_g(g), split)
}

/// Compression to a co-invariant family 𝒢×. Without a split the factor keeps D.
pub fn compress(v: &DiffVessel, gx: &SubspaceFamily, split: Option<&FeedthroughSplit>) -> Result<DiffVessel> {
    let split = match split {
        Some(s) => s.clone(),
        None => FeedthroughSplit::first_takes_all(v),
    };
    require(v, gx, SubspaceKind::CoInvariant)?;
    check_split_shapes(v, &split)?;
    first_factor(v, &Coordinates::orthogonal_from_gx(gx), &split)
}

/// Factorization along 𝒢× ⊕ 𝒢: returns (first, second) with
/// cascade(first, second) realizing v. Default split gives D to the first factor.
pub fn decompose(
    v: &DiffVessel,
    g: &SubspaceFamily,
    gx: &SubspaceFamily,
    split: Option<&FeedthroughSplit>,
) -> Result<(DiffVessel, DiffVessel)> {
    let split = match split {
        Some(s) => s.clone(),
        None => FeedthroughSplit::first_takes_all(v),
    };
    require(v, g, SubspaceKind::Invariant)?;
    require(v, gx, SubspaceKind::CoInvariant)?;
    check_split_shapes(v, &split)?;
    let co = Coordinates::oblique(g, gx)?;
    Ok((first_factor(v, &co, &split)?, second_factor(v, &co, &split)?))
}

