use alloc::vec::Vec;

use crate::error::Result;
use crate::numgrid::linalg;
use crate::numgrid::MatFn;
use crate::vesselcore::DiffVessel;
use crate::vesselops::{gauge_transform, SubspaceFamily, SubspaceKind};

use super::subspaces::{controllable_subspace, unobservable_subspace, Transport, GLOBAL_RANK_REL};

/// Four-block splitting of the state space built at `base_time` and carried
/// along t₂ by the evolution F. With 𝒞 controllable and 𝒩 unobservable:
/// `c_obar` = 𝒞∩𝒩, `co` = 𝒞⊖(𝒞∩𝒩), `cbar_obar` = (𝒞+𝒩)⊖𝒞, `cbar_o` = (𝒞+𝒩)⊥.
///
/// The flag 𝒞∩𝒩 ⊂ 𝒞 ⊂ 𝒞+𝒩 is A₁-invariant, so in the frame
/// [c_obar, co, cbar_obar, cbar_o] the main operator is block upper-triangular.
/// Every block is tagged `Invariant`; only the partial sums along the flag
/// are invariant in the sense of [`crate::vesselops::check_invariant`].
#[derive(Debug, Clone)]
pub struct KalmanDecomp {
    pub base_time: f64,
    pub c_obar: SubspaceFamily,
    pub co: SubspaceFamily,
    pub cbar_obar: SubspaceFamily,
    pub cbar_o: SubspaceFamily,
    /// Unitary frame with the blocks as consecutive columns in flag order.
    pub frame: MatFn,
    /// The vessel gauged by frameᴴ.
    pub transformed: DiffVessel,
    /// Restriction to the `co` block.
    pub minimal: DiffVessel,
}

impl KalmanDecomp {
    /// Block sizes in frame order (c_obar, co, cbar_obar, cbar_o).
    pub fn dims(&self) -> [usize; 4] {
        [self.c_obar.dim(), self.co.dim(), self.cbar_obar.dim(), self.cbar_o.dim()]
    }

    /// Largest entry norm below the block diagonal of the transformed A₁.
    pub fn triangularity_defect(&self) -> f64 {
        let d = self.dims();
        let starts = [0, d[0], d[0] + d[1], d[0] + d[1] + d[2]];
        let n = self.frame.rows();
        let mut worst: f64 = 0.0;
        for a in self.transformed.a1.samples() {
            for (bi, &s) in starts.iter().enumerate() {
                let end = s + d[bi];
                if end >= n || d[bi] == 0 {
                    continue;
                }
                let below = a.view((end, s), (n - end, d[bi]));
                worst = worst.max(below.norm());
            }
        }
        worst
    }
}

fn block(frame: &MatFn, start: usize, width: usize) -> Result<SubspaceFamily> {
    let grid = *frame.grid();
    let n = frame.rows();
    let basis = if width == 0 {
        MatFn::zeros(grid, n, 0)
    } else {
        MatFn::from_samples(grid, frame.samples().iter().map(|q| q.columns(start, width).into_owned()).collect())?
    };
    SubspaceFamily::new(basis, SubspaceKind::Invariant)
}

fn sub_block(m: &MatFn, rows: (usize, usize), cols: (usize, usize)) -> Result<MatFn> {
    let grid = *m.grid();
    if rows.1 == 0 || cols.1 == 0 {
        return Ok(MatFn::zeros(grid, rows.1, cols.1));
    }
    MatFn::from_samples(grid, m.samples().iter().map(|x| x.view((rows.0, cols.0), (rows.1, cols.1)).into_owned()).collect())
}

pub fn kalman_decompose(v: &DiffVessel, t2: f64) -> Result<KalmanDecomp> {
    v.grid().check(t2)?;
    let n = v.state_dim();
    let qc = controllable_subspace(v, t2)?;
    let qn = unobservable_subspace(v, t2)?;
    let x1 = linalg::intersection(&qc, &qn, GLOBAL_RANK_REL);
    let x2 = linalg::relative_complement(&qc, &x1);
    let mut both = linalg::zeros(n, qc.ncols() + qn.ncols());
    both.view_mut((0, 0), qc.shape()).copy_from(&qc);
    both.view_mut((0, qc.ncols()), qn.shape()).copy_from(&qn);
    let sum = linalg::orth(&both);
    let x3 = linalg::relative_complement(&sum, &qc);
    let x4 = linalg::complement(&sum);
    let dims = [x1.ncols(), x2.ncols(), x3.ncols(), x4.ncols()];
    let mut base = linalg::zeros(n, n);
    let mut c0 = 0;
    for x in [&x1, &x2, &x3, &x4] {
        base.view_mut((0, c0), x.shape()).copy_from(x);
        c0 += x.ncols();
    }
    debug_assert_eq!(c0, n);

    let grid = *v.grid();
    let frame = if n == 0 {
        MatFn::zeros(grid, 0, 0)
    } else {
        let tr = Transport::new(v)?;
        let mut samples = Vec::with_capacity(grid.points());
        for k in 0..grid.points() {
            samples.push(linalg::qr_positive(&(tr.at_node(k, t2)? * &base)));
        }
        MatFn::from_samples(grid, samples)?
    };
    let transformed = gauge_transform(v, &frame.adjoint())?;
    let (s2, w2) = (dims[0], dims[1]);
    let minimal = DiffVessel::new(
        sub_block(&transformed.a1, (s2, w2), (s2, w2))?,
        sub_block(&transformed.a2, (s2, w2), (s2, w2))?,
        sub_block(&transformed.bt, (s2, w2), (0, v.input_dim()))?,
        sub_block(&transformed.c, (0, v.output_dim()), (s2, w2))?,
        v.d.clone(),
        v.dt.clone(),
        v.sig.clone(),
    )?;
    let starts = [0, dims[0], dims[0] + dims[1], dims[0] + dims[1] + dims[2]];
    Ok(KalmanDecomp {
        base_time: t2,
        c_obar: block(&frame, starts[0], dims[0])?,
        co: block(&frame, starts[1], dims[1])?,
        cbar_obar: block(&frame, starts[2], dims[2])?,
        cbar_o: block(&frame, starts[3], dims[3])?,
        frame,
        transformed,
        minimal,
    })
}

