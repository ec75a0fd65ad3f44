//! Dense complex linear algebra on top of nalgebra.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, cols: usize) -> CMat {
    CMat::zeros(r, cols)
}

pub fn scalar(z: Complex64) -> CMat {
    CMat::from_element(1, 1, z)
}

/// Row-major constructor.
pub fn from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> CMat {
    CMat::from_row_slice(rows, cols, entries)
}

/// Row-major real constructor.
pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> CMat {
    CMat::from_fn(rows, cols, |i, j| c(entries[i * cols + j], 0.0))
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Frobenius norm.
pub fn norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(a: &CMat, b: &CMat) -> f64 {
    norm(&(a - b))
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint()
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    s
}

pub fn smallest_singular_value(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(f64::INFINITY)
}

/// 2-norm condition number; infinite for singular input.
pub fn condition(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Solves `a x = b` by LU; `None` if `a` is singular.
pub fn solve(a: &CMat, b: &CMat) -> Option<CMat> {
    if a.nrows() == 0 {
        return Some(zeros(0, b.ncols()));
    }
    let x = a.clone().lu().solve(b)?;
    is_finite(&x).then_some(x)
}

/// Solves `x a = b`.
pub fn solve_right(a: &CMat, b: &CMat) -> Option<CMat> {
    solve(&a.transpose(), &b.transpose()).map(|x| x.transpose())
}

pub fn inverse(a: &CMat) -> Option<CMat> {
    solve(a, &eye(a.nrows()))
}

/// Rank threshold used throughout: `n · eps · σ_max · 1e3`.
pub fn rank_threshold(n: usize, smax: f64) -> f64 {
    n.max(1) as f64 * f64::EPSILON * smax * 1e3
}

struct FullSvd {
    u: CMat,
    s: Vec<f64>,
    v: CMat,
}

/// SVD with full square `u` and `v`, padding with zeros as needed.
fn full_svd(m: &CMat) -> FullSvd {
    let (r, k) = m.shape();
    let n = r.max(k);
    let mut sq = zeros(n, n);
    sq.view_mut((0, 0), (r, k)).copy_from(m);
    let svd = sq.svd(true, true);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let u_raw = svd.u.expect("requested u");
    let v_raw = svd.v_t.expect("requested v").adjoint();
    let mut u = zeros(n, n);
    let mut v = zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        u.set_column(dst, &u_raw.column(src));
        v.set_column(dst, &v_raw.column(src));
        s.push(svd.singular_values[src]);
    }
    FullSvd { u: u.rows(0, r).into_owned(), s, v: v.rows(0, k).into_owned() }
}

/// Orthonormal basis of the column span; numerical rank per [`rank_threshold`].
pub fn orth(m: &CMat) -> CMat {
    orth_impl(m, None)
}

/// As [`orth`] but singular values below `rel·σ_max` count as zero.
pub fn orth_rel(m: &CMat, rel: f64) -> CMat {
    orth_impl(m, Some(rel))
}

fn cutoff(n: usize, smax: f64, rel: Option<f64>) -> f64 {
    match rel {
        Some(r) => (r * smax).max(rank_threshold(n, smax)),
        None => rank_threshold(n, smax),
    }
}

fn orth_impl(m: &CMat, rel: Option<f64>) -> CMat {
    let (r, k) = m.shape();
    if r == 0 || k == 0 {
        return zeros(r, 0);
    }
    let f = full_svd(m);
    let tol = cutoff(r.max(k), f.s[0], rel);
    let rank = f.s.iter().take(r.min(k)).filter(|&&x| x > tol && x > 0.0).count();
    // u from the padded square SVD has orthonormal leading columns only among the first r rows
    // when r >= k; fall back to a thin SVD of m for the wide case.
    if r >= k {
        f.u.columns(0, rank).into_owned()
    } else {
        let svd = m.clone().svd(true, false);
        let u = svd.u.expect("requested u");
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&a, &b| {
            svd.singular_values[b]
                .partial_cmp(&svd.singular_values[a])
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let mut out = zeros(r, rank);
        for (d, &s) in idx.iter().take(rank).enumerate() {
            out.set_column(d, &u.column(s));
        }
        out
    }
}

/// Orthonormal basis of the kernel.
pub fn null_space(m: &CMat) -> CMat {
    null_space_impl(m, None)
}

/// As [`null_space`] with a relative singular-value cutoff.
pub fn null_space_rel(m: &CMat, rel: f64) -> CMat {
    null_space_impl(m, Some(rel))
}

fn null_space_impl(m: &CMat, rel: Option<f64>) -> CMat {
    let (r, k) = m.shape();
    if k == 0 {
        return zeros(0, 0);
    }
    if r == 0 {
        return eye(k);
    }
    let f = full_svd(m);
    let tol = cutoff(r.max(k), f.s[0], rel);
    let rank = f.s.iter().take(r.min(k)).filter(|&&x| x > tol && x > 0.0).count();
    // v is k×n with n = max(r,k); its first k columns form a unitary when k >= r.
    let v = if k >= r {
        f.v.columns(0, k).into_owned()
    } else {
        let svd = m.clone().svd(false, true);
        let vt = svd.v_t.expect("requested v");
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&a, &b| {
            svd.singular_values[b]
                .partial_cmp(&svd.singular_values[a])
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let mut out = zeros(k, k);
        for (d, &s) in idx.iter().enumerate() {
            out.set_column(d, &vt.row(s).adjoint());
        }
        out
    };
    v.columns(rank, k - rank).into_owned()
}

/// Orthonormal basis of the orthogonal complement of span(q) in ℂⁿ.
pub fn complement(q: &CMat) -> CMat {
    let n = q.nrows();
    if q.ncols() == 0 {
        return eye(n);
    }
    null_space(&q.adjoint())
}

/// Orthonormal basis of span(q1) ∩ span(q2) for orthonormal inputs.
pub fn intersection(q1: &CMat, q2: &CMat, rel: f64) -> CMat {
    let n = q1.nrows();
    if q1.ncols() == 0 || q2.ncols() == 0 {
        return zeros(n, 0);
    }
    // x = q1 y lies in span(q2) iff (I − q2q2ᴴ)q1 y = 0
    let leak = q1 - q2 * (q2.adjoint() * q1);
    let scale = leak.ncols().max(1) as f64;
    let y = null_space_abs(&leak, rel * scale.sqrt());
    qr_positive(&(q1 * y))
}

fn null_space_abs(m: &CMat, abs_tol: f64) -> CMat {
    let k = m.ncols();
    let mut sq = zeros(k.max(m.nrows()), k);
    sq.view_mut((0, 0), m.shape()).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested v");
    let cols: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= abs_tol).collect();
    let mut out = zeros(k, cols.len());
    for (d, &i) in cols.iter().enumerate() {
        out.set_column(d, &vt.row(i).adjoint());
    }
    out
}

/// Orthonormal basis of span(outer) ⊖ span(inner), assuming inner ⊆ outer.
pub fn relative_complement(outer: &CMat, inner: &CMat) -> CMat {
    if inner.ncols() == 0 {
        return outer.clone();
    }
    let y = outer.adjoint() * inner;
    let w = complement(&qr_positive(&y));
    qr_positive(&(outer * w))
}

/// Moore–Penrose pseudo-inverse with the default rank cutoff.
pub fn pinv(m: &CMat) -> CMat {
    let (r, k) = m.shape();
    if r == 0 || k == 0 {
        return zeros(k, r);
    }
    let smax = singular_values(m).first().copied().unwrap_or(0.0);
    m.clone().pseudo_inverse(rank_threshold(r.max(k), smax)).expect("non-negative cutoff")
}

/// Orthogonal projector onto span of orthonormal columns.
pub fn projector(q: &CMat) -> CMat {
    q * q.adjoint()
}

/// Thin QR with positive real diagonal in R, returning Q.
/// Smooth in the input when the input has full column rank.
pub fn qr_positive(m: &CMat) -> CMat {
    let (r, k) = m.shape();
    // modified Gram-Schmidt, twice for stability
    let mut q = zeros(r, k);
    for j in 0..k {
        let mut v = m.column(j).into_owned();
        for _ in 0..2 {
            for i in 0..j {
                let qi = q.column(i);
                let proj = qi.dotc(&v);
                v -= qi * proj;
            }
        }
        let nv = v.norm();
        if nv > 0.0 {
            v /= c(nv, 0.0);
        }
        q.set_column(j, &v);
    }
    q
}

/// Sines of the principal angles between two subspaces of equal dimension, largest first.
pub fn principal_angle_sines(q1: &CMat, q2: &CMat) -> Vec<f64> {
    if q1.ncols() == 0 {
        return Vec::new();
    }
    let resid = q1 - q2 * (q2.adjoint() * q1);
    singular_values(&resid)
}

/// Largest principal angle (radians) between equal-dimension subspaces.
pub fn max_principal_angle(q1: &CMat, q2: &CMat) -> f64 {
    principal_angle_sines(q1, q2)
        .first()
        .map(|s| s.min(1.0).asin())
        .unwrap_or(0.0)
}

/// Eigenvalues sorted by (re, im).
pub fn eigenvalues(m: &CMat) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    let mut ev: Vec<Complex64> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    ev.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal))
    });
    ev
}

fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with the degree-13 Padé approximant.
pub fn expm(a: &CMat) -> CMat {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;
    let n = a.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    let nrm = one_norm(a);
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let scaled = a * c(0.5f64.powi(s), 0.0);
    let id = eye(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let r = |x: f64| c(x, 0.0);
    let inner_u = &a6 * (&a6 * r(B[13]) + &a4 * r(B[11]) + &a2 * r(B[9]))
        + &a6 * r(B[7])
        + &a4 * r(B[5])
        + &a2 * r(B[3])
        + &id * r(B[1]);
    let u = &scaled * inner_u;
    let v = &a6 * (&a6 * r(B[12]) + &a4 * r(B[10]) + &a2 * r(B[8]))
        + &a6 * r(B[6])
        + &a4 * r(B[4])
        + &a2 * r(B[2])
        + &id * r(B[0]);
    let mut e = solve(&(&v - &u), &(&v + &u)).expect("Padé denominator is nonsingular");
    for _ in 0..s {
        e = &e * &e;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_matches_scalar_and_nilpotent() {
        let e = expm(&scalar(c(1.0, 1.0)));
        assert!((e[(0, 0)] - c(1.0, 1.0).exp()).norm() < 1e-14);
        let big = expm(&scalar(c(20.0, 0.0)));
        assert!(((big[(0, 0)].re - 20f64.exp()) / 20f64.exp()).abs() < 1e-13);
        let n = from_real_rows(2, 2, &[0.0, 3.0, 0.0, 0.0]);
        let en = expm(&n);
        assert!(dist(&en, &from_real_rows(2, 2, &[1.0, 3.0, 0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let t = 2.5;
        let g = from_real_rows(2, 2, &[0.0, -t, t, 0.0]);
        let expect = from_real_rows(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        assert!(dist(&expm(&g), &expect) < 1e-13);
    }

    #[test]
    fn kernel_and_span_of_rank_deficient_matrix() {
        let m = from_real_rows(2, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        let k = null_space(&m);
        assert_eq!(k.ncols(), 2);
        assert!(norm(&(&m * &k)) < 1e-14);
        let o = orth(&m);
        assert_eq!(o.ncols(), 1);
        let tall = m.transpose();
        assert_eq!(orth(&tall).ncols(), 1);
        assert_eq!(null_space(&tall).ncols(), 1);
        assert_eq!(complement(&o).ncols(), 1);
    }

    #[test]
    fn qr_positive_is_orthonormal() {
        let m = from_rows(3, 2, &[c(1.0, 1.0), c(0.0, 2.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let q = qr_positive(&m);
        assert!(dist(&(q.adjoint() * &q), &eye(2)) < 1e-14);
        let r = q.adjoint() * &m;
        assert!(r[(0, 0)].re > 0.0 && r[(1, 1)].re > 0.0 && r[(1, 0)].norm() < 1e-14);
    }

    #[test]
    fn eigenvalues_of_complex_triangular() {
        let m = from_rows(2, 2, &[c(1.0, 1.0), c(5.0, 0.0), ZERO, c(-2.0, 0.5)]);
        let ev = eigenvalues(&m);
        assert!((ev[0] - c(-2.0, 0.5)).norm() < 1e-12);
        assert!((ev[1] - c(1.0, 1.0)).norm() < 1e-12);
    }
}
