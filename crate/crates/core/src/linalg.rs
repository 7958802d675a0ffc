//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{LabError, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Elementary matrix e_ij (0-based).
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = ONE;
    m
}

pub fn diag(d: &[Complex64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(d))
}

pub fn diagonal_of(m: &CMat) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| m[(i, i)]).collect()
}

/// Row-major flattening, index i*n + j.
pub fn flatten(m: &CMat) -> CVec {
    let (r, c) = m.shape();
    CVec::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

pub fn unflatten(v: &[Complex64], n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| v[i * n + j])
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().fold(0.0, |a, z| a.max(z.norm()))
}

pub fn dist(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

pub fn inverse(m: &CMat) -> CMat {
    m.clone()
        .try_inverse()
        .expect("matrix inverse requested for a singular matrix")
}

pub fn conj_by(g: &CMat, x: &CMat) -> CMat {
    g * x * inverse(g)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn trace(m: &CMat) -> Complex64 {
    m.trace()
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).sum::<f64>();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let a = a / re(2f64.powi(s));
    let mut term = eye(n);
    let mut sum = eye(n);
    for k in 1..=18 {
        term = &term * &a / re(k as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Full SVD m = U Σ Vᴴ through LAPACK. nalgebra's own SVD does not
/// reliably reconstruct rank-deficient inputs, so everything rank- or
/// span-related goes through here. Singular values come largest first.
pub fn svd(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    use ndarray_linalg::SVD;
    let (r, c) = m.shape();
    let a = ndarray::Array2::from_shape_fn((r, c), |(i, j)| m[(i, j)]);
    let (u, s, vt) = a.svd(true, true).expect("LAPACK svd");
    let (u, vt) = (u.expect("U"), vt.expect("Vᴴ"));
    let u = CMat::from_fn(r, r, |i, j| u[(i, j)]);
    let v = CMat::from_fn(c, c, |i, j| vt[(j, i)].conj());
    (u, s.to_vec(), v)
}

/// Singular values, largest first.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    svd(m).1
}

/// Numerical rank with a relative threshold `rel_tol * sigma_max`.
///
/// Fails instead of guessing when a singular value sits within a decade of
/// the threshold.
pub fn rank_rel(m: &CMat, rel_tol: f64) -> Result<usize> {
    let s = singular_values(m);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    let thr = rel_tol * smax;
    let mut rank = 0;
    for &v in &s {
        if v >= 0.1 * thr && v <= 10.0 * thr {
            return Err(LabError::RankAmbiguous { value: v, threshold: thr });
        }
        if v > thr {
            rank += 1;
        }
    }
    Ok(rank)
}

/// Rank against an absolute threshold, with the same ambiguity check.
pub fn rank_thr(m: &CMat, thr: f64) -> Result<usize> {
    let mut rank = 0;
    for v in singular_values(m) {
        if v >= 0.1 * thr && v <= 10.0 * thr {
            return Err(LabError::RankAmbiguous { value: v, threshold: thr });
        }
        if v > thr {
            rank += 1;
        }
    }
    Ok(rank)
}

/// Rank with an absolute threshold, no ambiguity check.
pub fn rank_abs(m: &CMat, tol: f64) -> usize {
    singular_values(m).iter().filter(|&&v| v > tol).count()
}

/// Orthonormal basis (as columns) of the column span of `m`, keeping
/// singular directions above the absolute `tol`.
pub fn orthonormal_basis(m: &CMat, tol: f64) -> CMat {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return CMat::zeros(rows, 0);
    }
    let (u, s, _) = svd(m);
    let rank = s.iter().filter(|&&v| v > tol).count();
    u.columns(0, rank).into_owned()
}

/// Moore–Penrose pseudo-inverse, cutting singular values below
/// `rel_tol · σ_max`.
pub fn pinv(m: &CMat, rel_tol: f64) -> CMat {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return CMat::zeros(c, r);
    }
    let (u, s, v) = svd(m);
    let thr = rel_tol * s[0];
    let mut out = CMat::zeros(c, r);
    for (k, &sk) in s.iter().enumerate().filter(|(_, &sk)| sk > thr && sk > 0.0) {
        out += v.column(k) * u.column(k).adjoint() / re(sk);
    }
    out
}

/// Orthonormal basis of the Hermitian-orthogonal complement of `sub` inside
/// the span of `space` (both given as columns in the same ambient space).
pub fn complement_in(space: &CMat, sub: &CMat) -> CMat {
    let s = span_basis(space, 1e-10);
    let q = span_basis(sub, 1e-10);
    let r = if q.ncols() == 0 {
        s
    } else {
        let once = &s - &q * (q.adjoint() * &s);
        &once - &q * (q.adjoint() * &once)
    };
    orthonormal_basis(&r, 1e-8)
}

/// Like [`orthonormal_basis`], but columns are normalized first so the
/// tolerance does not depend on their scale. Zero columns are dropped.
pub fn span_basis(m: &CMat, tol: f64) -> CMat {
    let mut m = m.clone();
    for mut c in m.column_iter_mut() {
        let nrm = c.norm();
        if nrm > 0.0 {
            c /= re(nrm);
        }
    }
    orthonormal_basis(&m, tol)
}

/// Right null space of `a` (columns x with a x = 0), orthonormal. Singular
/// values below 1e-10 · max(σ_max, 1) count as zero, so a matrix of pure
/// roundoff has a full null space.
pub fn null_space(a: &CMat) -> CMat {
    let k = a.ncols();
    let smax = singular_values(a).first().copied().unwrap_or(0.0);
    let q = orthonormal_basis(&a.adjoint(), 1e-10 * smax.max(1.0));
    let r = eye(k) - &q * q.adjoint();
    orthonormal_basis(&r, 0.5)
}

/// Dimension of the intersection of two column spans.
pub fn intersection_dim(a: &CMat, b: &CMat, tol: f64) -> usize {
    let ra = rank_abs(a, tol);
    let rb = rank_abs(b, tol);
    let both = CMat::from_fn(a.nrows(), a.ncols() + b.ncols(), |i, j| {
        if j < a.ncols() {
            a[(i, j)]
        } else {
            b[(i, j - a.ncols())]
        }
    });
    ra + rb - rank_abs(&both, tol)
}

pub fn hstack(mats: &[&CMat]) -> CMat {
    let rows = mats.first().map(|m| m.nrows()).unwrap_or(0);
    let cols: usize = mats.iter().map(|m| m.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut c0 = 0;
    for m in mats {
        out.view_mut((0, c0), (rows, m.ncols())).copy_from(*m);
        c0 += m.ncols();
    }
    out
}

pub fn from_columns(cols: &[CVec], rows: usize) -> CMat {
    let mut out = CMat::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Least-squares solve of a x = b; returns x and the max-abs residual.
pub fn lstsq(a: &CMat, b: &CMat) -> (CMat, f64) {
    if a.ncols() == 0 {
        return (CMat::zeros(0, b.ncols()), max_abs(b));
    }
    let x = pinv(a, 1e-12) * b;
    let r = max_abs(&(a * &x - b));
    (x, r)
}

pub fn det(m: &CMat) -> Complex64 {
    m.clone().determinant()
}

/// Leading principal minor of size k.
pub fn leading_minor(m: &CMat, k: usize) -> Complex64 {
    det(&m.view((0, 0), (k, k)).into_owned())
}

pub fn is_upper(m: &CMat, tol: f64) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..i).all(|j| m[(i, j)].norm() <= tol))
}

pub fn is_lower(m: &CMat, tol: f64) -> bool {
    is_upper(&m.transpose(), tol)
}

pub fn is_diagonal(m: &CMat, tol: f64) -> bool {
    is_upper(m, tol) && is_lower(m, tol)
}

pub fn unit_diagonal(m: &CMat, tol: f64) -> bool {
    (0..m.nrows()).all(|i| (m[(i, i)] - ONE).norm() <= tol)
}
