//! Bivectors in right-trivialized frames.
//!
//! Tangent vectors are stored in ambient coordinates: a tangent vector at
//! g ∈ G is the matrix X with δg = X·g, flattened row-major (n² entries);
//! on D = G × G the two blocks are concatenated (2n² entries). A frame is
//! a basis of the tangent space (or of a complement of a quotient
//! subspace) in these coordinates, and a bivector is an antisymmetric
//! matrix P in frame coordinates with π(α, β) = αᵀ P β.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{self, complement_in, expm, flatten, inverse, max_abs, re, CMat, CVec};
use crate::rootdata::RootDatum;
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub enum BasePoint {
    Group(CMat),
    Pair(CMat, CMat),
    Flag(CMat),
    Grothendieck { g: CMat, b: CMat },
}

#[derive(Debug, Clone)]
pub struct Frame {
    pub base: BasePoint,
    /// Ambient coordinates × k.
    pub basis: CMat,
    /// Ambient coordinates × s; zero columns for an honest tangent space.
    pub quotient: CMat,
    /// k × ambient: coordinates along `basis` after discarding `quotient`.
    coord_map: CMat,
}

impl Frame {
    pub fn new(base: BasePoint, basis: CMat, quotient: CMat) -> Self {
        let quotient = linalg::span_basis(&quotient, 1e-10);
        let all = linalg::hstack(&[&basis, &quotient]);
        let pinv = linalg::pinv(&all, 1e-12);
        let coord_map = pinv.rows(0, basis.ncols()).into_owned();
        Frame { base, basis, quotient, coord_map }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Frame coordinates of ambient vectors (columns), modulo the quotient.
    pub fn coords(&self, v: &CMat) -> CMat {
        &self.coord_map * v
    }

    /// Frame coordinates of an ambient covector.
    pub fn covector(&self, a: &CVec) -> CVec {
        self.basis.transpose() * a
    }

    /// Minimum singular value of the basis, a proxy for independence.
    pub fn conditioning(&self) -> f64 {
        linalg::singular_values(&self.basis).last().copied().unwrap_or(1.0)
    }
}

#[derive(Debug, Clone)]
pub struct Bivector {
    pub frame: Frame,
    pub mat: CMat,
}

fn wedge(u: &CVec, v: &CVec) -> CMat {
    u * v.transpose() - v * u.transpose()
}

impl Bivector {
    /// Expresses an ambient 2-tensor in `frame`. On quotient frames this is
    /// the projection to the quotient.
    pub fn from_ambient(frame: Frame, t: &CMat) -> Self {
        let mat = &frame.coord_map * t * frame.coord_map.transpose();
        let mat = (&mat - mat.transpose()) / re(2.0);
        Bivector { frame, mat }
    }

    pub fn zero(frame: Frame) -> Self {
        let k = frame.dim();
        Bivector { frame, mat: CMat::zeros(k, k) }
    }

    pub fn ambient_tensor(&self) -> CMat {
        &self.frame.basis * &self.mat * self.frame.basis.transpose()
    }

    /// π(α, β) for ambient covectors.
    pub fn pair(&self, a: &CVec, b: &CVec) -> Complex64 {
        let fa = self.frame.covector(a);
        let fb = self.frame.covector(b);
        (fa.transpose() * &self.mat * fb)[(0, 0)]
    }

    /// π̃(α) as an ambient vector: β(π̃(α)) = π(α, β).
    pub fn sharp(&self, a: &CVec) -> CVec {
        let fa = self.frame.covector(a);
        &self.frame.basis * (self.mat.transpose() * fa)
    }

    /// Gram matrix π(φ_i, φ_j) over ambient covectors given as columns.
    pub fn induced(&self, covectors: &CMat) -> CMat {
        let c = self.frame.basis.transpose() * covectors;
        c.transpose() * &self.mat * c
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        max_abs(&(&self.mat + self.mat.transpose()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Bivector { frame: self.frame.clone(), mat: &self.mat * re(s) }
    }

    /// Pushforward through the linear map `l` (ambient → target ambient),
    /// expressed in `target`.
    pub fn pushforward(&self, l: &CMat, target: Frame) -> Bivector {
        let img = l * &self.frame.basis;
        let c = target.coords(&img);
        let mat = &c * &self.mat * c.transpose();
        Bivector { frame: target, mat }
    }

    /// Residual against another bivector over the same quotient space,
    /// compared through brackets of covectors that kill the quotient.
    pub fn residual(&self, other: &Bivector) -> f64 {
        let ann = annihilator(&self.frame);
        max_abs(&(self.induced(&ann) - other.induced(&ann)))
    }
}

/// Ambient covectors (columns) vanishing on the quotient subspace.
pub fn annihilator(frame: &Frame) -> CMat {
    let amb = frame.ambient_dim();
    if frame.quotient.ncols() == 0 {
        return linalg::eye(amb);
    }
    linalg::null_space(&frame.quotient.transpose())
}

/// Rank with threshold `RANK · max(σ_max, 1)`, so a bivector that vanishes
/// up to roundoff has rank 0.
pub fn rank_of(b: &Bivector) -> Result<usize> {
    let smax = linalg::singular_values(&b.mat).first().copied().unwrap_or(0.0);
    let r = linalg::rank_thr(&b.mat, tol::RANK * smax.max(1.0))?;
    debug_assert!(r % 2 == 0, "odd bivector rank {r}");
    Ok(r)
}

/// Coisotropy of `sub` (ambient columns): the residual of π on the
/// annihilator of `sub`. The subspace is coisotropic iff this vanishes.
pub fn coisotropy_residual(b: &Bivector, sub: &CMat) -> f64 {
    let s = linalg::span_basis(&b.frame.coords(sub), 1e-10);
    let ann = linalg::null_space(&s.transpose());
    if ann.ncols() == 0 {
        return 0.0;
    }
    max_abs(&(ann.transpose() * &b.mat * &ann))
}

pub fn is_coisotropic(b: &Bivector, sub: &CMat, tol: f64) -> bool {
    coisotropy_residual(b, sub) < tol * max_abs(&b.mat).max(1.0)
}

/// Residual measuring whether π ∈ ∧²(sub), i.e. π̃ maps the annihilator of
/// `sub` to zero (Poisson submanifold tangency).
pub fn tangency_residual(b: &Bivector, sub: &CMat) -> f64 {
    let s = linalg::span_basis(&b.frame.coords(sub), 1e-10);
    let ann = linalg::null_space(&s.transpose());
    if ann.ncols() == 0 {
        return 0.0;
    }
    max_abs(&(&b.mat * &ann))
}

/// Projection to the quotient by `sub`, on the orthonormal complement.
pub fn project_quotient(b: &Bivector, sub: &CMat) -> Bivector {
    let q = linalg::hstack(&[&b.frame.quotient, sub]);
    let c = complement_in(&b.frame.basis, &q);
    project_quotient_with(b, sub, c)
}

/// Projection to the quotient by `sub` on a caller-chosen complement.
pub fn project_quotient_with(b: &Bivector, sub: &CMat, complement: CMat) -> Bivector {
    let q = linalg::hstack(&[&b.frame.quotient, sub]);
    let frame = Frame::new(b.frame.base.clone(), complement, q);
    Bivector::from_ambient(frame, &b.ambient_tensor())
}

// ------------------------------------------------------------ Lie data

/// Row-major Ad_g on flattened n × n matrices: X ↦ g X g⁻¹.
pub fn ad_matrix(g: &CMat) -> CMat {
    g.kronecker(&inverse(g).transpose())
}

pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let mut m = CMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut(a.shape(), b.shape()).copy_from(b);
    m
}

pub fn vec_pair(x: &CMat, y: &CMat) -> CVec {
    let a = flatten(x);
    let b = flatten(y);
    CVec::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

pub fn split_pair(v: &[Complex64], n: usize) -> (CMat, CMat) {
    (linalg::unflatten(&v[..n * n], n), linalg::unflatten(&v[n * n..], n))
}

/// The Lie-algebraic data of (𝔡, 𝔤_Δ, 𝔤*_st) for sl(n).
#[derive(Debug, Clone)]
pub struct LieData {
    pub datum: RootDatum,
    /// sl(n) basis in ambient coordinates (n² × N).
    pub g_basis: CMat,
    /// sl(n) ⊕ sl(n) basis (2n² × 2N).
    pub d_basis: CMat,
    /// y_i with 2⟪y_i, y_j⟫ = δ_ij.
    pub y: Vec<CMat>,
    /// x_j ∈ 𝔤_Δ and the dual ξ_j ∈ 𝔤*_st, as ambient 𝔡 vectors.
    pub x: Vec<CVec>,
    pub xi: Vec<CVec>,
    /// Λ₀ = ½ Σ E_α ∧ E_{−α} as an ambient tensor on 𝔤.
    pub lambda0: CMat,
    /// Λ = ½ Σ ξ_j ∧ x_j as an ambient tensor on 𝔡.
    pub lambda: CMat,
}

impl LieData {
    pub fn new(datum: RootDatum) -> Self {
        let n = datum.n;
        let basis = datum.sl_basis();
        let g_basis = linalg::from_columns(&basis.iter().map(flatten).collect::<Vec<_>>(), n * n);
        let zero = CMat::zeros(n, n);
        let mut dcols: Vec<CVec> = basis.iter().map(|x| vec_pair(x, &zero)).collect();
        dcols.extend(basis.iter().map(|x| vec_pair(&zero, x)));
        let d_basis = linalg::from_columns(&dcols, 2 * n * n);

        // Gram–Schmidt for the bilinear form 2⟪·,·⟫ on 𝔥.
        let mut y: Vec<CMat> = Vec::new();
        for h in datum.h_basis() {
            let mut v = h.clone();
            for u in &y {
                let c = re(2.0) * datum.form(&v, u);
                v -= u * c;
            }
            let nrm = (re(2.0) * datum.form(&v, &v)).sqrt();
            y.push(v / nrm);
        }

        let mut lambda0 = CMat::zeros(n * n, n * n);
        for &r in &datum.positive_roots {
            lambda0 += wedge(&flatten(&datum.e_pos(r)), &flatten(&datum.e_neg(r))) / re(2.0);
        }

        // x_j = (e_j, e_j); ξ_j solves ⟨x_j, ξ_k⟩ = δ_jk inside 𝔤*_st.
        let x: Vec<CVec> = basis.iter().map(|e| vec_pair(e, e)).collect();
        let mut st: Vec<CVec> = Vec::new();
        for h in datum.h_basis() {
            st.push(vec_pair(&h, &-&h));
        }
        for &r in &datum.positive_roots {
            st.push(vec_pair(&datum.e_pos(r), &zero));
            st.push(vec_pair(&zero, &datum.e_neg(r)));
        }
        let dim = x.len();
        let pairing = CMat::from_fn(dim, dim, |j, k| d_form(&datum, &x[j], &st[k]));
        let c = inverse(&pairing);
        let xi: Vec<CVec> = (0..dim)
            .map(|k| (0..dim).fold(CVec::zeros(2 * n * n), |acc, l| acc + &st[l] * c[(l, k)]))
            .collect();
        let mut lambda = CMat::zeros(2 * n * n, 2 * n * n);
        for j in 0..dim {
            lambda += wedge(&xi[j], &x[j]) / re(2.0);
        }
        LieData { datum, g_basis, d_basis, y, x, xi, lambda0, lambda }
    }

    pub fn n(&self) -> usize {
        self.datum.n
    }

    pub fn g_frame(&self, g: &CMat) -> Frame {
        let n = self.n();
        Frame::new(BasePoint::Group(g.clone()), self.g_basis.clone(), CMat::zeros(n * n, 0))
    }

    pub fn d_frame(&self, g1: &CMat, g2: &CMat) -> Frame {
        let n = self.n();
        Frame::new(BasePoint::Pair(g1.clone(), g2.clone()), self.d_basis.clone(), CMat::zeros(2 * n * n, 0))
    }

    /// Ambient 𝔡 covector ⟨(x, y), ·⟩.
    pub fn d_covector(&self, x: &CMat, y: &CMat) -> CVec {
        let k = self.datum.form_scale;
        vec_pair(&(x.transpose() * k), &(y.transpose() * -k))
    }

    /// Ambient 𝔤 covector ⟪x, ·⟫.
    pub fn g_covector(&self, x: &CMat) -> CVec {
        flatten(&(x.transpose() * self.datum.form_scale))
    }
}

/// ⟨(x₁,y₁),(x₂,y₂)⟩ = ⟪x₁,x₂⟫ − ⟪y₁,y₂⟫ on flattened pairs.
pub fn d_form(datum: &RootDatum, a: &CVec, b: &CVec) -> Complex64 {
    let n = datum.n;
    let (x1, y1) = split_pair(a.as_slice(), n);
    let (x2, y2) = split_pair(b.as_slice(), n);
    datum.form(&x1, &x2) - datum.form(&y1, &y2)
}

/// Λ₀ − Ad_g Λ₀.
pub fn pi_g_at(lie: &LieData, g: &CMat) -> Bivector {
    let a = ad_matrix(g);
    let t = &lie.lambda0 - &a * &lie.lambda0 * a.transpose();
    Bivector::from_ambient(lie.g_frame(g), &t)
}

/// Σ y_i^L∧y_i^R + ½Σ(E_α^R∧E_{−α}^R + E_α^L∧E_{−α}^L) + Σ E_{−α}^L∧E_α^R.
pub fn pi_at(lie: &LieData, g: &CMat) -> Bivector {
    let d = &lie.datum;
    let a = ad_matrix(g);
    let n = d.n;
    let mut t = CMat::zeros(n * n, n * n);
    for y in &lie.y {
        let v = flatten(y);
        t += wedge(&(&a * &v), &v);
    }
    for &r in &d.positive_roots {
        let ep = flatten(&d.e_pos(r));
        let en = flatten(&d.e_neg(r));
        t += wedge(&ep, &en) / re(2.0);
        t += wedge(&(&a * &ep), &(&a * &en)) / re(2.0);
        t += wedge(&(&a * &en), &ep);
    }
    Bivector::from_ambient(lie.g_frame(g), &t)
}

/// Λ ± Ad_d Λ on D = G × G.
pub fn pi_d_at(lie: &LieData, g1: &CMat, g2: &CMat, sign: f64) -> Bivector {
    let a = block_diag(&ad_matrix(g1), &ad_matrix(g2));
    let t = &lie.lambda + &a * &lie.lambda * a.transpose() * re(sign);
    Bivector::from_ambient(lie.d_frame(g1, g2), &t)
}

/// dη at (g₁, g₂) for η(g₁, g₂) = g₁g₂⁻¹: (u₁, u₂) ↦ u₁ − Ad_{g₁g₂⁻¹} u₂.
pub fn d_eta(g1: &CMat, g2: &CMat) -> CMat {
    let eta = g1 * inverse(g2);
    let n2 = g1.nrows() * g1.nrows();
    let mut l = CMat::zeros(n2, 2 * n2);
    l.view_mut((0, 0), (n2, n2)).copy_from(&linalg::eye(n2));
    l.view_mut((0, n2), (n2, n2)).copy_from(&-ad_matrix(&eta));
    l
}

/// Pushforward of π_D⁺ through η.
pub fn pi_via_eta(lie: &LieData, g1: &CMat, g2: &CMat) -> Bivector {
    let eta = g1 * inverse(g2);
    pi_d_at(lie, g1, g2, 1.0).pushforward(&d_eta(g1, g2), lie.g_frame(&eta))
}

/// Λ projected to 𝔡 / Ad_d 𝔤_Δ, then carried to G by η.
pub fn pi_via_lambda_projection(lie: &LieData, g1: &CMat, g2: &CMat) -> Bivector {
    let d = lie.d_frame(g1, g2);
    let lam = Bivector::from_ambient(d, &lie.lambda);
    let a = block_diag(&ad_matrix(g1), &ad_matrix(g2));
    let diag_sub = &a * linalg::from_columns(&lie.x, lie.d_basis.nrows());
    let q = project_quotient(&lam, &diag_sub);
    let eta = g1 * inverse(g2);
    q.pushforward(&d_eta(g1, g2), lie.g_frame(&eta))
}

/// Frame of G/B at the flag g·B: 𝔤 / Ad_g 𝔟.
pub fn flag_frame(lie: &LieData, g: &CMat) -> Frame {
    let sub = ad_b(lie, g);
    let c = complement_in(&lie.g_basis, &sub);
    Frame::new(BasePoint::Flag(g.clone()), c, sub)
}

/// Ad_g 𝔟 as ambient columns.
pub fn ad_b(lie: &LieData, g: &CMat) -> CMat {
    let cols: Vec<CVec> = lie.datum.b_basis().iter().map(|x| flatten(&(g * x * inverse(g)))).collect();
    linalg::from_columns(&cols, lie.n() * lie.n())
}

/// π_{G/B} at g·B: Λ₀ projected to 𝔤 / Ad_g 𝔟.
pub fn pi_gmodb_at(lie: &LieData, g: &CMat) -> Bivector {
    Bivector::from_ambient(flag_frame(lie, g), &lie.lambda0)
}

// --------------------------------------------------- functions and Jacobi

/// A coordinate function on G (one factor) or D (two factors).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoordFn {
    /// Entry (i, j) of factor `factor`.
    Entry { factor: usize, i: usize, j: usize },
    Const(f64),
}

impl CoordFn {
    pub fn entry(i: usize, j: usize) -> Self {
        CoordFn::Entry { factor: 0, i, j }
    }

    pub fn value(&self, point: &[CMat]) -> Complex64 {
        match *self {
            CoordFn::Entry { factor, i, j } => point[factor][(i, j)],
            CoordFn::Const(c) => re(c),
        }
    }

    /// Exact differential along right-trivialized directions:
    /// d g_ij (X g) = Σ_a X_ia g_aj.
    pub fn covector(&self, point: &[CMat]) -> CVec {
        let n = point[0].nrows();
        let mut v = CVec::zeros(point.len() * n * n);
        if let CoordFn::Entry { factor, i, j } = *self {
            let g = &point[factor];
            for a in 0..n {
                v[factor * n * n + i * n + a] = g[(a, j)];
            }
        }
        v
    }
}

pub fn bracket(b: &Bivector, point: &[CMat], f: &CoordFn, g: &CoordFn) -> Complex64 {
    b.pair(&f.covector(point), &g.covector(point))
}

/// Moves `point` along the ambient direction `v` by exp(ε X_f) per factor.
pub fn flow(point: &[CMat], v: &CVec, eps: f64) -> Vec<CMat> {
    let n = point[0].nrows();
    point
        .iter()
        .enumerate()
        .map(|(f, g)| {
            let x = linalg::unflatten(&v.as_slice()[f * n * n..(f + 1) * n * n], n);
            expm(&(x * re(eps))) * g
        })
        .collect()
}

/// |{f,{g,h}} + {g,{h,f}} + {h,{f,g}}| with the outer derivative taken by
/// central differences along the frame basis.
pub fn jacobi_residual<S>(structure: &S, f: &CoordFn, g: &CoordFn, h: &CoordFn, point: &[CMat], step: f64) -> f64
where
    S: Fn(&[CMat]) -> Bivector,
{
    let here = structure(point);
    let basis = here.frame.basis.clone();
    let inner = |a: &CoordFn, b: &CoordFn| -> CVec {
        // Derivative of x ↦ {a,b}(x) along each frame vector.
        CVec::from_fn(basis.ncols(), |k, _| {
            let v = basis.column(k).into_owned();
            let p = flow(point, &v, step);
            let m = flow(point, &v, -step);
            (bracket(&structure(&p), &p, a, b) - bracket(&structure(&m), &m, a, b)) / re(2.0 * step)
        })
    };
    let outer = |a: &CoordFn, d_inner: CVec| -> Complex64 {
        let da = here.frame.covector(&a.covector(point));
        (da.transpose() * &here.mat * d_inner)[(0, 0)]
    };
    let total = outer(f, inner(g, h)) + outer(g, inner(h, f)) + outer(h, inner(f, g));
    total.norm()
}

/// dim(T_d(G*dG_Δ) ∩ T_d(G_Δ dG*)) in right trivialization:
/// (𝔤*_st + Ad_d 𝔤_Δ) ∩ (𝔤_Δ + Ad_d 𝔤*_st).
pub fn double_coset_intersection_dim(lie: &LieData, g1: &CMat, g2: &CMat) -> usize {
    let amb = lie.d_basis.nrows();
    let a = block_diag(&ad_matrix(g1), &ad_matrix(g2));
    let gd = linalg::from_columns(&lie.x, amb);
    let st = linalg::from_columns(&lie.xi, amb);
    let left = linalg::hstack(&[&st, &(&a * &gd)]);
    let right = linalg::hstack(&[&gd, &(&a * &st)]);
    let lo = linalg::orthonormal_basis(&left, 1e-9);
    let ro = linalg::orthonormal_basis(&right, 1e-9);
    linalg::intersection_dim(&lo, &ro, 1e-8)
}

/// Image of conormal covectors ⟨(x,x),·⟩ under π̃_D⁺ at d, as ambient vectors.
pub fn characteristic_image(lie: &LieData, g1: &CMat, g2: &CMat, xs: &[CMat]) -> Vec<CVec> {
    let p = pi_d_at(lie, g1, g2, 1.0);
    xs.iter().map(|x| p.sharp(&lie.d_covector(x, x))).collect()
}

/// Decomposes z ∈ 𝔡 as z = x + ξ with x ∈ 𝔤_Δ, ξ ∈ 𝔤*_st; returns (x, ξ).
pub fn split_d(lie: &LieData, z: &CVec) -> (CVec, CVec) {
    let amb = lie.d_basis.nrows();
    let all = linalg::hstack(&[&linalg::from_columns(&lie.x, amb), &linalg::from_columns(&lie.xi, amb)]);
    let (c, _) = linalg::lstsq(&all, &CMat::from_column_slice(amb, 1, z.as_slice()));
    let k = lie.x.len();
    let x = (0..k).fold(CVec::zeros(amb), |acc, j| acc + &lie.x[j] * c[(j, 0)]);
    let xi = (0..k).fold(CVec::zeros(amb), |acc, j| acc + &lie.xi[j] * c[(k + j, 0)]);
    (x, xi)
}

/// π̃_D⁺(α_{x+ξ})(d) = −r_d(ξ) + l_d(p_𝔤 Ad_d⁻¹(x+ξ)), right-trivialized,
/// where α_z = ⟨z, ·⟩ and p_𝔤 is the projection along 𝔤*_st.
pub fn anchor_formula(lie: &LieData, g1: &CMat, g2: &CMat, z: &CVec) -> CVec {
    let a = block_diag(&ad_matrix(g1), &ad_matrix(g2));
    let ainv = block_diag(&ad_matrix(&inverse(g1)), &ad_matrix(&inverse(g2)));
    let (_, xi) = split_d(lie, z);
    let (pg, _) = split_d(lie, &(&ainv * z));
    -xi + &a * pg
}

pub fn lambda_explicit(lie: &LieData) -> CMat {
    // ½Σ (y_i,−y_i)∧(y_i,y_i) + ½Σ[(E_α,0)∧(E_{−α},E_{−α}) + (0,−E_{−α})∧(E_α,E_α)]
    let d = &lie.datum;
    let n = d.n;
    let z = CMat::zeros(n, n);
    let mut t = CMat::zeros(2 * n * n, 2 * n * n);
    for y in &lie.y {
        t += wedge(&vec_pair(y, &-y), &vec_pair(y, y)) / re(2.0);
    }
    for &r in &d.positive_roots {
        let (ep, en) = (d.e_pos(r), d.e_neg(r));
        t += wedge(&vec_pair(&ep, &z), &vec_pair(&en, &en)) / re(2.0);
        t += wedge(&vec_pair(&z, &-&en), &vec_pair(&ep, &ep)) / re(2.0);
    }
    t
}
