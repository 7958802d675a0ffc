//! X = G ×_B B, the map μ([g, b]) = gbg⁻¹ and the Poisson structure Π.
//!
//! X embeds in (G × G)/B_Δ by [g, b] ↦ (gb, g)·B_Δ. Tangent vectors at
//! d = (gb, g) are right-trivialized pairs (u₁, u₂) ∈ 𝔤 ⊕ 𝔤, and the
//! B_Δ-orbit directions form V = {(Ad_{gb} y, Ad_g y) : y ∈ 𝔟}. Π is the
//! image of π_D⁺ in the quotient by V.

use num_complex::Complex64;

use crate::bivector::{
    self, ad_matrix, block_diag, flag_frame, pi_d_at, pi_gmodb_at, vec_pair, BasePoint, Bivector, Frame, LieData,
};
use crate::check::CheckSummary;
use crate::error::{LabError, Result};
use crate::linalg::{self, inverse, max_abs, re, CMat, CVec, ONE, ZERO};
use crate::matgroup::bruhat_cell;
use crate::rootdata::{dim_h_mod_hw, WeylElement};
use crate::steinberg::tangent_bwb;

#[derive(Debug, Clone, PartialEq)]
pub struct GrothendieckPoint {
    pub g: CMat,
    pub b: CMat,
}

impl GrothendieckPoint {
    pub fn new(g: CMat, b: CMat) -> Result<Self> {
        if g.shape() != b.shape() || !g.is_square() {
            return Err(LabError::DimensionMismatch(format!("g is {:?}, b is {:?}", g.shape(), b.shape())));
        }
        let scale = max_abs(&b).max(1.0);
        if !linalg::is_upper(&b, 1e-10 * scale) {
            return Err(LabError::NotInXt("b is not upper triangular".into()));
        }
        Ok(GrothendieckPoint { g, b })
    }

    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    /// The representative (g b₁, b₁⁻¹ b b₁).
    pub fn transported(&self, b1: &CMat) -> Self {
        let bi = inverse(b1);
        GrothendieckPoint { g: &self.g * b1, b: &bi * &self.b * b1 }
    }

    /// diag(b), invariant under the B action.
    pub fn torus_part(&self) -> Vec<Complex64> {
        linalg::diagonal_of(&self.b)
    }

    /// (g b, g) ∈ G × G.
    pub fn d(&self) -> (CMat, CMat) {
        (&self.g * &self.b, self.g.clone())
    }
}

pub fn mu(p: &GrothendieckPoint) -> CMat {
    &p.g * &p.b * inverse(&p.g)
}

/// Equality of classes through the invariants (flag, μ, torus part).
pub fn same_point(p: &GrothendieckPoint, q: &GrothendieckPoint, tol: f64) -> bool {
    let rel = inverse(&p.g) * &q.g;
    let scale = max_abs(&rel).max(1.0);
    linalg::is_upper(&rel, tol * scale)
        && linalg::dist(&mu(p), &mu(q)) < tol * max_abs(&mu(p)).max(1.0)
        && p.torus_part().iter().zip(q.torus_part()).all(|(a, b)| (a - b).norm() < tol * a.norm().max(1.0))
}

/// A distance between classes that vanishes iff `same_point` holds
/// (up to scale), used for injectivity checks.
pub fn point_distance(p: &GrothendieckPoint, q: &GrothendieckPoint) -> f64 {
    let rel = inverse(&p.g) * &q.g;
    let n = p.n();
    let below = (0..n).flat_map(|i| (0..i).map(move |j| (i, j))).map(|ij| rel[ij].norm()).fold(0.0, f64::max);
    let t = p.torus_part().iter().zip(q.torus_part()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    below.max(linalg::dist(&mu(p), &mu(q))).max(t)
}

/// Ambient columns of V = Ad_d 𝔟_Δ.
pub fn v_subspace(lie: &LieData, p: &GrothendieckPoint) -> CMat {
    let (d1, d2) = p.d();
    let (i1, i2) = (inverse(&d1), inverse(&d2));
    let cols: Vec<CVec> = lie.datum.b_basis().iter().map(|y| vec_pair(&(&d1 * y * &i1), &(&d2 * y * &i2))).collect();
    linalg::from_columns(&cols, 2 * p.n() * p.n())
}

/// (𝔤 ⊕ 𝔤)/V on the Frobenius-orthonormal complement of V.
pub fn reduced_frame(lie: &LieData, p: &GrothendieckPoint) -> Frame {
    let v = v_subspace(lie, p);
    let c = linalg::complement_in(&lie.d_basis, &v);
    Frame::new(BasePoint::Grothendieck { g: p.g.clone(), b: p.b.clone() }, c, v)
}

/// Π at p: π_D⁺(gb, g) modulo V.
#[allow(non_snake_case)]
pub fn Pi_at(lie: &LieData, p: &GrothendieckPoint) -> Bivector {
    let (d1, d2) = p.d();
    let full = pi_d_at(lie, &d1, &d2, 1.0);
    Bivector::from_ambient(reduced_frame(lie, p), &full.ambient_tensor())
}

/// dμ: (u₁, u₂) ↦ u₁ − Ad_{μ(p)} u₂, which kills V.
pub fn dmu_reduced(p: &GrothendieckPoint) -> CMat {
    let (d1, d2) = p.d();
    bivector::d_eta(&d1, &d2)
}

/// dq: (u₁, u₂) ↦ u₁ mod Ad_{gb} 𝔟.
pub fn dq(p: &GrothendieckPoint) -> CMat {
    let n2 = p.n() * p.n();
    let mut l = CMat::zeros(n2, 2 * n2);
    l.view_mut((0, 0), (n2, n2)).copy_from(&linalg::eye(n2));
    l
}

/// σ(h, [g, b]) = [hg, b].
pub fn sigma(h: &CMat, p: &GrothendieckPoint) -> GrothendieckPoint {
    GrothendieckPoint { g: h * &p.g, b: p.b.clone() }
}

/// dσ_h in right trivializations: Ad_{(h,h)}.
pub fn dsigma(h: &CMat) -> CMat {
    let a = ad_matrix(h);
    block_diag(&a, &a)
}

/// Tangent vector of the curve (exp(εX) g, b exp(εY)), Y ∈ 𝔟.
pub fn chart_direction(p: &GrothendieckPoint, x: &CMat, y: &CMat) -> CVec {
    let (d1, _) = p.d();
    vec_pair(&(x + &d1 * y * inverse(&d1)), x)
}

/// T X_t at p (ambient columns, before reduction):
/// {(Ad_g(x + m), Ad_g x) : x ∈ 𝔤, m ∈ 𝔫}.
pub fn tangent_xt(lie: &LieData, p: &GrothendieckPoint) -> Result<CMat> {
    let scale = max_abs(&p.b).max(1.0);
    if !linalg::is_upper(&p.b, 1e-10 * scale) {
        return Err(LabError::NotInXt("b is not of the form t·n".into()));
    }
    let n = p.n();
    let (g, gi) = (&p.g, inverse(&p.g));
    let z = CMat::zeros(n, n);
    let mut cols: Vec<CVec> = lie.datum.sl_basis().iter().map(|x| { let a = g * x * &gi; vec_pair(&a, &a) }).collect();
    cols.extend(lie.datum.n_basis().iter().map(|m| vec_pair(&(g * m * &gi), &z)));
    Ok(linalg::from_columns(&cols, 2 * n * n))
}

/// Dimension of a subspace of 𝔡 modulo V.
pub fn reduced_dim(sub: &CMat, v: &CMat) -> usize {
    let both = linalg::span_basis(&linalg::hstack(&[sub, v]), 1e-9).ncols();
    both - linalg::span_basis(v, 1e-9).ncols()
}

/// T X_{t,w} = T X_t ∩ dμ⁻¹(T(BwB₋)), as reduced-frame-independent
/// ambient columns.
pub fn tangent_xtw(lie: &LieData, p: &GrothendieckPoint) -> Result<CMat> {
    let txt = tangent_xt(lie, p)?;
    let v = v_subspace(lie, p);
    let k = linalg::complement_in(&txt, &v);
    let img = dmu_reduced(p) * &k;
    let tb = tangent_bwb(&mu(p), &lie.datum);
    let off = linalg::null_space(&tb.adjoint());
    let cond = off.adjoint() * &img / re(max_abs(&img).max(1.0));
    let kern = linalg::null_space(&cond);
    Ok(k * kern)
}

pub fn is_in_xt(p: &GrothendieckPoint, t: &[Complex64]) -> bool {
    p.torus_part().iter().zip(t).all(|(a, b)| (a - b).norm() < 1e-9 * b.norm().max(1.0))
}

pub fn is_in_xtw(p: &GrothendieckPoint, t: &[Complex64], w: &WeylElement) -> Result<bool> {
    if !is_in_xt(p, t) {
        return Ok(false);
    }
    Ok(&bruhat_cell(&mu(p))? == w)
}

/// Leaf rank formula at p ∈ X_{t,w}: rank Π = dim G − r − l(w) − dim(H/H_w),
/// with the tangent-space dimension dim G − r − l(w) and tangency of Π to
/// X_{t,w} checked on the way.
pub fn leaf_rank_at(lie: &LieData, p: &GrothendieckPoint, w: &WeylElement, summary: &mut CheckSummary) -> Result<()> {
    let d = &lie.datum;
    let r = d.n - 1;
    let big = Pi_at(lie, p);
    let txtw = tangent_xtw(lie, p)?;
    summary.integer((d.dim_g() - r - w.length) as i64, txtw.ncols() as i64);
    summary.residual(bivector::tangency_residual(&big, &txtw) / max_abs(&big.mat).max(1.0));
    let restricted = Frame::new(big.frame.base.clone(), txtw, big.frame.quotient.clone());
    let on_leaf = Bivector::from_ambient(restricted, &big.ambient_tensor());
    let expected = d.dim_g() - r - w.length - dim_h_mod_hw(w);
    summary.integer(expected as i64, bivector::rank_of(&on_leaf)? as i64);
    summary.integer(expected as i64, bivector::rank_of(&big)? as i64);
    summary.samples += 1;
    Ok(())
}

/// Leaf ranks of Π over seeded points of X_{t,w} built by ρ.
pub fn leaf_rank_xtw(t: &CMat, w: &WeylElement, samples: usize, seed: u64) -> Result<CheckSummary> {
    let lie = LieData::new(crate::rootdata::RootDatum::new(w.n()));
    let mut s = CheckSummary::new(1e-9);
    for k in 0..samples {
        let smp = crate::birational::sample_rho(w, t, crate::rng::derive_seed(seed, &[k as u64]))?;
        leaf_rank_at(&lie, &smp.point, w, &mut s)?;
    }
    Ok(s)
}

/// μ is Poisson: dμ(Π) = π at μ(p). Returns the relative residual.
pub fn check_mu_poisson(lie: &LieData, p: &GrothendieckPoint) -> f64 {
    let big = Pi_at(lie, p);
    let m = mu(p);
    let pushed = big.pushforward(&dmu_reduced(p), lie.g_frame(&m));
    let direct = bivector::pi_at(lie, &m);
    max_abs(&(&pushed.mat - &direct.mat)) / max_abs(&direct.mat).max(1.0)
}

/// q: [g, b] ↦ g·B is Poisson onto (G/B, π_{G/B}).
pub fn check_q_poisson(lie: &LieData, p: &GrothendieckPoint) -> f64 {
    let big = Pi_at(lie, p);
    let (d1, _) = p.d();
    let pushed = big.pushforward(&dq(p), flag_frame(lie, &d1));
    let direct = pi_gmodb_at(lie, &d1);
    pushed.residual(&direct) / max_abs(&direct.mat).max(1.0)
}

/// σ(h, ·) carries Π to Π.
pub fn check_sigma_equivariance(lie: &LieData, h: &CMat, p: &GrothendieckPoint) -> f64 {
    let q = sigma(h, p);
    let target = Pi_at(lie, &q);
    let pushed = Pi_at(lie, p).pushforward(&dsigma(h), target.frame.clone());
    pushed.residual(&target) / max_abs(&target.mat).max(1.0)
}

/// Π computed from two representatives of the same class agree.
pub fn check_representative_independence(lie: &LieData, p: &GrothendieckPoint, b1: &CMat) -> f64 {
    let a = Pi_at(lie, p);
    let b = Pi_at(lie, &p.transported(b1));
    a.residual(&b) / max_abs(&a.mat).max(1.0)
}

// ------------------------------------------------------ SL(2) charts

/// X′: [[x₁, −1], [1, 0]], [[h₁, y₁], [0, 1/h₁]].
pub fn chart1(x1: Complex64, h1: Complex64, y1: Complex64) -> GrothendieckPoint {
    GrothendieckPoint {
        g: CMat::from_row_slice(2, 2, &[x1, -ONE, ONE, ZERO]),
        b: CMat::from_row_slice(2, 2, &[h1, y1, ZERO, ONE / h1]),
    }
}

/// X″: [[1, 0], [x₂, 1]], [[h₂, y₂], [0, 1/h₂]].
pub fn chart2(x2: Complex64, h2: Complex64, y2: Complex64) -> GrothendieckPoint {
    GrothendieckPoint {
        g: CMat::from_row_slice(2, 2, &[ONE, ZERO, x2, ONE]),
        b: CMat::from_row_slice(2, 2, &[h2, y2, ZERO, ONE / h2]),
    }
}

/// X′ → X″ on the overlap.
pub fn chart1_to_chart2(x1: Complex64, h1: Complex64, y1: Complex64) -> (Complex64, Complex64, Complex64) {
    (ONE / x1, h1, x1 * (h1 - ONE / h1 + x1 * y1))
}

/// Brackets of chart coordinates (x, h, y) at a chart point, as a 3 × 3
/// antisymmetric matrix. `which` selects X′ (1) or X″ (2).
pub fn chart_brackets(lie: &LieData, which: u8, x: Complex64, h: Complex64, y: Complex64) -> CMat {
    let p = if which == 1 { chart1(x, h, y) } else { chart2(x, h, y) };
    let (d1, d2) = p.d();
    let (i1, i2) = (inverse(&d1), inverse(&d2));
    // ∂/∂x, ∂/∂h, ∂/∂y of (gb, g), right-trivialized.
    let dg_dx = if which == 1 {
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])
    } else {
        CMat::from_row_slice(2, 2, &[ZERO, ZERO, ONE, ZERO])
    };
    let db_dh = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE / (h * h)]);
    let db_dy = CMat::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    let z = CMat::zeros(2, 2);
    let tangent = |dg: &CMat, db: &CMat| vec_pair(&((dg * &p.b + &p.g * db) * &i1), &(dg * &i2));
    let cols = vec![tangent(&dg_dx, &z), tangent(&z, &db_dh), tangent(&z, &db_dy)];
    let frame = Frame::new(BasePoint::Grothendieck { g: p.g.clone(), b: p.b.clone() }, linalg::from_columns(&cols, 8), v_subspace(lie, &p));
    Bivector::from_ambient(frame, &Pi_at(lie, &p).ambient_tensor()).mat
}

/// Point of X_{t,w₀} in X′ for t = diag(h, 1/h): h + x₁y₁ = 0.
pub fn chart1_xtw0(h: Complex64, x1: Complex64) -> GrothendieckPoint {
    chart1(x1, h, -h / x1)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::{sample_borel, sample_sl, sample_torus, sample_unipotent};
    use crate::rng;
    use crate::rootdata::{longest_element, RootDatum};

    fn sample_point(n: usize, seed: u64, s: u64) -> GrothendieckPoint {
        let mut r = rng::rng_for(seed, &[n as u64, s]);
        GrothendieckPoint::new(sample_sl(n, &mut r), sample_borel(n, &mut r)).unwrap()
    }

    #[test]
    fn mu_basics() {
        let mut r = rng::rng_for(1, &[]);
        let b = sample_borel(3, &mut r);
        assert!(linalg::dist(&mu(&GrothendieckPoint::new(linalg::eye(3), b.clone()).unwrap()), &b) < 1e-15);
        let p = sample_point(3, 1, 0);
        let b1 = sample_borel(3, &mut r);
        let q = p.transported(&b1);
        assert!(linalg::dist(&mu(&p), &mu(&q)) < 1e-12 * max_abs(&mu(&p)).max(1.0));
        assert!(same_point(&p, &q, 1e-9));
        assert!(!same_point(&p, &sample_point(3, 1, 1), 1e-9));
        let g1 = sample_sl(3, &mut r);
        let lhs = mu(&sigma(&g1, &p));
        let rhs = &g1 * mu(&p) * inverse(&g1);
        assert!(linalg::dist(&lhs, &rhs) < 1e-10 * max_abs(&rhs));
        assert!(GrothendieckPoint::new(linalg::eye(2), sample_sl(2, &mut r)).is_err());
    }

    #[test]
    fn reduced_frame_dimension() {
        for n in 2..=4 {
            let lie = LieData::new(RootDatum::new(n));
            let p = sample_point(n, 2, 0);
            let f = reduced_frame(&lie, &p);
            assert_eq!(f.dim(), 2 * lie.datum.dim_g() - lie.datum.dim_b());
            assert!(max_abs(&(dmu_reduced(&p) * v_subspace(&lie, &p))) < 1e-10 * max_abs(&mu(&p)).powi(2).max(1.0));
        }
    }

    #[test]
    fn dmu_matches_finite_differences() {
        let lie = LieData::new(RootDatum::new(3));
        let p = sample_point(3, 3, 0);
        let m = mu(&p);
        let mi = inverse(&m);
        let mut r = rng::rng_for(3, &[1]);
        for _ in 0..5 {
            let x = lie.datum.sl_basis().iter().fold(CMat::zeros(3, 3), |acc, e| acc + e * rng::cnormal(&mut r));
            let y = lie.datum.b_basis().iter().fold(CMat::zeros(3, 3), |acc, e| acc + e * rng::cnormal(&mut r));
            let h = 1e-6;
            let at = |s: f64| mu(&GrothendieckPoint { g: linalg::expm(&(&x * re(s))) * &p.g, b: &p.b * linalg::expm(&(&y * re(s))) });
            let fd = (at(h) - at(-h)) / re(2.0 * h) * &mi;
            let exact = linalg::unflatten((dmu_reduced(&p) * chart_direction(&p, &x, &y)).as_slice(), 3);
            assert!(linalg::dist(&fd, &exact) < 1e-6 * max_abs(&exact).max(1.0));
        }
    }

    #[test]
    fn mu_q_sigma_are_poisson() {
        for n in 2..=3 {
            let lie = LieData::new(RootDatum::new(n));
            for s in 0..20 {
                let p = sample_point(n, 4, s);
                assert!(check_mu_poisson(&lie, &p) < 1e-8);
                assert!(check_q_poisson(&lie, &p) < 1e-8);
                let h = sample_torus(n, &mut rng::rng_for(5, &[s]));
                assert!(check_sigma_equivariance(&lie, &h, &p) < 1e-8);
                assert!(check_sigma_equivariance(&lie, &linalg::eye(n), &p) < 1e-12);
                let b1 = sample_borel(n, &mut rng::rng_for(6, &[s]));
                assert!(check_representative_independence(&lie, &p, &b1) < 1e-8);
            }
        }
    }

    #[test]
    fn xt_is_poisson_submanifold() {
        for n in 2..=3 {
            let lie = LieData::new(RootDatum::new(n));
            for s in 0..10 {
                let mut r = rng::rng_for(7, &[n as u64, s]);
                let t = sample_torus(n, &mut r);
                let p = GrothendieckPoint::new(sample_sl(n, &mut r), &t * sample_unipotent(n, None, &mut r)).unwrap();
                let tx = tangent_xt(&lie, &p).unwrap();
                let v = v_subspace(&lie, &p);
                assert_eq!(reduced_dim(&tx, &v), lie.datum.dim_g() - (n - 1));
                let big = Pi_at(&lie, &p);
                assert!(bivector::tangency_residual(&big, &tx) < 1e-9 * max_abs(&big.mat).max(1.0));
            }
            // Central t = −I for n = 2.
            if n == 2 {
                let t = CMat::from_diagonal(&CVec::from_vec(vec![-ONE, -ONE]));
                let p = GrothendieckPoint::new(sample_sl(2, &mut rng::rng_for(8, &[])), &t * sample_unipotent(2, None, &mut rng::rng_for(9, &[]))).unwrap();
                let big = Pi_at(&lie, &p);
                assert!(bivector::tangency_residual(&big, &tangent_xt(&lie, &p).unwrap()) < 1e-9);
            }
        }
    }

    #[test]
    fn example_charts() {
        let lie = LieData::new(RootDatum::new(2));
        for s in 0..100 {
            let mut r = rng::rng_for(10, &[s]);
            let (x, h, y) = (rng::cnormal(&mut r), rng::cnormal(&mut r) + re(0.3), rng::cnormal(&mut r));
            let c = chart_brackets(&lie, 1, x, h, y);
            // order (x, h, y)
            assert!((c[(0, 2)] - (h + x * y)).norm() < 1e-9 * (h + x * y).norm().max(1.0));
            assert!(c[(1, 0)].norm() < 1e-9 && c[(1, 2)].norm() < 1e-9);
            let c2 = chart_brackets(&lie, 2, x, h, y);
            let want = -(ONE / h + x * y);
            assert!((c2[(0, 2)] - want).norm() < 1e-9 * want.norm().max(1.0));
            assert!(c2[(1, 0)].norm() < 1e-9 && c2[(1, 2)].norm() < 1e-9);
            // Transition map between charts.
            let (x2, h2, y2) = chart1_to_chart2(x, h, y);
            assert!(same_point(&chart1(x, h, y), &chart2(x2, h2, y2), 1e-9));
        }
    }

    #[test]
    fn example_ranks() {
        let lie = LieData::new(RootDatum::new(2));
        let w0 = longest_element(&lie.datum);
        let e = WeylElement::identity(2);
        for s in 0..10 {
            let mut r = rng::rng_for(11, &[s]);
            let h = rng::cnormal(&mut r) + re(1.5);
            let x = rng::cnormal(&mut r) + re(0.5);
            let p = chart1_xtw0(h, x);
            assert!(is_in_xtw(&p, &[h, ONE / h], &w0).unwrap());
            assert_eq!(bivector::rank_of(&Pi_at(&lie, &p)).unwrap(), 0);
            let q = chart1(x, h, rng::cnormal(&mut r));
            assert!(is_in_xtw(&q, &[h, ONE / h], &e).unwrap());
            assert!(!is_in_xtw(&q, &[h, ONE / h], &w0).unwrap());
            assert_eq!(bivector::rank_of(&Pi_at(&lie, &q)).unwrap(), 2);
        }
    }

    #[test]
    fn leaf_rank_formula() {
        for n in 2..=3 {
            let t = crate::matgroup::sample_regular_torus(n, &mut rng::rng_for(13, &[n as u64]));
            for w in WeylElement::all(n) {
                let s = leaf_rank_xtw(&t, &w, 3, 14).unwrap();
                assert!(s.passed(), "{} {:?}", w.word_string(), s);
            }
        }
    }

    #[test]
    fn membership_of_torus_points() {
        let mut r = rng::rng_for(12, &[]);
        let t = sample_torus(3, &mut r);
        let p = GrothendieckPoint::new(linalg::eye(3), t.clone()).unwrap();
        let td = linalg::diagonal_of(&t);
        assert!(is_in_xtw(&p, &td, &WeylElement::identity(3)).unwrap());
        assert!(!is_in_xtw(&p, &td, &WeylElement::simple(3, 0)).unwrap());
        assert!(!is_in_xtw(&p, &[ONE, ONE, ONE], &WeylElement::identity(3)).unwrap());
    }
}
