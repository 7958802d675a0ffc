//! Explicit maps onto the strata X_{t,w}: ξ, ξ^u, J^u_t, K^u_t and ρ.

use num_complex::Complex64;

use crate::bivector::{self, block_diag, pi_g_at, vec_pair, Bivector, LieData};
use crate::check::CheckSummary;
use crate::error::{LabError, Result};
use crate::grothendieck::{self, is_in_xtw, mu, GrothendieckPoint};
use crate::linalg::{self, diag, diagonal_of, expm, inverse, max_abs, re, CMat, CVec, ONE};
use crate::matgroup::{self, double_bruhat, factor_bwb, flag_cell, gauss_decompose, min_leading_minor, x_minus};
use crate::rng::{self, LabRng};
use crate::rootdata::{bruhat_leq, longest_element, representative, RootDatum, WeylElement};
use crate::tol;

pub fn w0(n: usize) -> WeylElement {
    longest_element(&RootDatum::new(n))
}

pub fn w0dot(n: usize) -> CMat {
    representative(&w0(n))
}

/// ξ(m) = (m ẇ₀)_+.
pub fn xi(m: &CMat) -> Result<CMat> {
    Ok(gauss_decompose(&(m * w0dot(m.nrows())))?.upper)
}

/// ξ⁻¹(n) = (n ẇ₀⁻¹)_+.
pub fn xi_inverse(n: &CMat) -> Result<CMat> {
    Ok(gauss_decompose(&(n * inverse(&w0dot(n.nrows()))))?.upper)
}

/// ξ^u(m) = u̇⁻¹ (m ẇ₀)_+ u̇; must land in U ∩ u⁻¹Uu.
pub fn xi_u(m: &CMat, u: &WeylElement) -> Result<CMat> {
    let ud = representative(u);
    let out = inverse(&ud) * xi(m)? * &ud;
    let scale = max_abs(&out).max(1.0);
    if !linalg::is_upper(&out, 1e-9 * scale) || !linalg::unit_diagonal(&out, 1e-9 * scale) {
        return Err(LabError::WrongCell(format!("m is not in the domain of ξ^{}", u.word_string())));
    }
    Ok(out)
}

pub fn allowed_u(n: usize) -> Vec<WeylElement> {
    let w0 = w0(n);
    WeylElement::all(n).into_iter().filter(|u| bruhat_leq(u, &w0.compose(u)).unwrap_or(false)).collect()
}

fn check_stratum(u: &WeylElement) -> Result<WeylElement> {
    let v = w0(u.n()).compose(u);
    if !bruhat_leq(u, &v)? {
        return Err(LabError::EmptyStratum(format!("u = {} is not ≤ w₀u", u.word_string())));
    }
    Ok(v)
}

/// J^u_t(m, m₁) = [m ẇ₀ u̇, t m₁ ξ^u(m)].
#[allow(non_snake_case)]
pub fn J_u_t(m: &CMat, m1: &CMat, u: &WeylElement, t: &CMat) -> Result<GrothendieckPoint> {
    check_stratum(u)?;
    let g = m * w0dot(m.nrows()) * representative(u);
    GrothendieckPoint::new(g, t * m1 * xi_u(m, u)?)
}

/// Inverse of J^u_t on X^u_{t,w₀}. Also returns the residual between the
/// recovered n₁ and ξ^u(m).
#[allow(non_snake_case)]
pub fn K_u_t(p: &GrothendieckPoint, u: &WeylElement, t: &CMat) -> Result<(CMat, CMat, f64)> {
    let v = check_stratum(u)?;
    let n = p.n();
    let ud = representative(u);
    let (m, b1) = factor_bwb(&p.g, &v, &(w0dot(n) * &ud))?;
    let bp = &b1 * &p.b * inverse(&b1);
    let td = diagonal_of(t);
    if diagonal_of(&bp).iter().zip(&td).any(|(a, b)| (a - b).norm() > 1e-8 * b.norm().max(1.0)) {
        return Err(LabError::NotInXt("torus part differs from t".into()));
    }
    let nn = inverse(t) * bp;
    let f = gauss_decompose(&(&ud * &nn * inverse(&ud)))?;
    let scale = max_abs(&nn).max(1.0);
    if linalg::dist(&f.diag, &linalg::eye(n)) > 1e-8 * scale {
        return Err(LabError::WrongCell("point is not in the stratum".into()));
    }
    let ui = inverse(&ud);
    let m1 = &ui * &f.lower * &ud;
    let n1 = &ui * &f.upper * &ud;
    let res = linalg::dist(&n1, &xi_u(&m, u)?) / scale;
    Ok((m, m1, res))
}

/// Positions of U ∩ u⁻¹U₋u.
pub fn m1_positions(u: &WeylElement) -> Vec<(usize, usize)> {
    let n = u.n();
    let mut out = vec![];
    for a in 0..n {
        for c in a + 1..n {
            if u.perm[a] > u.perm[c] {
                out.push((a, c));
            }
        }
    }
    out
}

/// Rightmost reduced subword of `word` spelling u (letter indices).
pub fn positive_subexpression(word: &[usize], u: &WeylElement) -> Result<Vec<usize>> {
    let n = u.n();
    let mut x = u.clone();
    let mut picked = vec![];
    for j in (0..word.len()).rev() {
        let y = x.compose(&WeylElement::simple(n, word[j]));
        if y.length < x.length {
            picked.push(j);
            x = y;
        }
    }
    if !x.is_identity() {
        return Err(LabError::EmptyStratum(format!("{} is not below the word", u.word_string())));
    }
    picked.reverse();
    Ok(picked)
}

/// Number of free parameters of the Richardson chart R_{u,w₀u}.
pub fn richardson_dim(u: &WeylElement) -> usize {
    w0(u.n()).length - 2 * u.length
}

/// A point g of the open Richardson chart with g·B ∈ B₋uB ∩ Bw₀uB:
/// g = Π g_j over a reduced word of w₀u, g_j = ṡ on the positive
/// subexpression for u, g_j = x₋(t_j) elsewhere.
pub fn richardson_point(u: &WeylElement, params: &[Complex64]) -> Result<CMat> {
    let n = u.n();
    let v = check_stratum(u)?;
    let picked = positive_subexpression(&v.word, u)?;
    let mut g = linalg::eye(n);
    let mut k = 0;
    for (j, &i) in v.word.iter().enumerate() {
        if picked.contains(&j) {
            g = g * representative(&WeylElement::simple(n, i));
        } else {
            g = g * x_minus(n, i, params[k]);
            k += 1;
        }
    }
    Ok(g)
}

/// m ∈ U_{w₀u} with m ẇ₀ u̇ ∈ B₋u̇B, from Richardson parameters.
pub fn m_from_richardson(u: &WeylElement, params: &[Complex64]) -> Result<CMat> {
    let n = u.n();
    let v = check_stratum(u)?;
    let g = richardson_point(u, params)?;
    if flag_cell(&g)? != v || flag_cell(&(w0dot(n) * &g))? != v {
        return Err(LabError::WrongCell("Richardson sample left the open cell".into()));
    }
    let (m, _) = factor_bwb(&g, &v, &(w0dot(n) * representative(u)))?;
    Ok(m)
}

fn params(rng: &mut LabRng, k: usize) -> Vec<Complex64> {
    (0..k).map(|_| rng::cnormal(rng)).collect()
}

/// A seeded (m, m₁) in the domain of J^u_t.
pub fn sample_j_input(u: &WeylElement, seed: u64) -> Result<(Vec<Complex64>, CMat, CMat)> {
    let n = u.n();
    check_stratum(u)?;
    for attempt in 0..32u64 {
        let mut r = rng::rng_for(seed, &[rng::tag("j_input"), attempt]);
        let p = params(&mut r, richardson_dim(u));
        if p.iter().any(|z| z.norm() < 0.05) {
            continue;
        }
        let Ok(m) = m_from_richardson(u, &p) else { continue };
        if min_leading_minor(&(&m * w0dot(n))) < tol::BOUNDARY_MINOR || xi_u(&m, u).is_err() {
            continue;
        }
        let m1 = matgroup::sample_unipotent(n, Some(&m1_positions(u)), &mut r);
        return Ok((p, m, m1));
    }
    Err(LabError::SamplerExhausted(32))
}

/// ρ(g₁, g₂) = [g₁g₂ẇ₀, t (g₂ẇ₀)_+].
pub fn rho_unchecked(g1: &CMat, g2: &CMat, t: &CMat) -> Result<GrothendieckPoint> {
    let a = g2 * w0dot(g2.nrows());
    let up = gauss_decompose(&a)?.upper;
    GrothendieckPoint::new(g1 * &a, t * up)
}

pub fn rho(g1: &CMat, g2: &CMat, w: &WeylElement, t: &CMat) -> Result<GrothendieckPoint> {
    let n = g1.nrows();
    let e = WeylElement::identity(n);
    let want1 = w.inverse().compose(&w0(n));
    if double_bruhat(g1)? != (e.clone(), want1.clone()) {
        return Err(LabError::WrongCell(format!("g1 is not in G^(1,{})", want1.word_string())));
    }
    if double_bruhat(g2)? != (e, w0(n)) {
        return Err(LabError::WrongCell("g2 is not in G^(1,w0)".into()));
    }
    rho_unchecked(g1, g2, t)
}

/// ρ″(n, m) = [n ξ⁻¹(m) ẇ₀, t m].
pub fn rho_pp(n: &CMat, m: &CMat, t: &CMat) -> Result<GrothendieckPoint> {
    GrothendieckPoint::new(n * xi_inverse(m)? * w0dot(n.nrows()), t * m)
}

/// μρ(g₁, g₂) = g₁g₂ẇ₀ t (g₂ẇ₀)_+ (g₂ẇ₀)⁻¹ g₁⁻¹.
pub fn mu_rho(g1: &CMat, g2: &CMat, w: &WeylElement, t: &CMat) -> Result<CMat> {
    let _ = rho(g1, g2, w, t)?;
    let a = g2 * w0dot(g2.nrows());
    let up = gauss_decompose(&a)?.upper;
    Ok(g1 * &a * t * up * inverse(&a) * inverse(g1))
}

/// Splits g ∈ B into (unipotent, diagonal) with g = n·h.
pub fn split_borel(g: &CMat) -> (CMat, CMat) {
    let d = diagonal_of(g);
    let h = diag(&d);
    (g * diag(&d.iter().map(|z| ONE / z).collect::<Vec<_>>()), h)
}

/// Chart representatives (n, m) of the H × H orbit of (g₁, g₂).
pub fn chart_of(g1: &CMat, g2: &CMat) -> (CMat, CMat) {
    let (n, h1) = split_borel(g1);
    let (m, _) = split_borel(&(h1 * g2));
    (n, m)
}

#[derive(Debug, Clone)]
pub struct RhoSample {
    pub g1: CMat,
    pub g2: CMat,
    pub point: GrothendieckPoint,
}

const RHO_RETRIES: u64 = 256;

/// Seeded inputs of ρ for (w, t), away from cell boundaries.
pub fn sample_rho(w: &WeylElement, t: &CMat, seed: u64) -> Result<RhoSample> {
    let n = w.n();
    let e = WeylElement::identity(n);
    let v1 = w.inverse().compose(&w0(n));
    for attempt in 0..RHO_RETRIES {
        let s = rng::derive_seed(seed, &[rng::tag("rho"), attempt]);
        let g1 = matgroup::sample_cell(&e, &v1, s)?;
        let g2 = matgroup::sample_cell(&e, &w0(n), s ^ 0x5555)?;
        if min_leading_minor(&(&g2 * w0dot(n))) < tol::BOUNDARY_MINOR {
            continue;
        }
        let Ok(point) = rho(&g1, &g2, w, t) else { continue };
        // Keep rank decisions well away from the threshold.
        if condition(&point.g) > 100.0 || condition(&(&point.g * &point.b)) > 300.0 || condition(&mu(&point)) > 2e3 {
            continue;
        }
        if !matches!(is_in_xtw(&point, &diagonal_of(t), w), Ok(true)) {
            continue;
        }
        return Ok(RhoSample { g1, g2, point });
    }
    Err(LabError::SamplerExhausted(RHO_RETRIES as usize))
}

/// ‖g‖·‖g⁻¹‖ in the max-entry norm.
pub fn condition(g: &CMat) -> f64 {
    max_abs(g) * max_abs(&inverse(g))
}

/// σ(g₁, p) = [g₁g, b], with the stratum check of the transport.
pub fn check_sigma_transport(g1: &CMat, p: &GrothendieckPoint, t: &CMat, w: &WeylElement) -> Result<bool> {
    let q = grothendieck::sigma(g1, p);
    is_in_xtw(&q, &diagonal_of(t), w)
}

/// Poisson property of σ: G × X → X at (g₁, p), by pushing π_G ⊕ Π
/// forward along (u, (v₁, v₂)) ↦ (u + Ad_{g₁}v₁, u + Ad_{g₁}v₂).
pub fn sigma_poisson_residual(lie: &LieData, g1: &CMat, p: &GrothendieckPoint) -> f64 {
    let n = lie.n();
    let n2 = n * n;
    let a = bivector::ad_matrix(g1);
    let mut l = CMat::zeros(2 * n2, 3 * n2);
    let id = linalg::eye(n2);
    l.view_mut((0, 0), (n2, n2)).copy_from(&id);
    l.view_mut((n2, 0), (n2, n2)).copy_from(&id);
    l.view_mut((0, n2), (n2, n2)).copy_from(&a);
    l.view_mut((n2, 2 * n2), (n2, n2)).copy_from(&a);
    let pg = pi_g_at(lie, g1);
    let big = grothendieck::Pi_at(lie, p);
    let t = block_diag(&pg.ambient_tensor(), &big.ambient_tensor());
    let q = grothendieck::sigma(g1, p);
    let target = grothendieck::Pi_at(lie, &q);
    let pushed = (&l * t * l.transpose()).clone();
    let pushed = Bivector::from_ambient(target.frame.clone(), &pushed);
    pushed.residual(&target) / max_abs(&target.mat).max(1.0)
}

/// Right-trivialized FD differential of (g₁, g₂) ↦ ρ(g₁, g₂) ∈ G × G,
/// over the sl ⊕ sl basis at (g₁, g₂).
pub fn rho_differential(lie: &LieData, g1: &CMat, g2: &CMat, t: &CMat, step: f64) -> Result<CMat> {
    let n = lie.n();
    let p0 = rho_unchecked(g1, g2, t)?;
    let (d1, d2) = p0.d();
    let (i1, i2) = (inverse(&d1), inverse(&d2));
    let mut cols = vec![];
    for k in 0..lie.d_basis.ncols() {
        let (x1, x2) = bivector::split_pair(lie.d_basis.column(k).as_slice(), n);
        let at = |s: f64| rho_unchecked(&(expm(&(&x1 * re(s))) * g1), &(expm(&(&x2 * re(s))) * g2), t);
        let (pp, pm) = (at(step)?.d(), at(-step)?.d());
        let h = re(2.0 * step);
        cols.push(vec_pair(&((&pp.0 - &pm.0) / h * &i1), &((&pp.1 - &pm.1) / h * &i2)));
    }
    Ok(linalg::from_columns(&cols, 2 * n * n))
}

/// ρ is Poisson at (g₁, g₂): pushforward of π_G ⊕ π_G through dρ matches
/// Π at ρ(g₁, g₂) on covectors killing V. Returns (residual, residual
/// against 2Π, |Π|, H × H leakage).
pub fn rho_poisson_at(lie: &LieData, g1: &CMat, g2: &CMat, t: &CMat, step: f64) -> Result<(f64, f64, f64, f64)> {
    let n = lie.n();
    let p = rho_unchecked(g1, g2, t)?;
    let l = rho_differential(lie, g1, g2, t, step)?;
    let src = block_diag(&pi_g_at(lie, g1).ambient_tensor(), &pi_g_at(lie, g2).ambient_tensor());
    let big = grothendieck::Pi_at(lie, &p);
    let src = Bivector::from_ambient(lie.d_frame(g1, g2), &src);
    let pushed = Bivector::from_ambient(big.frame.clone(), &(&l * &src.mat * l.transpose()));
    let scale = max_abs(&big.mat).max(1.0);
    let res = pushed.residual(&big) / scale;
    let twice = pushed.residual(&big.scaled(2.0)) / scale;
    // H × H orbit directions (Ad_{g₁}y₁, −y₁ + Ad_{g₂}y₂) must map into V.
    let mut s_cols = vec![];
    let z = linalg::CMat::zeros(n, n);
    for y in lie.datum.h_basis() {
        s_cols.push(vec_pair(&(g1 * &y * inverse(g1)), &-&y));
        s_cols.push(vec_pair(&z, &(g2 * &y * inverse(g2))));
    }
    let s = linalg::from_columns(&s_cols, 2 * n * n);
    let coords = src.frame.coords(&s);
    let img = big.frame.coords(&(&l * coords));
    let leak = max_abs(&img) / max_abs(&l).max(1.0);
    Ok((res, twice, max_abs(&big.mat), leak))
}

pub fn check_rho_poisson(w: &WeylElement, t: &CMat, samples: usize, seed: u64) -> Result<CheckSummary> {
    let lie = LieData::new(RootDatum::new(w.n()));
    let mut s = CheckSummary::new(1e-6);
    for k in 0..samples {
        let smp = sample_rho(w, t, rng::derive_seed(seed, &[k as u64]))?;
        let (res, twice, size, leak) = rho_poisson_at(&lie, &smp.g1, &smp.g2, t, tol::FD_STEP)?;
        s.residual(res);
        s.residual(leak);
        if size > 1e-6 {
            s.control(twice, 1e-3);
        }
        s.samples += 1;
    }
    if s.controls.is_empty() {
        s.note("Π vanishes at every sample; the ×2 control is vacuous here");
    }
    Ok(s)
}

/// Leaf rank of π at points of C_t ∩ BwB₋ produced by μρ, against
/// dim C − l(w) − dim(H/H_w) with dim C = dim G − r for regular t.
pub fn pi_leaf_rank(t: &CMat, w: &WeylElement, samples: usize, seed: u64) -> Result<CheckSummary> {
    let n = w.n();
    let lie = LieData::new(RootDatum::new(n));
    let expected = lie.datum.dim_g() - (n - 1) - w.length - crate::rootdata::dim_h_mod_hw(w);
    let mut s = CheckSummary::new(1e-8);
    for k in 0..samples {
        let smp = sample_rho(w, t, rng::derive_seed(seed, &[k as u64]))?;
        let g = mu_rho(&smp.g1, &smp.g2, w, t)?;
        s.integer(expected as i64, bivector::rank_of(&bivector::pi_at(&lie, &g))? as i64);
        let z = crate::steinberg::chi(t);
        s.residual(crate::steinberg::chi(&g).dist(&z) / (1.0 + z.max_abs()));
        s.samples += 1;
    }
    Ok(s)
}

/// Rank of the FD Jacobian of J^u_t in Richardson and m₁ coordinates.
pub fn j_parameter_rank(lie: &LieData, u: &WeylElement, t: &CMat, seed: u64) -> Result<usize> {
    let n = u.n();
    let (p, _, m1) = sample_j_input(u, seed)?;
    let pos = m1_positions(u);
    let build = |p: &[Complex64], m1: &CMat| -> Result<GrothendieckPoint> { J_u_t(&m_from_richardson(u, p)?, m1, u, t) };
    let base = build(&p, &m1)?;
    let (d1, d2) = base.d();
    let (i1, i2) = (inverse(&d1), inverse(&d2));
    let h = tol::FD_STEP;
    let mut cols: Vec<CVec> = vec![];
    let mut diff = |a: GrothendieckPoint, b: GrothendieckPoint| {
        let (pa, pb) = (a.d(), b.d());
        cols.push(vec_pair(&((&pa.0 - &pb.0) / re(2.0 * h) * &i1), &((&pa.1 - &pb.1) / re(2.0 * h) * &i2)));
    };
    for k in 0..p.len() {
        let mut a = p.clone();
        let mut b = p.clone();
        a[k] += re(h);
        b[k] -= re(h);
        diff(build(&a, &m1)?, build(&b, &m1)?);
    }
    for &(i, j) in &pos {
        let mut a = m1.clone();
        let mut b = m1.clone();
        a[(i, j)] += re(h);
        b[(i, j)] -= re(h);
        diff(build(&p, &a)?, build(&p, &b)?);
    }
    let tangent = linalg::from_columns(&cols, 2 * n * n);
    let proj = grothendieck::reduced_frame(lie, &base).coords(&tangent);
    let smax = linalg::singular_values(&proj).first().copied().unwrap_or(0.0);
    Ok(linalg::rank_abs(&proj, 1e-6 * smax.max(1.0)))
}

/// The u with p ∈ X^u_{t,w₀}, read off the flag of p.
pub fn stratum_of(p: &GrothendieckPoint) -> Result<WeylElement> {
    let n = p.n();
    Ok(w0(n).inverse().compose(&flag_cell(&p.g)?))
}

pub fn mu_of(p: &GrothendieckPoint) -> CMat {
    mu(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::matgroup::{sample_regular_torus, sample_torus, sample_unipotent};
    use crate::steinberg;

    fn u2(x: Complex64) -> CMat {
        CMat::from_row_slice(2, 2, &[ONE, x, ZERO, ONE])
    }

    #[test]
    fn xi_sl2_formula() {
        let x = Complex64::new(0.7, -0.2);
        assert!(linalg::dist(&xi(&u2(x)).unwrap(), &u2(-ONE / x)) < 1e-14);
        assert!(linalg::dist(&xi_inverse(&u2(x)).unwrap(), &u2(-ONE / x)) < 1e-14);
        assert!(matches!(xi(&u2(ZERO)), Err(LabError::NotInOpenCell(_))));
    }

    #[test]
    fn xi_round_trips() {
        for n in 2..=4 {
            for s in 0..100 {
                let m = sample_unipotent(n, None, &mut rng::rng_for(1, &[n as u64, s]));
                if min_leading_minor(&(&m * w0dot(n))) < tol::BOUNDARY_MINOR {
                    continue;
                }
                let x = xi(&m).unwrap();
                assert!(linalg::dist(&xi_inverse(&x).unwrap(), &m) < 1e-10 * max_abs(&m).max(1.0));
                assert!(linalg::dist(&xi(&xi_inverse(&m).unwrap()).unwrap(), &m) < 1e-10 * max_abs(&m).max(1.0));
                // The image stays in U ∩ B₋w₀B₋.
                assert!(linalg::is_upper(&x, 1e-12) && gauss_decompose(&(&x * w0dot(n))).is_ok());
            }
        }
    }

    #[test]
    fn allowed_strata() {
        let names: Vec<String> = allowed_u(3).iter().map(|u| u.word_string()).collect();
        assert_eq!(allowed_u(3).len(), 3, "{names:?}");
        assert!(allowed_u(3).iter().all(|u| u.length <= 1));
        assert_eq!(allowed_u(2).len(), 1);
        let w0 = w0(3);
        assert!(matches!(J_u_t(&linalg::eye(3), &linalg::eye(3), &w0, &linalg::eye(3)), Err(LabError::EmptyStratum(_))));
    }

    #[test]
    fn xi_u_factorization() {
        for u in allowed_u(3) {
            for s in 0..10 {
                let (_, m, _) = sample_j_input(&u, s).unwrap();
                let nm = xi_u(&m, &u).unwrap();
                let ud = representative(&u);
                // m ẇ₀ u̇ = b₋ u̇ n_m with b₋ lower triangular.
                let bm = &m * w0dot(3) * &ud * inverse(&nm) * inverse(&ud);
                assert!(linalg::is_lower(&bm, 1e-10 * max_abs(&bm).max(1.0)));
                // n_m ∈ U ∩ u⁻¹Uu.
                let conj = &ud * &nm * inverse(&ud);
                assert!(linalg::is_upper(&conj, 1e-10 * max_abs(&conj).max(1.0)));
            }
        }
        let m = sample_unipotent(3, None, &mut rng::rng_for(2, &[]));
        let e = WeylElement::identity(3);
        assert!(linalg::dist(&xi_u(&m, &e).unwrap(), &xi(&m).unwrap()) < 1e-15);
    }

    #[test]
    fn j_k_round_trips() {
        for u in allowed_u(3) {
            for s in 0..10 {
                let t = sample_torus(3, &mut rng::rng_for(3, &[s]));
                let (_, m, m1) = sample_j_input(&u, 100 + s).unwrap();
                let p = J_u_t(&m, &m1, &u, &t).unwrap();
                assert!(is_in_xtw(&p, &diagonal_of(&t), &w0(3)).unwrap());
                assert_eq!(stratum_of(&p).unwrap(), u);
                let (m_back, m1_back, res) = K_u_t(&p, &u, &t).unwrap();
                assert!(linalg::dist(&m_back, &m) < 1e-10 * max_abs(&m).max(1.0));
                assert!(linalg::dist(&m1_back, &m1) < 1e-10 * max_abs(&m1).max(1.0));
                assert!(res < 1e-10);
                // J∘K on a different representative of the same point.
                let b1 = matgroup::sample_borel(3, &mut rng::rng_for(4, &[s]));
                let q = p.transported(&b1);
                let (mq, m1q, _) = K_u_t(&q, &u, &t).unwrap();
                assert!(grothendieck::same_point(&J_u_t(&mq, &m1q, &u, &t).unwrap(), &p, 1e-8));
            }
        }
        // u = 1, m₁ = e reduces to [mẇ₀, t(mẇ₀)_+].
        let (_, m, _) = sample_j_input(&WeylElement::identity(3), 5).unwrap();
        let t = sample_torus(3, &mut rng::rng_for(5, &[]));
        let p = J_u_t(&m, &linalg::eye(3), &WeylElement::identity(3), &t).unwrap();
        let a = &m * w0dot(3);
        assert!(linalg::dist(&p.b, &(&t * gauss_decompose(&a).unwrap().upper)) < 1e-12);
    }

    #[test]
    fn j_parameter_count() {
        let lie = LieData::new(RootDatum::new(3));
        let t = sample_torus(3, &mut rng::rng_for(6, &[]));
        for u in allowed_u(3) {
            assert_eq!(j_parameter_rank(&lie, &u, &t, 7).unwrap(), w0(3).length - u.length);
        }
    }

    #[test]
    fn rho_lands_in_strata() {
        for n in 2..=3 {
            for w in WeylElement::all(n) {
                for s in 0..5 {
                    let t = sample_regular_torus(n, &mut rng::rng_for(8, &[n as u64, s]));
                    let smp = sample_rho(&w, &t, s).unwrap();
                    assert!(is_in_xtw(&smp.point, &diagonal_of(&t), &w).unwrap());
                    let mr = mu_rho(&smp.g1, &smp.g2, &w, &t).unwrap();
                    assert!(linalg::dist(&mr, &mu(&smp.point)) < 1e-12 * max_abs(&mr).max(1.0));
                    assert!(steinberg::same_fiber(&mr, &t));
                    assert_eq!(matgroup::bruhat_cell(&mr).unwrap(), w);
                    // H × H invariance and the chart form.
                    let (nn, m) = chart_of(&smp.g1, &smp.g2);
                    let q = rho(&nn, &m, &w, &t).unwrap();
                    assert!(grothendieck::same_point(&smp.point, &q, 1e-8));
                    let pp = rho_pp(&nn, &xi(&m).unwrap(), &t).unwrap();
                    assert!(grothendieck::same_point(&pp, &q, 1e-8));
                    assert!(linalg::dist(&pp.b, &(&t * xi(&m).unwrap())) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn rho_w0_with_trivial_g1() {
        let t = sample_torus(3, &mut rng::rng_for(9, &[]));
        let w0 = w0(3);
        let g2 = matgroup::sample_cell(&WeylElement::identity(3), &w0, 1).unwrap();
        let p = rho(&linalg::eye(3), &g2, &w0, &t).unwrap();
        let a = &g2 * w0dot(3);
        assert!(linalg::dist(&p.g, &a) < 1e-15);
    }

    #[test]
    fn rho_is_injective_on_samples() {
        let t = sample_torus(3, &mut rng::rng_for(10, &[]));
        let w = WeylElement::simple(3, 0);
        let pts: Vec<GrothendieckPoint> = (0..20).map(|s| sample_rho(&w, &t, 1000 + s).unwrap().point).collect();
        for i in 0..pts.len() {
            for j in 0..i {
                assert!(grothendieck::point_distance(&pts[i], &pts[j]) > 1e-6);
            }
        }
    }

    #[test]
    fn regular_output_for_sl2() {
        let h = re(1.7);
        let t = diag(&[h, ONE / h]);
        let smp = sample_rho(&WeylElement::identity(2), &t, 3).unwrap();
        assert!(steinberg::is_regular(&mu(&smp.point)).unwrap());
    }

    #[test]
    fn rho_is_poisson() {
        for n in 2..=3 {
            let t = sample_regular_torus(n, &mut rng::rng_for(11, &[n as u64]));
            let ws: Vec<WeylElement> = if n == 2 {
                WeylElement::all(2)
            } else {
                vec![WeylElement::identity(3), WeylElement::simple(3, 0), w0(3)]
            };
            for w in ws {
                let s = check_rho_poisson(&w, &t, 3, 12).unwrap();
                assert!(s.passed(), "{} {:?}", w.word_string(), s);
            }
        }
    }

    #[test]
    fn pi_leaf_ranks() {
        for n in 2..=3 {
            let t = sample_regular_torus(n, &mut rng::rng_for(15, &[n as u64]));
            for w in WeylElement::all(n) {
                let s = pi_leaf_rank(&t, &w, 5, 16).unwrap();
                assert!(s.passed(), "{} {:?}", w.word_string(), s);
            }
        }
    }

    #[test]
    fn sigma_transport() {
        let t = sample_torus(3, &mut rng::rng_for(13, &[]));
        let lie = LieData::new(RootDatum::new(3));
        let w0 = w0(3);
        let (_, m, m1) = sample_j_input(&WeylElement::identity(3), 14).unwrap();
        let p = J_u_t(&m, &m1, &WeylElement::identity(3), &t).unwrap();
        assert!(check_sigma_transport(&linalg::eye(3), &p, &t, &w0).unwrap());
        for w in WeylElement::all(3) {
            let v1 = w.inverse().compose(&w0);
            for s in 0..3 {
                let g1 = matgroup::sample_cell(&WeylElement::identity(3), &v1, s).unwrap();
                assert!(check_sigma_transport(&g1, &p, &t, &w).unwrap(), "{}", w.word_string());
                assert!(sigma_poisson_residual(&lie, &g1, &p) < 1e-8);
            }
        }
    }
}
