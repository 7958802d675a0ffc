//! Verification suites. Each takes a [`SuiteCtx`] and returns a merged
//! [`CheckSummary`]; samples run in parallel on per-sample seeds and are
//! merged in index order, so the result does not depend on scheduling.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::birational::{self, allowed_u, w0dot};
use crate::bivector::{self, bracket, CoordFn, LieData};
use crate::check::CheckSummary;
use crate::error::Result;
use crate::grothendieck::{self, GrothendieckPoint};
use crate::linalg::{self, diagonal_of, dist, flatten, inverse, max_abs, max_abs_vec, re, CMat, ONE, ZERO};
use crate::matgroup::{self, sample_borel, sample_regular_torus, sample_sl, sample_torus, sample_unipotent};
use crate::rng::{self, derive_seed, rng_for, tag};
use crate::rootdata::{RootDatum, WeylElement};
use crate::steinberg;
use crate::tol;

#[derive(Debug, Clone)]
pub struct SuiteCtx {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl SuiteCtx {
    fn summary(&self) -> CheckSummary {
        CheckSummary::new(self.tolerance)
    }

    fn lie(&self) -> LieData {
        LieData::new(RootDatum::new(self.n))
    }
}

/// Runs `f` on `count` derived seeds in parallel and merges in order.
fn par_merge<F>(ctx: &SuiteCtx, stream: &str, count: usize, f: F) -> Result<CheckSummary>
where
    F: Fn(u64) -> Result<CheckSummary> + Sync,
{
    let parts = (0..count as u64)
        .into_par_iter()
        .map(|k| f(derive_seed(ctx.seed, &[tag(stream), k])))
        .collect::<Result<Vec<_>>>()?;
    let mut s = ctx.summary();
    parts.into_iter().for_each(|p| s.merge(p));
    Ok(s)
}

fn rel(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(1.0)
}

fn flag(ok: bool) -> i64 {
    i64::from(ok)
}

/// Redraws a complex normal shifted by `shift` until |z| > `floor`.
fn away_from_zero(r: &mut rng::LabRng, shift: f64, floor: f64) -> Complex64 {
    loop {
        let z = rng::cnormal(r) + re(shift);
        if z.norm() > floor {
            return z;
        }
    }
}

// ------------------------------------------------------------ Poisson-Lie

const A: CoordFn = CoordFn::Entry { factor: 0, i: 0, j: 0 };
const B: CoordFn = CoordFn::Entry { factor: 0, i: 0, j: 1 };
const C: CoordFn = CoordFn::Entry { factor: 0, i: 1, j: 0 };
const D: CoordFn = CoordFn::Entry { factor: 0, i: 1, j: 1 };

/// SL(2) bracket tables of π_G over the λ-family and of π, plus the
/// Casimir a + d.
pub fn sl2_bracket_tables(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let lams = [ONE, re(0.37), Complex64::new(0.2, -1.1)];
    let fams: Vec<(Complex64, LieData)> = lams.iter().map(|&l| (l, LieData::new(RootDatum::lambda_family(2, l)))).collect();
    let lie = ctx.lie();
    par_merge(ctx, "sl2-tables", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let g = sample_sl(2, &mut rng_for(seed, &[]));
        let pt = [g.clone()];
        let (a, b, c, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
        for (lam, l) in &fams {
            let p = bivector::pi_g_at(l, &g);
            let br = |f, h| bracket(&p, &pt, &f, &h);
            let lam = *lam;
            for (got, want) in [
                (br(A, B), lam * a * b),
                (br(A, C), lam * a * c),
                (br(B, D), lam * b * d),
                (br(C, D), lam * c * d),
                (br(A, D), re(2.0) * lam * b * c),
                (br(B, C), ZERO),
            ] {
                s.residual(rel(got, want));
            }
        }
        let p = bivector::pi_at(&lie, &g);
        let br = |f, h| bracket(&p, &pt, &f, &h);
        for (got, want) in [
            (br(A, B), b * d),
            (br(A, C), -c * d),
            (br(A, D), ZERO),
            (br(B, C), a * d - d * d),
            (br(B, D), b * d),
            (br(C, D), -c * d),
        ] {
            s.residual(rel(got, want));
        }
        for f in [A, B, C, D] {
            s.residual((br(A, f) + br(D, f)).norm());
        }
        s.samples = 1;
        Ok(s)
    })
}

/// π_G vanishes on the torus; π and π_D⁻ vanish at the identity.
pub fn torus_vanishing(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let lie = ctx.lie();
    let n = ctx.n;
    let mut s = par_merge(ctx, "torus-zero", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let h = sample_torus(n, &mut rng_for(seed, &[]));
        s.residual(max_abs(&bivector::pi_g_at(&lie, &h).mat));
        s.samples = 1;
        Ok(s)
    })?;
    let e = linalg::eye(n);
    s.residual(max_abs(&bivector::pi_at(&lie, &e).mat));
    s.residual(max_abs(&bivector::pi_d_at(&lie, &e, &e, -1.0).mat));
    Ok(s)
}

fn random_entry(r: &mut rng::LabRng, n: usize, factors: usize) -> CoordFn {
    use rand::Rng;
    CoordFn::Entry { factor: r.random_range(0..factors), i: r.random_range(0..n), j: r.random_range(0..n) }
}

/// Jacobi identity for π_G, π and π_D± over random coordinate triples,
/// with Λ₀ alone (not Poisson) as a negative control.
pub fn jacobi_identity(ctx: &SuiteCtx) -> Result<CheckSummary> {
    const TRIPLES: usize = 10;
    let lie = ctx.lie();
    let n = ctx.n;
    let mut s = par_merge(ctx, "jacobi", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let mut r = rng_for(seed, &[]);
        let pg = [sample_sl(n, &mut r)];
        let pd = [sample_sl(n, &mut r), sample_sl(n, &mut r)];
        let on_g: [&(dyn Fn(&[CMat]) -> bivector::Bivector + Sync); 2] =
            [&|p: &[CMat]| bivector::pi_g_at(&lie, &p[0]), &|p: &[CMat]| bivector::pi_at(&lie, &p[0])];
        let on_d: [&(dyn Fn(&[CMat]) -> bivector::Bivector + Sync); 2] = [
            &|p: &[CMat]| bivector::pi_d_at(&lie, &p[0], &p[1], 1.0),
            &|p: &[CMat]| bivector::pi_d_at(&lie, &p[0], &p[1], -1.0),
        ];
        for _ in 0..TRIPLES {
            let (f, g, h) = (random_entry(&mut r, n, 1), random_entry(&mut r, n, 1), random_entry(&mut r, n, 1));
            for st in on_g {
                s.residual(bivector::jacobi_residual(&st, &f, &g, &h, &pg, tol::FD_STEP));
            }
            let (f, g, h) = (random_entry(&mut r, n, 2), random_entry(&mut r, n, 2), random_entry(&mut r, n, 2));
            for st in on_d {
                s.residual(bivector::jacobi_residual(&st, &f, &g, &h, &pd, tol::FD_STEP));
            }
        }
        s.samples = 1;
        Ok(s)
    })?;
    let pt = [sample_sl(n, &mut rng_for(ctx.seed, &[tag("jacobi-control")]))];
    let st = |p: &[CMat]| bivector::Bivector::from_ambient(lie.g_frame(&p[0]), &lie.lambda0);
    let (g, h) = (CoordFn::entry(0, n - 1), CoordFn::entry(n - 1, 0));
    let worst = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| bivector::jacobi_residual(&st, &CoordFn::entry(i, j), &g, &h, &pt, tol::FD_STEP))
        .fold(0.0, f64::max);
    s.control(worst, 1e-3);
    Ok(s)
}

/// π at g₁g₂⁻¹ three ways: directly, as η_*(π_D⁺), and from Λ projected
/// modulo the diagonal.
pub fn consistency_triangle(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let lie = ctx.lie();
    let n = ctx.n;
    par_merge(ctx, "triangle", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let mut r = rng_for(seed, &[]);
        let (g1, g2) = (sample_sl(n, &mut r), sample_sl(n, &mut r));
        let direct = bivector::pi_at(&lie, &(&g1 * inverse(&g2)));
        let scale = max_abs(&direct.mat).max(1.0);
        s.residual(max_abs(&(&direct.mat - bivector::pi_via_eta(&lie, &g1, &g2).mat)) / scale);
        s.residual(max_abs(&(&direct.mat - bivector::pi_via_lambda_projection(&lie, &g1, &g2).mat)) / scale);
        s.samples = 1;
        Ok(s)
    })
}

fn torus_classes(ctx: &SuiteCtx, count: u64) -> Vec<CMat> {
    (0..count).map(|c| sample_regular_torus(ctx.n, &mut rng_for(ctx.seed, &[tag("class"), c]))).collect()
}

/// Runs `f(t, w, seed)` over every (class, w) pair in parallel.
fn over_classes_and_cells<F>(ctx: &SuiteCtx, classes: &[CMat], ws: &[WeylElement], f: F) -> Result<CheckSummary>
where
    F: Fn(&CMat, &WeylElement, u64) -> Result<CheckSummary> + Sync,
{
    let jobs: Vec<(usize, usize)> = (0..classes.len()).flat_map(|c| (0..ws.len()).map(move |k| (c, k))).collect();
    let parts = jobs
        .par_iter()
        .map(|&(c, k)| f(&classes[c], &ws[k], derive_seed(ctx.seed, &[c as u64, k as u64])))
        .collect::<Result<Vec<_>>>()?;
    let mut s = ctx.summary();
    parts.into_iter().for_each(|p| s.merge(p));
    Ok(s)
}

/// Rank of π on C ∩ BwB₋ for regular semisimple classes C.
pub fn pi_leaf_rank(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let classes = torus_classes(ctx, 2);
    over_classes_and_cells(ctx, &classes, &WeylElement::all(ctx.n), |t, w, seed| birational::pi_leaf_rank(t, w, ctx.samples, seed))
}

/// tU ⊂ (G, π) and Q_t ⊂ (D, π_D⁺) are coisotropic.
pub fn coisotropy(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let lie = ctx.lie();
    let n = ctx.n;
    let nsub = linalg::from_columns(&lie.datum.n_basis().iter().map(flatten).collect::<Vec<_>>(), n * n);
    let nlow = linalg::from_columns(&lie.datum.n_basis().iter().map(|x| flatten(&x.transpose())).collect::<Vec<_>>(), n * n);
    let mut s = par_merge(ctx, "coisotropy", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let mut r = rng_for(seed, &[]);
        let b = sample_borel(n, &mut r);
        let p = bivector::pi_at(&lie, &b);
        s.residual(bivector::coisotropy_residual(&p, &nsub) / max_abs(&p.mat).max(1.0));
        // The opposite nilradical has the same dimension but is not
        // coisotropic once n ≥ 3.
        if n >= 3 {
            s.control(bivector::coisotropy_residual(&p, &nlow) / max_abs(&p.mat).max(1.0), 1e-3);
        }
        let g = sample_sl(n, &mut r);
        let q = GrothendieckPoint::new(g, sample_borel(n, &mut r))?;
        let (d1, d2) = q.d();
        let pd = bivector::pi_d_at(&lie, &d1, &d2, 1.0);
        let tq = grothendieck::tangent_xt(&lie, &q)?;
        s.residual(bivector::coisotropy_residual(&pd, &tq) / max_abs(&pd.mat).max(1.0));
        s.samples = 1;
        Ok(s)
    })?;
    if n < 3 {
        s.note("no negative control for n = 2: every line in a 3-dimensional space has a coisotropic annihilator");
    }
    Ok(s)
}

/// π̃_D⁺ of the conormal directions of Q_t sweeps out the B_Δ-orbit.
pub fn characteristic_directions(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let lie = ctx.lie();
    let n = ctx.n;
    par_merge(ctx, "characteristic", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let mut r = rng_for(seed, &[]);
        let g = sample_sl(n, &mut r);
        let d1 = &g * sample_borel(n, &mut r);
        let gi = inverse(&g);
        let xs: Vec<CMat> = lie.datum.b_basis().iter().map(|y| &g * y * &gi).collect();
        let img = bivector::characteristic_image(&lie, &d1, &g, &xs);
        let a = bivector::block_diag(&bivector::ad_matrix(&d1), &bivector::ad_matrix(&g));
        let mut cols = vec![];
        for (x, v) in xs.iter().zip(&img) {
            let gx = &gi * x * &g;
            let want = &a * bivector::vec_pair(&gx, &gx);
            let scale = max_abs_vec(&want).max(1.0);
            s.residual(max_abs_vec(&(v - &want)) / scale);
            s.residual(max_abs_vec(&(v - bivector::anchor_formula(&lie, &d1, &g, &bivector::vec_pair(x, x)))) / scale);
            cols.push(v.clone());
        }
        let span = linalg::span_basis(&linalg::from_columns(&cols, 2 * n * n), 1e-8);
        s.integer(lie.datum.dim_b() as i64, span.ncols() as i64);
        s.samples = 1;
        Ok(s)
    })
}

// ------------------------------------------------------------ resolution

/// μ and q are Poisson; σ(h, ·) preserves Π; Π does not depend on the
/// representative of [g, b].
pub fn mu_q_poisson(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let lie = ctx.lie();
    let n = ctx.n;
    par_merge(ctx, "mu-q", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let mut r = rng_for(seed, &[]);
        let p = GrothendieckPoint::new(sample_sl(n, &mut r), sample_borel(n, &mut r))?;
        s.residual(grothendieck::check_mu_poisson(&lie, &p));
        s.residual(grothendieck::check_q_poisson(&lie, &p));
        s.residual(grothendieck::check_sigma_equivariance(&lie, &sample_torus(n, &mut r), &p));
        s.residual(grothendieck::check_representative_independence(&lie, &p, &sample_borel(n, &mut r)));
        s.samples = 1;
        Ok(s)
    })
}

/// The two SL(2) charts of G ×_B B: brackets of (x, h, y), the transition
/// map, and the rank of Π on X_{t,w₀} and X_{t,1}.
pub fn sl2_resolution_charts(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let lie = ctx.lie();
    let w0 = birational::w0(2);
    let e = WeylElement::identity(2);
    par_merge(ctx, "sl2-charts", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let mut r = rng_for(seed, &[]);
        let x = away_from_zero(&mut r, 0.0, 0.1);
        let h = away_from_zero(&mut r, 0.3, 0.1);
        let y = rng::cnormal(&mut r);
        // Matrices in the order (x, h, y).
        let c1 = grothendieck::chart_brackets(&lie, 1, x, h, y);
        s.residual(rel(c1[(0, 2)], h + x * y));
        s.residual(c1[(1, 0)].norm().max(c1[(1, 2)].norm()));
        let c2 = grothendieck::chart_brackets(&lie, 2, x, h, y);
        s.residual(rel(c2[(0, 2)], -(ONE / h + x * y)));
        s.residual(c2[(1, 0)].norm().max(c2[(1, 2)].norm()));
        let (x2, h2, y2) = grothendieck::chart1_to_chart2(x, h, y);
        s.integer(1, flag(grothendieck::same_point(&grothendieck::chart1(x, h, y), &grothendieck::chart2(x2, h2, y2), 1e-9)));

        let td = [h, ONE / h];
        let p = grothendieck::chart1_xtw0(h, x);
        s.integer(1, flag(grothendieck::is_in_xtw(&p, &td, &w0)?));
        s.integer(0, bivector::rank_of(&grothendieck::Pi_at(&lie, &p))? as i64);
        let q = grothendieck::chart1(x, h, y);
        if (h + x * y).norm() > 1e-3 {
            s.integer(1, flag(grothendieck::is_in_xtw(&q, &td, &e)?));
            s.integer(2, bivector::rank_of(&grothendieck::Pi_at(&lie, &q))? as i64);
        }
        s.samples = 1;
        Ok(s)
    })
}

/// Rank of Π on X_{t,w} for every w, with the tangent dimension of X_{t,w}.
pub fn resolution_leaf_rank(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let classes = torus_classes(ctx, 1);
    over_classes_and_cells(ctx, &classes, &WeylElement::all(ctx.n), |t, w, seed| grothendieck::leaf_rank_xtw(t, w, ctx.samples, seed))
}

// ------------------------------------------------------------ Steinberg

/// The SL(3) family through hẇ₀ meets the unipotent variety in exactly
/// two subregular points.
pub fn subregular_intersection(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let id = steinberg::chi(&linalg::eye(3));
    par_merge(ctx, "subregular", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let mut r = rng_for(seed, &[]);
        let h1 = away_from_zero(&mut r, 0.5, 0.1);
        let h2 = away_from_zero(&mut r, 0.5, 0.1);
        let h = [h1, h2, ONE / (h1 * h2)];
        let pts = steinberg::remark27_intersection(&h);
        s.integer(2, pts.len() as i64);
        for g in &pts {
            let (res, nontrivial) = steinberg::subregular_residual(g);
            s.residual(res);
            s.integer(1, flag(nontrivial));
            s.residual((linalg::det(g) - ONE).norm());
            s.residual(steinberg::chi(g).dist(&id));
            s.integer(0, flag(steinberg::is_regular(g)?));
        }
        s.control(max_abs(&(&pts[0] - &pts[1])), 1e-6);
        let x = h2.sqrt();
        for g in [
            steinberg::remark27_family(&h, re(2.1), ZERO, ZERO, x),
            steinberg::remark27_family(&h, re(2.0), re(0.1), ZERO, x),
            steinberg::remark27_family(&h, re(2.0), ZERO, re(0.1), x),
            steinberg::remark27_family(&h, re(2.0), ZERO, ZERO, x * re(1.1)),
        ] {
            s.control(steinberg::subregular_residual(&g).0, 1e-3);
        }
        s.samples = 1;
        Ok(s)
    })
}

/// The unipotent variety in the chart of Bw₀: equations, and the Jacobian
/// rank dropping exactly on a = 2, b = c = 0.
pub fn cubic_chart(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let rep = steinberg::example31_check(ctx.samples, ctx.seed);
    let mut s = ctx.summary();
    s.residual(rep.max_equation_residual);
    rep.generic_ranks.iter().for_each(|&k| s.integer(2, k as i64));
    rep.singular_ranks.iter().for_each(|&k| s.integer(1, k as i64));
    s.control(rep.off_variety_min_violation, 1e-3);
    s.samples = rep.generic_ranks.len() + rep.singular_ranks.len();
    Ok(s)
}

/// The χ_k are Casimirs of π.
pub fn casimirs(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let lie = ctx.lie();
    par_merge(ctx, "casimir", ctx.samples, |seed| {
        let mut s = ctx.summary();
        s.residual(steinberg::casimir_residual(&lie, &sample_sl(ctx.n, &mut rng_for(seed, &[]))));
        s.samples = 1;
        Ok(s)
    })
}

// ------------------------------------------------------------ birational

/// ξ and ξ⁻¹ are mutually inverse on U ∩ B₋w₀B₋.
pub fn xi_round_trip(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let n = ctx.n;
    let wd = w0dot(n);
    par_merge(ctx, "xi", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let mut r = rng_for(seed, &[]);
        let m = loop {
            let m = sample_unipotent(n, None, &mut r);
            if matgroup::min_leading_minor(&(&m * &wd)) >= tol::BOUNDARY_MINOR {
                break m;
            }
        };
        let scale = max_abs(&m).max(1.0);
        let x = birational::xi(&m)?;
        s.residual(dist(&birational::xi_inverse(&x)?, &m) / scale);
        s.residual(dist(&birational::xi(&birational::xi_inverse(&m)?)?, &m) / scale);
        s.integer(1, flag(linalg::is_upper(&x, 1e-12 * max_abs(&x).max(1.0)) && matgroup::gauss_decompose(&(&x * &wd)).is_ok()));
        s.samples = 1;
        Ok(s)
    })
}

/// J^u_t and K^u_t are inverse, land in X^u_{t,w₀}, and J has
/// l(w₀) − l(u) independent parameters.
pub fn jk_round_trip(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let n = ctx.n;
    let lie = ctx.lie();
    let w0 = birational::w0(n);
    let us = allowed_u(n);
    let parts = us
        .par_iter()
        .enumerate()
        .map(|(ui, u)| {
            let mut s = par_merge(ctx, &format!("jk-{ui}"), ctx.samples, |seed| {
                let mut s = ctx.summary();
                let mut r = rng_for(seed, &[]);
                let t = sample_torus(n, &mut r);
                let (_, m, m1) = birational::sample_j_input(u, derive_seed(seed, &[1]))?;
                let p = birational::J_u_t(&m, &m1, u, &t)?;
                s.integer(1, flag(grothendieck::is_in_xtw(&p, &diagonal_of(&t), &w0)?));
                s.integer(1, flag(&birational::stratum_of(&p)? == u));
                let (mb, m1b, res) = birational::K_u_t(&p, u, &t)?;
                s.residual(dist(&mb, &m) / max_abs(&m).max(1.0));
                s.residual(dist(&m1b, &m1) / max_abs(&m1).max(1.0));
                s.residual(res);
                let q = p.transported(&sample_borel(n, &mut r));
                let (mq, m1q, _) = birational::K_u_t(&q, u, &t)?;
                s.integer(1, flag(grothendieck::same_point(&birational::J_u_t(&mq, &m1q, u, &t)?, &p, 1e-8)));
                s.samples = 1;
                Ok(s)
            })?;
            let t = sample_torus(n, &mut rng_for(ctx.seed, &[tag("jk-rank"), ui as u64]));
            let rank = birational::j_parameter_rank(&lie, u, &t, derive_seed(ctx.seed, &[tag("jk-rank"), ui as u64]))?;
            s.integer((w0.length - u.length) as i64, rank as i64);
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut s = ctx.summary();
    parts.into_iter().for_each(|p| s.merge(p));
    Ok(s)
}

/// ρ lands in X_{t,w}; μρ lands in F_t ∩ BwB₋ with the expected tangent
/// dimensions, so every F_{t,w} is nonempty.
pub fn rho_strata(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let classes = torus_classes(ctx, 1);
    over_classes_and_cells(ctx, &classes, &WeylElement::all(ctx.n), |t, w, seed| {
        let mut s = ctx.summary();
        for k in 0..ctx.samples as u64 {
            let smp = birational::sample_rho(w, t, derive_seed(seed, &[k]))?;
            s.integer(1, flag(grothendieck::is_in_xtw(&smp.point, &diagonal_of(t), w)?));
            let mr = birational::mu_rho(&smp.g1, &smp.g2, w, t)?;
            s.residual(dist(&mr, &grothendieck::mu(&smp.point)) / max_abs(&mr).max(1.0));
            s.integer(1, flag(steinberg::same_fiber(&mr, t)));
            steinberg::fiber_cell_dim_at(&mr, t, w, &mut s)?;
        }
        Ok(s)
    })
}

/// ρ is Poisson, with the doubled structure as a negative control.
pub fn rho_poisson(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let classes = torus_classes(ctx, 1);
    over_classes_and_cells(ctx, &classes, &WeylElement::all(ctx.n), |t, w, seed| birational::check_rho_poisson(w, t, ctx.samples, seed))
}

/// π_{G/B} vanishes at every T-fixed point ẇ·B.
pub fn flag_fixed_points(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let lie = ctx.lie();
    let mut s = ctx.summary();
    for w in WeylElement::all(ctx.n) {
        s.residual(max_abs(&bivector::pi_gmodb_at(&lie, &crate::rootdata::representative(&w)).mat));
        s.samples += 1;
    }
    Ok(s)
}

/// X_t has dimension dim G − r and Π is tangent to it.
pub fn xt_poisson_submanifold(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let lie = ctx.lie();
    let n = ctx.n;
    par_merge(ctx, "xt", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let mut r = rng_for(seed, &[]);
        let t = sample_torus(n, &mut r);
        let p = GrothendieckPoint::new(sample_sl(n, &mut r), &t * sample_unipotent(n, None, &mut r))?;
        let tx = grothendieck::tangent_xt(&lie, &p)?;
        let v = grothendieck::v_subspace(&lie, &p);
        s.integer((lie.datum.dim_g() - (n - 1)) as i64, grothendieck::reduced_dim(&tx, &v) as i64);
        let big = grothendieck::Pi_at(&lie, &p);
        s.residual(bivector::tangency_residual(&big, &tx) / max_abs(&big.mat).max(1.0));
        s.samples = 1;
        Ok(s)
    })
}

/// The regular unipotent class is regular and the subregular one is not;
/// F_{w(t)} = F_t for every w.
pub fn regular_classes(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let n = ctx.n;
    let mut s = ctx.summary();
    let mut jordan = linalg::eye(n);
    (0..n - 1).for_each(|i| jordan[(i, i + 1)] = ONE);
    s.integer(1, flag(steinberg::is_regular(&jordan)?));
    let mut sub = jordan.clone();
    sub[(n - 2, n - 1)] = ZERO;
    s.integer(0, flag(steinberg::is_regular(&sub)?));
    let ws = WeylElement::all(n);
    let more = par_merge(ctx, "weyl-fibers", ctx.samples, |seed| {
        let mut s = ctx.summary();
        let t = sample_torus(n, &mut rng_for(seed, &[]));
        let d = diagonal_of(&t);
        for w in &ws {
            s.integer(1, flag(steinberg::same_fiber(&t, &linalg::diag(&w.act_on_diagonal(&d)))));
        }
        s.samples = 1;
        Ok(s)
    })?;
    s.merge(more);
    Ok(s)
}

/// ρ separates seeded chart points.
pub fn rho_injectivity(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let classes = torus_classes(ctx, 1);
    over_classes_and_cells(ctx, &classes, &WeylElement::all(ctx.n), |t, w, seed| {
        let mut s = ctx.summary();
        let pts = (0..ctx.samples as u64)
            .map(|k| birational::sample_rho(w, t, derive_seed(seed, &[k])).map(|x| x.point))
            .collect::<Result<Vec<_>>>()?;
        let mut closest = f64::INFINITY;
        for i in 0..pts.len() {
            for j in 0..i {
                closest = closest.min(grothendieck::point_distance(&pts[i], &pts[j]));
            }
        }
        if pts.len() > 1 {
            s.control(closest, 1e-6);
        }
        s.samples = pts.len();
        Ok(s)
    })
}
