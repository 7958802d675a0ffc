//! The Steinberg map χ: G → ℂ^r and the SL(3) worked examples.
//!
//! For SL(n) the fundamental characters are χ_k(g) = tr(∧^k g), the k-th
//! elementary symmetric function of the eigenvalues. They are computed from
//! power sums p_j = tr(g^j) by Newton's identities, which keeps them exact
//! polynomials in the entries with exact differentials.

use num_complex::Complex64;
use serde::Serialize;

use crate::bivector::LieData;
use crate::check::CheckSummary;
use crate::error::Result;
use crate::linalg::{self, inverse, re, CMat, CVec, ONE, ZERO};
use crate::matgroup::bruhat_cell;
use crate::rootdata::{RootDatum, WeylElement};
use crate::tol;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinbergValue {
    pub values: Vec<Complex64>,
}

impl SteinbergValue {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &SteinbergValue) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// e_0..e_n from power sums p_1..p_n.
fn newton(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len();
    let mut e = vec![ONE; n + 1];
    for k in 1..=n {
        let mut s = ZERO;
        for i in 1..=k {
            let term = e[k - i] * p[i - 1];
            s += if i % 2 == 1 { term } else { -term };
        }
        e[k] = s / re(k as f64);
    }
    e
}

fn power_sums(g: &CMat) -> (Vec<CMat>, Vec<Complex64>) {
    let n = g.nrows();
    let mut pows = vec![linalg::eye(n)];
    for j in 1..=n {
        let next = &pows[j - 1] * g;
        pows.push(next);
    }
    let p = (1..=n).map(|j| pows[j].trace()).collect();
    (pows, p)
}

pub fn chi(g: &CMat) -> SteinbergValue {
    let n = g.nrows();
    let (_, p) = power_sums(g);
    let e = newton(&p);
    SteinbergValue { values: e[1..n].to_vec() }
}

/// Differentials dχ_1..dχ_r at g as rows over ambient right-trivialized
/// directions: dχ_k(X g), with X flattened row-major.
pub fn dchi(g: &CMat) -> CMat {
    let n = g.nrows();
    let (pows, p) = power_sums(g);
    let e = newton(&p);
    // d p_j (X g) = j tr(g^j X), so the covector has entry (a, b) = j (g^j)_{ba}.
    let dp: Vec<CVec> =
        (1..=n).map(|j| linalg::flatten(&(pows[j].transpose() * re(j as f64)))).collect();
    let mut de = vec![CVec::zeros(n * n); n + 1];
    for k in 1..=n {
        let mut s = CVec::zeros(n * n);
        for i in 1..=k {
            let term = &de[k - i] * p[i - 1] + &dp[i - 1] * e[k - i];
            if i % 2 == 1 {
                s += term;
            } else {
                s -= term;
            }
        }
        de[k] = s / re(k as f64);
    }
    CMat::from_fn(n - 1, n * n, |k, c| de[k + 1][c])
}

/// Jacobian of χ along the sl(n) basis directions (r × dim G).
pub fn jacobian(g: &CMat, datum: &RootDatum) -> CMat {
    let n = g.nrows();
    let basis: Vec<CVec> = datum.sl_basis().iter().map(linalg::flatten).collect();
    dchi(g) * linalg::from_columns(&basis, n * n)
}

pub fn jacobian_rank(g: &CMat) -> Result<usize> {
    let j = jacobian(g, &RootDatum::new(g.nrows()));
    let smax = linalg::singular_values(&j).first().copied().unwrap_or(0.0);
    linalg::rank_thr(&j, tol::RANK * smax.max(1.0))
}

/// g is regular iff dχ_1, …, dχ_r are independent at g.
pub fn is_regular(g: &CMat) -> Result<bool> {
    Ok(jacobian_rank(g)? == g.nrows() - 1)
}

pub fn fiber_tolerance(z: &SteinbergValue) -> f64 {
    1e-8 * (1.0 + z.max_abs())
}

pub fn same_fiber(g1: &CMat, g2: &CMat) -> bool {
    let (a, b) = (chi(g1), chi(g2));
    a.dist(&b) < fiber_tolerance(&a)
}

// ---------------------------------------------------------------- SL(3)

/// [[a, b, h₁x], [c, h₂x⁻², 0], [−h₃x, 0, 0]], the G*-orbit through hẇ₀.
pub fn remark27_family(h: &[Complex64; 3], a: Complex64, b: Complex64, c: Complex64, x: Complex64) -> CMat {
    CMat::from_row_slice(3, 3, &[a, b, h[0] * x, c, h[1] / (x * x), ZERO, -h[2] * x, ZERO, ZERO])
}

/// Residual of the subregular unipotent conditions: ‖(g − I)²‖ and
/// whether g ≠ I.
pub fn subregular_residual(g: &CMat) -> (f64, bool) {
    let m = g - linalg::eye(g.nrows());
    (linalg::max_abs(&(&m * &m)), linalg::max_abs(&m) > 1e-6)
}

/// The two points of the family with (g − I)² = 0, g ≠ I: a = 2, b = c = 0,
/// x = ±√h₂. Requires h₁h₂h₃ = 1 and h₂ ≠ 0.
pub fn remark27_intersection(h: &[Complex64; 3]) -> Vec<CMat> {
    assert!(h[1].norm() > 0.0, "h2 must be nonzero");
    let x = h[1].sqrt();
    [x, -x].iter().map(|&x| remark27_family(h, re(2.0), ZERO, ZERO, x)).collect()
}

/// The chart of Bw₀B₋ = Bw₀: [[a, b, y], [c, x, 0], [−1/(xy), 0, 0]].
pub fn example31_chart(c: &[Complex64; 5]) -> CMat {
    let [a, b, cc, x, y] = *c;
    CMat::from_row_slice(3, 3, &[a, b, y, cc, x, ZERO, -ONE / (x * y), ZERO, ZERO])
}

/// (f₁, f₂) = χ − χ(I) in chart coordinates.
pub fn example31_equations(c: &[Complex64; 5]) -> [Complex64; 2] {
    let z = chi(&example31_chart(c));
    [z.values[0] - re(3.0), z.values[1] - re(3.0)]
}

/// Jacobian of (f₁, f₂) in chart coordinates (a, b, c, x, y), via dχ and
/// the analytic chart derivatives.
pub fn example31_jacobian(c: &[Complex64; 5]) -> CMat {
    let [_, _, _, x, y] = *c;
    let g = example31_chart(c);
    let mut cols = vec![];
    for k in 0..5 {
        let mut d = CMat::zeros(3, 3);
        match k {
            0 => d[(0, 0)] = ONE,
            1 => d[(0, 1)] = ONE,
            2 => d[(1, 0)] = ONE,
            3 => {
                d[(1, 1)] = ONE;
                d[(2, 0)] = ONE / (x * x * y);
            }
            _ => {
                d[(0, 2)] = ONE;
                d[(2, 0)] = ONE / (x * y * y);
            }
        }
        cols.push(linalg::flatten(&(d * inverse(&g))));
    }
    dchi(&g) * linalg::from_columns(&cols, 9)
}

/// A chart point on 𝒰 ∩ Bw₀: x, y, b free, a = 3 − x, c solved from f₂.
pub fn example31_point(x: Complex64, y: Complex64, b: Complex64) -> [Complex64; 5] {
    let a = re(3.0) - x;
    let c = (a * x + ONE / x - re(3.0)) / b;
    [a, b, c, x, y]
}

#[derive(Debug, Clone, Serialize)]
pub struct Example31Report {
    pub max_equation_residual: f64,
    pub generic_ranks: Vec<usize>,
    pub singular_ranks: Vec<usize>,
    pub off_variety_min_violation: f64,
}

impl Example31Report {
    pub fn passed(&self) -> bool {
        self.max_equation_residual < 1e-10
            && self.generic_ranks.iter().all(|&r| r == 2)
            && self.singular_ranks.iter().all(|&r| r == 1)
            && self.off_variety_min_violation > 1e-3
    }
}

pub fn example31_check(samples: usize, seed: u64) -> Example31Report {
    let mut rng = crate::rng::rng_for(seed, &[crate::rng::tag("example31")]);
    let mut eq = 0.0f64;
    let mut generic = vec![];
    let mut singular = vec![];
    let mut off = f64::INFINITY;
    let rank = |c: &[Complex64; 5]| {
        let j = example31_jacobian(c);
        linalg::rank_thr(&j, tol::RANK * linalg::singular_values(&j)[0].max(1.0)).unwrap_or(usize::MAX)
    };
    for _ in 0..samples {
        let (x, y, b) = loop {
            let x = crate::rng::cnormal(&mut rng) + re(1.0);
            let y = crate::rng::cnormal(&mut rng);
            let b = crate::rng::cnormal(&mut rng);
            if x.norm() > 0.2 && y.norm() > 0.2 && b.norm() > 0.2 && (x - ONE).norm() > 0.05 {
                break (x, y, b);
            }
        };
        let p = example31_point(x, y, b);
        let f = example31_equations(&p);
        eq = eq.max(f[0].norm()).max(f[1].norm());
        generic.push(rank(&p));

        let s = [re(2.0), ZERO, ZERO, ONE, y];
        let f = example31_equations(&s);
        eq = eq.max(f[0].norm()).max(f[1].norm());
        singular.push(rank(&s));

        let mut q = p;
        q[0] += re(0.5);
        let f = example31_equations(&q);
        off = off.min(f[0].norm().max(f[1].norm()));
    }
    Example31Report { max_equation_residual: eq, generic_ranks: generic, singular_ranks: singular, off_variety_min_violation: off }
}

/// Right-trivialized tangent space of BwB₋ at g: 𝔟 + Ad_g 𝔟₋.
pub fn tangent_bwb(g: &CMat, datum: &RootDatum) -> CMat {
    let n = g.nrows();
    let gi = inverse(g);
    let mut cols: Vec<CVec> = datum.b_basis().iter().map(linalg::flatten).collect();
    cols.extend(datum.b_minus_basis().iter().map(|y| linalg::flatten(&(g * y * &gi))));
    linalg::span_basis(&linalg::from_columns(&cols, n * n), 1e-9)
}

/// At g ∈ F_t ∩ BwB₋: dim ker(dχ|T(BwB₋)) against dim G − r − l(w), plus
/// the fiber equations and the Bruhat cell.
pub fn fiber_cell_dim_at(g: &CMat, t: &CMat, w: &WeylElement, summary: &mut CheckSummary) -> Result<()> {
    let datum = RootDatum::new(g.nrows());
    let r = datum.n - 1;
    let tb = tangent_bwb(g, &datum);
    summary.integer((datum.dim_g() - w.length) as i64, tb.ncols() as i64);
    let j = dchi(g) * &tb;
    let smax = linalg::singular_values(&j).first().copied().unwrap_or(0.0);
    let rank = linalg::rank_thr(&j, tol::RANK * smax.max(1.0))?;
    summary.integer((datum.dim_g() - r - w.length) as i64, (tb.ncols() - rank) as i64);
    let (zg, zt) = (chi(g), chi(t));
    summary.residual(zg.dist(&zt) / (1.0 + zt.max_abs()));
    let cell = bruhat_cell(g)?;
    summary.integer(0, if &cell == w { 0 } else { 1 });
    summary.samples += 1;
    Ok(())
}

/// fiber_cell_dim_at over seeded points of F_t ∩ BwB₋ from μρ.
pub fn fiber_cell_dim_check(t: &CMat, w: &WeylElement, samples: usize, seed: u64) -> Result<CheckSummary> {
    let mut s = CheckSummary::new(1e-9);
    for k in 0..samples {
        let smp = crate::birational::sample_rho(w, t, crate::rng::derive_seed(seed, &[k as u64]))?;
        let g = crate::birational::mu_rho(&smp.g1, &smp.g2, w, t)?;
        fiber_cell_dim_at(&g, t, w, &mut s)?;
    }
    Ok(s)
}

/// Checks χ_k are Casimirs of π: {χ_k, g_ij} = 0 at g.
pub fn casimir_residual(lie: &LieData, g: &CMat) -> f64 {
    let p = crate::bivector::pi_at(lie, g);
    let d = dchi(g);
    let n = g.nrows();
    let mut worst = 0.0f64;
    for k in 0..n - 1 {
        let a = d.row(k).transpose();
        for i in 0..n {
            for j in 0..n {
                let b = crate::bivector::CoordFn::entry(i, j).covector(std::slice::from_ref(g));
                worst = worst.max(p.pair(&a, &b).norm());
            }
        }
    }
    worst / (1.0 + linalg::max_abs(g).powi(n as i32))
}
