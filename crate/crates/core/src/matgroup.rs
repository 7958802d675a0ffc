//! SL(n, ℂ) as matrices: factorizations, cell detection and samplers.

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::linalg::{self, diag, eye, inverse, lstsq, max_abs, re, unit, CMat, ONE, ZERO};
use crate::rng::{self, LabRng};
use crate::rootdata::{representative, RootDatum, WeylElement};
use crate::tol;

/// Elements of SL(n) are plain matrices; constructors keep det = 1.
pub type GroupElement = CMat;

pub fn is_in_sl(g: &CMat, tol_det: f64) -> bool {
    g.is_square() && (linalg::det(g) - ONE).norm() < tol_det
}

/// Rescales by det^{-1/n} (principal branch).
pub fn normalize_det(g: &CMat) -> CMat {
    let n = g.nrows() as f64;
    let d = linalg::det(g);
    g * d.powf(-1.0 / n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussFactors {
    pub lower: CMat,
    pub diag: CMat,
    pub upper: CMat,
}

/// g = (g)_- (g)_0 (g)_+ without pivoting.
pub fn gauss_decompose(g: &CMat) -> Result<GaussFactors> {
    gauss_decompose_tol(g, tol::MINOR)
}

pub fn gauss_decompose_tol(g: &CMat, tol_minor: f64) -> Result<GaussFactors> {
    let n = g.nrows();
    let mut m = g.clone();
    let mut lower = eye(n);
    let mut minor = ONE;
    for k in 0..n {
        let p = m[(k, k)];
        minor *= p;
        if minor.norm() <= tol_minor {
            return Err(LabError::NotInOpenCell(k + 1));
        }
        for i in k + 1..n {
            let l = m[(i, k)] / p;
            lower[(i, k)] = l;
            for j in k..n {
                let v = m[(k, j)];
                m[(i, j)] -= l * v;
            }
            m[(i, k)] = ZERO;
        }
    }
    let d: Vec<Complex64> = (0..n).map(|k| m[(k, k)]).collect();
    let mut upper = m;
    for i in 0..n {
        for j in i..n {
            upper[(i, j)] /= d[i];
        }
    }
    Ok(GaussFactors { lower, diag: diag(&d), upper })
}

/// Smallest |leading principal minor| of g.
pub fn min_leading_minor(g: &CMat) -> f64 {
    (1..=g.nrows()).map(|k| linalg::leading_minor(g, k).norm()).fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug)]
enum Corner {
    /// rows ≥ i, columns ≥ j: B on the left, B_- on the right.
    BottomRight,
    /// rows ≥ i, columns ≤ j: B on both sides.
    BottomLeft,
    /// rows ≤ i, columns ≥ j: B_- on both sides.
    TopRight,
}

/// Reads a permutation off the corner rank function of g. Returns w with
/// the entry of column k in row w(k).
fn corner_permutation(g: &CMat, corner: Corner) -> Result<WeylElement> {
    let n = g.nrows();
    let thr = tol::RANK * linalg::singular_values(g)[0];
    let (from_bottom, from_right) = match corner {
        Corner::BottomRight => (true, true),
        Corner::BottomLeft => (true, false),
        Corner::TopRight => (false, true),
    };
    // rho[i][j] over padded indices 0..=n+1 so neighbours out of range read 0.
    let mut rho = vec![vec![0usize; n + 2]; n + 2];
    for i in 0..n {
        for j in 0..n {
            let (r0, nr) = if from_bottom { (i, n - i) } else { (0, i + 1) };
            let (c0, nc) = if from_right { (j, n - j) } else { (0, j + 1) };
            let sub = g.view((r0, c0), (nr, nc)).into_owned();
            rho[i + 1][j + 1] = linalg::rank_thr(&sub, thr)?;
        }
    }
    let di: isize = if from_bottom { 1 } else { -1 };
    let dj: isize = if from_right { 1 } else { -1 };
    let at = |i: isize, j: isize| rho[i as usize][j as usize] as isize;
    let mut perm = vec![usize::MAX; n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (i as isize + 1, j as isize + 1);
            let d = at(a, b) - at(a + di, b) - at(a, b + dj) + at(a + di, b + dj);
            match d {
                0 => {}
                1 if perm[j] == usize::MAX => perm[j] = i,
                _ => return Err(LabError::WrongCell(format!("rank pattern is not a permutation ({corner:?})"))),
            }
        }
    }
    if perm.contains(&usize::MAX) {
        return Err(LabError::WrongCell(format!("rank pattern is not a permutation ({corner:?})")));
    }
    WeylElement::from_perm(perm)
}

/// The w with g ∈ B w B_-.
pub fn bruhat_cell(g: &CMat) -> Result<WeylElement> {
    corner_permutation(g, Corner::BottomRight)
}

/// The w with g ∈ B w B (equivalently, the Schubert cell of the flag g·B).
pub fn flag_cell(g: &CMat) -> Result<WeylElement> {
    corner_permutation(g, Corner::BottomLeft)
}

/// (u, v) with g ∈ BuB ∩ B_-vB_-.
pub fn double_bruhat(g: &CMat) -> Result<(WeylElement, WeylElement)> {
    Ok((corner_permutation(g, Corner::BottomLeft)?, corner_permutation(g, Corner::TopRight)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruhatFactors {
    pub w: WeylElement,
    pub n_plus: CMat,
    pub h: CMat,
    pub n_minus: CMat,
}

/// Positions (a, c), a < c, of U ∩ ẇUẇ⁻¹.
pub fn u_w_plus_positions(w: &WeylElement) -> Vec<(usize, usize)> {
    let inv = w.inverse().perm;
    let n = w.n();
    let mut out = vec![];
    for a in 0..n {
        for c in a + 1..n {
            if inv[a] < inv[c] {
                out.push((a, c));
            }
        }
    }
    out
}

/// Positions (a, c), a < c, of U_w = U ∩ ẇU_-ẇ⁻¹.
pub fn u_w_minus_positions(w: &WeylElement) -> Vec<(usize, usize)> {
    let inv = w.inverse().perm;
    let n = w.n();
    let mut out = vec![];
    for a in 0..n {
        for c in a + 1..n {
            if inv[a] > inv[c] {
                out.push((a, c));
            }
        }
    }
    out
}

/// True when the strictly upper part of m is supported on `pos`.
pub fn supported_on(m: &CMat, pos: &[(usize, usize)], tol: f64) -> bool {
    let n = m.nrows();
    (0..n).all(|a| (a + 1..n).all(|c| pos.contains(&(a, c)) || m[(a, c)].norm() <= tol))
}

/// φ_w chart: g = n_plus · h · ẇ · n_minus with n_plus ∈ U^w.
pub fn factor_phi_w(g: &CMat, w: &WeylElement) -> Result<BruhatFactors> {
    factor_phi_w_with(g, w, &representative(w))
}

pub fn factor_phi_w_with(g: &CMat, w: &WeylElement, wdot: &CMat) -> Result<BruhatFactors> {
    let n = g.nrows();
    let inv = w.inverse().perm;
    let scale = max_abs(g).max(1.0);
    // Solve for m = n_minus⁻¹ ∈ U_- column by column:
    // (g m)_{ik} = 0 whenever i > w(k) or w⁻¹(i) > k.
    let mut m = eye(n);
    for k in 0..n {
        let rows: Vec<usize> = (0..n).filter(|&i| i > w.perm[k] || inv[i] > k).collect();
        let unknowns: Vec<usize> = (k + 1..n).collect();
        if rows.is_empty() {
            continue;
        }
        let a = CMat::from_fn(rows.len(), unknowns.len(), |r, u| g[(rows[r], unknowns[u])]);
        let b = CMat::from_fn(rows.len(), 1, |r, _| -g[(rows[r], k)]);
        let (x, res) = lstsq(&a, &b);
        if res > 1e-8 * scale {
            return Err(LabError::WrongCell(format!("g is not in B{}B_-", w.word_string())));
        }
        for (u, &l) in unknowns.iter().enumerate() {
            m[(l, k)] = x[(u, 0)];
        }
    }
    let nh = g * &m * inverse(wdot);
    if !linalg::is_upper(&nh, 1e-8 * scale) {
        return Err(LabError::WrongCell(format!("g is not in B{}B_-", w.word_string())));
    }
    let d = linalg::diagonal_of(&nh);
    let h = diag(&d);
    let mut n_plus = &nh * diag(&d.iter().map(|z| ONE / z).collect::<Vec<_>>());
    for i in 0..n {
        for j in 0..i {
            n_plus[(i, j)] = ZERO;
        }
    }
    let f = BruhatFactors { w: w.clone(), n_plus, h, n_minus: inverse(&m) };
    let recon = &f.n_plus * &f.h * wdot * &f.n_minus;
    if linalg::dist(&recon, g) > 1e-8 * scale || !supported_on(&f.n_plus, &u_w_plus_positions(w), 1e-8 * scale) {
        return Err(LabError::WrongCell(format!("g is not in B{}B_-", w.word_string())));
    }
    Ok(f)
}

/// g = m · ẇ · b with m ∈ U ∩ ẇU_-ẇ⁻¹ and b ∈ B, for g ∈ BwB.
pub fn factor_bwb(g: &CMat, w: &WeylElement, wdot: &CMat) -> Result<(CMat, CMat)> {
    let n = g.nrows();
    let inv = w.inverse().perm;
    let pos = u_w_minus_positions(w);
    let scale = max_abs(g).max(1.0);
    // y = m⁻¹ ∈ U_w; row a of y g must vanish in columns j < w⁻¹(a).
    let mut y = eye(n);
    for a in 0..n {
        let cols: Vec<usize> = (0..inv[a]).collect();
        let unknowns: Vec<usize> = (a + 1..n).filter(|&c| pos.contains(&(a, c))).collect();
        if cols.is_empty() {
            continue;
        }
        let am = CMat::from_fn(cols.len(), unknowns.len(), |r, u| g[(unknowns[u], cols[r])]);
        let b = CMat::from_fn(cols.len(), 1, |r, _| -g[(a, cols[r])]);
        let (x, res) = lstsq(&am, &b);
        if res > 1e-8 * scale {
            return Err(LabError::WrongCell(format!("flag is not in B{}B", w.word_string())));
        }
        for (u, &c) in unknowns.iter().enumerate() {
            y[(a, c)] = x[(u, 0)];
        }
    }
    let b = inverse(wdot) * &y * g;
    if !linalg::is_upper(&b, 1e-8 * scale) {
        return Err(LabError::WrongCell(format!("flag is not in B{}B", w.word_string())));
    }
    Ok((inverse(&y), b))
}

// ---------------------------------------------------------------- samplers

/// exp of a traceless complex normal diagonal.
pub fn sample_torus(n: usize, rng: &mut LabRng) -> CMat {
    let z: Vec<Complex64> = (0..n).map(|_| rng::cnormal(rng)).collect();
    torus_from_logs(&z)
}

pub fn torus_from_logs(z: &[Complex64]) -> CMat {
    let mean = z.iter().sum::<Complex64>() / re(z.len() as f64);
    diag(&z.iter().map(|x| (x - mean).exp()).collect::<Vec<_>>())
}

pub fn sample_regular_torus(n: usize, rng: &mut LabRng) -> CMat {
    loop {
        let t = sample_torus(n, rng);
        if is_regular_semisimple_diag(&t, 1e-3) {
            return t;
        }
    }
}

pub fn is_regular_semisimple_diag(t: &CMat, tol: f64) -> bool {
    let d = linalg::diagonal_of(t);
    (0..d.len()).all(|i| (i + 1..d.len()).all(|j| (d[i] - d[j]).norm() > tol))
}

/// Unipotent upper triangular with normal entries on `pos` (all of U if None).
pub fn sample_unipotent(n: usize, pos: Option<&[(usize, usize)]>, rng: &mut LabRng) -> CMat {
    let mut m = eye(n);
    for i in 0..n {
        for j in i + 1..n {
            if pos.map_or(true, |p| p.contains(&(i, j))) {
                m[(i, j)] = rng::cnormal(rng);
            }
        }
    }
    m
}

pub fn sample_unipotent_lower(n: usize, rng: &mut LabRng) -> CMat {
    sample_unipotent(n, None, rng).transpose()
}

pub fn sample_borel(n: usize, rng: &mut LabRng) -> CMat {
    sample_torus(n, rng) * sample_unipotent(n, None, rng)
}

pub fn sample_borel_minus(n: usize, rng: &mut LabRng) -> CMat {
    sample_torus(n, rng) * sample_unipotent_lower(n, rng)
}

pub fn sample_sl(n: usize, rng: &mut LabRng) -> CMat {
    let m = CMat::from_fn(n, n, |_, _| rng::cnormal(rng));
    normalize_det(&m)
}

/// x_i(t) = exp(t e_{i,i+1}).
pub fn x_plus(n: usize, i: usize, t: Complex64) -> CMat {
    eye(n) + unit(n, i, i + 1) * t
}

/// x_{-i}(t) = exp(t e_{i+1,i}).
pub fn x_minus(n: usize, i: usize, t: Complex64) -> CMat {
    eye(n) + unit(n, i + 1, i) * t
}

/// h · Π_{u letters} x_{-i}(t) · Π_{v letters} x_i(t), which lies in G^{u,v}
/// for nonzero parameters. `params` holds r torus logs followed by
/// l(u) + l(v) letter parameters.
pub fn cell_from_params(u: &WeylElement, v: &WeylElement, params: &[Complex64]) -> CMat {
    let n = u.n();
    let r = n - 1;
    assert_eq!(params.len(), r + u.length + v.length);
    let mut logs = params[..r].to_vec();
    logs.push(-params[..r].iter().sum::<Complex64>());
    let mut g = torus_from_logs(&logs);
    let mut k = r;
    for &i in &u.word {
        g = g * x_minus(n, i, params[k]);
        k += 1;
    }
    for &i in &v.word {
        g = g * x_plus(n, i, params[k]);
        k += 1;
    }
    g
}

const SAMPLER_RETRIES: usize = 32;

/// A point of the double Bruhat cell G^{u,v}, verified by the detector.
pub fn sample_cell(u: &WeylElement, v: &WeylElement, seed: u64) -> Result<CMat> {
    let r = u.n() - 1;
    for attempt in 0..SAMPLER_RETRIES {
        let mut rng = rng::rng_for(seed, &[rng::tag("sample_cell"), attempt as u64]);
        let params: Vec<Complex64> = (0..r + u.length + v.length).map(|_| rng::cnormal(&mut rng)).collect();
        if params[r..].iter().any(|p| p.norm() < 0.05) {
            continue;
        }
        let g = cell_from_params(u, v, &params);
        if let Ok((du, dv)) = double_bruhat(&g) {
            if &du == u && &dv == v {
                return Ok(g);
            }
        }
    }
    Err(LabError::SamplerExhausted(SAMPLER_RETRIES))
}

/// x t x⁻¹ for a seeded random x ∈ SL(n).
pub fn sample_conjugacy_class(t: &CMat, seed: u64) -> Result<CMat> {
    if !is_regular_semisimple_diag(t, 1e-8) {
        return Err(LabError::NotRegularSemisimple);
    }
    let mut rng = rng::rng_for(seed, &[rng::tag("conjugacy_class")]);
    let x = sample_sl(t.nrows(), &mut rng);
    Ok(&x * t * inverse(&x))
}

/// φ_α on the group: SL(2) → SL(n) for the simple root α_i (0-based i),
/// built from the triple h_α, e_α, e_{-α} of the datum's form.
pub fn embed_sl2(datum: &RootDatum, i: usize, s: &CMat) -> CMat {
    let n = datum.n;
    let c = datum.form_scale.powf(0.25);
    let d = diag(&[c, ONE / c]);
    let t = &d * s * inverse(&d);
    let mut g = eye(n);
    for a in 0..2 {
        for b in 0..2 {
            g[(i + a, i + b)] = t[(a, b)];
        }
    }
    g
}

/// Lie algebra map of embed_sl2.
pub fn embed_sl2_lie(datum: &RootDatum, i: usize, x: &CMat) -> CMat {
    let n = datum.n;
    let c = datum.form_scale.powf(0.25);
    let d = diag(&[c, ONE / c]);
    let t = &d * x * inverse(&d);
    let mut g = CMat::zeros(n, n);
    for a in 0..2 {
        for b in 0..2 {
            g[(i + a, i + b)] = t[(a, b)];
        }
    }
    g
}
