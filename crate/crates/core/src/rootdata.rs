//! Type A root data and Weyl group combinatorics.
//!
//! Indices are 0-based internally; simple reflection `s_i` (1-based in
//! strings) swaps `i-1` and `i`. A Weyl element is stored in one-line
//! notation: `perm[k] = w(k)`, and its matrix has its nonzero entry of
//! column `k` in row `w(k)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{self, expm, re, unit, CMat, ONE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootDatum {
    pub n: usize,
    pub rank: usize,
    /// Pairs (i, j), i < j, for the root ε_i − ε_j.
    pub positive_roots: Vec<(usize, usize)>,
    pub simple_roots: Vec<(usize, usize)>,
    /// κ in ⟪x, y⟫ = κ·tr(xy). κ = 1/(2λ) gives the λ-family on SL(2).
    pub form_scale: Complex64,
}

impl RootDatum {
    pub fn new(n: usize) -> Self {
        Self::with_form_scale(n, ONE)
    }

    pub fn with_form_scale(n: usize, form_scale: Complex64) -> Self {
        assert!(n >= 2, "SL(n) needs n >= 2");
        let mut positive_roots = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                positive_roots.push((i, j));
            }
        }
        let simple_roots = (0..n - 1).map(|i| (i, i + 1)).collect();
        RootDatum { n, rank: n - 1, positive_roots, simple_roots, form_scale }
    }

    /// The λ-scaled form ⟪x,y⟫ = tr(xy)/(2λ).
    pub fn lambda_family(n: usize, lambda: Complex64) -> Self {
        Self::with_form_scale(n, ONE / (re(2.0) * lambda))
    }

    pub fn dim_g(&self) -> usize {
        self.n * self.n - 1
    }

    pub fn dim_b(&self) -> usize {
        self.n * (self.n + 1) / 2 - 1
    }

    pub fn form(&self, x: &CMat, y: &CMat) -> Complex64 {
        self.form_scale * (x * y).trace()
    }

    /// E_α for α = ε_i − ε_j (i < j).
    pub fn e_pos(&self, (i, j): (usize, usize)) -> CMat {
        unit(self.n, i, j)
    }

    /// E_{−α}, normalized so that ⟪E_α, E_{−α}⟫ = 1.
    pub fn e_neg(&self, (i, j): (usize, usize)) -> CMat {
        unit(self.n, j, i) / self.form_scale
    }

    /// Basis of sl(n): off-diagonal units in row-major order, then
    /// e_kk − e_{k+1,k+1}.
    pub fn sl_basis(&self) -> Vec<CMat> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.dim_g());
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push(unit(n, i, j));
                }
            }
        }
        for k in 0..n - 1 {
            out.push(unit(n, k, k) - unit(n, k + 1, k + 1));
        }
        out
    }

    /// Basis of the Borel subalgebra 𝔟 (upper triangular, traceless).
    pub fn b_basis(&self) -> Vec<CMat> {
        let mut out: Vec<CMat> = self.positive_roots.iter().map(|&r| self.e_pos(r)).collect();
        out.extend(self.h_basis());
        out
    }

    pub fn b_minus_basis(&self) -> Vec<CMat> {
        let mut out: Vec<CMat> = self.positive_roots.iter().map(|&(i, j)| unit(self.n, j, i)).collect();
        out.extend(self.h_basis());
        out
    }

    pub fn n_basis(&self) -> Vec<CMat> {
        self.positive_roots.iter().map(|&r| self.e_pos(r)).collect()
    }

    pub fn h_basis(&self) -> Vec<CMat> {
        let n = self.n;
        (0..n - 1).map(|k| unit(n, k, k) - unit(n, k + 1, k + 1)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylElement {
    pub perm: Vec<usize>,
    /// Lexicographically smallest reduced word; entry i stands for s_{i+1}.
    pub word: Vec<usize>,
    pub length: usize,
}

fn inversions(p: &[usize]) -> usize {
    let mut c = 0;
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            if p[a] > p[b] {
                c += 1;
            }
        }
    }
    c
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (k, &v) in p.iter().enumerate() {
        q[v] = k;
    }
    q
}

impl WeylElement {
    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &v in &perm {
            if v >= n || seen[v] {
                return Err(LabError::Parse(format!("not a permutation: {perm:?}")));
            }
            seen[v] = true;
        }
        // Peel off the smallest left descent each time.
        let mut word = Vec::new();
        let mut cur = perm.clone();
        loop {
            let inv = invert(&cur);
            match (0..n.saturating_sub(1)).find(|&i| inv[i] > inv[i + 1]) {
                Some(i) => {
                    word.push(i);
                    for v in cur.iter_mut() {
                        if *v == i {
                            *v = i + 1;
                        } else if *v == i + 1 {
                            *v = i;
                        }
                    }
                }
                None => break,
            }
        }
        let length = inversions(&perm);
        debug_assert_eq!(length, word.len());
        Ok(WeylElement { perm, word, length })
    }

    /// Product s_{i1} s_{i2} ... of simple reflections (0-based indices).
    pub fn from_word(n: usize, word: &[usize]) -> Result<Self> {
        let mut p: Vec<usize> = (0..n).collect();
        for &i in word.iter().rev() {
            if i + 1 >= n {
                return Err(LabError::Parse(format!("s{} does not exist for n = {n}", i + 1)));
            }
            for v in p.iter_mut() {
                if *v == i {
                    *v = i + 1;
                } else if *v == i + 1 {
                    *v = i;
                }
            }
        }
        Self::from_perm(p)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_perm((0..n).collect()).unwrap()
    }

    pub fn simple(n: usize, i: usize) -> Self {
        Self::from_word(n, &[i]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    /// (self ∘ other)(k) = self(other(k)).
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_perm(other.perm.iter().map(|&k| self.perm[k]).collect()).unwrap()
    }

    pub fn inverse(&self) -> Self {
        Self::from_perm(invert(&self.perm)).unwrap()
    }

    /// All n! elements, in lexicographic order of the one-line notation.
    pub fn all(n: usize) -> Vec<Self> {
        fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == used.len() {
                out.push(cur.clone());
                return;
            }
            for v in 0..used.len() {
                if !used[v] {
                    used[v] = true;
                    cur.push(v);
                    rec(cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out.into_iter().map(|p| Self::from_perm(p).unwrap()).collect()
    }

    /// Parses "s1 s2 s1", "3 2 1" (one-line, 1-based) or "e"/"id".
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let toks: Vec<&str> = s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        if toks.is_empty() || toks == ["e"] || toks == ["id"] || toks == ["1"] && n != 1 {
            return Ok(Self::identity(n));
        }
        if toks.iter().all(|t| t.starts_with('s')) {
            let word = toks
                .iter()
                .map(|t| {
                    t[1..]
                        .parse::<usize>()
                        .ok()
                        .filter(|&i| i >= 1)
                        .map(|i| i - 1)
                        .ok_or_else(|| LabError::Parse(format!("bad reflection `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::from_word(n, &word);
        }
        let perm = toks
            .iter()
            .map(|t| {
                t.parse::<usize>()
                    .ok()
                    .filter(|&v| v >= 1)
                    .map(|v| v - 1)
                    .ok_or_else(|| LabError::Parse(format!("bad permutation entry `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if perm.len() != n {
            return Err(LabError::Parse(format!("permutation `{s}` has length {}, expected {n}", perm.len())));
        }
        Self::from_perm(perm)
    }

    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            "e".into()
        } else {
            self.word.iter().map(|i| format!("s{}", i + 1)).collect::<Vec<_>>().join(" ")
        }
    }

    pub fn one_line(&self) -> String {
        self.perm.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
    }

    pub fn permutation_matrix(&self) -> CMat {
        let n = self.n();
        let mut m = CMat::zeros(n, n);
        for (k, &v) in self.perm.iter().enumerate() {
            m[(v, k)] = ONE;
        }
        m
    }

    /// Ad_ẇ on diagonal entries: the entry in slot k moves to slot w(k).
    pub fn act_on_diagonal<T: Copy + Default>(&self, d: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); d.len()];
        for (k, &v) in self.perm.iter().enumerate() {
            out[v] = d[k];
        }
        out
    }

    /// Cycles of the permutation, each listed as j, w(j), w(w(j)), ...
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut c = vec![];
            let mut j = s;
            while !seen[j] {
                seen[j] = true;
                c.push(j);
                j = self.perm[j];
            }
            out.push(c);
        }
        out
    }
}

pub fn longest_element(datum: &RootDatum) -> WeylElement {
    WeylElement::from_perm((0..datum.n).rev().collect()).unwrap()
}

/// Bruhat order via the rank-matrix criterion:
/// u ≤ v iff #{a ≤ i : u(a) ≥ j} ≤ #{a ≤ i : v(a) ≥ j} for all i, j.
pub fn bruhat_leq(u: &WeylElement, v: &WeylElement) -> Result<bool> {
    let n = u.n();
    if v.n() != n {
        return Err(LabError::DimensionMismatch(format!("Weyl elements of S_{n} and S_{}", v.n())));
    }
    for i in 0..n {
        for j in 0..n {
            let cu = (0..=i).filter(|&a| u.perm[a] >= j).count();
            let cv = (0..=i).filter(|&a| v.perm[a] >= j).count();
            if cu > cv {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Signed permutation representative: ones at (w(k), k), with the last row
/// negated for odd permutations so that det = 1.
pub fn representative(w: &WeylElement) -> CMat {
    let mut m = w.permutation_matrix();
    if w.length % 2 == 1 {
        let n = m.nrows();
        for j in 0..n {
            m[(n - 1, j)] = -m[(n - 1, j)];
        }
    }
    m
}

/// Alternative representative: product over the reduced word of
/// exp(−e_i) exp(f_i) exp(−e_i).
pub fn representative_exp(w: &WeylElement) -> CMat {
    let n = w.n();
    let mut m = linalg::eye(n);
    for &i in &w.word {
        let e = unit(n, i, i + 1);
        let f = unit(n, i + 1, i);
        let s = expm(&-&e) * expm(&f) * expm(&-&e);
        m = &m * s;
    }
    m
}

/// dim(H/H_w) = dim ker(1 + w) on 𝔥.
pub fn dim_h_mod_hw(w: &WeylElement) -> usize {
    let n = w.n();
    let p = w.permutation_matrix();
    let one_plus_w = linalg::eye(n) + p;
    let mut h = CMat::zeros(n, n - 1);
    for k in 0..n - 1 {
        h[(k, k)] = ONE;
        h[(k + 1, k)] = -ONE;
    }
    (n - 1) - linalg::rank_abs(&(one_plus_w * h), 1e-9)
}

/// Membership of a diagonal torus element in H_w = {k·Ad_ẇ(k)}.
///
/// H_w is cut out by the characters trivial on it: for each even cycle of
/// w the alternating product along the cycle, and, when every cycle is
/// even, the product over every other slot of each cycle.
pub fn in_h_w(h: &[Complex64], w: &WeylElement, tol: f64) -> bool {
    let cycles = w.cycles();
    let mut ok = true;
    for c in cycles.iter().filter(|c| c.len() % 2 == 0) {
        let mut v = ONE;
        for (k, &j) in c.iter().enumerate() {
            v *= if k % 2 == 0 { h[j] } else { ONE / h[j] };
        }
        ok &= (v - ONE).norm() <= tol;
    }
    if cycles.iter().all(|c| c.len() % 2 == 0) {
        let mut v = ONE;
        for c in &cycles {
            for (k, &j) in c.iter().enumerate() {
                if k % 2 == 1 {
                    v *= h[j];
                }
            }
        }
        ok &= (v - ONE).norm() <= tol;
    }
    ok
}
