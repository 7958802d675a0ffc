//! One line per acceptance criterion. Integer expectations (leaf ranks,
//! chart brackets) are recomputed here from first principles rather than
//! taken from the library.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use poisson_lab::bivector::{self, LieData};
use poisson_lab::harness::{run_suites, SuiteConfig, VerificationReport};
use poisson_lab::rootdata::{RootDatum, WeylElement};
use poisson_lab::{birational, grothendieck, matgroup, rng, steinberg};

type Outcome = (bool, String);

fn run(ids: &[&str], n: usize, samples: Option<usize>, seed: u64) -> Vec<VerificationReport> {
    let cfg = SuiteConfig { group_n: n, samples, seed, suites: ids.iter().map(|s| s.to_string()).collect(), ..Default::default() };
    run_suites(&cfg).expect("suite run")
}

fn all_pass(reports: &[VerificationReport]) -> Outcome {
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{} n={} residual={:?} error={:?}", r.suite, r.n, r.max_residual, r.error))
        .collect();
    let worst = reports.iter().filter_map(|r| r.max_residual).fold(0.0, f64::max);
    if bad.is_empty() {
        (true, format!("{} reports, worst residual {worst:.2e}", reports.len()))
    } else {
        (false, bad.join("; "))
    }
}

fn and(a: Outcome, b: Outcome) -> Outcome {
    (a.0 && b.0, format!("{}; {}", a.1, b.1))
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let (ok, msg) = f();
    let took = start.elapsed();
    (ok && took < limit, format!("{msg}; {:.2}s (limit {}s)", took.as_secs_f64(), limit.as_secs()))
}

fn inversions(perm: &[usize]) -> usize {
    (0..perm.len()).flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count()
}

fn even_cycles(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut count = 0;
    for s in 0..perm.len() {
        let mut len = 0;
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        count += usize::from(len > 0 && len % 2 == 0);
    }
    count
}

/// dim G − r − l(w) − dim(H/H_w) with H_w = {h·w(h)}: H/H_w has the
/// dimension of the (−1)-eigenspace of w on 𝔥, one per even cycle.
fn leaf_rank_oracle(n: usize, perm: &[usize]) -> i64 {
    let dim_g = (n * n - 1) as i64;
    let r = (n - 1) as i64;
    dim_g - r - inversions(perm) as i64 - even_cycles(perm) as i64
}

fn regular_torus(n: usize, seed: u64) -> poisson_lab::linalg::CMat {
    matgroup::sample_regular_torus(n, &mut rng::rng_for(seed, &[]))
}

fn rank_mismatches(n: usize, samples: usize, observe: impl Fn(&poisson_lab::linalg::CMat, &WeylElement, u64) -> i64) -> Outcome {
    let mut checked = 0;
    let mut bad = vec![];
    for c in 0..2u64 {
        let t = regular_torus(n, 1000 + c);
        for w in WeylElement::all(n) {
            let want = leaf_rank_oracle(n, &w.perm);
            for k in 0..samples as u64 {
                let got = observe(&t, &w, rng::derive_seed(77, &[c, k]));
                checked += 1;
                if got != want {
                    bad.push(format!("w={:?} expected {want} got {got}", w.perm));
                }
            }
        }
    }
    if bad.is_empty() {
        (true, format!("n={n}: {checked} ranks match"))
    } else {
        (false, format!("n={n}: {}", bad.join(", ")))
    }
}

fn criterion5() -> Outcome {
    let f = |n: usize| {
        let lie = LieData::new(RootDatum::new(n));
        rank_mismatches(n, 20, move |t, w, seed| {
            let s = birational::sample_rho(w, t, seed).expect("rho sample");
            let g = birational::mu_rho(&s.g1, &s.g2, w, t).expect("mu rho");
            bivector::rank_of(&bivector::pi_at(&lie, &g)).map(|r| r as i64).unwrap_or(-1)
        })
    };
    and(f(2), f(3))
}

fn criterion8() -> Outcome {
    let lie = LieData::new(RootDatum::new(2));
    let mut r = rng::rng_for(8, &[]);
    let mut worst = 0.0f64;
    let mut ranks_ok = true;
    for _ in 0..50 {
        let x = rng::cnormal(&mut r) + Complex64::new(0.5, 0.0);
        let h = rng::cnormal(&mut r) + Complex64::new(1.5, 0.0);
        let y = rng::cnormal(&mut r);
        let one = Complex64::new(1.0, 0.0);
        let c1 = grothendieck::chart_brackets(&lie, 1, x, h, y);
        let c2 = grothendieck::chart_brackets(&lie, 2, x, h, y);
        worst = worst.max((c1[(0, 2)] - (h + x * y)).norm()).max((c2[(0, 2)] + (one / h + x * y)).norm());
        let w0 = grothendieck::chart1_xtw0(h, x);
        ranks_ok &= bivector::rank_of(&grothendieck::Pi_at(&lie, &w0)).ok() == Some(0);
        if (h + x * y).norm() > 1e-2 {
            ranks_ok &= bivector::rank_of(&grothendieck::Pi_at(&lie, &grothendieck::chart1(x, h, y))).ok() == Some(2);
        }
    }
    and((worst < 1e-9 && ranks_ok, format!("chart residual {worst:.2e}, ranks 0/2 {ranks_ok}")), all_pass(&run(&["sl2-resolution-charts"], 2, None, 8)))
}

fn criterion9() -> Outcome {
    let f = |n: usize| {
        let lie = LieData::new(RootDatum::new(n));
        rank_mismatches(n, 5, move |t, w, seed| {
            let s = birational::sample_rho(w, t, seed).expect("rho sample");
            bivector::rank_of(&grothendieck::Pi_at(&lie, &s.point)).map(|r| r as i64).unwrap_or(-1)
        })
    };
    and(f(2), f(3))
}

fn criterion11() -> Outcome {
    let rep = steinberg::example31_check(20, 11);
    let ok = rep.max_equation_residual < 1e-10
        && rep.generic_ranks.len() == 20
        && rep.generic_ranks.iter().all(|&r| r == 2)
        && rep.singular_ranks.len() == 20
        && rep.singular_ranks.iter().all(|&r| r < 2);
    (ok, format!("equations {:.2e}, generic {:?}, singular {:?}", rep.max_equation_residual, rep.generic_ranks, rep.singular_ranks))
}

fn criterion12() -> Outcome {
    let mut out = all_pass(&[2, 3, 4].into_iter().flat_map(|n| run(&["xi-round-trip"], n, Some(100), 12)).collect::<Vec<_>>());
    let mut u: Vec<Vec<usize>> = birational::allowed_u(3).into_iter().map(|w| w.word).collect();
    u.sort();
    let expect: Vec<Vec<usize>> = vec![vec![], vec![0], vec![1]];
    out = and(out, (u == expect, format!("allowed u for n=3: {u:?}")));
    out = and(out, all_pass(&run(&["jk-round-trip"], 3, None, 12)));
    for n in [2, 3] {
        out = and(out, all_pass(&run(&["rho-strata", "rho-poisson"], n, None, 12)));
    }
    let controls_ok = [2, 3]
        .into_iter()
        .flat_map(|n| run(&["rho-poisson"], n, None, 12))
        .all(|r| !r.controls.is_empty() && r.controls.iter().all(|c| c.observed > 1e-3));
    and(out, (controls_ok, format!("negative controls above 1e-3: {controls_ok}")))
}

fn criterion13() -> Outcome {
    let mut same = true;
    for n in [2, 3] {
        let ids: Vec<&str> =
            poisson_lab::harness::registry().iter().filter(|s| s.sizes.contains(&n) && s.id != "determinism").map(|s| s.id).collect();
        let a = serde_json::to_string(&run(&ids, n, Some(2), 13)).unwrap();
        let b = serde_json::to_string(&run(&ids, n, Some(2), 13)).unwrap();
        same &= a == b;
    }
    and((same, format!("all suites rerun byte-identical: {same}")), all_pass(&run(&["determinism"], 2, None, 13)))
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("SL(2) bracket tables", Box::new(|| timed(Duration::from_secs(1), || all_pass(&run(&["sl2-bracket-tables"], 2, Some(100), 1))))),
        ("pi_G vanishes on H", Box::new(|| all_pass(&[2, 3, 4].into_iter().flat_map(|n| run(&["pi-g-vanishes-on-torus"], n, Some(50), 2)).collect::<Vec<_>>()))),
        (
            "Jacobi identity",
            Box::new(|| {
                timed(Duration::from_secs(30), || {
                    all_pass(&[2, 3].into_iter().flat_map(|n| run(&["jacobi-identity"], n, Some(50), 3)).collect::<Vec<_>>())
                })
            }),
        ),
        ("consistency triangle", Box::new(|| all_pass(&[2, 3].into_iter().flat_map(|n| run(&["consistency-triangle"], n, Some(200), 4)).collect::<Vec<_>>()))),
        ("pi leaf ranks", Box::new(|| and(criterion5(), all_pass(&[2, 3].into_iter().flat_map(|n| run(&["pi-leaf-rank"], n, None, 5)).collect::<Vec<_>>())))),
        (
            "coisotropy",
            Box::new(|| all_pass(&[2, 3, 4].into_iter().flat_map(|n| run(&["coisotropy", "characteristic-directions"], n, Some(100), 6)).collect::<Vec<_>>())),
        ),
        ("mu and q Poisson", Box::new(|| all_pass(&[2, 3].into_iter().flat_map(|n| run(&["mu-q-poisson"], n, Some(200), 7)).collect::<Vec<_>>()))),
        ("SL(2) resolution charts", Box::new(criterion8)),
        ("resolution leaf ranks", Box::new(|| and(criterion9(), all_pass(&[2, 3].into_iter().flat_map(|n| run(&["resolution-leaf-rank"], n, None, 9)).collect::<Vec<_>>())))),
        ("subregular intersection", Box::new(|| all_pass(&run(&["subregular-intersection"], 3, Some(20), 10)))),
        ("cubic chart", Box::new(|| and(criterion11(), all_pass(&run(&["steinberg-cubic-chart"], 3, Some(20), 11))))),
        ("birational maps", Box::new(criterion12)),
        ("determinism", Box::new(criterion13)),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let (ok, msg) = f();
        failed += usize::from(!ok);
        println!("criterion {:>2} {}: {name}: {msg}", k + 1, if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
