//! Suite registry, configuration, seeded execution, JSON reports and the
//! command-line front end.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::check::CheckSummary;
use crate::error::{LabError, Result};
use crate::suites::{self, SuiteCtx};
use crate::{birational, bivector, grothendieck, io, linalg, matgroup, steinberg, tol};
use crate::bivector::LieData;
use crate::rootdata::{RootDatum, WeylElement};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "POISSON_LAB_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub tol_rank: f64,
    pub tol_fd: f64,
    pub tol_eq: f64,
    pub tol_minor: f64,
    pub tol_det: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tol_rank: tol::RANK, tol_fd: tol::FD, tol_eq: tol::EQ, tol_minor: tol::MINOR, tol_det: tol::DET }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub group_n: usize,
    /// Samples per suite (per (class, w) pair for stratified suites);
    /// `None` uses each suite's default.
    pub samples: Option<usize>,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Per-suite tolerance overrides, keyed by suite id.
    pub suite_tolerances: BTreeMap<String, f64>,
    pub suites: Vec<String>,
    /// Record wall time in reports. Off by default so reports stay
    /// byte-identical across runs.
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            group_n: 2,
            samples: None,
            seed: 0,
            tolerances: Tolerances::default(),
            suite_tolerances: BTreeMap::new(),
            suites: vec!["all".into()],
            timings: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=6).contains(&self.group_n) {
            return Err(LabError::ConfigInvalid(format!("group_n = {} is outside 2..=6", self.group_n)));
        }
        if self.samples == Some(0) {
            return Err(LabError::ConfigInvalid("samples must be positive".into()));
        }
        let t = &self.tolerances;
        let all = [t.tol_rank, t.tol_fd, t.tol_eq, t.tol_minor, t.tol_det].into_iter().chain(self.suite_tolerances.values().copied());
        if all.into_iter().any(|v| !(v > 0.0 && v.is_finite())) {
            return Err(LabError::ConfigInvalid("tolerances must be positive and finite".into()));
        }
        if self.suites.is_empty() {
            return Err(LabError::ConfigInvalid("no suites requested".into()));
        }
        for id in self.suite_tolerances.keys() {
            find(id)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Control {
    pub observed: f64,
    pub floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    /// The statement the suite checks.
    pub reference: String,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    /// Null when the residual is not finite.
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub expected: Vec<i64>,
    pub observed: Vec<i64>,
    pub controls: Vec<Control>,
    pub notes: Vec<String>,
    pub error: Option<String>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn from_summary(suite: &Suite, n: usize, seed: u64, tolerance: f64, out: Result<CheckSummary>) -> Self {
        let mut r = VerificationReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.id.into(),
            reference: suite.reference.into(),
            n,
            seed,
            samples: 0,
            max_residual: Some(0.0),
            tolerance,
            expected: vec![],
            observed: vec![],
            controls: vec![],
            notes: vec![],
            error: None,
            status: Status::Fail,
            wall_time_s: None,
        };
        match out {
            Ok(mut s) => {
                s.tolerance = tolerance;
                r.samples = s.samples;
                r.max_residual = Some(s.max_residual).filter(|v| v.is_finite());
                (r.expected, r.observed) = s.integers.iter().copied().unzip();
                r.controls = s.controls.iter().map(|&(observed, floor)| Control { observed, floor }).collect();
                r.status = if s.passed() { Status::Pass } else { Status::Fail };
                r.notes = s.notes;
            }
            Err(e) => {
                r.max_residual = None;
                r.error = Some(e.to_string());
            }
        }
        r
    }
}

pub struct Suite {
    pub id: &'static str,
    pub reference: &'static str,
    pub sizes: RangeInclusive<usize>,
    pub default_samples: usize,
    pub tolerance: fn(&Tolerances) -> f64,
    pub run: fn(&SuiteCtx) -> Result<CheckSummary>,
}

/// Every suite, in report order.
pub fn registry() -> &'static [Suite] {
    static REGISTRY: &[Suite] = &[
        Suite {
            id: "sl2-bracket-tables",
            reference: "SL(2): {a,b} = λab for π_G in the λ-family; {a,b} = bd for π; a + d is a Casimir of π",
            sizes: 2..=2,
            default_samples: 100,
            tolerance: |t| t.tol_eq / 10.0,
            run: suites::sl2_bracket_tables,
        },
        Suite {
            id: "pi-g-vanishes-on-torus",
            reference: "π_G vanishes at points of H; π and π_D⁻ vanish at the identity",
            sizes: 2..=6,
            default_samples: 50,
            tolerance: |_| 1e-12,
            run: suites::torus_vanishing,
        },
        Suite {
            id: "jacobi-identity",
            reference: "π_G, π and π_D± satisfy the Jacobi identity; Λ₀ alone does not",
            sizes: 2..=3,
            default_samples: 50,
            tolerance: |t| t.tol_fd,
            run: suites::jacobi_identity,
        },
        Suite {
            id: "consistency-triangle",
            reference: "π = η(π_D⁺) = image of Λ modulo the diagonal",
            sizes: 2..=6,
            default_samples: 200,
            tolerance: |t| t.tol_eq,
            run: suites::consistency_triangle,
        },
        Suite {
            id: "pi-leaf-rank",
            reference: "rank π on C ∩ BwB₋ = dim C − l(w) − dim(H/H_w) for regular semisimple C",
            sizes: 2..=3,
            default_samples: 20,
            tolerance: |_| 1e-8,
            run: suites::pi_leaf_rank,
        },
        Suite {
            id: "coisotropy",
            reference: "tU is coisotropic in (G, π) and Q_t is coisotropic in (D, π_D⁺)",
            sizes: 2..=6,
            default_samples: 100,
            tolerance: |t| t.tol_eq,
            run: suites::coisotropy,
        },
        Suite {
            id: "characteristic-directions",
            reference: "π_D⁺ maps the conormal bundle of Q_t onto the B_Δ-orbit directions",
            sizes: 2..=6,
            default_samples: 50,
            tolerance: |t| t.tol_eq / 10.0,
            run: suites::characteristic_directions,
        },
        Suite {
            id: "flag-fixed-points",
            reference: "π_G/B vanishes at u·B for every u ∈ W",
            sizes: 2..=6,
            default_samples: 1,
            tolerance: |_| 1e-12,
            run: suites::flag_fixed_points,
        },
        Suite {
            id: "mu-q-poisson",
            reference: "μ: (X, Π) → (G, π) and q: (X, Π) → (G/B, π_G/B) are Poisson; σ preserves Π",
            sizes: 2..=4,
            default_samples: 200,
            tolerance: |_| 1e-8,
            run: suites::mu_q_poisson,
        },
        Suite {
            id: "xt-poisson-submanifold",
            reference: "X_t has dimension dim G − r and is a Poisson submanifold of (X, Π)",
            sizes: 2..=4,
            default_samples: 100,
            tolerance: |t| t.tol_eq,
            run: suites::xt_poisson_submanifold,
        },
        Suite {
            id: "sl2-resolution-charts",
            reference: "SL(2) charts of G ×_B B: {x₁,y₁} = h₁ + x₁y₁, {x₂,y₂} = −(1/h₂ + x₂y₂); Π has rank 0 on X_{t,w₀}, 2 on X_{t,1}",
            sizes: 2..=2,
            default_samples: 100,
            tolerance: |t| t.tol_eq,
            run: suites::sl2_resolution_charts,
        },
        Suite {
            id: "resolution-leaf-rank",
            reference: "rank Π on X_{t,w} = dim G − r − l(w) − dim(H/H_w)",
            sizes: 2..=4,
            default_samples: 5,
            tolerance: |t| t.tol_eq,
            run: suites::resolution_leaf_rank,
        },
        Suite {
            id: "subregular-intersection",
            reference: "SL(3): the G*-orbit through hẇ₀ meets the unipotent variety in two subregular points",
            sizes: 3..=3,
            default_samples: 20,
            tolerance: |t| t.tol_eq,
            run: suites::subregular_intersection,
        },
        Suite {
            id: "steinberg-cubic-chart",
            reference: "SL(3): the unipotent variety in the chart of Bw₀ is singular exactly on a = 2, b = c = 0",
            sizes: 3..=3,
            default_samples: 20,
            tolerance: |t| t.tol_eq / 10.0,
            run: suites::cubic_chart,
        },
        Suite {
            id: "steinberg-casimirs",
            reference: "the fundamental characters are Casimirs of π",
            sizes: 2..=6,
            default_samples: 20,
            tolerance: |t| t.tol_eq,
            run: suites::casimirs,
        },
        Suite {
            id: "steinberg-regularity",
            reference: "the regular unipotent class is regular, the subregular one is not; F_w(t) = F_t",
            sizes: 2..=6,
            default_samples: 20,
            tolerance: |t| t.tol_eq,
            run: suites::regular_classes,
        },
        Suite {
            id: "xi-round-trip",
            reference: "ξ and ξ⁻¹ are mutually inverse on U ∩ B₋w₀B₋",
            sizes: 2..=6,
            default_samples: 100,
            tolerance: |t| t.tol_eq / 10.0,
            run: suites::xi_round_trip,
        },
        Suite {
            id: "jk-round-trip",
            reference: "J^u_t and K^u_t are inverse and parametrize X^u_{t,w₀}",
            sizes: 2..=4,
            default_samples: 10,
            tolerance: |t| t.tol_eq / 10.0,
            run: suites::jk_round_trip,
        },
        Suite {
            id: "rho-strata",
            reference: "ρ lands in X_{t,w}; μρ lands in F_t ∩ BwB₋, so F_{t,w} is nonempty",
            sizes: 2..=4,
            default_samples: 5,
            tolerance: |t| t.tol_eq,
            run: suites::rho_strata,
        },
        Suite {
            id: "rho-poisson",
            reference: "ρ: (G^{e,w⁻¹w₀} × G^{e,w₀}, π_G ⊕ π_G) → (X_{t,w}, Π) is Poisson",
            sizes: 2..=3,
            default_samples: 3,
            tolerance: |t| t.tol_fd,
            run: suites::rho_poisson,
        },
        Suite {
            id: "rho-injectivity",
            reference: "ρ is injective: distinct seeded chart points have distinct images",
            sizes: 2..=3,
            default_samples: 50,
            tolerance: |t| t.tol_eq,
            run: suites::rho_injectivity,
        },
        Suite {
            id: "determinism",
            reference: "reports are byte-identical across reruns with the same seed",
            sizes: 2..=6,
            default_samples: 10,
            tolerance: |_| 0.5,
            run: determinism,
        },
    ];
    REGISTRY
}

pub fn find(id: &str) -> Result<&'static Suite> {
    registry().iter().find(|s| s.id == id).ok_or_else(|| LabError::UnknownSuite(id.into()))
}

/// Reruns a cheap suite twice and compares the serialized reports.
fn determinism(ctx: &SuiteCtx) -> Result<CheckSummary> {
    let mut s = CheckSummary::new(ctx.tolerance);
    let cfg = SuiteConfig {
        group_n: ctx.n,
        samples: Some(ctx.samples),
        seed: ctx.seed,
        suites: vec!["consistency-triangle".into(), "pi-g-vanishes-on-torus".into()],
        ..SuiteConfig::default()
    };
    let a = serde_json::to_string(&run_suites(&cfg)?).map_err(|e| LabError::Parse(e.to_string()))?;
    let b = serde_json::to_string(&run_suites(&cfg)?).map_err(|e| LabError::Parse(e.to_string()))?;
    s.integer(1, i64::from(a == b));
    s.samples = 2;
    Ok(s)
}

fn selected(config: &SuiteConfig) -> Result<Vec<&'static Suite>> {
    let n = config.group_n;
    let mut want = vec![false; registry().len()];
    for id in &config.suites {
        if id == "all" {
            for (k, s) in registry().iter().enumerate() {
                want[k] |= s.sizes.contains(&n);
            }
            continue;
        }
        let k = registry().iter().position(|s| s.id == id).ok_or_else(|| LabError::UnknownSuite(id.clone()))?;
        let s = &registry()[k];
        if !s.sizes.contains(&n) {
            return Err(LabError::ConfigInvalid(format!("suite `{}` runs for n in {:?}, not n = {n}", s.id, s.sizes)));
        }
        want[k] = true;
    }
    Ok(registry().iter().zip(want).filter(|(_, w)| *w).map(|(s, _)| s).collect())
}

fn run_one(suite: &Suite, config: &SuiteConfig) -> VerificationReport {
    let tolerance = config.suite_tolerances.get(suite.id).copied().unwrap_or_else(|| (suite.tolerance)(&config.tolerances));
    let ctx = SuiteCtx {
        n: config.group_n,
        samples: config.samples.unwrap_or(suite.default_samples),
        seed: crate::rng::derive_seed(config.seed, &[crate::rng::tag(suite.id)]),
        tolerance,
    };
    let start = Instant::now();
    // A panicking suite fails on its own without taking the others down.
    let out = std::panic::catch_unwind(|| (suite.run)(&ctx)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(LabError::ConfigInvalid(format!("suite panicked: {}", msg.unwrap_or_default())))
    });
    let mut r = VerificationReport::from_summary(suite, config.group_n, config.seed, tolerance, out);
    if config.timings {
        r.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    r
}

/// Runs the requested suites (in parallel) and returns their reports in
/// registry order.
pub fn run_suites(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    config.validate()?;
    let chosen = selected(config)?;
    Ok(chosen.par_iter().map(|s| run_one(s, config)).collect())
}

/// Thread count from POISSON_LAB_THREADS, if set to a positive integer.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(LabError::ConfigInvalid(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Runs `f` inside a pool capped by POISSON_LAB_THREADS.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = thread_cap()? {
        b = b.num_threads(k);
    }
    let pool = b.build().map_err(|e| LabError::ConfigInvalid(e.to_string()))?;
    Ok(pool.install(f))
}

// ------------------------------------------------------------------ CLI

#[derive(Parser, Debug)]
#[command(name = "poisson-lab", version, about = "Sampled checks of Poisson structures on SL(n, C)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run verification suites and report.
    Verify(VerifyArgs),
    /// Brackets of all pairs of matrix entries at a point.
    BracketTable(BracketArgs),
    /// Bruhat cell (B w B₋) and double Bruhat cell of a matrix.
    Bruhat(MatrixArg),
    /// Steinberg map and regularity of a matrix.
    Steinberg(SteinbergArgs),
    /// μ, Bruhat cell, torus part and rank of Π at a point [g, b].
    Resolve(ResolveArgs),
    /// Seeded points of X_{t,w} from ρ, with membership checks.
    RhoSample(RhoArgs),
    /// List the registered suites.
    Suites,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Suite ids, comma-separated or repeated; `all` selects every suite
    /// that applies to n.
    #[arg(long = "suite", value_delimiter = ',')]
    suites: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall time in reports.
    #[arg(long)]
    timings: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Structure {
    /// The conjugation-covariant structure π.
    Pi,
    /// The multiplicative structure π_G.
    PiG,
}

#[derive(Args, Debug)]
struct BracketArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum, default_value = "pi")]
    structure: Structure,
}

#[derive(Args, Debug)]
struct MatrixArg {
    #[arg(long)]
    matrix: PathBuf,
}

#[derive(Args, Debug)]
struct SteinbergArgs {
    #[arg(long)]
    matrix: PathBuf,
    /// Torus element whose fiber F_t the matrix is tested against.
    #[arg(long)]
    t: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ResolveArgs {
    #[arg(long)]
    point: PathBuf,
}

#[derive(Args, Debug)]
struct RhoArgs {
    #[arg(long)]
    n: usize,
    /// Weyl element: reduced word ("s1 s2") or one-line permutation ("2 1 3").
    #[arg(long)]
    w: String,
    #[arg(long)]
    t: PathBuf,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = with_thread_cap(|| dispatch(cli.cmd)).and_then(|r| r);
    match out {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                LabError::Parse(_) | LabError::ConfigInvalid(_) | LabError::UnknownSuite(_) | LabError::DimensionMismatch(_) => 2,
                _ => 1,
            }
        }
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn dispatch(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Verify(a) => verify(a),
        Cmd::BracketTable(a) => bracket_table(a),
        Cmd::Bruhat(a) => bruhat(a),
        Cmd::Steinberg(a) => steinberg_cmd(a),
        Cmd::Resolve(a) => resolve(a),
        Cmd::RhoSample(a) => rho_sample(a),
        Cmd::Suites => {
            for s in registry() {
                println!("{:<28} n ∈ {}..={}  {}", s.id, s.sizes.start(), s.sizes.end(), s.reference);
            }
            Ok(true)
        }
    }
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let mut cfg: SuiteConfig = match &a.config {
        Some(p) => serde_json::from_value(io::read_json(p)?).map_err(|e| LabError::ConfigInvalid(format!("{}: {e}", p.display())))?,
        None => SuiteConfig::default(),
    };
    if let Some(n) = a.n {
        cfg.group_n = n;
    }
    if !a.suites.is_empty() {
        cfg.suites = a.suites;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.samples.is_some() {
        cfg.samples = a.samples;
    }
    cfg.timings |= a.timings;
    let reports = run_suites(&cfg)?;
    for r in &reports {
        let res = r.max_residual.map_or("non-finite".to_string(), |v| format!("{v:.3e}"));
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!("{status} {:<28} n={} samples={} max_residual={res} tol={:.0e}", r.suite, r.n, r.samples, r.tolerance);
        if let Some(e) = &r.error {
            println!("     error: {e}");
        }
    }
    if let Some(p) = &a.out {
        let text = serde_json::to_string_pretty(&reports).map_err(|e| LabError::Parse(e.to_string()))?;
        std::fs::write(p, text + "\n").map_err(|e| LabError::ConfigInvalid(format!("{}: {e}", p.display())))?;
    }
    Ok(reports.iter().all(VerificationReport::passed))
}

fn read_group_element(path: &std::path::Path) -> Result<linalg::CMat> {
    let g = io::read_matrix(path)?;
    if !matgroup::is_in_sl(&g, tol::DET) {
        return Err(LabError::Parse(format!("{}: matrix is not in SL(n)", path.display())));
    }
    Ok(g)
}

fn entry_name(i: usize, j: usize) -> String {
    format!("g{}{}", i + 1, j + 1)
}

fn bracket_table(a: BracketArgs) -> Result<bool> {
    let g = read_group_element(&a.matrix)?;
    let n = g.nrows();
    let lie = LieData::new(RootDatum::new(n));
    let (name, p) = match a.structure {
        Structure::Pi => ("pi", bivector::pi_at(&lie, &g)),
        Structure::PiG => ("pi_g", bivector::pi_g_at(&lie, &g)),
    };
    let pt = [g.clone()];
    let entries: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut rows = vec![];
    for (k, &(i, j)) in entries.iter().enumerate() {
        for &(r, c) in &entries[k + 1..] {
            let v = bivector::bracket(&p, &pt, &bivector::CoordFn::entry(i, j), &bivector::CoordFn::entry(r, c));
            rows.push(json!({ "f": entry_name(i, j), "g": entry_name(r, c), "value": [v.re, v.im] }));
        }
    }
    print_json(&json!({ "structure": name, "n": n, "point": io::matrix_to_json(&g), "brackets": rows }));
    Ok(true)
}

fn weyl_json(w: &WeylElement) -> Value {
    json!({ "word": w.word_string(), "one_line": w.one_line(), "length": w.length })
}

fn bruhat(a: MatrixArg) -> Result<bool> {
    let g = read_group_element(&a.matrix)?;
    let w = matgroup::bruhat_cell(&g)?;
    let (u, v) = matgroup::double_bruhat(&g)?;
    print_json(&json!({ "w": weyl_json(&w), "double_bruhat": { "u": weyl_json(&u), "v": weyl_json(&v) } }));
    Ok(true)
}

fn steinberg_cmd(a: SteinbergArgs) -> Result<bool> {
    let g = read_group_element(&a.matrix)?;
    let z = steinberg::chi(&g);
    let regular = steinberg::is_regular(&g)?;
    let matched = match &a.t {
        Some(p) => Some(steinberg::same_fiber(&g, &io::torus_from_json(&io::read_json(p)?)?)),
        None => None,
    };
    let chi: Vec<[f64; 2]> = z.values.iter().map(|c| [c.re, c.im]).collect();
    print_json(&json!({ "chi": chi, "regular": regular, "fiber_of_torus_match": matched }));
    Ok(matched.unwrap_or(true))
}

fn resolve(a: ResolveArgs) -> Result<bool> {
    let p = io::point_from_json(&io::read_json(&a.point)?)?;
    let n = p.n();
    if !matgroup::is_in_sl(&p.g, tol::DET) || !matgroup::is_in_sl(&p.b, tol::DET) {
        return Err(LabError::Parse("g and b must lie in SL(n)".into()));
    }
    let lie = LieData::new(RootDatum::new(n));
    let m = grothendieck::mu(&p);
    let cell = matgroup::bruhat_cell(&m)?;
    let rank = bivector::rank_of(&grothendieck::Pi_at(&lie, &p))?;
    let torus: Vec<[f64; 2]> = p.torus_part().iter().map(|c| [c.re, c.im]).collect();
    print_json(&json!({ "mu": io::matrix_to_json(&m), "bruhat_cell": weyl_json(&cell), "torus_part": torus, "pi_rank": rank }));
    Ok(true)
}

fn rho_sample(a: RhoArgs) -> Result<bool> {
    if !(2..=6).contains(&a.n) {
        return Err(LabError::ConfigInvalid(format!("n = {} is outside 2..=6", a.n)));
    }
    let w = WeylElement::parse(&a.w, a.n)?;
    let t = io::torus_from_json(&io::read_json(&a.t)?)?;
    if t.nrows() != a.n || !matgroup::is_in_sl(&t, tol::DET) {
        return Err(LabError::Parse(format!("t must be a diagonal element of SL({})", a.n)));
    }
    let td = linalg::diagonal_of(&t);
    let mut all_ok = true;
    let mut out = vec![];
    for k in 0..a.count {
        let smp = birational::sample_rho(&w, &t, crate::rng::derive_seed(a.seed, &[k as u64]))?;
        let m = grothendieck::mu(&smp.point);
        let in_xtw = grothendieck::is_in_xtw(&smp.point, &td, &w)?;
        let fiber = steinberg::same_fiber(&m, &t);
        let cell = matgroup::bruhat_cell(&m)? == w;
        all_ok &= in_xtw && fiber && cell;
        out.push(json!({
            "g1": io::matrix_to_json(&smp.g1),
            "g2": io::matrix_to_json(&smp.g2),
            "point": io::point_to_json(&smp.point),
            "mu": io::matrix_to_json(&m),
            "checks": { "in_xtw": in_xtw, "mu_in_fiber": fiber, "mu_in_cell": cell },
        }));
    }
    print_json(&json!({ "n": a.n, "w": weyl_json(&w), "seed": a.seed, "samples": out }));
    Ok(all_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: usize, suites: &[&str], seed: u64) -> SuiteConfig {
        SuiteConfig { group_n: n, seed, suites: suites.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    #[test]
    fn same_seed_same_report() {
        let cfg = config(2, &["sl2-bracket-tables"], 42);
        let a = serde_json::to_string(&run_suites(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suites(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let other = serde_json::to_string(&run_suites(&config(2, &["sl2-bracket-tables"], 43)).unwrap()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn all_runs_every_applicable_suite_in_order() {
        let mut cfg = config(2, &["all"], 1);
        cfg.samples = Some(2);
        let ids: Vec<String> = run_suites(&cfg).unwrap().into_iter().map(|r| r.suite).collect();
        let want: Vec<String> = registry().iter().filter(|s| s.sizes.contains(&2)).map(|s| s.id.to_string()).collect();
        assert_eq!(ids, want);
    }

    #[test]
    fn bad_requests_are_rejected() {
        assert!(matches!(run_suites(&config(2, &["nope"], 0)), Err(LabError::UnknownSuite(_))));
        assert!(matches!(run_suites(&config(2, &["subregular-intersection"], 0)), Err(LabError::ConfigInvalid(_))));
        assert!(matches!(run_suites(&config(7, &["all"], 0)), Err(LabError::ConfigInvalid(_))));
        let mut cfg = config(2, &["all"], 0);
        cfg.tolerances.tol_eq = -1.0;
        assert!(cfg.validate().is_err());
        cfg = config(2, &["all"], 0);
        cfg.suite_tolerances.insert("nope".into(), 1e-3);
        assert!(cfg.validate().is_err());
        assert!(serde_json::from_str::<SuiteConfig>(r#"{"group_n": 2, "bogus": 1}"#).is_err());
    }

    #[test]
    fn registry_is_well_formed() {
        let mut seen = std::collections::BTreeSet::new();
        for s in registry() {
            assert!(!s.reference.is_empty(), "{}", s.id);
            assert!(seen.insert(s.id), "duplicate {}", s.id);
            assert!(*s.sizes.start() >= 2 && *s.sizes.end() <= 6);
            assert!(s.default_samples > 0);
        }
    }

    #[test]
    fn timings_are_opt_in() {
        let mut cfg = config(2, &["pi-g-vanishes-on-torus"], 0);
        let r = &run_suites(&cfg).unwrap()[0];
        assert!(r.wall_time_s.is_none());
        assert!(!serde_json::to_string(r).unwrap().contains("wall_time_s"));
        cfg.timings = true;
        assert!(run_suites(&cfg).unwrap()[0].wall_time_s.is_some());
    }

    #[test]
    fn thread_cap_is_validated() {
        std::env::set_var(THREADS_ENV, "0");
        assert!(thread_cap().is_err());
        std::env::set_var(THREADS_ENV, "2");
        assert_eq!(thread_cap().unwrap(), Some(2));
        std::env::remove_var(THREADS_ENV);
        assert_eq!(thread_cap().unwrap(), None);
    }
}
