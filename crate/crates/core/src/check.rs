//! Outcome of a sampled check, shared by the modules and the harness.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    /// Integer equalities (expected, observed) that must all hold.
    pub integers: Vec<(i64, i64)>,
    /// Lower bounds that must be exceeded (negative controls).
    pub controls: Vec<(f64, f64)>,
    pub notes: Vec<String>,
}

impl CheckSummary {
    pub fn new(tolerance: f64) -> Self {
        CheckSummary { samples: 0, max_residual: 0.0, tolerance, integers: vec![], controls: vec![], notes: vec![] }
    }

    pub fn residual(&mut self, r: f64) {
        // NaN must fail the check rather than vanish in a max.
        if r.is_nan() || r > self.max_residual {
            self.max_residual = if r.is_nan() { f64::INFINITY } else { r };
        }
    }

    pub fn integer(&mut self, expected: i64, observed: i64) {
        self.integers.push((expected, observed));
    }

    /// Records a negative control: `observed` must exceed `floor`.
    pub fn control(&mut self, observed: f64, floor: f64) {
        self.controls.push((observed, floor));
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn merge(&mut self, other: CheckSummary) {
        self.samples += other.samples;
        self.residual(other.max_residual);
        self.integers.extend(other.integers);
        self.controls.extend(other.controls);
        self.notes.extend(other.notes);
    }

    pub fn passed(&self) -> bool {
        self.max_residual < self.tolerance
            && self.integers.iter().all(|(e, o)| e == o)
            && self.controls.iter().all(|(o, f)| o > f)
    }

    pub fn first_mismatch(&self) -> Option<(i64, i64)> {
        self.integers.iter().copied().find(|(e, o)| e != o)
    }
}
