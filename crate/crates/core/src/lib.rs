//! Numerical models of the standard Poisson structures on SL(n, ℂ), the
//! Grothendieck resolution G ×_B B and the Steinberg fibers, with the
//! machinery to check their properties by seeded sampling.

pub mod birational;
pub mod bivector;
pub mod check;
pub mod error;
pub mod grothendieck;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod matgroup;
pub mod rng;
pub mod rootdata;
pub mod steinberg;
pub mod suites;
pub mod tol;

pub use error::{LabError, Result};
