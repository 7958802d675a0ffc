//! JSON forms of matrices, resolution points and bivectors.
//!
//! A matrix is a row-major array of rows, each entry a `[re, im]` pair. On
//! input a flat row-major list of pairs (square length) is accepted as
//! well, and plain numbers stand for real entries.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bivector::Bivector;
use crate::error::{LabError, Result};
use crate::grothendieck::GrothendieckPoint;
use crate::linalg::CMat;

fn entry_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn entry_from_json(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(x) => Ok(Complex64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(p) if p.len() == 2 => {
            let re = p[0].as_f64().ok_or_else(|| LabError::Parse(format!("bad real part {}", p[0])))?;
            let im = p[1].as_f64().ok_or_else(|| LabError::Parse(format!("bad imaginary part {}", p[1])))?;
            Ok(Complex64::new(re, im))
        }
        other => Err(LabError::Parse(format!("expected a number or [re, im], got {other}"))),
    }
}

pub fn matrix_to_json(m: &CMat) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| entry_to_json(m[(i, j)])).collect())).collect())
}

/// Columns of `m` as a list of vectors, each entry a `[re, im]` pair.
pub fn columns_to_json(m: &CMat) -> Value {
    Value::Array((0..m.ncols()).map(|j| Value::Array((0..m.nrows()).map(|i| entry_to_json(m[(i, j)])).collect())).collect())
}

/// Reads a square matrix. Nested rows win when they form a square;
/// otherwise the array is read as a flat row-major list of entries.
pub fn matrix_from_json(v: &Value) -> Result<CMat> {
    let items = v.as_array().ok_or_else(|| LabError::Parse("matrix must be a JSON array".into()))?;
    if items.is_empty() {
        return Err(LabError::Parse("empty matrix".into()));
    }
    let k = items.len();
    let nested = items.iter().all(|r| r.as_array().is_some_and(|r| r.len() == k));
    if nested {
        let mut m = CMat::zeros(k, k);
        for (i, r) in items.iter().enumerate() {
            for (j, e) in r.as_array().into_iter().flatten().enumerate() {
                m[(i, j)] = entry_from_json(e)?;
            }
        }
        return Ok(m);
    }
    let n = (k as f64).sqrt().round() as usize;
    if n * n != k {
        return Err(LabError::Parse(format!("matrix with {k} entries or rows is not square")));
    }
    let vals = items.iter().map(entry_from_json).collect::<Result<Vec<_>>>()?;
    Ok(CMat::from_row_slice(n, n, &vals))
}

pub fn point_to_json(p: &GrothendieckPoint) -> Value {
    json!({ "g": matrix_to_json(&p.g), "b": matrix_to_json(&p.b) })
}

pub fn point_from_json(v: &Value) -> Result<GrothendieckPoint> {
    let get = |k: &str| v.get(k).ok_or_else(|| LabError::Parse(format!("point is missing \"{k}\"")));
    GrothendieckPoint::new(matrix_from_json(get("g")?)?, matrix_from_json(get("b")?)?)
}

pub fn bivector_to_json(b: &Bivector) -> Value {
    json!({ "frame_basis": columns_to_json(&b.frame.basis), "matrix": matrix_to_json(&b.mat) })
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| LabError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<CMat> {
    matrix_from_json(&read_json(path)?)
}

/// A torus element, given as a diagonal matrix or as a list of real
/// diagonal entries.
pub fn torus_from_json(v: &Value) -> Result<CMat> {
    let m = match v.as_array() {
        Some(items) if items.iter().all(Value::is_number) => {
            crate::linalg::diag(&items.iter().map(entry_from_json).collect::<Result<Vec<_>>>()?)
        }
        _ => matrix_from_json(v)?,
    };
    if !crate::linalg::is_upper(&m, 0.0) || !crate::linalg::is_lower(&m, 0.0) {
        return Err(LabError::Parse("torus element must be diagonal".into()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::{sample_borel, sample_sl};
    use crate::rng;

    #[test]
    fn matrices_round_trip() {
        let g = sample_sl(3, &mut rng::rng_for(1, &[]));
        let back = matrix_from_json(&matrix_to_json(&g)).unwrap();
        assert_eq!(back, g);
        let text = serde_json::to_string(&matrix_to_json(&g)).unwrap();
        assert_eq!(matrix_from_json(&serde_json::from_str(&text).unwrap()).unwrap(), g);
    }

    #[test]
    fn accepted_shapes() {
        let id = CMat::identity(2, 2);
        assert_eq!(matrix_from_json(&json!([[1, 0], [0, 1]])).unwrap(), id);
        assert_eq!(matrix_from_json(&json!([[[1, 0], [0, 0]], [[0, 0], [1, 0]]])).unwrap(), id);
        assert_eq!(matrix_from_json(&json!([[1, 0], [0, 0], [0, 0], [1, 0]])).unwrap(), id);
        assert!(matrix_from_json(&json!([[1, 0], [0]])).is_err());
        assert!(matrix_from_json(&json!("x")).is_err());
    }

    #[test]
    fn points_round_trip() {
        let mut r = rng::rng_for(2, &[]);
        let p = GrothendieckPoint::new(sample_sl(3, &mut r), sample_borel(3, &mut r)).unwrap();
        let q = point_from_json(&point_to_json(&p)).unwrap();
        assert_eq!((q.g, q.b), (p.g, p.b));
        assert!(point_from_json(&json!({ "g": [[1, 0], [0, 1]], "b": [[1, 0], [1, 1]] })).is_err());
    }

    #[test]
    fn torus_inputs() {
        let t = torus_from_json(&json!([2, 0.5])).unwrap();
        assert_eq!(t, crate::linalg::diag(&[Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0)]));
        assert_eq!(torus_from_json(&json!([[2, 0], [0, 0.5]])).unwrap(), t);
        assert!(torus_from_json(&json!([[2, 1], [0, 0.5]])).is_err());
    }
}
