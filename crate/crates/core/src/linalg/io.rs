//! JSON matrix and vector files: `{"dim": n, "rows": [[[re, im], ...], ...]}`
//! and `{"dim": n, "entries": [[re, im], ...]}`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{c64, CMatrix, CVector};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub rows: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let n = file.dim;
    if file.rows.len() != n {
        return Err(Error::Format(format!(
            "dim is {n} but {} rows were given",
            file.rows.len()
        )));
    }
    if let Some((i, row)) = file.rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Format(format!(
            "row {i} has {} entries, expected {n}",
            row.len()
        )));
    }
    CMatrix::new(DMatrix::from_fn(n, n, |i, j| {
        let [re, im] = file.rows[i][j];
        c64(re, im)
    }))
}

pub fn matrix_to_json(a: &CMatrix) -> String {
    let n = a.dim();
    let file = MatrixFile {
        dim: n,
        rows: (0..n)
            .map(|i| (0..n).map(|j| [a.get(i, j).re, a.get(i, j).im]).collect())
            .collect(),
    };
    serde_json::to_string(&file).expect("matrix serialization")
}

pub fn vector_from_json(text: &str) -> Result<CVector> {
    let file: VectorFile =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.entries.len() != file.dim {
        return Err(Error::Format(format!(
            "dim is {} but {} entries were given",
            file.dim,
            file.entries.len()
        )));
    }
    CVector::new(DVector::from_iterator(
        file.dim,
        file.entries.iter().map(|&[re, im]| c64(re, im)),
    ))
}

pub fn vector_to_json(v: &CVector) -> String {
    let file = VectorFile {
        dim: v.dim(),
        entries: v.as_vector().iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string(&file).expect("vector serialization")
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}

pub fn read_vector(path: &Path) -> Result<CVector> {
    vector_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_matrix(path: &Path, a: &CMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_json(a))?;
    Ok(())
}
