//! JSON interchange formats.
//!
//! A matrix is `{"n": 2, "entries": [[[q0,q1,q2,q3], ...], ...]}` with
//! `entries[i][j]` the `(i, j)` quaternion. Sample files are JSON arrays of
//! matrices. Floats are written in shortest round-trip form and parsed with
//! correct rounding, so every written matrix re-reads bit-identically.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gaussian::PsiTable;
use crate::inference::FitResult;
use crate::manifold::SpdQMatrix;
use crate::qmatrix::QMatrix;
use crate::quaternion::Quaternion;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("{context}: {source}")]
    Json { context: String, source: serde_json::Error },
    #[error("{context}: {source}")]
    Invalid { context: String, source: Error },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QMatrixRepr {
    pub n: usize,
    pub entries: Vec<Vec<Quaternion>>,
}

impl From<&QMatrix> for QMatrixRepr {
    fn from(m: &QMatrix) -> Self {
        Self { n: m.dim(), entries: m.rows().map(|r| r.to_vec()).collect() }
    }
}

impl TryFrom<QMatrixRepr> for QMatrix {
    type Error = Error;
    fn try_from(r: QMatrixRepr) -> Result<Self, Error> {
        if r.entries.len() != r.n {
            return Err(Error::DimensionMismatch { expected: r.n, found: r.entries.len() });
        }
        QMatrix::from_rows(&r.entries)
    }
}

impl Serialize for QMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QMatrixRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        QMatrix::try_from(QMatrixRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Serialize for SpdQMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpdQMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        SpdQMatrix::from_matrix(QMatrix::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// On-disk form of a [`FitResult`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub barycentre: QMatrix,
    pub eta_hat: f64,
    pub sigma_hat: f64,
    pub mean_sq_dist: f64,
    pub iterations: usize,
}

impl From<&FitResult> for FitReport {
    fn from(f: &FitResult) -> Self {
        Self {
            barycentre: f.barycentre.as_matrix().clone(),
            eta_hat: f.eta_hat,
            sigma_hat: f.sigma_hat,
            mean_sq_dist: f.mean_sq_dist,
            iterations: f.iterations,
        }
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, context: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|source| IoError::Json { context: context.to_string(), source })
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("interchange types always serialize")
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = to_json(value);
    text.push('\n');
    fs::write(path, text).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

pub fn read_qmatrix(path: &Path) -> Result<QMatrix, IoError> {
    parse(&read(path)?, &path.display().to_string())
}

/// Reads a matrix and admits it as positive-definite.
pub fn read_spd(path: &Path) -> Result<SpdQMatrix, IoError> {
    let m = read_qmatrix(path)?;
    SpdQMatrix::from_matrix(m).map_err(|source| IoError::Invalid { context: path.display().to_string(), source })
}

pub fn read_samples(path: &Path) -> Result<Vec<SpdQMatrix>, IoError> {
    let ctx = path.display().to_string();
    let raw: Vec<QMatrix> = parse(&read(path)?, &ctx)?;
    raw.into_iter()
        .enumerate()
        .map(|(i, m)| {
            SpdQMatrix::from_matrix(m).map_err(|source| IoError::Invalid { context: format!("{ctx}[{i}]"), source })
        })
        .collect()
}

pub fn read_psi_table(path: &Path) -> Result<PsiTable, IoError> {
    parse(&read(path)?, &path.display().to_string())
}
