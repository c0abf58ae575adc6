//! Instance files: a diffable JSON format with entries as [re, im] pairs,
//! lossless for every finite double, plus content digests.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::error::{GammaError, Result};
use crate::gamma::{Certificate, GammaTuple};
use crate::matrixkit::{zeros, CMatrix};

pub type MatrixData = Vec<Vec<[f64; 2]>>;

fn matrix_to_data(m: &CMatrix) -> MatrixData {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn data_to_matrix(data: &MatrixData, n: usize, what: &str) -> Result<CMatrix> {
    if data.len() != n {
        return Err(GammaError::Parse(format!(
            "{what}: expected {n} rows, found {}",
            data.len()
        )));
    }
    let mut m = zeros(n, n);
    for (i, row) in data.iter().enumerate() {
        if row.len() != n {
            return Err(GammaError::Parse(format!(
                "{what}: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(GammaError::Parse(format!(
                    "{what}: non-finite entry at ({i}, {j})"
                )));
            }
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

/// On-disk form of a tuple instance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "S")]
    pub s: Vec<MatrixData>,
    #[serde(rename = "P")]
    pub p: MatrixData,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn from_tuple(t: &GammaTuple) -> Self {
        let certificate = match t.certificate() {
            Certificate::Constructed(src) => Some(format!("constructed:{src}")),
            Certificate::NecessaryChecksOnly => None,
        };
        Self {
            d: t.d(),
            n: t.n(),
            s: t.s().iter().map(matrix_to_data).collect(),
            p: matrix_to_data(t.p()),
            certificate,
            seed: None,
        }
    }

    pub fn from_tuple_with_seed(t: &GammaTuple, seed: u64) -> Self {
        let mut f = Self::from_tuple(t);
        f.seed = Some(seed);
        f
    }

    /// Reconstructs the tuple, re-running the invariant gates (shape and
    /// finiteness as parse errors; commutation and contractivity as their
    /// named errors).
    pub fn to_tuple(&self, tol: f64) -> Result<GammaTuple> {
        if self.d < 2 {
            return Err(GammaError::Parse(format!("d must be >= 2, found {}", self.d)));
        }
        if self.s.len() != self.d - 1 {
            return Err(GammaError::Parse(format!(
                "expected {} S-matrices for d = {}, found {}",
                self.d - 1,
                self.d,
                self.s.len()
            )));
        }
        let s = self
            .s
            .iter()
            .enumerate()
            .map(|(i, data)| data_to_matrix(data, self.n, &format!("S_{}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let p = data_to_matrix(&self.p, self.n, "P")?;
        let certificate = match &self.certificate {
            Some(tag) => match tag.strip_prefix("constructed:") {
                Some(src) => Certificate::Constructed(src.to_string()),
                None => Certificate::NecessaryChecksOnly,
            },
            None => Certificate::NecessaryChecksOnly,
        };
        GammaTuple::new(s, p, certificate, tol)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable struct")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GammaError::Parse(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// SHA-256 of the compact canonical serialization.
    pub fn digest(&self) -> String {
        let compact = serde_json::to_string(self).expect("serializable struct");
        let mut hasher = Sha256::new();
        hasher.update(compact.as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect()
    }
}
