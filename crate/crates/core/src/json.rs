//! JSON wire formats.
//!
//! A complex matrix is `{"rows": m, "cols": n, "data": [[re, im], ...]}` in
//! row-major order; a complex scalar is a `[re, im]` pair.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::CMat;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMat> for MatrixJson {
    fn from(m: &CMat) -> Self {
        let (rows, cols) = m.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let z = m[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        MatrixJson { rows, cols, data }
    }
}

impl TryFrom<MatrixJson> for CMat {
    type Error = String;

    fn try_from(j: MatrixJson) -> Result<Self, Self::Error> {
        if j.data.len() != j.rows * j.cols {
            return Err(format!(
                "matrix data has {} entries, expected {}x{} = {}",
                j.data.len(),
                j.rows,
                j.cols,
                j.rows * j.cols
            ));
        }
        if j.data.iter().flatten().any(|v| !v.is_finite()) {
            return Err("matrix data contains non-finite entries".into());
        }
        Ok(CMat::from_fn(j.rows, j.cols, |r, c| {
            let [re, im] = j.data[r * j.cols + c];
            Complex64::new(re, im)
        }))
    }
}

/// `#[serde(with = "crate::json::cmat")]` adapter.
pub mod cmat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        CMat::try_from(j).map_err(serde::de::Error::custom)
    }
}

pub mod cmat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[CMat], s: S) -> Result<S::Ok, S::Error> {
        let js: Vec<MatrixJson> = ms.iter().map(MatrixJson::from).collect();
        js.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMat>, D::Error> {
        let js = Vec::<MatrixJson>::deserialize(d)?;
        js.into_iter()
            .map(|j| CMat::try_from(j).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect())
    }
}
