//! JSON shapes for matrices, algebras and algebra elements.
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs. Algebras are
//! `{"blocks": [{"dim": 2, "weight": 1.0}]}`; elements are one matrix per
//! block.

use matdil_core::linalg::{c, CMatrix};
use matdil_core::{AlgebraElement, MatrixAlgebra};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn matrix_from_json(m: &MatrixJson, location: &str) -> Result<CMatrix, CliError> {
    let rows = m.len();
    if rows == 0 {
        return Err(CliError::config(location, "matrix has no rows"));
    }
    let cols = m[0].len();
    if let Some(i) = m.iter().position(|row| row.len() != cols) {
        return Err(CliError::config(
            location,
            format!("row {i} has {} entries, expected {cols}", m[i].len()),
        ));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        c(m[i][j][0], m[i][j][1])
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub blocks: Vec<BlockJson>,
}

impl AlgebraJson {
    pub fn from_algebra(a: &MatrixAlgebra) -> Self {
        Self {
            blocks: a
                .blocks()
                .iter()
                .map(|b| BlockJson {
                    dim: b.dim,
                    weight: b.weight,
                })
                .collect(),
        }
    }

    pub fn to_algebra(&self, location: &str) -> Result<MatrixAlgebra, CliError> {
        let blocks: Vec<(usize, f64)> = self.blocks.iter().map(|b| (b.dim, b.weight)).collect();
        MatrixAlgebra::new(&blocks).map_err(|e| CliError::config(location, e.to_string()))
    }
}

pub type ElementJson = Vec<MatrixJson>;

pub fn element_to_json(x: &AlgebraElement) -> ElementJson {
    x.blocks.iter().map(matrix_to_json).collect()
}

pub fn element_from_json(
    a: &MatrixAlgebra,
    x: &ElementJson,
    location: &str,
) -> Result<AlgebraElement, CliError> {
    let blocks = x
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_json(m, &format!("{location}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    a.element(blocks)
        .map_err(|e| CliError::config(location, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_fn(2, 3, |i, j| c(i as f64 + 0.25, -(j as f64)));
        let json = matrix_to_json(&m);
        assert_eq!(json[1][2], [1.25, -2.0]);
        assert_eq!(matrix_from_json(&json, "m").unwrap(), m);
    }

    #[test]
    fn ragged_matrix_is_rejected() {
        let json: MatrixJson = vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[1.0, 0.0]]];
        let err = matrix_from_json(&json, "channel.kraus[0]").unwrap_err();
        assert!(err.to_string().contains("channel.kraus[0]"));
    }

    #[test]
    fn algebra_round_trip() {
        let a = MatrixAlgebra::new(&[(2, 0.5), (1, 0.5)]).unwrap();
        let json = AlgebraJson::from_algebra(&a);
        let text = serde_json::to_string(&json).unwrap();
        assert_eq!(
            text,
            r#"{"blocks":[{"dim":2,"weight":0.5},{"dim":1,"weight":0.5}]}"#
        );
        assert_eq!(json.to_algebra("a").unwrap(), a);
        let bad = AlgebraJson {
            blocks: vec![BlockJson {
                dim: 2,
                weight: 0.3,
            }],
        };
        assert!(bad.to_algebra("a").is_err());
    }
}
