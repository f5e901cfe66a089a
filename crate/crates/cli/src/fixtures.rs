//! Named scenarios covering the standard examples.

use matdil_core::linalg::{self, CMatrix};

use crate::format::{self, AlgebraJson, BlockJson, MatrixJson};
use crate::scenario::{ChannelSpec, DepolarizingFactorization, Scenario};

fn real_matrix(rows: &[&[f64]]) -> MatrixJson {
    rows.iter()
        .map(|r| r.iter().map(|&x| [x, 0.0]).collect())
        .collect()
}

fn full(n: usize) -> AlgebraJson {
    AlgebraJson {
        blocks: vec![BlockJson {
            dim: n,
            weight: 1.0,
        }],
    }
}

pub fn builtin_fixtures() -> Vec<Scenario> {
    let paulis: Vec<MatrixJson> = linalg::paulis()
        .iter()
        .map(format::matrix_to_json)
        .collect();
    let id2: CMatrix = linalg::identity(2);
    let h = 0.5;
    vec![
        Scenario::new(
            "depolarizing-swap",
            ChannelSpec::Depolarizing {
                n: 2,
                factorization: DepolarizingFactorization::Swap,
            },
            4,
        ),
        Scenario::new(
            "depolarizing-pauli",
            ChannelSpec::Depolarizing {
                n: 2,
                factorization: DepolarizingFactorization::Pauli,
            },
            4,
        ),
        Scenario::new("dft-2-2", ChannelSpec::Dft { n: 2, m: 2 }, 4),
        Scenario::new("dft-2-3", ChannelSpec::Dft { n: 2, m: 3 }, 3),
        Scenario::new(
            "random-unitary-pauli",
            ChannelSpec::RandomUnitary {
                unitaries: Some(paulis),
                probs: vec![0.1, 0.2, 0.3, 0.4],
                haar_dim: None,
            },
            3,
        ),
        Scenario::new(
            "random-unitary-haar3",
            ChannelSpec::RandomUnitary {
                unitaries: None,
                probs: vec![0.2, 0.3, 0.5],
                haar_dim: Some(2),
            },
            4,
        ),
        // unit vectors at angles 0, π/3, 2π/3 in the plane: rank 2
        Scenario::new(
            "schur-real-2",
            ChannelSpec::Schur {
                c: real_matrix(&[&[1.0, h, -h], &[h, 1.0, h], &[-h, h, 1.0]]),
            },
            3,
        ),
        Scenario {
            bridge_steps: Some(1),
            ..Scenario::new(
                "schur-dephasing",
                ChannelSpec::Schur {
                    c: real_matrix(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]),
                },
                2,
            )
        },
        Scenario::new(
            "identity",
            ChannelSpec::Kraus {
                algebra: full(2),
                kraus: vec![vec![format::matrix_to_json(&id2)]],
                unitary: Some(format::matrix_to_json(&linalg::identity(4))),
                environment: Some(full(2)),
            },
            3,
        ),
    ]
}

pub fn fixture(name: &str) -> Option<Scenario> {
    builtin_fixtures().into_iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn fixtures_are_valid_and_uniquely_named() {
        let all = builtin_fixtures();
        assert!(all.len() >= 8);
        let names: HashSet<&str> = all.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names.len(), all.len());
        for s in &all {
            s.check(&s.name).unwrap();
        }
        assert!(fixture("dft-2-3").is_some());
        assert!(fixture("nope").is_none());
    }
}
