//! Matrix N-dilations of factorizable unital quantum channels.
//!
//! A unital quantum channel `q` on a finite unital matrix *-algebra `A` is
//! *matrix factorizable* when there is a unitary `U` in `A ⊗ B` with
//!
//! ```text
//! q(X) ⊗ I = (id ⊗ tr_B)(U (X ⊗ I) U*)
//! ```
//!
//! For every such factorization and every `N`, the *-automorphism
//! `α_N = Ad(U ⊗ I) ∘ σ_N` of `A ⊗ B^{⊗N}`, where `σ_N` cyclically shifts the
//! `N` environment factors, compresses to `q^M` for every `1 ≤ M ≤ N`. This
//! crate builds those objects numerically and verifies them:
//!
//! - [`algebra`]: direct sums of full matrix blocks with weighted traces,
//!   tensor products, partial traces, conditional expectations.
//! - [`channel`]: Kraus-form channels, Choi matrices, duals, composition,
//!   minimal Kraus sets and Kraus-set equivalence.
//! - [`factorization`]: unitary factorizations and the standard families
//!   (DFT blocks, random unitary channels, Schur product channels, Clifford
//!   factorizations of real correlation matrices).
//! - [`dilation`]: the N-dilation itself and its verification.
//! - [`gns`]: representing contractions on `L²(A)`.
//! - [`unitary_dilation`]: Julia and Egerváry dilations of contractions.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod channel;
pub mod dilation;
pub mod error;
pub mod factorization;
pub mod gns;
pub mod linalg;
pub mod random;
pub mod unitary_dilation;

pub use algebra::{AlgebraElement, MatrixAlgebra, TraceDensity};
pub use channel::{Channel, ChoiMatrix};
pub use dilation::NDilation;
pub use error::{Error, Result};
pub use factorization::{CorrelationMatrix, UnitaryFactorization};
pub use gns::RepContraction;
pub use linalg::CMatrix;

/// Scalar comparison tolerance.
pub const SCALAR_TOL: f64 = 1e-10;

/// Relative eigenvalue threshold used for every numerical rank decision.
pub const RANK_TOL: f64 = 1e-8;

/// Frobenius-norm tolerance for matrix comparisons in concrete dimension `d`.
pub fn matrix_tol(d: usize) -> f64 {
    1e-9 * num_traits::Float::sqrt(d as f64)
}
