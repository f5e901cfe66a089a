//! Seeded random matrices: Ginibre ensembles, Haar unitaries, contractions,
//! channels and real correlation matrices.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::MatrixAlgebra;
use crate::factorization::{self, CorrelationMatrix, UnitaryFactorization};
use crate::linalg::{self, CMatrix};

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// `n × n` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    ginibre_rect(n, n, rng)
}

pub fn ginibre_rect<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(n, rng).qr();
    let mut q = qr.q();
    let rr = qr.r();
    for j in 0..n {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `V diag(s) W*` with Haar `V, W` and singular values uniform in `[0, 1)`.
pub fn random_contraction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let s: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let v = haar_unitary(n, rng);
    let w = haar_unitary(n, rng);
    v * linalg::diag_real(&s) * w.adjoint()
}

/// Channel on `C^{n×n}` read off a Haar unitary on `C^n ⊗ C^m`.
pub fn random_factorization<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    rng: &mut R,
) -> UnitaryFactorization {
    let u = haar_unitary(n * m, rng);
    factorization::factorization_from_unitary(&u, &MatrixAlgebra::full(n), &MatrixAlgebra::full(m))
        .expect("Haar unitaries always factorize")
}

/// Real correlation matrix `GᵀG` with `G` a `p × n` Gaussian matrix whose
/// columns are normalized; `p` is drawn from `1..=n`.
pub fn random_real_correlation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CorrelationMatrix {
    let p = rng.random_range(1..=n);
    let mut g = DMatrix::<f64>::from_fn(p, n, |_, _| rng.sample(StandardNormal));
    for j in 0..n {
        let norm = g.column(j).norm();
        for i in 0..p {
            g[(i, j)] /= norm;
        }
    }
    let mut cm = g.transpose() * &g;
    for i in 0..n {
        cm[(i, i)] = 1.0;
    }
    let cm = CMatrix::from_fn(n, n, |i, j| Complex64::new(cm[(i, j)], 0.0));
    CorrelationMatrix::new(cm).expect("Gram matrices of unit vectors are correlations")
}
