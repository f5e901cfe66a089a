//! Dense complex linear algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Kronecker product `a ⊗ b` with the row index of `a` most significant.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.norm()
}

/// Frobenius distance, or infinity when the shapes differ.
pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    (a - b).norm()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `‖U*U − I‖_F + ‖UU* − I‖_F`, or infinity for non-square input.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let id = identity(u.nrows());
    let a = u.adjoint();
    (&a * u - &id).norm() + (u * &a - id).norm()
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    s
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Full singular value decomposition `m = U diag(s) V*`, sorted descending.
///
/// `U` is `rows × k` and `V` is `cols × cols` (padded so that right singular
/// vectors for the kernel are available even for wide matrices); `s` has
/// `min(rows, cols)` entries padded with zeros up to `cols`.
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let dec = padded.svd(true, true);
    let u_full = dec.u.expect("svd computes u");
    let v_t = dec.v_t.expect("svd computes v");
    let k = dec.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        dec.singular_values[b]
            .partial_cmp(&dec.singular_values[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut u = zeros(rows, k);
    let mut v = zeros(cols, k);
    let mut s = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        s.push(dec.singular_values[src]);
        for i in 0..rows {
            u[(i, dst)] = u_full[(i, src)];
        }
        for j in 0..cols {
            v[(j, dst)] = v_t[(src, j)].conj();
        }
    }
    Svd { u, s, v }
}

/// Hermitian eigendecomposition, eigenvalues in descending order.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    // symmetrize to absorb roundoff before the solver sees it
    let h = (m + m.adjoint()) * r(0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut vecs = zeros(n, n);
    let mut vals = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[src]);
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Square root of a positive semidefinite matrix; negative eigenvalues are
/// clamped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let n = m.nrows();
    let mut scaled = vecs.clone();
    for (j, &lam) in vals.iter().enumerate().take(n) {
        let s = lam.max(0.0).sqrt();
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    &scaled * vecs.adjoint()
}

/// Orthonormal basis (as columns) of the kernel of `m`: right singular vectors
/// whose singular value is at most `tol`.
pub fn null_space(m: &CMatrix, tol: f64) -> CMatrix {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return identity(cols);
    }
    let dec = svd(m);
    let keep: Vec<usize> = (0..cols)
        .filter(|&j| dec.s.get(j).copied().unwrap_or(0.0) <= tol)
        .collect();
    select_columns(&dec.v, &keep)
}

/// Orthonormal basis (as columns) of the range of `m`.
pub fn range_basis(m: &CMatrix, tol: f64) -> CMatrix {
    if m.ncols() == 0 {
        return zeros(m.nrows(), 0);
    }
    let dec = svd(m);
    let k = dec
        .s
        .iter()
        .take(m.nrows().min(m.ncols()))
        .filter(|&&s| s > tol)
        .count();
    let keep: Vec<usize> = (0..k).collect();
    select_columns(&dec.u, &keep)
}

pub fn select_columns(m: &CMatrix, cols: &[usize]) -> CMatrix {
    let mut out = zeros(m.nrows(), cols.len());
    for (dst, &src) in cols.iter().enumerate() {
        out.set_column(dst, &m.column(src));
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the column span of the
/// orthonormal columns `q`, inside `C^dim`.
pub fn complement(q: &CMatrix, dim: usize) -> CMatrix {
    if q.ncols() == 0 {
        return identity(dim);
    }
    null_space(&q.adjoint(), 1e-8)
}

/// Orthogonal projector onto the span of the orthonormal columns of `q`.
pub fn projector(q: &CMatrix, dim: usize) -> CMatrix {
    if q.ncols() == 0 {
        return zeros(dim, dim);
    }
    q * q.adjoint()
}

/// Sine of the largest principal angle between two subspaces given by
/// orthonormal columns. Subspaces of different dimension are at angle π/2.
pub fn subspace_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let dim = a.nrows();
    let residual = (identity(dim) - projector(a, dim)) * b;
    spectral_norm(&residual)
}

/// Intersection of two subspaces given by orthonormal columns.
pub fn intersection(a: &CMatrix, b: &CMatrix, tol: f64) -> CMatrix {
    let dim = a.nrows();
    let pa = identity(dim) - projector(a, dim);
    let pb = identity(dim) - projector(b, dim);
    let mut stacked = zeros(2 * dim, dim);
    stacked.view_mut((0, 0), (dim, dim)).copy_from(&pa);
    stacked.view_mut((dim, 0), (dim, dim)).copy_from(&pb);
    null_space(&stacked, tol)
}

/// Numerical rank with threshold `rel_tol · s_max`.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

/// Row-major vectorization: entry `(i, j)` goes to position `i·cols + j`.
pub fn vec_row_major(m: &CMatrix) -> CVector {
    let (rows, cols) = m.shape();
    CVector::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
}

pub fn unvec_row_major(v: &[Complex64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

pub fn diag_real(d: &[f64]) -> CMatrix {
    let n = d.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { r(d[i]) } else { r(0.0) })
}

pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = zeros(n, n);
    m[(i, j)] = r(1.0);
    m
}

/// Pauli matrices in the order `I, σ_x, σ_y, σ_z`.
pub fn paulis() -> [CMatrix; 4] {
    let z = r(0.0);
    let o = r(1.0);
    let i = c(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Computes `(u ⊗ I_r) x` for `u` of size `k × k` and `x` with `k·r` rows,
/// without materializing the Kronecker product.
pub fn left_mul_kron_identity(u: &CMatrix, r_dim: usize, x: &CMatrix) -> CMatrix {
    let k = u.nrows();
    let cols = x.ncols();
    debug_assert_eq!(x.nrows(), k * r_dim);
    let mut out = zeros(k * r_dim, cols);
    let mut sub = zeros(k, cols);
    for t in 0..r_dim {
        for s in 0..k {
            sub.set_row(s, &x.row(s * r_dim + t));
        }
        let prod = u * &sub;
        for s in 0..k {
            out.set_row(s * r_dim + t, &prod.row(s));
        }
    }
    out
}

/// Computes `(u ⊗ I_r) x (u ⊗ I_r)*`.
pub fn conjugate_kron_identity(u: &CMatrix, r_dim: usize, x: &CMatrix) -> CMatrix {
    let y = left_mul_kron_identity(u, r_dim, x);
    left_mul_kron_identity(u, r_dim, &y.adjoint()).adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_identity_shortcut_matches_dense() {
        let u = CMatrix::from_fn(3, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let x = CMatrix::from_fn(6, 6, |i, j| c((i * j) as f64, i as f64 - j as f64));
        let dense = kron(&u, &identity(2));
        assert!(distance(&left_mul_kron_identity(&u, 2, &x), &(&dense * &x)) < 1e-12);
        let conj = &dense * &x * dense.adjoint();
        assert!(distance(&conjugate_kron_identity(&u, 2, &x), &conj) < 1e-9);
    }

    #[test]
    fn svd_gives_kernel_of_wide_matrix() {
        let m = CMatrix::from_row_slice(1, 3, &[r(1.0), r(1.0), r(0.0)]);
        let ker = null_space(&m, 1e-10);
        assert_eq!(ker.ncols(), 2);
        assert!((&m * &ker).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_is_sorted_and_complex_safe() {
        let [_, _, y, z] = paulis();
        let h = &y + &z * r(2.0);
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals[0] >= vals[1]);
        assert!((vals[0] - 5.0f64.sqrt()).abs() < 1e-12);
        let recon = &vecs * diag_real(&vals) * vecs.adjoint();
        assert!(distance(&recon, &h) < 1e-12);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = CMatrix::from_row_slice(2, 2, &[r(2.0), c(0.0, 1.0), c(0.0, -1.0), r(2.0)]);
        let s = psd_sqrt(&m);
        assert!(distance(&(&s * &s), &m) < 1e-12);
    }

    #[test]
    fn intersection_and_angle() {
        let e = identity(3);
        let a = select_columns(&e, &[0, 1]);
        let b = select_columns(&e, &[1, 2]);
        let both = intersection(&a, &b, 1e-9);
        assert_eq!(both.ncols(), 1);
        assert!((both[(1, 0)].norm() - 1.0).abs() < 1e-12);
        assert!(subspace_angle(&a, &a) < 1e-12);
        assert!((subspace_angle(&a, &b) - 1.0).abs() < 1e-12);
    }
}
