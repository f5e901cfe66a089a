//! Finite unital matrix *-algebras `A = ⊕ C^{n_i × n_i}` with a faithful
//! normalized trace `tr(X) = Σ w_i Tr(X_i) / n_i`.
//!
//! Elements are stored block by block. Two concrete pictures are used:
//!
//! - the *block-diagonal* picture, where an element of `A` is the `d × d`
//!   block-diagonal matrix `diag(X_1, …, X_k)` with `d = Σ n_i`;
//! - the *Kronecker* picture for tensor products, where `A ⊗ B` lives inside
//!   `C^{d_A} ⊗ C^{d_B}` with the `A` index most significant.
//!
//! [`tensor_algebra`] lists the blocks of `A ⊗ B` lexicographically in the
//! block pair `(i, j)`; [`kron_block_indices`] maps those blocks into the
//! Kronecker picture.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, r, CMatrix};

const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub dim: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixAlgebra {
    blocks: Vec<Block>,
}

/// Position of a matrix unit: block index and row/column inside the block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitIndex {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl MatrixAlgebra {
    /// Builds `⊕ C^{n_i × n_i}` with explicit trace weights, which must be
    /// positive and sum to one.
    pub fn new(blocks: &[(usize, f64)]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("no blocks".into()));
        }
        for (i, &(dim, weight)) in blocks.iter().enumerate() {
            if dim == 0 {
                return Err(Error::InvalidAlgebra(format!("block {i} has dimension 0")));
            }
            if !weight.is_finite() || weight <= 0.0 {
                return Err(Error::InvalidAlgebra(format!(
                    "block {i} has nonpositive weight {weight}"
                )));
            }
        }
        let total: f64 = blocks.iter().map(|b| b.1).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidAlgebra(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self {
            blocks: blocks
                .iter()
                .map(|&(dim, weight)| Block { dim, weight })
                .collect(),
        })
    }

    /// Weights `n_i / Σ n_j`: the restriction of the normalized trace of the
    /// enveloping `C^{d × d}`.
    pub fn with_default_weights(dims: &[usize]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidAlgebra("block of dimension 0".into()));
        }
        let total: usize = dims.iter().sum();
        let blocks: Vec<(usize, f64)> =
            dims.iter().map(|&d| (d, d as f64 / total as f64)).collect();
        Self::new(&blocks)
    }

    /// The full matrix algebra `C^{n × n}` with its normalized trace.
    pub fn full(n: usize) -> Self {
        assert!(n > 0, "full matrix algebra needs n >= 1");
        Self {
            blocks: vec![Block {
                dim: n,
                weight: 1.0,
            }],
        }
    }

    /// Diagonal algebra `C ⊕ … ⊕ C` with `tr(diag(b)) = Σ p_k b_k`.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let blocks: Vec<(usize, f64)> = weights.iter().map(|&w| (1, w)).collect();
        Self::new(&blocks)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// `d = Σ n_i`.
    pub fn concrete_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    /// `Σ n_i²`, the dimension of `L²(A)`.
    pub fn gns_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// Dimension of a full single-block algebra, if this is one.
    pub fn full_block_dim(&self) -> Option<usize> {
        match self.blocks.as_slice() {
            [b] => Some(b.dim),
            _ => None,
        }
    }

    /// Start of each block along the diagonal of the block-diagonal picture.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.blocks
            .iter()
            .map(|b| {
                let o = off;
                off += b.dim;
                o
            })
            .collect()
    }

    /// Value of `tr(E_jj)` for a diagonal matrix unit of block `i`.
    pub fn unit_weight(&self, block: usize) -> f64 {
        let b = self.blocks[block];
        b.weight / b.dim as f64
    }

    pub fn identity(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self
                .blocks
                .iter()
                .map(|b| linalg::identity(b.dim))
                .collect(),
        }
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            blocks: self
                .blocks
                .iter()
                .map(|b| linalg::zeros(b.dim, b.dim))
                .collect(),
        }
    }

    pub fn check(&self, x: &AlgebraElement) -> Result<()> {
        if x.blocks.len() != self.blocks.len() {
            return Err(Error::ShapeMismatch(format!(
                "element has {} blocks, algebra has {}",
                x.blocks.len(),
                self.blocks.len()
            )));
        }
        for (i, (m, b)) in x.blocks.iter().zip(&self.blocks).enumerate() {
            if m.shape() != (b.dim, b.dim) {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} is {:?}, expected {}x{}",
                    m.shape(),
                    b.dim,
                    b.dim
                )));
            }
        }
        Ok(())
    }

    pub fn element(&self, blocks: Vec<CMatrix>) -> Result<AlgebraElement> {
        let x = AlgebraElement { blocks };
        self.check(&x)?;
        Ok(x)
    }

    /// Reads the diagonal blocks of a `d × d` matrix, rejecting it if any
    /// off-block entry exceeds `tol`.
    pub fn element_from_concrete(&self, m: &CMatrix, tol: f64) -> Result<AlgebraElement> {
        let d = self.concrete_dim();
        if m.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!(
                "expected {d}x{d}, got {:?}",
                m.shape()
            )));
        }
        let x = self.project_concrete(m);
        let off = linalg::distance(&x.to_concrete(), m);
        if off > tol {
            return Err(Error::ShapeMismatch(format!(
                "matrix has off-block mass {off:e}; not in the algebra"
            )));
        }
        Ok(x)
    }

    /// Keeps only the diagonal blocks of a `d × d` matrix.
    pub fn project_concrete(&self, m: &CMatrix) -> AlgebraElement {
        let blocks = self
            .blocks
            .iter()
            .zip(self.block_offsets())
            .map(|(b, o)| m.view((o, o), (b.dim, b.dim)).into_owned())
            .collect();
        AlgebraElement { blocks }
    }

    /// `tr(X) = Σ w_i Tr(X_i) / n_i`.
    pub fn trace(&self, x: &AlgebraElement) -> Result<Complex64> {
        self.check(x)?;
        Ok(self.trace_unchecked(x))
    }

    pub(crate) fn trace_unchecked(&self, x: &AlgebraElement) -> Complex64 {
        self.blocks
            .iter()
            .zip(&x.blocks)
            .map(|(b, m)| m.trace() * (b.weight / b.dim as f64))
            .sum()
    }

    /// `⟨X, Y⟩ = tr(X* Y)`, conjugate-linear in `X`.
    pub fn inner_product(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<Complex64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.inner_unchecked(x, y))
    }

    pub(crate) fn inner_unchecked(&self, x: &AlgebraElement, y: &AlgebraElement) -> Complex64 {
        self.blocks
            .iter()
            .zip(x.blocks.iter().zip(&y.blocks))
            .map(|(b, (xm, ym))| xm.dotc(ym) * (b.weight / b.dim as f64))
            .sum()
    }

    /// GNS norm `tr(X* X)^{1/2}`.
    pub fn gns_norm(&self, x: &AlgebraElement) -> f64 {
        self.inner_unchecked(x, x).re.max(0.0).sqrt()
    }

    /// Matrix units `E_{jk}` of every block, row-major within a block and
    /// blocks in order.
    pub fn matrix_units(&self) -> Vec<AlgebraElement> {
        self.unit_indices()
            .into_iter()
            .map(|u| self.unit(u))
            .collect()
    }

    pub fn unit_indices(&self) -> Vec<UnitIndex> {
        let mut out = Vec::with_capacity(self.gns_dim());
        for (block, b) in self.blocks.iter().enumerate() {
            for row in 0..b.dim {
                for col in 0..b.dim {
                    out.push(UnitIndex { block, row, col });
                }
            }
        }
        out
    }

    pub fn unit(&self, idx: UnitIndex) -> AlgebraElement {
        let mut x = self.zero();
        x.blocks[idx.block][(idx.row, idx.col)] = r(1.0);
        x
    }

    pub fn density(&self) -> TraceDensity {
        TraceDensity {
            algebra: self.clone(),
        }
    }

    /// Diagonal of the trace density in the block-diagonal picture.
    pub fn density_diagonal(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|b| core::iter::repeat_n(b.weight / b.dim as f64, b.dim))
            .collect()
    }

    /// Element with i.i.d. standard complex Gaussian entries in every block.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgebraElement {
        AlgebraElement {
            blocks: self
                .blocks
                .iter()
                .map(|b| crate::random::ginibre(b.dim, rng))
                .collect(),
        }
    }
}

/// An element of a [`MatrixAlgebra`], one dense matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub blocks: Vec<CMatrix>,
}

impl AlgebraElement {
    /// Block-diagonal `d × d` embedding.
    pub fn to_concrete(&self) -> CMatrix {
        let d: usize = self.blocks.iter().map(|m| m.nrows()).sum();
        let mut out = linalg::zeros(d, d);
        let mut off = 0;
        for m in &self.blocks {
            let n = m.nrows();
            out.view_mut((off, off), (n, n)).copy_from(m);
            off += n;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self {
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|a| a * s).collect(),
        }
    }

    /// Unnormalized Frobenius norm of the concrete embedding.
    pub fn frobenius(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| m.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        if self.blocks.len() != other.blocks.len() {
            return f64::INFINITY;
        }
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let d = linalg::distance(a, b);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// The trace of a [`MatrixAlgebra`] realized as a block-diagonal density
/// `ρ = ⊕ (w_i / n_i) I`, so that `tr(X) = Tr(ρ X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceDensity {
    algebra: MatrixAlgebra,
}

impl TraceDensity {
    pub fn to_concrete(&self) -> CMatrix {
        linalg::diag_real(&self.algebra.density_diagonal())
    }

    pub fn trace(&self, x: &AlgebraElement) -> Complex64 {
        (self.to_concrete() * x.to_concrete()).trace()
    }
}

/// Blocks `(n_i m_j, w_i v_j)` in lexicographic order of `(i, j)`.
pub fn tensor_algebra(a: &MatrixAlgebra, b: &MatrixAlgebra) -> MatrixAlgebra {
    let mut blocks = Vec::with_capacity(a.blocks.len() * b.blocks.len());
    for x in &a.blocks {
        for y in &b.blocks {
            blocks.push(Block {
                dim: x.dim * y.dim,
                weight: x.weight * y.weight,
            });
        }
    }
    MatrixAlgebra { blocks }
}

/// `X ⊗ Y` in `A ⊗ B`: block `(i, j)` is the Kronecker product `X_i ⊗ Y_j`.
pub fn tensor_element(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    let mut blocks = Vec::with_capacity(x.blocks.len() * y.blocks.len());
    for xm in &x.blocks {
        for ym in &y.blocks {
            blocks.push(linalg::kron(xm, ym));
        }
    }
    AlgebraElement { blocks }
}

/// For the tensor product of `factors`, the Kronecker-picture indices of each
/// block of the iterated [`tensor_algebra`], local index order preserved.
pub fn kron_block_indices(factors: &[&MatrixAlgebra]) -> Vec<Vec<usize>> {
    let mut acc: Vec<Vec<usize>> = vec![vec![0]];
    let mut acc_dim = 1;
    for f in factors {
        let fd = f.concrete_dim();
        let mut next = Vec::with_capacity(acc.len() * f.num_blocks());
        for idx in &acc {
            for (b, off) in f.blocks.iter().zip(f.block_offsets()) {
                let mut block = Vec::with_capacity(idx.len() * b.dim);
                for &x in idx {
                    for y in 0..b.dim {
                        block.push(x * fd + off + y);
                    }
                }
                next.push(block);
            }
        }
        acc = next;
        acc_dim *= fd;
    }
    debug_assert!(acc.iter().all(|b| b.iter().all(|&i| i < acc_dim)));
    acc
}

/// Places an element of the tensor product of `factors` into the Kronecker
/// picture.
pub fn tensor_to_kron(factors: &[&MatrixAlgebra], x: &AlgebraElement) -> CMatrix {
    let d: usize = factors.iter().map(|f| f.concrete_dim()).product();
    let mut out = linalg::zeros(d, d);
    for (idx, m) in kron_block_indices(factors).iter().zip(&x.blocks) {
        for (li, &gi) in idx.iter().enumerate() {
            for (lj, &gj) in idx.iter().enumerate() {
                out[(gi, gj)] = m[(li, lj)];
            }
        }
    }
    out
}

/// Reads the blocks of the tensor product of `factors` out of a
/// Kronecker-picture matrix; entries outside the blocks are ignored.
pub fn kron_to_tensor(factors: &[&MatrixAlgebra], m: &CMatrix) -> AlgebraElement {
    let blocks = kron_block_indices(factors)
        .iter()
        .map(|idx| {
            let n = idx.len();
            CMatrix::from_fn(n, n, |i, j| m[(idx[i], idx[j])])
        })
        .collect();
    AlgebraElement { blocks }
}

/// Diagonal of the trace density of the tensor product of `factors` in the
/// Kronecker picture.
pub fn kron_density(factors: &[&MatrixAlgebra]) -> Vec<f64> {
    let mut acc = vec![1.0];
    for f in factors {
        let d = f.density_diagonal();
        acc = acc
            .iter()
            .flat_map(|&a| d.iter().map(move |&b| a * b))
            .collect();
    }
    acc
}

/// Contracts the second tensor factor of a Kronecker-picture matrix on
/// `C^{d_a} ⊗ C^{d_b}` against the diagonal density `rho_b`:
/// `out[a, a'] = Σ_b ρ_b X[(a,b), (a',b)]`.
pub fn partial_trace_kron(x: &CMatrix, d_a: usize, rho_b: &[f64]) -> CMatrix {
    let d_b = rho_b.len();
    debug_assert_eq!(x.nrows(), d_a * d_b);
    CMatrix::from_fn(d_a, d_a, |i, j| {
        rho_b
            .iter()
            .enumerate()
            .map(|(b, &w)| x[(i * d_b + b, j * d_b + b)] * w)
            .sum()
    })
}

/// `id_A ⊗ tr_B`: the partial trace of `A ⊗ B` onto `A`.
pub fn partial_trace(
    a: &MatrixAlgebra,
    b: &MatrixAlgebra,
    x: &AlgebraElement,
) -> Result<AlgebraElement> {
    tensor_algebra(a, b).check(x)?;
    let m = tensor_to_kron(&[a, b], x);
    let reduced = partial_trace_kron(&m, a.concrete_dim(), &b.density_diagonal());
    Ok(a.project_concrete(&reduced))
}

/// The trace-preserving conditional expectation of `A ⊗ B` onto `A ⊗ I_B`.
pub fn conditional_expectation(
    a: &MatrixAlgebra,
    b: &MatrixAlgebra,
    x: &AlgebraElement,
) -> Result<AlgebraElement> {
    let reduced = partial_trace(a, b, x)?;
    Ok(tensor_element(&reduced, &b.identity()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, matrix_unit};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m2() -> MatrixAlgebra {
        MatrixAlgebra::full(2)
    }

    fn e(i: usize, j: usize) -> AlgebraElement {
        AlgebraElement {
            blocks: vec![matrix_unit(2, i, j)],
        }
    }

    #[test]
    fn construction_validates() {
        assert!(MatrixAlgebra::new(&[(2, 1.0)]).is_ok());
        assert!(MatrixAlgebra::new(&[(0, 1.0)]).is_err());
        assert!(MatrixAlgebra::new(&[(2, -1.0), (1, 2.0)]).is_err());
        assert!(MatrixAlgebra::new(&[(2, 0.5), (1, 0.6)]).is_err());
        let diag = MatrixAlgebra::diagonal(&[0.25; 4]).unwrap();
        assert_eq!(diag.num_blocks(), 4);
        assert_eq!(diag.concrete_dim(), 4);
        let def = MatrixAlgebra::with_default_weights(&[2, 1]).unwrap();
        assert!((def.blocks()[0].weight - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn trace_examples() {
        let a = m2();
        assert!((a.trace(&a.identity()).unwrap() - r(1.0)).norm() < 1e-15);
        assert!((a.trace(&e(0, 0)).unwrap() - r(0.5)).norm() < 1e-15);
        let p = MatrixAlgebra::diagonal(&[0.3, 0.7]).unwrap();
        let x = p
            .element(vec![
                CMatrix::from_element(1, 1, r(1.0)),
                CMatrix::zeros(1, 1),
            ])
            .unwrap();
        assert!((p.trace(&x).unwrap() - r(0.3)).norm() < 1e-15);
        assert!(a.trace(&p.identity()).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let a = m2();
        assert!((a.inner_product(&a.identity(), &a.identity()).unwrap() - r(1.0)).norm() < 1e-15);
        assert!(a.inner_product(&e(0, 0), &e(0, 1)).unwrap().norm() < 1e-15);
        assert!((a.inner_product(&e(0, 1), &e(0, 1)).unwrap() - r(0.5)).norm() < 1e-15);
        // conjugate-linear in the first slot
        let i = c(0.0, 1.0);
        let lhs = a.inner_product(&e(0, 0).scale(i), &e(0, 0)).unwrap();
        assert!((lhs - c(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn tensor_blocks_are_lexicographic() {
        let t = tensor_algebra(&m2(), &m2());
        assert_eq!(
            t.blocks(),
            &[Block {
                dim: 4,
                weight: 1.0
            }]
        );
        let n2 = MatrixAlgebra::diagonal(&[0.25; 4]).unwrap();
        let t = tensor_algebra(&m2(), &n2);
        assert_eq!(t.num_blocks(), 4);
        assert!(t
            .blocks()
            .iter()
            .all(|b| b.dim == 2 && (b.weight - 0.25).abs() < 1e-15));
        let mixed = MatrixAlgebra::new(&[(2, 0.4), (1, 0.6)]).unwrap();
        let t = tensor_algebra(&mixed, &MatrixAlgebra::new(&[(1, 0.5), (3, 0.5)]).unwrap());
        let dims: Vec<usize> = t.blocks().iter().map(|b| b.dim).collect();
        assert_eq!(dims, vec![2, 6, 1, 3]);
    }

    #[test]
    fn partial_trace_of_swapped_product() {
        let a = m2();
        let swap = CMatrix::from_fn(4, 4, |i, j| {
            let (a1, b1) = (i / 2, i % 2);
            let (a2, b2) = (j / 2, j % 2);
            r(if a1 == b2 && b1 == a2 { 1.0 } else { 0.0 })
        });
        let x = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), r(2.0), c(0.0, -1.0), r(3.0)]);
        let xi = linalg::kron(&x, &linalg::identity(2));
        let conj = &swap * xi * swap.adjoint();
        let t = tensor_algebra(&a, &a);
        let el = t.element_from_concrete(&conj, 1e-12).unwrap();
        let out = partial_trace(&a, &a, &el).unwrap();
        let expected = linalg::identity(2) * (x.trace() * 0.5);
        assert!(linalg::distance(&out.blocks[0], &expected) < 1e-14);
    }

    #[test]
    fn kron_picture_round_trip_for_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = MatrixAlgebra::new(&[(2, 0.4), (1, 0.6)]).unwrap();
        let b = MatrixAlgebra::new(&[(1, 0.5), (2, 0.5)]).unwrap();
        let x = a.random_element(&mut rng);
        let y = b.random_element(&mut rng);
        let t = tensor_element(&x, &y);
        let k = tensor_to_kron(&[&a, &b], &t);
        // Kronecker picture of X ⊗ Y is the Kronecker product of the concrete embeddings
        assert!(linalg::distance(&k, &linalg::kron(&x.to_concrete(), &y.to_concrete())) < 1e-13);
        assert_eq!(kron_to_tensor(&[&a, &b], &k), t);
    }

    #[test]
    fn density_realizes_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = MatrixAlgebra::new(&[(2, 0.2), (3, 0.5), (1, 0.3)]).unwrap();
        let x = a.random_element(&mut rng);
        let via_density = a.density().trace(&x);
        assert!((via_density - a.trace(&x).unwrap()).norm() < 1e-14);
    }
}
