//! Unital quantum channels in Kraus form, `q(X) = Σ q_k X q_k*`.
//!
//! Kraus sets are not unique, so channel identity is decided on the Choi
//! matrix `C_q = Σ_{ij} E_ij ⊗ q(E_ij)` of the enveloping `C^{d×d}` map.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{AlgebraElement, MatrixAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, r, CMatrix};
use crate::{matrix_tol, RANK_TOL};

/// Residuals of the three channel conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelValidation {
    /// `‖Σ q_k q_k* − I‖_F`
    pub unital_residual: f64,
    /// `‖Σ q_k* q_k − I‖_F`
    pub tp_residual: f64,
    pub choi_min_eigenvalue: f64,
    pub choi_max_eigenvalue: f64,
}

impl ChannelValidation {
    pub fn is_unital(&self, tol: f64) -> bool {
        self.unital_residual <= tol
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        self.tp_residual <= tol
    }

    pub fn is_completely_positive(&self, tol: f64) -> bool {
        self.choi_min_eigenvalue >= -tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    domain: MatrixAlgebra,
    kraus: Vec<AlgebraElement>,
}

/// Checks unitality, trace preservation and complete positivity of a Kraus
/// set without building a [`Channel`].
pub fn validate(domain: &MatrixAlgebra, kraus: &[AlgebraElement]) -> Result<ChannelValidation> {
    if kraus.is_empty() {
        return Err(Error::EmptyKraus);
    }
    for k in kraus {
        domain.check(k)?;
    }
    let mut qq = domain.zero();
    let mut qsq = domain.zero();
    for k in kraus {
        qq = qq.add(&k.mul(&k.adjoint()));
        qsq = qsq.add(&k.adjoint().mul(k));
    }
    let id = domain.identity();
    let choi = choi_from_kraus(domain.concrete_dim(), kraus.iter().map(|k| k.to_concrete()));
    let eig = linalg::hermitian_eigenvalues(&choi.matrix);
    Ok(ChannelValidation {
        unital_residual: qq.distance(&id),
        tp_residual: qsq.distance(&id),
        choi_min_eigenvalue: eig.last().copied().unwrap_or(0.0),
        choi_max_eigenvalue: eig.first().copied().unwrap_or(0.0),
    })
}

impl Channel {
    /// Validated construction: the Kraus set must be unital, trace-preserving
    /// and (trivially, but checked on the Choi matrix) completely positive.
    pub fn new(domain: MatrixAlgebra, kraus: Vec<AlgebraElement>) -> Result<Self> {
        let v = validate(&domain, &kraus)?;
        let d = domain.concrete_dim();
        let tol = matrix_tol(d);
        if !v.is_unital(tol) {
            return Err(Error::UnitalViolation {
                residual: v.unital_residual,
            });
        }
        if !v.is_trace_preserving(tol) {
            return Err(Error::TpViolation {
                residual: v.tp_residual,
            });
        }
        if !v.is_completely_positive(matrix_tol(d * d)) {
            return Err(Error::CpViolation {
                min_eigenvalue: v.choi_min_eigenvalue,
            });
        }
        Ok(Self { domain, kraus })
    }

    /// Kraus operators given as plain matrices on a full block `C^{n×n}`.
    pub fn from_matrices(kraus: Vec<CMatrix>) -> Result<Self> {
        let n = kraus.first().ok_or(Error::EmptyKraus)?.nrows();
        let domain = MatrixAlgebra::full(n);
        let kraus = kraus
            .into_iter()
            .map(|m| domain.element(alloc::vec![m]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, kraus)
    }

    pub(crate) fn from_parts_unchecked(domain: MatrixAlgebra, kraus: Vec<AlgebraElement>) -> Self {
        Self { domain, kraus }
    }

    pub fn identity(domain: MatrixAlgebra) -> Self {
        let id = domain.identity();
        Self {
            domain,
            kraus: alloc::vec![id],
        }
    }

    /// `Ad_V` for a unitary `V` in the domain.
    pub fn automorphism(domain: MatrixAlgebra, v: AlgebraElement) -> Result<Self> {
        Self::new(domain, alloc::vec![v])
    }

    /// The completely depolarizing channel `X ↦ tr(X) I` on `C^{n×n}`, with
    /// Kraus operators `E_ij / √n`.
    pub fn depolarizing(n: usize) -> Self {
        let domain = MatrixAlgebra::full(n);
        let s = r(1.0 / (n as f64).sqrt());
        let kraus = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| AlgebraElement {
                blocks: alloc::vec![linalg::matrix_unit(n, i, j) * s],
            })
            .collect();
        Self { domain, kraus }
    }

    /// `X ↦ diag(X)` on `C^{n×n}`: the conditional expectation onto the
    /// diagonal subalgebra.
    pub fn dephasing(n: usize) -> Self {
        let domain = MatrixAlgebra::full(n);
        let kraus = (0..n)
            .map(|i| AlgebraElement {
                blocks: alloc::vec![linalg::matrix_unit(n, i, i)],
            })
            .collect();
        Self { domain, kraus }
    }

    pub fn domain(&self) -> &MatrixAlgebra {
        &self.domain
    }

    pub fn kraus(&self) -> &[AlgebraElement] {
        &self.kraus
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    pub fn validation(&self) -> ChannelValidation {
        validate(&self.domain, &self.kraus).expect("channel holds a checked Kraus set")
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.domain.check(x)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &AlgebraElement) -> AlgebraElement {
        let mut out = self.domain.zero();
        for k in &self.kraus {
            for ((o, q), xm) in out.blocks.iter_mut().zip(&k.blocks).zip(&x.blocks) {
                *o += q * xm * q.adjoint();
            }
        }
        out
    }

    /// `q^{(M)}(X)`; `M = 0` is the identity.
    pub fn apply_power(&self, x: &AlgebraElement, m: usize) -> Result<AlgebraElement> {
        self.domain.check(x)?;
        let mut y = x.clone();
        for _ in 0..m {
            y = self.apply_unchecked(&y);
        }
        Ok(y)
    }

    /// Applies the Kraus formula to an arbitrary `d × d` matrix of the
    /// enveloping algebra.
    pub fn apply_concrete(&self, x: &CMatrix) -> CMatrix {
        let d = self.domain.concrete_dim();
        let mut out = linalg::zeros(d, d);
        for k in &self.kraus {
            let q = k.to_concrete();
            out += &q * x * q.adjoint();
        }
        out
    }

    /// Tracial dual `q†` with Kraus set `{q_k*}`.
    pub fn dual(&self) -> Self {
        Self {
            domain: self.domain.clone(),
            kraus: self.kraus.iter().map(|k| k.adjoint()).collect(),
        }
    }

    /// `self ∘ first`, reduced to a minimal Kraus set.
    pub fn compose(&self, first: &Channel) -> Result<Self> {
        if self.domain != first.domain {
            return Err(Error::DomainMismatch);
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * first.kraus.len());
        for a in &self.kraus {
            for b in &first.kraus {
                kraus.push(a.mul(b));
            }
        }
        Ok(Self {
            domain: self.domain.clone(),
            kraus,
        }
        .minimal_kraus())
    }

    /// `M`-fold self-composition.
    pub fn power(&self, m: usize) -> Result<Self> {
        let mut acc = Channel::identity(self.domain.clone());
        for _ in 0..m {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    pub fn choi_matrix(&self) -> ChoiMatrix {
        choi_from_kraus(
            self.domain.concrete_dim(),
            self.kraus.iter().map(|k| k.to_concrete()),
        )
    }

    /// Linearly independent Kraus set of size `rank(C_q)`, read off the
    /// Choi eigenvectors.
    pub fn minimal_kraus(&self) -> Self {
        let d = self.domain.concrete_dim();
        let choi = self.choi_matrix();
        let (vals, vecs) = linalg::hermitian_eigen(&choi.matrix);
        let top = vals.first().copied().unwrap_or(0.0).max(0.0);
        let mut kraus = Vec::new();
        for (l, &lam) in vals.iter().enumerate() {
            if lam <= RANK_TOL * top {
                break;
            }
            let s = lam.sqrt();
            // Choi index (i, a) ↦ Kraus entry (a, i)
            let k = CMatrix::from_fn(d, d, |a, i| vecs[(i * d + a, l)] * s);
            kraus.push(self.domain.project_concrete(&k));
        }
        Self {
            domain: self.domain.clone(),
            kraus,
        }
    }

    /// Frobenius distance between Choi matrices.
    pub fn choi_distance(&self, other: &Channel) -> f64 {
        if self.domain != other.domain {
            return f64::INFINITY;
        }
        linalg::distance(&self.choi_matrix().matrix, &other.choi_matrix().matrix)
    }

    /// Channel equality up to `tol` on the Choi matrix.
    pub fn same_as(&self, other: &Channel, tol: f64) -> bool {
        self.choi_distance(other) <= tol
    }

    /// Convex combination `Σ t_i q_i` of channels on a common domain.
    pub fn convex_combination(parts: &[(f64, &Channel)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or(Error::EmptyKraus)?;
        let mut kraus = Vec::new();
        for (t, ch) in parts {
            if ch.domain != first.domain {
                return Err(Error::DomainMismatch);
            }
            let s = r(t.sqrt());
            kraus.extend(ch.kraus.iter().map(|k| k.scale(s)));
        }
        Self::new(first.domain.clone(), kraus)
    }
}

/// `C = Σ_{ij} E_ij ⊗ q(E_ij)` on `C^d ⊗ C^d`, input index first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub matrix: CMatrix,
    pub dim: usize,
}

impl ChoiMatrix {
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    pub fn hermitian_residual(&self) -> f64 {
        linalg::hermitian_residual(&self.matrix)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol && self.min_eigenvalue() >= -tol
    }

    pub fn rank(&self) -> usize {
        let vals = self.eigenvalues();
        let top = vals.first().copied().unwrap_or(0.0).max(0.0);
        vals.iter().filter(|&&v| v > RANK_TOL * top).count()
    }
}

fn choi_from_kraus(d: usize, kraus: impl Iterator<Item = CMatrix>) -> ChoiMatrix {
    let mut m = linalg::zeros(d * d, d * d);
    for q in kraus {
        // w[(i, a)] = q[a, i]
        let w = linalg::CVector::from_fn(d * d, |k, _| q[(k % d, k / d)]);
        m += &w * w.adjoint();
    }
    ChoiMatrix { matrix: m, dim: d }
}

/// Choi matrix of an arbitrary linear map on `C^{n×n}`.
pub fn choi_of_map(n: usize, f: impl Fn(&CMatrix) -> CMatrix) -> ChoiMatrix {
    let mut m = linalg::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let img = f(&linalg::matrix_unit(n, i, j));
            for a in 0..n {
                for b in 0..n {
                    m[(i * n + a, j * n + b)] = img[(a, b)];
                }
            }
        }
    }
    ChoiMatrix { matrix: m, dim: n }
}

/// The transpose map: linear, unital, trace-preserving and *-preserving,
/// but not completely positive. Used as a negative fixture.
pub fn transpose_map(x: &CMatrix) -> CMatrix {
    x.transpose()
}

/// Mixing matrix between two Kraus sets of the same channel.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMixing {
    /// `m × m` matrix `W` with `q'_k = Σ_j W_kj q_j`, both sets zero-padded
    /// to `m = max(p, p')`.
    pub matrix: CMatrix,
    pub unitarity_residual: f64,
    pub reconstruction_residual: f64,
}

/// Finds the unitary relating two Kraus sets of the same channel.
///
/// On the common range the solution is the least-squares one; the
/// complementary directions are paired by orthonormal completion so the
/// result is unitary.
pub fn kraus_equivalence(first: &Channel, second: &Channel) -> Result<KrausMixing> {
    if first.domain != second.domain {
        return Err(Error::DomainMismatch);
    }
    let d = first.domain.concrete_dim();
    let choi_residual = first.choi_distance(second);
    if choi_residual > matrix_tol(d * d) {
        return Err(Error::NotEquivalent { choi_residual });
    }
    let m = first.kraus.len().max(second.kraus.len());
    let stack = |ch: &Channel| {
        let mut q = linalg::zeros(d * d, m);
        for (k, op) in ch.kraus.iter().enumerate() {
            q.set_column(k, &linalg::vec_row_major(&op.to_concrete()));
        }
        q
    };
    let q1 = stack(first);
    let q2 = stack(second);
    let dec = linalg::svd(&q1);
    let top = dec.s.first().copied().unwrap_or(0.0);
    let rank = dec.s.iter().filter(|&&s| s > RANK_TOL * top).count();
    let mut v1 = linalg::zeros(m, rank);
    let mut v2 = linalg::zeros(m, rank);
    for i in 0..rank {
        let u = dec.u.column(i).into_owned();
        let s = r(1.0 / dec.s[i]);
        v1.set_column(i, &(q1.adjoint() * &u * s));
        v2.set_column(i, &(q2.adjoint() * &u * s));
    }
    let f1 = linalg::complement(&v1, m);
    let f2 = linalg::complement(&v2, m);
    // X* maps v1_i ↦ v2_i and the completions onto each other; Q2 = Q1 X.
    let x_adj = &v2 * v1.adjoint() + &f2 * f1.adjoint();
    let x = x_adj.adjoint();
    let matrix = x.transpose();
    let reconstruction_residual = linalg::distance(&(&q1 * &x), &q2);
    Ok(KrausMixing {
        unitarity_residual: linalg::unitarity_residual(&matrix),
        matrix,
        reconstruction_residual,
    })
}

/// `q(X*) = q(X)*` residual over the matrix units.
pub fn star_preservation_residual(ch: &Channel) -> f64 {
    ch.domain
        .matrix_units()
        .iter()
        .map(|e| {
            let lhs = ch.apply_unchecked(&e.adjoint());
            let rhs = ch.apply_unchecked(e).adjoint();
            lhs.distance(&rhs)
        })
        .fold(0.0, f64::max)
}

/// Largest negative eigenvalue of `q(A*A) − q(A)*q(A)` (the Schwarz defect),
/// reported as a nonpositive number; zero when the defect is PSD.
pub fn schwarz_defect_min_eigenvalue(ch: &Channel, a: &AlgebraElement) -> f64 {
    let lhs = ch.apply_unchecked(&a.adjoint().mul(a));
    let qa = ch.apply_unchecked(a);
    let defect = lhs.sub(&qa.adjoint().mul(&qa));
    defect
        .blocks
        .iter()
        .map(|m| {
            linalg::hermitian_eigenvalues(m)
                .last()
                .copied()
                .unwrap_or(0.0)
        })
        .fold(f64::INFINITY, f64::min)
        .min(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, matrix_unit, paulis};
    use crate::random;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_depolarizing() -> Channel {
        Channel::from_matrices(paulis().iter().map(|p| p * r(0.5)).collect()).unwrap()
    }

    fn el(m: CMatrix) -> AlgebraElement {
        AlgebraElement { blocks: vec![m] }
    }

    #[test]
    fn validation_examples() {
        assert!(Channel::from_matrices(vec![linalg::identity(2)]).is_ok());
        assert!(Channel::from_matrices(paulis().iter().map(|p| p * r(0.5)).collect()).is_ok());
        let bad = Channel::from_matrices(vec![matrix_unit(2, 0, 0), matrix_unit(2, 0, 1)]);
        match bad {
            Err(Error::UnitalViolation { residual }) => {
                assert!((residual - 2f64.sqrt()).abs() < 1e-12, "{residual}")
            }
            other => panic!("expected unital violation, got {other:?}"),
        }
        let v = validate(
            &MatrixAlgebra::full(2),
            &[el(matrix_unit(2, 0, 0)), el(matrix_unit(2, 0, 1))],
        )
        .unwrap();
        assert!(v.tp_residual < 1e-14);
        assert!(matches!(
            Channel::from_matrices(vec![linalg::identity(2) * r(0.5)]),
            Err(Error::UnitalViolation { .. })
        ));
        assert!(matches!(
            Channel::new(MatrixAlgebra::full(2), vec![]),
            Err(Error::EmptyKraus)
        ));
    }

    #[test]
    fn depolarizing_action() {
        let q = pauli_depolarizing();
        let [id, _, _, z] = paulis();
        assert!(q.apply(&el(z)).unwrap().frobenius() < 1e-14);
        assert!(q.apply(&el(id.clone())).unwrap().distance(&el(id)) < 1e-14);
        assert!(q.same_as(&Channel::depolarizing(2), 1e-12));
        let x = el(CMatrix::from_row_slice(
            2,
            2,
            &[r(1.0), r(2.0), r(3.0), r(5.0)],
        ));
        assert!(
            Channel::identity(MatrixAlgebra::full(2))
                .apply_power(&x, 3)
                .unwrap()
                == x
        );
        assert_eq!(q.apply_power(&x, 0).unwrap(), x);
    }

    #[test]
    fn choi_examples() {
        let id = Channel::identity(MatrixAlgebra::full(2)).choi_matrix();
        let eig = id.eigenvalues();
        assert!((eig[0] - 2.0).abs() < 1e-12 && eig[1..].iter().all(|v| v.abs() < 1e-12));
        let dep = Channel::depolarizing(2).choi_matrix();
        assert!(linalg::distance(&dep.matrix, &(linalg::identity(4) * r(0.5))) < 1e-14);
        let t = choi_of_map(2, transpose_map);
        assert!((t.min_eigenvalue() + 1.0).abs() < 1e-12);
        assert!(t.hermitian_residual() < 1e-14);
        // Choi of the Kraus path agrees with assembling q(E_ij)
        let q = pauli_depolarizing();
        let direct = choi_of_map(2, |x| q.apply_concrete(x));
        assert!(linalg::distance(&direct.matrix, &q.choi_matrix().matrix) < 1e-14);
    }

    #[test]
    fn dual_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = random::random_factorization(2, 3, &mut rng).into_channel();
        let dq = q.dual();
        assert!(dq.dual().same_as(&q, 1e-12));
        let a = q.domain().clone();
        for _ in 0..5 {
            let a1 = a.random_element(&mut rng);
            let a2 = a.random_element(&mut rng);
            let lhs = a.trace(&a1.mul(&dq.apply(&a2).unwrap())).unwrap();
            let rhs = a.trace(&q.apply(&a1).unwrap().mul(&a2)).unwrap();
            assert!((lhs - rhs).norm() < crate::SCALAR_TOL);
        }
        let id = Channel::identity(a);
        assert!(id.dual().same_as(&id, 0.0));
    }

    #[test]
    fn composition_examples() {
        let id = Channel::identity(MatrixAlgebra::full(2));
        let q = pauli_depolarizing();
        assert!(id.compose(&q).unwrap().same_as(&q, 1e-12));
        let qq = q.compose(&q).unwrap();
        assert!(qq.same_as(&q, 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q1 = random::random_factorization(2, 2, &mut rng).into_channel();
        let q2 = random::random_factorization(2, 2, &mut rng).into_channel();
        let comp = q2.compose(&q1).unwrap();
        let oracle = choi_of_map(2, |x| q2.apply_concrete(&q1.apply_concrete(x)));
        assert!(linalg::distance(&comp.choi_matrix().matrix, &oracle.matrix) < 1e-12);
        assert!(matches!(
            q.compose(&Channel::identity(MatrixAlgebra::full(3))),
            Err(Error::DomainMismatch)
        ));
    }

    #[test]
    fn minimal_kraus_examples() {
        let s = r(core::f64::consts::FRAC_1_SQRT_2);
        let dup =
            Channel::from_matrices(vec![linalg::identity(2) * s, linalg::identity(2) * s]).unwrap();
        let min = dup.minimal_kraus();
        assert_eq!(min.kraus_count(), 1);
        assert!(min.same_as(&dup, 1e-12));
        let q = pauli_depolarizing();
        let mut raw = Vec::new();
        for a in q.kraus() {
            for b in q.kraus() {
                raw.push(a.mul(b));
            }
        }
        let raw = Channel::new(MatrixAlgebra::full(2), raw).unwrap();
        assert_eq!(raw.kraus_count(), 16);
        let min = raw.minimal_kraus();
        assert_eq!(min.kraus_count(), 4);
        assert_eq!(min.minimal_kraus().kraus_count(), 4);
        assert!(min.minimal_kraus().same_as(&min, 1e-12));
    }

    #[test]
    fn minimal_kraus_keeps_direct_sum_structure() {
        let a = MatrixAlgebra::new(&[(2, 0.5), (1, 0.5)]).unwrap();
        let h = CMatrix::from_row_slice(2, 2, &[r(1.0), r(1.0), r(1.0), r(-1.0)])
            * r(core::f64::consts::FRAC_1_SQRT_2);
        let half = r(core::f64::consts::FRAC_1_SQRT_2);
        let k1 = a
            .element(vec![h * half, CMatrix::from_element(1, 1, half)])
            .unwrap();
        let k2 = a
            .element(vec![
                linalg::identity(2) * half,
                CMatrix::from_element(1, 1, half),
            ])
            .unwrap();
        let q = Channel::new(a.clone(), vec![k1, k2]).unwrap();
        let min = q.minimal_kraus();
        assert!(Channel::new(a, min.kraus().to_vec()).is_ok());
        assert!(min.same_as(&q, 1e-12));
    }

    #[test]
    fn kraus_equivalence_examples() {
        let q = pauli_depolarizing();
        let w = kraus_equivalence(&q, &q).unwrap();
        assert!(linalg::distance(&w.matrix, &linalg::identity(4)) < 1e-10);
        let theta = 0.7;
        let phase = c(theta.cos(), theta.sin());
        let a = Channel::from_matrices(vec![linalg::identity(2)]).unwrap();
        let b = Channel::from_matrices(vec![linalg::identity(2) * phase]).unwrap();
        let w = kraus_equivalence(&a, &b).unwrap();
        assert!((w.matrix[(0, 0)] - phase).norm() < 1e-12);
        let min = q.minimal_kraus();
        let w = kraus_equivalence(&q, &min).unwrap();
        assert!(w.unitarity_residual < 1e-9);
        assert!(w.reconstruction_residual < 1e-9);
        let s = r(core::f64::consts::FRAC_1_SQRT_2);
        let dup =
            Channel::from_matrices(vec![linalg::identity(2) * s, linalg::identity(2) * s]).unwrap();
        let w = kraus_equivalence(&dup, &a).unwrap();
        assert!(w.unitarity_residual < 1e-9 && w.reconstruction_residual < 1e-9);
        assert!(matches!(
            kraus_equivalence(&q, &a),
            Err(Error::NotEquivalent { .. })
        ));
    }

    #[test]
    fn schwarz_and_trace_preservation_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let q = random::random_factorization(3, 2, &mut rng).into_channel();
            let a = q.domain().clone();
            let x = a.random_element(&mut rng);
            let tx = a.trace(&x).unwrap();
            let tq = a.trace(&q.apply(&x).unwrap()).unwrap();
            assert!((tx - tq).norm() < 1e-12);
            assert!(schwarz_defect_min_eigenvalue(&q, &x) > -1e-10);
            let xx = x.adjoint().mul(&x);
            let out = q.apply(&xx).unwrap();
            let tr_out = a.trace(&out).unwrap().re;
            assert!(tr_out > 0.0);
            assert!(star_preservation_residual(&q) < 1e-12);
        }
    }
}
