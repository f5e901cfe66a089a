//! Unitary matrix factorizations `U = Σ q_k ⊗ b_k ∈ A ⊗ B` and the example
//! families built from them: DFT blocks, random unitary channels and Schur
//! product channels.
//!
//! A factorization realizes its channel by partial trace,
//! `q(X) = (id ⊗ tr_B)(U (X ⊗ I_B) U*)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{self, AlgebraElement, MatrixAlgebra};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{self, c, r, CMatrix};
use crate::{matrix_tol, RANK_TOL, SCALAR_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFactorization {
    system: MatrixAlgebra,
    environment: MatrixAlgebra,
    unitary: AlgebraElement,
    kron: CMatrix,
    channel: Channel,
}

/// Per-matrix-unit residuals of the partial-trace identity.
#[derive(Debug, Clone, PartialEq)]
pub struct OneDilationReport {
    /// `‖(id ⊗ tr_B)(U (X ⊗ I) U*) − q(X)‖_F` for each matrix unit `X` of `A`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// `max ‖Φ Ad_U Φ(Y) − q(tr_B Y) ⊗ I‖_F` over matrix units `Y` of `A ⊗ B`.
    pub expectation_residual: f64,
    pub unitarity_residual: f64,
    pub tolerance: f64,
}

impl OneDilationReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
            && self.expectation_residual <= self.tolerance
            && self.unitarity_residual <= self.tolerance
    }

    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::FactorizationMismatch {
                residual: self.max_residual.max(self.expectation_residual),
            })
        }
    }
}

impl UnitaryFactorization {
    /// Assembles a factorization without checking it; use
    /// [`verify_one_dilation`] to test the partial-trace identity.
    pub fn from_parts(
        system: MatrixAlgebra,
        environment: MatrixAlgebra,
        unitary: AlgebraElement,
        channel: Channel,
    ) -> Result<Self> {
        algebra::tensor_algebra(&system, &environment).check(&unitary)?;
        if channel.domain() != &system {
            return Err(Error::DomainMismatch);
        }
        let kron = algebra::tensor_to_kron(&[&system, &environment], &unitary);
        Ok(Self {
            system,
            environment,
            unitary,
            kron,
            channel,
        })
    }

    pub fn system(&self) -> &MatrixAlgebra {
        &self.system
    }

    pub fn environment(&self) -> &MatrixAlgebra {
        &self.environment
    }

    /// `U` as an element of `A ⊗ B`.
    pub fn unitary(&self) -> &AlgebraElement {
        &self.unitary
    }

    /// `U` in the Kronecker picture on `C^{d_A} ⊗ C^{d_B}`.
    pub fn unitary_kron(&self) -> &CMatrix {
        &self.kron
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn into_channel(self) -> Channel {
        self.channel
    }

    /// `(id ⊗ tr_B)(U (X ⊗ I) U*)` for `X` in the block-diagonal picture.
    pub fn reduce(&self, x: &CMatrix) -> CMatrix {
        let db = self.environment.concrete_dim();
        let y =
            linalg::conjugate_kron_identity(&self.kron, 1, &linalg::kron(x, &linalg::identity(db)));
        algebra::partial_trace_kron(
            &y,
            self.system.concrete_dim(),
            &self.environment.density_diagonal(),
        )
    }
}

/// Reads the channel off a unitary `U ∈ A ⊗ B` given in the Kronecker
/// picture.
///
/// Every matrix unit `E_bb'` of block `j` of `B` contributes the Kraus
/// operator `√(w_j / m_j) · q_bb'`, where `q_bb'` is the `A`-block of `U`
/// sitting against `E_bb'`.
pub fn factorization_from_unitary(
    u: &CMatrix,
    system: &MatrixAlgebra,
    environment: &MatrixAlgebra,
) -> Result<UnitaryFactorization> {
    let da = system.concrete_dim();
    let db = environment.concrete_dim();
    if u.nrows() != da * db || u.ncols() != da * db {
        return Err(Error::ShapeMismatch(format!(
            "unitary is {}x{}, expected {}x{}",
            u.nrows(),
            u.ncols(),
            da * db,
            da * db
        )));
    }
    let residual = linalg::unitarity_residual(u);
    if residual > matrix_tol(da * db) {
        return Err(Error::NotUnitary { residual });
    }
    let factors = [system, environment];
    let unitary = algebra::kron_to_tensor(&factors, u);
    let outside = linalg::distance(&algebra::tensor_to_kron(&factors, &unitary), u);
    if outside > matrix_tol(da * db) {
        return Err(Error::ShapeMismatch(format!(
            "unitary has weight {outside:e} outside A ⊗ B"
        )));
    }

    let mut kraus = Vec::new();
    for (blk, off) in environment.blocks().iter().zip(environment.block_offsets()) {
        let s = r((blk.weight / blk.dim as f64).sqrt());
        for b in 0..blk.dim {
            for bp in 0..blk.dim {
                let q = CMatrix::from_fn(da, da, |a, ap| {
                    u[(a * db + off + b, ap * db + off + bp)] * s
                });
                if linalg::frobenius(&q) > SCALAR_TOL {
                    kraus.push(system.project_concrete(&q));
                }
            }
        }
    }
    let channel = Channel::new(system.clone(), kraus)?;
    let fact = UnitaryFactorization {
        system: system.clone(),
        environment: environment.clone(),
        unitary,
        kron: u.clone(),
        channel,
    };
    verify_one_dilation(&fact).into_result()?;
    Ok(fact)
}

/// Checks that `Ad_U` is a matrix 1-dilation of the stored channel.
pub fn verify_one_dilation(fact: &UnitaryFactorization) -> OneDilationReport {
    let a = &fact.system;
    let b = &fact.environment;
    let da = a.concrete_dim();
    let db = b.concrete_dim();
    let rho_b = b.density_diagonal();

    let residuals: Vec<f64> = a
        .matrix_units()
        .iter()
        .map(|e| {
            let lhs = fact.reduce(&e.to_concrete());
            let rhs = fact.channel.apply_unchecked(e).to_concrete();
            linalg::distance(&lhs, &rhs)
        })
        .collect();
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);

    let factors = [a, b];
    let id_b = linalg::identity(db);
    let mut expectation_residual: f64 = 0.0;
    for y in algebra::tensor_algebra(a, b).matrix_units() {
        let ym = algebra::tensor_to_kron(&factors, &y);
        let phi_y = linalg::kron(&algebra::partial_trace_kron(&ym, da, &rho_b), &id_b);
        let moved = linalg::conjugate_kron_identity(&fact.kron, 1, &phi_y);
        let lhs = linalg::kron(&algebra::partial_trace_kron(&moved, da, &rho_b), &id_b);
        let reduced = a.project_concrete(&algebra::partial_trace_kron(&ym, da, &rho_b));
        let rhs = linalg::kron(&fact.channel.apply_unchecked(&reduced).to_concrete(), &id_b);
        expectation_residual = expectation_residual.max(linalg::distance(&lhs, &rhs));
    }

    OneDilationReport {
        residuals,
        max_residual,
        expectation_residual,
        unitarity_residual: linalg::unitarity_residual(&fact.kron),
        tolerance: matrix_tol(da * db),
    }
}

/// The unitary flip `x ⊗ y ↦ y ⊗ x` on `C^n ⊗ C^n`, `Σ E_ij ⊗ E_ji`.
pub fn swap_unitary(n: usize) -> CMatrix {
    let mut s = linalg::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            s[(j * n + i, i * n + j)] = r(1.0);
        }
    }
    s
}

/// The completely depolarizing channel on `C^{n×n}` factored through
/// `C^{n×n}` by the swap.
pub fn depolarizing_swap(n: usize) -> UnitaryFactorization {
    let m = MatrixAlgebra::full(n);
    factorization_from_unitary(&swap_unitary(n), &m, &m).expect("the swap is a factorization")
}

/// The completely depolarizing channel on `C^{2×2}` factored through
/// `C ⊕ C ⊕ C ⊕ C` with the uniform trace, `U = Σ σ_i ⊗ E_ii`.
pub fn depolarizing_pauli() -> UnitaryFactorization {
    random_unitary_channel(&linalg::paulis(), &[0.25; 4]).expect("Paulis are unitary")
}

/// The `N`-point DFT matrix `Ω_kj = ω^{kj} / √N`, `ω = e^{−2πi/N}`.
pub fn dft_matrix(n: usize) -> CMatrix {
    let s = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, n, |k, j| {
        let t = -2.0 * core::f64::consts::PI * ((k * j) % n) as f64 / n as f64;
        c(t.cos() * s, t.sin() * s)
    })
}

/// Splits the `nm`-point DFT into `m²` blocks `Ω_kj ∈ C^{n×n}` and factors
/// the resulting channel on `C^{n×n}` through `C^{m×m}`.
pub fn dft_channel(n: usize, m: usize) -> Result<UnitaryFactorization> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidAlgebra(
            "DFT block sizes must be positive".into(),
        ));
    }
    let omega = dft_matrix(n * m);
    let residual = linalg::unitarity_residual(&omega);
    if residual > matrix_tol(n * m) {
        return Err(Error::NotUnitary { residual });
    }
    // block (k, j) of Ω sits against E_kj, with the system index least significant in Ω
    let u = CMatrix::from_fn(n * m, n * m, |row, col| {
        let (a, k) = (row / m, row % m);
        let (ap, j) = (col / m, col % m);
        omega[(k * n + a, j * n + ap)]
    });
    factorization_from_unitary(&u, &MatrixAlgebra::full(n), &MatrixAlgebra::full(m))
}

/// `q(X) = Σ p_k U_k X U_k*`, factored through the diagonal algebra with
/// trace weights `p_k` by `V = Σ U_k ⊗ E_k`.
pub fn random_unitary_channel(
    unitaries: &[CMatrix],
    probs: &[f64],
) -> Result<UnitaryFactorization> {
    if unitaries.is_empty() {
        return Err(Error::EmptyKraus);
    }
    if unitaries.len() != probs.len() {
        return Err(Error::InvalidProbabilities(format!(
            "{} unitaries but {} probabilities",
            unitaries.len(),
            probs.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p <= 0.0) {
        return Err(Error::InvalidProbabilities(format!(
            "nonpositive probability {p}"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbabilities(format!(
            "probabilities sum to {total}"
        )));
    }
    let n = unitaries[0].nrows();
    for u in unitaries {
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::ShapeMismatch("unitaries differ in size".into()));
        }
        let residual = linalg::unitarity_residual(u);
        if residual > matrix_tol(n) {
            return Err(Error::NotUnitary { residual });
        }
    }
    let env = MatrixAlgebra::diagonal(probs)?;
    let k = unitaries.len();
    let mut v = linalg::zeros(n * k, n * k);
    for (idx, u) in unitaries.iter().enumerate() {
        for a in 0..n {
            for ap in 0..n {
                v[(a * k + idx, ap * k + idx)] = u[(a, ap)];
            }
        }
    }
    factorization_from_unitary(&v, &MatrixAlgebra::full(n), &env)
}

/// Positive semidefinite matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    matrix: CMatrix,
}

impl CorrelationMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return Err(Error::NotCorrelation(
                "matrix must be square and nonempty".into(),
            ));
        }
        let tol = matrix_tol(n);
        let herm = linalg::hermitian_residual(&matrix);
        if herm > tol {
            return Err(Error::NotCorrelation(format!(
                "not Hermitian (residual {herm:e})"
            )));
        }
        for i in 0..n {
            if (matrix[(i, i)] - r(1.0)).norm() > SCALAR_TOL {
                return Err(Error::NotCorrelation(format!(
                    "diagonal entry {i} is {}",
                    matrix[(i, i)]
                )));
            }
        }
        let min = linalg::hermitian_eigenvalues(&matrix)
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -tol {
            return Err(Error::NotCorrelation(format!(
                "eigenvalue {min:e} is negative"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_real(rows: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * rows {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for {rows}x{rows}",
                entries.len()
            )));
        }
        Self::new(CMatrix::from_fn(
            rows,
            rows,
            |i, j| r(entries[i * rows + j]),
        ))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn max_imag(&self) -> f64 {
        self.matrix.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.matrix, RANK_TOL)
    }
}

/// The Schur product channel `X ↦ X ∘ C` with Kraus operators `D_{v_i}`
/// from the eigendecomposition `C = Σ v_i v_i*`.
pub fn schur_channel(corr: &CorrelationMatrix) -> Channel {
    let n = corr.dim();
    let (vals, vecs) = linalg::hermitian_eigen(&corr.matrix);
    let top = vals.first().copied().unwrap_or(0.0).max(0.0);
    let domain = MatrixAlgebra::full(n);
    let kraus = vals
        .iter()
        .enumerate()
        .take_while(|(_, &lam)| lam > RANK_TOL * top)
        .map(|(l, &lam)| {
            let s = lam.sqrt();
            let d = CMatrix::from_fn(n, n, |i, j| if i == j { vecs[(i, l)] * s } else { r(0.0) });
            AlgebraElement { blocks: vec![d] }
        })
        .collect();
    Channel::from_parts_unchecked(domain, kraus)
}

/// Outcome of the rank-one test for random-unitary Schur channels.
#[derive(Debug, Clone, PartialEq)]
pub enum HullMembership {
    /// `C = vv*` with `|v_i| = 1`; the channel is `Ad_{D_v}`.
    RankOne { unitary: CMatrix, channel: Channel },
    /// Rank at least two; membership in the convex hull is not decided.
    Unknown { rank: usize },
}

pub fn rank_one_hull_member(corr: &CorrelationMatrix) -> HullMembership {
    let rank = corr.rank();
    if rank != 1 {
        return HullMembership::Unknown { rank };
    }
    let n = corr.dim();
    let (_, vecs) = linalg::hermitian_eigen(&corr.matrix);
    let v0 = vecs[(0, 0)];
    let ref_phase = if v0.norm() > 0.0 {
        v0.conj() / v0.norm()
    } else {
        r(1.0)
    };
    let d = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let z = vecs[(i, 0)] * ref_phase;
            z / z.norm()
        } else {
            r(0.0)
        }
    });
    let channel = Channel::from_parts_unchecked(
        MatrixAlgebra::full(n),
        vec![AlgebraElement {
            blocks: vec![d.clone()],
        }],
    );
    HullMembership::RankOne {
        unitary: d,
        channel,
    }
}

/// `p` self-adjoint, pairwise anti-commuting unitaries of size `2^⌈p/2⌉`:
/// `X_{2k−1} = Z^{⊗(k−1)} ⊗ σ_x ⊗ I ⊗ …`, `X_{2k} = Z^{⊗(k−1)} ⊗ σ_y ⊗ I ⊗ …`.
pub fn clifford_generators(p: usize) -> Vec<CMatrix> {
    let [id, sx, sy, sz] = linalg::paulis();
    let sites = p.div_ceil(2).max(1);
    let build = |k: usize, mid: &CMatrix| {
        let mut m = CMatrix::from_element(1, 1, r(1.0));
        for site in 0..sites {
            let f = match site.cmp(&k) {
                core::cmp::Ordering::Less => &sz,
                core::cmp::Ordering::Equal => mid,
                core::cmp::Ordering::Greater => &id,
            };
            m = linalg::kron(&m, f);
        }
        m
    };
    (0..p)
        .map(|i| build(i / 2, if i % 2 == 0 { &sx } else { &sy }))
        .collect()
}

/// Result of factoring a real Schur channel through anti-commuting unitaries.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordFactorization {
    pub factorization: UnitaryFactorization,
    /// `p × n` real matrix `G` with unit columns and `C = GᵀG`.
    pub gram: DMatrix<f64>,
    pub generators: Vec<CMatrix>,
    /// `u_j = Σ_k G_kj X_k`.
    pub unitaries: Vec<CMatrix>,
    /// `max |tr(u_i* u_j) − c_ij|` with the normalized trace.
    pub pairing_residual: f64,
}

/// Factors `X ↦ X ∘ C` for a real correlation matrix `C` through
/// `C^{D×D}`, `D = 2^⌈p/2⌉`, `p = rank C`, with `U = Σ_j E_jj ⊗ u_j`.
pub fn real_correlation_factorization(corr: &CorrelationMatrix) -> Result<CliffordFactorization> {
    let max_imag = corr.max_imag();
    if max_imag > SCALAR_TOL {
        return Err(Error::NotReal { max_imag });
    }
    let n = corr.dim();
    let real = DMatrix::<f64>::from_fn(n, n, |i, j| {
        0.5 * (corr.matrix[(i, j)].re + corr.matrix[(j, i)].re)
    });
    let eig = real.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let top = eig.eigenvalues[order[0]].max(0.0);
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&k| eig.eigenvalues[k] > RANK_TOL * top)
        .collect();
    let p = kept.len().max(1);
    let g0 = DMatrix::<f64>::from_fn(p, n, |row, j| {
        kept.get(row)
            .map(|&k| eig.eigenvalues[k].sqrt() * eig.eigenvectors[(j, k)])
            .unwrap_or(0.0)
    });
    // triangular Gram form: the first correlation vector lies along X_1
    let mut gram = g0.qr().r();
    for row in 0..p {
        let lead = (row..n)
            .map(|j| gram[(row, j)])
            .find(|v| v.abs() > RANK_TOL)
            .unwrap_or(1.0);
        if lead < 0.0 {
            for j in 0..n {
                gram[(row, j)] = -gram[(row, j)];
            }
        }
    }
    for j in 0..n {
        let norm = gram.column(j).norm();
        if norm > 0.0 {
            for row in 0..p {
                gram[(row, j)] /= norm;
            }
        }
    }

    let generators = clifford_generators(p);
    let dim = generators[0].nrows();
    let unitaries: Vec<CMatrix> = (0..n)
        .map(|j| {
            generators
                .iter()
                .enumerate()
                .fold(linalg::zeros(dim, dim), |acc, (k, x)| {
                    acc + x * r(gram[(k, j)])
                })
        })
        .collect();
    let mut pairing_residual: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let t = (unitaries[i].adjoint() * &unitaries[j]).trace() / r(dim as f64);
            pairing_residual = pairing_residual.max((t - corr.matrix[(i, j)]).norm());
        }
    }

    let mut u = linalg::zeros(n * dim, n * dim);
    for (j, uj) in unitaries.iter().enumerate() {
        for b in 0..dim {
            for bp in 0..dim {
                u[(j * dim + b, j * dim + bp)] = uj[(b, bp)];
            }
        }
    }
    let factorization =
        factorization_from_unitary(&u, &MatrixAlgebra::full(n), &MatrixAlgebra::full(dim))?;
    let choi_residual = factorization.channel().choi_distance(&schur_channel(corr));
    if choi_residual > matrix_tol(n * n) {
        return Err(Error::FactorizationMismatch {
            residual: choi_residual,
        });
    }
    Ok(CliffordFactorization {
        factorization,
        gram,
        generators,
        unitaries,
        pairing_residual,
    })
}

/// Entrywise product `X ∘ C`.
pub fn schur_product(x: &CMatrix, corr: &CMatrix) -> CMatrix {
    x.component_mul(corr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::kraus_equivalence;
    use crate::linalg::{matrix_unit, paulis};
    use crate::random;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Brute-force partial trace of the dense `U (X ⊗ I) U*` with explicit
    /// loops over the environment matrix units.
    fn partial_trace_oracle(u: &CMatrix, x: &CMatrix, env_dim: usize) -> CMatrix {
        let n = x.nrows();
        let big = u * linalg::kron(x, &linalg::identity(env_dim)) * u.adjoint();
        let mut out = linalg::zeros(n, n);
        for a in 0..n {
            for ap in 0..n {
                let mut s = r(0.0);
                for b in 0..env_dim {
                    s += big[(a * env_dim + b, ap * env_dim + b)];
                }
                out[(a, ap)] = s / r(env_dim as f64);
            }
        }
        out
    }

    #[test]
    fn identity_unitary_gives_identity_channel() {
        let a = MatrixAlgebra::full(2);
        let b = MatrixAlgebra::full(3);
        let f = factorization_from_unitary(&linalg::identity(6), &a, &b).unwrap();
        assert!(f.channel().same_as(&Channel::identity(a), 1e-12));
        assert!(verify_one_dilation(&f).max_residual < 1e-14);
    }

    #[test]
    fn swap_gives_depolarizing() {
        let f = depolarizing_swap(2);
        assert!(f.channel().same_as(&Channel::depolarizing(2), 1e-12));
        let k = f.channel().kraus();
        assert_eq!(k.len(), 4);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!(k
            .iter()
            .all(|q| (linalg::frobenius(&q.blocks[0]) - s).abs() < 1e-12));
        let report = verify_one_dilation(&f);
        assert!(report.passed() && report.max_residual <= matrix_tol(2));
    }

    #[test]
    fn pauli_factorization_of_depolarizing() {
        let f = depolarizing_pauli();
        assert_eq!(f.environment().num_blocks(), 4);
        assert!(f
            .environment()
            .blocks()
            .iter()
            .all(|b| b.dim == 1 && (b.weight - 0.25).abs() < 1e-15));
        assert!(f
            .channel()
            .same_as(&depolarizing_swap(2).into_channel(), 1e-12));
        assert!(verify_one_dilation(&f).passed());
    }

    #[test]
    fn haar_factorizations_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let u = random::haar_unitary(4, &mut rng);
            let f =
                factorization_from_unitary(&u, &MatrixAlgebra::full(2), &MatrixAlgebra::full(2))
                    .unwrap();
            for e in MatrixAlgebra::full(2).matrix_units() {
                let oracle = partial_trace_oracle(&u, &e.blocks[0], 2);
                let got = f.channel().apply(&e).unwrap();
                assert!(linalg::distance(&oracle, &got.blocks[0]) < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_nonunitary_and_corruption() {
        let a = MatrixAlgebra::full(2);
        let bad = linalg::identity(4) * r(0.5);
        assert!(matches!(
            factorization_from_unitary(&bad, &a, &a),
            Err(Error::NotUnitary { .. })
        ));
        let good = depolarizing_swap(2);
        let mut u = good.unitary_kron().clone();
        for i in 0..2 {
            for j in 0..2 {
                u[(i, j)] = r(0.0);
            }
        }
        let corrupted = UnitaryFactorization::from_parts(
            a.clone(),
            a.clone(),
            algebra::kron_to_tensor(&[&a, &a], &u),
            good.channel().clone(),
        )
        .unwrap();
        let report = verify_one_dilation(&corrupted);
        assert!(report.max_residual > 1e-3);
        assert!(matches!(
            report.into_result(),
            Err(Error::FactorizationMismatch { .. })
        ));
    }

    #[test]
    fn dft_examples() {
        let f = dft_channel(1, 2).unwrap();
        assert!(f
            .channel()
            .same_as(&Channel::identity(MatrixAlgebra::full(1)), 1e-12));

        let f = dft_channel(2, 2).unwrap();
        let omega = dft_matrix(4);
        assert!((omega[(1, 1)] - c(0.0, -0.5)).norm() < 1e-15);
        // block (0, 0) of Ω is ½[[1, 1], [1, −i]], weighted by √(1/m)
        let expected = CMatrix::from_row_slice(2, 2, &[r(0.5), r(0.5), r(0.5), c(0.0, -0.5)])
            * r(core::f64::consts::FRAC_1_SQRT_2);
        assert!(f
            .channel()
            .kraus()
            .iter()
            .any(|k| linalg::distance(&k.blocks[0], &expected) < 1e-12));
        assert!(verify_one_dilation(&f).passed());

        let f = dft_channel(2, 3).unwrap();
        assert_eq!(f.channel().kraus_count(), 9);
        let v = f.channel().validation();
        assert!(
            v.unital_residual < 1e-12 && v.tp_residual < 1e-12 && v.choi_min_eigenvalue > -1e-12
        );
        assert!(linalg::unitarity_residual(&dft_matrix(12)) < 1e-12);
    }

    #[test]
    fn random_unitary_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = random::haar_unitary(3, &mut rng);
        let f = random_unitary_channel(core::slice::from_ref(&u), &[1.0]).unwrap();
        let ad = Channel::from_matrices(vec![u]).unwrap();
        assert!(f.channel().same_as(&ad, 1e-12));

        let u1 = random::haar_unitary(2, &mut rng);
        let u2 = random::haar_unitary(2, &mut rng);
        let f = random_unitary_channel(&[u1.clone(), u2.clone()], &[0.3, 0.7]).unwrap();
        for e in MatrixAlgebra::full(2).matrix_units() {
            let x = &e.blocks[0];
            let oracle = &u1 * x * u1.adjoint() * r(0.3) + &u2 * x * u2.adjoint() * r(0.7);
            assert!(linalg::distance(&f.channel().apply(&e).unwrap().blocks[0], &oracle) < 1e-12);
        }
        let v = f.unitary_kron();
        assert!(linalg::distance(&CMatrix::from_fn(2, 2, |i, j| v[(2 * i, 2 * j)]), &u1) < 1e-15);

        let ids = [
            linalg::identity(2),
            linalg::identity(2),
            linalg::identity(2),
        ];
        let f = random_unitary_channel(&ids, &[0.2, 0.3, 0.5]).unwrap();
        assert!(f
            .channel()
            .same_as(&Channel::identity(MatrixAlgebra::full(2)), 1e-12));

        assert!(matches!(
            random_unitary_channel(&ids, &[0.2, 0.3, 0.6]),
            Err(Error::InvalidProbabilities(_))
        ));
        assert!(matches!(
            random_unitary_channel(&[linalg::identity(2) * r(2.0)], &[1.0]),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn correlation_validation() {
        assert!(CorrelationMatrix::from_real(2, &[1.0, 0.5, 0.5, 1.0]).is_ok());
        assert!(matches!(
            CorrelationMatrix::from_real(2, &[1.0, 2.0, 2.0, 1.0]),
            Err(Error::NotCorrelation(_))
        ));
        assert!(matches!(
            CorrelationMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.9]),
            Err(Error::NotCorrelation(_))
        ));
    }

    #[test]
    fn schur_examples() {
        let ones = CorrelationMatrix::from_real(3, &[1.0; 9]).unwrap();
        assert!(schur_channel(&ones).same_as(&Channel::identity(MatrixAlgebra::full(3)), 1e-12));
        let id = CorrelationMatrix::new(linalg::identity(3)).unwrap();
        assert!(schur_channel(&id).same_as(&Channel::dephasing(3), 1e-12));
        let half = CorrelationMatrix::from_real(2, &[1.0, 0.5, 0.5, 1.0]).unwrap();
        let q = schur_channel(&half);
        let out = q.apply_concrete(&matrix_unit(2, 0, 1));
        assert!(linalg::distance(&out, &(matrix_unit(2, 0, 1) * r(0.5))) < 1e-12);
        for e in MatrixAlgebra::full(2).matrix_units() {
            let x = &e.blocks[0];
            assert!(
                linalg::distance(&q.apply_concrete(x), &schur_product(x, half.matrix())) < 1e-12
            );
        }
    }

    #[test]
    fn rank_one_examples() {
        let theta = 1.1;
        let v = [r(1.0), c(theta.cos(), theta.sin())];
        let cm = CMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj());
        let corr = CorrelationMatrix::new(cm).unwrap();
        match rank_one_hull_member(&corr) {
            HullMembership::RankOne { unitary, channel } => {
                assert!((unitary[(0, 0)] - r(1.0)).norm() < 1e-12);
                assert!((unitary[(1, 1)] - v[1]).norm() < 1e-12);
                assert!(channel.same_as(&schur_channel(&corr), 1e-12));
            }
            other => panic!("expected rank one, got {other:?}"),
        }
        let id = CorrelationMatrix::new(linalg::identity(2)).unwrap();
        assert_eq!(
            rank_one_hull_member(&id),
            HullMembership::Unknown { rank: 2 }
        );

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..6 {
            let phases: Vec<Complex64> = (0..n)
                .map(|_| {
                    let t: f64 = rand::Rng::random::<f64>(&mut rng) * 6.0;
                    c(t.cos(), t.sin())
                })
                .collect();
            let cm = CMatrix::from_fn(n, n, |i, j| phases[i] * phases[j].conj());
            let corr = CorrelationMatrix::new(cm).unwrap();
            let HullMembership::RankOne { unitary, channel } = rank_one_hull_member(&corr) else {
                panic!("rank-one matrix not detected");
            };
            assert!(linalg::unitarity_residual(&unitary) < 1e-12);
            assert!(channel.same_as(&schur_channel(&corr), 1e-10));
        }
    }

    #[test]
    fn clifford_examples() {
        let [_, sx, sy, _] = paulis();
        assert_eq!(clifford_generators(1), vec![sx.clone()]);
        let g = clifford_generators(2);
        assert_eq!(g, vec![sx.clone(), sy.clone()]);
        assert!(linalg::frobenius(&(&sx * &sy + &sy * &sx)) < 1e-15);
        for p in 1..=6 {
            let g = clifford_generators(p);
            let d = 1usize << p.div_ceil(2);
            assert_eq!(g.len(), p);
            for (i, xi) in g.iter().enumerate() {
                assert_eq!(xi.nrows(), d);
                assert!(linalg::hermitian_residual(xi) < 1e-15);
                assert!(linalg::distance(&(xi * xi), &linalg::identity(d)) < 1e-15);
                for (j, xj) in g.iter().enumerate() {
                    let t = (xi * xj).trace() / r(d as f64);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((t - r(expected)).norm() <= matrix_tol(d));
                    if i != j {
                        assert!(linalg::frobenius(&(xi * xj + xj * xi)) <= matrix_tol(d));
                    }
                }
            }
        }
    }

    #[test]
    fn real_correlation_examples() {
        let [_, sx, sy, _] = paulis();
        let id = CorrelationMatrix::new(linalg::identity(2)).unwrap();
        let f = real_correlation_factorization(&id).unwrap();
        assert!(linalg::distance(&f.unitaries[0], &sx) < 1e-12);
        assert!(linalg::distance(&f.unitaries[1], &sy) < 1e-12);
        assert!(f
            .factorization
            .channel()
            .same_as(&Channel::dephasing(2), 1e-12));

        let half = CorrelationMatrix::from_real(2, &[1.0, 0.5, 0.5, 1.0]).unwrap();
        let f = real_correlation_factorization(&half).unwrap();
        assert!(linalg::distance(&f.unitaries[0], &sx) < 1e-12);
        let expected = &sx * r(0.5) + &sy * r(0.75f64.sqrt());
        assert!(linalg::distance(&f.unitaries[1], &expected) < 1e-12);
        let t = (&f.unitaries[0] * &f.unitaries[1]).trace() / r(2.0);
        assert!((t - r(0.5)).norm() < 1e-12);

        let ones = CorrelationMatrix::from_real(3, &[1.0; 9]).unwrap();
        let f = real_correlation_factorization(&ones).unwrap();
        assert!(f.unitaries.iter().all(|u| linalg::distance(u, &sx) < 1e-12));
        assert!(f
            .factorization
            .channel()
            .same_as(&Channel::identity(MatrixAlgebra::full(3)), 1e-12));

        let complex = CorrelationMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[r(1.0), c(0.0, 0.5), c(0.0, -0.5), r(1.0)],
        ))
        .unwrap();
        assert!(matches!(
            real_correlation_factorization(&complex),
            Err(Error::NotReal { .. })
        ));
    }

    #[test]
    fn environment_basis_change_gives_equivalent_kraus_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f = random::random_factorization(2, 2, &mut rng);
        // rotate the environment matrix units by a unitary mixing W
        let w = random::haar_unitary(f.channel().kraus_count(), &mut rng);
        let kraus: Vec<AlgebraElement> = (0..w.nrows())
            .map(|k| {
                f.channel()
                    .kraus()
                    .iter()
                    .enumerate()
                    .fold(f.system().zero(), |acc, (j, q)| {
                        acc.add(&q.scale(w[(k, j)]))
                    })
            })
            .collect();
        let rotated = Channel::new(f.system().clone(), kraus).unwrap();
        assert!(rotated.same_as(f.channel(), 1e-12));
        let mix = kraus_equivalence(f.channel(), &rotated).unwrap();
        assert!(mix.unitarity_residual < 1e-9 && mix.reconstruction_residual < 1e-9);
    }

    #[test]
    fn direct_sum_system_factorization() {
        let a = MatrixAlgebra::new(&[(2, 0.5), (1, 0.5)]).unwrap();
        let b = MatrixAlgebra::full(2);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let u0 = random::haar_unitary(4, &mut rng);
        let u1 = random::haar_unitary(2, &mut rng);
        let ab = algebra::tensor_algebra(&a, &b);
        let u = ab.element(vec![u0, u1]).unwrap();
        let kron = algebra::tensor_to_kron(&[&a, &b], &u);
        let f = factorization_from_unitary(&kron, &a, &b).unwrap();
        assert!(verify_one_dilation(&f).passed());
    }
}
