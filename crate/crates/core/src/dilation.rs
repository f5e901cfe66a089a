//! Matrix `N`-dilations `α_N = Ad_{U_N} ∘ σ_N` on `A ⊗ B^{⊗N}`.
//!
//! Elements of the big algebra are handled in the Kronecker picture on
//! `C^{d_A} ⊗ (C^{d_B})^{⊗N}`. The cyclic shift `σ_N` is an index
//! relabeling and `U_N = U ⊗ I` is applied without forming the Kronecker
//! product.

use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{self, AlgebraElement, MatrixAlgebra};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::factorization::UnitaryFactorization;
use crate::linalg::{self, CMatrix};
use crate::matrix_tol;
#[allow(unused_imports)]
use num_traits::Float;

pub const DEFAULT_DIMENSION_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct NDilation {
    base: UnitaryFactorization,
    n: usize,
    big_algebra: MatrixAlgebra,
    /// `perm[i]` is the image of concrete index `i` under the slot shift.
    perm: Vec<usize>,
    rest_dim: usize,
    density: Vec<f64>,
    shift: bool,
}

pub fn build_n_dilation(fact: &UnitaryFactorization, n: usize) -> Result<NDilation> {
    build_n_dilation_with_cap(fact, n, DEFAULT_DIMENSION_CAP)
}

pub fn build_n_dilation_with_cap(
    fact: &UnitaryFactorization,
    n: usize,
    cap: usize,
) -> Result<NDilation> {
    if n == 0 {
        return Err(Error::InvalidAlgebra(
            "dilation order must be at least 1".into(),
        ));
    }
    let da = fact.system().concrete_dim();
    let db = fact.environment().concrete_dim();
    let dim = (0..n)
        .try_fold(da, |acc, _| acc.checked_mul(db))
        .filter(|&d| d <= cap)
        .ok_or(Error::DimensionCapExceeded {
            dim: da.saturating_mul(db.saturating_pow(n as u32)),
            cap,
        })?;
    let env = fact.environment();
    let factors: Vec<&MatrixAlgebra> = core::iter::once(fact.system())
        .chain((0..n).map(|_| env))
        .collect();
    let big_algebra = factors[1..].iter().fold(fact.system().clone(), |acc, f| {
        algebra::tensor_algebra(&acc, f)
    });
    let density = algebra::kron_density(&factors[1..]);
    let rest_dim = dim / (da * db);
    Ok(NDilation {
        base: fact.clone(),
        n,
        big_algebra,
        perm: shift_permutation(da, db, n),
        rest_dim,
        density,
        shift: true,
    })
}

/// `π(a, b_1, …, b_N) = (a, b_N, b_1, …, b_{N−1})` on Kronecker indices.
fn shift_permutation(da: usize, db: usize, n: usize) -> Vec<usize> {
    let env_dim = db.pow(n as u32);
    let top = env_dim / db;
    (0..da * env_dim)
        .map(|i| {
            let (a, env) = (i / env_dim, i % env_dim);
            let (head, last) = (env / db, env % db);
            a * env_dim + last * top + head
        })
        .collect()
}

/// Worst-case location and size of the dilation residual.
#[derive(Debug, Clone, PartialEq)]
pub struct NDilationReport {
    pub n: usize,
    pub max_residual: f64,
    /// Index into the matrix units of the system algebra.
    pub worst_basis_index: usize,
    pub worst_power: usize,
    /// `residuals[M − 1][i]` for power `M` and matrix unit `i`.
    pub residuals: Vec<Vec<f64>>,
    pub tolerance: f64,
}

impl NDilationReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

/// Residuals of the *-automorphism identities for `α_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutomorphismResiduals {
    pub multiplicative: f64,
    pub adjoint: f64,
    pub trace: f64,
    pub unital: f64,
}

impl NDilation {
    pub fn base(&self) -> &UnitaryFactorization {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// `A ⊗ B^{⊗N}` as a block algebra.
    pub fn big_algebra(&self) -> &MatrixAlgebra {
        &self.big_algebra
    }

    /// Concrete dimension `d_A d_B^N`.
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn sigma_permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Factors `[A, B, …, B]` of the big algebra.
    pub fn factors(&self) -> Vec<&MatrixAlgebra> {
        let env = self.base.environment();
        core::iter::once(self.base.system())
            .chain((0..self.n).map(|_| env))
            .collect()
    }

    /// Trace density of `B^{⊗N}` in the Kronecker picture.
    pub fn environment_density(&self) -> &[f64] {
        &self.density
    }

    /// Replaces `σ_N` by the identity. The result is in general no longer a
    /// dilation; used as a negative control.
    pub fn without_shift(mut self) -> Self {
        self.shift = false;
        self
    }

    /// `σ_N(X)[π(i), π(j)] = X[i, j]`.
    pub fn sigma(&self, x: &CMatrix) -> CMatrix {
        if !self.shift {
            return x.clone();
        }
        let d = self.dim();
        let mut out = linalg::zeros(d, d);
        for j in 0..d {
            let pj = self.perm[j];
            for i in 0..d {
                out[(self.perm[i], pj)] = x[(i, j)];
            }
        }
        out
    }

    /// `U_N X U_N*`.
    pub fn apply_u(&self, x: &CMatrix) -> CMatrix {
        linalg::conjugate_kron_identity(self.base.unitary_kron(), self.rest_dim, x)
    }

    /// `U_N = U ⊗ I_{B^{⊗(N−1)}}` as a dense matrix.
    pub fn u_n(&self) -> CMatrix {
        linalg::kron(self.base.unitary_kron(), &linalg::identity(self.rest_dim))
    }

    /// `α_N^{(M)}` on a Kronecker-picture matrix.
    pub fn apply_alpha_kron(&self, x: &CMatrix, m: usize) -> CMatrix {
        let mut y = x.clone();
        for _ in 0..m {
            y = self.apply_u(&self.sigma(&y));
        }
        y
    }

    pub fn apply_alpha(&self, x: &AlgebraElement, m: usize) -> Result<AlgebraElement> {
        self.big_algebra.check(x)?;
        let factors = self.factors();
        let y = self.apply_alpha_kron(&algebra::tensor_to_kron(&factors, x), m);
        Ok(algebra::kron_to_tensor(&factors, &y))
    }

    /// `(id ⊗ tr_{B^{⊗N}})` on a Kronecker-picture matrix.
    pub fn reduce_kron(&self, x: &CMatrix) -> CMatrix {
        algebra::partial_trace_kron(x, self.base.system().concrete_dim(), &self.density)
    }

    /// One-shot `Φ_N(X) = (id ⊗ tr)(X) ⊗ I`.
    pub fn phi_kron(&self, x: &CMatrix) -> CMatrix {
        linalg::kron(&self.reduce_kron(x), &linalg::identity(self.density.len()))
    }

    /// `Φ_N` by tracing out one `B` factor at a time, first slot first.
    pub fn phi_nested_kron(&self, x: &CMatrix) -> CMatrix {
        let da = self.base.system().concrete_dim();
        let db = self.base.environment().concrete_dim();
        let rho = self.base.environment().density_diagonal();
        let mut y = x.clone();
        let mut rest = self.density.len();
        for _ in 0..self.n {
            rest /= db;
            y = trace_first_slot(&y, da, db, rest, &rho);
        }
        linalg::kron(&y, &linalg::identity(self.density.len()))
    }

    pub fn phi(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.big_algebra.check(x)?;
        let factors = self.factors();
        let y = self.phi_kron(&algebra::tensor_to_kron(&factors, x));
        Ok(algebra::kron_to_tensor(&factors, &y))
    }

    pub fn phi_nested(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        self.big_algebra.check(x)?;
        let factors = self.factors();
        let y = self.phi_nested_kron(&algebra::tensor_to_kron(&factors, x));
        Ok(algebra::kron_to_tensor(&factors, &y))
    }

    /// `X ⊗ I_{B^{⊗N}}` for `X` in the block-diagonal picture of `A`.
    pub fn embed(&self, x: &CMatrix) -> CMatrix {
        linalg::kron(x, &linalg::identity(self.density.len()))
    }

    /// Residuals of multiplicativity, adjoint, trace and unit preservation of
    /// `α_N` on the given pairs of big-algebra elements.
    pub fn automorphism_residuals(
        &self,
        pairs: &[(AlgebraElement, AlgebraElement)],
    ) -> Result<AutomorphismResiduals> {
        let mut res = AutomorphismResiduals {
            multiplicative: 0.0,
            adjoint: 0.0,
            trace: 0.0,
            unital: 0.0,
        };
        for (x, y) in pairs {
            let ax = self.apply_alpha(x, 1)?;
            let ay = self.apply_alpha(y, 1)?;
            let axy = self.apply_alpha(&x.mul(y), 1)?;
            res.multiplicative = res.multiplicative.max(axy.distance(&ax.mul(&ay)));
            res.adjoint = res
                .adjoint
                .max(self.apply_alpha(&x.adjoint(), 1)?.distance(&ax.adjoint()));
            let t = self.big_algebra.trace(x)? - self.big_algebra.trace(&ax)?;
            res.trace = res.trace.max(t.norm());
        }
        let id = self.big_algebra.identity();
        res.unital = self.apply_alpha(&id, 1)?.distance(&id);
        Ok(res)
    }
}

/// Traces out the factor of dimension `db` sitting between `C^{da}` and
/// `C^{rest}`.
fn trace_first_slot(x: &CMatrix, da: usize, db: usize, rest: usize, rho: &[f64]) -> CMatrix {
    let d = da * rest;
    CMatrix::from_fn(d, d, |i, j| {
        let (a, r) = (i / rest, i % rest);
        let (ap, rp) = (j / rest, j % rest);
        rho.iter()
            .enumerate()
            .map(|(b, &w)| x[((a * db + b) * rest + r, (ap * db + b) * rest + rp)] * w)
            .sum()
    })
}

/// Compares `Φ_N(α^{(M)}(E ⊗ I))` with `q^{(M)}(E) ⊗ I` for every matrix unit
/// `E` of the system algebra and every `M = 1, …, N`.
pub fn verify_n_dilation(dil: &NDilation) -> NDilationReport {
    let q = dil.base.channel();
    let units = dil.base.system().matrix_units();
    let env_scale = (dil.density.len() as f64).sqrt();
    let mut residuals = vec![Vec::with_capacity(units.len()); dil.n];
    for e in &units {
        let mut x = dil.embed(&e.to_concrete());
        let mut qe = e.clone();
        for m in 1..=dil.n {
            x = dil.apply_alpha_kron(&x, 1);
            qe = q.apply_unchecked(&qe);
            // ‖Y ⊗ I‖_F = ‖Y‖_F √(d_B^N)
            let r = linalg::distance(&dil.reduce_kron(&x), &qe.to_concrete()) * env_scale;
            residuals[m - 1].push(r);
        }
    }
    let mut report = NDilationReport {
        n: dil.n,
        max_residual: 0.0,
        worst_basis_index: 0,
        worst_power: 1,
        residuals,
        tolerance: matrix_tol(dil.dim()),
    };
    for (m, row) in report.residuals.iter().enumerate() {
        for (i, &r) in row.iter().enumerate() {
            if r > report.max_residual {
                report.max_residual = r;
                report.worst_basis_index = i;
                report.worst_power = m + 1;
            }
        }
    }
    report
}

/// `max ‖(id ⊗ tr_B)((q ⊗ id)(Y)) − q((id ⊗ tr_B)(Y))‖_F` over the matrix
/// units `Y` of `A ⊗ B`.
pub fn commute_identity_check(a: &MatrixAlgebra, b: &MatrixAlgebra, q: &Channel) -> Result<f64> {
    if q.domain() != a {
        return Err(Error::DomainMismatch);
    }
    let da = a.concrete_dim();
    let db = b.concrete_dim();
    let rho = b.density_diagonal();
    let kraus: Vec<CMatrix> = q.kraus().iter().map(|k| k.to_concrete()).collect();
    let factors = [a, b];
    let mut worst: f64 = 0.0;
    for y in algebra::tensor_algebra(a, b).matrix_units() {
        let ym = algebra::tensor_to_kron(&factors, &y);
        let mut qy = linalg::zeros(da * db, da * db);
        for k in &kraus {
            qy += linalg::conjugate_kron_identity(k, db, &ym);
        }
        let lhs = algebra::partial_trace_kron(&qy, da, &rho);
        let rhs = q.apply_concrete(&algebra::partial_trace_kron(&ym, da, &rho));
        worst = worst.max(linalg::distance(&lhs, &rhs));
    }
    Ok(worst)
}
