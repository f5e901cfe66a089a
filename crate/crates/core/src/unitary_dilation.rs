//! Unitary dilations of Hilbert-space contractions, and the link between
//! matrix `N`-dilations of channels and unitary `N`-dilations of their
//! representing contractions.

use alloc::vec::Vec;

use crate::algebra::{self, AlgebraElement};
use crate::dilation::NDilation;
use crate::error::{Error, Result};
use crate::gns::{self, Classification, CONTRACTION_SLACK};
use crate::linalg::{self, CMatrix};
use crate::matrix_tol;
#[allow(unused_imports)]
use num_traits::Float;

/// Largest GNS dimension [`bridge_check`] will build a matrix for.
pub const DEFAULT_BRIDGE_CAP: usize = 1024;

/// `√(1 − s²)` for each singular value, with `s` clamped to `[0, 1]`.
fn defect_values(s: &[f64]) -> Vec<f64> {
    s.iter()
        .map(|&s| {
            let s = s.clamp(0.0, 1.0);
            ((1.0 - s) * (1.0 + s)).sqrt()
        })
        .collect()
}

/// `√(I − T*T)`, computed from the SVD `T = W S V*` as `V √(I − S²) V*`.
pub fn defect(t: &CMatrix) -> CMatrix {
    let dec = linalg::svd(t);
    let c = linalg::diag_real(&defect_values(&dec.s));
    &dec.v * c * dec.v.adjoint()
}

/// `√(I − TT*) = W √(I − S²) W*`.
pub fn codefect(t: &CMatrix) -> CMatrix {
    let dec = linalg::svd(t);
    let c = linalg::diag_real(&defect_values(&dec.s));
    &dec.u * c * dec.u.adjoint()
}

/// `‖T √(I − T*T) − √(I − TT*) T‖_F`.
pub fn intertwining_residual(t: &CMatrix) -> f64 {
    linalg::distance(&(t * defect(t)), &(codefect(t) * t))
}

fn check_contraction(t: &CMatrix) -> Result<()> {
    if t.nrows() != t.ncols() {
        return Err(Error::ShapeMismatch("contraction must be square".into()));
    }
    let norm = linalg::spectral_norm(t);
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction { norm });
    }
    Ok(())
}

/// The Julia operator `[[T, −√(I−TT*)], [√(I−T*T), T*]]`.
pub fn julia(t: &CMatrix) -> Result<CMatrix> {
    Ok(egervary_n_dilation(t, 1)?.unitary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionDilation {
    pub t: CMatrix,
    pub n: usize,
    /// `(N+1)h × (N+1)h` unitary; `H` is the first block of coordinates.
    pub unitary: CMatrix,
}

impl ContractionDilation {
    pub fn h(&self) -> usize {
        self.t.nrows()
    }

    /// `P U^k P` restricted to `H`.
    pub fn compression(&self, k: usize) -> CMatrix {
        let h = self.h();
        let mut x = linalg::zeros(self.unitary.nrows(), h);
        x.view_mut((0, 0), (h, h)).copy_from(&linalg::identity(h));
        for _ in 0..k {
            x = &self.unitary * x;
        }
        x.view((0, 0), (h, h)).into_owned()
    }
}

/// Block unitary on `H^{N+1}` whose compressions to the first copy of `H`
/// are `T, T², …, T^N`.
///
/// Column 1 is `(T, D_T, 0, …)`, column `N+1` is `(−D_{T*}, T*, 0, …)`, and
/// columns `2, …, N` carry identity blocks one step below the diagonal, so
/// the defect part `D_T x` travels down the chain for `N` steps before it
/// can return to `H`.
pub fn egervary_n_dilation(t: &CMatrix, n: usize) -> Result<ContractionDilation> {
    check_contraction(t)?;
    if n == 0 {
        return Err(Error::ShapeMismatch(
            "dilation order must be at least 1".into(),
        ));
    }
    let h = t.nrows();
    let size = (n + 1) * h;
    let mut u = linalg::zeros(size, size);
    let mut put = |row: usize, col: usize, m: &CMatrix| {
        u.view_mut((row * h, col * h), (h, h)).copy_from(m);
    };
    put(0, 0, t);
    put(1, 0, &defect(t));
    put(0, n, &(-codefect(t)));
    put(1, n, &t.adjoint());
    let id = linalg::identity(h);
    for k in 1..n {
        put(k + 1, k, &id);
    }
    let residual = linalg::unitarity_residual(&u);
    if residual > matrix_tol(size) {
        return Err(Error::NotUnitary { residual });
    }
    Ok(ContractionDilation {
        t: t.clone(),
        n,
        unitary: u,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionReport {
    /// `‖P U^k P − T^k‖_F` for `k = 1, …, N+1`.
    pub residuals: Vec<f64>,
    pub unitarity_residual: f64,
    pub tolerance: f64,
}

impl CompressionReport {
    /// Exact for all `k ≤ N`; the `k = N + 1` entry is informational.
    pub fn passed(&self) -> bool {
        let n = self.residuals.len() - 1;
        self.unitarity_residual <= self.tolerance
            && self.residuals[..n].iter().all(|&r| r <= self.tolerance)
    }

    pub fn boundary_residual(&self) -> f64 {
        *self.residuals.last().expect("N + 1 entries")
    }
}

pub fn verify_compressions(dil: &ContractionDilation) -> CompressionReport {
    let h = dil.h();
    let mut tk = linalg::identity(h);
    let residuals = (1..=dil.n + 1)
        .map(|k| {
            tk = &dil.t * &tk;
            linalg::distance(&dil.compression(k), &tk)
        })
        .collect();
    CompressionReport {
        residuals,
        unitarity_residual: linalg::unitarity_residual(&dil.unitary),
        tolerance: matrix_tol(dil.unitary.nrows()),
    }
}

/// `‖P U (I − P) U P‖_F`; zero exactly when `H` is semi-invariant at one
/// step.
pub fn semi_invariance_residual(dil: &ContractionDilation) -> f64 {
    let h = dil.h();
    let size = dil.unitary.nrows();
    let mut p = linalg::zeros(size, size);
    p.view_mut((0, 0), (h, h)).copy_from(&linalg::identity(h));
    let q = linalg::identity(size) - &p;
    linalg::frobenius(&(&p * &dil.unitary * q * &dil.unitary * &p))
}

/// `‖[U, P]‖_F`: zero when `H` reduces `U`.
pub fn reducing_residual(dil: &ContractionDilation) -> f64 {
    let h = dil.h();
    let size = dil.unitary.nrows();
    let mut p = linalg::zeros(size, size);
    p.view_mut((0, 0), (h, h)).copy_from(&linalg::identity(h));
    linalg::distance(&(&dil.unitary * &p), &(&p * &dil.unitary))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeReport {
    /// GNS dimension of `A ⊗ B^{⊗N}`.
    pub gns_dim: usize,
    pub unitarity_residual: f64,
    pub projection_residual: f64,
    /// `‖P T_α^M P − T_{(q^M ⊗ id) ∘ Φ}‖_F` for `M = 1, …, N`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Classification of `T_q` itself; anything but unitary means `q` has no
    /// power dilation on a finite matrix algebra.
    pub base_classification: Classification,
    pub tolerance: f64,
}

impl BridgeReport {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
            && self.unitarity_residual <= self.tolerance
            && self.projection_residual <= self.tolerance
    }
}

pub fn bridge_check(dil: &NDilation) -> Result<BridgeReport> {
    bridge_check_with_cap(dil, DEFAULT_BRIDGE_CAP)
}

/// Builds `T_α` on `L²(A ⊗ B^{⊗N})` and checks that it is a unitary
/// `N`-dilation of `T_q ⊗ I` along the subspace `L²(A ⊗ I)`.
///
/// With `Q` an orthonormal basis of `ran P`, `P = QQ*` and
/// `‖P T_α^M P − T_{(q^M ⊗ id) ∘ Φ}‖_F = ‖QQ* T_α^M Q − T_{q^M ⊗ id} Q‖_F`,
/// so only `dim ran P` columns of each power are formed.
pub fn bridge_check_with_cap(dil: &NDilation, cap: usize) -> Result<BridgeReport> {
    let big = dil.big_algebra();
    let g = big.gns_dim();
    if g > cap {
        return Err(Error::DimensionCapExceeded { dim: g, cap });
    }
    let factors = dil.factors();
    let lift = |f: &dyn Fn(&CMatrix) -> CMatrix, x: &AlgebraElement| -> AlgebraElement {
        algebra::kron_to_tensor(&factors, &f(&algebra::tensor_to_kron(&factors, x)))
    };
    let alpha = gns::representing_map(big, |x| lift(&|y| dil.apply_alpha_kron(y, 1), x));
    let u = alpha.matrix();
    let phi = gns::representing_map(big, |x| lift(&|y| dil.phi_kron(y), x));

    let units = dil.base().system().matrix_units();
    let lifted: Vec<AlgebraElement> = units
        .iter()
        .map(|e| algebra::kron_to_tensor(&factors, &dil.embed(&e.to_concrete())))
        .collect();
    let mut q_basis = linalg::zeros(g, lifted.len());
    for (j, x) in lifted.iter().enumerate() {
        let v = gns::coordinates(big, x);
        q_basis.set_column(j, &(&v / linalg::r(v.norm())));
    }
    let projection_residual = linalg::distance(phi.matrix(), &(&q_basis * q_basis.adjoint()));

    let q = dil.base().channel();
    let rest = dil.environment_density().len();
    let mut residuals = Vec::with_capacity(dil.order());
    let mut w = q_basis.clone();
    let mut qm = q.clone();
    for m in 1..=dil.order() {
        w = u * w;
        if m > 1 {
            qm = q.compose(&qm)?;
        }
        let kraus: Vec<CMatrix> = qm.kraus().iter().map(|k| k.to_concrete()).collect();
        let mut target = linalg::zeros(g, lifted.len());
        for (j, x) in lifted.iter().enumerate() {
            let y = algebra::tensor_to_kron(&factors, x);
            let mut out = linalg::zeros(y.nrows(), y.ncols());
            for k in &kraus {
                out += linalg::conjugate_kron_identity(k, rest, &y);
            }
            let v = gns::coordinates(big, &algebra::kron_to_tensor(&factors, &out));
            let norm = gns::coordinates(big, x).norm();
            target.set_column(j, &(v / linalg::r(norm)));
        }
        let compressed = &q_basis * (q_basis.adjoint() * &w);
        residuals.push(linalg::distance(&compressed, &target));
    }
    let base_classification = gns::classify(&gns::representing_matrix(q));
    Ok(BridgeReport {
        gns_dim: g,
        unitarity_residual: linalg::unitarity_residual(u),
        projection_residual,
        max_residual: residuals.iter().copied().fold(0.0, f64::max),
        residuals,
        base_classification,
        tolerance: matrix_tol(g),
    })
}
