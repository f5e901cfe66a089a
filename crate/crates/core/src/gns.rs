//! Representing contractions `T_q` on the GNS space `L²(A, tr)`.
//!
//! Coordinates are taken against the orthonormal basis `E_ab / √(w_i/n_i)`
//! of matrix units, blocks in order and row-major inside each block. For a
//! single full block this basis is a uniform rescaling of the canonical
//! matrix units, so `[T_q] = Σ q_k ⊗ conj(q_k)` holds verbatim.
//!
//! Anti-linear maps such as the conjugation `C` are applied as
//! conjugate-then-permute and never stored as matrices.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::algebra::{AlgebraElement, MatrixAlgebra};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{self, r, CMatrix, CVector};
use crate::matrix_tol;

/// Singular values within this distance of 1 count as isometric.
pub const UNIT_SINGULAR_TOL: f64 = 1e-8;
/// Singular values in `(1 − WARN, 1 − UNIT_SINGULAR_TOL)` are ambiguous.
pub const SPECTRAL_WARNING_BAND: f64 = 1e-6;
/// Allowed excess of the operator norm over 1.
pub const CONTRACTION_SLACK: f64 = 1e-12;
/// Tolerance of the structural tests in [`classify`].
pub const CLASSIFY_TOL: f64 = 1e-8;
/// Maximum sine of the angle between the two multiplicative-domain routes.
pub const DOMAIN_ANGLE_TOL: f64 = 1e-6;

/// GNS coordinates of `x`.
pub fn coordinates(a: &MatrixAlgebra, x: &AlgebraElement) -> CVector {
    let mut v = Vec::with_capacity(a.gns_dim());
    for (i, m) in x.blocks.iter().enumerate() {
        let s = r(unit_norm(a, i));
        v.extend(
            m.row_iter()
                .flat_map(|row| row.iter().map(|z| z * s).collect::<Vec<_>>()),
        );
    }
    CVector::from_vec(v)
}

/// Inverse of [`coordinates`].
pub fn element(a: &MatrixAlgebra, v: &CVector) -> AlgebraElement {
    let mut offset = 0;
    let blocks = a
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let s = r(1.0 / unit_norm(a, i));
            let m = CMatrix::from_fn(b.dim, b.dim, |x, y| v[offset + x * b.dim + y] * s);
            offset += b.dim * b.dim;
            m
        })
        .collect();
    AlgebraElement { blocks }
}

/// `‖E_ab‖ = √(w_i / n_i)` for a matrix unit of block `i`.
fn unit_norm(a: &MatrixAlgebra, block: usize) -> f64 {
    let b = a.blocks()[block];
    (b.weight / b.dim as f64).sqrt()
}

/// The orthonormal basis vectors `e_k` as algebra elements.
pub fn basis(a: &MatrixAlgebra) -> Vec<AlgebraElement> {
    a.unit_indices()
        .into_iter()
        .map(|idx| a.unit(idx).scale(r(1.0 / unit_norm(a, idx.block))))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepContraction {
    matrix: CMatrix,
    algebra: MatrixAlgebra,
    source: Option<Channel>,
}

impl RepContraction {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn algebra(&self) -> &MatrixAlgebra {
        &self.algebra
    }

    pub fn source(&self) -> Option<&Channel> {
        self.source.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values(&self.matrix)
    }

    /// Coordinates of the identity, which has unit norm.
    pub fn identity_vector(&self) -> CVector {
        coordinates(&self.algebra, &self.algebra.identity())
    }

    /// `max(‖T 1 − 1‖, ‖T* 1 − 1‖)`.
    pub fn fixed_point_residual(&self) -> f64 {
        let one = self.identity_vector();
        let a = (&self.matrix * &one - &one).norm();
        let b = (self.matrix.adjoint() * &one - &one).norm();
        a.max(b)
    }
}

/// `T_q` by expanding each `q(e_k)` in the orthonormal basis.
pub fn representing_matrix(ch: &Channel) -> RepContraction {
    let a = ch.domain();
    let mut rep = representing_map(a, |x| ch.apply_unchecked(x));
    rep.source = Some(ch.clone());
    rep
}

/// Matrix of an arbitrary linear map on `A` in the orthonormal GNS basis.
pub fn representing_map(
    a: &MatrixAlgebra,
    f: impl Fn(&AlgebraElement) -> AlgebraElement,
) -> RepContraction {
    let g = a.gns_dim();
    let mut m = linalg::zeros(g, g);
    for (k, e) in basis(a).iter().enumerate() {
        m.set_column(k, &coordinates(a, &f(e)));
    }
    RepContraction {
        matrix: m,
        algebra: a.clone(),
        source: None,
    }
}

/// `Σ q_k ⊗ conj(q_k)` for a channel on a single full block.
pub fn representing_matrix_kron(ch: &Channel) -> Result<CMatrix> {
    let n = ch
        .domain()
        .full_block_dim()
        .ok_or(Error::RequiresFullBlock)?;
    let mut m = linalg::zeros(n * n, n * n);
    for k in ch.kraus() {
        let q = &k.blocks[0];
        m += linalg::kron(q, &q.map(|z| z.conj()));
    }
    Ok(m)
}

/// `[L_B] = B ⊗ I` in the row-major basis of `C^{n×n}`.
pub fn left_mult_matrix(b: &CMatrix) -> CMatrix {
    linalg::kron(b, &linalg::identity(b.nrows()))
}

/// `[R_B] = I ⊗ Bᵀ` in the row-major basis of `C^{n×n}`.
pub fn right_mult_matrix(b: &CMatrix) -> CMatrix {
    linalg::kron(&linalg::identity(b.nrows()), &b.transpose())
}

/// The tensor swap `S(x ⊗ y) = y ⊗ x` on `C^n ⊗ C^n`; also the representing
/// matrix of the transpose map.
pub fn swap_matrix(n: usize) -> CMatrix {
    crate::factorization::swap_unitary(n)
}

/// The conjugation `C = S ∘ cc`: coordinates of `X` to coordinates of `X*`.
pub fn conjugation_apply(a: &MatrixAlgebra, v: &CVector) -> CVector {
    let mut out = v.clone();
    let mut offset = 0;
    for b in a.blocks() {
        let n = b.dim;
        for i in 0..n {
            for j in 0..n {
                out[offset + j * n + i] = v[offset + i * n + j].conj();
            }
        }
        offset += n * n;
    }
    out
}

/// `max_k ‖C T e_k − T C e_k‖` over the orthonormal basis.
pub fn check_conjugation_commutes(t: &RepContraction) -> f64 {
    let g = t.dim();
    let a = &t.algebra;
    (0..g)
        .map(|k| {
            let mut e = CVector::zeros(g);
            e[k] = r(1.0);
            let lhs = conjugation_apply(a, &(&t.matrix * &e));
            let rhs = &t.matrix * conjugation_apply(a, &e);
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// `T` unitary: the channel is a *-automorphism.
    Unitary,
    /// `T` an orthogonal projection: a trace-preserving conditional expectation.
    Projection,
    /// `T` a partial isometry: a *-monomorphism after a conditional expectation.
    PartialIsometry,
    GenericContraction,
}

/// Structural type of `T` from its singular values, idempotence and
/// self-adjointness.
pub fn classify(t: &RepContraction) -> Classification {
    classify_matrix(&t.matrix)
}

pub fn classify_matrix(t: &CMatrix) -> Classification {
    let s = linalg::singular_values(t);
    if s.iter().all(|&x| (x - 1.0).abs() <= CLASSIFY_TOL) {
        return Classification::Unitary;
    }
    let idempotent = linalg::distance(&(t * t), t) <= CLASSIFY_TOL;
    let hermitian = linalg::hermitian_residual(t) <= CLASSIFY_TOL;
    if idempotent && hermitian {
        return Classification::Projection;
    }
    if s.iter()
        .all(|&x| x <= CLASSIFY_TOL || (x - 1.0).abs() <= CLASSIFY_TOL)
    {
        return Classification::PartialIsometry;
    }
    Classification::GenericContraction
}

/// [`classify`] together with the matching channel-level predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub class: Classification,
    /// `max ‖q(XY) − q(X)q(Y)‖` over matrix units.
    pub multiplicativity_residual: f64,
    /// `max(‖q∘q − q‖, ‖q − q†‖)` on Choi matrices.
    pub expectation_residual: f64,
    /// `‖T − T P_Mult‖` with `P_Mult` from the direct multiplicative domain.
    pub domain_residual: f64,
    /// The predicate for `class` holds and the predicates of the stronger
    /// classes fail.
    pub consistent: bool,
}

pub fn classify_channel(ch: &Channel) -> Result<ClassificationReport> {
    let t = representing_matrix(ch);
    let class = classify(&t);
    let a = ch.domain();
    let units = a.matrix_units();
    let mut mult: f64 = 0.0;
    let images: Vec<AlgebraElement> = units.iter().map(|e| ch.apply_unchecked(e)).collect();
    for (x, qx) in units.iter().zip(&images) {
        for (y, qy) in units.iter().zip(&images) {
            let lhs = ch.apply_unchecked(&x.mul(y));
            mult = mult.max(lhs.distance(&qx.mul(qy)));
        }
    }
    let qq = ch.compose(ch)?;
    let expectation = ch.choi_distance(&qq).max(ch.choi_distance(&ch.dual()));
    let domain = direct_multiplicative_domain(ch);
    let p = linalg::projector(&domain, t.dim());
    let domain_residual = linalg::distance(&(&t.matrix * &p), &t.matrix);

    let tol = CLASSIFY_TOL * (t.dim() as f64).sqrt();
    let is_auto = mult <= tol;
    let is_exp = expectation <= tol;
    let is_pi = domain_residual <= tol;
    let consistent = match class {
        Classification::Unitary => is_auto,
        Classification::Projection => !is_auto && is_exp,
        Classification::PartialIsometry => !is_auto && !is_exp && is_pi,
        Classification::GenericContraction => !is_auto && !is_exp && !is_pi,
    };
    Ok(ClassificationReport {
        class,
        multiplicativity_residual: mult,
        expectation_residual: expectation,
        domain_residual,
        consistent,
    })
}

/// `T = V + C` with `V` a partial isometry and `‖C‖ < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitParts {
    pub v: CMatrix,
    pub c_strict: CMatrix,
    /// Right singular vectors with singular value 1: `ker V^⊥`.
    pub rank_one_space: CMatrix,
    /// Left singular vectors with singular value 1: `ran V`.
    pub range_space: CMatrix,
    /// Some singular value falls in the ambiguous band below 1.
    pub spectral_gap_warning: bool,
}

impl SplitParts {
    /// Largest violation among `T = V + C`, `V*V` idempotent, and the
    /// nesting `ker C^⊥ ⊆ ker V`, `ran C ⊆ ran V^⊥`.
    pub fn invariant_residual(&self, t: &CMatrix) -> f64 {
        let sum = linalg::distance(&(&self.v + &self.c_strict), t);
        let vv = self.v.adjoint() * &self.v;
        let idem = linalg::distance(&(&vv * &vv), &vv);
        let kernel_nest = linalg::frobenius(&(&self.v * self.c_strict.adjoint()));
        let range_nest = linalg::frobenius(&(self.v.adjoint() * &self.c_strict));
        sum.max(idem).max(kernel_nest).max(range_nest)
    }

    pub fn strict_norm(&self) -> f64 {
        linalg::spectral_norm(&self.c_strict)
    }
}

pub fn isometric_split(t: &CMatrix) -> Result<SplitParts> {
    let dec = linalg::svd(t);
    let norm = dec.s.first().copied().unwrap_or(0.0);
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NotContraction { norm });
    }
    let g = t.nrows();
    let ones: Vec<usize> = (0..dec.s.len())
        .filter(|&k| dec.s[k] >= 1.0 - UNIT_SINGULAR_TOL)
        .collect();
    let spectral_gap_warning = dec
        .s
        .iter()
        .any(|&x| x > 1.0 - SPECTRAL_WARNING_BAND && x < 1.0 - UNIT_SINGULAR_TOL);
    let u1 = linalg::select_columns(&dec.u, &ones);
    let v1 = linalg::select_columns(&dec.v, &ones);
    let v = &u1 * v1.adjoint();
    let c_strict = t - &v;
    debug_assert_eq!(v.nrows(), g);
    Ok(SplitParts {
        v,
        c_strict,
        rank_one_space: v1,
        range_space: u1,
        spectral_gap_warning,
    })
}

/// Equal defect indices `dim ker V = dim ran V^⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DefectIndices {
    pub kernel: usize,
    pub cokernel: usize,
}

pub fn defect_indices(t: &CMatrix) -> Result<DefectIndices> {
    let split = isometric_split(t)?;
    let g = t.nrows();
    let idx = DefectIndices {
        kernel: g - split.rank_one_space.ncols(),
        cokernel: g - split.range_space.ncols(),
    };
    debug_assert_eq!(idx.kernel, idx.cokernel);
    Ok(idx)
}

/// Dimensions of the unital *-subalgebras of `C^{n×n}`: `Σ k_i²` over
/// decompositions `n = Σ k_i m_i`.
pub fn subalgebra_dimensions(n: usize) -> Vec<usize> {
    fn walk(remaining: usize, min_pair: (usize, usize), acc: usize, out: &mut Vec<usize>) {
        if remaining == 0 {
            out.push(acc);
            return;
        }
        for k in 1..=remaining {
            for m in 1..=remaining / k {
                if (k, m) < min_pair {
                    continue;
                }
                walk(remaining - k * m, (k, m), acc + k * k, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(n, (1, 1), 0, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

/// The two computations of `Mult(q)` and their agreement.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeDomain {
    /// `ker V^⊥` from the isometric split.
    pub spectral: CMatrix,
    /// Kernel of the Stinespring defect map, closed under adjoints.
    pub direct: CMatrix,
    pub dim: usize,
    /// Sine of the largest principal angle between the two routes.
    pub angle: f64,
    /// `‖(I − P) (x_i x_j)‖` and `‖(I − P) x_i*‖` over basis elements.
    pub closure_residual: f64,
    /// `max ‖q(XB) − q(X)q(B)‖, ‖q(BX) − q(B)q(X)‖` for `X` in the domain,
    /// `B` a matrix unit.
    pub bimodule_residual: f64,
}

/// Stinespring isometry `V x = Σ_k (q_k* x) ⊗ e_k` in the concrete picture.
fn stinespring(ch: &Channel) -> CMatrix {
    let d = ch.domain().concrete_dim();
    let p = ch.kraus_count();
    let mut v = linalg::zeros(d * p, d);
    for (k, q) in ch.kraus().iter().enumerate() {
        let qa = q.to_concrete().adjoint();
        for i in 0..d {
            for j in 0..d {
                v[(i * p + k, j)] = qa[(i, j)];
            }
        }
    }
    v
}

/// `{X : q(X*X) = q(X)*q(X), q(XX*) = q(X)q(X)*}` as GNS coordinates.
///
/// With the Stinespring form `q(X) = V*(X ⊗ I)V`, the Schwarz defect is
/// `V*(X* ⊗ I)(I − VV*)(X ⊗ I)V`, which vanishes exactly when the linear map
/// `X ↦ (I − VV*)(X ⊗ I)V` does. The adjoint condition intersects that
/// kernel with its image under `C`.
pub fn direct_multiplicative_domain(ch: &Channel) -> CMatrix {
    let a = ch.domain();
    let d = a.concrete_dim();
    let p = ch.kraus_count();
    let v = stinespring(ch);
    let defect = linalg::identity(d * p) - &v * v.adjoint();
    let rows = d * p * d;
    let g = a.gns_dim();
    let mut map = linalg::zeros(rows, g);
    for (k, e) in basis(a).iter().enumerate() {
        let x = e.to_concrete();
        let img = &defect * linalg::left_mul_kron_identity(&x, p, &v);
        map.set_column(k, &linalg::vec_row_major(&img));
    }
    let scale = linalg::spectral_norm(&map).max(1.0);
    let kernel = linalg::null_space(&map, 2e-8 * scale);
    let mut adj = kernel.clone();
    for j in 0..kernel.ncols() {
        let col = kernel.column(j).into_owned();
        adj.set_column(j, &conjugation_apply(a, &col));
    }
    linalg::intersection(&kernel, &adj, 1e-8)
}

pub fn multiplicative_domain(ch: &Channel) -> Result<MultiplicativeDomain> {
    let t = representing_matrix(ch);
    let split = isometric_split(&t.matrix)?;
    let spectral = split.rank_one_space;
    let direct = direct_multiplicative_domain(ch);
    let angle = linalg::subspace_angle(&spectral, &direct);
    if spectral.ncols() != direct.ncols() || angle > DOMAIN_ANGLE_TOL {
        return Err(Error::MultiplicativeDomainMismatch {
            spectral: spectral.ncols(),
            direct: direct.ncols(),
            angle,
        });
    }
    let a = ch.domain();
    let g = a.gns_dim();
    let off = linalg::identity(g) - linalg::projector(&direct, g);
    let elems: Vec<AlgebraElement> = (0..direct.ncols())
        .map(|j| element(a, &direct.column(j).into_owned()))
        .collect();
    let mut closure: f64 = 0.0;
    for x in &elems {
        closure = closure.max((&off * coordinates(a, &x.adjoint())).norm());
        for y in &elems {
            closure = closure.max((&off * coordinates(a, &x.mul(y))).norm());
        }
    }
    let mut bimodule: f64 = 0.0;
    for x in &elems {
        let qx = ch.apply_unchecked(x);
        for b in a.matrix_units() {
            let qb = ch.apply_unchecked(&b);
            bimodule = bimodule.max(ch.apply_unchecked(&x.mul(&b)).distance(&qx.mul(&qb)));
            bimodule = bimodule.max(ch.apply_unchecked(&b.mul(x)).distance(&qb.mul(&qx)));
        }
    }
    Ok(MultiplicativeDomain {
        dim: direct.ncols(),
        spectral,
        direct,
        angle,
        closure_residual: closure,
        bimodule_residual: bimodule,
    })
}

/// `∩_k Mult(q^{(k)})` by iteration, against the closed form `ker V^⊥ ∩ ran V`.
#[derive(Debug, Clone, PartialEq)]
pub struct StableDomain {
    pub iterative: CMatrix,
    /// Dimension of the running intersection after each power.
    pub history: Vec<usize>,
    /// First power after which the intersection no longer shrinks.
    pub stabilized_at: usize,
    /// The last power did not shrink the intersection.
    pub converged: bool,
    pub closed_form: CMatrix,
    pub angle: f64,
    pub agrees: bool,
}

pub fn default_max_power(a: &MatrixAlgebra) -> usize {
    2 * a.gns_dim()
}

pub fn stable_multiplicative_domain(ch: &Channel, max_power: usize) -> Result<StableDomain> {
    let max_power = max_power.max(1);
    let g = ch.domain().gns_dim();
    let mut running = linalg::identity(g);
    let mut history = Vec::with_capacity(max_power);
    let mut power = ch.clone();
    for k in 1..=max_power {
        if k > 1 {
            power = ch.compose(&power)?;
        }
        let mk = direct_multiplicative_domain(&power);
        running = linalg::intersection(&running, &mk, 1e-8);
        history.push(running.ncols());
    }
    let last = *history.last().expect("at least one power");
    let stabilized_at = history
        .iter()
        .position(|&h| h == last)
        .map_or(max_power, |i| i + 1);
    let converged = history.len() < 2 || history[history.len() - 2] == last;

    let split = isometric_split(&representing_matrix(ch).matrix)?;
    let closed_form = linalg::intersection(&split.rank_one_space, &split.range_space, 1e-8);
    let angle = linalg::subspace_angle(&running, &closed_form);
    Ok(StableDomain {
        agrees: closed_form.ncols() == running.ncols() && angle <= DOMAIN_ANGLE_TOL,
        iterative: running,
        history,
        stabilized_at,
        converged,
        closed_form,
        angle,
    })
}

/// Self-adjointness of `ker T_q` and `(ran T_q)^⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheck {
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub kernel_residual: f64,
    pub cokernel_residual: f64,
    pub tolerance: f64,
}

impl KernelCheck {
    pub fn passed(&self) -> bool {
        self.kernel_residual <= self.tolerance && self.cokernel_residual <= self.tolerance
    }
}

pub fn kernel_selfadjointness_check(ch: &Channel) -> KernelCheck {
    let t = representing_matrix(ch);
    let a = ch.domain();
    let g = t.dim();
    let tol = 1e-8;
    let residual = |space: &CMatrix| {
        let off = linalg::identity(g) - linalg::projector(space, g);
        (0..space.ncols())
            .map(|j| (&off * conjugation_apply(a, &space.column(j).into_owned())).norm())
            .fold(0.0, f64::max)
    };
    let kernel = linalg::null_space(&t.matrix, tol);
    let cokernel = linalg::null_space(&t.matrix.adjoint(), tol);
    KernelCheck {
        kernel_dim: kernel.ncols(),
        cokernel_dim: cokernel.ncols(),
        kernel_residual: residual(&kernel),
        cokernel_residual: residual(&cokernel),
        tolerance: matrix_tol(g),
    }
}

/// Coordinates of the standard basis vectors, for tests and callers that
/// want explicit columns.
pub fn unit_vectors(g: usize) -> Vec<CVector> {
    (0..g)
        .map(|k| {
            let mut e = CVector::zeros(g);
            e[k] = r(1.0);
            e
        })
        .collect()
}
