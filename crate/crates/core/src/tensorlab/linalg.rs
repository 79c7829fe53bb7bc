//! Thin wrappers over nalgebra's dense decompositions, adapted to the
//! row-major [`CMatrix`] carrier.
//!
//! Hermitian eigendecomposition contract: eigenvalues ascending, eigenvectors
//! orthonormal within 1e-10, residual ‖Hv − λv‖ ≤ 1e-10·‖H‖.

use num_complex::Complex64 as C64;

use super::matrix::CMatrix;
use super::random::haar_unitary;

/// Eigenpairs of a Hermitian matrix, ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// Eigenvalues largest first.
    pub fn descending(&self) -> Vec<f64> {
        self.values.iter().rev().copied().collect()
    }
}

/// Hermitian eigendecomposition. The input is symmetrized first so tiny
/// anti-Hermitian noise does not leak into the spectrum.
///
/// nalgebra's implicit QR sweep can return NaN on some highly degenerate
/// inputs (e.g. the Choi matrix of SWAP on 4⊗4). Such results, or any result
/// violating the residual contract, are recomputed on a fixed Haar-random
/// unitary conjugate `Q H Q*` and rotated back.
pub fn eigh(h: &CMatrix) -> Eigh {
    assert!(h.is_square(), "eigh needs a square matrix");
    let sym = h.hermitian_part();
    let first = eigh_raw(&sym);
    if eigh_is_sound(&sym, &first) {
        return first;
    }
    let n = h.rows();
    for attempt in 0..3 {
        let q = haar_unitary(n, 0x5eed_0000 + attempt);
        let rotated = eigh_raw(&q.conjugate(&sym).hermitian_part());
        let e = Eigh {
            vectors: q.adjoint().matmul(&rotated.vectors),
            values: rotated.values,
        };
        if eigh_is_sound(&sym, &e) {
            return e;
        }
    }
    panic!("Hermitian eigendecomposition failed to converge for a {n}x{n} matrix");
}

fn eigh_raw(sym: &CMatrix) -> Eigh {
    let eig = sym.to_nalgebra().symmetric_eigen();
    let n = sym.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Eigh { values, vectors }
}

fn eigh_is_sound(h: &CMatrix, e: &Eigh) -> bool {
    if e.values.iter().any(|v| !v.is_finite())
        || e.vectors.as_slice().iter().any(|z| !z.is_finite())
    {
        return false;
    }
    let scale = 1.0 + h.frobenius_norm();
    let hv = h.matmul(&e.vectors);
    let n = h.rows();
    let residual = (0..n)
        .flat_map(|i| (0..n).map(move |k| (i, k)))
        .map(|(i, k)| (hv[(i, k)] - e.vectors[(i, k)] * e.values[k]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    residual <= 1e-10 * scale && e.vectors.isometry_defect() <= 1e-10 * n.max(1) as f64
}

pub fn eigvalsh(h: &CMatrix) -> Vec<f64> {
    eigh(h).values
}

/// Number of eigenvalues above `rel_tol · λ_max` (λ_max clamped at zero).
pub fn numerical_rank(values: &[f64], rel_tol: f64) -> usize {
    let top = values.iter().copied().fold(0.0_f64, f64::max);
    if top <= 0.0 {
        return 0;
    }
    values.iter().filter(|&&v| v > rel_tol * top).count()
}

/// Whether some eigenvalue sits within a factor 10 of the relative threshold.
pub fn rank_is_borderline(values: &[f64], rel_tol: f64) -> bool {
    let top = values.iter().copied().fold(0.0_f64, f64::max);
    if top <= 0.0 {
        return false;
    }
    let cut = rel_tol * top;
    values.iter().any(|&v| v > cut / 10.0 && v < cut * 10.0)
}

/// Singular values, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Nearest isometry in Frobenius norm: `W V*` from `M = W Σ V*`.
pub fn polar_isometry(m: &CMatrix) -> CMatrix {
    let svd = m.to_nalgebra().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    CMatrix::from_nalgebra(&(u * v_t))
}

/// Least-squares solution of `A x = B` (columnwise) through the SVD,
/// discarding singular values below `eps · σ_max`.
pub fn lstsq(a: &CMatrix, b: &CMatrix, eps: f64) -> CMatrix {
    let svd = a.to_nalgebra().svd(true, true);
    let cutoff = eps * svd.singular_values.max();
    let x = svd
        .solve(&b.to_nalgebra(), cutoff)
        .expect("singular vectors requested");
    CMatrix::from_nalgebra(&x)
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(h: &CMatrix) -> f64 {
    eigvalsh(h).iter().map(|v| v.abs()).sum()
}

/// Trace distance ½‖a − b‖₁ between Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    0.5 * trace_norm_hermitian(&(a - b))
}

/// QR factorization `(Q, R)` with `Q` square unitary.
pub(crate) fn qr(m: &CMatrix) -> (CMatrix, CMatrix) {
    let qr = m.to_nalgebra().qr();
    (
        CMatrix::from_nalgebra(&qr.q()),
        CMatrix::from_nalgebra(&qr.r()),
    )
}
