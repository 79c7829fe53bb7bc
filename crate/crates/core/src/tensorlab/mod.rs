//! Dense complex linear algebra and tensor-structure utilities.
//!
//! All composite spaces use A-major indexing: `index(a, b) = a·dB + b`.

mod linalg;
mod matrix;
mod random;
mod state;

pub use linalg::{
    eigh, eigvalsh, lstsq, numerical_rank, polar_isometry, rank_is_borderline, singular_values,
    trace_distance, trace_norm_hermitian, Eigh,
};
pub use matrix::CMatrix;
pub use random::{derive_seed, haar_isometry, haar_state, haar_unitary, random_density};
pub use state::{BipartiteDims, DensityMatrix, PureState, Subsystem};

pub(crate) use matrix::{ONE, ZERO};

use crate::error::Result;

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = b.shape();
    CMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Traces out `which`, returning the reduced operator on the other factor.
pub fn partial_trace(m: &CMatrix, dims: BipartiteDims, which: Subsystem) -> Result<CMatrix> {
    dims.check_square(m, "partial_trace input")?;
    let (da, db) = (dims.da, dims.db);
    Ok(match which {
        Subsystem::A => CMatrix::from_fn(db, db, |b, b2| {
            (0..da)
                .map(|a| m[(dims.index(a, b), dims.index(a, b2))])
                .sum()
        }),
        Subsystem::B => CMatrix::from_fn(da, da, |a, a2| {
            (0..db)
                .map(|b| m[(dims.index(a, b), dims.index(a2, b))])
                .sum()
        }),
    })
}

/// The isometry `V_ν: ψ ↦ ψ ⊗ ν` from a dA-dimensional space into dA·dim(ν).
pub fn embed_isometry(nu: &PureState, da: usize) -> CMatrix {
    kron(&CMatrix::identity(da), &CMatrix::column(nu.amplitudes()))
}
