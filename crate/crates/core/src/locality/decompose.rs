use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tensorlab::{eigh, kron, BipartiteDims, CMatrix, DensityMatrix, ONE};

/// One signed term `μ · ρ ⊗ σ`.
#[derive(Clone, Debug)]
pub struct ProductTerm {
    pub mu: f64,
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
}

/// Orthogonal Hermitian basis of d×d matrices: the identity followed by the
/// generalized Gell-Mann matrices (symmetric, antisymmetric, diagonal).
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = vec![CMatrix::identity(d)];
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = ONE;
            sym[(k, j)] = ONE;
            basis.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = -C64::i();
            anti[(k, j)] = C64::i();
            basis.push(anti);
        }
    }
    for l in 1..d {
        let s = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(d, d);
        for j in 0..l {
            diag[(j, j)] = C64::new(s, 0.0);
        }
        diag[(l, l)] = C64::new(-s * l as f64, 0.0);
        basis.push(diag);
    }
    basis
}

/// Writes a Hermitian matrix as `Σ w · state` with at most two terms: the
/// normalized positive part with weight `tr P₊` and the normalized negative
/// part with weight `−tr P₋`.
pub fn signed_state_split(h: &CMatrix) -> Vec<(f64, DensityMatrix)> {
    let e = eigh(h);
    let scale = e.values.iter().map(|v| v.abs()).fold(0.0_f64, f64::max);
    let cut = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let d = h.rows();
    let mut out = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let mut part = CMatrix::zeros(d, d);
        let mut weight = 0.0;
        for (k, &lam) in e.values.iter().enumerate() {
            if sign * lam > cut {
                let v = e.vector(k);
                part = &part + &CMatrix::outer(&v, &v).scale_real(sign * lam);
                weight += sign * lam;
            }
        }
        if weight > 0.0 {
            let state = part.scale_real(1.0 / weight).hermitian_part();
            out.push((sign * weight, DensityMatrix::from_matrix_unchecked(state)));
        }
    }
    out
}

/// Signed product-state decomposition `τ = Σ μ_i ρ_i ⊗ σ_i` obtained by
/// expanding over the product Hermitian basis and splitting each factor into
/// states. Weights are real, may be negative, and sum to `tr τ`.
pub fn decompose_product_basis(
    tau: &DensityMatrix,
    dims: BipartiteDims,
) -> Result<Vec<ProductTerm>> {
    if tau.dim() != dims.total() {
        return Err(Error::dims(format!(
            "state has dim {}, dims {}x{} need {}",
            tau.dim(),
            dims.da,
            dims.db,
            dims.total()
        )));
    }
    let ga = hermitian_basis(dims.da);
    let hb = hermitian_basis(dims.db);
    let split_a: Vec<_> = ga.iter().map(signed_state_split).collect();
    let split_b: Vec<_> = hb.iter().map(signed_state_split).collect();
    let norm_a: Vec<f64> = ga.iter().map(|g| g.hs_inner(g).re).collect();
    let norm_b: Vec<f64> = hb.iter().map(|h| h.hs_inner(h).re).collect();

    let mut terms = Vec::new();
    for (a, g) in ga.iter().enumerate() {
        for (b, h) in hb.iter().enumerate() {
            let c = kron(g, h).hs_inner(tau.matrix()).re / (norm_a[a] * norm_b[b]);
            if c == 0.0 {
                continue;
            }
            for (alpha, rho) in &split_a[a] {
                for (beta, sigma) in &split_b[b] {
                    terms.push(ProductTerm {
                        mu: c * alpha * beta,
                        rho: rho.clone(),
                        sigma: sigma.clone(),
                    });
                }
            }
        }
    }
    Ok(terms)
}
