//! Seeded sampling of test inputs. Every sampler takes an explicit seed and is
//! a pure function of it.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::qr;
use super::matrix::CMatrix;
use super::state::{DensityMatrix, PureState};

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent per-trial seed derived from a base seed (splitmix64 mixing).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Complex standard normal: E|z|² = 1.
fn complex_normal<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed d×d unitary: Ginibre sample, QR, then the phases of the
/// R diagonal divided out of Q's columns.
pub fn haar_unitary(d: usize, seed: u64) -> CMatrix {
    assert!(d >= 1, "haar_unitary needs d >= 1");
    let g = ginibre(d, d, &mut rng_from_seed(seed));
    let (q, r) = qr(&g);
    let phases: Vec<C64> = (0..d)
        .map(|k| {
            let rkk = r[(k, k)];
            if rkk.norm() > 0.0 {
                rkk / rkk.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    CMatrix::from_fn(d, d, |i, j| q[(i, j)] * phases[j])
}

/// First `cols` columns of a Haar unitary on `rows` dimensions.
pub fn haar_isometry(rows: usize, cols: usize, seed: u64) -> CMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    let u = haar_unitary(rows, seed);
    CMatrix::from_fn(rows, cols, |i, j| u[(i, j)])
}

/// Uniformly random pure state.
pub fn haar_state(d: usize, seed: u64) -> PureState {
    let mut rng = rng_from_seed(seed);
    let amps: Vec<C64> = (0..d).map(|_| complex_normal(&mut rng)).collect();
    PureState::normalized(amps).expect("Gaussian vector is nonzero with probability 1")
}

/// `G G* / tr(G G*)` for a d×d Ginibre `G`.
pub fn random_density(d: usize, seed: u64) -> DensityMatrix {
    assert!(d >= 1, "random_density needs d >= 1");
    let g = ginibre(d, d, &mut rng_from_seed(seed));
    let w = g.matmul(&g.adjoint());
    let t = w.trace().re;
    DensityMatrix::from_matrix_unchecked(w.scale_real(1.0 / t).hermitian_part())
}
