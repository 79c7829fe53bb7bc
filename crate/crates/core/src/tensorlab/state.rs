use num_complex::Complex64 as C64;

use super::linalg::eigvalsh;
use super::matrix::{CMatrix, ONE, ZERO};
use crate::error::{Error, Result};

const STATE_TOL: f64 = 1e-10;
const PURE_NORM_TOL: f64 = 1e-12;

/// Unit vector in a `dim`-dimensional Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Accepts amplitudes whose Euclidean norm is 1 within 1e-12.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("pure state needs dim >= 1".into()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::InvalidState(format!(
                "pure state norm {norm} differs from 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        let amplitudes: Vec<C64> = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(Self { amplitudes })
    }

    /// Computational basis vector |index⟩.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { amplitudes: amps })
    }

    /// `(|x⟩ + phase·|y⟩)/√2`
    pub fn superposition(dim: usize, x: usize, y: usize, phase: C64) -> Result<Self> {
        if x >= dim || y >= dim || x == y {
            return Err(Error::InvalidState(format!(
                "superposition needs distinct indices below {dim}, got {x}, {y}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[x] = ONE;
        amps[y] = phase;
        Self::normalized(amps)
    }

    /// `cos θ |0⟩ + sin θ |1⟩`, padded with zeros up to `dim`.
    pub fn great_circle(dim: usize, theta: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidState("great circle needs dim >= 2".into()));
        }
        let mut amps = vec![ZERO; dim];
        amps[0] = C64::new(theta.cos(), 0.0);
        amps[1] = C64::new(theta.sin(), 0.0);
        Self::normalized(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.projector())
    }
}

/// Positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and trace, each within 1e-10.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::validate(&matrix, STATE_TOL)?;
        Ok(Self { matrix })
    }

    pub(crate) fn validate(m: &CMatrix, tol: f64) -> Result<()> {
        if !m.is_square() {
            return Err(Error::InvalidState(format!(
                "density matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let herm = m.hermiticity_defect();
        if herm > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian: deviation {herm:.3e}"
            )));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = eigvalsh(m)[0];
        if min < -tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// Checks the invariants at a caller-chosen tolerance; used to confirm
    /// channel outputs stay physical.
    pub fn check(&self, tol: f64) -> Result<()> {
        Self::validate(&self.matrix, tol)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// ρ ⊗ σ
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: super::kron(&self.matrix, &other.matrix),
        }
    }
}

/// Which factor of a bipartite space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Factorization `d = dA · dB` with A-major composite indexing:
/// `index(a, b) = a · dB + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteDims {
    pub da: usize,
    pub db: usize,
}

impl BipartiteDims {
    pub fn new(da: usize, db: usize) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::InvalidParameter(format!(
                "bipartite dimensions must be positive, got {da}x{db}"
            )));
        }
        Ok(Self { da, db })
    }

    pub fn total(&self) -> usize {
        self.da * self.db
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.db + b
    }

    pub fn dim_of(&self, which: Subsystem) -> usize {
        match which {
            Subsystem::A => self.da,
            Subsystem::B => self.db,
        }
    }

    pub(crate) fn check_square(&self, m: &CMatrix, what: &str) -> Result<()> {
        let d = self.total();
        if m.shape() != (d, d) {
            return Err(Error::dims(format!(
                "{what} is {}x{}, expected {d}x{d} for dims {}x{}",
                m.rows(),
                m.cols(),
                self.da,
                self.db
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_state_norm_is_enforced() {
        assert!(PureState::new(vec![ONE, ONE]).is_err());
        assert!(PureState::new(vec![]).is_err());
        let plus = PureState::superposition(2, 0, 1, ONE).unwrap();
        assert!((plus.inner(&plus).re - 1.0).abs() < 1e-15);
        assert!(PureState::normalized(vec![ZERO, ZERO]).is_err());
    }

    #[test]
    fn projector_is_rank_one_state() {
        let psi = PureState::superposition(3, 0, 2, C64::i()).unwrap();
        let rho = DensityMatrix::new(psi.projector()).unwrap();
        let ev = eigvalsh(rho.matrix());
        assert!((ev[2] - 1.0).abs() < 1e-12);
        assert!(ev[0].abs() < 1e-12 && ev[1].abs() < 1e-12);
    }

    #[test]
    fn density_validation_errors() {
        let not_herm = CMatrix::new(
            2,
            2,
            vec![C64::new(0.5, 0.0), ONE, ZERO, C64::new(0.5, 0.0)],
        )
        .unwrap();
        assert!(DensityMatrix::new(not_herm).is_err());
        let neg = CMatrix::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]);
        assert!(DensityMatrix::new(neg).is_err());
        let bad_trace = CMatrix::identity(2);
        assert!(DensityMatrix::new(bad_trace).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(2).scale_real(0.5)).is_ok());
    }

    #[test]
    fn dims_use_a_major_indexing() {
        let d = BipartiteDims::new(2, 3).unwrap();
        assert_eq!(d.total(), 6);
        assert_eq!(d.index(1, 2), 5);
        assert_eq!(d.index(0, 2), 2);
        assert!(BipartiteDims::new(0, 2).is_err());
    }
}
