use crate::error::{Error, Result};
use crate::tensorlab::{eigvalsh, partial_trace, BipartiteDims, CMatrix, Subsystem};

/// Trace-preservation and positivity tolerance for stored representations.
pub const REPR_TOL: f64 = 1e-9;

/// Kraus family `{A_k}` of `dout × din` operators with `Σ A_k* A_k = I`.
#[derive(Clone, Debug)]
pub struct KrausRepr {
    din: usize,
    dout: usize,
    operators: Vec<CMatrix>,
}

impl KrausRepr {
    pub fn new(din: usize, dout: usize, operators: Vec<CMatrix>) -> Result<Self> {
        let k = Self::from_ops_unchecked(din, dout, operators)?;
        let dev = k.completeness_defect();
        if dev > REPR_TOL {
            return Err(Error::NotTracePreserving {
                deviation: dev,
                tol: REPR_TOL,
            });
        }
        Ok(k)
    }

    /// Shape checks only.
    pub(crate) fn from_ops_unchecked(
        din: usize,
        dout: usize,
        operators: Vec<CMatrix>,
    ) -> Result<Self> {
        if din == 0 || dout == 0 {
            return Err(Error::dims("channel dimensions must be positive"));
        }
        if operators.is_empty() {
            return Err(Error::InvalidParameter("Kraus family is empty".into()));
        }
        if let Some((k, op)) = operators
            .iter()
            .enumerate()
            .find(|(_, op)| op.shape() != (dout, din))
        {
            return Err(Error::dims(format!(
                "Kraus operator {k} is {}x{}, expected {dout}x{din}",
                op.rows(),
                op.cols()
            )));
        }
        Ok(Self {
            din,
            dout,
            operators,
        })
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// ‖Σ A_k* A_k − I‖_F
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = CMatrix::zeros(self.din, self.din);
        for a in &self.operators {
            sum = &sum + &a.adjoint().matmul(a);
        }
        sum.distance(&CMatrix::identity(self.din))
    }

    /// `J = Σ_k vec(A_k) vec(A_k)*` with `vec` the row-major flattening, i.e.
    /// `J = Σ_ij N(|i⟩⟨j|) ⊗ |i⟩⟨j|`.
    pub fn to_choi_matrix(&self) -> CMatrix {
        let n = self.din * self.dout;
        let mut j = CMatrix::zeros(n, n);
        for a in &self.operators {
            j = &j + &CMatrix::outer(a.as_slice(), a.as_slice());
        }
        j
    }
}

/// Unnormalized Choi matrix on `H_out ⊗ H_in` (output factor first).
#[derive(Clone, Debug)]
pub struct ChoiRepr {
    din: usize,
    dout: usize,
    matrix: CMatrix,
}

impl ChoiRepr {
    /// Validates Hermiticity, positivity (eigenvalue floor −1e-9) and the
    /// trace-preservation identity `tr_out J = I_din`.
    pub fn new(din: usize, dout: usize, matrix: CMatrix) -> Result<Self> {
        let c = Self::from_raw(din, dout, matrix)?;
        c.validate()?;
        Ok(c)
    }

    /// Shape checks only; positivity and trace preservation are not verified.
    pub fn from_raw(din: usize, dout: usize, matrix: CMatrix) -> Result<Self> {
        let n = din * dout;
        if din == 0 || dout == 0 || matrix.shape() != (n, n) {
            return Err(Error::dims(format!(
                "Choi matrix is {}x{}, expected {n}x{n} for din={din}, dout={dout}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { din, dout, matrix })
    }

    fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermiticity_defect();
        if herm > REPR_TOL {
            return Err(Error::InvalidMatrix(format!(
                "Choi matrix not Hermitian: deviation {herm:.3e}"
            )));
        }
        let min = eigvalsh(&self.matrix)[0];
        if min < -REPR_TOL {
            return Err(Error::NotCompletelyPositive {
                eigenvalue: min,
                floor: -REPR_TOL,
            });
        }
        let dev = self.trace_preservation_defect();
        if dev > REPR_TOL {
            return Err(Error::NotTracePreserving {
                deviation: dev,
                tol: REPR_TOL,
            });
        }
        Ok(())
    }

    /// ‖tr_out J − I_din‖_F
    pub fn trace_preservation_defect(&self) -> f64 {
        partial_trace(&self.matrix, self.layout(), Subsystem::A)
            .expect("shape checked at construction")
            .distance(&CMatrix::identity(self.din))
    }

    /// The (output, input) factorization of the Choi space.
    pub fn layout(&self) -> BipartiteDims {
        BipartiteDims {
            da: self.dout,
            db: self.din,
        }
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Eigenvalues, largest first.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev = eigvalsh(&self.matrix);
        ev.reverse();
        ev
    }
}
