//! Stinespring dilations: construction from Kraus operators, minimality, and
//! recovery of the environment isometry relating two dilations of one channel.
//!
//! Dilation isometries use output-major composite indexing:
//! `V[(out · denv + env), in]`.

use crate::channels::{channel_distance, kraus_from_choi, Channel, KrausRepr, REPR_TOL};
use crate::error::{Error, Result};
use crate::tensorlab::{eigvalsh, kron, lstsq, numerical_rank, singular_values, CMatrix, ZERO};

/// Isometry `V: H_in → H_out ⊗ H_E` with `N*(F) = V*(F ⊗ I_E)V`.
#[derive(Clone, Debug)]
pub struct StinespringRepr {
    din: usize,
    dout: usize,
    denv: usize,
    v: CMatrix,
}

impl StinespringRepr {
    /// Rejects `v` of the wrong shape or with ‖V*V − I‖_F above 1e-9.
    pub fn new(din: usize, dout: usize, denv: usize, v: CMatrix) -> Result<Self> {
        if din == 0 || dout == 0 || denv == 0 || v.shape() != (dout * denv, din) {
            return Err(Error::dims(format!(
                "Stinespring isometry is {}x{}, expected {}x{din}",
                v.rows(),
                v.cols(),
                dout * denv
            )));
        }
        let dev = v.isometry_defect();
        if dev > REPR_TOL {
            return Err(Error::NotIsometry {
                deviation: dev,
                tol: REPR_TOL,
            });
        }
        Ok(Self { din, dout, denv, v })
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn denv(&self) -> usize {
        self.denv
    }

    pub fn isometry(&self) -> &CMatrix {
        &self.v
    }

    /// Kraus operators `A_e[o, i] = V[(o·denv + e), i]`.
    pub fn kraus(&self) -> KrausRepr {
        let ops = (0..self.denv)
            .map(|e| CMatrix::from_fn(self.dout, self.din, |o, i| self.v[(o * self.denv + e, i)]))
            .collect();
        KrausRepr::from_ops_unchecked(self.din, self.dout, ops).expect("shapes fixed by V")
    }

    /// `V*(F ⊗ I_E)V`
    pub fn dual_apply(&self, f: &CMatrix) -> Result<CMatrix> {
        if f.shape() != (self.dout, self.dout) {
            return Err(Error::dims(format!(
                "observable is {}x{}, dilation output dimension is {}",
                f.rows(),
                f.cols(),
                self.dout
            )));
        }
        let lifted = kron(f, &CMatrix::identity(self.denv));
        Ok(self.v.adjoint_conjugate(&lifted))
    }

    /// Largest ‖V*(E_ij ⊗ I_E)V − N*(E_ij)‖_F over output matrix units.
    pub fn dual_reproduction_residual(&self, n: &Channel) -> Result<f64> {
        if n.din() != self.din || n.dout() != self.dout {
            return Err(Error::dims("dilation and channel dimensions differ"));
        }
        let mut worst = 0.0_f64;
        for i in 0..self.dout {
            for j in 0..self.dout {
                let f = CMatrix::unit(self.dout, i, j);
                let lhs = self.dual_apply(&f)?;
                let rhs = n.dual_apply(&f)?;
                worst = worst.max(lhs.distance(&rhs));
            }
        }
        Ok(worst)
    }

    /// New dilation with `extra` zero environment levels appended.
    pub fn pad_environment(&self, extra: usize) -> Self {
        let denv = self.denv + extra;
        let v = CMatrix::from_fn(self.dout * denv, self.din, |r, i| {
            let (o, e) = (r / denv, r % denv);
            if e < self.denv {
                self.v[(o * self.denv + e, i)]
            } else {
                ZERO
            }
        });
        Self { denv, v, ..*self }
    }
}

/// `V = Σ_k A_k ⊗ |k⟩`, one environment level per Kraus operator.
pub fn stinespring_from_kraus(k: &KrausRepr) -> StinespringRepr {
    let (din, dout, denv) = (k.din(), k.dout(), k.len());
    let ops = k.operators();
    let v = CMatrix::from_fn(dout * denv, din, |r, i| ops[r % denv][(r / denv, i)]);
    StinespringRepr { din, dout, denv, v }
}

/// Dilation whose environment dimension equals the numerical Choi rank.
pub fn minimal_dilation(n: &Channel, rank_tol: f64) -> Result<StinespringRepr> {
    Ok(stinespring_from_kraus(&kraus_from_choi(
        n.choi(),
        rank_tol,
    )?))
}

/// Numerical dimension of span{(E_ij ⊗ I_E)Vψ_m} over output matrix units and
/// input basis vectors, measured by the eigenvalues of the Gram operator of
/// the spanning set relative to its largest one.
pub fn dilation_span_rank(s: &StinespringRepr, tol: f64) -> usize {
    let (dout, denv, din) = (s.dout, s.denv, s.din);
    let n = dout * denv;
    let mut gram = CMatrix::zeros(n, n);
    for i in 0..dout {
        for j in 0..dout {
            for m in 0..din {
                // (E_ij ⊗ I)Vψ_m moves the output-j block of column m to row block i
                let mut vec = vec![ZERO; n];
                for e in 0..denv {
                    vec[i * denv + e] = s.v[(j * denv + e, m)];
                }
                gram = &gram + &CMatrix::outer(&vec, &vec);
            }
        }
    }
    numerical_rank(&eigvalsh(&gram), tol)
}

/// Whether the spanning set fills all of `H_out ⊗ H_E`.
pub fn is_minimal(s: &StinespringRepr, tol: f64) -> bool {
    dilation_span_rank(s, tol) >= s.dout * s.denv
}

/// Environment isometry `U_E: H_E1 → H_E2` with `V₂ = (I ⊗ U_E)V₁`.
#[derive(Clone, Debug)]
pub struct Intertwiner {
    de1: usize,
    de2: usize,
    u: CMatrix,
}

impl Intertwiner {
    pub fn de1(&self) -> usize {
        self.de1
    }

    pub fn de2(&self) -> usize {
        self.de2
    }

    /// `dE2 × dE1` matrix of `U_E`.
    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn isometry_defect(&self) -> f64 {
        self.u.isometry_defect()
    }

    /// `I_out ⊗ U_E`
    pub fn lift(&self, dout: usize) -> CMatrix {
        kron(&CMatrix::identity(dout), &self.u)
    }

    /// ‖V₂ − (I ⊗ U_E)V₁‖_F
    pub fn factorization_residual(&self, v1: &StinespringRepr, v2: &StinespringRepr) -> f64 {
        self.lift(v1.dout).matmul(&v1.v).distance(&v2.v)
    }

    /// Largest ‖(I ⊗ U_E)(F ⊗ I)V₁ψ − (F ⊗ I)V₂ψ‖ over output matrix units
    /// `F` and input basis vectors `ψ`.
    pub fn intertwining_residual(&self, v1: &StinespringRepr, v2: &StinespringRepr) -> f64 {
        let dout = v1.dout;
        let lift = self.lift(dout);
        let mut worst = 0.0_f64;
        for i in 0..dout {
            for j in 0..dout {
                let f = CMatrix::unit(dout, i, j);
                let left = lift
                    .matmul(&kron(&f, &CMatrix::identity(v1.denv)))
                    .matmul(&v1.v);
                let right = kron(&f, &CMatrix::identity(v2.denv)).matmul(&v2.v);
                for m in 0..v1.din {
                    let d: f64 = left
                        .col(m)
                        .iter()
                        .zip(right.col(m))
                        .map(|(a, b)| (a - b).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    worst = worst.max(d);
                }
            }
        }
        worst
    }
}

/// Recovers `U_E` from a minimal dilation `v1` and any dilation `v2` of the
/// same channel by solving `B_j = Σ_k u[j,k] A_k` in least squares over the
/// vectorized Kraus operators.
pub fn intertwiner(v1: &StinespringRepr, v2: &StinespringRepr, tol: f64) -> Result<Intertwiner> {
    if v1.din != v2.din || v1.dout != v2.dout {
        return Err(Error::dims(format!(
            "dilations act {}->{} and {}->{}",
            v1.din, v1.dout, v2.din, v2.dout
        )));
    }
    if v2.denv < v1.denv {
        return Err(Error::NotMinimal(format!(
            "target environment dimension {} is below the source's {}",
            v2.denv, v1.denv
        )));
    }
    let k1 = v1.kraus();
    let k2 = v2.kraus();
    let dist = channel_distance(
        &Channel::from_kraus(k1.clone()),
        &Channel::from_kraus(k2.clone()),
    )?;
    if dist > tol {
        return Err(Error::DilationMismatch(format!(
            "Choi distance {dist:.3e} exceeds {tol:.1e}"
        )));
    }

    let len = v1.din * v1.dout;
    let stack =
        |k: &KrausRepr| CMatrix::from_fn(len, k.len(), |r, c| k.operators()[c].as_slice()[r]);
    let a = stack(&k1);
    let b = stack(&k2);

    let sv = singular_values(&a);
    let smallest = *sv.last().expect("at least one Kraus operator");
    if smallest <= tol * sv[0] {
        return Err(Error::NotMinimal(format!(
            "source Kraus family is linearly dependent (singular value ratio {:.3e})",
            smallest / sv[0]
        )));
    }

    // a · x = b with x = u^T
    let x = lstsq(&a, &b, tol);
    let u = x.transpose();
    let it = Intertwiner {
        de1: v1.denv,
        de2: v2.denv,
        u,
    };

    let residual = it.factorization_residual(v1, v2);
    if residual > tol * v2.v.frobenius_norm() {
        return Err(Error::DilationMismatch(format!(
            "factorization residual {residual:.3e} exceeds tolerance"
        )));
    }
    let defect = it.isometry_defect();
    if defect > tol {
        return Err(Error::NotMinimal(format!(
            "recovered map is not an isometry (defect {defect:.3e})"
        )));
    }
    Ok(it)
}
