//! Channel representations, their conversions and channel algebra.

mod repr;

use std::sync::OnceLock;

use num_complex::Complex64 as C64;

pub use repr::{ChoiRepr, KrausRepr, REPR_TOL};

use crate::dilation::{stinespring_from_kraus, StinespringRepr};
use crate::error::{Error, Result};
use crate::tensorlab::{
    eigh, kron, numerical_rank, polar_isometry, rank_is_borderline, CMatrix, DensityMatrix,
};

/// Relative unitarity tolerance used when callers have no better choice.
pub const DEFAULT_UNITARY_TOL: f64 = 1e-8;
/// Relative eigenvalue threshold for numerical Choi rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// A CPTP map held in whichever representations have been requested so far.
///
/// Missing representations are derived on first access and cached; the
/// caches are `OnceLock`s so concurrent readers may race to fill them but
/// always observe a complete value.
#[derive(Clone, Debug)]
pub struct Channel {
    din: usize,
    dout: usize,
    kraus: OnceLock<KrausRepr>,
    choi: OnceLock<ChoiRepr>,
    stinespring: OnceLock<StinespringRepr>,
}

impl Channel {
    fn empty(din: usize, dout: usize) -> Self {
        Self {
            din,
            dout,
            kraus: OnceLock::new(),
            choi: OnceLock::new(),
            stinespring: OnceLock::new(),
        }
    }

    pub fn from_kraus(k: KrausRepr) -> Self {
        let c = Self::empty(k.din(), k.dout());
        let _ = c.kraus.set(k);
        c
    }

    pub fn from_choi(j: ChoiRepr) -> Self {
        let c = Self::empty(j.din(), j.dout());
        let _ = c.choi.set(j);
        c
    }

    pub fn from_stinespring(s: StinespringRepr) -> Self {
        let c = Self::empty(s.din(), s.dout());
        let _ = c.stinespring.set(s);
        c
    }

    /// Validated Kraus family.
    pub fn from_kraus_ops(din: usize, dout: usize, ops: Vec<CMatrix>) -> Result<Self> {
        Ok(Self::from_kraus(KrausRepr::new(din, dout, ops)?))
    }

    /// `ρ ↦ UρU*`; rejects `U` whose isometry defect exceeds 1e-9.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::dims(format!(
                "unitary must be square, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let dev = u.isometry_defect();
        if dev > REPR_TOL {
            return Err(Error::NotUnitary {
                deviation: dev,
                tol: REPR_TOL,
            });
        }
        let d = u.rows();
        Self::from_kraus_ops(d, d, vec![u])
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kraus(
            KrausRepr::from_ops_unchecked(d, d, vec![CMatrix::identity(d)])
                .expect("identity has valid shape"),
        )
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn kraus(&self) -> &KrausRepr {
        self.kraus.get_or_init(|| {
            if let Some(s) = self.stinespring.get() {
                return s.kraus();
            }
            let j = self
                .choi
                .get()
                .expect("channel holds at least one representation");
            // positivity was checked when the Choi matrix was stored
            kraus_from_spectrum(j, &eigh(j.matrix()), DEFAULT_RANK_TOL)
        })
    }

    pub fn choi(&self) -> &ChoiRepr {
        self.choi.get_or_init(|| {
            let k = self.kraus();
            ChoiRepr::from_raw(self.din, self.dout, k.to_choi_matrix())
                .expect("Kraus shapes fix the Choi shape")
        })
    }

    pub fn stinespring(&self) -> &StinespringRepr {
        self.stinespring
            .get_or_init(|| stinespring_from_kraus(self.kraus()))
    }

    pub fn has_kraus(&self) -> bool {
        self.kraus.get().is_some()
    }

    pub fn has_choi(&self) -> bool {
        self.choi.get().is_some()
    }

    pub fn has_stinespring(&self) -> bool {
        self.stinespring.get().is_some()
    }

    /// Largest pairwise Choi-Frobenius disagreement among the populated
    /// representations, each converted independently.
    pub fn representation_spread(&self) -> f64 {
        let mut chois = Vec::new();
        if let Some(k) = self.kraus.get() {
            chois.push(k.to_choi_matrix());
        }
        if let Some(j) = self.choi.get() {
            chois.push(j.matrix().clone());
        }
        if let Some(s) = self.stinespring.get() {
            chois.push(s.kraus().to_choi_matrix());
        }
        let mut worst = 0.0_f64;
        for a in 0..chois.len() {
            for b in a + 1..chois.len() {
                worst = worst.max(chois[a].distance(&chois[b]));
            }
        }
        worst
    }

    /// Linear extension `X ↦ Σ A_k X A_k*` to arbitrary operators.
    pub fn apply_operator(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.din, self.din) {
            return Err(Error::dims(format!(
                "input operator is {}x{}, channel input dimension is {}",
                x.rows(),
                x.cols(),
                self.din
            )));
        }
        let mut out = CMatrix::zeros(self.dout, self.dout);
        for a in self.kraus().operators() {
            out = &out + &a.conjugate(x);
        }
        Ok(out)
    }

    /// Schrödinger picture: `ρ ↦ Σ_k A_k ρ A_k*`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply_operator(rho.matrix())
            .map(|m| DensityMatrix::from_matrix_unchecked(m.hermitian_part()))
    }

    /// Heisenberg picture: `F ↦ Σ_k A_k* F A_k`.
    pub fn dual_apply(&self, f: &CMatrix) -> Result<CMatrix> {
        if f.shape() != (self.dout, self.dout) {
            return Err(Error::dims(format!(
                "observable is {}x{}, channel output dimension is {}",
                f.rows(),
                f.cols(),
                self.dout
            )));
        }
        let mut out = CMatrix::zeros(self.din, self.din);
        for a in self.kraus().operators() {
            out = &out + &a.adjoint_conjugate(f);
        }
        Ok(out)
    }
}

pub fn apply(n: &Channel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    n.apply(rho)
}

pub fn heisenberg_dual_apply(n: &Channel, f: &CMatrix) -> Result<CMatrix> {
    n.dual_apply(f)
}

pub fn choi_of(n: &Channel) -> ChoiRepr {
    n.choi().clone()
}

/// Kraus operators from the eigendecomposition of the Choi matrix: every
/// eigenvalue above `rank_tol · λ_max` contributes `√λ · v` reshaped
/// row-major into a `dout × din` operator.
pub fn kraus_from_choi(c: &ChoiRepr, rank_tol: f64) -> Result<KrausRepr> {
    let e = eigh(c.matrix());
    let top = e.max();
    let floor = -rank_tol * top.max(0.0);
    if e.min() < floor {
        return Err(Error::NotCompletelyPositive {
            eigenvalue: e.min(),
            floor,
        });
    }
    Ok(kraus_from_spectrum(c, &e, rank_tol))
}

fn kraus_from_spectrum(c: &ChoiRepr, e: &crate::tensorlab::Eigh, rank_tol: f64) -> KrausRepr {
    let top = e.max();
    let ops: Vec<CMatrix> = (0..e.values.len())
        .rev()
        .filter(|&k| e.values[k] > rank_tol * top)
        .map(|k| {
            let scale = e.values[k].sqrt();
            let v: Vec<C64> = e.vector(k).into_iter().map(|z| z * scale).collect();
            CMatrix::new(c.dout(), c.din(), v).expect("eigenvector length matches")
        })
        .collect();
    KrausRepr::from_ops_unchecked(c.din(), c.dout(), ops).expect("Choi trace is positive")
}

/// `n2 ∘ n1` with Kraus family `{B_j A_k}`.
pub fn compose(n2: &Channel, n1: &Channel) -> Result<Channel> {
    if n1.dout() != n2.din() {
        return Err(Error::dims(format!(
            "cannot compose: first channel outputs dim {}, second expects {}",
            n1.dout(),
            n2.din()
        )));
    }
    let mut ops = Vec::with_capacity(n1.kraus().len() * n2.kraus().len());
    for b in n2.kraus().operators() {
        for a in n1.kraus().operators() {
            ops.push(b.matmul(a));
        }
    }
    Ok(Channel::from_kraus(KrausRepr::from_ops_unchecked(
        n1.din(),
        n2.dout(),
        ops,
    )?))
}

/// `na ⊗ nb` with Kraus family `{A_k ⊗ B_j}` under A-major indexing.
pub fn tensor(na: &Channel, nb: &Channel) -> Channel {
    let mut ops = Vec::with_capacity(na.kraus().len() * nb.kraus().len());
    for a in na.kraus().operators() {
        for b in nb.kraus().operators() {
            ops.push(kron(a, b));
        }
    }
    Channel::from_kraus(
        KrausRepr::from_ops_unchecked(na.din() * nb.din(), na.dout() * nb.dout(), ops)
            .expect("kron of valid shapes"),
    )
}

/// Outcome of the unitarity test, with the spectral evidence behind it.
#[derive(Clone, Debug)]
pub struct UnitarityProbe {
    /// Choi eigenvalues, largest first.
    pub spectrum: Vec<f64>,
    /// λ₂ / λ₁ of the Choi matrix (0 for a rank-1 Choi or a 1-dim space).
    pub second_ratio: f64,
    pub numerical_rank: usize,
    pub unitary: Option<CMatrix>,
    /// Some eigenvalue lies within a factor 10 of the decision threshold.
    pub borderline: bool,
}

pub fn unitarity_probe(n: &Channel, tol: f64) -> UnitarityProbe {
    let e = eigh(n.choi().matrix());
    let spectrum = e.descending();
    let top = spectrum[0];
    let second_ratio = if top > 0.0 {
        spectrum.get(1).map_or(0.0, |&s| s.max(0.0) / top)
    } else {
        f64::INFINITY
    };
    let rank = numerical_rank(&spectrum, DEFAULT_RANK_TOL);
    let borderline = rank_is_borderline(&spectrum, tol);
    let mut unitary = None;
    if n.din() == n.dout() && second_ratio <= tol {
        let last = e.values.len() - 1;
        let scale = top.sqrt();
        let v: Vec<C64> = e.vector(last).into_iter().map(|z| z * scale).collect();
        let k = CMatrix::new(n.dout(), n.din(), v).expect("eigenvector length matches");
        if k.isometry_defect() <= tol * n.din() as f64 {
            unitary = Some(normalize_phase(polar_isometry(&k)));
        }
    }
    UnitarityProbe {
        spectrum,
        second_ratio,
        numerical_rank: rank,
        unitary,
        borderline,
    }
}

/// `Some(U)` iff `n` is a unitary channel `ρ ↦ UρU*` at relative tolerance
/// `tol`. `U` is an exact unitary (polar projection) whose first nonzero
/// entry in column 0 is real positive.
pub fn is_unitary(n: &Channel, tol: f64) -> Option<CMatrix> {
    unitarity_probe(n, tol).unitary
}

/// Fixes the global phase: the first entry of column 0 with modulus above
/// 1e-10 becomes real positive.
pub fn normalize_phase(u: CMatrix) -> CMatrix {
    let pivot = (0..u.rows()).map(|i| u[(i, 0)]).find(|z| z.norm() > 1e-10);
    match pivot {
        Some(z) => u.scale(z.conj() / z.norm()),
        None => u,
    }
}

/// `‖J(N) − J(M)‖_F / din`
pub fn channel_distance(n: &Channel, m: &Channel) -> Result<f64> {
    if n.din() != m.din() || n.dout() != m.dout() {
        return Err(Error::dims(format!(
            "channel dimensions differ: {}->{} vs {}->{}",
            n.din(),
            n.dout(),
            m.din(),
            m.dout()
        )));
    }
    Ok(n.choi().matrix().distance(m.choi().matrix()) / n.din() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{completely_depolarizing, pauli_x, random_channel};
    use crate::tensorlab::{derive_seed, haar_unitary, random_density, PureState, ONE, ZERO};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn bit_flip_half() -> Channel {
        Channel::from_kraus_ops(
            2,
            2,
            vec![CMatrix::identity(2).scale_real(H), pauli_x().scale_real(H)],
        )
        .unwrap()
    }

    #[test]
    fn apply_examples() {
        let rho = random_density(3, 1);
        let out = Channel::identity(3).apply(&rho).unwrap();
        assert!(out.matrix().distance(rho.matrix()) < 1e-15);

        let zero = PureState::basis(2, 0).unwrap().density();
        let one = PureState::basis(2, 1).unwrap().projector();
        let x = Channel::unitary(pauli_x()).unwrap();
        // oracle: X|0⟩⟨0|X*
        let direct = pauli_x().conjugate(zero.matrix());
        let out = x.apply(&zero).unwrap();
        assert!(out.matrix().distance(&direct) < 1e-15);
        assert!(out.matrix().distance(&one) < 1e-15);

        let mixed = bit_flip_half().apply(&zero).unwrap();
        assert!(
            mixed
                .matrix()
                .distance(&CMatrix::identity(2).scale_real(0.5))
                < 1e-15
        );
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let rho = random_density(3, 1);
        assert!(matches!(
            Channel::identity(2).apply(&rho),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(Channel::identity(2)
            .dual_apply(&CMatrix::identity(3))
            .is_err());
    }

    #[test]
    fn dual_examples() {
        let u = haar_unitary(3, 5);
        let f = haar_unitary(3, 6);
        let ch = Channel::unitary(u.clone()).unwrap();
        assert!(
            ch.dual_apply(&f)
                .unwrap()
                .distance(&u.adjoint_conjugate(&f))
                < 1e-14
        );
        let r = random_channel(3, 2, 4, 9).unwrap();
        assert!(
            r.dual_apply(&CMatrix::identity(2))
                .unwrap()
                .distance(&CMatrix::identity(3))
                < 1e-10
        );
    }

    #[test]
    fn trace_duality_on_random_triples() {
        for s in 0..100 {
            let n = random_channel(3, 2, 3, derive_seed(s, 0)).unwrap();
            let rho = random_density(3, derive_seed(s, 1));
            let e = haar_unitary(2, derive_seed(s, 2));
            let lhs = n.apply(&rho).unwrap().matrix().matmul(&e).trace();
            let rhs = rho.matrix().matmul(&n.dual_apply(&e).unwrap()).trace();
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn choi_of_identity_has_corner_pattern() {
        let j = choi_of(&Channel::identity(2));
        let mut oracle = CMatrix::zeros(4, 4);
        // evaluate N on the four matrix units: J = Σ_ij |i⟩⟨j| ⊗ |i⟩⟨j|
        for i in 0..2 {
            for k in 0..2 {
                oracle = &oracle + &kron(&CMatrix::unit(2, i, k), &CMatrix::unit(2, i, k));
            }
        }
        assert_eq!(j.matrix(), &oracle);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_eq!(j.matrix()[(r, c)], ONE);
        }
        assert_eq!(j.matrix()[(1, 1)], ZERO);
    }

    #[test]
    fn choi_of_depolarizing_is_scaled_identity() {
        let j = choi_of(&completely_depolarizing(2));
        assert!(j.matrix().distance(&CMatrix::identity(4).scale_real(0.5)) < 1e-15);
        assert!(j.trace_preservation_defect() < 1e-15);
    }

    #[test]
    fn kraus_from_choi_examples() {
        let u = haar_unitary(3, 17);
        let k = kraus_from_choi(
            &choi_of(&Channel::unitary(u.clone()).unwrap()),
            DEFAULT_RANK_TOL,
        )
        .unwrap();
        assert_eq!(k.len(), 1);
        let a = &k.operators()[0];
        let phase = u.hs_inner(a) / u.hs_inner(&u);
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(a.distance(&u.scale(phase)) < 1e-12);

        let dep = kraus_from_choi(&choi_of(&completely_depolarizing(2)), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(dep.len(), 4);

        let c = choi_of(&random_channel(2, 3, 2, 4).unwrap());
        let back = kraus_from_choi(&c, DEFAULT_RANK_TOL)
            .unwrap()
            .to_choi_matrix();
        assert!(back.distance(c.matrix()) < 1e-10);
    }

    #[test]
    fn kraus_from_choi_rejects_non_cp() {
        let transpose = CMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ]);
        let c = ChoiRepr::from_raw(2, 2, transpose).unwrap();
        assert!(matches!(
            kraus_from_choi(&c, DEFAULT_RANK_TOL),
            Err(Error::NotCompletelyPositive { .. })
        ));
    }

    #[test]
    fn compose_and_tensor() {
        let id = tensor(&Channel::identity(2), &Channel::identity(3));
        assert!(channel_distance(&id, &Channel::identity(6)).unwrap() < 1e-15);

        let u = haar_unitary(3, 2);
        let fwd = Channel::unitary(u.clone()).unwrap();
        let back = Channel::unitary(u.adjoint()).unwrap();
        let round = compose(&fwd, &back).unwrap();
        assert!(channel_distance(&round, &Channel::identity(3)).unwrap() < 1e-10);
        assert!(compose(&Channel::identity(2), &Channel::identity(3)).is_err());

        for s in 0..20 {
            let pa = random_channel(2, 2, 2, derive_seed(s, 0)).unwrap();
            let pb = random_channel(3, 3, 2, derive_seed(s, 1)).unwrap();
            let rho = random_density(2, derive_seed(s, 2));
            let sigma = random_density(3, derive_seed(s, 3));
            let joint = tensor(&pa, &pb).apply(&rho.kron(&sigma)).unwrap();
            let split = pa.apply(&rho).unwrap().kron(&pb.apply(&sigma).unwrap());
            assert!(joint.matrix().distance(split.matrix()) < 1e-12);
        }
    }

    #[test]
    fn is_unitary_examples() {
        assert_eq!(
            is_unitary(&Channel::identity(2), DEFAULT_UNITARY_TOL),
            Some(CMatrix::identity(2))
        );
        assert!(is_unitary(&completely_depolarizing(2), DEFAULT_UNITARY_TOL).is_none());
        let probe = unitarity_probe(&bit_flip_half(), DEFAULT_UNITARY_TOL);
        assert!(probe.unitary.is_none());
        assert!((probe.spectrum[0] - 1.0).abs() < 1e-12 && (probe.spectrum[1] - 1.0).abs() < 1e-12);
        assert_eq!(probe.numerical_rank, 2);
    }

    #[test]
    fn is_unitary_recovers_up_to_phase() {
        for s in 0..30 {
            let u = haar_unitary(4, s);
            let ch = Channel::unitary(u.clone()).unwrap();
            let rec = is_unitary(&ch, DEFAULT_UNITARY_TOL).expect("unitary channel");
            let rec_ch = Channel::unitary(rec.clone()).unwrap();
            assert!(channel_distance(&ch, &rec_ch).unwrap() < 1e-10);
            assert!(rec[(0, 0)].im.abs() < 1e-14 && rec[(0, 0)].re > 0.0);
        }
    }

    #[test]
    fn channel_distance_examples() {
        let n = random_channel(2, 2, 3, 1).unwrap();
        assert_eq!(channel_distance(&n, &n).unwrap(), 0.0);
        let x = Channel::unitary(pauli_x()).unwrap();
        // J_I − J_X has eight unit entries: ‖·‖_F = √8, divided by d = 2.
        let d = channel_distance(&Channel::identity(2), &x).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15, "{d}");
        let u = haar_unitary(3, 8);
        let a = Channel::unitary(u.clone()).unwrap();
        let b = Channel::unitary(u.scale(C64::from_polar(1.0, 0.7))).unwrap();
        assert!(channel_distance(&a, &b).unwrap() < 1e-12);
        assert!(channel_distance(&a, &Channel::identity(2)).is_err());
    }

    #[test]
    fn lazy_representations_agree() {
        let n = random_channel(2, 3, 3, 77).unwrap();
        let _ = n.kraus();
        let _ = n.choi();
        assert!(n.has_stinespring() && n.has_kraus() && n.has_choi());
        assert!(n.representation_spread() < 1e-9);

        let from_choi = Channel::from_choi(n.choi().clone());
        let _ = from_choi.kraus();
        let _ = from_choi.stinespring();
        assert!(from_choi.representation_spread() < 1e-9);
    }

    #[test]
    fn concurrent_cache_population_is_consistent() {
        let n = Channel::from_choi(random_channel(3, 3, 2, 5).unwrap().choi().clone());
        let chois: Vec<CMatrix> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..8)
                .map(|_| s.spawn(|| n.stinespring().kraus().to_choi_matrix()))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for c in &chois {
            assert!(c.distance(n.choi().matrix()) < 1e-10);
        }
    }
}
