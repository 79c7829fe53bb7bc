//! Named channels and seeded random channels used as test corpus.

use num_complex::Complex64 as C64;

use crate::channels::{tensor, Channel, KrausRepr};
use crate::dilation::StinespringRepr;
use crate::error::{Error, Result};
use crate::tensorlab::{derive_seed, haar_isometry, haar_unitary, kron, CMatrix, ONE, ZERO};

const GATE_UNITARY_TOL: f64 = 1e-10;

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::new(2, 2, vec![ZERO, -C64::i(), C64::i(), ZERO]).expect("2x2")
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_real_rows(&[&[h, h], &[h, -h]])
}

/// Single-qubit gate by name: `I`, `X`, `Y`, `Z`, `H`, `S`, `T`.
pub fn named_gate(name: &str) -> Option<CMatrix> {
    Some(match name {
        "I" => CMatrix::identity(2),
        "X" => pauli_x(),
        "Y" => pauli_y(),
        "Z" => pauli_z(),
        "H" => hadamard(),
        "S" => CMatrix::new(2, 2, vec![ONE, ZERO, ZERO, C64::i()]).expect("2x2"),
        "T" => CMatrix::new(
            2,
            2,
            vec![
                ONE,
                ZERO,
                ZERO,
                C64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            ],
        )
        .expect("2x2"),
        _ => return None,
    })
}

/// Conditional execution of `U_x` on A controlled by basis state `|x⟩` of B:
/// Kraus family `{U_x ⊗ |x⟩⟨x|}` on `dA · dB` with `dB = unitaries.len()`.
pub fn controlled_channel(unitaries: &[CMatrix]) -> Result<Channel> {
    let first = unitaries.first().ok_or_else(|| {
        Error::InvalidParameter("controlled channel needs at least one unitary".into())
    })?;
    let da = first.rows();
    let db = unitaries.len();
    for (x, u) in unitaries.iter().enumerate() {
        if u.shape() != (da, da) {
            return Err(Error::dims(format!(
                "branch {x} is {}x{}, expected {da}x{da}",
                u.rows(),
                u.cols()
            )));
        }
        let dev = u.isometry_defect();
        if dev > GATE_UNITARY_TOL {
            return Err(Error::NotUnitary {
                deviation: dev,
                tol: GATE_UNITARY_TOL,
            });
        }
    }
    let ops = unitaries
        .iter()
        .enumerate()
        .map(|(x, u)| kron(u, &CMatrix::unit(db, x, x)))
        .collect();
    Ok(Channel::from_kraus(KrausRepr::from_ops_unchecked(
        da * db,
        da * db,
        ops,
    )?))
}

/// Permutation unitary `|x⟩|y⟩ ↦ |x⟩|y + x mod d⟩`; here A is the control.
pub fn orthogonal_cloner_unitary(d: usize) -> Result<CMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "orthogonal cloner needs d >= 2, got {d}"
        )));
    }
    let mut u = CMatrix::zeros(d * d, d * d);
    for x in 0..d {
        for y in 0..d {
            u[(x * d + (y + x) % d, x * d + y)] = ONE;
        }
    }
    Ok(u)
}

pub fn orthogonal_cloner(d: usize) -> Result<Channel> {
    Channel::unitary(orthogonal_cloner_unitary(d)?)
}

/// `S(φ ⊗ χ) = χ ⊗ φ`
pub fn swap_unitary(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            s[(b * d + a, a * d + b)] = ONE;
        }
    }
    s
}

pub fn swap_channel(d: usize) -> Result<Channel> {
    if d == 0 {
        return Err(Error::InvalidParameter("swap needs d >= 1".into()));
    }
    Channel::unitary(swap_unitary(d))
}

/// `ρ ↦ tr(ρ) I/d` with Kraus family `{|i⟩⟨j| / √d}`.
pub fn completely_depolarizing(d: usize) -> Channel {
    let s = 1.0 / (d as f64).sqrt();
    let ops = (0..d)
        .flat_map(|i| (0..d).map(move |j| CMatrix::unit(d, i, j).scale_real(s)))
        .collect();
    Channel::from_kraus(KrausRepr::from_ops_unchecked(d, d, ops).expect("valid shapes"))
}

/// Stinespring isometry from the first `din` columns of a Haar unitary on
/// `dout · denv` dimensions.
pub fn random_channel(din: usize, dout: usize, denv: usize, seed: u64) -> Result<Channel> {
    if din == 0 || dout == 0 || denv == 0 {
        return Err(Error::InvalidParameter(
            "random channel dimensions must be positive".into(),
        ));
    }
    if dout * denv < din {
        return Err(Error::InvalidParameter(format!(
            "random channel needs dout*denv >= din, got {dout}*{denv} < {din}"
        )));
    }
    let v = haar_isometry(dout * denv, din, seed);
    Ok(Channel::from_stinespring(StinespringRepr::new(
        din, dout, denv, v,
    )?))
}

/// Local channel `(U_A-conjugation) ⊗ Φ_B` with Haar `U_A` and random `Φ_B`.
#[derive(Clone, Debug)]
pub struct ProductChannel {
    pub channel: Channel,
    pub unitary_a: CMatrix,
    pub channel_b: Channel,
}

pub fn random_product_channel(
    da: usize,
    db: usize,
    denv_b: usize,
    seed: u64,
) -> Result<ProductChannel> {
    if da == 0 {
        return Err(Error::InvalidParameter("dA must be positive".into()));
    }
    let unitary_a = haar_unitary(da, derive_seed(seed, 0));
    let channel_b = random_channel(db, db, denv_b, derive_seed(seed, 1))?;
    let channel = tensor(&Channel::unitary(unitary_a.clone())?, &channel_b);
    Ok(ProductChannel {
        channel,
        unitary_a,
        channel_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{channel_distance, is_unitary, DEFAULT_UNITARY_TOL};
    use crate::locality::restrict;
    use crate::tensorlab::{
        eigvalsh, numerical_rank, partial_trace, random_density, BipartiteDims, DensityMatrix,
        PureState, Subsystem,
    };

    fn cptp_ok(n: &Channel) {
        let j = n.choi();
        assert!(eigvalsh(j.matrix())[0] >= -1e-9);
        assert!(j.trace_preservation_defect() < 1e-9);
    }

    #[test]
    fn controlled_identity_pair_dephases_control() {
        let n = controlled_channel(&[CMatrix::identity(2), CMatrix::identity(2)]).unwrap();
        cptp_ok(&n);
        let rho = random_density(2, 3);
        let plus = PureState::superposition(2, 0, 1, ONE).unwrap().density();
        let out = n.apply(&rho.kron(&plus)).unwrap();
        let want = rho.kron(&DensityMatrix::maximally_mixed(2));
        assert!(out.matrix().distance(want.matrix()) < 1e-14);
    }

    #[test]
    fn controlled_x_acts_on_branch_one() {
        let n = controlled_channel(&[CMatrix::identity(2), pauli_x()]).unwrap();
        let rho = random_density(2, 4);
        let one = PureState::basis(2, 1).unwrap().density();
        let out = n.apply(&rho.kron(&one)).unwrap();
        let want = kron(&pauli_x().conjugate(rho.matrix()), one.matrix());
        assert!(out.matrix().distance(&want) < 1e-14);
        assert!(n.kraus().completeness_defect() == 0.0);
    }

    #[test]
    fn controlled_rejects_bad_branches() {
        assert!(controlled_channel(&[]).is_err());
        assert!(controlled_channel(&[CMatrix::identity(2).scale_real(1.1)]).is_err());
        assert!(controlled_channel(&[CMatrix::identity(2), CMatrix::identity(3)]).is_err());
    }

    #[test]
    fn cloner_copies_basis_states() {
        for d in 2..=3 {
            let n = orthogonal_cloner(d).unwrap();
            cptp_ok(&n);
            let zero = PureState::basis(d, 0).unwrap().density();
            for x in 0..d {
                let bx = PureState::basis(d, x).unwrap().density();
                let out = n.apply(&bx.kron(&zero)).unwrap();
                assert!(out.matrix().distance(bx.kron(&bx).matrix()) < 1e-15);
            }
            let u = orthogonal_cloner_unitary(d).unwrap();
            assert_eq!(u.adjoint().matmul(&u), CMatrix::identity(d * d));
        }
        assert!(orthogonal_cloner(1).is_err());
    }

    #[test]
    fn cloner_restriction_is_dephasing() {
        let d = 3;
        let dims = BipartiteDims::new(d, d).unwrap();
        let r = restrict(
            &orthogonal_cloner(d).unwrap(),
            &PureState::basis(d, 0).unwrap(),
            dims,
        )
        .unwrap();
        let rho = random_density(d, 8);
        let out = r.apply(&rho).unwrap();
        let dephased = CMatrix::from_fn(
            d,
            d,
            |i, j| if i == j { rho.matrix()[(i, i)] } else { ZERO },
        );
        assert!(out.matrix().distance(&dephased) < 1e-14);
        assert!(is_unitary(&r, DEFAULT_UNITARY_TOL).is_none());
    }

    #[test]
    fn swap_properties() {
        let s = swap_unitary(3);
        assert_eq!(s.matmul(&s), CMatrix::identity(9));
        let n = swap_channel(3).unwrap();
        let rho = random_density(3, 1);
        let sigma = random_density(3, 2);
        let out = n.apply(&rho.kron(&sigma)).unwrap();
        assert!(out.matrix().distance(sigma.kron(&rho).matrix()) < 1e-15);

        let dims = BipartiteDims::new(3, 3).unwrap();
        let xi = crate::tensorlab::haar_state(3, 4);
        let r = restrict(&n, &xi, dims).unwrap();
        let out = r.apply(&rho).unwrap();
        assert!(out.matrix().distance(&xi.projector()) < 1e-14);
        let _ = partial_trace(&CMatrix::identity(9), dims, Subsystem::A).unwrap();
    }

    #[test]
    fn random_channel_contracts() {
        let u = random_channel(2, 2, 1, 5).unwrap();
        assert!(is_unitary(&u, DEFAULT_UNITARY_TOL).is_some());
        let g = random_channel(2, 2, 4, 5).unwrap();
        cptp_ok(&g);
        assert_eq!(numerical_rank(&g.choi().spectrum(), 1e-9), 4);
        let again = random_channel(2, 2, 4, 5).unwrap();
        assert_eq!(g.choi().matrix(), again.choi().matrix());
        assert!(random_channel(4, 1, 2, 0).is_err());
    }

    #[test]
    fn product_channel_parts_match() {
        let p = random_product_channel(2, 3, 2, 9).unwrap();
        let rebuilt = tensor(
            &Channel::unitary(p.unitary_a.clone()).unwrap(),
            &p.channel_b,
        );
        assert!(channel_distance(&rebuilt, &p.channel).unwrap() < 1e-14);
    }

    #[test]
    fn named_gates_are_unitary() {
        for g in ["I", "X", "Y", "Z", "H", "S", "T"] {
            assert!(named_gate(g).unwrap().isometry_defect() < 1e-15, "{g}");
        }
        assert!(named_gate("Q").is_none());
    }
}
