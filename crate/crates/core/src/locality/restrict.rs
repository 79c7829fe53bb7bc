use crate::channels::{Channel, ChoiRepr, KrausRepr, REPR_TOL};
use crate::error::{Error, Result};
use crate::tensorlab::{
    embed_isometry, kron, partial_trace, BipartiteDims, CMatrix, PureState, Subsystem,
};

fn check_bipartite(n: &Channel, dims: BipartiteDims) -> Result<()> {
    let d = dims.total();
    if n.din() != d || n.dout() != d {
        return Err(Error::dims(format!(
            "channel acts {}->{}, dims {}x{} need {d}->{d}",
            n.din(),
            n.dout(),
            dims.da,
            dims.db
        )));
    }
    Ok(())
}

/// `ρ ↦ tr_B N(ρ ⊗ |ξ⟩⟨ξ|)` with Kraus family `{(I_A ⊗ ⟨b|) K V_ξ}`.
pub fn restrict(n: &Channel, xi: &PureState, dims: BipartiteDims) -> Result<Channel> {
    check_bipartite(n, dims)?;
    if xi.dim() != dims.db {
        return Err(Error::dims(format!(
            "environment state has dim {}, expected {}",
            xi.dim(),
            dims.db
        )));
    }
    let embed = embed_isometry(xi, dims.da);
    let mut ops = Vec::with_capacity(n.kraus().len() * dims.db);
    for k in n.kraus().operators() {
        let kv = k.matmul(&embed);
        for b in 0..dims.db {
            ops.push(CMatrix::from_fn(dims.da, dims.da, |a, i| {
                kv[(dims.index(a, b), i)]
            }));
        }
    }
    Ok(Channel::from_kraus(KrausRepr::from_ops_unchecked(
        dims.da, dims.da, ops,
    )?))
}

/// Heisenberg-picture environment map `F_B ↦ tr_A[N*(I_A ⊗ F_B)] / dA`.
pub fn environment_dual_apply(n: &Channel, dims: BipartiteDims, f: &CMatrix) -> Result<CMatrix> {
    check_bipartite(n, dims)?;
    if f.shape() != (dims.db, dims.db) {
        return Err(Error::dims(format!(
            "observable is {}x{}, expected {}x{}",
            f.rows(),
            f.cols(),
            dims.db,
            dims.db
        )));
    }
    let lifted = n.dual_apply(&kron(&CMatrix::identity(dims.da), f))?;
    Ok(partial_trace(&lifted, dims, Subsystem::A)?.scale_real(1.0 / dims.da as f64))
}

/// Schrödinger-picture channel on B whose dual is [`environment_dual_apply`].
///
/// The Choi matrix is assembled from the dual on matrix units:
/// `J[(o, i), (o', j)] = N*_B(|o'⟩⟨o|)[j, i]`, then validated as CPTP.
pub fn environment_dual_channel(n: &Channel, dims: BipartiteDims) -> Result<Channel> {
    check_bipartite(n, dims)?;
    let db = dims.db;
    let unital =
        environment_dual_apply(n, dims, &CMatrix::identity(db))?.distance(&CMatrix::identity(db));
    if unital > REPR_TOL {
        return Err(Error::Consistency(format!(
            "environment dual map is not unital (defect {unital:.3e})"
        )));
    }
    let mut j = CMatrix::zeros(db * db, db * db);
    for o in 0..db {
        for o2 in 0..db {
            let g = environment_dual_apply(n, dims, &CMatrix::unit(db, o2, o))?;
            for i in 0..db {
                for k in 0..db {
                    j[(o * db + i, o2 * db + k)] = g[(k, i)];
                }
            }
        }
    }
    let choi = ChoiRepr::new(db, db, j.hermitian_part()).map_err(|e| {
        Error::Consistency(format!("environment channel failed CPTP validation: {e}"))
    })?;
    Ok(Channel::from_choi(choi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{channel_distance, tensor};
    use crate::gallery::{
        completely_depolarizing, controlled_channel, pauli_x, random_channel, swap_channel,
    };
    use crate::tensorlab::{derive_seed, haar_state, random_density, DensityMatrix, ONE};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn d22() -> BipartiteDims {
        BipartiteDims::new(2, 2).unwrap()
    }

    #[test]
    fn restriction_at_basis_states_of_controlled_channel() {
        let u0 = crate::tensorlab::haar_unitary(2, 1);
        let u1 = crate::tensorlab::haar_unitary(2, 2);
        let n = controlled_channel(&[u0.clone(), u1.clone()]).unwrap();
        for (x, u) in [(0, u0), (1, u1)] {
            let r = restrict(&n, &PureState::basis(2, x).unwrap(), d22()).unwrap();
            let want = Channel::unitary(u).unwrap();
            assert!(channel_distance(&r, &want).unwrap() < 1e-12);
        }
    }

    #[test]
    fn restriction_at_plus_mixes_branches() {
        let n = controlled_channel(&[CMatrix::identity(2), pauli_x()]).unwrap();
        let plus = PureState::superposition(2, 0, 1, ONE).unwrap();
        let r = restrict(&n, &plus, d22()).unwrap();
        let want = Channel::from_kraus_ops(
            2,
            2,
            vec![CMatrix::identity(2).scale_real(H), pauli_x().scale_real(H)],
        )
        .unwrap();
        assert!(channel_distance(&r, &want).unwrap() < 1e-14);
    }

    #[test]
    fn restriction_of_product_is_first_factor() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let pa = random_channel(2, 2, 3, 1).unwrap();
        let pb = random_channel(3, 3, 2, 2).unwrap();
        let n = tensor(&pa, &pb);
        for s in 0..5 {
            let r = restrict(&n, &haar_state(3, s), dims).unwrap();
            assert!(channel_distance(&r, &pa).unwrap() < 1e-10);
        }
    }

    #[test]
    fn restriction_matches_direct_partial_trace() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let n = random_channel(6, 6, 2, 4).unwrap();
        let xi = haar_state(3, 5);
        let r = restrict(&n, &xi, dims).unwrap();
        for s in 0..5 {
            let rho = random_density(2, derive_seed(9, s));
            let direct = partial_trace(
                n.apply(&rho.kron(&xi.density())).unwrap().matrix(),
                dims,
                Subsystem::B,
            )
            .unwrap();
            assert!(r.apply(&rho).unwrap().matrix().distance(&direct) < 1e-12);
        }
    }

    #[test]
    fn restriction_dimension_errors() {
        let n = controlled_channel(&[CMatrix::identity(2), pauli_x()]).unwrap();
        assert!(restrict(&n, &PureState::basis(3, 0).unwrap(), d22()).is_err());
        let dims = BipartiteDims::new(3, 2).unwrap();
        assert!(restrict(&n, &PureState::basis(2, 0).unwrap(), dims).is_err());
        assert!(environment_dual_channel(&n, dims).is_err());
    }

    #[test]
    fn degenerate_environment_restriction_is_the_channel() {
        let dims = BipartiteDims::new(3, 1).unwrap();
        let n = random_channel(3, 3, 2, 8).unwrap();
        let r = restrict(&n, &PureState::basis(1, 0).unwrap(), dims).unwrap();
        assert!(channel_distance(&r, &n).unwrap() < 1e-12);
    }

    #[test]
    fn environment_channel_of_product_is_second_factor() {
        let dims = BipartiteDims::new(3, 2).unwrap();
        let pa = random_channel(3, 3, 2, 10).unwrap();
        let pb = random_channel(2, 2, 3, 11).unwrap();
        let nb = environment_dual_channel(&tensor(&pa, &pb), dims).unwrap();
        assert!(channel_distance(&nb, &pb).unwrap() < 1e-9);
        let back = nb.dual_apply(&CMatrix::identity(2)).unwrap();
        assert!(back.distance(&CMatrix::identity(2)) < 1e-9);
    }

    #[test]
    fn environment_channel_of_swap_is_depolarizing() {
        for d in 2..=3 {
            let dims = BipartiteDims::new(d, d).unwrap();
            let nb = environment_dual_channel(&swap_channel(d).unwrap(), dims).unwrap();
            assert!(channel_distance(&nb, &completely_depolarizing(d)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn environment_channel_equals_maximally_mixed_input_restriction() {
        // second route: σ ↦ tr_A N(I/dA ⊗ σ)
        let dims = BipartiteDims::new(2, 3).unwrap();
        let n = random_channel(6, 6, 3, 21).unwrap();
        let nb = environment_dual_channel(&n, dims).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        for s in 0..5 {
            let sigma = random_density(3, derive_seed(2, s));
            let direct = partial_trace(
                n.apply(&mixed.kron(&sigma)).unwrap().matrix(),
                dims,
                Subsystem::A,
            )
            .unwrap();
            assert!(nb.apply(&sigma).unwrap().matrix().distance(&direct) < 1e-12);
        }
    }
}
