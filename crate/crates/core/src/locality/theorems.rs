use num_complex::Complex64 as C64;

use super::restrict::{environment_dual_channel, restrict};
use super::{PipelineConfig, PremiseStatus, VerdictReport, Witness};
use crate::channels::{channel_distance, tensor, unitarity_probe, Channel, UnitarityProbe};
use crate::error::Result;
use crate::tensorlab::{
    derive_seed, haar_state, kron, partial_trace, random_density, trace_distance, BipartiteDims,
    DensityMatrix, PureState, Subsystem, ONE,
};

const BORDERLINE_NOTE: &str =
    "restriction Choi spectrum has an eigenvalue within a factor 10 of the unitarity threshold";

fn probe_restriction(
    n: &Channel,
    xi: &PureState,
    dims: BipartiteDims,
    tol: f64,
) -> Result<(Channel, UnitarityProbe)> {
    let r = restrict(n, xi, dims)?;
    let p = unitarity_probe(&r, tol);
    Ok((r, p))
}

/// Slice factorization at a fixed pure environment state `ξ`.
///
/// If the restriction to A is unitary with `U_A`, checks
/// `N(ρ ⊗ ξ) = U_A ρ U_A* ⊗ σ_B` on `cfg.probes` random states, where
/// `σ_B = tr_A N(I/dA ⊗ ξ)`.
pub fn theorem1_factorize(
    n: &Channel,
    xi: &PureState,
    dims: BipartiteDims,
    cfg: &PipelineConfig,
) -> Result<VerdictReport> {
    let tol = cfg.tol;
    let (_, probe) = probe_restriction(n, xi, dims, tol)?;
    let mut report = VerdictReport::new(PremiseStatus::Fails, tol);
    if probe.borderline {
        report.warnings.push(BORDERLINE_NOTE.into());
    }
    report.push_residual("restriction_second_eigenvalue_ratio", probe.second_ratio);

    let Some(u_a) = probe.unitary else {
        report.witnesses.push(Witness {
            label: "restriction Choi second eigenvalue ratio".into(),
            state: Some(xi.clone()),
            deviation: probe.second_ratio,
        });
        return Ok(report);
    };

    let xi_proj = xi.projector();
    let mixed = DensityMatrix::maximally_mixed(dims.da);
    let probe_out = n.apply_operator(&kron(mixed.matrix(), &xi_proj))?;
    let sigma_b = partial_trace(&probe_out, dims, Subsystem::A)?.hermitian_part();

    let checks: Vec<Result<(f64, f64)>> = cfg.exec.map(cfg.probes, |i| {
        let rho = random_density(dims.da, derive_seed(cfg.seed, i as u64));
        let out = n.apply_operator(&kron(rho.matrix(), &xi_proj))?;
        let predicted = kron(&u_a.conjugate(rho.matrix()), &sigma_b);
        let env = partial_trace(&out, dims, Subsystem::A)?;
        Ok((out.distance(&predicted), trace_distance(&env, &sigma_b)))
    });
    let mut slice_max = 0.0_f64;
    let mut env_max = 0.0_f64;
    for c in checks {
        let (s, e) = c?;
        slice_max = slice_max.max(s);
        env_max = env_max.max(e);
    }

    let env_channel = environment_dual_channel(n, dims)?;
    let env_route = env_channel
        .apply(&xi.density())?
        .matrix()
        .distance(&sigma_b);

    report.push_residual("slice_residual_max", slice_max);
    report.push_residual("environment_output_spread", env_max);
    report.push_residual("environment_channel_route_gap", env_route);
    report.recovered_unitary = Some(u_a);
    report.recovered_env_state = Some(DensityMatrix::from_matrix_unchecked(sigma_b));
    report.recovered_env_channel = Some(env_channel);

    if report.all_residuals_within_tolerance() {
        report.premise_status = PremiseStatus::Holds;
    } else {
        report.alarm = Some(format!(
            "restriction is unitary but slice factorization residual {slice_max:.3e} \
             (environment spread {env_max:.3e}) exceeds tolerance {tol:.1e}"
        ));
    }
    Ok(report)
}

/// Compares the restrictions at two pure environment states. Non-orthogonal
/// states with unitary restrictions must induce the same channel, with
/// `U_{A,1} = λ U_{A,2}` and `|λ| = 1`.
pub fn theorem2_check(
    n: &Channel,
    xi1: &PureState,
    xi2: &PureState,
    dims: BipartiteDims,
    tol: f64,
) -> Result<VerdictReport> {
    let (r1, p1) = probe_restriction(n, xi1, dims, tol)?;
    let (r2, p2) = probe_restriction(n, xi2, dims, tol)?;
    let overlap = xi1.inner(xi2).norm();

    if overlap <= tol {
        let mut report = VerdictReport::new(PremiseStatus::Inapplicable, tol);
        report.push_residual("overlap", overlap);
        return Ok(report);
    }

    let mut report = VerdictReport::new(PremiseStatus::Fails, tol);
    if p1.borderline || p2.borderline {
        report.warnings.push(BORDERLINE_NOTE.into());
    }
    report.push_residual("restriction1_second_eigenvalue_ratio", p1.second_ratio);
    report.push_residual("restriction2_second_eigenvalue_ratio", p2.second_ratio);

    let (u1, u2) = match (p1.unitary.clone(), p2.unitary.clone()) {
        (Some(u1), Some(u2)) => (u1, u2),
        (u1, u2) => {
            for (label, u, p, xi) in [
                (
                    "xi1 restriction Choi second eigenvalue ratio",
                    &u1,
                    &p1,
                    xi1,
                ),
                (
                    "xi2 restriction Choi second eigenvalue ratio",
                    &u2,
                    &p2,
                    xi2,
                ),
            ] {
                if u.is_none() {
                    report.witnesses.push(Witness {
                        label: label.into(),
                        state: Some(xi.clone()),
                        deviation: p.second_ratio,
                    });
                }
            }
            return Ok(report);
        }
    };

    let dist = channel_distance(&r1, &r2)?;
    let da = dims.da as f64;
    // U1 = λ U2  ⇒  λ = tr(U2* U1) / dA
    let lambda = u2.hs_inner(&u1) / da;
    let modulus_defect = (1.0 - lambda.norm()).abs();
    let alignment = u1.distance(&u2.scale(lambda));

    report.push_residual("restriction_channel_distance", dist);
    report.push_residual("phase_modulus_defect", modulus_defect);
    report.push_residual("phase_alignment", alignment);
    report.phase = Some(if lambda.norm() > 0.0 {
        lambda / lambda.norm()
    } else {
        ONE
    });
    report.recovered_unitary = Some(u1);

    if report.all_residuals_within_tolerance() {
        report.premise_status = PremiseStatus::Holds;
    } else {
        report.alarm = Some(format!(
            "non-orthogonal states (overlap {overlap:.3e}) give unitary restrictions that differ: \
             channel distance {dist:.3e}, phase modulus defect {modulus_defect:.3e}"
        ));
    }
    Ok(report)
}

/// Environment states screened by [`theorem3_factorize`]: the basis, the
/// real and imaginary pair superpositions, then `2·dB` Haar-random states.
pub fn certification_set(db: usize, seed: u64) -> Vec<(String, PureState)> {
    let mut set = Vec::new();
    for x in 0..db {
        set.push((
            format!("|{x}>"),
            PureState::basis(db, x).expect("index in range"),
        ));
    }
    for x in 0..db {
        for y in x + 1..db {
            set.push((
                format!("(|{x}>+|{y}>)/sqrt2"),
                PureState::superposition(db, x, y, ONE).expect("distinct indices"),
            ));
            set.push((
                format!("(|{x}>+i|{y}>)/sqrt2"),
                PureState::superposition(db, x, y, C64::i()).expect("distinct indices"),
            ));
        }
    }
    for k in 0..2 * db {
        set.push((
            format!("haar[{k}]"),
            haar_state(db, derive_seed(seed, k as u64)),
        ));
    }
    set
}

/// Global factorization. Screens the restrictions over
/// [`certification_set`], then compares `N` against
/// `(U_A-conjugation) ⊗ N_B` with `N_B` from [`environment_dual_channel`];
/// that Choi comparison decides the verdict.
pub fn theorem3_factorize(
    n: &Channel,
    dims: BipartiteDims,
    cfg: &PipelineConfig,
) -> Result<VerdictReport> {
    let tol = cfg.tol;
    let set = certification_set(dims.db, cfg.seed);
    let probes: Vec<Result<(Channel, UnitarityProbe)>> = cfg
        .exec
        .map(set.len(), |k| probe_restriction(n, &set[k].1, dims, tol));
    let probes: Vec<(Channel, UnitarityProbe)> = probes.into_iter().collect::<Result<_>>()?;

    let mut report = VerdictReport::new(PremiseStatus::Fails, tol);
    if probes.iter().any(|(_, p)| p.borderline) {
        report.warnings.push(BORDERLINE_NOTE.into());
    }
    let worst_ratio = probes
        .iter()
        .map(|(_, p)| p.second_ratio)
        .fold(0.0_f64, f64::max);
    report.push_residual("max_restriction_second_eigenvalue_ratio", worst_ratio);

    for ((label, xi), (_, p)) in set.iter().zip(&probes) {
        if p.unitary.is_none() {
            report.witnesses.push(Witness {
                label: format!("{label}: restriction Choi second eigenvalue ratio"),
                state: Some(xi.clone()),
                deviation: p.second_ratio,
            });
        }
    }
    if !report.witnesses.is_empty() {
        return Ok(report);
    }

    let (first, first_probe) = &probes[0];
    let u_a = first_probe
        .unitary
        .clone()
        .expect("all restrictions unitary");
    let mut spread = 0.0_f64;
    for (r, _) in &probes[1..] {
        spread = spread.max(channel_distance(r, first)?);
    }
    let env_channel = environment_dual_channel(n, dims)?;
    let product = tensor(&Channel::unitary(u_a.clone())?, &env_channel);
    let global = channel_distance(n, &product)?;

    report.push_residual("restriction_spread", spread);
    report.push_residual("global_choi_distance", global);
    report.recovered_unitary = Some(u_a);
    report.recovered_env_channel = Some(env_channel);

    if spread > tol {
        report.alarm = Some(format!(
            "all screened restrictions are unitary but they differ by {spread:.3e}"
        ));
        return Ok(report);
    }
    if global <= tol {
        report.premise_status = PremiseStatus::Holds;
    } else {
        report.warnings.push(
            "every screened restriction is unitary but the channel is not a product; \
             the certification set missed a non-unitary restriction"
                .into(),
        );
        report.witnesses.push(Witness {
            label: "global Choi distance to the recovered product channel".into(),
            state: None,
            deviation: global,
        });
    }
    Ok(report)
}
