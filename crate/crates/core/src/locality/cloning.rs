use crate::channels::Channel;
use crate::error::{Error, Result};
use crate::tensorlab::{kron, trace_distance, BipartiteDims, DensityMatrix, PureState};

/// Per-state trace distance between `N(ρ ⊗ ξ)` and the clone `ρ ⊗ ρ`.
#[derive(Clone, Debug)]
pub struct CloningViolation {
    pub deviations: Vec<f64>,
    pub max: f64,
}

pub fn cloning_violation(
    n: &Channel,
    xi: &PureState,
    dims: BipartiteDims,
    test_states: &[DensityMatrix],
) -> Result<CloningViolation> {
    if dims.da != dims.db {
        return Err(Error::dims(format!(
            "cloning compares equal factors, got {}x{}",
            dims.da, dims.db
        )));
    }
    if n.din() != dims.total() || n.dout() != dims.total() || xi.dim() != dims.db {
        return Err(Error::dims("channel or blank state does not match dims"));
    }
    let xi_proj = xi.projector();
    let mut deviations = Vec::with_capacity(test_states.len());
    for rho in test_states {
        if rho.dim() != dims.da {
            return Err(Error::dims(format!(
                "test state has dim {}, expected {}",
                rho.dim(),
                dims.da
            )));
        }
        let out = n.apply_operator(&kron(rho.matrix(), &xi_proj))?;
        let clone = kron(rho.matrix(), rho.matrix());
        deviations.push(trace_distance(&out, &clone));
    }
    let max = deviations.iter().copied().fold(0.0_f64, f64::max);
    Ok(CloningViolation { deviations, max })
}
