//! Locality of bipartite channels whose restrictions to subsystem A are
//! unitary: restriction channels, the environment channel, the slice and
//! global factorization pipelines, the conditional-semantics check, signed
//! product decompositions and cloning deviation.

mod cloning;
mod decompose;
mod restrict;
mod theorems;

use num_complex::Complex64 as C64;

pub use cloning::{cloning_violation, CloningViolation};
pub use decompose::{decompose_product_basis, hermitian_basis, signed_state_split, ProductTerm};
pub use restrict::{environment_dual_apply, environment_dual_channel, restrict};
pub use theorems::{certification_set, theorem1_factorize, theorem2_check, theorem3_factorize};

use crate::channels::{Channel, DEFAULT_UNITARY_TOL};
use crate::exec::Exec;
use crate::tensorlab::{CMatrix, DensityMatrix, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PremiseStatus {
    Holds,
    Fails,
    Inapplicable,
}

impl PremiseStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PremiseStatus::Holds => "holds",
            PremiseStatus::Fails => "fails",
            PremiseStatus::Inapplicable => "inapplicable",
        }
    }
}

/// An input that exhibits the verdict, with the deviation it produced.
#[derive(Clone, Debug)]
pub struct Witness {
    pub label: String,
    pub state: Option<PureState>,
    pub deviation: f64,
}

/// Outcome of one of the locality pipelines.
#[derive(Clone, Debug)]
pub struct VerdictReport {
    pub premise_status: PremiseStatus,
    pub tolerance: f64,
    pub recovered_unitary: Option<CMatrix>,
    pub recovered_env_channel: Option<Channel>,
    /// `tr_A N(ρ ⊗ ξ)`, the environment output at the tested `ξ`.
    pub recovered_env_state: Option<DensityMatrix>,
    /// λ with `U_{A,1} = λ U_{A,2}`.
    pub phase: Option<C64>,
    pub residuals: Vec<(String, f64)>,
    pub witnesses: Vec<Witness>,
    pub warnings: Vec<String>,
    /// Set when a result contradicts what must hold by theory; the CLI turns
    /// this into exit code 3.
    pub alarm: Option<String>,
}

impl VerdictReport {
    pub(crate) fn new(status: PremiseStatus, tolerance: f64) -> Self {
        Self {
            premise_status: status,
            tolerance,
            recovered_unitary: None,
            recovered_env_channel: None,
            recovered_env_state: None,
            phase: None,
            residuals: Vec::new(),
            witnesses: Vec::new(),
            warnings: Vec::new(),
            alarm: None,
        }
    }

    pub(crate) fn push_residual(&mut self, name: &str, value: f64) {
        self.residuals.push((name.to_string(), value));
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }

    pub fn holds(&self) -> bool {
        self.premise_status == PremiseStatus::Holds
    }

    pub(crate) fn all_residuals_within_tolerance(&self) -> bool {
        self.residuals.iter().all(|&(_, v)| v <= self.tolerance)
    }
}

/// Shared knobs for the verification pipelines.
#[derive(Clone, Copy, Debug)]
pub struct PipelineConfig {
    pub tol: f64,
    /// Random probe states per check.
    pub probes: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_UNITARY_TOL,
            probes: 20,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

impl PipelineConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_probes(mut self, probes: usize) -> Self {
        self.probes = probes;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }
}
