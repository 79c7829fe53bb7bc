//! Finite-dimensional quantum channels and locality checks for bipartite
//! channels.
//!
//! The crate covers Kraus, Choi and Stinespring representations with their
//! conversions, minimal dilations and the environment isometry between two
//! dilations, and executable verifiers for the factorization of bipartite
//! channels whose restrictions to one subsystem are unitary.
//!
//! Composite spaces index A-major: `index(a, b) = a·dB + b`.

pub mod channels;
pub mod dilation;
pub mod error;
pub mod exec;
pub mod gallery;
pub mod locality;
pub mod tensorlab;

pub use channels::{Channel, ChoiRepr, KrausRepr};
pub use dilation::{Intertwiner, StinespringRepr};
pub use error::{Error, Result};
pub use exec::Exec;
pub use locality::{PipelineConfig, PremiseStatus, VerdictReport};
pub use tensorlab::{BipartiteDims, CMatrix, DensityMatrix, PureState, Subsystem};
