//! Zero-noise extrapolation by Richardson's deferred approach to the limit.

pub mod fit;
pub mod nodes;
pub mod protocol;
pub mod richardson;

pub use fit::{fit_expansion, ExpansionDiagnostics};
pub use nodes::{make_node_sequence, NodeKind, NodeSequence, DEFAULT_C_MAX, DEFAULT_MIN_SEPARATION};
pub use protocol::{run_zne_protocol, Estimator, ZneCsvRow, ZneResult};
pub use richardson::{extrapolate, remainder_and_error_bound, richardson_coefficients, RichardsonPlan};
