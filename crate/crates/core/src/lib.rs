//! Entanglement distance and entanglement metric of multiqubit and bosonic
//! states, local-unitary equivalence tests, a mixed-state convex roof and
//! LOCC monotonicity checks.

pub mod cli;
pub mod convexroof;
pub mod cvmode;
pub mod error;
pub mod families;
pub mod fsmetric;
pub mod locc;
pub mod luequiv;
pub mod qstate;
pub mod random;
pub mod simplex;

pub use error::{Error, Result};
pub use fsmetric::{
    block_structure, entanglement_distance, metric_tensor, metric_trace, optimal_frame, EdReport, MetricTensor,
    UnitVectorFrame,
};
pub use qstate::{BlochVector, DensityMatrix, PureState, C64};
