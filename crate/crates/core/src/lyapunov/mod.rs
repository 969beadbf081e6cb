//! Transfer products, finite-scale exponents and the multi-scale toolkit
//! built on them.

mod ap;
mod exponent;
mod ldt;
mod probe;
mod product;
mod schedule;

pub use ap::{ap_residual, ApCheck, AP_CONSTANT};
pub use exponent::{
    finite_le, log_det_integral, pointwise_grid, LyapunovRecord, QualityWarning, CLAMP_WARNING_FRACTION,
    LOG_DET_CLAMP_LIMIT,
};
pub use ldt::{fit_ldt, ldt_empirical, ldt_k0, LdtFit, LdtReport};
pub use probe::{convergence_probe, ProbeReport};
pub use product::{
    finite_le_at_point, renormalized_le_at_point, transfer_product, PointValue, ProductKernel, TransferProduct,
    LOG_CLAMP,
};
pub use schedule::{build_schedule, InductionSchedule, ScheduleMode, Stage};
