//! The LNLS driver, its subsolvers and the simulated time model.

mod driver;
mod subsolver;
mod timing;

pub use driver::{run_lnls, run_workflow_variant, BurnDownPoint, BurnDownRecord, LnlsConfig, RegionTemplate, Variant};
pub use subsolver::{random_hardware_samples, subsolve, HardwareContext, Proposals, SubsolverKind, SubsolverSpec};
pub use timing::{accumulate_qpu_time, ClockKind, QpuTiming, TimingModel};
