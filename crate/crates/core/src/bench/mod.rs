//! Benchmark tooling: ground-energy estimates, relative error, median
//! aggregation with confidence bands, SA parameter sweeps and reports.

mod baseline;
mod ground;
mod hull;
mod report;
mod stats;

pub use baseline::{sgd_burn_down, BaselineClock};
pub use ground::{
    check_dominance, estimate_e0, read_ground_estimate, relative_error, write_ground_estimate, GroundEstimate,
    Provenance,
};
pub use hull::{sa_hull_sweep, HullCell};
pub use report::{emit_report, read_csv, write_csv, write_svg, ReportFormat};
pub use stats::{aggregate_median, energy_at, median_ci, sample_curves, AggregateCurve, CurvePoint, TimeAxis};
