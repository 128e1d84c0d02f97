use crate::error::{Error, Result};

/// Access-time model of one annealer call, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpuTiming {
    /// Programming time `t_p`.
    pub t_p: f64,
    /// Per-read readout and delay overhead `t_ro`.
    pub t_ro: f64,
    /// Anneal time per read `t_a`.
    pub t_a: f64,
    /// Fixed per-call network overhead.
    pub network: f64,
}

impl Default for QpuTiming {
    /// 10 ms programming and 0.2 ms per-read overhead with a 100 µs anneal:
    /// 17.5 ms for 25 reads.
    fn default() -> Self {
        Self { t_p: 10.0, t_ro: 0.2, t_a: 0.1, network: 0.0 }
    }
}

impl QpuTiming {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t_p", self.t_p), ("t_ro", self.t_ro), ("t_a", self.t_a), ("network", self.network)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be a non-negative time (got {v})")));
            }
        }
        Ok(())
    }
}

/// `t_p + (t_ro + t_a) n_r + network`.
pub fn accumulate_qpu_time(timing: &QpuTiming, reads: usize) -> f64 {
    let n = reads as f64;
    timing.t_p + timing.t_ro * n + timing.t_a * n + timing.network
}

/// How a subsolver call is charged to the simulated clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClockKind {
    /// Simulated QPU access time for the call's read count.
    Qpu,
    /// Spin updates (or equivalent work units) times a fixed rate.
    SpinUpdates,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingModel {
    pub qpu: QpuTiming,
    /// Nanoseconds per spin update for classical subsolvers.
    pub ns_per_update: f64,
    /// Clock used regardless of subsolver kind, if set.
    pub clock_override: Option<ClockKind>,
    /// Read count charged on the QPU clock in place of the subsolver's own.
    pub qpu_reads: Option<usize>,
}

impl Default for TimingModel {
    fn default() -> Self {
        Self { qpu: QpuTiming::default(), ns_per_update: 33.0, clock_override: None, qpu_reads: None }
    }
}

impl TimingModel {
    pub fn charge(&self, clock: ClockKind, reads: usize, spin_updates: u64) -> f64 {
        match self.clock_override.unwrap_or(clock) {
            ClockKind::Qpu => accumulate_qpu_time(&self.qpu, self.qpu_reads.unwrap_or(reads)),
            ClockKind::SpinUpdates => spin_updates as f64 * self.ns_per_update * 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.qpu.validate()?;
        if !(self.ns_per_update > 0.0 && self.ns_per_update.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "spin-update rate must be positive (got {})",
                self.ns_per_update
            )));
        }
        Ok(())
    }
}
