use super::ground::relative_error;
use crate::error::{Error, Result};
use crate::lnls::{BurnDownPoint, BurnDownRecord};

/// Nominal coverage of the confidence band on the median.
pub const CI_LEVEL: f64 = 0.68;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeAxis {
    /// Simulated clock (QPU access time or modeled spin-update time).
    #[default]
    Simulated,
    /// Measured wall clock.
    Wall,
}

impl TimeAxis {
    fn of(self, p: &BurnDownPoint) -> f64 {
        match self {
            TimeAxis::Simulated => p.sim_time_ms,
            TimeAxis::Wall => p.wall_time_ms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub time_ms: f64,
    pub median_r: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateCurve {
    pub label: String,
    pub points: Vec<CurvePoint>,
}

fn median_sorted(x: &[f64]) -> f64 {
    let n = x.len();
    if n % 2 == 1 {
        x[n / 2]
    } else {
        0.5 * (x[n / 2 - 1] + x[n / 2])
    }
}

/// Coverage of `[x_(k), x_(n-k+1)]` as an interval for the median:
/// `P(k <= B <= n-k)` with `B ~ Binomial(n, 1/2)`.
fn order_coverage(n: usize, k: usize) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let mut ln_c = 0.0;
    let mut tail = 0.0;
    for i in 0..k {
        tail += (ln_c - n as f64 * ln2).exp();
        ln_c += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    1.0 - 2.0 * tail
}

/// Median with a distribution-free 68% band from binomial order statistics,
/// interpolated between neighbouring ranks (Hettmansperger and Sheather) so
/// the nominal coverage is met rather than exceeded.
pub fn median_ci(values: &[f64]) -> Option<(f64, f64, f64)> {
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return None;
    }
    let mut x = values.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let med = median_sorted(&x);
    let mut k = 1;
    while 2 * (k + 1) <= n && order_coverage(n, k + 1) >= CI_LEVEL {
        k += 1;
    }
    let gk = order_coverage(n, k);
    // 1-based ranks k and n-k+1
    let (lo_k, hi_k) = (x[k - 1], x[n - k]);
    if gk <= CI_LEVEL || 2 * (k + 1) > n {
        return Some((med, lo_k.min(med), hi_k.max(med)));
    }
    let gk1 = order_coverage(n, k + 1);
    let i = (gk - CI_LEVEL) / (gk - gk1);
    let lambda = (n - k) as f64 * i / (k as f64 + (n as f64 - 2.0 * k as f64) * i);
    let lo = (1.0 - lambda) * lo_k + lambda * x[k];
    let hi = (1.0 - lambda) * hi_k + lambda * x[n - k - 1];
    Some((med, lo.min(med), hi.max(med)))
}

/// Per-iteration median relative error across traces, with the median time
/// coordinate of each iteration.
pub fn aggregate_median(traces: &[BurnDownRecord], e0s: &[f64], axis: TimeAxis) -> Result<AggregateCurve> {
    check_inputs(traces, e0s)?;
    let len = traces[0].points.len();
    if traces.iter().any(|t| t.points.len() != len) {
        return Err(Error::InvalidArgument("traces have different iteration counts".into()));
    }
    let mut points = Vec::with_capacity(len);
    for it in 0..len {
        let r = traces
            .iter()
            .zip(e0s)
            .map(|(t, &e0)| relative_error(e0, t.points[it].energy))
            .collect::<Result<Vec<_>>>()?;
        let times: Vec<f64> = traces.iter().map(|t| axis.of(&t.points[it])).collect();
        let (med, lo, hi) = median_ci(&r).expect("non-empty");
        let (time, _, _) = median_ci(&times).expect("non-empty");
        points.push(CurvePoint { time_ms: time, median_r: med, ci_low: lo, ci_high: hi });
    }
    Ok(AggregateCurve { label: String::new(), points })
}

/// Energy of the last recorded point at or before time `t`; the trace's
/// initial energy before its first point.
pub fn energy_at(record: &BurnDownRecord, t: f64, axis: TimeAxis) -> f64 {
    let idx = record.points.partition_point(|p| axis.of(p) <= t);
    record.points[idx.saturating_sub(1)].energy
}

/// Median relative error across traces evaluated at fixed times, for
/// comparing methods whose iterations do not line up.
pub fn sample_curves(traces: &[BurnDownRecord], e0s: &[f64], times: &[f64], axis: TimeAxis) -> Result<AggregateCurve> {
    check_inputs(traces, e0s)?;
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let r = traces
            .iter()
            .zip(e0s)
            .map(|(tr, &e0)| relative_error(e0, energy_at(tr, t, axis)))
            .collect::<Result<Vec<_>>>()?;
        let (med, lo, hi) = median_ci(&r).expect("non-empty");
        points.push(CurvePoint { time_ms: t, median_r: med, ci_low: lo, ci_high: hi });
    }
    Ok(AggregateCurve { label: String::new(), points })
}

fn check_inputs(traces: &[BurnDownRecord], e0s: &[f64]) -> Result<()> {
    if traces.is_empty() {
        return Err(Error::InvalidArgument("no traces to aggregate".into()));
    }
    if traces.len() != e0s.len() {
        return Err(Error::Dimension { expected: traces.len(), got: e0s.len() });
    }
    if traces.iter().any(|t| t.points.is_empty()) {
        return Err(Error::InvalidArgument("empty trace".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn trace(energies: &[f64], dt: f64) -> BurnDownRecord {
        BurnDownRecord {
            points: energies
                .iter()
                .enumerate()
                .map(|(i, &e)| BurnDownPoint {
                    iteration: i,
                    energy: e,
                    accepted: i > 0,
                    sim_time_ms: i as f64 * dt,
                    wall_time_ms: i as f64,
                    subsolver_wall_ms: 0.0,
                    region: None,
                    offset: None,
                })
                .collect(),
        }
    }

    #[test]
    fn coverage_matches_binomial_tails() {
        // P(B <= 9) for B ~ Bin(25, 1/2) = 0.11476147174835205
        assert!((order_coverage(25, 10) - (1.0 - 2.0 * 0.11476147174835205)).abs() < 1e-12);
        assert!((order_coverage(4, 1) - 0.875).abs() < 1e-15);
        assert!((order_coverage(2, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_trace_is_reproduced() {
        let t = trace(&[-50.0, -80.0, -90.0, -100.0], 17.5);
        let c = aggregate_median(&[t], &[-100.0], TimeAxis::Simulated).unwrap();
        let want = [0.5, 0.2, 0.1, 0.0];
        for (p, w) in c.points.iter().zip(want) {
            assert!((p.median_r - w).abs() < 1e-15);
            assert_eq!((p.ci_low, p.ci_high), (p.median_r, p.median_r));
        }
        assert_eq!(c.points[3].time_ms, 52.5);
    }

    #[test]
    fn three_trace_median() {
        let ts: Vec<_> = [0.1, 0.2, 0.9].iter().map(|r| trace(&[0.0, -(1.0 - r)], 1.0)).collect();
        let c = aggregate_median(&ts, &[-1.0; 3], TimeAxis::Simulated).unwrap();
        assert!((c.points[1].median_r - 0.2).abs() < 1e-12);
        assert!(c.points[1].ci_low <= 0.2 && c.points[1].ci_high >= 0.2);
    }

    #[test]
    fn mismatched_or_empty_input_is_rejected() {
        assert!(aggregate_median(&[], &[], TimeAxis::Simulated).is_err());
        let a = trace(&[-1.0, -2.0], 1.0);
        let b = trace(&[-1.0], 1.0);
        assert!(aggregate_median(&[a.clone(), b], &[-2.0, -2.0], TimeAxis::Simulated).is_err());
        assert!(aggregate_median(&[a], &[-2.0, -2.0], TimeAxis::Simulated).is_err());
    }

    #[test]
    fn band_covers_the_true_median_about_68_percent() {
        let mut rng = stream(2024, 0);
        let trials = 1000;
        let mut hits = 0;
        for _ in 0..trials {
            // exponential samples, true median ln 2
            let xs: Vec<f64> = (0..25).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let (m, lo, hi) = median_ci(&xs).unwrap();
            assert!(lo <= m && m <= hi);
            if lo <= std::f64::consts::LN_2 && std::f64::consts::LN_2 <= hi {
                hits += 1;
            }
        }
        let cov = hits as f64 / trials as f64;
        // binomial sd at 1000 trials is about 0.015
        assert!((cov - 0.68).abs() < 0.045, "coverage {cov}");
    }

    #[test]
    fn step_function_lookup() {
        let t = trace(&[-1.0, -2.0, -3.0], 10.0);
        assert_eq!(energy_at(&t, 0.0, TimeAxis::Simulated), -1.0);
        assert_eq!(energy_at(&t, 9.9, TimeAxis::Simulated), -1.0);
        assert_eq!(energy_at(&t, 10.0, TimeAxis::Simulated), -2.0);
        assert_eq!(energy_at(&t, 1e9, TimeAxis::Simulated), -3.0);
        assert_eq!(energy_at(&t, 1.0, TimeAxis::Wall), -2.0);
        let c = sample_curves(&[t], &[-3.0], &[5.0, 25.0], TimeAxis::Simulated).unwrap();
        assert!((c.points[0].median_r - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.points[1].median_r, 0.0);
    }
}
