//! Divisibility witnesses: trace-distance revivals for P-indivisibility and
//! the commutativity defect for CP-divisibility of switched dynamics.

use crate::channels::ChannelFamily;
use crate::cqs::{commutativity_defect, CommutativityReport};
use crate::error::{Error, Result};

/// Default revival tolerance for analytic channels.
pub const ANALYTIC_TOL: f64 = 1e-6;
/// Default revival tolerance when the universal switch optimizer is involved.
pub const OPTIMIZER_TOL: f64 = 1e-4;

const RANGE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    distances: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, distances: Vec<f64>) -> Result<Self> {
        if times.len() != distances.len() {
            return Err(Error::DimensionMismatch {
                op: "trajectory",
                left: times.len(),
                right: distances.len(),
            });
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(format!(
                "trajectory times must increase ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(d) = distances
            .iter()
            .find(|d| !(d.is_finite() && (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(*d)))
        {
            return Err(Error::InvalidParameter(format!("distance {d} outside [0, 1]")));
        }
        Ok(Self { times, distances })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessReport {
    pub violated: bool,
    /// Pair `(t_a, t_b)` with the largest increase, if any increase exists.
    pub t_pair: Option<(f64, f64)>,
    pub increase: Option<f64>,
    pub tolerance: f64,
}

/// Largest `d[b] - d[a]` over `b > a`, returned as `(a, b, increase)` with
/// ties broken by earliest `a`, then earliest `b`. `None` if nothing increases.
fn largest_increase(d: &[f64]) -> Option<(usize, usize, f64)> {
    let mut best = 0.0;
    let mut min = d[0];
    for &x in &d[1..] {
        best = f64::max(best, x - min);
        min = min.min(x);
    }
    if best <= 0.0 {
        return None;
    }
    // suffix maxima, earliest index on ties
    let n = d.len();
    let mut suffix = vec![n - 1; n];
    for k in (0..n - 1).rev() {
        let next = suffix[k + 1];
        suffix[k] = if d[k] >= d[next] { k } else { next };
    }
    (0..n - 1).find_map(|a| {
        let b = suffix[a + 1];
        (d[b] - d[a] == best).then_some((a, b, best))
    })
}

/// Scans every ordered pair of samples for a trace-distance revival.
pub fn scan_monotonicity(traj: &Trajectory, tol: f64) -> Result<WitnessReport> {
    if traj.len() < 2 {
        return Err(Error::TrajectoryTooShort(traj.len()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    Ok(match largest_increase(&traj.distances) {
        Some((a, b, increase)) => WitnessReport {
            violated: increase > tol,
            t_pair: Some((traj.times[a], traj.times[b])),
            increase: Some(increase),
            tolerance: tol,
        },
        None => WitnessReport {
            violated: false,
            t_pair: None,
            increase: None,
            tolerance: tol,
        },
    })
}

/// `true` when the commutativity defect stays within `tol` on the grid.
pub fn certify_cp_divisibility(
    fam1: &ChannelFamily,
    fam2: &ChannelFamily,
    grid: &[(f64, f64, f64)],
    tol: f64,
) -> Result<(bool, CommutativityReport)> {
    let report = commutativity_defect(fam1, fam2, grid)?;
    Ok((report.max_defect <= tol, report))
}
