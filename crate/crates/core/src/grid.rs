use crate::error::{Error, Result};

const UNIFORM_REL_TOL: f64 = 1e-12;

/// Strictly increasing sample times starting at t = 0.
///
/// Coefficients sampled on a grid are piecewise constant: the value at `t_k`
/// holds on `[t_k, t_{k+1})`, so the horizon sample never enters an integral.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                times.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "t_0 must be 0, got {}",
                times[0]
            )));
        }
        if let Some(k) = times
            .windows(2)
            .position(|w| !w[1].is_finite() || w[1] <= w[0])
        {
            return Err(Error::InvalidGrid(format!(
                "times not strictly increasing at index {}",
                k + 1
            )));
        }
        Ok(Self { times })
    }

    /// `intervals` equal steps of width `horizon / intervals`.
    pub fn uniform(horizon: f64, intervals: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if intervals == 0 {
            return Err(Error::InvalidGrid("need at least one interval".into()));
        }
        let dt = horizon / intervals as f64;
        let times = (0..=intervals).map(|k| k as f64 * dt).collect();
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.times[self.times.len() - 1]
    }

    /// Widths `t_{k+1} - t_k`, one per interval.
    pub fn widths(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// The common step Δ when every interval agrees to 1e-12 relative.
    pub fn step(&self) -> Option<f64> {
        let widths = self.widths();
        let mean = self.horizon() / widths.len() as f64;
        widths
            .iter()
            .all(|w| (w - mean).abs() <= UNIFORM_REL_TOL * mean)
            .then_some(mean)
    }

    pub(crate) fn check_len(&self, what: &'static str, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::LengthMismatch {
                what,
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }
}
