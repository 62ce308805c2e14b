use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform sample times on [t0, t1], in units of 1/ω_m.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
}

impl TimeGrid {
    /// A grid with `t1 > t0` and at least two samples, or the degenerate
    /// single-sample grid `t1 == t0` holding only the initial time.
    pub fn new(t0: f64, t1: f64, samples: usize) -> Result<Self> {
        let g = TimeGrid { t0, t1, samples };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite()) {
            return Err(Error::InvalidArgument("grid bounds must be finite".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidArgument("grid needs at least one sample".into()));
        }
        if self.t1 == self.t0 {
            if self.samples != 1 {
                return Err(Error::InvalidArgument(
                    "zero-duration grid must have exactly one sample".into(),
                ));
            }
            return Ok(());
        }
        if self.t1 < self.t0 || self.samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs t1 > t0 and >= 2 samples, got [{}, {}] x {}",
                self.t0, self.t1, self.samples
            )));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.t0];
        }
        let dt = (self.t1 - self.t0) / (self.samples - 1) as f64;
        (0..self.samples)
            .map(|k| if k + 1 == self.samples { self.t1 } else { self.t0 + k as f64 * dt })
            .collect()
    }
}
