//! Min-aggregation of satisfaction degrees over requirements and time.

use crate::expr::Degree;

/// Running minimum over every degree seen so far. Starts at `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningMin {
    current: Degree,
}

impl Default for RunningMin {
    fn default() -> Self {
        RunningMin::new()
    }
}

impl RunningMin {
    pub fn new() -> Self {
        RunningMin {
            current: Degree::INFINITY,
        }
    }

    /// Folds one step's per-requirement degrees into the running value.
    pub fn update(&mut self, degrees: &[Degree]) -> Degree {
        for &d in degrees {
            self.current = self.current.min(d);
        }
        self.current
    }

    pub fn current(&self) -> Degree {
        self.current
    }

    /// Fitness of the run: `+inf` if nothing was ever aggregated.
    pub fn finalize(self) -> Degree {
        self.current
    }
}

/// Value-returning form of [`RunningMin::update`].
pub fn aggregate_step(mut r: RunningMin, degrees: &[Degree]) -> RunningMin {
    r.update(degrees);
    r
}

pub fn finalize(r: RunningMin) -> Degree {
    r.finalize()
}
