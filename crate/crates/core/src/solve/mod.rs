//! Solvers for the two design problems: ADMM on the half-spectrum QP and
//! successive convex approximation on the general pulse problem, plus an
//! independent projected-gradient reference used to certify them.

mod admm;
mod reference;
mod sca;

pub use admm::{admm_solve, AdmmConfig, DualUpdate};
pub use reference::reference_solve;
pub use sca::{sca_gradient, sca_solve, sca_subproblem, ScaConfig};

use serde::{Deserialize, Serialize};

use crate::esd::Esd;
use crate::pulse::Pulse;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Solution {
    Pulse(Pulse),
    Esd(Esd),
}

/// Outcome of a solver run: the solution plus per-iteration traces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub solution: Solution,
    pub objective_trace: Vec<f64>,
    pub residual_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time_s: f64,
}

impl SolveReport {
    pub fn pulse(&self) -> Option<&Pulse> {
        match &self.solution {
            Solution::Pulse(p) => Some(p),
            Solution::Esd(_) => None,
        }
    }

    pub fn esd(&self) -> Option<&Esd> {
        match &self.solution {
            Solution::Esd(e) => Some(e),
            Solution::Pulse(_) => None,
        }
    }

    pub fn final_objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(f64::NAN)
    }
}
