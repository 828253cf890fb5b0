//! ADMM for the linearly constrained nonnegative QP on the half-spectrum.
//!
//! The splitting keeps the equality constraints in the omega update (one
//! saddle linear system, factored per penalty value) and projects the copy
//! variable onto the nonnegative orthant. The penalty is rebalanced from the
//! primal/dual residual ratio, which keeps the iteration count flat across
//! interior and active problems.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::QpProblem;
use crate::error::{Error, Result};
use crate::esd::Esd;
use crate::solve::{Solution, SolveReport};

/// Dual update rule. `Standard` accumulates the multiplier; `Paper` replaces
/// it each iteration. The replacing rule only reaches the optimum when the
/// nonnegativity constraints are inactive at the solution, so `Standard` is
/// the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DualUpdate {
    #[default]
    Standard,
    Paper,
}

#[derive(Debug, Clone, Copy)]
pub struct AdmmConfig {
    /// Augmented-Lagrangian penalty; `None` picks 1e-5 * tr(2Q) / dim.
    pub varrho: Option<f64>,
    /// Stop when the omega step falls below this.
    pub epsilon: f64,
    pub i_max: usize,
    pub dual_update: DualUpdate,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig {
            varrho: None,
            epsilon: 1e-10,
            i_max: 200_000,
            dual_update: DualUpdate::Standard,
        }
    }
}

struct KktSolver {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
}

impl KktSolver {
    fn factor(q: &DMatrix<f64>, a: &DMatrix<f64>, varrho: f64) -> Result<KktSolver> {
        let n = q.nrows();
        let m = a.nrows();
        let mut k = DMatrix::zeros(n + m, n + m);
        for i in 0..n {
            for j in 0..n {
                k[(i, j)] = 2.0 * q[(i, j)];
            }
            k[(i, i)] += varrho;
        }
        for i in 0..m {
            for j in 0..n {
                k[(n + i, j)] = a[(i, j)];
                k[(j, n + i)] = a[(i, j)];
            }
        }
        let lu = k.clone().lu();
        if !lu.is_invertible() {
            let rank = k.svd(false, false).rank(1e-12);
            return Err(Error::SingularKkt { rank, dim: n + m });
        }
        Ok(KktSolver { lu, n })
    }

    fn solve(&self, top: &DVector<f64>, bottom: &DVector<f64>) -> DVector<f64> {
        let m = bottom.len();
        let mut rhs = DVector::zeros(self.n + m);
        rhs.rows_mut(0, self.n).copy_from(top);
        rhs.rows_mut(self.n, m).copy_from(bottom);
        let sol = self.lu.solve(&rhs).expect("factorization checked invertible");
        sol.rows(0, self.n).into_owned()
    }
}

pub fn admm_solve(problem: &QpProblem, config: &AdmmConfig, initial: &Esd) -> Result<SolveReport> {
    let start = std::time::Instant::now();
    let n = problem.q.nrows();
    if initial.omega().len() != n {
        return Err(Error::InvalidEsd(format!(
            "initial spectrum has {} bins, problem has {n}",
            initial.omega().len()
        )));
    }
    let mut varrho = config.varrho.unwrap_or_else(|| {
        let tr: f64 = (0..n).map(|i| 2.0 * problem.q[(i, i)]).sum();
        (1e-5 * tr / n as f64).max(1e-12)
    });
    let mut kkt = KktSolver::factor(&problem.q, &problem.a, varrho)?;

    let mut omega = DVector::from_row_slice(initial.omega());
    let mut theta = omega.clone();
    let mut lambda = DVector::zeros(n);
    let mut objective_trace = Vec::new();
    let mut residual_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for k in 1..=config.i_max {
        iterations = k;
        let top = varrho * &theta - &lambda;
        let omega_new = kkt.solve(&top, &problem.rhs);
        let mut theta_new = &omega_new + &lambda / varrho;
        for e in theta_new.iter_mut() {
            if *e < 0.0 {
                *e = 0.0;
            }
        }
        match config.dual_update {
            DualUpdate::Standard => lambda += varrho * (&omega_new - &theta_new),
            DualUpdate::Paper => lambda = varrho * (&omega_new - &theta_new),
        }
        let step = (&omega_new - &omega).norm();
        let primal = (&omega_new - &theta_new).norm();
        let dual = (varrho * (&theta_new - &theta)).norm();
        omega = omega_new;
        theta = theta_new;
        objective_trace.push(problem.objective(omega.as_slice()));
        residual_trace.push(primal.max((&problem.a * &omega - &problem.rhs).abs().max()));
        if step <= config.epsilon {
            converged = true;
            break;
        }
        // residual balancing; refactor on change
        if primal > 10.0 * dual {
            varrho *= 2.0;
            kkt = KktSolver::factor(&problem.q, &problem.a, varrho)?;
        } else if dual > 10.0 * primal {
            varrho /= 2.0;
            kkt = KktSolver::factor(&problem.q, &problem.a, varrho)?;
        }
    }

    let eq_residual = (&problem.a * &omega - &problem.rhs).abs().max();
    let min_omega = omega.iter().cloned().fold(f64::INFINITY, f64::min);
    if converged && (eq_residual > 1e-8 || min_omega < -1e-8) {
        converged = false;
    }
    if min_omega < -1e-8 {
        return Err(Error::Infeasible(format!(
            "dual rule {:?} left omega at {min_omega:.3e} < 0",
            config.dual_update
        )));
    }
    let esd = Esd::new(omega.iter().copied().collect(), problem.config)?;
    Ok(SolveReport {
        solution: Solution::Esd(esd),
        objective_trace,
        residual_trace,
        iterations,
        converged,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::FrameConfig;
    use crate::constellation::{Constellation, ConstellationKind};
    use crate::design::{build_qp, make_weights, WeightProfile};
    use crate::esd::make_rrc_esd;
    use crate::solve::reference_solve;

    fn sec6(beta: f64) -> FrameConfig {
        FrameConfig::new(256, 16, 256, beta, 320e6).unwrap()
    }

    fn design_qp(beta: f64) -> crate::design::QpProblem {
        let cfg = sec6(beta);
        let qam = Constellation::make(ConstellationKind::Qam16);
        let w = make_weights((17, 68), (0, 0), WeightProfile::Uniform, &cfg, 0.0).unwrap();
        build_qp(&cfg, &w, &qam).unwrap()
    }

    #[test]
    fn beta0_returns_flat_esd_in_one_iteration() {
        let cfg = sec6(0.0);
        let qam = Constellation::make(ConstellationKind::Qam16);
        let w = make_weights((17, 68), (0, 0), WeightProfile::Uniform, &cfg, 0.0).unwrap();
        let qp = build_qp(&cfg, &w, &qam).unwrap();
        let rrc = make_rrc_esd(&cfg).unwrap();
        let report = admm_solve(&qp, &AdmmConfig::default(), &rrc).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 1);
        let esd = report.esd().unwrap();
        for &w in esd.omega() {
            assert!((w - 16.0).abs() < 1e-9);
        }
    }

    #[test]
    fn matches_reference_on_design_problem() {
        for beta in [0.3, 0.6] {
            let qp = design_qp(beta);
            let rrc = make_rrc_esd(&sec6(beta)).unwrap();
            let report = admm_solve(&qp, &AdmmConfig::default(), &rrc).unwrap();
            assert!(report.converged, "beta={beta}");
            assert!(report.iterations <= 5, "beta={beta}: {}", report.iterations);
            let admm_obj = qp.objective(report.esd().unwrap().omega());
            let reference = reference_solve(&qp).unwrap();
            let ref_obj = qp.objective(reference.omega());
            assert!((admm_obj - ref_obj).abs() <= 1e-6 * ref_obj.abs().max(1e-12));
            assert!(qp.constraint_residual(report.esd().unwrap().omega()) <= 1e-8);
        }
    }

    #[test]
    fn paper_dual_rule_agrees_on_interior_problem() {
        let qp = design_qp(0.3);
        let rrc = make_rrc_esd(&sec6(0.3)).unwrap();
        let cfg = AdmmConfig {
            dual_update: DualUpdate::Paper,
            ..AdmmConfig::default()
        };
        let report = admm_solve(&qp, &cfg, &rrc).unwrap();
        assert!(report.converged);
        let obj = qp.objective(report.esd().unwrap().omega());
        let reference = reference_solve(&qp).unwrap();
        let ref_obj = qp.objective(reference.omega());
        assert!((obj - ref_obj).abs() <= 1e-6 * ref_obj);
    }

    #[test]
    fn singular_kkt_is_reported() {
        let mut qp = design_qp(0.3);
        // duplicate a constraint row to break full row rank
        let extra = qp.a.row(0).into_owned();
        qp.a = qp.a.clone().insert_row(qp.a.nrows(), 0.0);
        let last = qp.a.nrows() - 1;
        qp.a.row_mut(last).copy_from(&extra);
        qp.rhs = qp.rhs.clone().insert_row(qp.rhs.nrows(), 16.0);
        let rrc = make_rrc_esd(&sec6(0.3)).unwrap();
        match admm_solve(&qp, &AdmmConfig::default(), &rrc) {
            Err(Error::SingularKkt { rank, dim }) => assert!(rank < dim),
            other => panic!("expected singular KKT error, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_traces() {
        let qp = design_qp(0.3);
        let rrc = make_rrc_esd(&sec6(0.3)).unwrap();
        let a = admm_solve(&qp, &AdmmConfig::default(), &rrc).unwrap();
        let b = admm_solve(&qp, &AdmmConfig::default(), &rrc).unwrap();
        assert_eq!(a.objective_trace, b.objective_trace);
        assert_eq!(a.esd().unwrap().omega(), b.esd().unwrap().omega());
    }
}
