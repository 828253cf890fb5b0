//! Independent reference solver for the half-spectrum QP, used in tests to
//! certify the ADMM path. The Nyquist rows pin most bins and couple the rest
//! in mirror pairs, so the feasible set reduces to a box over the free pair
//! values; projected gradient descent on that box is run to stationarity.

use nalgebra::{DMatrix, DVector};

use crate::design::QpProblem;
use crate::error::{Error, Result};
use crate::esd::Esd;

/// Structure recovered from the constraint matrix: fixed bin values plus
/// free mirror pairs `(hi, lo)` parameterized by `omega[lo] = x`,
/// `omega[hi] = rhs - x`, `x in [0, rhs]`.
#[derive(Debug, Clone)]
pub(crate) struct BoxReduction {
    pub base: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
}

pub(crate) fn reduce(a: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<BoxReduction> {
    let n = a.ncols();
    let mut base = vec![0.0f64; n];
    let mut fixed = vec![false; n];
    let mut pairs_raw: Vec<(usize, usize, f64)> = Vec::new();

    let mut pin = |idx: usize,
                   val: f64,
                   base: &mut Vec<f64>,
                   fixed: &mut Vec<bool>|
     -> Result<()> {
        if val < -1e-9 {
            return Err(Error::Infeasible(format!(
                "bin {idx} forced to {val} < 0: the affine and nonnegative sets do not intersect"
            )));
        }
        let val = val.max(0.0);
        if fixed[idx] && (base[idx] - val).abs() > 1e-9 {
            return Err(Error::Infeasible(format!(
                "bin {idx} pinned to both {} and {val}",
                base[idx]
            )));
        }
        base[idx] = val;
        fixed[idx] = true;
        Ok(())
    };

    for i in 0..a.nrows() {
        let nz: Vec<(usize, f64)> = (0..n)
            .filter(|&j| a[(i, j)] != 0.0)
            .map(|j| (j, a[(i, j)]))
            .collect();
        match nz.as_slice() {
            [(j, c)] => pin(*j, rhs[i] / c, &mut base, &mut fixed)?,
            [(j1, c1), (j2, c2)] if *c1 == 1.0 && *c2 == 1.0 => {
                pairs_raw.push((*j1, *j2, rhs[i]));
            }
            other => {
                return Err(Error::Infeasible(format!(
                    "unsupported constraint row structure: {other:?}"
                )))
            }
        }
    }
    // propagate pins through pairs until stable
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut changed = true;
    let mut remaining = pairs_raw;
    while changed {
        changed = false;
        let mut keep = Vec::new();
        for (i, j, s) in remaining {
            if fixed[i] && fixed[j] {
                if (base[i] + base[j] - s).abs() > 1e-9 {
                    return Err(Error::Infeasible(format!(
                        "pair ({i}, {j}) cannot sum to {s}"
                    )));
                }
                changed = true;
            } else if fixed[i] {
                pin(j, s - base[i], &mut base, &mut fixed)?;
                changed = true;
            } else if fixed[j] {
                pin(i, s - base[j], &mut base, &mut fixed)?;
                changed = true;
            } else {
                keep.push((i, j, s));
            }
        }
        remaining = keep;
    }
    for (i, j, _) in remaining {
        pairs.push((i, j));
    }
    Ok(BoxReduction { base, pairs })
}

impl BoxReduction {
    pub fn omega(&self, rhs: f64, x: &[f64]) -> Vec<f64> {
        let mut om = self.base.clone();
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            om[j] = x[k];
            om[i] = rhs - x[k];
        }
        om
    }
}

/// Projected gradient on the reduced box, run to stationarity. Certifies the
/// result through the projected-gradient fixed-point residual.
pub fn reference_solve(problem: &QpProblem) -> Result<Esd> {
    let rhs = problem.rhs[0];
    let red = reduce(&problem.a, &problem.rhs)?;
    let k = red.pairs.len();
    if k == 0 {
        let om = red.omega(rhs, &[]);
        return Esd::new(om, problem.config);
    }
    let n = red.base.len();
    // omega(x) = om0 + D x with om0 the x = 0 point
    let mut om0 = DVector::from_row_slice(&red.base);
    let mut d = DMatrix::zeros(n, k);
    for (c, &(i, j)) in red.pairs.iter().enumerate() {
        om0[i] = rhs;
        d[(j, c)] = 1.0;
        d[(i, c)] = -1.0;
    }
    let h = 2.0 * d.transpose() * &problem.q * &d;
    let b = 2.0 * d.transpose() * &problem.q * &om0;
    let lip = h
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let mut x = DVector::from_element(k, rhs / 2.0);
    let step = 1.0 / lip;
    let mut resid = f64::INFINITY;
    for _ in 0..2_000_000usize {
        let grad = &h * &x + &b;
        let mut xn = &x - step * grad;
        for e in xn.iter_mut() {
            *e = e.clamp(0.0, rhs);
        }
        resid = (&xn - &x).abs().max();
        x = xn;
        if resid <= 1e-14 * rhs.max(1.0) {
            break;
        }
    }
    // stationarity: the projected-gradient fixed-point residual, scaled back
    // to gradient units
    let kkt = resid * lip;
    if kkt > 1e-8 * (1.0 + b.abs().max()) {
        return Err(Error::Infeasible(format!(
            "projected gradient did not reach stationarity (residual {kkt:.3e})"
        )));
    }
    let xs: Vec<f64> = x.iter().copied().collect();
    Esd::new(red.omega(rhs, &xs), problem.config)
}
