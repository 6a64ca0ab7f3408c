//! Dense-tableau primal simplex over exact rationals with Bland's rule.
//! Every model here has `rhs >= 0`, so the slack basis is feasible.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::model::LpModel;
use super::FrlpError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub optimum: BigRational,
    pub x: Vec<BigRational>,
    pub pivots: usize,
}

pub fn solve_lp(model: &LpModel) -> Result<LpSolution, FrlpError> {
    let n = model.vars.len();
    let m = model.rows.len();
    if model.rows.iter().any(|r| r.rhs.is_negative()) {
        return Err(FrlpError::Param("right-hand sides must be nonnegative".into()));
    }
    // Columns: n structural, m slack, then the rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (r, row) in model.rows.iter().enumerate() {
        let mut line = vec![BigRational::zero(); width];
        for (j, c) in &row.coeffs {
            line[*j] += c;
        }
        line[n + r] = BigRational::from_integer(1.into());
        line[width - 1] = row.rhs.clone();
        t.push(line);
    }
    // Reduced costs of the maximization: z_j - c_j.
    let mut z: Vec<BigRational> = vec![BigRational::zero(); width];
    for (j, c) in model.objective.iter().enumerate() {
        z[j] = -c;
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0;
    // Bland: least index with negative reduced cost enters.
    while let Some(enter) = (0..width - 1).find(|&j| z[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (r, line) in t.iter().enumerate() {
            if line[enter].is_positive() {
                let ratio = &line[width - 1] / &line[enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            return Err(FrlpError::Unbounded);
        };
        let pivot = t[pr][enter].clone();
        for v in t[pr].iter_mut() {
            *v /= &pivot;
        }
        let prow = t[pr].clone();
        for (r, line) in t.iter_mut().enumerate() {
            if r != pr && !line[enter].is_zero() {
                let f = line[enter].clone();
                for (v, p) in line.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
            }
        }
        if !z[enter].is_zero() {
            let f = z[enter].clone();
            for (v, p) in z.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        basis[pr] = enter;
        pivots += 1;
    }
    let mut x = vec![BigRational::zero(); n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = t[r][width - 1].clone();
        }
    }
    let optimum = model.objective_value(&x);
    debug_assert_eq!(optimum, z[width - 1]);
    Ok(LpSolution { optimum, x, pivots })
}
