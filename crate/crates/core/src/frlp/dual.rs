//! Explicit dual assignment and its exact feasibility check.
//!
//! The check is the transpose of [`build_lp`]: for every primal column the
//! dual row `Σ_r A_{r,c} y_r >= c_c` must hold, and every dual variable must
//! be nonnegative. Each check is labelled with its primal column or, for
//! sign constraints, its dual variable.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::model::{build_lp, unpacked_coefficient, RowKind, Var};
use super::{q, qi, FrlpError};

/// Dual values: β_i for budget rows, γ_i for packing rows, δ_i for ones rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCert {
    pub k: usize,
    pub eps: BigRational,
    pub beta: BTreeMap<usize, BigRational>,
    pub gamma: BTreeMap<usize, BigRational>,
    pub delta: BTreeMap<usize, BigRational>,
}

impl DualCert {
    pub fn objective(&self) -> BigRational {
        self.beta.values().sum()
    }

    fn value(&self, kind: RowKind) -> BigRational {
        let get = |m: &BTreeMap<usize, BigRational>, i| m.get(&i).cloned().unwrap_or_else(BigRational::zero);
        match kind {
            RowKind::Budget(i) => get(&self.beta, i),
            RowKind::Packing(i) => get(&self.gamma, i),
            RowKind::Ones(i) => get(&self.delta, i),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCheck {
    pub label: String,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl DualCheck {
    pub fn slack(&self) -> BigRational {
        &self.lhs - &self.rhs
    }

    pub fn holds(&self) -> bool {
        !self.slack().is_negative()
    }
}

impl std::fmt::Display for DualCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: slack {}", self.label, self.slack())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    pub cert: DualCert,
    pub objective: BigRational,
    pub checks: Vec<DualCheck>,
}

fn assignment(k: usize, eps: &BigRational) -> DualCert {
    let mut beta = BTreeMap::new();
    let mut gamma = BTreeMap::new();
    let mut delta = BTreeMap::new();
    match k {
        4 => {
            gamma.insert(4, q(1, 12));
            delta.insert(3, q(0, 1));
            delta.insert(4, q(1, 3));
            beta.insert(3, q(1, 3));
            beta.insert(4, q(1, 1) + q(1, 12) * q(9, 4));
        }
        5 => {
            let g4 = q(1, 12);
            gamma.insert(4, g4.clone());
            gamma.insert(5, q(0, 1));
            beta.insert(3, q(1, 3));
            beta.insert(4, q(3, 20) + qi(3) * &g4);
            beta.insert(5, q(1, 1));
            delta.insert(3, q(0, 1));
            delta.insert(4, q(1, 10) + qi(2) * &g4);
            delta.insert(5, q(1, 3));
        }
        _ => {
            let kk = k as i64;
            gamma.insert(k, q(1, (kk - 1) * kk));
            gamma.insert(k - 1, q(0, 1));
            for i in (6..=k - 2).rev() {
                let ii = i as i64;
                let v = gamma[&(i + 2)].clone() + q(2, ii * (ii + 1) * (ii + 2));
                gamma.insert(i, v);
            }
            let g6 = gamma[&6].clone();
            let g5 = q(1, 30) - &g6;
            gamma.insert(5, g5.clone());
            let g4 = q(1, 12);
            gamma.insert(4, g4.clone());
            delta.insert(3, q(0, 1));
            delta.insert(4, qi(2) * &g4 - qi(2) * &g5 + q(1, 10));
            delta.insert(5, qi(2) * &g5 - qi(4) * &g6 + q(4, 30));
            delta.insert(6, if k % 2 == 1 { q(0, 1) } else { q(1, 15) });
            beta.insert(3, q(1, 3));
            beta.insert(4, q(3, 20) + qi(3) * &g4 - qi(3) * &g5);
            beta.insert(5, q(1, 6) + (qi(3) + eps) * &g5 - qi(5) * &g6);
            for i in 6..k {
                let ii = i as i64;
                let v = q(1, ii + 1) - qi(i) * &gamma[&(i + 1)] + (qi(i) - qi(2) + eps) * &gamma[&i];
                beta.insert(i, v);
            }
            beta.insert(k, q(1, 1) + (qi(k) - qi(2) + eps) * &gamma[&k]);
        }
    }
    DualCert {
        k,
        eps: eps.clone(),
        beta,
        gamma,
        delta,
    }
}

fn column_label(v: Var) -> String {
    match v {
        Var::A1 => "column a_1".into(),
        Var::B(i, j) => format!("column b_{{{i},{j}}}"),
    }
}

/// Builds the explicit dual assignment for `k >= 4` and checks it exactly
/// against the transpose of the LP. `eps = 0` is allowed only for `k = 4`.
pub fn dual_certificate(k: usize, eps: &BigRational) -> Result<DualCertificate, FrlpError> {
    if k < 4 {
        return Err(FrlpError::Param(format!("k must be at least 4, got {k}")));
    }
    if eps.is_negative() || (eps.is_zero() && k >= 5) {
        return Err(FrlpError::Param(format!("eps must be positive for k >= 5, got {eps}")));
    }
    let model = build_lp(k, eps)?;
    let cert = assignment(k, eps);
    debug_assert_eq!(unpacked_coefficient(4, eps), q(9, 4));
    let mut checks = Vec::new();
    for (c, &v) in model.vars.iter().enumerate() {
        let mut lhs = BigRational::zero();
        for row in &model.rows {
            for (j, a) in &row.coeffs {
                if *j == c {
                    lhs += a * cert.value(row.kind);
                }
            }
        }
        checks.push(DualCheck {
            label: column_label(v),
            lhs,
            rhs: model.objective[c].clone(),
        });
    }
    for (name, map, tag) in [("β", &cert.beta, "sign"), ("γ", &cert.gamma, "sign"), ("δ", &cert.delta, "sign")] {
        for (i, v) in map {
            checks.push(DualCheck {
                label: format!("{tag} {name}_{i}"),
                lhs: v.clone(),
                rhs: BigRational::zero(),
            });
        }
    }
    let violations: Vec<DualCheck> = checks.iter().filter(|c| !c.holds()).cloned().collect();
    if let Some(first) = violations.first() {
        return Err(FrlpError::Infeasible {
            count: violations.len(),
            first: first.to_string(),
            violations,
        });
    }
    Ok(DualCertificate {
        objective: cert.objective(),
        cert,
        checks,
    })
}
