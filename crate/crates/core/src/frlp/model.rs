use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{q, qi, FrlpError};

/// A primal variable: `b_{i,j}` (share of `j`-sets in the phase-`i`
/// optimum) or `a_1` (share of 1-sets chosen by the final phase).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    B(usize, usize),
    A1,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::B(i, j) => write!(f, "b_{{{i},{j}}}"),
            Var::A1 => f.write_str("a_1"),
        }
    }
}

/// Row families; the payload is the phase index `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowKind {
    /// `Σ_j b_{i,j} <= 1` (dual variable β_i).
    Budget(usize),
    /// Packing-phase accounting for phase `i` (dual variable γ_i).
    Packing(usize),
    /// `a_1 - b_{i,1} <= 0` (dual variable δ_i).
    Ones(usize),
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKind::Budget(i) => write!(f, "budget i={i}"),
            RowKind::Packing(i) => write!(f, "packing i={i}"),
            RowKind::Ones(i) => write!(f, "ones i={i}"),
        }
    }
}

/// `Σ coeffs·x <= rhs`, sparse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub kind: RowKind,
    pub coeffs: Vec<(usize, BigRational)>,
    pub rhs: BigRational,
}

/// `max objective·x` subject to `rows`, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpModel {
    pub k: usize,
    pub eps: BigRational,
    pub vars: Vec<Var>,
    pub objective: Vec<BigRational>,
    pub rows: Vec<Row>,
}

impl LpModel {
    pub fn var_index(&self, v: Var) -> Option<usize> {
        self.vars.iter().position(|&x| x == v)
    }

    pub fn row_index(&self, kind: RowKind) -> Option<usize> {
        self.rows.iter().position(|r| r.kind == kind)
    }

    pub fn objective_value(&self, x: &[BigRational]) -> BigRational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Rows violated by `x` (or negative entries), as labels.
    pub fn violations(&self, x: &[BigRational]) -> Vec<String> {
        let mut out: Vec<String> = self
            .vars
            .iter()
            .zip(x)
            .filter(|(_, v)| v.is_negative())
            .map(|(name, _)| format!("{name} >= 0"))
            .collect();
        for row in &self.rows {
            let lhs: BigRational = row.coeffs.iter().map(|(j, c)| c * &x[*j]).sum();
            if lhs > row.rhs {
                out.push(row.kind.to_string());
            }
        }
        out
    }
}

/// Coefficient `i(1 - ϱ_i)` of `b_{i,i}` in the phase-`i` row: `9/4` for the
/// restricted 4-packing (`ϱ_4 = 7/16`) and `i - 2 + ε` otherwise.
pub(crate) fn unpacked_coefficient(i: usize, eps: &BigRational) -> BigRational {
    if i == 4 {
        q(9, 4)
    } else {
        qi(i) - qi(2) + eps
    }
}

/// Builds the LP for `k >= 4` and `0 <= eps < 2/k`.
pub fn build_lp(k: usize, eps: &BigRational) -> Result<LpModel, FrlpError> {
    if k < 4 {
        return Err(FrlpError::Param(format!("k must be at least 4, got {k}")));
    }
    if eps.is_negative() || *eps >= q(2, k as i64) {
        return Err(FrlpError::Param(format!("eps must satisfy 0 <= eps < 2/{k}, got {eps}")));
    }
    let mut vars = Vec::new();
    for i in 3..=k {
        for j in 1..=i {
            vars.push(Var::B(i, j));
        }
    }
    vars.push(Var::A1);
    let idx = |v: Var| vars.iter().position(|&x| x == v).expect("declared");
    let mut objective = vec![BigRational::zero(); vars.len()];
    for j in 1..=k {
        objective[idx(Var::B(k, j))] = q(j as i64, k as i64);
    }
    for i in 4..k {
        for j in 1..=i {
            objective[idx(Var::B(i, j))] = q(j as i64, (i * (i + 1)) as i64);
        }
    }
    objective[idx(Var::B(3, 1))] = q(5, 12);
    objective[idx(Var::B(3, 2))] = q(1, 2);
    objective[idx(Var::B(3, 3))] = q(7, 12);
    objective[idx(Var::A1)] = q(1, 3);

    let mut rows = Vec::new();
    for i in 3..=k {
        rows.push(Row {
            kind: RowKind::Budget(i),
            coeffs: (1..=i).map(|j| (idx(Var::B(i, j)), BigRational::one())).collect(),
            rhs: BigRational::one(),
        });
    }
    for i in 4..=k {
        let mut coeffs: Vec<(usize, BigRational)> = Vec::new();
        for j in 1..i {
            coeffs.push((idx(Var::B(i - 1, j)), qi(j)));
            coeffs.push((idx(Var::B(i, j)), -qi(j)));
        }
        coeffs.push((idx(Var::B(i, i)), -unpacked_coefficient(i, eps)));
        rows.push(Row {
            kind: RowKind::Packing(i),
            coeffs,
            rhs: BigRational::zero(),
        });
    }
    for i in 3..=k.min(6) {
        rows.push(Row {
            kind: RowKind::Ones(i),
            coeffs: vec![(idx(Var::A1), BigRational::one()), (idx(Var::B(i, 1)), -BigRational::one())],
            rhs: BigRational::zero(),
        });
    }
    Ok(LpModel {
        k,
        eps: eps.clone(),
        vars,
        objective,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let m = build_lp(4, &BigRational::zero()).unwrap();
        assert_eq!(m.vars.len(), 8);
        let m6 = build_lp(6, &q(1, 1000)).unwrap();
        let ones: Vec<RowKind> = m6
            .rows
            .iter()
            .map(|r| r.kind)
            .filter(|k| matches!(k, RowKind::Ones(_)))
            .collect();
        assert_eq!(ones, (3..=6).map(RowKind::Ones).collect::<Vec<_>>());
        let zero = vec![BigRational::zero(); m6.vars.len()];
        assert!(m6.violations(&zero).is_empty());
        assert!(m6.objective_value(&zero).is_zero());
        assert!(build_lp(3, &BigRational::zero()).is_err());
        assert!(build_lp(4, &q(1, 2)).is_err());
    }
}
