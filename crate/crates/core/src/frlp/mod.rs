//! Factor-revealing LP for the pipeline's approximation ratio: the primal
//! model, an exact rational simplex, the explicit dual certificate, and the
//! closed-form ratio with its table rendering.

mod closed_form;
mod dual;
mod model;
mod simplex;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use closed_form::{emit_table, format_decimal, harmonic, rho_closed_form, TABLE_ONE};
pub use dual::{dual_certificate, DualCert, DualCertificate, DualCheck};
pub use model::{build_lp, LpModel, Row, RowKind, Var};
pub use simplex::{solve_lp, LpSolution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrlpError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("LP is unbounded (invalid model)")]
    Unbounded,
    #[error("dual certificate violates {count} constraint(s); first: {first}")]
    Infeasible { count: usize, first: String, violations: Vec<DualCheck> },
}

pub(crate) fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn qi(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
