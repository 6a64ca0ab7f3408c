use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{q, qi};

/// Reference PRPSLI ratios, `(k, value to 4 decimals)`.
pub const TABLE_ONE: [(usize, &str); 13] = [
    (3, "1.3333"),
    (4, "1.5208"),
    (5, "1.7333"),
    (6, "1.8667"),
    (7, "2.0190"),
    (8, "2.1262"),
    (9, "2.2413"),
    (10, "2.3302"),
    (20, "2.9779"),
    (21, "3.0284"),
    (50, "3.8683"),
    (75, "4.2678"),
    (100, "4.5520"),
];

pub fn harmonic(n: usize) -> BigRational {
    (1..=n).map(|i| q(1, i as i64)).sum()
}

/// Exact ratio: `4/3`, `73/48`, `26/15` for `k = 3, 4, 5`; for larger `k`
/// the harmonic closed forms plus `eps`.
pub fn rho_closed_form(k: usize, eps: &BigRational) -> BigRational {
    match k {
        0..=3 => q(4, 3),
        4 => q(73, 48),
        5 => q(26, 15),
        _ if k.is_multiple_of(2) => {
            qi(2) * harmonic(k) - harmonic(k / 2) + q(2, k as i64) - q(1, k as i64 - 1) - q(4, 3) + eps
        }
        _ => qi(2) * harmonic(k) - harmonic((k - 1) / 2) - q(4, 3) + eps,
    }
}

/// Rounds half away from zero to `digits` decimals.
pub fn format_decimal(r: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r.abs() * BigRational::from_integer(scale.clone());
    let rounded = (scaled + q(1, 2)).floor().to_integer();
    let (int, frac) = rounded.div_rem(&scale);
    let sign = if r.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = digits)
}

/// Two-column table `k  PRPSLI` with 4-decimal values.
pub fn emit_table(ks: &[usize], eps: &BigRational) -> String {
    let mut out = String::from("k     PRPSLI\n");
    for &k in ks {
        let _ = writeln!(out, "{:<5} {}", k, format_decimal(&rho_closed_form(k, eps), 4));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        let z = BigRational::zero();
        assert_eq!(rho_closed_form(3, &z), q(4, 3));
        assert_eq!(rho_closed_form(7, &z), q(212, 105));
        assert_eq!(format_decimal(&rho_closed_form(10, &z), 4), "2.3302");
        assert_eq!(format_decimal(&rho_closed_form(20, &z), 4), "2.9805");
        assert_eq!(format_decimal(&q(-1, 3), 2), "-0.33");
        assert!(emit_table(&[4, 5], &z).contains("1.7333"));
    }
}
