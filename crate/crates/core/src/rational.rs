//! Exact dyadic fractions for reporting probabilities.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest power of two tried when recognizing a dyadic value.
const MAX_POW: u32 = 20;

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den).max(1);
        Self {
            num: num / g as i64,
            den: den / g,
        }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// The fraction `k/2^m` within `tol` of `x`, with the smallest `m`.
    pub fn dyadic(x: f64, tol: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        (0..=MAX_POW).find_map(|m| {
            let den = 1u64 << m;
            let k = (x * den as f64).round();
            ((x - k / den as f64).abs() <= tol && k.abs() < i64::MAX as f64)
                .then(|| Self::new(k as i64, den))
        })
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Decimal text of `x`, snapped to its dyadic fraction when one lies within
/// `1e-12`. Dyadic fractions have finite decimal expansions, so the result
/// is exact: `0.125`, not `0.12500000000000003`.
pub fn exact_decimal(x: f64) -> String {
    match Rational::dyadic(x, 1e-12) {
        Some(r) if r.num == 0 => "0".to_string(),
        Some(r) => format!("{}", r.value()),
        None => format!("{x}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces() {
        assert_eq!(Rational::new(4, 32), Rational::new(1, 8));
        assert_eq!(Rational::new(-2, 4).to_string(), "-1/2");
        assert_eq!(Rational::new(0, 8).to_string(), "0");
    }

    #[test]
    fn recognizes_dyadic_values() {
        assert_eq!(Rational::dyadic(0.125 + 1e-14, 1e-12), Some(Rational::new(1, 8)));
        assert_eq!(Rational::dyadic(1.0 / 64.0, 1e-12), Some(Rational::new(1, 64)));
        assert_eq!(Rational::dyadic(1.0 / 3.0, 1e-12), None);
    }

    #[test]
    fn decimal_text() {
        assert_eq!(exact_decimal(0.125 + 3e-17), "0.125");
        assert_eq!(exact_decimal(-1e-15), "0");
        assert_eq!(exact_decimal(-0.125), "-0.125");
        assert_eq!(exact_decimal(0.015625), "0.015625");
    }
}
