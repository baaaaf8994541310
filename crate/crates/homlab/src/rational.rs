//! Minimal exact rational arithmetic for fitness values and penalties.
//!
//! Values stay tiny (numerators bounded by test-suite size, weights are small
//! configuration constants), so i64 components with i128 cross products are
//! exact with lots of headroom.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A signed rational in lowest terms with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn from_int(value: i64) -> Self {
        Rational { num: value, den: 1 }
    }

    pub fn zero() -> Self {
        Rational { num: 0, den: 1 }
    }

    pub fn one() -> Self {
        Rational { num: 1, den: 1 }
    }

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn mul_int(self, factor: i64) -> Rational {
        self * Rational::from_int(factor)
    }

    fn from_i128(num: i128, den: i128) -> Rational {
        debug_assert!(den != 0);
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let num = sign * num / g;
        let den = sign * den / g;
        assert!(
            i64::try_from(num).is_ok() && i64::try_from(den).is_ok(),
            "rational overflow"
        );
        Rational {
            num: num as i64,
            den: den as i64,
        }
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;

    fn add(self, other: Rational) -> Rational {
        let num =
            (self.num as i128) * (other.den as i128) + (other.num as i128) * (self.den as i128);
        let den = (self.den as i128) * (other.den as i128);
        Self::from_i128(num, den)
    }
}

impl std::ops::Sub for Rational {
    type Output = Rational;

    fn sub(self, other: Rational) -> Rational {
        self + Rational {
            num: -other.num,
            den: other.den,
        }
    }
}

impl std::ops::Mul for Rational {
    type Output = Rational;

    fn mul(self, other: Rational) -> Rational {
        Self::from_i128(
            (self.num as i128) * (other.num as i128),
            (self.den as i128) * (other.den as i128),
        )
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = (self.num as i128) * (other.den as i128);
        let rhs = (other.num as i128) * (self.den as i128);
        lhs.cmp(&rhs)
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
    if a == 0 && b == 0 {
        return 1;
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 && b == 0 {
        return 1;
    }
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_ordering() {
        assert_eq!(Rational::new(2, 4), Rational::new(1, 2));
        assert_eq!(Rational::new(1, -2), Rational::new(-1, 2));
        assert!(Rational::new(1, 3) < Rational::new(1, 2));
        assert!(Rational::new(-1, 2) < Rational::zero());
        assert_eq!(Rational::new(3, 3), Rational::one());
    }

    #[test]
    fn arithmetic() {
        let a = Rational::new(1, 2);
        let b = Rational::new(1, 3);
        assert_eq!(a + b, Rational::new(5, 6));
        assert_eq!(a - b, Rational::new(1, 6));
        assert_eq!(a * b, Rational::new(1, 6));
        assert_eq!(a.mul_int(4), Rational::from_int(2));
        assert_eq!(
            Rational::from_int(5) - Rational::from_int(15),
            Rational::from_int(-10)
        );
    }

    #[test]
    fn display() {
        assert_eq!(Rational::new(3, 1).to_string(), "3");
        assert_eq!(Rational::new(2, 3).to_string(), "2/3");
    }
}
