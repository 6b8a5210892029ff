//! Half-integer spin labels stored as doubled integers.
//!
//! Angular-momentum labels j, m take values in {0, 1/2, 1, 3/2, ...};
//! storing the doubled value keeps odd spin counts exact instead of
//! relying on floating-point halves.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{CoreError, Result};

/// A spin or magnetic quantum number; `doubled()` returns 2x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    two: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { two: 0 };
    pub const HALF: HalfInt = HalfInt { two: 1 };
    pub const ONE: HalfInt = HalfInt { two: 2 };

    /// Build from the doubled value: `from_doubled(3)` is 3/2.
    pub const fn from_doubled(two: i32) -> Self {
        HalfInt { two }
    }

    /// Build from an integer value: `from_int(2)` is 2.
    pub const fn from_int(n: i32) -> Self {
        HalfInt { two: 2 * n }
    }

    pub const fn doubled(self) -> i32 {
        self.two
    }

    pub fn as_f64(self) -> f64 {
        self.two as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.two % 2 == 0
    }

    pub const fn is_negative(self) -> bool {
        self.two < 0
    }

    /// True when both labels are integers or both are half-odd-integers.
    pub const fn same_parity(self, other: HalfInt) -> bool {
        (self.two - other.two) % 2 == 0
    }

    /// Number of basis states 2j + 1 of the spin-j block.
    pub fn dim(self) -> usize {
        debug_assert!(self.two >= 0);
        self.two as usize + 1
    }

    /// Magnetic labels m = -j, -j+1, ..., j.
    pub fn magnetic_range(self) -> impl Iterator<Item = HalfInt> {
        let two_j = self.two;
        (-two_j..=two_j)
            .step_by(2)
            .map(HalfInt::from_doubled)
    }
}

/// Check that (j, m) is a valid spin/magnetic pair.
pub fn validate_jm(j: HalfInt, m: HalfInt) -> Result<()> {
    if j.is_negative() || m.doubled().abs() > j.doubled() || !j.same_parity(m) {
        return Err(CoreError::InvalidLabels(format!(
            "(j, m) = ({j}, {m})"
        )));
    }
    Ok(())
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { two: self.two + rhs.two }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { two: self.two - rhs.two }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { two: -self.two }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two % 2 == 0 {
            write!(f, "{}", self.two / 2)
        } else {
            write!(f, "{}/2", self.two)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_arithmetic() {
        assert_eq!(HalfInt::from_doubled(3).to_string(), "3/2");
        assert_eq!(HalfInt::from_int(2).to_string(), "2");
        assert_eq!(HalfInt::HALF + HalfInt::HALF, HalfInt::ONE);
        assert_eq!(-HalfInt::HALF, HalfInt::from_doubled(-1));
        assert_eq!(HalfInt::from_doubled(3).as_f64(), 1.5);
    }

    #[test]
    fn magnetic_range_covers_block() {
        let ms: Vec<i32> = HalfInt::from_doubled(3)
            .magnetic_range()
            .map(|m| m.doubled())
            .collect();
        assert_eq!(ms, vec![-3, -1, 1, 3]);
        assert_eq!(HalfInt::from_doubled(3).dim(), 4);
    }

    #[test]
    fn validation_rejects_parity_mismatch() {
        assert!(validate_jm(HalfInt::ONE, HalfInt::ZERO).is_ok());
        assert!(validate_jm(HalfInt::ONE, HalfInt::HALF).is_err());
        assert!(validate_jm(HalfInt::from_doubled(-2), HalfInt::ZERO).is_err());
        assert!(validate_jm(HalfInt::ONE, HalfInt::from_int(2)).is_err());
    }
}
