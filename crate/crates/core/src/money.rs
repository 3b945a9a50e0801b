//! Exact currency arithmetic.
//!
//! All costs in this library are carried as integer cents so that sums,
//! knapsack bookkeeping, and budget comparisons are exact. Dollar values
//! cross the API boundary as decimals and are converted once at the edge.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An amount of money stored as whole cents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub fn from_cents(cents: i64) -> Money {
        Money(cents)
    }

    /// Converts a decimal dollar amount, rounding to the nearest cent
    /// (ties away from zero). Rejects non-finite input and amounts that
    /// overflow the cent range.
    pub fn from_dollars(dollars: f64) -> Result<Money, Error> {
        if !dollars.is_finite() {
            return Err(Error::domain(format!(
                "money amount must be finite, got {dollars}"
            )));
        }
        let cents = (dollars * 100.0).round();
        if cents.abs() >= i64::MAX as f64 {
            return Err(Error::domain(format!("money amount {dollars} overflows")));
        }
        Ok(Money(cents as i64))
    }

    pub fn cents(self) -> i64 {
        self.0
    }

    pub fn as_dollars(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Ratio of two amounts as a float; `None` when the denominator is zero.
    pub fn ratio(self, denom: Money) -> Option<f64> {
        if denom.0 == 0 {
            None
        } else {
            Some(self.0 as f64 / denom.0 as f64)
        }
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        self.0 -= rhs.0;
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Mul<i64> for Money {
    type Output = Money;
    fn mul(self, rhs: i64) -> Money {
        Money(self.0 * rhs)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        Money(iter.map(|m| m.0).sum())
    }
}

impl fmt::Display for Money {
    /// Formats as a plain decimal with two fraction digits, e.g. `1234.50`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:02}", abs / 100, abs % 100)
    }
}

impl FromStr for Money {
    type Err = Error;

    /// Parses decimal dollar strings: an optional sign, a whole part, and
    /// at most two fraction digits (`"120"`, `"120.5"`, `"-120.50"`).
    fn from_str(s: &str) -> Result<Money, Error> {
        let bad = || Error::domain(format!("invalid money literal {s:?}"));
        let (sign, rest) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s),
        };
        let (whole, frac) = match rest.split_once('.') {
            Some((w, f)) => (w, f),
            None => (rest, ""),
        };
        if whole.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        if !whole.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || frac.len() > 2
        {
            return Err(bad());
        }
        let whole: i64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let frac_cents: i64 = match frac.len() {
            0 => 0,
            1 => frac.parse::<i64>().map_err(|_| bad())? * 10,
            _ => frac.parse().map_err(|_| bad())?,
        };
        Ok(Money(sign * (whole * 100 + frac_cents)))
    }
}

// Serialized as decimal dollars so config files and JSON read naturally.
impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_dollars())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Money, D::Error> {
        let dollars = f64::deserialize(deserializer)?;
        Money::from_dollars(dollars).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dollars_round_to_nearest_cent() {
        // Exact binary halves round away from zero; decimal literals like
        // 1.005 sit just below the half-cent in binary and round down.
        assert_eq!(Money::from_dollars(0.125).unwrap().cents(), 13);
        assert_eq!(Money::from_dollars(-0.125).unwrap().cents(), -13);
        assert_eq!(Money::from_dollars(1.005).unwrap().cents(), 100);
        assert_eq!(Money::from_dollars(-2.504).unwrap().cents(), -250);
        assert_eq!(Money::from_dollars(7_250_000.0).unwrap().cents(), 725_000_000);
        assert!(Money::from_dollars(f64::NAN).is_err());
        assert!(Money::from_dollars(f64::INFINITY).is_err());
    }

    #[test]
    fn displays_two_fraction_digits() {
        assert_eq!(Money::from_cents(123_450).to_string(), "1234.50");
        assert_eq!(Money::from_cents(5).to_string(), "0.05");
        assert_eq!(Money::from_cents(-5).to_string(), "-0.05");
        assert_eq!(Money::from_cents(0).to_string(), "0.00");
    }

    #[test]
    fn parses_decimal_literals() {
        assert_eq!("120".parse::<Money>().unwrap().cents(), 12_000);
        assert_eq!("120.5".parse::<Money>().unwrap().cents(), 12_050);
        assert_eq!("-0.07".parse::<Money>().unwrap().cents(), -7);
        assert_eq!(".25".parse::<Money>().unwrap().cents(), 25);
        assert!("12.345".parse::<Money>().is_err());
        assert!("12a".parse::<Money>().is_err());
        assert!("".parse::<Money>().is_err());
        assert!("-".parse::<Money>().is_err());
    }

    proptest! {
        #[test]
        fn display_parse_round_trips(cents in -1_000_000_000_000i64..1_000_000_000_000i64) {
            let m = Money::from_cents(cents);
            prop_assert_eq!(m.to_string().parse::<Money>().unwrap(), m);
        }

        #[test]
        fn dollars_round_trip_within_representable_range(cents in -1_000_000_000_000i64..1_000_000_000_000i64) {
            let m = Money::from_cents(cents);
            prop_assert_eq!(Money::from_dollars(m.as_dollars()).unwrap(), m);
        }
    }
}
