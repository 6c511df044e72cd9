//! Exact rationals whose denominator is a power of two.
//!
//! Success fractions of games with uniformly sampled bit-string queries are
//! always of this form, so they are carried without floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `num / 2^exp`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i128,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: i128, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        while d.exp > 0 && d.num % 2 == 0 {
            d.num /= 2;
            d.exp -= 1;
        }
        d
    }

    pub fn from_int(v: i128) -> Self {
        Dyadic::new(v, 0)
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        1i128 << self.exp
    }

    pub fn log2_denom(&self) -> u32 {
        self.exp
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / (self.exp as f64).exp2()
    }

    fn aligned(a: Dyadic, b: Dyadic) -> (i128, i128, u32) {
        let e = a.exp.max(b.exp);
        (a.num << (e - a.exp), b.num << (e - b.exp), e)
    }

    pub fn half(self) -> Dyadic {
        Dyadic::new(self.num, self.exp + 1)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, other: Dyadic) -> Dyadic {
        let (x, y, e) = Dyadic::aligned(self, other);
        Dyadic::new(x + y, e)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;

    fn sub(self, other: Dyadic) -> Dyadic {
        let (x, y, e) = Dyadic::aligned(self, other);
        Dyadic::new(x - y, e)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;

    fn mul(self, other: Dyadic) -> Dyadic {
        Dyadic::new(self.num * other.num, self.exp + other.exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (x, y, _) = Dyadic::aligned(*self, *other);
        x.cmp(&y)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.denom())
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("not a dyadic rational: {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num: i128 = n.parse().map_err(|_| bad())?;
        let den: i128 = if let Some(e) = d.strip_prefix("2^") {
            let e: u32 = e.parse().map_err(|_| bad())?;
            if e > 120 {
                return Err(bad());
            }
            1i128 << e
        } else {
            d.parse().map_err(|_| bad())?
        };
        if den <= 0 || den & (den - 1) != 0 {
            return Err(bad());
        }
        Ok(Dyadic::new(num, den.trailing_zeros()))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_prints() {
        assert_eq!(Dyadic::new(6, 3).to_string(), "3/4");
        assert_eq!(Dyadic::new(8, 3).to_string(), "1/1");
        assert_eq!(Dyadic::new(0, 5).to_string(), "0/1");
    }

    #[test]
    fn parses_both_spellings() {
        assert_eq!("3/4".parse::<Dyadic>().unwrap(), Dyadic::new(3, 2));
        assert_eq!("6/2^3".parse::<Dyadic>().unwrap(), Dyadic::new(3, 2));
        assert!("1/3".parse::<Dyadic>().is_err());
    }

    #[test]
    fn ordering_and_arithmetic() {
        let a = Dyadic::new(3, 2);
        let b = Dyadic::new(7, 3);
        assert!(a < b);
        assert_eq!(a + b, Dyadic::new(13, 3));
        assert_eq!(b - a, Dyadic::new(1, 3));
        assert_eq!(a * b, Dyadic::new(21, 5));
        assert_eq!(Dyadic::from_int(1).half(), Dyadic::new(1, 1));
    }
}
