//! Exact rational scalars and the handful of combinatorial helpers every
//! other module leans on.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Generalized binomial coefficient `C(n, i)` for any integer `n`, via the
/// falling factorial `n(n-1)...(n-i+1)/i!`. Zero for `i < 0`.
pub fn binom(n: i64, i: i64) -> Rat {
    if i < 0 {
        return Rat::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..i {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    Rat::new(num, den)
}

/// Generalized binomial `C(r, i)` with a rational top argument.
pub fn binom_rat(r: &Rat, i: i64) -> Rat {
    if i < 0 {
        return Rat::zero();
    }
    let mut acc = Rat::one();
    for j in 0..i {
        acc = acc * (r - int(j)) / int(j + 1);
    }
    acc
}

pub fn factorial(n: u64) -> Rat {
    let mut acc = BigInt::one();
    for j in 2..=n {
        acc *= BigInt::from(j);
    }
    Rat::from_integer(acc)
}

/// `base^e` for any integer exponent; `base` must be nonzero when `e < 0`.
pub fn pow(base: &Rat, e: i64) -> Rat {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        assert!(!base.is_zero(), "negative power of zero");
        num_traits::pow(base.recip(), (-e) as usize)
    }
}

pub fn sign(e: i64) -> Rat {
    if e.rem_euclid(2) == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(n))
        }
    }
}

/// Canonical text form: `"p/q"` in lowest terms with `q > 0`, or `"p"` when `q = 1`.
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

/// Serde adapter storing a `Rat` as its canonical string.
pub mod serde_rat {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_binomials_follow_falling_factorial() {
        assert_eq!(binom(-1, 3), int(-1));
        assert_eq!(binom(-2, 2), int(3));
        assert_eq!(binom(2, 3), int(0));
        assert_eq!(binom(5, 2), int(10));
        assert_eq!(binom(4, -1), int(0));
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7/2", "0", "12/5"] {
            assert_eq!(fmt_rat(&parse_rat(s).unwrap()), s);
        }
        assert_eq!(parse_rat("4/6").unwrap(), rat(2, 3));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn integer_powers() {
        assert_eq!(pow(&rat(1, 2), -3), int(8));
        assert_eq!(pow(&int(-3), 3), int(-27));
        assert_eq!(sign(-3), int(-1));
    }
}
