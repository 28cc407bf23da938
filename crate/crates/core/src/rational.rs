//! Exact rationals. Every probability in the crate is a [`Rat`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Parses `p/q` or a plain integer. Whitespace around the token is not allowed.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let valid = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    match text.split_once('/') {
        Some((n, d)) if valid(n) && valid(d) && !d.starts_with('-') => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n.parse().ok()?, d))
        }
        None if valid(text) => Some(Rat::from_integer(text.parse().ok()?)),
        _ => None,
    }
}

pub fn is_unit_interval(r: &Rat) -> bool {
    !r.is_negative() && *r <= one()
}
