//! The mass ratio `m / M`, the only physical parameter of the system.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact ratio `p / q` of the small block's mass to the big block's mass,
/// kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MassRatio {
    p: u64,
    q: u64,
}

impl MassRatio {
    pub const ONE: MassRatio = MassRatio { p: 1, q: 1 };

    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::NonPositiveRatio);
        }
        let g = p.gcd(&q);
        Ok(MassRatio { p: p / g, q: q / g })
    }

    /// `10^-exp`, the decadic ratios used by the collision table.
    pub fn decade(exp: u32) -> Result<Self> {
        MassRatio::decade_const(exp).ok_or_else(|| Error::Parse {
            input: format!("1e-{exp}"),
            reason: "denominator does not fit in 64 bits".into(),
        })
    }

    pub const fn decade_const(exp: u32) -> Option<Self> {
        match 10u64.checked_pow(exp) {
            Some(q) => Some(MassRatio { p: 1, q }),
            None => None,
        }
    }

    /// Numerator, proportional to the small mass.
    pub fn numer(&self) -> u64 {
        self.p
    }

    /// Denominator, proportional to the big mass.
    pub fn denom(&self) -> u64 {
        self.q
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn to_big_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.p), BigInt::from(self.q))
    }

    pub fn at_most_one(&self) -> bool {
        self.p <= self.q
    }

    /// `Some((a, b))` when `alpha = (a / b)^2` for integers `a`, `b`.
    pub fn rational_sqrt(&self) -> Option<(u64, u64)> {
        let a = exact_isqrt(self.p)?;
        let b = exact_isqrt(self.q)?;
        Some((a, b))
    }
}

fn exact_isqrt(n: u64) -> Option<u64> {
    let r = num_integer::Roots::sqrt(&n);
    (r * r == n).then_some(r)
}

impl PartialOrd for MassRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MassRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p as u128 * other.q as u128).cmp(&(other.p as u128 * self.q as u128))
    }
}

impl fmt::Display for MassRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl Serialize for MassRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Parses `p/q`, plain decimals (`0.000001`) and scientific notation
/// (`1e-6`, `2.5E-3`). Decimal digits are converted to an exact rational;
/// no binary floating point is involved.
impl FromStr for MassRatio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let input = s.trim();
        let fail = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if input.is_empty() {
            return Err(fail("empty input"));
        }

        if let Some((num, den)) = input.split_once('/') {
            let p = parse_u64(num.trim()).ok_or_else(|| fail("numerator is not a non-negative integer"))?;
            let q = parse_u64(den.trim()).ok_or_else(|| fail("denominator is not a non-negative integer"))?;
            return MassRatio::new(p, q).map_err(|_| fail("numerator and denominator must be positive"));
        }

        let (mantissa, exponent) = match input.find(['e', 'E']) {
            Some(i) => {
                let exp: i64 = input[i + 1..].parse().map_err(|_| fail("malformed exponent"))?;
                (&input[..i], exp)
            }
            None => (input, 0),
        };
        let mantissa = mantissa.strip_prefix('+').unwrap_or(mantissa);
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(fail("missing digits"));
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(fail("expected digits, `p/q`, or scientific notation"));
        }

        let digits: String = int_part.chars().chain(frac_part.chars()).collect();
        let digits = digits.trim_start_matches('0');
        let mut numer = if digits.is_empty() {
            BigInt::from(0)
        } else {
            digits.parse::<BigInt>().map_err(|_| fail("malformed digits"))?
        };
        let mut denom = BigInt::from(1);
        let scale = exponent - frac_part.len() as i64;
        let ten = BigInt::from(10);
        // Anything outside 10^+-64 cannot fit in a 64-bit p/q anyway.
        if scale.abs() > 64 {
            return Err(fail("exponent too large"));
        }
        if scale >= 0 {
            numer *= num_traits::pow(ten, scale as usize);
        } else {
            denom = num_traits::pow(ten, (-scale) as usize);
        }

        let exact = BigRational::new(numer, denom);
        let p = u64::try_from(exact.numer()).map_err(|_| fail("value is not positive or does not fit in 64 bits"))?;
        let q = u64::try_from(exact.denom()).map_err(|_| fail("denominator does not fit in 64 bits"))?;
        MassRatio::new(p, q).map_err(|_| fail("mass ratio must be positive"))
    }
}

fn parse_u64(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}
