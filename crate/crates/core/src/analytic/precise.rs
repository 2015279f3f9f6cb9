//! Binary fixed-point evaluation of `pi / arctan(sqrt(alpha))` and
//! `pi * sqrt(1 / alpha)` to a requested number of decimal digits, with an
//! error interval wide enough to make floor decisions safe.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};

use crate::ratio::MassRatio;

/// Extra working bits on top of the requested precision. Covers the few
/// hundred ulps of rounding the series and reductions accumulate.
const GUARD_BITS: u64 = 64;

/// A positive value `scaled / 2^bits` known to within a relative error of
/// `2^-rel_bits`.
#[derive(Debug, Clone)]
pub(crate) struct Estimate {
    scaled: BigInt,
    bits: u64,
    rel_bits: u64,
}

impl Estimate {
    fn bounds(&self) -> (BigInt, BigInt) {
        let half = (&self.scaled >> self.rel_bits) + 1u32;
        (&self.scaled - &half, &self.scaled + &half)
    }

    /// The floor of the value, if the whole error interval shares it.
    pub(crate) fn resolved_floor(&self) -> Option<u64> {
        let (lo, hi) = self.bounds();
        let (flo, fhi) = (lo >> self.bits, hi >> self.bits);
        if flo != fhi {
            return None;
        }
        u64::try_from(flo).ok()
    }

    /// Lower and upper bounds rendered as decimals.
    pub(crate) fn render_bounds(&self, digits: usize) -> (String, String) {
        let (lo, hi) = self.bounds();
        (to_decimal(&lo, self.bits, digits), to_decimal(&hi, self.bits, digits))
    }
}

fn to_decimal(scaled: &BigInt, bits: u64, digits: usize) -> String {
    let int = scaled >> bits;
    let frac = scaled - (&int << bits);
    let frac_digits = (frac * num_traits::pow(BigInt::from(10), digits)) >> bits;
    format!("{int}.{:0>width$}", frac_digits.to_string(), width = digits)
}

fn bits_for_digits(digits: u32) -> u64 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64
}

/// `floor(sqrt(num / den) * 2^bits)`.
fn sqrt_fraction(num: u64, den: u64, bits: u64) -> BigInt {
    ((BigInt::from(num) << (2 * bits)) / BigInt::from(den)).sqrt()
}

/// `arctan(x)` for fixed-point `x >= 0`.
fn atan(x: &BigInt, bits: u64) -> BigInt {
    let one = BigInt::one() << bits;
    let limit = &one >> 3u32;
    let mut x = x.clone();
    let mut halvings = 0u32;
    // arctan(x) = 2 arctan(x / (1 + sqrt(1 + x^2)))
    while x > limit {
        let x2 = (&x * &x) >> bits;
        let root = ((&one + x2) << bits).sqrt();
        x = (x << bits) / (&one + root);
        halvings += 1;
    }
    atan_series(&x, bits) << halvings
}

fn atan_series(x: &BigInt, bits: u64) -> BigInt {
    let x2 = (x * x) >> bits;
    let mut power = x.clone();
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    loop {
        let term = &power / (2 * k + 1);
        if term.is_zero() {
            break;
        }
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power = (power * &x2) >> bits;
        k += 1;
    }
    sum
}

/// `arctan(1 / n)` for integer `n > 1`.
fn atan_inv(n: u64, bits: u64) -> BigInt {
    let n2 = BigInt::from(n) * n;
    let mut power = (BigInt::one() << bits) / n;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    sum
}

/// Machin: `pi = 16 arctan(1/5) - 4 arctan(1/239)`.
fn pi(bits: u64) -> BigInt {
    atan_inv(5, bits) * 16 - atan_inv(239, bits) * 4
}

/// Working precision: requested bits, guard bits, and enough extra to keep
/// relative accuracy when `sqrt(alpha)` is tiny.
fn working_bits(ratio: &MassRatio, rel_bits: u64) -> u64 {
    let small = 64 - ratio.denom().leading_zeros() as u64;
    rel_bits + GUARD_BITS + small
}

/// `pi / arctan(sqrt(alpha))` to `digits` significant decimal digits.
pub(crate) fn pi_over_atan_sqrt(ratio: &MassRatio, digits: u32) -> Estimate {
    let rel_bits = bits_for_digits(digits);
    let bits = working_bits(ratio, rel_bits);
    let root = sqrt_fraction(ratio.numer(), ratio.denom(), bits);
    let angle = atan(&root, bits);
    debug_assert_eq!(angle.sign(), Sign::Plus);
    let scaled = (pi(bits) << bits) / angle;
    Estimate { scaled, bits, rel_bits }
}

/// `pi * sqrt(1 / alpha)` to `digits` significant decimal digits.
pub(crate) fn pi_sqrt_inverse(ratio: &MassRatio, digits: u32) -> Estimate {
    let rel_bits = bits_for_digits(digits);
    let bits = working_bits(ratio, rel_bits);
    let root = sqrt_fraction(ratio.denom(), ratio.numer(), bits);
    let scaled = (pi(bits) * root) >> bits;
    Estimate { scaled, bits, rel_bits }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI_50: &str = "3.14159265358979323846264338327950288419716939937510";

    #[test]
    fn pi_digits() {
        let bits = bits_for_digits(60);
        assert_eq!(to_decimal(&pi(bits), bits, 50), PI_50);
    }

    #[test]
    fn atan_of_one_is_quarter_pi() {
        let bits = bits_for_digits(60);
        let one = BigInt::one() << bits;
        let diff: BigInt = atan(&one, bits) * 4 - pi(bits);
        assert!(diff.magnitude().bits() < 8, "diff {diff}");
    }

    #[test]
    fn equal_masses_straddle_four() {
        let est = pi_over_atan_sqrt(&MassRatio::ONE, 50);
        assert_eq!(est.resolved_floor(), None);
        let (lo, hi) = est.render_bounds(55);
        assert!(
            lo.starts_with("3.99999999999999999999999999999999999999999999999"),
            "{lo}"
        );
        assert!(
            hi.starts_with("4.00000000000000000000000000000000000000000000000"),
            "{hi}"
        );
    }

    #[test]
    fn decadic_values() {
        let est = pi_over_atan_sqrt(&MassRatio::decade(12).unwrap(), 50);
        assert_eq!(est.resolved_floor(), Some(3_141_592));
        let est = pi_sqrt_inverse(&MassRatio::decade(12).unwrap(), 50);
        assert_eq!(est.resolved_floor(), Some(3_141_592));
        let est = pi_sqrt_inverse(&MassRatio::ONE, 50);
        assert_eq!(est.render_bounds(40).0[..40], PI_50[..40]);
    }

    #[test]
    fn agrees_with_f64() {
        for (p, q) in [(1u64, 2u64), (3, 7), (1, 9), (5, 1000), (999, 1000), (1, 123456789)] {
            let r = MassRatio::new(p, q).unwrap();
            let est = pi_over_atan_sqrt(&r, 50);
            let approx: f64 = est.render_bounds(30).0.parse().unwrap();
            let float = std::f64::consts::PI / r.to_f64().sqrt().atan();
            assert!((approx - float).abs() <= 1e-12 * float, "{p}/{q}: {approx} vs {float}");
        }
    }
}
