//! Number fields the event loop runs over.
//!
//! [`ExactBackend`] stores every velocity as an integer numerator over the
//! implicit denominator `base * (p + q)^k`, where `k` is the number of
//! block-block collisions so far. Each collision multiplies the denominator
//! by exactly `p + q`, so no gcd reduction is ever needed and comparisons are
//! plain integer comparisons of numerators.
//!
//! [`FloatBackend`] runs the same kernel in `f64` with no renormalization;
//! whatever energy drift accumulates is reported, not corrected.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{matrix_s, Matrix2, VelocityPair};
use crate::ratio::MassRatio;

/// Smallest mass ratio the exact backend accepts without an explicit
/// digit budget: `10^-8`.
pub const EXACT_CUTOFF: MassRatio = match MassRatio::decade_const(8) {
    Some(r) => r,
    None => unreachable!(),
};

/// Digit budget applied when the caller does not set one.
pub const DEFAULT_DIGIT_BUDGET: u64 = 2_000_000;

/// Ratios at or above this value run exact under [`BackendChoice::Auto`].
pub const AUTO_EXACT_THRESHOLD: MassRatio = match MassRatio::decade_const(4) {
    Some(r) => r,
    None => unreachable!(),
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Exact,
    Float64,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Exact => "exact",
            BackendKind::Float64 => "float64",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendChoice {
    Exact,
    Float64,
    #[default]
    Auto,
}

impl BackendChoice {
    /// `Auto` picks exact arithmetic for `alpha >= 1e-4` and `f64` below.
    pub fn resolve(self, ratio: &MassRatio) -> BackendKind {
        match self {
            BackendChoice::Exact => BackendKind::Exact,
            BackendChoice::Float64 => BackendKind::Float64,
            BackendChoice::Auto if *ratio >= AUTO_EXACT_THRESHOLD => BackendKind::Exact,
            BackendChoice::Auto => BackendKind::Float64,
        }
    }
}

/// Ordering facts the event loop needs about a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateRelation {
    /// `V` compared to `v`.
    pub big_vs_small: Ordering,
    /// `v` compared to zero.
    pub small_sign: Ordering,
}

/// Conservation measurements over a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftReport {
    /// `|E_final - E_0| / E_0` with `E = alpha v^2 + V^2`.
    pub energy_rel_drift: f64,
    /// Largest `|P_after - P_before| / sqrt(E_0)` over block-block collisions,
    /// with `P = alpha v + V`. Wall bounces change momentum and are excluded.
    pub momentum_rel_drift: f64,
    /// Smallest and largest momentum seen across the run.
    pub momentum_range: (f64, f64),
}

impl DriftReport {
    pub fn observe_momentum(&mut self, momentum: f64) {
        self.momentum_range.0 = self.momentum_range.0.min(momentum);
        self.momentum_range.1 = self.momentum_range.1.max(momentum);
    }
}

/// Arithmetic contract shared by both number fields.
pub trait Backend {
    type Scalar: Clone + fmt::Debug + PartialEq;

    fn kind(&self) -> BackendKind;
    fn ratio(&self) -> &MassRatio;
    fn initial_state(&self) -> VelocityPair<Self::Scalar>;
    /// Block-block collision applied in place.
    fn collide(&self, state: &mut VelocityPair<Self::Scalar>) -> Result<()>;
    /// Wall bounce applied in place.
    fn reflect(&self, state: &mut VelocityPair<Self::Scalar>);
    fn relation(&self, state: &VelocityPair<Self::Scalar>) -> StateRelation;

    /// Relative energy drift between two states of the same run.
    fn energy_drift(&self, initial: &VelocityPair<Self::Scalar>, last: &VelocityPair<Self::Scalar>) -> f64;
    /// `|P_after - P_before| / sqrt(E_0)` across one collision.
    fn momentum_defect(&self, before: &VelocityPair<Self::Scalar>, after: &VelocityPair<Self::Scalar>) -> f64;

    fn to_f64(&self, x: &Self::Scalar) -> f64;
    /// Exact backend: `p/q` in lowest terms. Float: shortest round-trip decimal.
    fn render(&self, x: &Self::Scalar) -> String;
    fn render_energy(&self, state: &VelocityPair<Self::Scalar>) -> String;

    fn momentum_f64(&self, state: &VelocityPair<Self::Scalar>) -> f64 {
        self.ratio().to_f64() * self.to_f64(&state.small) + self.to_f64(&state.big)
    }

    fn energy_f64(&self, state: &VelocityPair<Self::Scalar>) -> f64 {
        let (v, big) = (self.to_f64(&state.small), self.to_f64(&state.big));
        self.ratio().to_f64() * v * v + big * big
    }

    fn abs(&self, x: &Self::Scalar) -> Self::Scalar;
}

/// Drift between two states, with the momentum range taken from just the
/// two endpoints.
pub fn measure_drift<B: Backend>(
    backend: &B,
    initial: &VelocityPair<B::Scalar>,
    last: &VelocityPair<B::Scalar>,
) -> DriftReport {
    let (p0, p1) = (backend.momentum_f64(initial), backend.momentum_f64(last));
    DriftReport {
        energy_rel_drift: backend.energy_drift(initial, last),
        momentum_rel_drift: 0.0,
        momentum_range: (p0.min(p1), p0.max(p1)),
    }
}

// ---------------------------------------------------------------------------
// Exact backend
// ---------------------------------------------------------------------------

/// Exact velocity: `numerator / (base * (p + q)^denom_exponent)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    pub numerator: BigInt,
    pub denom_exponent: u64,
}

impl ExactScalar {
    pub fn decimal_digits(&self) -> u64 {
        bits_to_digits(self.numerator.bits())
    }
}

/// `num / den` rounded to `f64` without reducing the fraction.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // Scale so the integer quotient carries at least 64 significant bits.
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let scaled = if shift >= 0 {
        num << shift as u64
    } else {
        num >> (-shift) as u64
    };
    let quotient = (scaled / den).to_f64().unwrap_or(f64::NAN);
    let mut value = quotient;
    let mut rest = -shift;
    // Apply 2^rest in chunks that stay inside the f64 exponent range.
    while rest != 0 {
        let step = rest.clamp(-1000, 1000);
        value *= 2f64.powi(step as i32);
        rest -= step;
    }
    value
}

/// `num / (base * factor^k)` in lowest terms, for a small `base` and
/// `factor`. Only gcds against the small numbers are taken, never against
/// the full denominator.
fn reduce_over_powers(num: &BigInt, base: &BigInt, factor: &BigInt, k: u64) -> BigRational {
    let mut num = num.clone();
    let mut reduced = BigInt::one();
    let mut left = k;
    // gcd(num / g, factor / g) = 1, and num only shrinks, so once a factor
    // is coprime to num every later one is too.
    while left > 0 {
        let g = (&num % factor).gcd(factor);
        if g.is_one() {
            break;
        }
        num /= &g;
        reduced *= factor / &g;
        left -= 1;
    }
    let g = (&num % base).gcd(base);
    num /= &g;
    let den = (base / &g) * reduced * num_traits::pow(factor.clone(), left as usize);
    BigRational::new_raw(num, den)
}

fn bits_to_digits(bits: u64) -> u64 {
    // log10(2) rounded up; overestimates by at most one digit.
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExactLimits {
    /// `None`: refuse ratios below [`EXACT_CUTOFF`] and use
    /// [`DEFAULT_DIGIT_BUDGET`]. `Some(b)`: accept any ratio, stop once a
    /// numerator exceeds `b` decimal digits.
    pub digit_budget: Option<u64>,
}

#[derive(Debug)]
pub struct ExactBackend {
    ratio: MassRatio,
    p: BigInt,
    q: BigInt,
    sum: BigInt,
    kernel: Matrix2<BigInt>,
    base: BigInt,
    start: BigInt,
    budget: u64,
    /// Last denominator handed out, `(k, base * (p + q)^k)`. Runs visit `k`
    /// in increasing order, so the next one is usually a single multiply.
    last_denominator: Mutex<(u64, BigInt)>,
}

impl Clone for ExactBackend {
    fn clone(&self) -> Self {
        ExactBackend {
            ratio: self.ratio,
            p: self.p.clone(),
            q: self.q.clone(),
            sum: self.sum.clone(),
            kernel: self.kernel.clone(),
            base: self.base.clone(),
            start: self.start.clone(),
            budget: self.budget,
            last_denominator: Mutex::new((0, self.base.clone())),
        }
    }
}

impl ExactBackend {
    /// `start` is the big block's initial velocity.
    pub fn new(ratio: MassRatio, start: &BigRational, limits: ExactLimits) -> Result<Self> {
        let budget = match limits.digit_budget {
            Some(b) => b,
            None if ratio < EXACT_CUTOFF => {
                return Err(Error::ExactCutoff {
                    alpha: ratio.to_string(),
                });
            }
            None => DEFAULT_DIGIT_BUDGET,
        };
        let p = BigInt::from(ratio.numer());
        let q = BigInt::from(ratio.denom());
        // Numerator form of the collision over denominator p + q.
        let kernel = Matrix2 {
            a11: &p - &q,
            a12: &q * 2,
            a21: &p * 2,
            a22: &q - &p,
        };
        Ok(ExactBackend {
            ratio,
            sum: &p + &q,
            p,
            q,
            kernel,
            base: start.denom().clone(),
            start: start.numer().clone(),
            budget,
            last_denominator: Mutex::new((0, start.denom().clone())),
        })
    }

    pub fn digit_budget(&self) -> u64 {
        self.budget
    }

    /// Full denominator of a scalar at exponent `k`.
    pub fn denominator(&self, k: u64) -> BigInt {
        let mut cache = self.last_denominator.lock().unwrap_or_else(|e| e.into_inner());
        let (cached_k, cached) = &mut *cache;
        if k < *cached_k {
            let fresh = &self.base * num_traits::pow(self.sum.clone(), k as usize);
            *cached_k = k;
            *cached = fresh;
        } else if k > *cached_k {
            *cached *= num_traits::pow(self.sum.clone(), (k - *cached_k) as usize);
            *cached_k = k;
        }
        cached.clone()
    }

    /// Value in lowest terms.
    pub fn to_rational(&self, x: &ExactScalar) -> BigRational {
        reduce_over_powers(&x.numerator, &self.base, &self.sum, x.denom_exponent)
    }

    /// `p v^2 + q V^2` over the common numerator scale.
    fn energy_numerator(&self, state: &VelocityPair<ExactScalar>) -> BigInt {
        let v = &state.small.numerator;
        let big = &state.big.numerator;
        &self.p * v * v + &self.q * big * big
    }

    fn momentum_numerator(&self, state: &VelocityPair<ExactScalar>) -> BigInt {
        &self.p * &state.small.numerator + &self.q * &state.big.numerator
    }

    fn energy_rational(&self, state: &VelocityPair<ExactScalar>) -> BigRational {
        let k = state.big.denom_exponent;
        reduce_over_powers(
            &self.energy_numerator(state),
            &(&self.q * &self.base * &self.base),
            &self.sum,
            2 * k,
        )
    }
}

impl Backend for ExactBackend {
    type Scalar = ExactScalar;

    fn kind(&self) -> BackendKind {
        BackendKind::Exact
    }

    fn ratio(&self) -> &MassRatio {
        &self.ratio
    }

    fn initial_state(&self) -> VelocityPair<ExactScalar> {
        VelocityPair::new(
            ExactScalar {
                numerator: BigInt::zero(),
                denom_exponent: 0,
            },
            ExactScalar {
                numerator: self.start.clone(),
                denom_exponent: 0,
            },
        )
    }

    fn collide(&self, state: &mut VelocityPair<ExactScalar>) -> Result<()> {
        debug_assert_eq!(state.small.denom_exponent, state.big.denom_exponent);
        let (v, big) = (&state.small.numerator, &state.big.numerator);
        let k = &self.kernel;
        let small = &k.a11 * v + &k.a12 * big;
        let big = &k.a21 * v + &k.a22 * big;
        let digits = bits_to_digits(small.bits().max(big.bits()));
        if digits > self.budget {
            return Err(Error::DigitBudget {
                digits,
                budget: self.budget,
            });
        }
        state.small.numerator = small;
        state.big.numerator = big;
        state.small.denom_exponent += 1;
        state.big.denom_exponent += 1;
        Ok(())
    }

    fn reflect(&self, state: &mut VelocityPair<ExactScalar>) {
        let n = std::mem::take(&mut state.small.numerator);
        state.small.numerator = -n;
    }

    fn relation(&self, state: &VelocityPair<ExactScalar>) -> StateRelation {
        // Shared positive denominator: numerators order like the values.
        StateRelation {
            big_vs_small: state.big.numerator.cmp(&state.small.numerator),
            small_sign: state.small.numerator.sign().cmp(&num_bigint::Sign::NoSign),
        }
    }

    fn energy_drift(&self, initial: &VelocityPair<ExactScalar>, last: &VelocityPair<ExactScalar>) -> f64 {
        let k0 = initial.big.denom_exponent;
        let k1 = last.big.denom_exponent;
        let e0 = self.energy_numerator(initial);
        let e1 = self.energy_numerator(last);
        let (lhs, rhs) = match k1.checked_sub(k0) {
            Some(d) => (e1, e0 * num_traits::pow(self.sum.clone(), 2 * d as usize)),
            None => (e1 * num_traits::pow(self.sum.clone(), 2 * (k0 - k1) as usize), e0),
        };
        if lhs == rhs {
            return 0.0;
        }
        let (start, end) = (self.energy_rational(initial), self.energy_rational(last));
        ((end - &start).abs() / start).to_f64().unwrap_or(f64::INFINITY)
    }

    fn momentum_defect(&self, before: &VelocityPair<ExactScalar>, after: &VelocityPair<ExactScalar>) -> f64 {
        let k0 = before.big.denom_exponent;
        let k1 = after.big.denom_exponent;
        if k1 == k0 + 1 && self.momentum_numerator(after) == &self.sum * self.momentum_numerator(before) {
            return 0.0;
        }
        let p = self.ratio.to_big_rational();
        let momentum = |s: &VelocityPair<ExactScalar>| &p * self.to_rational(&s.small) + self.to_rational(&s.big);
        let diff = (momentum(after) - momentum(before))
            .abs()
            .to_f64()
            .unwrap_or(f64::INFINITY);
        diff / self.energy_f64(before).sqrt()
    }

    fn to_f64(&self, x: &ExactScalar) -> f64 {
        ratio_to_f64(&x.numerator, &self.denominator(x.denom_exponent))
    }

    fn momentum_f64(&self, state: &VelocityPair<ExactScalar>) -> f64 {
        let den = self.denominator(state.big.denom_exponent) * &self.q;
        ratio_to_f64(&self.momentum_numerator(state), &den)
    }

    fn energy_f64(&self, state: &VelocityPair<ExactScalar>) -> f64 {
        let den = self.denominator(state.big.denom_exponent);
        ratio_to_f64(&self.energy_numerator(state), &(&self.q * &den * &den))
    }

    fn render(&self, x: &ExactScalar) -> String {
        let r = self.to_rational(x);
        format!("{}/{}", r.numer(), r.denom())
    }

    fn render_energy(&self, state: &VelocityPair<ExactScalar>) -> String {
        let e = self.energy_rational(state);
        format!("{}/{}", e.numer(), e.denom())
    }

    fn abs(&self, x: &ExactScalar) -> ExactScalar {
        ExactScalar {
            numerator: x.numerator.abs(),
            denom_exponent: x.denom_exponent,
        }
    }
}

// ---------------------------------------------------------------------------
// Float backend
// ---------------------------------------------------------------------------

pub type FloatScalar = f64;

#[derive(Debug, Clone)]
pub struct FloatBackend {
    ratio: MassRatio,
    alpha: f64,
    kernel: Matrix2<f64>,
    start: f64,
}

impl FloatBackend {
    pub fn new(ratio: MassRatio, start: &BigRational) -> Result<Self> {
        let start = start.to_f64().filter(|x| x.is_finite()).ok_or(Error::NonFinite)?;
        Ok(FloatBackend {
            ratio,
            alpha: ratio.to_f64(),
            kernel: matrix_s(&ratio),
            start,
        })
    }

    pub fn kernel(&self) -> &Matrix2<f64> {
        &self.kernel
    }
}

impl Backend for FloatBackend {
    type Scalar = f64;

    fn kind(&self) -> BackendKind {
        BackendKind::Float64
    }

    fn ratio(&self) -> &MassRatio {
        &self.ratio
    }

    fn initial_state(&self) -> VelocityPair<f64> {
        VelocityPair::new(0.0, self.start)
    }

    #[inline]
    fn collide(&self, state: &mut VelocityPair<f64>) -> Result<()> {
        let k = &self.kernel;
        let small = k.a11 * state.small + k.a12 * state.big;
        let big = k.a21 * state.small + k.a22 * state.big;
        if !(small.is_finite() && big.is_finite()) {
            return Err(Error::NonFinite);
        }
        *state = VelocityPair::new(small, big);
        Ok(())
    }

    #[inline]
    fn reflect(&self, state: &mut VelocityPair<f64>) {
        state.small = -state.small;
    }

    #[inline]
    fn relation(&self, state: &VelocityPair<f64>) -> StateRelation {
        StateRelation {
            big_vs_small: state.big.partial_cmp(&state.small).unwrap_or(Ordering::Equal),
            small_sign: state.small.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        }
    }

    fn energy_drift(&self, initial: &VelocityPair<f64>, last: &VelocityPair<f64>) -> f64 {
        let e0 = self.energy_f64(initial);
        (self.energy_f64(last) - e0).abs() / e0
    }

    #[inline]
    fn momentum_defect(&self, before: &VelocityPair<f64>, after: &VelocityPair<f64>) -> f64 {
        (self.momentum_f64(after) - self.momentum_f64(before)).abs() / self.energy_f64(before).sqrt()
    }

    fn to_f64(&self, x: &f64) -> f64 {
        *x
    }

    fn render(&self, x: &f64) -> String {
        x.to_string()
    }

    fn render_energy(&self, state: &VelocityPair<f64>) -> String {
        self.energy_f64(state).to_string()
    }

    fn energy_f64(&self, state: &VelocityPair<f64>) -> f64 {
        self.alpha * state.small * state.small + state.big * state.big
    }

    fn momentum_f64(&self, state: &VelocityPair<f64>) -> f64 {
        self.alpha * state.small + state.big
    }

    fn abs(&self, x: &f64) -> f64 {
        x.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::collide_blocks;

    fn minus_one() -> BigRational {
        BigRational::from_integer((-1).into())
    }

    #[test]
    fn exact_first_collision_numerators() {
        let b = ExactBackend::new(MassRatio::decade(2).unwrap(), &minus_one(), ExactLimits::default()).unwrap();
        let mut s = b.initial_state();
        b.collide(&mut s).unwrap();
        assert_eq!(s.small.numerator, BigInt::from(-200));
        assert_eq!(s.big.numerator, BigInt::from(-99));
        assert_eq!((s.small.denom_exponent, s.big.denom_exponent), (1, 1));
        assert_eq!(b.render(&s.small), "-200/101");
    }

    #[test]
    fn exact_matches_rational_kernel() {
        let r = MassRatio::new(3, 7).unwrap();
        let b = ExactBackend::new(r, &minus_one(), ExactLimits::default()).unwrap();
        let mut s = b.initial_state();
        let mut reference = VelocityPair::<BigRational>::initial();
        for i in 0..6 {
            if i % 2 == 0 {
                b.collide(&mut s).unwrap();
                reference = collide_blocks(&reference, &r).unwrap();
            } else {
                b.reflect(&mut s);
                reference = crate::kinematics::reflect_wall(&reference);
            }
            assert_eq!(b.to_rational(&s.small), reference.small);
            assert_eq!(b.to_rational(&s.big), reference.big);
        }
        assert_eq!(s.small.denom_exponent, 3);
    }

    #[test]
    fn cutoff_and_override() {
        let tiny = MassRatio::decade(12).unwrap();
        assert!(matches!(
            ExactBackend::new(tiny, &minus_one(), ExactLimits::default()),
            Err(Error::ExactCutoff { .. })
        ));
        assert!(ExactBackend::new(MassRatio::decade(8).unwrap(), &minus_one(), ExactLimits::default()).is_ok());
        let b = ExactBackend::new(tiny, &minus_one(), ExactLimits { digit_budget: Some(30) }).unwrap();
        let mut s = b.initial_state();
        let err = (0..10).try_for_each(|_| b.collide(&mut s)).unwrap_err();
        assert!(matches!(err, Error::DigitBudget { budget: 30, .. }));
    }

    #[test]
    fn auto_choice() {
        assert_eq!(
            BackendChoice::Auto.resolve(&MassRatio::decade(4).unwrap()),
            BackendKind::Exact
        );
        assert_eq!(
            BackendChoice::Auto.resolve(&MassRatio::decade(6).unwrap()),
            BackendKind::Float64
        );
        assert_eq!(BackendChoice::Float64.resolve(&MassRatio::ONE), BackendKind::Float64);
    }

    #[test]
    fn drift_is_zero_without_collisions() {
        let b = FloatBackend::new(MassRatio::decade(6).unwrap(), &minus_one()).unwrap();
        let s = b.initial_state();
        let d = measure_drift(&b, &s, &s);
        assert_eq!(d.energy_rel_drift, 0.0);
        assert_eq!(d.momentum_range, (-1.0, -1.0));
    }

    #[test]
    fn float_overflow_reported() {
        let b = FloatBackend::new(MassRatio::new(1, 3).unwrap(), &minus_one()).unwrap();
        let mut s = VelocityPair::new(f64::MAX, f64::MAX);
        assert_eq!(b.collide(&mut s), Err(Error::NonFinite));
    }

    #[test]
    fn big_ratio_conversion() {
        let cases = [(1i64, 3i64), (-200, 101), (7, 1), (0, 5), (-1, 1 << 40)];
        for (n, d) in cases {
            assert_eq!(ratio_to_f64(&n.into(), &d.into()), n as f64 / d as f64, "{n}/{d}");
        }
        let big = num_traits::pow(BigInt::from(1_000_001), 2000);
        let num = &big * 3 + 1;
        let x = ratio_to_f64(&num, &big);
        assert!((x - 3.0).abs() <= f64::EPSILON * 3.0);
        let tiny = ratio_to_f64(&BigInt::from(1), &(BigInt::from(1) << 1100u32));
        assert_eq!(tiny, 0.0f64.max(2f64.powi(-1000) * 2f64.powi(-100)));
    }

    #[test]
    fn reduction_matches_full_gcd() {
        let cases: [(i64, i64, i64, u64); 7] = [
            (-200, 1, 101, 1),
            (0, 1, 7, 3),
            (48, 1, 12, 2),
            (32, 1, 12, 3),
            (-96, 7, 12, 4),
            (7 * 7 * 5, 7, 5, 1),
            (1, 3, 9, 0),
        ];
        for (n, base, f, k) in cases {
            let got = reduce_over_powers(&n.into(), &base.into(), &f.into(), k);
            let want = BigRational::new(
                n.into(),
                BigInt::from(base) * num_traits::pow(BigInt::from(f), k as usize),
            );
            assert_eq!(
                (got.numer(), got.denom()),
                (want.numer(), want.denom()),
                "{n}/({base}*{f}^{k})"
            );
        }
    }

    #[test]
    fn denominator_cache_any_order() {
        let b = ExactBackend::new(MassRatio::new(2, 5).unwrap(), &minus_one(), ExactLimits::default()).unwrap();
        for k in [3u64, 4, 9, 2, 0, 5] {
            assert_eq!(b.denominator(k), num_traits::pow(BigInt::from(7), k as usize), "k={k}");
        }
    }

    #[test]
    fn exact_momentum_defect_is_zero() {
        let b = ExactBackend::new(MassRatio::new(2, 9).unwrap(), &minus_one(), ExactLimits::default()).unwrap();
        let before = b.initial_state();
        let mut after = before.clone();
        b.collide(&mut after).unwrap();
        assert_eq!(b.momentum_defect(&before, &after), 0.0);
        assert_eq!(b.energy_drift(&before, &after), 0.0);
        // A wall bounce changes momentum; the check must notice.
        let mut bounced = after.clone();
        b.reflect(&mut bounced);
        assert!(b.momentum_defect(&after, &bounced) > 0.0);
    }
}
