//! Velocity states, the two collision kernels, and their 2x2 matrix forms.
//!
//! Everything here is generic over [`Scalar`], so the same kernel runs over
//! exact rationals and over `f64`. The axis points away from the wall: the
//! system starts at `v = 0, V = -1` with the big block moving wall-ward.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratio::MassRatio;

/// A number field the kernels can run over.
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(ratio: &MassRatio) -> Self;
    /// `sqrt(alpha)`, or an error when the field cannot hold it.
    fn sqrt_of_ratio(ratio: &MassRatio) -> Result<Self>;
    fn check_finite(&self) -> Result<()> {
        Ok(())
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(ratio: &MassRatio) -> Self {
        ratio.to_f64()
    }
    fn sqrt_of_ratio(ratio: &MassRatio) -> Result<Self> {
        Ok(ratio.to_f64().sqrt())
    }
    fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(ratio: &MassRatio) -> Self {
        ratio.to_big_rational()
    }
    fn sqrt_of_ratio(ratio: &MassRatio) -> Result<Self> {
        let (a, b) = ratio
            .rational_sqrt()
            .ok_or_else(|| Error::IrrationalSqrt(ratio.to_string()))?;
        Ok(BigRational::new(BigInt::from(a), BigInt::from(b)))
    }
}

/// Velocities `(v, V)` of the small and big block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct VelocityPair<S> {
    /// `v`, small block (the one between the wall and the big block).
    pub small: S,
    /// `V`, big block.
    pub big: S,
}

impl<S> VelocityPair<S> {
    pub const fn new(small: S, big: S) -> Self {
        VelocityPair { small, big }
    }
}

impl<S: Scalar> VelocityPair<S> {
    /// Starting state: small block at rest, big block moving at `-1`.
    pub fn initial() -> Self {
        VelocityPair::new(S::zero(), -S::one())
    }

    /// Kinetic energy divided by `M / 2`: `alpha * v^2 + V^2`.
    pub fn energy(&self, ratio: &MassRatio) -> S {
        let alpha = S::from_ratio(ratio);
        alpha * self.small.clone() * self.small.clone() + self.big.clone() * self.big.clone()
    }

    /// Momentum divided by `M`: `alpha * v + V`.
    pub fn momentum(&self, ratio: &MassRatio) -> S {
        S::from_ratio(ratio) * self.small.clone() + self.big.clone()
    }
}

/// Scaled coordinates `(u, V)` with `u = v * sqrt(alpha)`, on which the
/// collision-then-wall map acts as a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint<S> {
    pub u: S,
    pub big: S,
}

impl<S: Scalar> PhasePoint<S> {
    pub fn norm_sqr(&self) -> S {
        self.u.clone() * self.u.clone() + self.big.clone() * self.big.clone()
    }
}

/// Row-major 2x2 matrix acting on column vectors `(v, V)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Matrix2<S> {
    pub a11: S,
    pub a12: S,
    pub a21: S,
    pub a22: S,
}

impl<S: Scalar> Matrix2<S> {
    pub fn new(a11: S, a12: S, a21: S, a22: S) -> Self {
        Matrix2 { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Matrix2::new(S::one(), S::zero(), S::zero(), S::one())
    }

    pub fn det(&self) -> S {
        self.a11.clone() * self.a22.clone() - self.a12.clone() * self.a21.clone()
    }

    pub fn trace(&self) -> S {
        self.a11.clone() + self.a22.clone()
    }

    pub fn transpose(&self) -> Self {
        Matrix2::new(self.a11.clone(), self.a21.clone(), self.a12.clone(), self.a22.clone())
    }

    pub fn apply(&self, state: &VelocityPair<S>) -> VelocityPair<S> {
        let (x, y) = self.apply_xy(&state.small, &state.big);
        VelocityPair::new(x, y)
    }

    pub fn apply_phase(&self, point: &PhasePoint<S>) -> PhasePoint<S> {
        let (u, big) = self.apply_xy(&point.u, &point.big);
        PhasePoint { u, big }
    }

    fn apply_xy(&self, x: &S, y: &S) -> (S, S) {
        (
            self.a11.clone() * x.clone() + self.a12.clone() * y.clone(),
            self.a21.clone() * x.clone() + self.a22.clone() * y.clone(),
        )
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let (a, b) = (self, rhs);
        Matrix2::new(
            a.a11.clone() * b.a11.clone() + a.a12.clone() * b.a21.clone(),
            a.a11.clone() * b.a12.clone() + a.a12.clone() * b.a22.clone(),
            a.a21.clone() * b.a11.clone() + a.a22.clone() * b.a21.clone(),
            a.a21.clone() * b.a12.clone() + a.a22.clone() * b.a22.clone(),
        )
    }

    pub fn entries(&self) -> [&S; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }
}

/// The four coefficients of the block-block collision, in alpha form:
/// `(alpha-1)/(1+alpha)`, `2/(1+alpha)`, `2 alpha/(1+alpha)`, `(1-alpha)/(1+alpha)`.
fn collision_coefficients<S: Scalar>(ratio: &MassRatio) -> [S; 4] {
    let alpha = S::from_ratio(ratio);
    let one_plus = S::one() + alpha.clone();
    let two = S::from_int(2);
    [
        (alpha.clone() - S::one()) / one_plus.clone(),
        two.clone() / one_plus.clone(),
        two * alpha.clone() / one_plus.clone(),
        (S::one() - alpha) / one_plus,
    ]
}

/// Perfectly elastic block-block collision.
pub fn collide_blocks<S: Scalar>(state: &VelocityPair<S>, ratio: &MassRatio) -> Result<VelocityPair<S>> {
    let [c11, c12, c21, c22] = collision_coefficients::<S>(ratio);
    let small = c11 * state.small.clone() + c12 * state.big.clone();
    let big = c21 * state.small.clone() + c22 * state.big.clone();
    small.check_finite()?;
    big.check_finite()?;
    Ok(VelocityPair::new(small, big))
}

/// Elastic bounce of the small block off the infinitely heavy wall.
pub fn reflect_wall<S: Scalar>(state: &VelocityPair<S>) -> VelocityPair<S> {
    VelocityPair::new(-state.small.clone(), state.big.clone())
}

/// Collision matrix `S`; `matrix_s(r).apply(x) == collide_blocks(x, r)`.
pub fn matrix_s<S: Scalar>(ratio: &MassRatio) -> Matrix2<S> {
    let [a11, a12, a21, a22] = collision_coefficients(ratio);
    Matrix2::new(a11, a12, a21, a22)
}

/// Wall matrix `A = diag(-1, 1)`.
pub fn matrix_a<S: Scalar>() -> Matrix2<S> {
    Matrix2::new(-S::one(), S::zero(), S::zero(), S::one())
}

/// Combined collision-then-wall matrix `M = A * S`, written out in closed
/// form rather than as the product so the two can be checked against each
/// other.
pub fn matrix_m<S: Scalar>(ratio: &MassRatio) -> Matrix2<S> {
    let alpha = S::from_ratio(ratio);
    let one_plus = S::one() + alpha.clone();
    let diag = (S::one() - alpha.clone()) / one_plus.clone();
    Matrix2::new(
        diag.clone(),
        S::from_int(-2) / one_plus.clone(),
        S::from_int(2) * alpha / one_plus,
        diag,
    )
}

/// `M` in scaled coordinates; a rotation by `arccos((1-alpha)/(1+alpha))`.
pub fn matrix_m_prime<S: Scalar>(ratio: &MassRatio) -> Result<Matrix2<S>> {
    let alpha = S::from_ratio(ratio);
    let root = S::sqrt_of_ratio(ratio)?;
    let one_plus = S::one() + alpha.clone();
    let cos = (S::one() - alpha) / one_plus.clone();
    let sin = S::from_int(2) * root / one_plus;
    Ok(Matrix2::new(cos.clone(), -sin.clone(), sin, cos))
}

pub fn to_phase<S: Scalar>(state: &VelocityPair<S>, ratio: &MassRatio) -> Result<PhasePoint<S>> {
    let root = S::sqrt_of_ratio(ratio)?;
    Ok(PhasePoint {
        u: state.small.clone() * root,
        big: state.big.clone(),
    })
}

pub fn from_phase<S: Scalar>(point: &PhasePoint<S>, ratio: &MassRatio) -> Result<VelocityPair<S>> {
    let root = S::sqrt_of_ratio(ratio)?;
    Ok(VelocityPair::new(point.u.clone() / root, point.big.clone()))
}
