//! Closed-form collision counts from the rotation picture.
//!
//! In scaled coordinates `u = v sqrt(alpha)` one block-block collision
//! followed by one wall bounce rotates `(u, V)` by
//! `theta = 2 arctan(sqrt(alpha))`. Starting from `(0, -1)`, collisions stop
//! once the accumulated rotation would pass `pi`, so the count is the number
//! of half-steps `theta / 2` that fit strictly inside `pi`.

mod precise;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{collide_blocks, reflect_wall, to_phase, VelocityPair};
use crate::ratio::MassRatio;

/// Relative distance to the nearest integer below which the `f64`
/// evaluation of `pi / arctan(sqrt(alpha))` is re-checked at high precision.
pub const BOUNDARY_GUARD: f64 = 1e-9;

/// Decimal digits tried, in order, when the guard trips.
pub const ESCALATION_DIGITS: [u32; 5] = [50, 100, 200, 400, 800];

/// Tolerance of [`verify_rotation_equivalence`].
pub const ROTATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationModel {
    /// `2 arctan(sqrt(alpha))`, radians.
    pub theta: f64,
    /// `tan(theta / 2) = sqrt(alpha)`.
    pub half_theta_tan: f64,
    /// `2 pi / theta`.
    pub turns_to_pi: f64,
    /// `cos(theta) - (1 - alpha) / (1 + alpha)`; zero up to rounding.
    pub cos_residual: f64,
}

fn ensure_at_most_one(ratio: &MassRatio) -> Result<()> {
    if ratio.at_most_one() {
        Ok(())
    } else {
        Err(Error::RatioAboveOne(ratio.to_string()))
    }
}

pub fn rotation_angle(ratio: &MassRatio) -> Result<RotationModel> {
    ensure_at_most_one(ratio)?;
    let alpha = ratio.to_f64();
    let half_theta_tan = alpha.sqrt();
    let theta = 2.0 * half_theta_tan.atan();
    Ok(RotationModel {
        theta,
        half_theta_tan,
        turns_to_pi: PI / half_theta_tan.atan(),
        cos_residual: theta.cos() - (1.0 - alpha) / (1.0 + alpha),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryFlag {
    Interior,
    NearInteger,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountPrediction {
    /// Collision count with the integer boundary handled.
    pub n_exact_formula: u64,
    /// `floor(2 pi / theta)` taken literally; one too many at the boundary.
    pub n_paper_floor: u64,
    /// `floor(pi sqrt(M / m))`.
    pub n_sqrt_approx: u64,
    pub boundary_flag: BoundaryFlag,
    /// `2 pi / theta` in `f64`.
    pub turns_to_pi: f64,
}

impl CountPrediction {
    /// Whether the small-angle approximation agrees with the count.
    pub fn approximation_agrees(&self) -> bool {
        self.n_sqrt_approx == self.n_exact_formula
    }
}

/// `Some(n)` when `pi / arctan(sqrt(alpha))` is exactly the integer `n`.
///
/// That happens iff `cos(2 pi / n) = (1 - alpha) / (1 + alpha)` is rational,
/// which by Niven's theorem leaves `n` in `{3, 4, 6}`, i.e. `alpha` in
/// `{3, 1, 1/3}`.
pub fn integer_boundary(ratio: &MassRatio) -> Option<u64> {
    match (ratio.numer(), ratio.denom()) {
        (3, 1) => Some(3),
        (1, 1) => Some(4),
        (1, 3) => Some(6),
        _ => None,
    }
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() < BOUNDARY_GUARD * x.max(1.0)
}

/// Re-evaluates at increasing precision until the floor is unambiguous.
fn escalate(ratio: &MassRatio, eval: fn(&MassRatio, u32) -> precise::Estimate) -> Result<u64> {
    let mut last = None;
    for digits in ESCALATION_DIGITS {
        let est = eval(ratio, digits);
        if let Some(floor) = est.resolved_floor() {
            return Ok(floor);
        }
        last = Some(est);
    }
    let (lo, hi) = last.expect("at least one level").render_bounds(60);
    Err(Error::AmbiguousBoundary { lo, hi })
}

pub fn predict_count(ratio: &MassRatio) -> Result<CountPrediction> {
    let model = rotation_angle(ratio)?;
    let x = model.turns_to_pi;

    let (n_exact_formula, n_paper_floor, boundary_flag) = if near_integer(x) {
        match integer_boundary(ratio) {
            // The rotation lands exactly on pi; the last contact has zero
            // relative velocity and is not a collision.
            Some(n) => (n - 1, n, BoundaryFlag::NearInteger),
            None => {
                let floor = escalate(ratio, precise::pi_over_atan_sqrt)?;
                (floor, floor, BoundaryFlag::NearInteger)
            }
        }
    } else {
        let floor = x.floor() as u64;
        (floor, floor, BoundaryFlag::Interior)
    };

    let y = PI * ratio.to_f64().recip().sqrt();
    let n_sqrt_approx = if near_integer(y) {
        escalate(ratio, precise::pi_sqrt_inverse)?
    } else {
        y.floor() as u64
    };

    Ok(CountPrediction {
        n_exact_formula,
        n_paper_floor,
        n_sqrt_approx,
        boundary_flag,
        turns_to_pi: x,
    })
}

/// Largest coordinate gap between iterating collide-then-bounce `k` times
/// from `(v, V) = (0, -1)` and rotating `(u, V) = (0, -1)` by `k theta`
/// directly, over `k = 0..=steps`.
pub fn rotation_deviation(ratio: &MassRatio, steps: u32) -> Result<f64> {
    let theta = 2.0 * ratio.to_f64().sqrt().atan();
    let mut state = VelocityPair::<f64>::initial();
    let mut worst = 0.0f64;
    for k in 1..=steps {
        state = reflect_wall(&collide_blocks(&state, ratio)?);
        let point = to_phase(&state, ratio)?;
        let angle = k as f64 * theta;
        let (su, sv) = (angle.sin(), -angle.cos());
        worst = worst.max((point.u - su).abs()).max((point.big - sv).abs());
    }
    Ok(worst)
}

/// Checks that the simulated map is a rotation by `theta` per step, to
/// within [`ROTATION_TOLERANCE`].
pub fn verify_rotation_equivalence(ratio: &MassRatio, steps: u32) -> bool {
    rotation_deviation(ratio, steps).is_ok_and(|d| d <= ROTATION_TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decade(n: u32) -> MassRatio {
        MassRatio::decade(n).unwrap()
    }

    #[test]
    fn angle_at_equal_masses() {
        let m = rotation_angle(&MassRatio::ONE).unwrap();
        assert_eq!(m.theta, PI / 2.0);
        assert_eq!(m.half_theta_tan, 1.0);
        assert_eq!(m.turns_to_pi, 4.0);
    }

    #[test]
    fn angle_at_one_hundredth() {
        let m = rotation_angle(&decade(2)).unwrap();
        // 2 atan(0.1), cross-checked against acos(0.99 / 1.01).
        assert!((m.theta - 0.199_337_304_982_324_1).abs() < 1e-15);
        assert!((m.theta - (0.99f64 / 1.01).acos()).abs() < 1e-12);
    }

    #[test]
    fn rejects_heavy_small_block() {
        let r = MassRatio::new(3, 2).unwrap();
        assert!(matches!(rotation_angle(&r), Err(Error::RatioAboveOne(_))));
        assert!(matches!(predict_count(&r), Err(Error::RatioAboveOne(_))));
    }

    #[test]
    fn table_predictions() {
        for (exp, n) in [(0, 3), (2, 31), (4, 314), (6, 3141), (12, 3_141_592)] {
            let p = predict_count(&decade(exp)).unwrap();
            assert_eq!(p.n_exact_formula, n, "1e-{exp}");
            assert_eq!(p.n_sqrt_approx, n, "1e-{exp}");
        }
    }

    #[test]
    fn equal_mass_boundary() {
        let p = predict_count(&MassRatio::ONE).unwrap();
        assert_eq!(p.n_exact_formula, 3);
        assert_eq!(p.n_paper_floor, 4);
        assert_eq!(p.n_sqrt_approx, 3);
        assert_eq!(p.boundary_flag, BoundaryFlag::NearInteger);
    }

    #[test]
    fn one_third_boundary() {
        let p = predict_count(&MassRatio::new(1, 3).unwrap()).unwrap();
        assert_eq!((p.n_exact_formula, p.n_paper_floor), (5, 6));
        assert_eq!(p.boundary_flag, BoundaryFlag::NearInteger);
        // floor(pi sqrt 3) = 5.
        assert_eq!(p.n_sqrt_approx, 5);
    }

    #[test]
    fn interior_flag() {
        let p = predict_count(&decade(2)).unwrap();
        assert_eq!(p.boundary_flag, BoundaryFlag::Interior);
        assert_eq!(p.n_paper_floor, p.n_exact_formula);
    }

    #[test]
    fn boundary_set() {
        assert_eq!(integer_boundary(&MassRatio::ONE), Some(4));
        assert_eq!(integer_boundary(&MassRatio::new(1, 3).unwrap()), Some(6));
        assert_eq!(integer_boundary(&MassRatio::new(3, 1).unwrap()), Some(3));
        assert_eq!(integer_boundary(&MassRatio::new(1, 2).unwrap()), None);
    }

    #[test]
    fn rotation_examples() {
        assert!(verify_rotation_equivalence(&decade(4), 0));
        assert!(verify_rotation_equivalence(&decade(4), 100));
        assert!(verify_rotation_equivalence(&MassRatio::ONE, 2));
        let mut s = VelocityPair::<f64>::initial();
        for _ in 0..2 {
            s = reflect_wall(&collide_blocks(&s, &MassRatio::ONE).unwrap());
        }
        assert_eq!(s, VelocityPair::new(0.0, 1.0));
    }

    #[test]
    fn monotone_in_alpha() {
        let mut grid: Vec<MassRatio> = (1..=60u64)
            .map(|k| MassRatio::new(1, k * k + 3 * k).unwrap())
            .chain((1..=20u64).map(|k| MassRatio::new(k, 20).unwrap()))
            .collect();
        grid.sort();
        let counts: Vec<u64> = grid.iter().map(|r| predict_count(r).unwrap().n_exact_formula).collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
    }
}
