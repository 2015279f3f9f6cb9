//! Shared inputs for the criterion benchmarks.

use galperin_core::backend::{ExactBackend, ExactLimits, FloatBackend};
use galperin_core::{Backend, MassRatio, VelocityPair};
use num_rational::BigRational;
use num_traits::One;

/// Ratios run on both backends.
pub const SHARED_GRID: [&str; 3] = ["1", "1e-2", "1e-4"];

/// Ratios only the float backend is asked to run in a benchmark loop.
pub const FLOAT_ONLY_GRID: [&str; 2] = ["1e-6", "1e-12"];

pub fn ratio(s: &str) -> MassRatio {
    s.parse().expect("benchmark ratio parses")
}

pub fn exact_backend(alpha: MassRatio) -> ExactBackend {
    ExactBackend::new(alpha, &-BigRational::one(), ExactLimits::default()).expect("ratio above cutoff")
}

pub fn float_backend(alpha: MassRatio) -> FloatBackend {
    FloatBackend::new(alpha, &-BigRational::one()).expect("finite start")
}

/// State after `events` alternating collisions, for kernel benchmarks on
/// numerators that have already grown.
pub fn advanced_state<B: Backend>(backend: &B, events: u64) -> VelocityPair<B::Scalar> {
    let mut s = backend.initial_state();
    for i in 0..events {
        if i % 2 == 0 {
            backend.collide(&mut s).expect("collision");
        } else {
            backend.reflect(&mut s);
        }
    }
    s
}
