use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid mass ratio `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("mass ratio must have positive numerator and denominator")]
    NonPositiveRatio,

    #[error("mass ratio {0} exceeds 1; the count predictors assume m <= M")]
    RatioAboveOne(String),

    #[error("floating-point result is not finite")]
    NonFinite,

    #[error("sqrt of mass ratio {0} is irrational and cannot be represented exactly")]
    IrrationalSqrt(String),

    #[error(
        "exact backend refuses mass ratio {alpha} (below the 1e-8 feasibility cutoff); \
         pass an explicit digit budget to override"
    )]
    ExactCutoff { alpha: String },

    #[error("numerator grew to {digits} decimal digits, above the budget of {budget}")]
    DigitBudget { digits: u64, budget: u64 },

    #[error("backend failed at collision {index}: {source}")]
    Backend {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("simulation did not terminate within {reached} events")]
    Runaway { reached: u64 },

    #[error("no trace was recorded for this run")]
    TraceAbsent,

    #[error("cannot decide whether pi/arctan(sqrt(alpha)) is an integer: it lies in [{lo}, {hi}]")]
    AmbiguousBoundary { lo: String, hi: String },
}

pub type Result<T> = std::result::Result<T, Error>;
