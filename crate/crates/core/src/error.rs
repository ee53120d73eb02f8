use alloc::string::String;

/// Errors raised by the recovery library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Two points (or a point and a space) belong to different domain variants.
    #[error("domain variant mismatch: expected {expected}, found {found}")]
    VariantMismatch {
        /// Variant required by the operation.
        expected: &'static str,
        /// Variant that was supplied.
        found: &'static str,
    },
    /// A coordinate was NaN or infinite.
    #[error("non-finite coordinate")]
    NonFinite,
    /// A support set contained the same point twice.
    #[error("duplicate point in support set at index {0}")]
    DuplicatePoint(usize),
    /// Minimum separation requested for fewer than two points.
    #[error("separation undefined for fewer than two points")]
    SeparationUndefined,
    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Vector length does not match the measurement family.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch {
        /// Expected length.
        expected: usize,
        /// Supplied length.
        got: usize,
    },
    /// Operation needs a different measurement operator variant.
    #[error("wrong measurement operator: {0}")]
    WrongOperator(&'static str),
    /// Interpolation system is singular or too badly conditioned.
    #[error("separation too small: interpolation system condition number {condition:.3e}")]
    SeparationTooSmall {
        /// Estimated 2-norm condition number.
        condition: f64,
    },
    /// Bargmann separation quantity too large for the Neumann argument.
    #[error("separation condition violated: sigma_down - 1 = {excess:.4e}")]
    SeparationConditionViolated {
        /// Value of `σ̄↓(W) − 1`.
        excess: f64,
    },
    /// Validation grid does not resolve the near regions.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    /// Dense linear system is singular.
    #[error("singular linear system")]
    Singular,
    /// The noise-constrained program has no feasible finite measure.
    #[error("infeasible: residual stagnated at {residual:.3e} above eps {eps:.3e}")]
    Infeasible {
        /// Smallest residual reached.
        residual: f64,
        /// Requested tolerance.
        eps: f64,
    },
    /// No interpolating measurement satisfies the valley constraint.
    #[error("Θ empty at (λ={lambda}, δ={delta}) for sampled ω: {reason}")]
    ThetaEmpty {
        /// Valley level.
        lambda: f64,
        /// Neighborhood radius.
        delta: f64,
        /// What failed.
        reason: String,
    },
}

/// Crate result alias.
pub type Result<T> = core::result::Result<T, Error>;
