use thiserror::Error;

/// Errors raised by the geometric kernels.
///
/// Variants fall into two families: input/precondition problems
/// ([`Error::is_input`]) and numerical failures ([`Error::is_numerical`]).
/// The command-line driver maps them to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two objects that must be distinct coincide, or a configuration is degenerate.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    /// Points that must be collinear are not.
    #[error("points are not collinear (residual {residual:.3e})")]
    NotCollinear { residual: f64 },
    /// Lines that must be concurrent are not.
    #[error("lines are not concurrent (residual {residual:.3e})")]
    NotConcurrent { residual: f64 },
    /// An incidence precondition fails (point off a line, off a conic, ...).
    #[error("incidence violated: {what} (residual {residual:.3e})")]
    NotIncident { what: &'static str, residual: f64 },
    /// A line or frame is tangent where transversality is required.
    #[error("transversality violated: {0}")]
    Transversality(String),
    /// A chord or tangent direction is light-like for the metric.
    #[error("light-like direction at step {step}")]
    LightLike { step: usize },
    /// A direction is isotropic for the complex quadratic form.
    #[error("isotropic direction: {0}")]
    Isotropic(String),
    /// A matrix that must be invertible is singular.
    #[error("singular matrix: {0}")]
    Singular(String),
    /// A trajectory hit a polygon vertex.
    #[error("orbit hits a corner at step {step}")]
    Corner { step: usize },
    /// No admissible next intersection exists.
    #[error("no intersection found: {0}")]
    NoIntersection(String),
    /// An iterative method did not converge.
    #[error("no convergence: {0}")]
    Convergence(String),
    /// An iteration exhausted its step budget.
    #[error("step budget of {0} exhausted")]
    StepBudget(usize),
    /// An internal invariant was violated (indicates a numerical breakdown).
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// Malformed or out-of-range user input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of a numerical method rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence(_) | Error::StepBudget(_) | Error::Invariant(_) | Error::Singular(_)
        )
    }

    /// True for precondition or parsing failures.
    pub fn is_input(&self) -> bool {
        !self.is_numerical()
    }
}

pub type Result<T> = std::result::Result<T, Error>;
