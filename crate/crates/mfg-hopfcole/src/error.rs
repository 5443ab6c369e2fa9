//! Error type shared across the crate.

use std::fmt;

/// Errors produced by construction, transformation, and solver routines.
#[derive(Debug, Clone)]
pub enum Error {
    /// A scalar argument fell outside its mathematical domain.
    Domain(String),
    /// Two grid functions that must share a grid do not.
    ShapeMismatch(String),
    /// A density or transformed unknown lost strict positivity.
    Positivity(String),
    /// The gradient-alignment condition exceeded the caller's tolerance;
    /// the offending flux report rides along.
    AlignmentExceeded {
        rel_sup_norm: f64,
        tol: f64,
        report: Box<crate::transform::AlignmentReport>,
    },
    /// A precondition on an operation's input was violated.
    Precondition(String),
    /// An iterative solver stopped before reaching its tolerance; carries
    /// the convergence trace when one exists.
    NonConvergence {
        what: String,
        residual: f64,
        iterations: usize,
        trace: Option<Box<crate::rlaplace::SolveTrace>>,
    },
    /// The Newton Jacobian could not be factorized.
    JacobianSingular(String),
    /// Damped Newton could not find an admissible step.
    DampingFailure(String),
    /// Configuration file rejected.
    Config(String),
    /// File I/O failure, with the offending path.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::Positivity(msg) => write!(f, "positivity violated: {msg}"),
            Error::AlignmentExceeded {
                rel_sup_norm, tol, ..
            } => write!(
                f,
                "gradient alignment violated: relative sup-norm {rel_sup_norm:.3e} exceeds tolerance {tol:.3e}"
            ),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::NonConvergence {
                what,
                residual,
                iterations,
                ..
            } => write!(
                f,
                "{what} did not converge: residual {residual:.3e} after {iterations} iterations"
            ),
            Error::JacobianSingular(msg) => write!(
                f,
                "Jacobian singular ({msg}); a non-monotone coupling is the usual cause"
            ),
            Error::DampingFailure(msg) => write!(f, "damping failure: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
