use crate::linalg::NewtonReport;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The stretch `|d_s r|` collapsed below the admissible threshold.
    #[error("degenerate stretch {stretch:e} (element {element:?})")]
    DegenerateStretch { stretch: f64, element: Option<usize> },
    #[error("invalid parameter: {0}")]
    InvalidParams(&'static str),
    #[error("invalid mesh: {0}")]
    InvalidMesh(&'static str),
    #[error("unsupported quadrature order {0} (expected 1..=5)")]
    UnsupportedOrder(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular matrix (zero pivot in column {column})")]
    SingularMatrix { column: usize },
    #[error("linear solve failed inside Newton iteration {iteration}: {source}")]
    LinearSolveFailed {
        iteration: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
        report: NewtonReport,
    },
    #[error("Newton did not converge after {} iterations (residual {:e})", .report.iterations, .report.final_residual())]
    MaxIterationsExceeded { report: NewtonReport },
}

impl Error {
    /// Newton report attached to a solver failure, if any.
    pub fn report(&self) -> Option<&NewtonReport> {
        match self {
            Error::LinearSolveFailed { report, .. } | Error::MaxIterationsExceeded { report } => {
                Some(report)
            }
            _ => None,
        }
    }

    pub(crate) fn degenerate_at(self, element: usize) -> Error {
        match self {
            Error::DegenerateStretch { stretch, .. } => Error::DegenerateStretch {
                stretch,
                element: Some(element),
            },
            other => other,
        }
    }
}
