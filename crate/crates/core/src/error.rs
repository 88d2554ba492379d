use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("net charge {net:e} violates periodic compatibility")]
    IncompatibleCharge { net: f64 },

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A step failed during a run; `t` is the start of the failing step.
    #[error("step failed at t = {t} (CFL {cfl}): {source}")]
    StepFailed {
        t: f64,
        cfl: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for solver stalls, including ones wrapped in [`Error::StepFailed`].
    pub fn is_solver_failure(&self) -> bool {
        match self {
            Error::Solver(_) => true,
            Error::StepFailed { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}

/// Failure of one of the iterative solvers.
#[derive(Debug, Clone, Error)]
pub enum SolverError {
    /// GMRES ran out of iterations. `best` is the iterate with the smallest
    /// residual seen.
    #[error("linear solver stalled after {iterations} iterations (residual {residual:e})")]
    LinearStall {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("Newton iteration stalled after {iterations} iterations (residual {residual:e})")]
    NewtonStall { iterations: usize, residual: f64 },
}
