use thiserror::Error;

/// Errors raised by the scattering, synthesis and particle routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("singular kernel argument: source and target coincide")]
    SingularArgument,

    #[error("linear solver did not reach tolerance {tol:e}: achieved relative residual {residual:e} after {iterations} iterations")]
    SolverFailure {
        residual: f64,
        tol: f64,
        iterations: usize,
    },

    #[error("pattern synthesis failed: best residual {best_residual:e} at smallest lambda {smallest_lambda:e} (target {target:e})")]
    SynthesisFailure {
        best_residual: f64,
        smallest_lambda: f64,
        target: f64,
    },

    #[error("density not realizable with capacitance {capacitance}: {} offending cells (first: {:?}); supply an impedance so that q - q0 lies along the impedance capacitance", cells.len(), cells.first())]
    Realizability {
        cells: Vec<usize>,
        capacitance: String,
    },

    #[error("packing constraints unsatisfiable: requested density {requested_density:e}, max feasible density {max_feasible_density:e} ({reason})")]
    Packing {
        requested_density: f64,
        max_feasible_density: f64,
        reason: String,
    },

    #[error("singular impedance: 1 + C0/(zeta |S|) vanishes")]
    SingularImpedance,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
