use thiserror::Error;

/// Errors raised by the numerical engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The coupling lies in the wrong phase for the requested solution.
    #[error("phase error: g = {g} is outside the {expected} phase")]
    Phase { g: f64, expected: &'static str },

    /// The driven-dissipative flow has no stable steady state.
    #[error("unstable phase: g = {g} is not below the dissipative critical coupling {g_c}")]
    Unstable { g: f64, g_c: f64 },

    /// A steady state was requested for a flow without photon loss.
    #[error("no steady state: photon loss rate kappa must be positive")]
    NoSteadyState,

    /// An iterative or dense numerical routine failed.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The fidelity drop of a finite difference left the quadratic regime.
    #[error("finite-difference step too large: fidelity {fidelity} below 0.5")]
    StepTooLarge { fidelity: f64 },

    /// The Fock cutoff is too small to represent a state.
    #[error("cutoff error: {0}")]
    Cutoff(String),

    /// The Monras formula is singular for (nearly) pure states.
    #[error("near-pure state (16 d^4 - 1 = {denominator:e}); use the pure-state branch")]
    PureBranch { denominator: f64 },

    /// Integrator step size violated a precondition or diagnostic.
    #[error("step-size error: {0}")]
    StepSize(String),

    /// A scaling-fit window touches the critical point.
    #[error("window error: {0}")]
    Window(String),

    /// A state violated a physical invariant.
    #[error("invariant violation: {0}")]
    Invariant(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Phase { .. } => "phase",
            Error::Unstable { .. } => "unstable",
            Error::NoSteadyState => "no_steady_state",
            Error::Numeric(_) => "numeric",
            Error::StepTooLarge { .. } => "step_too_large",
            Error::Cutoff(_) => "cutoff",
            Error::PureBranch { .. } => "pure_branch",
            Error::StepSize(_) => "step_size",
            Error::Window(_) => "window",
            Error::Invariant(_) => "invariant",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
