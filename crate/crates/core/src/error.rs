use thiserror::Error;

/// Errors raised by the numerical pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value at {chart} point ({x}, {y})")]
    NonFinite { chart: String, x: f64, y: f64 },

    #[error("chart mismatch: {0}")]
    ChartMismatch(String),

    #[error("unsupported topology: {0}")]
    UnsupportedTopology(String),

    #[error("non-integrable singularity at {0}")]
    NonIntegrable(String),

    #[error("derivative budget exhausted: need order {need}, factor carries {have}")]
    InsufficientSmoothness { need: usize, have: usize },

    #[error("not absolute-value type at declared resolution: slope {slope:.4} near {location}")]
    NotAbsoluteValueType { slope: f64, location: String },

    #[error("not a generalized Ricci metric: {0}")]
    NotGeneralizedRicci(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain collapse: {0}")]
    DomainCollapse(String),

    #[error("step-size failure: {0}")]
    StepSize(String),

    #[error("closure defect {defect:.3e} exceeds {tol:.1e}")]
    Closure { defect: f64, tol: f64 },

    #[error("Newton iteration diverged (residual history {history:?})")]
    Divergence { history: Vec<f64> },

    #[error("singular linearization: {0}")]
    SingularLinearization(String),

    #[error("monotonicity failure: {0}")]
    Monotonicity(String),

    #[error("root finding failed: {msg} (condition estimate {condition:.2e})")]
    RootFinding { msg: String, condition: f64 },

    #[error("extension failure: {0}")]
    Extension(String),

    #[error("no immersion of this signature: {0}")]
    NoImmersion(String),

    #[error("unknown field '{requested}', available: {available}")]
    UnknownField { requested: String, available: String },
}

pub type Result<T> = std::result::Result<T, Error>;
