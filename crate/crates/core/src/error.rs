use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty space")]
    EmptySpace,
    #[error("scale error: {0}")]
    Scale(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("metric mismatch: {0}")]
    MetricMismatch(String),
    #[error("parameter error: {0}")]
    Param(String),
    #[error("disconnected: {0}")]
    Disconnected(String),
    #[error("mass error: {0}")]
    Mass(String),
    #[error("zero mass on cell {0}")]
    ZeroMass(String),
    #[error("solver failed: {0}")]
    Solve(String),
    #[error("singular interior block: {0}")]
    SingularInterior(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("sets overlap: {0}")]
    Overlap(String),
    #[error("empty interior: {0}")]
    EmptyInterior(String),
    #[error("(S1) violated: crossing sum {sum:.6} < 1 at vertex {vertex}")]
    S1Violated { vertex: usize, sum: f64 },
    #[error("(S2) violated for eta0 = {eta0:.3e}: ratio {ratio:.3e} at vertex {vertex}")]
    S2Violated { eta0: f64, vertex: usize, ratio: f64 },
    #[error("vertex {0} has no non-peripheral child")]
    NoNonPeripheralChild(usize),
    #[error("compatibility drift: level mass ratio {ratio} at level {level}")]
    CompatibilityDrift { level: usize, ratio: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },
    #[error("invariant error at row {row}, column {col}: {msg}")]
    Invariant { row: usize, col: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
