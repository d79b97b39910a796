use thiserror::Error;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point outside the domain: {0}")]
    Domain(String),
    #[error("evaluation at a pole: {0}")]
    Pole(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("branch continuation failed: {0}")]
    Branch(String),
    #[error("trajectory cannot start at a pole: {0}")]
    SingularStart(String),
    #[error("step size underflow at {0}")]
    Step(String),
    #[error("level set through a critical point: {0}")]
    CriticalLevel(String),
    #[error("seed does not reach the requested level: {0}")]
    Seed(String),
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("bad surface address: {0}")]
    Address(String),
    #[error("cells are not adjacent: {0}")]
    Adjacency(String),
    #[error("random walk exceeded {0} steps")]
    WalkOverflow(u64),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("empty interface: {0}")]
    EmptyInterface(String),
    #[error("droplets overlap: {0}")]
    Overlap(String),
    #[error("source lies outside its droplet: {0}")]
    SourceOutside(String),
    #[error("linear solve failed: {0}")]
    Solve(String),
    #[error("empty curve")]
    EmptyCurve,
    #[error("missing droplet {0}")]
    MissingDroplet(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Config(_) | Error::Io(_) => 2,
            Error::InvariantViolation(_) => 4,
            _ => 3,
        }
    }
}
