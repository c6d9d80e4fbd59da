use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("insufficient variation: all observations are equal")]
    InsufficientVariation,

    #[error("no model could be fitted: {}", .0.join("; "))]
    NoModel(Vec<String>),

    #[error("framing error: chip sequence has odd length {0}")]
    Framing(usize),

    #[error("Manchester code violation at chip pair {0}")]
    CodeViolation(usize),

    #[error("frame integrity check failed: expected CRC {expected:#06x}, got {actual:#06x}")]
    Integrity { expected: u16, actual: u16 },

    #[error("frame sync error: {0}")]
    Sync(String),

    #[error("infeasible link: SNR threshold {0} not reachable at any distance")]
    InfeasibleLink(f64),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("degenerate truncation: acceptance mass {mass:e} on [{lo}, {hi}] s")]
    DegenerateTruncation { lo: f64, hi: f64, mass: f64 },

    #[error("scenario validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("unparseable rows: {}", .0.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "))]
    UnparseableRows(Vec<usize>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("scenario parse error: {0}")]
    Toml(#[from] toml::de::Error),
}
