use std::fmt;
use std::path::Path;

use qwoa_cvrp::baseline::BaselineError;
use qwoa_cvrp::circuit::CircuitError;
use qwoa_cvrp::cvrp::CvrpError;
use qwoa_cvrp::partitions::PartitionError;
use qwoa_cvrp::qwoa::QwoaError;

/// Command failure, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// 2: malformed flags or arguments.
    Usage(String),
    /// 3: inputs or results that break an invariant.
    Validation(String),
    /// 4: a size cap would be exceeded.
    Resource(String),
    /// 5: filesystem trouble.
    Io(String),
    /// 1: anything else.
    Other(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Validation(_) => 3,
            Failure::Resource(_) => 4,
            Failure::Io(_) => 5,
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Failure::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            Failure::Usage(m) => ("usage error", m),
            Failure::Validation(m) => ("validation error", m),
            Failure::Resource(m) => ("resource limit", m),
            Failure::Io(m) => ("io error", m),
            Failure::Other(m) => ("error", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl From<CvrpError> for Failure {
    fn from(e: CvrpError) -> Self {
        match e {
            CvrpError::TooLarge { .. } => Failure::Resource(e.to_string()),
            CvrpError::Io(ref io) => Failure::Io(io.to_string()),
            CvrpError::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<PartitionError> for Failure {
    fn from(e: PartitionError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<QwoaError> for Failure {
    fn from(e: QwoaError) -> Self {
        match e {
            QwoaError::InvalidParams(_) => Failure::Usage(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<BaselineError> for Failure {
    fn from(e: BaselineError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<CircuitError> for Failure {
    fn from(e: CircuitError) -> Self {
        match e {
            CircuitError::TooManyQubits { .. } => Failure::Resource(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}
