use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range for space of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("unsupported norm exponent p = {0}")]
    UnsupportedNorm(f64),

    #[error("eps = {0} outside (0, 1/8)")]
    EpsOutOfRange(f64),

    #[error("radii must be strictly ascending and positive")]
    NonAscendingRadii,

    #[error("seed members {0} and {1} violate packing at the net radius")]
    SeedPacking(usize, usize),

    #[error("scheme `{scheme}` cannot run on a {backing} metric")]
    SchemeMismatch {
        scheme: &'static str,
        backing: &'static str,
    },

    #[error("covering not reached after {rounds} rounds ({covered} of {pairs} close pairs covered)")]
    CoverageCapExceeded {
        rounds: usize,
        covered: usize,
        pairs: usize,
    },

    #[error("ball carving gave up after {0} center draws")]
    CarvingCapExceeded(u64),

    #[error("cannot amplify a family with far-collision probability p2 = {0}")]
    AmplificationImpossible(f64),

    #[error("net point {point} unreachable from cluster center {center} inside its cluster")]
    DisconnectedCluster { center: usize, point: usize },

    #[error("at scale {scale}: {source}")]
    AtScale { scale: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn at_scale(self, scale: usize) -> Self {
        Error::AtScale {
            scale,
            source: Box::new(self),
        }
    }

    /// Strips any scale context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtScale { source, .. } => source.root(),
            other => other,
        }
    }
}
