use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A vertex id outside `0..num_vertices`.
    InvalidVertex(usize),
    /// An edge id outside `0..num_edges`.
    InvalidEdge(usize),
    /// An exhaustive enumeration would examine more candidates than the
    /// configured work bound allows.
    WorkBoundExceeded {
        needed: u128,
        budget: u64,
        what: &'static str,
    },
    /// A bag is too large (or `p` too big) to enumerate signatures for.
    SignatureCapExceeded { bag_size: usize, cap: usize },
    /// A tree decomposition violates one of its defining conditions.
    InvalidTreeDecomposition(String),
    /// A normalized tree decomposition violates one of its structural rules.
    InvalidNiceDecomposition(String),
    /// A set-system handed to the set-cover generator cannot be encoded.
    MalformedFamily(String),
    /// Input to the clique generator is not a properly partitioned graph.
    NotKPartite(String),
    /// Instances handed to the chain composer disagree on (p, k).
    MismatchedInstances(String),
    /// A request the solver cannot serve (e.g. too many routes).
    Unsupported(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidVertex(v) => write!(f, "invalid vertex id {v}"),
            Error::InvalidEdge(e) => write!(f, "invalid edge id {e}"),
            Error::WorkBoundExceeded {
                needed,
                budget,
                what,
            } => write!(
                f,
                "work bound exceeded while {what}: ~{needed} candidates, budget {budget}"
            ),
            Error::SignatureCapExceeded { bag_size, cap } => {
                write!(f, "signature cap exceeded: bag size {bag_size} > cap {cap}")
            }
            Error::InvalidTreeDecomposition(msg) => write!(f, "invalid tree decomposition: {msg}"),
            Error::InvalidNiceDecomposition(msg) => {
                write!(f, "invalid nice tree decomposition: {msg}")
            }
            Error::MalformedFamily(msg) => write!(f, "malformed set family: {msg}"),
            Error::NotKPartite(msg) => write!(f, "not a valid partitioned graph: {msg}"),
            Error::MismatchedInstances(msg) => write!(f, "mismatched instances: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported request: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

/// Budget for brute-force enumerations, counted in examined candidates.
///
/// Separator/cut enumeration and the subset oracle are exponential by design;
/// the budget turns "would not finish" into a clean error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkBudget(pub u64);

impl WorkBudget {
    pub const DEFAULT: WorkBudget = WorkBudget(20_000_000);

    /// Reads the budget from the `MSE_WORK_BOUND` environment variable,
    /// falling back to the default.
    pub fn from_env() -> WorkBudget {
        match std::env::var("MSE_WORK_BOUND") {
            Ok(s) => s
                .trim()
                .parse()
                .map(WorkBudget)
                .unwrap_or(WorkBudget::DEFAULT),
            Err(_) => WorkBudget::DEFAULT,
        }
    }

    pub fn check(&self, needed: u128, what: &'static str) -> Result<()> {
        if needed > self.0 as u128 {
            Err(Error::WorkBoundExceeded {
                needed,
                budget: self.0,
                what,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for WorkBudget {
    fn default() -> Self {
        WorkBudget::DEFAULT
    }
}
