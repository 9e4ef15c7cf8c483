use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^31")]
    InvalidPrime(u32),
    #[error("poset has {0} elements; subsets are limited to 64")]
    TooLarge(usize),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("duplicate element label {0}")]
    DuplicateLabel(String),
    #[error("cover relations contain a cycle through {0}")]
    CycleDetected(String),
    #[error("cover {0} -> {1} is implied by transitivity")]
    RedundantCover(String, String),
    #[error("cover {0} -> {1} listed twice")]
    DuplicateCover(String, String),
    #[error("{0} and {1} are comparable, so the set is not an antichain")]
    NotAntichain(String, String),
    #[error("source and target sets must be nonempty")]
    EmptyAntichain,
    #[error("antichain order fails: {0}")]
    OrderViolated(String),
    #[error("subset is not convex: {0} <= {1} <= {2} with the middle element missing")]
    NotConvex(String, String, String),
    #[error("subset is not connected")]
    NotConnected,
    #[error("enumeration exceeded the cap of {0}")]
    CapExceeded(usize),
    #[error("{0} is not below {1}")]
    NotComparable(String, String),
    #[error("{0} is not strictly below {1}")]
    NotGreater(String, String),
    #[error("spread with support {0} appears twice")]
    DuplicateSpread(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("module is not commutative between {0} and {1}")]
    NotCommutative(String, String),
    #[error("morphism is not natural along {0} -> {1}")]
    NotNatural(String, String),
    #[error("modules live over different posets or fields")]
    PosetMismatch,
    #[error("family is missing the projective at {0}")]
    MissingProjectives(String),
    #[error("family member {0} appears twice")]
    DuplicateMember(String),
    #[error("family is not closed under quotients of its members")]
    NotQuotientClosed,
    #[error("resolution did not terminate within depth {depth}")]
    ResolutionTruncated {
        depth: usize,
        /// Multiplicity vectors of the terms computed so far.
        terms: Vec<Vec<usize>>,
    },
    #[error("Hom matrix is not unitriangular: the Hom relation has a cycle through {0}")]
    HomMatrixSingular(String),
    #[error("index {0} out of range")]
    OutOfRange(usize),
    #[error("Hasse diagram is not a path (not of type A)")]
    NotTypeA,
    #[error("unknown invariant {0}")]
    UnknownInvariant(String),
}
