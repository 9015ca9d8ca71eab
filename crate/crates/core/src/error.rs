use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set size {0} is outside 1..={max}", max = crate::setkit::MAX_GROUND)]
    InvalidGround(usize),
    #[error("ground set size {n} exceeds the enumeration cap {cap}")]
    GroundTooLarge { n: usize, cap: usize },
    #[error("point {point} is outside a ground set of size {n}")]
    PointOutOfRange { point: usize, n: usize },
    #[error("subset {mask:#x} does not fit a ground set of size {n}")]
    SubsetOutOfRange { mask: u64, n: usize },
    #[error("ground set mismatch: expected size {expected}, found {found}")]
    GroundMismatch { expected: usize, found: usize },
    #[error("family is not linked or contains the empty set")]
    NotLinked,
    #[error("family is not a maximal linked system")]
    NotMaximalLinked,
    #[error("family is not an inclusion hyperspace: {0}")]
    NotInclusionHyperspace(&'static str),
    #[error("the empty set is not allowed here")]
    EmptySet,
    #[error("the two systems are equal")]
    EqualSystems,
    #[error("map is not surjective: point {0} has no preimage")]
    NotSurjective(usize),
    #[error("not an extender: restriction differs from the input at point {point}")]
    NotAnExtender { point: usize },
    #[error("function already lies in the generated subspace")]
    InSubspace,
    #[error("generator values admit no monotone extension: {0}")]
    Inconsistent(String),
    #[error("{what} of size {size} exceeds the limit {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("invalid finite space: {0}")]
    InvalidSpace(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),
    #[error("space must be discrete (finite Hausdorff) for this construction")]
    NotDiscrete,
    #[error("not an usco map: {0}")]
    NotUsco(String),
    #[error("value at embedded point {0} is not its principal system")]
    NotPointFixed(usize),
    #[error("invalid subbase: {0}")]
    InvalidSubbase(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("parse error: {0}")]
    Parse(String),
}
