use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("group needs at least one cyclic factor")]
    EmptyOrders,
    #[error("cyclic factor of order {0} is too small (need >= 2)")]
    FactorTooSmall(usize),
    #[error("group of order {order} exceeds the cap {cap}")]
    GroupTooLarge { order: u128, cap: usize },
    #[error("functions live on different groups")]
    GroupMismatch,
    #[error("function is not real (max |imag| = {0:e})")]
    NotReal(f64),
    #[error("block half-size {half} does not tile a factor of order {order}")]
    NonDividingBlock { half: usize, order: usize },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid summation basis: {0}")]
    InvalidBasis(String),
    #[error("summation basis has more than {cap} members")]
    BasisNotEnumerable { cap: usize },
    #[error("set a is empty")]
    EmptySet,
    #[error("pair (R, S) is not sufficient (fails for E centered at {center} with half-widths {half_widths:?})")]
    PairNotSufficient { center: usize, half_widths: Vec<usize> },
    #[error("basis is not coordinated with the pair (fails for E centered at {center} with half-widths {half_widths:?})")]
    NotCoordinated { center: usize, half_widths: Vec<usize> },
    #[error("value out of range at element {index}: {value:e} not in [0, {upper:e}]")]
    RangeViolation { index: usize, value: f64, upper: f64 },
    #[error("function vanishes in L2")]
    ZeroFunction,
    #[error("no partition block satisfies h <= g and the energy bound (level {level})")]
    PartitionExhausted { level: usize },
    #[error("no character satisfies the selection conditions for bump {bump} at level {level}")]
    SpectrumExhausted { level: usize, bump: usize },
    #[error("not converged after {iterations} steps (relative g residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("invariant violated at level {level}: {what}")]
    InvariantViolation { level: usize, what: String },
}

impl Error {
    /// Variant name, for machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyOrders => "EmptyOrders",
            Error::FactorTooSmall(_) => "FactorTooSmall",
            Error::GroupTooLarge { .. } => "GroupTooLarge",
            Error::GroupMismatch => "GroupMismatch",
            Error::NotReal(_) => "NotReal",
            Error::NonDividingBlock { .. } => "NonDividingBlock",
            Error::InvalidWindow(_) => "InvalidWindow",
            Error::InvalidBasis(_) => "InvalidBasis",
            Error::BasisNotEnumerable { .. } => "BasisNotEnumerable",
            Error::EmptySet => "EmptySet",
            Error::PairNotSufficient { .. } => "PairNotSufficient",
            Error::NotCoordinated { .. } => "NotCoordinated",
            Error::RangeViolation { .. } => "RangeViolation",
            Error::ZeroFunction => "ZeroFunction",
            Error::PartitionExhausted { .. } => "PartitionExhausted",
            Error::SpectrumExhausted { .. } => "SpectrumExhausted",
            Error::NotConverged { .. } => "NotConverged",
            Error::InvalidSchedule(_) => "InvalidSchedule",
            Error::InvalidWeight(_) => "InvalidWeight",
            Error::InvariantViolation { .. } => "InvariantViolation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
