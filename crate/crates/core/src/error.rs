use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("migration count c = {c} outside [1, min(M, N)] = [1, {max}]")]
    CRange { c: u64, max: u64 },

    #[error("population sizes must be positive (N = {n}, M = {m})")]
    PopulationSize { n: u64, m: u64 },

    #[error("probability {name} = {value} invalid: each must lie in (0, 1) and each pair must sum below 1")]
    ProbRange { name: &'static str, value: f64 },

    #[error("island-2 mutation probabilities supplied for the seed-bank model")]
    KindMismatch,

    #[error("operation requires the {expected} model")]
    WrongKind { expected: &'static str },

    #[error("singular linear system at moment degree {degree}")]
    SingularSystem { degree: usize },

    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(&'static str),

    #[error("seed-bank bounds need M >= 4, got M = {0}")]
    MTooSmall(u64),

    #[error("moment degree {requested} exceeds the supported maximum {max}")]
    DegreeOverflow { requested: usize, max: usize },

    #[error("dual process did not absorb within {0} jumps")]
    NonAbsorbing(u64),

    #[error("adaptive quadrature did not converge (estimate {estimate}, error {error})")]
    NonConvergent { estimate: f64, error: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
