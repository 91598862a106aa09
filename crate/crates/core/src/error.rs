use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("collection exceeded its work budget of {0} steps (presentation likely inconsistent)")]
    Budget(u64),
    #[error("generator index {0} out of range")]
    BadGenerator(usize),
    #[error("malformed word: {0}")]
    BadWord(String),
    #[error("weighted presentation violated: {0}")]
    Weight(String),
    #[error("elements belong to different presentations")]
    MixedPresentations,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("enumeration bound exceeded: group of order {size} > bound {bound}")]
    Bound { size: u128, bound: u128 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("relation {relation} is violated by the proposed images")]
    RelationViolated { relation: String },
    #[error("generator cap of {0} exceeded")]
    GeneratorCap(usize),
    #[error("relator evaluation is not central: {0}")]
    NotCentral(String),
    #[error("no element satisfies the requirement: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
