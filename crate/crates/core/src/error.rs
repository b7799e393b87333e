use thiserror::Error;

use crate::partition::Partition;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: {0} is a partition of {1}, expected {2}")]
    SizeMismatch(Partition, usize, usize),

    #[error("box ({row}, {col}) lies outside the diagram of {partition}")]
    BoxOutside {
        partition: Partition,
        row: usize,
        col: usize,
    },

    #[error("invalid partition text {0:?}")]
    ParsePartition(String),

    #[error("invalid rational {0:?}")]
    ParseRational(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("{0} is not a sub-multiset of {1}")]
    NotSubMultiset(Partition, Partition),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("index sets differ (k={0} vs k={1})")]
    IndexMismatch(usize, usize),

    #[error("rejection loop exceeded {0} attempts")]
    RetryCap(u64),

    #[error("repeated eigenvalues for {0:?}")]
    EigenvalueCollision(Vec<(Partition, Partition)>),

    #[error("kernel of M - beta I for {0} has dimension {1}, expected 1")]
    KernelDimension(Partition, usize),

    #[error("no step below threshold within {0} steps")]
    IterationCap(usize),

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
