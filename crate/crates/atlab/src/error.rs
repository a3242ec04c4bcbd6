use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid region: {0}")]
    Region(String),
    #[error("invalid boundary condition: {0}")]
    Boundary(String),
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("degenerate branch K + K'' = 0: use the dedicated law")]
    DegenerateBranch,
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
