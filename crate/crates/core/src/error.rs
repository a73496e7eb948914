use thiserror::Error;

/// Errors raised by the geometry kernel.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("derivative order {order} is not supported (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },
    #[error("symmetric product convention violated: {0}")]
    Convention(String),
    #[error("incompatible contraction: {0}")]
    Contraction(String),
    #[error("slot {slot} out of range for a tensor of order {order}")]
    SlotOutOfRange { slot: usize, order: usize },
    #[error("requested accuracy {requested:e} not reached (achieved {achieved:e})")]
    Accuracy { requested: f64, achieved: f64 },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("degenerate plane: the two vectors are (nearly) collinear")]
    DegeneratePlane,
    #[error("degenerate body: {0}")]
    DegenerateBody(String),
    #[error("chart is singular at this point: {0}")]
    ChartSingular(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
