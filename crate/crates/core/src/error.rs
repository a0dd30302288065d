use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("lattice size n={n} is outside the supported range 0..={max}")]
    LatticeSize { n: u32, max: u32 },

    #[error("invalid vertex set: {0}")]
    VertexSet(String),

    #[error("{what}={value} is out of range (maximum {max})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        max: u64,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A resource guard refused the request.
    #[error("infeasible: {0}")]
    Feasibility(String),

    #[error("construction reached size {achieved} of the requested {requested}")]
    Construction { requested: u64, achieved: u64 },

    /// Two independent computations disagreed.
    #[error("invariant failure: {0}")]
    Invariant(String),
}
