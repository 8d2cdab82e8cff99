use thiserror::Error;

/// Errors produced by the code library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The requested field modulus is not prime.
    #[error("{0} is not prime")]
    NotPrime(u64),
    /// The requested field modulus is outside `[2, 2^61)`.
    #[error("field modulus {0} out of supported range [2, 2^61)")]
    ModulusOutOfRange(u64),
    /// Inversion of zero.
    #[error("division by zero")]
    DivisionByZero,
    /// A square matrix was required.
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare {
        /// Row count.
        rows: usize,
        /// Column count.
        cols: usize,
    },
    /// A linear system has no unique solution.
    #[error("matrix is singular")]
    Singular,
    /// A target row space is not contained in the given subspace.
    #[error("target rows are not in the span of the subspace")]
    NotInSpan,
    /// Operand shapes do not fit together.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    /// An index, digit or node number is out of range.
    #[error("value out of range: {0}")]
    OutOfRange(&'static str),
    /// The `(n, k, d)` triple (or a derived quantity) is invalid.
    #[error("invalid code parameters: {0}")]
    BadParams(&'static str),
    /// An encoding coefficient was zero.
    #[error("encoding coefficient lambda[{row}][{col}] is zero")]
    ZeroLambda {
        /// Parity row (zero-based).
        row: usize,
        /// Systematic column (zero-based).
        col: usize,
    },
    /// A dense materialization would exceed the supported size.
    #[error("object too large for dense materialization: {0}")]
    TooLarge(&'static str),
    /// A derived size exceeds its cap.
    #[error("sub-packetization overflow: {0}")]
    Overflow(&'static str),
    /// Coefficient search gave up.
    #[error("no valid coefficient table found after {0} tries")]
    SearchExhausted(u32),
    /// A buffer has the wrong number of symbols.
    #[error("bad length: expected {expected}, got {actual}")]
    BadLength {
        /// Expected length.
        expected: usize,
        /// Supplied length.
        actual: usize,
    },
    /// A shard belongs to a different parameter set.
    #[error("parameter checksum mismatch: expected {expected:#010x}, got {actual:#010x}")]
    ChecksumMismatch {
        /// Checksum of the governing parameters.
        expected: u32,
        /// Checksum carried by the shard.
        actual: u32,
    },
    /// A symbol value does not fit the field or the byte packing.
    #[error("symbol value {0} out of range")]
    SymbolOverflow(u64),
}

/// Library result alias.
pub type Result<T> = core::result::Result<T, Error>;
