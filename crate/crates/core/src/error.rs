use thiserror::Error;

/// Errors raised across the crate.
///
/// Indices carried by variants are 0-based; the `Display` output uses the
/// 1-based numbering of the text formats so messages line up with input files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square: row {} has {len} entries, expected {n}", .row + 1)]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("symbol out of range at row {}, column {}", .0 + 1, .1 + 1)]
    OutOfRange(usize, usize),
    #[error("duplicate symbol in row {}", .0 + 1)]
    DuplicateInRow(usize),
    #[error("duplicate symbol in column {}", .0 + 1)]
    DuplicateInColumn(usize),
    #[error("parse error on line {0}: {1}")]
    Parse(usize, String),

    #[error("labelling sizes differ: |alpha|={0}, |beta|={1}, |gamma|={2}")]
    SizeMismatch(usize, usize, usize),
    #[error("array dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("row indices must differ (got {} twice)", .0 + 1)]
    EqualRows(usize),
    #[error("order {0} is too small for this operation")]
    OrderTooSmall(usize),
    #[error("order {0} is too large for this operation (limit {1})")]
    OrderTooLarge(usize, usize),

    #[error("symbol {} is already labelled", .0 + 1)]
    AlreadyLabelled(usize),
    #[error("no unlabelled row cycle left to branch on")]
    NoUnlabelledCycle,

    #[error("order {0} is not 1 or 3 mod 6")]
    BadOrder(usize),
    #[error("block {0:?} is not a 3-subset of the point set")]
    BadBlock([usize; 3]),
    #[error("pair {{{}, {}}} is not covered by any block", .0 + 1, .1 + 1)]
    PairUncovered(usize, usize),
    #[error("pair {{{}, {}}} is covered more than once", .0 + 1, .1 + 1)]
    PairDoubled(usize, usize),
    #[error("square is not idempotent")]
    NotIdempotent,
    #[error("square is not totally symmetric")]
    NotTotallySymmetric,
    #[error("not a Steiner quasigroup: {0}")]
    NotSteiner(String),
    #[error("symbol {} lies in the singular cycle", .0 + 1)]
    SingularSymbol(usize),
    #[error("cell ({}, {}) lies below the diagonal", .0 + 1, .1 + 1)]
    InvalidCell(usize, usize),

    #[error("square is not unipotent")]
    NotUnipotent,
    #[error("square is not symmetric")]
    NotSymmetric,
    #[error("not a 1-factorisation: {0}")]
    NotOneFactorisation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
