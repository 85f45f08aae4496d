//! Error type shared by all modules of the crate.

use crate::sparse::SparseCode;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Graph construction got an empty edge list.
    NoEdges,
    /// Degree filtering removed every node.
    FilteredEmpty,
    /// The item is linked to every group, so no negative can be drawn.
    NoNegative { item: usize },
    /// An item's degree is below what the operation needs.
    DegreeTooLow {
        item: usize,
        degree: usize,
        min: usize,
    },
    /// A dimension or count does not match its declared value.
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// NaN or infinity where a finite value is required.
    NonFinite { what: &'static str },
    /// AUC of an empty positive or negative score list.
    UndefinedAuc,
    /// Evaluation found no item with held-out positives.
    NoEvaluableItems,
    /// The model configuration yields a score with no data-dependent terms.
    NoModelTerms,
    /// The operation needs item latent features the variant does not carry.
    NeedsItemLatents,
    /// The variant has no linear path from input features to scores.
    NoFeaturePath,
    /// Every dictionary atom has zero norm.
    ZeroDictionary,
    EmptyLambdaGrid,
    /// Coordinate descent hit the sweep limit; carries the last iterate.
    NotConverged { sweeps: usize, last: SparseCode },
    InvalidParameter { what: &'static str },
    IndexOutOfBounds {
        what: &'static str,
        index: usize,
        len: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NoEdges => write!(f, "no edges"),
            Error::FilteredEmpty => write!(f, "graph eliminated by filtering"),
            Error::NoNegative { item } => {
                write!(f, "no negative available for item {item}")
            }
            Error::DegreeTooLow { item, degree, min } => {
                write!(f, "item {item} has degree {degree}, need at least {min}")
            }
            Error::ShapeMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected {expected}, found {found}"),
            Error::NonFinite { what } => write!(f, "non-finite value in {what}"),
            Error::UndefinedAuc => write!(f, "undefined AUC: empty score list"),
            Error::NoEvaluableItems => {
                write!(f, "no item with held-out positives to evaluate")
            }
            Error::NoModelTerms => write!(f, "model has no terms"),
            Error::NeedsItemLatents => write!(f, "variant requires item latents"),
            Error::NoFeaturePath => write!(f, "no feature path in this variant"),
            Error::ZeroDictionary => write!(f, "all-zero dictionary"),
            Error::EmptyLambdaGrid => write!(f, "empty lambda grid"),
            Error::NotConverged { sweeps, .. } => {
                write!(f, "coordinate descent did not converge after {sweeps} sweeps")
            }
            Error::InvalidParameter { what } => write!(f, "invalid parameter: {what}"),
            Error::IndexOutOfBounds { what, index, len } => {
                write!(f, "{what} index {index} out of range (len {len})")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
