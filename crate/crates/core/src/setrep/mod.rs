//! Finite unions of separated periodic blocks, plus the atom form for rank 1.

mod block;
mod blockset;
mod stdform;

pub use block::{negate_indices, Block, Extent, IndexBound};
pub use blockset::BlockSet;
pub use stdform::{Atom, AtomKind, StdForm};

use thiserror::Error;

use crate::lexgroup::{GroupElement, GroupError};
use crate::semilinear::IndexError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("block pattern is empty")]
    EmptyPattern,
    #[error("pattern letter {0} is not positive")]
    NonPositiveLetter(GroupElement),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("blocks {first} and {second} overlap")]
    Overlap { first: usize, second: usize },
    #[error("set has negative elements but is flagged non-negative")]
    NotNonNegative,
    #[error("result is not a finite union of blocks (sample: {})", fmt_list(.sample))]
    NotRepresentable { sample: Vec<GroupElement> },
    #[error("no least element at or above {from}")]
    NoLeastElement { from: GroupElement },
    #[error("set is infinite")]
    Infinite,
    #[error("set is not discrete")]
    NotDiscrete,
    #[error("set is not aligned to a lattice")]
    NotLatticeAligned,
    #[error("bad family: {0}")]
    BadFamily(String),
    #[error("non-positive scale factor")]
    NonPositiveScale,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

fn fmt_list(v: &[GroupElement]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
