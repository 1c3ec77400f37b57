//! Exact calculus for discrete sets in the lexicographic group ℚ^r.

pub mod calculus;
pub mod groups;
pub mod lexgroup;
pub mod semilinear;
pub mod setrep;
pub mod structure;
pub mod witness;
