//! Recurrent and minimal infinite words with prescribed factor complexity.

pub mod analyze;
pub mod cli;
pub mod construct;
pub mod growth;
pub mod io;
pub mod minimal;
pub mod report;

/// A finite word; `0` is the gap letter.
pub type Word = Vec<u32>;
