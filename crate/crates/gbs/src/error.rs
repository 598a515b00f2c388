use thiserror::Error;

use crate::arith::ArithError;
use crate::graph::GraphError;
use crate::hgraph::HGraphError;
use crate::kernel::KernelError;
use crate::merge::MergeError;
use crate::preaction::PreactionError;
use crate::text::ParseError;
use crate::words::WordError;

/// Any failure surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Preaction(#[from] PreactionError),
    #[error(transparent)]
    HGraph(#[from] HGraphError),
    #[error(transparent)]
    Merge(#[from] MergeError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl Error {
    /// True for malformed input text, as opposed to well-formed input on which an operation failed.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}
