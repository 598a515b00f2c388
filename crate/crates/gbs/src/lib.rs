//! Generalized Baumslag-Solitar groups: phenotypes, preactions, H-graphs and
//! perfect kernels of the space of subgroups.
pub mod arith;
pub mod error;
pub mod graph;
pub mod hgraph;
pub mod kernel;
pub mod merge;
pub mod preaction;
pub mod text;
pub mod words;
