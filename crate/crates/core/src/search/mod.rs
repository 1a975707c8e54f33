//! Exhaustive choosability search for complete bipartite graphs.
//!
//! For fixed B-lists `F_B` on `K_{a,b}`, a proper colouring fails to exist
//! iff every minimal transversal of `F_B` contains some A-list. The least
//! number of A-lists achieving this is a set-cover number over the minimal
//! transversals, and the threshold `a*(b, k_a, k_b)` is its minimum over all
//! B-families up to colour relabelling.

mod cover;
mod families;
mod hypergraph;
mod threshold;

pub use cover::{cover, transversal_cover_number, CoverOutcome, CoverResult};
pub use families::FamilySpace;
pub use hypergraph::{minimal_transversals, Hypergraph};
pub use threshold::{is_choosable_complete, threshold_a, AStar, Choosability, ThresholdResult};

pub(crate) use hypergraph::transversal_masks;

/// Default cap on the number of minimal transversals.
pub const TRANSVERSAL_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("output would exceed the cap of {cap} sets")]
    TooLarge { cap: usize },
    #[error("a minimal transversal of size {size} is smaller than k_a = {k_a}")]
    Infeasible { size: usize, k_a: usize },
    #[error("resource cap hit after {nodes} nodes; the answer lies in [{lower}, {}]", .upper.map_or("?".to_string(), |u| u.to_string()))]
    Timeout {
        lower: usize,
        upper: Option<usize>,
        nodes: u64,
    },
    #[error("no success after {attempts} random attempts")]
    RetryExhausted { attempts: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}
