//! Exact search, certificates and condition checkers for list colouring of
//! bipartite graphs where the two parts receive lists of different sizes.
//!
//! A `(k_a, k_b)`-list-assignment gives every vertex of part `A` a list of
//! `k_a` colours and every vertex of part `B` a list of `k_b` colours. The
//! crate decides colourability for a fixed assignment ([`colorability`]),
//! computes exact choosability thresholds of complete bipartite graphs
//! ([`search`]), handles the covering-design parameter behind the complete
//! case ([`steiner`]), emits checkable non-choosability certificates
//! ([`constructions`]), evaluates closed-form sufficient conditions
//! ([`bounds`]) and runs resampling algorithms that turn the probabilistic
//! existence arguments into witnesses ([`probabilistic`]).

pub mod bitset;
pub mod bounds;
pub mod budget;
pub mod canon;
pub mod cert;
pub mod colorability;
pub mod constructions;
pub mod error;
pub mod graph;
pub mod lists;
pub mod param;
pub mod probabilistic;
pub mod search;
pub mod steiner;

pub use canon::canonicalize_assignment;
pub use cert::{read_certificate, write_certificate, Claim, NonChoosabilityCertificate, Provenance};
pub use error::CoreError;
pub use graph::BipartiteGraph;
pub use lists::{Colour, ListAssignment, ProperColouring};
pub use param::ParamPoint;
