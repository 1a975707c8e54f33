//! Non-choosability certificates and their text format.
//!
//! A certificate is a JSON document with exactly these fields:
//!
//! ```text
//! {
//!   "schema": "bilist-cert/1",
//!   "claim": "NOT_LIST_COLOURABLE",
//!   "provenance": "CLASSIC",
//!   "graph": {"complete": true, "a": 4, "b": 2},
//!   "k_a": 2, "k_b": 2, "palette": 4,
//!   "lists_a": [[0,2],[0,3],[1,2],[1,3]],
//!   "lists_b": [[0,1],[2,3]],
//!   "notes": "..."
//! }
//! ```
//!
//! `graph.edges` (pairs `[a_idx, b_idx]`, sorted) is present iff
//! `graph.complete` is false. Colours are 0-based and every list is sorted.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::graph::BipartiteGraph;
use crate::lists::{Colour, ListAssignment};

pub const SCHEMA: &str = "bilist-cert/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Claim {
    NotListColourable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Classic,
    Steiner,
    Boundary,
    Gadget,
    Witness,
    Search,
}

/// A graph with a list assignment that admits no proper colouring.
///
/// Construction does not run the verifier; use
/// [`crate::colorability::verify_certificate`] for that.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonChoosabilityCertificate {
    pub graph: BipartiteGraph,
    pub assignment: ListAssignment,
    pub claim: Claim,
    pub provenance: Provenance,
    pub notes: String,
}

impl NonChoosabilityCertificate {
    pub fn new(
        graph: BipartiteGraph,
        assignment: ListAssignment,
        provenance: Provenance,
        notes: impl Into<String>,
    ) -> Result<Self, CoreError> {
        assignment.check_shape(&graph)?;
        Ok(Self {
            graph,
            assignment,
            claim: Claim::NotListColourable,
            provenance,
            notes: notes.into(),
        })
    }

    pub fn k_a(&self) -> usize {
        self.assignment.k_a()
    }

    pub fn k_b(&self) -> usize {
        self.assignment.k_b()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    complete: bool,
    a: usize,
    b: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<[usize; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCert {
    schema: String,
    claim: Claim,
    provenance: Provenance,
    graph: RawGraph,
    k_a: usize,
    k_b: usize,
    palette: usize,
    lists_a: Vec<Vec<Colour>>,
    lists_b: Vec<Vec<Colour>>,
    notes: String,
}

pub fn write_certificate(cert: &NonChoosabilityCertificate) -> String {
    let g = &cert.graph;
    let raw = RawCert {
        schema: SCHEMA.to_string(),
        claim: cert.claim,
        provenance: cert.provenance,
        graph: RawGraph {
            complete: g.is_complete(),
            a: g.a_size(),
            b: g.b_size(),
            edges: (!g.is_complete()).then(|| g.edges().into_iter().map(|(u, w)| [u, w]).collect()),
        },
        k_a: cert.assignment.k_a(),
        k_b: cert.assignment.k_b(),
        palette: cert.assignment.palette_size(),
        lists_a: cert.assignment.lists_a().to_vec(),
        lists_b: cert.assignment.lists_b().to_vec(),
        notes: cert.notes.clone(),
    };
    let mut out = String::from("{\n");
    // one list per line keeps large fixtures diffable
    let field = |out: &mut String, key: &str, value: String, last: bool| {
        out.push_str(&format!("  \"{key}\": {value}{}\n", if last { "" } else { "," }));
    };
    field(&mut out, "schema", js(&raw.schema), false);
    field(&mut out, "claim", js(&raw.claim), false);
    field(&mut out, "provenance", js(&raw.provenance), false);
    field(&mut out, "graph", js(&raw.graph), false);
    field(&mut out, "k_a", js(&raw.k_a), false);
    field(&mut out, "k_b", js(&raw.k_b), false);
    field(&mut out, "palette", js(&raw.palette), false);
    field(&mut out, "lists_a", list_block(&raw.lists_a), false);
    field(&mut out, "lists_b", list_block(&raw.lists_b), false);
    field(&mut out, "notes", js(&raw.notes), true);
    out.push_str("}\n");
    out
}

fn list_block(lists: &[Vec<Colour>]) -> String {
    if lists.is_empty() {
        return "[]".into();
    }
    let rows: Vec<String> = lists
        .iter()
        .map(|l| serde_json::to_string(l).expect("integer arrays serialize"))
        .collect();
    format!("[\n    {}\n  ]", rows.join(",\n    "))
}

fn js<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("certificate fields serialize")
}

pub fn read_certificate(text: &str) -> Result<NonChoosabilityCertificate, CoreError> {
    let raw: RawCert = serde_json::from_str(text).map_err(|e| CoreError::Malformed {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let at_start = |message: String| CoreError::Malformed {
        line: 1,
        column: 1,
        message,
    };
    if raw.schema != SCHEMA {
        return Err(at_start(format!("unknown schema {:?}, expected {SCHEMA:?}", raw.schema)));
    }
    let graph = match (raw.graph.complete, raw.graph.edges) {
        (true, None) => BipartiteGraph::complete(raw.graph.a, raw.graph.b),
        (true, Some(_)) => return Err(at_start("graph.edges present on a complete graph".into())),
        (false, None) => return Err(at_start("graph.edges missing on a non-complete graph".into())),
        (false, Some(edges)) => {
            if edges.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CoreError::Inconsistent("graph.edges not strictly ascending".into()));
            }
            BipartiteGraph::from_edges(raw.graph.a, raw.graph.b, edges.into_iter().map(|[u, w]| (u, w)))?
        }
    };
    for (side, lists) in [("lists_a", &raw.lists_a), ("lists_b", &raw.lists_b)] {
        if let Some(i) = lists.iter().position(|l| l.windows(2).any(|w| w[0] >= w[1])) {
            return Err(CoreError::Inconsistent(format!("{side}[{i}] is not strictly ascending")));
        }
    }
    let assignment = ListAssignment::new(raw.palette, raw.k_a, raw.k_b, raw.lists_a, raw.lists_b)?;
    assignment.check_shape(&graph).map_err(|e| CoreError::Inconsistent(e.to_string()))?;
    Ok(NonChoosabilityCertificate {
        graph,
        assignment,
        claim: raw.claim,
        provenance: raw.provenance,
        notes: raw.notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classic() -> NonChoosabilityCertificate {
        let la = ListAssignment::new(
            4,
            2,
            2,
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
            vec![vec![0, 1], vec![2, 3]],
        )
        .unwrap();
        NonChoosabilityCertificate::new(BipartiteGraph::complete(4, 2), la, Provenance::Classic, "K_{4,2}")
            .unwrap()
    }

    #[test]
    fn round_trip() {
        let c = classic();
        let text = write_certificate(&c);
        assert_eq!(read_certificate(&text).unwrap(), c);
        assert!(text.contains("\"schema\": \"bilist-cert/1\""));
    }

    #[test]
    fn round_trip_with_edges() {
        let g = BipartiteGraph::from_edges(2, 2, [(0, 0), (1, 0), (1, 1)]).unwrap();
        let la = ListAssignment::new(2, 1, 1, vec![vec![0], vec![1]], vec![vec![0], vec![1]]).unwrap();
        let c = NonChoosabilityCertificate::new(g, la, Provenance::Search, "").unwrap();
        let text = write_certificate(&c);
        assert!(text.contains("\"edges\":[[0,0],[1,0],[1,1]]"));
        assert_eq!(read_certificate(&text).unwrap(), c);
    }

    #[test]
    fn colour_outside_palette_is_inconsistent() {
        let text = write_certificate(&classic()).replace("[1,3]\n", "[1,4]\n");
        assert!(matches!(read_certificate(&text), Err(CoreError::Inconsistent(_))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let text = write_certificate(&classic()).replace("\"k_b\": 2,", "\"k_b\": 2");
        match read_certificate(&text) {
            Err(CoreError::Malformed { line, .. }) => assert!(line > 1),
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_and_schema_rejected() {
        let text = write_certificate(&classic());
        assert!(matches!(
            read_certificate(&text.replace("bilist-cert/1", "bilist-cert/2")),
            Err(CoreError::Malformed { .. })
        ));
        assert!(matches!(
            read_certificate(&text.replace("\"notes\"", "\"extra\": 1, \"notes\"")),
            Err(CoreError::Malformed { .. })
        ));
    }

    #[test]
    fn unsorted_lists_rejected() {
        let text = write_certificate(&classic()).replace("[0,2]", "[2,0]");
        assert!(matches!(read_certificate(&text), Err(CoreError::Inconsistent(_))));
    }
}
