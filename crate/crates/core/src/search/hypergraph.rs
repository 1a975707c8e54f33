use crate::bitset::{mask_elems, BitSet};

use super::SearchError;

/// A hypergraph on `0..vertex_count` with non-empty edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypergraph {
    vertex_count: usize,
    edges: Vec<BitSet>,
}

impl Hypergraph {
    pub fn new(vertex_count: usize, edges: Vec<BitSet>) -> Result<Self, SearchError> {
        for (i, e) in edges.iter().enumerate() {
            if e.width() != vertex_count {
                return Err(SearchError::Invalid(format!("edge {i} has width {}, expected {vertex_count}", e.width())));
            }
            if e.is_empty() {
                return Err(SearchError::Invalid(format!("edge {i} is empty")));
            }
        }
        Ok(Self { vertex_count, edges })
    }

    /// Builds a hypergraph on at most 64 vertices from single-word masks.
    pub fn from_masks(vertex_count: usize, masks: &[u64]) -> Result<Self, SearchError> {
        if vertex_count > 64 {
            return Err(SearchError::Invalid("mask hypergraphs have at most 64 vertices".into()));
        }
        let edges = masks
            .iter()
            .map(|&m| {
                if vertex_count < 64 && m >> vertex_count != 0 {
                    Err(SearchError::Invalid(format!("mask {m:#x} exceeds {vertex_count} vertices")))
                } else {
                    Ok(BitSet::from_indices(vertex_count, mask_elems(m)))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vertex_count, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[BitSet] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as single-word masks, if every vertex index is below 64.
    pub fn masks(&self) -> Option<Vec<u64>> {
        (self.vertex_count <= 64).then(|| self.edges.iter().map(|e| e.words().first().copied().unwrap_or(0)).collect())
    }

    /// True when no edge contains another and no edge repeats.
    pub fn is_antichain(&self) -> bool {
        self.edges.iter().enumerate().all(|(i, e)| {
            self.edges
                .iter()
                .enumerate()
                .all(|(j, f)| i == j || !e.is_subset(f))
        })
    }
}

/// All inclusion-minimal vertex sets meeting every edge, sorted by size and
/// then lexicographically.
pub fn minimal_transversals(h: &Hypergraph, cap: usize) -> Result<Hypergraph, SearchError> {
    if h.edge_count() == 0 {
        return Err(SearchError::Invalid("hypergraph has no edges".into()));
    }
    let masks = h
        .masks()
        .ok_or_else(|| SearchError::Invalid("dualization supports at most 64 vertices".into()))?;
    let out = transversal_masks(&masks, cap)?;
    let result = Hypergraph::from_masks(h.vertex_count, &out)?;
    debug_assert!(result.is_antichain());
    Ok(result)
}

/// Berge dualization on masks. Edges are processed one at a time; sets
/// missing the new edge are extended by each of its vertices and kept when
/// no surviving set is contained in the extension.
pub(crate) fn transversal_masks(edges: &[u64], cap: usize) -> Result<Vec<u64>, SearchError> {
    let mut edges: Vec<u64> = edges.to_vec();
    edges.sort_by_key(|e| (e.count_ones(), *e));
    edges.dedup();
    let mut current: Vec<u64> = vec![0];
    for &e in &edges {
        let (hit, miss): (Vec<u64>, Vec<u64>) = current.iter().partition(|&&t| t & e != 0);
        let mut next = hit.clone();
        for x in mask_elems(e) {
            let bit = 1u64 << x;
            // only kept sets through x can lie inside t + x
            let through: Vec<u64> = hit.iter().copied().filter(|&s| s & bit != 0).collect();
            for &t in &miss {
                let cand = t | bit;
                if !through.iter().any(|&s| s & !cand == 0) {
                    next.push(cand);
                }
            }
            if next.len() > cap {
                return Err(SearchError::TooLarge { cap });
            }
        }
        current = next;
    }
    current.sort_by_key(|t| (t.count_ones(), crate::bitset::lex_key(*t)));
    Ok(current)
}
