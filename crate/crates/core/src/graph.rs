//! Bipartite graphs with parts `A` and `B`.

use crate::bitset::BitSet;
use crate::error::CoreError;

/// A bipartite graph on parts `A = 0..a_size` and `B = 0..b_size`.
///
/// Complete graphs store no rows; every query answers as if all rows were
/// full.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteGraph {
    a_size: usize,
    b_size: usize,
    rows: Option<Vec<BitSet>>,
}

impl BipartiteGraph {
    pub fn complete(a_size: usize, b_size: usize) -> Self {
        Self {
            a_size,
            b_size,
            rows: None,
        }
    }

    /// Builds a graph from `(a, b)` edge pairs. Duplicate pairs collapse.
    pub fn from_edges(
        a_size: usize,
        b_size: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, CoreError> {
        let mut rows = vec![BitSet::new(b_size); a_size];
        for (u, w) in edges {
            if u >= a_size || w >= b_size {
                return Err(CoreError::Inconsistent(format!(
                    "edge ({u},{w}) outside K_{{{a_size},{b_size}}}"
                )));
            }
            rows[u].insert(w);
        }
        Ok(Self {
            a_size,
            b_size,
            rows: Some(rows),
        })
    }

    pub fn from_rows(b_size: usize, rows: Vec<BitSet>) -> Result<Self, CoreError> {
        if let Some(bad) = rows.iter().position(|r| r.width() != b_size) {
            return Err(CoreError::Inconsistent(format!(
                "adjacency row {bad} has width {} but |B| = {b_size}",
                rows[bad].width()
            )));
        }
        Ok(Self {
            a_size: rows.len(),
            b_size,
            rows: Some(rows),
        })
    }

    #[inline]
    pub fn a_size(&self) -> usize {
        self.a_size
    }

    #[inline]
    pub fn b_size(&self) -> usize {
        self.b_size
    }

    #[inline]
    pub fn is_complete(&self) -> bool {
        self.rows.is_none()
    }

    /// True if the stored adjacency is total, whether or not the flag is set.
    pub fn is_effectively_complete(&self) -> bool {
        match &self.rows {
            None => true,
            Some(rows) => rows.iter().all(|r| r.len() == self.b_size),
        }
    }

    #[inline]
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        match &self.rows {
            None => a < self.a_size && b < self.b_size,
            Some(rows) => rows[a].contains(b),
        }
    }

    /// Neighbourhood of an A-vertex as a row over `B`.
    pub fn row(&self, a: usize) -> BitSet {
        match &self.rows {
            None => BitSet::full(self.b_size),
            Some(rows) => rows[a].clone(),
        }
    }

    pub fn neighbours_of_a(&self, a: usize) -> Vec<usize> {
        match &self.rows {
            None => (0..self.b_size).collect(),
            Some(rows) => rows[a].iter().collect(),
        }
    }

    pub fn neighbours_of_b(&self, b: usize) -> Vec<usize> {
        match &self.rows {
            None => (0..self.a_size).collect(),
            Some(rows) => (0..self.a_size).filter(|&a| rows[a].contains(b)).collect(),
        }
    }

    pub fn degree_a(&self, a: usize) -> usize {
        match &self.rows {
            None => self.b_size,
            Some(rows) => rows[a].len(),
        }
    }

    pub fn degree_b(&self, b: usize) -> usize {
        match &self.rows {
            None => self.a_size,
            Some(rows) => rows.iter().filter(|r| r.contains(b)).count(),
        }
    }

    /// Largest row popcount.
    pub fn max_degree_a(&self) -> usize {
        (0..self.a_size).map(|a| self.degree_a(a)).max().unwrap_or(0)
    }

    /// Largest column popcount.
    pub fn max_degree_b(&self) -> usize {
        (0..self.b_size).map(|b| self.degree_b(b)).max().unwrap_or(0)
    }

    /// Edges in row-major order, i.e. ascending `(a, b)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.a_size)
            .flat_map(|a| self.neighbours_of_a(a).into_iter().map(move |b| (a, b)))
            .collect()
    }

    /// Subgraph induced by keeping the listed vertices, in the given order.
    pub fn induced(&self, keep_a: &[usize], keep_b: &[usize]) -> Self {
        if self.is_complete() {
            return Self::complete(keep_a.len(), keep_b.len());
        }
        let rows = keep_a
            .iter()
            .map(|&a| {
                BitSet::from_indices(
                    keep_b.len(),
                    keep_b
                        .iter()
                        .enumerate()
                        .filter(|(_, &b)| self.adjacent(a, b))
                        .map(|(i, _)| i),
                )
            })
            .collect();
        Self {
            a_size: keep_a.len(),
            b_size: keep_b.len(),
            rows: Some(rows),
        }
    }

    /// Disjoint union, with `other`'s vertices appended after `self`'s.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let a_size = self.a_size + other.a_size;
        let b_size = self.b_size + other.b_size;
        let mut rows = Vec::with_capacity(a_size);
        for a in 0..self.a_size {
            rows.push(BitSet::from_indices(b_size, self.neighbours_of_a(a)));
        }
        for a in 0..other.a_size {
            rows.push(BitSet::from_indices(
                b_size,
                other.neighbours_of_a(a).into_iter().map(|b| b + self.b_size),
            ));
        }
        Self {
            a_size,
            b_size,
            rows: Some(rows),
        }
    }
}
