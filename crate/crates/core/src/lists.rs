//! List assignments and colourings.

use crate::bitset::BitSet;
use crate::error::CoreError;
use crate::graph::BipartiteGraph;

pub type Colour = u32;

/// A `(k_a, k_b)`-list-assignment over the dense palette `0..palette_size`.
///
/// Lists are stored sorted and duplicate-free. Two vertices may carry the
/// same list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ListAssignment {
    palette_size: usize,
    k_a: usize,
    k_b: usize,
    lists_a: Vec<Vec<Colour>>,
    lists_b: Vec<Vec<Colour>>,
}

impl ListAssignment {
    /// Validates and stores the lists. Each list is sorted on the way in;
    /// repeated colours inside one list are rejected.
    pub fn new(
        palette_size: usize,
        k_a: usize,
        k_b: usize,
        lists_a: Vec<Vec<Colour>>,
        lists_b: Vec<Vec<Colour>>,
    ) -> Result<Self, CoreError> {
        let mut lists_a = lists_a;
        let mut lists_b = lists_b;
        for (side, lists, k) in [("A", &mut lists_a, k_a), ("B", &mut lists_b, k_b)] {
            for (i, list) in lists.iter_mut().enumerate() {
                list.sort_unstable();
                if list.windows(2).any(|w| w[0] == w[1]) {
                    return Err(CoreError::Inconsistent(format!(
                        "list of {side}-vertex {i} repeats a colour"
                    )));
                }
                if list.len() != k {
                    return Err(CoreError::Inconsistent(format!(
                        "list of {side}-vertex {i} has {} colours, expected {k}",
                        list.len()
                    )));
                }
                if let Some(&c) = list.iter().find(|&&c| c as usize >= palette_size) {
                    return Err(CoreError::Inconsistent(format!(
                        "colour {c} of {side}-vertex {i} is outside the palette 0..{palette_size}"
                    )));
                }
            }
        }
        let cap = lists_a.len() * k_a + lists_b.len() * k_b;
        if palette_size > cap {
            return Err(CoreError::Inconsistent(format!(
                "palette size {palette_size} exceeds the {cap} colour slots in the lists"
            )));
        }
        Ok(Self {
            palette_size,
            k_a,
            k_b,
            lists_a,
            lists_b,
        })
    }

    /// Builds the assignment and relabels colours densely in one step.
    pub fn normalized_from(
        k_a: usize,
        k_b: usize,
        lists_a: Vec<Vec<Colour>>,
        lists_b: Vec<Vec<Colour>>,
    ) -> Result<Self, CoreError> {
        let max = lists_a
            .iter()
            .chain(&lists_b)
            .flatten()
            .copied()
            .max()
            .map_or(0, |c| c as usize + 1);
        let cap = lists_a.len() * k_a + lists_b.len() * k_b;
        let raw = Self {
            palette_size: max,
            k_a,
            k_b,
            lists_a,
            lists_b,
        };
        let norm = raw.normalized();
        // re-run validation on the compacted form
        let out = Self::new(norm.palette_size, k_a, k_b, norm.lists_a, norm.lists_b)?;
        debug_assert!(out.palette_size <= cap);
        Ok(out)
    }

    #[inline]
    pub fn palette_size(&self) -> usize {
        self.palette_size
    }

    #[inline]
    pub fn k_a(&self) -> usize {
        self.k_a
    }

    #[inline]
    pub fn k_b(&self) -> usize {
        self.k_b
    }

    #[inline]
    pub fn lists_a(&self) -> &[Vec<Colour>] {
        &self.lists_a
    }

    #[inline]
    pub fn lists_b(&self) -> &[Vec<Colour>] {
        &self.lists_b
    }

    pub fn a_len(&self) -> usize {
        self.lists_a.len()
    }

    pub fn b_len(&self) -> usize {
        self.lists_b.len()
    }

    pub fn list_a_bits(&self, v: usize) -> BitSet {
        BitSet::from_indices(self.palette_size, self.lists_a[v].iter().map(|&c| c as usize))
    }

    pub fn list_b_bits(&self, w: usize) -> BitSet {
        BitSet::from_indices(self.palette_size, self.lists_b[w].iter().map(|&c| c as usize))
    }

    /// Colours that occur in at least one list.
    pub fn used_colours(&self) -> BitSet {
        let mut used = BitSet::new(self.palette_size);
        for &c in self.lists_a.iter().chain(&self.lists_b).flatten() {
            used.insert(c as usize);
        }
        used
    }

    /// Drops colours that occur in no list and relabels the rest densely,
    /// preserving their relative order.
    pub fn normalized(&self) -> Self {
        let used = self.used_colours();
        let mut relabel = vec![u32::MAX; self.palette_size];
        for (new, old) in used.iter().enumerate() {
            relabel[old] = new as Colour;
        }
        let map = |lists: &[Vec<Colour>]| -> Vec<Vec<Colour>> {
            lists
                .iter()
                .map(|l| l.iter().map(|&c| relabel[c as usize]).collect())
                .collect()
        };
        Self {
            palette_size: used.len(),
            k_a: self.k_a,
            k_b: self.k_b,
            lists_a: map(&self.lists_a),
            lists_b: map(&self.lists_b),
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.used_colours().len() == self.palette_size
    }

    /// Applies a colour permutation (`perm[old] = new`) and reorders the
    /// vertices of each side. Lists are re-sorted.
    pub fn permuted(&self, colour_perm: &[Colour], a_order: &[usize], b_order: &[usize]) -> Self {
        let map = |l: &Vec<Colour>| {
            let mut out: Vec<Colour> = l.iter().map(|&c| colour_perm[c as usize]).collect();
            out.sort_unstable();
            out
        };
        Self {
            palette_size: self.palette_size,
            k_a: self.k_a,
            k_b: self.k_b,
            lists_a: a_order.iter().map(|&i| map(&self.lists_a[i])).collect(),
            lists_b: b_order.iter().map(|&i| map(&self.lists_b[i])).collect(),
        }
    }

    /// Keeps only the listed vertices.
    pub fn restricted(&self, keep_a: &[usize], keep_b: &[usize]) -> Self {
        Self {
            palette_size: self.palette_size,
            k_a: self.k_a,
            k_b: self.k_b,
            lists_a: keep_a.iter().map(|&i| self.lists_a[i].clone()).collect(),
            lists_b: keep_b.iter().map(|&i| self.lists_b[i].clone()).collect(),
        }
        .normalized()
    }

    pub fn check_shape(&self, graph: &BipartiteGraph) -> Result<(), CoreError> {
        if graph.a_size() != self.a_len() || graph.b_size() != self.b_len() {
            return Err(CoreError::ShapeMismatch(format!(
                "graph has parts {}+{} but the assignment has {}+{} lists",
                graph.a_size(),
                graph.b_size(),
                self.a_len(),
                self.b_len()
            )));
        }
        Ok(())
    }
}

/// One colour per vertex of each part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProperColouring {
    pub colours_a: Vec<Colour>,
    pub colours_b: Vec<Colour>,
}

impl ProperColouring {
    /// Re-checks list membership and properness from scratch.
    pub fn check(
        &self,
        graph: &BipartiteGraph,
        assignment: &ListAssignment,
    ) -> Result<(), String> {
        if self.colours_a.len() != graph.a_size() || self.colours_b.len() != graph.b_size() {
            return Err("colouring does not cover the graph".into());
        }
        for (v, c) in self.colours_a.iter().enumerate() {
            if assignment.lists_a()[v].binary_search(c).is_err() {
                return Err(format!("A-vertex {v} coloured {c} outside its list"));
            }
        }
        for (w, c) in self.colours_b.iter().enumerate() {
            if assignment.lists_b()[w].binary_search(c).is_err() {
                return Err(format!("B-vertex {w} coloured {c} outside its list"));
            }
        }
        for (v, w) in graph.edges() {
            if self.colours_a[v] == self.colours_b[w] {
                return Err(format!(
                    "edge ({v},{w}) joins two vertices of colour {}",
                    self.colours_a[v]
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_errors() {
        assert!(ListAssignment::new(4, 2, 2, vec![vec![0, 5]], vec![vec![0, 1]]).is_err());
        assert!(ListAssignment::new(4, 2, 2, vec![vec![0, 0]], vec![vec![0, 1]]).is_err());
        assert!(ListAssignment::new(4, 2, 2, vec![vec![0]], vec![vec![0, 1]]).is_err());
        // 5 colours but only 4 slots
        assert!(ListAssignment::new(5, 2, 2, vec![vec![0, 1]], vec![vec![2, 3]]).is_err());
        let ok = ListAssignment::new(4, 2, 2, vec![vec![2, 0]], vec![vec![3, 1]]).unwrap();
        assert_eq!(ok.lists_a()[0], vec![0, 2]);
    }

    #[test]
    fn normalization_compacts_palette() {
        let la = ListAssignment::normalized_from(1, 2, vec![vec![9]], vec![vec![3, 9]]).unwrap();
        assert_eq!(la.palette_size(), 2);
        assert_eq!(la.lists_a(), &[vec![1]]);
        assert_eq!(la.lists_b(), &[vec![0, 1]]);
        assert!(la.is_normalized());
    }

    #[test]
    fn colouring_check_catches_conflicts() {
        let g = BipartiteGraph::complete(1, 1);
        let la = ListAssignment::new(2, 2, 2, vec![vec![0, 1]], vec![vec![0, 1]]).unwrap();
        let bad = ProperColouring {
            colours_a: vec![0],
            colours_b: vec![0],
        };
        assert!(bad.check(&g, &la).is_err());
        let good = ProperColouring {
            colours_a: vec![0],
            colours_b: vec![1],
        };
        assert!(good.check(&g, &la).is_ok());
    }
}
