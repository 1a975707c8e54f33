//! Orderly generation of B-list families up to colour relabelling.
//!
//! A family is a strictly ascending sequence of `k`-subsets of the palette
//! (ascending in lexicographic tuple order). Colours enter by first
//! appearance: the colours of the first `j` lists always form an initial
//! segment `0..u_j`. Every prefix of a canonical family is canonical, so
//! non-canonical prefixes are cut immediately.

use std::ops::ControlFlow;

use crate::bitset::{k_subsets, lex_less, mask_elems};
use crate::canon::is_canonical_pair;
use crate::lists::Colour;

/// Canonical families of `count` distinct `k`-sets using exactly the
/// colours `0..palette`.
#[derive(Clone, Debug)]
pub struct FamilySpace {
    pub count: usize,
    pub k: usize,
    pub palette: usize,
    subsets: Vec<u64>,
}

impl FamilySpace {
    pub fn new(count: usize, k: usize, palette: usize) -> Self {
        assert!(palette <= 64, "palettes beyond 64 colours are not supported");
        Self {
            count,
            k,
            palette,
            subsets: k_subsets(palette, k),
        }
    }

    /// True if `family` (ascending) can still be completed and is canonical.
    fn admissible(&self, family: &[u64], used: usize) -> bool {
        let remaining = self.count - family.len();
        if used + remaining * self.k < self.palette {
            return false;
        }
        if self.subsets.len() - self.position_after(family) < remaining {
            return false;
        }
        is_canonical(family, used)
    }

    fn position_after(&self, family: &[u64]) -> usize {
        match family.last() {
            None => 0,
            Some(&last) => self.subsets.partition_point(|&s| !lex_less(last, s)),
        }
    }

    fn extensions<'a>(&'a self, family: &[u64], used: usize) -> impl Iterator<Item = (u64, usize)> + 'a {
        let start = self.position_after(family);
        self.subsets[start..].iter().filter_map(move |&s| {
            let high = s >> used;
            // fresh colours must be the next consecutive labels
            if high & (high.wrapping_add(1)) != 0 {
                return None;
            }
            Some((s, used + high.count_ones() as usize))
        })
    }

    /// All canonical prefixes of length `depth`, in generation order.
    pub fn prefixes(&self, depth: usize) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        let _ = self.walk(&mut cur, 0, depth, &mut |f| {
            out.push(f.to_vec());
            ControlFlow::Continue(())
        });
        out
    }

    /// Visits every complete canonical family extending `prefix`, in
    /// generation order. The visitor may stop the walk.
    pub fn for_each_completion(
        &self,
        prefix: &[u64],
        visit: &mut dyn FnMut(&[u64]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let used = used_colours(prefix);
        let mut cur = prefix.to_vec();
        if !cur.is_empty() && !self.admissible(&cur, used) {
            return ControlFlow::Continue(());
        }
        self.walk(&mut cur, used, self.count, visit)
    }

    fn walk(
        &self,
        cur: &mut Vec<u64>,
        used: usize,
        depth: usize,
        visit: &mut dyn FnMut(&[u64]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if cur.len() == depth {
            if depth < self.count || used == self.palette {
                return visit(cur);
            }
            return ControlFlow::Continue(());
        }
        let exts: Vec<(u64, usize)> = self.extensions(cur, used).collect();
        for (s, next_used) in exts {
            cur.push(s);
            if self.admissible(cur, next_used) {
                self.walk(cur, next_used, depth, visit)?;
            }
            cur.pop();
        }
        ControlFlow::Continue(())
    }
}

fn used_colours(family: &[u64]) -> usize {
    family.iter().fold(0u64, |a, &s| a | s).count_ones() as usize
}

pub(crate) fn to_lists(family: &[u64]) -> Vec<Vec<Colour>> {
    family
        .iter()
        .map(|&s| mask_elems(s).map(|c| c as Colour).collect())
        .collect()
}

fn is_canonical(family: &[u64], used: usize) -> bool {
    is_canonical_pair(used, &to_lists(family), &[])
}
