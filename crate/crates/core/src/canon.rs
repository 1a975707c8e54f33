//! Canonical forms of list assignments.
//!
//! The canonical form of an assignment is the lexicographically least pair
//! `(sorted B-lists, sorted A-lists)` over all colour relabellings; sorting
//! each side absorbs the vertex permutations. It is computed by a greedy
//! search: at every step the next output list is the least *provisional*
//! image among the remaining lists. Labelled colours are kept in cells of
//! interchangeable colours (an ordered partition of the label range), so a
//! list takes the lowest labels of every cell it meets and colours not yet
//! labelled take the next free labels. Emitting a list splits the cells it
//! meets. Only ties between lists branch; branches whose prefix already
//! exceeds the best sequence found so far are cut.

use std::cmp::Ordering;

use crate::lists::{Colour, ListAssignment};

const UNSET: Colour = Colour::MAX;

/// Least representative of the assignment's orbit under colour relabelling
/// and vertex permutations of either part. The result is normalized.
pub fn canonicalize_assignment(assignment: &ListAssignment) -> ListAssignment {
    let norm = assignment.normalized();
    let (b, a) = canonical_lists(norm.palette_size(), norm.lists_b(), norm.lists_a());
    ListAssignment::new(norm.palette_size(), norm.k_a(), norm.k_b(), a, b)
        .expect("relabelling preserves validity")
}

/// Canonical form of two list families over `0..palette`, the first family
/// taking precedence in the comparison. Returns `(first, second)` relabelled
/// and sorted.
pub fn canonical_lists(
    palette: usize,
    first: &[Vec<Colour>],
    second: &[Vec<Colour>],
) -> (Vec<Vec<Colour>>, Vec<Vec<Colour>>) {
    let lists: Vec<&[Colour]> = first.iter().chain(second).map(|l| l.as_slice()).collect();
    let mut search = Search {
        lists: &lists,
        split: first.len(),
        best: None,
        stop_below: false,
        improved: false,
    };
    search.run(&State::new(palette, lists.len()));
    let mut best = search.best.expect("search always completes one branch");
    let second_out = best.split_off(first.len());
    (best, second_out)
}

/// True if `first` and `second` (each sorted, colours `0..palette`) are
/// already their own canonical form. Stops at the first smaller image.
pub(crate) fn is_canonical_pair(palette: usize, first: &[Vec<Colour>], second: &[Vec<Colour>]) -> bool {
    let lists: Vec<&[Colour]> = first.iter().chain(second).map(|l| l.as_slice()).collect();
    let mut search = Search {
        lists: &lists,
        split: first.len(),
        best: Some(first.iter().chain(second).cloned().collect()),
        stop_below: true,
        improved: false,
    };
    search.run(&State::new(palette, lists.len()));
    !search.improved
}

struct Search<'a> {
    lists: &'a [&'a [Colour]],
    split: usize,
    best: Option<Vec<Vec<Colour>>>,
    stop_below: bool,
    improved: bool,
}

/// A block of colours sharing the label range `start..start + size`. Its
/// members are interchangeable with respect to every list emitted so far,
/// so their order inside the range is left open.
#[derive(Clone, Copy)]
struct Cell {
    start: Colour,
    size: Colour,
}

#[derive(Clone)]
struct State {
    cell_of: Vec<u32>,
    cells: Vec<Cell>,
    next: Colour,
    used: Vec<bool>,
    image: Vec<Vec<Colour>>,
}

impl State {
    fn new(palette: usize, lists: usize) -> Self {
        Self {
            cell_of: vec![UNSET; palette],
            cells: Vec::new(),
            next: 0,
            used: vec![false; lists],
            image: Vec::with_capacity(lists),
        }
    }

    /// Hits per cell among the colours of `list`, plus the number of
    /// colours not labelled yet.
    fn hits(&self, list: &[Colour]) -> (Vec<(u32, Colour)>, Colour) {
        let mut per_cell: Vec<(u32, Colour)> = Vec::new();
        let mut fresh = 0;
        for &c in list {
            let id = self.cell_of[c as usize];
            if id == UNSET {
                fresh += 1;
            } else if let Some(e) = per_cell.iter_mut().find(|e| e.0 == id) {
                e.1 += 1;
            } else {
                per_cell.push((id, 1));
            }
        }
        (per_cell, fresh)
    }

    /// Least image of `list`: inside each cell the list takes the lowest
    /// labels, fresh colours take the next free ones.
    fn provisional(&self, list: &[Colour]) -> Vec<Colour> {
        let (per_cell, fresh) = self.hits(list);
        let mut out = Vec::with_capacity(list.len());
        for (id, j) in per_cell {
            let start = self.cells[id as usize].start;
            out.extend(start..start + j);
        }
        out.extend(self.next..self.next + fresh);
        out.sort_unstable();
        out
    }

    /// Fixes the labelling of `list` to its least image by splitting the
    /// cells it meets and opening a cell for its fresh colours.
    fn commit(&mut self, list: &[Colour]) {
        let (per_cell, fresh) = self.hits(list);
        for (id, j) in per_cell {
            let cell = self.cells[id as usize];
            if j == cell.size {
                continue;
            }
            let rest = self.cells.len() as u32;
            self.cells[id as usize].size = j;
            self.cells.push(Cell {
                start: cell.start + j,
                size: cell.size - j,
            });
            for c in 0..self.cell_of.len() {
                if self.cell_of[c] == id && list.binary_search(&(c as Colour)).is_err() {
                    self.cell_of[c] = rest;
                }
            }
        }
        if fresh > 0 {
            let id = self.cells.len() as u32;
            self.cells.push(Cell {
                start: self.next,
                size: fresh,
            });
            for &c in list {
                if self.cell_of[c as usize] == UNSET {
                    self.cell_of[c as usize] = id;
                }
            }
            self.next += fresh;
        }
    }
}

impl Search<'_> {
    /// Ordering of `image ++ [next]` against the same-length prefix of the
    /// best sequence.
    fn against_best(&self, image: &[Vec<Colour>], next: &[Colour]) -> Ordering {
        let Some(best) = &self.best else {
            return Ordering::Less;
        };
        image
            .iter()
            .map(Vec::as_slice)
            .chain(std::iter::once(next))
            .cmp(best[..=image.len()].iter().map(Vec::as_slice))
    }

    fn run(&mut self, state: &State) {
        if self.improved && self.stop_below {
            return;
        }
        let pos = state.image.len();
        if pos == self.lists.len() {
            if self.best.as_ref().is_none_or(|b| state.image < *b) {
                self.improved = true;
                self.best = Some(state.image.clone());
            }
            return;
        }
        let range = if pos < self.split {
            0..self.split
        } else {
            self.split..self.lists.len()
        };
        let mut min: Option<Vec<Colour>> = None;
        let mut candidates = Vec::new();
        for idx in range {
            if state.used[idx] {
                continue;
            }
            let img = state.provisional(self.lists[idx]);
            match min.as_ref().map(|m| img.cmp(m)) {
                None | Some(Ordering::Less) => {
                    min = Some(img);
                    candidates.clear();
                    candidates.push(idx);
                }
                Some(Ordering::Equal) => candidates.push(idx),
                Some(Ordering::Greater) => {}
            }
        }
        let min = min.expect("a list remains in the current phase");
        let mut seen: Vec<&[Colour]> = Vec::new();
        for idx in candidates {
            if self.against_best(&state.image, &min) == Ordering::Greater {
                return;
            }
            // identical lists lead to identical subtrees
            if seen.contains(&self.lists[idx]) {
                continue;
            }
            seen.push(self.lists[idx]);
            let mut child = state.clone();
            child.commit(self.lists[idx]);
            child.used[idx] = true;
            child.image.push(min.clone());
            self.run(&child);
        }
    }
}

/// Calls `f` with every permutation of `0..n` (Heap's algorithm).
#[cfg(test)]
pub(crate) fn for_each_permutation(n: usize, f: &mut dyn FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(la: &ListAssignment) -> ListAssignment {
        let la = la.normalized();
        let m = la.palette_size();
        let mut best: Option<(Vec<Vec<Colour>>, Vec<Vec<Colour>>)> = None;
        for_each_permutation(m, &mut |perm| {
            let perm: Vec<Colour> = perm.iter().map(|&p| p as Colour).collect();
            let p = la.permuted(&perm, &(0..la.a_len()).collect::<Vec<_>>(), &(0..la.b_len()).collect::<Vec<_>>());
            let mut b = p.lists_b().to_vec();
            let mut a = p.lists_a().to_vec();
            b.sort();
            a.sort();
            let cand = (b, a);
            if best.as_ref().is_none_or(|bst| cand < *bst) {
                best = Some(cand);
            }
        });
        let (b, a) = best.unwrap();
        ListAssignment::new(m, la.k_a(), la.k_b(), a, b).unwrap()
    }

    #[test]
    fn relabels_by_first_appearance() {
        let la = ListAssignment::new(4, 2, 2, vec![vec![0, 2]], vec![vec![2, 3], vec![0, 1]]).unwrap();
        let c = canonicalize_assignment(&la);
        assert_eq!(c.lists_b(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(c.lists_a(), &[vec![0, 2]]);
        assert_eq!(canonicalize_assignment(&c), c);
    }

    #[test]
    fn permutation_count() {
        let mut n = 0;
        for_each_permutation(4, &mut |_| n += 1);
        assert_eq!(n, 24);
        let mut n0 = 0;
        for_each_permutation(0, &mut |p| {
            assert!(p.is_empty());
            n0 += 1
        });
        assert_eq!(n0, 1);
    }

    #[test]
    fn agrees_with_brute_force_on_small_cases() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let palette = rng.gen_range(2..=6);
            let k_a = rng.gen_range(1..=palette.min(3));
            let k_b = rng.gen_range(1..=palette.min(3));
            let na = rng.gen_range(0..=4);
            let nb = rng.gen_range(1..=4);
            let draw = |rng: &mut rand_chacha::ChaCha8Rng, k: usize| {
                let mut all: Vec<Colour> = (0..palette as Colour).collect();
                for i in 0..k {
                    let j = rng.gen_range(i..all.len());
                    all.swap(i, j);
                }
                all.truncate(k);
                all
            };
            let la_lists: Vec<_> = (0..na).map(|_| draw(&mut rng, k_a)).collect();
            let lb_lists: Vec<_> = (0..nb).map(|_| draw(&mut rng, k_b)).collect();
            let la = ListAssignment::normalized_from(k_a, k_b, la_lists, lb_lists).unwrap();
            assert_eq!(canonicalize_assignment(&la), brute_force(&la), "{la:?}");
            let mut b = la.lists_b().to_vec();
            let mut a = la.lists_a().to_vec();
            b.sort();
            a.sort();
            let (cb, ca) = canonical_lists(la.palette_size(), &b, &a);
            assert_eq!(is_canonical_pair(la.palette_size(), &b, &a), cb == b && ca == a);
            assert!(is_canonical_pair(la.palette_size(), &cb, &ca));
        }
    }
}
