//! Fixed-width bit rows.
//!
//! A [`BitSet`] has a width fixed at construction and stores `ceil(width/64)`
//! words, so rows wider than 64 columns are handled the same way as narrow
//! ones. The hot search kernels in [`crate::search`] and [`crate::steiner`]
//! work on bare `u64` masks instead; see [`mask_of`] for the bridge.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSet {
    width: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            words: vec![0; width.div_ceil(64)],
        }
    }

    pub fn full(width: usize) -> Self {
        let mut s = Self::new(width);
        for i in 0..width {
            s.insert(i);
        }
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, items: I) -> Self {
        let mut s = Self::new(width);
        for i in items {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.width {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.width && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter().chain(std::iter::repeat(&0)))
            .all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + tz)
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Single-word mask of a small index set. Panics on indices `>= 64`.
pub fn mask_of<I: IntoIterator<Item = usize>>(items: I) -> u64 {
    items.into_iter().fold(0u64, |m, i| {
        assert!(i < 64, "index {i} does not fit a single-word mask");
        m | 1u64 << i
    })
}

/// Indices of the set bits of `mask`, ascending.
pub fn mask_elems(mask: u64) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let tz = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(tz)
    })
}

/// Lexicographic order on sorted element tuples of two equal-size masks:
/// `a` precedes `b` iff the smallest element of the symmetric difference
/// belongs to `a`.
#[inline]
pub fn lex_less(a: u64, b: u64) -> bool {
    let d = a ^ b;
    d != 0 && a & d & d.wrapping_neg() != 0
}

/// Ascending sort key implementing [`lex_less`] on masks of one size.
#[inline]
pub fn lex_key(mask: u64) -> u64 {
    !mask.reverse_bits()
}

/// All `k`-subsets of `0..n` as masks, in lexicographic tuple order.
pub fn k_subsets(n: usize, k: usize) -> Vec<u64> {
    assert!(n <= 64);
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(mask_of(idx.iter().copied()));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All `k`-subsets of the set bits of `universe`, in lexicographic order.
pub fn k_subsets_of(universe: u64, k: usize) -> Vec<u64> {
    let elems: Vec<usize> = mask_elems(universe).collect();
    k_subsets(elems.len(), k)
        .into_iter()
        .map(|m| mask_of(mask_elems(m).map(|i| elems[i])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiword_rows() {
        let mut s = BitSet::new(130);
        s.insert(0);
        s.insert(64);
        s.insert(129);
        assert_eq!(s.len(), 3);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert!(s.contains(129));
        assert!(!s.contains(128));
        let t = BitSet::from_indices(130, [64, 100]);
        assert!(s.intersects(&t));
        assert!(!t.is_subset(&s));
        s.remove(64);
        assert!(!s.intersects(&t));
    }

    #[test]
    fn subsets_in_lex_order() {
        let subs = k_subsets(4, 2);
        let tuples: Vec<Vec<usize>> = subs.iter().map(|&m| mask_elems(m).collect()).collect();
        assert_eq!(
            tuples,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        for w in subs.windows(2) {
            assert!(lex_less(w[0], w[1]));
            assert!(lex_key(w[0]) < lex_key(w[1]));
        }
        assert_eq!(k_subsets(3, 0), vec![0]);
        assert!(k_subsets(2, 3).is_empty());
    }

    #[test]
    fn lex_key_matches_lex_less() {
        let subs = k_subsets(6, 3);
        for &a in &subs {
            for &b in &subs {
                assert_eq!(lex_less(a, b), lex_key(a) < lex_key(b));
            }
        }
    }
}
