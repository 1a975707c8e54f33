//! Least families of `k_a`-sets such that every given transversal contains
//! one of them.

use std::collections::HashMap;

use crate::bitset::{k_subsets_of, lex_key, BitSet};
use crate::budget::Budget;

use super::{Hypergraph, SearchError};

/// An optimal cover: `family` has `count` members, each a `k_a`-set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverResult {
    pub count: usize,
    pub family: Vec<u64>,
    pub nodes: u64,
}

/// Outcome of a cover search bounded by `limit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverOutcome {
    /// The optimum, which is at most the limit.
    Optimal(CoverResult),
    /// Every cover is larger than the limit.
    AboveLimit,
    /// Some transversal has fewer than `k_a` elements.
    Infeasible { size: usize },
    /// The budget ran out; `lower` is a proven bound, `upper` the best cover found.
    Capped { lower: usize, upper: Option<CoverResult> },
}

/// Exact cover number of the transversals by `k_a`-subsets of the palette.
pub fn transversal_cover_number(transversals: &Hypergraph, k_a: usize) -> Result<CoverResult, SearchError> {
    let masks = transversals
        .masks()
        .ok_or_else(|| SearchError::Invalid("cover search supports at most 64 colours".into()))?;
    match cover(&masks, k_a, None, &Budget::unlimited()) {
        CoverOutcome::Optimal(r) => Ok(r),
        CoverOutcome::Infeasible { size } => Err(SearchError::Infeasible { size, k_a }),
        CoverOutcome::AboveLimit | CoverOutcome::Capped { .. } => unreachable!("unbounded search completes"),
    }
}

struct Instance {
    k_a: usize,
    n: usize,
    sets: Vec<u64>,
    // candidates inside each transversal, best first
    options: Vec<Vec<usize>>,
    // transversals covered by each candidate
    covers: Vec<BitSet>,
    candidates: Vec<u64>,
}

/// Branch and bound. The node picks an uncovered transversal with the
/// fewest admissible candidates and branches over them; candidates tried in
/// earlier siblings are excluded afterwards. The bound is a greedy packing
/// of uncovered transversals that pairwise share fewer than `k_a` colours.
pub fn cover(transversals: &[u64], k_a: usize, limit: Option<usize>, budget: &Budget) -> CoverOutcome {
    if let Some(&small) = transversals.iter().find(|t| (t.count_ones() as usize) < k_a) {
        return CoverOutcome::Infeasible {
            size: small.count_ones() as usize,
        };
    }
    let inst = Instance::new(transversals, k_a);
    let all = BitSet::full(inst.n);
    let root_lower = inst.packing_bound(&all);
    let greedy = inst.greedy();
    let mut best_count = greedy.len();
    let mut best: Option<Vec<usize>> = Some(greedy);
    if let Some(l) = limit {
        if root_lower > l {
            return CoverOutcome::AboveLimit;
        }
        if best_count > l {
            best_count = l + 1;
            best = None;
        }
    }
    let mut search = Run {
        inst: &inst,
        budget,
        best_count,
        best,
        excluded: vec![false; inst.candidates.len()],
        chosen: Vec::new(),
        capped: false,
        nodes: 0,
    };
    if root_lower < search.best_count {
        search.node(all);
    }
    let nodes = search.nodes;
    let result = search.best.map(|idx| {
        let mut family: Vec<u64> = idx.iter().map(|&i| inst.candidates[i]).collect();
        family.sort_by_key(|&m| lex_key(m));
        CoverResult {
            count: family.len(),
            family,
            nodes,
        }
    });
    if search.capped {
        return CoverOutcome::Capped {
            lower: root_lower,
            upper: result,
        };
    }
    match result {
        Some(r) => CoverOutcome::Optimal(r),
        None => CoverOutcome::AboveLimit,
    }
}

impl Instance {
    fn new(transversals: &[u64], k_a: usize) -> Self {
        let n = transversals.len();
        let mut index: HashMap<u64, usize> = HashMap::new();
        let mut candidates = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (t, &set) in transversals.iter().enumerate() {
            for s in k_subsets_of(set, k_a) {
                let i = *index.entry(s).or_insert_with(|| {
                    candidates.push(s);
                    members.push(Vec::new());
                    candidates.len() - 1
                });
                members[i].push(t);
            }
        }
        let covers: Vec<BitSet> = members.iter().map(|m| BitSet::from_indices(n, m.iter().copied())).collect();
        let options = transversals
            .iter()
            .map(|&set| {
                let mut opts: Vec<usize> = k_subsets_of(set, k_a).into_iter().map(|s| index[&s]).collect();
                opts.sort_by_key(|&i| (std::cmp::Reverse(covers[i].len()), lex_key(candidates[i])));
                opts
            })
            .collect();
        Self {
            k_a,
            n,
            sets: transversals.to_vec(),
            options,
            covers,
            candidates,
        }
    }

    fn packing_bound(&self, uncovered: &BitSet) -> usize {
        let mut packed: Vec<u64> = Vec::new();
        let mut order: Vec<usize> = uncovered.iter().collect();
        order.sort_by_key(|&t| (self.sets[t].count_ones(), t));
        for t in order {
            let s = self.sets[t];
            if packed.iter().all(|&p| ((p & s).count_ones() as usize) < self.k_a) {
                packed.push(s);
            }
        }
        packed.len()
    }

    fn greedy(&self) -> Vec<usize> {
        let mut uncovered = BitSet::full(self.n);
        let mut chosen = Vec::new();
        while let Some(t) = uncovered.first() {
            // best candidate among those able to cover the first uncovered set
            let pick = *self.options[t]
                .iter()
                .max_by_key(|&&i| {
                    let mut c = self.covers[i].clone();
                    c.intersect_with(&uncovered);
                    (c.len(), std::cmp::Reverse(lex_key(self.candidates[i])))
                })
                .expect("every transversal has a k_a-subset");
            uncovered.difference_with(&self.covers[pick]);
            chosen.push(pick);
        }
        chosen
    }
}

struct Run<'a> {
    inst: &'a Instance,
    budget: &'a Budget,
    best_count: usize,
    best: Option<Vec<usize>>,
    excluded: Vec<bool>,
    chosen: Vec<usize>,
    capped: bool,
    nodes: u64,
}

impl Run<'_> {
    fn node(&mut self, uncovered: BitSet) {
        if self.capped {
            return;
        }
        self.nodes += 1;
        if !self.budget.charge(1) {
            self.capped = true;
            return;
        }
        if uncovered.is_empty() {
            if self.chosen.len() < self.best_count {
                self.best_count = self.chosen.len();
                self.best = Some(self.chosen.clone());
            }
            return;
        }
        if self.chosen.len() + self.inst.packing_bound(&uncovered) >= self.best_count {
            return;
        }
        let mut pick: Option<(usize, usize)> = None;
        for t in uncovered.iter() {
            let open = self.inst.options[t].iter().filter(|&&i| !self.excluded[i]).count();
            if open == 0 {
                return;
            }
            if pick.is_none_or(|(n, _)| open < n) {
                pick = Some((open, t));
            }
        }
        let (_, t) = pick.expect("uncovered is non-empty");
        let opts: Vec<usize> = self.inst.options[t].iter().copied().filter(|&i| !self.excluded[i]).collect();
        for &i in &opts {
            let mut rest = uncovered.clone();
            rest.difference_with(&self.inst.covers[i]);
            self.chosen.push(i);
            self.node(rest);
            self.chosen.pop();
            self.excluded[i] = true;
            if self.capped {
                break;
            }
        }
        for &i in &opts {
            self.excluded[i] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::{k_subsets, mask_of};

    fn brute(sets: &[u64], k_a: usize, palette: usize) -> usize {
        let cands = k_subsets(palette, k_a);
        for size in 0..=sets.len() {
            let mut idx: Vec<usize> = (0..size).collect();
            loop {
                if sets.iter().all(|&t| idx.iter().any(|&i| cands[i] & !t == 0)) {
                    return size;
                }
                let mut i = size;
                let mut advanced = false;
                while i > 0 {
                    i -= 1;
                    if idx[i] < cands.len() - size + i {
                        idx[i] += 1;
                        for j in i + 1..size {
                            idx[j] = idx[j - 1] + 1;
                        }
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    break;
                }
            }
        }
        sets.len()
    }

    #[test]
    fn four_pairs_need_four() {
        let t = [mask_of([0, 2]), mask_of([0, 3]), mask_of([1, 2]), mask_of([1, 3])];
        match cover(&t, 2, None, &Budget::unlimited()) {
            CoverOutcome::Optimal(r) => assert_eq!(r.count, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_triple_needs_one() {
        let h = Hypergraph::from_masks(3, &[0b111]).unwrap();
        assert_eq!(transversal_cover_number(&h, 2).unwrap().count, 1);
    }

    #[test]
    fn small_transversal_is_infeasible() {
        assert_eq!(
            cover(&[0b11, 0b11100], 3, None, &Budget::unlimited()),
            CoverOutcome::Infeasible { size: 2 }
        );
    }

    #[test]
    fn limit_and_cap() {
        let t = [mask_of([0, 2]), mask_of([0, 3]), mask_of([1, 2]), mask_of([1, 3])];
        assert_eq!(cover(&t, 2, Some(3), &Budget::unlimited()), CoverOutcome::AboveLimit);
        let tight = Budget::new(Some(0), None);
        let many: Vec<u64> = k_subsets(8, 4);
        assert!(matches!(cover(&many, 2, None, &tight), CoverOutcome::Capped { .. }));
    }

    #[test]
    fn agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..150 {
            let palette = rng.gen_range(3..=6);
            let k_a = rng.gen_range(1..=2);
            let n = rng.gen_range(1..=8);
            let mut sets: Vec<u64> = (0..n)
                .map(|_| loop {
                    let s = rng.gen_range(1u64..1 << palette);
                    if s.count_ones() as usize >= k_a {
                        break s;
                    }
                })
                .collect();
            sets.sort_unstable();
            sets.dedup();
            let got = match cover(&sets, k_a, None, &Budget::unlimited()) {
                CoverOutcome::Optimal(r) => {
                    assert!(sets.iter().all(|&t| r.family.iter().any(|&s| s & !t == 0)));
                    r.count
                }
                other => panic!("{other:?}"),
            };
            assert_eq!(got, brute(&sets, k_a, palette), "{sets:?} k_a={k_a}");
        }
    }
}
