//! Property A and the extremal parameter `M̄(k1, k2, ℓ)`.
//!
//! A family of `k2`-subsets of `[ℓ]` has Property A(k1, k2, ℓ) when some
//! `k1`-subset meets every block. `M̄(k1, k2, ℓ)` is the size of a smallest
//! family without it. A `k1`-set misses a block exactly when it lies inside
//! the block's complement, so `M̄` is the least number of `(ℓ - k2)`-sets
//! covering every `k1`-subset; [`mbar_exact`] searches in that form.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::{k_subsets, lex_key, mask_elems, mask_of};
use crate::budget::Budget;
use crate::error::CoreError;
use crate::search::SearchError;

/// A `block_size`-uniform family of distinct subsets of `0..ground_size`,
/// blocks kept in lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    ground_size: usize,
    block_size: usize,
    blocks: Vec<u64>,
}

impl SetFamily {
    /// Validates uniformity and range; sorts the blocks and drops repeats.
    pub fn new(ground_size: usize, block_size: usize, blocks: Vec<u64>) -> Result<Self, CoreError> {
        if ground_size > 64 {
            return Err(CoreError::Inconsistent("ground sets above 64 elements are not supported".into()));
        }
        for (i, &b) in blocks.iter().enumerate() {
            if b.count_ones() as usize != block_size {
                return Err(CoreError::Inconsistent(format!(
                    "block {i} has {} elements, expected {block_size}",
                    b.count_ones()
                )));
            }
            if ground_size < 64 && b >> ground_size != 0 {
                return Err(CoreError::Inconsistent(format!("block {i} leaves the ground set 0..{ground_size}")));
            }
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|&b| lex_key(b));
        blocks.dedup();
        Ok(Self {
            ground_size,
            block_size,
            blocks,
        })
    }

    pub fn from_lists(ground_size: usize, block_size: usize, lists: &[Vec<usize>]) -> Result<Self, CoreError> {
        if let Some(&x) = lists.iter().flatten().find(|&&x| x >= ground_size.min(64)) {
            return Err(CoreError::Inconsistent(format!("element {x} outside 0..{ground_size}")));
        }
        let blocks = lists.iter().map(|l| mask_of(l.iter().copied())).collect();
        Self::new(ground_size, block_size, blocks)
    }

    /// All `block_size`-subsets of the ground set.
    pub fn complete(ground_size: usize, block_size: usize) -> Self {
        Self::new(ground_size, block_size, k_subsets(ground_size, block_size)).expect("subsets are uniform")
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn lists(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|&b| mask_elems(b).collect()).collect()
    }

    /// Text form: a header `l k2 m`, then one line of sorted elements per block.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.ground_size, self.block_size, self.blocks.len());
        for l in self.lists() {
            let row: Vec<String> = l.iter().map(usize::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CoreError> {
        let malformed = |line: usize, message: String| CoreError::Malformed {
            line,
            column: 1,
            message,
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| malformed(1, "missing header".into()))?;
        let nums = |i: usize, s: &str| -> Result<Vec<usize>, CoreError> {
            s.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| malformed(i + 1, format!("{t:?}: {e}"))))
                .collect()
        };
        let head = nums(0, header)?;
        let [l, k2, m] = head[..] else {
            return Err(malformed(1, "header must be `l k2 m`".into()));
        };
        let mut lists = Vec::with_capacity(m);
        for (i, line) in lines {
            let row = nums(i, line)?;
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(malformed(i + 1, "block elements must be strictly ascending".into()));
            }
            lists.push(row);
        }
        if lists.len() != m {
            return Err(CoreError::Inconsistent(format!("header announces {m} blocks, found {}", lists.len())));
        }
        let family = Self::from_lists(l, k2, &lists)?;
        if family.len() != m {
            return Err(CoreError::Inconsistent("repeated blocks".into()));
        }
        Ok(family)
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily({}, {}, {:?})", self.ground_size, self.block_size, self.lists())
    }
}

/// A `k1`-subset meeting every block, or `None` if there is none.
pub fn has_property_a(family: &SetFamily, k1: usize) -> Option<u64> {
    assert!(k1 <= family.ground_size, "k1 exceeds the ground set");
    let mut excluded = 0u64;
    let found = hitting_set(family.blocks(), 0, k1, &mut excluded)?;
    // pad with the smallest unused elements
    let mut set = found;
    for x in 0..family.ground_size {
        if set.count_ones() as usize == k1 {
            break;
        }
        set |= 1 << x;
    }
    Some(set)
}

fn hitting_set(blocks: &[u64], set: u64, k1: usize, excluded: &mut u64) -> Option<u64> {
    let Some(&miss) = blocks.iter().find(|&&b| b & set == 0) else {
        return Some(set);
    };
    if set.count_ones() as usize == k1 {
        return None;
    }
    let saved = *excluded;
    let mut result = None;
    for x in mask_elems(miss & !*excluded) {
        if let Some(s) = hitting_set(blocks, set | 1 << x, k1, excluded) {
            result = Some(s);
            break;
        }
        // any hitting set through x was found in that branch
        *excluded |= 1 << x;
    }
    *excluded = saved;
    result
}

/// The appendix sandwich for `M̄(k1, k2, ℓ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MbarBounds {
    pub k1: usize,
    pub k2: usize,
    pub l: usize,
    /// `ℓ!(ℓ-k1-k2)! / ((ℓ-k2)!(ℓ-k1)!)`, exact.
    pub lower: BigRational,
    /// The lower bound rounded up to an integer.
    pub lower_ceil: BigUint,
    /// `lower · ln C(ℓ, k1)` rounded outward; `M̄` is strictly below it.
    pub upper: f64,
    pub exact: Option<u64>,
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * i)
}

fn binomial_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub fn mbar_bounds(k1: usize, k2: usize, l: usize) -> Result<MbarBounds, SearchError> {
    if l < k1 + k2 || k1 == 0 || k2 == 0 {
        return Err(SearchError::Invalid(format!("need 1 <= k1, k2 and l >= k1 + k2, got ({k1}, {k2}, {l})")));
    }
    let num = BigInt::from(factorial(l) * factorial(l - k1 - k2));
    let den = BigInt::from(factorial(l - k2) * factorial(l - k1));
    let lower = BigRational::new(num, den);
    let (q, r) = lower.numer().div_rem(lower.denom());
    let lower_ceil = if r.is_zero() { q } else { q + 1 }
        .to_biguint()
        .expect("positive bound");
    let ln = binomial_big(l, k1).to_f64().expect("finite").ln();
    let upper = (lower.to_f64().expect("finite") * ln).next_up().next_up();
    Ok(MbarBounds {
        k1,
        k2,
        l,
        lower,
        lower_ceil,
        upper,
        exact: None,
    })
}

/// A smallest family without Property A, with the search effort spent.
#[derive(Clone, Debug)]
pub struct MbarExact {
    pub value: usize,
    pub family: SetFamily,
    pub nodes: u64,
}

/// Exact `M̄(k1, k2, ℓ)` by iterative deepening from the appendix lower
/// bound. Every size below the returned value is refuted exhaustively.
/// On budget exhaustion the error carries the proven bracket.
pub fn mbar_exact(k1: usize, k2: usize, l: usize, budget: &Budget) -> Result<MbarExact, SearchError> {
    let bounds = mbar_bounds(k1, k2, l)?;
    let cover = CoverSpace::new(k1, l - k2, l)?;
    let mut target = bounds.lower_ceil.to_usize().expect("small bound").max(1);
    let upper = cover.greedy();
    let mut nodes = 0u64;
    loop {
        if target >= upper.len() {
            // the greedy cover is optimal
            return Ok(MbarExact {
                value: upper.len(),
                family: cover.to_family(k2, &upper),
                nodes,
            });
        }
        let mut run = CoverRun {
            space: &cover,
            budget,
            nodes: 0,
            capped: false,
            chosen: vec![cover.first_block()],
            excluded: vec![false; cover.blocks.len()],
        };
        let start = cover.full & !cover.block_cover[cover.first_block()];
        let found = run.dfs(start, target);
        nodes += run.nodes;
        if run.capped {
            return Err(SearchError::Timeout {
                lower: target,
                upper: Some(upper.len()),
                nodes,
            });
        }
        if found {
            return Ok(MbarExact {
                value: target,
                family: cover.to_family(k2, &run.chosen),
                nodes,
            });
        }
        target += 1;
    }
}

/// `k1`-subsets of `[ℓ]` indexed as bits of a `u128`, and the candidate
/// covering blocks (complements of `k2`-sets) with the bits they cover.
struct CoverSpace {
    l: usize,
    blocks: Vec<u64>,
    block_cover: Vec<u128>,
    // for each k1-set, the blocks containing it
    containing: Vec<Vec<usize>>,
    per_block: u32,
    full: u128,
}

impl CoverSpace {
    fn new(t: usize, size: usize, l: usize) -> Result<Self, SearchError> {
        let targets = k_subsets(l, t);
        if targets.len() > 128 {
            return Err(SearchError::Invalid(format!(
                "C({l},{t}) = {} subsets exceed the 128 supported by the exact search",
                targets.len()
            )));
        }
        let blocks = k_subsets(l, size);
        let block_cover: Vec<u128> = blocks
            .iter()
            .map(|&b| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s & !b == 0)
                    .fold(0u128, |acc, (i, _)| acc | 1 << i)
            })
            .collect();
        let containing = (0..targets.len())
            .map(|i| (0..blocks.len()).filter(|&j| block_cover[j] >> i & 1 == 1).collect())
            .collect();
        let full = if targets.len() == 128 {
            u128::MAX
        } else {
            (1u128 << targets.len()) - 1
        };
        Ok(Self {
            l,
            per_block: block_cover.first().map_or(0, |c| c.count_ones()),
            blocks,
            block_cover,
            containing,
            full,
        })
    }

    /// Index of `{0, .., size-1}`; any cover may be relabelled to use it.
    fn first_block(&self) -> usize {
        0
    }

    fn greedy(&self) -> Vec<usize> {
        let mut left = self.full;
        let mut chosen = vec![self.first_block()];
        left &= !self.block_cover[self.first_block()];
        while left != 0 {
            let pick = (0..self.blocks.len())
                .max_by_key(|&j| ((self.block_cover[j] & left).count_ones(), std::cmp::Reverse(j)))
                .expect("blocks exist");
            chosen.push(pick);
            left &= !self.block_cover[pick];
        }
        chosen
    }

    fn to_family(&self, k2: usize, chosen: &[usize]) -> SetFamily {
        let all = if self.l == 64 { u64::MAX } else { (1u64 << self.l) - 1 };
        SetFamily::new(self.l, k2, chosen.iter().map(|&j| all & !self.blocks[j]).collect())
            .expect("complements are uniform")
    }
}

struct CoverRun<'a> {
    space: &'a CoverSpace,
    budget: &'a Budget,
    nodes: u64,
    capped: bool,
    chosen: Vec<usize>,
    excluded: Vec<bool>,
}

impl CoverRun<'_> {
    fn dfs(&mut self, left: u128, target: usize) -> bool {
        if left == 0 {
            return true;
        }
        self.nodes += 1;
        if !self.budget.charge(1) {
            self.capped = true;
            return false;
        }
        let remaining = target - self.chosen.len();
        if remaining == 0 || (left.count_ones()).div_ceil(self.space.per_block) as usize > remaining {
            return false;
        }
        // the uncovered k1-set with the fewest usable blocks
        let mut pick: Option<(usize, usize)> = None;
        let mut bits = left;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let open = self.space.containing[i].iter().filter(|&&j| !self.excluded[j]).count();
            if open == 0 {
                return false;
            }
            if pick.is_none_or(|(n, _)| open < n) {
                pick = Some((open, i));
            }
        }
        let (_, i) = pick.expect("left is non-empty");
        let mut options: Vec<usize> = self.space.containing[i].iter().copied().filter(|&j| !self.excluded[j]).collect();
        options.sort_by_key(|&j| (std::cmp::Reverse((self.space.block_cover[j] & left).count_ones()), j));
        let mut found = false;
        for &j in &options {
            self.chosen.push(j);
            if self.dfs(left & !self.space.block_cover[j], target) {
                found = true;
                break;
            }
            self.chosen.pop();
            self.excluded[j] = true;
            if self.capped {
                break;
            }
        }
        for &j in &options {
            self.excluded[j] = false;
        }
        found
    }
}

/// A random family of `⌈upper⌉` blocks without Property A. Families that
/// still have it are redrawn from the same generator.
pub fn random_family_upper(k1: usize, k2: usize, l: usize, seed: u64, retries: usize) -> Result<SetFamily, SearchError> {
    let bounds = mbar_bounds(k1, k2, l)?;
    if l > 64 {
        return Err(SearchError::Invalid("ground sets above 64 elements are not supported".into()));
    }
    let m = bounds.upper.ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..retries.max(1) {
        let blocks: Vec<u64> = (0..m).map(|_| mask_of(sample(&mut rng, l, k2))).collect();
        let family = SetFamily::new(l, k2, blocks).expect("samples are uniform");
        if has_property_a(&family, k1).is_none() {
            return Ok(family);
        }
    }
    Err(SearchError::RetryExhausted { attempts: retries.max(1) })
}
