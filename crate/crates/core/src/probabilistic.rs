//! Resampling samplers that turn the local-lemma and random-partition
//! arguments into witnesses, and an exact checker for the negative
//! correlation of the coupon events.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::CoreError;
use crate::graph::BipartiteGraph;
use crate::lists::{Colour, ListAssignment, ProperColouring};
use crate::search::Hypergraph;

/// Identifier of the generator behind every sampler.
pub const RNG_ID: &str = "ChaCha8";

/// Default number of resamples before a sampler gives up.
pub const DEFAULT_BUDGET: u64 = 100_000;

/// Cap on the outcomes enumerated by [`check_negative_correlation`].
pub const ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProbError {
    #[error("budget of {budget} resamples exhausted (seed {seed})")]
    BudgetExhausted { budget: u64, seed: u64 },
    #[error("{outcomes} outcomes exceed the enumeration cap of {cap}")]
    TooLarge { outcomes: u128, cap: u64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// A hypergraph whose vertices are split into parts of equal size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedHypergraph {
    hypergraph: Hypergraph,
    parts: Vec<Vec<usize>>,
    part_of: Vec<usize>,
}

impl PartitionedHypergraph {
    pub fn new(hypergraph: Hypergraph, parts: Vec<Vec<usize>>) -> Result<Self, ProbError> {
        let n = hypergraph.vertex_count();
        let mut part_of = vec![usize::MAX; n];
        let size = parts.first().map_or(0, Vec::len);
        for (i, part) in parts.iter().enumerate() {
            if part.len() != size || size == 0 {
                return Err(ProbError::Invalid("parts must be non-empty and of equal size".into()));
            }
            for &x in part {
                if x >= n || part_of[x] != usize::MAX {
                    return Err(ProbError::Invalid(format!("vertex {x} is out of range or in two parts")));
                }
                part_of[x] = i;
            }
        }
        if part_of.contains(&usize::MAX) {
            return Err(ProbError::Invalid("parts do not cover every vertex".into()));
        }
        Ok(Self {
            hypergraph,
            parts,
            part_of,
        })
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.hypergraph
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part_size(&self) -> usize {
        self.parts.first().map_or(0, Vec::len)
    }

    /// Largest sum of vertex degrees over one part.
    pub fn max_part_degree_sum(&self) -> usize {
        let mut sums = vec![0usize; self.parts.len()];
        for e in self.hypergraph.edges() {
            for x in e.iter() {
                sums[self.part_of[x]] += 1;
            }
        }
        sums.into_iter().max().unwrap_or(0)
    }

    /// Edge size if every edge has the same size.
    pub fn uniformity(&self) -> Option<usize> {
        let mut sizes = self.hypergraph.edges().iter().map(BitSet::len);
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }

    /// `ℓ^k >= e (k (Δ - 1) + 1)`.
    pub fn lemma_hypothesis(&self) -> bool {
        let Some(k) = self.uniformity() else {
            return self.hypergraph.edge_count() == 0;
        };
        let delta = self.max_part_degree_sum() as f64;
        (self.part_size() as f64).powi(k as i32) >= std::f64::consts::E * (k as f64 * (delta - 1.0) + 1.0)
    }

    /// The hypergraph of a list instance: one vertex per pair `(w, c)` with
    /// `c` in `L(w)`, parts given by the B-lists, and an edge for every way
    /// of placing the colours of an A-list on distinct neighbours.
    pub fn from_list_instance(graph: &BipartiteGraph, assignment: &ListAssignment) -> Result<Self, ProbError> {
        assignment.check_shape(graph)?;
        let kb = assignment.k_b();
        let n = graph.b_size() * kb;
        let index = |w: usize, c: Colour| -> Option<usize> {
            assignment.lists_b()[w].binary_search(&c).ok().map(|i| w * kb + i)
        };
        let mut edges: Vec<BitSet> = Vec::new();
        for v in 0..graph.a_size() {
            let nbrs = graph.neighbours_of_a(v);
            let list = &assignment.lists_a()[v];
            let mut chosen: Vec<usize> = Vec::with_capacity(list.len());
            place(list, &nbrs, &index, 0, &mut chosen, &mut Vec::new(), &mut edges, n);
        }
        edges.sort_by(|x, y| x.words().cmp(y.words()));
        edges.dedup();
        let parts = (0..graph.b_size()).map(|w| (w * kb..(w + 1) * kb).collect()).collect();
        let h = Hypergraph::new(n, edges).map_err(|e| ProbError::Invalid(e.to_string()))?;
        Self::new(h, parts)
    }
}

/// Assigns colour `list[i]` to an unused neighbour holding it, recursively.
#[allow(clippy::too_many_arguments)]
fn place(
    list: &[Colour],
    nbrs: &[usize],
    index: &dyn Fn(usize, Colour) -> Option<usize>,
    i: usize,
    used: &mut Vec<usize>,
    verts: &mut Vec<usize>,
    out: &mut Vec<BitSet>,
    n: usize,
) {
    if i == list.len() {
        out.push(BitSet::from_indices(n, verts.iter().copied()));
        return;
    }
    for &w in nbrs {
        if used.contains(&w) {
            continue;
        }
        if let Some(x) = index(w, list[i]) {
            used.push(w);
            verts.push(x);
            place(list, nbrs, index, i + 1, used, verts, out, n);
            verts.pop();
            used.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Chosen vertex of each part.
    Transversal(Vec<usize>),
    Colouring(ProperColouring),
    PaletteSplit {
        /// Colours assigned to the B side.
        to_b: BitSet,
        colouring: ProperColouring,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplerOutcome {
    pub result: Witness,
    pub resample_count: u64,
    pub seed: u64,
    pub budget: u64,
    pub rng: &'static str,
    pub warnings: Vec<String>,
}

impl SamplerOutcome {
    fn new(result: Witness, resample_count: u64, seed: u64, budget: u64) -> Self {
        Self {
            result,
            resample_count,
            seed,
            budget,
            rng: RNG_ID,
            warnings: Vec::new(),
        }
    }
}

/// Moser–Tardos search for a transversal containing no edge. While some
/// edge lies inside the current choice, the lowest-indexed such edge has
/// the choices of all parts it meets redrawn.
pub fn sample_independent_transversal(
    h: &PartitionedHypergraph,
    seed: u64,
    budget: u64,
) -> Result<SamplerOutcome, ProbError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut choice: Vec<usize> = h.parts.iter().map(|p| p[rng.gen_range(0..p.len())]).collect();
    let mut chosen = BitSet::from_indices(h.hypergraph.vertex_count(), choice.iter().copied());
    let mut resamples = 0;
    loop {
        let Some(bad) = h.hypergraph.edges().iter().find(|e| e.is_subset(&chosen)) else {
            break;
        };
        if resamples == budget {
            return Err(ProbError::BudgetExhausted { budget, seed });
        }
        resamples += 1;
        let mut parts: Vec<usize> = bad.iter().map(|x| h.part_of[x]).collect();
        parts.dedup();
        for p in parts {
            chosen.remove(choice[p]);
            let part = &h.parts[p];
            choice[p] = part[rng.gen_range(0..part.len())];
            chosen.insert(choice[p]);
        }
    }
    debug_assert!(h.hypergraph.edges().iter().all(|e| !e.is_subset(&chosen)));
    Ok(SamplerOutcome::new(Witness::Transversal(choice), resamples, seed, budget))
}

/// Completes a B-colouring greedily on A. Returns `None` if some A-vertex
/// sees every colour of its list.
fn extend_to_a(graph: &BipartiteGraph, assignment: &ListAssignment, colours_b: Vec<Colour>) -> Option<ProperColouring> {
    let mut colours_a = Vec::with_capacity(graph.a_size());
    for v in 0..graph.a_size() {
        let nbrs = graph.neighbours_of_a(v);
        let c = assignment.lists_a()[v]
            .iter()
            .copied()
            .find(|&c| nbrs.iter().all(|&w| colours_b[w] != c))?;
        colours_a.push(c);
    }
    Some(ProperColouring { colours_a, colours_b })
}

/// Reads an independent transversal of [`PartitionedHypergraph::from_list_instance`]
/// as a B-colouring and extends it to a proper colouring.
pub fn colouring_from_transversal(
    graph: &BipartiteGraph,
    assignment: &ListAssignment,
    transversal: &[usize],
) -> Result<ProperColouring, ProbError> {
    let kb = assignment.k_b();
    let colours_b: Vec<Colour> = transversal
        .iter()
        .enumerate()
        .map(|(w, &x)| assignment.lists_b()[w][x - w * kb])
        .collect();
    let c = extend_to_a(graph, assignment, colours_b)
        .ok_or_else(|| ProbError::Invalid("transversal is not independent".into()))?;
    c.check(graph, assignment).map_err(ProbError::Invalid)?;
    Ok(c)
}

/// Samples a proper colouring through the transversal hypergraph.
pub fn sample_transversal_colouring(
    graph: &BipartiteGraph,
    assignment: &ListAssignment,
    seed: u64,
    budget: u64,
) -> Result<SamplerOutcome, ProbError> {
    let h = PartitionedHypergraph::from_list_instance(graph, assignment)?;
    let mut out = sample_independent_transversal(&h, seed, budget)?;
    let Witness::Transversal(t) = &out.result else {
        unreachable!("transversal sampler returns a transversal")
    };
    out.result = Witness::Colouring(colouring_from_transversal(graph, assignment, t)?);
    if !h.lemma_hypothesis() {
        out.warnings.push("instance is outside the local lemma hypothesis".into());
    }
    Ok(out)
}

/// Uniform colours on B, redrawing the neighbourhood of the lowest-indexed
/// A-vertex whose whole list appears on its neighbours; A is then coloured
/// greedily.
pub fn sample_coupon_colouring(
    graph: &BipartiteGraph,
    assignment: &ListAssignment,
    seed: u64,
    budget: u64,
) -> Result<SamplerOutcome, ProbError> {
    assignment.check_shape(graph)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lists_b = assignment.lists_b();
    let mut colours_b: Vec<Colour> = lists_b.iter().map(|l| *l.choose(&mut rng).expect("non-empty list")).collect();
    let nbrs: Vec<Vec<usize>> = (0..graph.a_size()).map(|v| graph.neighbours_of_a(v)).collect();
    let blocked = |colours_b: &[Colour], v: usize| {
        assignment.lists_a()[v]
            .iter()
            .all(|&c| nbrs[v].iter().any(|&w| colours_b[w] == c))
    };
    let mut resamples = 0;
    while let Some(v) = (0..graph.a_size()).find(|&v| blocked(&colours_b, v)) {
        if resamples == budget {
            return Err(ProbError::BudgetExhausted { budget, seed });
        }
        resamples += 1;
        for &w in &nbrs[v] {
            colours_b[w] = *lists_b[w].choose(&mut rng).expect("non-empty list");
        }
    }
    let colouring = extend_to_a(graph, assignment, colours_b).expect("no A-vertex is blocked");
    colouring.check(graph, assignment).map_err(ProbError::Invalid)?;
    Ok(SamplerOutcome::new(Witness::Colouring(colouring), resamples, seed, budget))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMode {
    Eq1,
    Eq2,
}

/// One random palette split: each colour goes to the B side with
/// probability `p`. Returns the split and the colouring built from it, or
/// `None` when this draw fails the mode's requirements.
pub fn palette_split_draw(
    graph: &BipartiteGraph,
    assignment: &ListAssignment,
    p: f64,
    eps: f64,
    mode: SplitMode,
    rng: &mut ChaCha8Rng,
) -> Option<(BitSet, ProperColouring)> {
    let palette = assignment.palette_size();
    let mut to_b = BitSet::new(palette);
    for c in 0..palette {
        if rng.gen_bool(p.clamp(0.0, 1.0)) {
            to_b.insert(c);
        }
    }
    let in_b = |c: Colour| to_b.contains(c as usize);
    let lists_a = assignment.lists_a();
    let lists_b = assignment.lists_b();
    let colours_a: Vec<Colour> = match mode {
        SplitMode::Eq1 => lists_a
            .iter()
            .map(|l| l.iter().copied().find(|&c| !in_b(c)))
            .collect::<Option<_>>()?,
        SplitMode::Eq2 => {
            let threshold = (1.0 - eps) * assignment.k_b() as f64 * p;
            if lists_b.iter().any(|l| (l.iter().filter(|&&c| in_b(c)).count() as f64) < threshold) {
                return None;
            }
            let exceptional = lists_a.iter().filter(|l| l.iter().all(|&c| in_b(c))).count();
            if exceptional as f64 >= threshold {
                return None;
            }
            // exceptional vertices take their first colour
            lists_a
                .iter()
                .map(|l| l.iter().copied().find(|&c| !in_b(c)).unwrap_or(l[0]))
                .collect()
        }
    };
    let mut colours_b = Vec::with_capacity(lists_b.len());
    for (w, l) in lists_b.iter().enumerate() {
        let nbrs = graph.neighbours_of_b(w);
        let c = l
            .iter()
            .copied()
            .find(|&c| in_b(c) && nbrs.iter().all(|&v| colours_a[v] != c))?;
        colours_b.push(c);
    }
    let colouring = ProperColouring { colours_a, colours_b };
    colouring.check(graph, assignment).ok()?;
    Some((to_b, colouring))
}

/// Repeats [`palette_split_draw`] until a draw succeeds.
pub fn sample_palette_split(
    graph: &BipartiteGraph,
    assignment: &ListAssignment,
    p: f64,
    eps: f64,
    mode: SplitMode,
    seed: u64,
    budget: u64,
) -> Result<SamplerOutcome, ProbError> {
    assignment.check_shape(graph)?;
    if !(0.0..=1.0).contains(&p) || !(0.0 < eps && eps < 1.0) {
        return Err(ProbError::Invalid("need 0 <= p <= 1 and 0 < eps < 1".into()));
    }
    let mut warnings = Vec::new();
    let (a, b) = (graph.a_size() as u64, graph.b_size() as u64);
    let (ka, kb) = (assignment.k_a() as u64, assignment.k_b() as u64);
    let lhs = match mode {
        SplitMode::Eq1 => crate::bounds::completeupper_eq1(a, b, ka, kb, p),
        SplitMode::Eq2 => crate::bounds::completeupper_eq2(a, b, ka, kb, p, eps),
    };
    if !(lhs < 1.0) {
        warnings.push(format!("the random-partition inequality fails (lhs {lhs})"));
    }
    if p == 0.0 && b > 0 {
        // no colour reaches B, every draw fails
        return Err(ProbError::BudgetExhausted { budget, seed });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut resamples = 0;
    loop {
        if let Some((to_b, colouring)) = palette_split_draw(graph, assignment, p, eps, mode, &mut rng) {
            let mut out = SamplerOutcome::new(Witness::PaletteSplit { to_b, colouring }, resamples, seed, budget);
            out.warnings = warnings;
            return Ok(out);
        }
        if resamples == budget {
            return Err(ProbError::BudgetExhausted { budget, seed });
        }
        resamples += 1;
    }
}

/// Exact probabilities around one A-vertex `v` when its neighbours are
/// coloured uniformly from their lists.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub degree: usize,
    pub k_a: usize,
    pub k_b: usize,
    /// `Pr(T_v)`: every colour of `L(v)` appears on a neighbour.
    pub pr_all: BigRational,
    /// `Pr(T_{v,c})` for each `c` in `L(v)`, by enumeration.
    pub pr_each: Vec<BigRational>,
    /// Occurrences of each colour of `L(v)` in the neighbouring lists.
    pub occurrences: Vec<usize>,
    pub product: BigRational,
    /// `(1 - (1 - 1/k_B)^{deg})^{k_A}`.
    pub degree_bound: BigRational,
    /// Bracket around `(1 - (1 - 1/k_B)^{k_B deg / k_A})^{k_A}`.
    pub jensen: (BigRational, BigRational),
    /// Subsets `I` of `L(v)` checked for `Pr(all of I) <= product over I`.
    pub subsets_checked: usize,
    pub violations: Vec<String>,
    /// The min-exponent form of the bound differs from the Jensen form.
    pub displays_differ: bool,
}

impl CorrelationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Rational bracket around `x^{1/n}` for `x` in `[0, 1]`, of width `2^-bits`.
fn root_bracket(x: &BigRational, n: u32, bits: u32) -> (BigRational, BigRational) {
    let (mut lo, mut hi) = (BigRational::zero(), BigRational::one());
    let two = BigRational::from_integer(BigInt::from(2));
    for _ in 0..bits {
        let mid = (&lo + &hi) / &two;
        if Pow::pow(&mid, n) <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Enumerates every colouring of `v`'s neighbours and checks
/// `Pr(T_v) <= ∏ Pr(T_{v,c}) <=` the two closed-form bounds, plus the
/// subset inequalities, in exact arithmetic.
pub fn check_negative_correlation(
    graph: &BipartiteGraph,
    assignment: &ListAssignment,
    v: usize,
) -> Result<CorrelationReport, ProbError> {
    assignment.check_shape(graph)?;
    if v >= graph.a_size() {
        return Err(ProbError::Invalid(format!("no A-vertex {v}")));
    }
    let nbrs = graph.neighbours_of_a(v);
    let (ka, kb, deg) = (assignment.k_a(), assignment.k_b(), nbrs.len());
    let outcomes = (kb as u128).pow(deg as u32);
    if outcomes > ENUMERATION_CAP as u128 {
        return Err(ProbError::TooLarge {
            outcomes,
            cap: ENUMERATION_CAP,
        });
    }
    let list = &assignment.lists_a()[v];
    // hits[outcome] = bitmask over positions of L(v) that appear
    let mut counts = vec![0u64; 1 << ka];
    let mut digits = vec![0usize; deg];
    for _ in 0..outcomes {
        let mut hit = 0usize;
        for (j, &w) in nbrs.iter().enumerate() {
            let c = assignment.lists_b()[w][digits[j]];
            if let Some(i) = list.iter().position(|&x| x == c) {
                hit |= 1 << i;
            }
        }
        counts[hit] += 1;
        for d in digits.iter_mut() {
            *d += 1;
            if *d < kb {
                break;
            }
            *d = 0;
        }
    }
    let total = outcomes as u64;
    let pr_superset = |mask: usize| -> BigRational {
        let n: u64 = (0..counts.len()).filter(|h| h & mask == mask).map(|h| counts[h]).sum();
        ratio(n, total)
    };
    let full = (1usize << ka) - 1;
    let pr_all = pr_superset(full);
    let pr_each: Vec<BigRational> = (0..ka).map(|i| pr_superset(1 << i)).collect();
    let occurrences: Vec<usize> = list
        .iter()
        .map(|c| nbrs.iter().filter(|&&w| assignment.lists_b()[w].contains(c)).count())
        .collect();
    let keep = ratio(kb as u64 - 1, kb as u64);
    let mut violations = Vec::new();
    for (i, &x) in occurrences.iter().enumerate() {
        let formula = BigRational::one() - Pow::pow(&keep, x as u32);
        if formula != pr_each[i] {
            violations.push(format!("Pr(T_v,c) for colour {} is {} but the formula gives {}", list[i], pr_each[i], formula));
        }
    }
    let mut subsets_checked = 0;
    for mask in 1..=full {
        let prod: BigRational = (0..ka).filter(|i| mask >> i & 1 == 1).map(|i| pr_each[i].clone()).product();
        let joint = pr_superset(mask);
        subsets_checked += 1;
        if joint > prod {
            violations.push(format!("subset {mask:#b}: joint {joint} exceeds product {prod}"));
        }
    }
    let product: BigRational = pr_each.iter().cloned().product();
    let degree_bound = Pow::pow(BigRational::one() - Pow::pow(&keep, deg as u32), ka as u32);
    if product > degree_bound {
        violations.push(format!("product {product} exceeds the degree bound {degree_bound}"));
    }
    // q^{k_B deg / k_A} = (q^{k_B deg})^{1/k_A}
    let (root_lo, root_hi) = root_bracket(&Pow::pow(&keep, (kb * deg) as u32), ka as u32, 160);
    let jensen = (
        Pow::pow(BigRational::one() - root_hi, ka as u32),
        Pow::pow(BigRational::one() - root_lo, ka as u32),
    );
    if product > jensen.1 {
        violations.push(format!("product {product} exceeds the Jensen bound"));
    }
    Ok(CorrelationReport {
        degree: deg,
        k_a: ka,
        k_b: kb,
        pr_all,
        pr_each,
        occurrences,
        product,
        degree_bound,
        jensen,
        subsets_checked,
        violations,
        displays_differ: ka != kb,
    })
}

/// Every star `K_{1,deg}` up to relabelling, for `deg <= max_deg`,
/// `k_a <= max_ka`, `k_b <= max_kb`. Only the intersection of a neighbour
/// list with `L(v)` affects the events, so each neighbour list is an
/// intersection pattern padded with private colours; patterns are taken
/// as multisets up to permutations of `L(v)`.
pub fn star_patterns(max_deg: usize, max_ka: usize, max_kb: usize) -> Vec<(BipartiteGraph, ListAssignment)> {
    let mut out = Vec::new();
    for ka in 1..=max_ka {
        let perms = permutations(ka);
        for kb in 1..=max_kb {
            let subsets: Vec<usize> = (0..1usize << ka).filter(|m| m.count_ones() as usize <= kb).collect();
            for deg in 1..=max_deg {
                let mut seen = std::collections::BTreeSet::new();
                let mut idx = vec![0usize; deg];
                loop {
                    let pattern: Vec<usize> = idx.iter().map(|&i| subsets[i]).collect();
                    let canon = perms
                        .iter()
                        .map(|p| {
                            let mut q: Vec<usize> = pattern.iter().map(|&m| permute_mask(m, p)).collect();
                            q.sort_unstable();
                            q
                        })
                        .min()
                        .expect("at least the identity");
                    if seen.insert(canon.clone()) {
                        out.push(star_instance(ka, kb, &canon));
                    }
                    // next non-decreasing index vector
                    let Some(pos) = (0..deg).rev().find(|&j| idx[j] + 1 < subsets.len()) else {
                        break;
                    };
                    let v = idx[pos] + 1;
                    for j in pos..deg {
                        idx[j] = v;
                    }
                }
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

fn permute_mask(mask: usize, perm: &[usize]) -> usize {
    (0..perm.len()).filter(|i| mask >> i & 1 == 1).map(|i| 1 << perm[i]).sum()
}

fn star_instance(ka: usize, kb: usize, pattern: &[usize]) -> (BipartiteGraph, ListAssignment) {
    let mut next = ka as Colour;
    let lists_b: Vec<Vec<Colour>> = pattern
        .iter()
        .map(|&m| {
            let mut l: Vec<Colour> = (0..ka).filter(|i| m >> i & 1 == 1).map(|i| i as Colour).collect();
            while l.len() < kb {
                l.push(next);
                next += 1;
            }
            l
        })
        .collect();
    let lists_a = vec![(0..ka as Colour).collect()];
    let la = ListAssignment::normalized_from(ka, kb, lists_a, lists_b).expect("valid star");
    (BipartiteGraph::complete(1, pattern.len()), la)
}

/// Random bipartite graph with maximum degrees at most `deg_a` and `deg_b`
/// and uniformly random lists from `0..palette`. A-vertices pick
/// neighbours among B-vertices with spare capacity.
#[allow(clippy::too_many_arguments)]
pub fn random_instance(
    a: usize,
    b: usize,
    deg_a: usize,
    deg_b: usize,
    k_a: usize,
    k_b: usize,
    palette: usize,
    seed: u64,
) -> Result<(BipartiteGraph, ListAssignment), ProbError> {
    if k_a > palette || k_b > palette {
        return Err(ProbError::Invalid("list size above the palette".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut load = vec![0usize; b];
    let mut edges = Vec::new();
    for v in 0..a {
        let mut open: Vec<usize> = (0..b).filter(|&w| load[w] < deg_b).collect();
        open.shuffle(&mut rng);
        for &w in open.iter().take(deg_a) {
            load[w] += 1;
            edges.push((v, w));
        }
    }
    let graph = BipartiteGraph::from_edges(a, b, edges)?;
    let mut draw = |k: usize| -> Vec<Colour> {
        let mut l: Vec<Colour> = rand::seq::index::sample(&mut rng, palette, k)
            .into_iter()
            .map(|c| c as Colour)
            .collect();
        l.sort_unstable();
        l
    };
    let lists_a: Vec<Vec<Colour>> = (0..a).map(|_| draw(k_a)).collect();
    let lists_b: Vec<Vec<Colour>> = (0..b).map(|_| draw(k_b)).collect();
    let assignment = ListAssignment::normalized_from(k_a, k_b, lists_a, lists_b)?;
    Ok((graph, assignment))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{construct_classic, DEFAULT_SIZE_CAP};

    fn one_edge() -> PartitionedHypergraph {
        let h = Hypergraph::from_masks(4, &[0b0101]).unwrap();
        PartitionedHypergraph::new(h, vec![vec![0, 1], vec![2, 3]]).unwrap()
    }

    #[test]
    fn edgeless_succeeds_at_once() {
        let h = PartitionedHypergraph::new(Hypergraph::new(4, vec![]).unwrap(), vec![vec![0, 1], vec![2, 3]]).unwrap();
        let out = sample_independent_transversal(&h, 3, 10).unwrap();
        assert_eq!(out.resample_count, 0);
        assert_eq!(out.rng, RNG_ID);
    }

    #[test]
    fn first_draw_failure_rate() {
        let h = one_edge();
        let n = 10_000;
        let failed = (0..n)
            .filter(|&s| sample_independent_transversal(&h, s, 1000).unwrap().resample_count > 0)
            .count();
        assert!((failed as f64 / n as f64 - 0.25).abs() < 0.02, "{failed}");
    }

    #[test]
    fn partition_validation() {
        let h = Hypergraph::new(3, vec![]).unwrap();
        assert!(PartitionedHypergraph::new(h.clone(), vec![vec![0, 1], vec![2]]).is_err());
        assert!(PartitionedHypergraph::new(h, vec![vec![0], vec![1]]).is_err());
    }

    #[test]
    fn samplers_are_deterministic() {
        let (g, la) = random_instance(20, 4, 2, 10, 2, 15, 40, 9).unwrap();
        let x = sample_transversal_colouring(&g, &la, 5, DEFAULT_BUDGET).unwrap();
        let y = sample_transversal_colouring(&g, &la, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(x, y);
        let x = sample_coupon_colouring(&g, &la, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(x, sample_coupon_colouring(&g, &la, 5, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn coupon_on_classic_exhausts() {
        let cert = construct_classic(2, 2, DEFAULT_SIZE_CAP).unwrap();
        assert!(matches!(
            sample_coupon_colouring(&cert.graph, &cert.assignment, 1, 1000),
            Err(ProbError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn coupon_with_private_colours() {
        let la = ListAssignment::new(6, 2, 2, vec![vec![0, 4], vec![1, 5]], vec![vec![0, 1], vec![2, 3]]).unwrap();
        let g = BipartiteGraph::complete(2, 2);
        assert_eq!(sample_coupon_colouring(&g, &la, 0, 10).unwrap().resample_count, 0);
    }

    #[test]
    fn palette_split_cases() {
        let la = ListAssignment::new(4, 1, 1, vec![vec![0], vec![1]], vec![vec![2], vec![3]]).unwrap();
        let g = BipartiteGraph::complete(2, 2);
        assert!(sample_palette_split(&g, &la, 0.5, 0.5, SplitMode::Eq1, 1, 1000).is_ok());
        assert!(matches!(
            sample_palette_split(&g, &la, 0.0, 0.5, SplitMode::Eq1, 1, 1000),
            Err(ProbError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn correlation_examples() {
        let g = BipartiteGraph::complete(1, 2);
        let la = ListAssignment::new(2, 2, 2, vec![vec![0, 1]], vec![vec![0, 1], vec![0, 1]]).unwrap();
        let r = check_negative_correlation(&g, &la, 0).unwrap();
        assert_eq!(r.pr_all, ratio(1, 2));
        assert_eq!(r.pr_each, vec![ratio(3, 4), ratio(3, 4)]);
        assert_eq!(r.product, ratio(9, 16));
        assert!(r.holds());
        let g1 = BipartiteGraph::complete(1, 1);
        let la1 = ListAssignment::new(2, 2, 2, vec![vec![0, 1]], vec![vec![0, 1]]).unwrap();
        let r = check_negative_correlation(&g1, &la1, 0).unwrap();
        assert_eq!(r.pr_all, BigRational::zero());
        assert_eq!(r.product, ratio(1, 4));
        assert!(r.holds());
    }

    #[test]
    fn star_grid_is_small_and_clean() {
        let stars = star_patterns(2, 2, 2);
        assert!(!stars.is_empty());
        for (g, la) in &stars {
            assert!(check_negative_correlation(g, la, 0).unwrap().holds());
        }
    }
}
