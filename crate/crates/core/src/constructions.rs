//! Explicit non-choosability constructions, each emitted as a certificate
//! that has already passed [`verify_certificate`].

use crate::bitset::{mask_elems, mask_of};
use crate::budget::Budget;
use crate::cert::{NonChoosabilityCertificate, Provenance};
use crate::colorability::{verify_certificate, Verdict};
use crate::error::CoreError;
use crate::graph::BipartiteGraph;
use crate::lists::{Colour, ListAssignment};
use crate::search::{transversal_masks, SearchError, TRANSVERSAL_CAP};
use crate::steiner::{has_property_a, mbar_bounds, mbar_exact, random_family_upper, SetFamily};

/// Default cap on the number of vertices in either part.
pub const DEFAULT_SIZE_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstructionError {
    #[error("{what} would have {size} vertices, above the cap of {cap}")]
    Size { what: &'static str, size: u128, cap: usize },
    #[error("family {family} has Property A; witness {witness:?} meets every block")]
    PropertyAHolds { family: &'static str, witness: Vec<usize> },
    #[error("parameters out of scale: {0}")]
    Scale(Box<WitnessReport>),
    #[error("emitted assignment is colourable: {0}")]
    Refuted(String),
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

fn checked(cert: NonChoosabilityCertificate) -> Result<NonChoosabilityCertificate, ConstructionError> {
    match verify_certificate(&cert)? {
        Verdict::Verified => Ok(cert),
        Verdict::Refuted(_) => Err(ConstructionError::Refuted(cert.notes)),
    }
}

fn check_size(what: &'static str, size: u128, cap: usize) -> Result<(), ConstructionError> {
    if size > cap as u128 {
        return Err(ConstructionError::Size { what, size, cap });
    }
    Ok(())
}

/// All ways of picking one colour from each list, in lexicographic order.
fn product(lists: &[Vec<Colour>]) -> Vec<Vec<Colour>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Colour>| {
                list.iter().map(move |&c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    out
}

fn block(start: usize, len: usize) -> Vec<Colour> {
    (start..start + len).map(|c| c as Colour).collect()
}

/// `K_{δ^k, k}`: `k` disjoint B-lists of length `δ` and every transversal
/// `k`-tuple as an A-list.
pub fn construct_classic(k: usize, delta: usize, cap: usize) -> Result<NonChoosabilityCertificate, ConstructionError> {
    if k < 2 || delta < 2 {
        return Err(ConstructionError::Invalid("k and delta must be at least 2".into()));
    }
    let a = (delta as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    check_size("A", a, cap)?;
    let lists_b: Vec<Vec<Colour>> = (0..k).map(|j| block(j * delta, delta)).collect();
    let lists_a = product(&lists_b);
    let assignment = ListAssignment::new(k * delta, k, delta, lists_a, lists_b)?;
    let cert = NonChoosabilityCertificate::new(
        BipartiteGraph::complete(a as usize, k),
        assignment,
        Provenance::Classic,
        format!("K_{{{a},{k}}} with {k} disjoint B-lists of size {delta}"),
    )?;
    checked(cert)
}

/// Complete bipartite graph with the blocks of `fam_a` as A-lists and those
/// of `fam_b` as B-lists. Requires a common ground set of size
/// `k1 + k2 + 1` and neither family having Property A for its parameter.
pub fn construct_steiner(
    fam_a: &SetFamily,
    fam_b: &SetFamily,
    k1: usize,
    k2: usize,
) -> Result<NonChoosabilityCertificate, ConstructionError> {
    let l = fam_a.ground_size();
    if fam_b.ground_size() != l {
        return Err(ConstructionError::Invalid(format!(
            "ground sets differ: {l} and {}",
            fam_b.ground_size()
        )));
    }
    if l != k1 + k2 + 1 {
        return Err(ConstructionError::Invalid(format!("ground set {l} is not k1 + k2 + 1 = {}", k1 + k2 + 1)));
    }
    if fam_a.is_empty() || fam_b.is_empty() {
        return Err(ConstructionError::Invalid("families must be non-empty".into()));
    }
    for (name, fam, k) in [("A", fam_a, k1), ("B", fam_b, k2)] {
        if let Some(w) = has_property_a(fam, k) {
            return Err(ConstructionError::PropertyAHolds {
                family: name,
                witness: mask_elems(w).collect(),
            });
        }
    }
    complete_cert(
        fam_a,
        fam_b,
        Provenance::Steiner,
        format!("blocks on [{l}] without Property A for {k1} and {k2}"),
    )
}

fn complete_cert(
    fam_a: &SetFamily,
    fam_b: &SetFamily,
    provenance: Provenance,
    notes: String,
) -> Result<NonChoosabilityCertificate, ConstructionError> {
    let to = |f: &SetFamily| -> Vec<Vec<Colour>> {
        f.lists().into_iter().map(|l| l.into_iter().map(|c| c as Colour).collect()).collect()
    };
    let assignment = ListAssignment::normalized_from(fam_a.block_size(), fam_b.block_size(), to(fam_a), to(fam_b))?;
    let cert = NonChoosabilityCertificate::new(
        BipartiteGraph::complete(fam_a.len(), fam_b.len()),
        assignment,
        provenance,
        notes,
    )?;
    checked(cert)
}

/// Lines of the Fano plane on points `0..7`.
pub const FANO_LINES: [[usize; 3]; 7] = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];

/// Complements of the Fano lines: seven 4-sets, no two points meeting all.
pub fn fano_complements() -> SetFamily {
    let blocks = FANO_LINES.iter().map(|l| 0x7f & !mask_of(l.iter().copied())).collect();
    SetFamily::new(7, 4, blocks).expect("valid blocks")
}

/// `K_{35,7}` not `(3,4)`-choosable: all triples of a 7-set against the
/// Fano line complements.
pub fn construct_fano_35() -> Result<NonChoosabilityCertificate, ConstructionError> {
    construct_steiner(&SetFamily::complete(7, 3), &fano_complements(), 4, 2)
}

/// `K_{28,7}` not `(3,4)`-choosable. Starting from all 35 triples, each
/// triple in lexicographic order is dropped if the rest still blocks every
/// colouring of the line complements.
pub fn construct_fano_28() -> Result<NonChoosabilityCertificate, ConstructionError> {
    let fam_b = fano_complements();
    let mut kept: Vec<u64> = SetFamily::complete(7, 3).blocks().to_vec();
    let mut i = 0;
    while i < kept.len() {
        let mut trial = kept.clone();
        trial.remove(i);
        let fam_a = SetFamily::new(7, 3, trial.clone())?;
        if complete_cert(&fam_a, &fam_b, Provenance::Steiner, String::new()).is_ok() {
            kept = trial;
        } else {
            i += 1;
        }
    }
    let fam_a = SetFamily::new(7, 3, kept)?;
    complete_cert(
        &fam_a,
        &fam_b,
        Provenance::Steiner,
        format!("{} triples of [7] against the Fano line complements", fam_a.len()),
    )
}

/// Parameters of the boundary case `k_A = b - 1`, `k_B = δ` on `K_{a,b}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryParams {
    pub b: usize,
    pub delta: usize,
    pub q: usize,
    pub r: usize,
}

impl BoundaryParams {
    pub fn new(b: usize, delta: usize) -> Result<Self, ConstructionError> {
        if b < 3 || delta < 2 {
            return Err(ConstructionError::Invalid("need b >= 3 and delta >= 2".into()));
        }
        Ok(Self {
            b,
            delta,
            q: delta / (b - 1),
            r: delta % (b - 1),
        })
    }
}

/// Blocking A-family for B-lists whose last list is disjoint from the rest:
/// every minimal transversal of size `b - 1`, plus each size-`b` minimal
/// transversal with its colour from the last list removed.
fn boundary_a_lists(lists_b: &[Vec<Colour>]) -> Result<Vec<u64>, ConstructionError> {
    let b = lists_b.len();
    let masks: Vec<u64> = lists_b.iter().map(|l| mask_of(l.iter().map(|&c| c as usize))).collect();
    let last = masks[b - 1];
    let mut out: Vec<u64> = Vec::new();
    for t in transversal_masks(&masks, TRANSVERSAL_CAP)? {
        let size = t.count_ones() as usize;
        if size < b - 1 {
            return Err(SearchError::Infeasible { size, k_a: b - 1 }.into());
        }
        out.push(if size == b { t & !last } else { t });
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn mask_list(mask: u64) -> Vec<Colour> {
    mask_elems(mask).map(|c| c as Colour).collect()
}

/// B-lists of the trivial family: the first list shares a block with each
/// of lists `2..b-1`, the block sizes and its private part being a balanced
/// split of `δ` with larger parts first; the last list is disjoint.
fn trivial_family(p: &BoundaryParams) -> Vec<Vec<Colour>> {
    let parts: Vec<usize> = (0..p.b - 1).map(|i| p.q + usize::from(i < p.r)).collect();
    let mut next = 0;
    let mut take = |n: usize| {
        let out = block(next, n);
        next += n;
        out
    };
    let mut first = take(parts[0]);
    let mut lists = Vec::with_capacity(p.b);
    lists.push(Vec::new());
    for &share in &parts[1..] {
        let shared = take(share);
        first.extend(&shared);
        let mut list = shared;
        list.extend(take(p.delta - share));
        lists.push(list);
    }
    lists[0] = first;
    lists.push(take(p.delta));
    lists
}

/// B-lists for `b = 4` with pairwise shared blocks of sizes `s12, s13, s23`
/// among the first three lists and a disjoint fourth list.
fn triangle_family(delta: usize, s12: usize, s13: usize, s23: usize) -> Vec<Vec<Colour>> {
    let mut next = 0;
    let mut take = |n: usize| {
        let out = block(next, n);
        next += n;
        out
    };
    let l12 = take(s12);
    let l13 = take(s13);
    let l23 = take(s23);
    let join = |x: &[Colour], y: &[Colour], own: Vec<Colour>| -> Vec<Colour> {
        let mut l = x.to_vec();
        l.extend(y);
        l.extend(own);
        l
    };
    let v1 = join(&l12, &l13, take(delta - s12 - s13));
    let v2 = join(&l12, &l23, take(delta - s12 - s23));
    let v3 = join(&l13, &l23, take(delta - s13 - s23));
    vec![v1, v2, v3, take(delta)]
}

/// Extremal `(b - 1, δ)`-assignment on `K_{a,b}` for the boundary case.
/// For `b = 4` the shared block sizes minimise the emitted A-family.
pub fn construct_boundary(params: BoundaryParams, cap: usize) -> Result<NonChoosabilityCertificate, ConstructionError> {
    let BoundaryParams { b, delta, .. } = params;
    if b * delta > 64 {
        return Err(ConstructionError::Invalid("b * delta above 64 colours is not supported".into()));
    }
    let (lists_b, a_masks) = if b == 4 {
        let mut best: Option<(Vec<Vec<Colour>>, Vec<u64>)> = None;
        for s12 in 0..=delta {
            for s13 in 0..=delta - s12 {
                for s23 in 0..=delta - s12.max(s13) {
                    let lists = triangle_family(delta, s12, s13, s23);
                    let a = boundary_a_lists(&lists)?;
                    if best.as_ref().is_none_or(|(_, bst)| a.len() < bst.len()) {
                        best = Some((lists, a));
                    }
                }
            }
        }
        best.expect("at least one split")
    } else {
        let lists = trivial_family(&params);
        let a = boundary_a_lists(&lists)?;
        (lists, a)
    };
    check_size("A", a_masks.len() as u128, cap)?;
    let a = a_masks.len();
    let lists_a = a_masks.into_iter().map(mask_list).collect();
    let assignment = ListAssignment::normalized_from(b - 1, delta, lists_a, lists_b)?;
    let cert = NonChoosabilityCertificate::new(
        BipartiteGraph::complete(a, b),
        assignment,
        Provenance::Boundary,
        format!("K_{{{a},{b}}} not ({},{delta})-choosable", b - 1),
    )?;
    checked(cert)
}

/// One stage `G_i` of the gadget recursion.
#[derive(Clone, Debug)]
pub struct GadgetLevel {
    pub level: usize,
    pub graph: BipartiteGraph,
    pub assignment: ListAssignment,
    /// The B-vertex `b_i`.
    pub designated: usize,
    /// Colours `b_i` can still take in a proper colouring.
    pub restricted: Vec<Colour>,
}

#[derive(Clone, Debug)]
pub struct Gadget {
    pub certificate: NonChoosabilityCertificate,
    pub levels: Vec<GadgetLevel>,
}

struct Stage {
    a_lists: Vec<Vec<Colour>>,
    b_lists: Vec<Vec<Colour>>,
    edges: Vec<(usize, usize)>,
    designated: usize,
    restricted: Vec<Colour>,
    palette: usize,
}

impl Stage {
    fn level_view(&self, level: usize, k: usize, delta: usize) -> Result<GadgetLevel, ConstructionError> {
        let graph = BipartiteGraph::from_edges(self.a_lists.len(), self.b_lists.len(), self.edges.iter().copied())?;
        let assignment = ListAssignment::new(self.palette, k, delta, self.a_lists.clone(), self.b_lists.clone())?;
        Ok(GadgetLevel {
            level,
            graph,
            assignment,
            designated: self.designated,
            restricted: self.restricted.clone(),
        })
    }
}

fn gadget_sizes(k: usize, delta: usize) -> (u128, u128) {
    let mut a = (delta as u128).pow(k as u32 - 1);
    let mut b = k as u128;
    for i in 1..delta {
        a = a.saturating_mul(k as u128).saturating_add(((delta - i) as u128).pow(k as u32 - 1));
        b = b.saturating_mul(k as u128);
    }
    (a, b)
}

/// Recursive gadget of maximum A-degree `k` and maximum B-degree
/// `Σ_{i=1}^{δ} i^{k-1}` that is not `(k, δ)`-choosable.
pub fn construct_gadget(k: usize, delta: usize, cap: usize) -> Result<Gadget, ConstructionError> {
    if k < 2 || delta < 2 {
        return Err(ConstructionError::Invalid("k and delta must be at least 2".into()));
    }
    let (a_total, b_total) = gadget_sizes(k, delta);
    check_size("A", a_total, cap)?;
    check_size("B", b_total, cap)?;

    let b_lists: Vec<Vec<Colour>> = (0..k).map(|j| block(j * delta, delta)).collect();
    let mut firsts = vec![vec![b_lists[0][0]]];
    firsts.extend(b_lists[1..].iter().cloned());
    let a_lists = product(&firsts);
    let edges = (0..a_lists.len()).flat_map(|u| (0..k).map(move |w| (u, w))).collect();
    let mut stage = Stage {
        restricted: b_lists[0][1..].to_vec(),
        a_lists,
        b_lists,
        edges,
        designated: 0,
        palette: k * delta,
    };
    let mut levels = vec![stage.level_view(1, k, delta)?];

    for i in 1..delta {
        let mut next = Stage {
            a_lists: Vec::new(),
            b_lists: Vec::new(),
            edges: Vec::new(),
            designated: stage.designated,
            restricted: Vec::new(),
            palette: stage.palette * k,
        };
        let mut copies: Vec<(usize, Vec<Colour>)> = Vec::with_capacity(k);
        for j in 0..k {
            let shift = (j * stage.palette) as Colour;
            let (da, db) = (next.a_lists.len(), next.b_lists.len());
            let moved = |l: &Vec<Colour>| l.iter().map(|c| c + shift).collect::<Vec<_>>();
            next.a_lists.extend(stage.a_lists.iter().map(moved));
            next.b_lists.extend(stage.b_lists.iter().map(moved));
            next.edges.extend(stage.edges.iter().map(|&(u, w)| (u + da, w + db)));
            copies.push((stage.designated + db, stage.restricted.iter().map(|c| c + shift).collect()));
        }
        let x = copies[0].1[0];
        let mut choices = vec![vec![x]];
        choices.extend(copies[1..].iter().map(|(_, r)| r.clone()));
        debug_assert_eq!(copies[0].1.len(), delta - i);
        for list in product(&choices) {
            let u = next.a_lists.len();
            next.a_lists.push(list);
            next.edges.extend(copies.iter().map(|&(w, _)| (u, w)));
        }
        next.designated = copies[0].0;
        next.restricted = copies[0].1[1..].to_vec();
        stage = next;
        levels.push(stage.level_view(i + 1, k, delta)?);
    }

    let last = levels.last().expect("at least one level");
    let cert = NonChoosabilityCertificate::new(
        last.graph.clone(),
        last.assignment.normalized(),
        Provenance::Gadget,
        format!(
            "gadget with max A-degree {k} and max B-degree {} not ({k},{delta})-choosable",
            last.graph.max_degree_b()
        ),
    )?;
    Ok(Gadget {
        certificate: checked(cert)?,
        levels,
    })
}

/// `Σ_{i=1}^{δ} i^{k-1}`, the maximum B-degree of the gadget.
pub fn gadget_degree_b(k: usize, delta: usize) -> u128 {
    (1..=delta as u128).map(|i| i.pow(k as u32 - 1)).sum()
}

/// Parameters of the segment witness for a target degree `Δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub k: usize,
    pub delta: f64,
    pub c: f64,
    /// `c (Δ / ln Δ)^{1/k} ln Δ` before rounding.
    pub m_real: f64,
    /// `m_real` rounded to the nearest even integer.
    pub m: usize,
    /// `b` solving `(k - 1) b ln Δ = (ln m) / 2`.
    pub b_real: f64,
    pub segments: usize,
    /// Colours a B-colouring may miss: `(k - 1)` per segment.
    pub missed: usize,
    pub a_lower: f64,
    pub a_upper: f64,
    pub b_size: f64,
}

impl std::fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "k={} Delta={} c={:.6} m={:.3} (even {}) b={:.6} segments={} missed={} |A| in [{:.4e}, {:.4e}] |B|={:.4e}",
            self.k,
            self.delta,
            self.c,
            self.m_real,
            self.m,
            self.b_real,
            self.segments,
            self.missed,
            self.a_lower,
            self.a_upper,
            self.b_size
        )
    }
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn segment_sizes(m: usize, segments: usize) -> Vec<usize> {
    (0..segments).map(|s| m / segments + usize::from(s < m % segments)).collect()
}

/// Evaluates the witness parameters for `k` and `Δ` (natural logarithms).
pub fn witness_report(k: usize, delta: f64) -> Result<WitnessReport, ConstructionError> {
    if k < 2 || delta.is_nan() || delta <= std::f64::consts::E {
        return Err(ConstructionError::Invalid("need k >= 2 and Delta > e".into()));
    }
    let c = 1.0 / (4.0 * (k * (k - 1)) as f64);
    let ln_d = delta.ln();
    let m_real = c * (delta / ln_d).powf(1.0 / k as f64) * ln_d;
    let m = (((m_real / 2.0).round() as usize) * 2).max(2 * k);
    let b_real = (m as f64).ln() / 2.0 / ((k - 1) as f64 * ln_d);
    let segments = ((b_real * ln_d).round() as usize).clamp(1, m / k);
    let missed = (k - 1) * segments;
    let b_size = segment_sizes(m, segments).iter().map(|&s| binomial_f64(s, k)).sum();
    let (a_lower, a_upper) = match mbar_bounds(missed, m / 2, m) {
        Ok(bounds) => (
            num_traits::ToPrimitive::to_f64(&bounds.lower).unwrap_or(f64::INFINITY),
            bounds.upper,
        ),
        Err(_) => (f64::NAN, f64::NAN),
    };
    Ok(WitnessReport {
        k,
        delta,
        c,
        m_real,
        m,
        b_real,
        segments,
        missed,
        a_lower,
        a_upper,
        b_size,
    })
}

/// Segment witness at explicit scale: `m` colours cut into `segments`
/// nearly equal segments, every `k`-subset of a segment as a B-list, and
/// an `(m/2)`-uniform family without Property A for `(k - 1) * segments`
/// as A-lists.
pub fn construct_witness_explicit(
    k: usize,
    m: usize,
    segments: usize,
    budget: &Budget,
) -> Result<NonChoosabilityCertificate, ConstructionError> {
    if k < 2 || !m.is_multiple_of(2) || segments == 0 || m > 64 {
        return Err(ConstructionError::Invalid("need k >= 2, even m <= 64 and a positive segment count".into()));
    }
    let sizes = segment_sizes(m, segments);
    if sizes.iter().any(|&s| s < k) {
        return Err(ConstructionError::Invalid(format!("a segment of {m}/{segments} is smaller than k = {k}")));
    }
    let missed = (k - 1) * segments;
    if missed >= m / 2 {
        return Err(ConstructionError::Invalid(format!(
            "a B-colouring may miss {missed} colours, not below m/2 = {}",
            m / 2
        )));
    }
    let mut lists_b: Vec<Vec<Colour>> = Vec::new();
    let mut start = 0;
    for &s in &sizes {
        lists_b.extend(
            crate::bitset::k_subsets(s, k)
                .into_iter()
                .map(|mask| mask_elems(mask).map(|c| (c + start) as Colour).collect()),
        );
        start += s;
    }
    let family = match mbar_exact(missed, m / 2, m, budget) {
        Ok(exact) => exact.family,
        Err(SearchError::Timeout { .. } | SearchError::TooLarge { .. }) => random_family_upper(missed, m / 2, m, 0, 64)?,
        Err(e) => return Err(e.into()),
    };
    let lists_a: Vec<Vec<Colour>> = family
        .lists()
        .into_iter()
        .map(|l| l.into_iter().map(|c| c as Colour).collect())
        .collect();
    let (a, b) = (lists_a.len(), lists_b.len());
    let assignment = ListAssignment::new(m, m / 2, k, lists_a, lists_b)?;
    let cert = NonChoosabilityCertificate::new(
        BipartiteGraph::complete(a, b),
        assignment,
        Provenance::Witness,
        format!("{segments} segments of [{m}], B-lists all {k}-subsets within a segment"),
    )?;
    checked(cert)
}

/// Segment witness for degree `Δ`. Fails with [`ConstructionError::Scale`]
/// carrying the computed parameters when they exceed explicit scale.
pub fn construct_witness_cond3(
    k: usize,
    delta: f64,
    budget: &Budget,
) -> Result<(NonChoosabilityCertificate, WitnessReport), ConstructionError> {
    let report = witness_report(k, delta)?;
    if report.m > 64 || report.missed >= report.m / 2 {
        return Err(ConstructionError::Scale(Box::new(report)));
    }
    let cert = construct_witness_explicit(k, report.m, report.segments, budget)?;
    Ok((cert, report))
}
