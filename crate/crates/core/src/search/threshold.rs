use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::bitset::mask_elems;
use crate::budget::Budget;
use crate::cert::{NonChoosabilityCertificate, Provenance};
use crate::colorability::{verify_certificate, Verdict};
use crate::graph::BipartiteGraph;
use crate::lists::{Colour, ListAssignment};

use super::cover::{cover, CoverOutcome, CoverResult};
use super::families::{to_lists, FamilySpace};
use super::{transversal_masks, SearchError, TRANSVERSAL_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AStar {
    Finite(usize),
    /// `k_a > b`: a B-colouring uses at most `b` colours, so every A-list
    /// keeps a free colour.
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct ThresholdResult {
    pub b: usize,
    pub k_a: usize,
    pub k_b: usize,
    pub a_star: AStar,
    pub witness: Option<NonChoosabilityCertificate>,
    pub proof_note: String,
}

#[derive(Clone, Debug)]
pub enum Choosability {
    Yes { note: String },
    No(Box<NonChoosabilityCertificate>),
}

struct Best {
    value: usize,
    family: Vec<u64>,
    cover: CoverResult,
}

#[derive(Default)]
struct Tally {
    families: u64,
    infeasible: u64,
    nodes: u64,
    capped: bool,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.families += other.families;
        self.infeasible += other.infeasible;
        self.nodes += other.nodes;
        self.capped |= other.capped;
        self
    }
}

fn check_args(b: usize, k_a: usize, k_b: usize, palette_cap: usize) -> Result<(), SearchError> {
    if b == 0 || k_a == 0 || k_b == 0 {
        return Err(SearchError::Invalid("b, k_a and k_b must be positive".into()));
    }
    if palette_cap < b * k_b {
        return Err(SearchError::Invalid(format!(
            "palette cap {palette_cap} is below b*k_b = {}; the search would not be exhaustive",
            b * k_b
        )));
    }
    if b * k_b > 64 {
        return Err(SearchError::Invalid("b*k_b above 64 colours is not supported".into()));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn spaces(b: usize, k_b: usize) -> impl Iterator<Item = FamilySpace> {
    (k_b..=b * k_b)
        .filter(move |&m| binomial(m, k_b) >= b as u128)
        .map(move |m| FamilySpace::new(b, k_b, m))
}

fn prefix_depth(b: usize) -> usize {
    b.min(2)
}

/// Evaluates one B-family against `limit`. With `quick` set, families
/// with more `k_a`-sized minimal transversals than the limit are dropped
/// before the cover search (each of those must itself be an A-list).
fn evaluate(
    family: &[u64],
    k_a: usize,
    limit: Option<usize>,
    quick: bool,
    budget: &Budget,
    tally: &mut Tally,
) -> Option<(usize, CoverResult)> {
    tally.families += 1;
    let transversals = match transversal_masks(family, TRANSVERSAL_CAP) {
        Ok(t) => t,
        Err(_) => {
            tally.capped = true;
            return None;
        }
    };
    if quick {
        if let Some(limit) = limit {
            let forced = transversals.iter().filter(|s| s.count_ones() as usize == k_a).count();
            if forced > limit {
                return None;
            }
        }
    }
    match cover(&transversals, k_a, limit, budget) {
        CoverOutcome::Optimal(r) => {
            tally.nodes += r.nodes;
            Some((r.count, r))
        }
        CoverOutcome::AboveLimit => None,
        CoverOutcome::Infeasible { .. } => {
            tally.infeasible += 1;
            None
        }
        CoverOutcome::Capped { .. } => {
            tally.capped = true;
            None
        }
    }
}

/// The least `a` for which `K_{a,b}` is not `(k_a, k_b)`-choosable.
pub fn threshold_a(
    b: usize,
    k_a: usize,
    k_b: usize,
    palette_cap: usize,
    budget: &Budget,
) -> Result<ThresholdResult, SearchError> {
    check_args(b, k_a, k_b, palette_cap)?;
    if k_a > b {
        return Ok(ThresholdResult {
            b,
            k_a,
            k_b,
            a_star: AStar::Unbounded,
            witness: None,
            proof_note: "k_a > b: every A-list keeps a colour unused by B".into(),
        });
    }
    let shared = AtomicUsize::new(usize::MAX);
    let mut best: Option<(usize, Best)> = None;
    let mut tally = Tally::default();
    for space in spaces(b, k_b) {
        let prefixes = space.prefixes(prefix_depth(b));
        let results: Vec<(Option<Best>, Tally)> = prefixes
            .par_iter()
            .map(|prefix| {
                let mut local: Option<Best> = None;
                let mut t = Tally::default();
                let _ = space.for_each_completion(prefix, &mut |family| {
                    if budget.exhausted() {
                        t.capped = true;
                        return ControlFlow::Break(());
                    }
                    let limit = shared.load(Ordering::Relaxed);
                    let limit = (limit != usize::MAX).then_some(limit);
                    if let Some((value, r)) = evaluate(family, k_a, limit, false, budget, &mut t) {
                        if local.as_ref().is_none_or(|l| value < l.value) {
                            shared.fetch_min(value, Ordering::Relaxed);
                            local = Some(Best {
                                value,
                                family: family.to_vec(),
                                cover: r,
                            });
                        }
                    }
                    ControlFlow::Continue(())
                });
                (local, t)
            })
            .collect();
        for (local, t) in results {
            tally = tally.merge(t);
            if let Some(l) = local {
                if best.as_ref().is_none_or(|(_, b)| l.value < b.value) {
                    best = Some((space.palette, l));
                }
            }
        }
    }
    let note = format!(
        "{} canonical B-families examined, {} with a transversal below k_a",
        tally.families, tally.infeasible
    );
    if tally.capped {
        return Err(SearchError::Timeout {
            lower: 1,
            upper: best.map(|(_, b)| b.value),
            nodes: budget.nodes(),
        });
    }
    let Some((palette, best)) = best else {
        return Err(SearchError::Invalid(format!("no B-family admits a blocking A-family ({note})")));
    };
    // The cover found under a moving limit depends on thread timing; redo it
    // unbounded so the witness is the same for any worker count.
    let transversals = transversal_masks(&best.family, TRANSVERSAL_CAP)?;
    let a_family = match cover(&transversals, k_a, None, &Budget::unlimited()) {
        CoverOutcome::Optimal(r) => r.family,
        _ => best.cover.family,
    };
    let witness = certificate(palette, k_a, k_b, &best.family, &a_family, best.value)?;
    Ok(ThresholdResult {
        b,
        k_a,
        k_b,
        a_star: AStar::Finite(best.value),
        witness: Some(witness),
        proof_note: note,
    })
}

/// Decides `(k_a, k_b)`-choosability of `K_{a,b}`. The search stops at the
/// first B-family whose cover number is at most `a`.
pub fn is_choosable_complete(
    a: usize,
    b: usize,
    k_a: usize,
    k_b: usize,
    palette_cap: usize,
    budget: &Budget,
) -> Result<Choosability, SearchError> {
    check_args(b, k_a, k_b, palette_cap)?;
    if k_a > b {
        return Ok(Choosability::Yes {
            note: "k_a > b: every A-list keeps a colour unused by B".into(),
        });
    }
    let mut tally = Tally::default();
    for space in spaces(b, k_b) {
        let prefixes = space.prefixes(prefix_depth(b));
        let found = prefixes
            .par_iter()
            .map(|prefix| {
                let mut t = Tally::default();
                let mut hit = None;
                let _ = space.for_each_completion(prefix, &mut |family| {
                    if budget.exhausted() {
                        t.capped = true;
                        return ControlFlow::Break(());
                    }
                    match evaluate(family, k_a, Some(a), true, budget, &mut t) {
                        Some((_, r)) => {
                            hit = Some((family.to_vec(), r));
                            ControlFlow::Break(())
                        }
                        None => ControlFlow::Continue(()),
                    }
                });
                (hit, t)
            })
            .collect::<Vec<_>>();
        let mut first = None;
        for (hit, t) in found {
            tally = tally.merge(t);
            if first.is_none() {
                first = hit;
            }
        }
        if let Some((family, r)) = first {
            let cert = certificate(space.palette, k_a, k_b, &family, &r.family, a)?;
            return Ok(Choosability::No(Box::new(cert)));
        }
    }
    if tally.capped {
        return Err(SearchError::Timeout {
            lower: 1,
            upper: None,
            nodes: budget.nodes(),
        });
    }
    Ok(Choosability::Yes {
        note: format!(
            "no B-family among {} canonical ones is blocked by {a} A-lists",
            tally.families
        ),
    })
}

fn certificate(
    palette: usize,
    k_a: usize,
    k_b: usize,
    family: &[u64],
    a_family: &[u64],
    a: usize,
) -> Result<NonChoosabilityCertificate, SearchError> {
    let lists_b = to_lists(family);
    let mut lists_a: Vec<Vec<Colour>> = a_family
        .iter()
        .map(|&s| mask_elems(s).map(|c| c as Colour).collect())
        .collect();
    // repeated lists keep the instance blocked
    while lists_a.len() < a {
        lists_a.push(lists_a[0].clone());
    }
    let b = lists_b.len();
    let assignment = ListAssignment::new(palette, k_a, k_b, lists_a, lists_b)
        .map_err(|e| SearchError::Invalid(e.to_string()))?;
    let cert = NonChoosabilityCertificate::new(
        BipartiteGraph::complete(a, b),
        assignment,
        Provenance::Search,
        format!("exhaustive search: K_{{{a},{b}}} is not ({k_a},{k_b})-choosable"),
    )
    .map_err(|e| SearchError::Invalid(e.to_string()))?;
    match verify_certificate(&cert).map_err(|e| SearchError::Invalid(e.to_string()))? {
        Verdict::Verified => Ok(cert),
        Verdict::Refuted(_) => panic!("search produced a colourable witness"),
    }
}
