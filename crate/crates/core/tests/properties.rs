use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bilist_core::bounds::{
    check_coupon_condition, check_point, check_transversal_condition, ConditionId, Direction, SweepParams,
};
use bilist_core::budget::Budget;
use bilist_core::cert::Provenance;
use bilist_core::colorability::{find_proper_colouring, separator_exists, SeparatorQuery};
use bilist_core::probabilistic::{random_instance, sample_coupon_colouring, sample_transversal_colouring, Witness};
use bilist_core::search::{minimal_transversals, threshold_a, AStar, Hypergraph};
use bilist_core::steiner::{mbar_exact, SetFamily};
use bilist_core::{
    canonicalize_assignment, read_certificate, write_certificate, BipartiteGraph, Colour, ListAssignment,
    NonChoosabilityCertificate, ParamPoint,
};

fn random_lists(n: usize, k: usize, palette: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Colour>> {
    (0..n)
        .map(|_| {
            let mut l: Vec<Colour> = rand::seq::index::sample(rng, palette, k).into_iter().map(|c| c as Colour).collect();
            l.sort_unstable();
            l
        })
        .collect()
}

prop_compose! {
    fn small_instance()(a in 1usize..=4, b in 1usize..=4, ka in 1usize..=3, kb in 1usize..=3, extra in 0usize..=4, seed: u64, density in 0u8..=3)
        -> (BipartiteGraph, ListAssignment) {
        let palette = (ka.max(kb) + extra).min(8).min(a * ka + b * kb);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let la = ListAssignment::new(palette, ka, kb, random_lists(a, ka, palette, &mut rng), random_lists(b, kb, palette, &mut rng)).unwrap();
        let graph = if density == 3 {
            BipartiteGraph::complete(a, b)
        } else {
            let edges = (0..a)
                .flat_map(|v| (0..b).map(move |w| (v, w)))
                .filter(|_| rand::Rng::gen_range(&mut rng, 0u8..3) <= density)
                .collect::<Vec<_>>();
            BipartiteGraph::from_edges(a, b, edges).unwrap()
        };
        (graph, la)
    }
}

/// Colourable iff some B-colouring leaves each A-vertex a free colour.
fn brute_colourable(graph: &BipartiteGraph, la: &ListAssignment) -> bool {
    let b = graph.b_size();
    let total = la.k_b().pow(b as u32);
    (0..total).any(|mut code| {
        let colours: Vec<Colour> = (0..b)
            .map(|w| {
                let c = la.lists_b()[w][code % la.k_b()];
                code /= la.k_b();
                c
            })
            .collect();
        (0..graph.a_size()).all(|v| {
            la.lists_a()[v]
                .iter()
                .any(|c| graph.neighbours_of_a(v).iter().all(|&w| colours[w] != *c))
        })
    })
}

/// A separator meets every A-list and misses part of every B-list.
fn brute_separator(la: &ListAssignment) -> bool {
    (0u32..1 << la.palette_size()).any(|s| {
        la.lists_a().iter().all(|l| l.iter().any(|c| s >> c & 1 == 1))
            && la.lists_b().iter().all(|l| l.iter().any(|c| s >> c & 1 == 0))
    })
}

fn shuffled(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_form_is_constant_on_orbits((_, la) in small_instance(), seed: u64) {
        let canon = canonicalize_assignment(&la);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let colours: Vec<Colour> = shuffled(la.palette_size(), &mut rng).into_iter().map(|c| c as Colour).collect();
            let moved = la.permuted(&colours, &shuffled(la.a_len(), &mut rng), &shuffled(la.b_len(), &mut rng));
            prop_assert_eq!(canonicalize_assignment(&moved), canon.clone());
        }
        prop_assert_eq!(canonicalize_assignment(&canon), canon);
    }

    #[test]
    fn colourability_agrees_with_enumeration((graph, la) in small_instance()) {
        let found = find_proper_colouring(&graph, &la).unwrap();
        prop_assert_eq!(found.is_some(), brute_colourable(&graph, &la));
        if let Some(c) = found {
            prop_assert!(c.check(&graph, &la).is_ok());
        }
        if graph.is_complete() {
            let sep = separator_exists(&SeparatorQuery::from_assignment(&la));
            prop_assert_eq!(sep.is_some(), brute_separator(&la));
            prop_assert_eq!(sep.is_some(), brute_colourable(&graph, &la));
        }
    }

    #[test]
    fn certificate_text_round_trips((graph, la) in small_instance()) {
        let cert = NonChoosabilityCertificate::new(graph, la, Provenance::Search, "generated").unwrap();
        let text = write_certificate(&cert);
        prop_assert_eq!(read_certificate(&text).unwrap(), cert);
    }

    #[test]
    fn set_family_text_round_trips(l in 2usize..=10, k in 1usize..=4, seed: u64, m in 1usize..=12) {
        prop_assume!(k <= l);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut blocks: Vec<u64> = (0..m)
            .map(|_| rand::seq::index::sample(&mut rng, l, k).into_iter().fold(0u64, |acc, x| acc | 1 << x))
            .collect();
        blocks.sort_unstable();
        blocks.dedup();
        let fam = SetFamily::new(l, k, blocks).unwrap();
        prop_assert_eq!(SetFamily::parse(&fam.to_text()).unwrap(), fam);
    }

    #[test]
    fn minimal_transversals_agree_with_subsets(n in 1usize..=6, raw in prop::collection::vec(1u64..64, 1..=6)) {
        let masks: Vec<u64> = raw.iter().map(|m| m & ((1 << n) - 1)).filter(|&m| m != 0).collect();
        prop_assume!(!masks.is_empty());
        let h = Hypergraph::from_masks(n, &masks).unwrap();
        let mut got = minimal_transversals(&h, 1 << 12).unwrap().masks().unwrap();
        got.sort_unstable();
        let hits = |s: u64| masks.iter().all(|e| e & s != 0);
        let mut want: Vec<u64> = (1u64..1 << n)
            .filter(|&s| hits(s) && (0..n).all(|i| s >> i & 1 == 0 || !hits(s & !(1 << i))))
            .collect();
        want.sort_unstable();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn margins_agree_with_verdicts(xa in 1u64..2000, xb in 1u64..2000, ka in 1u64..300, kb in 1u64..300, complete: bool) {
        let p = if complete { ParamPoint::complete(xa, xb, ka, kb) } else { ParamPoint::degree(xa, xb, ka, kb) };
        let report = check_point(&p, &ConditionId::ALL, &SweepParams::default());
        prop_assert_eq!(format!("{report:?}"), format!("{:?}", check_point(&p, &ConditionId::ALL, &SweepParams::default())));
        for e in &report.entries {
            if !e.applicable {
                prop_assert!(!e.holds);
                continue;
            }
            if let Some(by_margin) = e.direction.accepts(e.margin) {
                // exact paths may decide within rounding of the boundary
                prop_assert!(by_margin == e.holds || e.margin.abs() < 1e-9 * (1.0 + e.margin.abs()),
                    "{:?} at {:?}: margin {} holds {}", e.id, p, e.margin, e.holds);
            } else {
                prop_assert_eq!(e.direction, Direction::Info);
            }
        }
    }

    #[test]
    fn degree_conditions_are_orientation_free(xa in 1u64..5000, xb in 1u64..5000, ka in 1u64..500, kb in 1u64..500) {
        let p = ParamPoint::degree(xa, xb, ka, kb);
        prop_assert_eq!(check_transversal_condition(&p).holds, check_transversal_condition(&p.swapped()).holds);
        prop_assert_eq!(check_coupon_condition(&p).holds, check_coupon_condition(&p.swapped()).holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn samplers_are_deterministic_and_sound(seed: u64, run in 0u64..1000) {
        let (g, la) = random_instance(12, 6, 2, 4, 3, 6, 10, seed).unwrap();
        for sampler in [sample_transversal_colouring, sample_coupon_colouring] {
            let x = sampler(&g, &la, run, 10_000);
            let y = sampler(&g, &la, run, 10_000);
            prop_assert_eq!(&x, &y);
            if let Ok(out) = x {
                let Witness::Colouring(c) = &out.result else { panic!("colouring expected") };
                prop_assert!(c.check(&g, &la).is_ok());
            }
        }
    }
}

#[test]
fn thresholds_are_monotone() {
    let star = |b: usize, ka: usize, kb: usize| match threshold_a(b, ka, kb, b * kb, &Budget::unlimited()).unwrap().a_star {
        AStar::Finite(v) => v,
        AStar::Unbounded => usize::MAX,
    };
    let mut grid = std::collections::HashMap::new();
    for b in 1..=3 {
        for ka in 1..=3 {
            for kb in 1..=3 {
                grid.insert((b, ka, kb), star(b, ka, kb));
            }
        }
    }
    for (&(b, ka, kb), &v) in &grid {
        if let Some(&w) = grid.get(&(b + 1, ka, kb)) {
            assert!(w <= v, "b: {b} {ka} {kb}");
        }
        if let Some(&w) = grid.get(&(b, ka + 1, kb)) {
            assert!(w >= v, "k_a: {b} {ka} {kb}");
        }
        if let Some(&w) = grid.get(&(b, ka, kb + 1)) {
            assert!(w >= v, "k_b: {b} {ka} {kb}");
        }
    }
}

#[test]
fn complement_duality() {
    let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
    for l in 4..=8 {
        for k2 in 2..=l - 2 {
            let r = mbar_exact(l - k2, k2, l, &Budget::unlimited()).unwrap();
            assert_eq!(r.value, binom(l, k2), "({}, {k2}, {l})", l - k2);
        }
    }
}
