//! Deciding whether a fixed list assignment admits a proper colouring.
//!
//! Complete graphs reduce to a two-sided hitting problem on the palette: a
//! proper colouring exists iff some colour set `S` meets every A-list while
//! its complement meets every B-list ([`separator_exists`]). Other graphs are
//! searched over B-colourings; an A-vertex stays colourable as long as its
//! list is not used up by its coloured neighbours.

use crate::bitset::BitSet;
use crate::cert::NonChoosabilityCertificate;
use crate::error::CoreError;
use crate::graph::BipartiteGraph;
use crate::lists::{Colour, ListAssignment, ProperColouring};

/// Clause form of a complete-bipartite instance. Positive clauses are the
/// A-lists (some colour must go to `S`), negative clauses the B-lists (some
/// colour must stay out of `S`).
#[derive(Clone, Debug)]
pub struct SeparatorQuery {
    pub palette_size: usize,
    pub a_clauses: Vec<BitSet>,
    pub b_clauses: Vec<BitSet>,
}

impl SeparatorQuery {
    pub fn from_assignment(assignment: &ListAssignment) -> Self {
        Self {
            palette_size: assignment.palette_size(),
            a_clauses: (0..assignment.a_len()).map(|v| assignment.list_a_bits(v)).collect(),
            b_clauses: (0..assignment.b_len()).map(|w| assignment.list_b_bits(w)).collect(),
        }
    }
}

/// Returns `S` with `S ∩ L(v) ≠ ∅` for every A-clause and `L(w) ⊄ S` for
/// every B-clause, or `None` if no such set exists.
pub fn separator_exists(query: &SeparatorQuery) -> Option<BitSet> {
    let m = query.palette_size;
    let mut inside = BitSet::new(m);
    let mut outside = BitSet::new(m);
    // pure colours: only one side can use them
    let mut in_a = BitSet::new(m);
    let mut in_b = BitSet::new(m);
    for c in &query.a_clauses {
        in_a.union_with(c);
    }
    for c in &query.b_clauses {
        in_b.union_with(c);
    }
    for c in 0..m {
        match (in_a.contains(c), in_b.contains(c)) {
            (true, false) => inside.insert(c),
            (false, _) => outside.insert(c),
            _ => {}
        }
    }
    if dpll(query, &mut inside, &mut outside) {
        Some(inside)
    } else {
        None
    }
}

enum Status {
    Conflict,
    Done,
    Branch(usize),
}

fn propagate(query: &SeparatorQuery, inside: &mut BitSet, outside: &mut BitSet) -> Status {
    loop {
        let mut changed = false;
        let mut best: Option<(usize, usize)> = None;
        for (clause, positive) in query
            .a_clauses
            .iter()
            .map(|c| (c, true))
            .chain(query.b_clauses.iter().map(|c| (c, false)))
        {
            let (sat_side, unsat_side) = if positive {
                (&*inside, &*outside)
            } else {
                (&*outside, &*inside)
            };
            if clause.intersects(sat_side) {
                continue;
            }
            let mut open = clause.clone();
            open.difference_with(unsat_side);
            match open.len() {
                0 => return Status::Conflict,
                1 => {
                    let c = open.first().expect("one open literal");
                    if positive {
                        inside.insert(c);
                    } else {
                        outside.insert(c);
                    }
                    changed = true;
                }
                n => {
                    if best.is_none_or(|(bn, _)| n < bn) {
                        best = Some((n, open.first().expect("open literals")));
                    }
                }
            }
        }
        if !changed {
            return match best {
                None => Status::Done,
                Some((_, c)) => Status::Branch(c),
            };
        }
    }
}

fn dpll(query: &SeparatorQuery, inside: &mut BitSet, outside: &mut BitSet) -> bool {
    match propagate(query, inside, outside) {
        Status::Conflict => false,
        Status::Done => {
            // undecided colours can go either way; keep them out of S
            for c in 0..query.palette_size {
                if !inside.contains(c) {
                    outside.insert(c);
                }
            }
            true
        }
        Status::Branch(c) => {
            for into_s in [true, false] {
                let mut i2 = inside.clone();
                let mut o2 = outside.clone();
                if into_s {
                    i2.insert(c);
                } else {
                    o2.insert(c);
                }
                if dpll(query, &mut i2, &mut o2) {
                    *inside = i2;
                    *outside = o2;
                    return true;
                }
            }
            false
        }
    }
}

/// Searches for a proper L-colouring. Any colouring returned has passed
/// [`ProperColouring::check`].
pub fn find_proper_colouring(
    graph: &BipartiteGraph,
    assignment: &ListAssignment,
) -> Result<Option<ProperColouring>, CoreError> {
    assignment.check_shape(graph)?;
    let found = if graph.is_effectively_complete() {
        separator_exists(&SeparatorQuery::from_assignment(assignment)).map(|s| colouring_from_separator(assignment, &s))
    } else {
        BSearch::new(graph, assignment).solve()
    };
    if let Some(c) = &found {
        if let Err(e) = c.check(graph, assignment) {
            panic!("colouring search produced an invalid witness: {e}");
        }
    }
    Ok(found)
}

fn colouring_from_separator(assignment: &ListAssignment, s: &BitSet) -> ProperColouring {
    let pick = |list: &Vec<Colour>, want_inside: bool| {
        *list
            .iter()
            .find(|&&c| s.contains(c as usize) == want_inside)
            .expect("separator meets every list on the right side")
    };
    ProperColouring {
        colours_a: assignment.lists_a().iter().map(|l| pick(l, true)).collect(),
        colours_b: assignment.lists_b().iter().map(|l| pick(l, false)).collect(),
    }
}

/// Colours a B-vertex takes across all proper colourings.
pub fn admitted_colours(
    graph: &BipartiteGraph,
    assignment: &ListAssignment,
    w: usize,
) -> Result<Vec<Colour>, CoreError> {
    assignment.check_shape(graph)?;
    let mut out = Vec::new();
    for &c in &assignment.lists_b()[w] {
        let mut search = BSearch::new(graph, assignment);
        search.restrict(w, c);
        if search.solve().is_some() {
            out.push(c);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Refuted(ProperColouring),
}

/// A certificate is verified iff its instance has no proper colouring.
pub fn verify_certificate(cert: &NonChoosabilityCertificate) -> Result<Verdict, CoreError> {
    Ok(match find_proper_colouring(&cert.graph, &cert.assignment)? {
        None => Verdict::Verified,
        Some(c) => Verdict::Refuted(c),
    })
}

/// Backtracking over B-colourings with domain propagation.
///
/// B-domains are masks over list positions. When an A-vertex has exactly
/// one unblocked colour left, that colour is struck from the domains of its
/// uncoloured neighbours; a singleton domain is assigned immediately. Before
/// branching, every remaining (vertex, colour) choice is probed and removed
/// if it propagates to a conflict.
struct BSearch<'a> {
    assignment: &'a ListAssignment,
    // for (w, j): the (v, i) with v ~ w and L(v)[i] == L(w)[j]
    hits: Vec<Vec<Vec<(u32, u32)>>>,
    // for (v, i): the (w, j) with w ~ v and L(w)[j] == L(v)[i]
    threats: Vec<Vec<Vec<(u32, u32)>>>,
    order: Vec<usize>,
    state: SearchState,
}

#[derive(Clone)]
struct SearchState {
    domain: Vec<u64>,
    value: Vec<Option<u32>>,
    blockers: Vec<Vec<u32>>,
    free: Vec<u32>,
}

impl<'a> BSearch<'a> {
    fn new(graph: &BipartiteGraph, assignment: &'a ListAssignment) -> Self {
        let nb = assignment.b_len();
        let na = assignment.a_len();
        assert!(assignment.k_b() <= 64, "B-lists longer than 64 colours are not supported");
        let mut hits = vec![vec![Vec::new(); assignment.k_b()]; nb];
        let mut threats = vec![vec![Vec::new(); assignment.k_a()]; na];
        for v in 0..na {
            let la = &assignment.lists_a()[v];
            for w in graph.neighbours_of_a(v) {
                let lb = &assignment.lists_b()[w];
                for (i, c) in la.iter().enumerate() {
                    if let Ok(j) = lb.binary_search(c) {
                        hits[w][j].push((v as u32, i as u32));
                        threats[v][i].push((w as u32, j as u32));
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..nb).collect();
        let degrees: Vec<usize> = (0..nb).map(|w| graph.degree_b(w)).collect();
        order.sort_by_key(|&w| (std::cmp::Reverse(degrees[w]), w));
        let full = if assignment.k_b() == 64 {
            u64::MAX
        } else {
            (1u64 << assignment.k_b()) - 1
        };
        Self {
            assignment,
            hits,
            threats,
            order,
            state: SearchState {
                domain: vec![full; nb],
                value: vec![None; nb],
                blockers: vec![vec![0; assignment.k_a()]; na],
                free: vec![assignment.k_a() as u32; na],
            },
        }
    }

    fn restrict(&mut self, w: usize, colour: Colour) {
        let j = self.assignment.lists_b()[w]
            .binary_search(&colour)
            .expect("colour is in the list");
        self.state.domain[w] &= 1u64 << j;
    }

    fn solve(mut self) -> Option<ProperColouring> {
        let mut state = self.state.clone();
        // A-vertices with an empty list can never be coloured
        if self.assignment.k_a() == 0 && self.assignment.a_len() > 0 {
            return None;
        }
        let mut queue: Vec<usize> = (0..self.assignment.b_len())
            .filter(|&w| state.domain[w].count_ones() <= 1)
            .collect();
        if !self.settle(&mut state, &mut queue) {
            return None;
        }
        let solved = self.dfs(state)?;
        self.state = solved;
        Some(self.colouring())
    }

    fn colouring(&self) -> ProperColouring {
        let la = self.assignment;
        let colours_b: Vec<Colour> = (0..la.b_len())
            .map(|w| la.lists_b()[w][self.state.value[w].expect("all B coloured") as usize])
            .collect();
        let colours_a = (0..la.a_len())
            .map(|v| {
                let i = self.state.blockers[v]
                    .iter()
                    .position(|&n| n == 0)
                    .expect("every A-vertex keeps a free colour");
                la.lists_a()[v][i]
            })
            .collect();
        ProperColouring { colours_a, colours_b }
    }

    /// Assigns every queued vertex whose domain is a singleton and
    /// propagates; false on conflict.
    fn settle(&self, state: &mut SearchState, queue: &mut Vec<usize>) -> bool {
        while let Some(w) = queue.pop() {
            if state.value[w].is_some() {
                continue;
            }
            match state.domain[w].count_ones() {
                0 => return false,
                1 => {
                    let j = state.domain[w].trailing_zeros();
                    if !self.assign(state, w, j, queue) {
                        return false;
                    }
                }
                _ => {}
            }
        }
        true
    }

    fn assign(&self, state: &mut SearchState, w: usize, j: u32, queue: &mut Vec<usize>) -> bool {
        state.value[w] = Some(j);
        state.domain[w] = 1u64 << j;
        for &(v, i) in &self.hits[w][j as usize] {
            let (v, i) = (v as usize, i as usize);
            state.blockers[v][i] += 1;
            if state.blockers[v][i] != 1 {
                continue;
            }
            state.free[v] -= 1;
            match state.free[v] {
                0 => return false,
                1 => {
                    let last = state.blockers[v].iter().position(|&n| n == 0).expect("one free colour");
                    for &(w2, j2) in &self.threats[v][last] {
                        let w2 = w2 as usize;
                        if state.value[w2].is_some() {
                            continue;
                        }
                        let before = state.domain[w2];
                        state.domain[w2] &= !(1u64 << j2);
                        if state.domain[w2] != before && state.domain[w2].count_ones() <= 1 {
                            queue.push(w2);
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }

    /// Removes (vertex, value) pairs that propagate to a conflict, until
    /// nothing changes. False if some domain empties.
    fn probe(&self, state: &mut SearchState) -> bool {
        loop {
            let mut changed = false;
            for &w in &self.order {
                if state.value[w].is_some() {
                    continue;
                }
                let mut dom = state.domain[w];
                while dom != 0 {
                    let j = dom.trailing_zeros();
                    dom &= dom - 1;
                    let mut trial = state.clone();
                    let mut queue = Vec::new();
                    if !(self.assign(&mut trial, w, j, &mut queue) && self.settle(&mut trial, &mut queue)) {
                        state.domain[w] &= !(1u64 << j);
                        changed = true;
                    }
                }
                match state.domain[w].count_ones() {
                    0 => return false,
                    1 => {
                        let mut queue = vec![w];
                        if !self.settle(state, &mut queue) {
                            return false;
                        }
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn dfs(&self, mut state: SearchState) -> Option<SearchState> {
        if !self.probe(&mut state) {
            return None;
        }
        let Some(&w) = self.order.iter().find(|&&w| state.value[w].is_none()) else {
            return Some(state);
        };
        let mut dom = state.domain[w];
        while dom != 0 {
            let j = dom.trailing_zeros();
            dom &= dom - 1;
            let mut next = state.clone();
            let mut queue = Vec::new();
            if self.assign(&mut next, w, j, &mut queue) && self.settle(&mut next, &mut queue) {
                if let Some(done) = self.dfs(next) {
                    return Some(done);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classic_2_2() -> ListAssignment {
        ListAssignment::new(
            4,
            2,
            2,
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
            vec![vec![0, 1], vec![2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn classic_instance_has_no_colouring() {
        let la = classic_2_2();
        assert!(separator_exists(&SeparatorQuery::from_assignment(&la)).is_none());
        let g = BipartiteGraph::complete(4, 2);
        assert!(find_proper_colouring(&g, &la).unwrap().is_none());
        // the same instance through the general search path
        let g2 = BipartiteGraph::from_edges(4, 2, (0..4).flat_map(|a| [(a, 0), (a, 1)])).unwrap();
        assert!(g2.is_effectively_complete());
        let mut rows = vec![BitSet::full(2); 4];
        rows[0] = BitSet::full(2);
        let g3 = BipartiteGraph::from_rows(2, rows).unwrap();
        assert!(BSearch::new(&g3, &la).solve().is_none());
    }

    #[test]
    fn three_of_four_pairs_is_colourable() {
        let la = ListAssignment::new(4, 2, 2, vec![vec![0, 2], vec![0, 3], vec![1, 2]], vec![vec![0, 1], vec![2, 3]])
            .unwrap();
        let g = BipartiteGraph::complete(3, 2);
        let c = find_proper_colouring(&g, &la).unwrap().expect("colourable");
        assert!(c.check(&g, &la).is_ok());
    }

    #[test]
    fn tiny_separator() {
        let la = ListAssignment::new(2, 2, 2, vec![vec![0, 1]], vec![vec![0, 1]]).unwrap();
        let s = separator_exists(&SeparatorQuery::from_assignment(&la)).unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn single_vertex_takes_its_first_colour() {
        let la = ListAssignment::new(3, 1, 3, vec![], vec![vec![0, 1, 2]]).unwrap();
        let g = BipartiteGraph::complete(0, 1);
        let c = find_proper_colouring(&g, &la).unwrap().unwrap();
        assert_eq!(c.colours_b, vec![0]);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let g = BipartiteGraph::complete(3, 2);
        assert!(matches!(find_proper_colouring(&g, &classic_2_2()), Err(CoreError::ShapeMismatch(_))));
    }

    #[test]
    fn sparse_graph_path() {
        // a path b0 - a0 - b1 where a0 only has colours used by both ends
        let g = BipartiteGraph::from_edges(1, 2, [(0, 0), (0, 1)]).unwrap();
        let la = ListAssignment::new(2, 2, 1, vec![vec![0, 1]], vec![vec![0], vec![1]]).unwrap();
        assert!(find_proper_colouring(&g, &la).unwrap().is_none());
        let g2 = BipartiteGraph::from_edges(1, 2, [(0, 0)]).unwrap();
        let c = find_proper_colouring(&g2, &la).unwrap().unwrap();
        assert_eq!(c.colours_a, vec![1]);
        assert_eq!(admitted_colours(&g2, &la, 1).unwrap(), vec![1]);
    }
}
