//! Semi-local (2,1)-improvement for 3-Set Cover.
//!
//! A maximal disjoint collection of 3-sets is chosen greedily in canonical
//! order; the remaining elements are covered by a maximum matching of the
//! available 2-sets and 1-sets for whatever is left. A move removes at most
//! one chosen 3-set and inserts at most two, and is committed only when the
//! pair `(total sets, 1-sets)` of the completed cover decreases
//! lexicographically.
//!
//! Moves never cross connected components of the residual (two elements are
//! connected when some base set contains both), so each component is solved
//! on its own and the results are concatenated.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::bitset::ElemSet;
use crate::combinatorics::subsets_of_size;
use crate::error::InstanceError;
use crate::instance::{ChosenSet, Cover, Instance};
use crate::matching::{max_matching, Augmenter, Graph};
use crate::packing::OnesGate;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiLocalResult {
    pub cover: Cover,
    pub ones: usize,
    pub threes: usize,
    pub iterations: usize,
}

/// Connected components of `residual` under "some base set contains both".
/// Components are sorted internally and listed by smallest element.
pub fn residual_components(inst: &Instance, residual: &ElemSet) -> Vec<Vec<u32>> {
    let mut seen = ElemSet::empty(inst.n());
    let mut out = Vec::new();
    for e in residual.iter() {
        if !seen.contains(e) {
            out.push(component_from(inst, residual, e, &mut seen));
        }
    }
    out
}

fn component_from(inst: &Instance, residual: &ElemSet, start: u32, seen: &mut ElemSet) -> Vec<u32> {
    let mut comp = vec![start];
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(e) = queue.pop_front() {
        for &b in inst.containing(e) {
            for &x in inst.base_set(b) {
                if residual.contains(x) && !seen.contains(x) {
                    seen.insert(x);
                    comp.push(x);
                    queue.push_back(x);
                }
            }
        }
    }
    comp.sort_unstable();
    comp
}

/// Local search state for one component.
struct ComponentSolver<'a> {
    inst: &'a Instance,
    elems: Vec<u32>,
    /// Distinct 3-subsets in canonical order, as local ids, with a source base set.
    triples: Vec<([usize; 3], usize)>,
    triples_of: Vec<Vec<usize>>,
    pairs: Vec<((usize, usize), usize)>,
    /// All available 2-sets as a graph on local ids.
    graph: Graph,
    /// Committed state: used elements and a maximum matching of the rest.
    cur_used: ElemSet,
    cur_mate: Vec<Option<usize>>,
    augmenter: Augmenter,
    memo: HashMap<ElemSet, usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Objective {
    total: usize,
    ones: usize,
}

impl<'a> ComponentSolver<'a> {
    fn new(inst: &'a Instance, elems: Vec<u32>) -> Self {
        let local: HashMap<u32, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut triple_set: BTreeSet<([usize; 3], usize)> = BTreeSet::new();
        let mut pair_set: BTreeSet<((usize, usize), usize)> = BTreeSet::new();
        let mut bases: BTreeSet<usize> = BTreeSet::new();
        for &e in &elems {
            bases.extend(inst.containing(e).iter().copied());
        }
        for b in bases {
            let part: Vec<u32> = inst
                .base_set(b)
                .iter()
                .filter_map(|e| local.get(e).map(|&l| l as u32))
                .collect();
            for t in subsets_of_size(&part, 3) {
                triple_set.insert(([t[0] as usize, t[1] as usize, t[2] as usize], b));
            }
            for p in subsets_of_size(&part, 2) {
                pair_set.insert(((p[0] as usize, p[1] as usize), b));
            }
        }
        let mut triples: Vec<([usize; 3], usize)> = Vec::new();
        for (t, b) in triple_set {
            if triples.last().map(|l| l.0) != Some(t) {
                triples.push((t, b));
            }
        }
        let mut pairs: Vec<((usize, usize), usize)> = Vec::new();
        for (p, b) in pair_set {
            if pairs.last().map(|l| l.0) != Some(p) {
                pairs.push((p, b));
            }
        }
        let mut triples_of = vec![Vec::new(); elems.len()];
        for (i, (t, _)) in triples.iter().enumerate() {
            for &x in t {
                triples_of[x].push(i);
            }
        }
        let c = elems.len();
        let graph = Graph::new(c, pairs.iter().map(|(p, _)| *p)).expect("pairs are distinct");
        let mut solver = ComponentSolver {
            inst,
            elems,
            triples,
            triples_of,
            pairs,
            graph,
            cur_used: ElemSet::empty(c),
            cur_mate: vec![None; c],
            augmenter: Augmenter::new(c),
            memo: HashMap::new(),
        };
        for root in 0..c {
            solver.augmenter.augment_from(&solver.graph, None, &mut solver.cur_mate, root);
        }
        solver
    }

    /// Maximum matching avoiding `used`, warm-started from the committed
    /// state one vertex change at a time: after deleting a matched vertex
    /// only its former mate can start an augmenting path, and after adding
    /// a vertex only that vertex can.
    fn matching_for(&mut self, used: &ElemSet) -> Vec<Option<usize>> {
        let c = self.elems.len();
        let mut mate = self.cur_mate.clone();
        let mut active: Vec<bool> = (0..c).map(|x| !self.cur_used.contains(x as u32)).collect();
        for x in 0..c {
            let now = used.contains(x as u32);
            if now == self.cur_used.contains(x as u32) {
                continue;
            }
            active[x] = !now;
            let root = if now {
                match mate[x].take() {
                    Some(m) => {
                        mate[m] = None;
                        m
                    }
                    None => continue,
                }
            } else {
                x
            };
            self.augmenter.augment_from(&self.graph, Some(&active), &mut mate, root);
        }
        mate
    }

    fn matching_size(&mut self, used: &ElemSet) -> usize {
        if let Some(&m) = self.memo.get(used) {
            return m;
        }
        let m = self.matching_for(used).iter().flatten().count() / 2;
        self.memo.insert(used.clone(), m);
        m
    }

    fn commit(&mut self, used: &ElemSet) {
        self.cur_mate = self.matching_for(used);
        self.cur_used = used.clone();
    }

    fn graph_on(&self, remaining: &ElemSet) -> Graph {
        let edges = self
            .pairs
            .iter()
            .filter(|((a, b), _)| remaining.contains(*a as u32) && remaining.contains(*b as u32))
            .map(|(p, _)| *p);
        Graph::new(self.elems.len(), edges).expect("pairs are distinct")
    }

    fn evaluate(&mut self, chosen: usize, used: &ElemSet) -> Objective {
        let rem = self.elems.len() - used.len();
        let m = self.matching_size(used);
        Objective {
            total: chosen + m + (rem - 2 * m),
            ones: rem - 2 * m,
        }
    }

    fn triple_elems(&self, t: usize) -> [u32; 3] {
        let [a, b, c] = self.triples[t].0;
        [a as u32, b as u32, c as u32]
    }

    fn fits(&self, t: usize, used: &ElemSet) -> bool {
        !used.contains_any(&self.triple_elems(t))
    }

    /// Runs greedy + local search; returns chosen triples and the move count.
    fn search(&mut self) -> (Vec<usize>, usize) {
        let c = self.elems.len();
        let mut used = ElemSet::empty(c);
        let mut chosen: Vec<usize> = Vec::new();
        for t in 0..self.triples.len() {
            if self.fits(t, &used) {
                used.insert_all(&self.triple_elems(t));
                chosen.push(t);
            }
        }
        self.commit(&used);
        let mut current = self.evaluate(chosen.len(), &used);
        let mut iterations = 0;
        let cap = c * (c + 1) + 1;
        while let Some((removed, inserted, obj)) = self.find_move(&chosen, &used, current) {
            debug_assert!(obj < current);
            if let Some(r) = removed {
                chosen.retain(|&x| x != r);
                used.remove_all(&self.triple_elems(r));
            }
            for t in inserted {
                used.insert_all(&self.triple_elems(t));
                chosen.push(t);
            }
            self.commit(&used);
            current = obj;
            iterations += 1;
            assert!(iterations <= cap, "semi-local search failed to terminate");
        }
        chosen.sort_unstable();
        (chosen, iterations)
    }

    /// Candidate triples lying inside `pool` (elements not in `used`).
    fn free_triples(&self, used: &ElemSet, around: Option<&[u32]>) -> Vec<usize> {
        match around {
            None => (0..self.triples.len()).filter(|&t| self.fits(t, used)).collect(),
            Some(anchor) => {
                let mut set: BTreeSet<usize> = BTreeSet::new();
                for &x in anchor {
                    set.extend(self.triples_of[x as usize].iter().copied());
                }
                set.into_iter().filter(|&t| self.fits(t, used)).collect()
            }
        }
    }

    fn find_move(
        &mut self,
        chosen: &[usize],
        used: &ElemSet,
        current: Objective,
    ) -> Option<(Option<usize>, Vec<usize>, Objective)> {
        // Insertions without removal.
        let free = self.free_triples(used, None);
        for (i, &t) in free.iter().enumerate() {
            let mut u1 = used.clone();
            u1.insert_all(&self.triple_elems(t));
            let obj = self.evaluate(chosen.len() + 1, &u1);
            if obj < current {
                return Some((None, vec![t], obj));
            }
            for &t2 in &free[i + 1..] {
                if self.fits(t2, &u1) {
                    let mut u2 = u1.clone();
                    u2.insert_all(&self.triple_elems(t2));
                    let obj = self.evaluate(chosen.len() + 2, &u2);
                    if obj < current {
                        return Some((None, vec![t, t2], obj));
                    }
                }
            }
        }
        // Remove one chosen 3-set, insert up to two inside the freed pool.
        let mut order: Vec<usize> = chosen.to_vec();
        order.sort_unstable();
        for r in order {
            let r_elems = self.triple_elems(r);
            let mut base = used.clone();
            base.remove_all(&r_elems);
            let obj = self.evaluate(chosen.len() - 1, &base);
            if obj < current {
                return Some((Some(r), vec![], obj));
            }
            let first: Vec<usize> = self
                .free_triples(&base, Some(&r_elems))
                .into_iter()
                .filter(|&t| t != r)
                .collect();
            for &t in &first {
                let mut u1 = base.clone();
                u1.insert_all(&self.triple_elems(t));
                let obj = self.evaluate(chosen.len(), &u1);
                if obj < current {
                    return Some((Some(r), vec![t], obj));
                }
            }
            let all_free: Vec<usize> = self
                .free_triples(&base, None)
                .into_iter()
                .filter(|&t| t != r)
                .collect();
            for &t in &first {
                let mut u1 = base.clone();
                u1.insert_all(&self.triple_elems(t));
                for &t2 in &all_free {
                    if t2 == t || !self.fits(t2, &u1) {
                        continue;
                    }
                    // Each unordered pair with at least one set touching the
                    // freed elements is tried once.
                    if first.contains(&t2) && t2 < t {
                        continue;
                    }
                    let mut u2 = u1.clone();
                    u2.insert_all(&self.triple_elems(t2));
                    let obj = self.evaluate(chosen.len() + 1, &u2);
                    if obj < current {
                        return Some((Some(r), vec![t, t2], obj));
                    }
                }
            }
        }
        None
    }

    fn into_sets(mut self, chosen: &[usize]) -> (Vec<ChosenSet>, usize) {
        let c = self.elems.len();
        let mut used = ElemSet::empty(c);
        let mut sets = Vec::new();
        for &t in chosen {
            let te = self.triple_elems(t);
            used.insert_all(&te);
            let globals = te.iter().map(|&l| self.elems[l as usize]).collect();
            sets.push(ChosenSet::new(self.triples[t].1, globals));
        }
        let mut remaining = ElemSet::full(c);
        remaining.difference_with(&used);
        let g = self.graph_on(&remaining);
        let m = max_matching(&g);
        let pair_base: HashMap<(usize, usize), usize> = self.pairs.iter().copied().collect();
        for &(a, b) in &m.edges {
            remaining.remove(a as u32);
            remaining.remove(b as u32);
            sets.push(ChosenSet::new(
                pair_base[&(a, b)],
                vec![self.elems[a], self.elems[b]],
            ));
        }
        let mut ones = 0;
        for l in remaining.iter() {
            let e = self.elems[l as usize];
            sets.push(ChosenSet::new(self.inst.containing(e)[0], vec![e]));
            ones += 1;
        }
        self.memo.clear();
        (sets, ones)
    }
}

/// Runs the semi-local solver on the sub-universe `residual` of `inst`, using
/// subsets of size at most 3 of the base sets restricted to `residual`.
pub fn semilocal_on(inst: &Instance, residual: &ElemSet) -> SemiLocalResult {
    let mut cover = Cover::default();
    let mut ones = 0;
    let mut threes = 0;
    let mut iterations = 0;
    for comp in residual_components(inst, residual) {
        let mut solver = ComponentSolver::new(inst, comp);
        let (chosen, it) = solver.search();
        threes += chosen.len();
        iterations += it;
        let (sets, o) = solver.into_sets(&chosen);
        ones += o;
        cover.members.extend(sets);
    }
    cover.sort_canonical();
    SemiLocalResult {
        cover,
        ones,
        threes,
        iterations,
    }
}

fn require_k3(inst: &Instance) -> Result<(), InstanceError> {
    if inst.k() > 3 {
        return Err(InstanceError::KTooLarge { k: inst.k(), max: 3 });
    }
    Ok(())
}

/// Semi-local (2,1)-improvement on a 3-Set Cover instance.
pub fn semilocal_cover(inst: &Instance) -> Result<SemiLocalResult, InstanceError> {
    require_k3(inst)?;
    Ok(semilocal_on(inst, &inst.universe()))
}

/// Number of 1-sets in the semi-local solution of a 3-Set Cover instance.
pub fn count_ones(inst: &Instance) -> Result<usize, InstanceError> {
    semilocal_cover(inst).map(|r| r.ones)
}

/// The 1-set count of the semi-local solver on a residual universe, used to
/// gate restricted packing moves. Results are cached per residual component,
/// and [`OnesGate::ones_delta`] only re-solves components touching a change.
pub struct SemiLocalGate<'a> {
    inst: &'a Instance,
    cache: HashMap<Vec<u32>, usize>,
    evaluations: usize,
}

impl<'a> SemiLocalGate<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        SemiLocalGate {
            inst,
            cache: HashMap::new(),
            evaluations: 0,
        }
    }

    /// Number of distinct components solved so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn component_ones(&mut self, comp: Vec<u32>) -> usize {
        if let Some(&v) = self.cache.get(&comp) {
            return v;
        }
        self.evaluations += 1;
        let mut solver = ComponentSolver::new(self.inst, comp.clone());
        let (chosen, _) = solver.search();
        let (_, ones) = solver.into_sets(&chosen);
        self.cache.insert(comp, ones);
        ones
    }

    /// Sum over residual components that contain a changed element or share
    /// a base set with one (those are the only components that can differ).
    fn ones_touching(&mut self, residual: &ElemSet, changed: &[u32]) -> usize {
        let mut seeds = Vec::new();
        for &e in changed {
            for &b in self.inst.containing(e) {
                seeds.extend(self.inst.base_set(b).iter().copied().filter(|&x| residual.contains(x)));
            }
        }
        let mut seen = ElemSet::empty(self.inst.n());
        let mut total = 0;
        for e in seeds {
            if !seen.contains(e) {
                let comp = component_from(self.inst, residual, e, &mut seen);
                total += self.component_ones(comp);
            }
        }
        total
    }
}

impl OnesGate for SemiLocalGate<'_> {
    fn ones(&mut self, uncovered: &ElemSet) -> usize {
        residual_components(self.inst, uncovered)
            .into_iter()
            .map(|c| self.component_ones(c))
            .sum()
    }

    fn ones_delta(&mut self, before: &ElemSet, after: &ElemSet, touched: &[u32]) -> isize {
        let old = self.ones_touching(before, touched) as isize;
        let new = self.ones_touching(after, touched) as isize;
        new - old
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, validate_cover};

    #[test]
    fn partitionable_instance_uses_only_triples() {
        let inst = parse_instance("p setcover 6 3 3\ns 1 2 3\ns 4 5 6\ns 2 3 4").unwrap();
        let r = semilocal_cover(&inst).unwrap();
        assert_eq!(validate_cover(&inst, &r.cover).unwrap().total, 2);
        assert_eq!(r.ones, 0);
        assert_eq!(r.threes, 2);
    }

    #[test]
    fn single_element() {
        let inst = parse_instance("p setcover 1 1 3\ns 1").unwrap();
        let r = semilocal_cover(&inst).unwrap();
        assert_eq!((r.cover.members.len(), r.ones), (1, 1));
    }

    #[test]
    fn isolated_pair_needs_two_ones() {
        let inst = parse_instance("p setcover 2 2 3\ns 1\ns 2").unwrap();
        assert_eq!(count_ones(&inst).unwrap(), 2);
    }

    #[test]
    fn removal_move_fixes_greedy_triple() {
        // Greedy takes {1,2,3} leaving 4 alone; {1,2} + {3,4} has no 1-set.
        let inst = parse_instance("p setcover 4 2 3\ns 1 2 3\ns 3 4").unwrap();
        let r = semilocal_cover(&inst).unwrap();
        assert_eq!(r.ones, 0);
        assert_eq!(r.cover.members.len(), 2);
        assert!(r.iterations >= 1);
    }

    #[test]
    fn rejects_large_sets() {
        let inst = parse_instance("p setcover 4 1 4\ns 1 2 3 4").unwrap();
        assert!(semilocal_cover(&inst).is_err());
    }

    #[test]
    fn gate_delta_matches_full_recount() {
        let inst = parse_instance("p setcover 6 3 3\ns 1 2\ns 3 4\ns 5 6").unwrap();
        let mut gate = SemiLocalGate::new(&inst);
        let before = inst.universe();
        let mut after = before.clone();
        after.remove(0);
        after.remove(3);
        let full = gate.ones(&after) as isize - gate.ones(&before) as isize;
        assert_eq!(gate.ones_delta(&before, &after, &[0, 3]), full);
        assert_eq!(full, 2);
    }
}
