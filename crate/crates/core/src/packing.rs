//! Local-search i-set packing with an optional 1-set gate.
//!
//! An improvement removes a set `R` of at most `s` packing members and
//! inserts `|R| + 1` pairwise disjoint i-sets lying inside the free elements
//! plus the elements of `R`. Searches only consider *connected* improvements:
//! every inserted set meets `R` and the removed members are linked through
//! inserted sets. Without a gate this loses nothing, since any improvement
//! contains a connected one or a plain insertion. Plain insertions (`p = 0`)
//! are tried first, then removals of size `1..=s` in increasing order; the
//! first acceptable improvement in this canonical order is committed.
//!
//! In restricted mode a move is accepted only if the gate (the semi-local
//! 1-set count of the elements left uncovered) does not increase relative to
//! its value just before the move.

use std::collections::{BTreeMap, BTreeSet};

use crate::bitset::ElemSet;
use crate::combinatorics::subsets_of_size;
use crate::instance::{canonical_cmp, ChosenSet, Instance, Packing};

/// Parameters of one packing phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImprovementParams {
    pub i: usize,
    /// Maximum number of members removed by one improvement.
    pub s: usize,
    pub restricted: bool,
}

/// The number of 1-sets needed to finish the cover of an uncovered set.
pub trait OnesGate {
    fn ones(&mut self, uncovered: &ElemSet) -> usize;

    /// `ones(after) - ones(before)`, where the two sets differ only in
    /// `changed`. Implementations may evaluate just the affected region.
    fn ones_delta(&mut self, before: &ElemSet, after: &ElemSet, changed: &[u32]) -> isize {
        let _ = changed;
        self.ones(after) as isize - self.ones(before) as isize
    }
}

/// One replacement: `removed` members leave, `inserted` sets enter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Improvement {
    pub removed: Vec<ChosenSet>,
    pub inserted: Vec<ChosenSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certification {
    /// Exhaustive search found no acceptable improvement.
    Certified { nodes: u64 },
    Witness(Improvement),
    BudgetExceeded { nodes: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ImproveStats {
    pub commits: usize,
    /// Committed improvements by number of removed members.
    pub by_removed: BTreeMap<usize, usize>,
    /// Gate value at the start and after every commit (restricted mode).
    pub gate_trace: Vec<usize>,
    /// Improvements found but refused by the gate.
    pub gate_rejections: usize,
}

#[derive(Debug, Clone)]
pub struct ImproveOutcome {
    pub packing: Packing,
    pub stats: ImproveStats,
}

#[derive(Debug, Clone)]
struct Candidate {
    elems: Vec<u32>,
    base: usize,
}

/// The i-sets available inside a pool of elements, indexed for search.
pub struct PackingContext<'a> {
    inst: &'a Instance,
    i: usize,
    pool: ElemSet,
    cands: Vec<Candidate>,
    cand_of: Vec<Vec<usize>>,
}

impl<'a> PackingContext<'a> {
    /// All distinct i-subsets of `B ∩ pool` over base sets `B`, in canonical
    /// order; duplicates keep the smallest base index.
    pub fn new(inst: &'a Instance, i: usize, pool: &ElemSet) -> Self {
        let mut found: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for (b, set) in inst.base_sets().iter().enumerate() {
            let part: Vec<u32> = set.iter().copied().filter(|&e| pool.contains(e)).collect();
            if part.len() < i || i == 0 {
                continue;
            }
            for sub in subsets_of_size(&part, i) {
                found.entry(sub).or_insert(b);
            }
        }
        let cands: Vec<Candidate> = found
            .into_iter()
            .map(|(elems, base)| Candidate { elems, base })
            .collect();
        let mut cand_of = vec![Vec::new(); inst.n()];
        for (c, cand) in cands.iter().enumerate() {
            for &e in &cand.elems {
                cand_of[e as usize].push(c);
            }
        }
        PackingContext {
            inst,
            i,
            pool: pool.clone(),
            cands,
            cand_of,
        }
    }

    pub fn for_universe(inst: &'a Instance, i: usize) -> Self {
        Self::new(inst, i, &inst.universe())
    }

    pub fn candidate_count(&self) -> usize {
        self.cands.len()
    }

    pub fn pool(&self) -> &ElemSet {
        &self.pool
    }

    fn chosen(&self, c: usize) -> ChosenSet {
        ChosenSet::new(self.cands[c].base, self.cands[c].elems.clone())
    }

    /// Greedy maximal packing in candidate order.
    pub fn maximal_packing(&self) -> Packing {
        let mut used = ElemSet::empty(self.inst.n());
        let mut packing = Packing::empty(self.i);
        for (c, cand) in self.cands.iter().enumerate() {
            if !used.contains_any(&cand.elems) {
                used.insert_all(&cand.elems);
                packing.members.push(self.chosen(c));
            }
        }
        packing
    }

    /// True when no candidate is disjoint from every member.
    pub fn is_maximal(&self, packing: &Packing) -> bool {
        let used = packing.covered(self.inst.n());
        self.cands.iter().all(|c| used.contains_any(&c.elems))
    }

    /// Runs local search to a fixed point.
    pub fn improve(
        &self,
        packing: &Packing,
        params: ImprovementParams,
        mut gate: Option<&mut dyn OnesGate>,
    ) -> ImproveOutcome {
        assert_eq!(params.i, self.i, "params.i must match the context");
        let mut state = SearchState::new(self, packing);
        let mut stats = ImproveStats::default();
        let gated = params.restricted && gate.is_some();
        if gated {
            let g = gate.as_deref_mut().expect("gate present");
            let mut uncovered = self.pool.clone();
            uncovered.difference_with(&state.covered(self.inst.n()));
            stats.gate_trace.push(g.ones(&uncovered));
        }
        let cap = self.inst.n() / self.i.max(1) + 1;
        loop {
            let mut search = Search {
                ctx: self,
                state: &state,
                gate: if gated { gate.as_mut().map(|g| &mut **g as &mut dyn OnesGate) } else { None },
                nodes: 0,
                node_cap: None,
                rejections: 0,
            };
            let found = search.find(params.s);
            stats.gate_rejections += search.rejections;
            let Ok(Some((removed, inserted, delta))) = found else {
                break;
            };
            state.apply(self, &removed, &inserted);
            stats.commits += 1;
            *stats.by_removed.entry(removed.len()).or_insert(0) += 1;
            if gated {
                let last = *stats.gate_trace.last().expect("initial value");
                let next = (last as isize + delta) as usize;
                assert!(next <= last, "gate value increased");
                stats.gate_trace.push(next);
            }
            assert!(stats.commits <= cap, "packing search failed to terminate");
        }
        ImproveOutcome {
            packing: state.to_packing(self),
            stats,
        }
    }

    /// Exhaustive search for an acceptable improvement, visiting at most
    /// `node_cap` search nodes.
    pub fn certify(
        &self,
        packing: &Packing,
        params: ImprovementParams,
        gate: Option<&mut dyn OnesGate>,
        node_cap: u64,
    ) -> Certification {
        let state = SearchState::new(self, packing);
        let mut search = Search {
            ctx: self,
            state: &state,
            gate: if params.restricted { gate } else { None },
            nodes: 0,
            node_cap: Some(node_cap),
            rejections: 0,
        };
        match search.find(params.s) {
            Err(()) => Certification::BudgetExceeded { nodes: search.nodes },
            Ok(None) => Certification::Certified { nodes: search.nodes },
            Ok(Some((removed, inserted, _))) => Certification::Witness(Improvement {
                removed: removed.iter().map(|&r| state.members[r].clone()).collect(),
                inserted: inserted.iter().map(|&c| self.chosen(c)).collect(),
            }),
        }
    }

    /// Checks a specific replacement against the packing: growth, sizes, disjointness,
    /// containment in the free elements plus removed elements, and (when a
    /// gate is given) the gate values before and after.
    pub fn check_replacement(
        &self,
        packing: &Packing,
        improvement: &Improvement,
        gate: Option<&mut dyn OnesGate>,
    ) -> ReplacementCheck {
        let n = self.inst.n();
        let covered = packing.covered(n);
        let mut freed = ElemSet::empty(n);
        let mut problems = Vec::new();
        for r in &improvement.removed {
            if !packing.members.contains(r) {
                problems.push(format!("removed set {:?} is not a member", r.elements));
            }
            freed.insert_all(&r.elements);
        }
        if improvement.inserted.len() <= improvement.removed.len() {
            problems.push(format!(
                "inserts {} sets for {} removed",
                improvement.inserted.len(),
                improvement.removed.len()
            ));
        }
        let mut taken = ElemSet::empty(n);
        for q in &improvement.inserted {
            if q.len() != self.i {
                problems.push(format!("inserted set {:?} has wrong size", q.elements));
            }
            let base = self.inst.base_sets().get(q.base_index);
            if base.is_none_or(|b| q.elements.iter().any(|e| b.binary_search(e).is_err())) {
                problems.push(format!("inserted set {:?} is not inside its base set", q.elements));
            }
            for &e in &q.elements {
                if !self.pool.contains(e) || (covered.contains(e) && !freed.contains(e)) {
                    problems.push(format!("element {} is not available", e + 1));
                }
                if taken.contains(e) {
                    problems.push(format!("inserted sets overlap on element {}", e + 1));
                }
                taken.insert(e);
            }
        }
        let (gate_before, gate_after) = match gate {
            Some(g) if problems.is_empty() => {
                let mut before = self.pool.clone();
                before.difference_with(&covered);
                let mut after = before.clone();
                after.union_with(&freed);
                after.difference_with(&taken);
                (Some(g.ones(&before)), Some(g.ones(&after)))
            }
            _ => (None, None),
        };
        ReplacementCheck {
            problems,
            gate_before,
            gate_after,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementCheck {
    pub problems: Vec<String>,
    pub gate_before: Option<usize>,
    pub gate_after: Option<usize>,
}

impl ReplacementCheck {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }

    /// Valid and not increasing the gate (when one was evaluated).
    pub fn is_acceptable(&self) -> bool {
        self.is_valid()
            && match (self.gate_before, self.gate_after) {
                (Some(b), Some(a)) => a <= b,
                _ => true,
            }
    }
}

/// Packing members plus an element → member owner map.
struct SearchState {
    members: Vec<ChosenSet>,
    owner: Vec<Option<usize>>,
}

impl SearchState {
    fn new(ctx: &PackingContext<'_>, packing: &Packing) -> Self {
        let mut s = SearchState {
            members: Vec::new(),
            owner: vec![None; ctx.inst.n()],
        };
        for m in &packing.members {
            s.push(m.clone());
        }
        s
    }

    fn push(&mut self, m: ChosenSet) {
        let idx = self.members.len();
        for &e in &m.elements {
            self.owner[e as usize] = Some(idx);
        }
        self.members.push(m);
    }

    fn covered(&self, n: usize) -> ElemSet {
        let mut s = ElemSet::empty(n);
        for (e, o) in self.owner.iter().enumerate() {
            if o.is_some() {
                s.insert(e as u32);
            }
        }
        s
    }

    fn apply(&mut self, ctx: &PackingContext<'_>, removed: &[usize], inserted: &[usize]) {
        let remove: BTreeSet<usize> = removed.iter().copied().collect();
        let kept: Vec<ChosenSet> = std::mem::take(&mut self.members)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !remove.contains(i))
            .map(|(_, m)| m)
            .collect();
        self.owner.iter_mut().for_each(|o| *o = None);
        for m in kept {
            self.push(m);
        }
        for &c in inserted {
            self.push(ctx.chosen(c));
        }
    }

    fn to_packing(&self, ctx: &PackingContext<'_>) -> Packing {
        let mut members = self.members.clone();
        members.sort_by(canonical_cmp);
        Packing {
            size_class: ctx.i,
            members,
        }
    }
}

/// Result of a search step: removed member indices, inserted candidates and
/// the gate delta (0 when ungated). `Err` means the node cap was hit.
type Found = Result<Option<(Vec<usize>, Vec<usize>, isize)>, ()>;

struct Search<'c, 'a, 's, 'g> {
    ctx: &'c PackingContext<'a>,
    state: &'s SearchState,
    gate: Option<&'g mut dyn OnesGate>,
    nodes: u64,
    node_cap: Option<u64>,
    rejections: usize,
}

impl Search<'_, '_, '_, '_> {
    fn tick(&mut self) -> Result<(), ()> {
        self.nodes += 1;
        match self.node_cap {
            Some(cap) if self.nodes > cap => Err(()),
            _ => Ok(()),
        }
    }

    fn uncovered(&self) -> ElemSet {
        let mut u = self.ctx.pool.clone();
        u.difference_with(&self.state.covered(self.ctx.inst.n()));
        u
    }

    fn owners(&self, c: usize) -> BTreeSet<usize> {
        self.ctx.cands[c]
            .elems
            .iter()
            .filter_map(|&e| self.state.owner[e as usize])
            .collect()
    }

    /// Gate check for a tentative move; returns the delta if acceptable.
    fn accept(&mut self, uncovered: &ElemSet, removed: &[usize], inserted: &[usize]) -> Option<isize> {
        let Some(gate) = self.gate.as_deref_mut() else {
            return Some(0);
        };
        let mut after = uncovered.clone();
        let mut changed = Vec::new();
        for &r in removed {
            for &e in &self.state.members[r].elements {
                after.insert(e);
                changed.push(e);
            }
        }
        for &c in inserted {
            for &e in &self.ctx.cands[c].elems {
                after.remove(e);
                changed.push(e);
            }
        }
        changed.sort_unstable();
        changed.dedup();
        let delta = gate.ones_delta(uncovered, &after, &changed);
        if delta <= 0 {
            Some(delta)
        } else {
            self.rejections += 1;
            None
        }
    }

    fn find(&mut self, s: usize) -> Found {
        let uncovered = self.uncovered();
        // Plain insertions.
        for c in 0..self.ctx.cands.len() {
            self.tick()?;
            if uncovered.contains_all(&self.ctx.cands[c].elems) {
                if let Some(d) = self.accept(&uncovered, &[], &[c]) {
                    return Ok(Some((vec![], vec![c], d)));
                }
            }
        }
        if self.state.members.is_empty() {
            return Ok(None);
        }
        let adj = self.member_graph(s);
        for bound in 1..=s.min(self.state.members.len()) {
            if let Some(found) = self.connected_removals(&adj, bound, &uncovered)? {
                return Ok(Some(found));
            }
        }
        Ok(None)
    }

    /// Members are adjacent when some candidate meets both and at most `s`
    /// members in total.
    fn member_graph(&mut self, s: usize) -> Vec<Vec<usize>> {
        let m = self.state.members.len();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
        for c in 0..self.ctx.cands.len() {
            let own: Vec<usize> = self.owners(c).into_iter().collect();
            if own.len() < 2 || own.len() > s {
                continue;
            }
            for &a in &own {
                for &b in &own {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Enumerates connected member sets of exactly `size` (each once, rooted
    /// at their least member) and searches each for an insertion family.
    fn connected_removals(
        &mut self,
        adj: &[Vec<usize>],
        size: usize,
        uncovered: &ElemSet,
    ) -> Found {
        let m = adj.len();
        for root in 0..m {
            let ext: Vec<usize> = adj[root].iter().copied().filter(|&u| u > root).collect();
            let mut sub = vec![root];
            if let Some(f) = self.extend(adj, &mut sub, ext, root, size, uncovered)? {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }

    fn extend(
        &mut self,
        adj: &[Vec<usize>],
        sub: &mut Vec<usize>,
        mut ext: Vec<usize>,
        root: usize,
        size: usize,
        uncovered: &ElemSet,
    ) -> Found {
        self.tick()?;
        if sub.len() == size {
            return self.fill(sub, uncovered);
        }
        while let Some(w) = (!ext.is_empty()).then(|| ext.remove(0)) {
            let mut next = ext.clone();
            for &u in &adj[w] {
                if u > root
                    && !sub.contains(&u)
                    && !next.contains(&u)
                    && sub.iter().all(|&x| !adj[x].contains(&u))
                {
                    next.push(u);
                }
            }
            sub.push(w);
            let r = self.extend(adj, sub, next, root, size, uncovered)?;
            sub.pop();
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }

    /// Searches `|removed| + 1` disjoint candidates that meet `removed` and
    /// use only free elements or elements of `removed`.
    fn fill(&mut self, removed: &[usize], uncovered: &ElemSet) -> Found {
        let rset: BTreeSet<usize> = removed.iter().copied().collect();
        let mut pool: BTreeSet<usize> = BTreeSet::new();
        for &r in removed {
            for &e in &self.state.members[r].elements {
                pool.extend(self.ctx.cand_of[e as usize].iter().copied());
            }
        }
        let usable: Vec<usize> = pool
            .into_iter()
            .filter(|&c| self.owners(c).is_subset(&rset))
            .collect();
        let need = removed.len() + 1;
        if usable.len() < need {
            return Ok(None);
        }
        let mut sorted = removed.to_vec();
        sorted.sort_unstable();
        let mut picked = Vec::new();
        let mut taken = ElemSet::empty(self.ctx.inst.n());
        self.pick(&usable, 0, need, &mut picked, &mut taken, &sorted, uncovered)
    }

    #[allow(clippy::too_many_arguments)]
    fn pick(
        &mut self,
        usable: &[usize],
        from: usize,
        need: usize,
        picked: &mut Vec<usize>,
        taken: &mut ElemSet,
        removed: &[usize],
        uncovered: &ElemSet,
    ) -> Found {
        self.tick()?;
        if picked.len() == need {
            return Ok(self
                .accept(uncovered, removed, picked)
                .map(|d| (removed.to_vec(), picked.clone(), d)));
        }
        if usable.len() - from < need - picked.len() {
            return Ok(None);
        }
        for idx in from..usable.len() {
            let c = usable[idx];
            let elems = &self.ctx.cands[c].elems;
            if taken.contains_any(elems) {
                continue;
            }
            taken.insert_all(elems);
            picked.push(c);
            let r = self.pick(usable, idx + 1, need, picked, taken, removed, uncovered)?;
            picked.pop();
            taken.remove_all(&self.ctx.cands[c].elems);
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }
}

/// Greedy maximal packing of i-subsets over the whole universe.
pub fn maximal_packing(inst: &Instance, i: usize) -> Packing {
    PackingContext::for_universe(inst, i).maximal_packing()
}

/// Local search from `p` over the whole universe.
pub fn improve_packing(
    inst: &Instance,
    p: &Packing,
    params: ImprovementParams,
    gate: Option<&mut dyn OnesGate>,
) -> ImproveOutcome {
    PackingContext::for_universe(inst, params.i).improve(p, params, gate)
}

/// Exhaustive fixed-point check over the whole universe.
pub fn certify_no_improvement(
    inst: &Instance,
    p: &Packing,
    params: ImprovementParams,
    gate: Option<&mut dyn OnesGate>,
    node_cap: u64,
) -> Certification {
    PackingContext::for_universe(inst, params.i).certify(p, params, gate, node_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, validate_packing};
    use crate::semilocal::SemiLocalGate;

    fn params(i: usize, s: usize, restricted: bool) -> ImprovementParams {
        ImprovementParams { i, s, restricted }
    }

    #[test]
    fn maximal_examples() {
        let two = parse_instance("p setcover 8 2 4\ns 1 2 3 4\ns 5 6 7 8").unwrap();
        assert_eq!(maximal_packing(&two, 4).len(), 2);
        let one = parse_instance("p setcover 4 1 4\ns 1 2 3 4").unwrap();
        assert!(maximal_packing(&one, 5).is_empty());
    }

    #[test]
    fn one_for_two_swap() {
        // Greedy takes {2,3,4,5}; swapping it for {1,2,3,9} and {4,5,6,7} is a 1→2 improvement.
        let inst = parse_instance(
            "p setcover 9 4 4\ns 1 2 3 9\ns 2 3 4 5\ns 4 5 6 7\ns 8",
        )
        .unwrap();
        let p = Packing {
            size_class: 4,
            members: vec![ChosenSet::new(1, vec![1, 2, 3, 4])],
        };
        let ctx = PackingContext::for_universe(&inst, 4);
        assert!(ctx.is_maximal(&p));
        match ctx.certify(&p, params(4, 1, false), None, 10_000) {
            Certification::Witness(w) => assert_eq!((w.removed.len(), w.inserted.len()), (1, 2)),
            other => panic!("expected witness, got {other:?}"),
        }
        let out = ctx.improve(&p, params(4, 1, false), None);
        assert_eq!(out.packing.len(), 2);
        validate_packing(&inst, &out.packing).unwrap();
        assert_eq!(out.stats.commits, 1);
        assert!(matches!(
            ctx.certify(&out.packing, params(4, 1, false), None, 10_000),
            Certification::Certified { .. }
        ));
    }

    #[test]
    fn optimum_is_unchanged() {
        let inst = parse_instance("p setcover 8 2 4\ns 1 2 3 4\ns 5 6 7 8").unwrap();
        let p = maximal_packing(&inst, 4);
        let out = improve_packing(&inst, &p, params(4, 3, false), None);
        assert_eq!(out.packing, p);
        assert_eq!(out.stats.commits, 0);
    }

    #[test]
    fn gate_blocks_insertion_that_creates_a_one_set() {
        // Inserting {1,2,3,4} strands element 5, whose only partner is 4.
        let inst = parse_instance("p setcover 5 2 4\ns 1 2 3 4\ns 4 5").unwrap();
        let mut gate = SemiLocalGate::new(&inst);
        let out = improve_packing(&inst, &Packing::empty(4), params(4, 2, true), Some(&mut gate));
        assert!(out.packing.is_empty());
        assert_eq!(out.stats.gate_rejections, 1);
        let free = improve_packing(&inst, &Packing::empty(4), params(4, 2, false), None);
        assert_eq!(free.packing.len(), 1);
    }

    #[test]
    fn budget_exceeded_is_distinct() {
        let inst = parse_instance("p setcover 8 2 4\ns 1 2 3 4\ns 5 6 7 8").unwrap();
        let p = maximal_packing(&inst, 4);
        assert!(matches!(
            certify_no_improvement(&inst, &p, params(4, 2, false), None, 1),
            Certification::BudgetExceeded { .. }
        ));
    }
}
