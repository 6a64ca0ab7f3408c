//! Blocking-forest analysis of a restricted packing against a fixed optimal
//! partition: the lexicographically first extension of the packing to a
//! cover by 1-, 2- and 3-sets, the forest it induces on the optimal sets,
//! and checks of the forest's structural propositions.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::bitset::ElemSet;
use crate::instance::{validate_packing, Instance, Packing};
use crate::semilocal::residual_components;

/// Largest residual component solved exactly by default.
pub const DEFAULT_MAX_COMPONENT: usize = 20;
/// Hard cap on the exact search (the table has `2^size` entries).
pub const MAX_COMPONENT_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockingError {
    #[error("residual component of {size} elements exceeds the budget of {limit}")]
    BudgetExceeded { size: usize, limit: usize },
    #[error("optimal sets are not a partition of the universe: {0}")]
    NotPartition(String),
    #[error("packing is invalid: {0}")]
    InvalidPacking(String),
}

/// Lexicographic score of an extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExtensionScore {
    /// 1-sets.
    pub n1: usize,
    /// 2- and 3-sets not inside one optimal set.
    pub n2: usize,
    /// 3-sets not inside one optimal set.
    pub n3: usize,
}

impl fmt::Display for ExtensionScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n1, self.n2, self.n3)
    }
}

/// Disjoint 1-, 2- and 3-sets covering exactly the elements the packing
/// leaves uncovered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub sets: Vec<Vec<u32>>,
    pub score: ExtensionScore,
}

/// Maps each element to the index of the optimal set holding it.
fn owner_map(n: usize, optimal: &[Vec<u32>]) -> Result<Vec<usize>, BlockingError> {
    let mut owner = vec![usize::MAX; n];
    for (o, set) in optimal.iter().enumerate() {
        for &e in set {
            let slot = owner
                .get_mut(e as usize)
                .ok_or_else(|| BlockingError::NotPartition(format!("element {} out of range", e + 1)))?;
            if *slot != usize::MAX {
                return Err(BlockingError::NotPartition(format!("element {} appears twice", e + 1)));
            }
            *slot = o;
        }
    }
    if let Some(e) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(BlockingError::NotPartition(format!("element {} is not covered", e + 1)));
    }
    Ok(owner)
}

fn set_score(set: &[u32], owner: &[usize]) -> ExtensionScore {
    let inside = set.iter().all(|&e| owner[e as usize] == owner[set[0] as usize]);
    match set.len() {
        1 => ExtensionScore { n1: 1, n2: 0, n3: 0 },
        2 if !inside => ExtensionScore { n1: 0, n2: 1, n3: 0 },
        3 if !inside => ExtensionScore { n1: 0, n2: 1, n3: 1 },
        _ => ExtensionScore::default(),
    }
}

/// Scores an arbitrary extension against the optimal partition.
pub fn extension_score(sets: &[Vec<u32>], optimal: &[Vec<u32>], n: usize) -> Result<ExtensionScore, BlockingError> {
    let owner = owner_map(n, optimal)?;
    let mut total = ExtensionScore::default();
    for s in sets {
        let c = set_score(s, &owner);
        total.n1 += c.n1;
        total.n2 += c.n2;
        total.n3 += c.n3;
    }
    Ok(total)
}

struct Choice {
    mask: u32,
    cost: u32,
    elems: Vec<u32>,
}

fn pack(s: ExtensionScore) -> u32 {
    ((s.n1 as u32) << 16) | ((s.n2 as u32) << 8) | s.n3 as u32
}

/// Exact table over all subsets of one component; ties keep the earliest
/// choice (singleton, then pairs, then triples in element order).
fn solve_component(inst: &Instance, comp: &[u32], owner: &[usize]) -> Vec<Vec<u32>> {
    let c = comp.len();
    let mut by_low: Vec<Vec<Choice>> = (0..c).map(|_| Vec::new()).collect();
    for (i, low) in by_low.iter_mut().enumerate() {
        let mut add = |local: &[usize]| {
            let elems: Vec<u32> = local.iter().map(|&x| comp[x]).collect();
            if inst.base_containing_all(&elems).is_some() {
                low.push(Choice {
                    mask: local.iter().fold(0u32, |m, &x| m | (1 << x)),
                    cost: pack(set_score(&elems, owner)),
                    elems,
                });
            }
        };
        add(&[i]);
        for j in i + 1..c {
            add(&[i, j]);
        }
        for j in i + 1..c {
            for l in j + 1..c {
                add(&[i, j, l]);
            }
        }
    }
    let full = if c == 32 { u32::MAX } else { (1u32 << c) - 1 };
    let size = full as usize + 1;
    let mut best = vec![u32::MAX; size];
    let mut pick = vec![u16::MAX; size];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        let mut value = u32::MAX;
        let mut chosen = u16::MAX;
        for (idx, ch) in by_low[low].iter().enumerate() {
            if ch.mask & mask == ch.mask {
                let rest = best[(mask ^ ch.mask) as usize];
                if rest != u32::MAX && rest + ch.cost < value {
                    value = rest + ch.cost;
                    chosen = idx as u16;
                }
            }
        }
        best[mask as usize] = value;
        pick[mask as usize] = chosen;
    }
    let mut out = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let ch = &by_low[mask.trailing_zeros() as usize][pick[mask as usize] as usize];
        out.push(ch.elems.clone());
        mask ^= ch.mask;
    }
    out
}

/// Exact lexicographically first extension of `packing`, solved per
/// residual component; fails when a component exceeds `max_component`.
pub fn lexfirst_extension(
    inst: &Instance,
    packing: &Packing,
    optimal: &[Vec<u32>],
    max_component: usize,
) -> Result<Extension, BlockingError> {
    validate_packing(inst, packing).map_err(|e| BlockingError::InvalidPacking(e.to_string()))?;
    let owner = owner_map(inst.n(), optimal)?;
    let limit = max_component.min(MAX_COMPONENT_LIMIT);
    let mut residual = inst.universe();
    residual.difference_with(&packing.covered(inst.n()));
    let comps = residual_components(inst, &residual);
    if let Some(big) = comps.iter().find(|c| c.len() > limit) {
        return Err(BlockingError::BudgetExceeded { size: big.len(), limit });
    }
    let mut sets: Vec<Vec<u32>> = comps.iter().flat_map(|c| solve_component(inst, c, &owner)).collect();
    sets.sort();
    let mut score = ExtensionScore::default();
    for s in &sets {
        let c = set_score(s, &owner);
        score.n1 += c.n1;
        score.n2 += c.n2;
        score.n3 += c.n3;
    }
    Ok(Extension { sets, score })
}

/// A defect that makes the graph something other than a simple forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ForestDefect {
    /// Two or more cross 2-sets join the same pair of optimal sets.
    MultiEdge(usize, usize),
    /// Node sequence of a cycle (first node not repeated).
    Cycle(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestNode {
    /// Elements covered by the packing.
    pub level: usize,
    /// Distinct neighbours, ascending.
    pub neighbors: Vec<usize>,
    /// 1-sets of the extension inside this set.
    pub ones: usize,
}

impl ForestNode {
    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub nodes: Vec<usize>,
    pub root: usize,
}

/// Graph on the optimal sets; two sets are adjacent when a 2-set of the
/// extension meets both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingForest {
    pub k: usize,
    pub nodes: Vec<ForestNode>,
    pub trees: Vec<Tree>,
    pub defects: Vec<ForestDefect>,
}

impl BlockingForest {
    /// Builds a forest from raw parts: `levels[v]`, undirected edge list
    /// (repeats become multi-edges), and per-node 1-set counts.
    pub fn from_parts(k: usize, levels: &[usize], edges: &[(usize, usize)], ones: &[usize]) -> Self {
        let count = levels.len();
        let mut multiplicity: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &(a, b) in edges {
            *multiplicity.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
        let mut nodes: Vec<ForestNode> = (0..count)
            .map(|v| ForestNode {
                level: levels[v],
                neighbors: Vec::new(),
                ones: ones.get(v).copied().unwrap_or(0),
            })
            .collect();
        let mut defects = Vec::new();
        for (&(a, b), &m) in &multiplicity {
            nodes[a].neighbors.push(b);
            nodes[b].neighbors.push(a);
            if m > 1 {
                defects.push(ForestDefect::MultiEdge(a, b));
            }
        }
        for n in &mut nodes {
            n.neighbors.sort_unstable();
        }
        defects.extend(find_cycles(count, multiplicity.keys().copied()));
        let mut forest = BlockingForest {
            k,
            nodes,
            trees: Vec::new(),
            defects,
        };
        forest.trees = forest.components().into_iter().map(|c| forest.rooted(c)).collect();
        forest
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.nodes[v].neighbors {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Node whose degree is below its number of uncovered elements.
    pub fn is_deficient(&self, v: usize) -> bool {
        let n = &self.nodes[v];
        n.level < self.k && n.degree() < self.k - n.level
    }

    /// Root rule: the least deficient node; else the least node that is not
    /// `(k-1)`-level; else the least node.
    fn rooted(&self, nodes: Vec<usize>) -> Tree {
        let root = nodes
            .iter()
            .copied()
            .find(|&v| self.is_deficient(v))
            .or_else(|| nodes.iter().copied().find(|&v| self.nodes[v].level + 1 != self.k))
            .unwrap_or(nodes[0]);
        Tree { nodes, root }
    }
}

/// One cycle per independent cycle found while growing a union-find.
fn find_cycles(count: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<ForestDefect> {
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); count];
    let mut out = Vec::new();
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            let mut path = tree_path(&adjacency, b, a);
            path.dedup();
            out.push(ForestDefect::Cycle(path));
        } else {
            parent[ra] = rb;
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    out
}

/// Path from `from` to `to` in an acyclic adjacency list.
fn tree_path(adjacency: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; adjacency.len()];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in &adjacency[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut v = to;
    while v != from {
        v = prev[v];
        path.push(v);
    }
    path
}

/// Forest of `extension` over `optimal` with levels taken from `packing`.
pub fn build_forest(
    extension: &Extension,
    optimal: &[Vec<u32>],
    packing: &Packing,
    k: usize,
    n: usize,
) -> Result<BlockingForest, BlockingError> {
    let owner = owner_map(n, optimal)?;
    let covered = packing.covered(n);
    let levels: Vec<usize> = optimal
        .iter()
        .map(|o| o.iter().filter(|&&e| covered.contains(e)).count())
        .collect();
    let mut edges = Vec::new();
    let mut ones = vec![0usize; optimal.len()];
    for s in &extension.sets {
        match s.len() {
            1 => ones[owner[s[0] as usize]] += 1,
            2 => {
                let (a, b) = (owner[s[0] as usize], owner[s[1] as usize]);
                if a != b {
                    edges.push((a, b));
                }
            }
            _ => {}
        }
    }
    Ok(BlockingForest::from_parts(k, &levels, &edges, &ones))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropositionOutcome {
    pub proposition: u8,
    pub holds: bool,
    /// Offending nodes (a cycle, or the nodes breaking the rule).
    pub counterexample: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub outcomes: Vec<PropositionOutcome>,
}

impl StructureReport {
    pub fn all_hold(&self) -> bool {
        self.outcomes.iter().all(|o| o.holds)
    }
}

impl fmt::Display for StructureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            let verdict = if o.holds { "pass" } else { "FAIL" };
            write!(f, "proposition {}: {verdict}", o.proposition)?;
            if !o.holds {
                write!(f, " {} nodes={:?}", o.detail, o.counterexample)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn outcome(proposition: u8, counterexample: Vec<usize>, detail: String) -> PropositionOutcome {
    PropositionOutcome {
        proposition,
        holds: counterexample.is_empty(),
        counterexample,
        detail,
    }
}

/// Checks the four structural propositions:
/// 1. the graph is a simple forest;
/// 2. 1-sets lie only in `(k-1)`-level sets;
/// 3. each tree has at most one deficient node (degree below `k - level`);
/// 4. each tree has at most one 0- or 1-level node of degree 2, and it is the root.
pub fn verify_structure(forest: &BlockingForest) -> StructureReport {
    let k = forest.k;
    let p1 = match forest.defects.first() {
        None => outcome(1, Vec::new(), String::new()),
        Some(ForestDefect::MultiEdge(a, b)) => outcome(1, vec![*a, *b], "multi-edge".into()),
        Some(ForestDefect::Cycle(c)) => outcome(1, c.clone(), "cycle".into()),
    };
    let misplaced: Vec<usize> = (0..forest.nodes.len())
        .filter(|&v| forest.nodes[v].ones > 0 && forest.nodes[v].level + 1 != k)
        .collect();
    let p2 = outcome(2, misplaced, "1-set inside a set below level k-1".into());
    let mut deficient_bad = Vec::new();
    let mut degree_two_bad = Vec::new();
    for tree in &forest.trees {
        let deficient: Vec<usize> = tree.nodes.iter().copied().filter(|&v| forest.is_deficient(v)).collect();
        if deficient.len() > 1 {
            deficient_bad.extend(deficient);
        }
        let low: Vec<usize> = tree
            .nodes
            .iter()
            .copied()
            .filter(|&v| forest.nodes[v].level <= 1 && forest.nodes[v].degree() == 2)
            .collect();
        if low.len() > 1 || low.iter().any(|&v| v != tree.root) {
            degree_two_bad.extend(low);
        }
    }
    let p3 = outcome(3, deficient_bad, "several deficient nodes in one tree".into());
    let p4 = outcome(4, degree_two_bad, "0/1-level degree-2 node that is not the unique root".into());
    StructureReport {
        outcomes: vec![p1, p2, p3, p4],
    }
}

/// Extension, forest and report in one call.
pub fn analyze(
    inst: &Instance,
    packing: &Packing,
    optimal: &[Vec<u32>],
    max_component: usize,
) -> Result<(Extension, BlockingForest, StructureReport), BlockingError> {
    let ext = lexfirst_extension(inst, packing, optimal, max_component)?;
    let forest = build_forest(&ext, optimal, packing, inst.k(), inst.n())?;
    let report = verify_structure(&forest);
    Ok((ext, forest, report))
}

/// Elements left uncovered by `packing`.
pub fn uncovered(inst: &Instance, packing: &Packing) -> ElemSet {
    let mut r = inst.universe();
    r.difference_with(&packing.covered(inst.n()));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::ChosenSet;

    fn zero_based(sets: &[&[u32]]) -> Vec<Vec<u32>> {
        sets.iter().map(|s| s.iter().map(|e| e - 1).collect()).collect()
    }

    /// Three optimal 4-sets, two packed 4-sets and a cross 2-set {8, 11}.
    #[test]
    fn fig2_prefers_pairs_inside_optimal_sets() {
        let optimal = zero_based(&[&[1, 2, 3, 4], &[5, 6, 7, 8], &[9, 10, 11, 12]]);
        let mut sets = optimal.clone();
        sets.extend(zero_based(&[&[1, 2, 3, 5], &[6, 7, 9, 10], &[8, 11]]));
        let inst = Instance::new(12, 4, sets.clone()).unwrap();
        let packing = Packing {
            size_class: 4,
            members: vec![ChosenSet::new(3, sets[3].clone()), ChosenSet::new(4, sets[4].clone())],
        };
        let ext = lexfirst_extension(&inst, &packing, &optimal, 20).unwrap();
        assert_eq!(ext.score, ExtensionScore { n1: 2, n2: 0, n3: 0 });
        let worse = zero_based(&[&[4], &[8, 11], &[12]]);
        assert_eq!(
            extension_score(&worse, &optimal, 12).unwrap(),
            ExtensionScore { n1: 2, n2: 1, n3: 0 }
        );
        let (_, forest, report) = analyze(&inst, &packing, &optimal, 20).unwrap();
        assert!(forest.defects.is_empty());
        assert_eq!(forest.nodes.iter().map(|n| n.level).collect::<Vec<_>>(), vec![3, 3, 2]);
        assert!(report.all_hold(), "{report}");
    }

    #[test]
    fn fully_packed_gives_empty_extension() {
        let inst = Instance::new(4, 4, vec![vec![0, 1, 2, 3]]).unwrap();
        let packing = Packing {
            size_class: 4,
            members: vec![ChosenSet::new(0, vec![0, 1, 2, 3])],
        };
        let ext = lexfirst_extension(&inst, &packing, &[vec![0, 1, 2, 3]], 20).unwrap();
        assert!(ext.sets.is_empty());
        assert_eq!(ext.score, ExtensionScore::default());
    }

    #[test]
    fn cycle_is_reported() {
        let f = BlockingForest::from_parts(4, &[2, 2, 2], &[(0, 1), (1, 2), (2, 0)], &[0, 0, 0]);
        let r = verify_structure(&f);
        assert!(!r.outcomes[0].holds);
        let mut cyc = r.outcomes[0].counterexample.clone();
        cyc.sort_unstable();
        assert_eq!(cyc, vec![0, 1, 2]);
    }

    #[test]
    fn multi_edge_is_reported() {
        let f = BlockingForest::from_parts(4, &[3, 2], &[(0, 1), (1, 0)], &[0, 0]);
        assert!(!verify_structure(&f).outcomes[0].holds);
    }

    #[test]
    fn two_low_degree_two_nodes_fail() {
        // Path 3 - 0 - 3 - 0 - 3 with two 0-level nodes of degree 2.
        let f = BlockingForest::from_parts(4, &[3, 0, 3, 0, 3], &[(0, 1), (1, 2), (2, 3), (3, 4)], &[0; 5]);
        let r = verify_structure(&f);
        assert!(r.outcomes[0].holds);
        assert!(!r.outcomes[3].holds);
        assert_eq!(r.outcomes[3].counterexample, vec![1, 3]);
    }

    #[test]
    fn one_set_below_top_level_fails() {
        let f = BlockingForest::from_parts(4, &[2], &[], &[1]);
        assert!(!verify_structure(&f).outcomes[1].holds);
    }

    #[test]
    fn budget_is_enforced() {
        let optimal = vec![(0..8).collect::<Vec<u32>>()];
        let inst = Instance::new(8, 8, optimal.clone()).unwrap();
        let err = lexfirst_extension(&inst, &Packing::empty(8), &optimal, 5).unwrap_err();
        assert_eq!(err, BlockingError::BudgetExceeded { size: 8, limit: 5 });
    }
}
