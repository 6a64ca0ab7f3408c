//! Exact exponential-time solvers for small instances.
//!
//! Covers are found by dynamic programming over uncovered-element bitmasks,
//! always branching on the least uncovered element. Every usable set through
//! that element is a subset of some `B ∩ uncovered`, so all such subsets are
//! tried (shrinking matters when 1-sets are counted).

use std::collections::HashMap;

use thiserror::Error;

use crate::bitset::ElemSet;
use crate::combinatorics::subsets_of_size;
use crate::instance::{ChosenSet, Cover, Instance, Packing};

/// Hard ceiling on `max_universe`; the cover tables have `2^n` entries.
pub const MAX_TABLE_UNIVERSE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_universe: usize,
    pub node_cap: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_universe: 20,
            node_cap: 200_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("universe of {n} elements exceeds the oracle limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("search budget of {cap} nodes exceeded")]
    BudgetExceeded { cap: u64 },
    #[error("instance has k = {k}, operation requires k <= {max}")]
    KTooLarge { k: usize, max: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverOptimum {
    /// Minimum cover size.
    pub size: usize,
    /// Minimum number of 1-sets among minimum-size covers.
    pub ones_at_min: usize,
    /// Minimum number of 1-sets over all covers.
    pub ones_global: usize,
    /// Some cover has both `size` sets and `ones_global` 1-sets.
    pub simultaneous: bool,
    /// A cover attaining `(size, ones_at_min)`.
    pub witness: Cover,
    /// A cover with `ones_global` 1-sets and the fewest sets among those.
    pub ones_witness: Cover,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Pair(u16, u16);

const UNSET: Pair = Pair(u16::MAX, u16::MAX);

struct CoverDp<'a> {
    inst: &'a Instance,
    /// Lexicographic minimum of (sets, ones) per mask.
    by_size: Vec<Pair>,
    /// Lexicographic minimum of (ones, sets) per mask.
    by_ones: Vec<Pair>,
    nodes: u64,
    cap: u64,
}

impl CoverDp<'_> {
    /// Usable sets through the least element of `mask`, as (bitmask, base).
    fn options(&self, mask: u32) -> Vec<(u32, usize)> {
        let e = mask.trailing_zeros();
        let mut out = Vec::new();
        for &b in self.inst.containing(e) {
            let others: Vec<u32> = self
                .inst
                .base_set(b)
                .iter()
                .copied()
                .filter(|&x| x != e && mask >> x & 1 == 1)
                .collect();
            let full: u32 = others.iter().fold(0, |m, &x| m | 1 << x);
            // Every submask of `full`, each together with `e`.
            let mut sub = full;
            loop {
                out.push((sub | 1 << e, b));
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & full;
            }
        }
        out.sort_unstable();
        out.dedup_by_key(|o| o.0);
        out
    }

    fn solve(&mut self, mask: u32) -> Result<(), OracleError> {
        if mask == 0 || self.by_size[mask as usize] != UNSET {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(OracleError::BudgetExceeded { cap: self.cap });
        }
        let mut best_size = UNSET;
        let mut best_ones = UNSET;
        for (set, _) in self.options(mask) {
            let rest = mask & !set;
            self.solve(rest)?;
            let one = u16::from(set.count_ones() == 1);
            let (a, b) = if rest == 0 {
                (Pair(0, 0), Pair(0, 0))
            } else {
                (self.by_size[rest as usize], self.by_ones[rest as usize])
            };
            best_size = best_size.min(Pair(a.0 + 1, a.1 + one));
            best_ones = best_ones.min(Pair(b.0 + one, b.1 + 1));
        }
        self.by_size[mask as usize] = best_size;
        self.by_ones[mask as usize] = best_ones;
        Ok(())
    }

    fn value(&self, mask: u32, ones_first: bool) -> Pair {
        match (mask, ones_first) {
            (0, _) => Pair(0, 0),
            (_, false) => self.by_size[mask as usize],
            (_, true) => self.by_ones[mask as usize],
        }
    }

    fn witness(&self, full: u32, ones_first: bool) -> Cover {
        let mut cover = Cover::default();
        let mut mask = full;
        while mask != 0 {
            let target = self.value(mask, ones_first);
            let (set, base) = self
                .options(mask)
                .into_iter()
                .find(|&(set, _)| {
                    let r = self.value(mask & !set, ones_first);
                    let one = u16::from(set.count_ones() == 1);
                    let v = if ones_first {
                        Pair(r.0 + one, r.1 + 1)
                    } else {
                        Pair(r.0 + 1, r.1 + one)
                    };
                    v == target
                })
                .expect("optimal choice exists");
            let elems = (0..32).filter(|&x| set >> x & 1 == 1).collect();
            cover.members.push(ChosenSet::new(base, elems));
            mask &= !set;
        }
        cover.sort_canonical();
        cover
    }
}

fn check_size(inst: &Instance, budget: &OracleBudget) -> Result<(), OracleError> {
    let max = budget.max_universe.min(MAX_TABLE_UNIVERSE);
    if inst.n() > max {
        return Err(OracleError::TooLarge { n: inst.n(), max });
    }
    Ok(())
}

/// Exact minimum cover size and 1-set counts.
pub fn min_cover_exact(inst: &Instance, budget: &OracleBudget) -> Result<CoverOptimum, OracleError> {
    check_size(inst, budget)?;
    let n = inst.n();
    let mut dp = CoverDp {
        inst,
        by_size: vec![UNSET; 1 << n],
        by_ones: vec![UNSET; 1 << n],
        nodes: 0,
        cap: budget.node_cap,
    };
    let full: u32 = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    dp.solve(full)?;
    let a = dp.value(full, false);
    let b = dp.value(full, true);
    Ok(CoverOptimum {
        size: a.0 as usize,
        ones_at_min: a.1 as usize,
        ones_global: b.0 as usize,
        simultaneous: a.1 == b.0,
        witness: dp.witness(full, false),
        ones_witness: dp.witness(full, true),
    })
}

/// Minimum number of 1-sets over all covers of a 3-Set Cover instance.
pub fn min_ones_exact(inst: &Instance, budget: &OracleBudget) -> Result<usize, OracleError> {
    if inst.k() > 3 {
        return Err(OracleError::KTooLarge { k: inst.k(), max: 3 });
    }
    min_cover_exact(inst, budget).map(|o| o.ones_global)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingOptimum {
    pub size: usize,
    pub witness: Packing,
}

struct PackSearch {
    cands: Vec<(Vec<u32>, usize)>,
    cand_of: Vec<Vec<usize>>,
    i: usize,
    best: Vec<usize>,
    nodes: u64,
    cap: u64,
    memo: HashMap<ElemSet, usize>,
}

impl PackSearch {
    /// Elements of `avail` lying in some candidate inside `avail`.
    fn coverable(&self, avail: &ElemSet) -> usize {
        avail
            .iter()
            .filter(|&e| {
                self.cand_of[e as usize]
                    .iter()
                    .any(|&c| avail.contains_all(&self.cands[c].0))
            })
            .count()
    }

    fn go(&mut self, avail: &mut ElemSet, cur: &mut Vec<usize>) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(OracleError::BudgetExceeded { cap: self.cap });
        }
        if cur.len() > self.best.len() {
            self.best = cur.clone();
        }
        let bound = self.coverable(avail) / self.i;
        if cur.len() + bound <= self.best.len() {
            return Ok(());
        }
        // A state seen before with at least as many sets already chosen
        // cannot lead anywhere new.
        match self.memo.get(avail) {
            Some(&seen) if seen >= cur.len() => return Ok(()),
            _ => {
                self.memo.insert(avail.clone(), cur.len());
            }
        }
        let Some(e) = avail.iter().find(|&e| {
            self.cand_of[e as usize]
                .iter()
                .any(|&c| avail.contains_all(&self.cands[c].0))
        }) else {
            return Ok(());
        };
        let through: Vec<usize> = self.cand_of[e as usize]
            .iter()
            .copied()
            .filter(|&c| avail.contains_all(&self.cands[c].0))
            .collect();
        for c in through {
            let elems = self.cands[c].0.clone();
            avail.remove_all(&elems);
            cur.push(c);
            self.go(avail, cur)?;
            cur.pop();
            avail.insert_all(&elems);
        }
        avail.remove(e);
        self.go(avail, cur)?;
        avail.insert(e);
        Ok(())
    }
}

/// Exact maximum packing of i-subsets of base sets (branch and bound with a
/// coverable-elements bound; no universe limit, only the node cap).
pub fn max_packing_exact(inst: &Instance, i: usize, budget: &OracleBudget) -> Result<PackingOptimum, OracleError> {
    let mut found: std::collections::BTreeMap<Vec<u32>, usize> = Default::default();
    if i > 0 {
        for (b, set) in inst.base_sets().iter().enumerate() {
            for sub in subsets_of_size(set, i) {
                found.entry(sub).or_insert(b);
            }
        }
    }
    let cands: Vec<(Vec<u32>, usize)> = found.into_iter().collect();
    let mut cand_of = vec![Vec::new(); inst.n()];
    for (c, (elems, _)) in cands.iter().enumerate() {
        for &e in elems {
            cand_of[e as usize].push(c);
        }
    }
    let mut search = PackSearch {
        cands,
        cand_of,
        i: i.max(1),
        best: Vec::new(),
        nodes: 0,
        cap: budget.node_cap,
        memo: HashMap::new(),
    };
    let mut avail = inst.universe();
    search.go(&mut avail, &mut Vec::new())?;
    let mut members: Vec<ChosenSet> = search
        .best
        .iter()
        .map(|&c| ChosenSet::new(search.cands[c].1, search.cands[c].0.clone()))
        .collect();
    members.sort_by(crate::instance::canonical_cmp);
    Ok(PackingOptimum {
        size: members.len(),
        witness: Packing {
            size_class: i,
            members,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{parse_instance, validate_cover, validate_packing};

    #[test]
    fn partitionable_and_singletons() {
        let inst = parse_instance("p setcover 6 3 3\ns 1 2 3\ns 4 5 6\ns 3 4").unwrap();
        let o = min_cover_exact(&inst, &OracleBudget::default()).unwrap();
        assert_eq!((o.size, o.ones_at_min, o.ones_global), (2, 0, 0));
        assert!(o.simultaneous);
        assert_eq!(validate_cover(&inst, &o.witness).unwrap().total, 2);
        let singles = parse_instance("p setcover 3 3 1\ns 1\ns 2\ns 3").unwrap();
        let o = min_cover_exact(&singles, &OracleBudget::default()).unwrap();
        assert_eq!((o.size, o.ones_at_min), (3, 3));
    }

    #[test]
    fn ones_need_shrinking() {
        // {1,2,3} + {4} is minimum; {1,2} + {3,4} also has two sets and no 1-set.
        let inst = parse_instance("p setcover 4 2 3\ns 1 2 3\ns 3 4").unwrap();
        let o = min_cover_exact(&inst, &OracleBudget::default()).unwrap();
        assert_eq!((o.size, o.ones_at_min, o.ones_global), (2, 0, 0));
        assert_eq!(min_ones_exact(&inst, &OracleBudget::default()).unwrap(), 0);
        let lone = parse_instance("p setcover 1 1 3\ns 1").unwrap();
        assert_eq!(min_ones_exact(&lone, &OracleBudget::default()).unwrap(), 1);
    }

    #[test]
    fn guards() {
        let big = Instance::new(30, 1, (0..30).map(|e| vec![e]).collect()).unwrap();
        assert!(matches!(
            min_cover_exact(&big, &OracleBudget::default()),
            Err(OracleError::TooLarge { .. })
        ));
        let four = parse_instance("p setcover 4 1 4\ns 1 2 3 4").unwrap();
        assert!(min_ones_exact(&four, &OracleBudget::default()).is_err());
    }

    #[test]
    fn packing_examples() {
        let inst = parse_instance("p setcover 8 3 4\ns 1 2 3 4\ns 5 6 7 8\ns 3 4 5 6").unwrap();
        let o = max_packing_exact(&inst, 4, &OracleBudget::default()).unwrap();
        assert_eq!(o.size, 2);
        validate_packing(&inst, &o.witness).unwrap();
        let one = parse_instance("p setcover 4 1 4\ns 1 2 3 4").unwrap();
        assert_eq!(max_packing_exact(&one, 5, &OracleBudget::default()).unwrap().size, 0);
    }
}
