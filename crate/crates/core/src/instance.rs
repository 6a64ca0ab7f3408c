//! Set-cover instances, chosen sets, packings and covers.
//!
//! Elements are 0-based internally and 1-based in files. The collection of
//! usable sets is the subset closure of the base sets: any nonempty subset of
//! a base set may be chosen, and a [`ChosenSet`] records which base set it
//! came from.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::bitset::ElemSet;
use crate::error::{CoverError, InstanceError, ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    k: usize,
    base_sets: Vec<Vec<u32>>,
    containing: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds a validated instance. Every base set must be nonempty, sorted,
    /// duplicate-free, of size at most `k`, and the union must be `0..n`.
    pub fn new(n: usize, k: usize, base_sets: Vec<Vec<u32>>) -> Result<Self, InstanceError> {
        let mut seen: HashMap<&[u32], usize> = HashMap::new();
        let mut containing = vec![Vec::new(); n];
        for (index, set) in base_sets.iter().enumerate() {
            if set.is_empty() || set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(InstanceError::Malformed { index });
            }
            if set.len() > k {
                return Err(InstanceError::TooLarge {
                    index,
                    size: set.len(),
                    k,
                });
            }
            if let Some(&elem) = set.iter().find(|&&e| e as usize >= n) {
                return Err(InstanceError::OutOfRange { elem, n });
            }
            if let Some(&earlier) = seen.get(set.as_slice()) {
                return Err(InstanceError::Duplicate { index, earlier });
            }
            seen.insert(set, index);
            for &e in set {
                containing[e as usize].push(index);
            }
        }
        if let Some(e) = containing.iter().position(Vec::is_empty) {
            return Err(InstanceError::Uncovered(e as u32));
        }
        Ok(Instance {
            n,
            k,
            base_sets,
            containing,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base_sets(&self) -> &[Vec<u32>] {
        &self.base_sets
    }

    pub fn base_set(&self, index: usize) -> &[u32] {
        &self.base_sets[index]
    }

    /// Indices of the base sets containing `elem`.
    pub fn containing(&self, elem: u32) -> &[usize] {
        &self.containing[elem as usize]
    }

    pub fn universe(&self) -> ElemSet {
        ElemSet::full(self.n)
    }

    /// Returns a base set containing all of `elems`, if one exists.
    pub fn base_containing_all(&self, elems: &[u32]) -> Option<usize> {
        let (&first, rest) = elems.split_first()?;
        self.containing(first)
            .iter()
            .copied()
            .find(|&b| rest.iter().all(|e| self.base_sets[b].binary_search(e).is_ok()))
    }

    /// Canonical text form (see the crate README for the format).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "p setcover {} {} {}", self.n, self.base_sets.len(), self.k).unwrap();
        for set in &self.base_sets {
            out.push('s');
            for &e in set {
                write!(out, " {}", e + 1).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// A nonempty subset of one base set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChosenSet {
    pub base_index: usize,
    pub elements: Vec<u32>,
}

impl ChosenSet {
    pub fn new(base_index: usize, mut elements: Vec<u32>) -> Self {
        elements.sort_unstable();
        ChosenSet {
            base_index,
            elements,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Lexicographic order on sorted element lists, then base index.
pub fn canonical_cmp(a: &ChosenSet, b: &ChosenSet) -> Ordering {
    a.elements
        .cmp(&b.elements)
        .then(a.base_index.cmp(&b.base_index))
}

/// Disjoint sets that all have exactly `size_class` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packing {
    pub size_class: usize,
    pub members: Vec<ChosenSet>,
}

impl Packing {
    pub fn empty(size_class: usize) -> Self {
        Packing {
            size_class,
            members: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn covered(&self, universe: usize) -> ElemSet {
        let mut s = ElemSet::empty(universe);
        for m in &self.members {
            s.insert_all(&m.elements);
        }
        s
    }
}

/// Disjoint sets whose union is the whole universe.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cover {
    pub members: Vec<ChosenSet>,
}

impl Cover {
    pub fn sort_canonical(&mut self) {
        self.members.sort_by(canonical_cmp);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverStats {
    pub total: usize,
    pub by_size: BTreeMap<usize, usize>,
    pub ones: usize,
}

impl CoverStats {
    pub fn of(sets: &[ChosenSet]) -> Self {
        let mut by_size = BTreeMap::new();
        for s in sets {
            *by_size.entry(s.len()).or_insert(0) += 1;
        }
        CoverStats {
            total: sets.len(),
            ones: by_size.get(&1).copied().unwrap_or(0),
            by_size,
        }
    }
}

fn check_member(inst: &Instance, idx: usize, m: &ChosenSet) -> Result<(), CoverError> {
    if m.elements.is_empty() || m.elements.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoverError::Malformed(idx));
    }
    let base = inst
        .base_sets
        .get(m.base_index)
        .ok_or(CoverError::UnknownBase(idx))?;
    if let Some(&e) = m.elements.iter().find(|e| base.binary_search(e).is_err()) {
        return Err(CoverError::NotSubset {
            member: idx,
            base: m.base_index + 1,
            elem: e + 1,
        });
    }
    Ok(())
}

fn check_disjoint(inst: &Instance, sets: &[ChosenSet]) -> Result<Vec<Option<usize>>, CoverError> {
    let mut owner: Vec<Option<usize>> = vec![None; inst.n];
    for (idx, m) in sets.iter().enumerate() {
        check_member(inst, idx, m)?;
        for &e in &m.elements {
            let slot = owner
                .get_mut(e as usize)
                .ok_or(CoverError::Malformed(idx))?;
            if let Some(first) = *slot {
                return Err(CoverError::Overlap {
                    first,
                    second: idx,
                    elem: e + 1,
                });
            }
            *slot = Some(idx);
        }
    }
    Ok(owner)
}

/// Checks that `cover` partitions the universe into subsets of base sets.
pub fn validate_cover(inst: &Instance, cover: &Cover) -> Result<CoverStats, CoverError> {
    let owner = check_disjoint(inst, &cover.members)?;
    if let Some(e) = owner.iter().position(Option::is_none) {
        return Err(CoverError::Gap(e as u32 + 1));
    }
    Ok(CoverStats::of(&cover.members))
}

/// Checks disjointness, subset-of-base and the size class of a packing.
pub fn validate_packing(inst: &Instance, packing: &Packing) -> Result<(), CoverError> {
    for (idx, m) in packing.members.iter().enumerate() {
        if m.len() != packing.size_class {
            return Err(CoverError::WrongSize {
                member: idx,
                size: m.len(),
                class: packing.size_class,
            });
        }
    }
    check_disjoint(inst, &packing.members).map(|_| ())
}

/// An instance induced on a subset of the universe, with the map back to the
/// parent's element ids (`elements[new_id] = old_id`).
#[derive(Debug, Clone)]
pub struct Induced {
    pub instance: Instance,
    pub elements: Vec<u32>,
}

/// Restricts `inst` to `uncovered`, re-indexing elements in increasing order.
/// Each base set contributes `B ∩ uncovered` when it has at most `max_size`
/// elements, and otherwise all of its `max_size`-subsets, so every usable set
/// of size `<= max_size` stays available.
pub fn induced_subinstance(inst: &Instance, uncovered: &ElemSet, max_size: usize) -> Induced {
    let elements: Vec<u32> = uncovered.iter().filter(|&e| (e as usize) < inst.n).collect();
    let mut new_id = vec![u32::MAX; inst.n];
    for (i, &e) in elements.iter().enumerate() {
        new_id[e as usize] = i as u32;
    }
    let mut sets: Vec<Vec<u32>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut push = |s: Vec<u32>, sets: &mut Vec<Vec<u32>>| {
        if seen.insert(s.clone()) {
            sets.push(s);
        }
    };
    for base in &inst.base_sets {
        let part: Vec<u32> = base
            .iter()
            .filter(|&&e| uncovered.contains(e))
            .map(|&e| new_id[e as usize])
            .collect();
        if part.is_empty() || max_size == 0 {
            continue;
        }
        if part.len() <= max_size {
            push(part, &mut sets);
        } else {
            for sub in crate::combinatorics::subsets_of_size(&part, max_size) {
                push(sub, &mut sets);
            }
        }
    }
    let k = max_size.min(inst.k).max(1);
    let instance = Instance::new(elements.len(), k, sets)
        .expect("restriction of a valid instance is valid");
    Induced { instance, elements }
}

fn perr(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn parse_elems(line_no: usize, toks: &[&str], n: usize) -> Result<Vec<u32>, ParseError> {
    let mut out = Vec::with_capacity(toks.len());
    for t in toks {
        let v: u64 = t
            .parse()
            .map_err(|_| perr(line_no, ParseErrorKind::BadLine(format!("not an element id: {t}"))))?;
        if v == 0 || v > n as u64 {
            return Err(perr(line_no, ParseErrorKind::ElementOutOfRange { elem: v, n }));
        }
        out.push((v - 1) as u32);
    }
    for w in out.windows(2) {
        if w[0] == w[1] {
            return Err(perr(line_no, ParseErrorKind::DuplicateElement(w[0] as u64 + 1)));
        }
    }
    let mut sorted = out.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != out.len() {
        let dup = out
            .iter()
            .find(|e| out.iter().filter(|x| x == e).count() > 1)
            .copied()
            .unwrap_or(0);
        return Err(perr(line_no, ParseErrorKind::DuplicateElement(dup as u64 + 1)));
    }
    if sorted != out {
        return Err(perr(line_no, ParseErrorKind::NotIncreasing));
    }
    Ok(out)
}

/// Parses the canonical instance format.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize, usize, usize)> = None;
    let mut sets: Vec<Vec<u32>> = Vec::new();
    let mut first_line: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(perr(line_no, ParseErrorKind::BadHeader("repeated header".into())));
                }
                if toks.len() != 5 || toks[1] != "setcover" {
                    return Err(perr(line_no, ParseErrorKind::BadHeader(line.into())));
                }
                let nums: Result<Vec<usize>, _> = toks[2..].iter().map(|t| t.parse()).collect();
                let nums = nums.map_err(|_| perr(line_no, ParseErrorKind::BadHeader(line.into())))?;
                header = Some((nums[0], nums[1], nums[2], line_no));
            }
            "s" => {
                let (n, _, k, _) = header.ok_or(perr(line_no, ParseErrorKind::MissingHeader))?;
                if toks.len() == 1 {
                    return Err(perr(line_no, ParseErrorKind::EmptySet));
                }
                let elems = parse_elems(line_no, &toks[1..], n)?;
                if elems.len() > k {
                    return Err(perr(
                        line_no,
                        ParseErrorKind::SetTooLarge {
                            size: elems.len(),
                            k,
                        },
                    ));
                }
                if let Some(&earlier) = first_line.get(&elems) {
                    return Err(perr(line_no, ParseErrorKind::DuplicateSet(earlier)));
                }
                first_line.insert(elems.clone(), line_no);
                sets.push(elems);
            }
            _ => return Err(perr(line_no, ParseErrorKind::BadLine(line.into()))),
        }
    }
    let (n, m, k, header_line) = header.ok_or(perr(last_line.max(1), ParseErrorKind::MissingHeader))?;
    if sets.len() != m {
        return Err(perr(
            header_line,
            ParseErrorKind::SetCountMismatch {
                declared: m,
                found: sets.len(),
            },
        ));
    }
    Instance::new(n, k, sets).map_err(|e| match e {
        InstanceError::Uncovered(el) => perr(header_line, ParseErrorKind::Uncovered(el as u64 + 1)),
        other => perr(header_line, ParseErrorKind::BadHeader(other.to_string())),
    })
}

/// Writes chosen sets as `c <base set number> <elements...>` lines in
/// canonical order, followed by `stats <total> <ones>`.
pub fn write_sets(sets: &[ChosenSet]) -> String {
    let mut sorted = sets.to_vec();
    sorted.sort_by(canonical_cmp);
    let stats = CoverStats::of(&sorted);
    let mut out = String::new();
    for s in &sorted {
        write!(out, "c {}", s.base_index + 1).unwrap();
        for &e in &s.elements {
            write!(out, " {}", e + 1).unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "stats {} {}", stats.total, stats.ones).unwrap();
    out
}

pub fn write_cover(cover: &Cover) -> String {
    write_sets(&cover.members)
}

/// Reads `c` lines (the `stats` line and comments are ignored). Membership
/// in the base sets is checked by [`validate_cover`], not here.
pub fn parse_sets(text: &str, inst: &Instance) -> Result<Vec<ChosenSet>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("stats") {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] != "c" || toks.len() < 3 {
            return Err(perr(line_no, ParseErrorKind::BadLine(line.into())));
        }
        let base: usize = toks[1]
            .parse()
            .map_err(|_| perr(line_no, ParseErrorKind::BadLine(line.into())))?;
        if base == 0 || base > inst.base_sets.len() {
            return Err(perr(line_no, ParseErrorKind::UnknownBaseSet(base)));
        }
        let elems = parse_elems(line_no, &toks[2..], inst.n)?;
        out.push(ChosenSet::new(base - 1, elems));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_four_set() -> Instance {
        parse_instance("p setcover 4 1 4\ns 1 2 3 4\n").unwrap()
    }

    #[test]
    fn parse_empty_instance() {
        let inst = parse_instance("p setcover 0 0 4").unwrap();
        assert_eq!(inst.n(), 0);
        assert!(inst.base_sets().is_empty());
    }

    #[test]
    fn parse_single_set() {
        let inst = one_four_set();
        assert_eq!(inst.base_sets(), &[vec![0, 1, 2, 3]]);
        assert_eq!(inst.to_text(), "p setcover 4 1 4\ns 1 2 3 4\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_instance("p setcover 4 1 4\ns 1 2 5 4").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.kind, ParseErrorKind::ElementOutOfRange { elem: 5, n: 4 });

        let e = parse_instance("# c\np setcover 3 1 2\ns 1 2 3").unwrap_err();
        assert_eq!((e.line, e.kind), (3, ParseErrorKind::SetTooLarge { size: 3, k: 2 }));

        let e = parse_instance("p setcover 3 1 3\ns 1 1 2").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateElement(1));

        let e = parse_instance("p setcover 3 1 3\ns").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EmptySet);

        let e = parse_instance("p setcover 3 1 3\ns 1 2").unwrap_err();
        assert_eq!((e.line, e.kind), (1, ParseErrorKind::Uncovered(3)));

        let e = parse_instance("p setcover 3 1\ns 1 2 3").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadHeader(_)));

        let e = parse_instance("p setcover 3 2 3\ns 1 2 3\ns 1 2 3").unwrap_err();
        assert_eq!((e.line, e.kind), (3, ParseErrorKind::DuplicateSet(2)));

        let e = parse_instance("p setcover 3 1 3\ns 2 1 3").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NotIncreasing);
    }

    #[test]
    fn validate_whole_set_and_subsets() {
        let inst = one_four_set();
        let whole = Cover {
            members: vec![ChosenSet::new(0, vec![0, 1, 2, 3])],
        };
        let st = validate_cover(&inst, &whole).unwrap();
        assert_eq!((st.total, st.ones), (1, 0));

        let parts = Cover {
            members: vec![
                ChosenSet::new(0, vec![0, 1]),
                ChosenSet::new(0, vec![2]),
                ChosenSet::new(0, vec![3]),
            ],
        };
        let st = validate_cover(&inst, &parts).unwrap();
        assert_eq!((st.total, st.ones), (3, 2));
        assert_eq!(st.by_size.get(&2), Some(&1));
    }

    #[test]
    fn validate_reports_overlap_gap_and_subset_violation() {
        let inst = one_four_set();
        let overlap = Cover {
            members: vec![ChosenSet::new(0, vec![0, 1]), ChosenSet::new(0, vec![1, 2, 3])],
        };
        assert_eq!(
            validate_cover(&inst, &overlap),
            Err(CoverError::Overlap {
                first: 0,
                second: 1,
                elem: 2
            })
        );
        let gap = Cover {
            members: vec![ChosenSet::new(0, vec![0, 1, 2])],
        };
        assert_eq!(validate_cover(&inst, &gap), Err(CoverError::Gap(4)));

        let inst2 = parse_instance("p setcover 4 2 2\ns 1 2\ns 3 4").unwrap();
        let bad = Cover {
            members: vec![ChosenSet::new(0, vec![0, 2]), ChosenSet::new(1, vec![1, 3])],
        };
        assert!(matches!(
            validate_cover(&inst2, &bad),
            Err(CoverError::NotSubset { member: 0, .. })
        ));
    }

    #[test]
    fn induced_identity_and_restriction() {
        let inst = parse_instance("p setcover 5 2 3\ns 1 2 3\ns 3 4 5").unwrap();
        let all = induced_subinstance(&inst, &inst.universe(), 3);
        assert_eq!(all.instance.base_sets(), inst.base_sets());
        assert_eq!(all.elements, vec![0, 1, 2, 3, 4]);

        let single = one_four_set();
        let sub = induced_subinstance(&single, &ElemSet::from_elems(4, &[0, 2]), 3);
        assert_eq!(sub.instance.base_sets(), &[vec![0, 1]]);
        assert_eq!(sub.elements, vec![0, 2]);

        let capped = induced_subinstance(&single, &single.universe(), 3);
        assert_eq!(capped.instance.base_sets().len(), 4);
        assert!(capped.instance.base_sets().iter().all(|s| s.len() == 3));

        let empty = induced_subinstance(&single, &ElemSet::empty(4), 3);
        assert_eq!(empty.instance.n(), 0);
    }

    #[test]
    fn cover_text_round_trip() {
        let inst = parse_instance("p setcover 4 2 2\ns 1 2\ns 3 4").unwrap();
        let sets = vec![ChosenSet::new(1, vec![2, 3]), ChosenSet::new(0, vec![0])];
        let text = write_sets(&sets);
        assert_eq!(text, "c 1 1\nc 2 3 4\nstats 2 1\n");
        let back = parse_sets(&text, &inst).unwrap();
        assert_eq!(write_sets(&back), text);
    }
}
