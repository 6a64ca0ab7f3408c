//! Instance families with known optimal covers and intended packings.
//!
//! The structured families are built from copies of a 16-set unit: sets
//! `O_1..O_16` whose first and second elements are packed by seven 4-sets
//! `A_1..A_7` (so `O_1..O_12` are 2-level and `O_13..O_16` are 1-level), plus
//! blocking sets `B` that have three elements packed by a chain of 4-sets
//! `C` and one unpacked element. Cross 2-sets tie each blocking set's
//! unpacked element to a path of 2-level sets ending at another blocking set,
//! so the perfect 2-set matching on the residual breaks (creating 1-sets)
//! whenever a path member enters the packing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitset::ElemSet;
use crate::error::InstanceError;
use crate::instance::{canonical_cmp, ChosenSet, Cover, Instance, Packing};
use crate::packing::{Certification, ImprovementParams, PackingContext};
use crate::semilocal::SemiLocalGate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("no certified instance after {tries} attempts")]
    RetriesExhausted { tries: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub instance: Instance,
    pub known_opt: Option<Cover>,
    pub intended_packing: Option<Packing>,
    pub family: String,
    /// Family parameters and realized counts, in emission order.
    pub params: Vec<(String, String)>,
    pub seed: u64,
}

impl GeneratedInstance {
    /// `# key=value` comment lines followed by the instance text.
    pub fn to_text(&self) -> String {
        let mut out = format!("# family={} seed={}", self.family, self.seed);
        if let Some(opt) = &self.known_opt {
            out.push_str(&format!(" opt={}", opt.members.len()));
        }
        out.push('\n');
        for (k, v) in &self.params {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&self.instance.to_text());
        out
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Slot `j` (0-based) of optimal set `set`.
type Slot = (usize, usize);

/// Builder for O/B/A/C structures over slots of optimal sets.
struct Layout {
    /// Sizes of the optimal sets (all 4 in the structured families).
    opt_sizes: Vec<usize>,
    packed: Vec<Vec<Slot>>,
    cross: Vec<Vec<Slot>>,
    /// Unpacked slots numbered before all other unpacked slots.
    priority: Vec<Slot>,
}

impl Layout {
    fn build(self) -> Result<(Instance, Cover, Packing), GenError> {
        let mut id: Vec<Vec<Option<u32>>> = self.opt_sizes.iter().map(|&s| vec![None; s]).collect();
        let mut next = 0u32;
        let mut assign = |slot: Slot, id: &mut Vec<Vec<Option<u32>>>| {
            if id[slot.0][slot.1].is_none() {
                id[slot.0][slot.1] = Some(next);
                next += 1;
            }
        };
        for set in &self.packed {
            for &s in set {
                assign(s, &mut id);
            }
        }
        for &s in &self.priority {
            assign(s, &mut id);
        }
        for (o, size) in self.opt_sizes.iter().enumerate() {
            for j in 0..*size {
                assign((o, j), &mut id);
            }
        }
        let n = next as usize;
        let ids = |slots: &[Slot]| -> Vec<u32> {
            let mut v: Vec<u32> = slots.iter().map(|&(o, j)| id[o][j].expect("assigned")).collect();
            v.sort_unstable();
            v
        };
        let mut sets: Vec<Vec<u32>> = Vec::new();
        for (o, size) in self.opt_sizes.iter().enumerate() {
            let slots: Vec<Slot> = (0..*size).map(|j| (o, j)).collect();
            sets.push(ids(&slots));
        }
        let opt_count = sets.len();
        for p in &self.packed {
            sets.push(ids(p));
        }
        for c in &self.cross {
            sets.push(ids(c));
        }
        let k = sets.iter().map(Vec::len).max().unwrap_or(1);
        let instance = Instance::new(n, k, sets.clone())?;
        let mut known = Cover {
            members: (0..opt_count).map(|b| ChosenSet::new(b, sets[b].clone())).collect(),
        };
        known.sort_canonical();
        let mut members: Vec<ChosenSet> = (0..self.packed.len())
            .map(|p| ChosenSet::new(opt_count + p, sets[opt_count + p].clone()))
            .collect();
        members.sort_by(canonical_cmp);
        let size_class = members.first().map_or(4, ChosenSet::len);
        Ok((instance, known, Packing { size_class, members }))
    }
}

/// The A-sets of one unit, as (O index within the unit, slot) quadruples.
fn unit_a_sets() -> Vec<[Slot; 4]> {
    let mut a = Vec::new();
    for i in 0..4 {
        a.push([(i, 0), (i + 4, 0), (i + 8, 0), (i + 12, 0)]);
    }
    for g in 0..3 {
        a.push([(4 * g, 1), (4 * g + 1, 1), (4 * g + 2, 1), (4 * g + 3, 1)]);
    }
    a
}

/// Adds `units` copies of the unit starting at optimal-set index `base`;
/// returns the O indices per unit.
fn add_units(layout: &mut Layout, units: usize) -> Vec<[usize; 16]> {
    let mut out = Vec::new();
    for _ in 0..units {
        let start = layout.opt_sizes.len();
        layout.opt_sizes.extend([4; 16]);
        let os: [usize; 16] = std::array::from_fn(|i| start + i);
        for a in unit_a_sets() {
            layout.packed.push(a.iter().map(|&(i, j)| (os[i], j)).collect());
        }
        out.push(os);
    }
    out
}

/// Chains packed blocking-set slots (in `order`) into consecutive 4-sets,
/// starting `offset` slots into the cyclic sequence.
fn add_c_chain(layout: &mut Layout, order: &[(usize, usize)], offset: usize) -> Result<(), GenError> {
    let seq: Vec<Slot> = order
        .iter()
        .flat_map(|&(b, packed)| (0..packed).map(move |j| (b, j)))
        .collect();
    if !seq.len().is_multiple_of(4) {
        return Err(GenError::Param(format!(
            "{} packed blocking elements cannot be split into 4-sets",
            seq.len()
        )));
    }
    let len = seq.len();
    for c in 0..len / 4 {
        layout
            .packed
            .push((0..4).map(|t| seq[(offset + 4 * c + t) % len]).collect());
    }
    Ok(())
}

/// Cross 2-sets along `b_start-path[0]-...-path[l-1]-b_end`.
/// O sets contribute slots 2 (entry) and 3 (exit); blocking sets slot 3.
fn add_path(layout: &mut Layout, b_start: usize, path: &[usize], b_end: usize) {
    let mut prev = (b_start, 3);
    for &o in path {
        layout.cross.push(vec![prev, (o, 2)]);
        prev = (o, 3);
    }
    layout.cross.push(vec![prev, (b_end, 3)]);
}

/// Single blocking unit, `m` blocking sets. `B_1..B_12` are 3-level and
/// joined in six paths `B_i-O_i-O_{i+6}-B_{i+6}`; `B_13..B_m` are fully
/// packed by the C-chain. Known optimum: the 16 + m O/B sets.
pub fn gen_unit_u(m: usize) -> Result<GeneratedInstance, GenError> {
    if m < 13 {
        return Err(GenError::Param(format!("m must be at least 13, got {m}")));
    }
    let mut layout = Layout {
        opt_sizes: Vec::new(),
        packed: Vec::new(),
        cross: Vec::new(),
        priority: Vec::new(),
    };
    let os = add_units(&mut layout, 1)[0];
    let b0 = layout.opt_sizes.len();
    layout.opt_sizes.extend(std::iter::repeat_n(4, m));
    let order: Vec<(usize, usize)> = (0..m).map(|i| (b0 + i, if i < 12 { 3 } else { 4 })).collect();
    add_c_chain(&mut layout, &order, 2)?;
    for i in 0..6 {
        add_path(&mut layout, b0 + i, &[os[i], os[i + 6]], b0 + i + 6);
    }
    let (instance, known, packing) = layout.build()?;
    Ok(GeneratedInstance {
        instance,
        known_opt: Some(known),
        intended_packing: Some(packing),
        family: "unit4".into(),
        params: vec![("m".into(), m.to_string())],
        seed: 0,
    })
}

/// Named sets of the blocking unit inside a [`gen_unit_u`] instance
/// (base indices): `o[i]` is `O_{i+1}`, `b[i]` is `B_{i+1}`, `a[i]` is `A_{i+1}`.
#[derive(Debug, Clone)]
pub struct UnitNames {
    pub o: Vec<usize>,
    pub b: Vec<usize>,
    pub a: Vec<usize>,
}

/// Base indices of the named sets of a `gen_unit_u(m)` instance.
pub fn unit_names(m: usize) -> UnitNames {
    UnitNames {
        o: (0..16).collect(),
        b: (16..16 + m).collect(),
        a: (16 + m..16 + m + 7).collect(),
    }
}

fn restricted_certified(inst: &Instance, packing: &Packing, s: usize, node_cap: u64) -> Certification {
    let ctx = PackingContext::for_universe(inst, 4);
    let mut gate = SemiLocalGate::new(inst);
    ctx.certify(
        packing,
        ImprovementParams { i: 4, s, restricted: true },
        Some(&mut gate),
        node_cap,
    )
}

/// Node cap used when certifying generated instances.
pub const CERTIFY_NODE_CAP: u64 = 20_000_000;

/// Attempts at placing one unit's 2-level sets before giving up.
const PLACEMENT_TRIES: usize = 100_000;

/// Random placement of one unit's twelve 2-level sets on `paths` blocking
/// paths: each set goes to a uniformly random path, in random order along
/// it. Resampled until [`placement_blocks`] holds. Returns `(cell, path)` in
/// path order, where cell `4g + c` is the set in A-row `g` and A-column `c`.
fn blocked_placement(paths: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>, GenError> {
    for _ in 0..PLACEMENT_TRIES {
        let mut cells: Vec<usize> = (0..12).collect();
        cells.shuffle(rng);
        let placement: Vec<(usize, usize)> = cells.into_iter().map(|c| (c, rng.gen_range(0..paths))).collect();
        if placement_blocks(&placement) {
            return Ok(placement);
        }
    }
    Err(GenError::Param(format!("no blocking placement on {paths} paths")))
}

/// Parity test for the unit's gainful 3-for-4 swaps. Removing row `g` and
/// columns `c1`, `c2` inserts two 2-level sets, cutting their paths into
/// pieces whose ends are odd. Each removed A-set leaves a freed pair whose
/// members can flip the parity of the pieces holding them. The swap is
/// blocked when some component of the flip graph keeps an odd number of
/// odd pieces, since the residual then needs an extra 1-set.
fn placement_blocks(placement: &[(usize, usize)]) -> bool {
    let mut loc = [(0usize, 0usize); 12];
    for (order, &(cell, path)) in placement.iter().enumerate() {
        loc[cell] = (path, order);
    }
    for g in 0..3 {
        for c1 in 0..4 {
            for c2 in c1 + 1..4 {
                let inserted = [4 * g + c1, 4 * g + c2];
                let others = |c: usize| -> Vec<usize> { (0..3).filter(|&r| r != g).map(|r| 4 * r + c).collect() };
                let row: Vec<usize> = (0..4).filter(|&c| c != c1 && c != c2).map(|c| 4 * g + c).collect();
                let pairs = [others(c1), others(c2), row];
                // Piece id: (path, number of cuts before the position on it).
                let piece = |cell: usize| -> (usize, usize) {
                    let (p, x) = loc[cell];
                    (p, inserted.iter().filter(|&&i| loc[i].0 == p && loc[i].1 < x).count())
                };
                let mut odd: Vec<(usize, usize)> = Vec::new();
                for &i in &inserted {
                    let p = loc[i].0;
                    let cuts = inserted.iter().filter(|&&j| loc[j].0 == p).count();
                    for end in [(p, 0), (p, cuts)] {
                        if !odd.contains(&end) {
                            odd.push(end);
                        }
                    }
                }
                let mut nodes: Vec<(usize, usize)> = odd.clone();
                let mut parent: Vec<usize> = (0..nodes.len()).collect();
                fn find(parent: &mut [usize], mut x: usize) -> usize {
                    while parent[x] != x {
                        parent[x] = parent[parent[x]];
                        x = parent[x];
                    }
                    x
                }
                for pair in &pairs {
                    let ids: Vec<usize> = pair
                        .iter()
                        .map(|&c| {
                            let node = piece(c);
                            nodes.iter().position(|&n| n == node).unwrap_or_else(|| {
                                nodes.push(node);
                                parent.push(parent.len());
                                nodes.len() - 1
                            })
                        })
                        .collect();
                    let (a, b) = (find(&mut parent, ids[0]), find(&mut parent, ids[1]));
                    parent[a] = b;
                }
                let mut odd_per_root = std::collections::HashMap::new();
                for i in 0..odd.len() {
                    *odd_per_root.entry(find(&mut parent, i)).or_insert(0usize) += 1;
                }
                if odd_per_root.values().all(|v| v % 2 == 0) {
                    return false;
                }
            }
        }
    }
    true
}

/// Builds chained units with random blocking paths.
fn random_blocked_units(
    units: usize,
    blockers: usize,
    rng: &mut ChaCha8Rng,
    priority_triples: bool,
) -> Result<(Instance, Cover, Packing, usize), GenError> {
    let mut layout = Layout {
        opt_sizes: Vec::new(),
        packed: Vec::new(),
        cross: Vec::new(),
        priority: Vec::new(),
    };
    let unit_os = add_units(&mut layout, units);
    let one_level: Vec<usize> = unit_os.iter().flat_map(|u| u[12..].iter().copied()).collect();
    let paths = blockers / 2;
    if paths < 2 {
        return Err(GenError::Param(format!("need at least 4 blocking sets, got {blockers}")));
    }
    let extra_pair = !(3 * blockers).is_multiple_of(4);
    let b_total = blockers + if extra_pair { 2 } else { 0 };
    let b0 = layout.opt_sizes.len();
    layout.opt_sizes.extend(std::iter::repeat_n(4, b_total));
    let mut routes: Vec<Vec<usize>> = vec![Vec::new(); paths];
    for os in &unit_os {
        let placement = blocked_placement(paths, rng)?;
        for &(cell, path) in &placement {
            routes[path].push(os[cell]);
        }
    }
    let mut ends: Vec<usize> = (0..blockers).map(|i| b0 + i).collect();
    ends.shuffle(rng);
    for (p, route) in routes.iter().enumerate() {
        add_path(&mut layout, ends[2 * p], route, ends[2 * p + 1]);
    }
    if extra_pair {
        layout.cross.push(vec![(b0 + blockers, 3), (b0 + blockers + 1, 3)]);
    }
    let mut order: Vec<(usize, usize)> = (0..b_total).map(|i| (b0 + i, 3)).collect();
    order.shuffle(rng);
    add_c_chain(&mut layout, &order, 0)?;
    if priority_triples {
        if !one_level.len().is_multiple_of(3) {
            return Err(GenError::Param("1-level set count must be divisible by 3".into()));
        }
        for t in one_level.chunks(3) {
            let triple: Vec<Slot> = t.iter().map(|&o| (o, 1)).collect();
            layout.priority.extend(triple.iter().copied());
            layout.cross.push(triple);
        }
    }
    let (inst, known, packing) = layout.build()?;
    Ok((inst, known, packing, b_total))
}

/// Chained units with `m_blockers` blocking sets on random paths through
/// the `12·n_units` 2-level sets, resampled until the intended packing is a
/// certified fixed point of restricted 4-packing at parameter `s`.
pub fn gen_tight_r4sp(n_units: usize, m_blockers: usize, s: usize, seed: u64) -> Result<GeneratedInstance, GenError> {
    gen_tight_r4sp_with(n_units, m_blockers, s, seed, 20)
}

pub fn gen_tight_r4sp_with(
    n_units: usize,
    m_blockers: usize,
    s: usize,
    seed: u64,
    max_tries: usize,
) -> Result<GeneratedInstance, GenError> {
    if n_units == 0 || m_blockers < 2 || !m_blockers.is_multiple_of(2) || s == 0 {
        return Err(GenError::Param(
            "need n_units >= 1, an even m_blockers >= 2 and s >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..max_tries {
        let (inst, known, packing, b_total) = random_blocked_units(n_units, m_blockers, &mut rng, false)?;
        let cert = restricted_certified(&inst, &packing, s, CERTIFY_NODE_CAP);
        if let Certification::Certified { nodes } = cert {
            return Ok(GeneratedInstance {
                instance: inst,
                known_opt: Some(known),
                intended_packing: Some(packing),
                family: "tight4".into(),
                params: vec![
                    ("n_units".into(), n_units.to_string()),
                    ("m_blockers".into(), m_blockers.to_string()),
                    ("blocking_sets_total".into(), b_total.to_string()),
                    ("s".into(), s.to_string()),
                    ("retries".into(), attempt.to_string()),
                    ("certify_nodes".into(), nodes.to_string()),
                ],
                seed,
            });
        }
    }
    Err(GenError::RetriesExhausted { tries: max_tries })
}

/// Ratio `(7u + 3M/4) / (16u + M)` of the intended packing of a tight4
/// instance with `u` units and `M` blocking sets in total.
pub fn r4sp_intended_ratio(units: usize, blocking_total: usize) -> num_rational::BigRational {
    use num_bigint::BigInt;
    let u = BigInt::from(units);
    let m = BigInt::from(blocking_total);
    num_rational::BigRational::new(
        BigInt::from(28) * &u + BigInt::from(3) * &m,
        BigInt::from(4) * (BigInt::from(16) * u + m),
    )
}

/// Tight family for the full pipeline at `k = 4`: `scale` units with 2-level
/// sets (fraction `3/4(1-ε₀)`), 1-level sets whose first unpacked elements
/// form cross 3-sets (fraction `1/4(1-ε₀)`), and `ε₀`-fraction 3-level
/// blocking sets. Expected cover size `73u/3 + 5m/4` against `16u + m`.
pub fn gen_tight_prpsli(
    k: usize,
    eps0: &num_rational::BigRational,
    scale: usize,
    seed: u64,
) -> Result<GeneratedInstance, GenError> {
    use num_traits::{One, ToPrimitive, Zero};
    if k != 4 {
        return Err(GenError::Unsupported(format!(
            "tight pipeline instances are generated for k = 4 only (k = {k}); see tight_ratio_formula"
        )));
    }
    if eps0 <= &num_rational::BigRational::zero() || eps0 >= &num_rational::BigRational::one() {
        return Err(GenError::Param("ε₀ must lie strictly between 0 and 1".into()));
    }
    if scale == 0 || !scale.is_multiple_of(3) {
        return Err(GenError::Param(format!("scale must be a positive multiple of 3, got {scale}")));
    }
    let m = eps0 * num_rational::BigRational::from_integer((16 * scale).into())
        / (num_rational::BigRational::one() - eps0);
    if !m.is_integer() {
        return Err(GenError::Param(format!("ε₀ gives a fractional blocking-set count {m}")));
    }
    let m = m.to_integer().to_usize().ok_or_else(|| GenError::Param("too large".into()))?;
    if m == 0 || m % 4 != 0 {
        return Err(GenError::Param(format!(
            "blocking-set count {m} must be a positive multiple of 4"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = crate::prpsli::default_s(4, eps0);
    for attempt in 0..20 {
        let (inst, known, packing, b_total) = random_blocked_units(scale, m, &mut rng, true)?;
        if let Certification::Certified { .. } = restricted_certified(&inst, &packing, s, CERTIFY_NODE_CAP) {
            let expected = 73 * scale / 3 + 5 * m / 4;
            return Ok(GeneratedInstance {
                instance: inst,
                known_opt: Some(known),
                intended_packing: Some(packing),
                family: "tight-k".into(),
                params: vec![
                    ("k".into(), "4".into()),
                    ("eps0".into(), eps0.to_string()),
                    ("scale".into(), scale.to_string()),
                    ("blocking_sets_total".into(), b_total.to_string()),
                    ("s".into(), s.to_string()),
                    ("expected_cover".into(), expected.to_string()),
                    ("retries".into(), attempt.to_string()),
                ],
                seed,
            });
        }
    }
    Err(GenError::RetriesExhausted { tries: 20 })
}

/// Ratio of the tight pipeline family as a function of `k` and the
/// fraction `ε`: `73/48 − 13ε/48` for `k = 4`, `26/15 − ε/80` for `k = 5`,
/// and the odd/even recursions down to `4/3` for larger `k`.
pub fn tight_ratio_formula(k: usize, eps: &num_rational::BigRational) -> Result<num_rational::BigRational, GenError> {
    use num_bigint::BigInt;
    let r = |n: i64, d: i64| num_rational::BigRational::new(BigInt::from(n), BigInt::from(d));
    let gap = |k: usize| r(1, k as i64 - 1) - r(1, k as i64);
    Ok(match k {
        0..=2 => return Err(GenError::Param(format!("k must be at least 3, got {k}"))),
        3 => r(4, 3),
        4 => r(73, 48) - r(13, 48) * eps,
        5 => r(26, 15) - r(1, 80) * eps,
        _ if k % 2 == 1 => r(2, k as i64) + gap(k) * eps + tight_ratio_formula(k - 2, eps)?,
        _ => r(2, k as i64) + r(1, k as i64 - 1) + gap(k) * eps + tight_ratio_formula(k - 3, eps)?,
    })
}

/// Random instance: `m_sets` sets of size `1 + Binomial(k-1, density)` over
/// `n` elements, duplicates dropped, singletons added for uncovered elements.
pub fn gen_random(n: usize, k: usize, m_sets: usize, density: f64, seed: u64) -> Result<GeneratedInstance, GenError> {
    if k == 0 || !(0.0..=1.0).contains(&density) {
        return Err(GenError::Param("need k >= 1 and density in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets: Vec<Vec<u32>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    if n > 0 {
        for _ in 0..m_sets {
            let size = (1 + (1..k).filter(|_| rng.gen_bool(density)).count()).min(n);
            let all: Vec<u32> = (0..n as u32).collect();
            let mut set: Vec<u32> = all.choose_multiple(&mut rng, size).copied().collect();
            set.sort_unstable();
            if seen.insert(set.clone()) {
                sets.push(set);
            }
        }
    }
    let mut covered = ElemSet::empty(n);
    for s in &sets {
        covered.insert_all(s);
    }
    for e in 0..n as u32 {
        if !covered.contains(e) && seen.insert(vec![e]) {
            sets.push(vec![e]);
        }
    }
    let instance = Instance::new(n, k, sets)?;
    Ok(GeneratedInstance {
        instance,
        known_opt: None,
        intended_packing: None,
        family: "random".into(),
        params: vec![
            ("n".into(), n.to_string()),
            ("k".into(), k.to_string()),
            ("m_sets".into(), m_sets.to_string()),
            ("density".into(), density.to_string()),
        ],
        seed,
    })
}

/// A random partition of `blocks·k` elements into k-sets (the known optimum)
/// plus `extra` random sets of size 2..=k.
pub fn gen_planted(blocks: usize, k: usize, extra: usize, seed: u64) -> Result<GeneratedInstance, GenError> {
    if k < 2 || blocks == 0 {
        return Err(GenError::Param("need k >= 2 and blocks >= 1".into()));
    }
    let n = blocks * k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    let mut sets: Vec<Vec<u32>> = perm
        .chunks(k)
        .map(|c| {
            let mut v = c.to_vec();
            v.sort_unstable();
            v
        })
        .collect();
    let mut seen: std::collections::HashSet<Vec<u32>> = sets.iter().cloned().collect();
    let all: Vec<u32> = (0..n as u32).collect();
    for _ in 0..extra {
        let size = rng.gen_range(2..=k);
        let mut set: Vec<u32> = all.choose_multiple(&mut rng, size).copied().collect();
        set.sort_unstable();
        if seen.insert(set.clone()) {
            sets.push(set);
        }
    }
    let instance = Instance::new(n, k, sets.clone())?;
    let mut known = Cover {
        members: (0..blocks).map(|b| ChosenSet::new(b, sets[b].clone())).collect(),
    };
    known.sort_canonical();
    Ok(GeneratedInstance {
        instance,
        known_opt: Some(known),
        intended_packing: None,
        family: "planted".into(),
        params: vec![
            ("blocks".into(), blocks.to_string()),
            ("k".into(), k.to_string()),
            ("extra".into(), extra.to_string()),
        ],
        seed,
    })
}
