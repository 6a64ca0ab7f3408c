//! The full pipeline: unrestricted packing phases `k..=7`, 1-set-restricted
//! phases 6, 5, 4, and the semi-local 3-Set Cover finish.
//!
//! Phase `i` packs size-`i` subsets of base sets inside the elements still
//! uncovered; leftovers flow to phase `i - 1`. The restricted phases start
//! from an empty packing, so their plain insertions are gated as well. The
//! gate is compared with its value immediately before each tentative move.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::bitset::ElemSet;
use crate::instance::{validate_cover, Cover, CoverStats, Instance};
use crate::packing::{ImprovementParams, OnesGate, PackingContext};
use crate::semilocal::{semilocal_on, SemiLocalGate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RestrictPhase6 {
    /// Restricted iff `k` is even and at most 12.
    #[default]
    Auto,
    On,
    Off,
}

impl RestrictPhase6 {
    pub fn resolve(self, k: usize) -> bool {
        match self {
            RestrictPhase6::Auto => k.is_multiple_of(2) && k <= 12,
            RestrictPhase6::On => true,
            RestrictPhase6::Off => false,
        }
    }
}

impl std::str::FromStr for RestrictPhase6 {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "on" => Ok(Self::On),
            "off" => Ok(Self::Off),
            _ => Err(format!("expected auto, on or off, got {s:?}")),
        }
    }
}

impl std::fmt::Display for RestrictPhase6 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::On => "on",
            Self::Off => "off",
        })
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub k: usize,
    pub epsilon: BigRational,
    pub restrict_phase6: RestrictPhase6,
    pub s_overrides: BTreeMap<usize, usize>,
    pub seed: u64,
    /// Optimum cover size, when known, for the ratio line of the report.
    pub known_opt: Option<usize>,
}

impl PipelineConfig {
    pub fn new(k: usize, epsilon: BigRational) -> Self {
        PipelineConfig {
            k,
            epsilon,
            restrict_phase6: RestrictPhase6::Auto,
            s_overrides: BTreeMap::new(),
            seed: 0,
            known_opt: None,
        }
    }

    pub fn s_for(&self, i: usize) -> usize {
        self.s_overrides
            .get(&i)
            .copied()
            .unwrap_or_else(|| default_s(i, &self.epsilon))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("config k = {cfg} but the instance has k = {inst}")]
    KMismatch { cfg: usize, inst: usize },
    #[error("k must be at least 3, got {0}")]
    KTooSmall(usize),
    #[error("epsilon must satisfy 0 < eps < 1, got {0}")]
    BadEpsilon(String),
    #[error("s override for phase {0} must be positive")]
    BadS(usize),
    #[error("internal error: produced an invalid cover: {0}")]
    InvalidCover(String),
}

/// `s_i`: `⌈2/(iε)⌉` for `i ∈ {5, 6}`, else `max(3, ⌈log_i(1/ε)⌉)`.
pub fn default_s(i: usize, eps: &BigRational) -> usize {
    if !eps.is_positive() {
        return usize::MAX;
    }
    if i == 5 || i == 6 {
        let v = BigRational::from_integer(BigInt::from(2)) / (BigRational::from_integer(BigInt::from(i)) * eps);
        return v.ceil().to_integer().to_usize().unwrap_or(usize::MAX).max(1);
    }
    let target = eps.recip();
    let base = BigRational::from_integer(BigInt::from(i.max(2)));
    let mut pow = BigRational::one();
    let mut t = 0usize;
    while pow < target {
        pow *= &base;
        t += 1;
    }
    t.max(3)
}

/// Parses an exact rational from `"1/8"`, `"0.125"`, `"1e-7"` or `"2.5e-3"`.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    let err = || format!("not a rational number: {text:?}");
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().map_err(|_| err())? / BigInt::from(10);
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(digits);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseRecord {
    pub i: usize,
    pub restricted: bool,
    pub s: usize,
    /// `|U_i|`: elements uncovered before the phase.
    pub uncovered_before: usize,
    /// `n_i`: sets chosen in the phase.
    pub sets: usize,
    pub commits: usize,
    pub gate_trace: Vec<usize>,
    pub gate_rejections: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseReport {
    pub k: usize,
    pub epsilon: BigRational,
    pub phase6_restricted: bool,
    pub phases: Vec<PhaseRecord>,
    /// Gate value on entry to the first restricted phase.
    pub baseline_ones: Option<usize>,
    pub uncovered_before_3: usize,
    pub semilocal_threes: usize,
    pub semilocal_ones: usize,
    pub semilocal_iterations: usize,
    pub stats: CoverStats,
    pub known_opt: Option<usize>,
}

impl PhaseReport {
    /// Exact `total / opt` when the optimum is known.
    pub fn ratio(&self) -> Option<BigRational> {
        self.known_opt
            .filter(|&o| o > 0)
            .map(|o| BigRational::new(BigInt::from(self.stats.total), BigInt::from(o)))
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "phase  mode        s           |U_i|   sets  commits  gate");
        for p in &self.phases {
            let mode = if p.restricted { "restricted" } else { "packing" };
            let s = if p.s == usize::MAX { "inf".to_string() } else { p.s.to_string() };
            let gate = match (p.gate_trace.first(), p.gate_trace.last()) {
                (Some(a), Some(b)) => format!("{a}->{b}"),
                _ => "-".into(),
            };
            let _ = writeln!(
                out,
                "{:<6} {:<11} {:<11} {:>6} {:>6} {:>8}  {}",
                p.i, mode, s, p.uncovered_before, p.sets, p.commits, gate
            );
        }
        let _ = writeln!(
            out,
            "{:<6} {:<11} {:<11} {:>6} {:>6} {:>8}  ones={}",
            3, "semilocal", "-", self.uncovered_before_3, self.semilocal_threes, self.semilocal_iterations, self.semilocal_ones
        );
        let _ = write!(out, "total {} sets, {} 1-sets", self.stats.total, self.stats.ones);
        if let Some(r) = self.ratio() {
            let _ = write!(out, ", ratio {:.6} vs opt {}", r.to_f64().unwrap_or(f64::NAN), self.known_opt.unwrap_or(0));
        }
        out.push('\n');
        out
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "k={}", self.k);
        let _ = writeln!(out, "eps={}", self.epsilon);
        let _ = writeln!(out, "phase6_restricted={}", self.phase6_restricted);
        let _ = writeln!(out, "phase_order={}", self.phases.iter().map(|p| p.i.to_string()).collect::<Vec<_>>().join(","));
        let _ = writeln!(out, "gate_reference=value_before_each_move");
        if let Some(b) = self.baseline_ones {
            let _ = writeln!(out, "baseline_ones={b}");
        }
        for p in &self.phases {
            let i = p.i;
            let _ = writeln!(out, "phase.{i}.restricted={}", p.restricted);
            let _ = writeln!(out, "phase.{i}.s={}", p.s);
            let _ = writeln!(out, "phase.{i}.uncovered_before={}", p.uncovered_before);
            let _ = writeln!(out, "phase.{i}.sets={}", p.sets);
            let _ = writeln!(out, "phase.{i}.commits={}", p.commits);
            if p.restricted {
                let trace: Vec<String> = p.gate_trace.iter().map(usize::to_string).collect();
                let _ = writeln!(out, "phase.{i}.gate_trace={}", trace.join(","));
                let _ = writeln!(out, "phase.{i}.gate_rejections={}", p.gate_rejections);
            }
        }
        let _ = writeln!(out, "phase.3.uncovered_before={}", self.uncovered_before_3);
        let _ = writeln!(out, "phase.3.threes={}", self.semilocal_threes);
        let _ = writeln!(out, "phase.3.ones={}", self.semilocal_ones);
        let _ = writeln!(out, "phase.3.iterations={}", self.semilocal_iterations);
        let _ = writeln!(out, "total={}", self.stats.total);
        let _ = writeln!(out, "ones={}", self.stats.ones);
        for (size, count) in &self.stats.by_size {
            let _ = writeln!(out, "size.{size}={count}");
        }
        if let (Some(o), Some(r)) = (self.known_opt, self.ratio()) {
            let _ = writeln!(out, "opt={o}");
            let _ = writeln!(out, "ratio={}", r);
            let _ = writeln!(out, "ratio_decimal={:.6}", r.to_f64().unwrap_or(f64::NAN));
        }
        out
    }
}

/// Runs the pipeline and returns a validated cover with its report.
pub fn solve(inst: &Instance, cfg: &PipelineConfig) -> Result<(Cover, PhaseReport), PipelineError> {
    if cfg.k < 3 {
        return Err(PipelineError::KTooSmall(cfg.k));
    }
    if inst.k() > cfg.k {
        return Err(PipelineError::KMismatch { cfg: cfg.k, inst: inst.k() });
    }
    if !cfg.epsilon.is_positive() || cfg.epsilon >= BigRational::one() {
        return Err(PipelineError::BadEpsilon(cfg.epsilon.to_string()));
    }
    if let Some((&i, _)) = cfg.s_overrides.iter().find(|(_, &s)| s == 0) {
        return Err(PipelineError::BadS(i));
    }
    let n = inst.n();
    let mut uncovered: ElemSet = inst.universe();
    let mut cover = Cover::default();
    let mut phases = Vec::new();
    let phase6_restricted = cfg.restrict_phase6.resolve(cfg.k);
    let mut gate = SemiLocalGate::new(inst);
    let mut baseline_ones = None;
    for i in (4..=cfg.k).rev() {
        let restricted = i <= 5 || (i == 6 && phase6_restricted);
        let s = cfg.s_for(i);
        let ctx = PackingContext::new(inst, i, &uncovered);
        let params = ImprovementParams { i, s, restricted };
        let outcome = if restricted {
            if baseline_ones.is_none() {
                baseline_ones = Some(gate.ones(&uncovered));
            }
            ctx.improve(&crate::instance::Packing::empty(i), params, Some(&mut gate))
        } else {
            ctx.improve(&ctx.maximal_packing(), params, None)
        };
        let uncovered_before = uncovered.len();
        let covered = outcome.packing.covered(n);
        uncovered.difference_with(&covered);
        phases.push(PhaseRecord {
            i,
            restricted,
            s,
            uncovered_before,
            sets: outcome.packing.len(),
            commits: outcome.stats.commits,
            gate_trace: outcome.stats.gate_trace,
            gate_rejections: outcome.stats.gate_rejections,
        });
        cover.members.extend(outcome.packing.members);
    }
    let uncovered_before_3 = uncovered.len();
    let finish = semilocal_on(inst, &uncovered);
    cover.members.extend(finish.cover.members);
    cover.sort_canonical();
    let stats = validate_cover(inst, &cover).map_err(|e| PipelineError::InvalidCover(e.to_string()))?;
    let report = PhaseReport {
        k: cfg.k,
        epsilon: cfg.epsilon.clone(),
        phase6_restricted,
        phases,
        baseline_ones,
        uncovered_before_3,
        semilocal_threes: finish.threes,
        semilocal_ones: finish.ones,
        semilocal_iterations: finish.iterations,
        stats,
        known_opt: cfg.known_opt,
    };
    Ok((cover, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/8").unwrap(), q(1, 8));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("1e-7").unwrap(), q(1, 10_000_000));
        assert_eq!(parse_rational("2.5E-1").unwrap(), q(1, 4));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn s_defaults() {
        let e = q(1, 8);
        assert_eq!(default_s(5, &e), 4);
        assert_eq!(default_s(6, &e), 3);
        assert_eq!(default_s(4, &e), 3);
        assert_eq!(default_s(7, &q(1, 10_000_000)), 9);
    }

    #[test]
    fn phase6_resolution() {
        assert!(RestrictPhase6::Auto.resolve(6));
        assert!(RestrictPhase6::Auto.resolve(12));
        assert!(!RestrictPhase6::Auto.resolve(7));
        assert!(!RestrictPhase6::Auto.resolve(14));
        assert!(RestrictPhase6::On.resolve(7));
    }

    #[test]
    fn disjoint_k_sets_give_ratio_one() {
        let inst = parse_instance("p setcover 10 2 5\ns 1 2 3 4 5\ns 6 7 8 9 10").unwrap();
        let mut cfg = PipelineConfig::new(5, q(1, 8));
        cfg.known_opt = Some(2);
        let (cover, report) = solve(&inst, &cfg).unwrap();
        assert_eq!(cover.members.len(), 2);
        assert_eq!(report.ratio(), Some(q(1, 1)));
        assert!(report.to_kv().contains("total=2"));
    }

    #[test]
    fn k3_is_semilocal_only() {
        let inst = parse_instance("p setcover 4 2 3\ns 1 2 3\ns 3 4").unwrap();
        let (cover, report) = solve(&inst, &PipelineConfig::new(3, q(1, 8))).unwrap();
        assert_eq!(cover.members.len(), 2);
        assert!(report.phases.is_empty());
    }
}
