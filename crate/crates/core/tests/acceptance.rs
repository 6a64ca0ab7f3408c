//! Acceptance criteria 1-10. Each criterion prints one `PASS`/`FAIL` line
//! with its measurements; the test fails if any criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kcover::blocking::{analyze, uncovered};
use kcover::frlp::{build_lp, dual_certificate, emit_table, rho_closed_form, solve_lp, TABLE_ONE};
use kcover::generators::{
    gen_planted, gen_random, gen_tight_prpsli, gen_tight_r4sp, gen_unit_u, tight_ratio_formula, unit_names,
};
use kcover::instance::{parse_sets, write_cover, write_sets};
use kcover::matching::{max_matching, max_matching_bruteforce, Graph};
use kcover::oracle::{min_cover_exact, min_ones_exact, OracleBudget};
use kcover::packing::{
    certify_no_improvement, improve_packing, Certification, Improvement, ImprovementParams, PackingContext,
};
use kcover::prpsli::{parse_rational, solve, PipelineConfig};
use kcover::semilocal::{semilocal_cover, semilocal_on, SemiLocalGate};
use kcover::{parse_instance, validate_cover, ChosenSet, Cover, Instance, Packing};

/// Table values are given to 4 decimals.
const TABLE_TOLERANCE: f64 = 1e-3;
/// Published value excluded from the table check.
const TABLE_EXEMPT_K: usize = 20;
const LP_DUAL_TOLERANCE: (i64, i64) = (1, 100_000);
/// Criterion 8 window above 7/16.
const R4SP_WINDOW: (i64, i64) = (1, 50);
/// Criterion 9 additive slack, as a fraction of OPT.
const PIPELINE_SLACK: (i64, i64) = (1, 100);
const TIGHT_TOLERANCE: (i64, i64) = (1, 1_000_000);

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn qu(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn dec(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    run: fn() -> Verdict,
}

fn c1_table() -> Verdict {
    let eps = parse_rational("1e-7").unwrap();
    let ks: Vec<usize> = TABLE_ONE.iter().map(|&(k, _)| k).collect();
    let table = emit_table(&ks, &eps);
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    let mut exempt = String::new();
    for line in table.lines().skip(1) {
        let mut cols = line.split_whitespace();
        let k: usize = cols.next().unwrap().parse().unwrap();
        let got: f64 = cols.next().unwrap().parse().unwrap();
        let want: f64 = TABLE_ONE.iter().find(|&&(t, _)| t == k).unwrap().1.parse().unwrap();
        if k == TABLE_EXEMPT_K {
            exempt = format!("k={k} exempt ({got:.4} vs listed {want:.4})");
            continue;
        }
        let diff = (got - want).abs();
        worst = worst.max(diff);
        if diff > TABLE_TOLERANCE {
            bad.push(k);
        }
    }
    verdict(
        bad.is_empty(),
        format!("{} rows, max |diff| {worst:.1e}, failing k {bad:?}; {exempt}", ks.len() - 1),
    )
}

fn c2_lp_dual() -> Verdict {
    let eps = parse_rational("1e-7").unwrap();
    let tol = q(LP_DUAL_TOLERANCE.0, LP_DUAL_TOLERANCE.1);
    let mut bad = Vec::new();
    let mut worst = q(0, 1);
    for k in 4..=12 {
        let primal = solve_lp(&build_lp(k, &eps).unwrap()).unwrap().optimum;
        let dual = dual_certificate(k, &eps).unwrap().objective;
        let gap = &dual - &primal;
        if gap.is_negative() || gap > tol {
            bad.push(k);
        }
        if gap > worst {
            worst = gap;
        }
    }
    let zero = q(0, 1);
    let lp4 = solve_lp(&build_lp(4, &zero).unwrap()).unwrap().optimum;
    let lp5 = solve_lp(&build_lp(5, &zero).unwrap()).unwrap().optimum;
    let exact = lp4 == q(73, 48) && lp5 == q(26, 15);
    verdict(
        bad.is_empty() && exact,
        format!("k=4..12 max dual-primal gap {:.1e}, failing k {bad:?}; eps=0: k=4 {lp4}, k=5 {lp5}", dec(&worst)),
    )
}

fn c3_dual_sweep() -> Verdict {
    let eps = parse_rational("1e-9").unwrap();
    let mut checks = 0;
    let mut bad = Vec::new();
    for k in 4..=60 {
        match dual_certificate(k, &eps) {
            Ok(d) => checks += d.checks.len(),
            Err(_) => bad.push(k),
        }
    }
    verdict(bad.is_empty(), format!("k=4..60, {checks} dual constraints checked exactly, failing k {bad:?}"))
}

fn c4_semilocal() -> Verdict {
    let budget = OracleBudget::default();
    let (mut ratio_bad, mut ones_bad, mut invalid) = (0, 0, 0);
    let count = 240u64;
    for seed in 0..count {
        let n = 6 + (seed % 10) as usize;
        let density = [0.5, 0.7, 0.9][(seed % 3) as usize];
        let g = gen_random(n, 3, n + (seed % 5) as usize, density, seed).unwrap();
        let inst = &g.instance;
        let r = semilocal_cover(inst).unwrap();
        if validate_cover(inst, &r.cover).is_err() {
            invalid += 1;
        }
        let opt = min_cover_exact(inst, &budget).unwrap();
        if 3 * r.cover.members.len() > 4 * opt.size {
            ratio_bad += 1;
        }
        if r.ones != min_ones_exact(inst, &budget).unwrap() {
            ones_bad += 1;
        }
    }
    verdict(
        ratio_bad + ones_bad + invalid == 0,
        format!("{count} instances n=6..15: ratio violations {ratio_bad}, 1-set mismatches {ones_bad}, invalid {invalid}"),
    )
}

fn c5_matching() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let count = 300;
    let mut bad = 0;
    for t in 0..count {
        let n = 1 + t % 12;
        let p = rng.gen_range(0.1..0.9);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.gen_bool(p))
            .collect();
        let g = Graph::new(n, edges).unwrap();
        let fast = max_matching(&g);
        let slow = max_matching_bruteforce(&g).unwrap();
        if fast.len() != slow.len() || !fast.is_valid_for(&g) {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("{count} graphs with 1..12 vertices, {bad} mismatches"))
}

fn c6_blocking() -> Verdict {
    let (mut checked, mut failed, mut skipped) = (0, 0, 0);
    let mut first_failure = String::new();
    for seed in 0..400u64 {
        if checked >= 150 {
            break;
        }
        let k = 4 + (seed % 2) as usize;
        let blocks = 3 + (seed % 4) as usize;
        let g = gen_planted(blocks, k, blocks * 4, seed).unwrap();
        let inst = &g.instance;
        let optimal: Vec<Vec<u32>> = g.known_opt.as_ref().unwrap().members.iter().map(|c| c.elements.clone()).collect();
        let params = ImprovementParams { i: k, s: 3, restricted: true };
        let mut gate = SemiLocalGate::new(inst);
        let fixed = improve_packing(inst, &Packing::empty(k), params, Some(&mut gate)).packing;
        let mut gate = SemiLocalGate::new(inst);
        let certified = matches!(
            certify_no_improvement(inst, &fixed, params, Some(&mut gate), 10_000_000),
            Certification::Certified { .. }
        );
        if !certified || uncovered(inst, &fixed).len() > 18 {
            skipped += 1;
            continue;
        }
        checked += 1;
        match analyze(inst, &fixed, &optimal, 18) {
            Ok((_, _, report)) if report.all_hold() => {}
            Ok((_, _, report)) => {
                failed += 1;
                if first_failure.is_empty() {
                    first_failure = format!("; seed {seed}: {}", report.to_string().trim());
                }
            }
            Err(e) => {
                failed += 1;
                if first_failure.is_empty() {
                    first_failure = format!("; seed {seed}: {e}");
                }
            }
        }
    }
    verdict(
        checked >= 100 && failed == 0,
        format!("{checked} certified fixed points (k=4,5, s=3) checked, {failed} failures, {skipped} skipped{first_failure}"),
    )
}

fn c7_example_unit() -> Verdict {
    let m = 13;
    let g = gen_unit_u(m).unwrap();
    let inst = &g.instance;
    let a_side = g.intended_packing.clone().unwrap();
    let restricted = ImprovementParams { i: 4, s: 5, restricted: true };
    let open = ImprovementParams { restricted: false, ..restricted };

    let mut gate = SemiLocalGate::new(inst);
    let certified = matches!(
        certify_no_improvement(inst, &a_side, restricted, Some(&mut gate), 100_000_000),
        Certification::Certified { .. }
    );
    let mut gate = SemiLocalGate::new(inst);
    let after_restricted = improve_packing(inst, &a_side, restricted, Some(&mut gate)).packing;
    let unchanged = after_restricted == a_side;
    let grown = improve_packing(inst, &a_side, open, None).packing.len();

    let names = unit_names(m);
    let chosen = |b: usize| ChosenSet::new(b, inst.base_set(b).to_vec());
    let witness = Improvement {
        removed: names.a[..5].iter().map(|&b| chosen(b)).collect(),
        inserted: names.o[..4].iter().chain(&names.o[12..16]).map(|&b| chosen(b)).collect(),
    };
    let ctx = PackingContext::for_universe(inst, 4);
    let plain = ctx.check_replacement(&a_side, &witness, None);
    let mut gate = SemiLocalGate::new(inst);
    let gated = ctx.check_replacement(&a_side, &witness, Some(&mut gate));
    let blocked = !gated.is_acceptable();
    verdict(
        certified && unchanged && grown > a_side.len() && plain.is_acceptable() && blocked,
        format!(
            "restricted s=5 certified={certified} unchanged={unchanged}; unrestricted {} -> {grown}; \
             5->8 witness valid={} 1-sets {:?} -> {:?} (blocked={blocked})",
            a_side.len(),
            plain.is_acceptable(),
            gated.gate_before,
            gated.gate_after
        ),
    )
}

fn c8_r4sp() -> Verdict {
    let low = q(7, 16);
    let high = &low + q(R4SP_WINDOW.0, R4SP_WINDOW.1);
    let mut ratios: Vec<BigRational> = Vec::new();
    let mut notes = Vec::new();
    let mut ok = true;
    for units in [10usize, 20, 40] {
        match gen_tight_r4sp(units, 8, 3, 1) {
            Ok(g) => {
                let packed = g.intended_packing.as_ref().unwrap().len();
                let opt = g.known_opt.as_ref().unwrap().members.len();
                let r = BigRational::new(BigInt::from(packed), BigInt::from(opt));
                ok &= r >= low && r <= high;
                notes.push(format!("u={units} {packed}/{opt}={:.5}", dec(&r)));
                ratios.push(r);
            }
            Err(e) => {
                ok = false;
                notes.push(format!("u={units} failed: {e}"));
            }
        }
    }
    let decreasing = ratios.len() == 3 && ratios.windows(2).all(|w| w[1] < w[0]);
    verdict(ok && decreasing, format!("{}; decreasing={decreasing}", notes.join(", ")))
}

fn c9_pipeline() -> Verdict {
    let eps = q(1, 8);
    let budget = OracleBudget::default();
    let slack = q(PIPELINE_SLACK.0, PIPELINE_SLACK.1);
    let (mut over, mut invalid, mut worst) = (0, 0, q(0, 1));
    let count = 220u64;
    for seed in 0..count {
        let k = 4 + (seed % 2) as usize;
        let n = 8 + (seed % 8) as usize;
        let g = gen_random(n, k, n + 2, 0.7, 1000 + seed).unwrap();
        let inst = &g.instance;
        let opt = min_cover_exact(inst, &budget).unwrap().size;
        let (cover, report) = solve(inst, &PipelineConfig::new(k, eps.clone())).unwrap();
        if validate_cover(inst, &cover).is_err() {
            invalid += 1;
        }
        let bound = (rho_closed_form(k, &eps) + &slack) * qu(opt);
        if qu(report.stats.total) > bound.floor() {
            over += 1;
        }
        let r = BigRational::new(BigInt::from(report.stats.total), BigInt::from(opt));
        if r > worst {
            worst = r;
        }
    }
    let random_ok = over == 0 && invalid == 0;

    let (tight_ok, tight_note) = match gen_tight_prpsli(4, &eps, 21, 1) {
        Ok(g) => {
            let inst = &g.instance;
            let packing = g.intended_packing.as_ref().unwrap();
            let residual = uncovered(inst, packing);
            let finish = semilocal_on(inst, &residual);
            let mut cover = Cover {
                members: packing.members.iter().cloned().chain(finish.cover.members.iter().cloned()).collect(),
            };
            cover.sort_canonical();
            let valid = validate_cover(inst, &cover).is_ok();
            let opt = g.known_opt.as_ref().unwrap().members.len();
            let realized = BigRational::new(BigInt::from(cover.members.len()), BigInt::from(opt));
            let formula = tight_ratio_formula(4, &eps).unwrap();
            let diff = (&realized - &formula).abs();
            (
                valid && diff <= q(TIGHT_TOLERANCE.0, TIGHT_TOLERANCE.1),
                format!("tight k=4 eps0=1/8: {}/{opt} = {realized} vs formula {formula}", cover.members.len()),
            )
        }
        Err(e) => (false, format!("tight generation failed: {e}")),
    };
    verdict(
        random_ok && tight_ok,
        format!("{count} random (k=4,5, n=8..15): over bound {over}, invalid {invalid}, worst ratio {:.4}; {tight_note}", dec(&worst)),
    )
}

fn corpus() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for m in [13, 16] {
        out.push((format!("unit4-m{m}"), gen_unit_u(m).unwrap().to_text()));
    }
    out.push(("tight4-u2".into(), gen_tight_r4sp(2, 8, 3, 3).unwrap().to_text()));
    out.push(("tight-k".into(), gen_tight_prpsli(4, &q(1, 8), 21, 1).unwrap().to_text()));
    for seed in 0..40 {
        let k = 3 + (seed % 4) as usize;
        out.push((format!("random-{seed}"), gen_random(12 + (seed % 9) as usize, k, 14, 0.6, seed).unwrap().to_text()));
        out.push((format!("planted-{seed}"), gen_planted(3, k, 6, seed).unwrap().to_text()));
    }
    out
}

fn c10_determinism() -> Verdict {
    let mut problems = Vec::new();
    let first = corpus();
    let again = corpus();
    if first != again {
        problems.push("generators are not reproducible".to_string());
    }
    let mut checked = 0;
    for (name, text) in &first {
        let inst: Instance = match parse_instance(text) {
            Ok(i) => i,
            Err(e) => {
                problems.push(format!("{name}: {e}"));
                continue;
            }
        };
        let canonical = inst.to_text();
        if parse_instance(&canonical).map(|i| i.to_text()).as_deref() != Ok(canonical.as_str())
            || !text.ends_with(&canonical)
        {
            problems.push(format!("{name}: instance round-trip"));
        }
        checked += 1;
    }
    for (name, text) in first.iter().filter(|(n, _)| n.starts_with("random") || n.starts_with("planted")).take(30) {
        let inst = parse_instance(text).unwrap();
        let cfg = PipelineConfig::new(inst.k().max(3), q(1, 8));
        let (c1, r1) = solve(&inst, &cfg).unwrap();
        let (c2, r2) = solve(&inst, &cfg).unwrap();
        let out1 = write_cover(&c1);
        if out1 != write_cover(&c2) || r1.to_kv() != r2.to_kv() || r1.to_table() != r2.to_table() {
            problems.push(format!("{name}: solve not reproducible"));
        }
        let back = parse_sets(&out1, &inst).map(|sets| write_sets(&sets));
        if back.as_deref() != Ok(out1.as_str()) {
            problems.push(format!("{name}: cover round-trip"));
        }
    }
    let eps = q(1, 10_000_000);
    let ks: Vec<usize> = TABLE_ONE.iter().map(|&(k, _)| k).collect();
    if emit_table(&ks, &eps) != emit_table(&ks, &eps) {
        problems.push("lp table not reproducible".into());
    }
    verdict(
        problems.is_empty(),
        format!("{checked} corpus instances round-tripped, 30 solves repeated; problems {problems:?}"),
    )
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "closed-form table", limit: Duration::from_secs(5), run: c1_table },
    Criterion { id: 2, name: "LP/dual agreement", limit: Duration::from_secs(60), run: c2_lp_dual },
    Criterion { id: 3, name: "dual feasibility sweep", limit: Duration::from_secs(30), run: c3_dual_sweep },
    Criterion { id: 4, name: "semi-local correctness", limit: Duration::from_secs(120), run: c4_semilocal },
    Criterion { id: 5, name: "matching exactness", limit: Duration::from_secs(30), run: c5_matching },
    Criterion { id: 6, name: "blocking propositions", limit: Duration::from_secs(600), run: c6_blocking },
    Criterion { id: 7, name: "example unit behavior", limit: Duration::from_secs(60), run: c7_example_unit },
    Criterion { id: 8, name: "restricted 4-packing trend", limit: Duration::from_secs(900), run: c8_r4sp },
    Criterion { id: 9, name: "pipeline oracle dominance", limit: Duration::from_secs(900), run: c9_pipeline },
    Criterion { id: 10, name: "determinism and round-trip", limit: Duration::from_secs(600), run: c10_determinism },
];

#[test]
fn acceptance() {
    let results: Vec<(Verdict, Duration)> = std::thread::scope(|scope| {
        let handles: Vec<_> = CRITERIA
            .iter()
            .map(|c| {
                scope.spawn(move || {
                    let t = Instant::now();
                    let v = (c.run)();
                    (v, t.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut failed = Vec::new();
    for (c, (v, elapsed)) in CRITERIA.iter().zip(&results) {
        let in_time = *elapsed <= c.limit;
        let pass = v.pass && in_time;
        if !pass {
            failed.push(c.id);
        }
        println!(
            "criterion {:>2} {} {:<28} {:>8.2}s (limit {}s) {}{}",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            v.detail,
            if in_time { "" } else { " [over time limit]" }
        );
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
