//! Corpus benchmark: solve every instance in a directory, in parallel, and
//! report per-instance and per-k ratios in name order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use kcover::frlp::rho_closed_form;
use kcover::parse_instance;
use kcover::prpsli::{solve, PipelineConfig};

use crate::commands::{header_opt, rational_arg, CliError, Session};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "KCOVER_THREADS";

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory of instance files; an `opt=N` header comment supplies the optimum.
    #[arg(long, value_name = "DIR")]
    corpus: PathBuf,
    #[arg(long, default_value = "1/8")]
    eps: String,
    /// Add per-instance wall times (makes the output run-dependent).
    #[arg(long)]
    timings: bool,
    /// Summary file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

struct Row {
    name: String,
    result: Result<Solved, String>,
    ms: f64,
}

struct Solved {
    k: usize,
    n: usize,
    total: usize,
    ones: usize,
    opt: Option<usize>,
    ratio: Option<BigRational>,
    bound: BigRational,
}

fn solve_one(text: &str, eps: &BigRational) -> Result<Solved, String> {
    let inst = parse_instance(text).map_err(|e| e.to_string())?;
    let mut cfg = PipelineConfig::new(inst.k().max(3), eps.clone());
    cfg.known_opt = header_opt(text);
    let (_, report) = solve(&inst, &cfg).map_err(|e| e.to_string())?;
    Ok(Solved {
        k: cfg.k,
        n: inst.n(),
        total: report.stats.total,
        ones: report.stats.ones,
        opt: cfg.known_opt,
        ratio: report.ratio(),
        bound: rho_closed_form(cfg.k, eps),
    })
}

fn decimal(r: &BigRational) -> String {
    format!("{:.6}", r.to_f64().unwrap_or(f64::NAN))
}

pub fn run_bench(s: &mut Session, a: &BenchArgs) -> Result<(), CliError> {
    let eps = rational_arg(&a.eps)?;
    s.manifest.param("corpus", a.corpus.display());
    s.manifest.param("eps", &eps);
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&t| t > 0);
    if let Some(t) = threads {
        s.manifest.param("threads", t);
    }
    let entries = std::fs::read_dir(&a.corpus)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.corpus.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut inputs = Vec::with_capacity(paths.len());
    for p in &paths {
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let text = s.read(&name, p)?;
        inputs.push((name, text));
    }
    let work = || -> Vec<Row> {
        inputs
            .par_iter()
            .map(|(name, text)| {
                let t = Instant::now();
                let result = solve_one(text, &eps);
                Row {
                    name: name.clone(),
                    result,
                    ms: t.elapsed().as_secs_f64() * 1e3,
                }
            })
            .collect()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| CliError::Domain(e.to_string()))?;
    let mut rows = pool.install(work);
    rows.sort_by(|x, y| x.name.cmp(&y.name));

    let mut out = String::new();
    let mut max_ratio: BTreeMap<usize, BigRational> = BTreeMap::new();
    let (mut failures, mut over_bound) = (0, 0);
    for row in &rows {
        let _ = write!(out, "name={}", row.name);
        match &row.result {
            Ok(r) => {
                let _ = write!(out, " k={} n={} total={} ones={}", r.k, r.n, r.total, r.ones);
                if let (Some(opt), Some(ratio)) = (r.opt, &r.ratio) {
                    let within = *ratio <= &r.bound + BigRational::new(1.into(), 100.into());
                    if !within {
                        over_bound += 1;
                    }
                    let _ = write!(out, " opt={opt} ratio={} bound={} within_bound={within}", decimal(ratio), decimal(&r.bound));
                    let best = max_ratio.entry(r.k).or_insert_with(|| ratio.clone());
                    if ratio > best {
                        *best = ratio.clone();
                    }
                }
                out.push_str(" status=ok");
            }
            Err(e) => {
                failures += 1;
                let _ = write!(out, " status=error error={e:?}");
            }
        }
        if a.timings {
            let _ = write!(out, " ms={:.3}", row.ms);
        }
        out.push('\n');
    }
    let _ = writeln!(out, "instances={}", rows.len());
    let _ = writeln!(out, "failures={failures}");
    let _ = writeln!(out, "over_bound={over_bound}");
    for (k, r) in &max_ratio {
        let _ = writeln!(out, "max_ratio.{k}={}", decimal(r));
    }
    if a.timings {
        let total: f64 = rows.iter().map(|r| r.ms).sum();
        let _ = writeln!(out, "total_ms={total:.3}");
    }
    s.emit(a.output.as_deref(), &out);
    if failures > 0 {
        s.fail(format!("{failures} instance(s) failed"));
    } else if over_bound > 0 {
        s.fail(format!("{over_bound} instance(s) exceed the ratio bound"));
    }
    Ok(())
}
