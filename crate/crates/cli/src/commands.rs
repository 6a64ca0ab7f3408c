use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use kcover::blocking::{analyze, uncovered};
use kcover::frlp::{build_lp, dual_certificate, emit_table, format_decimal, solve_lp, TABLE_ONE};
use kcover::generators::{gen_random, gen_tight_prpsli, gen_tight_r4sp_with, gen_unit_u, GeneratedInstance};
use kcover::instance::{parse_sets, write_cover, write_sets};
use kcover::oracle::{max_packing_exact, min_cover_exact, min_ones_exact, OracleBudget};
use kcover::packing::{certify_no_improvement, Certification, ImprovementParams};
use kcover::prpsli::{parse_rational, solve, PipelineConfig, RestrictPhase6};
use kcover::semilocal::SemiLocalGate;
use kcover::{parse_instance, validate_packing, Instance, Packing};

use crate::bench::{run_bench, BenchArgs};
use crate::manifest::{sha256_hex, RunManifest};

pub enum CliError {
    /// Bad invocation: unknown flag, unreadable input, invalid parameter.
    Usage(String),
    /// Valid invocation that failed: malformed instance, failed check.
    Domain(String),
}

#[derive(Parser, Debug)]
#[command(name = "kcover", version, about = "Packing-based k-Set Cover approximation and analysis tools")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    /// Write the run manifest to this file instead of stderr.
    #[arg(long, global = true, value_name = "FILE")]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full approximation pipeline on an instance.
    Solve(SolveArgs),
    /// Exact optimum of a small instance.
    Oracle(OracleArgs),
    /// Generate an instance from one of the structured or random families.
    Gen(GenArgs),
    /// Check that a packing admits no improvement of bounded size.
    Certify(CertifyArgs),
    /// Check the blocking-forest structure of a restricted fixed point.
    VerifyBlocking(VerifyArgs),
    /// Factor-revealing LP: primal optimum, dual certificate or ratio table.
    Lp(LpArgs),
    /// Solve every instance in a corpus directory and summarize the ratios.
    Bench(BenchArgs),
}

/// Buffered outputs and the manifest of one command run.
pub struct Session {
    pub manifest: RunManifest,
    stdout: String,
    files: Vec<(PathBuf, String)>,
    failure: Option<String>,
}

impl Session {
    fn new(command: &str) -> Self {
        Session {
            manifest: RunManifest::new(command),
            stdout: String::new(),
            files: Vec::new(),
            failure: None,
        }
    }

    pub fn read(&mut self, label: &str, path: &Path) -> Result<String, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.manifest.inputs.push((label.into(), sha256_hex(text.as_bytes())));
        Ok(text)
    }

    /// Sends `text` to `path`, or to stdout when no path is given.
    pub fn emit(&mut self, path: Option<&Path>, text: &str) {
        match path {
            Some(p) => self.files.push((p.to_path_buf(), text.to_string())),
            None => self.stdout.push_str(text),
        }
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failure.get_or_insert(msg.into());
    }

    fn finish(mut self, manifest_path: Option<&Path>, start: Instant) -> Result<(), CliError> {
        for (i, (path, text)) in self.files.iter().enumerate() {
            std::fs::write(path, text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            self.manifest.outputs.push((format!("file{i}"), sha256_hex(text.as_bytes())));
        }
        print!("{}", self.stdout);
        self.manifest.outputs.insert(0, ("stdout".into(), sha256_hex(self.stdout.as_bytes())));
        self.manifest.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let text = self.manifest.to_text();
        match manifest_path {
            Some(p) => std::fs::write(p, text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display())))?,
            None => eprint!("{text}"),
        }
        match self.failure {
            Some(msg) => Err(CliError::Domain(msg)),
            None => Ok(()),
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let name = match &cli.command {
        Command::Solve(_) => "solve",
        Command::Oracle(_) => "oracle",
        Command::Gen(_) => "gen",
        Command::Certify(_) => "certify",
        Command::VerifyBlocking(_) => "verify-blocking",
        Command::Lp(_) => "lp",
        Command::Bench(_) => "bench",
    };
    let mut s = Session::new(name);
    match &cli.command {
        Command::Solve(a) => cmd_solve(&mut s, a)?,
        Command::Oracle(a) => cmd_oracle(&mut s, a)?,
        Command::Gen(a) => cmd_gen(&mut s, a)?,
        Command::Certify(a) => cmd_certify(&mut s, a)?,
        Command::VerifyBlocking(a) => cmd_verify(&mut s, a)?,
        Command::Lp(a) => cmd_lp(&mut s, a)?,
        Command::Bench(a) => run_bench(&mut s, a)?,
    }
    s.finish(cli.manifest.as_deref(), start)
}

pub fn rational_arg(text: &str) -> Result<BigRational, CliError> {
    parse_rational(text).map_err(CliError::Usage)
}

/// The optimum recorded as `opt=N` in a leading `#` comment, if any.
pub fn header_opt(text: &str) -> Option<usize> {
    text.lines()
        .take_while(|l| l.trim_start().starts_with('#') || l.trim().is_empty())
        .flat_map(|l| l.split_whitespace())
        .find_map(|tok| tok.strip_prefix("opt=").and_then(|v| v.parse().ok()))
}

fn load_instance(s: &mut Session, path: &Path) -> Result<(Instance, Option<usize>), CliError> {
    let text = s.read("instance", path)?;
    let inst = parse_instance(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
    Ok((inst, header_opt(&text)))
}

fn load_sets(s: &mut Session, label: &str, path: &Path, inst: &Instance) -> Result<Vec<kcover::ChosenSet>, CliError> {
    let text = s.read(label, path)?;
    parse_sets(&text, inst).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn load_packing(s: &mut Session, path: &Path, inst: &Instance, class: Option<usize>) -> Result<Packing, CliError> {
    let members = load_sets(s, "packing", path, inst)?;
    let size_class = class
        .or_else(|| members.first().map(|m| m.len()))
        .unwrap_or(inst.k());
    let packing = Packing { size_class, members };
    validate_packing(inst, &packing).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
    Ok(packing)
}

fn parse_s_phase(text: &str) -> Result<(usize, usize), String> {
    let (i, s) = text.split_once('=').ok_or_else(|| format!("expected i=s, got {text:?}"))?;
    let i = i.trim().parse().map_err(|_| format!("bad phase index in {text:?}"))?;
    let s = s.trim().parse().map_err(|_| format!("bad s value in {text:?}"))?;
    Ok((i, s))
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Cover file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Report file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Largest set size; defaults to the instance's k (at least 3).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "1/8")]
    eps: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto")]
    restrict_phase6: RestrictPhase6,
    /// Override the improvement size of phase i, as `i=s`; repeatable.
    #[arg(long = "s-phase", value_parser = parse_s_phase, value_name = "I=S")]
    s_phase: Vec<(usize, usize)>,
    /// Known optimum; read from an `opt=N` header comment when omitted.
    #[arg(long)]
    opt: Option<usize>,
}

fn cmd_solve(s: &mut Session, a: &SolveArgs) -> Result<(), CliError> {
    let eps = rational_arg(&a.eps)?;
    let (inst, header) = load_instance(s, &a.input)?;
    let mut cfg = PipelineConfig::new(a.k.unwrap_or(inst.k().max(3)), eps);
    cfg.restrict_phase6 = a.restrict_phase6;
    cfg.seed = a.seed;
    cfg.s_overrides.extend(a.s_phase.iter().copied());
    cfg.known_opt = a.opt.or(header);
    s.manifest.seed = Some(a.seed);
    s.manifest.param("k", cfg.k);
    s.manifest.param("eps", &cfg.epsilon);
    s.manifest.param("restrict_phase6", a.restrict_phase6);
    for (i, v) in &cfg.s_overrides {
        s.manifest.param(&format!("s.{i}"), v);
    }
    let (cover, report) = solve(&inst, &cfg).map_err(|e| CliError::Domain(e.to_string()))?;
    s.emit(a.output.as_deref(), &write_cover(&cover));
    let text = format!("{}\n{}", report.to_table(), report.to_kv());
    s.emit(a.report.as_deref(), &text);
    Ok(())
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Objective {
    Cover,
    Ones,
    Packing,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "cover")]
    objective: Objective,
    /// Set size of the packing objective.
    #[arg(long)]
    i: Option<usize>,
    #[arg(long, default_value_t = OracleBudget::default().max_universe)]
    max_universe: usize,
    #[arg(long, default_value_t = OracleBudget::default().node_cap)]
    node_cap: u64,
    /// Witness file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

fn cmd_oracle(s: &mut Session, a: &OracleArgs) -> Result<(), CliError> {
    let (inst, _) = load_instance(s, &a.input)?;
    let budget = OracleBudget {
        max_universe: a.max_universe,
        node_cap: a.node_cap,
    };
    s.manifest.param("objective", format!("{:?}", a.objective).to_lowercase());
    s.manifest.param("max_universe", a.max_universe);
    s.manifest.param("node_cap", a.node_cap);
    let domain = |e: kcover::oracle::OracleError| CliError::Domain(e.to_string());
    match a.objective {
        Objective::Cover => {
            let o = min_cover_exact(&inst, &budget).map_err(domain)?;
            s.emit(
                None,
                &format!(
                    "size={}\nones_at_min={}\nones_global={}\nsimultaneous={}\n",
                    o.size, o.ones_at_min, o.ones_global, o.simultaneous
                ),
            );
            s.emit(a.output.as_deref(), &write_cover(&o.witness));
        }
        Objective::Ones => {
            let ones = min_ones_exact(&inst, &budget).map_err(domain)?;
            s.emit(None, &format!("ones={ones}\n"));
        }
        Objective::Packing => {
            let i = a
                .i
                .ok_or_else(|| CliError::Usage("--objective packing needs --i".into()))?;
            s.manifest.param("i", i);
            let o = max_packing_exact(&inst, i, &budget).map_err(domain)?;
            s.emit(None, &format!("size={}\n", o.size));
            s.emit(a.output.as_deref(), &write_sets(&o.witness.members));
        }
    }
    Ok(())
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    /// One Example-1 unit with `--m` blocking sets.
    #[value(name = "unit4")]
    Unit4,
    /// Chained units certified as restricted 4-packing fixed points.
    #[value(name = "tight4")]
    Tight4,
    /// Tight instances for the full pipeline.
    #[value(name = "tight-k")]
    TightK,
    /// Random sets of size at most `--k`.
    #[value(name = "random")]
    Random,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// unit4: number of blocking sets.
    #[arg(long, default_value_t = 13)]
    m: usize,
    /// tight4: number of units.
    #[arg(long, default_value_t = 10)]
    units: usize,
    /// tight4: blocking sets on the random paths.
    #[arg(long, default_value_t = 8)]
    blockers: usize,
    /// tight4: improvement size the packing is certified at.
    #[arg(long, default_value_t = 3)]
    s: usize,
    /// tight4: resampling attempts.
    #[arg(long, default_value_t = 20)]
    tries: usize,
    /// tight-k and random: largest set size.
    #[arg(long)]
    k: Option<usize>,
    /// tight-k: fraction of blocking sets in the optimum.
    #[arg(long, default_value = "1/8")]
    eps0: String,
    /// tight-k: number of units (a multiple of 3).
    #[arg(long, default_value_t = 21)]
    scale: usize,
    /// random: universe size.
    #[arg(long, default_value_t = 12)]
    n: usize,
    /// random: number of sets drawn (default n).
    #[arg(long)]
    sets: Option<usize>,
    /// random: chance of each extra element in a set.
    #[arg(long, default_value_t = 0.6)]
    density: f64,
    /// random: compute the optimum with the exact oracle and record it.
    #[arg(long)]
    oracle: bool,
    /// Instance file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Write the intended packing, when the family has one.
    #[arg(long, value_name = "FILE")]
    packing_output: Option<PathBuf>,
    /// Write the known optimal cover, when the family has one.
    #[arg(long, value_name = "FILE")]
    optimal_output: Option<PathBuf>,
}

fn cmd_gen(s: &mut Session, a: &GenArgs) -> Result<(), CliError> {
    use kcover::generators::GenError;
    s.manifest.seed = Some(a.seed);
    let err = |e: GenError| match e {
        GenError::Param(_) | GenError::Unsupported(_) => CliError::Usage(e.to_string()),
        _ => CliError::Domain(e.to_string()),
    };
    let mut g: GeneratedInstance = match a.family {
        Family::Unit4 => {
            s.manifest.param("family", "unit4");
            s.manifest.param("m", a.m);
            gen_unit_u(a.m).map_err(err)?
        }
        Family::Tight4 => {
            s.manifest.param("family", "tight4");
            s.manifest.param("units", a.units);
            s.manifest.param("blockers", a.blockers);
            s.manifest.param("s", a.s);
            s.manifest.param("tries", a.tries);
            gen_tight_r4sp_with(a.units, a.blockers, a.s, a.seed, a.tries).map_err(err)?
        }
        Family::TightK => {
            let k = a.k.unwrap_or(4);
            let eps0 = rational_arg(&a.eps0)?;
            s.manifest.param("family", "tight-k");
            s.manifest.param("k", k);
            s.manifest.param("eps0", &eps0);
            s.manifest.param("scale", a.scale);
            gen_tight_prpsli(k, &eps0, a.scale, a.seed).map_err(err)?
        }
        Family::Random => {
            let k = a.k.unwrap_or(3);
            let sets = a.sets.unwrap_or(a.n);
            s.manifest.param("family", "random");
            s.manifest.param("n", a.n);
            s.manifest.param("k", k);
            s.manifest.param("sets", sets);
            s.manifest.param("density", a.density);
            s.manifest.param("oracle", a.oracle);
            let mut g = gen_random(a.n, k, sets, a.density, a.seed).map_err(err)?;
            if a.oracle {
                let o = min_cover_exact(&g.instance, &OracleBudget::default())
                    .map_err(|e| CliError::Domain(e.to_string()))?;
                g.known_opt = Some(o.witness);
            }
            g
        }
    };
    g.seed = a.seed;
    s.emit(a.output.as_deref(), &g.to_text());
    if let Some(p) = &a.packing_output {
        match &g.intended_packing {
            Some(packing) => s.emit(Some(p), &write_sets(&packing.members)),
            None => return Err(CliError::Usage("this family has no intended packing".into())),
        }
    }
    if let Some(p) = &a.optimal_output {
        match &g.known_opt {
            Some(opt) => s.emit(Some(p), &write_cover(opt)),
            None => return Err(CliError::Usage("this family has no known optimum (try --oracle)".into())),
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Packing as `c` lines.
    #[arg(long, value_name = "FILE")]
    packing: PathBuf,
    /// Set size; defaults to the size of the packing's members.
    #[arg(long)]
    i: Option<usize>,
    /// Largest number of members one improvement may remove.
    #[arg(long, default_value_t = 3)]
    s: usize,
    /// Only accept improvements that do not raise the 1-set count.
    #[arg(long)]
    restricted: bool,
    #[arg(long, default_value_t = 20_000_000)]
    node_cap: u64,
}

fn cmd_certify(s: &mut Session, a: &CertifyArgs) -> Result<(), CliError> {
    let (inst, _) = load_instance(s, &a.input)?;
    let packing = load_packing(s, &a.packing, &inst, a.i)?;
    let params = ImprovementParams {
        i: packing.size_class,
        s: a.s,
        restricted: a.restricted,
    };
    s.manifest.param("i", params.i);
    s.manifest.param("s", params.s);
    s.manifest.param("restricted", params.restricted);
    s.manifest.param("node_cap", a.node_cap);
    let mut gate = SemiLocalGate::new(&inst);
    let gate: Option<&mut dyn kcover::packing::OnesGate> = if a.restricted { Some(&mut gate) } else { None };
    let mut out = format!("packing={}\n", packing.len());
    match certify_no_improvement(&inst, &packing, params, gate, a.node_cap) {
        Certification::Certified { nodes } => {
            let _ = write!(out, "certified=true\nnodes={nodes}\n");
        }
        Certification::Witness(w) => {
            let _ = write!(out, "certified=false\nremoved={}\ninserted={}\n", w.removed.len(), w.inserted.len());
            for (tag, sets) in [("removed", &w.removed), ("inserted", &w.inserted)] {
                let _ = writeln!(out, "# {tag}");
                for c in sets {
                    let elems: Vec<String> = c.elements.iter().map(|e| (e + 1).to_string()).collect();
                    let _ = writeln!(out, "c {} {}", c.base_index + 1, elems.join(" "));
                }
            }
            s.fail(format!("found a {}->{} improvement", w.removed.len(), w.inserted.len()));
        }
        Certification::BudgetExceeded { nodes } => {
            let _ = write!(out, "certified=unknown\nnodes={nodes}\n");
            s.fail(format!("search budget of {} nodes exceeded", a.node_cap));
        }
    }
    s.emit(None, &out);
    Ok(())
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Restricted fixed point as `c` lines.
    #[arg(long, value_name = "FILE")]
    packing: PathBuf,
    /// Optimal k-set partition as `c` lines.
    #[arg(long, value_name = "FILE")]
    optimal: PathBuf,
    /// Largest number of uncovered elements analyzed exactly.
    #[arg(long, default_value_t = 18)]
    max_uncovered: usize,
}

fn cmd_verify(s: &mut Session, a: &VerifyArgs) -> Result<(), CliError> {
    let (inst, _) = load_instance(s, &a.input)?;
    let packing = load_packing(s, &a.packing, &inst, None)?;
    let optimal: Vec<Vec<u32>> = load_sets(s, "optimal", &a.optimal, &inst)?
        .into_iter()
        .map(|c| c.elements)
        .collect();
    s.manifest.param("max_uncovered", a.max_uncovered);
    let open = uncovered(&inst, &packing).len();
    if open > a.max_uncovered {
        return Err(CliError::Domain(format!(
            "{open} uncovered elements exceed --max-uncovered {}",
            a.max_uncovered
        )));
    }
    let (ext, forest, report) =
        analyze(&inst, &packing, &optimal, a.max_uncovered).map_err(|e| CliError::Domain(e.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(out, "uncovered={open}");
    let _ = writeln!(out, "extension.score={}", ext.score);
    for set in &ext.sets {
        let elems: Vec<String> = set.iter().map(|e| (e + 1).to_string()).collect();
        let _ = writeln!(out, "x {}", elems.join(" "));
    }
    let _ = writeln!(out, "forest.trees={}", forest.trees.len());
    let _ = writeln!(out, "forest.defects={}", forest.defects.len());
    let _ = write!(out, "{report}");
    let _ = writeln!(out, "all_hold={}", report.all_hold());
    if !report.all_hold() {
        s.fail("blocking-forest structure violated");
    }
    s.emit(None, &out);
    Ok(())
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LpMode {
    Solve,
    Dual,
    Both,
    Table,
}

#[derive(Args, Debug)]
struct LpArgs {
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, default_value = "1e-7")]
    eps: String,
    #[arg(long, value_enum, default_value = "both")]
    mode: LpMode,
    /// Comma-separated k values; overrides --k (table default: the published k values).
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
}

fn cmd_lp(s: &mut Session, a: &LpArgs) -> Result<(), CliError> {
    let eps = rational_arg(&a.eps)?;
    if eps.is_negative() {
        return Err(CliError::Usage("eps must be nonnegative".into()));
    }
    s.manifest.param("mode", format!("{:?}", a.mode).to_lowercase());
    s.manifest.param("eps", &eps);
    let ks: Vec<usize> = match (&a.k_list, a.mode) {
        (Some(list), _) => list.clone(),
        (None, LpMode::Table) => TABLE_ONE.iter().map(|&(k, _)| k).collect(),
        (None, _) => vec![a.k],
    };
    s.manifest.param("k_list", ks.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
    if let LpMode::Table = a.mode {
        s.emit(None, &emit_table(&ks, &eps));
        return Ok(());
    }
    let mut out = String::new();
    for (idx, &k) in ks.iter().enumerate() {
        if idx > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "k={k}\neps={eps}");
        let primal = if matches!(a.mode, LpMode::Solve | LpMode::Both) {
            let model = build_lp(k, &eps).map_err(|e| CliError::Usage(e.to_string()))?;
            let sol = solve_lp(&model).map_err(|e| CliError::Domain(e.to_string()))?;
            let _ = writeln!(out, "optimum={}", sol.optimum);
            let _ = writeln!(out, "optimum_decimal={}", format_decimal(&sol.optimum, 8));
            let _ = writeln!(out, "pivots={}", sol.pivots);
            for (v, x) in model.vars.iter().zip(&sol.x) {
                if !x.is_zero() {
                    let _ = writeln!(out, "x.{v}={x}");
                }
            }
            Some(sol.optimum)
        } else {
            None
        };
        if matches!(a.mode, LpMode::Dual | LpMode::Both) {
            match dual_certificate(k, &eps) {
                Ok(d) => {
                    let min_slack = d.checks.iter().map(|c| c.slack()).min().unwrap_or_default();
                    let _ = writeln!(out, "dual_objective={}", d.objective);
                    let _ = writeln!(out, "dual_objective_decimal={}", format_decimal(&d.objective, 8));
                    let _ = writeln!(out, "dual_checks={}", d.checks.len());
                    let _ = writeln!(out, "dual_feasible=true");
                    let _ = writeln!(out, "dual_min_slack={min_slack}");
                    if let Some(p) = &primal {
                        let _ = writeln!(out, "weak_duality={}", *p <= d.objective);
                        let _ = writeln!(out, "gap_decimal={}", format_decimal(&(&d.objective - p), 12));
                    }
                }
                Err(kcover::frlp::FrlpError::Param(msg)) => return Err(CliError::Usage(msg)),
                Err(e) => {
                    let _ = writeln!(out, "dual_feasible=false\ndual_error={e}");
                    s.fail(format!("dual certificate failed for k={k}"));
                }
            }
        }
    }
    s.emit(None, &out);
    Ok(())
}
