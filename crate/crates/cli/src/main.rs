//! `codverify`: command-line front end for the codegree verifier.
//!
//! Exit status is 0 when the requested check succeeds (a table parsed, a
//! report came out Verified), 1 when a report is Failed or Unresolved, and 2
//! on bad input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use codverify_core::catalog::{Catalog, CodegreeSet, GroupId};
use codverify_core::chartab::{codegrees_of_table, parse_table};
use codverify_core::diophantine::{solve, ExprFamily};
use codverify_core::elimination::{Engine, LemmaReport, ReplayConfig, Status, Verdict, DEFAULT_SP4_SAMPLES};
use codverify_core::factored_int::FactoredInteger;
use codverify_core::finale::{verify_main_theorem, StepDetail, TheoremReport};

#[derive(Parser)]
#[command(name = "codverify", version, about = "Exact-arithmetic replay of a codegree characterization of sixteen simple groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a codegree set, one factored integer per line.
    Cod(CodArgs),
    /// Solve expr(param) = target over the family's admissible parameters.
    Solve(SolveArgs),
    /// Replay the candidate elimination for one target.
    VerifyLemma(LemmaArgs),
    /// Run every step of the closing argument.
    VerifyTheorem(TheoremArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Character-table file.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Catalog group key, e.g. `U4_2`, `M22` or `Sp4_q(8)`.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Args)]
struct CodArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Expression tag, e.g. `K2M1`, `PSL2_HALF`.
    #[arg(long)]
    family: String,
    /// Target value, e.g. `3^2*5^2*17`.
    #[arg(long)]
    target: String,
    /// Print the solution with its bracketing evaluations as JSON.
    #[arg(long)]
    emit_json: bool,
}

#[derive(Args)]
struct LemmaArgs {
    /// Target tag (`Sp4_q` replays the sampled q).
    #[arg(long)]
    target: String,
    #[arg(long)]
    json: bool,
    /// Sampled q for the Sp4(q) target.
    #[arg(long, value_delimiter = ',')]
    samples: Option<Vec<u64>>,
}

#[derive(Args)]
struct TheoremArgs {
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    target: Option<String>,
    #[arg(long)]
    all: bool,
    #[arg(long)]
    json: bool,
    #[arg(long, value_delimiter = ',')]
    samples: Option<Vec<u64>>,
}

type CliResult = Result<bool, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cod(a) => run_cod(a),
        Command::Solve(a) => run_solve(a),
        Command::VerifyLemma(a) => run_lemma(a),
        Command::VerifyTheorem(a) => run_theorem(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_catalog() -> Result<Catalog, String> {
    Catalog::load().map_err(|e| e.to_string())
}

fn parse_target(s: &str) -> Result<GroupId, String> {
    if s == "Sp4_q" {
        return Ok(GroupId::Sp4_q { f: 3 });
    }
    s.parse().map_err(|e: codverify_core::catalog::CatalogError| e.to_string())
}

fn config(samples: Option<Vec<u64>>) -> Result<ReplayConfig, String> {
    let sp4_samples = samples.unwrap_or_else(|| DEFAULT_SP4_SAMPLES.to_vec());
    if let Some(bad) = sp4_samples.iter().find(|&&q| GroupId::sp4_even(q).is_none()) {
        return Err(format!("sample q = {bad} is not a power of 2 above 4"));
    }
    Ok(ReplayConfig { sp4_samples })
}

fn print_set(set: &CodegreeSet, json: bool) -> Result<(), String> {
    if json {
        let v: Vec<String> = set.iter().map(|x| x.to_string()).collect();
        println!("{}", serde_json::to_string(&v).map_err(|e| e.to_string())?);
    } else {
        for x in set.iter() {
            println!("{x}");
        }
    }
    Ok(())
}

fn run_cod(a: CodArgs) -> CliResult {
    let set = if let Some(path) = a.source.table {
        let bytes = fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let table = parse_table(&bytes).map_err(|e| e.to_string())?;
        codegrees_of_table(&table).map_err(|e| e.to_string())?
    } else {
        let key = a.source.group.unwrap_or_default();
        let catalog = load_catalog()?;
        match catalog.record(&key) {
            Ok(r) => r.cod.clone(),
            Err(_) => catalog.codegree_set(parse_target(&key)?),
        }
    };
    print_set(&set, a.json)?;
    Ok(true)
}

fn run_solve(a: SolveArgs) -> CliResult {
    let expr: ExprFamily = a.family.parse().map_err(|_| format!("unknown expression `{}`", a.family))?;
    let target: FactoredInteger = a.target.parse().map_err(|e| format!("bad target: {e}"))?;
    let s = solve(expr, &target).map_err(|e| e.to_string())?;
    if a.emit_json {
        println!("{}", serde_json::to_string_pretty(&s).map_err(|e| e.to_string())?);
    } else {
        match (s.root, s.ree_m) {
            (Some(q), Some((m, plus))) => println!("{q} (m = {m}, {})", if plus { "+" } else { "-" }),
            (Some(q), None) => println!("{q}"),
            (None, _) => println!("none"),
        }
    }
    Ok(true)
}

fn print_lemma(r: &LemmaReport) {
    for c in &r.cases {
        let at = c.sample_q.map(|q| format!(" q={q}")).unwrap_or_default();
        let verdict = match c.verdict {
            Verdict::Eliminated => "eliminated",
            Verdict::Survives => "survives",
            Verdict::Unresolved => "UNRESOLVED",
        };
        println!("{}{at} {:<16} {verdict:<11} {:?}", c.case_label, c.candidate.tag(), c.reason);
        if let Some(d) = &c.divergence {
            println!("    divergence: {d}");
        }
    }
    for g in &r.coverage_gaps {
        println!("coverage gap: {g}");
    }
    println!("{}: {} cases, {} eliminated, perfect={}, overall {:?}", r.target, r.cases.len(), r.eliminated(), r.perfect, r.overall);
}

fn run_lemma(a: LemmaArgs) -> CliResult {
    let target = parse_target(&a.target)?;
    let cfg = config(a.samples)?;
    let catalog = load_catalog()?;
    let engine = Engine::new(&catalog).map_err(|e| e.to_string())?;
    let report = engine.replay_lemma(target, &cfg);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&report.cases).map_err(|e| e.to_string())?);
    } else {
        print_lemma(&report);
    }
    Ok(report.overall == Status::Verified)
}

fn print_theorem(r: &TheoremReport) {
    println!("== {} ==", r.target);
    for s in &r.steps {
        let at = s.sample_q.map(|q| format!(" [q={q}]")).unwrap_or_default();
        let detail = match &s.detail {
            StepDetail::Lemma { eliminated, cases } => format!("{eliminated}/{cases} cases eliminated"),
            StepDetail::Square(w) => format!("{} squared is {}, not a codegree", w.element, w.square),
            StepDetail::Annotation(a) => a.to_string(),
            StepDetail::Covers(c) if c.trivial_multiplier => "trivial Schur multiplier".into(),
            StepDetail::Covers(c) => c
                .checks
                .iter()
                .map(|k| {
                    let v = k.computed_codegree.as_ref().map_or("-".into(), |x| x.to_string());
                    format!("{}.H degree {} gives {v}", k.multiplier_part, k.degree)
                })
                .collect::<Vec<_>>()
                .join("; "),
            StepDetail::Final { scan, branches, .. } if branches.is_empty() => {
                format!("no (p, n) with |H| dividing |GL(n, p)| (scan {scan:?})")
            }
            StepDetail::Final { branches, .. } => branches
                .iter()
                .map(|b| {
                    let how = if b.refined.is_some() { "refined bound" } else { "p-part" };
                    format!("{}^{}: {how} {:?}", b.p, b.n, b.status)
                })
                .collect::<Vec<_>>()
                .join("; "),
            StepDetail::Error(e) => e.clone(),
        };
        println!("  step {}{at} {:<32} {:?}: {detail}", s.step, s.name, s.status);
    }
    for d in &r.divergences {
        println!("  divergence: {d}");
    }
    println!("  overall {:?}", r.overall);
}

fn run_theorem(a: TheoremArgs) -> CliResult {
    let cfg = config(a.samples)?;
    let targets: Vec<GroupId> = match a.target {
        Some(t) => vec![parse_target(&t)?],
        None => GroupId::ORDERED.to_vec(),
    };
    let catalog = load_catalog()?;
    let reports: Vec<TheoremReport> = targets.iter().map(|&t| verify_main_theorem(&catalog, t, &cfg)).collect();
    if a.json {
        println!("{}", serde_json::to_string_pretty(&reports).map_err(|e| e.to_string())?);
    } else {
        for r in &reports {
            print_theorem(r);
        }
    }
    Ok(reports.iter().all(|r| r.overall == Status::Verified))
}
