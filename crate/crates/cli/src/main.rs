use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dwtft::complex::DeltaComplex;
use dwtft::cyclotomic::CyclotomicSum;
use dwtft::engine::{
    dw_partition, verify_decomposition_circle, verify_decomposition_general_for, ClassLabel, DecompositionReport,
    EngineError, TheorySpec,
};
use dwtft::group::group_to_json;
use serde_json::json;

mod specs;
mod suite;

use specs::{resolve_group, CocycleSpec, SpaceSpec};

/// Exact Dijkgraaf-Witten invariants and their circle reductions.
#[derive(Parser)]
#[command(name = "dwtft", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the partition function on a closed complex.
    Eval(EvalArgs),
    /// Compare Z(X x T) with the sum over bundles on T.
    Verify(VerifyArgs),
    /// Run the built-in verification grid.
    Suite(SuiteArgs),
    /// Print a built-in complex or group as JSON.
    Dump(DumpArgs),
}

#[derive(Args)]
struct TheoryArgs {
    /// Built-in group name (Z4, S3, D4, Q8, Z2xZ2, ...) or a group file.
    #[arg(long)]
    group: String,
    /// trivial | cyclic:k:p | inflate:FILE | FILE
    #[arg(long, default_value = "trivial")]
    cocycle: String,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    theory: TheoryArgs,
    /// circle:m | sphere | surface:h | torusgrid:p:q | FILE, with "x S1" and "+".
    #[arg(long)]
    space: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    theory: TheoryArgs,
    /// Use surface:h as the base.
    #[arg(long, conflicts_with = "base")]
    genus: Option<usize>,
    /// Base space X.
    #[arg(long)]
    base: Option<String>,
    /// Reduce along this space instead of S1 (untwisted only).
    #[arg(long)]
    torus: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SuiteArgs {
    /// Skip groups of larger order.
    #[arg(long, default_value_t = usize::MAX)]
    max_order: usize,
    /// Seed for the randomized gauge checks.
    #[arg(long, default_value_t = 20_240_611)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long, conflicts_with = "group", required_unless_present = "group")]
    space: Option<String>,
    #[arg(long)]
    group: Option<String>,
}

/// Raised when a computation completes but its two sides disagree.
#[derive(Debug)]
struct Mismatch;

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification mismatch")
    }
}

impl std::error::Error for Mismatch {}

fn float(z: &CyclotomicSum) -> String {
    let (re, im) = z.to_complex();
    if im.abs() < 1e-9 {
        format!("{re:.9}")
    } else {
        format!("{re:.9} {} {:.9}i", if im < 0.0 { '-' } else { '+' }, im.abs())
    }
}

fn theory(args: &TheoryArgs, degree: usize) -> Result<TheorySpec> {
    let group = resolve_group(&args.group)?;
    let cocycle = CocycleSpec::parse(&args.cocycle)?.resolve(&group, degree)?;
    Ok(TheorySpec::new(cocycle, format!("{} {}", args.group, args.cocycle))?)
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let x = SpaceSpec::parse(&args.space)?.build()?;
    let t = theory(&args.theory, x.dim())?;
    let z = dw_partition(&t, &x)?;
    if args.json {
        let (re, im) = z.to_complex();
        let out = json!({ "group": args.theory.group, "cocycle": args.theory.cocycle, "space": args.space, "value": z, "float": [re, im] });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("Z = {z}");
        println!("  ~ {}", float(&z));
    }
    Ok(())
}

fn print_report(r: &DecompositionReport) {
    println!("lhs  Z(X x T) = {}  (~ {})", r.lhs, float(&r.lhs));
    println!("{:<16} {:>8}  value", "class", "|Aut|");
    for c in &r.per_class {
        let label = match &c.rep {
            ClassLabel::Element(g) => g.to_string(),
            ClassLabel::Coloring(colors) => format!("{colors:?}"),
        };
        println!("{label:<16} {:>8}  {}", c.centralizer_order, c.value);
    }
    println!("rhs  sum = {}  (~ {})", r.rhs, float(&r.rhs));
    println!("equal: {}", r.equal);
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let base = match (&args.genus, &args.base) {
        (Some(h), None) => SpaceSpec::Surface(*h),
        (None, Some(b)) => SpaceSpec::parse(b)?,
        _ => bail!("give exactly one of --genus or --base"),
    };
    if args.genus == Some(0) {
        bail!("genus must be at least 1");
    }
    let base: DeltaComplex = base.build()?;
    let report = match &args.torus {
        None => verify_decomposition_circle(&theory(&args.theory, base.dim() + 1)?, &base)?,
        Some(t) => {
            let t_complex = SpaceSpec::parse(t)?.build()?;
            let spec = theory(&args.theory, base.dim() + t_complex.dim())?;
            verify_decomposition_general_for(&spec, &base, &t_complex)?
        }
    };
    if args.json {
        println!("{}", report.to_json());
    } else {
        print_report(&report);
    }
    if !report.equal {
        return Err(Mismatch.into());
    }
    Ok(())
}

fn cmd_suite(args: &SuiteArgs) -> Result<()> {
    let rows = suite::Grid { max_order: args.max_order, seed: args.seed }.run();
    let all_passed = rows.iter().all(|r| r.passed);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&json!({ "passed": all_passed, "rows": rows }))?);
    } else {
        let mut criteria: Vec<u8> = rows.iter().map(|r| r.criterion).collect();
        criteria.dedup();
        for c in criteria {
            let mine: Vec<_> = rows.iter().filter(|r| r.criterion == c).collect();
            let ok = mine.iter().filter(|r| r.passed).count();
            println!("{} criterion {c}: {ok}/{} cases", if ok == mine.len() { "PASS" } else { "FAIL" }, mine.len());
            for r in mine.iter().filter(|r| !r.passed) {
                println!("    {}: {}", r.case, r.detail);
            }
        }
    }
    if !all_passed {
        return Err(Mismatch.into());
    }
    Ok(())
}

fn cmd_dump(args: &DumpArgs) -> Result<()> {
    match (&args.space, &args.group) {
        (Some(s), None) => println!("{}", SpaceSpec::parse(s)?.build()?.to_json()),
        (None, Some(g)) => println!("{}", group_to_json(&*resolve_group(g)?)),
        _ => bail!("give exactly one of --space or --group"),
    }
    Ok(())
}

fn configure_workers() -> Result<()> {
    if let Ok(value) = std::env::var("DWTFT_WORKERS") {
        let n: usize = value.parse().with_context(|| format!("DWTFT_WORKERS={value:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = configure_workers().and_then(|()| match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Suite(a) => cmd_suite(a),
        Command::Dump(a) => cmd_dump(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Mismatch>() => {
            eprintln!("mismatch");
            ExitCode::from(1)
        }
        Err(e) if matches!(e.downcast_ref::<EngineError>(), Some(EngineError::OrbifoldMismatch { .. })) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
