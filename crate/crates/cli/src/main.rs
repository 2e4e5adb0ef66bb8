//! Command-line front end: entailment decisions, model checking, rule
//! mining, and counter-model extraction over rule and context files.
//!
//! Exit codes are a three-way contract: 0 when the instance is entailed (or
//! the context models every rule), 1 when not, 2 on any parse, I/O, or
//! configuration error (with a diagnostic on stderr).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use conimp::context::FormalContext;
use conimp::entail::{decide_entailment, FailingProgram, Verdict};
use conimp::lp::ImplicitSystem;
use conimp::numeric::{decimal_string, parse_rational, Rational};
use conimp::rules::{
    attribute_universe, mine_rules, parse_rule_file, ConstrainedImplication, RuleSet,
};
use conimp::simplex::{PivotRule, SolveOptions};

#[derive(Parser)]
#[command(
    name = "conimp",
    version,
    about = "Exact entailment for support/confidence-constrained implications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a rule file's rules entail its '?' query
    Entail(EntailArgs),
    /// Evaluate every rule of a file (and its query, if any) on a context
    Check(CheckArgs),
    /// List all rules a context supports at the given thresholds
    Mine(MineArgs),
    /// Like entail, but write the counter-model context to --out
    Witness(WitnessArgs),
}

#[derive(Args)]
struct SolverFlags {
    /// Iteration safety cap for the simplex solver
    #[arg(long, value_name = "N", default_value_t = 1_000_000)]
    max_iterations: u64,
    /// Emit one line per simplex pivot on stderr
    #[arg(long)]
    trace: bool,
    /// Ratio-test tie-breaking rule
    #[arg(long, value_enum, default_value_t = PivotChoice::Bland)]
    pivot_rule: PivotChoice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PivotChoice {
    /// Smallest column index leaves on ties; guaranteed to terminate
    Bland,
    /// Lexicographically smallest original column leaves on ties
    Lexicographic,
}

impl SolverFlags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            pivot_rule: match self.pivot_rule {
                PivotChoice::Bland => PivotRule::Bland,
                PivotChoice::Lexicographic => PivotRule::LexicographicColumns,
            },
            max_iterations: self.max_iterations,
            trace: self.trace,
        }
    }
}

#[derive(Args)]
struct EntailArgs {
    /// Rule file with one '?' query line
    rules: PathBuf,
    /// Write the report here instead of stdout; a counter-model lands next
    /// to it as STEM.witness.cxt (next to the rule file when absent)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Append decimal approximations to exact values
    #[arg(long)]
    decimal: bool,
    /// Dump the densified system as TSV (matrix rows augmented with b)
    #[arg(long, value_name = "PATH")]
    dump_system: Option<PathBuf>,
    /// Largest universe the densifier may materialize, in attributes
    #[arg(long, value_name = "P", default_value_t = conimp::lp::DEFAULT_MATERIALIZATION_CAP)]
    max_materialize: usize,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct CheckArgs {
    /// Context in Burmeister CXT format
    cxt: PathBuf,
    /// Rule file; rules and query are all checked
    rules: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Append decimal approximations to exact values
    #[arg(long)]
    decimal: bool,
}

#[derive(Args)]
struct MineArgs {
    /// Context in Burmeister CXT format
    cxt: PathBuf,
    /// Minimum support, as p/q or an integer
    #[arg(long, value_name = "P/Q")]
    min_support: String,
    /// Minimum confidence, as p/q or an integer
    #[arg(long, value_name = "P/Q")]
    min_confidence: String,
    /// Write the rules here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    /// Rule file with one '?' query line
    rules: PathBuf,
    /// Where to write the counter-model context (CXT)
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Append decimal approximations to exact values
    #[arg(long)]
    decimal: bool,
    /// Dump the densified system as TSV (matrix rows augmented with b)
    #[arg(long, value_name = "PATH")]
    dump_system: Option<PathBuf>,
    /// Largest universe the densifier may materialize, in attributes
    #[arg(long, value_name = "P", default_value_t = conimp::lp::DEFAULT_MATERIALIZATION_CAP)]
    max_materialize: usize,
    #[command(flatten)]
    solver: SolverFlags,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("conimp: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Entail(args) => {
            let witness_target = args
                .out
                .as_deref()
                .unwrap_or(&args.rules)
                .with_extension("witness.cxt");
            run_entailment(
                &args.rules,
                args.out.as_deref(),
                witness_target,
                args.decimal,
                args.dump_system.as_deref(),
                args.max_materialize,
                &args.solver.options(),
            )
        }
        Command::Witness(args) => run_entailment(
            &args.rules,
            None,
            args.out.clone(),
            args.decimal,
            args.dump_system.as_deref(),
            args.max_materialize,
            &args.solver.options(),
        ),
        Command::Check(args) => run_check(&args),
        Command::Mine(args) => run_mine(&args),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_entailment(
    rules_path: &Path,
    report_out: Option<&Path>,
    witness_target: PathBuf,
    decimal: bool,
    dump_system: Option<&Path>,
    max_materialize: usize,
    options: &SolveOptions,
) -> Result<ExitCode> {
    let (rules, query) = load_rules(rules_path)?;
    let query = query.ok_or_else(|| {
        anyhow!(
            "{}: no '?' query line; nothing to decide",
            rules_path.display()
        )
    })?;

    if let Some(path) = dump_system {
        let universe = attribute_universe(&rules, &query);
        let system = ImplicitSystem::new(universe, &rules)?;
        let dense = system.densify_with_cap(max_materialize)?;
        fs::write(path, dense.to_tsv()).with_context(|| format!("writing {}", path.display()))?;
    }

    let verdict = decide_entailment(&rules, &query, options)?;
    write_output(report_out, &render_verdict(&verdict, &query, decimal))?;
    if let Some(witness) = &verdict.witness {
        fs::write(&witness_target, witness.to_cxt())
            .with_context(|| format!("writing {}", witness_target.display()))?;
    }
    Ok(if verdict.entailed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_check(args: &CheckArgs) -> Result<ExitCode> {
    let context = load_context(&args.cxt)?;
    let (rules, query) = load_rules(&args.rules)?;

    let mut report = String::new();
    let mut all_hold = true;
    let labeled = rules
        .iter()
        .enumerate()
        .map(|(i, rule)| (format!("rule {}", i + 1), rule))
        .chain(query.iter().map(|rule| ("query".to_string(), rule)));
    for (label, rule) in labeled {
        let support = context.support(rule.premise())?;
        let confidence = context.confidence(rule.premise(), rule.conclusion())?;
        let mut violations = Vec::new();
        if support < *rule.min_support() {
            violations.push(format!("supp = {} < {}", support, rule.min_support()));
        }
        if confidence < *rule.min_confidence() {
            violations.push(format!("conf = {} < {}", confidence, rule.min_confidence()));
        }
        let status = if violations.is_empty() {
            "holds".to_string()
        } else {
            all_hold = false;
            format!("FAILS ({})", violations.join(", "))
        };
        report.push_str(&format!(
            "{label}: {rule}: supp = {}, conf = {}: {status}\n",
            annotated(&support, args.decimal),
            annotated(&confidence, args.decimal),
        ));
    }
    report.push_str(&format!(
        "verdict: {}\n",
        if all_hold { "MODELS" } else { "DOES NOT MODEL" }
    ));
    write_output(args.out.as_deref(), &report)?;
    Ok(if all_hold {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_mine(args: &MineArgs) -> Result<ExitCode> {
    let context = load_context(&args.cxt)?;
    let min_support = parse_rational(&args.min_support).context("--min-support")?;
    let min_confidence = parse_rational(&args.min_confidence).context("--min-confidence")?;
    let mined = mine_rules(&context, &min_support, &min_confidence)?;
    let mut out = String::new();
    for rule in mined {
        out.push_str(&rule.to_string());
        out.push('\n');
    }
    write_output(args.out.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

fn render_verdict(verdict: &Verdict, query: &ConstrainedImplication, decimal: bool) -> String {
    let mut report = String::new();
    let verdict_line = match verdict.failing_program {
        None => "ENTAILED".to_string(),
        Some(FailingProgram::Support) => "NOT ENTAILED (support)".to_string(),
        Some(FailingProgram::Confidence) => "NOT ENTAILED (confidence)".to_string(),
    };
    report.push_str(&format!("verdict: {verdict_line}\n"));
    report.push_str(&format!(
        "min_support: {}\n",
        annotated(&verdict.min_support_value, decimal)
    ));
    report.push_str(&format!(
        "min_surrogate: {}\n",
        annotated(&verdict.min_surrogate_value, decimal)
    ));
    report.push_str(&format!(
        "threshold_support: {}\n",
        annotated(query.min_support(), decimal)
    ));
    report.push_str(&format!(
        "threshold_confidence: {}\n",
        annotated(query.min_confidence(), decimal)
    ));
    match verdict.failing_program {
        Some(FailingProgram::Support) => report.push_str("failing_program: support\n"),
        Some(FailingProgram::Confidence) => report.push_str("failing_program: confidence\n"),
        None => {}
    }
    if let Some(witness) = &verdict.witness {
        report.push_str(&format!("witness_objects: {}\n", witness.object_count()));
    }
    report
}

fn annotated(value: &Rational, decimal: bool) -> String {
    if decimal {
        format!("{} (~{})", value, decimal_string(value, 6))
    } else {
        value.to_string()
    }
}

fn load_rules(path: &Path) -> Result<(RuleSet, Option<ConstrainedImplication>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_rule_file(&text).with_context(|| path.display().to_string())
}

fn load_context(path: &Path) -> Result<FormalContext> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    FormalContext::parse_cxt(&text).with_context(|| path.display().to_string())
}

fn write_output(target: Option<&Path>, content: &str) -> Result<()> {
    match target {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
