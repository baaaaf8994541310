//! `homlab` — command-line front end wiring the pipeline:
//! generate -> varex -> enumerate -> search -> analyze.
//!
//! Every command reads and writes JSON/CSV artifacts keyed by the mutant
//! catalog's digest, so stages from different sources cannot be mixed. All
//! outputs are byte-reproducible for a fixed configuration; wall-clock
//! timing goes to the `run.log` sidecar, never into artifacts.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 resource abort
//! (conditional-value partition explosion), 4 artifact-consistency error.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use homlab::analysis::CharacteristicsReport;
use homlab::mutgen::{generate_mutants, weave, CatalogFile, MutantCatalog, MutgenError};
use homlab::search::{
    brute_force, genetic_search, prioritized_search, BatchBudget, Bounds, Budget, GeneticParams,
    PriorityWeights, Timeline, TimelineFile,
};
use homlab::sshomsat::{enumerate_sshoms, EnumerationStrategy, SshomSetFile};
use homlab::toylang::{parse, ParseError, Program, DEFAULT_STEP_BOUND};
use homlab::varex::{vrun_suite, KillReport, KillReportFile, VarexConfig, VarexError};
use homlab::MutantId;
use homlab::rational::Rational;

const EXIT_USAGE: i32 = 2;
const EXIT_RESOURCE: i32 = 3;
const EXIT_CONSISTENCY: i32 = 4;

#[derive(Parser)]
#[command(
    name = "homlab",
    version,
    about = "Higher-order-mutation laboratory for a small imperative language"
)]
struct Cli {
    /// TOML file with default values for the flags; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the first-order mutant catalog of a program.
    Generate(GenerateArgs),
    /// Run the suite variationally and write per-test failure conditions.
    Varex(VarexArgs),
    /// Enumerate the complete (strict-)SSHOM set from a kill report.
    Enumerate(EnumerateArgs),
    /// Search for SSHOMs one candidate at a time (bf | gen | pri).
    Search(SearchArgs),
    /// Compute SSHOM-set characteristics (order, equal-fail, N+1, proximity).
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Subject program (.mut source).
    #[arg(long)]
    program: Option<PathBuf>,
    /// Keep only these mutant ids (comma-separated), re-indexed densely.
    #[arg(long, value_delimiter = ',')]
    mutants: Option<Vec<u32>>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VarexArgs {
    #[arg(long)]
    program: Option<PathBuf>,
    /// Catalog produced by `generate`.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    step_bound: Option<u64>,
    /// Abort threshold for conditional-value alternatives.
    #[arg(long)]
    partition_limit: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Kill report produced by `varex`.
    #[arg(long)]
    kill_report: Option<PathBuf>,
    /// Enumerate strict-SSHOMs instead of SSHOMs.
    #[arg(long)]
    strict: bool,
    /// Model enumeration strategy: allsat | block.
    #[arg(long)]
    enum_strategy: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    program: Option<PathBuf>,
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// bf | gen | pri.
    #[arg(long)]
    strategy: Option<String>,
    /// Candidate-evaluation budget.
    #[arg(long)]
    budget: Option<u64>,
    /// Wall-clock cap in seconds (sacrifices reproducibility).
    #[arg(long)]
    budget_seconds: Option<u64>,
    /// Seed for the genetic strategy (required for gen).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    step_bound: Option<u64>,
    /// Largest candidate order for bf and pri.
    #[arg(long)]
    max_order: Option<usize>,
    /// Penalty weights as order,testDiff,isN1 (integers or fractions
    /// like 5/2).
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<String>>,
    /// Candidate bounds as maxOrder,maxFunctions,maxUnits (pri).
    #[arg(long, value_delimiter = ',')]
    bounds: Option<Vec<usize>>,
    /// Per-batch candidate-evaluation cap (pri).
    #[arg(long)]
    batch_budget: Option<u64>,
    /// Per-batch wall cap in seconds (pri).
    #[arg(long)]
    batch_seconds: Option<u64>,
    /// Threads for first-order-mutant evaluation.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// SSHOM set produced by `enumerate` or `search`.
    #[arg(long)]
    sshoms: Option<PathBuf>,
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    kill_report: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Defaults loadable from `--config`; field names are the flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    program: Option<PathBuf>,
    catalog: Option<PathBuf>,
    kill_report: Option<PathBuf>,
    sshoms: Option<PathBuf>,
    out: Option<PathBuf>,
    mutants: Option<Vec<u32>>,
    step_bound: Option<u64>,
    partition_limit: Option<usize>,
    strict: Option<bool>,
    enum_strategy: Option<String>,
    strategy: Option<String>,
    budget: Option<u64>,
    budget_seconds: Option<u64>,
    seed: Option<u64>,
    max_order: Option<usize>,
    weights: Option<Vec<String>>,
    bounds: Option<Vec<usize>>,
    batch_budget: Option<u64>,
    batch_seconds: Option<u64>,
    jobs: Option<usize>,
}

struct Failure {
    code: i32,
    message: String,
}

type CliResult<T> = Result<T, Failure>;

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        fail(EXIT_USAGE, e.to_string())
    }
}

impl From<MutgenError> for Failure {
    fn from(e: MutgenError) -> Self {
        let code = match e {
            MutgenError::DigestMismatch { .. }
            | MutgenError::InconsistentCatalog(_)
            | MutgenError::UnknownMutant(_) => EXIT_CONSISTENCY,
            MutgenError::ConflictingSelection(_, _) => EXIT_USAGE,
        };
        fail(code, e.to_string())
    }
}

impl From<VarexError> for Failure {
    fn from(e: VarexError) -> Self {
        let code = match e {
            VarexError::PartitionExplosion { .. } => EXIT_RESOURCE,
            VarexError::InvalidReport(_) => EXIT_CONSISTENCY,
            VarexError::OracleLimitExceeded { .. } => EXIT_USAGE,
        };
        fail(code, e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = dispatch(&cli);
    match result {
        Ok(log_line) => {
            let _ = append_run_log(&cli, &log_line, started.elapsed());
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            std::process::exit(failure.code);
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<String> {
    let config = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Generate(args) => cmd_generate(args, &config),
        Command::Varex(args) => cmd_varex(args, &config),
        Command::Enumerate(args) => cmd_enumerate(args, &config),
        Command::Search(args) => cmd_search(args, &config),
        Command::Analyze(args) => cmd_analyze(args, &config),
    }
}

fn load_config(path: Option<&Path>) -> CliResult<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| fail(EXIT_USAGE, format!("bad config {}: {e}", path.display())))
}

fn append_run_log(cli: &Cli, line: &str, elapsed: Duration) -> std::io::Result<()> {
    // Timestamps live only here; artifacts stay byte-reproducible.
    let out = match &cli.command {
        Command::Generate(a) => a.out.clone(),
        Command::Varex(a) => a.out.clone(),
        Command::Enumerate(a) => a.out.clone(),
        Command::Search(a) => a.out.clone(),
        Command::Analyze(a) => a.out.clone(),
    };
    let Some(out) = out else { return Ok(()) };
    let unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let entry = format!("{unix_ms} {line} wall_ms={}\n", elapsed.as_millis());
    std::fs::create_dir_all(&out)?;
    use std::io::Write;
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(out.join("run.log"))?;
    file.write_all(entry.as_bytes())
}

// -------------------------------------------------------------------
// Shared helpers
// -------------------------------------------------------------------

fn required<T: Clone>(flag: Option<&T>, fallback: Option<&T>, name: &str) -> CliResult<T> {
    flag.or(fallback)
        .cloned()
        .ok_or_else(|| fail(EXIT_USAGE, format!("missing required --{name}")))
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| {
        fail(
            EXIT_CONSISTENCY,
            format!("{} is not a valid artifact: {e}", path.display()),
        )
    })
}

fn write_output(out_dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot create {}: {e}", out_dir.display())))?;
    let path = out_dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn write_json<T: serde::Serialize>(out_dir: &Path, name: &str, value: &T) -> CliResult<PathBuf> {
    let mut text = serde_json::to_string_pretty(value).expect("artifacts serialize");
    text.push('\n');
    write_output(out_dir, name, &text)
}

fn load_program(path: &Path) -> CliResult<Program> {
    let source = read_text(path)?;
    Ok(parse(&source)?)
}

fn load_catalog(program: &Program, path: &Path) -> CliResult<MutantCatalog> {
    let file: CatalogFile = read_json(path)?;
    Ok(MutantCatalog::from_file(program, &file)?)
}

fn require_tests(program: &Program) -> CliResult<()> {
    if program.tests.is_empty() {
        return Err(fail(
            EXIT_USAGE,
            "the program defines no tests; at least one is required",
        ));
    }
    Ok(())
}

fn positive_step_bound(value: Option<u64>) -> CliResult<u64> {
    match value {
        None => Ok(DEFAULT_STEP_BOUND),
        Some(0) => Err(fail(EXIT_USAGE, "--step-bound must be positive")),
        Some(n) => Ok(n),
    }
}

// -------------------------------------------------------------------
// Commands
// -------------------------------------------------------------------

fn cmd_generate(args: &GenerateArgs, config: &ConfigFile) -> CliResult<String> {
    let program_path = required(args.program.as_ref(), config.program.as_ref(), "program")?;
    let out = required(args.out.as_ref(), config.out.as_ref(), "out")?;
    let program = load_program(&program_path)?;
    let mut catalog = generate_mutants(&program);
    let filter = args.mutants.clone().or_else(|| config.mutants.clone());
    if let Some(keep) = filter {
        let keep: BTreeSet<MutantId> = keep.into_iter().map(MutantId).collect();
        // A bad filter id is an input mistake, not a stale artifact.
        catalog = catalog
            .filter(&keep)
            .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    }
    let path = write_json(&out, "catalog.json", &catalog.to_file())?;
    println!(
        "wrote {} ({} mutants, digest {})",
        path.display(),
        catalog.len(),
        &catalog.digest()[..12]
    );
    Ok(format!("generate program={}", program_path.display()))
}

fn cmd_varex(args: &VarexArgs, config: &ConfigFile) -> CliResult<String> {
    let program_path = required(args.program.as_ref(), config.program.as_ref(), "program")?;
    let catalog_path = required(args.catalog.as_ref(), config.catalog.as_ref(), "catalog")?;
    let out = required(args.out.as_ref(), config.out.as_ref(), "out")?;
    let program = load_program(&program_path)?;
    require_tests(&program)?;
    let catalog = load_catalog(&program, &catalog_path)?;
    let meta = weave(&program, &catalog)?;
    let varex_config = VarexConfig {
        step_bound: positive_step_bound(args.step_bound.or(config.step_bound))?,
        partition_limit: args
            .partition_limit
            .or(config.partition_limit)
            .unwrap_or(homlab::varex::DEFAULT_PARTITION_LIMIT),
    };
    let mut report = vrun_suite(&meta, &varex_config)?;
    let path = write_json(&out, "killreport.json", &report.to_file())?;
    println!("wrote {} ({} tests)", path.display(), report.tests().len());
    Ok(format!("varex program={}", program_path.display()))
}

fn cmd_enumerate(args: &EnumerateArgs, config: &ConfigFile) -> CliResult<String> {
    let catalog_path = required(args.catalog.as_ref(), config.catalog.as_ref(), "catalog")?;
    let report_path = required(
        args.kill_report.as_ref(),
        config.kill_report.as_ref(),
        "kill-report",
    )?;
    let out = required(args.out.as_ref(), config.out.as_ref(), "out")?;
    let strict = args.strict || config.strict.unwrap_or(false);
    let strategy = parse_enum_strategy(
        args.enum_strategy
            .as_deref()
            .or(config.enum_strategy.as_deref()),
    )?;

    let catalog_file: CatalogFile = read_json(&catalog_path)?;
    let catalog = MutantCatalog::from_file_unanchored(&catalog_file)?;
    let report_file: KillReportFile = read_json(&report_path)?;
    if report_file.universe_digest != catalog.digest() {
        return Err(fail(
            EXIT_CONSISTENCY,
            format!(
                "kill report universe {} does not match catalog digest {}",
                report_file.universe_digest,
                catalog.digest()
            ),
        ));
    }
    let mut report = KillReport::from_file(&report_file)?;
    let records = enumerate_sshoms(&mut report, &catalog, strict, strategy);
    let file = SshomSetFile::new(catalog.digest(), strict, &records);
    let path = write_json(&out, "sshoms.json", &file)?;
    println!(
        "wrote {} ({} records, strict_mode={strict})",
        path.display(),
        records.len()
    );
    Ok(format!("enumerate strict={strict}"))
}

fn parse_enum_strategy(name: Option<&str>) -> CliResult<EnumerationStrategy> {
    match name {
        None | Some("allsat") => Ok(EnumerationStrategy::AllSat),
        Some("block") => Ok(EnumerationStrategy::SolveAndBlock),
        Some(other) => Err(fail(
            EXIT_USAGE,
            format!("unknown enumeration strategy `{other}` (allsat | block)"),
        )),
    }
}

fn cmd_search(args: &SearchArgs, config: &ConfigFile) -> CliResult<String> {
    let program_path = required(args.program.as_ref(), config.program.as_ref(), "program")?;
    let catalog_path = required(args.catalog.as_ref(), config.catalog.as_ref(), "catalog")?;
    let out = required(args.out.as_ref(), config.out.as_ref(), "out")?;
    let strategy = required(args.strategy.as_ref(), config.strategy.as_ref(), "strategy")?;
    let program = load_program(&program_path)?;
    require_tests(&program)?;
    let catalog = load_catalog(&program, &catalog_path)?;
    let meta = weave(&program, &catalog)?;

    let step_bound = positive_step_bound(args.step_bound.or(config.step_bound))?;
    let jobs = args.jobs.or(config.jobs).unwrap_or(1);
    let budget = Budget {
        max_evaluations: args.budget.or(config.budget),
        max_wall: args
            .budget_seconds
            .or(config.budget_seconds)
            .map(Duration::from_secs),
    };
    let max_order = args.max_order.or(config.max_order).unwrap_or(6);
    if max_order < 2 {
        return Err(fail(EXIT_USAGE, "--max-order must be at least 2"));
    }

    let (timeline, seed_used): (Timeline, Option<u64>) = match strategy.as_str() {
        "bf" => (
            brute_force(&meta, step_bound, budget, max_order, jobs),
            None,
        ),
        "gen" => {
            let seed = args.seed.or(config.seed).ok_or_else(|| {
                fail(EXIT_USAGE, "the genetic strategy requires --seed")
            })?;
            (
                genetic_search(
                    &meta,
                    step_bound,
                    budget,
                    &GeneticParams::default(),
                    seed,
                    jobs,
                ),
                Some(seed),
            )
        }
        "pri" => {
            let weights = parse_weights(args.weights.as_deref().or(config.weights.as_deref()))?;
            let bounds = parse_bounds(
                args.bounds.as_deref().or(config.bounds.as_deref()),
                max_order,
            )?;
            let batch_budget = BatchBudget {
                max_evaluations: args.batch_budget.or(config.batch_budget),
                max_wall: args
                    .batch_seconds
                    .or(config.batch_seconds)
                    .map(Duration::from_secs),
            };
            (
                prioritized_search(
                    &meta, step_bound, &weights, &bounds, batch_budget, budget, jobs,
                ),
                None,
            )
        }
        other => {
            return Err(fail(
                EXIT_USAGE,
                format!("unknown strategy `{other}` (bf | gen | pri)"),
            ))
        }
    };

    let csv_path = write_output(&out, "timeline.csv", &timeline.to_csv())?;
    let file = TimelineFile::new(&timeline, catalog.digest(), &strategy, seed_used);
    write_json(&out, "timeline.json", &file)?;
    println!(
        "wrote {} ({} records in {} evaluations{})",
        csv_path.display(),
        timeline.entries.len(),
        timeline.total_evaluations,
        if timeline.budget_exhausted {
            ", budget exhausted"
        } else {
            ""
        }
    );
    Ok(format!("search strategy={strategy}"))
}

fn parse_weights(raw: Option<&[String]>) -> CliResult<PriorityWeights> {
    match raw {
        None => Ok(PriorityWeights::default()),
        Some([order, test_diff, n_plus_one]) => Ok(PriorityWeights {
            order: parse_rational(order)?,
            test_diff: parse_rational(test_diff)?,
            n_plus_one: parse_rational(n_plus_one)?,
        }),
        Some(other) => Err(fail(
            EXIT_USAGE,
            format!("--weights takes three values, got {}", other.len()),
        )),
    }
}

/// Non-negative rational in `N` or `N/D` form.
fn parse_rational(text: &str) -> CliResult<Rational> {
    let bad = || fail(EXIT_USAGE, format!("bad weight `{text}` (use N or N/D)"));
    let value = match text.split_once('/') {
        None => Rational::from_int(text.trim().parse::<i64>().map_err(|_| bad())?),
        Some((num, den)) => {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Rational::new(num, den)
        }
    };
    if value < Rational::zero() {
        return Err(fail(EXIT_USAGE, "weights must be non-negative"));
    }
    Ok(value)
}

fn parse_bounds(raw: Option<&[usize]>, max_order: usize) -> CliResult<Bounds> {
    let bounds = match raw {
        None => Bounds {
            max_order,
            ..Bounds::default()
        },
        Some([order, functions, units]) => Bounds {
            max_order: *order,
            max_functions: *functions,
            max_units: *units,
        },
        Some(other) => {
            return Err(fail(
                EXIT_USAGE,
                format!("--bounds takes three values, got {}", other.len()),
            ))
        }
    };
    if bounds.max_order < 2 || bounds.max_units > bounds.max_functions {
        return Err(fail(
            EXIT_USAGE,
            "bounds require maxOrder >= 2 and maxUnits <= maxFunctions",
        ));
    }
    Ok(bounds)
}

fn cmd_analyze(args: &AnalyzeArgs, config: &ConfigFile) -> CliResult<String> {
    let sshoms_path = required(args.sshoms.as_ref(), config.sshoms.as_ref(), "sshoms")?;
    let catalog_path = required(args.catalog.as_ref(), config.catalog.as_ref(), "catalog")?;
    let report_path = required(
        args.kill_report.as_ref(),
        config.kill_report.as_ref(),
        "kill-report",
    )?;
    let out = required(args.out.as_ref(), config.out.as_ref(), "out")?;

    let catalog_file: CatalogFile = read_json(&catalog_path)?;
    let catalog = MutantCatalog::from_file_unanchored(&catalog_file)?;
    let sshom_file: SshomSetFile = read_json(&sshoms_path)?;
    if sshom_file.catalog_digest != catalog.digest() {
        return Err(fail(
            EXIT_CONSISTENCY,
            "SSHOM set was produced for a different catalog",
        ));
    }
    let report_file: KillReportFile = read_json(&report_path)?;
    if report_file.universe_digest != catalog.digest() {
        return Err(fail(
            EXIT_CONSISTENCY,
            "kill report was produced for a different catalog",
        ));
    }
    let report = KillReport::from_file(&report_file)?;
    let records = sshom_file.to_records();
    for record in &records {
        for &m in &record.mutants {
            if m.index() >= catalog.len() {
                return Err(fail(
                    EXIT_CONSISTENCY,
                    format!("record references unknown mutant {m}"),
                ));
            }
        }
    }
    let characteristics =
        CharacteristicsReport::build(&records, &catalog, &report.fom_kills())
            .map_err(|e| fail(EXIT_CONSISTENCY, e.to_string()))?;
    let path = write_json(&out, "characteristics.json", &characteristics)?;
    write_output(&out, "characteristics.csv", &characteristics.proximity_csv())?;
    println!("wrote {}", path.display());
    Ok("analyze".to_string())
}
