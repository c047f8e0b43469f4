use std::fmt;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use stratalab::components::{count_components, ComponentError};
use stratalab::euler::{chi_compact, CalibratedCorrections, CorrectionProvider, EulerError, Mode, NoCorrections};
use stratalab::levelgraphs::{
    automorphism_order, build_h3_witness, build_h4_witness, build_h6_witness, ghost_trivial, h3_dimension_lower_bound,
    parse_graph, residueless_at, theorem_applicability, validate, GraphError,
};
use stratalab::partitions::{count_distinct, enumerate_distinct, growth_estimate};
use stratalab::search::exceptional_from_report;
use stratalab::{ResiduelessSignature, Signature, SignatureError};
use stratalab_cli::cache::{self, Cache};
use stratalab_cli::driver::run_search;
use stratalab_cli::output::{self, Format};

/// Largest `N` accepted by `partitions --list`.
const MAX_LISTED_PARTITION: u64 = 120;

#[derive(Parser)]
#[command(
    name = "stratalab",
    version,
    about = "Residueless strata: Euler characteristics, components, witnesses"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Source of the case-dependent corrections.
    #[arg(long, value_enum, default_value_t = Provider::Calibrated, global = true)]
    provider: Provider,
    /// Worker threads for the candidate scan (0: one per core).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Neither read nor write the result cache.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Provider {
    Calibrated,
    None,
}

impl Provider {
    fn get(self) -> &'static dyn CorrectionProvider {
        match self {
            Provider::Calibrated => &CalibratedCorrections,
            Provider::None => &NoCorrections,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Bracket,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Bracket => Mode::Bracket,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    H3,
    H4,
    H6,
}

#[derive(Subcommand)]
enum Command {
    /// Euler characteristic of a residueless stratum, e.g. `8,-2,-3,-3`.
    Euler {
        #[arg(allow_hyphen_values = true)]
        signature: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
    },
    /// Residueless strata all of whose components are rational.
    Exceptional {
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
    },
    /// Two-pole strata of positive Euler characteristic.
    Table,
    /// Connected components of a residueless stratum.
    Components {
        #[arg(allow_hyphen_values = true)]
        signature: String,
    },
    /// Witness level graphs for a stratum of holomorphic differentials.
    Witness {
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        /// Zero orders, e.g. `9,9`.
        #[arg(long)]
        mu: String,
        /// Distinct parts for a single H3 witness, e.g. `3,1`.
        #[arg(long, value_delimiter = ',')]
        parts: Option<Vec<u64>>,
    },
    /// Number of valid H3 witnesses.
    Bound {
        #[arg(long)]
        mu: String,
    },
    /// Theorem tags whose numeric hypotheses hold.
    Applicability {
        #[arg(long)]
        mu: String,
    },
    /// Partitions of N into distinct parts.
    Partitions {
        n: u64,
        /// Also list the partitions.
        #[arg(long)]
        list: bool,
    },
    /// Check a level-graph file (`-` reads standard input).
    Graph { file: PathBuf },
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Unrealizable(String),
    Unresolved(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Unrealizable(m) | CliError::Unresolved(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Invalid(_) => 2,
                CliError::Unrealizable(_) => 3,
                CliError::Unresolved(_) => 4,
            };
        }
        if cause.is::<SignatureError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<GraphError>() {
            return if matches!(e, GraphError::Unrealizable(_)) { 3 } else { 2 };
        }
        let euler = cause
            .downcast_ref::<EulerError>()
            .or_else(|| match cause.downcast_ref::<ComponentError>() {
                Some(ComponentError::Euler(e)) => Some(e),
                _ => None,
            });
        match euler {
            Some(EulerError::UnresolvedCorrections { .. }) => return 4,
            Some(EulerError::WrongArity { .. }) => return 2,
            _ => {}
        }
    }
    1
}

fn residueless(text: &str) -> Result<ResiduelessSignature> {
    text.parse().with_context(|| format!("invalid signature {text:?}"))
}

fn holomorphic(text: &str) -> Result<Signature> {
    let sig: Signature = text.parse().with_context(|| format!("invalid orders {text:?}"))?;
    if sig.orders().iter().any(|&m| m <= 0) {
        return Err(CliError::Invalid(format!("orders {text:?} must all be positive")).into());
    }
    Ok(sig)
}

fn open_cache(g: &Global) -> Cache {
    if g.no_cache {
        return Cache::disabled();
    }
    let Some(path) = cache::default_path() else {
        return Cache::disabled();
    };
    match Cache::open(&path) {
        Ok(cache) => {
            for w in cache.warnings() {
                eprintln!("warning: {w}");
            }
            cache
        }
        Err(e) => {
            eprintln!("warning: cache disabled: {e:#}");
            Cache::disabled()
        }
    }
}

fn flush(cache: &mut Cache) {
    if let Err(e) = cache.flush() {
        eprintln!("warning: results not cached: {e:#}");
    }
}

fn euler(g: &Global, text: &str, mode: Mode) -> Result<String> {
    let sig = residueless(text)?;
    let provider = g.provider.get();
    let result = chi_compact(&sig, mode, provider)?;
    output::render_euler(&output::EulerRecord::new(&result, mode, provider.version()), g.format)
}

fn exceptional(g: &Global, mode: Mode) -> Result<String> {
    let provider = g.provider.get();
    let mut cache = open_cache(g);
    let report = run_search(Mode::Exact, provider, &mut cache, g.jobs)?;
    flush(&mut cache);
    let list = exceptional_from_report(&report, provider)?;
    let unresolved = match mode {
        Mode::Exact => None,
        Mode::Bracket => {
            let bracket = run_search(Mode::Bracket, provider, &mut Cache::disabled(), g.jobs)?;
            let undecided: Vec<_> = list
                .iter()
                .filter(|s| s.p() >= 2 && !bracket.exceptional.contains(s) && !bracket.unresolved.contains(s))
                .collect();
            anyhow::ensure!(undecided.is_empty(), "bracket search excludes {undecided:?}");
            Some(bracket.unresolved.iter().map(ToString::to_string).collect())
        }
    };
    let record = output::ExceptionalRecord {
        mode: mode.to_string(),
        provider_version: provider.version().to_string(),
        candidates_scanned: report.candidates_scanned,
        exceptional: list.iter().map(ToString::to_string).collect(),
        unresolved,
    };
    output::render_exceptional(&record, g.format)
}

fn table(g: &Global) -> Result<String> {
    let provider = g.provider.get();
    let mut cache = open_cache(g);
    let report = run_search(Mode::Exact, provider, &mut cache, g.jobs)?;
    flush(&mut cache);
    if let Some(sig) = report.unresolved.iter().find(|s| s.p() == 2) {
        return Err(CliError::Unresolved(format!(
            "provider {} leaves the corrections of {sig} open",
            provider.version()
        ))
        .into());
    }
    let mut rows: Vec<_> = report.positives.iter().filter(|p| p.signature.p() == 2).collect();
    rows.sort_by(|x, y| x.signature.poles().cmp(y.signature.poles()));
    let rows: Vec<_> = rows
        .into_iter()
        .map(|p| {
            let chi = p.chi.exact().expect("exact search");
            output::TableRow::new(&p.signature, chi, &count_components(&p.signature))
        })
        .collect();
    output::render_table(&rows, g.format)
}

fn components(g: &Global, text: &str) -> Result<String> {
    let sig = residueless(text)?;
    output::render_components(&output::ComponentsRecord::new(&sig, &count_components(&sig)), g.format)
}

fn witness(g: &Global, theorem: TheoremArg, mu: &str, parts: Option<&[u64]>) -> Result<(String, bool)> {
    let sig = holomorphic(mu)?;
    if parts.is_some() && !matches!(theorem, TheoremArg::H3) {
        return Err(CliError::Invalid("--parts only applies to --theorem h3".into()).into());
    }
    let certificates = match (theorem, parts) {
        (TheoremArg::H3, Some(parts)) => vec![build_h3_witness(&sig, parts)?],
        (TheoremArg::H3, None) => h3_dimension_lower_bound(&sig).certificates,
        (TheoremArg::H4, _) => vec![build_h4_witness(&sig)?],
        (TheoremArg::H6, _) => vec![build_h6_witness(&sig)?],
    };
    let records: Vec<output::WitnessRecord> = certificates.iter().map(Into::into).collect();
    let any_valid = records.iter().any(|r| r.valid);
    Ok((output::render_witnesses(&records, g.format)?, any_valid))
}

fn graph_report(file: &PathBuf) -> Result<(String, bool)> {
    let text = if file.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?
    };
    let graph = parse_graph(&text)?;
    let mut out = String::new();
    let violations = validate(&graph).err().unwrap_or_default();
    out.push_str(&format!("vertices       {}\n", graph.vertices().len()));
    out.push_str(&format!("depth          {}\n", graph.depth()));
    if let Some(genus) = graph.ambient_genus() {
        out.push_str(&format!("genus          {genus}\n"));
    }
    out.push_str(&format!("automorphisms  {}\n", automorphism_order(&graph)?));
    out.push_str(&format!(
        "ghost_trivial  {}\n",
        if ghost_trivial(&graph) { "yes" } else { "no" }
    ));
    for v in graph.vertices() {
        if let Some(sig) = residueless_at(&graph, v.id) {
            out.push_str(&format!("residueless    vertex {} level {} {sig}\n", v.id, v.level));
        }
    }
    for v in &violations {
        out.push_str(&format!("violation      {v}\n"));
    }
    Ok((out, violations.is_empty()))
}

fn run(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    match &cli.command {
        Command::Euler { signature, mode } => euler(g, signature, (*mode).into()),
        Command::Exceptional { mode } => exceptional(g, (*mode).into()),
        Command::Table => table(g),
        Command::Components { signature } => components(g, signature),
        Command::Witness { theorem, mu, parts } => {
            let (text, any_valid) = witness(g, *theorem, mu, parts.as_deref())?;
            if !any_valid {
                print!("{text}");
                return Err(CliError::Unrealizable(format!("no valid certificate for mu = ({mu})")).into());
            }
            Ok(text)
        }
        Command::Bound { mu } => {
            let sig = holomorphic(mu)?;
            let bound = h3_dimension_lower_bound(&sig).bound;
            let record = output::BoundRecord {
                mu: sig.to_string(),
                genus: sig.genus(),
                bound,
            };
            output::render_bound(&record, g.format)
        }
        Command::Applicability { mu } => {
            let sig = holomorphic(mu)?;
            let record = output::ApplicabilityRecord {
                mu: sig.to_string(),
                genus: sig.genus(),
                theorems: theorem_applicability(&sig).iter().map(ToString::to_string).collect(),
            };
            output::render_applicability(&record, g.format)
        }
        Command::Partitions { n, list } => {
            if *list && *n > MAX_LISTED_PARTITION {
                return Err(CliError::Invalid(format!("--list needs N <= {MAX_LISTED_PARTITION}")).into());
            }
            let record = output::PartitionsRecord {
                n: *n,
                count: count_distinct(*n).to_string(),
                growth_estimate: growth_estimate(*n),
                partitions: list.then(|| enumerate_distinct(*n).iter().map(ToString::to_string).collect()),
            };
            output::render_partitions(&record, g.format)
        }
        Command::Graph { file } => {
            let (text, ok) = graph_report(file)?;
            if !ok {
                print!("{text}");
                return Err(CliError::Invalid("graph fails validation".into()).into());
            }
            Ok(text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
