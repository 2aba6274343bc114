//! Command-line harness: family generation, simulation, adversarial
//! instance construction and benchmark sweeps, all reproducible from their
//! arguments alone.
//!
//! Exit codes: 0 ok, 1 horizon exceeded, 2 configuration error, 3 internal
//! invariant violation.

mod experiments;
mod row;

use clap::{Args, Parser, Subcommand};
use experiments::{bench, simulate_one, BenchSpec, ExperimentSpec};
use radiobc::adversary::{
    build_single_lb_graph, validate_certificate, AdversaryError, CertVerdict, SearchBudget,
    Variant,
};
use radiobc::protocols::{
    always_transmit, oblivious_family_schedule, round_robin, transmit_sets_to_family,
    ProtocolError, ProtocolSchedule,
};
use radiobc::radiosim::SimError;
use radiobc::setfam::{
    build_r_different, build_selective, build_strongly_selective, ConstructionParams, SetFamError,
};
use row::{csv_document, json_document};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    HorizonExceeded,
    Internal(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::HorizonExceeded => write!(f, "horizon exceeded"),
            CliError::Internal(m) => write!(f, "internal invariant violation: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
impl From<SetFamError> for CliError {
    fn from(e: SetFamError) -> Self {
        match e {
            SetFamError::ConstructionFailure { .. } => CliError::Internal(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        CliError::Config(e.to_string())
    }
}
impl From<radiobc::radiosim::GraphError> for CliError {
    fn from(e: radiobc::radiosim::GraphError) -> Self {
        CliError::Config(e.to_string())
    }
}
impl From<radiobc::io::ParseError> for CliError {
    fn from(e: radiobc::io::ParseError) -> Self {
        CliError::Config(e.to_string())
    }
}
impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Internal(e.to_string())
    }
}
impl From<AdversaryError> for CliError {
    fn from(e: AdversaryError) -> Self {
        match e {
            AdversaryError::Sim(e) => CliError::Internal(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "radiobc", version, about = "Radio broadcast protocol workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format for result tables.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Output path; stdout when omitted. Relative paths resolve against
    /// $RADIOBC_OUT_DIR when that is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a family or sequence set and write it in its text format.
    GenFamily {
        /// selective | strong | rdiff
        #[arg(long, value_parser = ["selective", "strong", "rdiff"])]
        kind: String,
        #[arg(long)]
        n: usize,
        /// Selectivity parameter for selective/strong.
        #[arg(long)]
        k: Option<usize>,
        /// Alphabet size for rdiff.
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate one protocol on one instance and emit a result row.
    Simulate {
        /// path | star | layered:S1,S2,.. | layered-rand:S1,S2,.. | rand |
        /// guv:U,V | tree:EXTRA | file:PATH
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        delta: usize,
        /// Number of broadcast messages.
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// broad-a | broad-b | prot-alpha | multi-bb | multi-ub |
        /// round-robin | always | family-cycle
        #[arg(long)]
        protocol: String,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Load the schedule family from a file instead of constructing it.
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Slot budget; the spec default is 64·n·(ceil(log2 n)+1)^2.
        #[arg(long)]
        horizon: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build a certified adversarial layered graph against an oblivious
    /// schedule, validate it, and serialize graph + certificate.
    Adversary {
        /// round-robin | always | family-cycle
        #[arg(long)]
        protocol: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// general | degree
        #[arg(long, default_value = "general", value_parser = ["general", "degree"])]
        variant: String,
        #[arg(long, default_value_t = 2)]
        delta: usize,
        /// Longest certified window attempted per level.
        #[arg(long, default_value_t = 256)]
        budget: u64,
        /// Candidate subsets examined per window probe.
        #[arg(long, default_value_t = 500_000)]
        candidates: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Family file for family-cycle targets.
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep a parameter grid and emit per-run rows plus summary lines.
    Bench {
        /// Comma-separated node counts.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Comma-separated eccentricities (layer counts).
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<usize>,
        /// Comma-separated max in-degrees.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        delta: Vec<usize>,
        /// Comma-separated protocol names.
        #[arg(long, value_delimiter = ',', default_value = "broad-a")]
        protocol: Vec<String>,
        #[arg(long, default_value_t = 3)]
        reps: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        horizon: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Export an oblivious schedule's transmit sets as a family file.
    ExportSchedule {
        /// round-robin | always | family-cycle
        #[arg(long)]
        protocol: String,
        #[arg(long)]
        n: usize,
        /// Number of slots to export, starting at slot 0.
        #[arg(long)]
        slots: u64,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn resolve_out(path: &std::path::Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var("RADIOBC_OUT_DIR") {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn emit(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => std::fs::write(resolve_out(path), text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn oblivious_target(
    name: &str,
    n: usize,
    delta: usize,
    seed: u64,
    family: Option<&str>,
) -> Result<Box<dyn ProtocolSchedule>, CliError> {
    Ok(match name {
        "round-robin" => Box::new(round_robin(n)),
        "always" => Box::new(always_transmit(n)),
        "family-cycle" => {
            let fam = match family {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    std::sync::Arc::new(radiobc::io::parse_setfam(&text)?)
                }
                None => std::sync::Arc::new(
                    build_selective(n, delta.max(1), &ConstructionParams::seeded(seed))?.family,
                ),
            };
            Box::new(oblivious_family_schedule(n, fam))
        }
        other => {
            return Err(CliError::Config(format!(
                "{other:?} is not an oblivious schedule"
            )))
        }
    })
}

fn run_command(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenFamily {
            kind,
            n,
            k,
            r,
            seed,
            output,
        } => {
            let text = match kind.as_str() {
                "selective" => {
                    let k = k.ok_or_else(|| CliError::Config("--k required".into()))?;
                    let built = build_selective(n, k, &ConstructionParams::seeded(seed))?;
                    radiobc::io::format_setfam(&built.family)
                }
                "strong" => {
                    let k = k.ok_or_else(|| CliError::Config("--k required".into()))?;
                    let built = build_strongly_selective(n, k)?;
                    radiobc::io::format_setfam(&built.family)
                }
                "rdiff" => {
                    let r = r.ok_or_else(|| CliError::Config("--r required".into()))?;
                    if n < 1 || r < 1 {
                        return Err(CliError::Config("rdiff needs n >= 1 and r >= 1".into()));
                    }
                    radiobc::io::format_seqset(&build_r_different(n, r))
                }
                _ => unreachable!("clap validates"),
            };
            emit(&output, &text)
        }
        Command::Simulate {
            graph,
            n,
            d,
            delta,
            r,
            protocol,
            alpha,
            family,
            seed,
            horizon,
            output,
        } => {
            let spec = ExperimentSpec {
                graph,
                n,
                d,
                delta,
                r,
                protocol,
                alpha,
                family_path: family,
                seed,
                horizon,
            };
            let row = simulate_one(&spec)?;
            if let Some(ms) = row.wall_ms {
                eprintln!("run wall time: {ms} ms");
            }
            let incomplete = row.completion_slot.is_none();
            let text = match output.format.as_str() {
                "json" => json_document(&[row], &[]),
                _ => csv_document(&[row], &[]),
            };
            emit(&output, &text)?;
            if incomplete {
                return Err(CliError::HorizonExceeded);
            }
            Ok(())
        }
        Command::Adversary {
            protocol,
            n,
            d,
            variant,
            delta,
            budget,
            candidates,
            seed,
            family,
            output,
        } => {
            let variant = match variant.as_str() {
                "degree" => Variant::Degree(delta),
                _ => Variant::General,
            };
            let budget = SearchBudget::new(budget, candidates)?;
            let mut proto = oblivious_target(&protocol, n, delta, seed, family.as_deref())?;
            let g = build_single_lb_graph(proto.as_mut(), n, d, variant, budget)?;
            let verdict = validate_certificate(&g, proto.as_mut())?;
            let text = radiobc::io::format_advgraph(&g);
            emit(&output, &text)?;
            match verdict {
                CertVerdict::Pass => {
                    println!(
                        "validation=pass levels={} sum_windows={}",
                        g.depth(),
                        g.total_window()
                    );
                    Ok(())
                }
                CertVerdict::Fail { level, slot } => Err(CliError::Internal(format!(
                    "self-validation failed at level {level}, slot {slot}"
                ))),
            }
        }
        Command::Bench {
            n,
            d,
            delta,
            protocol,
            reps,
            seed,
            horizon,
            output,
        } => {
            let spec = BenchSpec {
                ns: n,
                ds: d,
                deltas: delta,
                protocols: protocol,
                reps,
                seed,
                horizon,
            };
            let (rows, summaries, any_incomplete) = bench(&spec)?;
            let text = match output.format.as_str() {
                "json" => json_document(&rows, &summaries),
                _ => csv_document(&rows, &summaries),
            };
            emit(&output, &text)?;
            if any_incomplete {
                return Err(CliError::HorizonExceeded);
            }
            Ok(())
        }
        Command::ExportSchedule {
            protocol,
            n,
            slots,
            family,
            seed,
            output,
        } => {
            let proto = oblivious_target(&protocol, n, 2, seed, family.as_deref())?;
            let view = proto
                .oblivious()
                .ok_or_else(|| CliError::Config("schedule is not oblivious".into()))?;
            let fam = transmit_sets_to_family(view, n, 0..slots);
            emit(&output, &radiobc::io::format_setfam(&fam))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::HorizonExceeded => ExitCode::from(1),
                CliError::Config(_) | CliError::Io(_) => ExitCode::from(2),
                CliError::Internal(_) => ExitCode::from(3),
            }
        }
    }
}
