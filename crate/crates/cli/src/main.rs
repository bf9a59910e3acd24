use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use divinc::io::{parse_catalog, parse_config, Config};
use divinc::report::{homogeneity_report, score_report, selection_report, Status, Target, ValidationReport};
use divinc::selection::Method;
use divinc::{AttributeRef, Error, Mechanism, Scenario, Violation};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  unexpected failure
  2  bad usage (flags, k out of range, enumeration cap exceeded)
  3  file could not be read
  4  config or catalog could not be parsed
  5  input failed validation
  6  unknown instance id
  7  no subset meets the diversity floor
  8  a requested score is undefined
  9  no item carries the requested group";

#[derive(Parser)]
#[command(name = "divinc", version)]
#[command(about = "Score and select instance sets for diversity and inclusion")]
#[command(after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Inputs {
    /// TOML config: schema, presence targets, inclusion, selection, profile
    #[arg(long)]
    config: PathBuf,

    /// JSON lines catalog: a header record, then one instance per line
    #[arg(long)]
    catalog: PathBuf,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Exhaustive when C(n, k) is within the cap, greedy otherwise
    Auto,
    Exhaustive,
    Greedy,
}

#[derive(Subcommand)]
enum Command {
    /// Check config and catalog and list every violation
    Validate {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Score instances and, for an id list, the set they form
    Score {
        #[command(flatten)]
        inputs: Inputs,

        /// `each`, or a comma-separated list of instance ids
        #[arg(long, default_value = "each")]
        target: String,

        /// Cumulate with this mechanism at every level
        #[arg(long)]
        mechanism: Option<Mechanism>,
    },
    /// Choose the best k-subset of the catalog
    Select {
        #[command(flatten)]
        inputs: Inputs,

        /// Subset size
        #[arg(long)]
        k: usize,

        /// Cumulate and compare with this mechanism at every level
        #[arg(long)]
        mechanism: Option<Mechanism>,

        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,

        /// Seed for greedy restarts
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Share of the most common value of a group among items
    Homogeneity {
        #[command(flatten)]
        inputs: Inputs,

        /// Group type to measure
        #[arg(long)]
        group: String,

        /// Only count items matching GROUP:VALUE (reported next to the overall value)
        #[arg(long)]
        restrict: Option<String>,

        /// Comma-separated instance ids (default: the whole catalog)
        #[arg(long)]
        ids: Option<String>,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 4,
        Error::Invalid(_)
        | Error::UnknownGroup(_)
        | Error::UncrossableGroup { .. }
        | Error::TooFewGroups(_)
        | Error::NoObservedValues(_)
        | Error::IncompatibleKernel { .. }
        | Error::MissingTarget(_)
        | Error::NoMeasuredAttributes => 5,
        Error::UnknownInstance(_) => 6,
        Error::EmptyScores
        | Error::NegativeNash(_)
        | Error::LengthMismatch(..)
        | Error::UndefinedInclusion(_)
        | Error::UndefinedAttribute { .. } => 8,
        Error::Unpopulated(_) => 9,
        Error::EmptySet | Error::KTooLarge { .. } | Error::KZero | Error::CapExceeded { .. } => 2,
    }
}

fn violations_text(vs: &[Violation]) -> String {
    vs.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n")
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = match &e {
            Error::Invalid(vs) => format!("{e}\n{}", violations_text(vs)),
            _ => e.to_string(),
        };
        Failure::new(code_for(&e), message)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| Failure::new(3, format!("{e:#}")))
}

fn load(inputs: &Inputs) -> Result<(Config, Scenario), Failure> {
    let config = parse_config(&read(&inputs.config)?)?;
    let catalog = parse_catalog(&read(&inputs.catalog)?)?;
    let scenario = config.scenario(catalog);
    Ok((config, scenario))
}

fn emit(format: Format, text: String, machine: String) {
    match format {
        Format::Text => print!("{text}"),
        Format::Machine => print!("{machine}"),
    }
}

fn with_mechanism(inputs: &Inputs, mechanism: Option<Mechanism>) -> Result<Scenario, Failure> {
    let (mut config, scenario) = load(inputs)?;
    Ok(match mechanism {
        Some(m) => {
            config.set_mechanism(m);
            config.scenario(scenario.catalog)
        }
        None => scenario,
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate { inputs } => {
            let violations = match load(&inputs) {
                Ok((_, scenario)) => scenario.validate(),
                Err(f) if f.code == 5 || f.code == 4 => {
                    eprintln!("{}", f.message);
                    return Ok(f.code);
                }
                Err(f) => return Err(f),
            };
            let report = ValidationReport::new(violations);
            emit(inputs.format, report.render_text(), report.to_machine());
            Ok(if report.ok { 0 } else { 5 })
        }
        Command::Score {
            inputs,
            target,
            mechanism,
        } => {
            let scenario = with_mechanism(&inputs, mechanism)?;
            let report = score_report(&scenario, &Target::parse(&target))?;
            emit(inputs.format, report.render_text(), report.to_machine());
            Ok(match report.status {
                Status::Ok => 0,
                Status::Undefined => 8,
            })
        }
        Command::Select {
            inputs,
            k,
            mechanism,
            method,
            seed,
        } => {
            let mut scenario = with_mechanism(&inputs, mechanism)?;
            if let Some(seed) = seed {
                scenario.settings.seed = seed;
            }
            let method = match method {
                MethodArg::Auto => None,
                MethodArg::Exhaustive => Some(Method::Exhaustive),
                MethodArg::Greedy => Some(Method::GreedySwap),
            };
            let report = selection_report(&scenario, k, method)?;
            emit(inputs.format, report.render_text(), report.to_machine());
            Ok(if report.result.feasible { 0 } else { 7 })
        }
        Command::Homogeneity {
            inputs,
            group,
            restrict,
            ids,
        } => {
            let (_, scenario) = load(&inputs)?;
            let restrict = restrict
                .as_deref()
                .map(|r| AttributeRef::parse(r, Some(&scenario.schema)))
                .transpose()?;
            let ids = ids.map(|s| match Target::parse(&s) {
                Target::Ids(ids) => ids,
                Target::Each => Vec::new(),
            });
            let ids = ids.filter(|v| !v.is_empty());
            let report = homogeneity_report(&scenario, &group, restrict.as_ref(), ids.as_deref())?;
            emit(inputs.format, report.render_text(), report.to_machine());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
