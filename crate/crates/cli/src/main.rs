use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use partavoid::SetPartition;
use partavoid_cli::{
    cmd_bounds, cmd_check, cmd_conjectures, cmd_count, cmd_dacp, cmd_permeability, cmd_uniform,
    CliError, DacpDirection, Outcome, OutputFormat, PatternSet, ScanConfig, CACHE_ENV,
    DEFAULT_ENUM_CEILING, DEFAULT_MAX_ALL_K, DEFAULT_ORACLE_CEILING,
};

/// Pattern avoidance in set partitions.
#[derive(Parser)]
#[command(name = "partavoid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count partitions of [n] avoiding each pattern.
    Count(ScanArgs),
    /// Test whether HOST contains PATTERN and print the smallest witness.
    Check {
        host: String,
        pattern: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Probe the growth-rate conjectures over a range of n.
    Conjectures(ScanArgs),
    /// Compare exact counts of layered patterns with the closed-form bounds.
    Bounds(ScanArgs),
    /// Convert between partitions and their graphs.
    Dacp {
        #[command(subcommand)]
        direction: DacpCommand,
        /// Convert back and check that the input is recovered.
        #[arg(long)]
        roundtrip: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Permeability of each pattern with a witness set of cuts.
    Permeability {
        #[arg(required = true)]
        patterns: Vec<String>,
        /// Cross-check the greedy value against an exhaustive search.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Stream the uniform partitions of [n] with t sections.
    Uniform {
        n: usize,
        t: usize,
        /// Print every member instead of a summary.
        #[arg(long)]
        list: bool,
        /// Check avoidance of this pattern (repeatable).
        #[arg(long = "pattern")]
        patterns: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum DacpCommand {
    /// Partition in slash notation to graph JSON.
    ToGraph { partition: String },
    /// Graph JSON (inline or via --input) to partition.
    FromGraph {
        json: Option<String>,
        #[arg(long, conflicts_with = "json")]
        input: Option<PathBuf>,
    },
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// Pattern in slash notation (repeatable).
    #[arg(long = "pattern", required_unless_present = "all_k")]
    patterns: Vec<String>,
    /// Use every partition of [k] as a pattern.
    #[arg(long, conflicts_with = "patterns")]
    all_k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    n_from: usize,
    #[arg(long)]
    n_to: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Count cache (JSON lines).
    #[arg(long, env = CACHE_ENV)]
    cache: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
    /// Count with the brute-force oracle.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = DEFAULT_ENUM_CEILING)]
    enum_ceiling: usize,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CEILING)]
    oracle_ceiling: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ALL_K)]
    max_all_k: usize,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_all(texts: &[String]) -> Result<Vec<SetPartition>, CliError> {
    texts.iter().map(|s| s.parse().map_err(CliError::from)).collect()
}

impl ScanArgs {
    fn into_config(self) -> Result<ScanConfig, CliError> {
        let patterns = match self.all_k {
            Some(k) => PatternSet::AllOfSize(k),
            None => PatternSet::Explicit(parse_all(&self.patterns)?),
        };
        let mut config = ScanConfig::new(patterns, self.n_from, self.n_to);
        config.workers = self.workers;
        config.cache = if self.no_cache { None } else { self.cache };
        config.force_oracle = self.oracle;
        config.enum_ceiling = self.enum_ceiling;
        config.oracle_ceiling = self.oracle_ceiling;
        config.max_all_k = self.max_all_k;
        config.format = self.output.format;
        config.out = self.output.out;
        config.validate()?;
        Ok(config)
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Count(args) => cmd_count(&args.into_config()?),
        Command::Check { host, pattern, output } => {
            cmd_check(&host, &pattern, output.format, output.out.as_deref())
        }
        Command::Conjectures(args) => {
            let (outcome, report) = cmd_conjectures(&args.into_config()?)?;
            for v in &report.verdicts {
                if let Some((tau, n)) = &v.counterexample {
                    eprintln!("{}: counterexample {tau} at n={n}", v.id);
                }
            }
            Ok(outcome)
        }
        Command::Bounds(args) => cmd_bounds(&args.into_config()?),
        Command::Dacp { direction, roundtrip, out } => {
            let direction = match direction {
                DacpCommand::ToGraph { partition } => DacpDirection::ToGraph(partition),
                DacpCommand::FromGraph { json: Some(json), .. } => DacpDirection::FromGraph(json),
                DacpCommand::FromGraph { input: Some(path), .. } => {
                    DacpDirection::FromGraph(std::fs::read_to_string(path)?)
                }
                DacpCommand::FromGraph { .. } => {
                    return Err(CliError::Invalid("give graph JSON or --input".into()))
                }
            };
            cmd_dacp(&direction, roundtrip, out.as_deref())
        }
        Command::Permeability { patterns, oracle, output } => {
            cmd_permeability(&parse_all(&patterns)?, oracle, output.format, output.out.as_deref())
        }
        Command::Uniform { n, t, list, patterns, output } => {
            cmd_uniform(n, t, list, &parse_all(&patterns)?, output.format, output.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors count as invalid input, not assertion failures
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for note in &outcome.notes {
                eprintln!("{note}");
            }
            for finding in &outcome.findings {
                eprintln!("FAIL: {finding}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
