//! `fqdist`: batch runner for the distance-statistics experiments.
//!
//! Exit codes: 0 when every check passes, 2 when an identity or bound is
//! violated, 1 for usage, parse and I/O errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fq_distance::experiments::{
    cmd_analyze, cmd_coverage, cmd_gauss, cmd_search_square, cmd_verify, CoverageConfig,
    GaussConfig, Report, SearchConfig, SearchStrategy, VerifyConfig,
};
use fq_distance::factory::{generate, GenSpec};
use fq_distance::io::{read_point_set, write_point_set};
use fq_distance::make_field;

#[derive(Parser, Debug)]
#[command(
    name = "fqdist",
    version,
    about = "Square and zero distance statistics over finite fields"
)]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the flat summary table as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct FieldArgs {
    /// Characteristic (odd prime).
    #[arg(long)]
    p: u64,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    ell: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Strategy {
    Greedy,
    Exhaustive,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gauss sum G_1 directly and in closed form, with the sign table.
    Gauss {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Random and structured sets through every exact and numeric check.
    Verify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 200)]
        trials: u32,
        #[arg(long)]
        min_size: Option<u64>,
        #[arg(long)]
        max_size: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip the structured sets.
        #[arg(long)]
        no_structured: bool,
        /// Skip the closed-form transform checks.
        #[arg(long)]
        no_transforms: bool,
    },
    /// Full analysis of one point-set file.
    Analyze { file: PathBuf },
    /// Search for a large square-distance set.
    SearchSquare {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = Strategy::Greedy)]
        strategy: Strategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        restarts: u32,
        /// Write the best set found to this file.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Fraction of F_q realized as distances by seeded random sets.
    Coverage {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        size: u64,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3, 4, 5])]
        seeds: Vec<u64>,
    },
    /// Write a point-set file from a JSON generator spec,
    /// e.g. '{"kind":"random","size":10,"seed":42}'.
    Generate {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        spec: String,
        #[arg(long)]
        to: PathBuf,
    },
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<bool> {
    let json = serde_json::to_string_pretty(report)?;
    write_or_print(cli.out.as_deref(), &json)?;
    if let Some(csv) = &cli.csv {
        std::fs::write(csv, report.to_csv())
            .with_context(|| format!("writing {}", csv.display()))?;
    }
    for v in &report.violations {
        eprintln!("violation [{}] {}: {}", v.check, v.subject, v.detail);
    }
    Ok(report.passed())
}

fn run(cli: &Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match &cli.command {
        Command::Gauss { field } => emit(
            cli,
            &cmd_gauss(&GaussConfig {
                p: field.p,
                ell: field.ell,
            })?,
        ),
        Command::Verify {
            field,
            d,
            trials,
            min_size,
            max_size,
            seed,
            no_structured,
            no_transforms,
        } => {
            let cfg = VerifyConfig {
                p: field.p,
                ell: field.ell,
                d: *d,
                trials: *trials,
                min_size: *min_size,
                max_size: *max_size,
                seed: *seed,
                structured: !no_structured,
                transforms: !no_transforms,
            };
            emit(cli, &cmd_verify(&cfg)?)
        }
        Command::Analyze { file } => {
            let set =
                read_point_set(file).with_context(|| format!("reading {}", file.display()))?;
            emit(cli, &cmd_analyze(&set, &file.display().to_string())?)
        }
        Command::SearchSquare {
            field,
            d,
            strategy,
            seed,
            restarts,
            witness,
        } => {
            let cfg = SearchConfig {
                p: field.p,
                ell: field.ell,
                d: *d,
                strategy: match strategy {
                    Strategy::Greedy => SearchStrategy::Greedy,
                    Strategy::Exhaustive => SearchStrategy::Exhaustive,
                },
                seed: *seed,
                restarts: *restarts,
            };
            let (report, set) = cmd_search_square(&cfg)?;
            if let Some(path) = witness {
                write_point_set(&set, path)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            emit(cli, &report)
        }
        Command::Coverage {
            field,
            d,
            size,
            seeds,
        } => {
            let cfg = CoverageConfig {
                p: field.p,
                ell: field.ell,
                d: *d,
                size: *size,
                seeds: seeds.clone(),
            };
            emit(cli, &cmd_coverage(&cfg)?)
        }
        Command::Generate { field, d, spec, to } => {
            let spec: GenSpec = serde_json::from_str(spec).context("parsing --spec")?;
            let ctx = make_field(field.p, field.ell)?;
            let set = generate(&ctx, *d, &spec)?;
            write_point_set(&set, to).with_context(|| format!("writing {}", to.display()))?;
            eprintln!("wrote {} points to {}", set.len(), to.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(status(run(&cli)))
}

fn status(outcome: Result<bool>) -> u8 {
    match outcome {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
