use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};

use loghits::charting::ChartKind;
use loghits::cli::{self, BenchPlan};
use loghits::hitcount::FieldTag;
use loghits::logmodel::DEFAULT_NOISE_SUFFIXES;

/// Web log hit-count analytics: preprocess '#'-delimited logs, run a
/// parallel MapReduce hit-count job, aggregate part files with a small
/// Pig Latin interpreter, and render SVG charts.
#[derive(Parser)]
#[command(name = "loghits", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Bar,
    Pie,
    Line,
}

impl From<KindArg> for ChartKind {
    fn from(kind: KindArg) -> ChartKind {
        match kind {
            KindArg::Bar => ChartKind::Bar,
            KindArg::Pie => ChartKind::Pie,
            KindArg::Line => ChartKind::Line,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Drop noise and malformed lines from a raw log.
    Preprocess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Override the default noise suffix list (repeatable).
        #[arg(long = "noise-suffix")]
        noise_suffixes: Vec<String>,
    },
    /// Generate a reproducible synthetic log.
    Generate {
        #[arg(long)]
        records: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Split a log into per-node files on record boundaries.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        nodes: usize,
        /// Directory that receives node-0/, node-1/, ...
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the MapReduce hit-count job.
    Run {
        /// Input log file(s); repeat for multiple node files.
        #[arg(long, required = true)]
        input: Vec<PathBuf>,
        /// Comma-separated field tags (page,city,state,country,age,quarter,date).
        /// Defaults to all.
        #[arg(long, value_delimiter = ',')]
        tags: Vec<String>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 1)]
        reduce_partitions: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Execute a Pig Latin subset script.
    Pig {
        #[arg(long)]
        script: PathBuf,
        /// Directory relative paths in the script resolve against.
        #[arg(long, default_value = ".")]
        workdir: PathBuf,
    },
    /// Render hit counts as an SVG chart.
    Chart {
        /// A part file, job output directory, or stored relation directory.
        #[arg(long)]
        input: PathBuf,
        /// Field tag to chart, e.g. `city` or `HitsCity`.
        #[arg(long)]
        tag: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        output: PathBuf,
    },
    /// Measure job wall time over record and worker counts.
    Bench {
        /// Comma-separated record counts.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "20000,40000,60000,80000,100000"
        )]
        records: Vec<usize>,
        /// Comma-separated worker counts (one line-chart series each).
        #[arg(long, value_delimiter = ',', default_value = "1,4")]
        workers: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
}

fn parse_tags(tags: &[String]) -> Result<Vec<FieldTag>> {
    if tags.is_empty() {
        return Ok(FieldTag::ALL.to_vec());
    }
    let mut parsed = Vec::new();
    for tag in tags {
        match FieldTag::parse_name(tag) {
            Some(tag) => parsed.push(tag),
            None => bail!(
                "unknown tag '{tag}' (expected one of page, city, state, country, age, quarter, date)"
            ),
        }
    }
    Ok(parsed)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Preprocess {
            input,
            output,
            noise_suffixes,
        } => {
            let overrides: Vec<&str> = noise_suffixes.iter().map(String::as_str).collect();
            let suffixes: &[&str] = if overrides.is_empty() {
                DEFAULT_NOISE_SUFFIXES
            } else {
                &overrides
            };
            let report = cli::cmd_preprocess(&input, &output, suffixes)?;
            eprintln!("{report}");
            eprintln!("wrote {}", output.display());
        }
        Command::Generate {
            records,
            seed,
            output,
        } => {
            cli::cmd_generate(records, seed, &output)?;
            eprintln!("wrote {records} records to {}", output.display());
        }
        Command::Split {
            input,
            nodes,
            output,
        } => {
            let files = cli::cmd_split(&input, nodes, &output)?;
            for file in &files {
                eprintln!("wrote {}", file.display());
            }
        }
        Command::Run {
            input,
            tags,
            workers,
            reduce_partitions,
            output,
        } => {
            let tags = parse_tags(&tags)?;
            let summary = cli::cmd_run(&input, &tags, workers, reduce_partitions, &output)?;
            eprintln!(
                "processed {} records ({} skipped) in {:.3}s",
                summary.records_processed,
                summary.skipped,
                summary.wall_time.as_secs_f64()
            );
            for file in &summary.part_files {
                eprintln!("wrote {}", file.display());
            }
        }
        Command::Pig { script, workdir } => {
            let stored = cli::cmd_pig(&script, &workdir)?;
            for file in &stored {
                eprintln!("wrote {}", file.display());
            }
        }
        Command::Chart {
            input,
            tag,
            kind,
            output,
        } => {
            cli::cmd_chart(&input, &tag, kind.into(), &output)?;
            eprintln!("wrote {}", output.display());
        }
        Command::Bench {
            records,
            workers,
            reps,
            seed,
            csv,
            svg,
        } => {
            let plan = BenchPlan {
                record_counts: records,
                worker_counts: workers,
                repetitions: reps,
                seed,
            };
            let result = cli::cmd_bench(&plan, &csv, &svg)?;
            for row in &result.rows {
                eprintln!(
                    "n={} workers={} median={:.3}s",
                    row.records, row.workers, row.median_seconds
                );
            }
            eprintln!("wrote {} and {}", csv.display(), svg.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}
