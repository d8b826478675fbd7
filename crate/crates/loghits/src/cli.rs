//! Command implementations behind the `loghits` binary, plus the scaling
//! benchmark. Each command writes machine output to files only and returns
//! a summary for the caller to print on the diagnostic stream.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};

use crate::charting::{self, ChartKind, ChartSpec, Series};
use crate::hitcount::{run_hitcount, FieldTag, HitcountOptions};
use crate::logmodel::{self, GeneratorConfig, PreprocessReport};
use crate::mrengine;
use crate::piglite;

/// Removes `dir` if this call created it; used to avoid leaving partial
/// output directories behind on failure.
fn cleanup_new_dir<T>(dir: &Path, result: Result<T>) -> Result<T> {
    if result.is_err() {
        let _ = fs::remove_dir_all(dir);
    }
    result
}

/// Preprocess a raw log: drop noise and malformed lines, write the kept
/// records in canonical form.
pub fn cmd_preprocess(
    input: &Path,
    output: &Path,
    noise_suffixes: &[&str],
) -> Result<PreprocessReport> {
    let file =
        File::open(input).with_context(|| format!("cannot open input {}", input.display()))?;
    let (records, report) = logmodel::preprocess(BufReader::new(file), noise_suffixes)
        .with_context(|| format!("failed reading {}", input.display()))?;
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    let mut writer = BufWriter::new(
        File::create(output).with_context(|| format!("cannot write {}", output.display()))?,
    );
    for record in &records {
        writeln!(writer, "{}", logmodel::format_record(record))?;
    }
    writer.flush()?;
    Ok(report)
}

/// Generate a synthetic log with the default catalogs.
pub fn cmd_generate(records: usize, seed: u64, output: &Path) -> Result<()> {
    let config = GeneratorConfig::new(records, seed);
    let generated = logmodel::generate(&config)?;
    if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    let mut writer = BufWriter::new(
        File::create(output).with_context(|| format!("cannot write {}", output.display()))?,
    );
    for record in &generated {
        writeln!(writer, "{}", logmodel::format_record(record))?;
    }
    writer.flush()?;
    Ok(())
}

/// Split a log into per-node files under `out_root/node-<i>/`.
pub fn cmd_split(input: &Path, nodes: usize, out_root: &Path) -> Result<Vec<PathBuf>> {
    let existed = out_root.exists();
    let result = mrengine::distribute(input, nodes, out_root)
        .with_context(|| format!("cannot distribute {}", input.display()));
    if existed {
        result
    } else {
        cleanup_new_dir(out_root, result)
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub part_files: Vec<PathBuf>,
    pub records_processed: u64,
    pub skipped: u64,
    pub wall_time: Duration,
}

/// Run the hit-count job over one or more preprocessed logs.
pub fn cmd_run(
    inputs: &[PathBuf],
    tags: &[FieldTag],
    workers: usize,
    reduce_partitions: usize,
    output_dir: &Path,
) -> Result<RunSummary> {
    let existed = output_dir.exists();
    let mut options = HitcountOptions::new(output_dir);
    options.num_workers = workers;
    options.num_reduce_partitions = reduce_partitions;
    let result = run_hitcount(inputs, tags, &options).context("hit-count job failed");
    let result = if existed {
        result
    } else {
        cleanup_new_dir(output_dir, result)
    }?;
    Ok(RunSummary {
        part_files: result.job.output_files,
        records_processed: result.job.records_processed,
        skipped: result.skipped,
        wall_time: result.job.wall_time,
    })
}

/// Execute a script file; returns the files its STORE statements wrote.
pub fn cmd_pig(script_path: &Path, working_dir: &Path) -> Result<Vec<PathBuf>> {
    let source = fs::read_to_string(script_path)
        .with_context(|| format!("cannot read script {}", script_path.display()))?;
    let outcome = piglite::run_script(&source, working_dir)
        .with_context(|| format!("script {} failed", script_path.display()))?;
    Ok(outcome.stored)
}

/// Collects `(key, count)` rows from a part file, a MapReduce output
/// directory, or a stored relation directory.
pub fn read_count_rows(input: &Path) -> Result<Vec<(String, i64)>> {
    let files: Vec<PathBuf> = if input.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(input)
            .with_context(|| format!("cannot read {}", input.display()))?
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .map(|entry| entry.path())
            .filter(|p| {
                p.is_file()
                    && p.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("part-"))
            })
            .collect();
        files.sort();
        if files.is_empty() {
            bail!("no part-* files under {}", input.display());
        }
        files
    } else {
        vec![input.to_path_buf()]
    };

    let mut rows = Vec::new();
    for file in files {
        let text = fs::read_to_string(&file)
            .with_context(|| format!("cannot read {}", file.display()))?;
        for (number, line) in text.lines().enumerate() {
            let (key, value) = line.split_once('\t').with_context(|| {
                format!("{}:{}: expected key<TAB>count", file.display(), number + 1)
            })?;
            let count: i64 = value.parse().with_context(|| {
                format!("{}:{}: '{value}' is not a count", file.display(), number + 1)
            })?;
            rows.push((key.to_string(), count));
        }
    }
    Ok(rows)
}

/// Chart the counts of one tag from part files or a stored relation.
pub fn cmd_chart(input: &Path, tag: &str, kind: ChartKind, out_svg: &Path) -> Result<()> {
    let rows = read_count_rows(input)?;
    let tag_name = FieldTag::parse_name(tag)
        .map(FieldTag::name)
        .map(str::to_string)
        .unwrap_or_else(|| tag.to_string());
    let series = charting::series_from_counts(&rows, &tag_name)?;
    let svg = charting::render(&ChartSpec::new(kind, vec![series]))?;
    if let Some(parent) = out_svg.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(out_svg, svg).with_context(|| format!("cannot write {}", out_svg.display()))?;
    Ok(())
}

/// One benchmark cell per (record count, worker count) pair.
#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub record_counts: Vec<usize>,
    pub worker_counts: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
}

impl BenchPlan {
    fn validate(&self) -> Result<()> {
        if self.record_counts.is_empty() || self.record_counts.iter().any(|&n| n < 1) {
            bail!("record counts must be non-empty and >= 1");
        }
        if self.worker_counts.is_empty() || self.worker_counts.iter().any(|&w| w < 1) {
            bail!("worker counts must be non-empty and >= 1");
        }
        if self.repetitions < 1 {
            bail!("repetitions must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub records: usize,
    pub workers: usize,
    pub median_seconds: f64,
    pub all_seconds: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
}

impl BenchResult {
    pub fn median_for(&self, records: usize, workers: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.records == records && r.workers == workers)
            .map(|r| r.median_seconds)
    }
}

fn median(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite timings"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Generate seeded logs of each size, run the hit-count job at each worker
/// count, and record the median wall time over the repetitions.
///
/// Writes a `records,workers,seconds` CSV and a line chart with one series
/// per worker count.
pub fn cmd_bench(plan: &BenchPlan, out_csv: &Path, out_svg: &Path) -> Result<BenchResult> {
    plan.validate()?;
    let scratch = tempfile::tempdir().context("cannot create scratch directory")?;

    let mut result = BenchResult::default();
    for &records in &plan.record_counts {
        let log_path = scratch.path().join(format!("bench-{records}.log"));
        cmd_generate(records, plan.seed, &log_path)?;
        for &workers in &plan.worker_counts {
            let mut samples = Vec::with_capacity(plan.repetitions);
            for rep in 0..plan.repetitions {
                let out_dir = scratch.path().join(format!("out-{records}-{workers}-{rep}"));
                let mut options = HitcountOptions::new(&out_dir);
                options.num_workers = workers;
                let outcome = run_hitcount(
                    std::slice::from_ref(&log_path),
                    &FieldTag::ALL,
                    &options,
                )
                .with_context(|| format!("bench cell n={records} w={workers} failed"))?;
                samples.push(outcome.job.wall_time.as_secs_f64());
                fs::remove_dir_all(&out_dir).ok();
            }
            result.rows.push(BenchRow {
                records,
                workers,
                median_seconds: median(&samples),
                all_seconds: samples,
            });
        }
    }

    let mut csv = String::from("records,workers,seconds\n");
    for row in &result.rows {
        csv.push_str(&format!(
            "{},{},{:.3}\n",
            row.records, row.workers, row.median_seconds
        ));
    }
    if let Some(parent) = out_csv.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(out_csv, csv).with_context(|| format!("cannot write {}", out_csv.display()))?;

    let mut series = Vec::new();
    for &workers in &plan.worker_counts {
        let points: Vec<(String, f64)> = plan
            .record_counts
            .iter()
            .filter_map(|&records| {
                result
                    .median_for(records, workers)
                    .map(|median| (records.to_string(), median))
            })
            .collect();
        series.push(Series::new(format!("{workers} workers"), points));
    }
    let svg = charting::render_line(&ChartSpec::new(ChartKind::Line, series))?;
    if let Some(parent) = out_svg.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(out_svg, svg).with_context(|| format!("cannot write {}", out_svg.display()))?;
    Ok(result)
}
