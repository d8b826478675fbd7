//! Generic in-process MapReduce runtime.
//!
//! A job reads one or more text files, cuts them into record-aligned
//! [`InputSplit`]s, runs the map function over every line with up to
//! `num_workers` threads, routes emitted pairs to reduce partitions by an
//! FNV-1a hash of the key, groups and sorts within each partition, runs the
//! reduce function per key, and writes one `part-NNNNN` file per partition
//! (`key<TAB>value<LF>`, keys ascending).
//!
//! Output bytes depend only on the input and the partition count, never on
//! worker count or scheduling: per-split map output is merged in split
//! order and every partition is sorted before reduction.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

/// A contiguous byte range of one input file, aligned to line boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSplit {
    pub file_path: PathBuf,
    pub byte_offset: u64,
    pub byte_length: u64,
    pub split_index: usize,
}

/// A text key with a text value; the currency of map output and reduce
/// input. Keys are non-empty and neither side contains a tab or newline.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KeyValuePair {
    key: String,
    value: String,
}

impl KeyValuePair {
    pub fn new(key: impl Into<String>, value: impl Into<String>) -> Result<Self, TaskError> {
        let key = key.into();
        let value = value.into();
        if key.is_empty() {
            return Err(TaskError::new("key must be non-empty"));
        }
        for (name, text) in [("key", &key), ("value", &value)] {
            if text.contains('\t') || text.contains('\n') {
                return Err(TaskError::new(format!(
                    "{name} {text:?} contains a tab or newline"
                )));
            }
        }
        Ok(KeyValuePair { key, value })
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn value(&self) -> &str {
        &self.value
    }
}

/// Error raised inside a user-supplied map or reduce function.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct TaskError(String);

impl TaskError {
    pub fn new(message: impl Into<String>) -> Self {
        TaskError(message.into())
    }
}

/// Append-only sink handed to map and reduce functions; preserves emission
/// order within one invocation.
#[derive(Debug, Default)]
pub struct Collector {
    pairs: Vec<KeyValuePair>,
}

impl Collector {
    pub fn new() -> Self {
        Collector::default()
    }

    pub fn emit(&mut self, key: &str, value: &str) -> Result<(), TaskError> {
        self.pairs.push(KeyValuePair::new(key, value)?);
        Ok(())
    }

    pub fn pairs(&self) -> &[KeyValuePair] {
        &self.pairs
    }

    pub fn into_pairs(self) -> Vec<KeyValuePair> {
        self.pairs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Map,
    Shuffle,
    Reduce,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Map => "map",
            Phase::Shuffle => "shuffle",
            Phase::Reduce => "reduce",
        })
    }
}

/// A progress heartbeat; fractions are monotone non-decreasing per phase.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgressReport {
    pub phase: Phase,
    pub fraction_complete: f64,
    pub records_processed: u64,
}

pub type ProgressFn = Arc<dyn Fn(&ProgressReport) + Send + Sync>;

/// Collects progress reports and forwards them to an optional callback.
/// Shared across worker threads; reports are serialized so fractions stay
/// monotone per phase.
pub struct ProgressSink {
    reports: Mutex<Vec<ProgressReport>>,
    callback: Option<ProgressFn>,
}

impl ProgressSink {
    pub fn new(callback: Option<ProgressFn>) -> Self {
        ProgressSink {
            reports: Mutex::new(Vec::new()),
            callback,
        }
    }

    fn report(&self, phase: Phase, fraction_complete: f64, records_processed: u64) {
        let report = ProgressReport {
            phase,
            fraction_complete,
            records_processed,
        };
        if let Some(callback) = &self.callback {
            callback(&report);
        }
        self.reports.lock().unwrap().push(report);
    }

    pub fn into_reports(self) -> Vec<ProgressReport> {
        self.reports.into_inner().unwrap()
    }
}

/// Tracks per-phase completion so that progress fractions are emitted in
/// non-decreasing order even when tasks finish concurrently.
struct PhaseProgress<'a> {
    sink: &'a ProgressSink,
    phase: Phase,
    total_tasks: usize,
    state: Mutex<(usize, u64)>,
}

impl<'a> PhaseProgress<'a> {
    fn new(sink: &'a ProgressSink, phase: Phase, total_tasks: usize) -> Self {
        PhaseProgress {
            sink,
            phase,
            total_tasks,
            state: Mutex::new((0, 0)),
        }
    }

    fn task_done(&self, records: u64) {
        let mut state = self.state.lock().unwrap();
        state.0 += 1;
        state.1 += records;
        let fraction = state.0 as f64 / self.total_tasks.max(1) as f64;
        self.sink.report(self.phase, fraction, state.1);
    }
}

pub type MapFn = Arc<dyn Fn(&str, &mut Collector) -> Result<(), TaskError> + Send + Sync>;
pub type ReduceFn =
    Arc<dyn Fn(&str, &[String], &mut Collector) -> Result<(), TaskError> + Send + Sync>;

#[derive(Clone)]
pub struct JobConfig {
    pub map_fn: MapFn,
    pub reduce_fn: ReduceFn,
    pub num_workers: usize,
    pub num_reduce_partitions: usize,
    pub output_dir: PathBuf,
    pub progress: Option<ProgressFn>,
}

impl JobConfig {
    fn validate(&self) -> Result<(), EngineError> {
        if self.num_workers < 1 {
            return Err(EngineError::InvalidConfig("num_workers must be >= 1".into()));
        }
        if self.num_reduce_partitions < 1 {
            return Err(EngineError::InvalidConfig(
                "num_reduce_partitions must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct JobResult {
    pub output_files: Vec<PathBuf>,
    pub wall_time: Duration,
    pub records_processed: u64,
    pub progress: Vec<ProgressReport>,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("input file is empty: {0}")]
    EmptyFile(PathBuf),
    #[error("invalid job config: {0}")]
    InvalidConfig(String),
    #[error("I/O error at {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("split {split_index} of {path} is not valid UTF-8")]
    InvalidUtf8 { path: PathBuf, split_index: usize },
    #[error("map function failed at split {split_index}, line {line_number}")]
    MapFailed {
        split_index: usize,
        line_number: usize,
        #[source]
        source: TaskError,
    },
    #[error("reduce function failed for key '{key}'")]
    ReduceFailed {
        key: String,
        #[source]
        source: TaskError,
    },
    #[error("{phase} phase failed")]
    PhaseFailed {
        phase: Phase,
        #[source]
        source: Box<EngineError>,
    },
}

fn io_err(path: &Path, source: io::Error) -> EngineError {
    EngineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

const FNV_OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET_BASIS;
    for &byte in bytes {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Routes a key to a reduce partition: FNV-1a over the key's UTF-8 bytes,
/// modulo the partition count. Pure, so any two processes agree.
pub fn partition(key: &str, num_partitions: usize) -> usize {
    debug_assert!(num_partitions >= 1);
    (fnv1a(key.as_bytes()) % num_partitions as u64) as usize
}

/// Cuts a file into splits of roughly `target_split_bytes`, extending each
/// boundary forward to the next LF so no line straddles two splits.
pub fn compute_splits(
    file_path: &Path,
    target_split_bytes: u64,
) -> Result<Vec<InputSplit>, EngineError> {
    if target_split_bytes < 1 {
        return Err(EngineError::InvalidConfig(
            "target_split_bytes must be >= 1".into(),
        ));
    }
    let bytes = fs::read(file_path).map_err(|e| io_err(file_path, e))?;
    if bytes.is_empty() {
        return Err(EngineError::EmptyFile(file_path.to_path_buf()));
    }
    let len = bytes.len() as u64;
    let mut splits = Vec::new();
    let mut start = 0u64;
    while start < len {
        let tentative = (start + target_split_bytes).min(len);
        let end = if tentative == len || bytes[(tentative - 1) as usize] == b'\n' {
            tentative
        } else {
            match bytes[tentative as usize..].iter().position(|&b| b == b'\n') {
                Some(offset) => tentative + offset as u64 + 1,
                None => len,
            }
        };
        splits.push(InputSplit {
            file_path: file_path.to_path_buf(),
            byte_offset: start,
            byte_length: end - start,
            split_index: splits.len(),
        });
        start = end;
    }
    Ok(splits)
}

/// Byte offsets at which each line of `bytes` starts.
fn line_starts(bytes: &[u8]) -> Vec<usize> {
    let mut starts = Vec::new();
    if bytes.is_empty() {
        return starts;
    }
    starts.push(0);
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'\n' && i + 1 < bytes.len() {
            starts.push(i + 1);
        }
    }
    starts
}

/// Copies the file into `node_count` per-node files with record counts
/// differing by at most one; concatenating them in node order reproduces
/// the input byte-for-byte.
///
/// Layout: `<out_root>/node-<i>/<basename>`.
pub fn distribute(
    file_path: &Path,
    node_count: usize,
    out_root: &Path,
) -> Result<Vec<PathBuf>, EngineError> {
    if node_count < 1 {
        return Err(EngineError::InvalidConfig("node_count must be >= 1".into()));
    }
    let bytes = fs::read(file_path).map_err(|e| io_err(file_path, e))?;
    if bytes.is_empty() {
        return Err(EngineError::EmptyFile(file_path.to_path_buf()));
    }
    let starts = line_starts(&bytes);
    let total_lines = starts.len();
    let base = total_lines / node_count;
    let extra = total_lines % node_count;
    let basename = file_path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| "input".into());

    let mut outputs = Vec::with_capacity(node_count);
    let mut next_line = 0usize;
    for node in 0..node_count {
        let count = base + usize::from(node < extra);
        let begin = starts.get(next_line).copied().unwrap_or(bytes.len());
        let end = starts
            .get(next_line + count)
            .copied()
            .unwrap_or(bytes.len());
        next_line += count;

        let dir = out_root.join(format!("node-{node}"));
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let out_path = dir.join(&basename);
        fs::write(&out_path, &bytes[begin..end]).map_err(|e| io_err(&out_path, e))?;
        outputs.push(out_path);
    }
    Ok(outputs)
}

/// Map output routed to reduce partitions, in deterministic (split, then
/// emission) order.
#[derive(Debug)]
pub struct IntermediateStore {
    partitions: Vec<Vec<KeyValuePair>>,
}

impl IntermediateStore {
    pub fn num_partitions(&self) -> usize {
        self.partitions.len()
    }

    pub fn partition_pairs(&self, index: usize) -> &[KeyValuePair] {
        &self.partitions[index]
    }

    pub fn total_pairs(&self) -> usize {
        self.partitions.iter().map(Vec::len).sum()
    }
}

/// Runs `task` over `items` on up to `num_workers` threads. Results come
/// back in item order; the first error cancels remaining work.
fn run_tasks<T, R, F>(items: &[T], num_workers: usize, task: F) -> Result<Vec<R>, EngineError>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R, EngineError> + Sync,
{
    let worker_count = num_workers.min(items.len()).max(1);
    let next = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    let first_error: Mutex<Option<EngineError>> = Mutex::new(None);

    thread::scope(|scope| {
        for _ in 0..worker_count {
            scope.spawn(|| loop {
                if failed.load(Ordering::Relaxed) {
                    break;
                }
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= items.len() {
                    break;
                }
                match task(index, &items[index]) {
                    Ok(result) => {
                        *slots[index].lock().unwrap() = Some(result);
                    }
                    Err(error) => {
                        let mut guard = first_error.lock().unwrap();
                        if guard.is_none() {
                            *guard = Some(error);
                        }
                        failed.store(true, Ordering::Relaxed);
                        break;
                    }
                }
            });
        }
    });

    if let Some(error) = first_error.into_inner().unwrap() {
        return Err(error);
    }
    Ok(slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("task completed"))
        .collect())
}

fn read_split(split: &InputSplit) -> Result<String, EngineError> {
    let mut file = File::open(&split.file_path).map_err(|e| io_err(&split.file_path, e))?;
    file.seek(SeekFrom::Start(split.byte_offset))
        .map_err(|e| io_err(&split.file_path, e))?;
    let mut buf = vec![0u8; split.byte_length as usize];
    file.read_exact(&mut buf)
        .map_err(|e| io_err(&split.file_path, e))?;
    String::from_utf8(buf).map_err(|_| EngineError::InvalidUtf8 {
        path: split.file_path.clone(),
        split_index: split.split_index,
    })
}

/// Lines of a split: LF-separated, with the empty tail after a trailing LF
/// dropped.
fn split_lines(text: &str) -> impl Iterator<Item = &str> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    body.split('\n')
}

/// Feeds every line of every split to `map_fn` and routes the emitted
/// pairs by [`partition`]. The result is independent of worker scheduling.
pub fn run_map_phase(
    splits: &[InputSplit],
    map_fn: &MapFn,
    num_workers: usize,
    num_partitions: usize,
    sink: &ProgressSink,
) -> Result<(IntermediateStore, u64), EngineError> {
    let progress = PhaseProgress::new(sink, Phase::Map, splits.len());

    let per_split = run_tasks(splits, num_workers, |_, split| {
        let text = read_split(split)?;
        let mut collector = Collector::new();
        let mut lines = 0u64;
        for (offset, line) in split_lines(&text).enumerate() {
            lines += 1;
            map_fn(line, &mut collector).map_err(|source| EngineError::MapFailed {
                split_index: split.split_index,
                line_number: offset + 1,
                source,
            })?;
        }
        progress.task_done(lines);
        Ok((collector.into_pairs(), lines))
    })?;

    let mut partitions = vec![Vec::new(); num_partitions];
    let mut records = 0u64;
    for (pairs, lines) in per_split {
        records += lines;
        for pair in pairs {
            partitions[partition(pair.key(), num_partitions)].push(pair);
        }
    }
    if splits.is_empty() {
        sink.report(Phase::Map, 1.0, 0);
    }
    Ok((IntermediateStore { partitions }, records))
}

/// Groups each partition by key, sorts keys and per-key values by bytes,
/// invokes `reduce_fn` once per key, and writes `part-NNNNN` files in key
/// order. Every partition produces a file, even when empty.
pub fn run_reduce_phase(
    store: IntermediateStore,
    reduce_fn: &ReduceFn,
    num_workers: usize,
    output_dir: &Path,
    sink: &ProgressSink,
) -> Result<Vec<PathBuf>, EngineError> {
    fs::create_dir_all(output_dir).map_err(|e| io_err(output_dir, e))?;
    let num_partitions = store.num_partitions();
    let shuffle_progress = PhaseProgress::new(sink, Phase::Shuffle, num_partitions);
    let reduce_progress = PhaseProgress::new(sink, Phase::Reduce, num_partitions);

    let partitions = store.partitions;
    let paths = run_tasks(&partitions, num_workers, |index, pairs| {
        let mut groups: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for pair in pairs {
            groups
                .entry(pair.key())
                .or_default()
                .push(pair.value().to_string());
        }
        for values in groups.values_mut() {
            values.sort();
        }
        shuffle_progress.task_done(pairs.len() as u64);

        let mut out = String::new();
        let group_count = groups.len() as u64;
        for (key, values) in &groups {
            let mut collector = Collector::new();
            reduce_fn(key, values, &mut collector).map_err(|source| {
                EngineError::ReduceFailed {
                    key: key.to_string(),
                    source,
                }
            })?;
            for pair in collector.pairs() {
                out.push_str(pair.key());
                out.push('\t');
                out.push_str(pair.value());
                out.push('\n');
            }
        }
        let path = output_dir.join(format!("part-{index:05}"));
        fs::write(&path, out).map_err(|e| io_err(&path, e))?;
        reduce_progress.task_done(group_count);
        Ok(path)
    })?;
    Ok(paths)
}

/// Runs split computation, the map phase, and the reduce phase end to end
/// over one or more input files.
///
/// Each file is cut into roughly `num_workers` splits. Outputs are
/// deterministic for a fixed input and config (wall time aside).
pub fn run_job(inputs: &[PathBuf], config: &JobConfig) -> Result<JobResult, EngineError> {
    config.validate()?;
    if inputs.is_empty() {
        return Err(EngineError::InvalidConfig("no input files".into()));
    }
    let start = Instant::now();
    let sink = ProgressSink::new(config.progress.clone());

    let annotate = |phase: Phase| {
        move |source: EngineError| EngineError::PhaseFailed {
            phase,
            source: Box::new(source),
        }
    };

    let mut splits = Vec::new();
    for input in inputs {
        let size = fs::metadata(input)
            .map_err(|e| io_err(input, e))
            .map_err(annotate(Phase::Map))?
            .len();
        let target = (size / config.num_workers as u64).max(1);
        for mut split in compute_splits(input, target).map_err(annotate(Phase::Map))? {
            split.split_index = splits.len();
            splits.push(split);
        }
    }

    let (store, records_processed) = run_map_phase(
        &splits,
        &config.map_fn,
        config.num_workers,
        config.num_reduce_partitions,
        &sink,
    )
    .map_err(annotate(Phase::Map))?;

    let output_files = run_reduce_phase(
        store,
        &config.reduce_fn,
        config.num_workers,
        &config.output_dir,
        &sink,
    )
    .map_err(annotate(Phase::Reduce))?;

    Ok(JobResult {
        output_files,
        wall_time: start.elapsed(),
        records_processed,
        progress: sink.into_reports(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;
    use tempfile::TempDir;

    fn write_file(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    fn identity_map() -> MapFn {
        Arc::new(|line, collector| collector.emit(line, line))
    }

    fn passthrough_reduce() -> ReduceFn {
        Arc::new(|key, values, collector| {
            for value in values {
                collector.emit(key, value)?;
            }
            Ok(())
        })
    }

    fn count_reduce() -> ReduceFn {
        Arc::new(|key, values, collector| collector.emit(key, &values.len().to_string()))
    }

    fn config(out: &Path, workers: usize, partitions: usize) -> JobConfig {
        JobConfig {
            map_fn: identity_map(),
            reduce_fn: passthrough_reduce(),
            num_workers: workers,
            num_reduce_partitions: partitions,
            output_dir: out.to_path_buf(),
            progress: None,
        }
    }

    #[test]
    fn fnv1a_reference_vectors() {
        // Published FNV-1a 64-bit test vectors.
        assert_eq!(fnv1a(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a(b"a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x8594_4171_f739_67e8);
    }

    #[test]
    fn partition_basics() {
        assert_eq!(partition("anything", 1), 0);
        assert_eq!(partition("key", 4), partition("key", 4));
        assert!(partition("key", 7) < 7);
    }

    #[test]
    fn partition_spreads_keys() {
        let mut counts = [0usize; 4];
        for i in 0..10_000 {
            counts[partition(&format!("key-{i}"), 4)] += 1;
        }
        for &count in &counts {
            assert!(count <= 4_000, "partition holds {count} of 10000 keys");
        }
        assert_eq!(counts.iter().sum::<usize>(), 10_000);
    }

    #[test]
    fn splits_cover_file_with_equal_lines() {
        let dir = TempDir::new().unwrap();
        // 10 lines of exactly 20 bytes each (19 chars + LF).
        let line = "abcdefghijklmnopqrs";
        assert_eq!(line.len(), 19);
        let contents: String = (0..10).map(|_| format!("{line}\n")).collect();
        let path = write_file(&dir, "equal.txt", &contents);

        let splits = compute_splits(&path, 80).unwrap();
        let line_counts: Vec<usize> = splits
            .iter()
            .map(|s| (s.byte_length / 20) as usize)
            .collect();
        assert_eq!(line_counts, vec![4, 4, 2]);

        // Ranges partition the file exactly.
        let mut offset = 0;
        for (i, split) in splits.iter().enumerate() {
            assert_eq!(split.byte_offset, offset);
            assert_eq!(split.split_index, i);
            offset += split.byte_length;
        }
        assert_eq!(offset, contents.len() as u64);
    }

    #[test]
    fn split_boundaries_extend_to_line_end() {
        let dir = TempDir::new().unwrap();
        let path = write_file(&dir, "uneven.txt", "short\na-much-longer-line\nx\n");
        let splits = compute_splits(&path, 4).unwrap();
        let bytes = fs::read(&path).unwrap();
        for split in &splits {
            let end = (split.byte_offset + split.byte_length) as usize;
            assert_eq!(bytes[end - 1], b'\n', "split must end after an LF");
        }
        let total: u64 = splits.iter().map(|s| s.byte_length).sum();
        assert_eq!(total, bytes.len() as u64);
    }

    #[test]
    fn single_split_when_target_exceeds_file() {
        let dir = TempDir::new().unwrap();
        let path = write_file(&dir, "small.txt", "a\nb\nc\n");
        let splits = compute_splits(&path, 1_000_000).unwrap();
        assert_eq!(splits.len(), 1);
        assert_eq!(splits[0].byte_offset, 0);
        assert_eq!(splits[0].byte_length, 6);
    }

    #[test]
    fn empty_file_is_rejected() {
        let dir = TempDir::new().unwrap();
        let path = write_file(&dir, "empty.txt", "");
        assert!(matches!(
            compute_splits(&path, 10),
            Err(EngineError::EmptyFile(_))
        ));
        assert!(matches!(
            distribute(&path, 2, dir.path()),
            Err(EngineError::EmptyFile(_))
        ));
    }

    #[test]
    fn distribute_near_equal_counts() {
        let dir = TempDir::new().unwrap();
        let contents: String = (0..18).map(|i| format!("line-{i:02}\n")).collect();
        let path = write_file(&dir, "input.log", &contents);
        let out_root = dir.path().join("nodes");

        let files = distribute(&path, 4, &out_root).unwrap();
        assert_eq!(files.len(), 4);
        let counts: Vec<usize> = files
            .iter()
            .map(|f| fs::read_to_string(f).unwrap().lines().count())
            .collect();
        assert_eq!(counts, vec![5, 5, 4, 4]);
        assert_eq!(files[0], out_root.join("node-0").join("input.log"));

        let mut reassembled = Vec::new();
        for file in &files {
            reassembled.extend(fs::read(file).unwrap());
        }
        assert_eq!(reassembled, contents.as_bytes());
    }

    #[test]
    fn distribute_single_node_copies_file() {
        let dir = TempDir::new().unwrap();
        let contents = "only\ntwo\n";
        let path = write_file(&dir, "input.log", contents);
        let files = distribute(&path, 1, &dir.path().join("out")).unwrap();
        assert_eq!(files.len(), 1);
        assert_eq!(fs::read_to_string(&files[0]).unwrap(), contents);
    }

    #[test]
    fn distribute_preserves_missing_trailing_newline() {
        let dir = TempDir::new().unwrap();
        let contents = "a\nb\nc"; // no trailing LF
        let path = write_file(&dir, "input.log", contents);
        let files = distribute(&path, 2, &dir.path().join("out")).unwrap();
        let mut reassembled = String::new();
        for file in &files {
            reassembled.push_str(&fs::read_to_string(file).unwrap());
        }
        assert_eq!(reassembled, contents);
    }

    #[test]
    fn map_phase_preserves_arrival_order() {
        let dir = TempDir::new().unwrap();
        let path = write_file(&dir, "in.txt", "one\ntwo\nthree\n");
        let splits = compute_splits(&path, 1_000).unwrap();
        let sink = ProgressSink::new(None);
        let (store, records) = run_map_phase(&splits, &identity_map(), 1, 1, &sink).unwrap();
        assert_eq!(records, 3);
        let keys: Vec<&str> = store.partition_pairs(0).iter().map(|p| p.key()).collect();
        assert_eq!(keys, vec!["one", "two", "three"]);
    }

    #[test]
    fn map_output_independent_of_worker_count() {
        let dir = TempDir::new().unwrap();
        let contents: String = (0..100).map(|i| format!("k{}\n", i % 10)).collect();
        let path = write_file(&dir, "in.txt", &contents);
        let splits = compute_splits(&path, 50).unwrap();
        assert!(splits.len() > 1);

        let mut snapshots = Vec::new();
        for workers in [1, 2, 4] {
            let sink = ProgressSink::new(None);
            let (store, _) = run_map_phase(&splits, &identity_map(), workers, 3, &sink).unwrap();
            let snapshot: Vec<Vec<KeyValuePair>> = (0..store.num_partitions())
                .map(|p| store.partition_pairs(p).to_vec())
                .collect();
            snapshots.push(snapshot);
        }
        assert_eq!(snapshots[0], snapshots[1]);
        assert_eq!(snapshots[0], snapshots[2]);
    }

    #[test]
    fn reduce_writes_keys_in_sorted_order() {
        let dir = TempDir::new().unwrap();
        let path = write_file(&dir, "in.txt", "b\na\n");
        let splits = compute_splits(&path, 1_000).unwrap();
        let sink = ProgressSink::new(None);
        let (store, _) = run_map_phase(&splits, &identity_map(), 1, 1, &sink).unwrap();
        let out = dir.path().join("out");
        let files = run_reduce_phase(store, &passthrough_reduce(), 1, &out, &sink).unwrap();
        assert_eq!(files, vec![out.join("part-00000")]);
        assert_eq!(fs::read_to_string(&files[0]).unwrap(), "a\ta\nb\tb\n");
    }

    #[test]
    fn reduce_group_values_are_sorted() {
        let dir = TempDir::new().unwrap();
        let path = write_file(&dir, "in.txt", "seed\n");
        // Map emits out-of-order values for one key.
        let map: MapFn = Arc::new(|_, collector| {
            collector.emit("k", "9")?;
            collector.emit("k", "1")?;
            collector.emit("k", "5")
        });
        let splits = compute_splits(&path, 1_000).unwrap();
        let sink = ProgressSink::new(None);
        let (store, _) = run_map_phase(&splits, &map, 1, 1, &sink).unwrap();
        let reduce: ReduceFn = Arc::new(|key, values, collector| {
            assert_eq!(values, ["1", "5", "9"]);
            collector.emit(key, &values.join(","))
        });
        let out = dir.path().join("out");
        run_reduce_phase(store, &reduce, 1, &out, &sink).unwrap();
        assert_eq!(
            fs::read_to_string(out.join("part-00000")).unwrap(),
            "k\t1,5,9\n"
        );
    }

    #[test]
    fn empty_partitions_still_get_files() {
        let dir = TempDir::new().unwrap();
        let path = write_file(&dir, "in.txt", "x\n");
        let splits = compute_splits(&path, 1_000).unwrap();
        let sink = ProgressSink::new(None);
        let (store, _) = run_map_phase(&splits, &identity_map(), 1, 2, &sink).unwrap();
        let out = dir.path().join("out");
        let files = run_reduce_phase(store, &passthrough_reduce(), 2, &out, &sink).unwrap();
        assert_eq!(files.len(), 2);
        let sizes: Vec<u64> = files
            .iter()
            .map(|f| fs::metadata(f).unwrap().len())
            .collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 0).count(), 1);
    }

    #[test]
    fn job_outputs_are_deterministic() {
        let dir = TempDir::new().unwrap();
        let contents: String = (0..500).map(|i| format!("key-{}\n", i % 37)).collect();
        let input = write_file(&dir, "in.txt", &contents);

        let mut outputs: Vec<Vec<u8>> = Vec::new();
        for (run, workers) in [(0, 1), (1, 4), (2, 4)] {
            let out = dir.path().join(format!("out-{run}"));
            let mut cfg = config(&out, workers, 3);
            cfg.reduce_fn = count_reduce();
            let result = run_job(std::slice::from_ref(&input), &cfg).unwrap();
            assert_eq!(result.records_processed, 500);
            let mut bytes = Vec::new();
            for file in &result.output_files {
                bytes.extend(fs::read(file).unwrap());
            }
            outputs.push(bytes);
        }
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[1], outputs[2]);
    }

    #[test]
    fn empty_emission_map_yields_empty_part_files() {
        let dir = TempDir::new().unwrap();
        let input = write_file(&dir, "in.txt", "a\nb\n");
        let out = dir.path().join("out");
        let mut cfg = config(&out, 2, 3);
        cfg.map_fn = Arc::new(|_, _| Ok(()));
        let result = run_job(&[input], &cfg).unwrap();
        assert_eq!(result.output_files.len(), 3);
        for file in &result.output_files {
            assert_eq!(fs::metadata(file).unwrap().len(), 0);
        }
    }

    #[test]
    fn map_error_carries_split_and_line() {
        let dir = TempDir::new().unwrap();
        let input = write_file(&dir, "in.txt", "fine\nboom\n");
        let out = dir.path().join("out");
        let mut cfg = config(&out, 1, 1);
        cfg.map_fn = Arc::new(|line, collector| {
            if line == "boom" {
                Err(TaskError::new("exploded"))
            } else {
                collector.emit(line, "1")
            }
        });
        let err = run_job(&[input], &cfg).unwrap_err();
        assert!(format!("{err}").contains("map phase failed"), "{err}");
        let debug = format!("{err:?}");
        assert!(debug.contains("line_number: 2"), "{debug}");
    }

    #[test]
    fn reduce_error_carries_key() {
        let dir = TempDir::new().unwrap();
        let input = write_file(&dir, "in.txt", "bad\ngood\n");
        let out = dir.path().join("out");
        let mut cfg = config(&out, 1, 1);
        cfg.reduce_fn = Arc::new(|key, _, _| {
            if key == "bad" {
                Err(TaskError::new("cannot reduce"))
            } else {
                Ok(())
            }
        });
        let err = run_job(&[input], &cfg).unwrap_err();
        assert!(format!("{err:?}").contains("\"bad\""));
    }

    #[test]
    fn pair_invariants_enforced() {
        assert!(KeyValuePair::new("", "v").is_err());
        assert!(KeyValuePair::new("k\tk", "v").is_err());
        assert!(KeyValuePair::new("k", "v\n").is_err());
        assert!(KeyValuePair::new("k", "").is_ok());
    }

    #[test]
    fn progress_fractions_monotone_per_phase() {
        let dir = TempDir::new().unwrap();
        let contents: String = (0..64).map(|i| format!("k{i}\n")).collect();
        let input = write_file(&dir, "in.txt", &contents);
        let out = dir.path().join("out");
        let cfg = config(&out, 4, 4);
        let result = run_job(&[input], &cfg).unwrap();
        assert!(!result.progress.is_empty());
        for phase in [Phase::Map, Phase::Shuffle, Phase::Reduce] {
            let fractions: Vec<f64> = result
                .progress
                .iter()
                .filter(|r| r.phase == phase)
                .map(|r| r.fraction_complete)
                .collect();
            assert!(!fractions.is_empty(), "no reports for {phase}");
            assert!(
                fractions.windows(2).all(|w| w[0] <= w[1]),
                "{phase} fractions not monotone: {fractions:?}"
            );
            assert_eq!(*fractions.last().unwrap(), 1.0);
        }
    }

    #[test]
    fn pair_conservation_through_shuffle() {
        let dir = TempDir::new().unwrap();
        let contents: String = (0..200).map(|i| format!("k{}\n", i % 23)).collect();
        let path = write_file(&dir, "in.txt", &contents);
        let splits = compute_splits(&path, 64).unwrap();
        let sink = ProgressSink::new(None);
        let (store, _) = run_map_phase(&splits, &identity_map(), 2, 5, &sink).unwrap();

        // Multiset of routed pairs equals the multiset of input lines, and
        // no key appears in two partitions.
        let mut routed: Vec<String> = Vec::new();
        let mut key_home: Vec<HashSet<String>> = vec![HashSet::new(); 5];
        for (p, home) in key_home.iter_mut().enumerate() {
            for pair in store.partition_pairs(p) {
                routed.push(pair.key().to_string());
                home.insert(pair.key().to_string());
            }
        }
        routed.sort();
        let mut expected: Vec<String> = contents.lines().map(str::to_string).collect();
        expected.sort();
        assert_eq!(routed, expected);
        for (i, a) in key_home.iter().enumerate() {
            for b in key_home.iter().skip(i + 1) {
                assert!(a.is_disjoint(b));
            }
        }
    }
}
