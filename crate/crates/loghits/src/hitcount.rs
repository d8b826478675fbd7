//! The hit-count MapReduce job: each valid record emits one tagged pair
//! per enabled field (`HitsCity-pune` -> `1`, ...); reduction sums the
//! values per key, so every part-file line is a field value and its total
//! hit count.

use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::logmodel::{self, Date, LogRecord, RawLogLine};
use crate::mrengine::{
    run_job, Collector, EngineError, JobConfig, JobResult, MapFn, ProgressFn, ReduceFn, TaskError,
};

/// The record fields a job can count hits for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldTag {
    Page,
    City,
    State,
    Country,
    Age,
    Quarter,
    Date,
}

impl FieldTag {
    pub const ALL: [FieldTag; 7] = [
        FieldTag::Page,
        FieldTag::City,
        FieldTag::State,
        FieldTag::Country,
        FieldTag::Age,
        FieldTag::Quarter,
        FieldTag::Date,
    ];

    /// The key prefix this tag writes, e.g. `HitsPage`.
    pub fn name(self) -> &'static str {
        match self {
            FieldTag::Page => "HitsPage",
            FieldTag::City => "HitsCity",
            FieldTag::State => "HitsState",
            FieldTag::Country => "HitsCountry",
            FieldTag::Age => "HitsAge",
            FieldTag::Quarter => "HitsQuarter",
            FieldTag::Date => "HitsDate",
        }
    }

    /// Accepts either the bare field name (`city`) or the key prefix
    /// (`HitsCity`), case-insensitively.
    pub fn parse_name(text: &str) -> Option<FieldTag> {
        let text = text.trim();
        let bare = text
            .strip_prefix("Hits")
            .or_else(|| text.strip_prefix("hits"))
            .unwrap_or(text);
        FieldTag::ALL
            .into_iter()
            .find(|tag| tag.name()[4..].eq_ignore_ascii_case(bare))
    }

    fn extract(self, record: &LogRecord) -> String {
        match self {
            FieldTag::Page => record.url.clone(),
            FieldTag::City => record.city.clone(),
            FieldTag::State => record.state.clone(),
            FieldTag::Country => record.country.clone(),
            FieldTag::Age => record.age.to_string(),
            FieldTag::Quarter => quarter_of(record.date).to_string(),
            FieldTag::Date => record.date.to_string(),
        }
    }
}

/// Calendar quarter of a date: Q1 for months 1-3 up to Q4 for 10-12.
pub fn quarter_of(date: Date) -> &'static str {
    match (date.month() - 1) / 3 {
        0 => "Q1",
        1 => "Q2",
        2 => "Q3",
        _ => "Q4",
    }
}

/// A part-file key split into its tag and field value.
///
/// Serialized as `<tag>-<value>`; parsing splits on the FIRST '-' only, so
/// values containing '-' survive the round trip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedKey {
    pub tag: String,
    pub value: String,
}

impl TaggedKey {
    pub fn new(tag: impl Into<String>, value: impl Into<String>) -> Self {
        TaggedKey {
            tag: tag.into(),
            value: value.into(),
        }
    }

    pub fn serialize(&self) -> String {
        format!("{}-{}", self.tag, self.value)
    }

    pub fn parse(text: &str) -> Option<TaggedKey> {
        let (tag, value) = text.split_once('-')?;
        if tag.is_empty() {
            return None;
        }
        Some(TaggedKey::new(tag, value))
    }
}

/// Map side of the job. Valid records emit `(<tag>-<value>, hit)` for each
/// enabled tag; malformed lines emit nothing and bump `skipped`.
pub fn hit_map(
    line: &str,
    tags: &[FieldTag],
    collector: &mut Collector,
    skipped: &AtomicU64,
) -> Result<(), TaskError> {
    let record = match logmodel::parse_record(RawLogLine::new(line, 0)) {
        Ok(record) => record,
        Err(_) => {
            skipped.fetch_add(1, Ordering::Relaxed);
            return Ok(());
        }
    };
    let hit = record.hit.to_string();
    for tag in tags {
        let key = TaggedKey::new(tag.name(), tag.extract(&record)).serialize();
        collector.emit(&key, &hit)?;
    }
    Ok(())
}

/// Reduce side of the job: emits `(key, sum of values)`.
pub fn hit_reduce(
    key: &str,
    values: &[String],
    collector: &mut Collector,
) -> Result<(), TaskError> {
    let mut sum: u64 = 0;
    for value in values {
        let count: u64 = value.parse().map_err(|_| {
            TaskError::new(format!("value '{value}' for key '{key}' is not a count"))
        })?;
        sum = sum
            .checked_add(count)
            .ok_or_else(|| TaskError::new(format!("hit count overflow for key '{key}'")))?;
    }
    collector.emit(key, &sum.to_string())
}

#[derive(Clone)]
pub struct HitcountOptions {
    pub num_workers: usize,
    pub num_reduce_partitions: usize,
    pub output_dir: PathBuf,
    pub progress: Option<ProgressFn>,
}

impl HitcountOptions {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        HitcountOptions {
            num_workers: 1,
            num_reduce_partitions: 1,
            output_dir: output_dir.into(),
            progress: None,
        }
    }
}

#[derive(Debug)]
pub struct HitcountResult {
    pub job: JobResult,
    /// Lines that failed to parse and were skipped by the map function.
    pub skipped: u64,
}

/// Builds the map function for a tag set, plus the shared skip counter it
/// increments. Tags are deduplicated and put in canonical order so the
/// emitted pairs do not depend on caller order.
pub fn make_hit_map(tags: &[FieldTag]) -> (MapFn, Arc<AtomicU64>) {
    let enabled: Vec<FieldTag> = FieldTag::ALL
        .into_iter()
        .filter(|tag| tags.contains(tag))
        .collect();
    let skipped = Arc::new(AtomicU64::new(0));
    let counter = Arc::clone(&skipped);
    let map_fn: MapFn =
        Arc::new(move |line, collector| hit_map(line, &enabled, collector, &counter));
    (map_fn, skipped)
}

pub fn make_hit_reduce() -> ReduceFn {
    Arc::new(hit_reduce)
}

/// Runs the full hit-count job over the input files.
pub fn run_hitcount(
    inputs: &[PathBuf],
    tags: &[FieldTag],
    options: &HitcountOptions,
) -> Result<HitcountResult, EngineError> {
    if tags.is_empty() {
        return Err(EngineError::InvalidConfig(
            "at least one field tag is required".into(),
        ));
    }
    let (map_fn, skipped) = make_hit_map(tags);
    let config = JobConfig {
        map_fn,
        reduce_fn: make_hit_reduce(),
        num_workers: options.num_workers,
        num_reduce_partitions: options.num_reduce_partitions,
        output_dir: options.output_dir.clone(),
        progress: options.progress.clone(),
    };
    let job = run_job(inputs, &config)?;
    Ok(HitcountResult {
        job,
        skipped: skipped.load(Ordering::Relaxed),
    })
}
