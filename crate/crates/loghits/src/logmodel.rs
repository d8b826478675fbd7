//! Log record model: parsing, noise filtering, preprocessing, and synthetic
//! log generation.
//!
//! A log line holds seven `#`-separated fields:
//!
//! ```text
//! pizza/index.html#13/01/2012#1#48#india#mh#pune
//! url              date       hit age country state city
//! ```

use std::fmt;
use std::io::{self, BufRead};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

/// Field separator for the preprocessed log format.
pub const FIELD_SEPARATOR: char = '#';

/// Path suffixes dropped as noise unless overridden (images, stylesheets,
/// scripts). Matched case-insensitively against the first `#`-field.
pub const DEFAULT_NOISE_SUFFIXES: &[&str] = &[
    ".jpg", ".jpeg", ".png", ".gif", ".ico", ".css", ".js", ".swf",
];

/// How many malformed line numbers a [`PreprocessReport`] retains.
pub const MALFORMED_SAMPLE_LIMIT: usize = 10;

/// A calendar date, rendered as zero-padded `dd/mm/yyyy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: u16,
    month: u8,
    day: u8,
}

impl Date {
    /// Returns `None` unless `month` is 1..=12 and `day` is valid for the
    /// month (leap years included).
    pub fn new(day: u8, month: u8, year: u16) -> Option<Date> {
        if !(1..=12).contains(&month) || day < 1 || day > days_in_month(month, year) {
            return None;
        }
        Some(Date { year, month, day })
    }

    pub fn day(&self) -> u8 {
        self.day
    }

    pub fn month(&self) -> u8 {
        self.month
    }

    pub fn year(&self) -> u16 {
        self.year
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}/{:02}/{:04}", self.day, self.month, self.year)
    }
}

pub fn is_leap_year(year: u16) -> bool {
    year.is_multiple_of(4) && (!year.is_multiple_of(100) || year.is_multiple_of(400))
}

pub fn days_in_month(month: u8, year: u16) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if is_leap_year(year) {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

pub fn days_in_year(year: u16) -> u16 {
    if is_leap_year(year) {
        366
    } else {
        365
    }
}

/// One parsed seven-field log entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogRecord {
    pub url: String,
    pub date: Date,
    /// Hit count carried by the line; at least 1.
    pub hit: u64,
    /// Visitor age in years, 1..=120.
    pub age: u32,
    pub country: String,
    pub state: String,
    pub city: String,
}

/// One unprocessed input line with its 1-based position.
#[derive(Debug, Clone, Copy)]
pub struct RawLogLine<'a> {
    pub text: &'a str,
    pub line_number: usize,
}

impl<'a> RawLogLine<'a> {
    pub fn new(text: &'a str, line_number: usize) -> Self {
        RawLogLine { text, line_number }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected 7 '#'-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: invalid date '{input}', expected dd/mm/yyyy")]
    Date { line: usize, input: String },
    #[error("line {line}: field '{field}' has invalid value '{input}'")]
    Numeric {
        line: usize,
        field: &'static str,
        input: String,
    },
}

impl ParseError {
    pub fn line_number(&self) -> usize {
        match self {
            ParseError::FieldCount { line, .. }
            | ParseError::Date { line, .. }
            | ParseError::Numeric { line, .. } => *line,
        }
    }
}

/// Splits a line on `#` and validates all seven fields.
///
/// The date must be `dd/mm/yyyy` (day and month may drop the leading zero,
/// the year has exactly four digits), `hit` must be an integer >= 1 and
/// `age` an integer in 1..=120.
pub fn parse_record(line: RawLogLine<'_>) -> Result<LogRecord, ParseError> {
    let fields: Vec<&str> = line.text.split(FIELD_SEPARATOR).collect();
    if fields.len() != 7 {
        return Err(ParseError::FieldCount {
            line: line.line_number,
            found: fields.len(),
        });
    }
    let date = parse_date(fields[1]).ok_or_else(|| ParseError::Date {
        line: line.line_number,
        input: fields[1].to_string(),
    })?;
    let hit: u64 = fields[2]
        .parse()
        .ok()
        .filter(|&h| h >= 1)
        .ok_or_else(|| ParseError::Numeric {
            line: line.line_number,
            field: "hit",
            input: fields[2].to_string(),
        })?;
    let age: u32 = fields[3]
        .parse()
        .ok()
        .filter(|&a| (1..=120).contains(&a))
        .ok_or_else(|| ParseError::Numeric {
            line: line.line_number,
            field: "age",
            input: fields[3].to_string(),
        })?;
    Ok(LogRecord {
        url: fields[0].to_string(),
        date,
        hit,
        age,
        country: fields[4].to_string(),
        state: fields[5].to_string(),
        city: fields[6].to_string(),
    })
}

fn parse_date(text: &str) -> Option<Date> {
    let mut parts = text.split('/');
    let day = parts.next()?;
    let month = parts.next()?;
    let year = parts.next()?;
    if parts.next().is_some() {
        return None;
    }
    if day.is_empty() || day.len() > 2 || month.is_empty() || month.len() > 2 || year.len() != 4 {
        return None;
    }
    Date::new(day.parse().ok()?, month.parse().ok()?, year.parse().ok()?)
}

/// True iff the line's first `#`-field (or the whole line when there is no
/// `#`) ends, case-insensitively, in one of the noise suffixes.
pub fn is_noise(line: &str, noise_suffixes: &[&str]) -> bool {
    let path = line.split(FIELD_SEPARATOR).next().unwrap_or(line);
    let path = path.to_ascii_lowercase();
    noise_suffixes
        .iter()
        .any(|suffix| path.ends_with(&suffix.to_ascii_lowercase()))
}

/// Tally of a preprocessing pass. Always satisfies
/// `kept + noise + malformed == total input lines`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreprocessReport {
    pub kept: usize,
    pub noise: usize,
    pub malformed: usize,
    /// 1-based line numbers of the first few malformed lines.
    pub malformed_lines: Vec<usize>,
}

impl PreprocessReport {
    pub fn total(&self) -> usize {
        self.kept + self.noise + self.malformed
    }
}

impl fmt::Display for PreprocessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} lines: kept {}, noise {}, malformed {}",
            self.total(),
            self.kept,
            self.noise,
            self.malformed
        )?;
        if !self.malformed_lines.is_empty() {
            write!(f, " (first malformed at lines {:?})", self.malformed_lines)?;
        }
        Ok(())
    }
}

/// Drops noise and malformed lines, keeping valid records in input order.
///
/// Noise is judged first, so a noise line never counts as malformed.
pub fn preprocess<R: BufRead>(
    input: R,
    noise_suffixes: &[&str],
) -> io::Result<(Vec<LogRecord>, PreprocessReport)> {
    let mut kept = Vec::new();
    let mut report = PreprocessReport::default();
    for (index, line) in input.lines().enumerate() {
        let line = line?;
        let line_number = index + 1;
        if is_noise(&line, noise_suffixes) {
            report.noise += 1;
            continue;
        }
        match parse_record(RawLogLine::new(&line, line_number)) {
            Ok(record) => {
                report.kept += 1;
                kept.push(record);
            }
            Err(_) => {
                report.malformed += 1;
                if report.malformed_lines.len() < MALFORMED_SAMPLE_LIMIT {
                    report.malformed_lines.push(line_number);
                }
            }
        }
    }
    Ok((kept, report))
}

/// Renders a record back to its canonical line: fields joined by `#`, the
/// date zero-padded. Inverse of [`parse_record`] on valid records.
pub fn format_record(record: &LogRecord) -> String {
    format!(
        "{}#{}#{}#{}#{}#{}#{}",
        record.url, record.date, record.hit, record.age, record.country, record.state, record.city
    )
}

/// Configuration for the synthetic log generator.
///
/// The defaults mirror the bundled sample log: three pizza-site pages,
/// three Maharashtra cities, and the year 2012.
#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub record_count: usize,
    pub seed: u64,
    pub page_catalog: Vec<String>,
    pub city_catalog: Vec<String>,
    pub country: String,
    pub state: String,
    pub year: u16,
}

impl GeneratorConfig {
    pub fn new(record_count: usize, seed: u64) -> Self {
        GeneratorConfig {
            record_count,
            seed,
            page_catalog: vec![
                "pizza/index.html".to_string(),
                "/pizza/anywhere-banking.html".to_string(),
                "/pizza/cosmos-e-solutions-pvt-ltd.html".to_string(),
            ],
            city_catalog: vec![
                "pune".to_string(),
                "nashik".to_string(),
                "bombay".to_string(),
            ],
            country: "india".to_string(),
            state: "mh".to_string(),
            year: 2012,
        }
    }

    fn validate(&self) -> Result<(), GeneratorError> {
        if self.record_count < 1 {
            return Err(GeneratorError("record_count must be >= 1".to_string()));
        }
        if self.page_catalog.is_empty() || self.city_catalog.is_empty() {
            return Err(GeneratorError("catalogs must be non-empty".to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid generator config: {0}")]
pub struct GeneratorError(String);

/// Uniform integer in `0..bound` from the raw ChaCha stream.
///
/// Rejection sampling keeps the draw unbiased and independent of any RNG
/// library's distribution internals, so a fixed seed yields the same
/// sequence everywhere.
fn uniform(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let threshold = bound.wrapping_neg() % bound; // 2^64 mod bound
    loop {
        let x = rng.next_u64();
        if x >= threshold {
            return x % bound;
        }
    }
}

/// Produces `record_count` records, a pure function of the config.
///
/// Per record the draws are, in order: page, day of year, age (1..=80),
/// city. Dates are uniform over the configured year, `hit` is always 1.
pub fn generate(config: &GeneratorConfig) -> Result<Vec<LogRecord>, GeneratorError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut records = Vec::with_capacity(config.record_count);
    for _ in 0..config.record_count {
        let url = config.page_catalog[uniform(&mut rng, config.page_catalog.len() as u64) as usize]
            .clone();
        let day_of_year = uniform(&mut rng, u64::from(days_in_year(config.year))) as u16 + 1;
        let date = date_from_day_of_year(day_of_year, config.year);
        let age = uniform(&mut rng, 80) as u32 + 1;
        let city = config.city_catalog[uniform(&mut rng, config.city_catalog.len() as u64) as usize]
            .clone();
        records.push(LogRecord {
            url,
            date,
            hit: 1,
            age,
            country: config.country.clone(),
            state: config.state.clone(),
            city,
        });
    }
    Ok(records)
}

fn date_from_day_of_year(day_of_year: u16, year: u16) -> Date {
    debug_assert!((1..=days_in_year(year)).contains(&day_of_year));
    let mut remaining = day_of_year;
    for month in 1..=12u8 {
        let len = u16::from(days_in_month(month, year));
        if remaining <= len {
            return Date::new(remaining as u8, month, year).expect("in-range day");
        }
        remaining -= len;
    }
    unreachable!("day_of_year out of range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    const SAMPLE_LOG: &str = include_str!("../testdata/sample_weblog.log");

    #[test]
    fn parses_seven_field_line() {
        let line = "pizza/index.html#13/01/2012#1#48#india#mh#pune";
        let record = parse_record(RawLogLine::new(line, 1)).unwrap();
        assert_eq!(record.url, "pizza/index.html");
        assert_eq!(record.date, Date::new(13, 1, 2012).unwrap());
        assert_eq!(record.hit, 1);
        assert_eq!(record.age, 48);
        assert_eq!(record.country, "india");
        assert_eq!(record.state, "mh");
        assert_eq!(record.city, "pune");
    }

    #[test]
    fn rejects_wrong_field_count() {
        let err = parse_record(RawLogLine::new("a#b#c", 3)).unwrap_err();
        assert_eq!(err, ParseError::FieldCount { line: 3, found: 3 });
        assert_eq!(err.line_number(), 3);
    }

    #[test]
    fn rejects_invalid_date() {
        let err = parse_record(RawLogLine::new("p#32/01/2012#1#20#india#mh#pune", 7)).unwrap_err();
        assert!(matches!(err, ParseError::Date { line: 7, .. }));
        // Month 13, two-digit year, and non-numeric components all fail too.
        for date in ["13/13/2012", "13/01/12", "aa/01/2012", "29/02/2011"] {
            let line = format!("p#{date}#1#20#india#mh#pune");
            let err = parse_record(RawLogLine::new(&line, 1)).unwrap_err();
            assert!(matches!(err, ParseError::Date { .. }), "{date}");
        }
        // 2012 is a leap year.
        assert!(parse_record(RawLogLine::new("p#29/02/2012#1#20#india#mh#pune", 1)).is_ok());
    }

    #[test]
    fn rejects_bad_numerics() {
        let err = parse_record(RawLogLine::new("p#13/01/2012#x#20#india#mh#pune", 1)).unwrap_err();
        assert!(matches!(err, ParseError::Numeric { field: "hit", .. }));
        let err = parse_record(RawLogLine::new("p#13/01/2012#0#20#india#mh#pune", 1)).unwrap_err();
        assert!(matches!(err, ParseError::Numeric { field: "hit", .. }));
        let err = parse_record(RawLogLine::new("p#13/01/2012#1#0#india#mh#pune", 1)).unwrap_err();
        assert!(matches!(err, ParseError::Numeric { field: "age", .. }));
        let err =
            parse_record(RawLogLine::new("p#13/01/2012#1#121#india#mh#pune", 1)).unwrap_err();
        assert!(matches!(err, ParseError::Numeric { field: "age", .. }));
    }

    #[test]
    fn noise_detection() {
        assert!(is_noise(
            "/img/logo.png#13/01/2012#1#48#india#mh#pune",
            DEFAULT_NOISE_SUFFIXES
        ));
        assert!(!is_noise(
            "pizza/index.html#13/01/2012#1#48#india#mh#pune",
            DEFAULT_NOISE_SUFFIXES
        ));
        assert!(is_noise(
            "/style/MAIN.CSS#13/01/2012#1#48#india#mh#pune",
            DEFAULT_NOISE_SUFFIXES
        ));
        // No '#': the whole line is the path.
        assert!(is_noise("/img/banner.gif", DEFAULT_NOISE_SUFFIXES));
        assert!(!is_noise("/img/banner.html", DEFAULT_NOISE_SUFFIXES));
        // Custom suffix set overrides the default.
        assert!(is_noise("report.pdf#rest", &[".pdf"]));
        assert!(!is_noise("/img/logo.png#rest", &[".pdf"]));
    }

    #[test]
    fn preprocess_keeps_valid_lines() {
        let input = "a#13/01/2012#1#48#india#mh#pune\n\
                     b#14/01/2012#1#30#india#mh#pune\n\
                     c#15/01/2012#1#20#india#mh#pune\n";
        let (records, report) = preprocess(input.as_bytes(), DEFAULT_NOISE_SUFFIXES).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(
            report,
            PreprocessReport {
                kept: 3,
                noise: 0,
                malformed: 0,
                malformed_lines: vec![]
            }
        );
    }

    #[test]
    fn preprocess_counts_noise_and_malformed() {
        let mut lines = Vec::new();
        for i in 0..5 {
            lines.push(format!("page-{i}.html#13/01/2012#1#48#india#mh#pune"));
        }
        lines.push("/theme/a.css#13/01/2012#1#48#india#mh#pune".to_string());
        lines.push("/theme/b.css#13/01/2012#1#48#india#mh#pune".to_string());
        lines.push("six#fields#only#here#india#mh".to_string());
        let input = lines.join("\n");
        let (records, report) = preprocess(input.as_bytes(), DEFAULT_NOISE_SUFFIXES).unwrap();
        assert_eq!(records.len(), 5);
        assert_eq!(report.kept, 5);
        assert_eq!(report.noise, 2);
        assert_eq!(report.malformed, 1);
        assert_eq!(report.malformed_lines, vec![8]);
        assert_eq!(report.total(), 8);
    }

    #[test]
    fn preprocess_keeps_all_sample_lines() {
        let (records, report) =
            preprocess(SAMPLE_LOG.as_bytes(), DEFAULT_NOISE_SUFFIXES).unwrap();
        assert_eq!(records.len(), 18);
        assert_eq!(report.kept, 18);
        assert_eq!(report.noise, 0);
        assert_eq!(report.malformed, 0);
    }

    #[test]
    fn format_zero_pads_dates() {
        let record = LogRecord {
            url: "p".to_string(),
            date: Date::new(3, 10, 2012).unwrap(),
            hit: 1,
            age: 43,
            country: "india".to_string(),
            state: "mh".to_string(),
            city: "bombay".to_string(),
        };
        assert_eq!(format_record(&record), "p#03/10/2012#1#43#india#mh#bombay");
    }

    #[test]
    fn format_parse_round_trip_on_sample() {
        for (i, line) in SAMPLE_LOG.lines().enumerate() {
            let record = parse_record(RawLogLine::new(line, i + 1)).unwrap();
            assert_eq!(format_record(&record), line);
        }
    }

    #[test]
    fn generate_single_record() {
        let records = generate(&GeneratorConfig::new(1, 7)).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].hit, 1);
        assert!((1..=80).contains(&records[0].age));
    }

    #[test]
    fn generate_rejects_bad_config() {
        assert!(generate(&GeneratorConfig::new(0, 7)).is_err());
        let mut config = GeneratorConfig::new(1, 7);
        config.page_catalog.clear();
        assert!(generate(&config).is_err());
    }

    #[test]
    fn generate_is_deterministic() {
        let config = GeneratorConfig::new(1000, 42);
        let a = generate(&config).unwrap();
        let b = generate(&config).unwrap();
        assert_eq!(a, b);
        let a_text: Vec<String> = a.iter().map(format_record).collect();
        let b_text: Vec<String> = b.iter().map(format_record).collect();
        assert_eq!(a_text, b_text);
        // A different seed diverges.
        let c = generate(&GeneratorConfig::new(1000, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generated_city_counts_match_linear_scan() {
        let config = GeneratorConfig::new(20_000, 42);
        let records = generate(&config).unwrap();
        // Oracle: one linear pass over the emitted lines.
        let mut oracle: HashMap<String, u64> = HashMap::new();
        for record in &records {
            let line = format_record(record);
            let city = line.rsplit('#').next().unwrap().to_string();
            *oracle.entry(city).or_default() += 1;
        }
        let mut counted: HashMap<String, u64> = HashMap::new();
        for record in &records {
            *counted.entry(record.city.clone()).or_default() += 1;
        }
        assert_eq!(oracle, counted);
        assert_eq!(oracle.values().sum::<u64>(), 20_000);
        for city in &config.city_catalog {
            assert!(oracle.contains_key(city), "city {city} never drawn");
        }
    }

    fn field_text() -> impl Strategy<Value = String> {
        "[a-z0-9/._-]{1,12}"
    }

    fn arb_record() -> impl Strategy<Value = LogRecord> {
        (
            field_text(),
            1u16..=366,
            1990u16..=2030,
            1u64..=9,
            1u32..=120,
            field_text(),
            field_text(),
            field_text(),
        )
            .prop_map(|(url, doy, year, hit, age, country, state, city)| {
                let doy = (doy - 1) % days_in_year(year) + 1;
                LogRecord {
                    url,
                    date: date_from_day_of_year(doy, year),
                    hit,
                    age,
                    country,
                    state,
                    city,
                }
            })
    }

    proptest! {
        #[test]
        fn parse_inverts_format(record in arb_record()) {
            let line = format_record(&record);
            let parsed = parse_record(RawLogLine::new(&line, 1)).unwrap();
            prop_assert_eq!(parsed, record);
        }

        #[test]
        fn noise_check_ignores_case(path in "[a-zA-Z/.]{0,10}", suffix in prop::sample::select(DEFAULT_NOISE_SUFFIXES.to_vec())) {
            let line = format!("{path}{suffix}#rest");
            prop_assert!(is_noise(&line, DEFAULT_NOISE_SUFFIXES));
            prop_assert!(is_noise(&line.to_ascii_uppercase(), DEFAULT_NOISE_SUFFIXES));
        }
    }
}
