//! Shared helpers for the integration suites.
//!
//! The counting oracle here deliberately re-derives hit counts from the
//! log text with plain string operations; it never calls the map/reduce
//! path it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

pub const SAMPLE_LOG: &str = include_str!("../../testdata/sample_weblog.log");

/// Tag prefixes in the order the job emits them.
pub const TAG_NAMES: [&str; 7] = [
    "HitsPage",
    "HitsCity",
    "HitsState",
    "HitsCountry",
    "HitsAge",
    "HitsQuarter",
    "HitsDate",
];

fn oracle_days_in_month(month: u32, year: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if year.is_multiple_of(4) && (!year.is_multiple_of(100) || year.is_multiple_of(400)) {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

/// A line is countable iff it has seven `#`-fields, a valid `d/m/yyyy`
/// date, an integer hit >= 1, and an age in 1..=120.
fn oracle_parse(line: &str) -> Option<(Vec<&str>, u32, u64)> {
    let fields: Vec<&str> = line.split('#').collect();
    if fields.len() != 7 {
        return None;
    }
    let date: Vec<&str> = fields[1].split('/').collect();
    if date.len() != 3 || date[2].len() != 4 {
        return None;
    }
    let day: u32 = date[0].parse().ok()?;
    let month: u32 = date[1].parse().ok()?;
    let year: u32 = date[2].parse().ok()?;
    if !(1..=12).contains(&month) || day < 1 || day > oracle_days_in_month(month, year) {
        return None;
    }
    let hit: u64 = fields[2].parse().ok()?;
    if hit < 1 {
        return None;
    }
    let age: u32 = fields[3].parse().ok()?;
    if !(1..=120).contains(&age) {
        return None;
    }
    Some((fields, month, hit))
}

/// Single linear pass accumulating per-tag counts in an associative table.
pub fn oracle_counts(log_text: &str) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for line in log_text.lines() {
        let Some((fields, month, hit)) = oracle_parse(line) else {
            continue;
        };
        let quarter = format!("Q{}", (month - 1) / 3 + 1);
        let keyed = [
            ("HitsPage", fields[0].to_string()),
            ("HitsCity", fields[6].to_string()),
            ("HitsState", fields[5].to_string()),
            ("HitsCountry", fields[4].to_string()),
            ("HitsAge", fields[3].to_string()),
            ("HitsQuarter", quarter),
            ("HitsDate", fields[1].to_string()),
        ];
        for (tag, value) in keyed {
            *counts.entry(format!("{tag}-{value}")).or_insert(0) += hit;
        }
    }
    counts
}

pub fn oracle_counts_of_file(path: &Path) -> BTreeMap<String, u64> {
    oracle_counts(&fs::read_to_string(path).expect("readable log"))
}

/// All `part-*` files of a job output directory, in name order.
pub fn part_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .expect("output dir")
        .map(|entry| entry.expect("dir entry").path())
        .filter(|p| {
            p.is_file()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("part-"))
        })
        .collect();
    files.sort();
    files
}

/// Parses `key<TAB>count` lines from every part file under `dir`.
pub fn read_counts(dir: &Path) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for file in part_files(dir) {
        for line in fs::read_to_string(&file).expect("part file").lines() {
            let (key, value) = line.split_once('\t').expect("key<TAB>value line");
            let previous = counts.insert(key.to_string(), value.parse().expect("count"));
            assert!(
                previous.is_none(),
                "key {key} appears in more than one part file"
            );
        }
    }
    counts
}

/// Concatenated bytes of all part files, in file order.
pub fn concat_part_bytes(dir: &Path) -> Vec<u8> {
    let mut bytes = Vec::new();
    for file in part_files(dir) {
        bytes.extend(fs::read(&file).expect("part file"));
    }
    bytes
}

/// Reconstructs pie wedge sweep angles from rendered path geometry.
pub fn wedge_angles(svg: &str) -> Vec<f64> {
    let mut angles = Vec::new();
    for line in svg.lines().filter(|l| l.contains("class=\"wedge\"")) {
        let d_start = line.find("d=\"").expect("wedge path has d") + 3;
        let d_end = line[d_start..].find('"').unwrap() + d_start;
        let d = &line[d_start..d_end];
        let nums: Vec<f64> = d
            .split(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-'))
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().unwrap())
            .collect();
        if d.contains('L') {
            // M cx cy L x1 y1 A r r rot laf sweep x2 y2 Z
            let (cx, cy) = (nums[0], nums[1]);
            let (x1, y1) = (nums[2], nums[3]);
            let (x2, y2) = (nums[9], nums[10]);
            let a1 = (y1 - cy).atan2(x1 - cx).to_degrees();
            let a2 = (y2 - cy).atan2(x2 - cx).to_degrees();
            let mut sweep = a2 - a1;
            if sweep <= 0.0 {
                sweep += 360.0;
            }
            angles.push(sweep);
        } else {
            angles.push(360.0);
        }
    }
    angles
}
