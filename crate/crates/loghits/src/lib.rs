//! Hit-count analytics for `#`-delimited web logs.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! 1. [`logmodel`] parses and preprocesses raw log lines into seven-field
//!    records (`url#dd/mm/yyyy#hit#age#country#state#city`) and can generate
//!    reproducible synthetic logs for experiments.
//! 2. [`mrengine`] is a generic in-process MapReduce runtime: record-aligned
//!    input splits, a parallel map phase, a hash-partitioned shuffle, and a
//!    parallel reduce phase writing Hadoop-style `part-NNNNN` files.
//! 3. [`hitcount`] is the concrete job: map every record to tagged count
//!    pairs (`HitsPage-...`, `HitsCity-...`, ...) and reduce by summation.
//! 4. [`piglite`] interprets a small Pig Latin subset (LOAD / UNION / FILTER
//!    / FOREACH GENERATE / GROUP / STORE) to aggregate part files, and
//!    [`charting`] renders the resulting counts as SVG bar, pie, and line
//!    charts.
//!
//! [`cli`] wires the stages into subcommands plus a scaling benchmark.

pub mod charting;
pub mod cli;
pub mod hitcount;
pub mod logmodel;
pub mod mrengine;
pub mod piglite;
