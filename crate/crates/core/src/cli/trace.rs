//! CSV traces: one row per (seed, round), ordered by seed then round.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{OnlineRun, StatRun};

pub const ONLINE_HEADER: [&str; 6] = [
    "seed",
    "t",
    "cum_gain",
    "best_hindsight_gain",
    "cum_regret",
    "theory_bound",
];
pub const STAT_HEADER: [&str; 3] = ["seed", "t", "cor_S"];

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineRow {
    pub seed: u64,
    pub t: usize,
    pub cum_gain: f64,
    pub best_hindsight_gain: f64,
    pub cum_regret: f64,
    pub theory_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatRow {
    pub seed: u64,
    pub t: usize,
    pub cor_s: f64,
}

pub fn format_number(v: f64) -> String {
    format!("{v:.9}")
}

pub fn online_rows(runs: &[OnlineRun]) -> Vec<OnlineRow> {
    let mut sorted: Vec<&OnlineRun> = runs.iter().collect();
    sorted.sort_by_key(|r| r.seed);
    let mut rows = Vec::new();
    for run in sorted {
        let tr = &run.trace;
        for t in 0..tr.horizon() {
            rows.push(OnlineRow {
                seed: run.seed,
                t: t + 1,
                cum_gain: tr.cum_gain[t],
                best_hindsight_gain: tr.best_gain[t],
                cum_regret: tr.cum_regret(t),
                theory_bound: tr.bound[t],
            });
        }
    }
    rows
}

pub fn stat_rows(runs: &[StatRun]) -> Vec<StatRow> {
    let mut sorted: Vec<&StatRun> = runs.iter().collect();
    sorted.sort_by_key(|r| r.seed);
    sorted
        .into_iter()
        .flat_map(|run| {
            run.prefix_correlations
                .iter()
                .enumerate()
                .map(|(t, c)| StatRow {
                    seed: run.seed,
                    t: t + 1,
                    cor_s: *c,
                })
        })
        .collect()
}

pub fn write_online_trace<W: Write>(runs: &[OnlineRun], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ONLINE_HEADER)?;
    for r in online_rows(runs) {
        w.write_record([
            r.seed.to_string(),
            r.t.to_string(),
            format_number(r.cum_gain),
            format_number(r.best_hindsight_gain),
            format_number(r.cum_regret),
            format_number(r.theory_bound),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_stat_trace<W: Write>(runs: &[StatRun], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STAT_HEADER)?;
    for r in stat_rows(runs) {
        w.write_record([r.seed.to_string(), r.t.to_string(), format_number(r.cor_s)])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes to `path`, creating or truncating it.
pub fn write_trace_file<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let mut out = BufWriter::new(File::create(path)?);
    write(&mut out)?;
    out.flush()?;
    Ok(())
}

fn check_header<R: Read>(r: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = r.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = rec
        .get(i)
        .ok_or_else(|| Error::Parse(format!("missing field {i}")))?;
    raw.parse()
        .map_err(|_| Error::Parse(format!("field {i}: cannot parse `{raw}`")))
}

pub fn read_online_trace<R: Read>(input: R) -> Result<Vec<OnlineRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &ONLINE_HEADER)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(OnlineRow {
                seed: field(&rec, 0)?,
                t: field(&rec, 1)?,
                cum_gain: field(&rec, 2)?,
                best_hindsight_gain: field(&rec, 3)?,
                cum_regret: field(&rec, 4)?,
                theory_bound: field(&rec, 5)?,
            })
        })
        .collect()
}

pub fn read_stat_trace<R: Read>(input: R) -> Result<Vec<StatRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &STAT_HEADER)?;
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(StatRow {
                seed: field(&rec, 0)?,
                t: field(&rec, 1)?,
                cor_s: field(&rec, 2)?,
            })
        })
        .collect()
}
