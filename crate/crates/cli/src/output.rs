//! CSV tables: fixed header per experiment, 12 significant digits, exact
//! values as `p/q`, wall time in the last column.

use std::io::Write;
use std::time::{Duration, Instant};

use anyhow::Result;
use randpoly::stats::Estimate;

pub const WALL_TIME: &str = "wall_time";

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub experiment: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// `columns` excludes the leading `experiment` and trailing `wall_time`.
    pub fn new(experiment: &'static str, columns: &[&'static str]) -> Self {
        let mut header = vec!["experiment"];
        header.extend_from_slice(columns);
        header.push(WALL_TIME);
        Self {
            experiment,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, fields: Vec<String>, elapsed: Duration) {
        let mut row = Vec::with_capacity(fields.len() + 2);
        row.push(self.experiment.to_string());
        row.extend(fields);
        row.push(format!("{:.3}", elapsed.as_secs_f64()));
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        Ok(String::from_utf8(buf)?)
    }
}

/// Runs `f`, returning its value and how long it took.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

/// Drops the trailing wall-time column from every line of a CSV document.
pub fn strip_wall_time(csv_text: &str) -> String {
    csv_text
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Decimal with 12 significant digits.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // The exponent after rounding to 12 digits fixes the decimal count.
    let sci = format!("{x:.11e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn ratio<T: std::fmt::Display>(numer: T, denom: T) -> String {
    format!("{numer}/{denom}")
}

/// `estimate, exact, stderr, ci_lo, ci_hi, samples, seed`.
pub const ESTIMATE_COLUMNS: [&str; 7] = [
    "estimate", "exact", "stderr", "ci_lo", "ci_hi", "samples", "seed",
];

pub fn estimate_fields(e: &Estimate) -> Vec<String> {
    vec![
        num(e.value),
        e.exact
            .as_ref()
            .map(|q| ratio(q.numer(), q.denom()))
            .unwrap_or_default(),
        num(e.stderr),
        num(e.ci95.0),
        num(e.ci95.1),
        e.samples.to_string(),
        e.seed.to_string(),
    ]
}
