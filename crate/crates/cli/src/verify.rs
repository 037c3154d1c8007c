//! Identity and bound checks behind `randpoly verify`.
//!
//! The checks take their inputs as data so that a corrupted table is
//! reported as a failure.

use std::collections::BTreeMap;

use anyhow::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use randpoly::arrangements::{
    chamber_count, chamber_count_bruteforce, harding_bound, random_integer_config,
};
use randpoly::cube::{cut_polytope_vertices, VertexSet};
use randpoly::estimators::{
    alpha_exact, alpha_via_chambers_exact, class_count, density_threshold_sweep, exact_pi_table,
    monotonicity_check, pi_from_pk, tau_from_alpha, tau_threshold_sweep, tau_upper_bound,
    ExactPiRow, Provenance, Rounding, TauTable,
};
use randpoly::graph::graph_density_exact;
use randpoly::rng::{derive_seed, stream, SeedMode};
use randpoly::stats::Estimate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl std::str::FromStr for Level {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => anyhow::bail!("level must be quick or full, got '{other}'"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, failures: Vec<String>, ok_detail: String) -> Self {
        let passed = failures.is_empty();
        let detail = if passed {
            ok_detail
        } else {
            failures.join("; ")
        };
        Self {
            name,
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn exact_of(e: &Estimate) -> Option<&BigRational> {
    e.exact.as_ref()
}

pub fn check_cube_anchor() -> Result<CheckResult> {
    let mut failures = Vec::new();
    for d in 2..=4usize {
        let r = graph_density_exact(&VertexSet::full_cube(d)?, u64::MAX)?;
        let want = BigRational::new(BigInt::from(d), BigInt::from((1u64 << d) - 1));
        if r.density != want {
            failures.push(format!("d={d}: density {} != {}", r.density, want));
        }
    }
    Ok(CheckResult::new(
        "cube anchor",
        failures,
        "density d/(2^d-1) for d=2,3,4".into(),
    ))
}

pub fn check_cut_anchor() -> Result<CheckResult> {
    let r = graph_density_exact(&cut_polytope_vertices(4)?, u64::MAX)?;
    let failures = if r.edge_count == 28 && r.pairs == 28 {
        vec![]
    } else {
        vec![format!("{} of {} pairs are edges", r.edge_count, r.pairs)]
    };
    Ok(CheckResult::new(
        "cut polytope anchor",
        failures,
        "cut(4) graph is complete".into(),
    ))
}

/// Exhaustive `τ` tables for `k = 2..=4` over every feasible `m`.
pub fn exact_tau_tables() -> Result<Vec<TauTable>> {
    (2..=4)
        .map(|k| TauTable::exhaustive(k, (1usize << k) - 2).map_err(Into::into))
        .collect()
}

/// Exhaustive `α(k, m)` for `k = 2..=4`.
pub fn exact_alpha_values() -> Result<BTreeMap<(usize, usize), Estimate>> {
    let mut out = BTreeMap::new();
    for k in 2..=4usize {
        for m in 0..=class_count(k) as usize {
            out.insert((k, m), alpha_exact(k, m)?);
        }
    }
    Ok(out)
}

/// `τ = prefactor · α`, exactly.
pub fn check_tau_alpha_identity(
    tables: &[TauTable],
    alpha: &BTreeMap<(usize, usize), Estimate>,
) -> Result<CheckResult> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for t in tables {
        let k = t.k();
        for (&m, entry) in t.entries() {
            let derived = tau_from_alpha(k, m, alpha.get(&(k, m)))?;
            checked += 1;
            if exact_of(&derived).is_none() || exact_of(&derived) != exact_of(&entry.estimate) {
                failures.push(format!(
                    "k={k} m={m}: {:?} vs {:?}",
                    entry.estimate.exact, derived.exact
                ));
            }
        }
    }
    Ok(CheckResult::new(
        "tau-alpha identity",
        failures,
        format!("{checked} exact equalities"),
    ))
}

/// `τ(k, ·)` non-increasing and below `b(k-2, m-1)/2^{m-1}`, exactly.
pub fn check_tau_monotone_and_bound(tables: &[TauTable]) -> Result<CheckResult> {
    let mut failures = Vec::new();
    for t in tables {
        let k = t.k();
        let mut prev: Option<(usize, &BigRational)> = None;
        for (&m, entry) in t.entries() {
            let Some(v) = exact_of(&entry.estimate) else {
                failures.push(format!("k={k} m={m}: not exact"));
                continue;
            };
            if m == 0 && *v != BigRational::from_integer(1.into()) {
                failures.push(format!("k={k}: tau(k,0) = {v}"));
            }
            if let Some((pm, pv)) = prev {
                if v > pv {
                    failures.push(format!("k={k}: tau(m={m}) = {v} > tau(m={pm}) = {pv}"));
                }
            }
            if m >= 1 {
                let bound = tau_upper_bound(k, m)?;
                if *v > bound {
                    failures.push(format!("k={k} m={m}: {v} above bound {bound}"));
                }
            }
            prev = Some((m, v));
        }
    }
    Ok(CheckResult::new(
        "tau monotonicity and upper bound",
        failures,
        "exact tables for k=2,3,4".into(),
    ))
}

/// Sign-vector search against the literal count, and the Harding bound, on
/// `configs` random integer configurations with `r <= 4`, `m <= 12`.
pub fn check_chambers(configs: usize, seed: u64) -> Result<CheckResult> {
    let mut failures = Vec::new();
    let mut rng = stream(seed, 0);
    for i in 0..configs {
        let r = 1 + i % 4;
        // Only four nonzero integer vectors in [-2, 2] on a line.
        let m = if r == 1 {
            1 + (i / 4) % 4
        } else {
            1 + (i / 4) % 12
        };
        let s = random_integer_config(r, m, 2, &mut rng)?;
        let fast = chamber_count(&s)?.count;
        let brute = chamber_count_bruteforce(&s)?.count;
        let bound = harding_bound(r as u64, m as u64);
        if fast != brute || num_bigint::BigUint::from(fast) > bound {
            failures.push(format!(
                "config {i} (r={r}, m={m}): search {fast}, brute {brute}, bound {bound}"
            ));
        }
    }
    Ok(CheckResult::new(
        "chamber count oracle and Harding bound",
        failures,
        format!("{configs} random configurations"),
    ))
}

/// `α(r+1, m) = E[χ(Z^+)]/2^m` by double enumeration, `r <= 3`, `m <= 4`.
pub fn check_alpha_chambers() -> Result<CheckResult> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for r in 1..=3usize {
        for m in 0..=4usize.min(class_count(r + 1) as usize) {
            let direct = alpha_exact(r + 1, m)?;
            let via = alpha_via_chambers_exact(r + 1, m)?;
            checked += 1;
            if direct.exact != via.exact {
                failures.push(format!(
                    "r={r} m={m}: {:?} vs {:?}",
                    direct.exact, via.exact
                ));
            }
        }
    }
    Ok(CheckResult::new(
        "alpha via chambers",
        failures,
        format!("{checked} exact equalities"),
    ))
}

/// Distance decomposition of `π(3, n)` against direct enumeration.
pub fn check_pi_decomposition(rows: &[ExactPiRow]) -> Result<CheckResult> {
    let mut failures = Vec::new();
    for row in rows {
        let rebuilt = pi_from_pk(3, row.n, &row.pi_k_map())?;
        if rebuilt.exact.as_ref() != Some(&row.pi()) {
            failures.push(format!("n={}: {} vs {:?}", row.n, row.pi(), rebuilt.exact));
        }
    }
    if let Some(last) = rows.last() {
        if last.pi() != BigRational::new(3.into(), 7.into()) {
            failures.push(format!("pi(3,8) = {}", last.pi()));
        }
    }
    Ok(CheckResult::new(
        "pi distance decomposition",
        failures,
        "d=3, all n, exact".into(),
    ))
}

pub fn check_pi_monotone() -> Result<CheckResult> {
    let mut failures = Vec::new();
    for d in 2..=3 {
        let report = monotonicity_check(d)?;
        for n in &report.violations {
            failures.push(format!("d={d}: pi(n={n}) <= pi(n={})", n + 1));
        }
    }
    Ok(CheckResult::new(
        "pi strictly decreasing in n",
        failures,
        "exact for d=2,3".into(),
    ))
}

/// Whether `a` exceeds `b` by more than `z` combined standard errors.
fn exceeds(a: &Estimate, b: &Estimate, z: f64) -> bool {
    a.value - b.value > z * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt()
}

pub fn check_tau_trend(samples: u64, seed: u64) -> Result<CheckResult> {
    let ks = [6, 8, 10, 12];
    let above = tau_threshold_sweep(&ks, &[3.0], samples, seed, SeedMode::Derived)?;
    let below: Vec<Estimate> = ks
        .iter()
        .map(|&k| randpoly::estimators::tau_mc(k, 3 * k / 2, samples, derive_seed(seed, k as u64)))
        .collect::<Result<_, _>>()?;
    let mut failures = Vec::new();
    for w in above.rows.windows(2) {
        if exceeds(&w[1].estimate, &w[0].estimate, 2.0) {
            failures.push(format!(
                "tau(k,3k) rises from k={} ({:.5}) to k={} ({:.5})",
                w[0].k, w[0].estimate.value, w[1].k, w[1].estimate.value
            ));
        }
    }
    for (i, w) in below.windows(2).enumerate() {
        if exceeds(&w[0], &w[1], 2.0) {
            failures.push(format!(
                "tau(k,1.5k) falls from k={} ({:.5}) to k={} ({:.5})",
                ks[i],
                w[0].value,
                ks[i + 1],
                w[1].value
            ));
        }
    }
    Ok(CheckResult::new(
        "tau threshold trend",
        failures,
        "k=6,8,10,12 at m=3k and m=1.5k".into(),
    ))
}

pub fn check_density_trend(samples: u64, seed: u64) -> Result<CheckResult> {
    let ds = [10, 12, 14];
    let low = density_threshold_sweep(
        &ds,
        &[1.2],
        samples,
        seed,
        Rounding::Floor,
        SeedMode::Derived,
    )?;
    let high = density_threshold_sweep(
        &ds,
        &[1.7],
        samples,
        seed,
        Rounding::Ceil,
        SeedMode::Derived,
    )?;
    let mut failures = Vec::new();
    let mut gaps = Vec::new();
    for (lo, hi) in low.rows.iter().zip(&high.rows) {
        let gap = lo.estimate.value - hi.estimate.value;
        if gap < 0.3 {
            failures.push(format!("d={}: gap {gap:.4} < 0.3", lo.d));
        }
        gaps.push(gap);
    }
    for (i, w) in gaps.windows(2).enumerate() {
        if w[1] < w[0] {
            failures.push(format!("gap shrinks from d={} to d={}", ds[i], ds[i + 1]));
        }
    }
    Ok(CheckResult::new(
        "density threshold trend",
        failures,
        format!(
            "gaps {}",
            gaps.iter()
                .map(|g| format!("{g:.4}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ))
}

/// Runs the suite; `Full` adds the exact monotonicity and trend sweeps.
pub fn run(level: Level, seed: u64) -> Result<Vec<CheckResult>> {
    let tables = exact_tau_tables()?;
    let alpha = exact_alpha_values()?;
    let pi_rows = exact_pi_table(3)?;
    let mut out = vec![
        check_cube_anchor()?,
        check_cut_anchor()?,
        check_tau_alpha_identity(&tables, &alpha)?,
        check_tau_monotone_and_bound(&tables)?,
        check_chambers(200, derive_seed(seed, 8))?,
        check_alpha_chambers()?,
        check_pi_decomposition(&pi_rows)?,
    ];
    if level == Level::Full {
        out.push(check_pi_monotone()?);
        out.push(check_tau_trend(20_000, derive_seed(seed, 10))?);
        out.push(check_density_trend(2_500, derive_seed(seed, 11))?);
    }
    Ok(out)
}

/// Overwrites one `τ` entry; for sensitivity tests.
pub fn tamper(table: &mut TauTable, m: usize, value: BigRational) -> Result<()> {
    table.insert(m, Estimate::exact(value, 0), Provenance::Exhaustive)?;
    Ok(())
}
