//! The experiment subcommands. Each reads an [`ExperimentConfig`] and returns
//! a CSV table plus notices for rows that were skipped.

use anyhow::{bail, Result};
use num_bigint::BigUint;
use rand::seq::index;
use randpoly::arrangements::{
    build_config_plus, chamber_count, chamber_count_bruteforce, harding_bound,
    moivre_laplace_ratio, normal_cdf, random_integer_config, random_planar_generic, VectorConfig,
};
use randpoly::combinatorics::binomial_u128;
use randpoly::estimators::{
    alpha_exact, alpha_mc, alpha_via_chambers, alpha_via_chambers_exact, antipodal_free_fraction,
    class_count, density_threshold_sweep, exact_pi_table, pi_decomposition, pi_k_mc, pi_mc,
    star_size, tau_exact, tau_from_alpha, tau_mc, tau_row_seed, Rounding, EXACT_BUDGET, MAX_K,
};
use randpoly::rng::stream;
use randpoly::stats::Estimate;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::output::{estimate_fields, num, ratio, timed, Table, ESTIMATE_COLUMNS};

#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub table: Table,
    pub notices: Vec<String>,
}

fn columns(lead: &[&'static str]) -> Vec<&'static str> {
    let mut c = lead.to_vec();
    c.extend_from_slice(&ESTIMATE_COLUMNS);
    c
}

/// `density`: expected graph density at `n = rounding(base^d)`.
///
/// Keys: `d` (default `10,12,14`), `bases` (`1.2,1.7`), `rounding`
/// (`nearest`, `floor`, `ceil`, `outward`).
pub fn cmd_density(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let ds = cfg.usize_list("d", "10,12,14")?;
    let bases = cfg.f64_list("bases", "1.2,1.7")?;
    let rounding: Rounding = cfg.str_or("rounding", "nearest").parse()?;
    let mode = cfg.seed_mode()?;
    let mut table = Table::new("density", &columns(&["d", "base", "rounding", "n"]));
    let mut notices = Vec::new();
    for &d in &ds {
        for &base in &bases {
            let (sweep, elapsed) = timed(|| {
                density_threshold_sweep(&[d], &[base], cfg.samples, cfg.seed, rounding, mode)
            });
            let sweep = sweep?;
            for s in sweep.skipped {
                notices.push(format!("density {}: skipped, {}", s.params, s.reason));
            }
            for row in sweep.rows {
                let mut fields = vec![
                    d.to_string(),
                    base.to_string(),
                    rounding.as_str().into(),
                    row.n.to_string(),
                ];
                fields.extend(estimate_fields(&row.estimate));
                table.push(fields, elapsed);
            }
        }
    }
    Ok(CommandOutput { table, notices })
}

/// `τ(k, m)` for one point, exhaustive or sampled as `method` asks.
fn tau_point(
    k: usize,
    m: usize,
    method: &str,
    samples: u64,
    seed: u64,
) -> Result<(Estimate, &'static str)> {
    let affordable = binomial_u128(star_size(k), m as u64).is_some_and(|c| c <= EXACT_BUDGET);
    Ok(match method {
        "auto" if m as u64 > class_count(k) => (tau_from_alpha(k, m, None)?, "via_alpha"),
        "auto" if affordable => (tau_exact(k, m)?, "exhaustive"),
        "auto" | "mc" => (tau_mc(k, m, samples, seed)?, "monte_carlo"),
        "exact" => (tau_exact(k, m)?, "exhaustive"),
        other => bail!("tau method must be auto, exact or mc, got '{other}'"),
    })
}

/// `tau`: long-edge survival probabilities.
///
/// Keys: `k` (default `3`); then either `ratios` (rows at `m = ⌈ratio·k⌉`)
/// or `m` (default: every `m` from 0 to `2^k - 2`); `method` (`auto`,
/// `exact`, `mc`).
pub fn cmd_tau(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let ks = cfg.usize_list("k", "3")?;
    let method = cfg.str_or("method", "auto");
    let mode = cfg.seed_mode()?;
    let ratios = cfg
        .param("ratios")
        .map(|_| cfg.f64_list("ratios", ""))
        .transpose()?;
    let m_list = cfg.opt_usize_list("m")?;
    let mut table = Table::new("tau", &columns(&["k", "ratio", "m", "provenance"]));
    let mut notices = Vec::new();
    for &k in &ks {
        if k == 0 || k > MAX_K {
            notices.push(format!("tau k={k}: skipped, k must be in 1..={MAX_K}"));
            continue;
        }
        let points: Vec<(String, u64)> = match (&ratios, &m_list) {
            (Some(rs), _) => rs
                .iter()
                .map(|&r| (r.to_string(), (r * k as f64).ceil().max(0.0) as u64))
                .collect(),
            (None, Some(ms)) => ms.iter().map(|&m| (String::new(), m as u64)).collect(),
            (None, None) => (0..=star_size(k)).map(|m| (String::new(), m)).collect(),
        };
        for (ratio_field, m) in points {
            if m > star_size(k) {
                notices.push(format!("tau k={k} m={m}: skipped, m exceeds 2^k - 2"));
                continue;
            }
            let m = m as usize;
            let seed = tau_row_seed(mode, cfg.seed, k, m);
            let (res, elapsed) = timed(|| tau_point(k, m, method, cfg.samples, seed));
            let (est, provenance) = res?;
            let mut fields = vec![k.to_string(), ratio_field, m.to_string(), provenance.into()];
            fields.extend(estimate_fields(&est));
            table.push(fields, elapsed);
        }
    }
    Ok(CommandOutput { table, notices })
}

/// `alpha`: survival probability conditioned on an antipodal-free `Y`.
///
/// Keys: `k` (default `3`), `m` (default: `0..=2^{k-1}-1`), `method`
/// (`auto`, `exact`, `mc`, `chambers`, `chambers_exact`).
pub fn cmd_alpha(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let ks = cfg.usize_list("k", "3")?;
    let method = cfg.str_or("method", "auto");
    let mode = cfg.seed_mode()?;
    let mut table = Table::new("alpha", &columns(&["k", "m", "method", "prefactor"]));
    let mut notices = Vec::new();
    for &k in &ks {
        if k == 0 || k > MAX_K {
            notices.push(format!("alpha k={k}: skipped, k must be in 1..={MAX_K}"));
            continue;
        }
        let ms = match cfg.opt_usize_list("m")? {
            Some(ms) => ms,
            None => (0..=class_count(k) as usize).collect(),
        };
        for m in ms {
            if m as u64 > class_count(k) {
                notices.push(format!(
                    "alpha k={k} m={m}: skipped, conditioning event is empty"
                ));
                continue;
            }
            let seed = tau_row_seed(mode, cfg.seed, k, m);
            let total = binomial_u128(class_count(k), m as u64).and_then(|c| c.checked_mul(1 << m));
            let chosen = match method {
                "auto" if total.is_some_and(|c| c <= EXACT_BUDGET) => "exact",
                "auto" => "mc",
                other => other,
            };
            let (res, elapsed) = timed(|| -> Result<Estimate> {
                Ok(match chosen {
                    "exact" => alpha_exact(k, m)?,
                    "mc" => alpha_mc(k, m, cfg.samples, seed)?,
                    "chambers" => alpha_via_chambers(k, m, cfg.samples, seed)?,
                    "chambers_exact" => alpha_via_chambers_exact(k, m)?,
                    other => bail!("alpha method must be auto, exact, mc, chambers or chambers_exact, got '{other}'"),
                })
            });
            let est = res?;
            let pre = antipodal_free_fraction(k, m)?;
            let mut fields = vec![
                k.to_string(),
                m.to_string(),
                chosen.into(),
                ratio(pre.numer(), pre.denom()),
            ];
            fields.extend(estimate_fields(&est));
            table.push(fields, elapsed);
        }
    }
    Ok(CommandOutput { table, notices })
}

/// `pi`: edge probability of a random pair.
///
/// Keys: `d` (default `3`), `n` (default `3..8`), `method` (`mc`,
/// `semianalytic`, `exact`), `k` (with `mc`: condition on distance `k`).
pub fn cmd_pi(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let ds = cfg.usize_list("d", "3")?;
    let ns = cfg.usize_list("n", "3..8")?;
    let method = cfg.str_or("method", "mc");
    let ks = cfg.opt_usize_list("k")?;
    let mode = cfg.seed_mode()?;
    let mut table = Table::new("pi", &columns(&["method", "d", "n", "k"]));
    let mut notices = Vec::new();
    for &d in &ds {
        let exact_rows = if method == "exact" {
            match exact_pi_table(d) {
                Ok(rows) => Some(rows),
                Err(e) => {
                    notices.push(format!("pi d={d}: skipped, {e}"));
                    continue;
                }
            }
        } else {
            None
        };
        for &n in &ns {
            if n < 2 || d == 0 || d > randpoly::estimators::MAX_D || n as u128 > 1u128 << d {
                notices.push(format!("pi d={d} n={n}: skipped, need 2 <= n <= 2^d"));
                continue;
            }
            let tag = ((d as u64) << 40) | ((n as u64) << 8);
            let mut push = |k: String, est: &Estimate, elapsed| {
                let mut fields = vec![method.to_string(), d.to_string(), n.to_string(), k];
                fields.extend(estimate_fields(est));
                table.push(fields, elapsed);
            };
            match method {
                "mc" => match &ks {
                    None => {
                        let (est, t) = timed(|| pi_mc(d, n, cfg.samples, mode.seed(cfg.seed, tag)));
                        push("all".into(), &est?, t);
                    }
                    Some(ks) => {
                        for &k in ks {
                            if k == 0 || k > d {
                                notices.push(format!(
                                    "pi d={d} n={n} k={k}: skipped, need 1 <= k <= d"
                                ));
                                continue;
                            }
                            let seed = mode.seed(cfg.seed, tag | k as u64);
                            let (est, t) = timed(|| pi_k_mc(d, n, k, cfg.samples, seed));
                            push(k.to_string(), &est?, t);
                        }
                    }
                },
                "semianalytic" => {
                    let (dec, t) =
                        timed(|| pi_decomposition(d, n, cfg.samples, mode.seed(cfg.seed, tag)));
                    let dec = dec?;
                    for (k, est) in &dec.pi_k {
                        push(k.to_string(), est, t);
                    }
                    push("all".into(), &dec.combined, t);
                }
                "exact" => {
                    let row = &exact_rows.as_ref().expect("computed above")[n - 2];
                    for (k, est) in row.pi_k_map() {
                        push(k.to_string(), &est, Default::default());
                    }
                    let pairs = row.pairs_by_k.iter().sum();
                    push(
                        "all".into(),
                        &Estimate::exact(row.pi(), pairs),
                        Default::default(),
                    );
                }
                other => bail!("pi method must be mc, semianalytic or exact, got '{other}'"),
            }
        }
    }
    Ok(CommandOutput { table, notices })
}

/// `chambers`: chamber counts of random central arrangements against the
/// Harding bound.
///
/// Keys: `source` (`random`, `planar`, `plus`), `r` (default `2`), `m`
/// (default `1..6`), `configs` per `m` (default `100`), `range` for random
/// integer entries (default `3`), `bruteforce` (`true` adds the literal
/// count).
pub fn cmd_chambers(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let source = cfg.str_or("source", "random");
    let r = if source == "planar" {
        2
    } else {
        cfg.usize_or("r", 2)?
    };
    let ms = cfg.usize_list("m", "1..6")?;
    let configs = cfg.usize_or("configs", 100)?;
    let range = cfg.usize_or("range", 3)? as i64;
    let brute = match cfg.str_or("bruteforce", "false") {
        "true" => true,
        "false" => false,
        other => bail!("bruteforce must be true or false, got '{other}'"),
    };
    let mode = cfg.seed_mode()?;
    let plus = if source == "plus" {
        Some(build_config_plus(r)?)
    } else {
        None
    };
    let mut lead = vec!["source", "r", "m", "index", "chambers"];
    if brute {
        lead.push("chambers_bruteforce");
    }
    lead.extend(["harding_bound", "bound_ok", "seed"]);
    let mut table = Table::new("chambers", &lead);
    let mut notices = Vec::new();
    let mut jobs = Vec::new();
    for &m in &ms {
        if let Some(p) = &plus {
            if m > p.len() {
                notices.push(format!(
                    "chambers m={m}: skipped, A_r^+ has only {} vectors",
                    p.len()
                ));
                continue;
            }
        }
        jobs.extend((0..configs).map(|i| (m, i)));
    }
    let rows: Vec<Result<(Vec<String>, std::time::Duration)>> = jobs
        .par_iter()
        .map(|&(m, i)| {
            let seed = mode.seed(cfg.seed, ((m as u64) << 32) | i as u64);
            let (res, t) = timed(|| -> Result<Vec<String>> {
                let mut rng = stream(seed, 0);
                let config: VectorConfig = match (source, &plus) {
                    ("random", _) => random_integer_config(r, m, range, &mut rng)?,
                    ("planar", _) => random_planar_generic(m, &mut rng)?,
                    ("plus", Some(p)) => p.select(&index::sample(&mut rng, p.len(), m).into_vec()),
                    (other, _) => bail!("source must be random, planar or plus, got '{other}'"),
                };
                let count = chamber_count(&config)?.count;
                let bound = harding_bound(r as u64, m as u64);
                let mut f = vec![
                    source.to_string(),
                    r.to_string(),
                    m.to_string(),
                    i.to_string(),
                    count.to_string(),
                ];
                if brute {
                    f.push(chamber_count_bruteforce(&config)?.count.to_string());
                }
                f.push(bound.to_string());
                f.push((BigUint::from(count) <= bound).to_string());
                f.push(seed.to_string());
                Ok(f)
            });
            res.map(|f| (f, t))
        })
        .collect();
    for row in rows {
        let (fields, t) = row?;
        table.push(fields, t);
    }
    Ok(CommandOutput { table, notices })
}

/// `moivre`: `b(⌊q/2 + μ√q⌋, q)/2^q` against its limit `Φ(2μ)`.
///
/// Keys: `q` (default `100,400,1600`), `mu` (default `-0.5,0,0.5`).
pub fn cmd_moivre(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let qs = cfg.usize_list("q", "100,400,1600")?;
    let mus = cfg.f64_list("mu", "-0.5,0,0.5")?;
    let mut table = Table::new("moivre", &["q", "mu", "ratio", "limit", "abs_deviation"]);
    for &q in &qs {
        for &mu in &mus {
            let (value, t) = timed(|| moivre_laplace_ratio(q as u64, mu));
            let limit = normal_cdf(2.0 * mu);
            table.push(
                vec![
                    q.to_string(),
                    mu.to_string(),
                    num(value),
                    num(limit),
                    num((value - limit).abs()),
                ],
                t,
            );
        }
    }
    Ok(CommandOutput {
        table,
        notices: Vec::new(),
    })
}
