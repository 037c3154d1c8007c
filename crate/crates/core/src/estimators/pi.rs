//! The edge probability `π(d, n)` of a random pair in a random `n`-subset of
//! `{±1}^d`, its distance-conditioned parts `π_k(d, n)`, and the occupancy
//! weights `ξ_k(m)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index;

use crate::combinatorics::binomial;
use crate::cube::{sample_pair, sample_vertex_set, CubeVertex, VertexSet};
use crate::error::{Error, Result};
use crate::graph::is_edge_unchecked;
use crate::stats::{ratio_to_f64, Estimate, Z95};

use super::tau::{run_blocks, TauTable};

/// Largest `d` handled by the `π` estimators.
pub const MAX_D: usize = 60;

fn check_dn(d: usize, n: usize) -> Result<()> {
    if d == 0 || d > MAX_D {
        return Err(Error::InvalidParameters(format!(
            "d must be in 1..={MAX_D}, got {d}"
        )));
    }
    if n < 2 || n as u128 > 1u128 << d {
        return Err(Error::InvalidParameters(format!(
            "need 2 <= n <= 2^{d}, got n = {n}"
        )));
    }
    Ok(())
}

fn check_k(d: usize, k: usize) -> Result<()> {
    if k == 0 || k > d {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= k <= d = {d}, got k = {k}"
        )));
    }
    Ok(())
}

/// Largest `m` with positive probability: `min(2^k - 2, n - 2)`.
pub fn max_obstructions(k: usize, n: usize) -> usize {
    let face = (1u64 << k.min(63)) - 2;
    face.min(n as u64 - 2) as usize
}

/// `ξ_k(m) = C(2^k-2, m) C(2^d-2^k, n-m-2) / C(2^d-2, n-2)`: the probability
/// that exactly `m` of the other points land in `□*(v,w)` given
/// `dist(v,w) = k`.
pub fn xi_exact(d: usize, n: usize, k: usize, m: usize) -> Result<BigRational> {
    check_dn(d, n)?;
    check_k(d, k)?;
    if m > max_obstructions(k, n) {
        return Err(Error::InvalidParameters(format!(
            "m = {m} exceeds min(2^k - 2, n - 2) = {}",
            max_obstructions(k, n)
        )));
    }
    Ok(xi_unchecked(d, n, k, m))
}

fn xi_unchecked(d: usize, n: usize, k: usize, m: usize) -> BigRational {
    let cube = 1u64 << d;
    let face = 1u64 << k;
    let num = binomial(face - 2, m as i64) * binomial(cube - face, n as i64 - m as i64 - 2);
    let den = binomial(cube - 2, n as i64 - 2);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `min(2^k - 2, n - 2, 6k)`: the last `m` summed term by term.
pub fn semianalytic_cutoff(k: usize, n: usize) -> usize {
    max_obstructions(k, n).min(6 * k)
}

/// `π_k(d, n) = Σ_m ξ_k(m) τ(k, m)`.
///
/// Terms up to [`semianalytic_cutoff`] use the table. Where an entry is
/// missing, and for the tail beyond the cutoff, `τ` is bracketed between its
/// nearest tabulated neighbours using that `τ(k, ·)` is non-increasing. The
/// value is the midpoint of the resulting bracket; its half-width is folded
/// into the standard error and the interval.
pub fn pi_k_semianalytic(d: usize, n: usize, k: usize, tau: &TauTable) -> Result<Estimate> {
    check_dn(d, n)?;
    check_k(d, k)?;
    if tau.k() != k {
        return Err(Error::TableMismatch(format!(
            "table is for k = {}, asked for k = {k}",
            tau.k()
        )));
    }
    let cutoff = semianalytic_cutoff(k, n);
    let mut head = BigRational::zero();
    let mut head_exact = true;
    let mut head_var = 0.0;
    let mut mass = BigRational::zero();
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut samples = 0u64;
    let mut seed = 0u64;
    for m in 0..=cutoff {
        let xi = xi_unchecked(d, n, k, m);
        let w = ratio_to_f64(&xi);
        if let Some(entry) = tau.get(m) {
            let est = &entry.estimate;
            match &est.exact {
                Some(t) => head += &xi * t,
                None => {
                    head_exact = false;
                    head += &xi * float_to_ratio(est.value);
                    head_var += w * w * est.stderr * est.stderr;
                    samples += est.samples;
                    seed = est.seed;
                }
            }
        } else if !xi.is_zero() {
            let upper = tau.floor_entry(m).map_or(1.0, |(_, e)| e.estimate.value);
            let lower = tau.ceil_entry(m).map_or(0.0, |(_, e)| e.estimate.value);
            lo += w * lower;
            hi += w * upper;
        }
        mass += xi;
    }
    let tail = BigRational::one() - mass;
    if !tail.is_zero() {
        let upper = tau
            .floor_entry(cutoff)
            .map_or(1.0, |(_, e)| e.estimate.value);
        hi += ratio_to_f64(&tail) * upper;
    }
    if head_exact && hi == 0.0 {
        let mut e = Estimate::exact(head, samples);
        e.seed = seed;
        return Ok(e);
    }
    let base = ratio_to_f64(&head);
    let half = (hi - lo) / 2.0;
    let value = base + (lo + hi) / 2.0;
    let head_se = head_var.sqrt();
    Ok(Estimate {
        value,
        stderr: (head_var + half * half).sqrt(),
        ci95: (
            (base + lo - Z95 * head_se).max(0.0),
            (base + hi + Z95 * head_se).min(1.0),
        ),
        samples,
        seed,
        exact: None,
    })
}

fn float_to_ratio(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// The canonical pair at distance `k`: `v = -1`, `w` with the first `k`
/// coordinates `+1`.
pub fn canonical_pair(d: usize, k: usize) -> Result<(CubeVertex, CubeVertex)> {
    check_k(d, k)?;
    let w_bits = if k == 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    };
    Ok((CubeVertex::new(d, 0)?, CubeVertex::new(d, w_bits)?))
}

/// Monte Carlo `π_k(d, n)`: the canonical pair plus `n - 2` uniform other
/// vertices. Cube symmetries act transitively on pairs at distance `k`, so
/// fixing the pair does not change the conditional law.
pub fn pi_k_mc(d: usize, n: usize, k: usize, samples: u64, seed: u64) -> Result<Estimate> {
    check_dn(d, n)?;
    check_k(d, k)?;
    if samples == 0 {
        return Err(Error::InvalidParameters(
            "sample budget must be positive".into(),
        ));
    }
    let (v, w) = canonical_pair(d, k)?;
    let others = (1u64 << d) as usize - 2;
    let hits = run_blocks(samples, seed, |rng| {
        let mut x = Vec::with_capacity(n);
        x.push(v);
        x.push(w);
        for i in index::sample(rng, others, n - 2) {
            // Skip the two reserved bit patterns 0 and w.
            let mut bits = i as u128 + 1;
            if bits >= w.bits() {
                bits += 1;
            }
            x.push(CubeVertex::new(d, bits).expect("within dimension"));
        }
        is_edge_unchecked(&x, v, w)
    });
    Ok(Estimate::proportion(hits, samples, seed))
}

/// Monte Carlo `π(d, n)`: a random `n`-subset, a random pair, one edge test.
/// This is also the expected graph density `E[Δ_{d,n}]`.
pub fn pi_mc(d: usize, n: usize, samples: u64, seed: u64) -> Result<Estimate> {
    check_dn(d, n)?;
    if samples == 0 {
        return Err(Error::InvalidParameters(
            "sample budget must be positive".into(),
        ));
    }
    let hits = run_blocks(samples, seed, |rng| {
        let x = sample_vertex_set(d, n, rng).expect("checked ranges");
        let (v, w) = sample_pair(&x, rng).expect("n >= 2");
        is_edge_unchecked(x.members(), v, w)
    });
    Ok(Estimate::proportion(hits, samples, seed))
}

/// `π(d, n) = (1 / (2^d - 1)) Σ_k C(d, k) π_k(d, n)`.
///
/// Exact when every part is exact; otherwise standard errors add in
/// quadrature and the interval is the weighted sum of the parts' intervals.
pub fn pi_from_pk(d: usize, n: usize, parts: &BTreeMap<usize, Estimate>) -> Result<Estimate> {
    check_dn(d, n)?;
    for k in 1..=d {
        if !parts.contains_key(&k) {
            return Err(Error::InvalidParameters(format!("missing π_k for k = {k}")));
        }
    }
    let denom = BigInt::from((1u64 << d) - 1);
    let weights: Vec<BigRational> = (1..=d)
        .map(|k| BigRational::new(BigInt::from(binomial(d as u64, k as i64)), denom.clone()))
        .collect();
    if parts.values().all(Estimate::is_exact) {
        let total = (1..=d).fold(BigRational::zero(), |acc, k| {
            acc + &weights[k - 1] * parts[&k].exact.as_ref().expect("exact")
        });
        let samples = parts.values().map(|e| e.samples).sum();
        return Ok(Estimate::exact(total, samples));
    }
    let (mut value, mut var, mut lo, mut hi) = (0.0, 0.0, 0.0, 0.0);
    for k in 1..=d {
        let w = ratio_to_f64(&weights[k - 1]);
        let e = &parts[&k];
        value += w * e.value;
        var += w * w * e.stderr * e.stderr;
        lo += w * e.ci95.0;
        hi += w * e.ci95.1;
    }
    Ok(Estimate {
        value,
        stderr: var.sqrt(),
        ci95: (lo, hi),
        samples: parts.values().map(|e| e.samples).sum(),
        seed: parts.values().map(|e| e.seed).next().unwrap_or(0),
        exact: None,
    })
}

/// `ξ` weights below this are bracketed instead of tabulated.
pub const XI_FLOOR: f64 = 1e-9;

/// The `m <= cutoff` whose weight `ξ_k(m)` is at least [`XI_FLOOR`].
pub fn relevant_obstruction_counts(d: usize, n: usize, k: usize) -> Result<Vec<usize>> {
    check_dn(d, n)?;
    check_k(d, k)?;
    Ok((0..=semianalytic_cutoff(k, n))
        .filter(|&m| ratio_to_f64(&xi_unchecked(d, n, k, m)) >= XI_FLOOR)
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiDecomposition {
    pub d: usize,
    pub n: usize,
    pub pi_k: BTreeMap<usize, Estimate>,
    /// `ξ_k(m)` for `m` up to the semianalytic cutoff.
    pub xi: BTreeMap<(usize, usize), BigRational>,
    pub tau: BTreeMap<usize, TauTable>,
    pub combined: Estimate,
}

/// `π(d, n)` through `π_k` computed semianalytically from `τ` tables built
/// over the relevant `m`, one table per `k` seeded by `derive_seed(seed, k)`.
pub fn pi_decomposition(d: usize, n: usize, samples: u64, seed: u64) -> Result<PiDecomposition> {
    check_dn(d, n)?;
    let mut pi_k = BTreeMap::new();
    let mut xi = BTreeMap::new();
    let mut tau = BTreeMap::new();
    for k in 1..=d {
        for m in 0..=semianalytic_cutoff(k, n) {
            xi.insert((k, m), xi_unchecked(d, n, k, m));
        }
        let table = TauTable::build(
            k,
            relevant_obstruction_counts(d, n, k)?,
            samples,
            crate::rng::derive_seed(seed, k as u64),
        )?;
        pi_k.insert(k, pi_k_semianalytic(d, n, k, &table)?);
        tau.insert(k, table);
    }
    let combined = pi_from_pk(d, n, &pi_k)?;
    Ok(PiDecomposition {
        d,
        n,
        pi_k,
        xi,
        tau,
        combined,
    })
}

/// Exact edge statistics over all `n`-subsets of `{±1}^d` and all their pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPiRow {
    pub n: usize,
    /// Edge pairs, indexed by Hamming distance (index 0 unused).
    pub edges_by_k: Vec<u64>,
    /// All pairs, indexed by Hamming distance.
    pub pairs_by_k: Vec<u64>,
}

impl ExactPiRow {
    pub fn pi(&self) -> BigRational {
        let e: u64 = self.edges_by_k.iter().sum();
        let p: u64 = self.pairs_by_k.iter().sum();
        BigRational::new(e.into(), p.into())
    }

    pub fn pi_k(&self, k: usize) -> BigRational {
        BigRational::new(self.edges_by_k[k].into(), self.pairs_by_k[k].into())
    }

    pub fn pi_k_map(&self) -> BTreeMap<usize, Estimate> {
        (1..self.pairs_by_k.len())
            .map(|k| (k, Estimate::exact(self.pi_k(k), self.pairs_by_k[k])))
            .collect()
    }
}

/// Largest `d` for full enumeration.
pub const MAX_EXACT_D: usize = 3;

/// Full enumeration of `π(d, n)` for `n = 2..=2^d`, split by distance.
pub fn exact_pi_table(d: usize) -> Result<Vec<ExactPiRow>> {
    if d == 0 || d > MAX_EXACT_D {
        return Err(Error::InvalidParameters(format!(
            "exact enumeration supports 1 <= d <= {MAX_EXACT_D}, got {d}"
        )));
    }
    let size = 1usize << d;
    let cube = VertexSet::full_cube(d)?;
    let mut rows: Vec<ExactPiRow> = (2..=size)
        .map(|n| ExactPiRow {
            n,
            edges_by_k: vec![0; d + 1],
            pairs_by_k: vec![0; d + 1],
        })
        .collect();
    for mask in 0u32..1 << size {
        let n = mask.count_ones() as usize;
        if n < 2 {
            continue;
        }
        let members: Vec<CubeVertex> = (0..size)
            .filter(|i| (mask >> i) & 1 == 1)
            .map(|i| cube.members()[i])
            .collect();
        let row = &mut rows[n - 2];
        for i in 0..n {
            for j in i + 1..n {
                let k = (members[i].bits() ^ members[j].bits()).count_ones() as usize;
                row.pairs_by_k[k] += 1;
                if is_edge_unchecked(&members, members[i], members[j]) {
                    row.edges_by_k[k] += 1;
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub d: usize,
    /// `(n, π(d, n))` for `n = 3..=2^d`.
    pub values: Vec<(usize, BigRational)>,
    /// Every `n` with `π(d, n) <= π(d, n + 1)`.
    pub violations: Vec<usize>,
}

impl MonotonicityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `π(d, n) > π(d, n + 1)` for `3 <= n <= 2^d - 1` exactly.
pub fn monotonicity_check(d: usize) -> Result<MonotonicityReport> {
    let rows = exact_pi_table(d)?;
    let values: Vec<(usize, BigRational)> = rows
        .iter()
        .filter(|r| r.n >= 3)
        .map(|r| (r.n, r.pi()))
        .collect();
    let violations = values
        .windows(2)
        .filter(|w| w[0].1 <= w[1].1)
        .map(|w| w[0].0)
        .collect();
    Ok(MonotonicityReport {
        d,
        values,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::tau::{tau_exact, Provenance};

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn xi_examples() {
        assert_eq!(xi_exact(3, 4, 3, 2).unwrap(), BigRational::one());
        assert_eq!(xi_exact(3, 4, 3, 0).unwrap(), BigRational::zero());
        assert_eq!(xi_exact(3, 4, 3, 1).unwrap(), BigRational::zero());
        assert_eq!(xi_exact(3, 8, 2, 2).unwrap(), BigRational::one());
        assert!(xi_exact(3, 8, 2, 3).is_err());
        assert!(xi_exact(3, 9, 2, 0).is_err());
        assert!(xi_exact(3, 8, 4, 0).is_err());
    }

    #[test]
    fn semianalytic_full_cube() {
        let t1 = TauTable::exhaustive(1, 0).unwrap();
        let t2 = TauTable::exhaustive(2, 2).unwrap();
        let t3 = TauTable::exhaustive(3, 6).unwrap();
        assert_eq!(
            pi_k_semianalytic(3, 8, 1, &t1).unwrap().exact,
            Some(BigRational::one())
        );
        assert_eq!(
            pi_k_semianalytic(3, 8, 2, &t2).unwrap().exact,
            Some(BigRational::zero())
        );
        assert_eq!(
            pi_k_semianalytic(3, 8, 3, &t3).unwrap().exact,
            Some(BigRational::zero())
        );
        assert!(matches!(
            pi_k_semianalytic(3, 8, 2, &t3),
            Err(Error::TableMismatch(_))
        ));
    }

    #[test]
    fn semianalytic_brackets_missing_entries() {
        let mut table = TauTable::new(3).unwrap();
        table
            .insert(0, tau_exact(3, 0).unwrap(), Provenance::Exhaustive)
            .unwrap();
        let e = pi_k_semianalytic(3, 8, 3, &table).unwrap();
        // ξ_3(6) = 1 and τ(3,6) is unknown: bracket [0, 1].
        assert!(!e.is_exact());
        assert!((e.value - 0.5).abs() < 1e-12);
        assert_eq!(e.ci95, (0.0, 1.0));
    }

    #[test]
    fn recombination_examples() {
        let parts: BTreeMap<usize, Estimate> = [(1, 1), (2, 0), (3, 0)]
            .into_iter()
            .map(|(k, v)| (k, Estimate::exact(frac(v, 1), 1)))
            .collect();
        assert_eq!(pi_from_pk(3, 8, &parts).unwrap().exact, Some(frac(3, 7)));
        let ones: BTreeMap<usize, Estimate> = (1..=5)
            .map(|k| (k, Estimate::exact(frac(1, 1), 1)))
            .collect();
        assert_eq!(pi_from_pk(5, 10, &ones).unwrap().exact, Some(frac(1, 1)));
        let mut missing = parts.clone();
        missing.remove(&2);
        assert!(pi_from_pk(3, 8, &missing).is_err());
    }

    #[test]
    fn mc_special_cases() {
        assert_eq!(pi_mc(5, 2, 200, 3).unwrap().value, 1.0);
        assert_eq!(pi_k_mc(6, 20, 1, 200, 3).unwrap().value, 1.0);
        assert_eq!(pi_mc(3, 8, 300, 1).unwrap(), pi_mc(3, 8, 300, 1).unwrap());
        assert!(pi_mc(3, 9, 10, 0).is_err());
        assert!(pi_k_mc(3, 8, 4, 10, 0).is_err());
    }

    #[test]
    fn decomposition_full_cube() {
        let dec = pi_decomposition(3, 8, 1000, 5).unwrap();
        assert_eq!(dec.combined.exact, Some(frac(3, 7)));
        for k in 1..=3 {
            let total = (0..=semianalytic_cutoff(k, 8))
                .fold(BigRational::zero(), |acc, m| acc + &dec.xi[&(k, m)]);
            assert_eq!(total, BigRational::one());
        }
    }

    #[test]
    fn exact_table_d3() {
        let report = monotonicity_check(3).unwrap();
        assert!(report.holds(), "{:?}", report.values);
        assert_eq!(report.values.last().unwrap(), &(8, frac(3, 7)));
        assert_eq!(report.values.len(), 6);
        let d2 = monotonicity_check(2).unwrap();
        assert_eq!(d2.values.len(), 2);
        assert!(monotonicity_check(4).is_err());
    }
}
