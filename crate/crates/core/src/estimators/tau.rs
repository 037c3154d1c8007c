//! The long-edge probability `τ(k, m)` and its antipodal-free conditional
//! `α(k, m)`.
//!
//! `τ(k, m)` is the probability that the diagonal `conv{-1, +1}` of the
//! `k`-cube misses the hull of a uniform `m`-subset `Y` of the other `2^k - 2`
//! vertices. `α(k, m)` is the same probability conditioned on `Y ∩ -Y = ∅`.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::arrangements::{build_config_plus, chamber_count, partial_binomial_sum};
use crate::combinatorics::{binomial, binomial_u128};
use crate::error::{Error, Result};
use crate::lp::face_segment_meets_hull;
use crate::rng::{blocks, derive_seed, stream};
use crate::stats::Estimate;

/// Largest number of subsets an exhaustive computation may visit.
pub const EXACT_BUDGET: u128 = 1 << 21;

/// Largest `k` for which `□*_k` is indexed directly.
pub const MAX_K: usize = 30;

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidParameters(format!(
            "k must be in 1..={MAX_K}, got {k}"
        )));
    }
    Ok(())
}

/// Size of `□*_k`.
pub fn star_size(k: usize) -> u64 {
    (1u64 << k) - 2
}

/// Number of antipodal classes `{u, -u}` in `□*_k`.
pub fn class_count(k: usize) -> u64 {
    (1u64 << (k - 1)) - 1
}

/// The long edge survives `Y` (given as bitsets).
#[inline]
pub(crate) fn long_edge_survives(k: usize, y: &[u128]) -> bool {
    !face_segment_meets_hull(k, 0, y)
}

fn check_m_tau(k: usize, m: usize) -> Result<()> {
    check_k(k)?;
    if m as u64 > star_size(k) {
        return Err(Error::InvalidParameters(format!(
            "m = {m} exceeds 2^{k} - 2 = {}",
            star_size(k)
        )));
    }
    Ok(())
}

fn check_budget(required: Option<u128>) -> Result<()> {
    match required {
        Some(r) if r <= EXACT_BUDGET => Ok(()),
        Some(r) => Err(Error::BudgetExceeded {
            required: r,
            budget: EXACT_BUDGET,
        }),
        None => Err(Error::BudgetExceeded {
            required: u128::MAX,
            budget: EXACT_BUDGET,
        }),
    }
}

/// Exact `τ(k, m)` by enumerating every `m`-subset of `□*_k`.
pub fn tau_exact(k: usize, m: usize) -> Result<Estimate> {
    check_m_tau(k, m)?;
    let total = binomial_u128(star_size(k), m as u64);
    check_budget(total)?;
    let points: Vec<u128> = (1..=star_size(k) as u128).collect();
    let survivors: u64 = points
        .iter()
        .copied()
        .combinations(m)
        .par_bridge()
        .filter(|y| long_edge_survives(k, y))
        .count() as u64;
    let total = total.expect("checked");
    Ok(Estimate::exact(
        BigRational::new(BigInt::from(survivors), BigInt::from(total)),
        total as u64,
    ))
}

/// Monte Carlo `τ(k, m)` over uniform `m`-subsets of `□*_k`.
pub fn tau_mc(k: usize, m: usize, samples: u64, seed: u64) -> Result<Estimate> {
    check_m_tau(k, m)?;
    check_samples(samples)?;
    let size = star_size(k) as usize;
    let hits = run_blocks(samples, seed, |rng| {
        let y: Vec<u128> = index::sample(rng, size, m)
            .into_iter()
            .map(|i| i as u128 + 1)
            .collect();
        long_edge_survives(k, &y)
    });
    Ok(Estimate::proportion(hits, samples, seed))
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidParameters(
            "sample budget must be positive".into(),
        ));
    }
    Ok(())
}

/// Counts successes over the block-structured streams of `seed`.
pub(crate) fn run_blocks<F>(samples: u64, seed: u64, trial: F) -> u64
where
    F: Fn(&mut crate::rng::StreamRng) -> bool + Sync,
{
    blocks(samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(id, len)| {
            let mut rng = stream(seed, id);
            (0..len).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum()
}

fn check_m_alpha(k: usize, m: usize) -> Result<()> {
    check_k(k)?;
    if m as u64 > class_count(k) {
        return Err(Error::EmptyConditioning { k, m });
    }
    Ok(())
}

/// Representative of class `c` (top coordinate `+1`), and its antipode.
#[inline]
fn class_point(k: usize, class: u64, flipped: bool) -> u128 {
    let top = 1u128 << (k - 1);
    let rep = class as u128 | top;
    if flipped {
        !rep & ((top << 1) - 1)
    } else {
        rep
    }
}

/// Exact `α(k, m)`: every choice of `m` classes, every orientation.
pub fn alpha_exact(k: usize, m: usize) -> Result<Estimate> {
    check_m_alpha(k, m)?;
    let total = binomial_u128(class_count(k), m as u64).and_then(|c| c.checked_mul(1u128 << m));
    check_budget(total)?;
    let survivors: u64 = (0..class_count(k))
        .combinations(m)
        .par_bridge()
        .map(|classes| {
            (0u64..1 << m)
                .filter(|orient| {
                    let y: Vec<u128> = classes
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| class_point(k, c, (orient >> i) & 1 == 1))
                        .collect();
                    long_edge_survives(k, &y)
                })
                .count() as u64
        })
        .sum();
    let total = total.expect("checked");
    Ok(Estimate::exact(
        BigRational::new(BigInt::from(survivors), BigInt::from(total)),
        total as u64,
    ))
}

/// Monte Carlo `α(k, m)`. Draws `m` classes, then an orientation for each;
/// this is uniform on the antipodal-free `m`-subsets.
pub fn alpha_mc(k: usize, m: usize, samples: u64, seed: u64) -> Result<Estimate> {
    check_m_alpha(k, m)?;
    check_samples(samples)?;
    let classes = class_count(k) as usize;
    let hits = run_blocks(samples, seed, |rng| {
        let y: Vec<u128> = index::sample(rng, classes, m)
            .into_iter()
            .map(|c| class_point(k, c as u64, rng.random::<bool>()))
            .collect();
        long_edge_survives(k, &y)
    });
    Ok(Estimate::proportion(hits, samples, seed))
}

/// `C(2^{k-1}-1, m) 2^m / C(2^k-2, m)`: the probability that a uniform
/// `m`-subset of `□*_k` is antipodal-free.
pub fn antipodal_free_fraction(k: usize, m: usize) -> Result<BigRational> {
    check_m_tau(k, m)?;
    let num = BigInt::from(binomial(class_count(k), m as i64)) << m;
    let den = BigInt::from(binomial(star_size(k), m as i64));
    Ok(BigRational::new(num, den))
}

/// `τ = prefactor · α`. For `m > 2^{k-1} - 1` the prefactor is zero (every
/// `Y` holds an antipodal pair, whose midpoint is the origin on the diagonal)
/// and `alpha` may be `None`.
pub fn tau_from_alpha(k: usize, m: usize, alpha: Option<&Estimate>) -> Result<Estimate> {
    let factor = antipodal_free_fraction(k, m)?;
    if factor.is_zero() {
        return Ok(Estimate::exact(BigRational::zero(), 0));
    }
    let alpha = alpha.ok_or(Error::EmptyConditioning { k, m })?;
    if let Some(exact) = &alpha.exact {
        return Ok(Estimate::exact(exact * &factor, alpha.samples));
    }
    let f = crate::stats::ratio_to_f64(&factor);
    Ok(Estimate {
        value: alpha.value * f,
        stderr: alpha.stderr * f,
        ci95: (alpha.ci95.0 * f, alpha.ci95.1 * f),
        samples: alpha.samples,
        seed: alpha.seed,
        exact: None,
    })
}

/// `α(k, m)` as the mean of `χ(Z)/2^m` over uniform `m`-subsets `Z` of the
/// projected configuration `A_{k-1}^+`.
pub fn alpha_via_chambers(k: usize, m: usize, samples: u64, seed: u64) -> Result<Estimate> {
    check_m_alpha(k, m)?;
    check_samples(samples)?;
    if k < 2 {
        return Err(Error::InvalidParameters(
            "alpha via chambers needs k >= 2".into(),
        ));
    }
    let config = build_config_plus(k - 1)?;
    let size = config.len();
    let per_block: Vec<Result<(u128, u128)>> = blocks(samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(id, len)| {
            let mut rng = stream(seed, id);
            let (mut sum, mut sum_sq) = (0u128, 0u128);
            for _ in 0..len {
                let pick = index::sample(&mut rng, size, m).into_vec();
                let c = chamber_count(&config.select(&pick))?.count as u128;
                sum += c;
                sum_sq += c * c;
            }
            Ok((sum, sum_sq))
        })
        .collect();
    let (mut sum, mut sum_sq) = (0u128, 0u128);
    for block in per_block {
        let (s, q) = block?;
        sum += s;
        sum_sq += q;
    }
    let scale = (1u128 << m) as f64;
    Ok(Estimate::mean_of_unit(
        sum as f64 / scale,
        sum_sq as f64 / (scale * scale),
        samples,
        seed,
    ))
}

/// Exact `E[χ(Z)]/2^m` over every `m`-subset `Z` of `A_{k-1}^+`.
pub fn alpha_via_chambers_exact(k: usize, m: usize) -> Result<Estimate> {
    check_m_alpha(k, m)?;
    if k < 2 {
        return Err(Error::InvalidParameters(
            "alpha via chambers needs k >= 2".into(),
        ));
    }
    let config = build_config_plus(k - 1)?;
    let total = binomial_u128(config.len() as u64, m as u64);
    check_budget(total)?;
    let counts: Vec<Result<u64>> = (0..config.len())
        .combinations(m)
        .par_bridge()
        .map(|pick| Ok(chamber_count(&config.select(&pick))?.count))
        .collect();
    let mut sum = BigInt::zero();
    for c in counts {
        sum += c?;
    }
    let total = total.expect("checked");
    let denom = BigInt::from(total) << m;
    Ok(Estimate::exact(BigRational::new(sum, denom), total as u64))
}

/// `b(k-2, m-1) / 2^{m-1}`, reported raw (it may exceed one).
pub fn tau_upper_bound(k: usize, m: usize) -> Result<BigRational> {
    check_k(k)?;
    if m == 0 {
        return Err(Error::InvalidParameters("the bound needs m >= 1".into()));
    }
    Ok(BigRational::new(
        BigInt::from(partial_binomial_sum(k as i64 - 2, m as u64 - 1)),
        BigInt::one() << (m - 1),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Exhaustive,
    MonteCarlo,
    /// Derived from `α` through the antipodal-free prefactor.
    ViaAlpha,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Exhaustive => "exhaustive",
            Provenance::MonteCarlo => "monte_carlo",
            Provenance::ViaAlpha => "via_alpha",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TauEntry {
    pub estimate: Estimate,
    pub provenance: Provenance,
}

/// `τ(k, ·)` values for one `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TauTable {
    k: usize,
    entries: BTreeMap<usize, TauEntry>,
}

impl TauTable {
    pub fn new(k: usize) -> Result<Self> {
        check_k(k)?;
        Ok(Self {
            k,
            entries: BTreeMap::new(),
        })
    }

    /// Exhaustive values for `m = 0..=max_m`.
    pub fn exhaustive(k: usize, max_m: usize) -> Result<Self> {
        let mut table = Self::new(k)?;
        for m in 0..=max_m {
            table.insert(m, tau_exact(k, m)?, Provenance::Exhaustive)?;
        }
        Ok(table)
    }

    /// One entry per `m` in `ms`: zero past the antipodal-free range,
    /// exhaustive when there are no more subsets than `samples` (and within
    /// [`EXACT_BUDGET`]), sampled otherwise with seed `derive_seed(seed, m)`.
    pub fn build(
        k: usize,
        ms: impl IntoIterator<Item = usize>,
        samples: u64,
        seed: u64,
    ) -> Result<Self> {
        let mut table = Self::new(k)?;
        for m in ms {
            let (est, prov) = if m as u64 > class_count(k) {
                (tau_from_alpha(k, m, None)?, Provenance::ViaAlpha)
            } else if binomial_u128(star_size(k), m as u64)
                .is_some_and(|c| c <= EXACT_BUDGET && c <= samples as u128)
            {
                (tau_exact(k, m)?, Provenance::Exhaustive)
            } else {
                (
                    tau_mc(k, m, samples, derive_seed(seed, m as u64))?,
                    Provenance::MonteCarlo,
                )
            };
            table.insert(m, est, prov)?;
        }
        Ok(table)
    }

    pub fn insert(&mut self, m: usize, estimate: Estimate, provenance: Provenance) -> Result<()> {
        check_m_tau(self.k, m)?;
        self.entries.insert(
            m,
            TauEntry {
                estimate,
                provenance,
            },
        );
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, m: usize) -> Option<&TauEntry> {
        self.entries.get(&m)
    }

    pub fn entries(&self) -> &BTreeMap<usize, TauEntry> {
        &self.entries
    }

    /// Nearest entry at or below `m`.
    pub fn floor_entry(&self, m: usize) -> Option<(usize, &TauEntry)> {
        self.entries.range(..=m).next_back().map(|(&k, v)| (k, v))
    }

    /// Nearest entry at or above `m`.
    pub fn ceil_entry(&self, m: usize) -> Option<(usize, &TauEntry)> {
        self.entries.range(m..).next().map(|(&k, v)| (k, v))
    }
}
