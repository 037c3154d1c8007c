//! Frozen exact values and Monte Carlo agreement with exhaustive oracles.
//!
//! The exact tables were produced independently by a floating-point LP that
//! tests adjacency through the midpoint of each pair (minimise the weight on
//! the pair's endpoints), enumerating every subset.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_rational::BigRational;
use randpoly::cube::{CubeVertex, VertexSet};
use randpoly::estimators::*;
use randpoly::graph::graph_density_exact;
use randpoly::stats::Estimate;

fn q(s: &str) -> BigRational {
    s.parse().unwrap()
}

fn within(est: &Estimate, truth: f64, z: f64) -> bool {
    // A sampled value of exactly 0 or 1 is fine when the truth is too.
    (est.value - truth).abs() <= z * est.stderr.max(1e-12)
}

const TAU3: [&str; 7] = ["1", "1", "4/5", "3/10", "0", "0", "0"];
const TAU4: [&str; 15] = [
    "1", "1", "12/13", "67/91", "34/77", "15/77", "16/273", "4/429", "0", "0", "0", "0", "0", "0",
    "0",
];
const PI3: [&str; 6] = ["1", "33/35", "57/70", "24/35", "4/7", "3/7"];

#[test]
fn frozen_tau_tables() {
    for (m, want) in TAU3.iter().enumerate() {
        assert_eq!(
            tau_exact(3, m).unwrap().exact.unwrap(),
            q(want),
            "k=3 m={m}"
        );
    }
    for (m, want) in TAU4.iter().enumerate() {
        assert_eq!(
            tau_exact(4, m).unwrap().exact.unwrap(),
            q(want),
            "k=4 m={m}"
        );
    }
}

#[test]
fn frozen_pi_d3() {
    let report = monotonicity_check(3).unwrap();
    let got: Vec<BigRational> = report.values.iter().map(|(_, v)| v.clone()).collect();
    let want: Vec<BigRational> = PI3.iter().map(|s| q(s)).collect();
    assert_eq!(got, want);
}

#[test]
fn tau_mc_matches_exhaustive() {
    for k in 2..=4usize {
        for m in 0..=(1usize << k) - 2 {
            let exact = tau_exact(k, m).unwrap().value;
            let mc = tau_mc(k, m, 10_000, 1000 + (k * 100 + m) as u64).unwrap();
            assert!(
                within(&mc, exact, 3.0),
                "k={k} m={m}: {} vs {exact}",
                mc.value
            );
        }
    }
}

#[test]
fn alpha_mc_and_chambers_match_exhaustive() {
    for k in 2..=4usize {
        for m in 0..=class_count(k) as usize {
            let exact = alpha_exact(k, m).unwrap().value;
            let mc = alpha_mc(k, m, 10_000, 7 + m as u64).unwrap();
            assert!(
                within(&mc, exact, 3.0),
                "alpha k={k} m={m}: {} vs {exact}",
                mc.value
            );
            let ch = alpha_via_chambers(k, m, 2_000, 11 + m as u64).unwrap();
            assert!(
                within(&ch, exact, 3.0),
                "chambers k={k} m={m}: {} vs {exact}",
                ch.value
            );
        }
    }
}

#[test]
fn tau_identity_and_bound_exact() {
    for k in 2..=4usize {
        let mut prev = q("1");
        for m in 0..=(1usize << k) - 2 {
            let tau = tau_exact(k, m).unwrap();
            let alpha = (m as u64 <= class_count(k)).then(|| alpha_exact(k, m).unwrap());
            let derived = tau_from_alpha(k, m, alpha.as_ref()).unwrap();
            assert_eq!(derived.exact, tau.exact, "k={k} m={m}");
            let t = tau.exact.unwrap();
            assert!(t <= prev);
            if m >= 1 {
                assert!(t <= tau_upper_bound(k, m).unwrap());
            }
            prev = t;
        }
    }
}

#[test]
fn alpha_chambers_double_enumeration() {
    for r in 1..=3usize {
        for m in 0..=4usize.min(class_count(r + 1) as usize) {
            assert_eq!(
                alpha_via_chambers_exact(r + 1, m).unwrap().exact,
                alpha_exact(r + 1, m).unwrap().exact,
                "r={r} m={m}"
            );
        }
    }
}

#[test]
fn pi_mc_matches_enumeration_d3() {
    let rows = exact_pi_table(3).unwrap();
    for row in &rows {
        let n = row.n;
        let exact = randpoly::stats::ratio_to_f64(&row.pi());
        let mc = pi_mc(3, n, 10_000, 50 + n as u64).unwrap();
        assert!(within(&mc, exact, 3.0), "n={n}: {} vs {exact}", mc.value);
        for k in 1..=3 {
            let exact_k = randpoly::stats::ratio_to_f64(&row.pi_k(k));
            let mc_k = pi_k_mc(3, n, k, 10_000, 60 + (n * 4 + k) as u64).unwrap();
            assert!(
                within(&mc_k, exact_k, 3.0),
                "n={n} k={k}: {} vs {exact_k}",
                mc_k.value
            );
        }
    }
}

#[test]
fn mean_density_equals_pi_d3() {
    // Every n-subset has C(n,2) pairs, so the mean of the exact densities is
    // the pair probability.
    let cube = VertexSet::full_cube(3).unwrap();
    for row in exact_pi_table(3).unwrap() {
        let mut total = BigRational::from_integer(0.into());
        let mut count = 0u64;
        for pick in cube.members().iter().copied().combinations(row.n) {
            let x = VertexSet::new(3, pick).unwrap();
            total += graph_density_exact(&x, u64::MAX).unwrap().density;
            count += 1;
        }
        assert_eq!(
            total / BigRational::from_integer(count.into()),
            row.pi(),
            "n={}",
            row.n
        );
    }
}

#[test]
fn pi_k_methods_agree_d8() {
    let table =
        TauTable::build(8, relevant_obstruction_counts(8, 32, 8).unwrap(), 10_000, 3).unwrap();
    let semi = pi_k_semianalytic(8, 32, 8, &table).unwrap();
    let mc = pi_k_mc(8, 32, 8, 10_000, 4).unwrap();
    let sigma = (semi.stderr.powi(2) + mc.stderr.powi(2)).sqrt();
    assert!(
        (semi.value - mc.value).abs() <= 3.0 * sigma,
        "{} vs {}",
        semi.value,
        mc.value
    );
}

#[test]
fn recombination_matches_direct_d8() {
    let dec = pi_decomposition(8, 32, 10_000, 21).unwrap();
    let direct = pi_mc(8, 32, 10_000, 22).unwrap();
    let sigma = (dec.combined.stderr.powi(2) + direct.stderr.powi(2)).sqrt();
    assert!((dec.combined.value - direct.value).abs() <= 3.0 * sigma);
    for k in 1..=8usize {
        let cutoff = semianalytic_cutoff(k, 32);
        if cutoff == max_obstructions(k, 32) {
            let total = (0..=cutoff).fold(BigRational::from_integer(0.into()), |acc, m| {
                acc + &dec.xi[&(k, m)]
            });
            assert_eq!(total, q("1"), "k={k}");
        }
    }
    assert_eq!(dec.pi_k.len(), 8);
    let map: BTreeMap<usize, Estimate> = dec.pi_k.clone();
    assert_eq!(pi_from_pk(8, 32, &map).unwrap(), dec.combined);
}

#[test]
fn canonical_pair_layout() {
    let (v, w) = canonical_pair(6, 4).unwrap();
    assert_eq!(v, CubeVertex::all_minus(6).unwrap());
    assert_eq!(w.signs(), vec![1, 1, 1, 1, -1, -1]);
}
