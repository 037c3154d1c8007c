//! Property tests for the exact LP layer, the edge oracle, chamber counting
//! and the occupancy weights.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use randpoly::arrangements::{chamber_count, harding_bound, normal_cdf, VectorConfig};
use randpoly::cube::{CubeVertex, VertexSet};
use randpoly::estimators::{max_obstructions, xi_exact};
use randpoly::graph::is_edge;
use randpoly::lp::{
    check_separation, origin_in_conv, origin_in_conv_certified, segment_hull_certified,
    segment_hull_intersect, strict_separation, LinearSystem, RationalVector,
};

fn points(max_r: usize, max_len: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_r).prop_flat_map(move |r| {
        prop::collection::vec(prop::collection::vec(-3i64..=3, r), 1..=max_len)
    })
}

fn to_rv(pts: &[Vec<i64>]) -> Vec<RationalVector> {
    pts.iter().map(|p| RationalVector::from_ints(p)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn separation_duality(pts in points(5, 12)) {
        let s = to_rv(&pts);
        let sep = strict_separation(&s).unwrap();
        prop_assert!(check_separation(&s, &sep));
        prop_assert_eq!(sep.is_feasible(), !origin_in_conv(&s).unwrap());
        let sys = LinearSystem::convex_origin(&s).unwrap();
        let res = origin_in_conv_certified(&s).unwrap();
        prop_assert!(sys.verify(&res));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn segment_test_symmetry(
        pts in points(4, 8),
        a in prop::collection::vec(-3i64..=3, 4),
        b in prop::collection::vec(-3i64..=3, 4),
        shift in 0usize..8,
    ) {
        let r = pts[0].len();
        let s = to_rv(&pts);
        let (a, b) = (RationalVector::from_ints(&a[..r]), RationalVector::from_ints(&b[..r]));
        let forward = segment_hull_intersect(&a, &b, &s).unwrap();
        prop_assert_eq!(forward, segment_hull_intersect(&b, &a, &s).unwrap());
        let mut rotated = s.clone();
        rotated.rotate_left(shift % s.len());
        rotated.reverse();
        prop_assert_eq!(forward, segment_hull_intersect(&a, &b, &rotated).unwrap());
        let sys = LinearSystem::segment_hull(&a, &b, &s).unwrap();
        prop_assert!(sys.verify(&segment_hull_certified(&a, &b, &s).unwrap()));
    }
}

/// A random subset of `{±1}^d` with a marked pair, plus a cube symmetry.
fn edge_case() -> impl Strategy<Value = (usize, Vec<u128>, Vec<usize>, u128)> {
    (3usize..=7).prop_flat_map(|d| {
        let size = 1u128 << d;
        (
            Just(d),
            prop::collection::btree_set(0..size, 2..=(size as usize).min(20))
                .prop_map(|s| s.into_iter().collect()),
            Just((0..d).collect::<Vec<_>>()).prop_shuffle(),
            0..size,
        )
    })
}

fn apply(d: usize, bits: u128, perm: &[usize], flip: u128) -> CubeVertex {
    let mut out = 0u128;
    for (i, &p) in perm.iter().enumerate() {
        out |= ((bits >> i) & 1) << p;
    }
    CubeVertex::new(d, out ^ flip).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn edge_oracle_is_cube_invariant((d, members, perm, flip) in edge_case(), i in 0usize..20, j in 0usize..20) {
        let n = members.len();
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        let x = VertexSet::new(d, members.iter().map(|&b| CubeVertex::new(d, b).unwrap()).collect()).unwrap();
        let (v, w) = (x.members()[i], x.members()[j]);
        let base = is_edge(&x, v, w).unwrap();
        let moved: Vec<CubeVertex> = members.iter().map(|&b| apply(d, b, &perm, flip)).collect();
        let y = VertexSet::new(d, moved).unwrap();
        prop_assert_eq!(base, is_edge(&y, apply(d, v.bits(), &perm, flip), apply(d, w.bits(), &perm, flip)).unwrap());
        prop_assert_eq!(base, is_edge(&x, w, v).unwrap());

        // Dropping a point outside the face leaves the answer unchanged.
        let free = v.bits() ^ w.bits();
        if let Some(out) = x.iter().find(|u| (u.bits() ^ v.bits()) & !free != 0) {
            let fewer: Vec<CubeVertex> = x.iter().copied().filter(|u| u != out).collect();
            let z = VertexSet::new(d, fewer).unwrap();
            prop_assert_eq!(base, is_edge(&z, v, w).unwrap());
        }
    }
}

/// Rank of a small integer matrix by fraction-free elimination.
fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            let pivot = m[rank].clone();
            let (f, g) = (m[i][c], pivot[c]);
            for (x, p) in m[i].iter_mut().zip(&pivot) {
                *x = *x * g - p * f;
            }
            let common = m[i].iter().fold(0i128, |a, &b| num_integer::gcd(a, b));
            if common > 1 {
                m[i].iter_mut().for_each(|x| *x /= common);
            }
        }
        rank += 1;
    }
    rank
}

fn nonzero_points(max_r: usize, max_len: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    points(max_r, max_len).prop_filter("nonzero, distinct", |pts| {
        pts.iter().all(|p| p.iter().any(|&x| x != 0)) && {
            let mut s = pts.clone();
            s.sort();
            s.dedup();
            s.len() == pts.len()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn chamber_count_invariances(pts in nonzero_points(4, 9), scales in prop::collection::vec(1i64..=4, 9), flips in prop::collection::vec(any::<bool>(), 9)) {
        let r = pts[0].len();
        let base = chamber_count(&VectorConfig::from_ints(r, &pts).unwrap()).unwrap().count;
        let moved: Vec<Vec<i64>> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| p.iter().map(|&x| x * scales[i] * if flips[i] { -1 } else { 1 }).collect())
            .collect();
        // Scaling may merge vectors into duplicates; deduplicate first.
        let mut uniq = moved.clone();
        uniq.sort();
        uniq.dedup();
        if uniq.len() == moved.len() {
            prop_assert_eq!(base, chamber_count(&VectorConfig::from_ints(r, &moved).unwrap()).unwrap().count);
        }
        prop_assert!(BigUint::from(base) <= harding_bound(r as u64, pts.len() as u64));
    }

    #[test]
    fn generic_small_arrangements_meet_the_bound(pts in nonzero_points(4, 5)) {
        let r = pts[0].len();
        let m = pts.len();
        prop_assume!(m <= r + 1);
        let size = m.min(r);
        let generic = (0u32..1 << m)
            .filter(|s| s.count_ones() as usize == size)
            .all(|s| {
                let pick: Vec<Vec<i64>> = (0..m).filter(|i| (s >> i) & 1 == 1).map(|i| pts[i].clone()).collect();
                rank(&pick) == size
            });
        prop_assume!(generic);
        let count = chamber_count(&VectorConfig::from_ints(r, &pts).unwrap()).unwrap().count;
        prop_assert_eq!(BigUint::from(count), harding_bound(r as u64, m as u64));
    }

    #[test]
    fn xi_sums_to_one(d in 1usize..=10, n_frac in 0.0f64..1.0, k_frac in 0.0f64..1.0) {
        let n = 2 + ((((1u64 << d) - 2) as f64) * n_frac) as usize;
        let k = 1 + ((d - 1) as f64 * k_frac).round() as usize;
        let total = (0..=max_obstructions(k, n))
            .fold(BigRational::zero(), |acc, m| acc + xi_exact(d, n, k, m).unwrap());
        prop_assert!(total.is_one());
    }

    #[test]
    fn normal_cdf_matches_quadrature(x in -8.0f64..8.0) {
        // Composite Simpson on the density from 0 to x.
        let steps = 4000;
        let h = x / steps as f64;
        let phi = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut sum = phi(0.0) + phi(x);
        for i in 1..steps {
            sum += phi(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let quad = 0.5 + sum * h / 3.0;
        prop_assert!((normal_cdf(x) - quad).abs() < 1e-10, "{} vs {}", normal_cdf(x), quad);
    }
}
