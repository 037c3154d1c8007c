//! Edge oracle and graph density of ±1-polytopes.
//!
//! Two vertices `v, w` of `conv X` span an edge iff the segment `conv{v,w}`
//! misses the hull of the other points of `X` lying in the smallest cube face
//! containing `v` and `w`. Those points are found by masking, never by walking
//! the face.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::cube::sample_pair;
use crate::cube::{CubeVertex, SubcubeFace, VertexSet};
use crate::error::{Error, Result};
use crate::lp::face_segment_meets_hull;
use crate::rng::{blocks, stream};
use crate::stats::{wilson, Estimate, Z95};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityMode {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub n: usize,
    /// Pairs tested: all `C(n,2)` in exact mode, the sample budget otherwise.
    pub pairs: u64,
    pub edge_count: u64,
    pub density: BigRational,
    pub mode: DensityMode,
    pub ci: Option<(f64, f64)>,
    pub seed: u64,
}

impl DensityReport {
    pub fn estimate(&self) -> Estimate {
        match self.mode {
            DensityMode::Exact => Estimate::exact(self.density.clone(), self.pairs),
            DensityMode::Sampled => Estimate::proportion(self.edge_count, self.pairs, self.seed),
        }
    }
}

/// Gathers the bits of `bits` selected by `mask` into the low positions.
#[inline]
pub(crate) fn compress(bits: u128, mask: u128) -> u128 {
    let mut out = 0u128;
    let mut m = mask;
    let mut k = 0;
    while m != 0 {
        let low = m.trailing_zeros();
        out |= ((bits >> low) & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Edge test assuming `v != w` and both in `x`.
pub(crate) fn is_edge_unchecked(x: &[CubeVertex], v: CubeVertex, w: CubeVertex) -> bool {
    let free = v.bits() ^ w.bits();
    let obstructions: Vec<u128> = x
        .iter()
        .filter(|u| (u.bits() ^ v.bits()) & !free == 0 && **u != v && **u != w)
        .map(|u| compress(u.bits(), free))
        .collect();
    !face_segment_meets_hull(
        free.count_ones() as usize,
        compress(v.bits(), free),
        &obstructions,
    )
}

pub fn is_edge(x: &VertexSet, v: CubeVertex, w: CubeVertex) -> Result<bool> {
    if !x.contains(&v) || !x.contains(&w) {
        return Err(Error::NotAMember);
    }
    SubcubeFace::new(v, w)?;
    Ok(is_edge_unchecked(x.members(), v, w))
}

pub fn graph_density_exact(x: &VertexSet, pair_budget: u64) -> Result<DensityReport> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidParameters(format!(
            "density needs n >= 2, got {n}"
        )));
    }
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    if pairs > pair_budget {
        return Err(Error::BudgetExceeded {
            required: pairs as u128,
            budget: pair_budget as u128,
        });
    }
    let members = x.members();
    let edge_count: u64 = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .filter(|&j| is_edge_unchecked(members, members[i], members[j]))
                .count() as u64
        })
        .sum();
    Ok(DensityReport {
        n,
        pairs,
        edge_count,
        density: BigRational::new(BigInt::from(edge_count), BigInt::from(pairs)),
        mode: DensityMode::Exact,
        ci: None,
        seed: 0,
    })
}

/// Fraction of `pair_budget` uniformly drawn pairs (with replacement) that are
/// edges, with a Wilson 95% interval.
pub fn graph_density_sampled(x: &VertexSet, pair_budget: u64, seed: u64) -> Result<DensityReport> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidParameters(format!(
            "density needs n >= 2, got {n}"
        )));
    }
    if pair_budget == 0 {
        return Err(Error::InvalidParameters(
            "pair budget must be positive".into(),
        ));
    }
    let edge_count: u64 = blocks(pair_budget)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(id, len)| {
            let mut rng = stream(seed, id);
            let mut hits = 0u64;
            for _ in 0..len {
                let (v, w) = sample_pair(x, &mut rng).expect("n >= 2");
                hits += is_edge_unchecked(x.members(), v, w) as u64;
            }
            hits
        })
        .sum();
    Ok(DensityReport {
        n,
        pairs: pair_budget,
        edge_count,
        density: BigRational::new(BigInt::from(edge_count), BigInt::from(pair_budget)),
        mode: DensityMode::Sampled,
        ci: Some(wilson(edge_count, pair_budget, Z95)),
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{cut_polytope_vertices, sample_vertex_set};
    use crate::lp::{segment_hull_intersect, RationalVector};

    fn v(signs: &[i8]) -> CubeVertex {
        CubeVertex::from_signs(signs).unwrap()
    }

    fn to_rv(u: &CubeVertex) -> RationalVector {
        RationalVector::from_ints(&u.signs().iter().map(|&s| s as i64).collect::<Vec<_>>())
    }

    /// Edge test through the rational route on full coordinates.
    fn is_edge_reference(x: &VertexSet, a: CubeVertex, b: CubeVertex) -> bool {
        let face = SubcubeFace::new(a, b).unwrap();
        let obs: Vec<_> = x
            .iter()
            .filter(|u| face.contains_interior(u))
            .map(to_rv)
            .collect();
        !segment_hull_intersect(&to_rv(&a), &to_rv(&b), &obs).unwrap()
    }

    #[test]
    fn compress_gathers_bits() {
        assert_eq!(compress(0b1010_1100, 0b1111_0000), 0b1010);
        assert_eq!(compress(0b101, 0b101), 0b11);
        assert_eq!(compress(u128::MAX, 0), 0);
    }

    #[test]
    fn edge_examples() {
        let sq = VertexSet::full_cube(2).unwrap();
        assert!(!is_edge(&sq, v(&[-1, -1]), v(&[1, 1])).unwrap());
        assert!(is_edge(&sq, v(&[-1, -1]), v(&[1, -1])).unwrap());

        let cut = cut_polytope_vertices(4).unwrap();
        for (i, &a) in cut.iter().enumerate() {
            for &b in &cut.members()[i + 1..] {
                assert!(is_edge(&cut, a, b).unwrap());
            }
        }

        let partial = VertexSet::new(2, vec![v(&[-1, -1]), v(&[1, 1]), v(&[1, -1])]).unwrap();
        assert!(is_edge(&partial, v(&[-1, -1]), v(&[1, 1])).unwrap());
        assert_eq!(
            is_edge(&partial, v(&[-1, -1]), v(&[-1, 1])),
            Err(Error::NotAMember)
        );
        assert_eq!(
            is_edge(&partial, v(&[1, 1]), v(&[1, 1])),
            Err(Error::DegenerateFace)
        );
    }

    #[test]
    fn fast_path_agrees_with_rational_path() {
        let mut rng = stream(11, 0);
        for trial in 0..60 {
            let d = 3 + trial % 4;
            let n = 3 + trial % 9;
            let x = sample_vertex_set(d, n.min(1 << d), &mut rng).unwrap();
            let (a, b) = sample_pair(&x, &mut rng).unwrap();
            assert_eq!(is_edge(&x, a, b).unwrap(), is_edge_reference(&x, a, b));
            assert_eq!(is_edge(&x, a, b).unwrap(), is_edge(&x, b, a).unwrap());
        }
    }

    #[test]
    fn cube_densities() {
        for d in 2..=4usize {
            let r = graph_density_exact(&VertexSet::full_cube(d).unwrap(), 1 << 20).unwrap();
            assert_eq!(
                r.density,
                BigRational::new(BigInt::from(d), BigInt::from((1u64 << d) - 1))
            );
            assert!(r.ci.is_none());
        }
        let pair = VertexSet::new(3, vec![v(&[1, 1, 1]), v(&[-1, -1, -1])]).unwrap();
        assert_eq!(graph_density_exact(&pair, 10).unwrap().edge_count, 1);
        assert!(matches!(
            graph_density_exact(&VertexSet::full_cube(4).unwrap(), 10),
            Err(Error::BudgetExceeded { required: 120, .. })
        ));
    }

    #[test]
    fn sampled_density() {
        let cube = VertexSet::full_cube(3).unwrap();
        let r = graph_density_sampled(&cube, 10_000, 3).unwrap();
        let p: f64 = 3.0 / 7.0;
        let sigma = (p * (1.0 - p) / 10_000.0).sqrt();
        let est = r.estimate().value;
        assert!((est - p).abs() <= 3.0 * sigma, "{est}");
        assert_eq!(r, graph_density_sampled(&cube, 10_000, 3).unwrap());

        let cut = cut_polytope_vertices(4).unwrap();
        let r = graph_density_sampled(&cut, 500, 1).unwrap();
        assert_eq!(r.edge_count, 500);
        assert_eq!(r.ci.unwrap().1, 1.0);
    }
}
