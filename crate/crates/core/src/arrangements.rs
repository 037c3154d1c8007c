//! Central hyperplane arrangements and the projected cube configuration.
//!
//! A vector `s != 0` defines the hyperplane `H(s) = {x : s·x = 0}`. The
//! chambers of the arrangement of a finite set `S` are in bijection with the
//! sign vectors `ε` for which some `h` has `ε_s (h·s) > 0` for all `s`, i.e.
//! for which the origin is outside `conv{ε_s s}`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::combinatorics::binomial;
use crate::cube::CubeVertex;
use crate::error::{Error, Result};
use crate::lp::{origin_in_conv, IntOutcome, IntSystem, Rational, RationalVector};

/// Largest `r` accepted by [`build_config_plus`].
pub const MAX_CONFIG_DIM: usize = 20;

/// Default cap on LP calls made by one [`chamber_count`].
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 22;

/// First `r` coordinates of the orthogonal projection of `v ∈ {±1}^{r+1}`
/// onto the hyperplane `Σ x_i = 0`.
pub fn phi_project(v: &CubeVertex) -> Result<RationalVector> {
    let mut full = project_to_sum_zero(v)?;
    full.pop();
    Ok(RationalVector::new(full))
}

/// The full `(r+1)`-coordinate projection `x - (Σx / (r+1)) 1`.
pub fn project_to_sum_zero(v: &CubeVertex) -> Result<Vec<Rational>> {
    let d = v.dim();
    if d < 2 {
        return Err(Error::InvalidParameters(
            "projection needs dimension >= 2".into(),
        ));
    }
    let plus = v.count_plus() as i64;
    if plus == 0 || plus == d as i64 {
        return Err(Error::InvalidParameters(
            "the vertices -1 and +1 project to the origin".into(),
        ));
    }
    let sum = 2 * plus - d as i64;
    Ok((0..d)
        .map(|i| {
            let x = v.coord(i) as i64;
            Rational::new(BigInt::from(x * d as i64 - sum), BigInt::from(d as i64))
        })
        .collect())
}

/// A finite configuration of nonzero, pairwise distinct vectors in `R^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorConfig {
    r: usize,
    vectors: Vec<RationalVector>,
}

impl VectorConfig {
    pub fn new(r: usize, vectors: Vec<RationalVector>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for v in &vectors {
            if v.dim() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: v.dim(),
                });
            }
            if v.is_zero() {
                return Err(Error::ZeroVector);
            }
            if !seen.insert(v.clone()) {
                return Err(Error::InvalidParameters(
                    "duplicate vector in configuration".into(),
                ));
            }
        }
        Ok(Self { r, vectors })
    }

    pub fn from_ints(r: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            r,
            vectors
                .iter()
                .map(|v| RationalVector::from_ints(v))
                .collect(),
        )
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[RationalVector] {
        &self.vectors
    }

    /// Sub-configuration picked by indices.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            r: self.r,
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
        }
    }

    /// One primitive integer vector per distinct hyperplane, sorted.
    pub fn hyperplanes(&self) -> Vec<Vec<BigInt>> {
        let mut lines: Vec<Vec<BigInt>> = self
            .vectors
            .iter()
            .filter_map(RationalVector::primitive_direction)
            .collect();
        lines.sort();
        lines.dedup();
        lines
    }
}

/// `φ(v)` for the vertices of `{±1}^{r+1}` other than `±1` whose last
/// coordinate is `+1`: `2^r - 1` vectors.
pub fn build_config_plus(r: usize) -> Result<VectorConfig> {
    if r == 0 || r > MAX_CONFIG_DIM {
        return Err(Error::InvalidParameters(format!(
            "config dimension r must be in 1..={MAX_CONFIG_DIM}, got {r}"
        )));
    }
    let last = 1u128 << r;
    let vectors = (0..(1u128 << r) - 1)
        .map(|low| {
            let v = CubeVertex::new(r + 1, low | last).expect("bits within dimension");
            phi_project(&v).expect("vertex is not ±1")
        })
        .collect();
    Ok(VectorConfig { r, vectors })
}

/// A chamber's side pattern, one `±1` per hyperplane.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(pub Vec<i8>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    SignSearch,
    BruteForce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChamberCount {
    pub count: u64,
    pub method: CountMethod,
}

/// Number of chambers, by depth-first search over sign prefixes.
pub fn chamber_count(s: &VectorConfig) -> Result<ChamberCount> {
    chamber_count_with_budget(s, DEFAULT_NODE_BUDGET)
}

pub fn chamber_count_with_budget(s: &VectorConfig, node_budget: u64) -> Result<ChamberCount> {
    let mut count = 0u64;
    search_chambers(s, node_budget, |_| count += 1)?;
    Ok(ChamberCount {
        count,
        method: CountMethod::SignSearch,
    })
}

/// Sign vectors of all chambers, over [`VectorConfig::hyperplanes`] order.
pub fn chamber_sign_vectors(s: &VectorConfig) -> Result<Vec<SignVector>> {
    let mut out = Vec::new();
    search_chambers(s, DEFAULT_NODE_BUDGET, |signs| {
        out.push(SignVector(signs.to_vec()))
    })?;
    Ok(out)
}

fn search_chambers(s: &VectorConfig, node_budget: u64, mut visit: impl FnMut(&[i8])) -> Result<()> {
    let planes = s.hyperplanes();
    if planes.len() > 64 {
        return Err(Error::BudgetExceeded {
            required: planes.len() as u128,
            budget: 64,
        });
    }
    let mut search = SignSearch {
        r: s.r(),
        planes,
        signs: Vec::new(),
        lp_calls: 0,
        node_budget,
    };
    // Root witness: h = 0 separates the empty prefix.
    let root = vec![BigInt::zero(); s.r()];
    search.descend(&root, &mut visit)
}

struct SignSearch {
    r: usize,
    planes: Vec<Vec<BigInt>>,
    signs: Vec<i8>,
    lp_calls: u64,
    node_budget: u64,
}

impl SignSearch {
    /// `h` (up to a positive factor) strictly separates the current prefix.
    fn descend(&mut self, h: &[BigInt], visit: &mut impl FnMut(&[i8])) -> Result<()> {
        let depth = self.signs.len();
        if depth == self.planes.len() {
            visit(&self.signs);
            return Ok(());
        }
        let dot: BigInt = self.planes[depth].iter().zip(h).map(|(a, x)| a * x).sum();
        for sign in [1i8, -1] {
            self.signs.push(sign);
            // A parent witness already on the correct side needs no LP.
            let reuse = (sign > 0 && dot.is_positive()) || (sign < 0 && dot.is_negative());
            let next = if reuse {
                Some(h.to_vec())
            } else {
                self.lp_calls += 1;
                if self.lp_calls > self.node_budget {
                    return Err(Error::BudgetExceeded {
                        required: self.lp_calls as u128,
                        budget: self.node_budget as u128,
                    });
                }
                self.separate()
            };
            if let Some(h2) = next {
                self.descend(&h2, visit)?;
            }
            self.signs.pop();
        }
        Ok(())
    }

    /// Strict separation of the signed prefix via `(h⁺ - h⁻)·(ε s) - t = 1`.
    /// Returns the numerators of `h`; its denominator is positive.
    fn separate(&self) -> Option<Vec<BigInt>> {
        let r = self.r;
        let m = self.signs.len();
        let cols = 2 * r + m;
        let small: Option<Vec<i64>> = (|| {
            let mut a = vec![0i64; m * cols];
            for (i, &sign) in self.signs.iter().enumerate() {
                let row = &mut a[i * cols..(i + 1) * cols];
                for (c, x) in self.planes[i].iter().enumerate() {
                    let v = x.to_i64()?.checked_mul(sign as i64)?;
                    row[c] = v;
                    row[r + c] = v.checked_neg()?;
                }
                row[2 * r + i] = -1;
            }
            Some(a)
        })();
        let sys = match small {
            Some(a) => IntSystem::small(m, cols, a, vec![1; m]),
            None => {
                let mut a = vec![BigInt::zero(); m * cols];
                for (i, &sign) in self.signs.iter().enumerate() {
                    for (c, x) in self.planes[i].iter().enumerate() {
                        let v = if sign > 0 { x.clone() } else { -x };
                        a[i * cols + r + c] = -&v;
                        a[i * cols + c] = v;
                    }
                    a[i * cols + 2 * r + i] = -BigInt::one();
                }
                IntSystem::big(m, cols, a, vec![BigInt::one(); m])
            }
        };
        match sys.solve() {
            IntOutcome::Feasible { basic, .. } => {
                let mut h = vec![BigInt::zero(); r];
                for (j, v) in basic {
                    if j < r {
                        h[j] += v;
                    } else if j < 2 * r {
                        h[j - r] -= v;
                    }
                }
                Some(h)
            }
            IntOutcome::Infeasible { .. } => None,
        }
    }
}

/// Literal count of sign vectors `ε ∈ {±1}^S` with `0 ∉ conv{ε_s s}`.
pub fn chamber_count_bruteforce(s: &VectorConfig) -> Result<ChamberCount> {
    let m = s.len();
    if m > 14 {
        return Err(Error::BudgetExceeded {
            required: m as u128,
            budget: 14,
        });
    }
    let mut count = 0;
    for mask in 0u32..1 << m {
        let signed: Vec<RationalVector> = s
            .vectors()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if (mask >> i) & 1 == 1 {
                    v.neg()
                } else {
                    v.clone()
                }
            })
            .collect();
        if !origin_in_conv(&signed)? {
            count += 1;
        }
    }
    Ok(ChamberCount {
        count,
        method: CountMethod::BruteForce,
    })
}

/// `b(p, q) = Σ_{i=0}^{p} C(q, i)`; zero for `p < 0`, `2^q` for `p >= q`.
pub fn partial_binomial_sum(p: i64, q: u64) -> BigUint {
    if p < 0 {
        return BigUint::zero();
    }
    if p as u64 >= q {
        return BigUint::one() << q;
    }
    (0..=p).map(|i| binomial(q, i)).sum()
}

/// Upper bound `2 b(r-1, m-1)` on the chambers of `m` central hyperplanes in
/// `R^r`. An empty arrangement has one chamber.
pub fn harding_bound(r: u64, m: u64) -> BigUint {
    if m == 0 {
        return BigUint::one();
    }
    partial_binomial_sum(r as i64 - 1, m - 1) * 2u32
}

/// Standard normal CDF, `Φ(x) = ½ erfc(-x/√2)`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `b(⌊q/2 + μ√q⌋, q) / 2^q`, computed exactly then rounded.
pub fn moivre_laplace_ratio(q: u64, mu: f64) -> f64 {
    let cut = (q as f64 / 2.0 + mu * (q as f64).sqrt()).floor();
    let p = if cut < 0.0 {
        -1
    } else if cut >= q as f64 {
        q as i64
    } else {
        cut as i64
    };
    let num = BigInt::from(partial_binomial_sum(p, q));
    let den = BigInt::one() << q;
    BigRational::new(num, den).to_f64().unwrap_or(f64::NAN)
}

/// Random integer configuration with entries in `[-range, range]`.
pub fn random_integer_config<R: Rng + ?Sized>(
    r: usize,
    m: usize,
    range: i64,
    rng: &mut R,
) -> Result<VectorConfig> {
    if r == 0 || range < 1 {
        return Err(Error::InvalidParameters(
            "need r >= 1 and range >= 1".into(),
        ));
    }
    let distinct = (2 * range as u128 + 1).saturating_pow(r as u32) - 1;
    if m as u128 > distinct {
        return Err(Error::InvalidParameters(format!(
            "cannot draw {m} distinct vectors"
        )));
    }
    let mut vectors: BTreeMap<Vec<i64>, ()> = BTreeMap::new();
    let mut order = Vec::with_capacity(m);
    while order.len() < m {
        let v: Vec<i64> = (0..r).map(|_| rng.random_range(-range..=range)).collect();
        if v.iter().all(|&x| x == 0) || vectors.contains_key(&v) {
            continue;
        }
        vectors.insert(v.clone(), ());
        order.push(v);
    }
    VectorConfig::from_ints(r, &order)
}

/// `m` pairwise non-parallel integer directions in the plane.
pub fn random_planar_generic<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<VectorConfig> {
    let range = 1000i64;
    let mut lines = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let v = vec![
            rng.random_range(-range..=range),
            rng.random_range(-range..=range),
        ];
        let Some(dir) = RationalVector::from_ints(&v).primitive_direction() else {
            continue;
        };
        if lines.insert(dir) {
            out.push(v);
        }
    }
    VectorConfig::from_ints(2, &out)
}
