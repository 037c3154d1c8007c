//! Exact rational feasibility with certificates.
//!
//! Every geometric predicate in the crate (edge tests, origin-in-hull tests,
//! chamber sign vectors) reduces to deciding `A x = b, x >= 0` over the
//! rationals. A feasible answer carries a solution, an infeasible one carries
//! Farkas multipliers `y` with `yᵀA >= 0` and `yᵀb < 0`. Both can be checked by
//! exact substitution.

mod simplex;

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
pub(crate) use simplex::{IntOutcome, IntSystem};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        Self(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![Rational::zero(); dim])
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        Self(
            entries
                .iter()
                .map(|&v| Rational::from_integer(v.into()))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &Self) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self(self.0.iter().map(|x| x * c).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    /// Positive multiple with coprime integer entries and positive leading
    /// nonzero entry; equal for two vectors iff they span the same line.
    pub fn primitive_direction(&self) -> Option<Vec<BigInt>> {
        let lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|x| (x * &lcm).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return None;
        }
        let lead_neg = ints.iter().find(|x| !x.is_zero())?.is_negative();
        Some(
            ints.into_iter()
                .map(|x| if lead_neg { -x / &g } else { x / &g })
                .collect(),
        )
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl fmt::Debug for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Outcome of a feasibility query. What the witness and the certificate mean
/// depends on the query that produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible { witness: RationalVector },
    Infeasible { certificate: Vec<Rational> },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }

    pub fn witness(&self) -> Option<&RationalVector> {
        match self {
            Self::Feasible { witness } => Some(witness),
            Self::Infeasible { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&[Rational]> {
        match self {
            Self::Feasible { .. } => None,
            Self::Infeasible { certificate } => Some(certificate),
        }
    }
}

/// `A x = b, x >= 0` over the rationals.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    rows: usize,
    cols: usize,
    a: Vec<Rational>,
    b: Vec<Rational>,
}

impl LinearSystem {
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Result<Self> {
        let rows = a.len();
        if b.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: b.len(),
            });
        }
        let cols = a.first().map_or(0, Vec::len);
        if let Some(bad) = a.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            a: a.into_iter().flatten().collect(),
            b,
        })
    }

    /// `λ >= 0, Σλ = 1, Σ λ_s s = 0`: the origin lies in `conv S`.
    pub fn convex_origin(points: &[RationalVector]) -> Result<Self> {
        let dim = common_dim(points.iter())?.unwrap_or(0);
        let mut a = vec![vec![Rational::zero(); points.len()]; dim + 1];
        for (j, s) in points.iter().enumerate() {
            for (i, x) in s.entries().iter().enumerate() {
                a[i][j] = x.clone();
            }
            a[dim][j] = Rational::one();
        }
        let mut b = vec![Rational::zero(); dim + 1];
        b[dim] = Rational::one();
        Self::new(a, b)
    }

    /// Variables `(μ_a, μ_b, λ_s...)`: `μ_a a + μ_b b = Σ λ_s s`,
    /// `μ_a + μ_b = 1`, `Σ λ = 1`.
    pub fn segment_hull(
        a: &RationalVector,
        b: &RationalVector,
        points: &[RationalVector],
    ) -> Result<Self> {
        let dim = a.dim();
        common_dim(std::iter::once(a).chain(std::iter::once(b)).chain(points))?;
        let cols = 2 + points.len();
        let mut rows = vec![vec![Rational::zero(); cols]; dim + 2];
        for i in 0..dim {
            rows[i][0] = a[i].clone();
            rows[i][1] = b[i].clone();
            for (j, s) in points.iter().enumerate() {
                rows[i][2 + j] = -&s[i];
            }
        }
        rows[dim][0] = Rational::one();
        rows[dim][1] = Rational::one();
        for j in 0..points.len() {
            rows[dim + 1][2 + j] = Rational::one();
        }
        let mut rhs = vec![Rational::zero(); dim + 2];
        rhs[dim] = Rational::one();
        rhs[dim + 1] = Rational::one();
        Self::new(rows, rhs)
    }

    /// Variables `(h⁺, h⁻, slack)`: `(h⁺ - h⁻)·s - slack_s = 1` for every `s`.
    ///
    /// The strict system `h·s > 0` is homogeneous, so it is solvable iff this
    /// one is (scale any strict solution until the smallest product reaches 1).
    pub fn strict_separation(points: &[RationalVector]) -> Result<Self> {
        let dim = common_dim(points.iter())?.unwrap_or(0);
        let m = points.len();
        let cols = 2 * dim + m;
        let mut rows = vec![vec![Rational::zero(); cols]; m];
        for (i, s) in points.iter().enumerate() {
            for (c, x) in s.entries().iter().enumerate() {
                rows[i][c] = x.clone();
                rows[i][dim + c] = -x;
            }
            rows[i][2 * dim + i] = -Rational::one();
        }
        Self::new(rows, vec![Rational::one(); m])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Witness: `x` (length `cols`). Certificate: `y` (length `rows`).
    pub fn solve(&self) -> FeasibilityResult {
        let (sys, scales) = self.to_integer();
        match sys.solve() {
            IntOutcome::Feasible { basic, denom } => {
                let mut x = vec![Rational::zero(); self.cols];
                for (j, num) in basic {
                    x[j] = Rational::new(num, denom.clone());
                }
                FeasibilityResult::Feasible {
                    witness: RationalVector(x),
                }
            }
            IntOutcome::Infeasible { y } => {
                let certificate = y
                    .into_iter()
                    .zip(scales)
                    .map(|(yi, si)| Rational::from_integer(yi * si))
                    .collect();
                FeasibilityResult::Infeasible { certificate }
            }
        }
    }

    /// Exact substitution check of a result produced by [`Self::solve`].
    pub fn verify(&self, result: &FeasibilityResult) -> bool {
        match result {
            FeasibilityResult::Feasible { witness } => {
                witness.dim() == self.cols
                    && witness.entries().iter().all(|x| !x.is_negative())
                    && (0..self.rows).all(|i| {
                        let lhs = (0..self.cols).fold(Rational::zero(), |acc, j| {
                            acc + &self.a[i * self.cols + j] * &witness[j]
                        });
                        lhs == self.b[i]
                    })
            }
            FeasibilityResult::Infeasible { certificate: y } => {
                if y.len() != self.rows {
                    return false;
                }
                let yb = (0..self.rows).fold(Rational::zero(), |acc, i| acc + &y[i] * &self.b[i]);
                yb.is_negative()
                    && (0..self.cols).all(|j| {
                        let v = (0..self.rows).fold(Rational::zero(), |acc, i| {
                            acc + &y[i] * &self.a[i * self.cols + j]
                        });
                        !v.is_negative()
                    })
            }
        }
    }

    /// Scale each row by the lcm of its denominators.
    fn to_integer(&self) -> (IntSystem, Vec<BigInt>) {
        let mut a = Vec::with_capacity(self.a.len());
        let mut b = Vec::with_capacity(self.rows);
        let mut scales = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row = &self.a[i * self.cols..(i + 1) * self.cols];
            let lcm = row
                .iter()
                .chain(std::iter::once(&self.b[i]))
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            a.extend(row.iter().map(|x| (x * &lcm).to_integer()));
            b.push((&self.b[i] * &lcm).to_integer());
            scales.push(lcm);
        }
        (IntSystem::big(self.rows, self.cols, a, b), scales)
    }
}

fn common_dim<'a>(mut vs: impl Iterator<Item = &'a RationalVector>) -> Result<Option<usize>> {
    let Some(first) = vs.next() else {
        return Ok(None);
    };
    let dim = first.dim();
    for v in vs {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
    }
    Ok(Some(dim))
}

/// Decides whether some `h` has `h·s > 0` for every `s` in `points`.
///
/// Feasible: the witness is such an `h`. Infeasible: the certificate holds
/// convex weights `λ >= 0`, `Σλ = 1`, with `Σ λ_s s = 0`.
pub fn strict_separation(points: &[RationalVector]) -> Result<FeasibilityResult> {
    let dim = common_dim(points.iter())?.unwrap_or(0);
    let system = LinearSystem::strict_separation(points)?;
    Ok(match system.solve() {
        FeasibilityResult::Feasible { witness } => {
            let x = witness.entries();
            let h = (0..dim).map(|c| &x[c] - &x[dim + c]).collect();
            FeasibilityResult::Feasible {
                witness: RationalVector(h),
            }
        }
        FeasibilityResult::Infeasible { certificate } => {
            // yᵀA >= 0 forces Σ y_s s = 0 and y <= 0, and yᵀb < 0 gives Σ y < 0.
            let total: Rational = certificate.iter().fold(Rational::zero(), |acc, y| acc - y);
            let weights = certificate.iter().map(|y| -y / &total).collect();
            FeasibilityResult::Infeasible {
                certificate: weights,
            }
        }
    })
}

/// Exact check of a [`strict_separation`] result.
pub fn check_separation(points: &[RationalVector], result: &FeasibilityResult) -> bool {
    match result {
        FeasibilityResult::Feasible { witness } => points
            .iter()
            .all(|s| s.dim() == witness.dim() && s.dot(witness).is_positive()),
        FeasibilityResult::Infeasible { certificate } => {
            if certificate.len() != points.len() || points.is_empty() {
                return false;
            }
            let dim = points[0].dim();
            let total = certificate.iter().fold(Rational::zero(), |acc, x| acc + x);
            let combo = (0..dim).all(|c| {
                points
                    .iter()
                    .zip(certificate)
                    .fold(Rational::zero(), |acc, (s, l)| acc + &s[c] * l)
                    .is_zero()
            });
            certificate.iter().all(|l| !l.is_negative()) && total.is_one() && combo
        }
    }
}

/// Whether the origin lies in the convex hull of `points`.
pub fn origin_in_conv(points: &[RationalVector]) -> Result<bool> {
    if points.is_empty() {
        return Ok(false);
    }
    Ok(origin_in_conv_certified(points)?.is_feasible())
}

/// Feasible: convex weights reaching the origin. Infeasible: Farkas `y` of
/// [`LinearSystem::convex_origin`]; its first `dim` entries `h` satisfy
/// `h·s >= -y_last > 0` for every point.
pub fn origin_in_conv_certified(points: &[RationalVector]) -> Result<FeasibilityResult> {
    Ok(LinearSystem::convex_origin(points)?.solve())
}

/// Whether the segment `conv{a, b}` meets `conv S`.
pub fn segment_hull_intersect(
    a: &RationalVector,
    b: &RationalVector,
    points: &[RationalVector],
) -> Result<bool> {
    Ok(segment_hull_certified(a, b, points)?.is_feasible())
}

/// Result on [`LinearSystem::segment_hull`].
pub fn segment_hull_certified(
    a: &RationalVector,
    b: &RationalVector,
    points: &[RationalVector],
) -> Result<FeasibilityResult> {
    if points.is_empty() {
        common_dim([a, b].into_iter())?;
    }
    Ok(LinearSystem::segment_hull(a, b, points)?.solve())
}

/// Segment/hull test on the face coordinates of cube points.
///
/// `a` and `b` are antipodal on the `k` selected coordinates and every point
/// of `points` is given by its `k` face bits. Coordinates outside the face are
/// shared by all points and drop out of the equations.
pub(crate) fn face_segment_meets_hull(k: usize, a_bits: u128, points: &[u128]) -> bool {
    if points.is_empty() {
        return false;
    }
    let m = points.len();
    let cols = 2 + m;
    let rows = k + 2;
    let sign = |bits: u128, i: usize| if (bits >> i) & 1 == 1 { 1i64 } else { -1 };
    let mut a = vec![0i64; rows * cols];
    for i in 0..k {
        let row = &mut a[i * cols..(i + 1) * cols];
        row[0] = sign(a_bits, i);
        row[1] = -row[0];
        for (j, &p) in points.iter().enumerate() {
            row[2 + j] = -sign(p, i);
        }
    }
    a[k * cols] = 1;
    a[k * cols + 1] = 1;
    for j in 0..m {
        a[(k + 1) * cols + 2 + j] = 1;
    }
    let mut b = vec![0i64; rows];
    b[k] = 1;
    b[k + 1] = 1;
    IntSystem::small(rows, cols, a, b).is_feasible()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(x: &[i64]) -> RationalVector {
        RationalVector::from_ints(x)
    }

    #[test]
    fn strict_separation_examples() {
        let empty = strict_separation(&[]).unwrap();
        assert!(empty.is_feasible());

        let opposite = [rv(&[1, 0]), rv(&[-1, 0])];
        let res = strict_separation(&opposite).unwrap();
        assert!(!res.is_feasible());
        assert!(check_separation(&opposite, &res));

        let fan = [rv(&[1, 0]), rv(&[1, 1]), rv(&[0, 1])];
        let res = strict_separation(&fan).unwrap();
        assert!(res.is_feasible());
        assert!(check_separation(&fan, &res));
        assert!(check_separation(
            &fan,
            &FeasibilityResult::Feasible {
                witness: rv(&[1, 1])
            }
        ));

        assert!(matches!(
            strict_separation(&[rv(&[1]), rv(&[1, 2])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn origin_in_conv_examples() {
        assert!(!origin_in_conv(&[]).unwrap());
        assert!(origin_in_conv(&[rv(&[2, -3]), rv(&[-2, 3])]).unwrap());
        assert!(!origin_in_conv(&[rv(&[1, 0]), rv(&[0, 1])]).unwrap());
        assert!(origin_in_conv(&[rv(&[1, 0]), rv(&[2])]).is_err());
    }

    #[test]
    fn segment_examples() {
        let a = rv(&[-1, -1]);
        let b = rv(&[1, 1]);
        assert!(!segment_hull_intersect(&a, &b, &[]).unwrap());
        assert!(segment_hull_intersect(&a, &b, &[rv(&[-1, 1]), rv(&[1, -1])]).unwrap());
        assert!(!segment_hull_intersect(&a, &b, &[rv(&[-1, 1])]).unwrap());
        assert!(segment_hull_intersect(&a, &b, &[rv(&[1])]).is_err());

        for pts in [vec![rv(&[-1, 1]), rv(&[1, -1])], vec![rv(&[-1, 1])]] {
            let sys = LinearSystem::segment_hull(&a, &b, &pts).unwrap();
            assert!(sys.verify(&sys.solve()));
        }
    }

    #[test]
    fn face_fast_path_matches_rational_path() {
        // Full square: diagonal {--,++} against {-+,+-}.
        assert!(face_segment_meets_hull(2, 0b00, &[0b10, 0b01]));
        assert!(!face_segment_meets_hull(2, 0b00, &[0b10]));
        assert!(!face_segment_meets_hull(3, 0b000, &[]));
    }

    #[test]
    fn rational_entries_are_scaled() {
        let s = [
            RationalVector::new(vec![rational(1, 3), rational(-2, 3)]),
            RationalVector::new(vec![rational(-1, 6), rational(1, 3)]),
        ];
        assert!(origin_in_conv(&s).unwrap());
        let sys = LinearSystem::strict_separation(&s).unwrap();
        let res = sys.solve();
        assert!(!res.is_feasible());
        assert!(sys.verify(&res));
    }

    #[test]
    fn primitive_direction_identifies_lines() {
        let a = RationalVector::new(vec![rational(2, 3), rational(-4, 3)]);
        let b = rv(&[-1, 2]);
        assert_eq!(a.primitive_direction(), b.primitive_direction());
        assert_eq!(rv(&[0, 0]).primitive_direction(), None);
    }
}
