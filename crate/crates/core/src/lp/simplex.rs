//! Phase-one simplex on `A x = b, x >= 0` with integer data.
//!
//! The tableau is kept fraction-free (integer-preserving pivoting): after each
//! pivot every entry equals the true tableau value times the current basis
//! determinant `D`, and the update `(t_ij t_rs - t_is t_rj) / D_old` divides
//! exactly. Entries stay small for cube-derived data, so the solver first runs
//! on checked `i128` and only falls back to `BigInt` when a product overflows.
//! Bland's rule picks entering and leaving columns, which rules out cycling.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Integer data of `A x = b`, row-major.
#[derive(Clone, Debug)]
pub(crate) enum IntData {
    Small { a: Vec<i64>, b: Vec<i64> },
    Big { a: Vec<BigInt>, b: Vec<BigInt> },
}

#[derive(Clone, Debug)]
pub(crate) struct IntSystem {
    pub rows: usize,
    pub cols: usize,
    pub data: IntData,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum IntOutcome {
    /// `x_j = num_j / denom` for the listed basic columns, zero elsewhere.
    Feasible {
        basic: Vec<(usize, BigInt)>,
        denom: BigInt,
    },
    /// Integer `y` with `yᵀA >= 0` and `yᵀb < 0`.
    Infeasible { y: Vec<BigInt> },
}

impl IntSystem {
    pub fn small(rows: usize, cols: usize, a: Vec<i64>, b: Vec<i64>) -> Self {
        debug_assert_eq!(a.len(), rows * cols);
        debug_assert_eq!(b.len(), rows);
        Self {
            rows,
            cols,
            data: IntData::Small { a, b },
        }
    }

    pub fn big(rows: usize, cols: usize, a: Vec<BigInt>, b: Vec<BigInt>) -> Self {
        debug_assert_eq!(a.len(), rows * cols);
        debug_assert_eq!(b.len(), rows);
        Self {
            rows,
            cols,
            data: IntData::Big { a, b },
        }
    }

    pub fn solve(&self) -> IntOutcome {
        match Tableau::<i128>::build(self).and_then(|t| t.run()) {
            Some(out) => out,
            None => Tableau::<BigInt>::build(self)
                .and_then(|t| t.run())
                .expect("BigInt arithmetic never overflows"),
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.solve(), IntOutcome::Feasible { .. })
    }

    #[cfg(test)]
    pub fn entry(&self, i: usize, j: usize) -> BigInt {
        match &self.data {
            IntData::Small { a, .. } => BigInt::from(a[i * self.cols + j]),
            IntData::Big { a, .. } => a[i * self.cols + j].clone(),
        }
    }

    #[cfg(test)]
    pub fn rhs(&self, i: usize) -> BigInt {
        match &self.data {
            IntData::Small { b, .. } => BigInt::from(b[i]),
            IntData::Big { b, .. } => b[i].clone(),
        }
    }
}

/// Exact integer arithmetic, possibly bounded.
trait Exact: Clone + Sized {
    fn from_i64(v: i64) -> Self;
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn signum(&self) -> Ordering;
    fn neg(&self) -> Option<Self>;
    fn sub(&self, rhs: &Self) -> Option<Self>;
    /// `(a * b - c * e) / div`, where the division is known to be exact.
    fn cross_div(a: &Self, b: &Self, c: &Self, e: &Self, div: &Self) -> Option<Self>;
    /// Compare `a * b` with `c * e`.
    fn cmp_products(a: &Self, b: &Self, c: &Self, e: &Self) -> Option<Ordering>;
}

impl Exact for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn signum(&self) -> Ordering {
        self.cmp(&0)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn sub(&self, rhs: &Self) -> Option<Self> {
        self.checked_sub(*rhs)
    }
    #[inline]
    fn cross_div(a: &Self, b: &Self, c: &Self, e: &Self, div: &Self) -> Option<Self> {
        let num = a.checked_mul(*b)?.checked_sub(c.checked_mul(*e)?)?;
        if *div == 1 {
            Some(num)
        } else {
            debug_assert_eq!(num % div, 0);
            Some(num / div)
        }
    }
    fn cmp_products(a: &Self, b: &Self, c: &Self, e: &Self) -> Option<Ordering> {
        Some(a.checked_mul(*b)?.cmp(&c.checked_mul(*e)?))
    }
}

impl Exact for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn signum(&self) -> Ordering {
        self.sign().cmp(&num_bigint::Sign::NoSign)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn sub(&self, rhs: &Self) -> Option<Self> {
        Some(self - rhs)
    }
    fn cross_div(a: &Self, b: &Self, c: &Self, e: &Self, div: &Self) -> Option<Self> {
        let num = a * b - c * e;
        if div.is_one() {
            Some(num)
        } else {
            debug_assert!((&num % div).is_zero());
            Some(num / div)
        }
    }
    fn cmp_products(a: &Self, b: &Self, c: &Self, e: &Self) -> Option<Ordering> {
        Some((a * b).cmp(&(c * e)))
    }
}

struct Tableau<T> {
    m: usize,
    n: usize,
    /// Row stride: `n` structural columns, `m` artificials, one rhs.
    width: usize,
    /// `m` constraint rows followed by the reduced-cost row.
    t: Vec<T>,
    basis: Vec<usize>,
    /// Basis determinant; stays positive because pivots are positive.
    det: T,
    /// Row signs applied to make `b >= 0`.
    flip: Vec<bool>,
}

impl<T: Exact> Tableau<T> {
    fn build(sys: &IntSystem) -> Option<Self> {
        let (m, n) = (sys.rows, sys.cols);
        let width = n + m + 1;
        let zero = T::from_i64(0);
        let mut t = vec![zero.clone(); (m + 1) * width];
        let mut flip = vec![false; m];
        for i in 0..m {
            let (row_a, rhs): (Vec<T>, T) = match &sys.data {
                IntData::Small { a, b } => (
                    a[i * n..(i + 1) * n]
                        .iter()
                        .map(|&v| T::from_i64(v))
                        .collect(),
                    T::from_i64(b[i]),
                ),
                IntData::Big { a, b } => (
                    a[i * n..(i + 1) * n]
                        .iter()
                        .map(T::from_big)
                        .collect::<Option<Vec<_>>>()?,
                    T::from_big(&b[i])?,
                ),
            };
            flip[i] = rhs.signum() == Ordering::Less;
            let row = &mut t[i * width..(i + 1) * width];
            for (j, v) in row_a.into_iter().enumerate() {
                row[j] = if flip[i] { v.neg()? } else { v };
            }
            row[n + i] = T::from_i64(1);
            row[width - 1] = if flip[i] { rhs.neg()? } else { rhs };
        }
        // Reduced costs of the phase-one objective (sum of artificials).
        for j in (0..n).chain(std::iter::once(width - 1)) {
            let mut acc = zero.clone();
            for i in 0..m {
                acc = acc.sub(&t[i * width + j])?;
            }
            t[m * width + j] = acc;
        }
        Some(Self {
            m,
            n,
            width,
            t,
            basis: (n..n + m).collect(),
            det: T::from_i64(1),
            flip,
        })
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> &T {
        &self.t[i * self.width + j]
    }

    fn run(mut self) -> Option<IntOutcome> {
        let obj = self.m;
        let rhs = self.width - 1;
        loop {
            if self.at(obj, rhs).signum() == Ordering::Equal {
                break;
            }
            // Bland: lowest-index structural column with negative reduced cost.
            let Some(s) = (0..self.n).find(|&j| self.at(obj, j).signum() == Ordering::Less) else {
                break;
            };
            let mut leave: Option<usize> = None;
            for i in 0..self.m {
                if self.at(i, s).signum() != Ordering::Greater {
                    continue;
                }
                leave = Some(match leave {
                    None => i,
                    Some(r) => {
                        let ord = T::cmp_products(
                            self.at(i, rhs),
                            self.at(r, s),
                            self.at(r, rhs),
                            self.at(i, s),
                        )?;
                        match ord {
                            Ordering::Less => i,
                            Ordering::Equal if self.basis[i] < self.basis[r] => i,
                            _ => r,
                        }
                    }
                });
            }
            // Phase one is bounded below by zero, so a pivot row always exists.
            let r = leave.expect("phase-one objective is bounded");
            self.pivot(r, s)?;
        }
        Some(self.outcome())
    }

    fn pivot(&mut self, r: usize, s: usize) -> Option<()> {
        let w = self.width;
        let prs = self.at(r, s).clone();
        let pivot_row: Vec<T> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let pis = self.t[i * w + s].clone();
            let row = &mut self.t[i * w..(i + 1) * w];
            for j in 0..w {
                row[j] = T::cross_div(&row[j], &prs, &pis, &pivot_row[j], &self.det)?;
            }
        }
        self.det = prs;
        self.basis[r] = s;
        Some(())
    }

    fn outcome(&self) -> IntOutcome {
        let obj = self.m;
        let rhs = self.width - 1;
        if self.at(obj, rhs).signum() == Ordering::Equal {
            let basic = (0..self.m)
                .filter(|&i| self.basis[i] < self.n)
                .map(|i| (self.basis[i], self.at(i, rhs).to_big()))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            IntOutcome::Feasible {
                basic,
                denom: self.det.to_big(),
            }
        } else {
            let det = self.det.to_big();
            let y = (0..self.m)
                .map(|i| {
                    let z = self.at(obj, self.n + i).to_big() - &det;
                    if self.flip[i] {
                        -z
                    } else {
                        z
                    }
                })
                .collect();
            IntOutcome::Infeasible { y }
        }
    }
}

/// Checks a Farkas vector against the system exactly.
#[cfg(test)]
pub(crate) fn farkas_holds(sys: &IntSystem, y: &[BigInt]) -> bool {
    use num_traits::Signed;
    if y.len() != sys.rows {
        return false;
    }
    let yb: BigInt = (0..sys.rows).map(|i| &y[i] * sys.rhs(i)).sum();
    if !yb.is_negative() {
        return false;
    }
    (0..sys.cols).all(|j| {
        let v: BigInt = (0..sys.rows).map(|i| &y[i] * sys.entry(i, j)).sum();
        !v.is_negative()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn check(sys: &IntSystem) -> bool {
        match sys.solve() {
            IntOutcome::Feasible { basic, denom } => {
                assert!(denom.is_positive());
                let mut x = vec![BigInt::zero(); sys.cols];
                for (j, v) in basic {
                    assert!(!v.is_negative());
                    x[j] = v;
                }
                for i in 0..sys.rows {
                    let lhs: BigInt = (0..sys.cols).map(|j| sys.entry(i, j) * &x[j]).sum();
                    assert_eq!(lhs, sys.rhs(i) * &denom);
                }
                true
            }
            IntOutcome::Infeasible { y } => {
                assert!(farkas_holds(sys, &y));
                false
            }
        }
    }

    #[test]
    fn simple_feasible_and_infeasible() {
        // x1 + x2 = 2, x1 - x2 = 0
        assert!(check(&IntSystem::small(
            2,
            2,
            vec![1, 1, 1, -1],
            vec![2, 0]
        )));
        // x1 + x2 = -1 has no nonnegative solution
        assert!(!check(&IntSystem::small(1, 2, vec![1, 1], vec![-1])));
        // x1 = 1, x1 = 2
        assert!(!check(&IntSystem::small(2, 1, vec![1, 1], vec![1, 2])));
        // no rows
        assert!(check(&IntSystem::small(0, 3, vec![], vec![])));
        // no columns, nonzero rhs
        assert!(!check(&IntSystem::small(1, 0, vec![], vec![3])));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale-style degenerate data; Bland must terminate.
        let a = vec![
            1, 0, 0, 1, -4, -8, 4, //
            0, 1, 0, -1, 6, 1, -12, //
            0, 0, 1, 0, 0, 1, 0,
        ];
        assert!(check(&IntSystem::small(3, 7, a, vec![0, 0, 1])));
    }

    #[test]
    fn big_path_matches_small_path() {
        let a = vec![3, -2, 5, 1, 1, 1, -7, 4, 2];
        let b = vec![4, 3, -1];
        let small = IntSystem::small(3, 3, a.clone(), b.clone());
        let big = IntSystem::big(
            3,
            3,
            a.into_iter().map(BigInt::from).collect(),
            b.into_iter().map(BigInt::from).collect(),
        );
        assert_eq!(
            small.solve(),
            Tableau::<BigInt>::build(&big).unwrap().run().unwrap()
        );
        check(&small);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let huge: BigInt = BigInt::from(1u8) << 120;
        let sys = IntSystem::big(
            2,
            2,
            vec![huge.clone(), huge.clone(), huge.clone(), -huge.clone()],
            vec![huge.clone() * 3, huge.clone()],
        );
        assert!(check(&sys));
    }
}
