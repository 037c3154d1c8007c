//! Threshold sweeps over `τ(k, ⌈ratio·k⌉)` and over the graph density at
//! `n ≈ base^d`.

use crate::error::{Error, Result};
use crate::rng::SeedMode;
use crate::stats::Estimate;

use super::pi::pi_mc;
use super::tau::{star_size, tau_mc, MAX_K};

/// A row that could not be computed, with the reason.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkippedRow {
    pub params: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep<R> {
    pub rows: Vec<R>,
    pub skipped: Vec<SkippedRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TauSweepRow {
    pub k: usize,
    pub ratio: f64,
    pub m: usize,
    pub estimate: Estimate,
}

/// Seed for the `τ` sweep point `(k, m)`.
pub fn tau_row_seed(mode: SeedMode, seed: u64, k: usize, m: usize) -> u64 {
    mode.seed(seed, ((k as u64) << 32) | m as u64)
}

/// `τ_mc(k, ⌈ratio·k⌉)` for each `k` and `ratio`, in input order.
/// Points with `m > 2^k - 2` are skipped.
pub fn tau_threshold_sweep(
    k_list: &[usize],
    ratio_list: &[f64],
    samples: u64,
    seed: u64,
    mode: SeedMode,
) -> Result<Sweep<TauSweepRow>> {
    let mut out = Sweep {
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for &k in k_list {
        for &ratio in ratio_list {
            let params = format!("k={k} ratio={ratio}");
            if !(ratio.is_finite() && ratio >= 0.0) || k == 0 || k > MAX_K {
                out.skipped.push(SkippedRow {
                    params,
                    reason: "invalid k or ratio".into(),
                });
                continue;
            }
            let m = (ratio * k as f64).ceil() as u64;
            if m > star_size(k) {
                out.skipped.push(SkippedRow {
                    params,
                    reason: format!("m = {m} exceeds 2^k - 2"),
                });
                continue;
            }
            let m = m as usize;
            let estimate = tau_mc(k, m, samples, tau_row_seed(mode, seed, k, m))?;
            out.rows.push(TauSweepRow {
                k,
                ratio,
                m,
                estimate,
            });
        }
    }
    Ok(out)
}

/// How `base^d` becomes a subset size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Rounding {
    #[default]
    Nearest,
    Floor,
    Ceil,
    /// Floor for bases below `√2`, ceiling otherwise.
    Outward,
}

impl Rounding {
    pub fn apply(self, base: f64, d: usize) -> f64 {
        let x = base.powi(d as i32);
        match self {
            Rounding::Nearest => x.round(),
            Rounding::Floor => x.floor(),
            Rounding::Ceil => x.ceil(),
            Rounding::Outward if base < std::f64::consts::SQRT_2 => x.floor(),
            Rounding::Outward => x.ceil(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Rounding::Nearest => "nearest",
            Rounding::Floor => "floor",
            Rounding::Ceil => "ceil",
            Rounding::Outward => "outward",
        }
    }
}

impl std::str::FromStr for Rounding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(Rounding::Nearest),
            "floor" => Ok(Rounding::Floor),
            "ceil" => Ok(Rounding::Ceil),
            "outward" => Ok(Rounding::Outward),
            other => Err(Error::InvalidParameters(format!(
                "unknown rounding '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensitySweepRow {
    pub d: usize,
    pub base: f64,
    pub n: usize,
    pub estimate: Estimate,
}

/// Seed for the density sweep point `(d, n)`.
pub fn density_row_seed(mode: SeedMode, seed: u64, d: usize, n: usize) -> u64 {
    mode.seed(seed, (1 << 63) | ((d as u64) << 40) | n as u64)
}

/// `π_mc(d, n)` (the expected graph density) at `n = rounding(base^d)`.
/// Points with `n` outside `[2, 2^d]` are skipped.
pub fn density_threshold_sweep(
    d_list: &[usize],
    base_list: &[f64],
    samples: u64,
    seed: u64,
    rounding: Rounding,
    mode: SeedMode,
) -> Result<Sweep<DensitySweepRow>> {
    let mut out = Sweep {
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for &d in d_list {
        for &base in base_list {
            let params = format!("d={d} base={base}");
            let n = rounding.apply(base, d);
            if d == 0
                || d > super::pi::MAX_D
                || !n.is_finite()
                || n < 2.0
                || n > (2.0f64).powi(d as i32)
            {
                out.skipped.push(SkippedRow {
                    params,
                    reason: format!("n = {n} outside [2, 2^d]"),
                });
                continue;
            }
            let n = n as usize;
            let estimate = pi_mc(d, n, samples, density_row_seed(mode, seed, d, n))?;
            out.rows.push(DensitySweepRow {
                d,
                base,
                n,
                estimate,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_sweep_rows_and_skips() {
        let s = tau_threshold_sweep(&[3, 4], &[0.0, 1.0, 3.0], 200, 7, SeedMode::Derived).unwrap();
        assert_eq!(s.rows.len(), 5);
        assert_eq!(s.skipped.len(), 1);
        assert_eq!(s.rows[0].estimate.value, 1.0);
        assert_eq!(s.rows[1].m, 3);
        assert_eq!(
            s,
            tau_threshold_sweep(&[3, 4], &[0.0, 1.0, 3.0], 200, 7, SeedMode::Derived).unwrap()
        );
    }

    #[test]
    fn density_sweep_rows_and_skips() {
        let s = density_threshold_sweep(
            &[4, 6],
            &[1.0, 1.2, 3.0],
            100,
            1,
            Rounding::Nearest,
            SeedMode::Derived,
        )
        .unwrap();
        assert_eq!(s.skipped.len(), 4);
        assert_eq!(s.rows.len(), 2);
        assert_eq!(s.rows[0].n, 2);
        assert_eq!(s.rows[0].estimate.value, 1.0);
        assert_eq!(s.rows[1].n, 3);
        let direct =
            density_threshold_sweep(&[6], &[1.2], 100, 1, Rounding::Nearest, SeedMode::Direct)
                .unwrap();
        assert_eq!(direct.rows[0].estimate.seed, 1);
    }

    #[test]
    fn rounding_modes() {
        assert_eq!(Rounding::Outward.apply(1.2, 10), 6.0);
        assert_eq!(Rounding::Outward.apply(1.7, 10), 202.0);
        assert_eq!(Rounding::Nearest.apply(1.7, 10), 202.0);
        assert_eq!(Rounding::Floor.apply(1.7, 10), 201.0);
        assert_eq!("ceil".parse::<Rounding>().unwrap(), Rounding::Ceil);
        assert!("up".parse::<Rounding>().is_err());
    }
}
