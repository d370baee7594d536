//! Transition-frequency multiplets of a driven cell under symmetric
//! `r^-k` couplings.
//!
//! A cell's transition frequency is its bare gap plus `f·J1` from the two
//! neighbours, where `f` is the field, plus `±J1·r^-k` from every cell at
//! distance `r ≥ 2` on either side. The worst case puts every distant cell
//! in the same state, so each field value spreads into the interval
//! `center ± W` with `W = 2·J1·Σ_{r=2}^{R} r^-k`. All frequencies are in the
//! same units as `J1`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::CellType;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Cutoff {
    /// Distant cells at `2..=R` on each side.
    Truncated(usize),
    /// All distances, summed through the zeta function.
    AnalyticTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionModel {
    pub j1: f64,
    /// Exponent; `f64::INFINITY` leaves neighbours only.
    pub k: f64,
    pub cutoff: Cutoff,
    pub gap_a: f64,
    pub gap_b: f64,
    /// Spread of the bare gap between cells of one type.
    pub disorder: f64,
}

impl InteractionModel {
    pub fn new(j1: f64, k: f64, cutoff: Cutoff) -> InteractionModel {
        InteractionModel {
            j1,
            k,
            cutoff,
            gap_a: 0.0,
            gap_b: 0.0,
            disorder: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j1 > 0.0 && self.j1.is_finite()) {
            return Err(Error::Model(format!("J1 must be positive, got {}", self.j1)));
        }
        if self.k.is_nan() || self.k < 0.0 {
            return Err(Error::Model(format!("exponent must be non-negative, got {}", self.k)));
        }
        if let Cutoff::Truncated(r) = self.cutoff {
            if r < 2 {
                return Err(Error::Model(format!("cutoff must be at least 2, got {r}")));
            }
        }
        if !(self.disorder >= 0.0 && self.disorder.is_finite()) {
            return Err(Error::Model(format!("disorder must be non-negative, got {}", self.disorder)));
        }
        Ok(())
    }

    fn gap(&self, kind: CellType) -> f64 {
        match kind {
            CellType::A => self.gap_a,
            CellType::B => self.gap_b,
        }
    }

    /// `W`: half-width of every multiplet, disorder excluded.
    pub fn half_width(&self) -> Result<f64> {
        self.validate()?;
        if self.k.is_infinite() {
            return Ok(0.0);
        }
        let one_side = match self.cutoff {
            Cutoff::Truncated(r) => truncated_sum(self.k, r),
            Cutoff::AnalyticTail => {
                if self.k <= 1.0 {
                    return Err(Error::Divergent(self.k));
                }
                zeta(self.k) - 1.0
            }
        };
        Ok(2.0 * self.j1 * one_side)
    }

    /// True when the truncated sum would grow without bound with `R`.
    pub fn divergent(&self) -> bool {
        self.k <= 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultipletInterval {
    pub kind: CellType,
    pub field: i8,
    pub center: f64,
    pub lo: f64,
    pub hi: f64,
}

pub const FIELDS: [i8; 3] = [-2, 0, 2];

pub fn multiplet_interval(model: &InteractionModel, kind: CellType, field: i8) -> Result<MultipletInterval> {
    if !FIELDS.contains(&field) {
        return Err(Error::Model(format!("field {field} is not one of -2, 0, 2")));
    }
    let w = model.half_width()? + model.disorder;
    let center = model.gap(kind) + f64::from(field) * model.j1;
    Ok(MultipletInterval {
        kind,
        field,
        center,
        lo: center - w,
        hi: center + w,
    })
}

/// Smallest gap between the intervals of adjacent field values; positive
/// means the multiplets do not overlap.
pub fn overlap_margin(model: &InteractionModel, kind: CellType) -> Result<f64> {
    let iv: Vec<MultipletInterval> = FIELDS
        .iter()
        .map(|&f| multiplet_interval(model, kind, f))
        .collect::<Result<_>>()?;
    Ok(iv.windows(2).map(|p| p[1].lo - p[0].hi).fold(f64::INFINITY, f64::min))
}

/// `Σ_{r=2}^{R} r^-k`, summed from the small end.
pub fn truncated_sum(k: f64, r_max: usize) -> f64 {
    (2..=r_max).rev().map(|r| (r as f64).powf(-k)).sum()
}

/// `Σ_{n≥m} n^-s` for `s > 1`, by direct summation to a start point and
/// Euler–Maclaurin from there.
pub fn zeta_tail(s: f64, m: usize) -> f64 {
    const START: usize = 16;
    // B_2j / (2j)!
    const B: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    ];
    let n = m.max(START);
    let head: f64 = (m..n).rev().map(|i| (i as f64).powf(-s)).sum();
    let nf = n as f64;
    let mut tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // Rising product s(s+1)…(s+2j-2) times n^(-s-2j+1).
    let mut rising = s;
    let mut power = nf.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        tail += b * rising * power;
        let a = s + (2 * j + 1) as f64;
        rising *= a * (a + 1.0);
        power /= nf * nf;
    }
    head + tail
}

pub fn zeta(s: f64) -> f64 {
    zeta_tail(s, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub k: f64,
    pub w: f64,
    pub margin: f64,
    pub separated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// Exponent where the margin crosses zero, if the scan brackets it.
    pub crossover: Option<f64>,
}

pub const CROSSOVER_TOL: f64 = 1e-6;

/// Margin and separation for each exponent in `ks`.
pub fn threshold_scan(j1: f64, ks: &[f64], cutoff: Cutoff, disorder: f64) -> Result<ScanReport> {
    let model = |k: f64| InteractionModel {
        disorder,
        ..InteractionModel::new(j1, k, cutoff)
    };
    let rows: Vec<ScanRow> = ks
        .par_iter()
        .map(|&k| {
            let m = model(k);
            let w = m.half_width()?;
            let margin = overlap_margin(&m, CellType::A)?;
            Ok(ScanRow {
                k,
                w,
                margin,
                separated: margin > 0.0,
            })
        })
        .collect::<Result<_>>()?;
    let crossover = rows
        .windows(2)
        .find(|p| p[0].separated != p[1].separated)
        .map(|p| bisect(|k| overlap_margin(&model(k), CellType::A), p[0].k, p[1].k))
        .transpose()?;
    Ok(ScanReport { rows, crossover })
}

/// Root of `f` on `[lo, hi]` to [`CROSSOVER_TOL`], given a sign change.
fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f_lo = f(lo)?;
    while hi - lo > CROSSOVER_TOL {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exponent where the analytic margin vanishes, searched on `(1, 10]`.
pub fn crossover_exponent(j1: f64, disorder: f64) -> Result<f64> {
    let m = |k: f64| {
        overlap_margin(
            &InteractionModel {
                disorder,
                ..InteractionModel::new(j1, k, Cutoff::AnalyticTail)
            },
            CellType::A,
        )
    };
    if m(10.0)? <= 0.0 {
        return Err(Error::Model("multiplets overlap for every exponent up to 10".into()));
    }
    bisect(m, 1.0 + 1e-9, 10.0)
}

/// Extremes of the distant-cell shift over all `±1` assignments of the
/// cells at distances `2..=R` on both sides. Only for small `R`.
pub fn brute_force_extent(model: &InteractionModel, r_max: usize) -> Result<(f64, f64)> {
    model.validate()?;
    if !(2..=12).contains(&r_max) {
        return Err(Error::Model(format!("brute force needs 2 ≤ R ≤ 12, got {r_max}")));
    }
    let c: Vec<f64> = (2..=r_max)
        .flat_map(|r| {
            let v = if model.k.is_infinite() { 0.0 } else { model.j1 * (r as f64).powf(-model.k) };
            [v, v]
        })
        .collect();
    let n = c.len();
    let (lo, hi) = (0u64..1 << n)
        .into_par_iter()
        .map(|mask| {
            let s: f64 = (0..n).map(|i| if mask >> i & 1 == 1 { c[i] } else { -c[i] }).sum();
            (s, s)
        })
        .reduce(|| (f64::INFINITY, f64::NEG_INFINITY), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    Ok((lo, hi))
}

/// Extremes over one side only, doubled.
pub fn one_side_extent(model: &InteractionModel, r_max: usize) -> Result<(f64, f64)> {
    model.validate()?;
    let n = r_max - 1;
    let c: Vec<f64> = (2..=r_max)
        .map(|r| if model.k.is_infinite() { 0.0 } else { model.j1 * (r as f64).powf(-model.k) })
        .collect();
    let (lo, hi) = (0u64..1 << n)
        .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { c[i] } else { -c[i] }).sum::<f64>())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, s| (a.0.min(s), a.1.max(s)));
    Ok((2.0 * lo, 2.0 * hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((zeta(3.0) - 1.202_056_903_159_594_3).abs() < 1e-14);
        assert!((zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-12);
        assert!((zeta(4.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn tail_matches_difference() {
        let direct: f64 = (1..10).map(|n| (n as f64).powf(-2.5)).sum();
        assert!((zeta_tail(2.5, 10) - (zeta(2.5) - direct)).abs() < 1e-14);
    }

    #[test]
    fn centers_step_by_two_j1() {
        let m = InteractionModel::new(1.5, 3.0, Cutoff::AnalyticTail);
        let a = multiplet_interval(&m, CellType::B, 0).unwrap();
        let b = multiplet_interval(&m, CellType::B, 2).unwrap();
        assert!((b.center - a.center - 3.0).abs() < 1e-15);
        assert!(multiplet_interval(&m, CellType::B, 1).is_err());
    }

    #[test]
    fn nearest_neighbour_limit() {
        let m = InteractionModel::new(1.0, f64::INFINITY, Cutoff::AnalyticTail);
        assert_eq!(m.half_width().unwrap(), 0.0);
        assert_eq!(overlap_margin(&m, CellType::A).unwrap(), 2.0);
        let iv = multiplet_interval(&m, CellType::A, 0).unwrap();
        assert_eq!(iv.lo, iv.hi);
    }

    #[test]
    fn invalid_models() {
        assert!(InteractionModel::new(0.0, 3.0, Cutoff::AnalyticTail).validate().is_err());
        assert!(InteractionModel::new(1.0, 3.0, Cutoff::Truncated(1)).validate().is_err());
        assert!(InteractionModel::new(1.0, -1.0, Cutoff::AnalyticTail).validate().is_err());
    }
}
