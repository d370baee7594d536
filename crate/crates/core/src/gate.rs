//! Single-cell unitaries carried by update rules.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::Mode;

pub const UNITARY_TOL: f64 = 1e-10;
/// Entries within this distance of 0 or of the unit circle count as exact
/// when deciding whether a gate permutes basis states.
pub const PERMUTATION_TOL: f64 = 1e-12;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Square unitary on one cell, dimension 2 (`↓, ↑`) or 3 (`↓, ↑, ⇝`).
/// Stored row-major: `m[out * dim + in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate1 {
    dim: usize,
    m: Vec<Complex64>,
}

impl Gate1 {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Gate1> {
        let dim = rows.len();
        if !(dim == 2 || dim == 3) || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Parse(format!(
                "gate must be a 2x2 or 3x3 matrix, got {dim} rows"
            )));
        }
        let g = Gate1 {
            dim,
            m: rows.into_iter().flatten().collect(),
        };
        let dev = g.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(g)
    }

    fn raw(dim: usize, m: Vec<Complex64>) -> Gate1 {
        Gate1 { dim, m }
    }

    pub fn identity(dim: usize) -> Gate1 {
        let mut m = vec![C0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = C1;
        }
        Gate1::raw(dim, m)
    }

    /// The default rule action: `↓ ⇄ ↑`.
    pub fn inv() -> Gate1 {
        Gate1::raw(2, vec![C0, C1, C1, C0])
    }

    pub fn x() -> Gate1 {
        Gate1::inv()
    }

    pub fn z() -> Gate1 {
        Gate1::phase(std::f64::consts::PI)
    }

    pub fn h() -> Gate1 {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Gate1::raw(2, vec![a, a, a, -a])
    }

    pub fn s() -> Gate1 {
        Gate1::phase(std::f64::consts::FRAC_PI_2)
    }

    /// `phase(π/4)`.
    pub fn t() -> Gate1 {
        Gate1::phase(std::f64::consts::FRAC_PI_4)
    }

    pub fn phase(theta: f64) -> Gate1 {
        Gate1::raw(2, vec![C1, C0, C0, Complex64::from_polar(1.0, theta)])
    }

    /// Readout transform: swaps `↓` and `⇝`, leaves `↑`.
    pub fn fluor_swap() -> Gate1 {
        Gate1::raw(3, vec![C0, C0, C1, C0, C1, C0, C1, C0, C0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entry(&self, out: usize, inp: usize) -> Complex64 {
        self.m[out * self.dim + inp]
    }

    pub fn dagger(&self) -> Gate1 {
        let d = self.dim;
        let mut m = vec![C0; d * d];
        for r in 0..d {
            for c in 0..d {
                m[c * d + r] = self.m[r * d + c].conj();
            }
        }
        Gate1::raw(d, m)
    }

    pub fn mul(&self, rhs: &Gate1) -> Gate1 {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut m = vec![C0; d * d];
        for r in 0..d {
            for c in 0..d {
                m[r * d + c] = (0..d).map(|k| self.entry(r, k) * rhs.entry(k, c)).sum();
            }
        }
        Gate1::raw(d, m)
    }

    /// `‖G†G − I‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.dagger().mul(self);
        let d = self.dim;
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let want = if r == c { C1 } else { C0 };
                worst = worst.max((p.entry(r, c) - want).norm());
            }
        }
        worst
    }

    pub fn max_distance(&self, other: &Gate1) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.m
            .iter()
            .zip(&other.m)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Returns the gate at the dimension `mode` needs. A 2x2 gate acts on the
    /// `↓, ↑` block of a 3-level cell and leaves `⇝` fixed.
    pub fn for_mode(&self, mode: Mode) -> Result<Gate1> {
        match (self.dim, mode) {
            (2, Mode::TwoLevel) | (3, Mode::ThreeLevel) => Ok(self.clone()),
            (2, Mode::ThreeLevel) => {
                let mut m = vec![C0; 9];
                for r in 0..2 {
                    for c in 0..2 {
                        m[r * 3 + c] = self.entry(r, c);
                    }
                }
                m[8] = C1;
                Ok(Gate1::raw(3, m))
            }
            (d, mode) => Err(Error::DimensionMismatch {
                gate: d,
                mode: mode.name(),
            }),
        }
    }

    /// Gate seen by a cell with `radix` levels. A 3x3 gate reaches a
    /// two-level cell only if it leaves the `↓, ↑` block invariant.
    pub fn for_radix(&self, radix: usize) -> Result<Gate1> {
        match (self.dim, radix) {
            (2, 2) => Ok(self.clone()),
            (_, 3) => self.for_mode(Mode::ThreeLevel),
            (3, 2) => {
                let leak = [self.entry(2, 0), self.entry(2, 1), self.entry(0, 2), self.entry(1, 2)];
                if leak.iter().any(|z| z.norm() > PERMUTATION_TOL) {
                    return Err(Error::DimensionMismatch {
                        gate: 3,
                        mode: Mode::TwoLevel.name(),
                    });
                }
                Ok(Gate1::raw(
                    2,
                    vec![self.entry(0, 0), self.entry(0, 1), self.entry(1, 0), self.entry(1, 1)],
                ))
            }
            (d, _) => Err(Error::DimensionMismatch {
                gate: d,
                mode: Mode::TwoLevel.name(),
            }),
        }
    }

    /// If the gate maps each basis level to a single basis level (up to a
    /// phase), returns `(output level, phase)` per input level.
    pub fn as_permutation(&self) -> Option<Vec<(usize, Complex64)>> {
        let d = self.dim;
        let mut out = Vec::with_capacity(d);
        for c in 0..d {
            let mut hit = None;
            for r in 0..d {
                let v = self.entry(r, c);
                let n = v.norm();
                if n < PERMUTATION_TOL {
                    continue;
                }
                if (n - 1.0).abs() > PERMUTATION_TOL || hit.is_some() {
                    return None;
                }
                hit = Some((r, v));
            }
            out.push(hit?);
        }
        Some(out)
    }

    pub fn is_classical(&self) -> bool {
        self.as_permutation().is_some()
    }

    /// Named literal if the gate is one of the standard gates.
    pub fn name(&self) -> Option<&'static str> {
        let named: [(&str, Gate1); 7] = [
            ("INV", Gate1::inv()),
            ("H", Gate1::h()),
            ("Z", Gate1::z()),
            ("S", Gate1::s()),
            ("T", Gate1::t()),
            ("I", Gate1::identity(2)),
            ("FLUOR", Gate1::fluor_swap()),
        ];
        named
            .into_iter()
            .find(|(_, g)| g.dim == self.dim && g.max_distance(self) < 1e-15)
            .map(|(n, _)| n)
    }
}

fn fmt_complex(z: Complex64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => format!("{}", z.re),
        (true, false) => format!("{}i", z.im),
        (false, false) if z.im < 0.0 => format!("{}{}i", z.re, z.im),
        (false, false) => format!("{}+{}i", z.re, z.im),
    }
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad complex number {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let parse_im = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            t => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, parse_im(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, parse_im(body)?)),
    }
}

impl fmt::Display for Gate1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.name() {
            return f.write_str(n);
        }
        f.write_str("U[")?;
        for r in 0..self.dim {
            if r > 0 {
                f.write_str(";")?;
            }
            let row: Vec<String> = (0..self.dim).map(|c| fmt_complex(self.entry(r, c))).collect();
            f.write_str(&row.join(","))?;
        }
        f.write_str("]")
    }
}

impl FromStr for Gate1 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Gate1> {
        match s {
            "INV" | "X" => return Ok(Gate1::inv()),
            "H" => return Ok(Gate1::h()),
            "Z" => return Ok(Gate1::z()),
            "S" => return Ok(Gate1::s()),
            "T" => return Ok(Gate1::t()),
            "I" => return Ok(Gate1::identity(2)),
            "FLUOR" => return Ok(Gate1::fluor_swap()),
            _ => {}
        }
        let body = s
            .strip_prefix("U[")
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("unknown gate {s:?}")))?;
        let rows = body
            .split(';')
            .map(|row| row.split(',').map(parse_complex).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Gate1::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_gates_are_unitary() {
        for g in [
            Gate1::inv(),
            Gate1::h(),
            Gate1::z(),
            Gate1::t(),
            Gate1::fluor_swap(),
        ] {
            assert!(g.unitarity_deviation() < 1e-15);
        }
    }

    #[test]
    fn permutation_detection() {
        assert!(Gate1::inv().is_classical());
        assert!(Gate1::z().is_classical());
        assert!(Gate1::fluor_swap().is_classical());
        assert!(!Gate1::h().is_classical());
    }

    #[test]
    fn literal_round_trip() {
        for s in ["INV", "H", "T", "FLUOR", "U[0,1;1,0]", "U[0.6,0.8i;0.8i,0.6]"] {
            let g: Gate1 = s.parse().unwrap();
            let back: Gate1 = g.to_string().parse().unwrap();
            assert!(g.max_distance(&back) < 1e-15, "{s}");
        }
        assert_eq!("U[0,1;1,0]".parse::<Gate1>().unwrap().to_string(), "INV");
        assert!("U[1,1;0,1]".parse::<Gate1>().is_err());
        assert!("Q".parse::<Gate1>().is_err());
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2i").unwrap(), Complex64::new(1e-3, -2.0));
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn lift_to_three_levels() {
        let g = Gate1::h().for_mode(Mode::ThreeLevel).unwrap();
        assert_eq!(g.dim(), 3);
        assert_eq!(g.entry(2, 2), C1);
        assert!(Gate1::fluor_swap().for_mode(Mode::TwoLevel).is_err());
    }
}
