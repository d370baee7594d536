//! Quantum states over array configurations.
//!
//! [`QuantumState`] is the dense amplitude vector indexed by basis rank.
//! [`SparseState`] keeps only nonzero amplitudes keyed by configuration and
//! handles arrays beyond the dense cap whose states stay close to classical
//! (coded words during gate verification).

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gate::Gate1;
use crate::lattice::{field_unchecked, Basis, CellConfig, CellLevel, CellType, Mode, DENSE_CAP};
use crate::rules::UpdateRule;

pub const NORM_TOL: f64 = 1e-12;
/// Sparse amplitudes below this magnitude squared are dropped.
const SPARSE_PRUNE: f64 = 1e-28;
const PAR_MIN_LEN: usize = 1 << 14;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Operations shared by the dense and sparse state representations.
pub trait Register: Clone + Send {
    fn n_cells(&self) -> usize;
    fn mode(&self) -> Mode;
    fn apply_rule(&mut self, rule: &UpdateRule) -> Result<()>;
    fn amplitude(&self, config: &CellConfig) -> Complex64;
    /// Nonzero terms in ascending configuration order.
    fn terms(&self) -> Vec<(CellConfig, Complex64)>;
    fn norm_sqr(&self) -> f64;
    /// Probability that cell `i` is in `level`.
    fn level_probability(&self, i: usize, level: CellLevel) -> f64;
    /// Projects cell `i` onto `level` (or onto its complement when `keep` is
    /// false), replaces that level with `to` when keeping, and renormalizes.
    fn collapse(&mut self, i: usize, level: CellLevel, keep: bool, to: CellLevel);

    fn probability(&self, config: &CellConfig) -> f64 {
        self.amplitude(config).norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    basis: Basis,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// Basis state `e_rank(config)`.
    pub fn from_config(config: &CellConfig, mode: Mode) -> Result<QuantumState> {
        let n = config.len();
        if n > DENSE_CAP {
            return Err(Error::TooLarge {
                n_cells: n,
                cap: DENSE_CAP,
            });
        }
        let basis = Basis::new(n, mode);
        let r = basis.rank(config)?;
        let mut amps = vec![C0; basis.size() as usize];
        amps[r as usize] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { basis, amps })
    }

    /// Normalized superposition of the given terms; repeated configurations
    /// add.
    pub fn from_terms(n_cells: usize, mode: Mode, terms: &[(CellConfig, Complex64)]) -> Result<QuantumState> {
        if n_cells > DENSE_CAP {
            return Err(Error::TooLarge {
                n_cells,
                cap: DENSE_CAP,
            });
        }
        let basis = Basis::new(n_cells, mode);
        let mut amps = vec![C0; basis.size() as usize];
        for (c, a) in terms {
            amps[basis.rank(c)? as usize] += a;
        }
        let mut s = QuantumState { basis, amps };
        s.normalize()?;
        Ok(s)
    }

    fn normalize(&mut self) -> Result<()> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::InvalidConfig("zero state".into()));
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(())
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Largest amplitude difference.
    pub fn distance(&self, other: &QuantumState) -> f64 {
        if self.basis != other.basis {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Applies `gate` to cell `i` on every basis state whose field at `i`
    /// equals `field`.
    pub fn apply_controlled(&mut self, i: usize, field: i8, gate: &Gate1) {
        let n = self.basis.n_cells();
        let stride = self.basis.stride(i) as usize;
        let radix = self.basis.radix(i);
        let block = stride * radix;
        let left_stride = if i > 0 { self.basis.stride(i - 1) as usize } else { 0 };
        let left_radix = if i > 0 { self.basis.radix(i - 1) } else { 1 };
        let (right_stride, right_radix) = if i + 1 < n {
            (self.basis.stride(i + 1) as usize, self.basis.radix(i + 1))
        } else {
            (1, 1)
        };
        let contrib = |d: usize| -> i8 {
            match d {
                0 => -1,
                1 => 1,
                _ => 0,
            }
        };
        let kernel = |k: usize, chunk: &mut [Complex64]| {
            // Left neighbour digit is fixed across the chunk.
            let left = if i > 0 {
                contrib(((k * block) / left_stride) % left_radix)
            } else {
                0
            };
            let mut input = [C0; 3];
            for o in 0..stride {
                let right = if i + 1 < n {
                    contrib((o / right_stride) % right_radix)
                } else {
                    0
                };
                if left + right != field {
                    continue;
                }
                for (d, v) in input.iter_mut().enumerate().take(radix) {
                    *v = chunk[o + d * stride];
                }
                for d_out in 0..radix {
                    let mut acc = C0;
                    for (d_in, v) in input.iter().enumerate().take(radix) {
                        acc += gate.entry(d_out, d_in) * v;
                    }
                    chunk[o + d_out * stride] = acc;
                }
            }
        };
        if self.amps.len() >= PAR_MIN_LEN && self.amps.len() / block >= 4 {
            self.amps
                .par_chunks_mut(block)
                .enumerate()
                .for_each(|(k, c)| kernel(k, c));
        } else {
            self.amps
                .chunks_mut(block)
                .enumerate()
                .for_each(|(k, c)| kernel(k, c));
        }
    }
}

impl Register for QuantumState {
    fn n_cells(&self) -> usize {
        self.basis.n_cells()
    }

    fn mode(&self) -> Mode {
        self.basis.mode()
    }

    fn apply_rule(&mut self, rule: &UpdateRule) -> Result<()> {
        let gate = rule.cell_gate(self.mode())?;
        for i in (rule.kind.parity()..self.n_cells()).step_by(2) {
            self.apply_controlled(i, rule.field.get(), &gate);
        }
        Ok(())
    }

    fn amplitude(&self, config: &CellConfig) -> Complex64 {
        match self.basis.rank(config) {
            Ok(r) => self.amps[r as usize],
            Err(_) => C0,
        }
    }

    fn terms(&self) -> Vec<(CellConfig, Complex64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > SPARSE_PRUNE)
            .map(|(r, a)| (self.basis.unrank(r as u64).expect("rank in range"), *a))
            .collect()
    }

    fn norm_sqr(&self) -> f64 {
        if self.amps.len() >= PAR_MIN_LEN {
            self.amps.par_iter().map(|a| a.norm_sqr()).sum()
        } else {
            self.amps.iter().map(|a| a.norm_sqr()).sum()
        }
    }

    fn level_probability(&self, i: usize, level: CellLevel) -> f64 {
        let d = level.digit();
        self.amps
            .iter()
            .enumerate()
            .filter(|(r, _)| self.basis.digit(*r as u64, i) == d)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn collapse(&mut self, i: usize, level: CellLevel, keep: bool, to: CellLevel) {
        let d = level.digit();
        let stride = self.basis.stride(i) as usize;
        let mut out = vec![C0; self.amps.len()];
        for (r, a) in self.amps.iter().enumerate() {
            let digit = self.basis.digit(r as u64, i);
            if (digit == d) != keep {
                continue;
            }
            let target = if keep { r - digit * stride + to.digit() * stride } else { r };
            out[target] += a;
        }
        self.amps = out;
        let _ = self.normalize();
    }
}

/// Amplitudes keyed by configuration; absent keys are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    n_cells: usize,
    mode: Mode,
    amps: BTreeMap<CellConfig, Complex64>,
}

impl SparseState {
    pub fn from_config(config: &CellConfig, mode: Mode) -> Result<SparseState> {
        config.validate(mode)?;
        let mut amps = BTreeMap::new();
        amps.insert(config.clone(), Complex64::new(1.0, 0.0));
        Ok(SparseState {
            n_cells: config.len(),
            mode,
            amps,
        })
    }

    pub fn from_terms(n_cells: usize, mode: Mode, terms: &[(CellConfig, Complex64)]) -> Result<SparseState> {
        let mut amps: BTreeMap<CellConfig, Complex64> = BTreeMap::new();
        for (c, a) in terms {
            if c.len() != n_cells {
                return Err(Error::InvalidConfig(format!(
                    "expected {n_cells} cells, got {}",
                    c.len()
                )));
            }
            c.validate(mode)?;
            *amps.entry(c.clone()).or_insert(C0) += a;
        }
        let mut s = SparseState { n_cells, mode, amps };
        s.prune();
        let n = s.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::InvalidConfig("zero state".into()));
        }
        s.amps.values_mut().for_each(|a| *a /= n);
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm_sqr() > SPARSE_PRUNE);
    }

    fn apply_cell(&mut self, i: usize, field: i8, gate: &Gate1) {
        if !self
            .amps
            .keys()
            .any(|c| field_unchecked(c.levels(), i) == field)
        {
            return;
        }
        let radix = self.mode.radix(CellType::of_index(i));
        let mut out: BTreeMap<CellConfig, Complex64> = BTreeMap::new();
        for (c, a) in std::mem::take(&mut self.amps) {
            if field_unchecked(c.levels(), i) != field {
                *out.entry(c).or_insert(C0) += a;
                continue;
            }
            let d_in = c.get(i).digit();
            for d_out in 0..radix {
                let g = gate.entry(d_out, d_in);
                if g.norm_sqr() == 0.0 {
                    continue;
                }
                let mut next = c.clone();
                next.set(i, CellLevel::from_digit(d_out).expect("digit"));
                *out.entry(next).or_insert(C0) += g * a;
            }
        }
        self.amps = out;
        self.prune();
    }
}

impl Register for SparseState {
    fn n_cells(&self) -> usize {
        self.n_cells
    }

    fn mode(&self) -> Mode {
        self.mode
    }

    fn apply_rule(&mut self, rule: &UpdateRule) -> Result<()> {
        let gate = rule.cell_gate(self.mode)?;
        for i in (rule.kind.parity()..self.n_cells).step_by(2) {
            self.apply_cell(i, rule.field.get(), &gate);
        }
        Ok(())
    }

    fn amplitude(&self, config: &CellConfig) -> Complex64 {
        self.amps.get(config).copied().unwrap_or(C0)
    }

    fn terms(&self) -> Vec<(CellConfig, Complex64)> {
        self.amps.iter().map(|(c, a)| (c.clone(), *a)).collect()
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    fn level_probability(&self, i: usize, level: CellLevel) -> f64 {
        self.amps
            .iter()
            .filter(|(c, _)| c.get(i) == level)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn collapse(&mut self, i: usize, level: CellLevel, keep: bool, to: CellLevel) {
        let mut out: BTreeMap<CellConfig, Complex64> = BTreeMap::new();
        for (mut c, a) in std::mem::take(&mut self.amps) {
            if (c.get(i) == level) != keep {
                continue;
            }
            if keep {
                c.set(i, to);
            }
            *out.entry(c).or_insert(C0) += a;
        }
        self.amps = out;
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.values_mut().for_each(|a| *a /= n);
        }
    }
}

/// Dense basis state for `config` in its natural mode.
pub fn new_basis_state(config: &CellConfig, mode: Mode) -> Result<QuantumState> {
    QuantumState::from_config(config, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{build_global_operator, PulseSequence};

    fn cfg(s: &str) -> CellConfig {
        s.parse().unwrap()
    }

    #[test]
    fn basis_state_examples() {
        let s = new_basis_state(&cfg("dd"), Mode::TwoLevel).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        let s = new_basis_state(&cfg("uu"), Mode::TwoLevel).unwrap();
        assert_eq!(s.amplitudes()[3], Complex64::new(1.0, 0.0));
        let s = new_basis_state(&cfg("df"), Mode::ThreeLevel).unwrap();
        assert_eq!(s.amplitudes()[2], Complex64::new(1.0, 0.0));
        assert!(new_basis_state(&cfg("df"), Mode::TwoLevel).is_err());
        assert!(new_basis_state(&cfg("fd"), Mode::ThreeLevel).is_err());
    }

    #[test]
    fn dense_matches_operator_on_small_arrays() {
        let rules: PulseSequence = "A0:H B2:T A-2 B0:H A1:S B-1".parse().unwrap();
        for mode in [Mode::TwoLevel, Mode::ThreeLevel] {
            let n = 5;
            let basis = Basis::new(n, mode);
            for rule in rules.iter() {
                let op = build_global_operator(rule, n, mode).unwrap();
                for c in 0..basis.size() {
                    let mut s = QuantumState::from_config(&basis.unrank(c).unwrap(), mode).unwrap();
                    s.apply_rule(rule).unwrap();
                    for r in 0..basis.size() as usize {
                        assert!((s.amplitudes()[r] - op[(r, c as usize)]).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn sparse_matches_dense() {
        let seq: PulseSequence = "A0:H B0 A0 B2:H A2 B-2:T A-1:H B1".parse().unwrap();
        for start in ["uuddduud", "duduuddu", "dddfudud"] {
            let c = cfg(start);
            let mode = Mode::ThreeLevel;
            let mut d = QuantumState::from_config(&c, mode).unwrap();
            let mut s = SparseState::from_config(&c, mode).unwrap();
            for r in seq.iter() {
                d.apply_rule(r).unwrap();
                s.apply_rule(r).unwrap();
            }
            for (conf, a) in d.terms() {
                assert!((s.amplitude(&conf) - a).norm() < 1e-12);
            }
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn collapse_maps_level() {
        let terms = vec![
            (cfg("df"), Complex64::new(1.0, 0.0)),
            (cfg("du"), Complex64::new(1.0, 0.0)),
        ];
        let mut s = QuantumState::from_terms(2, Mode::ThreeLevel, &terms).unwrap();
        assert!((s.level_probability(1, CellLevel::Fluor) - 0.5).abs() < 1e-12);
        s.collapse(1, CellLevel::Fluor, true, CellLevel::Down);
        assert!((s.probability(&cfg("dd")) - 1.0).abs() < 1e-12);
    }
}
