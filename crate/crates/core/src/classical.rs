//! Bit-packed engine for classical 2-level configurations of any length.
//!
//! Cell `i` is bit `i % 64` of word `i / 64`; a set bit is `↑`. A rule flips
//! every selected cell at once, so each output word depends only on the
//! input word and one bit from each neighbour word.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{CellConfig, CellLevel, CellType, Mode};
use crate::rules::{PulseSequence, UpdateRule};

const EVEN: u64 = 0x5555_5555_5555_5555;
const PAR_MIN_WORDS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Action {
    Flip,
    Keep,
}

fn classify(rule: &UpdateRule) -> Result<Action> {
    let perm = rule
        .cell_gate(Mode::TwoLevel)?
        .as_permutation()
        .ok_or(Error::NonClassicalGate)?;
    Ok(if perm[0].0 == 1 { Action::Flip } else { Action::Keep })
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitArray {
    n: usize,
    words: Vec<u64>,
}

impl BitArray {
    pub fn zeros(n_cells: usize) -> Result<BitArray> {
        if n_cells < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 cells, got {n_cells}")));
        }
        Ok(BitArray {
            n: n_cells,
            words: vec![0; n_cells.div_ceil(64)],
        })
    }

    pub fn from_config(config: &CellConfig) -> Result<BitArray> {
        config.validate(Mode::TwoLevel)?;
        let mut b = BitArray::zeros(config.len())?;
        for (i, &l) in config.levels().iter().enumerate() {
            if l == CellLevel::Up {
                b.set(i, true);
            }
        }
        Ok(b)
    }

    pub fn to_config(&self) -> CellConfig {
        let levels = (0..self.n)
            .map(|i| if self.get(i) { CellLevel::Up } else { CellLevel::Down })
            .collect();
        CellConfig::new(levels).expect("length checked at construction")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, up: bool) {
        let m = 1u64 << (i % 64);
        if up {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn count_up(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of `↑` cells in ascending order.
    pub fn ups(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.get(i)).collect()
    }

    fn valid_mask(&self, w: usize) -> u64 {
        let hi = (w + 1) * 64;
        if hi <= self.n {
            !0
        } else {
            (1u64 << (self.n - w * 64)) - 1
        }
    }

    /// Selection mask of a rule over word `w`, given the top bit of word
    /// `w - 1` and the bottom bit of word `w + 1` (zero past the ends).
    #[inline]
    fn select(&self, below: u64, x: u64, above: u64, w: usize, kind: CellType, field: i8) -> u64 {
        // Bit i of `l` is cell i-1, bit i of `r` is cell i+1.
        let l = (x << 1) | below;
        let r = (x >> 1) | (above << 63);
        let kind_mask = match kind {
            CellType::A => EVEN,
            CellType::B => !EVEN,
        };
        let last = self.n - 1;
        let last_bit = if last / 64 == w { 1u64 << (last % 64) } else { 0 };
        let first_bit = if w == 0 { 1 } else { 0 };
        let s = match field {
            2 => l & r,
            -2 => !l & !r,
            0 => l ^ r,
            1 | -1 => {
                // Only the two end cells have a single neighbour.
                let up = if field == 1 { !0 } else { 0 };
                let s = (first_bit & !(r ^ up)) | (last_bit & !(l ^ up));
                return s & kind_mask;
            }
            _ => 0,
        };
        s & self.valid_mask(w) & !first_bit & !last_bit & kind_mask
    }

    #[inline]
    fn select_in(&self, words: &[u64], w: usize, kind: CellType, field: i8) -> u64 {
        let below = if w > 0 { words[w - 1] >> 63 } else { 0 };
        let above = if w + 1 < words.len() { words[w + 1] & 1 } else { 0 };
        self.select(below, words[w], above, w, kind, field)
    }

    /// Applies a permutation rule in place.
    pub fn apply_rule(&mut self, rule: &UpdateRule) -> Result<()> {
        if classify(rule)? == Action::Keep {
            return Ok(());
        }
        let (kind, field) = (rule.kind, rule.field.get());
        let old = self.words.clone();
        if old.len() >= PAR_MIN_WORDS {
            let this = &*self;
            let next: Vec<u64> = (0..old.len())
                .into_par_iter()
                .map(|w| old[w] ^ this.select_in(&old, w, kind, field))
                .collect();
            self.words = next;
        } else {
            for w in 0..old.len() {
                self.words[w] = old[w] ^ self.select_in(&old, w, kind, field);
            }
        }
        Ok(())
    }

    /// Same result as [`BitArray::apply_rule`], computed by splitting the
    /// array into `parts` contiguous pieces that each read one halo word
    /// on either side.
    pub fn apply_rule_partitioned(&mut self, rule: &UpdateRule, parts: usize) -> Result<()> {
        if classify(rule)? == Action::Keep {
            return Ok(());
        }
        let (kind, field) = (rule.kind, rule.field.get());
        let nw = self.words.len();
        let parts = parts.clamp(1, nw);
        let chunk = nw.div_ceil(parts);
        let old = self.words.clone();
        let this = &*self;
        let pieces: Vec<Vec<u64>> = (0..parts)
            .into_par_iter()
            .map(|p| {
                let lo = (p * chunk).min(nw);
                let hi = ((p + 1) * chunk).min(nw);
                let mut out = Vec::with_capacity(hi - lo);
                if lo == hi {
                    return out;
                }
                // Local copy with one halo word on each side.
                let h_lo = lo.saturating_sub(1);
                let h_hi = (hi + 1).min(nw);
                let local = &old[h_lo..h_hi];
                for w in lo..hi {
                    out.push(old[w] ^ this.select_in_window(local, h_lo, w, kind, field));
                }
                out
            })
            .collect();
        self.words = pieces.concat();
        Ok(())
    }

    fn select_in_window(&self, local: &[u64], offset: usize, w: usize, kind: CellType, field: i8) -> u64 {
        let lw = w - offset;
        let below = if lw > 0 { local[lw - 1] >> 63 } else { 0 };
        let above = if lw + 1 < local.len() { local[lw + 1] & 1 } else { 0 };
        self.select(below, local[lw], above, w, kind, field)
    }

    pub fn apply_sequence(&mut self, seq: &PulseSequence) -> Result<()> {
        for (i, r) in seq.iter().enumerate() {
            self.apply_rule(r).map_err(|e| Error::at_pulse(i, e))?;
        }
        Ok(())
    }

    pub fn apply_sequence_partitioned(&mut self, seq: &PulseSequence, parts: usize) -> Result<()> {
        for (i, r) in seq.iter().enumerate() {
            self.apply_rule_partitioned(r, parts).map_err(|e| Error::at_pulse(i, e))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitArray({})", self)
    }
}

impl fmt::Display for BitArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.get(i) { "u" } else { "d" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Basis;
    use crate::rules::classical_apply;

    fn all_inv_rules() -> Vec<UpdateRule> {
        let mut v = Vec::new();
        for kind in [CellType::A, CellType::B] {
            for f in -2..=2 {
                v.push(UpdateRule::inv(kind, f));
            }
        }
        v
    }

    #[test]
    fn matches_cell_engine_exhaustively() {
        for n in 2..=10 {
            let basis = Basis::new(n, Mode::TwoLevel);
            for r in 0..basis.size() {
                let c = basis.unrank(r).unwrap();
                for rule in all_inv_rules() {
                    let mut b = BitArray::from_config(&c).unwrap();
                    b.apply_rule(&rule).unwrap();
                    assert_eq!(b.to_config(), classical_apply(&c, &rule).unwrap(), "{c} {rule}");
                }
            }
        }
    }

    #[test]
    fn word_boundaries_and_partitions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [63, 64, 65, 127, 128, 129, 300, 1000] {
            let levels: Vec<CellLevel> = (0..n)
                .map(|_| if rng.gen_bool(0.3) { CellLevel::Up } else { CellLevel::Down })
                .collect();
            let c = CellConfig::new(levels).unwrap();
            for rule in all_inv_rules() {
                let want = classical_apply(&c, &rule).unwrap();
                let mut b = BitArray::from_config(&c).unwrap();
                b.apply_rule(&rule).unwrap();
                assert_eq!(b.to_config(), want, "n={n} {rule}");
                for parts in [1, 2, 3, 7] {
                    let mut p = BitArray::from_config(&c).unwrap();
                    p.apply_rule_partitioned(&rule, parts).unwrap();
                    assert_eq!(p, b, "n={n} parts={parts} {rule}");
                }
            }
        }
    }

    #[test]
    fn hadamard_rejected() {
        let mut b = BitArray::zeros(8).unwrap();
        let rule = UpdateRule::new(CellType::A, 0, crate::gate::Gate1::h()).unwrap();
        assert_eq!(b.apply_rule(&rule), Err(Error::NonClassicalGate));
    }
}
