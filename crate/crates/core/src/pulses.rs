//! Transport and end-cell input/output sequences.
//!
//! Under alternating `B0`/`A0` pulses every isolated `↑↑` pair moves one
//! cell per pulse. Pairs of qubit blocks and pairs of the CU start on
//! opposite parities and so move in opposite directions. The *frame offset*
//! counts net qubit steps from the reference frame in which qubit slots start
//! on odd cells; in that frame `B0` moves qubits right.

use crate::codec::{Layout, LogicalWord};
use crate::error::{Error, Result};
use crate::lattice::{CellConfig, CellLevel, CellType};
use crate::rules::{PulseSequence, UpdateRule};

/// Transport pulse that moves qubits from offset `x` to `x + 1`.
fn forward_pulse(x: i64) -> UpdateRule {
    if x.rem_euclid(2) == 0 {
        UpdateRule::inv(CellType::B, 0)
    } else {
        UpdateRule::inv(CellType::A, 0)
    }
}

/// Moves qubits `steps` cells to the right and the CU `steps` cells to the
/// left, starting at frame offset `offset`. Negative `steps` moves the other
/// way.
pub fn transport_from(offset: i64, steps: i64) -> PulseSequence {
    let mut rules = Vec::with_capacity(steps.unsigned_abs() as usize);
    let mut x = offset;
    for _ in 0..steps.abs() {
        if steps > 0 {
            rules.push(forward_pulse(x));
            x += 1;
        } else {
            rules.push(forward_pulse(x - 1));
            x -= 1;
        }
    }
    PulseSequence::new(rules)
}

/// [`transport_from`] the reference frame.
pub fn transport(steps: i64) -> PulseSequence {
    transport_from(0, steps)
}

/// Frame offset parity of a layout.
pub fn frame_offset(layout: &Layout) -> i64 {
    if layout.frame_parity() == 1 {
        0
    } else {
        1
    }
}

/// Cells where the `↑↑` pairs of a coded word start. Qubit pairs move right
/// under forward transport, CU pairs move left.
fn pair_starts(layout: &Layout, word: &LogicalWord) -> (Vec<usize>, Vec<usize>) {
    let right: Vec<usize> = layout
        .qubits()
        .iter()
        .zip(&word.bits)
        .map(|(&s, &b)| if b == 0 { s } else { s + 2 })
        .collect();
    let left = match (layout.cu(), word.cu) {
        (Some(c), true) => vec![c, c + 4],
        _ => Vec::new(),
    };
    (right, left)
}

/// Pulse program that writes `word` onto an all-`↓` array through its end
/// cells. Qubit pairs enter at the left end with `A-1 … A1` around two
/// transport pulses, CU pairs at the right end with `B-1 … B1`; transport
/// then carries each to its slot.
pub fn load_bits(layout: &Layout, word: &LogicalWord) -> Result<PulseSequence> {
    let n = layout.n_cells();
    if word.bits.len() != layout.n_qubits() {
        return Err(Error::Layout(format!(
            "word has {} bits, layout has {} qubits",
            word.bits.len(),
            layout.n_qubits()
        )));
    }
    if word.bits.is_empty() && !word.cu {
        return Ok(PulseSequence::default());
    }
    if n % 2 != 0 {
        return Err(Error::TooShort(format!(
            "end-cell loading needs an even number of cells, got {n}"
        )));
    }
    if layout.frame_parity() != 1 {
        return Err(Error::Layout("loading targets the reference frame (odd qubit slots)".into()));
    }
    let (right, left) = pair_starts(layout, word);
    if right.iter().any(|&p| p < 1) || left.iter().any(|&p| p + 3 > n) {
        return Err(Error::TooShort("block too close to an end cell".into()));
    }
    let need = right
        .iter()
        .map(|&p| p + 1)
        .chain(left.iter().map(|&p| n - 1 - p))
        .max()
        .unwrap_or(0);
    let total = need + need % 2;
    // Windows start at even ticks on the left, odd ticks on the right.
    let left_start: Vec<usize> = right.iter().map(|&p| total - 1 - p).collect();
    let right_start: Vec<usize> = left.iter().map(|&p| total + 1 + p - n).collect();
    let mut rules = Vec::new();
    for tick in 0..total {
        if left_start.contains(&tick) {
            rules.push(UpdateRule::inv(CellType::A, -1));
        }
        if right_start.contains(&tick) {
            rules.push(UpdateRule::inv(CellType::B, -1));
        }
        rules.push(forward_pulse(tick as i64));
        if tick > 0 && left_start.contains(&(tick - 1)) {
            rules.push(UpdateRule::inv(CellType::A, 1));
        }
        if tick > 0 && right_start.contains(&(tick - 1)) {
            rules.push(UpdateRule::inv(CellType::B, 1));
        }
    }
    Ok(PulseSequence::new(rules))
}

/// Reverse transport that brings qubit 0's pair next to the left end, then
/// `A-1`, after which [`read_end`] reports the bit. Qubit 0 must be the
/// leftmost block.
pub fn unload_probe(layout: &Layout) -> Result<PulseSequence> {
    let s = *layout
        .qubits()
        .first()
        .ok_or_else(|| Error::Layout("no qubit to read".into()))?;
    if layout.qubits().iter().any(|&q| q < s) || layout.cu().is_some_and(|c| c < s) {
        return Err(Error::Layout("qubit 0 must be the leftmost block".into()));
    }
    let offset = frame_offset(layout);
    let mut seq = transport_from(offset, -(s as i64 - 1));
    seq.rules.push(UpdateRule::inv(CellType::A, -1));
    Ok(seq)
}

/// The bit exposed at the left end cell.
pub fn read_end(config: &CellConfig) -> bool {
    config.get(0) == CellLevel::Up
}
