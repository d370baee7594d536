//! Fluorescence readout of one qubit.
//!
//! The readout entry of the library places a `B2` slot on a cell that is
//! `↓` exactly when the qubit is 1. The slot carries the `↓ ↔ ⇝` swap, the
//! excited cell decays back to `↓` with an emission, and the reverse half
//! restores the array. Decay is applied before the reverse half so that
//! the pulses after the slot never see a `⇝` cell.

use rand::Rng;
use serde::Serialize;

use crate::codec::Layout;
use crate::decay::{decay_channel, seeded_rng};
use crate::error::{Error, Result};
use crate::gate::Gate1;
use crate::lattice::{CellType, Mode};
use crate::library::{check_placement, Composer, Library, PlacedGate};
use crate::rules::apply_sequence;
use crate::state::Register;
use crate::synth::{GateSpec, Orientation};

pub const READOUT_ENTRY: &str = "readout";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Readout {
    pub bit: bool,
    pub emissions: usize,
}

/// The placed readout program for `qubit`, checked on the classical engine.
pub fn readout_program(layout: &Layout, qubit: usize) -> Result<PlacedGate> {
    let lib = Library::builtin()?;
    let entry = lib.get(READOUT_ENTRY)?;
    let spec = GateSpec::OneQubit {
        u: Gate1::x(),
        target: qubit,
    };
    let placed = Composer::new(layout, lib).place(&spec, entry, Gate1::fluor_swap())?;
    if placed.slot.kind != CellType::B {
        return Err(Error::Layout(format!(
            "readout of qubit {qubit} lands on an A cell; move the CU by two cells"
        )));
    }
    if entry.orientation != Orientation::Inverted {
        return Err(Error::Golden("readout entry must have inverted orientation".into()));
    }
    let probe = PlacedGate {
        prefix: placed.prefix.clone(),
        slot: crate::rules::UpdateRule::inv(placed.slot.kind, placed.slot.field.get()),
        suffix: placed.suffix.clone(),
    };
    check_placement(layout, &spec, &probe, entry.orientation)?;
    Ok(placed)
}

/// Runs `cycles` readout cycles on `qubit`; each cycle ends with the
/// array back in its coded form.
pub fn fluorescence_readout<S: Register, R: Rng>(
    state: &mut S,
    layout: &Layout,
    qubit: usize,
    cycles: usize,
    rng: &mut R,
) -> Result<Readout> {
    if state.mode() != Mode::ThreeLevel {
        return Err(Error::WrongMode("fluorescence readout needs 3-level mode"));
    }
    let placed = readout_program(layout, qubit)?;
    let mut emissions = 0;
    for _ in 0..cycles {
        apply_sequence(state, &placed.prefix)?;
        crate::rules::apply_rule(state, &placed.slot)?;
        emissions += decay_channel(state, rng)?;
        apply_sequence(state, &placed.suffix)?;
    }
    Ok(Readout {
        bit: emissions > 0,
        emissions,
    })
}

pub fn fluorescence_readout_seeded<S: Register>(
    state: &mut S,
    layout: &Layout,
    qubit: usize,
    cycles: usize,
    seed: u64,
) -> Result<Readout> {
    fluorescence_readout(state, layout, qubit, cycles, &mut seeded_rng(seed))
}
