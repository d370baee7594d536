//! Sub-computer parallelism on the classical engine.
//!
//! The array is a row of identical gaps, one per data qubit. A gap holds,
//! left to right at the slot pitch: the data qubit `q`, an enable chain
//! `a_w x_{w-1} a_{w-1} … x_0 a_0`, a pad bit, and its own CU. The `x_i`
//! hold the gap label (bit 0 rightmost) and the `a_i` are work bits. Every
//! chain step is a CC-U with the target on `a_i` and controls on `x_{i-1}`
//! and `a_{i-1}`, so after the compute program `a_w` is the enable bit.
//! The broadcast gate is then a controlled gate on `q` with `a_w` as
//! control: in a gap whose enable bit is 0 the CU completes its excursion
//! without altering anything. The compute program is finally run in
//! reverse.
//!
//! Pulses are global and gaps are congruent, so one program drives every
//! gap; the program is compiled against a single gap.

use std::collections::HashSet;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::classical::BitArray;
use crate::codec::{Layout, CU_LEN, CU_PATTERN, QUBIT0, QUBIT1, QUBIT_LEN};
use crate::error::{Error, Result};
use crate::gate::Gate1;
use crate::lattice::{CellConfig, CellLevel};
use crate::library::{check_placement, Composer, Library};
use crate::rules::PulseSequence;
use crate::state::Register;
use crate::synth::{GateSpec, CANONICAL_CU_DISTANCE, CANONICAL_FIRST_SLOT, SLOT_PITCH};

/// Spacer between a CU and the next gap's data qubit.
const CU_TO_NEXT: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParallelLayout {
    n_gaps: usize,
    width: usize,
    period: usize,
    margin: usize,
}

/// Bit roles inside a gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Data,
    Work(usize),
    Label(usize),
    Pad,
}

impl ParallelLayout {
    pub fn new(n_qubits: usize) -> Result<ParallelLayout> {
        if n_qubits == 0 {
            return Err(Error::Layout("need at least one qubit".into()));
        }
        let width = label_width(n_qubits);
        let bits = 2 * width + 3;
        let period = SLOT_PITCH * (bits - 1) + CANONICAL_CU_DISTANCE + CU_LEN + CU_TO_NEXT;
        // Data qubits move right by up to the longest transport plus a gate
        // core while the CU works in the far end of the gap.
        let margin = SLOT_PITCH / 2 * bits + 64;
        Ok(ParallelLayout {
            n_gaps: n_qubits,
            width,
            period,
            margin,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_gaps
    }

    pub fn label_width(&self) -> usize {
        self.width
    }

    /// Bits per gap, data qubit included.
    pub fn bits_per_gap(&self) -> usize {
        2 * self.width + 3
    }

    /// Work bits per gap, the enable bit included.
    pub fn work_bits(&self) -> usize {
        self.width + 1
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn n_cells(&self) -> usize {
        self.n_gaps * self.period + self.margin
    }

    /// Cells of the serial layout: the same qubits at the slot pitch with a
    /// single CU.
    pub fn serial_cells(&self) -> usize {
        serial_layout(self.n_gaps).map(|l| l.n_cells()).unwrap_or(0)
    }

    pub fn overhead_factor(&self) -> f64 {
        self.n_cells() as f64 / self.serial_cells() as f64
    }

    fn role(&self, j: usize) -> Role {
        let w = self.width;
        match j {
            0 => Role::Data,
            j if j == 2 * w + 2 => Role::Pad,
            j if j % 2 == 1 => Role::Work(w - (j - 1) / 2),
            j => Role::Label(w - j / 2),
        }
    }

    /// Gap-local index of `a_i`.
    pub fn work_index(&self, i: usize) -> usize {
        2 * (self.width - i) + 1
    }

    /// Gap-local index of `x_i`.
    pub fn label_index(&self, i: usize) -> usize {
        2 * (self.width - i)
    }

    pub fn bit_cell(&self, gap: usize, j: usize) -> usize {
        gap * self.period + CANONICAL_FIRST_SLOT + SLOT_PITCH * j
    }

    pub fn cu_cell(&self, gap: usize) -> usize {
        self.bit_cell(gap, self.bits_per_gap() - 1) + CANONICAL_CU_DISTANCE
    }

    /// One gap on its own, used to compile the broadcast program.
    pub fn gap_layout(&self) -> Result<Layout> {
        let qubits = (0..self.bits_per_gap()).map(|j| self.bit_cell(0, j)).collect();
        Layout::new(self.period + self.margin, qubits, Some(self.cu_cell(0)))
    }

    /// Initial array: data qubits from `data`, labels `0..N`, work bits 0.
    pub fn initial(&self, data: &[u8]) -> Result<BitArray> {
        if data.len() != self.n_gaps {
            return Err(Error::Layout(format!("{} data bits for {} gaps", data.len(), self.n_gaps)));
        }
        let states: Vec<GapState> = data
            .iter()
            .enumerate()
            .map(|(g, &q)| GapState {
                data: q,
                label: g as u64,
                work: vec![0; self.work_bits()],
                pad: 0,
            })
            .collect();
        self.encode(&states)
    }

    pub fn encode(&self, gaps: &[GapState]) -> Result<BitArray> {
        let mut b = BitArray::zeros(self.n_cells())?;
        let put = |b: &mut BitArray, at: usize, pat: &[CellLevel]| {
            for (i, &l) in pat.iter().enumerate() {
                b.set(at + i, l == CellLevel::Up);
            }
        };
        for (g, s) in gaps.iter().enumerate() {
            for j in 0..self.bits_per_gap() {
                let bit = match self.role(j) {
                    Role::Data => s.data,
                    Role::Work(i) => s.work[i],
                    Role::Label(i) => ((s.label >> i) & 1) as u8,
                    Role::Pad => s.pad,
                };
                put(&mut b, self.bit_cell(g, j), if bit == 0 { &QUBIT0 } else { &QUBIT1 });
            }
            put(&mut b, self.cu_cell(g), &CU_PATTERN);
        }
        Ok(b)
    }

    /// Reads every gap back; fails on any cell outside the coded form.
    pub fn decode(&self, config: &BitArray) -> Result<Vec<GapState>> {
        if config.len() != self.n_cells() {
            return Err(Error::Layout("array length does not match the layout".into()));
        }
        let mut expected_ups = 0;
        let block = |at: usize, pat: &[CellLevel]| (0..pat.len()).all(|i| config.get(at + i) == (pat[i] == CellLevel::Up));
        let mut out = Vec::with_capacity(self.n_gaps);
        for g in 0..self.n_gaps {
            let mut s = GapState {
                data: 0,
                label: 0,
                work: vec![0; self.work_bits()],
                pad: 0,
            };
            for j in 0..self.bits_per_gap() {
                let at = self.bit_cell(g, j);
                let bit = if block(at, &QUBIT0) {
                    0
                } else if block(at, &QUBIT1) {
                    1
                } else {
                    return Err(Error::Malformed { cell: at });
                };
                match self.role(j) {
                    Role::Data => s.data = bit,
                    Role::Work(i) => s.work[i] = bit,
                    Role::Label(i) => s.label |= u64::from(bit) << i,
                    Role::Pad => s.pad = bit,
                }
                expected_ups += QUBIT_LEN / 2;
            }
            if !block(self.cu_cell(g), &CU_PATTERN) {
                return Err(Error::Malformed { cell: self.cu_cell(g) });
            }
            expected_ups += 4;
            out.push(s);
        }
        if config.count_up() != expected_ups {
            let stray = (0..config.len())
                .find(|&i| config.get(i) && !self.inside_block(i))
                .unwrap_or(0);
            return Err(Error::Malformed { cell: stray });
        }
        Ok(out)
    }

    fn inside_block(&self, cell: usize) -> bool {
        (0..self.n_gaps).any(|g| {
            (0..self.bits_per_gap()).any(|j| (self.bit_cell(g, j)..self.bit_cell(g, j) + QUBIT_LEN).contains(&cell))
                || (self.cu_cell(g)..self.cu_cell(g) + CU_LEN).contains(&cell)
        })
    }

    /// The whole array as a cell configuration.
    pub fn to_config(&self, b: &BitArray) -> CellConfig {
        b.to_config()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapState {
    pub data: u8,
    pub label: u64,
    /// `a_0 … a_w`.
    pub work: Vec<u8>,
    pub pad: u8,
}

pub fn label_width(n: usize) -> usize {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// `n` qubits at the slot pitch with the CU after the last one.
pub fn serial_layout(n: usize) -> Result<Layout> {
    let qubits: Vec<usize> = (0..n).map(|j| CANONICAL_FIRST_SLOT + SLOT_PITCH * j).collect();
    let cu = CANONICAL_FIRST_SLOT + SLOT_PITCH * (n - 1) + CANONICAL_CU_DISTANCE;
    Layout::new(cu + CU_LEN + SLOT_PITCH / 2 * n + 64, qubits, Some(cu))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum EnablePredicate {
    All,
    Single(u64),
    EveryPow2(u32),
    /// Inclusive bounds.
    Interval(u64, u64),
    CustomTable(Vec<bool>),
}

impl EnablePredicate {
    pub fn eval(&self, label: u64) -> bool {
        match self {
            EnablePredicate::All => true,
            EnablePredicate::Single(l) => label == *l,
            EnablePredicate::EveryPow2(p) => *p == 0 || label & ((1u64 << p.min(&63)) - 1) == 0,
            EnablePredicate::Interval(lo, hi) => (*lo..=*hi).contains(&label),
            EnablePredicate::CustomTable(t) => t.get(label as usize).copied().unwrap_or(false),
        }
    }

    /// Parses `all`, `single:K`, `pow2:P`, `interval:LO:HI`, `table:0110…`.
    pub fn parse(s: &str) -> Result<EnablePredicate> {
        let bad = || Error::Parse(format!("bad predicate {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<u64>().map_err(|_| bad());
        match parts.as_slice() {
            ["all"] => Ok(EnablePredicate::All),
            ["single", k] => Ok(EnablePredicate::Single(num(k)?)),
            ["pow2", p] => Ok(EnablePredicate::EveryPow2(p.parse().map_err(|_| bad())?)),
            ["interval", lo, hi] => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(bad());
                }
                Ok(EnablePredicate::Interval(lo, hi))
            }
            ["table", bits] => bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<_>>>()
                .map(EnablePredicate::CustomTable),
            _ => Err(bad()),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            EnablePredicate::All => "all",
            EnablePredicate::Single(_) => "single",
            EnablePredicate::EveryPow2(_) => "pow2",
            EnablePredicate::Interval(..) => "interval",
            EnablePredicate::CustomTable(_) => "table",
        }
    }
}

/// One chain step, writing into `a_i` from `x_{i-1}` and `a_{i-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    /// `a_i ^= x' ∧ a_{i-1}`, with `x'` negated when the flag is set.
    And(usize, bool),
    /// `a_i ^= x' ∨ a_{i-1}`.
    Or(usize, bool),
    /// `a_i ^= a_{i-1}`.
    Copy(usize),
}

struct Builder<'a> {
    layout: &'a ParallelLayout,
    ops: Vec<GateSpec>,
}

impl Builder<'_> {
    fn not(&mut self, j: usize) {
        self.ops.push(GateSpec::OneQubit { u: Gate1::x(), target: j });
    }

    fn toffoli(&mut self, i: usize) {
        let l = self.layout;
        self.ops.push(GateSpec::Ccu {
            u: Gate1::x(),
            c1: l.work_index(i - 1),
            c2: l.label_index(i - 1),
            target: l.work_index(i),
        });
    }

    fn step(&mut self, s: Step) {
        let l = self.layout;
        match s {
            Step::And(i, neg) => {
                let x = l.label_index(i - 1);
                if neg {
                    self.not(x);
                }
                self.toffoli(i);
                if neg {
                    self.not(x);
                }
            }
            Step::Or(i, neg) => {
                let x = l.label_index(i - 1);
                let a = l.work_index(i - 1);
                if !neg {
                    self.not(x);
                }
                self.not(a);
                self.toffoli(i);
                self.not(a);
                if !neg {
                    self.not(x);
                }
                self.not(l.work_index(i));
            }
            Step::Copy(i) => {
                let x = l.label_index(i - 1);
                self.toffoli(i);
                self.not(x);
                self.toffoli(i);
                self.not(x);
            }
        }
    }

    /// Seed plus steps `1..=w`, leaving intermediates set.
    fn chain(&mut self, steps: &[Step]) {
        self.not(self.layout.work_index(0));
        for &s in steps {
            self.step(s);
        }
    }

    /// `a_w ^= chain result`, with every intermediate restored.
    fn xor_term(&mut self, steps: &[Step]) {
        let start = self.ops.len();
        self.not(self.layout.work_index(0));
        for &s in &steps[..steps.len() - 1] {
            self.step(s);
        }
        let head: Vec<GateSpec> = self.ops[start..].to_vec();
        self.step(steps[steps.len() - 1]);
        self.ops.extend(head.into_iter().rev());
    }

    /// Removes adjacent identical NOTs.
    fn finish(self) -> Vec<GateSpec> {
        let mut out: Vec<GateSpec> = Vec::with_capacity(self.ops.len());
        for op in self.ops {
            if matches!(op, GateSpec::OneQubit { .. }) && out.last() == Some(&op) {
                out.pop();
            } else {
                out.push(op);
            }
        }
        out
    }
}

fn ge_steps(v: u64, w: usize) -> Vec<Step> {
    (1..=w)
        .map(|i| {
            if (v >> (i - 1)) & 1 == 1 {
                Step::And(i, false)
            } else {
                Step::Or(i, false)
            }
        })
        .collect()
}

fn eq_steps(v: u64, w: usize) -> Vec<Step> {
    (1..=w).map(|i| Step::And(i, (v >> (i - 1)) & 1 == 0)).collect()
}

/// Reversible program over one gap that leaves `a_w = pred(label)`. `None`
/// means the predicate is constant true and the gate needs no control.
fn predicate_ops(layout: &ParallelLayout, pred: &EnablePredicate) -> Result<Option<Vec<GateSpec>>> {
    let w = layout.width;
    let n = layout.n_gaps as u64;
    let full = 1u64 << w;
    let mut b = Builder {
        layout,
        ops: Vec::new(),
    };
    let enable = layout.work_index(w);
    match pred {
        EnablePredicate::All => return Ok(None),
        EnablePredicate::Single(l) => {
            if *l >= n {
                return Err(Error::Predicate(format!("label {l} out of range for {n} gaps")));
            }
            b.chain(&eq_steps(*l, w));
        }
        EnablePredicate::EveryPow2(p) => {
            if *p == 0 {
                return Ok(None);
            }
            let steps: Vec<Step> = (1..=w)
                .map(|i| if i <= *p as usize { Step::And(i, true) } else { Step::Copy(i) })
                .collect();
            b.chain(&steps);
        }
        EnablePredicate::Interval(lo, hi) => {
            if lo > hi {
                return Err(Error::Predicate(format!("empty interval {lo}..{hi}")));
            }
            let hi = (*hi).min(full - 1);
            if *lo == 0 && hi == full - 1 {
                return Ok(None);
            }
            // [lo, hi] = ge(lo) xor ge(hi + 1).
            for v in [*lo, hi + 1] {
                if v == 0 {
                    b.not(enable);
                } else if v < full {
                    b.xor_term(&ge_steps(v, w));
                }
            }
        }
        EnablePredicate::CustomTable(t) => {
            if t.len() != layout.n_gaps {
                return Err(Error::Predicate(format!("table has {} entries for {n} gaps", t.len())));
            }
            let on: Vec<u64> = (0..n).filter(|&l| t[l as usize]).collect();
            if on.len() as u64 == n {
                return Ok(None);
            }
            if let (Some(&lo), Some(&hi)) = (on.first(), on.last()) {
                if hi - lo + 1 == on.len() as u64 {
                    return predicate_ops(layout, &EnablePredicate::Interval(lo, hi));
                }
            }
            if on.len() > w {
                return Err(Error::ExceedsBudget {
                    needed: on.len(),
                    budget: w,
                });
            }
            for &l in &on {
                b.xor_term(&eq_steps(l, w));
            }
        }
    }
    Ok(Some(b.finish()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PulseBudget {
    /// Predicate compute program, τ.
    pub compute: usize,
    /// Transport that carries the CU to the data qubit and back.
    pub dispatch: usize,
    pub gate: usize,
    pub uncompute: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelProgram {
    pub compute: PulseSequence,
    pub gate: PulseSequence,
    pub budget: PulseBudget,
}

impl ParallelProgram {
    pub fn sequence(&self) -> PulseSequence {
        self.compute.clone().then(&self.gate).then(&self.compute.inverse())
    }
}

/// Placements already checked, keyed by label width and gate. A gap depends
/// only on its label width.
fn checked() -> &'static Mutex<HashSet<(usize, String)>> {
    static CHECKED: OnceLock<Mutex<HashSet<(usize, String)>>> = OnceLock::new();
    CHECKED.get_or_init(Default::default)
}

/// Compiles `pred` to a pulse program over one gap and checks every
/// placement on the classical engine.
pub fn compile_predicate(layout: &ParallelLayout, pred: &EnablePredicate) -> Result<PulseSequence> {
    let gap = layout.gap_layout()?;
    let lib = Library::builtin()?;
    let Some(ops) = predicate_ops(layout, pred)? else {
        return Ok(PulseSequence::default());
    };
    let mut c = Composer::new(&gap, lib);
    let probe = Composer::new(&gap, lib);
    for op in &ops {
        let key = (layout.width, op.to_string());
        if !checked().lock().expect("placement cache").contains(&key) {
            let entry = lib.for_kind(op.kind())?;
            let placed = probe.place(op, entry, entry.orientation.slot_gate(op.u()))?;
            check_placement(&gap, op, &placed, entry.orientation)?;
            checked().lock().expect("placement cache").insert(key);
        }
        c.push(op)?;
    }
    Ok(c.finish())
}

/// The full broadcast program for gate `u` on every enabled data qubit.
pub fn compile_step(layout: &ParallelLayout, u: &Gate1, pred: &EnablePredicate) -> Result<ParallelProgram> {
    let gap = layout.gap_layout()?;
    let lib = Library::builtin()?;
    let compute = compile_predicate(layout, pred)?;
    let spec = if predicate_ops(layout, pred)?.is_none() {
        GateSpec::OneQubit { u: u.clone(), target: 0 }
    } else {
        GateSpec::ControlledU {
            u: u.clone(),
            control: layout.work_index(layout.width),
            target: 0,
        }
    };
    let mut c = Composer::new(&gap, lib);
    let dispatch = 2 * c.steps_for(&spec)?.unsigned_abs() as usize;
    c.push(&spec)?;
    let gate = c.finish();
    let budget = PulseBudget {
        compute: compute.len(),
        dispatch,
        gate: gate.len() - dispatch,
        uncompute: compute.len(),
        total: 2 * compute.len() + gate.len(),
    };
    Ok(ParallelProgram { compute, gate, budget })
}

/// Runs one broadcast step on a classical array. `u` must be a permutation
/// gate.
pub fn run_parallel_step(
    layout: &ParallelLayout,
    u: &Gate1,
    pred: &EnablePredicate,
    config: &mut BitArray,
) -> Result<PulseBudget> {
    if !u.is_classical() {
        return Err(Error::NonClassicalGate);
    }
    let program = compile_step(layout, u, pred)?;
    config.apply_sequence(&program.sequence())?;
    Ok(program.budget)
}

/// Runs one broadcast step on a quantum register holding a coded array.
pub fn run_parallel_quantum<S: Register>(
    state: &mut S,
    layout: &ParallelLayout,
    u: &Gate1,
    pred: &EnablePredicate,
) -> Result<PulseBudget> {
    if state.n_cells() != layout.n_cells() {
        return Err(Error::Layout("register length does not match the layout".into()));
    }
    let program = compile_step(layout, u, pred)?;
    crate::rules::apply_sequence(state, &program.sequence())?;
    Ok(program.budget)
}

/// Pulses to apply `u` to each listed qubit of the serial layout one at a
/// time, sweeping the single CU from the right.
pub fn serial_pulses(n: usize, targets: &[usize], u: &Gate1) -> Result<usize> {
    let layout = serial_layout(n)?;
    let lib = Library::builtin()?;
    let mut c = Composer::new(&layout, lib);
    let mut order = targets.to_vec();
    order.sort_unstable_by(|a, b| b.cmp(a));
    for t in order {
        c.push(&GateSpec::OneQubit { u: u.clone(), target: t })?;
    }
    Ok(c.finish().len())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub tau: usize,
    pub total_pulses: usize,
    pub overhead_factor: f64,
    /// Serial pulses for the same set of enabled qubits.
    pub serial_pulses: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub family: String,
    pub rows: Vec<ScalingRow>,
    /// Least-squares fit `tau ≈ c1·log2(N) + c2`.
    pub c1: f64,
    pub c2: f64,
    /// Largest `|tau - fit| / tau` over rows with `tau > 0`.
    pub max_relative_residual: f64,
}

/// The representative predicate of each family for array size `n`.
pub fn family_predicate(family: &str, n: usize) -> Result<EnablePredicate> {
    let n64 = n as u64;
    Ok(match family {
        "all" => EnablePredicate::All,
        "single" => EnablePredicate::Single(n64 - 1),
        "pow2" => EnablePredicate::EveryPow2(1),
        // Both comparators then have one AND step and w-1 OR steps at
        // every width.
        "interval" => EnablePredicate::Interval(1.min(n64 - 1), (n64 / 2).saturating_sub(1).max(1.min(n64 - 1))),
        _ => return Err(Error::Predicate(format!("unknown family {family:?}"))),
    })
}

pub const FAMILIES: [&str; 4] = ["all", "single", "pow2", "interval"];

pub fn scaling_report(family: &str, sizes: &[usize], u: &Gate1) -> Result<ScalingReport> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let layout = ParallelLayout::new(n)?;
        let pred = family_predicate(family, n)?;
        let program = compile_step(&layout, u, &pred)?;
        let targets: Vec<usize> = (0..n).filter(|&g| pred.eval(g as u64)).collect();
        rows.push(ScalingRow {
            n,
            tau: program.budget.compute,
            total_pulses: program.budget.total,
            overhead_factor: layout.overhead_factor(),
            serial_pulses: serial_pulses(n, &targets, u)?,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).log2()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.tau as f64).collect();
    let (c1, c2) = linear_fit(&xs, &ys);
    let max_relative_residual = xs
        .iter()
        .zip(&ys)
        .filter(|(_, &y)| y > 0.0)
        .map(|(&x, &y)| (y - (c1 * x + c2)).abs() / y)
        .fold(0.0, f64::max);
    Ok(ScalingReport {
        family: family.to_string(),
        rows,
        c1,
        c2,
        max_relative_residual,
    })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return (0.0, my);
    }
    let c1 = sxy / sxx;
    (c1, my - c1 * mx)
}
