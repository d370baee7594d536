//! Breadth-first synthesis of gate sequences.
//!
//! A gate is realized as `P · slot(U) · P⁻¹` where `P` is a sequence of
//! classical inversion pulses and `slot` is a single rule carrying `U`. The
//! search runs over the classical action of `P` on every coded word of the
//! problem (its *signature*); a signature is a goal when some slot rule
//! selects exactly the target cell for words whose controls are all 1 and no
//! cell otherwise, and the selected cell differs between the two values of
//! the target bit only in that cell. The candidate is then verified on the
//! quantum engine.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::codec::{encode, extract_logical_action, controlled_matrix, Layout, LogicalAction, LogicalWord, CU_LEN};
use crate::error::{Error, Result};
use crate::gate::Gate1;
use crate::lattice::{CellConfig, CellLevel, CellType};
use crate::linalg::CMatrix;
use crate::pulses::transport;
use crate::rules::{PulseSequence, UpdateRule};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_LEN: usize = 14;
pub const DEFAULT_FRONTIER_CAP: usize = 1 << 24;
/// Signatures pack one configuration into a `u128`.
pub const SIGNATURE_CAP: usize = 128;
/// Distance between consecutive qubit slots in canonical layouts.
pub const SLOT_PITCH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GateKind {
    OneQubit,
    ControlledU,
    Ccu,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::OneQubit => "one_qubit",
            GateKind::ControlledU => "controlled_u",
            GateKind::Ccu => "ccu",
        }
    }

    pub fn n_involved(self) -> usize {
        match self {
            GateKind::OneQubit => 1,
            GateKind::ControlledU => 2,
            GateKind::Ccu => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateSpec {
    OneQubit { u: Gate1, target: usize },
    ControlledU { u: Gate1, control: usize, target: usize },
    Ccu { u: Gate1, c1: usize, c2: usize, target: usize },
}

impl GateSpec {
    pub fn kind(&self) -> GateKind {
        match self {
            GateSpec::OneQubit { .. } => GateKind::OneQubit,
            GateSpec::ControlledU { .. } => GateKind::ControlledU,
            GateSpec::Ccu { .. } => GateKind::Ccu,
        }
    }

    pub fn u(&self) -> &Gate1 {
        match self {
            GateSpec::OneQubit { u, .. } | GateSpec::ControlledU { u, .. } | GateSpec::Ccu { u, .. } => u,
        }
    }

    pub fn target(&self) -> usize {
        match *self {
            GateSpec::OneQubit { target, .. }
            | GateSpec::ControlledU { target, .. }
            | GateSpec::Ccu { target, .. } => target,
        }
    }

    pub fn controls(&self) -> Vec<usize> {
        match *self {
            GateSpec::OneQubit { .. } => vec![],
            GateSpec::ControlledU { control, .. } => vec![control],
            GateSpec::Ccu { c1, c2, .. } => vec![c1, c2],
        }
    }

    pub fn with_u(&self, u: Gate1) -> GateSpec {
        match self.clone() {
            GateSpec::OneQubit { target, .. } => GateSpec::OneQubit { u, target },
            GateSpec::ControlledU { control, target, .. } => GateSpec::ControlledU { u, control, target },
            GateSpec::Ccu { c1, c2, target, .. } => GateSpec::Ccu { u, c1, c2, target },
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let mut all = self.controls();
        all.push(self.target());
        if let Some(&q) = all.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::Layout(format!("gate refers to qubit {q} of {n_qubits}")));
        }
        let mut sorted = all.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(Error::Layout("gate qubits must be distinct".into()));
        }
        if self.u().dim() != 2 {
            return Err(Error::DimensionMismatch {
                gate: self.u().dim(),
                mode: "2-level",
            });
        }
        Ok(())
    }

    /// Logical matrix over `n_qubits` qubits, qubit 0 most significant.
    pub fn logical_matrix(&self, n_qubits: usize) -> CMatrix {
        controlled_matrix(n_qubits, &self.controls(), self.target(), self.u())
    }
}

/// Text form: `one:U:t`, `cu:U:c:t`, `ccu:U:c1:c2:t`.
impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateSpec::OneQubit { u, target } => write!(f, "one:{u}:{target}"),
            GateSpec::ControlledU { u, control, target } => write!(f, "cu:{u}:{control}:{target}"),
            GateSpec::Ccu { u, c1, c2, target } => write!(f, "ccu:{u}:{c1}:{c2}:{target}"),
        }
    }
}

impl FromStr for GateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<GateSpec> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("bad gate spec {s:?}"));
        let idx = |t: &str| t.parse::<usize>().map_err(|_| bad());
        match parts.as_slice() {
            ["one", u, t] => Ok(GateSpec::OneQubit {
                u: u.parse()?,
                target: idx(t)?,
            }),
            ["cu", u, c, t] => Ok(GateSpec::ControlledU {
                u: u.parse()?,
                control: idx(c)?,
                target: idx(t)?,
            }),
            ["ccu", u, c1, c2, t] => Ok(GateSpec::Ccu {
                u: u.parse()?,
                c1: idx(c1)?,
                c2: idx(c2)?,
                target: idx(t)?,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Orientation {
    /// Slot cell `↑` encodes target bit 1.
    Direct,
    /// Slot cell `↓` encodes target bit 1.
    Inverted,
}

impl Orientation {
    pub fn name(self) -> &'static str {
        match self {
            Orientation::Direct => "direct",
            Orientation::Inverted => "inverted",
        }
    }

    /// Gate the slot must carry so the logical action is `u`.
    pub fn slot_gate(self, u: &Gate1) -> Gate1 {
        match self {
            Orientation::Direct => u.clone(),
            Orientation::Inverted => Gate1::x().mul(u).mul(&Gate1::x()),
        }
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Orientation> {
        match s {
            "direct" => Ok(Orientation::Direct),
            "inverted" => Ok(Orientation::Inverted),
            _ => Err(Error::Parse(format!("bad orientation {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlotInfo {
    pub kind: CellType,
    pub field: i8,
    /// Cell the slot acts on, in the problem layout.
    pub cell: usize,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisProblem {
    pub layout: Layout,
    pub target: GateSpec,
    /// Classical pulses the search may use, in tie-breaking order.
    pub alphabet: Vec<UpdateRule>,
    /// Rules (kind, field) that may carry the gate, in tie-breaking order.
    pub slots: Vec<(CellType, i8)>,
    pub orientation: Option<Orientation>,
    /// Layout qubits outside the gate also take the value "absent".
    pub empty_spectators: bool,
    /// Fixed prefix applied before the searched pulses; not counted in
    /// `max_len`.
    pub approach: PulseSequence,
    pub max_len: usize,
    pub tolerance: f64,
    /// Report each completed level on stderr.
    pub verbose: bool,
    /// Once a breadth-first level is wider than this, deeper levels are
    /// explored depth-first from it without deduplication.
    pub frontier_cap: usize,
}

/// `B0 A0 B2 A2`: inversions that act only next to `↑` cells.
pub fn local_alphabet() -> Vec<UpdateRule> {
    vec![
        UpdateRule::inv(CellType::B, 0),
        UpdateRule::inv(CellType::A, 0),
        UpdateRule::inv(CellType::B, 2),
        UpdateRule::inv(CellType::A, 2),
    ]
}

/// [`local_alphabet`] plus `B-2 A-2`, which also act on the `↓` background.
pub fn standard_alphabet() -> Vec<UpdateRule> {
    let mut v = local_alphabet();
    v.push(UpdateRule::inv(CellType::B, -2));
    v.push(UpdateRule::inv(CellType::A, -2));
    v
}

/// The gate rides on a `B2` pulse.
pub fn default_slots() -> Vec<(CellType, i8)> {
    vec![(CellType::B, 2)]
}

/// Every field-conditioned interior slot, `B` before `A`.
pub fn any_slots() -> Vec<(CellType, i8)> {
    vec![(CellType::B, 2), (CellType::A, 2), (CellType::B, 0), (CellType::A, 0)]
}

impl SynthesisProblem {
    pub fn new(layout: Layout, target: GateSpec) -> SynthesisProblem {
        SynthesisProblem {
            layout,
            target,
            alphabet: standard_alphabet(),
            slots: default_slots(),
            orientation: None,
            empty_spectators: false,
            approach: PulseSequence::default(),
            max_len: DEFAULT_MAX_LEN,
            tolerance: DEFAULT_TOLERANCE,
            verbose: false,
            frontier_cap: DEFAULT_FRONTIER_CAP,
        }
    }

    fn validate(&self) -> Result<()> {
        self.target.validate(self.layout.n_qubits())?;
        if self.layout.n_cells() > SIGNATURE_CAP {
            return Err(Error::TooLarge {
                n_cells: self.layout.n_cells(),
                cap: SIGNATURE_CAP,
            });
        }
        if self.layout.cu().is_none() {
            return Err(Error::Layout("synthesis needs a CU slot".into()));
        }
        if self.max_len == 0 || self.tolerance <= 0.0 {
            return Err(Error::Layout("max_len must be at least 1 and tolerance positive".into()));
        }
        if self.alphabet.is_empty() || self.alphabet.len() > MAX_ALPHABET {
            return Err(Error::Layout(format!("alphabet must hold 1 to {MAX_ALPHABET} pulses")));
        }
        if self.slots.is_empty() {
            return Err(Error::Layout("no slot rules allowed".into()));
        }
        for r in self.alphabet.iter().chain(self.approach.iter()) {
            if !r.is_inversion() {
                return Err(Error::Layout(format!("alphabet pulse {r} is not an inversion")));
            }
        }
        Ok(())
    }
}

/// Canonical synthesis geometry: `left` spectator slots, the involved
/// qubits (target leftmost, controls following at the slot pitch), `right`
/// spectator slots, then the CU at the closest legal distance. The approach
/// prefix carries the CU past the right spectators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Geometry {
    pub left: usize,
    pub right: usize,
    pub empty_spectators: bool,
}

impl Geometry {
    pub const MINIMAL: Geometry = Geometry {
        left: 0,
        right: 0,
        empty_spectators: false,
    };
}

/// First qubit slot of canonical layouts.
pub const CANONICAL_FIRST_SLOT: usize = 5;
/// Distance from the rightmost involved qubit to the CU, once the approach
/// prefix has run.
pub const CANONICAL_CU_DISTANCE: usize = SLOT_PITCH + 1;

pub fn canonical_spec(kind: GateKind, u: Gate1, geom: Geometry) -> GateSpec {
    let t = geom.left;
    match kind {
        GateKind::OneQubit => GateSpec::OneQubit { u, target: t },
        GateKind::ControlledU => GateSpec::ControlledU {
            u,
            control: t + 1,
            target: t,
        },
        GateKind::Ccu => GateSpec::Ccu {
            u,
            c1: t + 2,
            c2: t + 1,
            target: t,
        },
    }
}

pub fn canonical_problem(kind: GateKind, u: Gate1, geom: Geometry, max_len: usize) -> Result<SynthesisProblem> {
    let n_slots = geom.left + kind.n_involved() + geom.right;
    let qubits: Vec<usize> = (0..n_slots).map(|j| CANONICAL_FIRST_SLOT + SLOT_PITCH * j).collect();
    let last = *qubits.last().expect("at least one slot");
    let cu = last + CANONICAL_CU_DISTANCE;
    let approach_len = (SLOT_PITCH / 2) * geom.right;
    let reach = approach_len + max_len;
    let mut n = (cu + CU_LEN + 2).max(last + 4 + reach + 2);
    n += n % 2;
    let layout = Layout::new(n, qubits, Some(cu))?;
    let mut p = SynthesisProblem::new(layout, canonical_spec(kind, u, geom));
    p.empty_spectators = geom.empty_spectators;
    p.approach = transport(approach_len as i64);
    p.max_len = max_len;
    Ok(p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Synthesized {
    /// Complete program `P · slot · P⁻¹`.
    #[serde(serialize_with = "ser_display")]
    pub sequence: PulseSequence,
    /// `P`, including the approach prefix.
    #[serde(serialize_with = "ser_display")]
    pub forward: PulseSequence,
    pub slot: Option<SlotInfo>,
    /// Pulses found by the search, excluding the approach.
    pub searched_len: usize,
    pub nodes: usize,
    pub action: LogicalAction,
    pub error: f64,
    /// Whether the word with all controls at 1 shows six consecutive `↑`
    /// cells at slot time.
    pub six_up_at_slot: bool,
}

fn ser_display<S: serde::Serializer, T: fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SynthesisOutcome {
    Found(Box<Synthesized>),
    NotFound { max_len: usize, nodes: usize },
}

impl SynthesisOutcome {
    pub fn found(self) -> Option<Synthesized> {
        match self {
            SynthesisOutcome::Found(s) => Some(*s),
            SynthesisOutcome::NotFound { .. } => None,
        }
    }
}

const SPECTATOR_EMPTY: u8 = 2;
const MAX_ALPHABET: usize = 16;
const EXPAND_CHUNK: usize = 1 << 15;

struct Words {
    assignments: Vec<Vec<u8>>,
    partner: Vec<usize>,
    enabled: Vec<bool>,
    target_bit: Vec<u8>,
}

fn enumerate_words(p: &SynthesisProblem) -> Words {
    let nq = p.layout.n_qubits();
    let mut involved = p.target.controls();
    involved.push(p.target.target());
    let choices: Vec<Vec<u8>> = (0..nq)
        .map(|j| {
            if involved.contains(&j) || !p.empty_spectators {
                vec![0, 1]
            } else {
                vec![0, 1, SPECTATOR_EMPTY]
            }
        })
        .collect();
    let mut assignments: Vec<Vec<u8>> = vec![vec![]];
    for c in &choices {
        assignments = assignments
            .into_iter()
            .flat_map(|a| {
                c.iter().map(move |&v| {
                    let mut a = a.clone();
                    a.push(v);
                    a
                })
            })
            .collect();
    }
    let index: HashMap<Vec<u8>, usize> = assignments.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let t = p.target.target();
    let controls = p.target.controls();
    let partner = assignments
        .iter()
        .map(|a| {
            let mut b = a.clone();
            b[t] ^= 1;
            index[&b]
        })
        .collect();
    let enabled = assignments.iter().map(|a| controls.iter().all(|&c| a[c] == 1)).collect();
    let target_bit = assignments.iter().map(|a| a[t]).collect();
    Words {
        assignments,
        partner,
        enabled,
        target_bit,
    }
}

fn to_bits(config: &CellConfig) -> u128 {
    config
        .levels()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == CellLevel::Up)
        .fold(0u128, |acc, (i, _)| acc | 1u128 << i)
}

/// Bit-parallel rule selection on one packed configuration.
#[derive(Clone, Copy)]
struct Packed {
    full: u128,
    a_mask: u128,
    interior: u128,
    last: u32,
}

impl Packed {
    fn new(n: usize) -> Packed {
        let full = if n == 128 { !0 } else { (1u128 << n) - 1 };
        let a_mask = (0..n).step_by(2).fold(0u128, |m, i| m | 1u128 << i);
        let interior = full & !1 & !(1u128 << (n - 1));
        Packed {
            full,
            a_mask,
            interior,
            last: (n - 1) as u32,
        }
    }

    #[inline]
    fn select(&self, c: u128, kind: CellType, field: i8) -> u128 {
        let kind_mask = match kind {
            CellType::A => self.a_mask,
            CellType::B => self.full & !self.a_mask,
        };
        let l = (c << 1) & self.full;
        let r = c >> 1;
        let s = match field {
            2 => l & r & self.interior,
            -2 => !l & !r & self.interior,
            0 => (l ^ r) & self.interior,
            1 | -1 => {
                let up = field == 1;
                let mut s = 0;
                if ((c >> 1) & 1 == 1) == up {
                    s |= 1;
                }
                if ((c >> (self.last - 1)) & 1 == 1) == up {
                    s |= 1u128 << self.last;
                }
                s
            }
            _ => 0,
        };
        s & kind_mask
    }

    #[inline]
    fn apply(&self, sig: &mut [u128], rule: (CellType, i8)) {
        for c in sig.iter_mut() {
            *c ^= self.select(*c, rule.0, rule.1);
        }
    }
}

fn sig_hash(sig: &[u128]) -> u128 {
    const M: u128 = 0x9e37_79b9_7f4a_7c15_f39c_c060_5ced_c835;
    let mut h: u128 = 0x6a09_e667_f3bc_c908_bb67_ae85_84ca_a73b;
    for &x in sig {
        h = (h ^ x).wrapping_mul(M);
        h ^= h >> 67;
    }
    // Zero marks a skipped child.
    h | 1
}

fn check_goal(
    sig: &[u128],
    words: &Words,
    packed: &Packed,
    slots: &[(CellType, i8)],
    want: Option<Orientation>,
) -> Option<SlotInfo> {
    'slot: for &(kind, field) in slots {
        let mut cell: Option<u128> = None;
        let mut orient: Option<u8> = None;
        for (w, &c) in sig.iter().enumerate() {
            let s = packed.select(c, kind, field);
            if !words.enabled[w] {
                if s != 0 {
                    continue 'slot;
                }
                continue;
            }
            if s.count_ones() != 1 || cell.is_some_and(|x| x != s) {
                continue 'slot;
            }
            cell = Some(s);
            let o = u8::from(c & s != 0) ^ words.target_bit[w];
            if orient.is_some_and(|x| x != o) {
                continue 'slot;
            }
            orient = Some(o);
            if sig[words.partner[w]] != c ^ s {
                continue 'slot;
            }
        }
        let (Some(cell), Some(o)) = (cell, orient) else {
            continue;
        };
        let orientation = if o == 0 { Orientation::Direct } else { Orientation::Inverted };
        if want.is_some_and(|w| w != orientation) {
            continue;
        }
        return Some(SlotInfo {
            kind,
            field,
            cell: cell.trailing_zeros() as usize,
            orientation,
        });
    }
    None
}

/// Signature of every coded word after the approach prefix.
fn start_signature(problem: &SynthesisProblem, words: &Words, packed: &Packed) -> Result<Vec<u128>> {
    let layout = &problem.layout;
    let nq = layout.n_qubits();
    let mut start: Vec<u128> = Vec::with_capacity(words.assignments.len());
    for a in &words.assignments {
        let present: Vec<usize> = (0..nq).filter(|&j| a[j] != SPECTATOR_EMPTY).collect();
        let sub = Layout::new(
            layout.n_cells(),
            present.iter().map(|&j| layout.qubits()[j]).collect(),
            layout.cu(),
        )?;
        let bits = present.iter().map(|&j| a[j]).collect();
        start.push(to_bits(&encode(&sub, &LogicalWord::new(bits, true))?));
    }
    for r in problem.approach.iter() {
        packed.apply(&mut start, (r.kind, r.field.get()));
    }
    Ok(start)
}

/// Checks a forward sequence found earlier against `problem` without
/// searching. `forward` must start with the problem's approach and use only
/// alphabet pulses afterwards.
pub fn check_forward(problem: &SynthesisProblem, forward: &PulseSequence, nodes: usize) -> Result<Synthesized> {
    problem.validate()?;
    let n_app = problem.approach.len();
    if forward.len() < n_app || forward.rules[..n_app] != problem.approach.rules[..] {
        return Err(Error::LayoutCheck("forward sequence does not start with the approach".into()));
    }
    let mut path = Vec::with_capacity(forward.len() - n_app);
    for r in &forward.rules[n_app..] {
        let k = problem
            .alphabet
            .iter()
            .position(|a| a.kind == r.kind && a.field == r.field)
            .ok_or_else(|| Error::LayoutCheck(format!("pulse {r} is not in the alphabet")))?;
        path.push(k as u8);
    }
    let words = enumerate_words(problem);
    let packed = Packed::new(problem.layout.n_cells());
    let mut sig = start_signature(problem, &words, &packed)?;
    for &k in &path {
        let r = &problem.alphabet[k as usize];
        packed.apply(&mut sig, (r.kind, r.field.get()));
    }
    let slot = check_goal(&sig, &words, &packed, &problem.slots, problem.orientation)
        .ok_or_else(|| Error::LayoutCheck("forward sequence does not isolate a slot".into()))?;
    finish(problem, &words, &path, &sig, slot, nodes)
}

/// Runs the search. Identical problems give identical results.
pub fn synthesize(problem: &SynthesisProblem) -> Result<SynthesisOutcome> {
    problem.validate()?;
    let layout = &problem.layout;
    let nq = layout.n_qubits();
    let u = problem.target.u();
    if u.max_distance(&Gate1::identity(2)) <= problem.tolerance {
        let seq = PulseSequence::default();
        let action = extract_logical_action(&seq, layout)?;
        let error = action.distance(&problem.target.logical_matrix(nq));
        return Ok(SynthesisOutcome::Found(Box::new(Synthesized {
            sequence: seq.clone(),
            forward: seq,
            slot: None,
            searched_len: 0,
            nodes: 1,
            action,
            error,
            six_up_at_slot: false,
        })));
    }
    let words = enumerate_words(problem);
    let packed = Packed::new(layout.n_cells());
    let start = start_signature(problem, &words, &packed)?;
    let alphabet: Vec<(CellType, i8)> = problem.alphabet.iter().map(|r| (r.kind, r.field.get())).collect();

    // Every alphabet pulse is an involution, so the signature graph is
    // undirected and a child of level d lies in level d-1, d or d+1. Only
    // those levels are kept for deduplication. Each level stores, per node,
    // its parent's index in the previous level and the pulse taken.
    let mut levels: Vec<(Vec<u32>, Vec<u8>)> = vec![(vec![u32::MAX], vec![u8::MAX])];
    let mut prev_seen: HashSet<u128> = HashSet::new();
    let mut cur_seen: HashSet<u128> = HashSet::from([sig_hash(&start)]);
    let mut nodes = 1usize;

    let path_of = |levels: &[(Vec<u32>, Vec<u8>)], mut idx: u32| -> Vec<u8> {
        let mut p = Vec::with_capacity(levels.len());
        for (parents, pulses) in levels.iter().skip(1).rev() {
            p.push(pulses[idx as usize]);
            idx = parents[idx as usize];
        }
        p.reverse();
        p
    };
    let replay = |path: &[u8]| -> Vec<u128> {
        let mut sig = start.clone();
        for &k in path {
            packed.apply(&mut sig, alphabet[k as usize]);
        }
        sig
    };

    for depth in 0..=problem.max_len {
        let width = levels[depth].0.len() as u32;
        let hit = (0..width).into_par_iter().find_map_first(|idx| {
            let path = path_of(&levels, idx);
            let sig = replay(&path);
            check_goal(&sig, &words, &packed, &problem.slots, problem.orientation).map(|s| (path, sig, s))
        });
        if let Some((path, sig, slot)) = hit {
            return finish(problem, &words, &path, &sig, slot, nodes).map(|s| SynthesisOutcome::Found(Box::new(s)));
        }
        if depth == problem.max_len {
            break;
        }
        if width as usize > problem.frontier_cap {
            return deepen(problem, &words, &packed, &alphabet, &levels, depth, nodes, &path_of, &replay);
        }
        let mut next_seen: HashSet<u128> = HashSet::new();
        let (mut parents, mut pulses) = (Vec::new(), Vec::new());
        let order: Vec<u32> = (0..width).collect();
        for chunk in order.chunks(EXPAND_CHUNK) {
            let children: Vec<[u128; MAX_ALPHABET]> = chunk
                .par_iter()
                .map(|&idx| {
                    let path = path_of(&levels, idx);
                    let sig = replay(&path);
                    let last = path.last().copied();
                    let mut hs = [0u128; MAX_ALPHABET];
                    for (k, &rule) in alphabet.iter().enumerate() {
                        // Repeating the last pulse returns to the parent.
                        if last == Some(k as u8) {
                            continue;
                        }
                        let mut child = sig.clone();
                        packed.apply(&mut child, rule);
                        hs[k] = sig_hash(&child);
                    }
                    hs
                })
                .collect();
            for (&idx, hs) in chunk.iter().zip(&children) {
                for (k, &h) in hs[..alphabet.len()].iter().enumerate() {
                    if h == 0 || prev_seen.contains(&h) || cur_seen.contains(&h) {
                        continue;
                    }
                    if next_seen.insert(h) {
                        if parents.len() >= u32::MAX as usize {
                            return Err(Error::ExceedsBudget {
                                needed: parents.len() + 1,
                                budget: u32::MAX as usize,
                            });
                        }
                        parents.push(idx);
                        pulses.push(k as u8);
                    }
                }
            }
        }
        if parents.is_empty() {
            break;
        }
        nodes += parents.len();
        if problem.verbose {
            eprintln!("synth: depth {} width {} total {}", depth + 1, parents.len(), nodes);
        }
        levels.push((parents, pulses));
        prev_seen = std::mem::replace(&mut cur_seen, next_seen);
    }
    Ok(SynthesisOutcome::NotFound {
        max_len: problem.max_len,
        nodes,
    })
}

#[allow(clippy::too_many_arguments)]
fn deepen(
    problem: &SynthesisProblem,
    words: &Words,
    packed: &Packed,
    alphabet: &[(CellType, i8)],
    levels: &[(Vec<u32>, Vec<u8>)],
    depth: usize,
    mut nodes: usize,
    path_of: &(dyn Fn(&[(Vec<u32>, Vec<u8>)], u32) -> Vec<u8> + Sync),
    replay: &(dyn Fn(&[u8]) -> Vec<u128> + Sync),
) -> Result<SynthesisOutcome> {
    let width = levels[depth].0.len() as u32;
    for extra in 1..=problem.max_len - depth {
        let hit = (0..width).into_par_iter().find_map_first(|idx| {
            let mut path = path_of(levels, idx);
            let sig = replay(&path);
            let base = path.len();
            let mut stack = vec![sig];
            dfs(problem, words, packed, alphabet, &mut path, &mut stack, base + extra)
                .map(|slot| (path, stack.pop().expect("leaf signature"), slot))
        });
        nodes += width as usize * alphabet.len().pow(extra as u32);
        if problem.verbose {
            eprintln!("synth: depth {} (depth-first)", depth + extra);
        }
        if let Some((path, sig, slot)) = hit {
            return finish(problem, words, &path, &sig, slot, nodes).map(|s| SynthesisOutcome::Found(Box::new(s)));
        }
    }
    Ok(SynthesisOutcome::NotFound {
        max_len: problem.max_len,
        nodes,
    })
}

/// Lexicographic depth-first walk to paths of length `target`. On success
/// `path` and the top of `stack` hold the goal.
fn dfs(
    problem: &SynthesisProblem,
    words: &Words,
    packed: &Packed,
    alphabet: &[(CellType, i8)],
    path: &mut Vec<u8>,
    stack: &mut Vec<Vec<u128>>,
    target: usize,
) -> Option<SlotInfo> {
    let top = stack.last().expect("non-empty stack");
    if path.len() == target {
        return check_goal(top, words, packed, &problem.slots, problem.orientation);
    }
    let last = path.last().copied();
    for (k, &rule) in alphabet.iter().enumerate() {
        if last == Some(k as u8) {
            continue;
        }
        let mut child = stack.last().expect("non-empty stack").clone();
        packed.apply(&mut child, rule);
        stack.push(child);
        path.push(k as u8);
        if let Some(slot) = dfs(problem, words, packed, alphabet, path, stack, target) {
            return Some(slot);
        }
        path.pop();
        stack.pop();
    }
    None
}

fn finish(
    problem: &SynthesisProblem,
    words: &Words,
    path: &[u8],
    sig: &[u128],
    slot: SlotInfo,
    nodes: usize,
) -> Result<Synthesized> {
    let searched: PulseSequence = path.iter().map(|&k| problem.alphabet[k as usize].clone()).collect();
    let forward = problem.approach.clone().then(&searched);
    let slot_rule = UpdateRule::new(slot.kind, slot.field, slot.orientation.slot_gate(problem.target.u()))?;
    let sequence = assemble(&forward, &slot_rule);
    let nq = problem.layout.n_qubits();
    let action = extract_logical_action(&sequence, &problem.layout)?;
    let error = action.distance(&problem.target.logical_matrix(nq));
    if error > problem.tolerance || action.leakage > problem.tolerance {
        return Err(Error::LayoutCheck(format!(
            "candidate failed quantum verification (error {error:.3e}, leakage {:.3e})",
            action.leakage
        )));
    }
    let all_on = (0..sig.len())
        .find(|&w| words.enabled[w] && words.assignments[w].iter().all(|&v| v != SPECTATOR_EMPTY))
        .map(|w| sig[w])
        .unwrap_or(0);
    let run = (0..SIGNATURE_CAP - 5).any(|i| (all_on >> i) & 0x3f == 0x3f);
    Ok(Synthesized {
        sequence,
        forward,
        slot: Some(slot),
        searched_len: path.len(),
        nodes,
        action,
        error,
        six_up_at_slot: run,
    })
}

/// `forward · slot · forward⁻¹`.
pub fn assemble(forward: &PulseSequence, slot: &UpdateRule) -> PulseSequence {
    let mut rules = forward.rules.clone();
    rules.push(slot.clone());
    rules.extend(forward.inverse().rules);
    PulseSequence::new(rules)
}
