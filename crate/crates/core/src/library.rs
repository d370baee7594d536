//! Checked-in gate sequences and their placement on arbitrary layouts.
//!
//! Each golden file holds one sequence `T · P · slot · P⁻¹ · T⁻¹` found by
//! the synthesizer on a canonical layout: `T` is the approach transport,
//! `P` the searched part and `slot` a `K2:U` placeholder for the rule that
//! carries the gate. Metadata lines `# key: value` precede the body; the
//! `sha256` key is the digest of the body tokens joined by single spaces.
//!
//! Placing an entry on a layout replaces `T` with the transport that brings
//! the CU to the canonical distance from the rightmost involved qubit, with
//! A and B swapped when that transport has odd length.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::classical::BitArray;
use crate::codec::{encode, extract_logical_action, Layout, LogicalWord};
use crate::error::{Error, Result};
use crate::gate::Gate1;
use crate::lattice::CellType;
use crate::pulses::{frame_offset, transport, transport_from};
use crate::rules::{parse_token, tokenize, PulseSequence, PulseToken, UpdateRule};
use crate::state::Register;
use crate::synth::{canonical_problem, GateKind, GateSpec, Geometry, Orientation, CANONICAL_CU_DISTANCE, SLOT_PITCH};

const GOLDEN: [(&str, &str); 4] = [
    ("one_qubit", include_str!("../golden/one_qubit.pulse")),
    ("controlled_u", include_str!("../golden/controlled_u.pulse")),
    ("ccu", include_str!("../golden/ccu.pulse")),
    ("readout", include_str!("../golden/readout.pulse")),
];

/// Layouts with at most this many qubits are checked on every word before a
/// placed gate is applied; larger ones on the involved qubits and their
/// nearest neighbours.
pub const FULL_CHECK_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LibraryEntry {
    pub name: String,
    pub kind: GateKind,
    pub geometry: Geometry,
    pub orientation: Orientation,
    /// Length of the approach transport at the start of the sequence.
    pub approach: usize,
    /// Searched pulses `P`.
    #[serde(serialize_with = "ser_display")]
    pub core: PulseSequence,
    pub slot_kind: CellType,
    pub slot_field: i8,
    pub sha256: String,
    /// Every `key: value` line, as written.
    pub meta: BTreeMap<String, String>,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn body_digest(tokens: &[&str]) -> String {
    hex::encode(Sha256::digest(tokens.join(" ").as_bytes()))
}

fn parse_kind(s: &str) -> Result<GateKind> {
    match s {
        "one_qubit" => Ok(GateKind::OneQubit),
        "controlled_u" => Ok(GateKind::ControlledU),
        "ccu" => Ok(GateKind::Ccu),
        _ => Err(Error::Golden(format!("unknown gate kind {s:?}"))),
    }
}

fn parse_geometry(s: &str) -> Result<Geometry> {
    let mut g = Geometry::MINIMAL;
    for part in s.split_whitespace() {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Golden(format!("bad geometry {s:?}")))?;
        let n: usize = v.parse().map_err(|_| Error::Golden(format!("bad geometry {s:?}")))?;
        match k {
            "left" => g.left = n,
            "right" => g.right = n,
            "empty" => g.empty_spectators = n != 0,
            _ => return Err(Error::Golden(format!("bad geometry key {k:?}"))),
        }
    }
    Ok(g)
}

pub fn format_geometry(g: &Geometry) -> String {
    format!("left={} right={} empty={}", g.left, g.right, u8::from(g.empty_spectators))
}

impl LibraryEntry {
    /// Parses a golden file and checks its digest and shape.
    pub fn parse(name: &str, text: &str) -> Result<LibraryEntry> {
        let mut meta = BTreeMap::new();
        for line in text.lines() {
            if let Some(rest) = line.trim().strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
        }
        let get = |k: &str| {
            meta.get(k)
                .cloned()
                .ok_or_else(|| Error::Golden(format!("{name}: missing metadata {k:?}")))
        };
        let tokens: Vec<&str> = tokenize(text).collect();
        let digest = body_digest(&tokens);
        let sha256 = get("sha256")?;
        if digest != sha256 {
            return Err(Error::Golden(format!("{name}: digest {digest} does not match recorded {sha256}")));
        }
        let mut forward = Vec::new();
        let mut slot = None;
        let mut tail = Vec::new();
        for (i, tok) in tokens.iter().enumerate() {
            match parse_token(tok).map_err(|e| Error::at_pulse(i, e))? {
                PulseToken::Rule(r) if slot.is_none() => forward.push(r),
                PulseToken::Rule(r) => tail.push(r),
                PulseToken::Slot { kind, field } if slot.is_none() => slot = Some((kind, field.get())),
                PulseToken::Slot { .. } => return Err(Error::Golden(format!("{name}: more than one slot"))),
            }
        }
        let (slot_kind, slot_field) = slot.ok_or_else(|| Error::Golden(format!("{name}: no slot")))?;
        let forward = PulseSequence::new(forward);
        if PulseSequence::new(tail) != forward.inverse() {
            return Err(Error::Golden(format!("{name}: second half is not the reverse of the first")));
        }
        let approach: usize = get("approach")?
            .parse()
            .map_err(|_| Error::Golden(format!("{name}: bad approach")))?;
        if approach > forward.len() || PulseSequence::new(forward.rules[..approach].to_vec()) != transport(approach as i64) {
            return Err(Error::Golden(format!("{name}: sequence does not start with the approach")));
        }
        let core = PulseSequence::new(forward.rules[approach..].to_vec());
        if let Some(r) = core.iter().find(|r| !r.is_inversion() || ![0, 2].contains(&r.field.get())) {
            return Err(Error::Golden(format!("{name}: {r} is not a local inversion")));
        }
        Ok(LibraryEntry {
            name: name.to_string(),
            kind: parse_kind(&get("gate")?)?,
            geometry: parse_geometry(&get("geometry")?)?,
            orientation: get("orientation")?.parse()?,
            approach,
            core,
            slot_kind,
            slot_field,
            sha256,
            meta,
        })
    }

    /// Renders a golden file, computing the digest.
    pub fn render(&self, extra: &[(&str, String)]) -> String {
        let forward = transport(self.approach as i64).then(&self.core);
        let slot = format!("{}{}:U", self.slot_kind, self.slot_field);
        let body = format!("{forward}\n{slot}\n{}\n", forward.inverse());
        let tokens: Vec<&str> = tokenize(&body).collect();
        let mut out = String::new();
        out.push_str(&format!("# gate: {}\n", self.kind.name()));
        out.push_str(&format!("# geometry: {}\n", format_geometry(&self.geometry)));
        out.push_str(&format!("# orientation: {}\n", self.orientation.name()));
        out.push_str(&format!("# approach: {}\n", self.approach));
        for (k, v) in extra {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&format!("# sha256: {}\n", body_digest(&tokens)));
        out.push_str(&body);
        out
    }

    /// The rule carrying `u`, in the canonical frame.
    pub fn slot_rule(&self, u: &Gate1) -> Result<UpdateRule> {
        UpdateRule::new(self.slot_kind, self.slot_field, self.orientation.slot_gate(u))
    }

    /// Full sequence on the canonical layout.
    pub fn canonical_sequence(&self, u: &Gate1) -> Result<PulseSequence> {
        let forward = transport(self.approach as i64).then(&self.core);
        Ok(crate::synth::assemble(&forward, &self.slot_rule(u)?))
    }

    /// Canonical layout (spectators included) and the gate it realizes.
    pub fn canonical(&self, u: &Gate1) -> Result<(Layout, GateSpec)> {
        let p = canonical_problem(self.kind, u.clone(), self.geometry, self.core.len())?;
        Ok((p.layout, p.target))
    }
}

pub struct Library {
    entries: Vec<LibraryEntry>,
}

static BUILTIN: OnceLock<std::result::Result<Library, Error>> = OnceLock::new();

impl Library {
    /// The checked-in library. Fails if any golden file is corrupt.
    pub fn builtin() -> Result<&'static Library> {
        BUILTIN
            .get_or_init(|| {
                let entries = GOLDEN
                    .iter()
                    .map(|(name, text)| LibraryEntry::parse(name, text))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Library { entries })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn entries(&self) -> &[LibraryEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Result<&LibraryEntry> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::MissingEntry(name.to_string()))
    }

    pub fn for_kind(&self, kind: GateKind) -> Result<&LibraryEntry> {
        self.get(kind.name())
    }
}

/// One placed gate: `prefix · slot · suffix`, with `prefix` and `suffix`
/// classical.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedGate {
    pub prefix: PulseSequence,
    pub slot: UpdateRule,
    pub suffix: PulseSequence,
}

impl PlacedGate {
    pub fn sequence(&self) -> PulseSequence {
        let mut rules = self.prefix.rules.clone();
        rules.push(self.slot.clone());
        rules.extend(self.suffix.rules.iter().cloned());
        PulseSequence::new(rules)
    }
}

/// Cells of the involved qubits in canonical order (target, then controls
/// left to right), after checking they sit at the slot pitch.
fn involved_cells(layout: &Layout, spec: &GateSpec) -> Result<Vec<usize>> {
    spec.validate(layout.n_qubits())?;
    let q = layout.qubits();
    let t = q[spec.target()];
    let want: Vec<usize> = match spec {
        GateSpec::OneQubit { .. } => vec![],
        GateSpec::ControlledU { control, .. } => vec![q[*control]],
        GateSpec::Ccu { c1, c2, .. } => vec![q[*c2], q[*c1]],
    };
    for (j, &c) in want.iter().enumerate() {
        if c != t + SLOT_PITCH * (j + 1) {
            return Err(Error::Layout(format!(
                "unsupported geometry for {spec}: controls must follow the target at {SLOT_PITCH}-cell steps"
            )));
        }
    }
    let mut cells = vec![t];
    cells.extend(want);
    Ok(cells)
}

/// Chains placed gates so that the CU moves directly from one working
/// position to the next.
pub struct Composer<'a> {
    layout: &'a Layout,
    library: &'a Library,
    base: i64,
    offset: i64,
    rules: Vec<UpdateRule>,
}

impl<'a> Composer<'a> {
    pub fn new(layout: &'a Layout, library: &'a Library) -> Composer<'a> {
        let base = frame_offset(layout);
        Composer {
            layout,
            library,
            base,
            offset: base,
            rules: Vec::new(),
        }
    }

    /// Transport length that brings the CU to its working position for
    /// `spec`.
    pub fn steps_for(&self, spec: &GateSpec) -> Result<i64> {
        let cells = involved_cells(self.layout, spec)?;
        let cu = self
            .layout
            .cu()
            .ok_or_else(|| Error::Layout("placing a gate needs a CU".into()))?;
        let right = *cells.iter().max().expect("target present") as i64;
        let delta = cu as i64 - right - CANONICAL_CU_DISTANCE as i64;
        if delta % 2 != 0 {
            return Err(Error::Layout("CU and qubits share a parity".into()));
        }
        Ok(delta / 2)
    }

    fn move_to(&mut self, k: i64) {
        let target = self.base + k;
        self.rules.extend(transport_from(self.offset, target - self.offset).rules);
        self.offset = target;
    }

    fn framed(&self, seq: &PulseSequence) -> PulseSequence {
        if self.offset.rem_euclid(2) == 1 {
            seq.swapped_kinds()
        } else {
            seq.clone()
        }
    }

    /// Places one gate and returns it as a standalone program from the
    /// home position.
    pub fn place(&self, spec: &GateSpec, entry: &LibraryEntry, slot_gate: Gate1) -> Result<PlacedGate> {
        let k = self.steps_for(spec)?;
        let offset = self.base + k;
        let mut prefix = transport_from(self.base, k);
        let core = if offset.rem_euclid(2) == 1 {
            entry.core.swapped_kinds()
        } else {
            entry.core.clone()
        };
        prefix = prefix.then(&core);
        let mut slot = UpdateRule::new(entry.slot_kind, entry.slot_field, slot_gate)?;
        if offset.rem_euclid(2) == 1 {
            slot = slot.swapped_kind();
        }
        let suffix = core.inverse().then(&transport_from(offset, -k));
        Ok(PlacedGate { prefix, slot, suffix })
    }

    /// Appends `spec` from the library.
    pub fn push(&mut self, spec: &GateSpec) -> Result<()> {
        let entry = self.library.for_kind(spec.kind())?;
        let k = self.steps_for(spec)?;
        self.move_to(k);
        let core = self.framed(&entry.core);
        let mut slot = entry.slot_rule(spec.u())?;
        if self.offset.rem_euclid(2) == 1 {
            slot = slot.swapped_kind();
        }
        self.rules.extend(core.rules.iter().cloned());
        self.rules.push(slot);
        self.rules.extend(core.inverse().rules);
        Ok(())
    }

    /// Returns the CU to its slot and yields the program.
    pub fn finish(mut self) -> PulseSequence {
        self.move_to(0);
        PulseSequence::new(self.rules)
    }
}

/// Standalone program for one gate.
pub fn gate_program(layout: &Layout, spec: &GateSpec) -> Result<PulseSequence> {
    let lib = Library::builtin()?;
    let mut c = Composer::new(layout, lib);
    c.push(spec)?;
    Ok(c.finish())
}

/// Checks on the classical engine that the placed gate's slot selects
/// exactly the target cell for words whose controls are all 1, nothing
/// otherwise, with the orientation the entry records.
pub fn check_placement(layout: &Layout, spec: &GateSpec, placed: &PlacedGate, orientation: Orientation) -> Result<()> {
    let nq = layout.n_qubits();
    let cells = involved_cells(layout, spec)?;
    let free: Vec<usize> = if nq <= FULL_CHECK_QUBITS {
        (0..nq).collect()
    } else {
        let lo = cells[0].saturating_sub(2 * SLOT_PITCH);
        let hi = cells[cells.len() - 1] + 2 * SLOT_PITCH;
        (0..nq).filter(|&j| (lo..=hi).contains(&layout.qubits()[j])).collect()
    };
    let probe = UpdateRule::inv(placed.slot.kind, placed.slot.field.get());
    let controls = spec.controls();
    let mut cell: Option<usize> = None;
    for w in 0..1usize << free.len() {
        let mut bits = vec![0u8; nq];
        for (i, &j) in free.iter().enumerate() {
            bits[j] = ((w >> (free.len() - 1 - i)) & 1) as u8;
        }
        let word = LogicalWord::new(bits.clone(), true);
        let mut b = BitArray::from_config(&encode(layout, &word)?)?;
        b.apply_sequence(&placed.prefix)?;
        let before = b.clone();
        b.apply_rule(&probe)?;
        let selected: Vec<usize> = (0..b.len()).filter(|&i| b.get(i) != before.get(i)).collect();
        let enabled = controls.iter().all(|&c| bits[c] == 1);
        let fail = |why: &str| Err(Error::LayoutCheck(format!("{spec} on word {word}: {why}")));
        if !enabled {
            if !selected.is_empty() {
                return fail("slot fires with a control at 0");
            }
            continue;
        }
        if selected.len() != 1 {
            return fail("slot does not select exactly one cell");
        }
        let s = selected[0];
        if cell.is_some_and(|c| c != s) {
            return fail("slot cell depends on the word");
        }
        cell = Some(s);
        let up = before.get(s);
        let bit = bits[spec.target()] == 1;
        let direct = up == bit;
        if direct != (orientation == Orientation::Direct) {
            return fail("slot orientation differs from the library entry");
        }
    }
    Ok(())
}

/// Applies `spec` through the library after a classical placement check.
pub fn apply_gate<S: Register>(state: &mut S, layout: &Layout, spec: &GateSpec) -> Result<()> {
    let lib = Library::builtin()?;
    let entry = lib.for_kind(spec.kind())?;
    let composer = Composer::new(layout, lib);
    let placed = composer.place(spec, entry, entry.orientation.slot_gate(spec.u()))?;
    check_placement(layout, spec, &placed, entry.orientation)?;
    crate::rules::apply_sequence(state, &placed.sequence())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub length: usize,
    pub digest_ok: bool,
    /// (gate name, action error, leakage) on the canonical layout.
    pub gates: Vec<(String, f64, f64)>,
    /// Worst action error over translated copies.
    pub covariance_error: f64,
    pub passed: bool,
}

pub const VERIFY_GATES: [&str; 4] = ["X", "Z", "H", "T"];

/// Verifies one entry: logical action for X, Z, H and T on its canonical
/// layout (spectators present), and translation covariance for shifts of
/// 1 to 4 cells.
pub fn verify_entry(entry: &LibraryEntry, tol: f64) -> Result<EntryReport> {
    let mut gates = Vec::new();
    let mut passed = true;
    let mut covariance_error = 0.0f64;
    for name in VERIFY_GATES {
        let u: Gate1 = name.parse()?;
        let (layout, spec) = entry.canonical(&u)?;
        let seq = entry.canonical_sequence(&u)?;
        let act = extract_logical_action(&seq, &layout)?;
        let err = act.distance(&spec.logical_matrix(layout.n_qubits()));
        passed &= err <= tol && act.leakage <= tol;
        gates.push((name.to_string(), err, act.leakage));
        if name == "H" {
            for k in 1..=4i64 {
                let shifted = layout
                    .displaced(-k, k)
                    .ok_or_else(|| Error::Layout("canonical layout too tight to shift".into()))?;
                let off = frame_offset(&shifted);
                let moved = transport_from(off, k).then(&seq).then(&transport_from(off + k, -k));
                let act = extract_logical_action(&moved, &shifted)?;
                let e = act.distance(&spec.logical_matrix(layout.n_qubits())).max(act.leakage);
                covariance_error = covariance_error.max(e);
            }
        }
    }
    passed &= covariance_error <= tol;
    Ok(EntryReport {
        name: entry.name.clone(),
        length: 2 * (entry.approach + entry.core.len()) + 1,
        digest_ok: true,
        gates,
        covariance_error,
        passed,
    })
}
