//! Logical qubits and the control unit as cell patterns.
//!
//! A qubit occupies four cells, `↑↑↓↓` for 0 and `↓↓↑↑` for 1. The control
//! unit (CU) occupies six cells, `↑↑↓↓↑↑`. Every other cell is a `↓` spacer.
//! Qubit blocks share one start parity and the CU starts on the other one, so
//! that transport pulses move them in opposite directions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{CellConfig, CellLevel, Mode};
use crate::linalg::CMatrix;
use crate::rules::PulseSequence;
use crate::state::{QuantumState, Register, SparseState};

pub const QUBIT_LEN: usize = 4;
pub const CU_LEN: usize = 6;
pub const MIN_SPACER: usize = 4;

use CellLevel::{Down as D, Up as U};
pub const QUBIT0: [CellLevel; QUBIT_LEN] = [U, U, D, D];
pub const QUBIT1: [CellLevel; QUBIT_LEN] = [D, D, U, U];
pub const CU_PATTERN: [CellLevel; CU_LEN] = [U, U, D, D, U, U];

/// Arrays up to this length are verified on the dense state vector.
pub const DENSE_VERIFY_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layout {
    n_cells: usize,
    qubits: Vec<usize>,
    cu: Option<usize>,
    spacer: usize,
}

impl Layout {
    /// Layout with the minimum spacer of four cells.
    pub fn new(n_cells: usize, qubits: Vec<usize>, cu: Option<usize>) -> Result<Layout> {
        Layout::with_spacer(n_cells, qubits, cu, MIN_SPACER)
    }

    pub fn with_spacer(n_cells: usize, qubits: Vec<usize>, cu: Option<usize>, spacer: usize) -> Result<Layout> {
        if spacer < MIN_SPACER {
            return Err(Error::Layout(format!(
                "spacer of {spacer} cells is below the minimum of {MIN_SPACER}"
            )));
        }
        let l = Layout {
            n_cells,
            qubits,
            cu,
            spacer,
        };
        l.validate()?;
        Ok(l)
    }

    fn validate(&self) -> Result<()> {
        if self.n_cells < 2 {
            return Err(Error::Layout("need at least 2 cells".into()));
        }
        let mut blocks: Vec<(usize, usize, String)> = self
            .qubits
            .iter()
            .enumerate()
            .map(|(j, &s)| (s, QUBIT_LEN, format!("qubit {j}")))
            .collect();
        if let Some(c) = self.cu {
            blocks.push((c, CU_LEN, "CU".into()));
        }
        for (s, len, name) in &blocks {
            if s + len > self.n_cells {
                return Err(Error::Layout(format!(
                    "{name} at {s} runs past the end of a {}-cell array",
                    self.n_cells
                )));
            }
        }
        if let Some(&q0) = self.qubits.first() {
            if self.qubits.iter().any(|&s| s % 2 != q0 % 2) {
                return Err(Error::Layout("qubit slots must share one start parity".into()));
            }
            if let Some(c) = self.cu {
                if c % 2 == q0 % 2 {
                    return Err(Error::Layout(
                        "CU must start on the parity opposite to the qubit slots".into(),
                    ));
                }
            }
        }
        blocks.sort_by_key(|b| b.0);
        for pair in blocks.windows(2) {
            let (s0, l0, ref n0) = pair[0];
            let (s1, _, ref n1) = pair[1];
            if s0 + l0 > s1 {
                return Err(Error::Layout(format!("{n0} and {n1} overlap")));
            }
            if s1 - (s0 + l0) < self.spacer {
                return Err(Error::Layout(format!(
                    "spacer between {n0} and {n1} is {} cells, need {}",
                    s1 - (s0 + l0),
                    self.spacer
                )));
            }
        }
        Ok(())
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn cu(&self) -> Option<usize> {
        self.cu
    }

    pub fn spacer(&self) -> usize {
        self.spacer
    }

    /// Parity of the qubit slot starts, or of the cell after the CU start
    /// when there are no qubits. Odd is the reference frame of the pulse
    /// library.
    pub fn frame_parity(&self) -> usize {
        match (self.qubits.first(), self.cu) {
            (Some(&q), _) => q % 2,
            (None, Some(c)) => (c + 1) % 2,
            (None, None) => 1,
        }
    }

    /// The layout after moving qubits by `dq` cells and the CU by `dc`.
    /// Spacer checks are skipped because blocks pass through each other
    /// during transport.
    pub fn displaced(&self, dq: i64, dc: i64) -> Option<Layout> {
        let mv = |s: usize, d: i64, len: usize| -> Option<usize> {
            let t = s as i64 + d;
            (t >= 0 && t as usize + len <= self.n_cells).then_some(t as usize)
        };
        let qubits = self
            .qubits
            .iter()
            .map(|&s| mv(s, dq, QUBIT_LEN))
            .collect::<Option<Vec<_>>>()?;
        let cu = match self.cu {
            Some(c) => Some(mv(c, dc, CU_LEN)?),
            None => None,
        };
        Some(Layout {
            n_cells: self.n_cells,
            qubits,
            cu,
            spacer: self.spacer,
        })
    }

    fn blocks_disjoint(&self) -> bool {
        let mut b: Vec<(usize, usize)> = self.qubits.iter().map(|&s| (s, QUBIT_LEN)).collect();
        if let Some(c) = self.cu {
            b.push((c, CU_LEN));
        }
        b.sort();
        b.windows(2).all(|p| p[0].0 + p[0].1 <= p[1].0)
    }

    /// Plain-text form: `key = value` lines for n_cells, qubits, cu, spacer.
    pub fn to_text(&self) -> String {
        let qs: Vec<String> = self.qubits.iter().map(|q| q.to_string()).collect();
        let cu = self.cu.map_or("none".to_string(), |c| c.to_string());
        format!(
            "n_cells = {}\nqubits = {}\ncu = {}\nspacer = {}\n",
            self.n_cells,
            qs.join(","),
            cu,
            self.spacer
        )
    }

    pub fn parse_text(text: &str) -> Result<Layout> {
        let mut n = None;
        let mut qubits = Vec::new();
        let mut cu = None;
        let mut spacer = MIN_SPACER;
        let num = |k: &str, v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::Parse(format!("bad value {v:?} for {k}")))
        };
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key = value, got {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "n_cells" => n = Some(num(k, v)?),
                "qubits" => {
                    qubits = v
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| num(k, s))
                        .collect::<Result<_>>()?
                }
                "cu" if v == "none" => cu = None,
                "cu" => cu = Some(num(k, v)?),
                "spacer" => spacer = num(k, v)?,
                _ => return Err(Error::Parse(format!("unknown layout key {k:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("layout is missing n_cells".into()))?;
        Layout::with_spacer(n, qubits, cu, spacer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LogicalWord {
    pub bits: Vec<u8>,
    pub cu: bool,
}

impl LogicalWord {
    pub fn new(bits: Vec<u8>, cu: bool) -> LogicalWord {
        LogicalWord { bits, cu }
    }

    /// Word whose bits are the binary digits of `index`, qubit 0 most
    /// significant.
    pub fn from_index(index: usize, n_qubits: usize, cu: bool) -> LogicalWord {
        let bits = (0..n_qubits)
            .map(|j| ((index >> (n_qubits - 1 - j)) & 1) as u8)
            .collect();
        LogicalWord { bits, cu }
    }

    pub fn index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl fmt::Display for LogicalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("q=")?;
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        write!(f, ",cu={}", u8::from(self.cu))
    }
}

impl FromStr for LogicalWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<LogicalWord> {
        let mut bits = None;
        let mut cu = false;
        for part in s.split(',') {
            let (k, v) = part
                .trim()
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad word literal {s:?}")))?;
            match k.trim() {
                "q" => {
                    bits = Some(
                        v.trim()
                            .chars()
                            .map(|c| match c {
                                '0' => Ok(0),
                                '1' => Ok(1),
                                _ => Err(Error::Parse(format!("bad bit {c:?} in {s:?}"))),
                            })
                            .collect::<Result<Vec<u8>>>()?,
                    )
                }
                "cu" => {
                    cu = match v.trim() {
                        "0" => false,
                        "1" => true,
                        _ => return Err(Error::Parse(format!("bad cu flag in {s:?}"))),
                    }
                }
                _ => return Err(Error::Parse(format!("unknown key {k:?} in {s:?}"))),
            }
        }
        Ok(LogicalWord {
            bits: bits.unwrap_or_default(),
            cu,
        })
    }
}

pub fn encode(layout: &Layout, word: &LogicalWord) -> Result<CellConfig> {
    if word.bits.len() != layout.n_qubits() {
        return Err(Error::Layout(format!(
            "word has {} bits, layout has {} qubits",
            word.bits.len(),
            layout.n_qubits()
        )));
    }
    if word.cu && layout.cu.is_none() {
        return Err(Error::Layout("word has a CU but the layout has no CU slot".into()));
    }
    if !layout.blocks_disjoint() {
        return Err(Error::Layout("blocks overlap".into()));
    }
    let mut c = CellConfig::all_down(layout.n_cells)?;
    for (&s, &b) in layout.qubits.iter().zip(&word.bits) {
        let pat = match b {
            0 => QUBIT0,
            1 => QUBIT1,
            _ => return Err(Error::Layout(format!("bit value {b} is not 0 or 1"))),
        };
        for (k, &l) in pat.iter().enumerate() {
            c.set(s + k, l);
        }
    }
    if word.cu {
        let s = layout.cu.expect("checked above");
        for (k, &l) in CU_PATTERN.iter().enumerate() {
            c.set(s + k, l);
        }
    }
    Ok(c)
}

fn match_block(config: &CellConfig, start: usize, patterns: &[&[CellLevel]]) -> std::result::Result<usize, usize> {
    let mut alive: Vec<usize> = (0..patterns.len()).collect();
    for k in 0..patterns[0].len() {
        let l = config.get(start + k);
        alive.retain(|&p| patterns[p][k] == l);
        if alive.is_empty() {
            return Err(start + k);
        }
    }
    Ok(alive[0])
}

pub fn decode(layout: &Layout, config: &CellConfig) -> Result<LogicalWord> {
    if config.len() != layout.n_cells {
        return Err(Error::Layout(format!(
            "config has {} cells, layout has {}",
            config.len(),
            layout.n_cells
        )));
    }
    if !layout.blocks_disjoint() {
        return Err(Error::Layout("blocks overlap".into()));
    }
    let mut covered = vec![false; layout.n_cells];
    let mut bad: Option<usize> = None;
    let mut note = |cell: usize| bad = Some(bad.map_or(cell, |b: usize| b.min(cell)));
    let mut bits = Vec::with_capacity(layout.n_qubits());
    for &s in &layout.qubits {
        covered[s..s + QUBIT_LEN].iter_mut().for_each(|c| *c = true);
        match match_block(config, s, &[&QUBIT0, &QUBIT1]) {
            Ok(p) => bits.push(p as u8),
            Err(cell) => {
                note(cell);
                bits.push(0);
            }
        }
    }
    let mut cu = false;
    if let Some(s) = layout.cu {
        covered[s..s + CU_LEN].iter_mut().for_each(|c| *c = true);
        match match_block(config, s, &[&CU_PATTERN, &[D; CU_LEN]]) {
            Ok(p) => cu = p == 0,
            Err(cell) => note(cell),
        }
    }
    for (i, &cov) in covered.iter().enumerate() {
        if !cov && config.get(i) != D {
            note(i);
            break;
        }
    }
    match bad {
        Some(cell) => Err(Error::Malformed { cell }),
        None => Ok(LogicalWord { bits, cu }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Displacement {
    pub qubits: i64,
    pub cu: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogicalAction {
    pub matrix: CMatrix,
    pub leakage: f64,
    pub displacement: Displacement,
}

impl LogicalAction {
    pub fn distance(&self, target: &CMatrix) -> f64 {
        self.matrix.max_distance(target)
    }
}

/// Simulates `seq` on every coded basis word (with the CU present when the
/// layout has a slot for it) and projects onto the coded subspace of the
/// displaced layout that captures the most probability. The dense backend
/// is used up to [`DENSE_VERIFY_CAP`] cells, the sparse one above.
pub fn extract_logical_action(seq: &PulseSequence, layout: &Layout) -> Result<LogicalAction> {
    if layout.n_cells <= DENSE_VERIFY_CAP {
        extract_with(seq, layout, |c| QuantumState::from_config(c, Mode::TwoLevel))
    } else {
        extract_with(seq, layout, |c| SparseState::from_config(c, Mode::TwoLevel))
    }
}

/// [`extract_logical_action`] on a chosen backend.
pub fn extract_with<S: Register>(
    seq: &PulseSequence,
    layout: &Layout,
    make: impl Fn(&CellConfig) -> Result<S>,
) -> Result<LogicalAction> {
    let nq = layout.n_qubits();
    let dim = 1usize << nq;
    let has_cu = layout.cu.is_some();
    let mut outputs = Vec::with_capacity(dim);
    for w in 0..dim {
        let word = LogicalWord::from_index(w, nq, has_cu);
        let mut s = make(&encode(layout, &word)?)?;
        crate::rules::apply_sequence(&mut s, seq)?;
        outputs.push(s);
    }
    let reach = seq.len() as i64;
    let mut best: Option<(f64, Displacement, Layout)> = None;
    // Candidate frames come from decoding the dominant output term.
    let mut candidates = Vec::new();
    for out in &outputs {
        let Some((top, _)) = out
            .terms()
            .into_iter()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        else {
            continue;
        };
        for dq in -reach..=reach {
            let dcs: Vec<i64> = if has_cu { (-reach..=reach).collect() } else { vec![0] };
            for dc in dcs {
                let d = Displacement { qubits: dq, cu: dc };
                if candidates.contains(&d) {
                    continue;
                }
                if let Some(l) = layout.displaced(dq, dc) {
                    if decode(&l, &top).is_ok() {
                        candidates.push(d);
                    }
                }
            }
        }
        break;
    }
    for d in candidates {
        let l = layout.displaced(d.qubits, d.cu).expect("checked");
        let mut captured = 0.0;
        for out in &outputs {
            for v in 0..dim {
                let c = encode(&l, &LogicalWord::from_index(v, nq, has_cu))?;
                captured += out.probability(&c);
            }
        }
        let better = match &best {
            None => true,
            Some((p, bd, _)) => {
                captured > p + 1e-12
                    || ((captured - p).abs() <= 1e-12
                        && (d.qubits.abs() + d.cu.abs()) < (bd.qubits.abs() + bd.cu.abs()))
            }
        };
        if better {
            best = Some((captured, d, l));
        }
    }
    let (displacement, frame) = match best {
        Some((_, d, l)) => (d, l),
        None => (Displacement { qubits: 0, cu: 0 }, layout.clone()),
    };
    let mut matrix = CMatrix::zeros(dim, dim);
    let mut leakage = 0.0f64;
    for (w, out) in outputs.iter().enumerate() {
        let mut kept = 0.0;
        for v in 0..dim {
            let c = encode(&frame, &LogicalWord::from_index(v, nq, has_cu))?;
            let a = out.amplitude(&c);
            matrix[(v, w)] = a;
            kept += a.norm_sqr();
        }
        leakage = leakage.max((out.norm_sqr() - kept).max(0.0));
    }
    Ok(LogicalAction {
        matrix,
        leakage,
        displacement,
    })
}

/// Logical matrix of `u` on `target` controlled on every qubit in
/// `controls`, over `n_qubits` qubits with qubit 0 most significant.
pub fn controlled_matrix(n_qubits: usize, controls: &[usize], target: usize, u: &crate::gate::Gate1) -> CMatrix {
    let dim = 1usize << n_qubits;
    let bit = |x: usize, j: usize| (x >> (n_qubits - 1 - j)) & 1;
    CMatrix::from_fn(dim, dim, |r, c| {
        let others_equal = (0..n_qubits).all(|j| j == target || bit(r, j) == bit(c, j));
        if !others_equal {
            return Complex64::new(0.0, 0.0);
        }
        if controls.iter().all(|&k| bit(c, k) == 1) {
            u.entry(bit(r, target), bit(c, target))
        } else if bit(r, target) == bit(c, target) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
