//! Globally broadcast update rules `K_f^U`: every cell of type `K` whose
//! field equals `f` is subjected to `U`, simultaneously.
//!
//! Pulse literals: `A0`, `B-2`, `A1:H`, `B2:U[0,1;1,0]`, `B0:INV`. The gate
//! defaults to inversion when omitted. Sequences are whitespace separated and
//! `#` starts a comment that runs to the end of the line.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gate::Gate1;
use crate::lattice::{field_unchecked, Basis, CellConfig, CellType, FieldValue, Mode};
use crate::linalg::CMatrix;
use crate::state::Register;

/// Largest array for which the dense global operator is built.
pub const OPERATOR_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct UpdateRule {
    pub kind: CellType,
    pub field: FieldValue,
    pub gate: Gate1,
}

impl UpdateRule {
    pub fn new(kind: CellType, field: i8, gate: Gate1) -> Result<UpdateRule> {
        Ok(UpdateRule {
            kind,
            field: FieldValue::new(field)?,
            gate,
        })
    }

    /// Inversion rule `K_f`.
    pub fn inv(kind: CellType, field: i8) -> UpdateRule {
        UpdateRule::new(kind, field, Gate1::inv()).expect("field in range")
    }

    /// Rule with the cell types exchanged, as seen from an array shifted by
    /// one cell.
    pub fn swapped_kind(&self) -> UpdateRule {
        UpdateRule {
            kind: self.kind.other(),
            ..self.clone()
        }
    }

    pub fn dagger(&self) -> UpdateRule {
        UpdateRule {
            gate: self.gate.dagger(),
            ..self.clone()
        }
    }

    /// The gate as it acts on one cell of this rule's kind in `mode`. Also
    /// checks the gate dimension against the mode.
    pub fn cell_gate(&self, mode: Mode) -> Result<Gate1> {
        self.gate.for_mode(mode)?;
        self.gate.for_radix(mode.radix(self.kind))
    }

    pub fn is_inversion(&self) -> bool {
        self.gate.name() == Some("INV")
    }

    /// Does cell `i` of `levels` satisfy the rule condition?
    #[inline]
    pub fn selects(&self, levels: &[crate::lattice::CellLevel], i: usize) -> bool {
        CellType::of_index(i) == self.kind && field_unchecked(levels, i) == self.field.get()
    }
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, self.field)?;
        if !self.is_inversion() {
            write!(f, ":{}", self.gate)?;
        }
        Ok(())
    }
}

/// One token of a pulse file: a concrete rule, or a slot whose gate is
/// supplied later (`A2:U`).
#[derive(Debug, Clone, PartialEq)]
pub enum PulseToken {
    Rule(UpdateRule),
    Slot { kind: CellType, field: FieldValue },
}

pub fn parse_token(tok: &str) -> Result<PulseToken> {
    let (head, gate) = match tok.split_once(':') {
        Some((h, g)) => (h, Some(g)),
        None => (tok, None),
    };
    let mut chars = head.chars();
    let kind = match chars.next() {
        Some('A') => CellType::A,
        Some('B') => CellType::B,
        _ => return Err(Error::Parse(format!("pulse {tok:?} must start with A or B"))),
    };
    let field: i8 = chars
        .as_str()
        .parse()
        .map_err(|_| Error::Parse(format!("bad field in pulse {tok:?}")))?;
    let field = FieldValue::new(field)?;
    match gate {
        Some("U") => Ok(PulseToken::Slot { kind, field }),
        Some(g) => Ok(PulseToken::Rule(UpdateRule {
            kind,
            field,
            gate: g.parse()?,
        })),
        None => Ok(PulseToken::Rule(UpdateRule {
            kind,
            field,
            gate: Gate1::inv(),
        })),
    }
}

pub fn tokenize(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace)
}

impl FromStr for UpdateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<UpdateRule> {
        match parse_token(s)? {
            PulseToken::Rule(r) => Ok(r),
            PulseToken::Slot { .. } => Err(Error::Parse(format!(
                "{s:?} is a gate slot; a concrete gate is required"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSequence {
    pub rules: Vec<UpdateRule>,
}

impl PulseSequence {
    pub fn new(rules: Vec<UpdateRule>) -> PulseSequence {
        PulseSequence { rules }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, UpdateRule> {
        self.rules.iter()
    }

    /// Reversed order with conjugate-transposed gates.
    pub fn inverse(&self) -> PulseSequence {
        PulseSequence::new(self.rules.iter().rev().map(UpdateRule::dagger).collect())
    }

    pub fn then(mut self, other: &PulseSequence) -> PulseSequence {
        self.rules.extend(other.rules.iter().cloned());
        self
    }

    pub fn swapped_kinds(&self) -> PulseSequence {
        PulseSequence::new(self.rules.iter().map(UpdateRule::swapped_kind).collect())
    }

    /// Removes adjacent identical inversion pulses, which cancel.
    pub fn cancel_inversions(&self) -> PulseSequence {
        let mut out: Vec<UpdateRule> = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            if r.is_inversion() && out.last().is_some_and(|l| l == r) {
                out.pop();
            } else {
                out.push(r.clone());
            }
        }
        PulseSequence::new(out)
    }

    pub fn is_classical(&self) -> bool {
        self.rules.iter().all(|r| r.gate.is_classical())
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rules.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for PulseSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<PulseSequence> {
        tokenize(s)
            .enumerate()
            .map(|(i, t)| t.parse().map_err(|e| Error::at_pulse(i, e)))
            .collect::<Result<Vec<_>>>()
            .map(PulseSequence::new)
    }
}

impl FromIterator<UpdateRule> for PulseSequence {
    fn from_iter<I: IntoIterator<Item = UpdateRule>>(iter: I) -> Self {
        PulseSequence::new(iter.into_iter().collect())
    }
}

/// Applies one pulse to a quantum state.
pub fn apply_rule<S: Register>(state: &mut S, rule: &UpdateRule) -> Result<()> {
    state.apply_rule(rule)
}

/// Left fold of [`apply_rule`]; errors carry the index of the failing pulse.
pub fn apply_sequence<S: Register>(state: &mut S, seq: &PulseSequence) -> Result<()> {
    for (i, r) in seq.iter().enumerate() {
        state.apply_rule(r).map_err(|e| Error::at_pulse(i, e))?;
    }
    Ok(())
}

fn mode_for(config: &CellConfig, gate: &Gate1) -> Mode {
    if gate.dim() == 3 {
        Mode::ThreeLevel
    } else {
        config.natural_mode()
    }
}

/// Classical fast path for gates that permute basis levels. Global phases
/// are dropped.
pub fn classical_apply(config: &CellConfig, rule: &UpdateRule) -> Result<CellConfig> {
    let mode = mode_for(config, &rule.gate);
    config.validate(mode)?;
    let perm = rule
        .cell_gate(mode)?
        .as_permutation()
        .ok_or(Error::NonClassicalGate)?;
    let levels = config.levels();
    let mut out = config.clone();
    for i in (rule.kind.parity()..levels.len()).step_by(2) {
        if field_unchecked(levels, i) == rule.field.get() {
            let (to, _) = perm[levels[i].digit()];
            out.set(i, crate::lattice::CellLevel::from_digit(to).expect("digit"));
        }
    }
    Ok(out)
}

pub fn classical_apply_sequence(config: &CellConfig, seq: &PulseSequence) -> Result<CellConfig> {
    seq.iter().enumerate().try_fold(config.clone(), |c, (i, r)| {
        classical_apply(&c, r).map_err(|e| Error::at_pulse(i, e))
    })
}

/// Dense matrix of one pulse on an `n_cells` array, built as the product of
/// the per-cell controlled factors. Test oracle for [`apply_rule`].
pub fn build_global_operator(rule: &UpdateRule, n_cells: usize, mode: Mode) -> Result<CMatrix> {
    if n_cells > OPERATOR_CAP {
        return Err(Error::TooLarge {
            n_cells,
            cap: OPERATOR_CAP,
        });
    }
    let gate = rule.cell_gate(mode)?;
    let basis = Basis::new(n_cells, mode);
    let dim = basis.size() as usize;
    let mut m = CMatrix::identity(dim);
    for cell in (rule.kind.parity()..n_cells).step_by(2) {
        // Left-multiply by the factor acting on `cell`; its control reads
        // neighbour digits, which the factor does not change.
        let stride = basis.stride(cell) as usize;
        let radix = basis.radix(cell);
        let mut next = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            let r64 = r as u64;
            if basis.field_at(r64, cell) != rule.field.get() {
                for c in 0..dim {
                    next[(r, c)] = m[(r, c)];
                }
                continue;
            }
            let d_out = basis.digit(r64, cell);
            let base = r - d_out * stride;
            for d_in in 0..radix {
                let g = gate.entry(d_out, d_in);
                if g.norm_sqr() == 0.0 {
                    continue;
                }
                let k = base + d_in * stride;
                for c in 0..dim {
                    next[(r, c)] += g * m[(k, c)];
                }
            }
        }
        m = next;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::QuantumState;

    fn cfg(s: &str) -> CellConfig {
        s.parse().unwrap()
    }

    #[test]
    fn literal_grammar() {
        let seq: PulseSequence = "A0 B-2 # comment\nA1:H B2:U[0,1;1,0] B0:INV".parse().unwrap();
        assert_eq!(seq.len(), 5);
        assert_eq!(seq.to_string(), "A0 B-2 A1:H B2 B0");
        assert!(matches!(
            parse_token("A2:U").unwrap(),
            PulseToken::Slot { kind: CellType::A, .. }
        ));
        assert!("A3".parse::<UpdateRule>().is_err());
        assert!("C0".parse::<UpdateRule>().is_err());
        let err = "A0 B9".parse::<PulseSequence>().unwrap_err();
        assert!(matches!(err, Error::AtPulse { index: 1, .. }));
    }

    #[test]
    fn a2_on_all_down_is_identity() {
        let c = CellConfig::all_down(8).unwrap();
        assert_eq!(classical_apply(&c, &UpdateRule::inv(CellType::A, 2)).unwrap(), c);
        let op = build_global_operator(&UpdateRule::inv(CellType::A, 2), 2, Mode::TwoLevel).unwrap();
        assert!(op.max_distance(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn hadamard_a0_on_uu_end_cells_is_identity() {
        let rule = UpdateRule::new(CellType::A, 0, Gate1::h()).unwrap();
        let mut s = QuantumState::from_config(&cfg("duu"), Mode::TwoLevel).unwrap();
        let before = s.clone();
        apply_rule(&mut s, &rule).unwrap();
        assert!(s.distance(&before) < 1e-15);
    }

    #[test]
    fn b0_is_a_permutation_on_three_cells() {
        let op = build_global_operator(&UpdateRule::inv(CellType::B, 0), 3, Mode::TwoLevel).unwrap();
        for c in 0..8 {
            let ones: Vec<usize> = (0..8).filter(|&r| op[(r, c)].norm() > 0.5).collect();
            assert_eq!(ones.len(), 1);
        }
        assert!(op.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn b0_moves_glider_one_cell() {
        // An up-up block starting on an A cell moves left under B0.
        let c = cfg("dddduudddd");
        assert_eq!(
            classical_apply(&c, &UpdateRule::inv(CellType::B, 0)).unwrap(),
            cfg("ddduuddddd")
        );
    }

    #[test]
    fn hadamard_is_not_classical() {
        let rule = UpdateRule::new(CellType::A, 0, Gate1::h()).unwrap();
        assert_eq!(classical_apply(&cfg("dud"), &rule), Err(Error::NonClassicalGate));
    }

    #[test]
    fn cancel_inversions() {
        let seq: PulseSequence = "B0 A0 A0 B0 A2 B2:H B2:H".parse().unwrap();
        assert_eq!(seq.cancel_inversions().to_string(), "A2 B2:H B2:H");
    }

    #[test]
    fn operator_too_large() {
        assert!(build_global_operator(&UpdateRule::inv(CellType::A, 0), 13, Mode::TwoLevel).is_err());
    }
}
