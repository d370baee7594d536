//! Cell levels, classical configurations of the array, basis indexing and the
//! neighbour field.
//!
//! Cells alternate in type along the array: even indices are type A, odd
//! indices are type B, and index 0 is the left end. Basis states are ranked in
//! mixed radix with cell 0 most significant and levels ordered `↓ < ↑ < ⇝`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest array the dense state vector accepts.
pub const DENSE_CAP: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CellLevel {
    Down,
    Up,
    /// Short-lived third level of a type-B cell; decays to `Down`.
    Fluor,
}

impl CellLevel {
    pub fn digit(self) -> usize {
        match self {
            CellLevel::Down => 0,
            CellLevel::Up => 1,
            CellLevel::Fluor => 2,
        }
    }

    pub fn from_digit(d: usize) -> Option<CellLevel> {
        match d {
            0 => Some(CellLevel::Down),
            1 => Some(CellLevel::Up),
            2 => Some(CellLevel::Fluor),
            _ => None,
        }
    }

    /// Contribution of this cell to a neighbour's field.
    pub fn field_contribution(self) -> i8 {
        match self {
            CellLevel::Up => 1,
            CellLevel::Down => -1,
            CellLevel::Fluor => 0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            CellLevel::Down => 'd',
            CellLevel::Up => 'u',
            CellLevel::Fluor => 'f',
        }
    }

    pub fn from_symbol(c: char) -> Option<CellLevel> {
        match c {
            'd' => Some(CellLevel::Down),
            'u' => Some(CellLevel::Up),
            'f' => Some(CellLevel::Fluor),
            _ => None,
        }
    }

    pub fn flipped(self) -> CellLevel {
        match self {
            CellLevel::Down => CellLevel::Up,
            CellLevel::Up => CellLevel::Down,
            CellLevel::Fluor => CellLevel::Fluor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CellType {
    A,
    B,
}

impl CellType {
    pub fn of_index(i: usize) -> CellType {
        if i % 2 == 0 {
            CellType::A
        } else {
            CellType::B
        }
    }

    /// Parity of the indices holding this type.
    pub fn parity(self) -> usize {
        match self {
            CellType::A => 0,
            CellType::B => 1,
        }
    }

    pub fn other(self) -> CellType {
        match self {
            CellType::A => CellType::B,
            CellType::B => CellType::A,
        }
    }
}

impl fmt::Display for CellType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellType::A => "A",
            CellType::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    TwoLevel,
    ThreeLevel,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::TwoLevel => "2-level",
            Mode::ThreeLevel => "3-level",
        }
    }

    /// Number of levels a cell of the given type carries in this mode.
    pub fn radix(self, ty: CellType) -> usize {
        match (self, ty) {
            (Mode::ThreeLevel, CellType::B) => 3,
            _ => 2,
        }
    }

    pub fn basis_size(self, n_cells: usize) -> u64 {
        (0..n_cells)
            .map(|i| self.radix(CellType::of_index(i)) as u64)
            .product()
    }
}

/// Net neighbour state: number of `↑` neighbours minus number of `↓`
/// neighbours. Always within `-2..=2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldValue(i8);

impl FieldValue {
    pub const ALL: [FieldValue; 5] = [
        FieldValue(-2),
        FieldValue(-1),
        FieldValue(0),
        FieldValue(1),
        FieldValue(2),
    ];

    pub fn new(v: i8) -> Result<FieldValue> {
        if (-2..=2).contains(&v) {
            Ok(FieldValue(v))
        } else {
            Err(Error::Parse(format!("field value {v} outside -2..=2")))
        }
    }

    pub fn get(self) -> i8 {
        self.0
    }

    /// Field values only end cells can have.
    pub fn is_end_value(self) -> bool {
        self.0 == 1 || self.0 == -1
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Classical assignment of a level to each cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellConfig {
    levels: Vec<CellLevel>,
}

impl CellConfig {
    pub fn new(levels: Vec<CellLevel>) -> Result<CellConfig> {
        if levels.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 cells, got {}",
                levels.len()
            )));
        }
        Ok(CellConfig { levels })
    }

    pub fn all_down(n_cells: usize) -> Result<CellConfig> {
        CellConfig::new(vec![CellLevel::Down; n_cells])
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[CellLevel] {
        &self.levels
    }

    pub fn get(&self, i: usize) -> CellLevel {
        self.levels[i]
    }

    pub fn set(&mut self, i: usize, level: CellLevel) {
        self.levels[i] = level;
    }

    /// Checks the configuration is admissible in `mode`.
    pub fn validate(&self, mode: Mode) -> Result<()> {
        for (i, &l) in self.levels.iter().enumerate() {
            if l != CellLevel::Fluor {
                continue;
            }
            match mode {
                Mode::TwoLevel => {
                    return Err(Error::InvalidConfig(format!(
                        "cell {i} is in the third level in 2-level mode"
                    )))
                }
                Mode::ThreeLevel if CellType::of_index(i) == CellType::A => {
                    return Err(Error::InvalidConfig(format!(
                        "type-A cell {i} cannot take the third level"
                    )))
                }
                Mode::ThreeLevel => {}
            }
        }
        Ok(())
    }

    /// Smallest mode that admits this configuration.
    pub fn natural_mode(&self) -> Mode {
        if self.levels.contains(&CellLevel::Fluor) {
            Mode::ThreeLevel
        } else {
            Mode::TwoLevel
        }
    }

    pub fn count_up(&self) -> usize {
        self.levels.iter().filter(|&&l| l == CellLevel::Up).count()
    }
}

impl fmt::Display for CellConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.levels {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for CellConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<CellConfig> {
        let levels = s
            .trim()
            .chars()
            .map(|c| {
                CellLevel::from_symbol(c)
                    .ok_or_else(|| Error::Parse(format!("bad cell symbol {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        CellConfig::new(levels)
    }
}

/// Field of cell `i`: sum of the contributions of its existing neighbours.
pub fn field_of(config: &CellConfig, i: usize) -> Result<FieldValue> {
    let n = config.len();
    if i >= n {
        return Err(Error::IndexOutOfBounds { index: i, n_cells: n });
    }
    Ok(FieldValue(field_unchecked(config.levels(), i)))
}

pub(crate) fn field_unchecked(levels: &[CellLevel], i: usize) -> i8 {
    let mut f = 0;
    if i > 0 {
        f += levels[i - 1].field_contribution();
    }
    if i + 1 < levels.len() {
        f += levels[i + 1].field_contribution();
    }
    f
}

/// Mixed-radix geometry of the basis for a fixed array length and mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    mode: Mode,
    radices: Vec<usize>,
    strides: Vec<u64>,
    size: u64,
}

impl Basis {
    pub fn new(n_cells: usize, mode: Mode) -> Basis {
        let radices: Vec<usize> = (0..n_cells)
            .map(|i| mode.radix(CellType::of_index(i)))
            .collect();
        let mut strides = vec![1u64; n_cells];
        for i in (0..n_cells.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * radices[i + 1] as u64;
        }
        let size = radices.iter().map(|&r| r as u64).product();
        Basis {
            mode,
            radices,
            strides,
            size,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.radices.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn radix(&self, i: usize) -> usize {
        self.radices[i]
    }

    pub fn stride(&self, i: usize) -> u64 {
        self.strides[i]
    }

    #[inline]
    pub fn digit(&self, rank: u64, i: usize) -> usize {
        ((rank / self.strides[i]) % self.radices[i] as u64) as usize
    }

    pub fn rank(&self, config: &CellConfig) -> Result<u64> {
        if config.len() != self.n_cells() {
            return Err(Error::InvalidConfig(format!(
                "expected {} cells, got {}",
                self.n_cells(),
                config.len()
            )));
        }
        config.validate(self.mode)?;
        Ok(config
            .levels()
            .iter()
            .zip(&self.strides)
            .map(|(l, s)| l.digit() as u64 * s)
            .sum())
    }

    pub fn unrank(&self, rank: u64) -> Result<CellConfig> {
        if rank >= self.size {
            return Err(Error::RankOutOfRange {
                rank,
                size: self.size,
            });
        }
        let levels = (0..self.n_cells())
            .map(|i| CellLevel::from_digit(self.digit(rank, i)).expect("digit below radix"))
            .collect();
        CellConfig::new(levels)
    }

    /// Field of cell `i` in the basis state `rank`.
    #[inline]
    pub fn field_at(&self, rank: u64, i: usize) -> i8 {
        let contrib = |j: usize| match self.digit(rank, j) {
            0 => -1,
            1 => 1,
            _ => 0,
        };
        let mut f = 0;
        if i > 0 {
            f += contrib(i - 1);
        }
        if i + 1 < self.n_cells() {
            f += contrib(i + 1);
        }
        f
    }
}

pub fn rank(config: &CellConfig, mode: Mode) -> Result<u64> {
    Basis::new(config.len(), mode).rank(config)
}

pub fn unrank(n_cells: usize, mode: Mode, r: u64) -> Result<CellConfig> {
    Basis::new(n_cells, mode).unrank(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: &str) -> CellConfig {
        s.parse().unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&cfg("ddd"), Mode::TwoLevel).unwrap(), 0);
        assert_eq!(rank(&cfg("ddu"), Mode::TwoLevel).unwrap(), 1);
        assert_eq!(rank(&cfg("uf"), Mode::ThreeLevel).unwrap(), 5);
        assert_eq!(rank(&cfg("df"), Mode::ThreeLevel).unwrap(), 2);
    }

    #[test]
    fn rank_rejects_bad_configs() {
        assert!(rank(&cfg("df"), Mode::TwoLevel).is_err());
        assert!(rank(&cfg("fd"), Mode::ThreeLevel).is_err());
        assert!(matches!(
            unrank(3, Mode::TwoLevel, 8),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn round_trip_exhaustive() {
        for n in 2..=12 {
            for mode in [Mode::TwoLevel, Mode::ThreeLevel] {
                if mode == Mode::ThreeLevel && n > 9 {
                    continue;
                }
                let basis = Basis::new(n, mode);
                assert_eq!(basis.size(), mode.basis_size(n));
                for r in 0..basis.size() {
                    let c = basis.unrank(r).unwrap();
                    assert_eq!(basis.rank(&c).unwrap(), r);
                }
            }
        }
    }

    #[test]
    fn field_examples() {
        assert_eq!(field_of(&cfg("udd"), 1).unwrap().get(), 0);
        assert_eq!(field_of(&cfg("du"), 0).unwrap().get(), 1);
        assert_eq!(field_of(&cfg("udf"), 1).unwrap().get(), 1);
        assert!(field_of(&cfg("du"), 2).is_err());
    }

    #[test]
    fn field_values_and_reflection_exhaustive() {
        for n in 2..=10 {
            let basis = Basis::new(n, Mode::TwoLevel);
            for r in 0..basis.size() {
                let c = basis.unrank(r).unwrap();
                let mut rev_levels = c.levels().to_vec();
                rev_levels.reverse();
                let rev = CellConfig::new(rev_levels).unwrap();
                for i in 0..n {
                    let f = field_of(&c, i).unwrap().get();
                    assert_eq!(f, basis.field_at(r, i));
                    assert_eq!(f, field_of(&rev, n - 1 - i).unwrap().get());
                    if i == 0 || i == n - 1 {
                        assert!(f == 1 || f == -1);
                    } else {
                        assert!(f == -2 || f == 0 || f == 2);
                    }
                }
            }
        }
    }

    #[test]
    fn literal_round_trip() {
        let c = cfg("dduudf");
        assert_eq!(c.to_string(), "dduudf");
        assert!("dx".parse::<CellConfig>().is_err());
        assert!("d".parse::<CellConfig>().is_err());
    }
}
