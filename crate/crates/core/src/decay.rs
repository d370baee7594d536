//! Spontaneous decay of the third level and the seeded generator used for
//! every stochastic step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{CellLevel, CellType, Mode};
use crate::state::Register;

/// The generator behind all sampling. ChaCha8 output is fixed by the seed
/// across platforms and releases.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Measures each B cell for the `⇝` level, left to right. A click maps the
/// cell to `↓`. Returns the number of clicks.
pub fn decay_channel<S: Register, R: Rng>(state: &mut S, rng: &mut R) -> Result<usize> {
    if state.mode() != Mode::ThreeLevel {
        return Err(Error::WrongMode(Mode::ThreeLevel.name()));
    }
    let mut emissions = 0;
    for i in (CellType::B.parity()..state.n_cells()).step_by(2) {
        let p = state.level_probability(i, CellLevel::Fluor);
        if p <= 0.0 {
            continue;
        }
        let click = rng.gen::<f64>() < p;
        state.collapse(i, CellLevel::Fluor, click, CellLevel::Down);
        if click {
            emissions += 1;
        }
    }
    Ok(emissions)
}

/// [`decay_channel`] with a fresh generator.
pub fn decay_channel_seeded<S: Register>(state: &mut S, seed: u64) -> Result<usize> {
    decay_channel(state, &mut seeded_rng(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::CellConfig;
    use crate::state::QuantumState;
    use num_complex::Complex64;

    fn cfg(s: &str) -> CellConfig {
        s.parse().unwrap()
    }

    #[test]
    fn single_fluor_decays() {
        let mut s = QuantumState::from_config(&cfg("dfdd"), Mode::ThreeLevel).unwrap();
        assert_eq!(decay_channel_seeded(&mut s, 1).unwrap(), 1);
        assert!((s.probability(&cfg("dddd")) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_fluor_no_change() {
        let mut s = QuantumState::from_config(&cfg("duud"), Mode::ThreeLevel).unwrap();
        let before = s.clone();
        assert_eq!(decay_channel_seeded(&mut s, 1).unwrap(), 0);
        assert_eq!(s, before);
    }

    #[test]
    fn two_level_rejected() {
        let mut s = QuantumState::from_config(&cfg("dd"), Mode::TwoLevel).unwrap();
        assert!(decay_channel_seeded(&mut s, 0).is_err());
    }

    #[test]
    fn born_rule_frequency() {
        let h = Complex64::new(1.0, 0.0);
        let s0 = QuantumState::from_terms(2, Mode::ThreeLevel, &[(cfg("df"), h), (cfg("du"), h)]).unwrap();
        let mut rng = seeded_rng(7);
        let trials = 10_000;
        let mut clicks = 0;
        for _ in 0..trials {
            let mut s = s0.clone();
            clicks += decay_channel(&mut s, &mut rng).unwrap();
        }
        let freq = clicks as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.02, "{freq}");
    }
}
