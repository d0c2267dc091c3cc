//! Exhaustive ground-state search for small models.

use rayon::prelude::*;

use crate::error::{IsingError, Result};
use crate::model::{IsingModel, SpinConfiguration};

pub const MAX_BRUTE_FORCE_SITES: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Minimum energy, recomputed exactly from `config`.
    pub energy: f64,
    /// Lexicographically smallest minimiser (`-1 < +1`, site 0 first).
    pub config: SpinConfiguration,
    /// Number of minimising configurations.
    pub count: u64,
}

#[derive(Clone, Copy)]
struct Best {
    energy: f64,
    state: u64,
    count: u64,
}

fn lex_key(state: u64, n: usize) -> u64 {
    state.reverse_bits() >> (64 - n)
}

impl Best {
    fn offer(&mut self, energy: f64, state: u64, n: usize, tol: f64) {
        if energy < self.energy - tol {
            *self = Best {
                energy,
                state,
                count: 1,
            };
        } else if energy <= self.energy + tol {
            self.count += 1;
            self.energy = self.energy.min(energy);
            if lex_key(state, n) < lex_key(self.state, n) {
                self.state = state;
            }
        }
    }

    fn merge(self, other: Best, n: usize, tol: f64) -> Best {
        if other.energy < self.energy - tol {
            other
        } else if other.energy > self.energy + tol {
            self
        } else {
            let state = if lex_key(other.state, n) < lex_key(self.state, n) {
                other.state
            } else {
                self.state
            };
            Best {
                energy: self.energy.min(other.energy),
                state,
                count: self.count + other.count,
            }
        }
    }
}

/// Enumerates all `2^n` configurations. Energies within
/// `1e-9 · (1 + Σ|coefficients|)` of each other count as ties.
pub fn brute_force(model: &IsingModel) -> Result<OracleResult> {
    let n = model.n();
    if n > MAX_BRUTE_FORCE_SITES {
        return Err(IsingError::TooLarge {
            n,
            limit: MAX_BRUTE_FORCE_SITES,
        });
    }
    if n == 0 {
        return Ok(OracleResult {
            energy: 0.0,
            config: SpinConfiguration::unassigned(0),
            count: 1,
        });
    }
    let scale: f64 = model.linear().iter().map(|t| t.1.abs()).sum::<f64>()
        + model.quadratic().iter().map(|t| t.2.abs()).sum::<f64>();
    let tol = 1e-9 * (1.0 + scale);

    // High bits are fixed per chunk; low bits are walked in Gray-code order.
    let high = n.min(8);
    let low = n - high;
    let chunks: Vec<Best> = (0..1u64 << high)
        .into_par_iter()
        .map(|prefix| {
            let base = prefix << low;
            let mut spins = SpinConfiguration::from_bits(n, base).into_inner();
            let mut energy = model.energy_of(&spins);
            let mut state = base;
            let mut best = Best {
                energy,
                state,
                count: 1,
            };
            for step in 1..1u64 << low {
                let bit = step.trailing_zeros() as usize;
                energy += model.flip_delta(&spins, bit);
                spins[bit] = -spins[bit];
                state ^= 1 << bit;
                best.offer(energy, state, n, tol);
            }
            best
        })
        .collect();
    let best = chunks
        .into_iter()
        .reduce(|a, b| a.merge(b, n, tol))
        .expect("at least one chunk");
    let config = SpinConfiguration::from_bits(n, best.state);
    Ok(OracleResult {
        energy: model.energy_of(config.as_slice()),
        config,
        count: best.count,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn ferromagnetic_pair_has_two_ground_states() {
        let m = IsingModel::new(2, vec![], vec![(0, 1, -1.0)]).unwrap();
        let r = brute_force(&m).unwrap();
        assert_eq!(r.energy, -1.0);
        assert_eq!(r.count, 2);
        assert_eq!(r.config.as_slice(), &[-1, -1]);
    }

    #[test]
    fn single_spin() {
        let m = IsingModel::new(1, vec![(0, -1.0)], vec![]).unwrap();
        let r = brute_force(&m).unwrap();
        assert_eq!((r.energy, r.count), (-1.0, 1));
        assert_eq!(r.config.as_slice(), &[1]);
    }

    #[test]
    fn zero_model_counts_everything() {
        let r = brute_force(&IsingModel::empty(10)).unwrap();
        assert_eq!(r.count, 1024);
        assert_eq!(r.config.as_slice(), &[-1; 10]);
    }

    #[test]
    fn refuses_large_models() {
        assert!(matches!(
            brute_force(&IsingModel::empty(31)),
            Err(IsingError::TooLarge { n: 31, .. })
        ));
    }

    #[test]
    fn agrees_with_plain_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let n = 11;
            let linear = (0..n).map(|i| (i, rng.gen_range(-1.0..1.0))).collect();
            let mut quadratic = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.4) {
                        quadratic.push((i, j, rng.gen_range(-1.0..1.0)));
                    }
                }
            }
            let m = IsingModel::new(n, linear, quadratic).unwrap();
            let r = brute_force(&m).unwrap();
            let plain = (0..1u64 << n)
                .map(|b| m.energy_of(SpinConfiguration::from_bits(n, b).as_slice()))
                .fold(f64::INFINITY, f64::min);
            assert!((r.energy - plain).abs() < 1e-12);
            assert_eq!(r.energy, m.energy(&r.config).unwrap());
        }
    }
}
