use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::bits::Bitstring;
use crate::error::{Error, Result};

/// Multinomial draw of `shots` outcomes; returns a dense count per basis index.
///
/// Uses the conditional-binomial decomposition, so the cost is linear in the
/// number of outcomes rather than in the number of shots.
pub fn sample_counts<R: Rng + ?Sized>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut remaining_shots = shots;
    let mut remaining_mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (count, &p) in counts.iter_mut().zip(probs) {
        if remaining_shots == 0 {
            break;
        }
        let p = p.max(0.0);
        let conditional = if remaining_mass > 0.0 {
            (p / remaining_mass).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let k = if conditional >= 1.0 {
            remaining_shots
        } else if conditional <= 0.0 {
            0
        } else {
            Binomial::new(remaining_shots, conditional)
                .expect("valid binomial")
                .sample(rng)
        };
        *count = k;
        remaining_shots -= k;
        remaining_mass -= p;
    }
    // Rounding can leave mass unassigned at the tail; give it to the last supported outcome.
    if remaining_shots > 0 {
        if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
            counts[last] += remaining_shots;
        }
    }
    counts
}

/// Final-measurement counts keyed by basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotHistogram {
    num_qubits: usize,
    shots: u64,
    counts: BTreeMap<usize, u64>,
}

impl ShotHistogram {
    pub fn from_counts(num_qubits: usize, counts: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut map = BTreeMap::new();
        for (idx, c) in counts {
            if c > 0 {
                *map.entry(idx).or_insert(0) += c;
            }
        }
        let shots = map.values().sum();
        ShotHistogram {
            num_qubits,
            shots,
            counts: map,
        }
    }

    pub fn from_bitstrings<'a>(counts: impl IntoIterator<Item = (&'a str, u64)>) -> Result<Self> {
        let mut width = None;
        let mut parsed = Vec::new();
        for (s, c) in counts {
            let b: Bitstring = s.parse()?;
            if *width.get_or_insert(b.len()) != b.len() {
                return Err(Error::LengthMismatch {
                    expected: width.unwrap(),
                    got: b.len(),
                });
            }
            parsed.push((b.index(), c));
        }
        Ok(Self::from_counts(width.unwrap_or(0), parsed))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn is_empty(&self) -> bool {
        self.shots == 0
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    /// `n(x) / N_final`
    pub fn frequency(&self, index: usize) -> f64 {
        self.count(index) as f64 / self.shots as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&i, &c)| (i, c))
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Most frequent outcome; ties resolve to the smallest index.
    pub fn mode(&self) -> Option<usize> {
        self.counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&i, _)| i)
    }

    pub fn bitstring(&self, index: usize) -> Bitstring {
        Bitstring::from_index(index, self.num_qubits)
    }
}

impl Serialize for ShotHistogram {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.counts.len()))?;
        for (&idx, c) in &self.counts {
            map.serialize_entry(&self.bitstring(idx).to_string(), c)?;
        }
        map.end()
    }
}

/// Draws `shots` outcomes from `probs` with a generator seeded by `seed`.
pub fn sample(probs: &[f64], shots: u64, seed: u64) -> Result<ShotHistogram> {
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    if !probs.len().is_power_of_two() {
        return Err(Error::LengthMismatch {
            expected: probs.len().next_power_of_two(),
            got: probs.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = sample_counts(probs, shots, &mut rng);
    let n = probs.len().trailing_zeros() as usize;
    Ok(ShotHistogram::from_counts(
        n,
        counts.into_iter().enumerate(),
    ))
}
