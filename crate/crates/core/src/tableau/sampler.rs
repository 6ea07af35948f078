//! Fast repeated sampling of a fixed measurement sequence.
//!
//! The outcomes of a sequence of Pauli measurements on a stabilizer state are
//! uniform over an affine subspace of `F_2^k`. One reference pass (all random
//! outcomes forced to `+1`) plus one pass per random measurement (that outcome
//! flipped) fixes the subspace; afterwards each shot is a handful of XORs.

use rand::RngCore;

use super::{Measurement, Outcome, OutcomeSource, StabilizerState, TableauError};
use crate::pauli::PauliOperator;

#[derive(Clone, Debug)]
pub struct OutcomeSampler {
    len: usize,
    reference: Vec<u64>,
    /// `(measurement index, flip pattern)` for every random measurement.
    flips: Vec<(usize, Vec<u64>)>,
}

impl OutcomeSampler {
    pub fn new(state: &StabilizerState, observables: &[PauliOperator]) -> Result<Self, TableauError> {
        let len = observables.len();
        let words = len.div_ceil(64).max(1);
        let (reference, random) = run(state, observables, None)?;
        let mut ref_bits = vec![0u64; words];
        for (i, o) in reference.iter().enumerate() {
            if o.is_minus() {
                ref_bits[i >> 6] |= 1 << (i & 63);
            }
        }
        let mut flips = Vec::with_capacity(random.len());
        for &k in &random {
            let (out, _) = run(state, observables, Some(k))?;
            let mut diff = vec![0u64; words];
            for (i, (a, b)) in out.iter().zip(&reference).enumerate() {
                if a != b {
                    diff[i >> 6] |= 1 << (i & 63);
                }
            }
            flips.push((k, diff));
        }
        Ok(Self {
            len,
            reference: ref_bits,
            flips,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Indices of measurements whose outcome is a fresh fair coin.
    pub fn random_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.flips.iter().map(|(k, _)| *k)
    }

    /// One shot, packed: bit `i` set means outcome `-1` for observable `i`.
    pub fn sample(&self, rng: &mut dyn RngCore) -> Vec<u64> {
        let mut bits = self.reference.clone();
        for (_, diff) in &self.flips {
            if rng.next_u32() & 1 == 1 {
                for (b, d) in bits.iter_mut().zip(diff) {
                    *b ^= d;
                }
            }
        }
        bits
    }
}

fn run(
    state: &StabilizerState,
    observables: &[PauliOperator],
    flip: Option<usize>,
) -> Result<(Vec<Outcome>, Vec<usize>), TableauError> {
    let mut s = state.clone();
    let mut outcomes = Vec::with_capacity(observables.len());
    let mut random = Vec::new();
    for (i, obs) in observables.iter().enumerate() {
        let forced = if flip == Some(i) {
            Outcome::Minus
        } else {
            Outcome::Plus
        };
        let m = match s.stabilizer_sign(obs)? {
            Some(outcome) => Measurement {
                outcome,
                deterministic: true,
            },
            None => s.measure(obs, OutcomeSource::Forced(forced))?,
        };
        if !m.deterministic {
            random.push(i);
        }
        outcomes.push(m.outcome);
    }
    Ok((outcomes, random))
}
