//! Linear cluster, ring, GHZ and rotated-cluster states.
//!
//! Vertex labels are 1-based (`1..=n`); label `i` lives on tableau qubit
//! `i - 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tableau::StabilizerState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatesError {
    #[error("a {kind} needs at least {min} qubits, got {got}")]
    TooSmall {
        kind: &'static str,
        min: usize,
        got: usize,
    },
    #[error("the rotated cluster is defined for odd n, got {0}")]
    EvenRotated(usize),
    #[error("vertex labels must be distinct and positive: {0:?}")]
    BadLabels(Vec<usize>),
}

/// A line (or ring) of `n` vertices labelled `1..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLinear")]
pub struct LinearClusterSpec {
    pub n: usize,
    #[serde(default)]
    pub ring: bool,
}

#[derive(Deserialize)]
struct RawLinear {
    n: usize,
    #[serde(default)]
    ring: bool,
}

impl TryFrom<RawLinear> for LinearClusterSpec {
    type Error = StatesError;

    fn try_from(raw: RawLinear) -> Result<Self, Self::Error> {
        Self::new(raw.n, raw.ring)
    }
}

impl LinearClusterSpec {
    pub fn new(n: usize, ring: bool) -> Result<Self, StatesError> {
        let min = if ring { 3 } else { 2 };
        if n < min {
            return Err(StatesError::TooSmall {
                kind: if ring { "ring cluster" } else { "linear cluster" },
                min,
                got: n,
            });
        }
        Ok(Self { n, ring })
    }

    pub fn line(n: usize) -> Result<Self, StatesError> {
        Self::new(n, false)
    }

    pub fn labels(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }
}

/// Target vertex set of a GHZ state, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGhz")]
pub struct GhzSpec {
    vg: Vec<usize>,
}

#[derive(Deserialize)]
struct RawGhz {
    vg: Vec<usize>,
}

impl TryFrom<RawGhz> for GhzSpec {
    type Error = StatesError;

    fn try_from(raw: RawGhz) -> Result<Self, Self::Error> {
        Self::new(raw.vg)
    }
}

impl GhzSpec {
    pub fn new(mut vg: Vec<usize>) -> Result<Self, StatesError> {
        vg.sort_unstable();
        let distinct = vg.windows(2).all(|w| w[0] != w[1]);
        if !distinct || vg.first() == Some(&0) {
            return Err(StatesError::BadLabels(vg));
        }
        if vg.len() < 2 {
            return Err(StatesError::TooSmall {
                kind: "GHZ state",
                min: 2,
                got: vg.len(),
            });
        }
        Ok(Self { vg })
    }

    /// `GHZ` on labels `1..=m`.
    pub fn consecutive(m: usize) -> Result<Self, StatesError> {
        Self::new((1..=m).collect())
    }

    pub fn labels(&self) -> &[usize] {
        &self.vg
    }

    pub fn size(&self) -> usize {
        self.vg.len()
    }

    /// Smallest and largest label.
    pub fn boundaries(&self) -> (usize, usize) {
        (self.vg[0], *self.vg.last().unwrap())
    }

    /// Left neighbour `j₋` of `j` inside the target set.
    pub fn left_of(&self, j: usize) -> Option<usize> {
        let i = self.vg.binary_search(&j).ok()?;
        i.checked_sub(1).map(|k| self.vg[k])
    }

    /// Right neighbour `j₊` of `j` inside the target set.
    pub fn right_of(&self, j: usize) -> Option<usize> {
        let i = self.vg.binary_search(&j).ok()?;
        self.vg.get(i + 1).copied()
    }
}

/// Graph state of the path (or cycle) on `1..=n`; generators
/// `Z_{i-1} X_i Z_{i+1}` in label order.
pub fn make_linear_cluster(spec: &LinearClusterSpec) -> StabilizerState {
    let n = spec.n;
    let mut s = StabilizerState::zero(n);
    for q in 0..n {
        s.apply_h(q).unwrap();
    }
    for q in 0..n - 1 {
        s.apply_cz(q, q + 1).unwrap();
    }
    if spec.ring {
        s.apply_cz(n - 1, 0).unwrap();
    }
    s
}

/// GHZ state on `spec.size()` qubits (in label order); generators
/// `X…X` followed by the nearest-neighbour `ZZ` chain.
pub fn make_ghz(spec: &GhzSpec) -> StabilizerState {
    ghz(spec.size())
}

/// GHZ state on `m` qubits.
pub fn ghz(m: usize) -> StabilizerState {
    let mut s = StabilizerState::zero(m);
    s.apply_h(0).unwrap();
    for q in 0..m.saturating_sub(1) {
        s.apply_cnot(q, q + 1).unwrap();
    }
    s
}

/// Linear cluster on `1..=n` with a Hadamard on every odd label.
pub fn make_rotated_cluster(n: usize) -> Result<StabilizerState, StatesError> {
    if n.is_multiple_of(2) {
        return Err(StatesError::EvenRotated(n));
    }
    if n < 3 {
        return Err(StatesError::TooSmall {
            kind: "rotated cluster",
            min: 3,
            got: n,
        });
    }
    let mut s = make_linear_cluster(&LinearClusterSpec::line(n)?);
    for label in (1..=n).step_by(2) {
        s.apply_h(label - 1).unwrap();
    }
    Ok(s)
}
