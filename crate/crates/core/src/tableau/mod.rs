//! Stabilizer-state engine.
//!
//! A [`StabilizerState`] keeps `n` stabilizer rows together with `n`
//! destabilizer rows (the Aaronson–Gottesman extension), so that a Pauli
//! measurement costs `O(n²)` word operations and deterministic outcomes can be
//! read off without Gaussian elimination. Rows are ordinary
//! [`PauliOperator`]s; stabilizer rows always carry a sign `±1`.
//!
//! Qubits are addressed by 0-based index here. The planner and extractor
//! speak in 1-based vertex labels and convert at their boundary.

mod clifford;
pub(crate) mod gf2;
mod sampler;

use std::collections::BTreeSet;
use std::fmt;

use rand::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::pauli::{Pauli, PauliError, PauliOperator, Phase};

pub use clifford::{SignedPauli, SingleQubitClifford};
pub use sampler::OutcomeSampler;

use gf2::BitMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(usize),
    #[error("expected {expected} generators, got {got}")]
    WrongGeneratorCount { expected: usize, got: usize },
    #[error("generator {0} is not Hermitian")]
    NotHermitian(String),
    #[error("generators {0} and {1} anticommute")]
    Anticommuting(usize, usize),
    #[error("generators are not independent")]
    Dependent,
    #[error("forced outcome {forced} contradicts deterministic outcome {actual}")]
    ForcedOutcomeContradiction { forced: Outcome, actual: Outcome },
    #[error("qubits {0:?} are still entangled with the rest and cannot be discarded")]
    NotProduct(Vec<usize>),
    #[error("bipartition must be a nonempty proper subset")]
    TrivialBipartition,
}

/// A measurement outcome (eigenvalue `+1` or `-1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Outcome::Plus),
            -1 => Some(Outcome::Minus),
            _ => None,
        }
    }

    pub fn from_bit(minus: bool) -> Self {
        if minus {
            Outcome::Minus
        } else {
            Outcome::Plus
        }
    }

    pub fn is_minus(self) -> bool {
        self == Outcome::Minus
    }

    pub fn flipped(self) -> Self {
        Self::from_bit(!self.is_minus())
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(deserializer)?;
        Outcome::from_value(v).ok_or_else(|| serde::de::Error::custom("outcome must be +1 or -1"))
    }
}

/// Where random outcomes come from.
pub enum OutcomeSource<'a> {
    Random(&'a mut dyn RngCore),
    /// Inject this outcome. Deterministic measurements must agree with it.
    Forced(Outcome),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub outcome: Outcome,
    pub deterministic: bool,
}

/// Clifford gates understood by [`StabilizerState::apply`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Single(usize, SingleQubitClifford),
    Cz(usize, usize),
    Cnot { control: usize, target: usize },
}

/// Maps original qubit indices to indices of a reduced state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexMap {
    old_to_new: Vec<Option<usize>>,
    kept: Vec<usize>,
}

impl IndexMap {
    pub fn get(&self, old: usize) -> Option<usize> {
        self.old_to_new.get(old).copied().flatten()
    }

    /// Surviving original indices in ascending order (`kept()[new] == old`).
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }
}

/// A pure *n*-qubit stabilizer state.
#[derive(Clone, Debug)]
pub struct StabilizerState {
    n: usize,
    stabilizers: Vec<PauliOperator>,
    destabilizers: Vec<PauliOperator>,
}

impl StabilizerState {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        let stabilizers = (0..n)
            .map(|q| PauliOperator::single(n, q, Pauli::Z).unwrap())
            .collect();
        let destabilizers = (0..n)
            .map(|q| PauliOperator::single(n, q, Pauli::X).unwrap())
            .collect();
        Self {
            n,
            stabilizers,
            destabilizers,
        }
    }

    /// Builds a state from `n` independent, commuting, Hermitian generators.
    /// The rows are kept in the given order; destabilizers are solved for.
    pub fn from_generators(generators: Vec<PauliOperator>) -> Result<Self, TableauError> {
        let n = generators.len();
        for g in &generators {
            if g.num_qubits() != n {
                return Err(TableauError::WrongGeneratorCount {
                    expected: g.num_qubits(),
                    got: n,
                });
            }
            if !g.is_hermitian() {
                return Err(TableauError::NotHermitian(g.to_string()));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if !generators[i].commutes_unchecked(&generators[j]) {
                    return Err(TableauError::Anticommuting(i, j));
                }
            }
        }

        // Row k is the functional v ↦ ⟨S_k, v⟩ on v = (x | z), with an
        // identity block appended to record the row operations.
        let mut m = BitMatrix::new(3 * n);
        for (k, g) in generators.iter().enumerate() {
            let bits = (0..n)
                .filter(|&q| g.z_bit(q))
                .chain((0..n).filter(|&q| g.x_bit(q)).map(|q| n + q))
                .chain(std::iter::once(2 * n + k));
            m.push_row(bits);
        }
        let pivots = m.reduce(2 * n);
        if pivots.len() < n {
            return Err(TableauError::Dependent);
        }

        let mut destabilizers: Vec<PauliOperator> = (0..n)
            .map(|i| {
                let mut d = PauliOperator::identity(n);
                for (r, &c) in pivots.iter().enumerate() {
                    if m.get(r, 2 * n + i) {
                        let (q, is_z) = if c < n { (c, false) } else { (c - n, true) };
                        let cur = d.get(q);
                        let (x, z) = cur.bits();
                        let next = if is_z {
                            Pauli::from_bits(x, !z)
                        } else {
                            Pauli::from_bits(!x, z)
                        };
                        d.set_unchecked(q, next);
                    }
                }
                d
            })
            .collect();

        for i in 0..n {
            for j in 0..i {
                if !destabilizers[i].commutes_unchecked(&destabilizers[j]) {
                    let s = generators[j].clone();
                    destabilizers[i].mul_assign_unchecked(&s);
                }
            }
            destabilizers[i].set_phase(Phase::ONE);
        }

        Ok(Self {
            n,
            stabilizers: generators,
            destabilizers,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Stabilizer rows in their current order.
    pub fn generators(&self) -> &[PauliOperator] {
        &self.stabilizers
    }

    pub fn destabilizers(&self) -> &[PauliOperator] {
        &self.destabilizers
    }

    fn check_qubit(&self, q: usize) -> Result<(), TableauError> {
        if q >= self.n {
            return Err(TableauError::QubitOutOfRange { qubit: q, n: self.n });
        }
        Ok(())
    }

    fn rows_mut(&mut self) -> impl Iterator<Item = &mut PauliOperator> {
        self.stabilizers.iter_mut().chain(self.destabilizers.iter_mut())
    }

    pub fn apply(&mut self, gate: Gate) -> Result<&mut Self, TableauError> {
        match gate {
            Gate::Single(q, c) => self.apply_clifford(q, &c),
            Gate::Cz(a, b) => self.apply_cz(a, b),
            Gate::Cnot { control, target } => self.apply_cnot(control, target),
        }
    }

    pub fn apply_clifford(
        &mut self,
        qubit: usize,
        gate: &SingleQubitClifford,
    ) -> Result<&mut Self, TableauError> {
        self.check_qubit(qubit)?;
        let table = [
            SignedPauli::plus(Pauli::I),
            gate.image_x(),
            gate.image_y(),
            gate.image_z(),
        ];
        for row in self.rows_mut() {
            let l = row.get(qubit);
            let img = table[l as usize];
            if l != Pauli::I {
                row.set_unchecked(qubit, img.letter);
                if img.negative {
                    row.set_phase(row.phase().times(Phase::MINUS_ONE));
                }
            }
        }
        Ok(self)
    }

    pub fn apply_h(&mut self, qubit: usize) -> Result<&mut Self, TableauError> {
        self.apply_clifford(qubit, &SingleQubitClifford::H)
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<&mut Self, TableauError> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(TableauError::RepeatedQubit(a));
        }
        for row in self.rows_mut() {
            let (xa, za) = row.get(a).bits();
            let (xb, zb) = row.get(b).bits();
            let flip = xa && xb && (za ^ zb);
            row.set_unchecked(a, Pauli::from_bits(xa, za ^ xb));
            row.set_unchecked(b, Pauli::from_bits(xb, zb ^ xa));
            if flip {
                row.set_phase(row.phase().times(Phase::MINUS_ONE));
            }
        }
        Ok(self)
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<&mut Self, TableauError> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(TableauError::RepeatedQubit(control));
        }
        for row in self.rows_mut() {
            let (xc, zc) = row.get(control).bits();
            let (xt, zt) = row.get(target).bits();
            let flip = xc && zt && !(xt ^ zc);
            row.set_unchecked(target, Pauli::from_bits(xt ^ xc, zt));
            row.set_unchecked(control, Pauli::from_bits(xc, zc ^ zt));
            if flip {
                row.set_phase(row.phase().times(Phase::MINUS_ONE));
            }
        }
        Ok(self)
    }

    /// Conjugates the state by a Pauli operator (flips signs of anticommuting
    /// stabilizers).
    pub fn apply_pauli(&mut self, p: &PauliOperator) -> Result<&mut Self, TableauError> {
        if p.num_qubits() != self.n {
            return Err(PauliError::SizeMismatch {
                left: self.n,
                right: p.num_qubits(),
            }
            .into());
        }
        for row in &mut self.stabilizers {
            if !row.commutes_unchecked(p) {
                row.set_phase(row.phase().times(Phase::MINUS_ONE));
            }
        }
        Ok(self)
    }

    /// `Some(±1)` if `±obs` belongs to the stabilizer group, `None` if the
    /// outcome of measuring `obs` would be random.
    pub fn stabilizer_sign(&self, obs: &PauliOperator) -> Result<Option<Outcome>, TableauError> {
        self.check_observable(obs)?;
        if self.stabilizers.iter().any(|s| !s.commutes_unchecked(obs)) {
            return Ok(None);
        }
        Ok(Some(self.deterministic_outcome(obs)))
    }

    fn check_observable(&self, obs: &PauliOperator) -> Result<(), TableauError> {
        if obs.num_qubits() != self.n {
            return Err(PauliError::SizeMismatch {
                left: self.n,
                right: obs.num_qubits(),
            }
            .into());
        }
        if !obs.is_hermitian() {
            return Err(TableauError::NotHermitian(obs.to_string()));
        }
        Ok(())
    }

    fn deterministic_outcome(&self, obs: &PauliOperator) -> Outcome {
        let mut acc = PauliOperator::identity(self.n);
        for (d, s) in self.destabilizers.iter().zip(&self.stabilizers) {
            if !d.commutes_unchecked(obs) {
                acc.mul_assign_unchecked(s);
            }
        }
        debug_assert!(acc.same_letters(obs));
        Outcome::from_bit(acc.phase() != obs.phase())
    }

    /// Projective measurement of a Hermitian Pauli observable.
    pub fn measure(
        &mut self,
        obs: &PauliOperator,
        source: OutcomeSource<'_>,
    ) -> Result<Measurement, TableauError> {
        self.check_observable(obs)?;
        let Some(p) = self
            .stabilizers
            .iter()
            .position(|s| !s.commutes_unchecked(obs))
        else {
            let actual = self.deterministic_outcome(obs);
            if let OutcomeSource::Forced(forced) = source {
                if forced != actual {
                    return Err(TableauError::ForcedOutcomeContradiction { forced, actual });
                }
            }
            return Ok(Measurement {
                outcome: actual,
                deterministic: true,
            });
        };

        let pivot = self.stabilizers[p].clone();
        for i in 0..self.n {
            if i != p && !self.stabilizers[i].commutes_unchecked(obs) {
                self.stabilizers[i].mul_assign_unchecked(&pivot);
            }
            if i != p && !self.destabilizers[i].commutes_unchecked(obs) {
                self.destabilizers[i].mul_assign_unchecked(&pivot);
                self.destabilizers[i].set_phase(Phase::ONE);
            }
        }
        let outcome = match source {
            OutcomeSource::Forced(o) => o,
            OutcomeSource::Random(rng) => Outcome::from_bit(rng.next_u32() & 1 == 1),
        };
        self.destabilizers[p] = pivot.with_phase(Phase::ONE);
        self.stabilizers[p] = match outcome {
            Outcome::Plus => obs.clone(),
            Outcome::Minus => obs.clone().negated(),
        };
        Ok(Measurement {
            outcome,
            deterministic: false,
        })
    }

    /// Measures a single qubit in the `letter` basis.
    pub fn measure_qubit(
        &mut self,
        qubit: usize,
        letter: Pauli,
        source: OutcomeSource<'_>,
    ) -> Result<Measurement, TableauError> {
        let obs = PauliOperator::single(self.n, qubit, letter)?;
        self.measure(&obs, source)
    }

    /// Removes qubits that are in a product state with the rest. The result
    /// lives on the complement, keeping ascending original order.
    pub fn discard_qubits(&self, set: &[usize]) -> Result<(StabilizerState, IndexMap), TableauError> {
        let drop: BTreeSet<usize> = set.iter().copied().collect();
        for &q in &drop {
            self.check_qubit(q)?;
        }
        let kept: Vec<usize> = (0..self.n).filter(|q| !drop.contains(q)).collect();
        let mut old_to_new = vec![None; self.n];
        for (new, &old) in kept.iter().enumerate() {
            old_to_new[old] = Some(new);
        }
        let map = IndexMap { old_to_new, kept };
        if drop.is_empty() {
            return Ok((self.clone(), map));
        }

        let cols: Vec<Column> = drop
            .iter()
            .flat_map(|&q| [Column::X(q), Column::Z(q)])
            .collect();
        let mut rows = self.stabilizers.clone();
        let rank = eliminate(&mut rows, &cols);
        if rank != drop.len() {
            return Err(TableauError::NotProduct(drop.into_iter().collect()));
        }
        let reduced = rows[rank..]
            .iter()
            .map(|r| r.restrict(&map.kept))
            .collect();
        Ok((StabilizerState::from_generators(reduced)?, map))
    }

    /// Reduced row echelon form of the stabilizer group (columns ordered
    /// `x_0 … x_{n-1} z_0 … z_{n-1}`), signs included. Unique per state.
    pub fn canonical_generators(&self) -> Vec<PauliOperator> {
        let cols: Vec<Column> = (0..self.n)
            .map(Column::X)
            .chain((0..self.n).map(Column::Z))
            .collect();
        let mut rows = self.stabilizers.clone();
        eliminate(&mut rows, &cols);
        rows
    }

    /// Stabilizer rows in echelon form over the qubit-major columns
    /// `x_0 z_0 x_1 z_1 …`: rows are sorted by their first non-identity qubit.
    pub(crate) fn qubit_echelon(&self) -> Vec<PauliOperator> {
        let cols: Vec<Column> = (0..self.n).flat_map(|q| [Column::X(q), Column::Z(q)]).collect();
        let mut rows = self.stabilizers.clone();
        eliminate(&mut rows, &cols);
        rows
    }

    /// Same state with its stabilizer rows replaced by the canonical ones.
    pub fn canonicalized(&self) -> Self {
        Self::from_generators(self.canonical_generators()).expect("canonical rows are valid")
    }

    /// True iff both states have identical stabilizer groups, signs included.
    pub fn same_state(&self, other: &Self) -> bool {
        self.n == other.n && self.canonical_generators() == other.canonical_generators()
    }

    /// Entanglement entropy (bits) between `part` and its complement.
    pub fn cut_rank(&self, part: &[usize]) -> Result<usize, TableauError> {
        let a: BTreeSet<usize> = part.iter().copied().collect();
        for &q in &a {
            self.check_qubit(q)?;
        }
        if a.is_empty() || a.len() == self.n {
            return Err(TableauError::TrivialBipartition);
        }
        Ok(self.restricted_rank(&a.into_iter().collect::<Vec<_>>()) - part_len(part))
    }

    /// GF(2) rank of the generator matrix restricted to `qubits`.
    pub(crate) fn restricted_rank(&self, qubits: &[usize]) -> usize {
        let k = qubits.len();
        let mut m = BitMatrix::new(2 * k);
        for s in &self.stabilizers {
            let bits = qubits.iter().enumerate().flat_map(|(j, &q)| {
                let (x, z) = s.get(q).bits();
                [x.then_some(j), z.then_some(k + j)]
                    .into_iter()
                    .flatten()
            });
            m.push_row(bits.collect::<Vec<_>>());
        }
        m.rank()
    }

    /// Independent generators (exact signs) of the stabilizer elements whose
    /// support lies inside `qubits`.
    pub fn supported_subgroup(&self, qubits: &[usize]) -> Result<Vec<PauliOperator>, TableauError> {
        let inside: BTreeSet<usize> = qubits.iter().copied().collect();
        for &q in &inside {
            self.check_qubit(q)?;
        }
        let cols: Vec<Column> = (0..self.n)
            .filter(|q| !inside.contains(q))
            .flat_map(|q| [Column::X(q), Column::Z(q)])
            .collect();
        let mut rows = self.stabilizers.clone();
        let rank = eliminate(&mut rows, &cols);
        Ok(rows.split_off(rank))
    }

    /// Canonical generators as signed strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.canonical_generators()
            .iter()
            .map(|g| g.to_string())
            .collect()
    }
}

fn part_len(part: &[usize]) -> usize {
    part.iter().collect::<BTreeSet<_>>().len()
}

/// Free-function form of [`StabilizerState::same_state`].
pub fn states_equal(a: &StabilizerState, b: &StabilizerState) -> bool {
    a.same_state(b)
}

impl PartialEq for StabilizerState {
    fn eq(&self, other: &Self) -> bool {
        self.same_state(other)
    }
}

impl Eq for StabilizerState {}

#[derive(Clone, Copy, Debug)]
enum Column {
    X(usize),
    Z(usize),
}

impl Column {
    fn hit(self, row: &PauliOperator) -> bool {
        match self {
            Column::X(q) => row.x_bit(q),
            Column::Z(q) => row.z_bit(q),
        }
    }
}

/// Row reduction of commuting Pauli rows over the listed columns; returns the
/// rank. Pivot rows come first; rows are multiplied with exact phases.
fn eliminate(rows: &mut [PauliOperator], cols: &[Column]) -> usize {
    let mut r = 0;
    for &c in cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| c.hit(&rows[i])) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && c.hit(row) {
                row.mul_assign_unchecked(&pivot);
            }
        }
        r += 1;
    }
    r
}

impl Serialize for StabilizerState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.canonical_generators().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StabilizerState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<PauliOperator>::deserialize(deserializer)?;
        StabilizerState::from_generators(rows).map_err(serde::de::Error::custom)
    }
}
