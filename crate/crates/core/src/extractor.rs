//! Running extraction plans on cluster states, synthesizing the
//! outcome-dependent local corrections, checking the result, and the
//! exhaustive feasibility oracle.

use std::collections::BTreeMap;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Pauli, PauliOperator};
use crate::planner::{ExtractionPlan, PlannerError};
use crate::states::{ghz, make_linear_cluster, LinearClusterSpec, StatesError};
use crate::tableau::gf2::BitMatrix;
use crate::tableau::{
    IndexMap, Outcome, OutcomeSource, SignedPauli, SingleQubitClifford, StabilizerState,
    TableauError,
};

/// Largest state for which [`is_ghz_class`] enumerates every cut.
pub const MAX_CUT_QUBITS: usize = 16;
/// Largest resource the brute-force oracle accepts.
pub const MAX_BRUTE_FORCE_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractorError {
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    States(#[from] StatesError),
    #[error("plan is for {plan} qubits but the resource has {resource}")]
    SizeMismatch { plan: usize, resource: usize },
    #[error("plan is marked infeasible: {0}")]
    InfeasiblePlan(String),
    #[error("no forced outcome given for vertex {0}")]
    MissingOutcome(usize),
    #[error("measurement order must list every measured vertex exactly once")]
    BadOrder,
    #[error("frame has {got} entries for {expected} qubits")]
    BadFrame { expected: usize, got: usize },
    #[error("state is not local-Clifford equivalent to a GHZ state")]
    NotGhzClass,
    #[error("exhaustive cut check is limited to {max} qubits, got {m}")]
    TooManyQubits { m: usize, max: usize },
    #[error("brute force is limited to n ≤ {max}, got {n}")]
    BudgetExceeded { n: usize, max: usize },
    #[error("corrected state differs from the target GHZ state")]
    VerificationFailed,
}

/// Where measurement outcomes come from.
pub enum Outcomes<'a> {
    Random(&'a mut dyn RngCore),
    /// Vertex → outcome. A value contradicting a deterministic outcome is an
    /// error.
    Forced(&'a BTreeMap<usize, Outcome>),
    /// Bit `i` is the outcome (set = −1) of the `i`-th random measurement;
    /// deterministic measurements take their actual value.
    Branch(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub outcomes: BTreeMap<usize, Outcome>,
    /// Vertices in the order they were measured.
    pub order: Vec<usize>,
    /// Vertices whose outcome was a fair coin.
    pub random: Vec<usize>,
}

/// One single-qubit Clifford per GHZ vertex, keyed by label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CorrectionSet(pub BTreeMap<usize, SingleQubitClifford>);

impl CorrectionSet {
    /// Applies the corrections to a state whose qubit `i` is the `i`-th
    /// smallest label.
    pub fn apply(&self, state: &mut StabilizerState) -> Result<(), TableauError> {
        for (i, c) in self.0.values().enumerate() {
            state.apply_clifford(i, c)?;
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.0.values().all(|c| *c == SingleQubitClifford::IDENTITY)
    }
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub record: MeasurementRecord,
    /// State on the GHZ vertices, qubit `i` being `plan.vg[i]`.
    pub post_state: StabilizerState,
    pub index_map: IndexMap,
}

/// Non-default extraction settings.
#[derive(Clone, Debug, Default)]
pub struct ExtractOptions {
    /// The resource equals `(⊗_j frame[j]) · Lin`; plan bases refer to `Lin`.
    pub frame: Option<Vec<SingleQubitClifford>>,
    /// Measurement order (labels); defaults to [`ExtractionPlan::measurement_order`].
    pub order: Option<Vec<usize>>,
}

/// Runs `plan` on `resource` in the default order and frame.
pub fn extract(
    resource: &StabilizerState,
    plan: &ExtractionPlan,
    outcomes: Outcomes<'_>,
) -> Result<Extraction, ExtractorError> {
    extract_with(resource, plan, &ExtractOptions::default(), outcomes)
}

/// Runs `plan` on a resource given as `(⊗ frame) · Lin`.
pub fn extract_in_frame(
    resource: &StabilizerState,
    plan: &ExtractionPlan,
    frame: &[SingleQubitClifford],
    outcomes: Outcomes<'_>,
) -> Result<Extraction, ExtractorError> {
    let opts = ExtractOptions {
        frame: Some(frame.to_vec()),
        order: None,
    };
    extract_with(resource, plan, &opts, outcomes)
}

/// Observable on the resource that realises measuring `letter` on vertex `v`
/// of the unrotated cluster.
pub(crate) fn physical_observable(
    n: usize,
    v: usize,
    letter: Pauli,
    frame: Option<&[SingleQubitClifford]>,
) -> PauliOperator {
    let img = match frame {
        Some(f) => f[v - 1].conjugate(letter),
        None => SignedPauli::plus(letter),
    };
    let p = PauliOperator::single(n, v - 1, img.letter).unwrap();
    if img.negative {
        p.negated()
    } else {
        p
    }
}

pub fn extract_with(
    resource: &StabilizerState,
    plan: &ExtractionPlan,
    opts: &ExtractOptions,
    mut outcomes: Outcomes<'_>,
) -> Result<Extraction, ExtractorError> {
    let n = resource.num_qubits();
    if plan.n != n {
        return Err(ExtractorError::SizeMismatch {
            plan: plan.n,
            resource: n,
        });
    }
    if !plan.feasible {
        return Err(ExtractorError::InfeasiblePlan(
            plan.reason.clone().unwrap_or_default(),
        ));
    }
    plan.validate()?;
    if let Some(f) = &opts.frame {
        if f.len() != n {
            return Err(ExtractorError::BadFrame {
                expected: n,
                got: f.len(),
            });
        }
    }
    let order = match &opts.order {
        Some(o) => {
            let mut sorted = o.clone();
            sorted.sort_unstable();
            if sorted != plan.measured() {
                return Err(ExtractorError::BadOrder);
            }
            o.clone()
        }
        None => plan.measurement_order(),
    };

    let mut state = resource.clone();
    let mut record = MeasurementRecord {
        outcomes: BTreeMap::new(),
        order: order.clone(),
        random: Vec::new(),
    };
    for &v in &order {
        let obs = physical_observable(n, v, plan.basis[&v], opts.frame.as_deref());
        let m = match &mut outcomes {
            Outcomes::Random(rng) => state.measure(&obs, OutcomeSource::Random(&mut **rng))?,
            Outcomes::Forced(map) => {
                let o = *map.get(&v).ok_or(ExtractorError::MissingOutcome(v))?;
                state.measure(&obs, OutcomeSource::Forced(o))?
            }
            Outcomes::Branch(bits) => match state.stabilizer_sign(&obs)? {
                Some(o) => state.measure(&obs, OutcomeSource::Forced(o))?,
                None => {
                    let k = record.random.len();
                    let o = Outcome::from_bit(k < 64 && (*bits >> k) & 1 == 1);
                    state.measure(&obs, OutcomeSource::Forced(o))?
                }
            },
        };
        if !m.deterministic {
            record.random.push(v);
        }
        record.outcomes.insert(v, m.outcome);
    }
    let drop: Vec<usize> = order.iter().map(|v| v - 1).collect();
    let (post_state, index_map) = state.discard_qubits(&drop)?;
    Ok(Extraction {
        record,
        post_state,
        index_map,
    })
}

/// True iff every bipartition has cut rank 1, which characterises the local
/// Clifford class of GHZ among stabilizer states.
pub fn is_ghz_class(state: &StabilizerState) -> Result<bool, ExtractorError> {
    let m = state.num_qubits();
    if m > MAX_CUT_QUBITS {
        return Err(ExtractorError::TooManyQubits {
            m,
            max: MAX_CUT_QUBITS,
        });
    }
    if m < 2 {
        return Ok(true);
    }
    // fixing the last qubit outside `part` visits each cut once
    for mask in 1u32..(1 << (m - 1)) {
        let part: Vec<usize> = (0..m).filter(|q| (mask >> q) & 1 == 1).collect();
        if state.cut_rank(&part)? != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Local Cliffords turning a GHZ-class `post_state` into exactly
/// `make_ghz(vg)`, signs included.
///
/// Each pair of neighbouring qubits supports one stabilizer element `P ⊗ Q`;
/// its letters are the images of `Z`. A product of generators with a
/// different non-identity letter on every qubit is the image of `X⊗…⊗X`.
/// Rotating these letters to `Z` and `X` leaves only signs, which a Pauli
/// layer fixes.
pub fn synthesize_corrections(
    post_state: &StabilizerState,
    vg: &[usize],
) -> Result<CorrectionSet, ExtractorError> {
    let m = post_state.num_qubits();
    if vg.len() != m {
        return Err(ExtractorError::SizeMismatch {
            plan: vg.len(),
            resource: m,
        });
    }
    let gates = if m == 1 {
        single_qubit_correction(post_state)?
    } else {
        multi_qubit_corrections(post_state)?
    };
    let set = CorrectionSet(vg.iter().copied().zip(gates).collect());
    let mut check = post_state.clone();
    set.apply(&mut check)?;
    if !check.same_state(&ghz(m)) {
        if m <= MAX_CUT_QUBITS && !is_ghz_class(post_state)? {
            return Err(ExtractorError::NotGhzClass);
        }
        return Err(ExtractorError::VerificationFailed);
    }
    Ok(set)
}

fn single_qubit_correction(state: &StabilizerState) -> Result<Vec<SingleQubitClifford>, ExtractorError> {
    let g = &state.generators()[0];
    let signed = SignedPauli {
        letter: g.get(0),
        negative: g.phase().is_negative(),
    };
    let c = SingleQubitClifford::all()
        .iter()
        .find(|c| c.conjugate_signed(signed) == SignedPauli::plus(Pauli::X))
        .expect("some element maps any signed letter to +X");
    Ok(vec![*c])
}

/// Clears qubits `k+2..` of `row` with the already known elements
/// `pairs[j]` on `{j, j+1}` (indexed by `j`).
fn reduce_to_pair(mut row: PauliOperator, k: usize, pairs: &[Option<PauliOperator>]) -> Option<PauliOperator> {
    let m = row.num_qubits();
    for j in (k + 2..m).rev() {
        if row.get(j) != Pauli::I {
            let p = pairs[j - 1].as_ref()?;
            if p.get(j) != row.get(j) {
                return None;
            }
            row = row.multiply(p).ok()?;
        }
    }
    (row.get(k) != Pauli::I && row.get(k + 1) != Pauli::I).then_some(row)
}

/// The stabilizer element supported on each neighbouring pair `{j, j+1}`,
/// read off one qubit-major echelon form from the right.
fn pair_elements(state: &StabilizerState) -> Result<Vec<PauliOperator>, ExtractorError> {
    let m = state.num_qubits();
    let rows = state.qubit_echelon();
    let mut by_first: Vec<Vec<PauliOperator>> = vec![Vec::new(); m];
    for r in rows {
        let first = (0..m).find(|&q| r.get(q) != Pauli::I).ok_or(ExtractorError::NotGhzClass)?;
        by_first[first].push(r);
    }
    let mut pairs: Vec<Option<PauliOperator>> = vec![None; m - 1];
    for k in (1..m - 1).rev() {
        let [row] = by_first[k].as_slice() else {
            return Err(ExtractorError::NotGhzClass);
        };
        pairs[k] = Some(reduce_to_pair(row.clone(), k, &pairs).ok_or(ExtractorError::NotGhzClass)?);
    }
    let [a, b] = by_first[0].as_slice() else {
        return Err(ExtractorError::NotGhzClass);
    };
    let candidates = [a.clone(), b.clone(), a.multiply(b).unwrap()];
    pairs[0] = candidates.into_iter().find_map(|c| reduce_to_pair(c, 0, &pairs));
    pairs
        .into_iter()
        .map(|p| p.ok_or(ExtractorError::NotGhzClass))
        .collect()
}

fn multi_qubit_corrections(state: &StabilizerState) -> Result<Vec<SingleQubitClifford>, ExtractorError> {
    let m = state.num_qubits();
    let pairs = pair_elements(state)?;
    let mut z_letters: Vec<Option<Pauli>> = vec![None; m];
    for (j, e) in pairs.iter().enumerate() {
        for q in [j, j + 1] {
            let l = e.get(q);
            match z_letters[q] {
                Some(prev) if prev != l => return Err(ExtractorError::NotGhzClass),
                _ => z_letters[q] = Some(l),
            }
        }
    }
    let z_letters: Vec<Pauli> = z_letters.into_iter().map(Option::unwrap).collect();

    // find c with Σ_i c_i [g_i anticommutes with z_letters[j] on j] = 1 for all j
    let gens = state.generators();
    let mut sys = BitMatrix::new(m + 1);
    for (j, &a) in z_letters.iter().enumerate() {
        let bits = (0..m)
            .filter(|&i| !gens[i].get(j).commutes_with(a))
            .chain(std::iter::once(m));
        sys.push_row(bits.collect::<Vec<_>>());
    }
    let pivots = sys.reduce(m);
    let rank = pivots.len();
    if (rank..m).any(|r| sys.get(r, m)) {
        return Err(ExtractorError::NotGhzClass);
    }
    let mut x_image = PauliOperator::identity(m);
    for (r, &c) in pivots.iter().enumerate() {
        if sys.get(r, m) {
            x_image = x_image.multiply(&gens[c]).unwrap();
        }
    }

    let mut gates = Vec::with_capacity(m);
    for (j, &a) in z_letters.iter().enumerate() {
        let b = x_image.get(j);
        let u = SingleQubitClifford::mapping_to_xz(b, a).ok_or(ExtractorError::NotGhzClass)?;
        gates.push(u);
    }
    let mut rotated = state.clone();
    for (j, u) in gates.iter().enumerate() {
        rotated.apply_clifford(j, u)?;
    }

    let mut flip = false;
    for j in 0..m - 1 {
        let zz = PauliOperator::from_support(m, &[j, j + 1], Pauli::Z).unwrap();
        let sign = rotated
            .stabilizer_sign(&zz)?
            .ok_or(ExtractorError::NotGhzClass)?;
        flip ^= sign.is_minus();
        if flip {
            gates[j + 1] = gates[j + 1].then(&SingleQubitClifford::X);
        }
    }
    let all_x = PauliOperator::from_support(m, &(0..m).collect::<Vec<_>>(), Pauli::X).unwrap();
    let sign = rotated
        .stabilizer_sign(&all_x)?
        .ok_or(ExtractorError::NotGhzClass)?;
    if sign.is_minus() {
        gates[0] = gates[0].then(&SingleQubitClifford::Z);
    }
    Ok(gates)
}

/// A full extraction on the cluster described by the plan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub plan: ExtractionPlan,
    pub record: MeasurementRecord,
    /// Canonical generators of the post-measurement state, before correction.
    pub post_state: Vec<String>,
    pub corrections: CorrectionSet,
    pub verified: bool,
}

/// Builds the line or ring cluster for `plan`, extracts, corrects and checks.
pub fn run_extraction(
    plan: &ExtractionPlan,
    outcomes: Outcomes<'_>,
) -> Result<ExtractionReport, ExtractorError> {
    let resource = make_linear_cluster(&LinearClusterSpec::new(plan.n, plan.ring)?);
    let ex = extract(&resource, plan, outcomes)?;
    let corrections = synthesize_corrections(&ex.post_state, &plan.vg)?;
    Ok(ExtractionReport {
        plan: plan.clone(),
        record: ex.record,
        post_state: ex.post_state.to_strings(),
        corrections,
        verified: true,
    })
}

/// Every outcome branch of `basis` applied to `resource`, reduced to `vg`:
/// `true` iff all of them are GHZ-class.
fn basis_works(
    resource: &StabilizerState,
    plan: &ExtractionPlan,
) -> Result<bool, ExtractorError> {
    let first = extract(resource, plan, Outcomes::Branch(0))?;
    if !is_ghz_class(&first.post_state)? {
        return Ok(false);
    }
    let branches = 1u64 << first.record.random.len();
    for bits in 1..branches {
        let ex = extract(resource, plan, Outcomes::Branch(bits))?;
        if !is_ghz_class(&ex.post_state)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First basis assignment over `{X, Y, Z}^M` (lexicographic, `X < Y < Z`)
/// for which every outcome branch leaves a GHZ-class state on `vg`.
pub fn brute_force_witness(
    spec: &LinearClusterSpec,
    vg: &[usize],
) -> Result<Option<BTreeMap<usize, Pauli>>, ExtractorError> {
    let n = spec.n;
    if n > MAX_BRUTE_FORCE_N {
        return Err(ExtractorError::BudgetExceeded {
            n,
            max: MAX_BRUTE_FORCE_N,
        });
    }
    let vg = crate::planner::normalize_target(n, vg)?;
    let measured: Vec<usize> = (1..=n).filter(|v| vg.binary_search(v).is_err()).collect();
    let resource = make_linear_cluster(spec);
    let total = 3u64.pow(measured.len() as u32);
    let letters = [Pauli::X, Pauli::Y, Pauli::Z];
    let found = (0..total)
        .into_par_iter()
        .map(|code| {
            let mut basis = BTreeMap::new();
            let mut c = code;
            for &v in measured.iter().rev() {
                basis.insert(v, letters[(c % 3) as usize]);
                c /= 3;
            }
            let plan = ExtractionPlan {
                n,
                ring: spec.ring,
                vg: vg.clone(),
                basis,
                virtual_nodes: Vec::new(),
                feasible: true,
                reason: None,
            };
            basis_works(&resource, &plan).map(|ok| ok.then_some(plan.basis))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match found {
        None => Ok(None),
        Some(r) => r,
    }
}

/// Ground-truth feasibility by exhausting bases and outcome branches.
pub fn brute_force_feasibility(spec: &LinearClusterSpec, vg: &[usize]) -> Result<bool, ExtractorError> {
    Ok(brute_force_witness(spec, vg)?.is_some())
}
