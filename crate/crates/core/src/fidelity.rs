//! Two-setting fidelity witnesses under stochastic Pauli noise.
//!
//! The target `|ψ⟩` has a stabilizer generated by two commuting families
//! `G_o` and `G_e`, each measurable in one product basis. With
//! `E[G] = 2^{-|G|} Σ_{σ ∈ ⟨G⟩} tr(ρσ)` the fidelity obeys
//! `F ≥ E[G_o] + E[G_e] − 1`.
//!
//! - Rotated cluster (odd `n`): `G_o = {Z_{i-1} Z_i Z_{i+1}}_{i odd}` from the
//!   all-`Z` setting, `G_e = {X_{i-1} X_i X_{i+1}}_{i even}` from all-`X`.
//! - GHZ: `G_o = {X⊗…⊗X}` from all-`X`, `G_e = {Z_j Z_{j+}}` from all-`Z`.
//!
//! The *no-identity* variant drops the identity term from both sums and
//! keeps the `2^{-|G|}` normalisation. `renormalize` instead divides the
//! remaining sum by `2^{|G|} − 1` terms' weight, `1 − 2^{-|G|}`.
//!
//! Since `2^{-k} Σ_{σ ∈ ⟨G⟩} σ = ∏_{g ∈ G} (1 + g)/2`, each per-shot term is
//! a 0/1 indicator, so `E[G]` is a binomial proportion and its standard
//! error is `sqrt(E(1−E)/shots)`.

use std::io::{Read, Write};

use rand::Rng as _;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extractor::{
    extract_in_frame, synthesize_corrections, ExtractorError, Outcomes,
};
use crate::pauli::{Pauli, PauliOperator};
use crate::planner::{maximal_pattern, synthesize_pattern, ExtractionPlan, PlannerError};
use crate::rng::stream;
use crate::states::{make_linear_cluster, make_rotated_cluster, LinearClusterSpec, StatesError};
use crate::tableau::{OutcomeSampler, SignedPauli, SingleQubitClifford, StabilizerState, TableauError};

/// Default shots per setting.
pub const DEFAULT_SHOTS: usize = 32_000;
const BLOCK: usize = 4096;

#[derive(Debug, Error)]
pub enum FidelityError {
    #[error("noise probabilities must lie in [0, 1], got p={p}, q={q}")]
    BadNoise { p: f64, q: f64 },
    #[error("need at least one shot")]
    NoShots,
    #[error("the rotated cluster estimator needs odd n, got {0}")]
    EvenCluster(usize),
    #[error("GHZ estimator needs at least 2 vertices, got {0}")]
    GhzTooSmall(usize),
    #[error("shot table columns {got:?} do not match the expected labels {expected:?}")]
    ColumnMismatch { expected: Vec<usize>, got: Vec<usize> },
    #[error("shot tables hold {z} and {x} rows; both settings need shots")]
    EmptyTable { z: usize, x: usize },
    #[error("CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Extractor(#[from] ExtractorError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    States(#[from] StatesError),
}

impl From<csv::Error> for FidelityError {
    fn from(e: csv::Error) -> Self {
        FidelityError::Csv(e.to_string())
    }
}

/// Independent per-qubit depolarizing (`p`, uniformly over `X`, `Y`, `Z`)
/// before measurement, then classical readout flips with probability `q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    #[serde(rename = "depolarizing_p")]
    pub p: f64,
    #[serde(rename = "readout_flip_q")]
    pub q: f64,
}

impl NoiseModel {
    pub fn new(p: f64, q: f64) -> Result<Self, FidelityError> {
        let ok = |v: f64| (0.0..=1.0).contains(&v);
        if !ok(p) || !ok(q) {
            return Err(FidelityError::BadNoise { p, q });
        }
        Ok(Self { p, q })
    }

    pub fn ideal() -> Self {
        Self { p: 0.0, q: 0.0 }
    }

    pub fn is_ideal(&self) -> bool {
        self.p == 0.0 && self.q == 0.0
    }

    /// Whether the noise flips a `letter` measurement on one qubit.
    fn flips(&self, letter: Pauli, rng: &mut dyn RngCore) -> bool {
        let mut flip = false;
        if self.p > 0.0 && rng.gen::<f64>() < self.p {
            let e = Pauli::NON_IDENTITY[rng.gen_range(0..3)];
            flip = !e.commutes_with(letter);
        }
        if self.q > 0.0 && rng.gen::<f64>() < self.q {
            flip = !flip;
        }
        flip
    }
}

/// The two product measurement settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setting {
    Z,
    X,
}

impl Setting {
    pub fn letter(self) -> Pauli {
        match self {
            Setting::Z => Pauli::Z,
            Setting::X => Pauli::X,
        }
    }
}

/// `shots × columns` table of ±1 outcomes, packed (bit set = −1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotTable {
    labels: Vec<usize>,
    rows: Vec<Vec<u64>>,
}

impl ShotTable {
    pub fn new(labels: Vec<usize>) -> Self {
        Self {
            labels,
            rows: Vec::new(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn shots(&self) -> usize {
        self.rows.len()
    }

    /// Appends one shot given as ±1 values.
    pub fn push(&mut self, values: &[i8]) {
        assert_eq!(values.len(), self.labels.len());
        let mut row = vec![0u64; self.words()];
        for (i, &v) in values.iter().enumerate() {
            if v < 0 {
                row[i >> 6] |= 1 << (i & 63);
            }
        }
        self.rows.push(row);
    }

    fn words(&self) -> usize {
        self.labels.len().div_ceil(64).max(1)
    }

    pub fn value(&self, shot: usize, col: usize) -> i8 {
        if (self.rows[shot][col >> 6] >> (col & 63)) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn row(&self, shot: usize) -> Vec<i8> {
        (0..self.labels.len()).map(|c| self.value(shot, c)).collect()
    }

    /// Mean of the product of the columns set in `mask`.
    pub fn parity_mean(&self, mask: &[u64]) -> f64 {
        let odd: usize = self
            .rows
            .iter()
            .filter(|r| r.iter().zip(mask).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1)
            .count();
        1.0 - 2.0 * odd as f64 / self.shots() as f64
    }

    /// Fraction of shots on which every mask has even parity.
    fn all_even_fraction(&self, masks: &[Vec<u64>]) -> f64 {
        let hits = self
            .rows
            .iter()
            .filter(|r| {
                masks
                    .iter()
                    .all(|m| r.iter().zip(m).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 0)
            })
            .count();
        hits as f64 / self.shots() as f64
    }

    /// Header row of labels, then one row of ±1 per shot.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), FidelityError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.labels.iter().map(|l| l.to_string()))?;
        for s in 0..self.shots() {
            out.write_record(self.row(s).iter().map(|v| v.to_string()))?;
        }
        out.flush().map_err(|e| FidelityError::Csv(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, FidelityError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
        let labels = rdr
            .headers()?
            .iter()
            .map(|h| {
                h.trim()
                    .parse::<usize>()
                    .map_err(|_| FidelityError::Csv(format!("bad column label {h:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut table = ShotTable::new(labels);
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|v| match v.trim() {
                    "1" | "+1" => Ok(1i8),
                    "-1" => Ok(-1),
                    other => Err(FidelityError::Csv(format!("row {}: entry {other:?} is not ±1", i + 1))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != table.labels.len() {
                return Err(FidelityError::Csv(format!("row {} has {} entries", i + 1, vals.len())));
            }
            table.push(&vals);
        }
        Ok(table)
    }

    fn mask(&self, labels: &[usize]) -> Vec<u64> {
        let mut m = vec![0u64; self.words()];
        for l in labels {
            let c = self.labels.iter().position(|x| x == l).expect("label present");
            m[c >> 6] ^= 1 << (c & 63);
        }
        m
    }
}

/// Samples `shots` rounds of measuring the single-qubit `observables`
/// (distinct qubits). Row `s` comes from stream `s / 4096` of `seed`, so the
/// table does not depend on the thread count.
fn sample_observables(
    state: &StabilizerState,
    observables: &[PauliOperator],
    noise: &NoiseModel,
    shots: usize,
    seed: u64,
) -> Result<Vec<Vec<u64>>, FidelityError> {
    if shots == 0 {
        return Err(FidelityError::NoShots);
    }
    let sampler = OutcomeSampler::new(state, observables)?;
    let letters: Vec<Pauli> = observables
        .iter()
        .map(|o| o.get(o.support()[0]))
        .collect();
    let blocks = shots.div_ceil(BLOCK);
    let rows: Vec<Vec<Vec<u64>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let count = BLOCK.min(shots - b * BLOCK);
            (0..count)
                .map(|_| {
                    let mut bits = sampler.sample(&mut rng);
                    for (i, &l) in letters.iter().enumerate() {
                        if noise.flips(l, &mut rng) {
                            bits[i >> 6] ^= 1 << (i & 63);
                        }
                    }
                    bits
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn take_columns(bits: &[u64], cols: std::ops::Range<usize>) -> Vec<u64> {
    let mut out = vec![0u64; cols.len().div_ceil(64).max(1)];
    for (j, c) in cols.enumerate() {
        if (bits[c >> 6] >> (c & 63)) & 1 == 1 {
            out[j >> 6] |= 1 << (j & 63);
        }
    }
    out
}

/// Measures every qubit of `state` in the `setting` basis; columns are
/// labelled `1..=n`.
pub fn sample_setting(
    state: &StabilizerState,
    setting: Setting,
    noise: &NoiseModel,
    shots: usize,
    seed: u64,
) -> Result<ShotTable, FidelityError> {
    let n = state.num_qubits();
    let obs: Vec<PauliOperator> = (0..n)
        .map(|q| PauliOperator::single(n, q, setting.letter()).unwrap())
        .collect();
    let rows = sample_observables(state, &obs, noise, shots, seed)?;
    Ok(ShotTable {
        labels: (1..=n).collect(),
        rows,
    })
}

/// Which witness family a report belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Cluster,
    Ghz,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    /// Rescale the no-identity sums by `1/(1 − 2^{-k})`.
    pub renormalize: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub settings: Family,
    /// Vertices of the state under test.
    pub vertices: Vec<usize>,
    pub shots: usize,
    pub k_odd: usize,
    pub k_even: usize,
    pub e_odd: f64,
    pub e_even: f64,
    pub se_odd: f64,
    pub se_even: f64,
    pub bound: f64,
    pub se_bound: f64,
    pub e_odd_no_identity: f64,
    pub e_even_no_identity: f64,
    pub bound_no_identity: f64,
    pub se_bound_no_identity: f64,
    pub renormalized: bool,
}

struct SubgroupAverage {
    value: f64,
    se: f64,
}

/// `2^{-k} Σ_{σ ∈ ⟨gens⟩} mean(σ)` by explicit enumeration, with the
/// standard error of the equivalent per-shot indicator.
fn subgroup_average(table: &ShotTable, gens: &[Vec<usize>]) -> SubgroupAverage {
    let k = gens.len();
    let masks: Vec<Vec<u64>> = gens.iter().map(|g| table.mask(g)).collect();
    let mut sum = 0.0;
    let mut elem = vec![0u64; table.words()];
    // Gray-code walk over all 2^k products
    for i in 0u64..(1u64 << k) {
        if i > 0 {
            let flip = i.trailing_zeros() as usize;
            for (e, m) in elem.iter_mut().zip(&masks[flip]) {
                *e ^= m;
            }
        }
        sum += table.parity_mean(&elem);
    }
    let value = sum / (1u64 << k) as f64;
    let p = table.all_even_fraction(&masks);
    let se = (p * (1.0 - p) / table.shots() as f64).sqrt();
    SubgroupAverage { value, se }
}

fn check_tables(z: &ShotTable, x: &ShotTable, labels: &[usize]) -> Result<(), FidelityError> {
    for t in [z, x] {
        let sorted = {
            let mut l = t.labels.clone();
            l.sort_unstable();
            l
        };
        if sorted != labels {
            return Err(FidelityError::ColumnMismatch {
                expected: labels.to_vec(),
                got: t.labels.clone(),
            });
        }
    }
    if z.shots() == 0 || x.shots() == 0 {
        return Err(FidelityError::EmptyTable {
            z: z.shots(),
            x: x.shots(),
        });
    }
    Ok(())
}

fn report(
    settings: Family,
    vertices: Vec<usize>,
    odd: (usize, SubgroupAverage),
    even: (usize, SubgroupAverage),
    shots: usize,
    opts: EstimatorOptions,
) -> FidelityReport {
    let (k_odd, o) = odd;
    let (k_even, e) = even;
    let strip = |v: f64, se: f64, k: usize| {
        let w = 0.5f64.powi(k as i32);
        if opts.renormalize {
            ((v - w) / (1.0 - w), se / (1.0 - w))
        } else {
            (v - w, se)
        }
    };
    let (o_ni, o_ni_se) = strip(o.value, o.se, k_odd);
    let (e_ni, e_ni_se) = strip(e.value, e.se, k_even);
    FidelityReport {
        settings,
        vertices,
        shots,
        k_odd,
        k_even,
        e_odd: o.value,
        e_even: e.value,
        se_odd: o.se,
        se_even: e.se,
        bound: o.value + e.value - 1.0,
        se_bound: o.se.hypot(e.se),
        e_odd_no_identity: o_ni,
        e_even_no_identity: e_ni,
        bound_no_identity: o_ni + e_ni - 1.0,
        se_bound_no_identity: o_ni_se.hypot(e_ni_se),
        renormalized: opts.renormalize,
    }
}

/// Generators of the rotated cluster on `1..=n`, as label supports.
pub fn cluster_generator_supports(n: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let around = |i: usize| -> Vec<usize> { (i.max(2) - 1..=(i + 1).min(n)).collect() };
    let odd = (1..=n).step_by(2).map(around).collect();
    let even = (2..=n).step_by(2).map(around).collect();
    (odd, even)
}

/// Estimator for the rotated cluster state on `1..=n` (odd `n`).
pub fn estimate_cluster_bound(
    samples_z: &ShotTable,
    samples_x: &ShotTable,
    n: usize,
    opts: EstimatorOptions,
) -> Result<FidelityReport, FidelityError> {
    if n.is_multiple_of(2) {
        return Err(FidelityError::EvenCluster(n));
    }
    let labels: Vec<usize> = (1..=n).collect();
    check_tables(samples_z, samples_x, &labels)?;
    let (odd, even) = cluster_generator_supports(n);
    let o = subgroup_average(samples_z, &odd);
    let e = subgroup_average(samples_x, &even);
    Ok(report(
        Family::Cluster,
        labels,
        (odd.len(), o),
        (even.len(), e),
        samples_z.shots().min(samples_x.shots()),
        opts,
    ))
}

/// Estimator for `GHZ_vg`; columns of both tables are the labels in `vg`.
pub fn estimate_ghz_bound(
    samples_z: &ShotTable,
    samples_x: &ShotTable,
    vg: &[usize],
    opts: EstimatorOptions,
) -> Result<FidelityReport, FidelityError> {
    if vg.len() < 2 {
        return Err(FidelityError::GhzTooSmall(vg.len()));
    }
    let mut labels = vg.to_vec();
    labels.sort_unstable();
    check_tables(samples_z, samples_x, &labels)?;
    let odd = vec![labels.clone()];
    let even: Vec<Vec<usize>> = labels.windows(2).map(|w| w.to_vec()).collect();
    let o = subgroup_average(samples_x, &odd);
    let e = subgroup_average(samples_z, &even);
    Ok(report(
        Family::Ghz,
        labels,
        (1, o),
        (even.len(), e),
        samples_z.shots().min(samples_x.shots()),
        opts,
    ))
}

/// Same sums as the two estimators with the identity terms left out and,
/// unless `opts.renormalize`, the `2^{-k}` weights kept. Returns the
/// no-identity bound and its standard error.
pub fn estimate_no_identity_variant(report: &FidelityReport) -> (f64, f64) {
    (report.bound_no_identity, report.se_bound_no_identity)
}

/// The rotated cluster `⊗_{i odd} H_i · Lin_n` measured directly.
#[derive(Clone, Debug)]
pub struct ClusterExperiment {
    n: usize,
    state: StabilizerState,
}

impl ClusterExperiment {
    pub fn new(n: usize) -> Result<Self, FidelityError> {
        Ok(Self {
            n,
            state: make_rotated_cluster(n)?,
        })
    }

    pub fn state(&self) -> &StabilizerState {
        &self.state
    }

    pub fn sample(
        &self,
        setting: Setting,
        noise: &NoiseModel,
        shots: usize,
        seed: u64,
    ) -> Result<ShotTable, FidelityError> {
        sample_setting(&self.state, setting, noise, shots, seed)
    }

    pub fn run(
        &self,
        noise: &NoiseModel,
        shots: usize,
        seed: u64,
        opts: EstimatorOptions,
    ) -> Result<FidelityReport, FidelityError> {
        let z = self.sample(Setting::Z, noise, shots, crate::rng::derive_seed(seed, 0))?;
        let x = self.sample(Setting::X, noise, shots, crate::rng::derive_seed(seed, 1))?;
        estimate_cluster_bound(&z, &x, self.n, opts)
    }
}

/// A GHZ state extracted from a cluster resource and read out in the GHZ
/// frame.
///
/// Every resource qubit is measured once per shot: the plan's measured set
/// in its bases, the target vertices in the physical basis that the
/// synthesized local Cliffords map to `Z` or `X`. Outcome-dependent Pauli
/// corrections are applied to the recorded bits afterwards, as an affine
/// function of the measured-set outcomes.
#[derive(Clone, Debug)]
pub struct GhzExperiment {
    plan: ExtractionPlan,
    resource: StabilizerState,
    frame: Vec<SingleQubitClifford>,
    /// Vertices of the measured set with random outcomes, in measurement order.
    random: Vec<usize>,
    measured_obs: Vec<PauliOperator>,
    z_obs: Vec<PauliOperator>,
    x_obs: Vec<PauliOperator>,
    /// `[setting][k][j]`: flip of target column `j` when random outcome `k` is −1.
    frame_flips: [Vec<Vec<bool>>; 2],
}

impl GhzExperiment {
    /// Extraction from the rotated cluster on `1..=n` (odd `n`); `vg`
    /// defaults to the maximal pattern.
    pub fn rotated(n: usize, vg: Option<&[usize]>) -> Result<Self, FidelityError> {
        let resource = make_rotated_cluster(n)?;
        let frame = (1..=n)
            .map(|l| {
                if l % 2 == 1 {
                    SingleQubitClifford::H
                } else {
                    SingleQubitClifford::IDENTITY
                }
            })
            .collect();
        Self::build(n, vg, resource, frame)
    }

    /// Extraction from the plain line cluster on `1..=n`.
    pub fn linear(n: usize, vg: Option<&[usize]>) -> Result<Self, FidelityError> {
        let resource = make_linear_cluster(&LinearClusterSpec::line(n)?);
        Self::build(n, vg, resource, vec![SingleQubitClifford::IDENTITY; n])
    }

    fn build(
        n: usize,
        vg: Option<&[usize]>,
        resource: StabilizerState,
        frame: Vec<SingleQubitClifford>,
    ) -> Result<Self, FidelityError> {
        let plan = match vg {
            Some(v) => synthesize_pattern(n, v, false)?,
            None => maximal_pattern(n, false)?,
        };
        let reference = extract_in_frame(&resource, &plan, &frame, Outcomes::Branch(0))?;
        let base = synthesize_corrections(&reference.post_state, &plan.vg)?;
        let base: Vec<SingleQubitClifford> = base.0.values().copied().collect();
        let random = reference.record.random.clone();

        let order = plan.measurement_order();
        let measured_obs: Vec<PauliOperator> = order
            .iter()
            .map(|&v| crate::extractor::physical_observable(n, v, plan.basis[&v], Some(&frame)))
            .collect();
        let target_obs = |letter: Pauli, gates: &[SingleQubitClifford]| -> Vec<SignedPauli> {
            gates
                .iter()
                .map(|c| c.inverse().conjugate(letter))
                .collect()
        };
        let to_ops = |images: &[SignedPauli]| -> Vec<PauliOperator> {
            plan.vg
                .iter()
                .zip(images)
                .map(|(&v, img)| {
                    let p = PauliOperator::single(n, v - 1, img.letter).unwrap();
                    if img.negative {
                        p.negated()
                    } else {
                        p
                    }
                })
                .collect()
        };
        let z_ref = target_obs(Pauli::Z, &base);
        let x_ref = target_obs(Pauli::X, &base);
        let mut frame_flips: [Vec<Vec<bool>>; 2] = [Vec::new(), Vec::new()];
        for k in 0..random.len() {
            let ex = extract_in_frame(&resource, &plan, &frame, Outcomes::Branch(1 << k))?;
            let gates: Vec<SingleQubitClifford> = synthesize_corrections(&ex.post_state, &plan.vg)?
                .0
                .values()
                .copied()
                .collect();
            for (s, (letter, reference)) in [(Pauli::Z, &z_ref), (Pauli::X, &x_ref)].into_iter().enumerate() {
                let now = target_obs(letter, &gates);
                let flips = now
                    .iter()
                    .zip(reference.iter())
                    .map(|(a, b)| {
                        assert_eq!(a.letter, b.letter, "correction letters differ between branches");
                        a.negative != b.negative
                    })
                    .collect();
                frame_flips[s].push(flips);
            }
        }
        Ok(Self {
            z_obs: to_ops(&z_ref),
            x_obs: to_ops(&x_ref),
            plan,
            resource,
            frame,
            random,
            measured_obs,
            frame_flips,
        })
    }

    pub fn plan(&self) -> &ExtractionPlan {
        &self.plan
    }

    pub fn resource(&self) -> &StabilizerState {
        &self.resource
    }

    pub fn frame(&self) -> &[SingleQubitClifford] {
        &self.frame
    }

    /// Physical observables measured on the target vertices for `setting`.
    pub fn target_observables(&self, setting: Setting) -> &[PauliOperator] {
        match setting {
            Setting::Z => &self.z_obs,
            Setting::X => &self.x_obs,
        }
    }

    /// Pauli-frame flip bits of the target columns for recorded outcomes of
    /// the measured set (vertex → outcome is −1).
    pub fn frame_for(&self, setting: Setting, minus: impl Fn(usize) -> bool) -> Vec<bool> {
        let s = setting as usize;
        let mut f = vec![false; self.plan.vg.len()];
        for (k, &v) in self.random.iter().enumerate() {
            if minus(v) {
                for (a, b) in f.iter_mut().zip(&self.frame_flips[s][k]) {
                    *a ^= b;
                }
            }
        }
        f
    }

    /// Frame-corrected outcomes on the target vertices.
    pub fn sample(
        &self,
        setting: Setting,
        noise: &NoiseModel,
        shots: usize,
        seed: u64,
    ) -> Result<ShotTable, FidelityError> {
        let m = self.measured_obs.len();
        let k = self.plan.vg.len();
        let mut obs = self.measured_obs.clone();
        obs.extend_from_slice(self.target_observables(setting));
        let raw = sample_observables(&self.resource, &obs, noise, shots, seed)?;
        let order = self.plan.measurement_order();
        let col_of: std::collections::HashMap<usize, usize> =
            order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let rows = raw
            .into_iter()
            .map(|bits| {
                let mut out = take_columns(&bits, m..m + k);
                let f = self.frame_for(setting, |v| {
                    let c = col_of[&v];
                    (bits[c >> 6] >> (c & 63)) & 1 == 1
                });
                for (j, flip) in f.into_iter().enumerate() {
                    if flip {
                        out[j >> 6] ^= 1 << (j & 63);
                    }
                }
                out
            })
            .collect();
        Ok(ShotTable {
            labels: self.plan.vg.clone(),
            rows,
        })
    }

    pub fn run(
        &self,
        noise: &NoiseModel,
        shots: usize,
        seed: u64,
        opts: EstimatorOptions,
    ) -> Result<FidelityReport, FidelityError> {
        let z = self.sample(Setting::Z, noise, shots, crate::rng::derive_seed(seed, 0))?;
        let x = self.sample(Setting::X, noise, shots, crate::rng::derive_seed(seed, 1))?;
        estimate_ghz_bound(&z, &x, &self.plan.vg, opts)
    }
}
