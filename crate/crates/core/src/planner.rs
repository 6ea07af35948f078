//! Combinatorics of GHZ extraction from a line (or ring) of `n` vertices:
//! islands, feasibility, the size bound, enumeration and measurement-pattern
//! synthesis. Everything here is pure and uses 1-based labels.
//!
//! A target set `vg` splits into *islands*, maximal runs of consecutive
//! selected vertices. On a line, `vg` with `|vg| ≥ 4` is extractable iff it
//! has no island of length three or more and no 2-island with selected
//! vertices on both sides. Targets of size three are always extractable.
//!
//! Patterns measure everything outside `[min vg, max vg]` in `Z`. Each
//! internal gap of `g` unselected vertices is measured with `Y` on all but at
//! most one vertex and `X` on the remaining one; see [`gap_bases`].

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::Pauli;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlannerError {
    #[error("a {kind} needs at least {min} vertices, got {n}")]
    TooSmall {
        kind: &'static str,
        min: usize,
        n: usize,
    },
    #[error("vertex {vertex} is outside 1..={n}")]
    OutOfRange { vertex: usize, n: usize },
    #[error("vertex {0} is listed twice")]
    Repeated(usize),
    #[error("the target set is empty")]
    Empty,
    #[error("infeasible target: {0}")]
    Infeasible(String),
    #[error("malformed plan: {0}")]
    Malformed(String),
}

/// A maximal run `start, start+1, …, start+len-1` of selected vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Island {
    pub start: usize,
    pub len: usize,
    /// Some selected vertex lies to the left of the island.
    pub left_has_neighbour: bool,
    /// Some selected vertex lies to the right of the island.
    pub right_has_neighbour: bool,
}

impl Island {
    pub fn end(&self) -> usize {
        self.start + self.len - 1
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end()
    }

    pub fn is_flanked(&self) -> bool {
        self.left_has_neighbour && self.right_has_neighbour
    }
}

impl fmt::Display for Island {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.vertices().join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IslandDecomposition {
    pub islands: Vec<Island>,
}

/// Outcome of the feasibility test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    /// `|vg| ≤ 2`: always possible.
    TriviallyFeasible,
    Infeasible(String),
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, Verdict::Infeasible(_))
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Verdict::Infeasible(r) => Some(r),
            _ => None,
        }
    }
}

fn check_n(n: usize, ring: bool) -> Result<(), PlannerError> {
    let min = if ring { 3 } else { 2 };
    if n < min {
        return Err(PlannerError::TooSmall {
            kind: if ring { "ring" } else { "line" },
            min,
            n,
        });
    }
    Ok(())
}

/// Sorted copy of `vg` after range and duplicate checks.
pub fn normalize_target(n: usize, vg: &[usize]) -> Result<Vec<usize>, PlannerError> {
    if vg.is_empty() {
        return Err(PlannerError::Empty);
    }
    let mut v = vg.to_vec();
    v.sort_unstable();
    for w in v.windows(2) {
        if w[0] == w[1] {
            return Err(PlannerError::Repeated(w[0]));
        }
    }
    if let Some(&bad) = v.iter().find(|&&x| x == 0 || x > n) {
        return Err(PlannerError::OutOfRange { vertex: bad, n });
    }
    Ok(v)
}

/// Maximal runs of consecutive labels in `vg`, left to right.
pub fn decompose_islands(n: usize, vg: &[usize]) -> Result<IslandDecomposition, PlannerError> {
    let v = normalize_target(n, vg)?;
    let mut islands: Vec<Island> = Vec::new();
    for &x in &v {
        match islands.last_mut() {
            Some(last) if last.end() + 1 == x => last.len += 1,
            _ => islands.push(Island {
                start: x,
                len: 1,
                left_has_neighbour: false,
                right_has_neighbour: false,
            }),
        }
    }
    let k = islands.len();
    for (i, isl) in islands.iter_mut().enumerate() {
        isl.left_has_neighbour = i > 0;
        isl.right_has_neighbour = i + 1 < k;
    }
    Ok(IslandDecomposition { islands })
}

fn line_verdict(n: usize, v: &[usize]) -> Verdict {
    if v.len() <= 2 {
        return Verdict::TriviallyFeasible;
    }
    if v.len() == 3 {
        return Verdict::Feasible;
    }
    let dec = decompose_islands(n, v).expect("validated target");
    if let Some(big) = dec.islands.iter().find(|i| i.len >= 3) {
        return Verdict::Infeasible(format!(
            "{}-island {big} in a target of size {} (islands of three or more only work for size 3)",
            big.len,
            v.len()
        ));
    }
    if let Some(two) = dec.islands.iter().find(|i| i.len == 2 && i.is_flanked()) {
        return Verdict::Infeasible(format!("2-island {two} flanked on both sides"));
    }
    Verdict::Feasible
}

/// The line obtained by cutting the ring at `r`: labels `r+1, …, n, 1, …, r-1`.
fn ring_opening(n: usize, r: usize) -> Vec<usize> {
    (1..n).map(|k| (r - 1 + k) % n + 1).collect()
}

/// Target `v` expressed in positions `1..n-1` of the ring opened at `r`.
fn opened_target(n: usize, r: usize, v: &[usize]) -> Vec<usize> {
    let order = ring_opening(n, r);
    let mut pos: Vec<usize> = v
        .iter()
        .map(|x| order.iter().position(|y| y == x).unwrap() + 1)
        .collect();
    pos.sort_unstable();
    pos
}

/// First unselected vertex at which the ring can be opened into a line on
/// which `v` is feasible.
fn ring_cut(n: usize, v: &[usize]) -> Option<usize> {
    (1..=n)
        .filter(|r| v.binary_search(r).is_err())
        .find(|&r| line_verdict(n - 1, &opened_target(n, r, v)).is_feasible())
}

fn ring_verdict(n: usize, v: &[usize]) -> Verdict {
    if v.len() <= 2 {
        return Verdict::TriviallyFeasible;
    }
    if v.len() == n {
        return if n == 3 {
            Verdict::Feasible
        } else {
            Verdict::Infeasible(format!("the full {n}-ring leaves no vertex to measure"))
        };
    }
    if ring_cut(n, v).is_some() {
        Verdict::Feasible
    } else {
        Verdict::Infeasible(
            "every opening of the ring at an unselected vertex leaves an infeasible line".into(),
        )
    }
}

/// Decides whether `GHZ_vg` can be extracted by local Cliffords, Pauli
/// measurements and classical communication.
pub fn is_feasible(n: usize, vg: &[usize], ring: bool) -> Result<Verdict, PlannerError> {
    check_n(n, ring)?;
    let v = normalize_target(n, vg)?;
    Ok(if ring {
        ring_verdict(n, &v)
    } else {
        line_verdict(n, &v)
    })
}

/// Largest extractable GHZ size: `⌊(n+3)/2⌋` on a line, `⌊(n+2)/2⌋` on a
/// ring with `n ≥ 4` (and 3 for the triangle).
pub fn max_ghz_size(n: usize, ring: bool) -> Result<usize, PlannerError> {
    check_n(n, ring)?;
    Ok(match (ring, n) {
        (false, 2) => 2,
        (false, _) => (n + 3) / 2,
        (true, 3) => 3,
        (true, _) => (n + 2) / 2,
    })
}

/// All feasible targets of the given size in lexicographic order.
pub fn enumerate_feasible(
    n: usize,
    size: usize,
    ring: bool,
) -> Result<Vec<Vec<usize>>, PlannerError> {
    check_n(n, ring)?;
    if size == 0 || size > n {
        return Ok(Vec::new());
    }
    Ok((1..=n)
        .combinations(size)
        .filter(|v| {
            if ring {
                ring_verdict(n, v).is_feasible()
            } else {
                line_verdict(n, v).is_feasible()
            }
        })
        .collect())
}

/// Bases for an internal gap of `g ≥ 1` vertices, left to right.
///
/// A `Y` measurement contracts the path across the measured vertex and
/// rotates both neighbours, so a later `X` only fuses correctly when the `Y`
/// runs on either side of it have equal length mod 3. The `X` goes to the
/// rightmost such position; for `g = 2` no position exists and both vertices
/// are measured in `Y`.
pub fn gap_bases(g: usize) -> Vec<Pauli> {
    assert!(g >= 1);
    let right = (2 * (g - 1)) % 3;
    (0..g)
        .map(|i| {
            if right < g && i == g - 1 - right {
                Pauli::X
            } else {
                Pauli::Y
            }
        })
        .collect()
}

/// A concrete extraction protocol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionPlan {
    pub n: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ring: bool,
    pub vg: Vec<usize>,
    /// Measurement basis of every vertex outside `vg`.
    pub basis: BTreeMap<usize, Pauli>,
    /// Fictitious vertices `0` and/or `n+1` that pad a boundary 1-island to
    /// a 2-island; they are never measured.
    #[serde(rename = "virtual")]
    pub virtual_nodes: Vec<usize>,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl ExtractionPlan {
    /// A plan object recording why `vg` cannot be extracted.
    pub fn infeasible(n: usize, ring: bool, vg: Vec<usize>, reason: String) -> Self {
        Self {
            n,
            ring,
            vg,
            basis: BTreeMap::new(),
            virtual_nodes: Vec::new(),
            feasible: false,
            reason: Some(reason),
        }
    }

    /// Measured set `M`, ascending.
    pub fn measured(&self) -> Vec<usize> {
        self.basis.keys().copied().collect()
    }

    /// Measured vertices sorted `Z` first, then `Y`, then `X`; ascending
    /// within each basis.
    pub fn measurement_order(&self) -> Vec<usize> {
        let rank = |p: Pauli| match p {
            Pauli::Z => 0,
            Pauli::Y => 1,
            _ => 2,
        };
        let mut order = self.measured();
        order.sort_by_key(|v| (rank(self.basis[v]), *v));
        order
    }

    /// Structural checks for plans read from outside.
    pub fn validate(&self) -> Result<(), PlannerError> {
        check_n(self.n, self.ring)?;
        let v = normalize_target(self.n, &self.vg)?;
        if v != self.vg {
            return Err(PlannerError::Malformed("vg must be ascending".into()));
        }
        if !self.feasible {
            return Ok(());
        }
        for x in 1..=self.n {
            let selected = v.binary_search(&x).is_ok();
            match (selected, self.basis.get(&x)) {
                (true, Some(_)) => {
                    return Err(PlannerError::Malformed(format!("vertex {x} is selected and measured")))
                }
                (false, None) => {
                    return Err(PlannerError::Malformed(format!("vertex {x} has no basis")))
                }
                (_, Some(Pauli::I)) => {
                    return Err(PlannerError::Malformed(format!("vertex {x} has basis I")))
                }
                _ => {}
            }
        }
        if self.basis.keys().any(|&x| x == 0 || x > self.n) {
            return Err(PlannerError::Malformed("basis outside 1..=n".into()));
        }
        Ok(())
    }
}

fn line_bases(n: usize, v: &[usize]) -> BTreeMap<usize, Pauli> {
    let (lo, hi) = (v[0], *v.last().unwrap());
    let mut basis = BTreeMap::new();
    for x in (1..lo).chain(hi + 1..=n) {
        basis.insert(x, Pauli::Z);
    }
    for w in v.windows(2) {
        let g = w[1] - w[0] - 1;
        if g > 0 {
            for (x, b) in (w[0] + 1..w[1]).zip(gap_bases(g)) {
                basis.insert(x, b);
            }
        }
    }
    basis
}

fn line_virtual_nodes(n: usize, v: &[usize]) -> Vec<usize> {
    if v.len() < 3 {
        return Vec::new();
    }
    let mut out = Vec::new();
    if v[0] == 1 && v[1] != 2 {
        out.push(0);
    }
    let k = v.len();
    if v[k - 1] == n && v[k - 2] != n - 1 {
        out.push(n + 1);
    }
    out
}

/// Measurement pattern for a feasible target.
pub fn synthesize_pattern(n: usize, vg: &[usize], ring: bool) -> Result<ExtractionPlan, PlannerError> {
    let verdict = is_feasible(n, vg, ring)?;
    if let Verdict::Infeasible(reason) = verdict {
        return Err(PlannerError::Infeasible(reason));
    }
    let v = normalize_target(n, vg)?;
    let (basis, virtual_nodes) = if !ring {
        (line_bases(n, &v), line_virtual_nodes(n, &v))
    } else if v.len() == n {
        (BTreeMap::new(), Vec::new())
    } else {
        let r = ring_cut(n, &v).expect("feasible ring target has a cut");
        let order = ring_opening(n, r);
        let mut basis: BTreeMap<usize, Pauli> = line_bases(n - 1, &opened_target(n, r, &v))
            .into_iter()
            .map(|(pos, b)| (order[pos - 1], b))
            .collect();
        basis.insert(r, Pauli::Z);
        (basis, Vec::new())
    };
    Ok(ExtractionPlan {
        n,
        ring,
        vg: v,
        basis,
        virtual_nodes,
        feasible: true,
        reason: None,
    })
}

/// Measured set of the canonical maximum-size line pattern.
fn maximal_measured(n: usize) -> Vec<usize> {
    match n {
        0..=3 => Vec::new(),
        4 => vec![2],
        _ if n % 2 == 1 => (3..=n - 2).step_by(2).collect(),
        _ => (3..=n - 5)
            .step_by(2)
            .chain([n - 3, n - 2])
            .collect(),
    }
}

/// A pattern reaching [`max_ghz_size`].
pub fn maximal_pattern(n: usize, ring: bool) -> Result<ExtractionPlan, PlannerError> {
    check_n(n, ring)?;
    let vg: Vec<usize> = if ring && n > 3 {
        let m = maximal_measured(n - 1);
        (1..n).filter(|x| !m.contains(x)).collect()
    } else if ring {
        (1..=n).collect()
    } else {
        let m = maximal_measured(n);
        (1..=n).filter(|x| !m.contains(x)).collect()
    };
    synthesize_pattern(n, &vg, ring)
}
