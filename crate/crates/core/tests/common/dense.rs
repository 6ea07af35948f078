//! Dense state-vector reference simulator. Qubit `q` is bit `q` of the
//! basis index.

use ghzx_core::{Pauli, PauliOperator, SingleQubitClifford};
use num_complex::Complex64 as C;

pub type Mat2 = [[C; 2]; 2];

pub const TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn pauli_matrix(l: Pauli) -> Mat2 {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match l {
        Pauli::I => [[o, z], [z, o]],
        Pauli::X => [[z, o], [o, z]],
        Pauli::Y => [[z, -i], [i, z]],
        Pauli::Z => [[o, z], [z, -o]],
    }
}

pub fn gate_matrix(name: &str) -> Mat2 {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match name {
        "I" => pauli_matrix(Pauli::I),
        "X" => pauli_matrix(Pauli::X),
        "Y" => pauli_matrix(Pauli::Y),
        "Z" => pauli_matrix(Pauli::Z),
        "H" => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        "S" => [[o, z], [z, i]],
        "Sdg" => [[o, z], [z, -i]],
        other => panic!("unknown gate {other}"),
    }
}

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[c(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            m[r][col] = a[r][0] * b[0][col] + a[r][1] * b[1][col];
        }
    }
    m
}

pub fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// Matrix of a Clifford from its gate word (gates applied left to right).
pub fn clifford_matrix(g: &SingleQubitClifford) -> Mat2 {
    g.name()
        .split_whitespace()
        .fold(gate_matrix("I"), |acc, w| mul(&gate_matrix(w), &acc))
}

/// `a ≈ λ b` for some unit-modulus `λ`.
pub fn equal_up_to_phase(a: &Mat2, b: &Mat2) -> bool {
    let mut lambda = None;
    for r in 0..2 {
        for col in 0..2 {
            if b[r][col].norm() > TOL {
                lambda = Some(a[r][col] / b[r][col]);
            }
        }
    }
    let Some(l) = lambda else { return false };
    (0..2).all(|r| (0..2).all(|col| (a[r][col] - l * b[r][col]).norm() < 1e-9))
}

#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub amp: Vec<C>,
}

impl Dense {
    pub fn zero(n: usize) -> Self {
        let mut amp = vec![c(0.0, 0.0); 1 << n];
        amp[0] = c(1.0, 0.0);
        Self { n, amp }
    }

    pub fn apply_1q(&mut self, q: usize, m: &Mat2) {
        let bit = 1 << q;
        for i in 0..self.amp.len() {
            if i & bit == 0 {
                let (a, b) = (self.amp[i], self.amp[i | bit]);
                self.amp[i] = m[0][0] * a + m[0][1] * b;
                self.amp[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    pub fn h(&mut self, q: usize) {
        self.apply_1q(q, &gate_matrix("H"));
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        for (i, v) in self.amp.iter_mut().enumerate() {
            if (i >> a) & 1 == 1 && (i >> b) & 1 == 1 {
                *v = -*v;
            }
        }
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        for i in 0..self.amp.len() {
            if (i >> control) & 1 == 1 && (i >> target) & 1 == 0 {
                self.amp.swap(i, i | (1 << target));
            }
        }
    }

    /// Applies `P` including its phase.
    pub fn apply_pauli(&mut self, p: &PauliOperator) {
        assert_eq!(p.num_qubits(), self.n);
        for q in 0..self.n {
            let l = p.get(q);
            if l != Pauli::I {
                self.apply_1q(q, &pauli_matrix(l));
            }
        }
        let ph = C::i().powu(p.phase().exponent() as u32);
        for v in &mut self.amp {
            *v *= ph;
        }
    }

    pub fn inner(&self, other: &Self) -> C {
        self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn expectation(&self, p: &PauliOperator) -> C {
        let mut t = self.clone();
        t.apply_pauli(p);
        self.inner(&t)
    }

    /// `ψ ← (1 ± P)ψ/2`, renormalised; returns the Born probability.
    pub fn project(&mut self, p: &PauliOperator, minus: bool) -> f64 {
        let mut t = self.clone();
        t.apply_pauli(p);
        let s = if minus { -1.0 } else { 1.0 };
        for (a, b) in self.amp.iter_mut().zip(&t.amp) {
            *a = (*a + *b * s) * 0.5;
        }
        let prob = self.norm_sqr();
        if prob > TOL {
            let k = 1.0 / prob.sqrt();
            for a in &mut self.amp {
                *a *= k;
            }
        }
        prob
    }

    /// The unique state stabilised by `gens` (n independent generators).
    pub fn from_stabilizers(gens: &[PauliOperator]) -> Self {
        let n = gens[0].num_qubits();
        for basis in 0..1usize << n {
            let mut d = Self::zero(n);
            d.amp[0] = c(0.0, 0.0);
            d.amp[basis] = c(1.0, 0.0);
            let mut ok = true;
            for g in gens {
                if d.project(g, false) < TOL {
                    ok = false;
                    break;
                }
            }
            if ok {
                return d;
            }
        }
        panic!("generators stabilise no state")
    }

    /// Reduced density matrix on `keep` (row index bit `j` = qubit `keep[j]`).
    pub fn reduced(&self, keep: &[usize]) -> Vec<Vec<C>> {
        let dim = 1 << keep.len();
        let mut rho = vec![vec![c(0.0, 0.0); dim]; dim];
        let rest: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let compose = |k: usize, r: usize| -> usize {
            let mut i = 0;
            for (j, &q) in keep.iter().enumerate() {
                i |= ((k >> j) & 1) << q;
            }
            for (j, &q) in rest.iter().enumerate() {
                i |= ((r >> j) & 1) << q;
            }
            i
        };
        for r in 0..1usize << rest.len() {
            for a in 0..dim {
                let va = self.amp[compose(a, r)];
                for b in 0..dim {
                    rho[a][b] += va * self.amp[compose(b, r)].conj();
                }
            }
        }
        rho
    }

    /// Rank of the coefficient matrix across `part | rest`.
    pub fn schmidt_rank(&self, part: &[usize]) -> usize {
        let rho = self.reduced(part);
        matrix_rank(rho)
    }
}

pub fn matrix_rank(mut m: Vec<Vec<C>>) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm())) else {
            break;
        };
        if m[p][col].norm() < 1e-8 {
            continue;
        }
        m.swap(rank, p);
        let pivot = m[rank][col];
        for r in 0..rows {
            if r != rank {
                let f = m[r][col] / pivot;
                if f.norm() > 0.0 {
                    for k in col..cols {
                        let v = m[rank][k];
                        m[r][k] -= f * v;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The cluster state on a path (or cycle) of `n` qubits.
pub fn cluster(n: usize, ring: bool) -> Dense {
    let mut d = Dense::zero(n);
    for q in 0..n {
        d.h(q);
    }
    for q in 0..n - 1 {
        d.cz(q, q + 1);
    }
    if ring && n > 2 {
        d.cz(n - 1, 0);
    }
    d
}

/// Hadamards on the even 0-based qubits (odd labels) of the line cluster.
pub fn rotated_cluster(n: usize) -> Dense {
    let mut d = cluster(n, false);
    for q in (0..n).step_by(2) {
        d.h(q);
    }
    d
}

pub fn ghz(m: usize) -> Dense {
    let mut d = Dense::zero(m);
    d.h(0);
    for q in 1..m {
        d.cnot(0, q);
    }
    d
}

pub fn fidelity(a: &Dense, b: &Dense) -> f64 {
    a.inner(b).norm_sqr()
}

/// Dense vector of a tableau state.
pub fn of_state(s: &ghzx_core::StabilizerState) -> Dense {
    Dense::from_stabilizers(s.generators())
}
