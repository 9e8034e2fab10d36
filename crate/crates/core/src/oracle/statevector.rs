use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Basis, Clifford, CorrectionFrame, Graph, Outcome, Pauli, SignedPauli, VertexId};

/// Default qubit cap for dense simulation.
pub const DEFAULT_CAP: usize = 22;

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn pauli_matrix(p: Pauli) -> Mat2 {
    match p {
        Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -I], [I, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn close(a: &Mat2, b: &Mat2) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < 1e-9)
}

fn image(u: &Mat2, p: Pauli) -> SignedPauli {
    let m = matmul(&matmul(u, &pauli_matrix(p)), &dagger(u));
    for q in [Pauli::X, Pauli::Y, Pauli::Z] {
        let pm = pauli_matrix(q);
        if close(&m, &pm) {
            return SignedPauli::plus(q);
        }
        let neg = pm.map(|r| r.map(|c| -c));
        if close(&m, &neg) {
            return SignedPauli::minus(q);
        }
    }
    unreachable!("conjugate of a Pauli by a Clifford is a Pauli")
}

/// Unitary (up to phase) realising a single-qubit Clifford, found by
/// enumerating words in H and S and matching numerical conjugation images.
pub fn clifford_matrix(c: &Clifford) -> Mat2 {
    static TABLE: OnceLock<BTreeMap<Clifford, Mat2>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let s = FRAC_1_SQRT_2;
        let h: Mat2 = [[ONE * s, ONE * s], [ONE * s, -ONE * s]];
        let sg: Mat2 = [[ONE, ZERO], [ZERO, I]];
        let mut table = BTreeMap::new();
        let mut queue = vec![pauli_matrix(Pauli::I)];
        while let Some(u) = queue.pop() {
            let key = Clifford { x: image(&u, Pauli::X), z: image(&u, Pauli::Z) };
            if table.contains_key(&key) {
                continue;
            }
            table.insert(key, u);
            queue.push(matmul(&h, &u));
            queue.push(matmul(&sg, &u));
        }
        table
    });
    table[c]
}

/// +1/-1 eigenvector of a bare Pauli.
fn eigenvector(p: Pauli, plus: bool) -> [Complex64; 2] {
    let s = FRAC_1_SQRT_2;
    let sign = if plus { 1.0 } else { -1.0 };
    match p {
        Pauli::Z if plus => [ONE, ZERO],
        Pauli::Z => [ZERO, ONE],
        Pauli::X => [ONE * s, ONE * (s * sign)],
        Pauli::Y => [ONE * s, I * (s * sign)],
        Pauli::I => unreachable!("identity has no measurement basis"),
    }
}

/// Dense amplitudes over labelled qubits; qubit `i` is bit `i` of the index,
/// qubits sorted by vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: Vec<VertexId>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `∏_{E} CZ |+⟩^⊗V`, qubit order = sorted vertex ids.
    pub fn of_graph(g: &Graph, cap: usize) -> Result<StateVector> {
        let n = g.vertex_count();
        if n > cap {
            return Err(Error::TooManyQubits { qubits: n, cap });
        }
        let qubits: Vec<VertexId> = g.vertices().collect();
        let pos: BTreeMap<VertexId, usize> = qubits.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let masks: Vec<usize> = g.edges().map(|(a, b)| (1 << pos[&a]) | (1 << pos[&b])).collect();
        let norm = (1u64 << n) as f64;
        let amp = 1.0 / norm.sqrt();
        let amps = (0..1usize << n)
            .map(|idx| {
                let odd = masks.iter().filter(|&&m| idx & m == m).count() % 2 == 1;
                Complex64::new(if odd { -amp } else { amp }, 0.0)
            })
            .collect();
        Ok(StateVector { qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[VertexId] {
        &self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn index_of(&self, v: VertexId) -> Result<usize> {
        self.qubits.binary_search(&v).map_err(|_| Error::UnknownVertex(v))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    fn normalize(&mut self) -> f64 {
        let n2 = self.norm_sqr();
        let s = 1.0 / n2.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= s);
        n2
    }

    pub fn apply_single(&mut self, qubit: usize, m: &Mat2) {
        let bit = 1 << qubit;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_pauli(&mut self, qubit: usize, p: Pauli) {
        self.apply_single(qubit, &pauli_matrix(p));
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let m = (1 << a) | (1 << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & m == m {
                *amp = -*amp;
            }
        }
    }

    pub fn apply_clifford(&mut self, qubit: usize, c: &Clifford) {
        self.apply_single(qubit, &clifford_matrix(c));
    }

    /// Applies `⊗ F_v` for every frame entry on a qubit of this state.
    pub fn apply_frame(&mut self, frame: &CorrectionFrame) -> Result<()> {
        for (v, c) in frame.iter() {
            let q = self.index_of(v)?;
            self.apply_clifford(q, &c);
        }
        Ok(())
    }

    /// Projects onto the `outcome` eigenspace of `obs` on `qubit` and
    /// renormalises. Returns the post-state and the outcome probability.
    pub fn project(&self, qubit: usize, obs: SignedPauli, outcome: Outcome) -> Result<(StateVector, f64)> {
        if qubit >= self.n_qubits() {
            return Err(Error::SizeMismatch(qubit, self.n_qubits()));
        }
        let mut applied = self.clone();
        applied.apply_pauli(qubit, obs.pauli);
        // (I + s P) / 2 with s = ±1 folded from outcome and the observable sign
        let s = if outcome.is_minus() ^ obs.negative { -0.5 } else { 0.5 };
        let mut out = self.clone();
        for (o, a) in out.amps.iter_mut().zip(&applied.amps) {
            *o = *o * 0.5 + a * s;
        }
        let p = out.norm_sqr();
        if p < 1e-12 {
            return Err(Error::ImpossibleOutcome { probability: p });
        }
        out.normalize();
        Ok((out, p))
    }

    /// Contracts `qubit` with the `outcome` eigenvector of `obs`, removing it.
    /// Returns the normalised remainder and the outcome probability.
    pub fn measure_out(&self, v: VertexId, obs: SignedPauli, outcome: Outcome) -> Result<(StateVector, f64)> {
        let q = self.index_of(v)?;
        let e = eigenvector(obs.pauli, outcome.is_minus() == obs.negative);
        let bit = 1usize << q;
        let low = bit - 1;
        let amps: Vec<Complex64> = (0..self.amps.len() / 2)
            .map(|r| {
                let i0 = (r & low) | ((r & !low) << 1);
                e[0].conj() * self.amps[i0] + e[1].conj() * self.amps[i0 | bit]
            })
            .collect();
        let mut qubits = self.qubits.clone();
        qubits.remove(q);
        let mut out = StateVector { qubits, amps };
        let p = out.norm_sqr();
        if p < 1e-12 {
            return Err(Error::ImpossibleOutcome { probability: p });
        }
        out.normalize();
        Ok((out, p))
    }

    /// `⟨ψ| P |ψ⟩` for a Pauli string over vertex labels.
    pub fn expectation(&self, ops: &[(VertexId, Pauli)]) -> Result<f64> {
        let mut applied = self.clone();
        for &(v, p) in ops {
            applied.apply_pauli(self.index_of(v)?, p);
        }
        let inner: Complex64 = self.amps.iter().zip(&applied.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(inner.re)
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::SizeMismatch(self.n_qubits(), other.n_qubits()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Schmidt rank across `subset | rest`, by Gaussian elimination with tolerance.
    pub fn schmidt_rank(&self, subset: &BTreeSet<VertexId>) -> Result<usize> {
        let (mut rows_q, mut cols_q) = (Vec::new(), Vec::new());
        for (i, v) in self.qubits.iter().enumerate() {
            if subset.contains(v) {
                rows_q.push(i);
            } else {
                cols_q.push(i);
            }
        }
        let spread = |bits: usize, qs: &[usize]| qs.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((bits >> k) & 1) << q));
        let (nr, nc) = (1usize << rows_q.len(), 1usize << cols_q.len());
        let mut m: Vec<Vec<Complex64>> = (0..nr)
            .map(|r| (0..nc).map(|c| self.amps[spread(r, &rows_q) | spread(c, &cols_q)]).collect())
            .collect();
        let mut rank = 0;
        for col in 0..nc {
            let Some(piv) = (rank..nr).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm())) else {
                break;
            };
            if m[piv][col].norm() < 1e-9 {
                continue;
            }
            m.swap(rank, piv);
            let pivot_row = m[rank].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank {
                    let f = row[col] / pivot_row[col];
                    if f.norm() > 0.0 {
                        row.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x -= f * p);
                    }
                }
            }
            rank += 1;
        }
        Ok(rank)
    }
}

/// `|⟨a|b⟩| ≥ 1 - tol`.
pub fn equal_up_to_global_phase(a: &StateVector, b: &StateVector, tol: f64) -> Result<bool> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::SizeMismatch(a.n_qubits(), b.n_qubits()));
    }
    Ok(a.inner(b)?.norm() >= 1.0 - tol)
}

/// Projective measurement of a bare basis on qubit index `qubit`.
pub fn project_measure(sv: &StateVector, qubit: usize, basis: Basis, outcome: Outcome) -> Result<(StateVector, f64)> {
    sv.project(qubit, SignedPauli::plus(basis.pauli()), outcome)
}

/// A physical single-qubit measurement: observable and the observed eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhysicalMeasurement {
    pub vertex: VertexId,
    pub observable: SignedPauli,
    pub outcome: Outcome,
}

/// Builds `|G⟩` qubit by qubit and measures each listed qubit out as soon as
/// all of its CZ partners exist. Projectors on distinct qubits commute, so
/// the result equals measuring the full state; the live register stays small
/// on lattice graphs. Returns the state on the unmeasured vertices and the
/// joint outcome probability.
pub fn simulate_measurements(
    g: &Graph,
    measurements: &[PhysicalMeasurement],
    cap: usize,
) -> Result<(StateVector, f64)> {
    let mut pending: BTreeMap<VertexId, PhysicalMeasurement> = BTreeMap::new();
    for m in measurements {
        g.require(m.vertex)?;
        if pending.insert(m.vertex, *m).is_some() {
            return Err(Error::DuplicateVertex(m.vertex));
        }
    }
    let last_partner: BTreeMap<VertexId, VertexId> = g
        .vertices()
        .map(|v| (v, g.neighbors(v).unwrap().iter().copied().chain([v]).max().unwrap()))
        .collect();

    let mut state = StateVector { qubits: Vec::new(), amps: vec![ONE] };
    let mut probability = 1.0;
    for v in g.vertices() {
        // v exceeds every live label, so it becomes the top bit.
        let n = state.n_qubits();
        if n + 1 > cap {
            return Err(Error::TooManyQubits { qubits: n + 1, cap });
        }
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let mut amps = Vec::with_capacity(state.amps.len() * 2);
        amps.extend(state.amps.iter().map(|a| a * s));
        amps.extend(state.amps.iter().map(|a| a * s));
        state.amps = amps;
        state.qubits.push(v);
        for &u in g.neighbors(v)?.range(..v) {
            let qu = state.index_of(u)?;
            state.apply_cz(qu, n);
        }
        let ready: Vec<VertexId> = pending
            .keys()
            .copied()
            .filter(|w| *w <= v && last_partner[w] <= v)
            .collect();
        for w in ready {
            let m = pending.remove(&w).unwrap();
            let (next, p) = state.measure_out(w, m.observable, m.outcome)?;
            state = next;
            probability *= p;
        }
    }
    Ok((state, probability))
}
