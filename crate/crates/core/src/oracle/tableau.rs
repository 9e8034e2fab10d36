use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Clifford, CorrectionFrame, Graph, Outcome, Pauli, SignedPauli, VertexId};

/// Pauli string in symplectic form: bit-packed `x` and `z` plus a sign.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Row {
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

impl Row {
    fn identity(words: usize) -> Row {
        Row { x: vec![0; words], z: vec![0; words], negative: false }
    }

    fn get(&self, q: usize) -> Pauli {
        let (w, b) = (q / 64, q % 64);
        match ((self.x[w] >> b) & 1, (self.z[w] >> b) & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    fn set(&mut self, q: usize, p: Pauli) {
        let (w, b) = (q / 64, q % 64);
        let (x, z) = p.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    fn anticommutes(&self, other: &Row) -> bool {
        let mut parity = 0;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones() & 1;
        }
        parity == 1
    }

    /// `self ← other · self`, tracking the sign exactly for commuting rows.
    fn absorb(&mut self, other: &Row) {
        let (mut plus, mut minus) = (0u32, 0u32);
        for w in 0..self.x.len() {
            let (x1, z1, x2, z2) = (other.x[w], other.z[w], self.x[w], self.z[w]);
            plus += ((x1 & z1 & z2 & !x2) | (x1 & !z1 & z2 & x2) | (!x1 & z1 & x2 & !z2)).count_ones();
            minus += ((x1 & z1 & x2 & !z2) | (x1 & !z1 & z2 & !x2) | (!x1 & z1 & x2 & z2)).count_ones();
            self.x[w] ^= x1;
            self.z[w] ^= z1;
        }
        let phase = (2 * (self.negative as u32) + 2 * (other.negative as u32) + plus + 3 * minus) % 4;
        self.negative = phase == 2;
    }
}

/// Stabilizer tableau with destabilizers, over labelled qubits.
#[derive(Debug, Clone)]
pub struct Tableau {
    qubits: BTreeMap<VertexId, usize>,
    labels: Vec<VertexId>,
    /// `0..n` destabilizers, `n..2n` stabilizers.
    rows: Vec<Row>,
}

impl Tableau {
    /// Tableau of `|G⟩`: stabilizers `X_a ∏_{N_a} Z`, destabilizers `Z_a`.
    pub fn of_graph(g: &Graph) -> Tableau {
        let labels: Vec<VertexId> = g.vertices().collect();
        let qubits: BTreeMap<VertexId, usize> = labels.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let n = labels.len();
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![Row::identity(words); 2 * n];
        for (i, v) in labels.iter().enumerate() {
            rows[i].set(i, Pauli::Z);
            rows[n + i].set(i, Pauli::X);
            for u in g.neighbors(*v).unwrap() {
                rows[n + i].set(qubits[u], Pauli::Z);
            }
        }
        Tableau { qubits, labels, rows }
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    fn words(&self) -> usize {
        self.rows.first().map_or(1, |r| r.x.len())
    }

    fn row_of(&self, ops: &[(VertexId, Pauli)], negative: bool) -> Result<Row> {
        let mut row = Row::identity(self.words());
        row.negative = negative;
        for &(v, p) in ops {
            let q = *self.qubits.get(&v).ok_or(Error::UnknownVertex(v))?;
            let (k, r) = row.get(q).mul(p);
            debug_assert!(k == 0, "repeated qubit in Pauli string");
            row.set(q, r);
        }
        Ok(row)
    }

    /// Stabilizer generators as Pauli strings (identity factors omitted).
    pub fn generators(&self) -> Vec<(Vec<(VertexId, Pauli)>, bool)> {
        let n = self.n_qubits();
        self.rows[n..]
            .iter()
            .map(|r| {
                let ops = (0..n).filter_map(|q| Some((self.labels[q], r.get(q))).filter(|(_, p)| *p != Pauli::I)).collect();
                (ops, r.negative)
            })
            .collect()
    }

    /// `Some(sign)` if `±P` is in the stabilizer group, `None` if random.
    fn eigenvalue(&self, p: &Row) -> Option<bool> {
        let n = self.n_qubits();
        if self.rows[n..].iter().any(|r| r.anticommutes(p)) {
            return None;
        }
        let mut acc = Row::identity(self.words());
        for i in 0..n {
            if self.rows[i].anticommutes(p) {
                acc.absorb(&self.rows[n + i]);
            }
        }
        debug_assert!(acc.x == p.x && acc.z == p.z);
        Some(acc.negative != p.negative)
    }

    /// True iff the state is a `+1` eigenstate of `±P`.
    pub fn stabilizes(&self, ops: &[(VertexId, Pauli)], negative: bool) -> Result<bool> {
        let row = self.row_of(ops, negative)?;
        Ok(self.eigenvalue(&row) == Some(false))
    }

    /// Probability of `outcome` for the observable `±P`: 1/2, 1 or 0.
    pub fn probability(&self, ops: &[(VertexId, Pauli)], negative: bool, outcome: Outcome) -> Result<f64> {
        let row = self.row_of(ops, negative)?;
        Ok(match self.eigenvalue(&row) {
            None => 0.5,
            Some(minus) if minus == outcome.is_minus() => 1.0,
            Some(_) => 0.0,
        })
    }

    /// Projects onto the `outcome` eigenspace of the Pauli string `±P`.
    pub fn measure(&mut self, ops: &[(VertexId, Pauli)], negative: bool, outcome: Outcome) -> Result<()> {
        let mut row = self.row_of(ops, negative)?;
        let n = self.n_qubits();
        let Some(p) = (n..2 * n).find(|&i| self.rows[i].anticommutes(&row)) else {
            return match self.eigenvalue(&row) {
                Some(minus) if minus == outcome.is_minus() => Ok(()),
                _ => Err(Error::ImpossibleOutcome { probability: 0.0 }),
            };
        };
        let pivot = self.rows[p].clone();
        for i in 0..2 * n {
            if i != p && self.rows[i].anticommutes(&row) {
                self.rows[i].absorb(&pivot);
            }
        }
        self.rows[p - n] = pivot;
        row.negative ^= outcome.is_minus();
        self.rows[p] = row;
        Ok(())
    }

    /// Measures a single-qubit observable on `v`.
    pub fn measure_single(&mut self, v: VertexId, obs: SignedPauli, outcome: Outcome) -> Result<()> {
        self.measure(&[(v, obs.pauli)], obs.negative, outcome)
    }

    /// Conjugates every row by `c` on qubit `v`.
    pub fn apply_clifford(&mut self, v: VertexId, c: &Clifford) -> Result<()> {
        let q = *self.qubits.get(&v).ok_or(Error::UnknownVertex(v))?;
        for row in &mut self.rows {
            let img = c.conjugate(SignedPauli::plus(row.get(q)));
            row.set(q, img.pauli);
            row.negative ^= img.negative;
        }
        Ok(())
    }

    pub fn apply_frame(&mut self, frame: &CorrectionFrame) -> Result<()> {
        for (v, c) in frame.iter() {
            self.apply_clifford(v, &c)?;
        }
        Ok(())
    }
}

/// Whether `(⊗ F_v) |G⟩` is stabilized by this tableau restricted to the
/// vertices of `g`: every frame-conjugated graph generator must be a `+1`
/// stabilizer. Qubits of the tableau outside `g` must be measured already.
pub fn stabilizes_framed_graph(t: &Tableau, g: &Graph, frame: &CorrectionFrame) -> Result<bool> {
    for a in g.vertices() {
        let mut ops = Vec::new();
        let mut negative = false;
        let conj = |v: VertexId, p: Pauli| frame.get(v).conjugate(SignedPauli::plus(p));
        let xa = conj(a, Pauli::X);
        negative ^= xa.negative;
        ops.push((a, xa.pauli));
        for &b in g.neighbors(a)? {
            let zb = conj(b, Pauli::Z);
            negative ^= zb.negative;
            ops.push((b, zb.pauli));
        }
        if !t.stabilizes(&ops, negative)? {
            return Ok(false);
        }
    }
    Ok(true)
}
