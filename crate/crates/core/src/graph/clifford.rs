use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `(k, r)` with `self * other = i^k r`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn commutes(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }

    /// `(x, z)` bits of the symplectic representation.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(c)
    }
}

/// A Hermitian single-qubit Pauli with a sign, `±P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPauli {
    pub negative: bool,
    pub pauli: Pauli,
}

impl SignedPauli {
    pub const fn plus(pauli: Pauli) -> Self {
        SignedPauli { negative: false, pauli }
    }

    pub const fn minus(pauli: Pauli) -> Self {
        SignedPauli { negative: true, pauli }
    }

    pub fn negate(self) -> Self {
        SignedPauli { negative: !self.negative, ..self }
    }

    /// Product of two anticommuting Paulis times `i^extra`; the result must be Hermitian.
    fn product_times_i(self, other: SignedPauli, extra: u8) -> SignedPauli {
        let (k, r) = self.pauli.mul(other.pauli);
        let total = (k + extra) % 4;
        debug_assert!(total.is_multiple_of(2), "non-Hermitian product");
        let negative = self.negative ^ other.negative ^ (total == 2);
        SignedPauli { negative, pauli: r }
    }
}

impl fmt::Display for SignedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negative { "-" } else { "+" }, self.pauli)
    }
}

/// Single-qubit Clifford, stored as its conjugation action `C X C†`, `C Z C†`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Clifford {
    pub x: SignedPauli,
    pub z: SignedPauli,
}

impl Default for Clifford {
    fn default() -> Self {
        Clifford::IDENTITY
    }
}

impl Clifford {
    pub const IDENTITY: Clifford = Clifford { x: SignedPauli::plus(Pauli::X), z: SignedPauli::plus(Pauli::Z) };
    pub const H: Clifford = Clifford { x: SignedPauli::plus(Pauli::Z), z: SignedPauli::plus(Pauli::X) };
    pub const S: Clifford = Clifford { x: SignedPauli::plus(Pauli::Y), z: SignedPauli::plus(Pauli::Z) };

    /// Pauli operator `P` itself as a Clifford (conjugation flips anticommuting axes).
    pub fn pauli(p: Pauli) -> Clifford {
        let flip = |q: Pauli| SignedPauli { negative: !p.commutes(q), pauli: q };
        Clifford { x: flip(Pauli::X), z: flip(Pauli::Z) }
    }

    /// `exp(±iπ/4 P)`, written `√(±iP)`.
    pub fn sqrt_pauli(p: Pauli, positive: bool) -> Clifford {
        let rot = |q: Pauli| {
            let q = SignedPauli::plus(q);
            if p.commutes(q.pauli) {
                q
            } else {
                SignedPauli::plus(p).product_times_i(q, if positive { 1 } else { 3 })
            }
        };
        Clifford { x: rot(Pauli::X), z: rot(Pauli::Z) }
    }

    /// `C P C†`.
    pub fn conjugate(&self, p: SignedPauli) -> SignedPauli {
        let img = match p.pauli {
            Pauli::I => SignedPauli::plus(Pauli::I),
            Pauli::X => self.x,
            Pauli::Z => self.z,
            // Y = iXZ
            Pauli::Y => self.x.product_times_i(self.z, 1),
        };
        if p.negative {
            img.negate()
        } else {
            img
        }
    }

    pub fn inverse(&self) -> Clifford {
        *Self::group()
            .iter()
            .find(|c| *self * **c == Clifford::IDENTITY)
            .expect("single-qubit Clifford group is closed")
    }

    pub fn is_identity(&self) -> bool {
        *self == Clifford::IDENTITY
    }

    /// All 24 elements (modulo phase), identity first.
    pub fn group() -> Vec<Clifford> {
        let mut out = vec![Clifford::IDENTITY];
        let mut i = 0;
        while i < out.len() {
            for g in [Clifford::H, Clifford::S] {
                let c = g * out[i];
                if !out.contains(&c) {
                    out.push(c);
                }
            }
            i += 1;
        }
        out
    }
}

/// Operator product: `(a * b) P (a * b)† = a (b P b†) a†`.
impl Mul for Clifford {
    type Output = Clifford;

    fn mul(self, rhs: Clifford) -> Clifford {
        Clifford { x: self.conjugate(rhs.x), z: self.conjugate(rhs.z) }
    }
}

impl fmt::Display for Clifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X->{} Z->{}", self.x, self.z)
    }
}

/// Per-vertex local Clifford byproducts. Missing entries are identity.
///
/// The physical state is `(⊗_v F_v) |G⟩`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionFrame {
    ops: BTreeMap<VertexId, Clifford>,
}

impl CorrectionFrame {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn get(&self, v: VertexId) -> Clifford {
        self.ops.get(&v).copied().unwrap_or_default()
    }

    pub fn set(&mut self, v: VertexId, c: Clifford) {
        if c.is_identity() {
            self.ops.remove(&v);
        } else {
            self.ops.insert(v, c);
        }
    }

    /// `F_v ← F_v · c`.
    pub fn push(&mut self, v: VertexId, c: Clifford) {
        let next = self.get(v) * c;
        self.set(v, next);
    }

    pub fn remove(&mut self, v: VertexId) -> Clifford {
        self.ops.remove(&v).unwrap_or_default()
    }

    /// Per-vertex product `self_v · other_v`.
    pub fn compose(&self, other: &CorrectionFrame) -> CorrectionFrame {
        let mut out = self.clone();
        for (&v, c) in &other.ops {
            out.push(v, *c);
        }
        out
    }

    pub fn inverse(&self) -> CorrectionFrame {
        CorrectionFrame { ops: self.ops.iter().map(|(v, c)| (*v, c.inverse())).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    /// Non-identity entries.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Clifford)> + '_ {
        self.ops.iter().map(|(v, c)| (*v, *c))
    }
}
