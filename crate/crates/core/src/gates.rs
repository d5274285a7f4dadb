//! Gate set, depth-one layers, and circuits.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{check_permutation, RingMatrix};
use crate::ring::RingScalar;

/// Largest register the one-byte layer encoding can describe.
pub const MAX_QUBITS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SingleGate {
    I,
    H,
    P,
    Pdg,
    T,
    Tdg,
}

impl SingleGate {
    pub const ALL: [SingleGate; 6] = [Self::I, Self::H, Self::P, Self::Pdg, Self::T, Self::Tdg];

    pub fn inverse(self) -> Self {
        match self {
            Self::P => Self::Pdg,
            Self::Pdg => Self::P,
            Self::T => Self::Tdg,
            Self::Tdg => Self::T,
            g => g,
        }
    }

    /// Exponent `k` for the diagonal gates `diag(1, ω^k)`.
    pub fn phase_power(self) -> Option<u8> {
        match self {
            Self::I => Some(0),
            Self::P => Some(2),
            Self::Pdg => Some(6),
            Self::T => Some(1),
            Self::Tdg => Some(7),
            Self::H => None,
        }
    }

    pub fn is_t(self) -> bool {
        matches!(self, Self::T | Self::Tdg)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::H => "H",
            Self::P => "P",
            Self::Pdg => "PDG",
            Self::T => "T",
            Self::Tdg => "TDG",
        }
    }

    pub fn matrix(self) -> RingMatrix {
        let z = RingScalar::ZERO;
        let entries = match self.phase_power() {
            Some(k) => vec![RingScalar::ONE, z, z, RingScalar::omega_pow(k)],
            None => {
                let r = RingScalar::INV_SQRT2;
                vec![r, r, r, -r]
            }
        };
        RingMatrix::from_entries(1, entries).expect("2x2")
    }

    fn code(self) -> u8 {
        self as u8
    }

    fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    Single(SingleGate, usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn wires(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Single(_, q) => (q, None),
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            Gate::Single(g, q) => Gate::Single(g.inverse(), q),
            cx => cx,
        }
    }

    pub fn is_t(&self) -> bool {
        matches!(self, Gate::Single(g, _) if g.is_t())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Single(g, q) => write!(f, "{} {q}", g.name()),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateSetId {
    CliffordT = 0,
    CliffordOnly = 1,
}

#[derive(Clone, Debug)]
pub struct GateInfo {
    pub name: &'static str,
    pub arity: usize,
    pub matrix: RingMatrix,
    pub inverse: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GateSet {
    pub id: GateSetId,
}

impl GateSet {
    pub const CLIFFORD_T: Self = Self { id: GateSetId::CliffordT };
    pub const CLIFFORD: Self = Self { id: GateSetId::CliffordOnly };

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Self::CLIFFORD_T),
            1 => Some(Self::CLIFFORD),
            _ => None,
        }
    }

    pub fn singles(&self) -> &'static [SingleGate] {
        match self.id {
            GateSetId::CliffordT => &SingleGate::ALL,
            GateSetId::CliffordOnly => &SingleGate::ALL[..4],
        }
    }

    pub fn contains(&self, g: &Gate) -> bool {
        match g {
            Gate::Single(s, _) => self.singles().contains(s),
            Gate::Cnot { .. } => true,
        }
    }

    pub fn gates(&self) -> Vec<GateInfo> {
        let mut out: Vec<GateInfo> = self.singles()[1..]
            .iter()
            .map(|g| GateInfo {
                name: g.name(),
                arity: 1,
                matrix: g.matrix(),
                inverse: g.inverse().name(),
            })
            .collect();
        let cx = Layer::from_gates(2, &[Gate::Cnot { control: 0, target: 1 }]).expect("cnot");
        out.push(GateInfo { name: "CNOT", arity: 2, matrix: cx.matrix(), inverse: "CNOT" });
        out
    }
}

/// What one wire does during a layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Single(SingleGate),
    Control(usize),
    Target(usize),
}

/// A depth-one time slice, stored in its one-byte-per-wire encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Layer {
    bytes: Vec<u8>,
}

fn encode_slot(s: Slot) -> u8 {
    match s {
        Slot::Single(g) => g.code(),
        Slot::Control(p) => 6 | ((p as u8 + 1) << 4),
        Slot::Target(p) => 7 | ((p as u8 + 1) << 4),
    }
}

fn decode_slot(b: u8) -> Option<Slot> {
    let partner = (b >> 4) as usize;
    match b & 0xf {
        6 if partner > 0 => Some(Slot::Control(partner - 1)),
        7 if partner > 0 => Some(Slot::Target(partner - 1)),
        c if partner == 0 => SingleGate::from_code(c).map(Slot::Single),
        _ => None,
    }
}

impl Layer {
    pub fn identity(n: usize) -> Self {
        Self { bytes: vec![0; n] }
    }

    /// Validates an encoded layer.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let n = bytes.len();
        if n > MAX_QUBITS {
            return Err(Error::Circuit(format!("{n} qubits exceed the layer encoding")));
        }
        for (q, &b) in bytes.iter().enumerate() {
            let bad = || Error::Format(format!("bad layer byte {b:#04x} on wire {q}"));
            match decode_slot(b).ok_or_else(bad)? {
                Slot::Control(p) if p >= n || bytes[p] != encode_slot(Slot::Target(q)) => {
                    return Err(bad())
                }
                Slot::Target(p) if p >= n || bytes[p] != encode_slot(Slot::Control(q)) => {
                    return Err(bad())
                }
                _ => {}
            }
        }
        Ok(Self { bytes: bytes.to_vec() })
    }

    pub(crate) fn from_bytes_unchecked(bytes: &[u8]) -> Self {
        Self { bytes: bytes.to_vec() }
    }

    /// Places gates that act on pairwise disjoint wires into one layer.
    pub fn from_gates(n: usize, gates: &[Gate]) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::Circuit(format!("{n} qubits exceed the layer encoding")));
        }
        let mut used = vec![false; n];
        let mut bytes = vec![0u8; n];
        let claim = |q: usize, used: &mut Vec<bool>| -> Result<()> {
            if q >= n {
                return Err(Error::Circuit(format!("wire {q} out of range for {n} qubits")));
            }
            if std::mem::replace(&mut used[q], true) {
                return Err(Error::Circuit(format!("wire {q} used twice in one layer")));
            }
            Ok(())
        };
        for g in gates {
            match *g {
                Gate::Single(s, q) => {
                    claim(q, &mut used)?;
                    bytes[q] = encode_slot(Slot::Single(s));
                }
                Gate::Cnot { control, target } => {
                    claim(control, &mut used)?;
                    claim(target, &mut used)?;
                    bytes[control] = encode_slot(Slot::Control(target));
                    bytes[target] = encode_slot(Slot::Target(control));
                }
            }
        }
        Ok(Self { bytes })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.bytes.len()
    }

    #[inline]
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn slot(&self, q: usize) -> Slot {
        decode_slot(self.bytes[q]).expect("validated layer")
    }

    /// Gates in wire order; a CNOT is listed once, at its control.
    pub fn gates(&self) -> Vec<Gate> {
        (0..self.n_qubits())
            .filter_map(|q| match self.slot(q) {
                Slot::Single(SingleGate::I) | Slot::Target(_) => None,
                Slot::Single(g) => Some(Gate::Single(g, q)),
                Slot::Control(t) => Some(Gate::Cnot { control: q, target: t }),
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.bytes.iter().all(|&b| b == 0)
    }

    pub fn has_t(&self) -> bool {
        self.bytes.iter().any(|&b| b == 4 || b == 5)
    }

    pub fn gate_count(&self) -> usize {
        self.bytes.iter().filter(|&&b| b != 0 && b & 0xf != 7).count()
    }

    pub fn inverse(&self) -> Self {
        Self { bytes: self.bytes.iter().map(|&b| inverse_byte(b)).collect() }
    }

    /// Moves the gate on wire `q` to wire `perm[q]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut bytes = vec![0u8; self.n_qubits()];
        relabel_bytes(&self.bytes, perm, &mut bytes);
        Self { bytes }
    }

    pub fn matrix(&self) -> RingMatrix {
        let mut m = RingMatrix::identity(self.n_qubits());
        self.apply_left(&mut m);
        m
    }

    /// `m ← L·m` by row operations.
    pub fn apply_left(&self, m: &mut RingMatrix) {
        self.apply(m, true)
    }

    /// `m ← m·L` by column operations.
    pub fn apply_right(&self, m: &mut RingMatrix) {
        self.apply(m, false)
    }

    fn apply(&self, m: &mut RingMatrix, left: bool) {
        apply_bytes(&self.bytes, m, left)
    }
}

pub(crate) fn inverse_byte(b: u8) -> u8 {
    match b {
        2 => 3,
        3 => 2,
        4 => 5,
        5 => 4,
        b => b,
    }
}

pub(crate) fn relabel_bytes(src: &[u8], perm: &[usize], out: &mut [u8]) {
    for (q, &b) in src.iter().enumerate() {
        out[perm[q]] = match b & 0xf {
            6 | 7 => (b & 0xf) | ((perm[(b >> 4) as usize - 1] as u8 + 1) << 4),
            _ => b,
        };
    }
}

pub(crate) fn apply_bytes(bytes: &[u8], m: &mut RingMatrix, left: bool) {
    let n = bytes.len();
    debug_assert_eq!(n, m.n_qubits());
    let dim = 1usize << n;
    // entry (r, j) of the row-major matrix, or (j, r) when acting on columns
    let (rs, cs) = if left { (dim, 1) } else { (1, dim) };
    let e = m.entries_mut();
    for q in 0..n {
        let bit = 1usize << (n - 1 - q);
        match decode_slot(bytes[q]).expect("validated layer") {
            Slot::Single(SingleGate::I) | Slot::Target(_) => {}
            Slot::Single(SingleGate::H) => {
                for r0 in (0..dim).filter(|r| r & bit == 0) {
                    let r1 = r0 | bit;
                    for j in 0..dim {
                        let (i0, i1) = (r0 * rs + j * cs, r1 * rs + j * cs);
                        let (x, y) = (e[i0], e[i1]);
                        e[i0] = x.add_div_sqrt2(y);
                        e[i1] = x.sub_div_sqrt2(y);
                    }
                }
            }
            Slot::Single(g) => {
                let k = g.phase_power().expect("diagonal");
                for r1 in (0..dim).filter(|r| r & bit != 0) {
                    for j in 0..dim {
                        let i = r1 * rs + j * cs;
                        e[i] = e[i].mul_omega(k);
                    }
                }
            }
            Slot::Control(t) => {
                let tbit = 1usize << (n - 1 - t);
                for r in (0..dim).filter(|r| r & bit != 0 && r & tbit == 0) {
                    for j in 0..dim {
                        e.swap(r * rs + j * cs, (r | tbit) * rs + j * cs);
                    }
                }
            }
        }
    }
}

/// Every layer over `gs` on `n` wires, identity included, in a fixed order.
pub fn enumerate_layers(n: usize, gs: GateSet) -> Result<Vec<Layer>> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Circuit(format!("cannot enumerate layers on {n} qubits")));
    }
    fn rec(q: usize, bytes: &mut Vec<u8>, assigned: &mut Vec<bool>, gs: GateSet, out: &mut Vec<Layer>) {
        let n = bytes.len();
        if q == n {
            out.push(Layer { bytes: bytes.clone() });
            return;
        }
        if assigned[q] {
            rec(q + 1, bytes, assigned, gs, out);
            return;
        }
        for &g in gs.singles() {
            bytes[q] = encode_slot(Slot::Single(g));
            rec(q + 1, bytes, assigned, gs, out);
        }
        for r in q + 1..n {
            if assigned[r] {
                continue;
            }
            assigned[r] = true;
            for (a, b) in [(Slot::Control(r), Slot::Target(q)), (Slot::Target(r), Slot::Control(q))] {
                bytes[q] = encode_slot(a);
                bytes[r] = encode_slot(b);
                rec(q + 1, bytes, assigned, gs, out);
            }
            bytes[r] = 0;
            assigned[r] = false;
        }
        bytes[q] = 0;
    }
    let mut out = Vec::new();
    rec(0, &mut vec![0; n], &mut vec![false; n], gs, &mut out);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    n_qubits: usize,
    n_ancillas: usize,
    layers: Vec<Layer>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, n_ancillas: 0, layers: Vec::new() }
    }

    pub fn from_layers(n_qubits: usize, layers: Vec<Layer>) -> Result<Self> {
        if let Some(l) = layers.iter().find(|l| l.n_qubits() != n_qubits) {
            return Err(Error::Circuit(format!(
                "{}-wire layer in a {n_qubits}-wire circuit",
                l.n_qubits()
            )));
        }
        Ok(Self { n_qubits, n_ancillas: 0, layers })
    }

    /// ASAP scheduling of a gate list: each gate goes in the layer after the
    /// last one that touches any of its wires.
    pub fn schedule(n_qubits: usize, gates: &[Gate]) -> Result<Self> {
        let mut front = vec![0usize; n_qubits];
        let mut slots: Vec<Vec<Gate>> = Vec::new();
        for g in gates {
            let (a, b) = g.wires();
            for w in std::iter::once(a).chain(b) {
                if w >= n_qubits {
                    return Err(Error::Circuit(format!("wire {w} out of range for {n_qubits} qubits")));
                }
            }
            if b == Some(a) {
                return Err(Error::Circuit(format!("CNOT with control equal to target on wire {a}")));
            }
            if matches!(g, Gate::Single(SingleGate::I, _)) {
                continue;
            }
            let d = b.map_or(front[a], |b| front[a].max(front[b]));
            if d == slots.len() {
                slots.push(Vec::new());
            }
            slots[d].push(*g);
            front[a] = d + 1;
            if let Some(b) = b {
                front[b] = d + 1;
            }
        }
        let layers = slots
            .iter()
            .map(|gs| Layer::from_gates(n_qubits, gs))
            .collect::<Result<_>>()?;
        Self::from_layers(n_qubits, layers)
    }

    pub fn with_ancillas(mut self, k: usize) -> Self {
        self.n_ancillas = k;
        self
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    pub fn n_ancillas(&self) -> usize {
        self.n_ancillas
    }

    #[inline]
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn push_layer(&mut self, layer: Layer) {
        assert_eq!(layer.n_qubits(), self.n_qubits);
        self.layers.push(layer);
    }

    /// Layers of `self` followed by layers of `other`.
    pub fn then(&self, other: &Circuit) -> Circuit {
        assert_eq!(self.n_qubits, other.n_qubits);
        let mut c = self.clone();
        c.layers.extend(other.layers.iter().cloned());
        c
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn gates(&self) -> Vec<Gate> {
        self.layers.iter().flat_map(Layer::gates).collect()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Layer::gate_count).sum()
    }

    pub fn t_depth(&self) -> usize {
        self.layers.iter().filter(|l| l.has_t()).count()
    }

    /// `(x_H, x_P, x_C, x_T)` with P/P† and T/T† merged.
    pub fn cost_vector(&self) -> [u64; 4] {
        let mut x = [0u64; 4];
        for g in self.gates() {
            let i = match g {
                Gate::Single(SingleGate::H, _) => 0,
                Gate::Single(SingleGate::P | SingleGate::Pdg, _) => 1,
                Gate::Cnot { .. } => 2,
                Gate::Single(SingleGate::T | SingleGate::Tdg, _) => 3,
                Gate::Single(SingleGate::I, _) => continue,
            };
            x[i] += 1;
        }
        x
    }

    /// Concatenated layer bytes, the tie-break order between equal-cost circuits.
    pub fn encoding(&self) -> Vec<u8> {
        self.layers.iter().flat_map(|l| l.bytes.iter().copied()).collect()
    }

    pub fn evaluate(&self) -> RingMatrix {
        let mut m = RingMatrix::identity(self.n_qubits);
        for l in &self.layers {
            l.apply_left(&mut m);
        }
        m
    }

    pub fn invert(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            n_ancillas: self.n_ancillas,
            layers: self.layers.iter().rev().map(Layer::inverse).collect(),
        }
    }

    pub fn relabel(&self, perm: &[usize]) -> Result<Circuit> {
        check_permutation(self.n_qubits, perm)?;
        Ok(Circuit {
            n_qubits: self.n_qubits,
            n_ancillas: self.n_ancillas,
            layers: self.layers.iter().map(|l| l.relabel(perm)).collect(),
        })
    }

    /// Re-runs ASAP scheduling over the flattened gate list.
    pub fn rescheduled(&self) -> Circuit {
        Circuit::schedule(self.n_qubits, &self.gates())
            .expect("gates of a valid circuit")
            .with_ancillas(self.n_ancillas)
    }

    /// Embeds into a wider register, wire `q` going to `wires[q]`.
    pub fn embed(&self, width: usize, wires: &[usize]) -> Result<Circuit> {
        let map = |g: Gate| match g {
            Gate::Single(s, q) => Gate::Single(s, wires[q]),
            Gate::Cnot { control, target } => Gate::Cnot { control: wires[control], target: wires[target] },
        };
        let layers = self
            .layers
            .iter()
            .map(|l| Layer::from_gates(width, &l.gates().into_iter().map(map).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Circuit::from_layers(width, layers)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn single(g: SingleGate, q: usize) -> Gate {
        Gate::Single(g, q)
    }

    fn cx(c: usize, t: usize) -> Gate {
        Gate::Cnot { control: c, target: t }
    }

    fn naive_layer_matrix(l: &Layer) -> RingMatrix {
        let n = l.n_qubits();
        RingMatrix::from_fn(n, |i, j| {
            let mut v = RingScalar::ONE;
            for q in 0..n {
                let b = n - 1 - q;
                let (ib, jb) = (i >> b & 1, j >> b & 1);
                let f = match l.slot(q) {
                    Slot::Single(g) => g.matrix().get(ib, jb),
                    Slot::Target(_) => continue,
                    Slot::Control(t) => {
                        let tb = n - 1 - t;
                        let (it, jt) = (i >> tb & 1, j >> tb & 1);
                        let ok = ib == jb && if ib == 1 { it != jt } else { it == jt };
                        if ok { RingScalar::ONE } else { RingScalar::ZERO }
                    }
                };
                v = v * f;
            }
            v
        })
    }

    #[test]
    fn layer_counts() {
        let counts: Vec<usize> = (1..=4)
            .map(|n| enumerate_layers(n, GateSet::CLIFFORD_T).unwrap().len())
            .collect();
        assert_eq!(counts, vec![6, 38, 252, 1740]);
        assert_eq!(enumerate_layers(2, GateSet::CLIFFORD).unwrap().len(), 18);
        assert!(enumerate_layers(15, GateSet::CLIFFORD_T).is_err());
    }

    #[test]
    fn count_formula() {
        // Σ_j (ordered disjoint pairs choosing j of them) · s^(n−2j)
        fn formula(n: usize, s: usize) -> usize {
            fn rec(n: usize, s: usize) -> usize {
                if n == 0 {
                    return 1;
                }
                let mut t = s * rec(n - 1, s);
                if n >= 2 {
                    t += 2 * (n - 1) * rec(n - 2, s);
                }
                t
            }
            rec(n, s)
        }
        for n in 1..=5 {
            assert_eq!(enumerate_layers(n, GateSet::CLIFFORD_T).unwrap().len(), formula(n, 6));
            assert_eq!(enumerate_layers(n, GateSet::CLIFFORD).unwrap().len(), formula(n, 4));
        }
    }

    #[test]
    fn layers_are_distinct_and_valid() {
        let ls = enumerate_layers(4, GateSet::CLIFFORD_T).unwrap();
        let set: std::collections::HashSet<_> = ls.iter().collect();
        assert_eq!(set.len(), ls.len());
        for l in &ls {
            assert_eq!(Layer::from_bytes(l.bytes()).unwrap(), *l);
        }
        assert!(ls[0].is_identity());
    }

    #[test]
    fn layer_matrices_match_tensor_construction_and_are_unitary() {
        for n in 1..=3 {
            for l in enumerate_layers(n, GateSet::CLIFFORD_T).unwrap() {
                let m = l.matrix();
                assert_eq!(m, naive_layer_matrix(&l), "{l:?}");
                assert!(m.matmul(&m.adjoint()).unwrap().is_identity());
                let mut r = RingMatrix::identity(n);
                l.apply_right(&mut r);
                assert_eq!(r, m);
            }
        }
    }

    #[test]
    fn cnot_is_textbook() {
        let m = Layer::from_gates(2, &[cx(0, 1)]).unwrap().matrix();
        let expect = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), RingScalar::from_int(expect[i][j]));
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        assert!(Circuit::new(2).evaluate().is_identity());
        let mut gates = Vec::new();
        for _ in 0..3 {
            gates.push(single(SingleGate::H, 0));
            gates.push(single(SingleGate::Pdg, 0));
        }
        let c = Circuit::schedule(1, &gates).unwrap();
        assert_eq!(c.depth(), 6);
        let phase = RingScalar::from_parts(0, 0, 0, -1, 0);
        assert_eq!(c.evaluate(), RingMatrix::identity(1).scale(phase));
    }

    #[test]
    fn invert_examples() {
        let c = Circuit::schedule(1, &[single(SingleGate::T, 0)]).unwrap();
        assert_eq!(c.invert().gates(), vec![single(SingleGate::Tdg, 0)]);
        let c = Circuit::schedule(2, &[single(SingleGate::H, 0), cx(0, 1)]).unwrap();
        assert_eq!(c.invert().gates(), vec![cx(0, 1), single(SingleGate::H, 0)]);
        assert_eq!(c.invert().invert(), c);
    }

    #[test]
    fn relabel_examples() {
        let c = Circuit::schedule(2, &[cx(0, 1)]).unwrap();
        assert_eq!(c.relabel(&[0, 1]).unwrap(), c);
        assert_eq!(c.relabel(&[1, 0]).unwrap().gates(), vec![cx(1, 0)]);
        assert_eq!(c.relabel(&[1, 0]).unwrap().depth(), 1);
    }

    #[test]
    fn schedule_examples() {
        use SingleGate::*;
        assert_eq!(Circuit::schedule(2, &[single(H, 0), single(H, 1)]).unwrap().depth(), 1);
        let c = Circuit::schedule(2, &[single(H, 0), cx(0, 1), single(H, 1)]).unwrap();
        assert_eq!(c.depth(), 3);
        assert!(Circuit::schedule(2, &[cx(0, 2)]).is_err());
        assert!(Circuit::schedule(2, &[cx(1, 1)]).is_err());
        // three-qubit QFT dependency shape, controlled phases drawn as CNOTs
        let qft = [
            single(H, 0),
            cx(1, 0),
            cx(2, 0),
            single(H, 1),
            cx(2, 1),
            single(H, 2),
        ];
        assert_eq!(Circuit::schedule(3, &qft).unwrap().depth(), 5);
    }

    #[test]
    fn t_depth_examples() {
        use SingleGate::*;
        let cliff = Circuit::schedule(2, &[single(H, 0), single(P, 1), cx(0, 1), single(Pdg, 0)]).unwrap();
        assert_eq!(cliff.t_depth(), 0);
        assert_eq!(Circuit::schedule(2, &[single(T, 0), single(T, 1)]).unwrap().t_depth(), 1);
        assert_eq!(Circuit::schedule(1, &[single(T, 0), single(H, 0), single(T, 0)]).unwrap().t_depth(), 2);
    }

    #[test]
    fn cost_vector_examples() {
        use SingleGate::*;
        assert_eq!(Circuit::new(2).cost_vector(), [0, 0, 0, 0]);
        let c = Circuit::schedule(2, &[single(H, 0), single(Pdg, 1), cx(0, 1), single(T, 0), single(Tdg, 1)]).unwrap();
        assert_eq!(c.cost_vector(), [1, 1, 1, 2]);
        assert_eq!(c.invert().cost_vector(), c.cost_vector());
    }

    #[test]
    fn bad_bytes_are_rejected() {
        assert!(Layer::from_bytes(&[0x16, 0x00]).is_err());
        assert!(Layer::from_bytes(&[0x26, 0x17]).is_ok());
        assert!(Layer::from_bytes(&[0x08]).is_err());
    }

    #[test]
    fn gate_set_is_closed_under_inverse() {
        for gs in [GateSet::CLIFFORD_T, GateSet::CLIFFORD] {
            let infos = gs.gates();
            for g in &infos {
                let inv = infos.iter().find(|h| h.name == g.inverse).unwrap();
                assert!(g.matrix.matmul(&inv.matrix).unwrap().is_identity());
            }
        }
    }

    pub(crate) fn arb_circuit(n: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
        let gate = (0usize..7, 0..n, 0..n).prop_map(move |(k, a, b)| {
            if k == 6 && a != b {
                cx(a, b)
            } else {
                single(SingleGate::ALL[k.min(5)], a)
            }
        });
        proptest::collection::vec(gate, 0..max_gates)
            .prop_map(move |gs| Circuit::schedule(n, &gs).unwrap())
    }

    proptest! {
        #[test]
        fn relabel_commutes_with_evaluate(c in arb_circuit(3, 12), p in 0usize..6) {
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let lhs = c.relabel(&perms[p]).unwrap().evaluate();
            prop_assert_eq!(lhs, c.evaluate().permute_qubits(&perms[p]).unwrap());
        }

        #[test]
        fn invert_is_adjoint(c in arb_circuit(3, 12)) {
            prop_assert_eq!(c.invert().evaluate(), c.evaluate().adjoint());
        }

        #[test]
        fn evaluated_circuits_are_unitary(c in arb_circuit(2, 20)) {
            let u = c.evaluate();
            prop_assert!(u.matmul(&u.adjoint()).unwrap().is_identity());
        }

        #[test]
        fn schedule_is_idempotent(c in arb_circuit(3, 15)) {
            prop_assert_eq!(c.rescheduled(), c.clone());
        }
    }
}
