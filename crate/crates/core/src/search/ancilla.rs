//! Meet-in-the-middle search with ancillas prepared and returned in |0⟩.
//!
//! Ancillas are the last `m` wires. A circuit `C = A·B` implements `U` when
//! the columns of `C` indexed by basis states with all ancilla bits clear
//! equal those of `U ⊗ I` up to a global phase, i.e. when those columns of
//! `B` match those of `A†(U ⊗ I)`. Records of a full-mode database are indexed
//! by a digest of their phase-normalized ancilla-zero columns.

use rayon::prelude::*;

use crate::db::{CircuitDatabase, DbMode, KeyMap};
use crate::error::{Error, Result};
use crate::gates::Circuit;
use crate::matrix::{fingerprint_entries, RingMatrix};
use crate::ring::RingScalar;

use super::{circuit_from_bytes, left_apply_record, Found, SearchResult};

/// What an ancilla search minimizes first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Depth, then T-depth, gate count, encoding.
    Depth,
    /// T-depth, then depth, gate count, encoding.
    TDepth,
}

impl Objective {
    fn order(self, f: &Found) -> (usize, usize, usize, Vec<u8>) {
        let (d, t, gc, enc) = f.depth_order();
        match self {
            Objective::Depth => (d, t, gc, enc),
            Objective::TDepth => (t, d, gc, enc),
        }
    }

    fn record_order(self, depth: usize, t_depth: usize, gc: usize) -> (usize, usize, usize) {
        match self {
            Objective::Depth => (depth, t_depth, gc),
            Objective::TDepth => (t_depth, depth, gc),
        }
    }
}

/// Ancilla-zero columns of `u`, row-major, multiplied by the conjugate of
/// the first nonzero entry.
fn zero_columns(u: &RingMatrix, m: usize) -> Vec<RingScalar> {
    let dim = u.dim();
    let stride = 1usize << m;
    let mut out = Vec::with_capacity(dim * dim / stride);
    for r in 0..dim {
        for c in (0..dim).step_by(stride) {
            out.push(u.get(r, c));
        }
    }
    if let Some(m0) = out.iter().find(|e| !e.is_zero()).map(|e| e.conj()) {
        out.iter_mut().for_each(|e| *e = *e * m0);
    }
    out
}

fn column_key(u: &RingMatrix, m: usize) -> u128 {
    fingerprint_entries(u.n_qubits(), &zero_columns(u, m))
}

/// `Some(k)` when `u` agrees with `ω^k · target` on the ancilla-zero columns.
pub fn ancilla_phase(u: &RingMatrix, target: &RingMatrix, m: usize) -> Option<u8> {
    if u.n_qubits() != target.n_qubits() {
        return None;
    }
    let stride = 1usize << m;
    let dim = u.dim();
    let cols = || (0..dim).flat_map(move |r| (0..dim).step_by(stride).map(move |c| (r, c)));
    let (r0, c0) = cols().find(|&(r, c)| !target.get(r, c).is_zero())?;
    let k = u.get(r0, c0).phase_relative_to(&target.get(r0, c0))?;
    cols()
        .all(|(r, c)| u.get(r, c) == target.get(r, c).mul_omega(k))
        .then_some(k)
}

/// Secondary index of a full-mode database keyed on ancilla-zero columns.
///
/// Each key keeps the record that is best for the chosen objective; depth 0
/// stands for the empty circuit.
pub struct AncillaIndex<'a> {
    db: &'a CircuitDatabase,
    m: usize,
    objective: Objective,
    map: KeyMap<(u8, u32)>,
}

impl<'a> AncillaIndex<'a> {
    pub fn build(db: &'a CircuitDatabase, m: usize, objective: Objective) -> Result<Self> {
        if db.mode() != DbMode::Full {
            return Err(Error::Format("ancilla search needs a full-mode database".into()));
        }
        if m == 0 || m >= db.n_qubits() {
            return Err(Error::Dimension(format!(
                "{m} ancillas on a {}-qubit database",
                db.n_qubits()
            )));
        }
        let mut map: KeyMap<(u8, u32)> = KeyMap::default();
        map.insert(column_key(&RingMatrix::identity(db.n_qubits()), m), (0, 0));
        for d in 1..=db.depth() {
            let level = db.level(d);
            let keys: Vec<u128> = (0..level.len())
                .into_par_iter()
                .map(|i| column_key(&level.unitary(i), m))
                .collect();
            for (i, k) in keys.into_iter().enumerate() {
                let cand = (d as u8, i as u32);
                let better = match map.get(&k) {
                    None => true,
                    Some(&cur) => index_order(db, objective, cand) < index_order(db, objective, cur),
                };
                if better {
                    map.insert(k, cand);
                }
            }
        }
        Ok(Self { db, m, objective, map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn bytes(&self, (d, i): (u8, u32)) -> &'a [u8] {
        if d == 0 {
            &[]
        } else {
            self.db.level(d as usize).layer_bytes(i as usize)
        }
    }

    /// Best circuit on `n + m` wires acting as `target` on the data wires
    /// with ancillas in |0⟩, of total depth at most `max_depth`.
    pub fn search(&self, target: &RingMatrix, max_depth: usize) -> Result<SearchResult> {
        let big_n = self.db.n_qubits();
        if target.n_qubits() + self.m != big_n {
            return Err(Error::Dimension(format!(
                "{}-qubit target with {} ancillas against a {big_n}-qubit database",
                target.n_qubits(),
                self.m
            )));
        }
        if max_depth > 2 * self.db.depth() {
            return Err(Error::TooShallow { need: max_depth.div_ceil(2), have: self.db.depth() });
        }
        let embedded = target.tensor(&RingMatrix::identity(self.m));
        let mut best: Option<Found> = None;
        for a in 0..=self.db.depth().min(max_depth) {
            if self.objective == Objective::Depth && best.as_ref().is_some_and(|b| b.depth <= a) {
                break;
            }
            let count = if a == 0 { 1 } else { self.db.level(a).len() };
            let hit = (0..count)
                .into_par_iter()
                .filter_map(|i| self.probe(&embedded, a, i, max_depth))
                .min_by_key(|f| self.objective.order(f));
            if let Some(f) = hit {
                if best.as_ref().is_none_or(|b| self.objective.order(&f) < self.objective.order(b)) {
                    best = Some(f);
                }
            }
        }
        Ok(match best {
            Some(f) => SearchResult::Found(f),
            None => SearchResult::NotFound { proof_bound: max_depth },
        })
    }

    /// Pairs record `i` at depth `a` (the outer factor `A`) with the indexed
    /// record matching `A†(U ⊗ I)`.
    fn probe(&self, embedded: &RingMatrix, a: usize, i: usize, max_depth: usize) -> Option<Found> {
        let n = self.db.n_qubits();
        let a_bytes = self.bytes((a as u8, i as u32));
        let mut y = embedded.clone();
        left_apply_record(n, a_bytes, &mut y, true);
        let &(b, j) = self.map.get(&column_key(&y, self.m))?;
        if a + b as usize > max_depth {
            return None;
        }
        // B runs first, then A.
        let mut seq = self.bytes((b, j)).to_vec();
        seq.extend_from_slice(a_bytes);
        let circuit = circuit_from_bytes(n, &seq).with_ancillas(self.m);
        let k = ancilla_phase(&circuit.evaluate(), embedded, self.m)?;
        Some(Found::new(circuit, k))
    }
}

fn index_order(db: &CircuitDatabase, objective: Objective, (d, i): (u8, u32)) -> (usize, usize, usize, Vec<u8>) {
    if d == 0 {
        return (0, 0, 0, Vec::new());
    }
    let level = db.level(d as usize);
    let (x, y, z) = objective.record_order(d as usize, level.t_depth(i as usize), level.gate_count(i as usize));
    (x, y, z, level.layer_bytes(i as usize).to_vec())
}

/// Builds an index and runs one search; see [`AncillaIndex`].
pub fn ancilla_search(
    target: &RingMatrix,
    m: usize,
    db: &CircuitDatabase,
    max_depth: usize,
    objective: Objective,
) -> Result<SearchResult> {
    if let Some(k) = RingMatrix::identity(target.n_qubits()).phase_relative_to(target) {
        let c = Circuit::new(target.n_qubits() + m).with_ancillas(m);
        return Ok(SearchResult::Found(Found::new(c, k)));
    }
    AncillaIndex::build(db, m, objective)?.search(target, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{Gate, GateSet, SingleGate};
    use crate::targets::build_target;
    use std::sync::OnceLock;

    fn db2() -> &'static CircuitDatabase {
        static DB: OnceLock<CircuitDatabase> = OnceLock::new();
        DB.get_or_init(|| CircuitDatabase::generate(2, GateSet::CLIFFORD_T, 3, DbMode::Full).unwrap())
    }

    #[test]
    fn zero_columns_pick_even_indices() {
        let u = build_target("cx").unwrap();
        // columns 0 and 2 of CNOT: |00⟩ ↦ |00⟩, |10⟩ ↦ |11⟩
        let cols = zero_columns(&u, 1);
        assert_eq!(cols.len(), 8);
        let one = RingScalar::ONE;
        let z = RingScalar::ZERO;
        assert_eq!(cols, vec![one, z, z, z, z, z, z, one]);
    }

    #[test]
    fn column_key_ignores_phase_and_ancilla_columns() {
        let u = build_target("cx").unwrap();
        assert_eq!(column_key(&u, 1), column_key(&u.scale_phase(5), 1));
        // CNOT with control on the ancilla acts as identity on ancilla-zero inputs
        let rev = Circuit::schedule(2, &[Gate::Cnot { control: 1, target: 0 }]).unwrap().evaluate();
        assert_eq!(column_key(&rev, 1), column_key(&RingMatrix::identity(2), 1));
    }

    #[test]
    fn one_qubit_targets_with_one_ancilla() {
        for g in [SingleGate::H, SingleGate::T, SingleGate::P] {
            let u = g.matrix();
            let f = ancilla_search(&u, 1, db2(), 6, Objective::Depth).unwrap().found().cloned().unwrap();
            assert_eq!(f.depth, 1, "{g:?}");
            let embedded = u.tensor(&RingMatrix::identity(1));
            assert_eq!(ancilla_phase(&f.circuit.evaluate(), &embedded, 1), Some(f.phase_exponent));
            assert_eq!(f.circuit.n_ancillas(), 1);
        }
    }

    #[test]
    fn composite_needs_both_halves() {
        // H·T·H·T on the data wire: depth 4 requires two records.
        let c = Circuit::schedule(
            1,
            &[SingleGate::H, SingleGate::T, SingleGate::H, SingleGate::T].map(|g| Gate::Single(g, 0)),
        )
        .unwrap();
        let f = ancilla_search(&c.evaluate(), 1, db2(), 6, Objective::Depth).unwrap().found().cloned().unwrap();
        assert!(f.depth <= 4);
        let embedded = c.evaluate().tensor(&RingMatrix::identity(1));
        assert!(ancilla_phase(&f.circuit.evaluate(), &embedded, 1).is_some());
    }

    #[test]
    fn identity_is_free() {
        let f = ancilla_search(&RingMatrix::identity(1), 1, db2(), 6, Objective::TDepth).unwrap();
        assert_eq!(f.found().unwrap().depth, 0);
    }

    #[test]
    fn rejects_classed_and_mismatched() {
        let classed = CircuitDatabase::generate(2, GateSet::CLIFFORD_T, 1, DbMode::Classed).unwrap();
        let u = SingleGate::H.matrix();
        assert!(matches!(ancilla_search(&u, 1, &classed, 2, Objective::Depth), Err(Error::Format(_))));
        let cx = build_target("cx").unwrap();
        assert!(matches!(ancilla_search(&cx, 1, db2(), 2, Objective::Depth), Err(Error::Dimension(_))));
        assert!(matches!(ancilla_search(&u, 1, db2(), 7, Objective::Depth), Err(Error::TooShallow { .. })));
    }
}
