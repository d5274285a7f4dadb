//! Meet-in-the-middle search over circuit databases.

pub mod ancilla;
pub mod peephole;
pub mod tdepth;

use rayon::prelude::*;

use crate::canon::{compose_perm, inverse_perm, Canonicalizer};
use crate::db::{transform_bytes, CircuitDatabase, DbMode};
use crate::error::{Error, Result};
use crate::gates::{apply_bytes, inverse_byte, Circuit, Layer};
use crate::matrix::RingMatrix;

pub use ancilla::{ancilla_phase, ancilla_search, AncillaIndex, Objective};
pub use peephole::{peephole, PeepholeOptions, PeepholeOutcome};
pub use tdepth::{mitm_search_tdepth, CliffordSet, TDepthSearch};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Found {
    pub circuit: Circuit,
    pub depth: usize,
    pub t_depth: usize,
    /// `evaluate(circuit) = ω^phase_exponent · target`.
    pub phase_exponent: u8,
}

impl Found {
    fn new(circuit: Circuit, phase_exponent: u8) -> Self {
        Self { depth: circuit.depth(), t_depth: circuit.t_depth(), circuit, phase_exponent }
    }

    /// Depth, then T-depth, then gate count, then layer encoding.
    pub(crate) fn depth_order(&self) -> (usize, usize, usize, Vec<u8>) {
        (self.depth, self.t_depth, self.circuit.gate_count(), self.circuit.encoding())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchResult {
    Found(Found),
    /// No circuit of depth (or T-depth) at most `proof_bound` exists.
    NotFound { proof_bound: usize },
}

impl SearchResult {
    pub fn found(&self) -> Option<&Found> {
        match self {
            SearchResult::Found(f) => Some(f),
            SearchResult::NotFound { .. } => None,
        }
    }
}

fn check_dims(target: &RingMatrix, n: usize) -> Result<()> {
    if target.n_qubits() != n {
        return Err(Error::Dimension(format!(
            "{}-qubit target against a {n}-qubit database",
            target.n_qubits()
        )));
    }
    Ok(())
}

/// `Some(Found)` for the empty circuit when `target` is a phase times identity.
fn trivial(target: &RingMatrix) -> Option<Found> {
    RingMatrix::identity(target.n_qubits())
        .phase_relative_to(target)
        .map(|k| Found::new(Circuit::new(target.n_qubits()), k))
}

/// Applies stored layers to `m` from the left: `m ← X·m` where `X` is the
/// record's unitary, or its adjoint when `adjoint` is set.
pub(crate) fn left_apply_record(n: usize, bytes: &[u8], m: &mut RingMatrix, adjoint: bool) {
    if adjoint {
        let mut inv = vec![0u8; n];
        for l in bytes.chunks(n).rev() {
            for (o, &b) in inv.iter_mut().zip(l) {
                *o = inverse_byte(b);
            }
            apply_bytes(&inv, m, true);
        }
    } else {
        for l in bytes.chunks(n) {
            apply_bytes(l, m, true);
        }
    }
}

pub(crate) fn circuit_from_bytes(n: usize, bytes: &[u8]) -> Circuit {
    Circuit::from_layers(n, bytes.chunks(n).map(Layer::from_bytes_unchecked).collect())
        .expect("uniform width")
}

/// Depth-optimal synthesis of `target` up to global phase.
///
/// Every stored class representative `V'` at scan depth `a` is tried as the
/// outer factor in all its relabeled and inverted forms; the remaining factor
/// is canonicalized and looked up. Scanning stops at the first `a` for which
/// the best circuit found has depth at most `2a + 1`.
pub fn mitm_search(target: &RingMatrix, db: &CircuitDatabase, max_depth: usize) -> Result<SearchResult> {
    let n = db.n_qubits();
    check_dims(target, n)?;
    if db.mode() != DbMode::Classed {
        return Err(Error::Format("depth search needs a classed database".into()));
    }
    if max_depth > 2 * db.depth() {
        return Err(Error::TooShallow { need: max_depth.div_ceil(2), have: db.depth() });
    }
    if let Some(f) = trivial(target) {
        return Ok(SearchResult::Found(f));
    }
    let canon = db.canonicalizer();
    let perms = canon.perms().to_vec();
    // T_σ = permute(target, σ)
    let shifted: Vec<RingMatrix> = perms
        .iter()
        .map(|p| target.permute_qubits(p))
        .collect::<Result<_>>()?;
    let probe = Prober { db, canon: &canon, target, perms: &perms, shifted: &shifted, max_depth };

    let mut best: Option<Found> = None;
    for a in 0..=max_depth / 2 {
        let hit = if a == 0 {
            probe.record(0, usize::MAX)
        } else {
            let level = db.level(a);
            (0..level.len())
                .into_par_iter()
                .filter_map(|i| probe.record(a, i))
                .min_by_key(Found::depth_order)
        };
        if let Some(f) = hit {
            if best.as_ref().is_none_or(|b| f.depth_order() < b.depth_order()) {
                best = Some(f);
            }
        }
        if best.as_ref().is_some_and(|b| b.depth <= 2 * a + 1) {
            break;
        }
    }
    Ok(match best {
        Some(f) => SearchResult::Found(f),
        None => SearchResult::NotFound { proof_bound: max_depth },
    })
}

struct Prober<'a> {
    db: &'a CircuitDatabase,
    canon: &'a Canonicalizer,
    target: &'a RingMatrix,
    perms: &'a [Vec<usize>],
    shifted: &'a [RingMatrix],
    max_depth: usize,
}

impl Prober<'_> {
    /// Best verified circuit whose outer factor is a variant of record `i`
    /// at depth `a` (`a = 0` means the identity).
    fn record(&self, a: usize, i: usize) -> Option<Found> {
        let n = self.db.n_qubits();
        let bytes: &[u8] = if a == 0 { &[] } else { self.db.level(a).layer_bytes(i) };
        let mut best: Option<Found> = None;
        for x_adj in [false, true] {
            if a == 0 && x_adj {
                break;
            }
            for (s, sigma) in self.perms.iter().enumerate() {
                let mut y = self.shifted[s].clone();
                left_apply_record(n, bytes, &mut y, x_adj);
                let c = self.canon.canonicalize(&y).expect("unitary");
                let Some((b, j)) = self.db.locate(c.key()) else { continue };
                if a + b > self.max_depth {
                    continue;
                }
                if best.as_ref().is_some_and(|f| f.depth < a + b) {
                    continue;
                }
                let Some(f) = self.reconstruct(bytes, x_adj, sigma, &c.transform, b, j) else { continue };
                if best.as_ref().is_none_or(|g| f.depth_order() < g.depth_order()) {
                    best = Some(f);
                }
            }
        }
        best
    }

    fn reconstruct(
        &self,
        x_bytes: &[u8],
        x_adj: bool,
        sigma: &[usize],
        ty: &crate::canon::ClassTransform,
        b: usize,
        j: usize,
    ) -> Option<Found> {
        let n = self.db.n_qubits();
        let level = self.db.level(b);
        // The record's own transform onto the shared representative.
        let tw = self.canon.canonicalize(&level.unitary(j)).expect("unitary").transform;
        let rho = compose_perm(&inverse_perm(&ty.perm), &tw.perm);
        let y_bytes = transform_bytes(n, level.layer_bytes(j), &rho, ty.inverted ^ tw.inverted);
        // target = permute(X†, σ⁻¹) · permute(Y, σ⁻¹); Y runs first.
        let sinv = inverse_perm(sigma);
        let xdag = transform_bytes(n, x_bytes, &sinv, !x_adj);
        let y = transform_bytes(n, &y_bytes, &sinv, false);
        let mut seq = y.into_vec();
        seq.extend_from_slice(&xdag);
        let circuit = circuit_from_bytes(n, &seq);
        let k = circuit.evaluate().phase_relative_to(self.target)?;
        Some(Found::new(circuit, k))
    }
}

/// Gate cost and T-depth bound of a singly-controlled version of a circuit
/// with cost vector `x = (x_H, x_P, x_C, x_T)`.
pub fn controlled_cost(x: [u64; 4]) -> ([u64; 4], u64) {
    const A: [[u64; 4]; 4] = [[2, 0, 2, 4], [2, 0, 0, 2], [1, 2, 6, 12], [2, 3, 7, 9]];
    let mut y = [0u64; 4];
    for (yi, row) in y.iter_mut().zip(A) {
        *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    (y, x[0] + 2 * x[1] + 3 * x[2] + 5 * x[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{Gate, GateSet, SingleGate};
    use crate::targets::build_target;
    use std::sync::OnceLock;

    fn db2() -> &'static CircuitDatabase {
        static DB: OnceLock<CircuitDatabase> = OnceLock::new();
        DB.get_or_init(|| CircuitDatabase::generate(2, GateSet::CLIFFORD_T, 4, DbMode::Classed).unwrap())
    }

    fn found(u: &RingMatrix, d: usize) -> Found {
        mitm_search(u, db2(), d).unwrap().found().cloned().expect("found")
    }

    #[test]
    fn identity_is_depth_zero() {
        let f = found(&RingMatrix::identity(2), 8);
        assert_eq!(f.depth, 0);
        assert!(f.circuit.layers().is_empty());
        assert_eq!(found(&RingMatrix::identity(2).scale_phase(3), 8).phase_exponent, 5);
    }

    #[test]
    fn known_two_qubit_depths() {
        for (name, depth) in [("cx", 1), ("cz", 3), ("cy", 3), ("cp", 4), ("cv", 5), ("ch", 7)] {
            let u = build_target(name).unwrap();
            let f = found(&u, 8);
            assert_eq!(f.depth, depth, "{name}");
            assert_eq!(f.circuit.evaluate(), u.scale_phase(f.phase_exponent));
        }
    }

    #[test]
    fn finds_random_circuits_no_deeper() {
        let ls = crate::gates::enumerate_layers(2, GateSet::CLIFFORD_T).unwrap();
        let mut state = 0x9e37_79b9u64;
        for _ in 0..20 {
            let mut layers = Vec::new();
            for _ in 0..6 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                layers.push(ls[(state >> 33) as usize % ls.len()].clone());
            }
            let c = Circuit::from_layers(2, layers).unwrap();
            let f = found(&c.evaluate(), 8);
            assert!(f.depth <= 6);
            assert_eq!(f.circuit.evaluate(), c.evaluate().scale_phase(f.phase_exponent));
        }
    }

    #[test]
    fn shallow_database_is_rejected() {
        let u = build_target("cx").unwrap();
        assert!(matches!(mitm_search(&u, db2(), 9), Err(Error::TooShallow { .. })));
        assert!(matches!(mitm_search(&RingMatrix::identity(3), db2(), 2), Err(Error::Dimension(_))));
    }

    #[test]
    fn not_found_reports_bound() {
        let u = build_target("ch").unwrap();
        assert_eq!(mitm_search(&u, db2(), 6).unwrap(), SearchResult::NotFound { proof_bound: 6 });
    }

    #[test]
    fn single_gates() {
        let t1 = Circuit::schedule(2, &[Gate::Single(SingleGate::T, 1)]).unwrap();
        assert_eq!(found(&t1.evaluate(), 4).depth, 1);
    }

    #[test]
    fn controlled_cost_columns() {
        assert_eq!(controlled_cost([1, 0, 0, 0]), ([2, 2, 1, 2], 1));
        assert_eq!(controlled_cost([0, 1, 0, 0]), ([0, 0, 2, 3], 2));
        assert_eq!(controlled_cost([0, 0, 1, 0]), ([2, 0, 6, 7], 3));
        assert_eq!(controlled_cost([0, 0, 0, 1]), ([4, 2, 12, 9], 5));
        assert_eq!(controlled_cost([0, 0, 0, 0]), ([0, 0, 0, 0], 0));
    }
}
