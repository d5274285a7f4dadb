//! T-depth-optimal search.
//!
//! `P_0` is the Clifford group and `P_k` holds the unitaries whose minimal
//! number of T stages is exactly `k`, each as `C·T_S·p` with `p ∈ P_{k−1}`,
//! `C` Clifford and `T_S` a layer of T gates on a nonempty wire set. All sets
//! are closed under left multiplication by Cliffords. A target of T-depth
//! `d` is found by probing `q·U` for `q ∈ T_S·P_{⌈d/2⌉−1}` against
//! `P_{≤⌊d/2⌋}`: the unknown outer Clifford is absorbed by that closure.

use std::collections::VecDeque;

use crate::canon::Canonicalizer;
use crate::db::KeyMap;
use crate::error::{Error, Result};
use crate::gates::{apply_bytes, enumerate_layers, inverse_byte, Circuit, GateSet, Layer, SingleGate};
use crate::matrix::RingMatrix;

use super::{circuit_from_bytes, trivial, Found, SearchResult};

/// Default cap on stored elements across all T-stage sets.
pub const DEFAULT_BUDGET: usize = 20_000_000;

/// One T-stage set: phase-normalized keys with witness circuits.
#[derive(Clone, Debug, Default)]
struct Stage {
    index: KeyMap<u32>,
    witnesses: Vec<Box<[u8]>>,
}

impl Stage {
    fn len(&self) -> usize {
        self.witnesses.len()
    }

    fn push(&mut self, key: u128, witness: Box<[u8]>) {
        self.index.insert(key, self.witnesses.len() as u32);
        self.witnesses.push(witness);
    }
}

/// Clifford group elements up to global phase, each with a witness circuit
/// of minimal depth over {H, P, P†, CNOT}.
#[derive(Clone, Debug)]
pub struct CliffordSet {
    n: usize,
    stage: Stage,
}

impl CliffordSet {
    /// Breadth-first closure; `n > 2` needs `allow_large`.
    pub fn generate(n: usize, allow_large: bool) -> Result<Self> {
        if n > 2 && !allow_large {
            return Err(Error::Budget(format!("the {n}-qubit Clifford group needs the long-run flag")));
        }
        Self::generate_with_budget(n, if allow_large { usize::MAX } else { DEFAULT_BUDGET })
    }

    pub fn generate_with_budget(n: usize, max_elements: usize) -> Result<Self> {
        let canon = Canonicalizer::new(n, false);
        let layers: Vec<Layer> = enumerate_layers(n, GateSet::CLIFFORD)?
            .into_iter()
            .filter(|l| !l.is_identity())
            .collect();
        let mut stage = Stage::default();
        let id = RingMatrix::identity(n);
        stage.push(canon.key(&id)?, Box::new([]));
        let mut frontier = VecDeque::from([(id, 0u32)]);
        while let Some((m, idx)) = frontier.pop_front() {
            for l in &layers {
                let mut x = m.clone();
                l.apply_left(&mut x);
                let key = canon.key(&x)?;
                if stage.index.contains_key(&key) {
                    continue;
                }
                if stage.len() >= max_elements {
                    return Err(Error::Budget(format!("Clifford set exceeds {max_elements} elements")));
                }
                let w: Box<[u8]> = stage.witnesses[idx as usize].iter().chain(l.bytes()).copied().collect();
                frontier.push_back((x, stage.len() as u32));
                stage.push(key, w);
            }
        }
        Ok(Self { n, stage })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.stage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stage.len() == 0
    }

    /// Witness circuit for `u` up to phase, if `u` is Clifford.
    pub fn witness(&self, u: &RingMatrix) -> Option<Circuit> {
        let key = Canonicalizer::new(self.n, false).key(u).ok()?;
        let i = *self.stage.index.get(&key)?;
        Some(circuit_from_bytes(self.n, &self.stage.witnesses[i as usize]))
    }

    pub fn contains(&self, u: &RingMatrix) -> bool {
        self.witness(u).is_some_and(|c| c.evaluate().phase_relative_to(u).is_some())
    }
}

/// Incrementally built `P_0, P_1, …` for one register width.
pub struct TDepthSearch<'a> {
    cs: &'a CliffordSet,
    canon: Canonicalizer,
    clifford_layers: Vec<Layer>,
    t_layers: Vec<Layer>,
    stages: Vec<Stage>,
    budget: usize,
}

impl<'a> TDepthSearch<'a> {
    pub fn new(cs: &'a CliffordSet) -> Self {
        Self::with_budget(cs, DEFAULT_BUDGET)
    }

    pub fn with_budget(cs: &'a CliffordSet, budget: usize) -> Self {
        let n = cs.n;
        let clifford_layers = enumerate_layers(n, GateSet::CLIFFORD)
            .expect("small n")
            .into_iter()
            .filter(|l| !l.is_identity())
            .collect();
        let t_layers = (1u32..1 << n)
            .map(|mask| {
                let gates: Vec<_> = (0..n)
                    .filter(|q| mask >> q & 1 == 1)
                    .map(|q| crate::gates::Gate::Single(SingleGate::T, q))
                    .collect();
                Layer::from_gates(n, &gates).expect("disjoint")
            })
            .collect();
        Self {
            cs,
            canon: Canonicalizer::new(n, false),
            clifford_layers,
            t_layers,
            stages: Vec::new(),
            budget,
        }
    }

    /// Sizes of the stage sets built so far.
    pub fn stage_sizes(&self) -> Vec<usize> {
        let mut v = vec![self.cs.len()];
        v.extend(self.stages.iter().map(Stage::len));
        v
    }

    fn stage(&self, k: usize) -> &Stage {
        if k == 0 { &self.cs.stage } else { &self.stages[k - 1] }
    }

    fn stored(&self) -> usize {
        self.stages.iter().map(Stage::len).sum()
    }

    fn find(&self, key: u128, up_to: usize) -> Option<(usize, u32)> {
        (0..=up_to).find_map(|k| self.stage(k).index.get(&key).map(|&i| (k, i)))
    }

    fn ensure(&mut self, k: usize) -> Result<()> {
        let n = self.cs.n;
        while self.stages.len() < k {
            let level = self.stages.len() + 1;
            let mut next = Stage::default();
            let mut frontier: VecDeque<(RingMatrix, u32)> = VecDeque::new();
            let prev_len = self.stage(level - 1).len();
            for p in 0..prev_len {
                let pw = self.stage(level - 1).witnesses[p].clone();
                let base = eval(n, &pw);
                for t in &self.t_layers {
                    let mut x = base.clone();
                    t.apply_left(&mut x);
                    let key = self.canon.key(&x)?;
                    if next.index.contains_key(&key) || self.find(key, level - 1).is_some() {
                        continue;
                    }
                    self.admit(&next)?;
                    let w: Box<[u8]> = pw.iter().chain(t.bytes()).copied().collect();
                    frontier.push_back((x, next.len() as u32));
                    next.push(key, w);
                }
            }
            while let Some((m, idx)) = frontier.pop_front() {
                for l in &self.clifford_layers {
                    let mut x = m.clone();
                    l.apply_left(&mut x);
                    let key = self.canon.key(&x)?;
                    if next.index.contains_key(&key) || self.find(key, level - 1).is_some() {
                        continue;
                    }
                    self.admit(&next)?;
                    let w: Box<[u8]> = next.witnesses[idx as usize].iter().chain(l.bytes()).copied().collect();
                    frontier.push_back((x, next.len() as u32));
                    next.push(key, w);
                }
            }
            self.stages.push(next);
        }
        Ok(())
    }

    fn admit(&self, next: &Stage) -> Result<()> {
        if self.stored() + next.len() >= self.budget {
            return Err(Error::Budget(format!("T-stage sets exceed {} elements", self.budget)));
        }
        Ok(())
    }

    /// Minimal-T-depth circuit for `target` up to phase, or a certificate
    /// that none has T-depth ≤ `max_tdepth`.
    pub fn search(&mut self, target: &RingMatrix, max_tdepth: usize) -> Result<SearchResult> {
        let n = self.cs.n;
        super::check_dims(target, n)?;
        if let Some(f) = trivial(target) {
            return Ok(SearchResult::Found(f));
        }
        let key = self.canon.key(target)?;
        if let Some(&i) = self.cs.stage.index.get(&key) {
            if let Some(f) = verified(circuit_from_bytes(n, &self.cs.stage.witnesses[i as usize]), target) {
                return Ok(SearchResult::Found(f));
            }
        }
        for d in 1..=max_tdepth {
            let j = d / 2;
            let a = d - j;
            self.ensure(j.max(a - 1))?;
            let mut best: Option<Found> = None;
            let probe_stage = self.stage(a - 1);
            for pw in &probe_stage.witnesses {
                let mut pu = target.clone();
                for l in pw.chunks(n) {
                    apply_bytes(l, &mut pu, true);
                }
                for t in &self.t_layers {
                    let mut x = pu.clone();
                    t.apply_left(&mut x);
                    let Some((k, i)) = self.find(self.canon.key(&x)?, j) else { continue };
                    if a + k < d {
                        continue;
                    }
                    // target = q⁻¹ · Z with q = T_S·p
                    let mut seq: Vec<u8> = self.stage(k).witnesses[i as usize].to_vec();
                    seq.extend(t.bytes().iter().map(|&b| inverse_byte(b)));
                    for l in pw.chunks(n).rev() {
                        seq.extend(l.iter().map(|&b| inverse_byte(b)));
                    }
                    let Some(f) = verified(tidy(circuit_from_bytes(n, &seq)), target) else { continue };
                    let order = |f: &Found| (f.t_depth, f.depth_order());
                    if best.as_ref().is_none_or(|b| order(&f) < order(b)) {
                        best = Some(f);
                    }
                }
            }
            if let Some(f) = best {
                return Ok(SearchResult::Found(f));
            }
        }
        Ok(SearchResult::NotFound { proof_bound: max_tdepth })
    }
}

fn eval(n: usize, bytes: &[u8]) -> RingMatrix {
    crate::db::evaluate_bytes(n, bytes)
}

fn verified(c: Circuit, target: &RingMatrix) -> Option<Found> {
    let k = c.evaluate().phase_relative_to(target)?;
    Some(Found::new(c, k))
}

/// ASAP-reschedules when that does not raise the T-depth.
fn tidy(c: Circuit) -> Circuit {
    let r = c.rescheduled();
    if r.t_depth() <= c.t_depth() { r } else { c }
}

/// T-depth-optimal search with a fresh stage cache.
pub fn mitm_search_tdepth(target: &RingMatrix, cs: &CliffordSet, max_tdepth: usize) -> Result<SearchResult> {
    TDepthSearch::new(cs).search(target, max_tdepth)
}
