#![allow(dead_code)]

//! Pruning-free reference enumeration shared by test targets.

use std::collections::HashMap;

use ctsynth::canon::phase_normalize;
use ctsynth::gates::enumerate_layers;
use ctsynth::{GateSet, Layer, RingMatrix};

/// Breadth-first search over unitaries up to phase with no class reduction:
/// minimal depth and minimal T-depth among minimal-depth circuits. Levels
/// hold genuine unitaries; `info` is keyed by their phase-normalized form.
pub struct Brute {
    pub by_depth: Vec<Vec<RingMatrix>>,
    pub info: HashMap<RingMatrix, (usize, usize)>,
}

impl Brute {
    pub fn get(&self, u: &RingMatrix) -> Option<(usize, usize)> {
        self.info.get(&phase_normalize(u).unwrap()).copied()
    }
}

pub fn brute(n: usize, depth: usize) -> Brute {
    let layers: Vec<Layer> = enumerate_layers(n, GateSet::CLIFFORD_T)
        .unwrap()
        .into_iter()
        .filter(|l| !l.is_identity())
        .collect();
    let mats: Vec<(RingMatrix, bool)> = layers.iter().map(|l| (l.matrix(), l.has_t())).collect();
    let id = RingMatrix::identity(n);
    let mut info = HashMap::new();
    info.insert(phase_normalize(&id).unwrap(), (0, 0));
    let mut by_depth = vec![vec![id]];
    for d in 1..=depth {
        let mut next: HashMap<RingMatrix, (RingMatrix, usize)> = HashMap::new();
        for u in &by_depth[d - 1] {
            let t = info[&phase_normalize(u).unwrap()].1;
            for (m, has_t) in &mats {
                let v = m.matmul(u).unwrap();
                let key = phase_normalize(&v).unwrap();
                if info.contains_key(&key) {
                    continue;
                }
                let td = t + usize::from(*has_t);
                let e = next.entry(key).or_insert((v, td));
                e.1 = e.1.min(td);
            }
        }
        let mut level: Vec<(RingMatrix, RingMatrix)> = Vec::with_capacity(next.len());
        for (key, (v, td)) in next {
            info.insert(key.clone(), (d, td));
            level.push((key, v));
        }
        level.sort_by(|a, b| a.0.lex_cmp(&b.0));
        by_depth.push(level.into_iter().map(|(_, v)| v).collect());
    }
    Brute { by_depth, info }
}
