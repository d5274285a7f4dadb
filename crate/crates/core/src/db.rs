//! Databases of minimal-depth circuits, one per equivalence class.
//!
//! Records are stored per depth, sorted by the fingerprint of the canonical
//! representative. Only circuits are kept; unitaries are recomputed on demand.

use std::collections::{HashMap, HashSet};
use std::hash::{BuildHasherDefault, Hasher};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::canon::Canonicalizer;
use crate::error::{Error, Result};
use crate::gates::{apply_bytes, enumerate_layers, inverse_byte, relabel_bytes, Circuit, GateSet, Layer};
use crate::matrix::RingMatrix;

const MAGIC: &[u8; 6] = b"QCDB1\0";
const VERSION: u8 = 1;

/// Fingerprints are already uniformly mixed; hashing them again is wasted work.
#[derive(Default, Clone, Copy)]
pub struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = self.0.rotate_left(8) ^ b as u64;
        }
    }

    fn write_u128(&mut self, k: u128) {
        self.0 = k as u64;
    }
}

pub type KeyMap<V> = HashMap<u128, V, BuildHasherDefault<KeyHasher>>;
pub type KeySet = HashSet<u128, BuildHasherDefault<KeyHasher>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DbMode {
    /// Reduced by qubit relabeling, inversion and global phase.
    Classed,
    /// Reduced by global phase only.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitRecord {
    pub key: u128,
    pub circuit: Circuit,
    pub gate_count: usize,
}

/// All records of one depth, sorted by key, in flat columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    n: usize,
    depth: usize,
    keys: Vec<u128>,
    gate_counts: Vec<u16>,
    layers: Vec<u8>,
}

impl Level {
    fn new(n: usize, depth: usize) -> Self {
        Self { n, depth, keys: Vec::new(), gate_counts: Vec::new(), layers: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn keys(&self) -> &[u128] {
        &self.keys
    }

    pub fn key(&self, i: usize) -> u128 {
        self.keys[i]
    }

    pub fn gate_count(&self, i: usize) -> usize {
        self.gate_counts[i] as usize
    }

    /// The record's layers, `n` bytes each, concatenated.
    pub fn layer_bytes(&self, i: usize) -> &[u8] {
        let w = self.n * self.depth;
        &self.layers[i * w..(i + 1) * w]
    }

    pub fn circuit(&self, i: usize) -> Circuit {
        let layers = self
            .layer_bytes(i)
            .chunks(self.n)
            .map(Layer::from_bytes_unchecked)
            .collect();
        Circuit::from_layers(self.n, layers).expect("uniform width")
    }

    /// The unitary of record `i`, recomputed from its circuit.
    pub fn unitary(&self, i: usize) -> RingMatrix {
        evaluate_bytes(self.n, self.layer_bytes(i))
    }

    pub fn t_depth(&self, i: usize) -> usize {
        self.layer_bytes(i)
            .chunks(self.n)
            .filter(|l| l.iter().any(|&b| b == 4 || b == 5))
            .count()
    }

    pub fn find(&self, key: u128) -> Option<usize> {
        self.keys.binary_search(&key).ok()
    }

    pub fn record(&self, i: usize) -> CircuitRecord {
        CircuitRecord { key: self.keys[i], circuit: self.circuit(i), gate_count: self.gate_count(i) }
    }

    fn push(&mut self, key: u128, gate_count: u16, bytes: &[u8]) {
        debug_assert_eq!(bytes.len(), self.n * self.depth);
        self.keys.push(key);
        self.gate_counts.push(gate_count);
        self.layers.extend_from_slice(bytes);
    }
}

pub(crate) fn evaluate_bytes(n: usize, bytes: &[u8]) -> RingMatrix {
    let mut m = RingMatrix::identity(n);
    for l in bytes.chunks(n) {
        apply_bytes(l, &mut m, true);
    }
    m
}

fn layer_gate_count(l: &[u8]) -> u16 {
    l.iter().filter(|&&b| b != 0 && b & 0xf != 7).count() as u16
}

/// Relabels each layer by `perm`, then reverses and inverts if asked.
pub(crate) fn transform_bytes(n: usize, src: &[u8], perm: &[usize], inverted: bool) -> Box<[u8]> {
    let mut out = vec![0u8; src.len()];
    let depth = src.len() / n;
    for (d, l) in src.chunks(n).enumerate() {
        let slot = if inverted { depth - 1 - d } else { d };
        relabel_bytes(l, perm, &mut out[slot * n..(slot + 1) * n]);
    }
    if inverted {
        out.iter_mut().for_each(|b| *b = inverse_byte(*b));
    }
    out.into_boxed_slice()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitDatabase {
    n: usize,
    gate_set: GateSet,
    mode: DbMode,
    levels: Vec<Level>,
    index: KeyMap<(u32, u32)>,
}

#[derive(Clone, Debug, Default)]
pub struct GenOptions {
    /// Abort once a level would exceed this many records.
    pub max_records: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct LevelStats {
    pub depth: usize,
    pub count: usize,
    pub seconds: f64,
}

/// Same-class candidates compete on (T-depth, gate count, encoding).
struct Cand {
    t_depth: u16,
    gate_count: u16,
    bytes: Box<[u8]>,
}

fn offer(map: &mut KeyMap<Cand>, key: u128, t_depth: u16, gate_count: u16, make: impl FnOnce() -> Box<[u8]>) {
    match map.get_mut(&key) {
        Some(c) if (c.t_depth, c.gate_count) < (t_depth, gate_count) => {}
        Some(c) => {
            let bytes = make();
            if (t_depth, gate_count, &bytes) < (c.t_depth, c.gate_count, &c.bytes) {
                *c = Cand { t_depth, gate_count, bytes };
            }
        }
        None => {
            map.insert(key, Cand { t_depth, gate_count, bytes: make() });
        }
    }
}

const CHUNK: usize = 256;

impl CircuitDatabase {
    pub fn empty(n: usize, gate_set: GateSet, mode: DbMode) -> Self {
        Self { n, gate_set, mode, levels: Vec::new(), index: KeyMap::default() }
    }

    /// Builds levels `1..=max_depth`.
    pub fn generate(n: usize, gate_set: GateSet, max_depth: usize, mode: DbMode) -> Result<Self> {
        let (db, err) = Self::generate_with(n, gate_set, max_depth, mode, &GenOptions::default(), |_| {});
        match err {
            Some(e) => Err(e),
            None => Ok(db),
        }
    }

    /// Like [`generate`](Self::generate), reporting each finished level. On a
    /// budget failure the completed levels are returned with the error.
    pub fn generate_with(
        n: usize,
        gate_set: GateSet,
        max_depth: usize,
        mode: DbMode,
        opts: &GenOptions,
        mut progress: impl FnMut(&LevelStats),
    ) -> (Self, Option<Error>) {
        let mut db = Self::empty(n, gate_set, mode);
        let layers: Vec<Layer> = match enumerate_layers(n, gate_set) {
            Ok(ls) => ls.into_iter().filter(|l| !l.is_identity()).collect(),
            Err(e) => return (db, Some(e)),
        };
        let canon = Canonicalizer::new(n, mode == DbMode::Classed);
        let mut known = KeySet::default();
        known.insert(canon.key(&RingMatrix::identity(n)).expect("nonzero"));

        for depth in 1..=max_depth {
            let start = Instant::now();
            let mut level_map: KeyMap<Cand> = KeyMap::default();
            let sources: Vec<usize> = if depth == 1 {
                vec![usize::MAX]
            } else {
                (0..db.levels[depth - 2].len()).collect()
            };
            let prev = db.levels.last();
            let batch = CHUNK * rayon::current_num_threads().max(1);
            for block in sources.chunks(batch) {
                let parts: Vec<KeyMap<Cand>> = block
                    .par_chunks(CHUNK)
                    .map(|chunk| {
                        let mut local = KeyMap::default();
                        for &src in chunk {
                            let src = match prev {
                                Some(p) if src != usize::MAX => Source {
                                    u: p.unitary(src),
                                    bytes: p.layer_bytes(src),
                                    gate_count: p.gate_count(src) as u16,
                                    t_depth: p.t_depth(src) as u16,
                                },
                                _ => Source { u: RingMatrix::identity(n), bytes: &[], gate_count: 0, t_depth: 0 },
                            };
                            extend_one(&canon, &layers, &src, depth == 1, &known, &mut local);
                        }
                        local
                    })
                    .collect();
                for part in parts {
                    for (k, c) in part {
                        offer(&mut level_map, k, c.t_depth, c.gate_count, || c.bytes);
                    }
                }
                if let Some(max) = opts.max_records {
                    if level_map.len() > max {
                        return (
                            db,
                            Some(Error::Budget(format!(
                                "level {depth} exceeds {max} records; levels 1..{} kept",
                                depth - 1
                            ))),
                        );
                    }
                }
            }
            let mut entries: Vec<(u128, Cand)> = level_map.into_iter().collect();
            entries.sort_unstable_by_key(|e| e.0);
            let mut level = Level::new(n, depth);
            for (k, c) in &entries {
                level.push(*k, c.gate_count, &c.bytes);
                known.insert(*k);
            }
            db.add_level(level);
            progress(&LevelStats { depth, count: entries.len(), seconds: start.elapsed().as_secs_f64() });
        }
        (db, None)
    }

    fn add_level(&mut self, level: Level) {
        let li = self.levels.len() as u32;
        for (i, &k) in level.keys.iter().enumerate() {
            self.index.insert(k, (li, i as u32));
        }
        self.levels.push(level);
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn gate_set(&self) -> GateSet {
        self.gate_set
    }

    pub fn mode(&self) -> DbMode {
        self.mode
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Level `d`, for `1 ≤ d ≤ depth()`.
    pub fn level(&self, d: usize) -> &Level {
        &self.levels[d - 1]
    }

    pub fn level_counts(&self) -> Vec<usize> {
        self.levels.iter().map(Level::len).collect()
    }

    pub fn canonicalizer(&self) -> Canonicalizer {
        Canonicalizer::new(self.n, self.mode == DbMode::Classed)
    }

    /// `(depth, index)` of a key. Callers confirm matches exactly.
    #[inline]
    pub fn locate(&self, key: u128) -> Option<(usize, usize)> {
        self.index.get(&key).map(|&(l, i)| (l as usize + 1, i as usize))
    }

    pub fn lookup(&self, key: u128) -> Option<(usize, CircuitRecord)> {
        self.locate(key).map(|(d, i)| (d, self.level(d).record(i)))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(self.n as u8);
        out.push(self.gate_set.id as u8);
        out.push(match self.mode {
            DbMode::Classed => 0,
            DbMode::Full => 1,
        });
        out.extend_from_slice(&(self.levels.len() as u32).to_le_bytes());
        for level in &self.levels {
            out.extend_from_slice(&(level.len() as u64).to_le_bytes());
            for i in 0..level.len() {
                out.extend_from_slice(&level.key(i).to_le_bytes());
                out.extend_from_slice(&(level.depth as u16).to_le_bytes());
                out.extend_from_slice(level.layer_bytes(i));
                out.extend_from_slice(&level.gate_counts[i].to_le_bytes());
            }
        }
        let sum = fnv1a(&out);
        out.extend_from_slice(&sum.to_le_bytes());
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut r = Reader { data, pos: 0 };
        if r.take(6)? != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::Version(version));
        }
        let n = r.u8()? as usize;
        let gate_set = GateSet::from_id(r.u8()?).ok_or_else(|| Error::Format("unknown gate set".into()))?;
        let mode = match r.u8()? {
            0 => DbMode::Classed,
            1 => DbMode::Full,
            f => return Err(Error::Format(format!("unknown mode flags {f}"))),
        };
        if n == 0 || n > crate::gates::MAX_QUBITS {
            return Err(Error::Format(format!("bad qubit count {n}")));
        }
        let level_count = r.u32()? as usize;
        let mut db = Self::empty(n, gate_set, mode);
        for depth in 1..=level_count {
            let count = r.u64()? as usize;
            let mut level = Level::new(n, depth);
            for _ in 0..count {
                let key = u128::from_le_bytes(r.take(16)?.try_into().expect("16 bytes"));
                let layer_count = r.u16()? as usize;
                if layer_count != depth {
                    return Err(Error::Format(format!("record of depth {layer_count} in level {depth}")));
                }
                let bytes = r.take(n * depth)?;
                for l in bytes.chunks(n) {
                    Layer::from_bytes(l)?;
                }
                let gc = r.u16()?;
                if level.keys.last().is_some_and(|&k| k >= key) {
                    return Err(Error::Format(format!("keys out of order in level {depth}")));
                }
                level.push(key, gc, bytes);
            }
            db.add_level(level);
        }
        let body_len = r.pos;
        let stored = r.u64()?;
        if r.pos != data.len() {
            return Err(Error::Format("trailing bytes after checksum".into()));
        }
        let computed = fnv1a(&data[..body_len]);
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }
        Ok(db)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

struct Source<'a> {
    u: RingMatrix,
    bytes: &'a [u8],
    gate_count: u16,
    t_depth: u16,
}

fn extend_one(
    canon: &Canonicalizer,
    layers: &[Layer],
    src: &Source,
    first: bool,
    known: &KeySet,
    out: &mut KeyMap<Cand>,
) {
    let n = canon.n_qubits();
    let both_sides = canon.classed() && !first;
    for layer in layers {
        let lb = layer.bytes();
        let gc = src.gate_count + layer_gate_count(lb);
        let td = src.t_depth + layer.has_t() as u16;
        for left in [true, false] {
            if !left && !both_sides {
                continue;
            }
            let mut m = src.u.clone();
            apply_bytes(lb, &mut m, left);
            let c = canon.canonicalize(&m).expect("unitary");
            let key = c.key();
            if known.contains(&key) {
                continue;
            }
            offer(out, key, td, gc, || {
                // L·U runs U first; U·L runs L first
                let seq: Vec<u8> = if left {
                    src.bytes.iter().chain(lb).copied().collect()
                } else {
                    lb.iter().chain(src.bytes).copied().collect()
                };
                transform_bytes(n, &seq, &c.transform.perm, c.transform.inverted)
            });
        }
    }
}

fn fnv1a(data: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in data {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(k).ok_or(Error::Truncated)?;
        let s = self.data.get(self.pos..end).ok_or(Error::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}
