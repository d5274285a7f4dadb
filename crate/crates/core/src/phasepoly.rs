//! Phase polynomials of {CNOT, T} circuits and T-parallelization with ancillas.
//!
//! A {CNOT, T} circuit maps `|x⟩ ↦ ω^{Σ f_i(x)} |g(x)⟩` where each `f_i` is the
//! parity seen by one T gate and `g` is linear. Terms that fit together are
//! placed on distinct wires (extra copies on ancillas) and hit by a single T
//! layer.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gates::{Circuit, Gate, Layer, SingleGate};

/// Parity `x ↦ ⊕_{j: bit j set} x_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearFn(pub u64);

impl LinearFn {
    pub fn var(j: usize) -> Self {
        LinearFn(1 << j)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn eval(self, x: u64) -> bool {
        (self.0 & x).count_ones() % 2 == 1
    }
}

impl std::ops::BitXor for LinearFn {
    type Output = LinearFn;
    fn bitxor(self, o: Self) -> Self {
        LinearFn(self.0 ^ o.0)
    }
}

/// Square GF(2) matrix; row `i` is the function held by wire `i`.
pub type Gf2Matrix = Vec<LinearFn>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePolynomial {
    pub n: usize,
    /// One entry per T gate.
    pub terms: Vec<LinearFn>,
    pub g: Gf2Matrix,
}

impl PhasePolynomial {
    /// `(ω exponent, output x)` for input `x`, wire `j` being bit `j` of `x`.
    pub fn apply(&self, x: u64) -> (u8, u64) {
        let t = self.terms.iter().filter(|f| f.eval(x)).count() % 8;
        let y = self
            .g
            .iter()
            .enumerate()
            .fold(0u64, |y, (i, r)| y | (r.eval(x) as u64) << i);
        (t as u8, y)
    }
}

pub fn identity_matrix(n: usize) -> Gf2Matrix {
    (0..n).map(LinearFn::var).collect()
}

/// `a·b`.
pub fn mat_mul(a: &[LinearFn], b: &[LinearFn]) -> Gf2Matrix {
    a.iter()
        .map(|r| {
            b.iter()
                .enumerate()
                .filter(|(j, _)| r.0 >> j & 1 == 1)
                .fold(LinearFn(0), |acc, (_, row)| acc ^ *row)
        })
        .collect()
}

pub fn rank(rows: &[LinearFn]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for r in rows {
        let mut v = r.0;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Gauss-Jordan reduction of `m` to the identity; returns the row operations
/// `(src, dst)` meaning `row[dst] ^= row[src]`, in order.
fn reduce(m: &[LinearFn]) -> Result<Vec<(usize, usize)>> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut ops = Vec::new();
    for col in 0..n {
        let bit = 1u64 << col;
        if a[col].0 & bit == 0 {
            let r = (col + 1..n).find(|&r| a[r].0 & bit != 0).ok_or(Error::Singular)?;
            a[col] = a[col] ^ a[r];
            ops.push((r, col));
        }
        for r in 0..n {
            if r != col && a[r].0 & bit != 0 {
                a[r] = a[r] ^ a[col];
                ops.push((col, r));
            }
        }
    }
    Ok(ops)
}

pub fn invert(m: &[LinearFn]) -> Result<Gf2Matrix> {
    let mut inv = identity_matrix(m.len());
    for (src, dst) in reduce(m)? {
        inv[dst] = inv[dst] ^ inv[src];
    }
    Ok(inv)
}

/// Gate list realizing `l` on wires `wires`: starting from the identity
/// state, wire `wires[i]` ends holding row `i` of `l`.
fn cnot_gates(l: &[LinearFn], wires: &[usize]) -> Result<Vec<Gate>> {
    // E_k⋯E_1·L = I with self-inverse E's, so L = E_1⋯E_k: apply E_k first.
    Ok(reduce(l)?
        .into_iter()
        .rev()
        .map(|(src, dst)| Gate::Cnot { control: wires[src], target: wires[dst] })
        .collect())
}

/// CNOT circuit on `l.len()` wires with `|x⟩ ↦ |Lx⟩`.
pub fn cnot_synth(l: &[LinearFn]) -> Result<Circuit> {
    let n = l.len();
    Circuit::schedule(n, &cnot_gates(l, &(0..n).collect::<Vec<_>>())?)
}

/// Reads off the phase polynomial of a circuit over {CNOT, T}.
pub fn extract(c: &Circuit) -> Result<PhasePolynomial> {
    let n = c.n_qubits();
    let mut state = identity_matrix(n);
    let mut terms = Vec::new();
    for g in c.gates() {
        match g {
            Gate::Cnot { control, target } => state[target] = state[target] ^ state[control],
            Gate::Single(SingleGate::T, q) => terms.push(state[q]),
            Gate::Single(SingleGate::I, _) => {}
            other => return Err(Error::Circuit(format!("{other:?} is not a CNOT or T gate"))),
        }
    }
    Ok(PhasePolynomial { n, terms, g: state })
}

/// Terms sorted by descending multiplicity, then ascending value.
fn greedy_order(terms: &[LinearFn]) -> Vec<LinearFn> {
    let mut counts: BTreeMap<LinearFn, usize> = BTreeMap::new();
    for &t in terms {
        *counts.entry(t).or_default() += 1;
    }
    let mut groups: Vec<(LinearFn, usize)> = counts.into_iter().collect();
    groups.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    groups.into_iter().flat_map(|(f, c)| std::iter::repeat_n(f, c)).collect()
}

/// Greedy split of `terms` into parts with `|part| ≤ m + rank(part)`. Every
/// part but the last has at least `m + 1` members.
pub fn partition(terms: &[LinearFn], m: usize) -> Result<Vec<Vec<LinearFn>>> {
    if terms.iter().any(|f| f.is_zero()) {
        return Err(Error::Circuit("zero term in phase polynomial".into()));
    }
    let mut parts: Vec<Vec<LinearFn>> = Vec::new();
    let mut cur: Vec<LinearFn> = Vec::new();
    for f in greedy_order(terms) {
        cur.push(f);
        if cur.len() > m + rank(&cur) {
            cur.pop();
            parts.push(std::mem::take(&mut cur));
            cur.push(f);
        }
    }
    if !cur.is_empty() {
        parts.push(cur);
    }
    Ok(parts)
}

/// `⌈k / (m + 1)⌉`.
pub fn tdepth_bound(k: usize, m: usize) -> usize {
    k.div_ceil(m + 1)
}

/// Keeps each distinct term with its multiplicity taken mod 8.
pub fn reduce_multiplicities(terms: &[LinearFn]) -> Vec<LinearFn> {
    let mut counts: BTreeMap<LinearFn, usize> = BTreeMap::new();
    for &t in terms {
        *counts.entry(t).or_default() += 1;
    }
    counts.into_iter().flat_map(|(f, c)| std::iter::repeat_n(f, c % 8)).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParallelizeOptions {
    /// Drop groups of eight identical terms before partitioning.
    pub reduce_mod8: bool,
}

/// Rewrites a {CNOT, T} circuit on `n` wires into one on `n + m` wires
/// (ancillas last, starting and ending in |0⟩) with one T layer per part.
pub fn parallelize(c: &Circuit, m: usize) -> Result<Circuit> {
    parallelize_with(c, m, &ParallelizeOptions::default())
}

pub fn parallelize_with(c: &Circuit, m: usize, opts: &ParallelizeOptions) -> Result<Circuit> {
    let pp = extract(c)?;
    let n = pp.n;
    let terms = if opts.reduce_mod8 { reduce_multiplicities(&pp.terms) } else { pp.terms.clone() };
    let data: Vec<usize> = (0..n).collect();
    let width = n + m;
    let mut out = Circuit::new(width);
    // CNOTs between T layers are scheduled together; each T layer stays whole.
    let mut pending: Vec<Gate> = Vec::new();
    let mut state = identity_matrix(n);
    for part in partition(&terms, m)? {
        let (target, copies) = place(&part, n)?;
        pending.extend(cnot_gates(&mat_mul(&target, &invert(&state)?), &data)?);
        let mut fan = Vec::new();
        for (a, combo) in copies.iter().enumerate() {
            for &w in combo {
                fan.push(Gate::Cnot { control: w, target: n + a });
            }
        }
        pending.extend(fan.iter().copied());
        out = out.then(&Circuit::schedule(width, &std::mem::take(&mut pending))?);
        let t_wires = (0..part.len() - copies.len()).chain((0..copies.len()).map(|a| n + a));
        let t_gates: Vec<Gate> = t_wires.map(|q| Gate::Single(SingleGate::T, q)).collect();
        out.push_layer(Layer::from_gates(width, &t_gates)?);
        pending = fan;
        state = target;
    }
    pending.extend(cnot_gates(&mat_mul(&pp.g, &invert(&state)?), &data)?);
    out = out.then(&Circuit::schedule(width, &pending)?);
    Ok(out.with_ancillas(m))
}

/// Data-register state for one part: its independent members on wires
/// `0..r` completed to an invertible matrix, plus for each remaining member
/// the data wires whose XOR gives it.
fn place(part: &[LinearFn], n: usize) -> Result<(Gf2Matrix, Vec<Vec<usize>>)> {
    let mut basis: Vec<LinearFn> = Vec::new();
    let mut rest = Vec::new();
    for &f in part {
        let mut trial = basis.clone();
        trial.push(f);
        if rank(&trial) > basis.len() {
            basis = trial;
        } else {
            rest.push(f);
        }
    }
    let r = basis.len();
    let mut full = basis.clone();
    for j in 0..n {
        let mut trial = full.clone();
        trial.push(LinearFn::var(j));
        if rank(&trial) > full.len() {
            full = trial;
        }
    }
    // express each dependent member in the basis: solve f = Σ c_i·basis_i
    let inv = invert(&transpose(&full))?;
    let copies = rest
        .iter()
        .map(|&f| {
            let coeffs = mat_vec(&inv, f);
            debug_assert!(coeffs >> r == 0);
            (0..r).filter(|i| coeffs >> i & 1 == 1).collect()
        })
        .collect();
    Ok((full, copies))
}

fn transpose(m: &[LinearFn]) -> Gf2Matrix {
    let n = m.len();
    (0..n)
        .map(|j| LinearFn((0..n).fold(0, |acc, i| acc | (m[i].0 >> j & 1) << i)))
        .collect()
}

/// `m·v` with `v` as a column vector.
fn mat_vec(m: &[LinearFn], v: LinearFn) -> u64 {
    m.iter().enumerate().fold(0, |acc, (i, r)| acc | ((r.0 & v.0).count_ones() as u64 & 1) << i)
}
