//! Canonical representatives of unitaries up to qubit relabeling, inversion,
//! and global phase.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gates::{Circuit, Gate, SingleGate};
use crate::matrix::{basis_permutation, RingMatrix};
use crate::ring::RingScalar;

/// How a unitary was mapped onto its representative:
/// `rep = scale · permute_qubits(X, perm)` with `X = U†` if `inverted`, else `U`.
///
/// `scale` is the conjugated reference entry used for phase normalization.
/// It is a ring element of unit phase but arbitrary magnitude, so it cannot
/// be recorded as a power of ω; exact phases are recovered at verification.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassTransform {
    pub perm: Vec<usize>,
    pub inverted: bool,
    pub scale: RingScalar,
}

impl ClassTransform {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect(), inverted: false, scale: RingScalar::ONE }
    }
}

/// Permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn inverse_perm(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (q, &p) in perm.iter().enumerate() {
        inv[p] = q;
    }
    inv
}

/// `a ∘ b`: first apply `b`, then `a`.
pub fn compose_perm(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

/// Multiplies `u` by the conjugate of its first nonzero entry.
pub fn phase_normalize(u: &RingMatrix) -> Result<RingMatrix> {
    let m0 = u
        .entries()
        .iter()
        .find(|e| !e.is_zero())
        .ok_or_else(|| Error::Dimension("cannot phase-normalize the zero matrix".into()))?;
    Ok(u.scale(m0.conj()))
}

#[derive(Clone, Debug)]
pub struct Canonical {
    pub matrix: RingMatrix,
    pub transform: ClassTransform,
}

impl Canonical {
    pub fn key(&self) -> u128 {
        self.matrix.fingerprint()
    }
}

/// Precomputed variant tables for one register width.
///
/// In classed mode all `2·n!` relabel/inversion variants are compared; in
/// phase-only mode just the identity variant is.
#[derive(Clone, Debug)]
pub struct Canonicalizer {
    n: usize,
    classed: bool,
    perms: Vec<Vec<usize>>,
    // basis-index maps p with variant[i][j] = X[p[i]][p[j]]
    maps: Vec<Vec<usize>>,
}

impl Canonicalizer {
    pub fn new(n: usize, classed: bool) -> Self {
        let perms = if classed { permutations(n) } else { vec![(0..n).collect()] };
        let maps = perms
            .iter()
            .map(|p| inverse_perm(&basis_permutation(n, p)))
            .collect();
        Self { n, classed, perms, maps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn classed(&self) -> bool {
        self.classed
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    fn variant_count(&self) -> usize {
        if self.classed { 2 * self.perms.len() } else { 1 }
    }

    #[inline]
    fn entry(&self, u: &[RingScalar], v: usize, idx: usize) -> RingScalar {
        let dim = 1 << self.n;
        let (i, j) = (idx / dim, idx % dim);
        let np = self.perms.len();
        let p = &self.maps[v % np];
        if v < np {
            u[p[i] * dim + p[j]]
        } else {
            u[p[j] * dim + p[i]].conj()
        }
    }

    fn transform(&self, v: usize, scale: RingScalar) -> ClassTransform {
        let np = self.perms.len();
        ClassTransform { perm: self.perms[v % np].clone(), inverted: v >= np, scale }
    }

    /// Lex-least phase-normalized variant; the first minimum in
    /// (non-inverted, then inverted) × lexicographic-permutation order wins.
    pub fn canonicalize(&self, u: &RingMatrix) -> Result<Canonical> {
        if u.n_qubits() != self.n {
            return Err(Error::Dimension(format!(
                "{}-qubit matrix given to a {}-qubit canonicalizer",
                u.n_qubits(),
                self.n
            )));
        }
        let src = u.entries();
        let len = src.len();
        let mut best: Vec<RingScalar> = Vec::with_capacity(len);
        let mut best_v = 0;
        let mut best_scale = RingScalar::ZERO;
        for v in 0..self.variant_count() {
            let scale = match (0..len).map(|i| self.entry(src, v, i)).find(|e| !e.is_zero()) {
                Some(m0) => m0.conj(),
                None => return Err(Error::Dimension("cannot canonicalize the zero matrix".into())),
            };
            if v == 0 {
                best.extend((0..len).map(|i| self.entry(src, v, i) * scale));
                best_scale = scale;
                continue;
            }
            for idx in 0..len {
                let e = self.entry(src, v, idx) * scale;
                match e.cmp(&best[idx]) {
                    Ordering::Equal => continue,
                    Ordering::Greater => break,
                    Ordering::Less => {
                        best[idx] = e;
                        for k in idx + 1..len {
                            best[k] = self.entry(src, v, k) * scale;
                        }
                        best_v = v;
                        best_scale = scale;
                        break;
                    }
                }
            }
        }
        Ok(Canonical {
            matrix: RingMatrix::from_entries(self.n, best).expect("square"),
            transform: self.transform(best_v, best_scale),
        })
    }

    pub fn key(&self, u: &RingMatrix) -> Result<u128> {
        self.canonicalize(u).map(|c| c.key())
    }
}

/// One-shot canonicalization in classed mode.
pub fn canonical_rep(u: &RingMatrix) -> Result<(RingMatrix, ClassTransform)> {
    let c = Canonicalizer::new(u.n_qubits(), true).canonicalize(u)?;
    Ok((c.matrix, c.transform))
}

/// Relabel, then invert if the transform says so. The result implements the
/// representative up to global phase, at the same depth.
pub fn apply_transform(c: &Circuit, t: &ClassTransform) -> Result<Circuit> {
    let r = c.relabel(&t.perm)?;
    Ok(if t.inverted { r.invert() } else { r })
}

/// Appends `j` copies of `(H P†)³` on wire 0; each copy multiplies the
/// implemented unitary by `ω^{-1}`, so a circuit for `ω^j·U` becomes one
/// for `U` exactly.
pub fn exact_phase_fix(c: &Circuit, j: u8) -> Circuit {
    let mut gates = c.gates();
    for _ in 0..j % 8 {
        for _ in 0..3 {
            gates.push(Gate::Single(SingleGate::H, 0));
            gates.push(Gate::Single(SingleGate::Pdg, 0));
        }
    }
    let tail = Circuit::schedule(c.n_qubits(), &gates[c.gate_count()..]).expect("wire 0 exists");
    c.then(&tail)
}
