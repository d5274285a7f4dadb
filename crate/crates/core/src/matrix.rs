//! Exact `2^n × 2^n` matrices over Z[1/√2, i].
//!
//! Wire `q` of an `n`-qubit register is bit `n - 1 - q` of a basis index,
//! so wire 0 is the most significant qubit and `tensor(A, B)` places `A`
//! on the lower-numbered wires.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::RingScalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingMatrix {
    n: usize,
    entries: Vec<RingScalar>,
}

/// Basis-index image of a qubit relabeling: wire `q` moves to `perm[q]`.
pub fn basis_permutation(n: usize, perm: &[usize]) -> Vec<usize> {
    let dim = 1usize << n;
    (0..dim)
        .map(|x| {
            let mut y = 0;
            for (q, &target) in perm.iter().enumerate() {
                if x >> (n - 1 - q) & 1 == 1 {
                    y |= 1 << (n - 1 - target);
                }
            }
            y
        })
        .collect()
}

impl RingMatrix {
    pub fn zero(n: usize) -> Self {
        Self { n, entries: vec![RingScalar::ZERO; 1 << (2 * n)] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        let dim = m.dim();
        for i in 0..dim {
            m.entries[i * dim + i] = RingScalar::ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries; the length must be `4^n`.
    pub fn from_entries(n: usize, entries: Vec<RingScalar>) -> Result<Self> {
        if entries.len() != 1 << (2 * n) {
            return Err(Error::Dimension(format!(
                "{} entries do not form a {n}-qubit matrix",
                entries.len()
            )));
        }
        Ok(Self { n, entries })
    }

    /// Builds an `n`-qubit matrix from `f(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> RingScalar) -> Self {
        let dim = 1 << n;
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> RingScalar {
        self.entries[row * self.dim() + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: RingScalar) {
        let dim = self.dim();
        self.entries[row * dim + col] = v;
    }

    pub fn entries(&self) -> &[RingScalar] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [RingScalar] {
        &mut self.entries
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "cannot multiply {}-qubit and {}-qubit matrices",
                self.n, other.n
            )));
        }
        let dim = self.dim();
        let mut out = Self::zero(self.n);
        for i in 0..dim {
            for k in 0..dim {
                let x = self.entries[i * dim + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..dim {
                    let y = other.entries[k * dim + j];
                    if !y.is_zero() {
                        let e = &mut out.entries[i * dim + j];
                        *e = *e + x * y;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let dim = self.dim();
        Self::from_fn(self.n, |i, j| self.entries[j * dim + i].conj())
    }

    /// Kronecker product; `self` occupies the leading wires.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.dim(), other.dim());
        Self::from_fn(self.n + other.n, |i, j| {
            let x = self.entries[(i / db) * da + j / db];
            if x.is_zero() {
                return RingScalar::ZERO;
            }
            x * other.entries[(i % db) * db + j % db]
        })
    }

    /// Simultaneous row and column permutation induced by moving wire `q`
    /// to wire `perm[q]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(self.n, perm)?;
        let pi = basis_permutation(self.n, perm);
        let mut out = Self::zero(self.n);
        let dim = self.dim();
        for x in 0..dim {
            for y in 0..dim {
                out.entries[pi[x] * dim + pi[y]] = self.entries[x * dim + y];
            }
        }
        Ok(out)
    }

    /// Multiplies every entry by `ω^j`.
    pub fn scale_phase(&self, j: u8) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|e| e.mul_omega(j)).collect(),
        }
    }

    pub fn scale(&self, s: RingScalar) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(|&e| e * s).collect() }
    }

    /// Row-major first-difference order.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.entries.cmp(&other.entries))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// `Some(k)` when `self == ω^k · other`.
    pub fn phase_relative_to(&self, other: &Self) -> Option<u8> {
        if self.n != other.n {
            return None;
        }
        let idx = other.entries.iter().position(|e| !e.is_zero())?;
        let k = self.entries[idx].phase_relative_to(&other.entries[idx])?;
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(x, y)| *x == y.mul_omega(k))
            .then_some(k)
    }

    /// Deterministic 128-bit digest of the exact entries.
    pub fn fingerprint(&self) -> u128 {
        fingerprint_entries(self.n, &self.entries)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson {
            n: self.n,
            entries: self.entries.clone(),
        })
        .expect("matrix serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: MatrixJson =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("matrix JSON: {e}")))?;
        Self::from_entries(j.n, j.entries)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    entries: Vec<RingScalar>,
}

pub(crate) fn check_permutation(n: usize, perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::Dimension(format!("permutation of length {} on {n} qubits", perm.len())));
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Dimension(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

#[inline]
fn fmix(mut h: u64) -> u64 {
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    h ^ (h >> 33)
}

pub(crate) fn fingerprint_entries(n: usize, entries: &[RingScalar]) -> u128 {
    let mut h1: u64 = 0x243f_6a88_85a3_08d3 ^ n as u64;
    let mut h2: u64 = 0x1319_8a2e_0370_7344 ^ (n as u64).rotate_left(32);
    for e in entries {
        let num = e.num();
        for w in [e.sde() as u64, num.a as u64, num.b as u64, num.c as u64, num.d as u64] {
            h1 = (h1 ^ w).wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(27);
            h2 = (h2 ^ w.rotate_left(17)).wrapping_mul(0xd6e8_feb8_6659_fd93).rotate_left(31);
        }
    }
    let lo = fmix(h1 ^ h2.rotate_left(13));
    let hi = fmix(h2 ^ lo);
    ((hi as u128) << 64) | lo as u128
}
