//! Named target unitaries.
//!
//! Controlled gates are `|0⟩⟨0|⊗I + |1⟩⟨1|⊗U` with the control on wire 0.
//! Classical reversible gates are permutation matrices; wire 0 is the most
//! significant bit of a basis index.
//!
//! - `toffoli-neg` fires when wire 0 is 1 and wire 1 is 0.
//! - `qft3` is the Fourier matrix `ω^{jk}/√8` without output bit reversal.
//! - `adder` acts on four wires `(a, b, c, d) ↦ (a, a⊕b, a⊕b⊕c, d⊕maj(a,b,c))`,
//!   a one-bit full adder with the carry written into a fourth wire.

use crate::error::{Error, Result};
use crate::gates::SingleGate;
use crate::matrix::RingMatrix;
use crate::ring::RingScalar;

pub const NAMES: [&str; 16] = [
    "cx", "cz", "cy", "ch", "cp", "cpdg", "cv", "ct", "w", "toffoli", "toffoli-neg", "fredkin", "peres",
    "qor", "qft3", "adder",
];

fn s(a: i64, b: i64, c: i64, d: i64, k: u32) -> RingScalar {
    RingScalar::from_parts(a, b, c, d, k)
}

fn one_qubit(e: [RingScalar; 4]) -> RingMatrix {
    RingMatrix::from_entries(1, e.to_vec()).expect("2x2")
}

pub fn controlled(u: &RingMatrix) -> RingMatrix {
    let n = u.n_qubits();
    let half = u.dim();
    RingMatrix::from_fn(n + 1, |i, j| match (i >= half, j >= half) {
        (false, false) if i == j => RingScalar::ONE,
        (true, true) => u.get(i - half, j - half),
        _ => RingScalar::ZERO,
    })
}

/// Permutation matrix sending basis state `x` to `f(x)`.
pub fn permutation(n: usize, f: impl Fn(usize) -> usize) -> RingMatrix {
    let image: Vec<usize> = (0..1 << n).map(&f).collect();
    RingMatrix::from_fn(n, |i, j| if image[j] == i { RingScalar::ONE } else { RingScalar::ZERO })
}

fn bits3(x: usize) -> (usize, usize, usize) {
    (x >> 2 & 1, x >> 1 & 1, x & 1)
}

fn from3(a: usize, b: usize, c: usize) -> usize {
    a << 2 | b << 1 | c
}

pub fn build_target(name: &str) -> Result<RingMatrix> {
    let z = RingScalar::ZERO;
    let one = RingScalar::ONE;
    Ok(match name {
        "cx" => controlled(&one_qubit([z, one, one, z])),
        "cz" => controlled(&one_qubit([one, z, z, -one])),
        "cy" => {
            let i = s(0, 0, 1, 0, 0);
            controlled(&one_qubit([z, -i, i, z]))
        }
        "ch" => controlled(&SingleGate::H.matrix()),
        "cp" => controlled(&SingleGate::P.matrix()),
        "cpdg" => controlled(&SingleGate::Pdg.matrix()),
        "ct" => controlled(&SingleGate::T.matrix()),
        "cv" => {
            // ½[[1+i, 1−i], [1−i, 1+i]]
            let p = s(1, 0, 1, 0, 2);
            let m = s(1, 0, -1, 0, 2);
            controlled(&one_qubit([p, m, m, p]))
        }
        "w" => {
            let r = RingScalar::INV_SQRT2;
            let e = [
                [one, z, z, z],
                [z, r, r, z],
                [z, r, -r, z],
                [z, z, z, one],
            ];
            RingMatrix::from_fn(2, |i, j| e[i][j])
        }
        "toffoli" => permutation(3, |x| {
            let (a, b, c) = bits3(x);
            from3(a, b, c ^ (a & b))
        }),
        "toffoli-neg" => permutation(3, |x| {
            let (a, b, c) = bits3(x);
            from3(a, b, c ^ (a & (1 - b)))
        }),
        "fredkin" => permutation(3, |x| {
            let (a, b, c) = bits3(x);
            if a == 1 { from3(a, c, b) } else { x }
        }),
        "peres" => permutation(3, |x| {
            let (a, b, c) = bits3(x);
            from3(a, a ^ b, c ^ (a & b))
        }),
        "qor" => permutation(3, |x| {
            let (a, b, c) = bits3(x);
            from3(a, b, c ^ (a | b))
        }),
        "qft3" => RingMatrix::from_fn(3, |j, k| RingScalar::new(RingScalar::omega_pow((j * k % 8) as u8).num(), 3)),
        "adder" => permutation(4, |x| {
            let (a, b, c, d) = (x >> 3 & 1, x >> 2 & 1, x >> 1 & 1, x & 1);
            let carry = (a & b) | (a & c) | (b & c);
            a << 3 | (a ^ b) << 2 | (a ^ b ^ c) << 1 | (d ^ carry)
        }),
        other => return Err(Error::UnknownTarget(other.to_string())),
    })
}
