//! Line-oriented circuit text.
//!
//! ```text
//! # comment
//! qubits 3
//! ancillas 1
//! H 0
//! CNOT 0 1
//! TDG 2
//! ```
//!
//! Gate lines are ASAP-scheduled on parse. Emitted text marks each layer
//! with a `# -- layer d` comment.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::gates::{Circuit, Gate, SingleGate};

fn single(name: &str) -> Option<SingleGate> {
    Some(match name {
        "H" => SingleGate::H,
        "P" | "S" => SingleGate::P,
        "PDG" | "SDG" => SingleGate::Pdg,
        "T" => SingleGate::T,
        "TDG" => SingleGate::Tdg,
        _ => return None,
    })
}

fn token(g: SingleGate) -> &'static str {
    match g {
        SingleGate::I => "I",
        SingleGate::H => "H",
        SingleGate::P => "P",
        SingleGate::Pdg => "PDG",
        SingleGate::T => "T",
        SingleGate::Tdg => "TDG",
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let err = |line: usize, msg: String| Error::Format(format!("line {line}: {msg}"));
    let mut qubits: Option<usize> = None;
    let mut ancillas: Option<usize> = None;
    let mut gates = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        let head = words[0].to_ascii_uppercase();
        let nums = words[1..]
            .iter()
            .map(|w| w.parse::<usize>().map_err(|_| err(line, format!("bad number {w:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let arity = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(err(line, format!("{head} takes {k} argument(s)")))
            }
        };
        match head.as_str() {
            "QUBITS" => {
                arity(1)?;
                if qubits.is_some() || !gates.is_empty() {
                    return Err(err(line, "qubits must appear once, before gates".into()));
                }
                if nums[0] == 0 {
                    return Err(err(line, "need at least one qubit".into()));
                }
                qubits = Some(nums[0]);
            }
            "ANCILLAS" => {
                arity(1)?;
                if qubits.is_none() || ancillas.is_some() || !gates.is_empty() {
                    return Err(err(line, "ancillas must follow qubits, before gates".into()));
                }
                ancillas = Some(nums[0]);
            }
            _ => {
                let n = qubits.ok_or_else(|| err(line, "gate before qubits header".into()))?;
                let gate = if head == "CNOT" || head == "CX" {
                    arity(2)?;
                    if nums[0] == nums[1] {
                        return Err(err(line, "CNOT control equals target".into()));
                    }
                    Gate::Cnot { control: nums[0], target: nums[1] }
                } else {
                    let g = single(&head).ok_or_else(|| err(line, format!("unknown gate {:?}", words[0])))?;
                    arity(1)?;
                    Gate::Single(g, nums[0])
                };
                if let Some(&q) = nums.iter().find(|&&q| q >= n) {
                    return Err(err(line, format!("wire {q} out of range for {n} qubits")));
                }
                gates.push(gate);
            }
        }
    }
    let n = qubits.ok_or_else(|| Error::Format("missing qubits header".into()))?;
    let k = ancillas.unwrap_or(0);
    if k >= n && k > 0 {
        return Err(Error::Format(format!("{k} ancillas leave no data wires among {n}")));
    }
    Ok(Circuit::schedule(n, &gates)?.with_ancillas(k))
}

pub fn emit_circuit(c: &Circuit) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "qubits {}", c.n_qubits());
    if c.n_ancillas() > 0 {
        let _ = writeln!(s, "ancillas {}", c.n_ancillas());
    }
    for (d, layer) in c.layers().iter().enumerate() {
        let _ = writeln!(s, "# -- layer {}", d + 1);
        for g in layer.gates() {
            let _ = match g {
                Gate::Single(g, q) => writeln!(s, "{} {q}", token(g)),
                Gate::Cnot { control, target } => writeln!(s, "CNOT {control} {target}"),
            };
        }
    }
    s
}
