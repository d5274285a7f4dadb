//! Peephole re-synthesis: windows of a circuit touching few wires are
//! replaced by depth-optimal circuits found with [`mitm_search`].

use crate::db::CircuitDatabase;
use crate::error::Result;
use crate::gates::{Circuit, Gate};

use super::{mitm_search, SearchResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeepholeOptions {
    /// Most layers in one window.
    pub window: usize,
    /// Most wires in one window.
    pub max_width: usize,
    /// Upper bound on full scans.
    pub max_passes: usize,
}

impl Default for PeepholeOptions {
    fn default() -> Self {
        Self { window: 4, max_width: 2, max_passes: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeepholeOutcome {
    pub circuit: Circuit,
    /// `evaluate(circuit) = ω^phase_exponent · evaluate(input)`.
    pub phase_exponent: u8,
    pub replacements: usize,
    pub passes: usize,
}

fn wires_of(g: &Gate) -> Vec<usize> {
    match *g {
        Gate::Single(_, q) => vec![q],
        Gate::Cnot { control, target } => vec![control, target],
    }
}

fn remap(g: Gate, f: impl Fn(usize) -> usize) -> Gate {
    match g {
        Gate::Single(s, q) => Gate::Single(s, f(q)),
        Gate::Cnot { control, target } => Gate::Cnot { control: f(control), target: f(target) },
    }
}

/// Smallest database at least `width` wires wide.
fn pick_db<'a>(dbs: &[&'a CircuitDatabase], width: usize) -> Option<&'a CircuitDatabase> {
    dbs.iter().copied().filter(|d| d.n_qubits() >= width).min_by_key(|d| d.n_qubits())
}

/// Subsets of `0..n` with `1..=k` elements, larger first.
fn wire_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..1 << n)
        .filter(|m| m.count_ones() as usize <= k)
        .map(|m| (0..n).filter(|q| m >> q & 1 == 1).collect())
        .collect();
    out.sort_by(|a: &Vec<usize>, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

/// Tries to shrink the gates of layers `s..s + w` lying on `wires`; returns
/// the rewritten circuit and phase.
fn try_window(
    c: &Circuit,
    s: usize,
    w: usize,
    wires: &[usize],
    dbs: &[&CircuitDatabase],
) -> Result<Option<(Circuit, u8)>> {
    let n = c.n_qubits();
    let layers = c.layers();
    let range: Vec<Gate> = layers[s..s + w].iter().flat_map(|l| l.gates()).collect();
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for g in &range {
        let ws = wires_of(g);
        match ws.iter().filter(|q| wires.contains(q)).count() {
            0 => outside.push(*g),
            k if k == ws.len() => inside.push(*g),
            _ => return Ok(None),
        }
    }
    if inside.is_empty() {
        return Ok(None);
    }
    let Some(db) = pick_db(dbs, wires.len()) else { return Ok(None) };
    // pad with other wires up to the database width
    let mut local = wires.to_vec();
    for q in 0..n {
        if local.len() == db.n_qubits() {
            break;
        }
        if !local.contains(&q) {
            local.push(q);
        }
    }
    if local.len() < db.n_qubits() {
        return Ok(None);
    }
    let pos = |q: usize| local.iter().position(|&x| x == q).expect("window wire");
    let sub = Circuit::schedule(local.len(), &inside.iter().map(|&g| remap(g, pos)).collect::<Vec<_>>())?;
    let bound = sub.depth().min(2 * db.depth());
    let SearchResult::Found(f) = mitm_search(&sub.evaluate(), db, bound)? else { return Ok(None) };
    if (f.depth, f.circuit.gate_count()) >= (sub.depth(), sub.gate_count()) {
        return Ok(None);
    }
    let mut gates: Vec<Gate> = layers[..s].iter().flat_map(|l| l.gates()).collect();
    gates.extend(f.circuit.gates().into_iter().map(|g| remap(g, |q| local[q])));
    gates.extend(outside);
    gates.extend(layers[s + w..].iter().flat_map(|l| l.gates()));
    let out = Circuit::schedule(n, &gates)?.with_ancillas(c.n_ancillas());
    if (out.depth(), out.gate_count()) > (c.depth(), c.gate_count()) {
        return Ok(None);
    }
    Ok(Some((out, f.phase_exponent)))
}

/// Left-to-right window scan repeated until no window improves or the pass
/// budget runs out. `dbs` are classed databases of the widths to use.
pub fn peephole(c: &Circuit, dbs: &[&CircuitDatabase], opts: &PeepholeOptions) -> Result<PeepholeOutcome> {
    let mut cur = c.rescheduled();
    let subsets = wire_subsets(c.n_qubits(), opts.max_width);
    let mut phase = 0u8;
    let mut replacements = 0;
    let mut passes = 0;
    while passes < opts.max_passes {
        passes += 1;
        let mut changed = false;
        let mut s = 0;
        while s < cur.depth() {
            let mut hit = None;
            'scan: for w in (1..=opts.window.min(cur.depth() - s)).rev() {
                for wires in &subsets {
                    if let Some(r) = try_window(&cur, s, w, wires, dbs)? {
                        hit = Some(r);
                        break 'scan;
                    }
                }
            }
            match hit {
                Some((next, k)) => {
                    cur = next;
                    phase = (phase + k) % 8;
                    replacements += 1;
                    changed = true;
                }
                None => s += 1,
            }
        }
        if !changed {
            break;
        }
    }
    Ok(PeepholeOutcome { circuit: cur, phase_exponent: phase, replacements, passes })
}
