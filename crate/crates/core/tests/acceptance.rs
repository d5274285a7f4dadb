//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p ctsynth --test acceptance`. Criterion 11
//! (long runs) is skipped unless `CTSYNTH_STRETCH=1`. Failing lines make the
//! process exit nonzero only with `CTSYNTH_ACCEPTANCE_STRICT=1`, so a plain
//! workspace test run still reaches the remaining test targets.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ctsynth::canon::Canonicalizer;
use ctsynth::db::{CircuitDatabase, DbMode};
use ctsynth::gates::{enumerate_layers, SingleGate};
use ctsynth::phasepoly::{extract, parallelize, tdepth_bound, LinearFn};
use ctsynth::search::{
    ancilla_phase, controlled_cost, mitm_search, peephole, AncillaIndex, CliffordSet, Found, Objective,
    PeepholeOptions, SearchResult, TDepthSearch,
};
use ctsynth::targets::build_target;
use ctsynth::{Circuit, Gate, GateSet, RingMatrix, RingScalar};

const NUMERIC_TOL: f64 = 1e-9;
const HOMOMORPHISM_SAMPLES: usize = 1000;
const LIMIT_2Q_DB: Duration = Duration::from_secs(10 * 60);
const LIMIT_3Q_DB: Duration = Duration::from_secs(2 * 60 * 60);
const LIMIT_3Q_SEARCH: Duration = Duration::from_secs(60 * 60);
const LIMIT_ANCILLA: Duration = Duration::from_secs(60 * 60);
const TPAR_CASES: usize = 500;

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, what: &str) {
        println!("[{}] {id} {what}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures.push(format!("{id} {what}"));
        }
    }

    fn skip(&self, id: &str, what: &str) {
        println!("[SKIP] {id} {what}");
    }
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

type C64 = (f64, f64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn close(a: C64, b: C64) -> bool {
    (a.0 - b.0).abs() <= NUMERIC_TOL && (a.1 - b.1).abs() <= NUMERIC_TOL
}

fn numeric(m: &RingMatrix) -> Vec<C64> {
    m.entries().iter().map(RingScalar::to_complex).collect()
}

fn numeric_matmul(a: &[C64], b: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            for j in 0..dim {
                let p = cmul(a[i * dim + k], b[k * dim + j]);
                out[i * dim + j].0 += p.0;
                out[i * dim + j].1 += p.1;
            }
        }
    }
    out
}

fn random_layered(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Circuit {
    let ls = enumerate_layers(n, GateSet::CLIFFORD_T).unwrap();
    Circuit::from_layers(n, (0..depth).map(|_| ls[rng.gen_range(0..ls.len())].clone()).collect()).unwrap()
}

fn criterion_1(r: &mut Report) {
    let h = SingleGate::H.matrix();
    let pdg = SingleGate::Pdg.matrix();
    let hp = h.matmul(&pdg).unwrap();
    let cube = hp.matmul(&hp).unwrap().matmul(&hp).unwrap();
    // e^{-iπ/4} = ω⁷
    let phase_ok = cube == RingMatrix::identity(1).scale_phase(7);
    let h2 = h.matmul(&h).unwrap().is_identity();
    let t = SingleGate::T.matrix();
    let mut t8 = RingMatrix::identity(1);
    for _ in 0..8 {
        t8 = t8.matmul(&t).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for _ in 0..HOMOMORPHISM_SAMPLES {
        let s = |rng: &mut ChaCha8Rng| {
            RingScalar::from_parts(
                rng.gen_range(-9..10),
                rng.gen_range(-9..10),
                rng.gen_range(-9..10),
                rng.gen_range(-9..10),
                rng.gen_range(0..6),
            )
        };
        let (a, b) = (s(&mut rng), s(&mut rng));
        let (ca, cb) = (a.to_complex(), b.to_complex());
        let sum = (a + b).to_complex();
        if !close((a * b).to_complex(), cmul(ca, cb)) || !close(sum, (ca.0 + cb.0, ca.1 + cb.1)) {
            bad += 1;
        }
        let x = random_layered(&mut rng, 2, 3).evaluate();
        let y = random_layered(&mut rng, 2, 3).evaluate();
        let lhs = numeric(&x.matmul(&y).unwrap());
        let rhs = numeric_matmul(&numeric(&x), &numeric(&y), 4);
        if !lhs.iter().zip(&rhs).all(|(p, q)| close(*p, *q)) {
            bad += 1;
        }
    }
    r.line(
        "1",
        phase_ok && h2 && t8.is_identity() && bad == 0,
        &format!(
            "ring exactness: (HP†)³ = ω⁷·I {phase_ok}, H² = I {h2}, T⁸ = I {}, numeric mismatches {bad}/{} (tol {NUMERIC_TOL:e})",
            t8.is_identity(),
            HOMOMORPHISM_SAMPLES
        ),
    );
}

fn criterion_2(r: &mut Report) {
    let got: Vec<usize> = (1..=4).map(|n| enumerate_layers(n, GateSet::CLIFFORD_T).unwrap().len()).collect();
    r.line("2", got == [6, 38, 252, 1740], &format!("layer counts {got:?} (want [6, 38, 252, 1740])"));
}

/// Per-depth counts with the empty circuit counted at depth one.
fn table_counts(db: &CircuitDatabase) -> Vec<usize> {
    db.level_counts().iter().enumerate().map(|(i, &c)| c + usize::from(i == 0)).collect()
}

fn criterion_3(r: &mut Report) -> CircuitDatabase {
    let start = Instant::now();
    let db = CircuitDatabase::generate(2, GateSet::CLIFFORD_T, 5, DbMode::Classed).unwrap();
    let t = start.elapsed();
    let got = table_counts(&db);
    let want = [14, 104, 901, 6180, 37878];
    r.line(
        "3",
        got == want && t <= LIMIT_2Q_DB,
        &format!("2-qubit database {got:?} (want {want:?}) in {} (limit {})", secs(t), secs(LIMIT_2Q_DB)),
    );
    db
}

fn criterion_4(r: &mut Report) -> CircuitDatabase {
    let start = Instant::now();
    let db = CircuitDatabase::generate(3, GateSet::CLIFFORD_T, 4, DbMode::Classed).unwrap();
    let t = start.elapsed();
    let got = table_counts(&db);
    let want = [36, 1110, 41338, 1316882];
    r.line(
        "4",
        got == want && t <= LIMIT_3Q_DB,
        &format!("3-qubit database {got:?} (want {want:?}) in {} (limit {})", secs(t), secs(LIMIT_3Q_DB)),
    );
    db
}

fn criterion_5(r: &mut Report, db2: &CircuitDatabase) {
    let b = common::brute(2, 3);
    let canon = Canonicalizer::new(2, true);
    let mut seen: HashSet<u128> = HashSet::new();
    seen.insert(canon.key(&RingMatrix::identity(2)).unwrap());
    let mut diffs = 0;
    for d in 1..=3 {
        let mut keys = HashSet::new();
        for u in &b.by_depth[d] {
            let k = canon.key(u).unwrap();
            if !seen.contains(&k) {
                keys.insert(k);
            }
        }
        seen.extend(keys.iter().copied());
        let stored: HashSet<u128> = db2.level(d).keys().iter().copied().collect();
        diffs += keys.symmetric_difference(&stored).count();
    }
    r.line("5", diffs == 0, &format!("brute-force class keys vs generation, depths 1-3: {diffs} discrepancies"));
}

fn verified(f: &Found, u: &RingMatrix) -> bool {
    f.circuit.evaluate() == u.scale_phase(f.phase_exponent)
}

#[allow(clippy::too_many_arguments)]
fn expect_found(r: &mut Report, id: &str, name: &str, res: &SearchResult, u: &RingMatrix, depth: usize, t: Option<usize>, extra: &str) {
    match res.found() {
        Some(f) => {
            let ok = verified(f, u) && f.depth == depth && t.is_none_or(|t| f.t_depth == t);
            let want_t = t.map_or(String::new(), |t| format!(" / T-depth {t}"));
            r.line(
                id,
                ok,
                &format!(
                    "{name}: depth {} / T-depth {} (want {depth}{want_t}), verified {}{extra}",
                    f.depth,
                    f.t_depth,
                    verified(f, u)
                ),
            );
        }
        None => r.line(id, false, &format!("{name}: not found{extra}")),
    }
}

fn criterion_6(r: &mut Report, db2: &CircuitDatabase, db3: &CircuitDatabase) {
    for (name, d, t) in [
        ("cx", 1, None),
        ("cy", 3, None),
        ("cz", 3, None),
        ("ch", 7, Some(2)),
        ("cp", 4, Some(2)),
        ("cv", 5, Some(2)),
        ("w", 9, Some(1)),
    ] {
        let u = build_target(name).unwrap();
        let res = mitm_search(&u, db2, 10).unwrap();
        expect_found(r, "6", name, &res, &u, d, t, "");
    }
    let mut toffoli: Option<Found> = None;
    for name in ["toffoli", "toffoli-neg", "qor", "peres"] {
        let u = build_target(name).unwrap();
        let start = Instant::now();
        let res = mitm_search(&u, db3, 8).unwrap();
        let el = start.elapsed();
        let extra = format!(" in {} (limit {})", secs(el), secs(LIMIT_3Q_SEARCH));
        if el > LIMIT_3Q_SEARCH {
            r.line("6", false, &format!("{name}: over time{extra}"));
            continue;
        }
        expect_found(r, "6", name, &res, &u, 8, Some(4), &extra);
        if name == "toffoli" {
            toffoli = res.found().cloned();
        }
    }
    // controlled swap = CX(2→1) · Toffoli · CX(2→1)
    let fredkin = build_target("fredkin").unwrap();
    match toffoli {
        Some(f) => {
            let cx = Circuit::schedule(3, &[Gate::Cnot { control: 2, target: 1 }]).unwrap();
            let c = cx.then(&f.circuit).then(&cx);
            let ok_eq = c.evaluate().phase_relative_to(&fredkin).is_some();
            r.line(
                "6",
                ok_eq && c.depth() <= 10 && c.t_depth() == 4,
                &format!(
                    "fredkin via CX·Toffoli·CX: depth {} (want ≤ 10) / T-depth {} (want 4), verified {ok_eq}",
                    c.depth(),
                    c.t_depth()
                ),
            );
        }
        None => r.line("6", false, "fredkin: no Toffoli circuit to build from"),
    }
}

fn criterion_7(r: &mut Report) {
    let c1 = CliffordSet::generate(1, false).unwrap().len();
    let cs = CliffordSet::generate(2, false).unwrap();
    let mut s = TDepthSearch::new(&cs);
    let ch = build_target("ch").unwrap();
    let cz = build_target("cz").unwrap();
    let fch = s.search(&ch, 2).unwrap();
    let fcz = s.search(&cz, 2).unwrap();
    let t = |res: &SearchResult, u: &RingMatrix| {
        res.found().filter(|f| verified(f, u)).map(|f| (f.t_depth, f.depth))
    };
    let (tch, tcz) = (t(&fch, &ch), t(&fcz, &cz));
    r.line(
        "7",
        c1 == 24 && cs.len() == 11520 && tch.map(|x| x.0) == Some(1) && tcz.map(|x| x.0) == Some(0),
        &format!(
            "T-depth engine: |C1| = {c1} (want 24), |C2| = {} (want 11520), ch (T-depth, depth) {tch:?} (want T-depth 1), cz {tcz:?} (want T-depth 0)",
            cs.len()
        ),
    );
}

fn criterion_8(r: &mut Report) {
    let start = Instant::now();
    let db = CircuitDatabase::generate(3, GateSet::CLIFFORD_T, 3, DbMode::Full).unwrap();
    let idx = AncillaIndex::build(&db, 1, Objective::TDepth).unwrap();
    for name in ["cp", "cv"] {
        let u = build_target(name).unwrap();
        let res = idx.search(&u, 6).unwrap();
        let el = start.elapsed();
        match res.found() {
            Some(f) => {
                let embedded = u.tensor(&RingMatrix::identity(1));
                let ok_v = ancilla_phase(&f.circuit.evaluate(), &embedded, 1) == Some(f.phase_exponent);
                r.line(
                    "8",
                    ok_v && f.t_depth == 1 && f.depth == 5 && el <= LIMIT_ANCILLA,
                    &format!(
                        "{name} with 1 ancilla: T-depth {} / depth {} (want 1 / 5), verified {ok_v}, {} cumulative (limit {})",
                        f.t_depth,
                        f.depth,
                        secs(el),
                        secs(LIMIT_ANCILLA)
                    ),
                );
            }
            None => r.line("8", false, &format!("{name} with 1 ancilla: not found")),
        }
    }
}

fn criterion_9(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    for _ in 0..TPAR_CASES {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(0..=3);
        let len = rng.gen_range(0..=25);
        let gates: Vec<Gate> = (0..len)
            .map(|_| {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a == b || rng.gen_bool(0.5) {
                    Gate::Single(SingleGate::T, a)
                } else {
                    Gate::Cnot { control: a, target: b }
                }
            })
            .collect();
        let c = Circuit::schedule(n, &gates).unwrap();
        let k = extract(&c).unwrap().terms.len();
        let p = parallelize(&c, m).unwrap();
        let embedded = c.evaluate().tensor(&RingMatrix::identity(m));
        let restored = if m == 0 {
            p.evaluate() == c.evaluate()
        } else {
            ancilla_phase(&p.evaluate(), &embedded, m) == Some(0)
        };
        if !restored || p.t_depth() > tdepth_bound(k, m) {
            violations += 1;
        }
    }
    // seven distinct parities of three wires
    let mut gates = Vec::new();
    for f in 1u32..8 {
        let p = f.trailing_zeros() as usize;
        let others: Vec<usize> = (0..3).filter(|&j| j != p && f >> j & 1 == 1).collect();
        gates.extend(others.iter().map(|&j| Gate::Cnot { control: j, target: p }));
        gates.push(Gate::Single(SingleGate::T, p));
        gates.extend(others.iter().map(|&j| Gate::Cnot { control: j, target: p }));
    }
    let seven = Circuit::schedule(3, &gates).unwrap();
    let terms: HashSet<LinearFn> = extract(&seven).unwrap().terms.into_iter().collect();
    let p = parallelize(&seven, 4).unwrap();
    r.line(
        "9",
        violations == 0 && terms.len() == 7 && p.t_depth() == 1,
        &format!(
            "T-parallelization: {violations} violations in {TPAR_CASES} random circuits; 7 distinct terms with m = 4 give T-depth {} (want 1)",
            p.t_depth()
        ),
    );
}

fn criterion_10(r: &mut Report) {
    let cols = [[2, 2, 1, 2], [0, 0, 2, 3], [2, 0, 6, 7], [4, 2, 12, 9]];
    let mut ok = true;
    for (i, col) in cols.iter().enumerate() {
        let mut e = [0u64; 4];
        e[i] = 1;
        ok &= controlled_cost(e).0 == *col;
    }
    let x = [3, 5, 7, 11];
    ok &= controlled_cost(x).1 == 3 + 2 * 5 + 3 * 7 + 5 * 11;
    ok &= controlled_cost([0; 4]) == ([0; 4], 0);
    r.line("10", ok, "cost matrix columns and T-depth bound x_H + 2x_P + 3x_C + 5x_T");
}

fn criterion_11(r: &mut Report, db3: &CircuitDatabase) {
    if std::env::var("CTSYNTH_STRETCH").as_deref() != Ok("1") {
        r.skip("11", "long runs (set CTSYNTH_STRETCH=1)");
        return;
    }
    let start = Instant::now();
    let cs3 = CliffordSet::generate(3, true).unwrap();
    let count = cs3.len();
    r.line("11", count == 92_897_280, &format!("3-qubit Clifford count {count} (want 92897280) in {}", secs(start.elapsed())));

    // controlled-T seeded from Fredkin · (I⊗I⊗T) · Fredkin
    let u = build_target("toffoli").unwrap();
    if let Some(f) = mitm_search(&u, db3, 8).unwrap().found() {
        let cx = Circuit::schedule(3, &[Gate::Cnot { control: 2, target: 1 }]).unwrap();
        let fred = cx.then(&f.circuit).then(&cx);
        let t = Circuit::schedule(3, &[Gate::Single(SingleGate::T, 2)]).unwrap();
        let seed = fred.then(&t).then(&fred.invert());
        let d1 = CircuitDatabase::generate(1, GateSet::CLIFFORD_T, 4, DbMode::Classed).unwrap();
        let d2 = CircuitDatabase::generate(2, GateSet::CLIFFORD_T, 4, DbMode::Classed).unwrap();
        let opts = PeepholeOptions { window: 6, max_width: 3, max_passes: 8 };
        let out = peephole(&seed, &[&d1, &d2, db3], &opts).unwrap();
        let before = seed.cost_vector();
        let after = out.circuit.cost_vector();
        r.line(
            "11",
            after[3] == 9 && after[2] == 12 && out.circuit.t_depth() == 5,
            &format!(
                "controlled-T peephole: T {}→{} (want 15→9), CNOT {}→{} (want 16→12), T-depth {}→{} (want 9→5)",
                before[3],
                after[3],
                before[2],
                after[2],
                seed.t_depth(),
                out.circuit.t_depth()
            ),
        );
    }

    let start = Instant::now();
    let db5 = CircuitDatabase::generate(3, GateSet::CLIFFORD_T, 5, DbMode::Classed).unwrap();
    let got = table_counts(&db5);
    r.line("11", got.get(4) == Some(&36_042_958), &format!("3-qubit depth-5 database {got:?} in {}", secs(start.elapsed())));
    let res = mitm_search(&u, &db5, 9).unwrap();
    let tof9 = res.found().map(|f| (f.depth, f.t_depth));
    let mut s = TDepthSearch::new(&cs3);
    let tmin = s.search(&u, 3).unwrap().found().map(|f| (f.t_depth, f.depth));
    r.line("11", tmin.map(|x| x.0) == Some(3), &format!("Toffoli depth-9 search {tof9:?}, T-depth search {tmin:?} (want T-depth 3, depth 9)"));
    let qft = build_target("qft3").unwrap();
    let none = matches!(mitm_search(&qft, &db5, 10).unwrap(), SearchResult::NotFound { proof_bound: 10 });
    r.line("11", none, "QFT-3 has no circuit of depth at most 10");
}

fn main() {
    let mut r = Report { failures: Vec::new() };
    criterion_1(&mut r);
    criterion_2(&mut r);
    let db2 = criterion_3(&mut r);
    let db3 = criterion_4(&mut r);
    criterion_5(&mut r, &db2);
    criterion_6(&mut r, &db2, &db3);
    criterion_7(&mut r);
    criterion_8(&mut r);
    criterion_9(&mut r);
    criterion_10(&mut r);
    criterion_11(&mut r, &db3);
    if r.failures.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failing line(s)", r.failures.len());
        for f in &r.failures {
            println!("  {f}");
        }
        if std::env::var("CTSYNTH_ACCEPTANCE_STRICT").as_deref() == Ok("1") {
            std::process::exit(1);
        }
    }
}
