use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use ctsynth::canon::exact_phase_fix;
use ctsynth::db::{CircuitDatabase, DbMode, GenOptions};
use ctsynth::phasepoly::{extract, parallelize_with, tdepth_bound, ParallelizeOptions};
use ctsynth::search::{
    ancilla_phase, controlled_cost, mitm_search, peephole, AncillaIndex, CliffordSet, Objective, PeepholeOptions,
    SearchResult, TDepthSearch,
};
use ctsynth::targets::build_target;
use ctsynth::text::{emit_circuit, parse_circuit};
use ctsynth::{Circuit, Error, GateSet, RingMatrix};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_FORMAT: u8 = 3;
const EXIT_NOT_FOUND: u8 = 4;
const EXIT_BUDGET: u8 = 5;

#[derive(Parser)]
#[command(name = "ctsynth", version, about = "Exact Clifford+T circuit synthesis")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Classed,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchMode {
    Depth,
    Tdepth,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Depth,
    Tdepth,
}

#[derive(Clone, Copy, ValueEnum)]
enum GateSetArg {
    CliffordT,
    Clifford,
}

#[derive(clap::Args)]
struct TargetArgs {
    /// Named target (cx, cz, cy, ch, cp, cpdg, cv, ct, w, toffoli, ...).
    #[arg(long, conflicts_with = "matrix")]
    target: Option<String>,
    /// JSON matrix file.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a circuit database and write it as a QCDB1 file.
    Gen {
        #[arg(short = 'n', long)]
        qubits: usize,
        #[arg(short = 'd', long)]
        depth: usize,
        #[arg(long, value_enum, default_value = "classed")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "clifford-t")]
        gates: GateSetArg,
        /// Output file (default: <n>q<d>.qcdb, with -full for full mode).
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
        /// Stop when a level would exceed this many records.
        #[arg(long)]
        max_records: Option<usize>,
    },
    /// Search for an optimal circuit.
    Search {
        #[command(flatten)]
        target: TargetArgs,
        /// Database file (depth mode).
        #[arg(long)]
        db: Option<PathBuf>,
        /// Largest total depth (depth mode) or T-depth (tdepth mode).
        #[arg(short = 'd', long, default_value_t = 8)]
        max_depth: usize,
        #[arg(long, value_enum, default_value = "depth")]
        mode: SearchMode,
        /// Ancillas; needs a full-mode database on target+m qubits.
        #[arg(short = 'm', long, default_value_t = 0)]
        ancillas: usize,
        #[arg(long, value_enum, default_value = "depth")]
        objective: ObjectiveArg,
        /// Append a phase correction so the circuit equals the target exactly.
        #[arg(long)]
        exact_phase: bool,
        /// Permit Clifford-group generation beyond two qubits.
        #[arg(long)]
        allow_large: bool,
        /// Also write the circuit here.
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Check a circuit against a target.
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// T-parallelize a {CNOT, T} circuit with ancillas.
    Tpar {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(short = 'm', long, default_value_t = 0)]
        ancillas: usize,
        /// Reduce repeated terms mod 8 first.
        #[arg(long)]
        reduce_mod8: bool,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Re-synthesize small windows of a circuit.
    Peephole {
        #[arg(long)]
        circuit: PathBuf,
        /// Classed databases, one per window width.
        #[arg(long = "db", required = true)]
        dbs: Vec<PathBuf>,
        #[arg(long, default_value_t = 4)]
        window: usize,
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long, default_value_t = 16)]
        passes: usize,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Gate cost of a controlled version of a circuit.
    Cost {
        #[arg(long)]
        circuit: PathBuf,
    },
    /// Generate the Clifford group and print its size up to phase.
    Clifford {
        #[arg(short = 'n', long)]
        qubits: usize,
        #[arg(long)]
        allow_large: bool,
    },
}

enum Failure {
    Lib(Error),
    Usage(String),
    NotFound(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Run = Result<(), Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Format(_) | Error::BadMagic | Error::Version(_) | Error::Truncated | Error::Checksum { .. } => {
            EXIT_FORMAT
        }
        Error::Budget(_) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    Ok(std::fs::read_to_string(path)?)
}

fn load_circuit(path: &Path) -> Result<Circuit, Error> {
    parse_circuit(&read(path)?)
}

fn load_target(t: &TargetArgs) -> Result<(String, RingMatrix), Failure> {
    match (&t.target, &t.matrix) {
        (Some(name), _) => Ok((name.clone(), build_target(name)?)),
        (None, Some(p)) => Ok((p.display().to_string(), RingMatrix::from_json(&read(p)?)?)),
        (None, None) => Err(Failure::Usage("give --target or --matrix".into())),
    }
}

fn write_out(out: &Option<PathBuf>, c: &Circuit) -> Result<(), Error> {
    if let Some(p) = out {
        std::fs::write(p, emit_circuit(c))?;
    }
    Ok(())
}

fn gen(
    n: usize,
    depth: usize,
    mode: ModeArg,
    gates: GateSetArg,
    out: Option<PathBuf>,
    max_records: Option<usize>,
) -> Run {
    let mode = match mode {
        ModeArg::Classed => DbMode::Classed,
        ModeArg::Full => DbMode::Full,
    };
    let gs = match gates {
        GateSetArg::CliffordT => GateSet::CLIFFORD_T,
        GateSetArg::Clifford => GateSet::CLIFFORD,
    };
    let path = out.unwrap_or_else(|| {
        let suffix = if mode == DbMode::Full { "-full" } else { "" };
        PathBuf::from(format!("{n}q{depth}{suffix}.qcdb"))
    });
    println!("depth  circuits  seconds");
    let (db, err) = CircuitDatabase::generate_with(n, gs, depth, mode, &GenOptions { max_records }, |s| {
        // the table counts the empty circuit among depth-one circuits
        let shown = s.count + usize::from(s.depth == 1);
        println!("{:>5}  {:>8}  {:.2}", s.depth, shown, s.seconds);
    });
    db.save(&path)?;
    let counts: Vec<String> = db
        .level_counts()
        .iter()
        .enumerate()
        .map(|(i, c)| (c + usize::from(i == 0)).to_string())
        .collect();
    println!("counts {}", counts.join(" "));
    println!("wrote {} ({} levels)", path.display(), db.depth());
    match err {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn report(found: &ctsynth::search::Found, exact: bool, out: &Option<PathBuf>, secs: f64) -> Result<(), Error> {
    let circuit = if exact {
        exact_phase_fix(&found.circuit, found.phase_exponent)
    } else {
        found.circuit.clone()
    };
    print!("{}", emit_circuit(&circuit));
    println!("depth {}", found.depth);
    println!("t-depth {}", found.t_depth);
    println!("gates {}", found.circuit.gate_count());
    println!("phase {}", if exact { 0 } else { found.phase_exponent });
    println!("search-seconds {secs:.3}");
    write_out(out, &circuit)
}

/// Independent re-check of a search result.
fn check(circuit: &Circuit, target: &RingMatrix) -> Option<u8> {
    let m = circuit.n_ancillas();
    let u = circuit.evaluate();
    if m == 0 {
        u.phase_relative_to(target)
    } else {
        ancilla_phase(&u, &target.tensor(&RingMatrix::identity(m)), m)
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    target: TargetArgs,
    db: Option<PathBuf>,
    max_depth: usize,
    mode: SearchMode,
    ancillas: usize,
    objective: ObjectiveArg,
    exact: bool,
    allow_large: bool,
    out: Option<PathBuf>,
) -> Run {
    let (name, u) = load_target(&target)?;
    let start = Instant::now();
    let result = match mode {
        SearchMode::Tdepth => {
            let cs = CliffordSet::generate(u.n_qubits(), allow_large)?;
            TDepthSearch::new(&cs).search(&u, max_depth)?
        }
        SearchMode::Depth => {
            let path = db.ok_or_else(|| Failure::Usage("depth search needs --db".into()))?;
            let db = CircuitDatabase::load(&path)?;
            if ancillas == 0 {
                mitm_search(&u, &db, max_depth)?
            } else {
                let obj = match objective {
                    ObjectiveArg::Depth => Objective::Depth,
                    ObjectiveArg::Tdepth => Objective::TDepth,
                };
                AncillaIndex::build(&db, ancillas, obj)?.search(&u, max_depth)?
            }
        }
    };
    let secs = start.elapsed().as_secs_f64();
    match result {
        SearchResult::Found(f) => {
            if check(&f.circuit, &u) != Some(f.phase_exponent) {
                return Err(Error::Circuit("search result failed re-verification".into()).into());
            }
            println!("# target {name}");
            report(&f, exact, &out, secs)?;
            println!("verified");
            Ok(())
        }
        SearchResult::NotFound { proof_bound } => {
            let what = if matches!(mode, SearchMode::Tdepth) { "T-depth" } else { "depth" };
            Err(Failure::NotFound(format!(
                "no circuit for {name} with {what} at most {proof_bound} ({secs:.3} s)"
            )))
        }
    }
}

fn verify(circuit: PathBuf, target: TargetArgs) -> Run {
    let c = load_circuit(&circuit)?;
    let (name, u) = load_target(&target)?;
    let m = c.n_ancillas();
    if c.n_qubits() != u.n_qubits() + m {
        return Err(Error::Dimension(format!(
            "circuit has {} wires ({m} ancillas), {name} acts on {}",
            c.n_qubits(),
            u.n_qubits()
        ))
        .into());
    }
    match check(&c, &u) {
        Some(0) if m == 0 => println!("equal: exact"),
        Some(k) if m == 0 => println!("equal: up to omega^{k}"),
        Some(k) => println!("equal: on the ancilla-zero subspace, up to omega^{k}"),
        None => return Err(Failure::NotFound(format!("circuit does not implement {name}"))),
    }
    println!("depth {}", c.depth());
    println!("t-depth {}", c.t_depth());
    Ok(())
}

fn tpar(circuit: PathBuf, m: usize, reduce_mod8: bool, out: Option<PathBuf>) -> Run {
    let c = load_circuit(&circuit)?;
    let k = extract(&c)?.terms.len();
    let p = parallelize_with(&c, m, &ParallelizeOptions { reduce_mod8 })?;
    print!("{}", emit_circuit(&p));
    println!("t-count {k}");
    println!("t-depth before {}", c.t_depth());
    println!("t-depth after {}", p.t_depth());
    println!("bound {}", tdepth_bound(k, m));
    write_out(&out, &p)?;
    Ok(())
}

fn peephole_cmd(circuit: PathBuf, dbs: Vec<PathBuf>, window: usize, width: usize, passes: usize, out: Option<PathBuf>) -> Run {
    let c = load_circuit(&circuit)?;
    let loaded = dbs.iter().map(CircuitDatabase::load).collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&CircuitDatabase> = loaded.iter().collect();
    let opts = PeepholeOptions { window, max_width: width, max_passes: passes };
    let r = peephole(&c, &refs, &opts)?;
    print!("{}", emit_circuit(&r.circuit));
    println!("depth {} -> {}", c.depth(), r.circuit.depth());
    println!("gates {} -> {}", c.gate_count(), r.circuit.gate_count());
    println!("t-depth {} -> {}", c.t_depth(), r.circuit.t_depth());
    println!("replacements {}", r.replacements);
    println!("phase {}", r.phase_exponent);
    write_out(&out, &r.circuit)?;
    Ok(())
}

fn cost(circuit: PathBuf) -> Run {
    let c = load_circuit(&circuit)?;
    let x = c.cost_vector();
    let (y, bound) = controlled_cost(x);
    let fmt = |v: [u64; 4]| format!("H {} P {} CNOT {} T {}", v[0], v[1], v[2], v[3]);
    println!("circuit    {}", fmt(x));
    println!("controlled {}", fmt(y));
    println!("controlled t-depth bound {bound}");
    Ok(())
}

fn clifford(n: usize, allow_large: bool) -> Run {
    let start = Instant::now();
    let cs = CliffordSet::generate(n, allow_large)?;
    println!("{}", cs.len());
    eprintln!("{:.2} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn run(cli: Cli) -> Run {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.cmd {
        Cmd::Gen { qubits, depth, mode, gates, out, max_records } => gen(qubits, depth, mode, gates, out, max_records),
        Cmd::Search { target, db, max_depth, mode, ancillas, objective, exact_phase, allow_large, out } => {
            search(target, db, max_depth, mode, ancillas, objective, exact_phase, allow_large, out)
        }
        Cmd::Verify { circuit, target } => verify(circuit, target),
        Cmd::Tpar { circuit, ancillas, reduce_mod8, out } => tpar(circuit, ancillas, reduce_mod8, out),
        Cmd::Peephole { circuit, dbs, window, width, passes, out } => {
            peephole_cmd(circuit, dbs, window, width, passes, out)
        }
        Cmd::Cost { circuit } => cost(circuit),
        Cmd::Clifford { qubits, allow_large } => clifford(qubits, allow_large),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::NotFound(msg)) => {
            println!("not found: {msg}");
            ExitCode::from(EXIT_NOT_FOUND)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ctsynth::gates::SingleGate;
    use ctsynth::Gate;

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), EXIT_IO);
        assert_eq!(exit_code(&Error::BadMagic), EXIT_FORMAT);
        assert_eq!(exit_code(&Error::Truncated), EXIT_FORMAT);
        assert_eq!(exit_code(&Error::Budget("x".into())), EXIT_BUDGET);
        assert_eq!(exit_code(&Error::UnknownTarget("x".into())), EXIT_USAGE);
    }

    #[test]
    fn check_reports_phase() {
        let c = Circuit::schedule(2, &[Gate::Cnot { control: 0, target: 1 }]).unwrap();
        let cx = build_target("cx").unwrap();
        assert_eq!(check(&c, &cx), Some(0));
        assert_eq!(check(&c, &cx.scale_phase(3)), Some(5));
        assert_eq!(check(&c, &build_target("cz").unwrap()), None);
        let t = Circuit::schedule(1, &[Gate::Single(SingleGate::T, 0)]).unwrap();
        assert_eq!(check(&t, &RingMatrix::identity(1)), None);
    }
}
