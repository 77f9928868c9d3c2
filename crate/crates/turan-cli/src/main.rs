//! `turan` — command-line front end for the Turán-density pipeline.
//!
//! Every subcommand writes machine-parsable JSON-lines records to standard
//! output and a short human summary to standard error.  Exit codes: 0 for
//! success (and for checks that come out true), 1 when a certificate is
//! invalid or a requested check fails, 2 for usage errors, 3 for I/O or
//! solver trouble.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use turan_certificate::{
    parse_certificate, round_solution, serialize_certificate, verify_certificate, CertError,
    NumericBlock,
};
use turan_constructions::{build as build_construction, edge_count_formula, ConstructionKind};
use turan_families::{enumerate_admissible, Family};
use turan_field::FieldElement;
use turan_flags::build_context;
use turan_hypergraph::ThreeGraph;
use turan_lagrangian::{
    lambda_at, maximize_lagrangian, DEFAULT_ITERATIONS, DEFAULT_RESTARTS,
};
use turan_sdp::{emit_sdp, parse_solution, SdpProblem};

/// Denominators tried in order when no explicit rounding schedule is given.
const DEFAULT_SCHEDULE: [u64; 9] = [
    24,
    120,
    720,
    5_040,
    40_320,
    362_880,
    3_628_800,
    100_000_000,
    10_000_000_000,
];

const SOLVER_ENV: &str = "TURAN_SDP_SOLVER";

#[derive(Parser)]
#[command(
    name = "turan",
    about = "Enumerate forbidden-family-free 3-graphs, build and round flag-algebra SDPs, \
             and verify exact Turán-density certificates.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the admissible graphs of one order, up to isomorphism.
    Admissible(AdmissibleArgs),
    /// Emit the SDP for a family and, when a solver is available, run it.
    Bound(BoundArgs),
    /// Round a numeric solver solution to an exact certificate.
    Round(RoundArgs),
    /// Check a certificate in exact arithmetic and print its sharp set.
    Verify(CertArgs),
    /// Print the exact slack of every admissible graph under a certificate.
    Slack(CertArgs),
    /// Maximize the Lagrangian numerically; evaluate a witness exactly.
    Lagrangian(LagrangianArgs),
    /// Build an extremal construction and optionally check its freeness.
    Construction(ConstructionArgs),
    /// Decide whether one graph embeds in some blow-up of another.
    BlowupCheck(BlowupArgs),
}

#[derive(Args)]
struct AdmissibleArgs {
    /// Working order (number of vertices).
    #[arg(short)]
    n: usize,
    /// Forbidden-family file.
    #[arg(short, long = "family")]
    f: PathBuf,
    /// Print only the census record, not one record per graph.
    #[arg(long)]
    count_only: bool,
}

#[derive(Args)]
struct BoundArgs {
    /// Working order (number of vertices).
    #[arg(short)]
    n: usize,
    /// Forbidden-family file.
    #[arg(short, long = "family")]
    f: PathBuf,
    /// Solver binary; falls back to $TURAN_SDP_SOLVER, then csdp, then minisdp.
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Where to write the sparse problem file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where the solver writes its solution.
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Solver wall-clock limit in seconds.
    #[arg(long, default_value_t = 3600)]
    timeout: u64,
}

#[derive(Args)]
struct RoundArgs {
    /// Working order (number of vertices).
    #[arg(short)]
    n: usize,
    /// Forbidden-family file.
    #[arg(short, long = "family")]
    f: PathBuf,
    /// Exact target bound, e.g. 2/9 or 1/20+1/20*sqrt(5).
    #[arg(long)]
    target: String,
    /// Solver solution file to round.
    #[arg(long = "in")]
    input: PathBuf,
    /// Where to write the certificate.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated denominators to try in order.
    #[arg(long)]
    schedule: Option<String>,
}

#[derive(Args)]
struct CertArgs {
    /// Certificate file.
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args)]
struct LagrangianArgs {
    /// Graph, as a file path or inline text like 5:123,145.
    #[arg(short)]
    g: String,
    /// File of exact weights (field elements, whitespace-separated).
    #[arg(long)]
    witness: Option<PathBuf>,
    /// Number of random restarts.
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    /// Multiplicative-update iterations per restart.
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
}

#[derive(Args)]
struct ConstructionArgs {
    /// Construction kind: S, J, T, or B.
    #[arg(long)]
    kind: String,
    /// Order of the instance.
    #[arg(short)]
    n: usize,
    /// Family file; additionally check the instance is family-free.
    #[arg(long)]
    check_free: Option<PathBuf>,
}

#[derive(Args)]
struct BlowupArgs {
    /// The graph to embed, as a file path or inline text.
    #[arg(short)]
    f: String,
    /// The graph whose blow-ups are searched, as a file path or inline text.
    #[arg(short)]
    g: String,
}

/// A failure routed to a specific exit code.
enum Failure {
    /// Exit 1: an invalid certificate or a check that came out false.
    Invalid(String),
    /// Exit 2: arguments or input text that do not parse.
    Usage(String),
    /// Exit 3: file system or solver trouble.
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("turan: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Admissible(a) => cmd_admissible(a),
        Cmd::Bound(a) => cmd_bound(a),
        Cmd::Round(a) => cmd_round(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Slack(a) => cmd_slack(a),
        Cmd::Lagrangian(a) => cmd_lagrangian(a),
        Cmd::Construction(a) => cmd_construction(a),
        Cmd::BlowupCheck(a) => cmd_blowup(a),
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn load_family(path: &Path) -> Result<Family, Failure> {
    read_text(path)?
        .parse()
        .map_err(|e| Failure::Usage(format!("family file {}: {e}", path.display())))
}

/// Accepts either a path to a graph file or inline graph text.
fn load_graph(arg: &str) -> Result<ThreeGraph, Failure> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        read_text(path)?
    } else {
        arg.to_string()
    };
    text.trim()
        .parse()
        .map_err(|e| Failure::Usage(format!("graph {arg}: {e}")))
}

/// Routes certificate-layer errors to exit codes: I/O trouble keeps its own
/// code; everything else means the certificate (or solution) is bad.
fn cert_failure(e: CertError) -> Failure {
    match e {
        CertError::Io(inner) => Failure::Io(inner.to_string()),
        other => Failure::Invalid(other.to_string()),
    }
}

fn emit(record: serde_json::Value) {
    println!("{record}");
}

// ---------------------------------------------------------------------------
// admissible

fn cmd_admissible(args: AdmissibleArgs) -> Result<(), Failure> {
    let family = load_family(&args.f)?;
    let census = enumerate_admissible(&family, args.n)
        .map_err(|e| Failure::Usage(format!("enumeration failed: {e}")))?;
    emit(json!({
        "record": "census",
        "n": args.n,
        "family": args.f.display().to_string(),
        "count": census.len(),
    }));
    if !args.count_only {
        for (index, g) in census.iter().enumerate() {
            emit(json!({
                "record": "graph",
                "index": index,
                "text": g.to_string(),
                "edges": g.edge_count(),
            }));
        }
    }
    eprintln!(
        "{} admissible graphs of order {} for {}",
        census.len(),
        args.n,
        args.f.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// bound

fn build_problem(
    family: &Family,
    n: usize,
) -> Result<(Vec<ThreeGraph>, SdpProblem), Failure> {
    let census = enumerate_admissible(family, n)
        .map_err(|e| Failure::Usage(format!("enumeration failed: {e}")))?;
    let ctx = build_context(family, n, &census)
        .map_err(|e| Failure::Usage(format!("flag context failed: {e}")))?;
    let problem =
        emit_sdp(&census, &ctx).map_err(|e| Failure::Usage(format!("SDP assembly failed: {e}")))?;
    Ok((census, problem))
}

/// Finds an executable by searching the PATH directories.
fn find_in_path(name: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .map(|dir| dir.join(name))
        .find(|candidate| candidate.is_file())
}

/// Solver discovery: explicit flag, then the environment variable, then
/// csdp on the PATH, then minisdp on the PATH or next to this binary.
fn discover_solver(flag: Option<PathBuf>) -> Option<PathBuf> {
    if let Some(p) = flag {
        return Some(p);
    }
    if let Some(env) = std::env::var_os(SOLVER_ENV) {
        if !env.is_empty() {
            return Some(PathBuf::from(env));
        }
    }
    if let Some(p) = find_in_path("csdp") {
        return Some(p);
    }
    if let Some(p) = find_in_path("minisdp") {
        return Some(p);
    }
    let sibling = std::env::current_exe().ok()?.with_file_name("minisdp");
    sibling.is_file().then_some(sibling)
}

/// Runs `solver problem solution` with a wall-clock limit.
fn run_solver(
    solver: &Path,
    problem: &Path,
    solution: &Path,
    timeout: Duration,
) -> Result<(), Failure> {
    let mut child = std::process::Command::new(solver)
        .arg(problem)
        .arg(solution)
        .spawn()
        .map_err(|e| Failure::Io(format!("cannot launch {}: {e}", solver.display())))?;
    let started = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                if started.elapsed() > timeout {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(Failure::Io(format!(
                        "solver timed out after {} seconds",
                        timeout.as_secs()
                    )));
                }
                std::thread::sleep(Duration::from_millis(50));
            }
            Err(e) => return Err(Failure::Io(format!("waiting for the solver: {e}"))),
        }
    };
    if !status.success() {
        // Some solvers report partial success with a nonzero code but still
        // write a usable solution; the caller decides when parsing it.
        eprintln!("turan: solver exited with {status}; trying its solution anyway");
    }
    Ok(())
}

fn cmd_bound(args: BoundArgs) -> Result<(), Failure> {
    let family = load_family(&args.f)?;
    let (census, problem) = build_problem(&family, args.n)?;
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("bound-n{}.dat-s", args.n)));
    let solution_path = args
        .solution
        .unwrap_or_else(|| out.with_extension("sol"));
    let mut buffer = Vec::new();
    problem
        .write_dat_s(&mut buffer)
        .map_err(|e| Failure::Io(format!("formatting the problem: {e}")))?;
    fs::write(&out, &buffer)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", out.display())))?;
    eprintln!(
        "wrote {} ({} constraints, {} blocks)",
        out.display(),
        problem.constraint_count,
        problem.block_sizes.len()
    );

    let Some(solver) = discover_solver(args.solver) else {
        emit(json!({
            "record": "bound",
            "n": args.n,
            "family": args.f.display().to_string(),
            "constraints": problem.constraint_count,
            "problem": out.display().to_string(),
            "solved": false,
        }));
        eprintln!("no SDP solver found; emitted the problem only");
        return Ok(());
    };

    run_solver(&solver, &out, &solution_path, Duration::from_secs(args.timeout))?;
    let file = fs::File::open(&solution_path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", solution_path.display())))?;
    let parsed = parse_solution(
        std::io::BufReader::new(file),
        &problem.block_sizes,
        problem.constraint_count,
    )
    .map_err(|e| Failure::Io(format!("solution {}: {e}", solution_path.display())))?;
    let bound = parsed.bound(&problem);
    emit(json!({
        "record": "bound",
        "n": args.n,
        "family": args.f.display().to_string(),
        "constraints": problem.constraint_count,
        "problem": out.display().to_string(),
        "solved": true,
        "solver": solver.display().to_string(),
        "solution": solution_path.display().to_string(),
        "bound": bound,
    }));
    eprintln!(
        "numeric bound {bound:.9} over {} admissible graphs",
        census.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// round

fn parse_schedule(text: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|e| Failure::Usage(format!("schedule entry {part:?}: {e}")))
        })
        .collect()
}

fn cmd_round(args: RoundArgs) -> Result<(), Failure> {
    let family = load_family(&args.f)?;
    let target: FieldElement = args
        .target
        .parse()
        .map_err(|e| Failure::Usage(format!("target {}: {e}", args.target)))?;
    let schedule = match &args.schedule {
        Some(text) => parse_schedule(text)?,
        None => DEFAULT_SCHEDULE.to_vec(),
    };
    let (_census, problem) = build_problem(&family, args.n)?;
    let file = fs::File::open(&args.input)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", args.input.display())))?;
    let parsed = parse_solution(
        std::io::BufReader::new(file),
        &problem.block_sizes,
        problem.constraint_count,
    )
    .map_err(|e| Failure::Usage(format!("solution {}: {e}", args.input.display())))?;
    let blocks: Vec<NumericBlock> = parsed
        .type_matrices(&problem)
        .into_iter()
        .enumerate()
        .map(|(type_index, (dim, entries))| NumericBlock {
            type_index,
            dim,
            entries,
        })
        .collect();

    let certificate = round_solution(&family, args.n, &blocks, &target, &schedule)
        .map_err(cert_failure)?;
    let report = verify_certificate(&certificate).map_err(cert_failure)?;
    let text = serialize_certificate(&certificate);
    fs::write(&args.out, text)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", args.out.display())))?;
    emit(json!({
        "record": "round",
        "n": args.n,
        "family": args.f.display().to_string(),
        "bound": certificate.bound.to_string(),
        "blocks": certificate.blocks.len(),
        "sharp": report.sharp_set.len(),
        "certificate": args.out.display().to_string(),
    }));
    eprintln!(
        "certificate for bound {} written to {} ({} sharp graphs)",
        certificate.bound,
        args.out.display(),
        report.sharp_set.len()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// verify / slack

fn load_certificate(path: &Path) -> Result<turan_certificate::Certificate, Failure> {
    parse_certificate(&read_text(path)?).map_err(cert_failure)
}

fn cmd_verify(args: CertArgs) -> Result<(), Failure> {
    let certificate = load_certificate(&args.cert)?;
    match verify_certificate(&certificate) {
        Ok(report) => {
            let sharp: Vec<String> = report.sharp_set.iter().map(|g| g.to_string()).collect();
            emit(json!({
                "record": "verify",
                "certificate": args.cert.display().to_string(),
                "valid": true,
                "n": certificate.n,
                "discriminant": certificate.discriminant,
                "bound": certificate.bound.to_string(),
                "graphs": report.slacks.len(),
                "sharp": sharp,
            }));
            eprintln!(
                "valid: bound {} over {} graphs, {} sharp",
                certificate.bound,
                report.slacks.len(),
                report.sharp_set.len()
            );
            Ok(())
        }
        Err(e) => {
            emit(json!({
                "record": "verify",
                "certificate": args.cert.display().to_string(),
                "valid": false,
                "reason": e.to_string(),
            }));
            Err(cert_failure(e))
        }
    }
}

fn cmd_slack(args: CertArgs) -> Result<(), Failure> {
    let certificate = load_certificate(&args.cert)?;
    let report = verify_certificate(&certificate).map_err(cert_failure)?;
    for (index, (graph, slack)) in report.slacks.iter().enumerate() {
        emit(json!({
            "record": "slack",
            "index": index,
            "graph": graph.to_string(),
            "slack": slack.to_string(),
            "sharp": slack.is_zero(),
        }));
    }
    eprintln!(
        "{} graphs, {} sharp, bound {}",
        report.slacks.len(),
        report.sharp_set.len(),
        certificate.bound
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// lagrangian

fn cmd_lagrangian(args: LagrangianArgs) -> Result<(), Failure> {
    let graph = load_graph(&args.g)?;
    let (numeric, weights) = maximize_lagrangian(&graph, args.restarts, args.iterations);
    let mut record = json!({
        "record": "lagrangian",
        "graph": graph.to_string(),
        "numeric": numeric,
        "weights": weights,
    });
    let mut summary = format!("lambda({}) ~ {numeric:.12}", graph);
    if let Some(witness_path) = &args.witness {
        let text = read_text(witness_path)?;
        let weights: Vec<FieldElement> = text
            .split_whitespace()
            .map(|token| {
                token.parse().map_err(|e| {
                    Failure::Usage(format!("witness entry {token:?}: {e}"))
                })
            })
            .collect::<Result<_, _>>()?;
        if weights.len() != graph.n() {
            return Err(Failure::Usage(format!(
                "witness has {} weights for a graph of order {}",
                weights.len(),
                graph.n()
            )));
        }
        let exact = lambda_at(&graph, &weights)
            .map_err(|e| Failure::Usage(format!("witness evaluation: {e}")))?;
        record["exact"] = json!(exact.to_string());
        let _ = write!(summary, ", exactly {exact} at the witness");
    }
    emit(record);
    eprintln!("{summary}");
    Ok(())
}

// ---------------------------------------------------------------------------
// construction

fn cmd_construction(args: ConstructionArgs) -> Result<(), Failure> {
    let kind: ConstructionKind = args
        .kind
        .parse()
        .map_err(|e| Failure::Usage(format!("kind {}: {e}", args.kind)))?;
    let instance = build_construction(kind, args.n)
        .map_err(|e| Failure::Usage(format!("construction failed: {e}")))?;
    let density = instance.graph.edge_density();
    let mut record = json!({
        "record": "construction",
        "kind": args.kind.to_ascii_uppercase(),
        "n": args.n,
        "sizes": instance.sizes,
        "edges": instance.graph.edge_count(),
        "formula": edge_count_formula(kind, args.n),
        "density": density.to_string(),
        "graph": instance.graph.to_string(),
    });
    let mut free_failure = None;
    if let Some(family_path) = &args.check_free {
        let family = load_family(family_path)?;
        let free = family
            .is_admissible(&instance.graph)
            .map_err(|e| Failure::Usage(format!("freeness check: {e}")))?;
        record["free"] = json!(free);
        if !free {
            free_failure = Some(format!(
                "construction {}_{} contains a forbidden configuration from {}",
                args.kind.to_ascii_uppercase(),
                args.n,
                family_path.display()
            ));
        }
    }
    emit(record);
    eprintln!(
        "{}_{}: sizes {:?}, {} edges, density {}",
        args.kind.to_ascii_uppercase(),
        args.n,
        instance.sizes,
        instance.graph.edge_count(),
        density
    );
    match free_failure {
        Some(message) => Err(Failure::Invalid(message)),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// blowup-check

fn cmd_blowup(args: BlowupArgs) -> Result<(), Failure> {
    let f = load_graph(&args.f)?;
    let g = load_graph(&args.g)?;
    let contains = g.blowup_contains(&f);
    emit(json!({
        "record": "blowup",
        "f": f.to_string(),
        "g": g.to_string(),
        "contains": contains,
    }));
    eprintln!("{contains}");
    if contains {
        Ok(())
    } else {
        Err(Failure::Invalid(format!(
            "{f} does not embed in any blow-up of {g}"
        )))
    }
}
