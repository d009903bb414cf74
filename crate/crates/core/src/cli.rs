//! Command-line front end. Exit codes: 0 success, 1 a checked property
//! failed, 2 usage error.

use crate::algorithms::{
    deterministic_search_circuit, diffusion_only, grover_circuit, grover_iterations, grover_plan,
    odd_prefix_search_circuit, partial_search_circuit, run_grover, run_odd_prefix, run_partial,
    run_search, IterationRule, SearchSpec,
};
use crate::circuit::dump::to_dump;
use crate::circuit::Circuit;
use crate::costbench::{
    crossover, emit_csv, emit_json, reference_crossover, sweep, to_csv, CostModel, CostReport,
    Crossover, ReferenceKind, SweepConfig, TopologyKind, MAX_CONSTRUCTED_QUBITS,
};
use crate::transpiler::{default_layout, lower_circuit, route, DecompositionStrategy, Layout};
use crate::verify::{run_suite, DEFAULT_SEED, MAX_VERIFY_QUBITS, TOLERANCE};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest register the simulating commands accept.
pub const MAX_SIM_QUBITS: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "dqs",
    version,
    about = "Deterministic quantum search: simulation, transpilation and gate-count benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full deterministic search for one target.
    Search(SearchArgs),
    /// Resolve only the first k bits of the target.
    Partial(PartialArgs),
    /// Run the Grover baseline.
    Grover(GroverArgs),
    /// Sweep two-qubit gate counts and write CSV.
    Bench(BenchArgs),
    /// Register width where the recursive cost overtakes Grover.
    Crossover(CrossoverArgs),
    /// Run the property suite.
    Verify(VerifyArgs),
    /// Print a circuit in the text dump format.
    Circuit(CircuitArgs),
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(short = 'n', long)]
    qubits: usize,
    #[arg(short = 'x', long)]
    target: usize,
    #[arg(long)]
    json: bool,
    /// Report wall-clock time (makes output non-deterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct PartialArgs {
    #[arg(short = 'n', long)]
    qubits: usize,
    #[arg(short = 'x', long)]
    target: usize,
    #[arg(short = 'k', long)]
    prefix: usize,
    /// Use the flag-qubit variant for odd prefix lengths.
    #[arg(long)]
    odd: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Floor,
    Round,
}

impl From<RuleArg> for IterationRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Floor => IterationRule::Floor,
            RuleArg::Round => IterationRule::Round,
        }
    }
}

#[derive(Debug, Args)]
struct GroverArgs {
    #[arg(short = 'n', long)]
    qubits: usize,
    #[arg(short = 'x', long)]
    target: usize,
    /// Override the planned iteration count.
    #[arg(short = 't', long)]
    iterations: Option<u64>,
    #[arg(long, value_enum, default_value = "floor")]
    rule: RuleArg,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum TopologyArg {
    Grid,
    Full,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    AncillaChain,
    SingleAncilla,
    ZeroAncilla,
}

impl From<StrategyArg> for DecompositionStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::AncillaChain => DecompositionStrategy::AncillaChain,
            StrategyArg::SingleAncilla => DecompositionStrategy::SingleAncilla,
            StrategyArg::ZeroAncilla => DecompositionStrategy::ZeroAncilla,
        }
    }
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    min: usize,
    #[arg(long)]
    max: usize,
    #[arg(long, value_enum, default_value = "both")]
    topology: TopologyArg,
    #[arg(long, value_enum, default_value = "ancilla-chain")]
    strategy: StrategyArg,
    /// Quadratic constant of the zero-ancilla model.
    #[arg(long, default_value_t = 1)]
    k: u64,
    #[arg(long)]
    diffusion_only: bool,
    #[arg(long, value_enum, default_value = "floor")]
    rule: RuleArg,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional JSON mirror of the rows.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CrossoverArgs {
    /// All strategies when omitted.
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long, default_value_t = 1)]
    k: u64,
    #[arg(long, value_enum, default_value = "floor")]
    rule: RuleArg,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    max_qubits: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Search,
    Grover,
}

#[derive(Debug, Args)]
struct CircuitArgs {
    #[arg(long, value_enum, default_value = "search")]
    kind: KindArg,
    #[arg(short = 'n', long)]
    qubits: usize,
    #[arg(short = 'x', long, default_value_t = 0)]
    target: usize,
    /// Partial search prefix length (odd values use the flag-qubit variant).
    #[arg(short = 'k', long)]
    prefix: Option<usize>,
    /// Grover iterations; planned count when omitted.
    #[arg(short = 't', long)]
    iterations: Option<u64>,
    /// Replace oracle calls by barriers.
    #[arg(long)]
    diffusion_only: bool,
    /// Lower to one- and two-qubit gates.
    #[arg(long)]
    lower: bool,
    /// Lower and route onto a coupling map.
    #[arg(long, value_enum)]
    route: Option<TopologyArg>,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_VIOLATION,
        message: e.to_string(),
    }
}

type CmdResult = Result<i32, Failure>;

#[derive(Debug, Serialize)]
pub struct RunResult {
    pub n: usize,
    pub target: usize,
    pub measured: usize,
    pub probability: f64,
    pub u0_calls: u64,
    pub d2_calls: u64,
    pub elapsed_ms: Option<f64>,
}

fn json_line(out: &mut dyn Write, value: &impl Serialize) -> std::io::Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    )
}

fn check_sim_width(n: usize) -> Result<(), Failure> {
    if !(1..=MAX_SIM_QUBITS).contains(&n) {
        return Err(usage(format!(
            "--qubits must be in 1..={MAX_SIM_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

fn cmd_search(a: &SearchArgs, out: &mut dyn Write) -> CmdResult {
    if a.qubits < 2 {
        return Err(usage("--qubits must be at least 2"));
    }
    check_sim_width(a.qubits)?;
    let spec = SearchSpec::new(a.qubits, a.target).map_err(usage)?;
    let start = Instant::now();
    let o = run_search(&spec).map_err(usage)?;
    let result = RunResult {
        n: a.qubits,
        target: a.target,
        measured: o.measured,
        probability: o.probability,
        u0_calls: o.tally.u0_calls,
        d2_calls: o.tally.d2_calls,
        elapsed_ms: a.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    if a.json {
        json_line(out, &result).map_err(io_failure)?;
    } else {
        (|| {
            writeln!(out, "n            {}", result.n)?;
            writeln!(out, "target       {}", result.target)?;
            writeln!(out, "measured     {}", result.measured)?;
            writeln!(out, "probability  {:.12}", result.probability)?;
            writeln!(out, "u0_calls     {}", result.u0_calls)?;
            writeln!(out, "d2_calls     {}", result.d2_calls)?;
            if let Some(ms) = result.elapsed_ms {
                writeln!(out, "elapsed_ms   {ms:.3}")?;
            }
            Ok(())
        })()
        .map_err(io_failure)?;
    }
    let ok = result.measured == a.target && result.probability >= 1.0 - TOLERANCE;
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Debug, Serialize)]
struct PartialReport {
    n: usize,
    target: usize,
    prefix_len: usize,
    prefix: String,
    prefix_probability: f64,
    suffix_spread: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    flag_probability: Option<f64>,
    u0_calls: u64,
    d2_calls: u64,
}

fn cmd_partial(a: &PartialArgs, out: &mut dyn Write) -> CmdResult {
    check_sim_width(a.qubits)?;
    if a.prefix == 0 || a.prefix > a.qubits {
        return Err(usage(format!(
            "--prefix must be in 1..={}, got {}",
            a.qubits, a.prefix
        )));
    }
    let spec = SearchSpec::new(a.qubits, a.target).map_err(usage)?;
    let (partial, flag) = if a.odd {
        let o = run_odd_prefix(a.qubits, a.target, a.prefix).map_err(usage)?;
        (o.partial, Some(o.flag_probability))
    } else {
        (run_partial(&spec, a.prefix).map_err(usage)?, None)
    };
    let report = PartialReport {
        n: a.qubits,
        target: a.target,
        prefix_len: a.prefix,
        prefix: partial.prefix_bits(),
        prefix_probability: partial.prefix_probability,
        suffix_spread: partial.suffix_spread(),
        flag_probability: flag,
        u0_calls: partial.tally.u0_calls,
        d2_calls: partial.tally.d2_calls,
    };
    if a.json {
        json_line(out, &report).map_err(io_failure)?;
    } else {
        (|| {
            writeln!(out, "n                   {}", report.n)?;
            writeln!(out, "target              {}", report.target)?;
            writeln!(out, "prefix              {}", report.prefix)?;
            writeln!(out, "prefix_probability  {:.12}", report.prefix_probability)?;
            writeln!(out, "suffix_spread       {:.3e}", report.suffix_spread)?;
            if let Some(f) = report.flag_probability {
                writeln!(out, "flag_probability    {f:.12}")?;
            }
            writeln!(out, "u0_calls            {}", report.u0_calls)?;
            writeln!(out, "d2_calls            {}", report.d2_calls)?;
            Ok(())
        })()
        .map_err(io_failure)?;
    }
    let ok = partial.prefix == a.target >> (a.qubits - a.prefix)
        && partial.prefix_probability >= 1.0 - TOLERANCE
        && partial.suffix_spread() < TOLERANCE;
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Debug, Serialize)]
struct GroverReport {
    n: usize,
    target: usize,
    iterations: u64,
    theta: f64,
    predicted_success: f64,
    simulated_success: f64,
    measured: usize,
}

fn cmd_grover(a: &GroverArgs, out: &mut dyn Write) -> CmdResult {
    check_sim_width(a.qubits)?;
    let plan = grover_plan(a.qubits, a.target, a.rule.into()).map_err(usage)?;
    let t = a.iterations.unwrap_or(plan.iterations);
    let o = run_grover(a.qubits, a.target, t).map_err(usage)?;
    let report = GroverReport {
        n: a.qubits,
        target: a.target,
        iterations: t,
        theta: plan.theta,
        predicted_success: o.predicted_success,
        simulated_success: o.simulated_success,
        measured: o.measured,
    };
    if a.json {
        json_line(out, &report).map_err(io_failure)?;
    } else {
        (|| {
            writeln!(out, "n                  {}", report.n)?;
            writeln!(out, "target             {}", report.target)?;
            writeln!(out, "iterations         {}", report.iterations)?;
            writeln!(out, "theta              {:.12}", report.theta)?;
            writeln!(out, "predicted_success  {:.12}", report.predicted_success)?;
            writeln!(out, "simulated_success  {:.12}", report.simulated_success)?;
            writeln!(out, "measured           {}", report.measured)?;
            Ok(())
        })()
        .map_err(io_failure)?;
    }
    let ok = (o.predicted_success - o.simulated_success).abs() <= TOLERANCE;
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}

fn topologies(t: TopologyArg) -> Vec<TopologyKind> {
    match t {
        TopologyArg::Grid => vec![TopologyKind::Grid],
        TopologyArg::Full => vec![TopologyKind::Full],
        TopologyArg::Both => vec![TopologyKind::Grid, TopologyKind::Full],
    }
}

fn grid_dominates(report: &CostReport) -> bool {
    report
        .rows
        .iter()
        .filter(|r| r.topology == TopologyKind::Grid)
        .all(|g| {
            report
                .rows
                .iter()
                .filter(|f| {
                    f.topology == TopologyKind::Full && f.n == g.n && f.algorithm == g.algorithm
                })
                .all(|f| {
                    g.two_qubit_total >= f.two_qubit_total
                        && g.two_qubit_diffusion >= f.two_qubit_diffusion
                })
        })
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if a.min % 2 == 1 || a.max % 2 == 1 {
        return Err(usage(format!(
            "--min and --max must be even, got {} and {}",
            a.min, a.max
        )));
    }
    if a.min < 2 || a.min > a.max || a.max > MAX_CONSTRUCTED_QUBITS {
        return Err(usage(format!(
            "need 2 <= --min <= --max <= {MAX_CONSTRUCTED_QUBITS}"
        )));
    }
    let cfg = SweepConfig {
        n_min: a.min,
        n_max: a.max,
        topologies: topologies(a.topology),
        model: CostModel::new(a.strategy.into()).with_k(a.k),
        diffusion_only: a.diffusion_only,
        rule: a.rule.into(),
    };
    let report = sweep(&cfg).map_err(usage)?;
    let summary: &mut dyn Write = match &a.out {
        Some(path) => {
            emit_csv(&report, path).map_err(|e| Failure {
                code: EXIT_VIOLATION,
                message: e.to_string(),
            })?;
            out
        }
        None => {
            out.write_all(to_csv(&report).map_err(usage)?.as_bytes())
                .map_err(io_failure)?;
            err
        }
    };
    if let Some(path) = &a.json_out {
        emit_json(&report, path).map_err(|e| Failure {
            code: EXIT_VIOLATION,
            message: e.to_string(),
        })?;
    }
    (|| {
        writeln!(
            summary,
            "{} rows, strategy {}",
            report.rows.len(),
            cfg.model.strategy
        )?;
        writeln!(summary, "n   topology  grover/recursive (diffusion)")?;
        for (n, topo, ratio) in report.diffusion_ratios() {
            writeln!(summary, "{n:<3} {:<9} {ratio:.3}", topo.to_string())?;
        }
        Ok(())
    })()
    .map_err(io_failure)?;
    Ok(if grid_dominates(&report) {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

#[derive(Debug, Serialize)]
struct CrossoverReport {
    strategy: DecompositionStrategy,
    k: u64,
    crossover: Option<usize>,
    recursive_cost: Option<u64>,
    grover_cost: Option<u64>,
    scan_bound: Option<usize>,
    reference: usize,
    reference_kind: ReferenceKind,
    delta: Option<i64>,
}

fn cmd_crossover(a: &CrossoverArgs, out: &mut dyn Write) -> CmdResult {
    let strategies = match a.strategy {
        Some(s) => vec![s.into()],
        None => DecompositionStrategy::ALL.to_vec(),
    };
    let reports: Vec<CrossoverReport> = strategies
        .into_iter()
        .map(|s| {
            let model = CostModel::new(s).with_k(a.k);
            let (reference, reference_kind) = reference_crossover(s);
            let c = crossover(&model, a.rule.into());
            let (crossover, recursive_cost, grover_cost, scan_bound) = match c {
                Crossover::Found {
                    n,
                    recursive,
                    grover,
                } => (Some(n), Some(recursive), Some(grover), None),
                Crossover::NotFound { bound } => (None, None, None, Some(bound)),
            };
            CrossoverReport {
                strategy: s,
                k: model.k,
                crossover,
                recursive_cost,
                grover_cost,
                scan_bound,
                reference,
                reference_kind,
                delta: crossover.map(|n| n as i64 - reference as i64),
            }
        })
        .collect();
    if a.json {
        json_line(out, &reports).map_err(io_failure)?;
    } else {
        (|| {
            for r in &reports {
                let found = match (r.crossover, r.scan_bound) {
                    (Some(n), _) => n.to_string(),
                    (None, Some(b)) => format!("none <= {b}"),
                    _ => unreachable!(),
                };
                let reference = match r.reference_kind {
                    ReferenceKind::Near => format!("{}", r.reference),
                    ReferenceKind::Beyond => format!("> {}", r.reference),
                };
                let delta = r
                    .delta
                    .map(|d| format!("{d:+}"))
                    .unwrap_or_else(|| "n/a".into());
                writeln!(
                    out,
                    "{:<15} crossover {:<10} reference {:<5} delta {delta}",
                    r.strategy.to_string(),
                    found,
                    reference
                )?;
                if let (Some(rc), Some(gc)) = (r.recursive_cost, r.grover_cost) {
                    writeln!(out, "{:<15} recursive {rc} >= grover {gc}", "")?;
                }
            }
            Ok(())
        })()
        .map_err(io_failure)?;
    }
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    if a.max_qubits < 2 || a.max_qubits > MAX_VERIFY_QUBITS {
        return Err(usage(format!(
            "--max-qubits must be in 2..={MAX_VERIFY_QUBITS}"
        )));
    }
    let report = run_suite(a.max_qubits, a.seed);
    if a.json {
        json_line(out, &report).map_err(io_failure)?;
    } else {
        (|| {
            for c in &report.checks {
                writeln!(
                    out,
                    "{} {:<22} {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                )?;
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            writeln!(out, "{passed}/{} checks passed", report.checks.len())
        })()
        .map_err(io_failure)?;
    }
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn build_circuit(a: &CircuitArgs) -> Result<Circuit, Failure> {
    check_sim_width(a.qubits)?;
    let c = match (a.kind, a.prefix) {
        (KindArg::Search, None) => {
            deterministic_search_circuit(&SearchSpec::new(a.qubits, a.target).map_err(usage)?)
        }
        (KindArg::Search, Some(k)) if k % 2 == 1 => {
            odd_prefix_search_circuit(a.qubits, a.target, k)
        }
        (KindArg::Search, Some(k)) => {
            partial_search_circuit(&SearchSpec::new(a.qubits, a.target).map_err(usage)?, k)
        }
        (KindArg::Grover, _) => grover_circuit(
            a.qubits,
            a.target,
            a.iterations
                .unwrap_or_else(|| grover_iterations(a.qubits, IterationRule::Floor)),
        ),
    }
    .map_err(usage)?;
    Ok(if a.diffusion_only {
        diffusion_only(&c)
    } else {
        c
    })
}

fn cmd_circuit(a: &CircuitArgs, out: &mut dyn Write) -> CmdResult {
    let c = build_circuit(a)?;
    let text = match a.route {
        None if !a.lower => to_dump(&c),
        None => to_dump(&lower_circuit(&c, DecompositionStrategy::AncillaChain).map_err(usage)?),
        Some(t) => {
            let topo = match t {
                TopologyArg::Grid => TopologyKind::Grid,
                TopologyArg::Full => TopologyKind::Full,
                TopologyArg::Both => return Err(usage("--route takes grid or full")),
            };
            let lowered = lower_circuit(&c, DecompositionStrategy::AncillaChain).map_err(usage)?;
            let map = topo.coupling_map(lowered.width());
            let layout = match topo {
                TopologyKind::Grid => default_layout(&map),
                TopologyKind::Full => Layout::identity(lowered.width()),
            };
            let routed = route(&lowered, &map, &layout).map_err(usage)?;
            let join = |l: &Layout| {
                l.as_slice()
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            format!(
                "# topology {topo}\n# initial_layout {}\n# final_layout {}\n# swaps {}\n{}",
                join(&routed.initial_layout),
                join(&routed.final_layout),
                routed.swap_count,
                to_dump(&routed.circuit)
            )
        }
    };
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Search(a) => cmd_search(a, out),
        Command::Partial(a) => cmd_partial(a, out),
        Command::Grover(a) => cmd_grover(a, out),
        Command::Bench(a) => cmd_bench(a, out, err),
        Command::Crossover(a) => cmd_crossover(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Circuit(a) => cmd_circuit(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Applies `DQS_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<(), String> {
    match std::env::var("DQS_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| format!("DQS_THREADS must be a positive integer, got `{v}`"))?;
            if n == 0 {
                return Err("DQS_THREADS must be positive".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
        Err(_) => Ok(()),
    }
}
