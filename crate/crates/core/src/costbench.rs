//! Two-qubit gate accounting for the recursive search and the Grover
//! baseline: analytic cost models for the global controlled-phase block,
//! crossover scans, and constructed sweeps over grid and fully connected
//! coupling maps.

use crate::algorithms::{
    deterministic_search_circuit, diffusion_only, grover_circuit, grover_iterations,
    search_call_count, AlgoError, IterationRule, SearchSpec,
};
use crate::circuit::{Circuit, CouplingMap, Gate};
use crate::transpiler::{
    default_layout, DecompositionStrategy, Layout, Lowering, Router, TranspileError,
};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

/// Widest register for which sweeps construct and route real circuits.
pub const MAX_CONSTRUCTED_QUBITS: usize = 24;
/// Largest even width examined by [`crossover`].
pub const CROSSOVER_SCAN_LIMIT: usize = 60;

pub const CSV_HEADER: &str =
    "n,algorithm,topology,strategy,diffusion_only,u0_calls,d2_calls,two_qubit_diffusion,two_qubit_total,swap_count";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("width {0} must be even")]
    OddWidth(usize),
    #[error(
        "sweep bounds {min}..={max} invalid (need 2 <= min <= max <= {MAX_CONSTRUCTED_QUBITS})"
    )]
    Range { min: usize, max: usize },
    #[error("sweep needs at least one topology")]
    NoTopology,
    #[error("cost report is empty")]
    EmptyReport,
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error(transparent)]
    Transpile(#[from] TranspileError),
}

/// Two-qubit cost of an `n`-qubit controlled-phase block under one
/// decomposition family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CostModel {
    pub strategy: DecompositionStrategy,
    /// Quadratic constant for `ZeroAncilla`; ignored otherwise.
    pub k: u64,
}

impl CostModel {
    pub fn new(strategy: DecompositionStrategy) -> Self {
        Self { strategy, k: 1 }
    }

    pub fn with_k(self, k: u64) -> Self {
        Self { k, ..self }
    }

    /// `6n - 6`, `16n - 24` or `k·n²`, clamped at zero.
    pub fn block_cost(&self, n: usize) -> u64 {
        let n = n as u64;
        match self.strategy {
            DecompositionStrategy::AncillaChain => (6 * n).saturating_sub(6),
            DecompositionStrategy::SingleAncilla => (16 * n).saturating_sub(24),
            DecompositionStrategy::ZeroAncilla => self.k.saturating_mul(n * n),
        }
    }
}

/// D2 applications of the full search, one two-qubit gate each.
pub fn recursive_diffusion_cost(n: usize) -> Result<u64, CostError> {
    if n % 2 == 1 || n == 0 {
        return Err(CostError::OddWidth(n));
    }
    Ok(search_call_count(n))
}

/// Analytic Grover diffusion cost: iterations times one global block.
pub fn grover_diffusion_cost(n: usize, model: &CostModel, rule: IterationRule) -> u64 {
    grover_iterations(n, rule).saturating_mul(model.block_cost(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Crossover {
    /// Smallest even `n` where the recursive cost reaches the Grover cost.
    Found {
        n: usize,
        recursive: u64,
        grover: u64,
    },
    NotFound {
        bound: usize,
    },
}

impl Crossover {
    pub fn value(&self) -> Option<usize> {
        match self {
            Crossover::Found { n, .. } => Some(*n),
            Crossover::NotFound { .. } => None,
        }
    }
}

pub fn crossover(model: &CostModel, rule: IterationRule) -> Crossover {
    (2..=CROSSOVER_SCAN_LIMIT)
        .step_by(2)
        .find_map(|n| {
            let recursive = search_call_count(n);
            let grover = grover_diffusion_cost(n, model, rule);
            (recursive >= grover).then_some(Crossover::Found {
                n,
                recursive,
                grover,
            })
        })
        .unwrap_or(Crossover::NotFound {
            bound: CROSSOVER_SCAN_LIMIT,
        })
}

/// How a literature crossover estimate is phrased.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Near,
    Beyond,
}

/// Reference crossover estimates for fully connected hardware.
pub fn reference_crossover(strategy: DecompositionStrategy) -> (usize, ReferenceKind) {
    match strategy {
        DecompositionStrategy::AncillaChain => (26, ReferenceKind::Near),
        DecompositionStrategy::SingleAncilla => (31, ReferenceKind::Near),
        DecompositionStrategy::ZeroAncilla => (36, ReferenceKind::Beyond),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Recursive,
    Grover,
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgorithmKind::Recursive => "recursive",
            AlgorithmKind::Grover => "grover",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Grid,
    Full,
}

impl TopologyKind {
    /// Near-square grid or complete graph over `width` qubits.
    pub fn coupling_map(&self, width: usize) -> CouplingMap {
        let width = width.max(1);
        match self {
            TopologyKind::Grid => CouplingMap::grid_for(width),
            TopologyKind::Full => CouplingMap::full(width),
        }
        .expect("non-zero width")
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TopologyKind::Grid => "grid",
            TopologyKind::Full => "full",
        })
    }
}

impl FromStr for TopologyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(TopologyKind::Grid),
            "full" => Ok(TopologyKind::Full),
            other => Err(format!(
                "unknown topology `{other}` (expected grid or full)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostRow {
    pub n: usize,
    pub algorithm: AlgorithmKind,
    pub topology: TopologyKind,
    pub strategy: DecompositionStrategy,
    pub diffusion_only: bool,
    pub u0_calls: u64,
    pub d2_calls: u64,
    pub two_qubit_diffusion: u64,
    pub two_qubit_total: u64,
    pub swap_count: u64,
    /// Gate layers of the routed circuit; constructed strategies only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u64>,
}

impl CostRow {
    fn sort_key(&self) -> (usize, AlgorithmKind, TopologyKind) {
        (self.n, self.algorithm, self.topology)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CostReport {
    pub rows: Vec<CostRow>,
}

impl CostReport {
    pub fn sort(&mut self) {
        self.rows.sort_by_key(CostRow::sort_key);
    }

    /// Grover over recursive diffusion cost, per `(n, topology)`.
    pub fn diffusion_ratios(&self) -> Vec<(usize, TopologyKind, f64)> {
        let mut out = Vec::new();
        for g in self
            .rows
            .iter()
            .filter(|r| r.algorithm == AlgorithmKind::Grover)
        {
            if let Some(r) = self.rows.iter().find(|r| {
                r.algorithm == AlgorithmKind::Recursive && r.n == g.n && r.topology == g.topology
            }) {
                if r.two_qubit_diffusion > 0 {
                    out.push((
                        g.n,
                        g.topology,
                        g.two_qubit_diffusion as f64 / r.two_qubit_diffusion as f64,
                    ));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub topologies: Vec<TopologyKind>,
    pub model: CostModel,
    /// Skip the oracle-bearing circuits; totals then equal diffusion counts.
    pub diffusion_only: bool,
    pub rule: IterationRule,
}

impl SweepConfig {
    pub fn new(n_min: usize, n_max: usize) -> Self {
        Self {
            n_min,
            n_max,
            topologies: vec![TopologyKind::Grid, TopologyKind::Full],
            model: CostModel::new(DecompositionStrategy::AncillaChain),
            diffusion_only: false,
            rule: IterationRule::Floor,
        }
    }
}

/// Counts from one lowering and routing pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCounts {
    /// Two-qubit gates, SWAPs weighted 3.
    pub two_qubit: u64,
    pub swaps: u64,
    pub depth: u64,
}

/// Lowers `circuit` with the clean-ancilla chain and routes it onto
/// `topology`, streaming gate by gate. For analytic models the two-qubit
/// content of each multi-controlled block is replaced by the model's block
/// cost; the SWAPs the explicit block needs are still charged.
pub fn measure(
    circuit: &Circuit,
    model: &CostModel,
    topology: TopologyKind,
) -> Result<GateCounts, CostError> {
    let lowering = Lowering::for_circuit(circuit, DecompositionStrategy::AncillaChain)?;
    let map = topology.coupling_map(lowering.width());
    let layout = match topology {
        TopologyKind::Grid => default_layout(&map),
        TopologyKind::Full => Layout::identity(lowering.width()),
    };
    let mut router = Router::new(&map, &layout, lowering.width())?;
    let explicit = model.strategy.has_explicit_form();
    let mut counts = GateCounts::default();
    let mut levels = vec![0u64; map.num_physical()];
    let mut lowered = Vec::new();
    let mut routed = Vec::new();

    for g in circuit.gates() {
        let block = match g {
            Gate::Mcz { controls, .. } => Some(controls.len() + 1),
            Gate::OraclePrefix(_) => Some(circuit.num_logical()),
            _ => None,
        };
        lowered.clear();
        lowering.lower(g, &mut |lg| lowered.push(lg))?;
        routed.clear();
        for lg in &lowered {
            router.route_gate(lg, &mut |pg| routed.push(pg))?;
        }
        for pg in &routed {
            let qs = pg.qubits();
            if !qs.is_empty() {
                let layer = qs.iter().map(|&q| levels[q]).max().unwrap_or(0) + 1;
                for &q in &qs {
                    levels[q] = layer;
                }
            }
            match pg {
                Gate::Swap(..) => {
                    counts.swaps += 1;
                    counts.two_qubit += 3;
                }
                Gate::Cz(..) | Gate::Cx(..) if explicit || block.is_none() => counts.two_qubit += 1,
                _ => {}
            }
        }
        if let (false, Some(width)) = (explicit, block) {
            counts.two_qubit += model.block_cost(width);
        }
    }
    counts.depth = levels.into_iter().max().unwrap_or(0);
    Ok(counts)
}

fn sweep_row(
    n: usize,
    algorithm: AlgorithmKind,
    topology: TopologyKind,
    cfg: &SweepConfig,
) -> Result<CostRow, CostError> {
    let (circuit, u0_calls, d2_calls) = match algorithm {
        AlgorithmKind::Recursive => {
            let c = deterministic_search_circuit(&SearchSpec::new(n, 0)?)?;
            let (u0, d2) = (c.oracle_count(), c.d2_count());
            (c, u0, d2)
        }
        AlgorithmKind::Grover => {
            let t = grover_iterations(n, cfg.rule);
            (grover_circuit(n, 0, t)?, t, 0)
        }
    };
    let diffusion = measure(&diffusion_only(&circuit), &cfg.model, topology)?;
    let total = if cfg.diffusion_only {
        diffusion
    } else {
        measure(&circuit, &cfg.model, topology)?
    };
    Ok(CostRow {
        n,
        algorithm,
        topology,
        strategy: cfg.model.strategy,
        diffusion_only: cfg.diffusion_only,
        u0_calls,
        d2_calls,
        two_qubit_diffusion: diffusion.two_qubit,
        two_qubit_total: total.two_qubit,
        swap_count: total.swaps,
        depth: cfg
            .model
            .strategy
            .has_explicit_form()
            .then_some(total.depth),
    })
}

/// Builds, lowers and routes both algorithms for every even `n` in range on
/// each requested topology. Rows are computed in parallel and returned in
/// `(n, algorithm, topology)` order. The toy oracle marks index 0.
pub fn sweep(cfg: &SweepConfig) -> Result<CostReport, CostError> {
    if cfg.n_min < 2 || cfg.n_min > cfg.n_max || cfg.n_max > MAX_CONSTRUCTED_QUBITS {
        return Err(CostError::Range {
            min: cfg.n_min,
            max: cfg.n_max,
        });
    }
    if cfg.n_min % 2 == 1 {
        return Err(CostError::OddWidth(cfg.n_min));
    }
    if cfg.n_max % 2 == 1 {
        return Err(CostError::OddWidth(cfg.n_max));
    }
    if cfg.topologies.is_empty() {
        return Err(CostError::NoTopology);
    }
    let mut topologies = cfg.topologies.clone();
    topologies.sort();
    topologies.dedup();
    let jobs: Vec<_> = (cfg.n_min..=cfg.n_max)
        .step_by(2)
        .flat_map(|n| {
            let topologies = topologies.clone();
            [AlgorithmKind::Recursive, AlgorithmKind::Grover]
                .into_iter()
                .flat_map(move |a| topologies.clone().into_iter().map(move |t| (n, a, t)))
        })
        .collect();
    let rows = jobs
        .into_par_iter()
        .map(|(n, a, t)| sweep_row(n, a, t, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = CostReport { rows };
    report.sort();
    Ok(report)
}

pub fn to_csv(report: &CostReport) -> Result<String, CostError> {
    if report.rows.is_empty() {
        return Err(CostError::EmptyReport);
    }
    let mut rows: Vec<&CostRow> = report.rows.iter().collect();
    rows.sort_by_key(|r| r.sort_key());
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.algorithm,
            r.topology,
            r.strategy,
            r.diffusion_only,
            r.u0_calls,
            r.d2_calls,
            r.two_qubit_diffusion,
            r.two_qubit_total,
            r.swap_count
        );
    }
    Ok(out)
}

/// Rows as a JSON array with the CSV field names, plus `depth` where known.
pub fn to_json(report: &CostReport) -> Result<String, CostError> {
    if report.rows.is_empty() {
        return Err(CostError::EmptyReport);
    }
    let mut sorted = report.clone();
    sorted.sort();
    Ok(serde_json::to_string_pretty(&sorted).expect("rows serialize") + "\n")
}

fn write_file(path: &Path, text: &str) -> Result<(), CostError> {
    std::fs::write(path, text).map_err(|e| CostError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn emit_csv(report: &CostReport, path: &Path) -> Result<(), CostError> {
    write_file(path, &to_csv(report)?)
}

pub fn emit_json(report: &CostReport, path: &Path) -> Result<(), CostError> {
    write_file(path, &to_json(report)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::grover_diffuser_gates;
    use crate::transpiler::lower_circuit;

    fn model(s: DecompositionStrategy) -> CostModel {
        CostModel::new(s)
    }

    #[test]
    fn recursive_cost_examples() {
        assert_eq!(recursive_diffusion_cost(2), Ok(1));
        assert_eq!(recursive_diffusion_cost(4), Ok(4));
        assert_eq!(recursive_diffusion_cost(18), Ok(9841));
        assert_eq!(recursive_diffusion_cost(5), Err(CostError::OddWidth(5)));
        for n in (2..=16).step_by(2) {
            let c = deterministic_search_circuit(&SearchSpec::new(n, 0).unwrap()).unwrap();
            assert_eq!(c.d2_count(), recursive_diffusion_cost(n).unwrap());
        }
    }

    #[test]
    fn grover_cost_examples() {
        let f = IterationRule::Floor;
        assert_eq!(
            grover_diffusion_cost(2, &model(DecompositionStrategy::AncillaChain), f),
            6
        );
        assert_eq!(
            grover_diffusion_cost(10, &model(DecompositionStrategy::AncillaChain), f),
            1296
        );
        assert_eq!(
            grover_diffusion_cost(18, &model(DecompositionStrategy::ZeroAncilla), f),
            129_924
        );
        assert_eq!(
            model(DecompositionStrategy::SingleAncilla).block_cost(4),
            40
        );
        assert_eq!(
            model(DecompositionStrategy::ZeroAncilla)
                .with_k(3)
                .block_cost(4),
            48
        );
    }

    #[test]
    fn crossover_examples() {
        let f = IterationRule::Floor;
        assert_eq!(
            crossover(&model(DecompositionStrategy::AncillaChain), f),
            Crossover::Found {
                n: 28,
                recursive: 2_391_484,
                grover: 2_084_454
            }
        );
        assert_eq!(
            crossover(&model(DecompositionStrategy::SingleAncilla), f).value(),
            Some(34)
        );
        assert_eq!(
            crossover(&model(DecompositionStrategy::ZeroAncilla), f).value(),
            Some(40)
        );
        assert_eq!(
            crossover(&model(DecompositionStrategy::ZeroAncilla).with_k(1000), f),
            Crossover::NotFound {
                bound: CROSSOVER_SCAN_LIMIT
            }
        );
    }

    #[test]
    fn constructed_diffusion_rows() {
        let mut cfg = SweepConfig::new(4, 8);
        cfg.diffusion_only = true;
        let report = sweep(&cfg).unwrap();
        assert_eq!(report.rows.len(), 3 * 2 * 2);
        for r in report
            .rows
            .iter()
            .filter(|r| r.algorithm == AlgorithmKind::Recursive)
        {
            assert_eq!(
                r.two_qubit_diffusion,
                recursive_diffusion_cost(r.n).unwrap()
            );
            assert_eq!(r.swap_count, 0);
        }
        let n8: Vec<_> = report
            .rows
            .iter()
            .filter(|r| r.n == 8 && r.algorithm == AlgorithmKind::Recursive)
            .collect();
        assert!(n8.iter().all(|r| r.two_qubit_diffusion == 40));
        // full-topology grover = t x explicit lowered diffuser
        for r in report
            .rows
            .iter()
            .filter(|r| r.algorithm == AlgorithmKind::Grover)
        {
            let mut d = Circuit::new(r.n);
            d.extend(grover_diffuser_gates(r.n)).unwrap();
            let per = lower_circuit(&d, DecompositionStrategy::AncillaChain)
                .unwrap()
                .two_qubit_count()
                .unwrap();
            let t = grover_iterations(r.n, IterationRule::Floor);
            if r.topology == TopologyKind::Full {
                assert_eq!(r.two_qubit_diffusion, t * per);
            } else {
                assert!(r.two_qubit_diffusion >= t * per);
            }
        }
    }

    #[test]
    fn analytic_ratio_at_eight() {
        let mut cfg = SweepConfig::new(8, 8);
        cfg.diffusion_only = true;
        cfg.topologies = vec![TopologyKind::Full];
        cfg.model = model(DecompositionStrategy::ZeroAncilla);
        let report = sweep(&cfg).unwrap();
        let ratios = report.diffusion_ratios();
        assert_eq!(ratios.len(), 1);
        assert!((ratios[0].2 - 19.2).abs() < 1e-12);
        assert!(report.rows.iter().all(|r| r.depth.is_none()));
    }

    #[test]
    fn grid_counts_dominate_full() {
        let report = sweep(&SweepConfig::new(4, 6)).unwrap();
        for g in report
            .rows
            .iter()
            .filter(|r| r.topology == TopologyKind::Grid)
        {
            let f = report
                .rows
                .iter()
                .find(|r| {
                    r.topology == TopologyKind::Full && r.n == g.n && r.algorithm == g.algorithm
                })
                .unwrap();
            assert!(g.two_qubit_total >= f.two_qubit_total);
            assert!(g.two_qubit_diffusion >= f.two_qubit_diffusion);
            assert_eq!(f.swap_count, 0);
        }
    }

    #[test]
    fn csv_format() {
        let mut cfg = SweepConfig::new(2, 2);
        cfg.topologies = vec![TopologyKind::Full];
        let report = sweep(&cfg).unwrap();
        let csv = to_csv(&report).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "2,recursive,full,ancilla-chain,false,1,1,1,2,0");
        assert!(!csv.contains('\r'));
        assert_eq!(csv, to_csv(&sweep(&cfg).unwrap()).unwrap());
        assert_eq!(to_csv(&CostReport::default()), Err(CostError::EmptyReport));
    }

    #[test]
    fn sweep_bounds() {
        assert_eq!(sweep(&SweepConfig::new(3, 6)), Err(CostError::OddWidth(3)));
        assert!(matches!(
            sweep(&SweepConfig::new(4, 26)),
            Err(CostError::Range { .. })
        ));
        assert!(matches!(
            sweep(&SweepConfig::new(6, 4)),
            Err(CostError::Range { .. })
        ));
    }
}
