//! Circuit builders and runners for the recursive deterministic search, its
//! partial-search variants, and the Grover baseline.
//!
//! The prefix oracle `U_m` negates every basis state whose first `n - m`
//! bits agree with the target. Only `U_0` is a primitive (`OraclePrefix(0)`);
//! larger prefix oracles are built by inlining
//!
//! ```text
//! U_m = U_{m-2} · D2(n-m, n-m+1) · U_{m-2} · D2(n-m, n-m+1) · U_{m-2}
//! ```
//!
//! The expansion agrees with the ideal `U_m` on every state that is uniform
//! over its last `m` qubits, which covers every state the search produces.
//! It is not the ideal `U_m` as an operator on the full space.

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::statevector::{StateError, StateVector, MAX_QUBITS, NORM_TOLERANCE};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgoError {
    #[error("register width {0} is unsupported (1..={MAX_QUBITS})")]
    Width(usize),
    #[error("full search needs an even register width, got {0}; use the odd-prefix ancilla variant (`partial --odd`) for odd widths")]
    OddWidth(usize),
    #[error("target {target} does not fit in {n} qubits")]
    TargetOutOfRange { target: usize, n: usize },
    #[error("suffix length {m} invalid for width {n} (must be even and at most n - 2)")]
    BadSuffix { m: usize, n: usize },
    #[error("prefix length {k} invalid for width {n}")]
    BadPrefix { k: usize, n: usize },
    #[error("prefix length {0} is odd; use the odd-prefix ancilla variant")]
    OddPrefix(usize),
    #[error("prefix length {0} is even; the ancilla variant only handles odd prefixes")]
    EvenPrefix(usize),
    #[error("qubits {0} and {0} must differ")]
    DuplicateQubit(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// A search problem: an `n`-qubit register and the single marked index `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchSpec {
    n: usize,
    x: usize,
}

impl SearchSpec {
    pub fn new(n: usize, x: usize) -> Result<Self, AlgoError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(AlgoError::Width(n));
        }
        if x >> n != 0 {
            return Err(AlgoError::TargetOutOfRange { target: x, n });
        }
        Ok(Self { n, x })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> usize {
        self.x
    }

    fn require_even(&self) -> Result<(), AlgoError> {
        if self.n % 2 == 1 {
            Err(AlgoError::OddWidth(self.n))
        } else {
            Ok(())
        }
    }
}

/// Base-oracle and two-qubit-diffuser applications observed while running a circuit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CallTally {
    pub u0_calls: u64,
    pub d2_calls: u64,
}

/// Total base-oracle (and D2) applications of a full search on `n` qubits,
/// obtained by summing `3^(m/2)` over every stage oracle `U_m`:
/// `(3^(n/2) - 1) / 2`.
pub fn search_call_count(n: usize) -> u64 {
    (3u64.pow((n / 2) as u32) - 1) / 2
}

/// The closed form `(3^(n/2) - 3) / 2` printed alongside the complexity
/// analysis of the method. It omits the final `U_0` stage and undercounts the
/// instrumented total by exactly one.
pub fn reference_call_formula(n: usize) -> u64 {
    (3u64.pow((n / 2) as u32)).saturating_sub(3) / 2
}

/// Gate sequence of the two-qubit diffuser `I - 2|s2><s2|`:
/// `H H · X X · CZ · X X · H H`. The circuit's width is `max(qa, qb) + 1`.
pub fn d2_subcircuit(qa: usize, qb: usize) -> Result<Circuit, AlgoError> {
    if qa == qb {
        return Err(AlgoError::DuplicateQubit(qa));
    }
    let mut c = Circuit::new(qa.max(qb) + 1);
    c.extend(d2_gates(qa, qb))?;
    Ok(c)
}

pub(crate) fn d2_gates(qa: usize, qb: usize) -> [Gate; 9] {
    [
        Gate::H(qa),
        Gate::H(qb),
        Gate::X(qa),
        Gate::X(qb),
        Gate::Cz(qa, qb),
        Gate::X(qa),
        Gate::X(qb),
        Gate::H(qa),
        Gate::H(qb),
    ]
}

/// Inlines `U_level` over a register of `width` qubits.
fn push_expansion(out: &mut Vec<Gate>, width: usize, level: usize) {
    if level == 0 {
        out.push(Gate::OraclePrefix(0));
        return;
    }
    let pair = (width - level, width - level + 1);
    push_expansion(out, width, level - 2);
    out.push(Gate::D2(pair.0, pair.1));
    push_expansion(out, width, level - 2);
    out.push(Gate::D2(pair.0, pair.1));
    push_expansion(out, width, level - 2);
}

/// Circuit realizing `U_m` for target `x` from `3^(m/2)` base-oracle calls
/// and `3^(m/2) - 1` D2 blocks.
pub fn expand_oracle(n: usize, m: usize, x: usize) -> Result<Circuit, AlgoError> {
    let spec = SearchSpec::new(n, x)?;
    if m % 2 == 1 || m + 2 > n {
        return Err(AlgoError::BadSuffix { m, n });
    }
    let mut gates = Vec::new();
    push_expansion(&mut gates, n, m);
    let mut c = Circuit::new(n).bind_target(spec.x)?;
    c.extend(gates)?;
    Ok(c)
}

fn push_stage(out: &mut Vec<Gate>, width: usize, stage: usize) {
    push_expansion(out, width, width - 2 * stage - 2);
    out.push(Gate::D2(2 * stage, 2 * stage + 1));
}

/// One stage per resolved qubit pair: `U_{n-2i-2}` followed by D2 on
/// `(2i, 2i+1)`, with the largest oracle first.
pub fn search_stages(spec: &SearchSpec) -> Result<Vec<Circuit>, AlgoError> {
    spec.require_even()?;
    (0..spec.n / 2)
        .map(|i| {
            let mut gates = Vec::new();
            push_stage(&mut gates, spec.n, i);
            let mut c = Circuit::new(spec.n).bind_target(spec.x)?;
            c.extend(gates)?;
            Ok(c)
        })
        .collect()
}

pub fn deterministic_search_circuit(spec: &SearchSpec) -> Result<Circuit, AlgoError> {
    partial_search_circuit(spec, spec.n)
}

/// The first `k / 2` stages of the full search.
pub fn partial_search_circuit(spec: &SearchSpec, k: usize) -> Result<Circuit, AlgoError> {
    spec.require_even()?;
    if k == 0 || k > spec.n {
        return Err(AlgoError::BadPrefix { k, n: spec.n });
    }
    if k % 2 == 1 {
        return Err(AlgoError::OddPrefix(k));
    }
    let mut gates = Vec::new();
    for i in 0..k / 2 {
        push_stage(&mut gates, spec.n, i);
    }
    let mut c = Circuit::new(spec.n).bind_target(spec.x)?;
    c.extend(gates)?;
    Ok(c)
}

/// Odd-prefix partial search.
///
/// A flag qubit is prepended as qubit 0 and put in `|+>`; the base oracle is
/// conditioned on it being `|1>`, which makes the widened target `1·x`. The
/// `(k + 1)`-bit prefix of the widened register is then resolved by ordinary
/// stages, leaving `|1>|x_0..x_{k-1}>` followed by a uniform suffix.
///
/// The stage recursion needs an even register. For even `n` a second pad
/// qubit is appended after the register (also in `|+>`, base oracle
/// conditioned on it reading `|0>`); it stays uniform and is returned to `|0>`
/// by a closing Hadamard. The circuit's logical width is therefore `n + 1`
/// for odd `n` and `n + 2` for even `n`.
pub fn odd_prefix_search_circuit(n: usize, x: usize, k: usize) -> Result<Circuit, AlgoError> {
    let spec = SearchSpec::new(n, x)?;
    if k == 0 || k > n {
        return Err(AlgoError::BadPrefix { k, n });
    }
    if k.is_multiple_of(2) {
        return Err(AlgoError::EvenPrefix(k));
    }
    let padded = n.is_multiple_of(2);
    let width = if padded { n + 2 } else { n + 1 };
    if width > MAX_QUBITS {
        return Err(AlgoError::Width(width));
    }
    let widened_target = if padded {
        (1 << (n + 1)) | (spec.x << 1)
    } else {
        (1 << n) | spec.x
    };

    let mut gates = vec![Gate::H(0)];
    if padded {
        gates.push(Gate::H(width - 1));
    }
    for i in 0..k.div_ceil(2) {
        push_stage(&mut gates, width, i);
    }
    if padded {
        gates.push(Gate::H(width - 1));
    }
    let mut c = Circuit::new(width).bind_target(widened_target)?;
    c.extend(gates)?;
    Ok(c)
}

/// Applies `circuit` gate by gate, counting base-oracle and D2 applications.
pub fn run_instrumented(
    circuit: &Circuit,
    input: &StateVector,
) -> Result<(StateVector, CallTally), AlgoError> {
    let mut tally = CallTally::default();
    for g in circuit.gates() {
        match g {
            Gate::OraclePrefix(0) => tally.u0_calls += 1,
            Gate::D2(..) => tally.d2_calls += 1,
            _ => {}
        }
    }
    // Circuits built here carry no ancillas, so a single pass suffices; the
    // interpreter re-validates widths and bindings.
    let out = circuit.simulate(input)?;
    Ok((out, tally))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub measured: usize,
    pub probability: f64,
    pub tally: CallTally,
}

/// Runs the full search from the uniform state and reads out the most
/// probable basis state.
pub fn run_search(spec: &SearchSpec) -> Result<SearchOutcome, AlgoError> {
    let circuit = deterministic_search_circuit(spec)?;
    let (state, tally) = run_instrumented(&circuit, &StateVector::uniform(spec.n)?)?;
    let (measured, probability) = state.most_probable();
    Ok(SearchOutcome {
        measured,
        probability,
        tally,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialOutcome {
    /// Most probable value of the first `k` bits of the target.
    pub prefix: usize,
    pub prefix_len: usize,
    pub prefix_probability: f64,
    pub suffix_min: f64,
    pub suffix_max: f64,
    pub tally: CallTally,
}

impl PartialOutcome {
    pub fn suffix_spread(&self) -> f64 {
        self.suffix_max - self.suffix_min
    }

    pub fn prefix_bits(&self) -> String {
        (0..self.prefix_len)
            .map(|b| {
                if self.prefix >> (self.prefix_len - 1 - b) & 1 == 1 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

/// Resolves the most probable `k`-bit prefix of `state` and the spread of
/// the suffix probabilities inside that block.
fn analyse_prefix(
    state: &StateVector,
    k: usize,
    tally: CallTally,
) -> Result<PartialOutcome, AlgoError> {
    let mut best = (0, f64::NEG_INFINITY);
    for p in 0..1usize << k {
        let prob = state.prefix_probability(p, k)?;
        if prob > best.1 {
            best = (p, prob);
        }
    }
    let block = state.block_probabilities(best.0, k)?;
    let suffix_min = block.iter().copied().fold(f64::INFINITY, f64::min);
    let suffix_max = block.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PartialOutcome {
        prefix: best.0,
        prefix_len: k,
        prefix_probability: best.1,
        suffix_min,
        suffix_max,
        tally,
    })
}

pub fn run_partial(spec: &SearchSpec, k: usize) -> Result<PartialOutcome, AlgoError> {
    let circuit = partial_search_circuit(spec, k)?;
    let (state, tally) = run_instrumented(&circuit, &StateVector::uniform(spec.n)?)?;
    analyse_prefix(&state, k, tally)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OddPrefixOutcome {
    /// Probability that the flag qubit reads `|1>`.
    pub flag_probability: f64,
    /// The resolved `k` bits of the target (flag excluded) with the
    /// probability of the whole `(k + 1)`-bit widened prefix.
    pub partial: PartialOutcome,
}

/// Runs [`odd_prefix_search_circuit`] from `|0>|s_n>` (plus a `|0>` pad for
/// even `n`) and reports the resolved prefix over the original register.
pub fn run_odd_prefix(n: usize, x: usize, k: usize) -> Result<OddPrefixOutcome, AlgoError> {
    let circuit = odd_prefix_search_circuit(n, x, k)?;
    let padded = circuit.num_logical() == n + 2;
    let mut input = StateVector::basis(1, 0)?.tensor(&StateVector::uniform(n)?)?;
    if padded {
        input = input.tensor(&StateVector::basis(1, 0)?)?;
    }
    let (state, tally) = run_instrumented(&circuit, &input)?;
    let state = if padded {
        let keep: Vec<usize> = (0..=n).collect();
        let (reduced, leaked) = state.extract(&keep)?;
        if leaked > NORM_TOLERANCE {
            return Err(CircuitError::DirtyAncilla(leaked).into());
        }
        reduced
    } else {
        state
    };
    let widened = analyse_prefix(&state, k + 1, tally)?;
    let flag_probability = state.prefix_probability(1, 1)?;
    let partial = PartialOutcome {
        prefix: widened.prefix & ((1 << k) - 1),
        prefix_len: k,
        ..widened
    };
    Ok(OddPrefixOutcome {
        flag_probability,
        partial,
    })
}

/// How the Grover iteration count is derived from `pi / (4θ) - 1/2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IterationRule {
    /// `floor(pi / (4θ) - 1/2)`.
    #[default]
    Floor,
    /// Nearest integer to `pi / (4θ) - 1/2`.
    Round,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverPlan {
    pub n: usize,
    pub x: usize,
    pub iterations: u64,
    pub theta: f64,
    pub predicted_success: f64,
}

/// `θ = asin(2^(-n/2))`, the optimal-iteration estimate under `rule`, and the
/// success probability `sin²((2t + 1)θ)`.
pub fn grover_plan(n: usize, x: usize, rule: IterationRule) -> Result<GroverPlan, AlgoError> {
    let spec = SearchSpec::new(n, x)?;
    let iterations = grover_iterations(n, rule);
    let theta = grover_theta(n);
    Ok(GroverPlan {
        n,
        x: spec.x,
        iterations,
        theta,
        predicted_success: grover_success(n, iterations),
    })
}

pub fn grover_theta(n: usize) -> f64 {
    (0.5f64).powf(n as f64 / 2.0).asin()
}

/// Iteration count for an `n`-qubit register. Valid for any `n` (the cost
/// scans go well past the simulator's width limit).
pub fn grover_iterations(n: usize, rule: IterationRule) -> u64 {
    let raw = PI / (4.0 * grover_theta(n)) - 0.5;
    // absorb rounding noise when `raw` is an exact integer (n = 2 gives 1)
    let t = match rule {
        IterationRule::Floor => (raw + 1e-9).floor(),
        IterationRule::Round => raw.round(),
    };
    t.max(0.0) as u64
}

/// Integer iteration count maximizing `sin²((2t + 1)θ)`, found by scanning
/// the neighbourhood of the real-valued optimum.
pub fn grover_optimal_iterations(n: usize) -> u64 {
    let hi = grover_iterations(n, IterationRule::Floor) + 2;
    (0..=hi)
        .max_by(|&a, &b| {
            grover_success(n, a)
                .total_cmp(&grover_success(n, b))
                .then(b.cmp(&a))
        })
        .expect("non-empty range")
}

pub fn grover_success(n: usize, t: u64) -> f64 {
    ((2 * t + 1) as f64 * grover_theta(n)).sin().powi(2)
}

/// Global diffuser `I - 2|s><s|`: H, X on all qubits, MCZ onto the last
/// qubit, X, H.
pub fn grover_diffuser_gates(n: usize) -> Vec<Gate> {
    let mut g = Vec::with_capacity(4 * n + 1);
    g.extend((0..n).map(Gate::H));
    g.extend((0..n).map(Gate::X));
    g.push(Gate::Mcz {
        controls: (0..n - 1).collect(),
        target: n - 1,
    });
    g.extend((0..n).map(Gate::X));
    g.extend((0..n).map(Gate::H));
    g
}

/// `t` Grover iterations, each the base oracle followed by the global diffuser.
pub fn grover_circuit(n: usize, x: usize, t: u64) -> Result<Circuit, AlgoError> {
    let spec = SearchSpec::new(n, x)?;
    let mut c = Circuit::new(n).bind_target(spec.x)?;
    let diffuser = grover_diffuser_gates(n);
    for _ in 0..t {
        c.push(Gate::OraclePrefix(0))?;
        c.extend(diffuser.iter().cloned())?;
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroverOutcome {
    pub iterations: u64,
    pub predicted_success: f64,
    pub simulated_success: f64,
    pub measured: usize,
}

pub fn run_grover(n: usize, x: usize, t: u64) -> Result<GroverOutcome, AlgoError> {
    let circuit = grover_circuit(n, x, t)?;
    let state = circuit.simulate(&StateVector::uniform(n)?)?;
    Ok(GroverOutcome {
        iterations: t,
        predicted_success: grover_success(n, t),
        simulated_success: state.probability(x)?,
        measured: state.most_probable().0,
    })
}

/// Copy of `circuit` with every oracle gate replaced by a barrier, leaving
/// only the diffusion content.
pub fn diffusion_only(circuit: &Circuit) -> Circuit {
    let mut out = Circuit::with_ancillas(circuit.num_logical(), circuit.num_ancilla());
    out.set_target(circuit.target())
        .expect("target already validated");
    for g in circuit.gates() {
        let g = match g {
            Gate::OraclePrefix(_) => Gate::Barrier,
            other => other.clone(),
        };
        out.push(g).expect("gate already validated");
    }
    out
}
