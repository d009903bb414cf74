//! Circuit IR: an ordered gate list over `num_logical` register qubits plus
//! `num_ancilla` scratch qubits appended after them (indices
//! `num_logical..num_logical + num_ancilla`).

use crate::statevector::{matrices, StateError, StateVector, NORM_TOLERANCE};
use std::fmt;
use thiserror::Error;

pub mod coupling;
pub mod dump;

pub use coupling::{CouplingMap, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    T(usize),
    Tdg(usize),
    Cz(usize, usize),
    /// Control first, target second.
    Cx(usize, usize),
    Swap(usize, usize),
    /// Two-qubit reflection about the uniform state of the pair.
    D2(usize, usize),
    Mcz {
        controls: Vec<usize>,
        target: usize,
    },
    /// Prefix phase oracle with the given suffix length, acting on the
    /// logical register and bound to the circuit's target.
    OraclePrefix(usize),
    Barrier,
}

impl Gate {
    /// Explicit qubit operands. `OraclePrefix` and `Barrier` act on the
    /// register as a whole and report none.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::T(q) | Gate::Tdg(q) => vec![*q],
            Gate::Cz(a, b) | Gate::Cx(a, b) | Gate::Swap(a, b) | Gate::D2(a, b) => vec![*a, *b],
            Gate::Mcz { controls, target } => {
                let mut v = controls.clone();
                v.push(*target);
                v
            }
            Gate::OraclePrefix(_) | Gate::Barrier => Vec::new(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::T(_) => "T",
            Gate::Tdg(_) => "TDG",
            Gate::Cz(..) => "CZ",
            Gate::Cx(..) => "CX",
            Gate::Swap(..) => "SWAP",
            Gate::D2(..) => "D2",
            Gate::Mcz { .. } => "MCZ",
            Gate::OraclePrefix(_) => "ORACLE",
            Gate::Barrier => "BARRIER",
        }
    }

    /// Two-qubit gates this gate costs once lowered, or `None` for gates that
    /// must be decomposed first.
    pub fn two_qubit_cost(&self) -> Option<u64> {
        match self {
            Gate::Cz(..) | Gate::Cx(..) | Gate::D2(..) => Some(1),
            Gate::Swap(..) => Some(3),
            Gate::Mcz { .. } | Gate::OraclePrefix(_) => None,
            _ => Some(0),
        }
    }

    /// Same gate with every explicit operand passed through `f`.
    pub fn remap(&self, mut f: impl FnMut(usize) -> usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(f(*q)),
            Gate::X(q) => Gate::X(f(*q)),
            Gate::Z(q) => Gate::Z(f(*q)),
            Gate::T(q) => Gate::T(f(*q)),
            Gate::Tdg(q) => Gate::Tdg(f(*q)),
            Gate::Cz(a, b) => Gate::Cz(f(*a), f(*b)),
            Gate::Cx(a, b) => Gate::Cx(f(*a), f(*b)),
            Gate::Swap(a, b) => Gate::Swap(f(*a), f(*b)),
            Gate::D2(a, b) => Gate::D2(f(*a), f(*b)),
            Gate::Mcz { controls, target } => Gate::Mcz {
                controls: controls.iter().map(|&c| f(c)).collect(),
                target: f(*target),
            },
            Gate::OraclePrefix(m) => Gate::OraclePrefix(*m),
            Gate::Barrier => Gate::Barrier,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match self {
            Gate::OraclePrefix(m) => write!(f, " {m}"),
            _ => {
                for q in self.qubits() {
                    write!(f, " {q}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("gate `{gate}` references qubit {qubit} outside width {width}")]
    OperandOutOfRange {
        gate: String,
        qubit: usize,
        width: usize,
    },
    #[error("gate `{0}` repeats an operand")]
    DuplicateOperand(String),
    #[error("oracle suffix length {m} exceeds logical width {width}")]
    OracleTooWide { m: usize, width: usize },
    #[error("circuit contains oracle gates but no target is bound")]
    UnboundOracle,
    #[error("target {target} does not fit a {width}-qubit register")]
    TargetOutOfRange { target: usize, width: usize },
    #[error("logical widths differ: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("target bindings disagree: {left} vs {right}")]
    BindingMismatch { left: usize, right: usize },
    #[error("ancillas not restored to |0> (leaked probability {0:e})")]
    DirtyAncilla(f64),
    #[error("gate `{0}` must be decomposed before counting")]
    Undecomposed(String),
    #[error("dump parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    num_logical: usize,
    num_ancilla: usize,
    gates: Vec<Gate>,
    target: Option<usize>,
}

impl Circuit {
    pub fn new(num_logical: usize) -> Self {
        Self {
            num_logical,
            ..Self::default()
        }
    }

    pub fn with_ancillas(num_logical: usize, num_ancilla: usize) -> Self {
        Self {
            num_logical,
            num_ancilla,
            ..Self::default()
        }
    }

    /// Binds the target used by every `OraclePrefix` gate.
    pub fn bind_target(mut self, target: usize) -> Result<Self, CircuitError> {
        self.set_target(Some(target))?;
        Ok(self)
    }

    pub fn set_target(&mut self, target: Option<usize>) -> Result<(), CircuitError> {
        if let Some(t) = target {
            if self.num_logical >= usize::BITS as usize || t >> self.num_logical != 0 {
                return Err(CircuitError::TargetOutOfRange {
                    target: t,
                    width: self.num_logical,
                });
            }
        }
        self.target = target;
        Ok(())
    }

    pub fn num_logical(&self) -> usize {
        self.num_logical
    }

    pub fn num_ancilla(&self) -> usize {
        self.num_ancilla
    }

    pub fn width(&self) -> usize {
        self.num_logical + self.num_ancilla
    }

    pub fn target(&self) -> Option<usize> {
        self.target
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    fn validate(&self, gate: &Gate) -> Result<(), CircuitError> {
        let width = self.width();
        let qubits = gate.qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= width {
                return Err(CircuitError::OperandOutOfRange {
                    gate: gate.to_string(),
                    qubit: q,
                    width,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(CircuitError::DuplicateOperand(gate.to_string()));
            }
        }
        if let Gate::OraclePrefix(m) = gate {
            if *m > self.num_logical {
                return Err(CircuitError::OracleTooWide {
                    m: *m,
                    width: self.num_logical,
                });
            }
        }
        Ok(())
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self, CircuitError> {
        self.validate(&gate)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn append(mut self, gate: Gate) -> Result<Self, CircuitError> {
        self.push(gate)?;
        Ok(self)
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<(), CircuitError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// `a` followed by `b`. Logical widths must match; the ancilla pool is the
    /// larger of the two; target bindings must agree when both are present.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if self.num_logical != other.num_logical {
            return Err(CircuitError::WidthMismatch {
                left: self.num_logical,
                right: other.num_logical,
            });
        }
        let target = match (self.target, other.target) {
            (Some(a), Some(b)) if a != b => {
                return Err(CircuitError::BindingMismatch { left: a, right: b })
            }
            (a, b) => a.or(b),
        };
        let mut gates = Vec::with_capacity(self.len() + other.len());
        gates.extend_from_slice(&self.gates);
        gates.extend_from_slice(&other.gates);
        Ok(Circuit {
            num_logical: self.num_logical,
            num_ancilla: self.num_ancilla.max(other.num_ancilla),
            gates,
            target,
        })
    }

    pub fn oracle_count(&self) -> u64 {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::OraclePrefix(_)))
            .count() as u64
    }

    pub fn d2_count(&self) -> u64 {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::D2(..)))
            .count() as u64
    }

    /// CZ, CX and D2 count 1, SWAP counts 3, everything else 0. Fails on
    /// multi-controlled or abstract oracle gates.
    pub fn two_qubit_count(&self) -> Result<u64, CircuitError> {
        self.gates.iter().try_fold(0u64, |acc, g| {
            g.two_qubit_cost()
                .map(|c| acc + c)
                .ok_or_else(|| CircuitError::Undecomposed(g.to_string()))
        })
    }

    /// Runs the gates on a state spanning the full width (logical qubits then
    /// ancillas), without any ancilla bookkeeping.
    pub fn apply_to(&self, state: &mut StateVector) -> Result<(), CircuitError> {
        if state.num_qubits() != self.width() {
            return Err(CircuitError::WidthMismatch {
                left: self.width(),
                right: state.num_qubits(),
            });
        }
        let needs_target = self
            .gates
            .iter()
            .any(|g| matches!(g, Gate::OraclePrefix(_)));
        let target = match (needs_target, self.target) {
            (true, None) => return Err(CircuitError::UnboundOracle),
            (_, t) => t.unwrap_or(0),
        };
        for g in &self.gates {
            apply_gate(state, g, target, self.num_ancilla)?;
        }
        Ok(())
    }

    /// Simulates the circuit on a logical input state. Ancillas are appended
    /// in `|0>` and stripped afterwards; the run fails if they are not
    /// returned to `|0>` within the end-to-end tolerance.
    pub fn simulate(&self, input: &StateVector) -> Result<StateVector, CircuitError> {
        if input.num_qubits() != self.num_logical {
            return Err(CircuitError::WidthMismatch {
                left: self.num_logical,
                right: input.num_qubits(),
            });
        }
        if self.num_ancilla == 0 {
            let mut state = input.clone();
            self.apply_to(&mut state)?;
            return Ok(state);
        }
        let mut state = input.tensor(&StateVector::basis(self.num_ancilla, 0)?)?;
        self.apply_to(&mut state)?;
        let logical: Vec<usize> = (0..self.num_logical).collect();
        let (out, leaked) = state.extract(&logical)?;
        if leaked > NORM_TOLERANCE {
            return Err(CircuitError::DirtyAncilla(leaked));
        }
        Ok(out)
    }
}

/// Applies one gate to a full-width state. `target` binds oracle gates, which
/// act on the leading (logical) qubits; `num_ancilla` trailing qubits are
/// ignored by the oracle.
pub(crate) fn apply_gate(
    state: &mut StateVector,
    gate: &Gate,
    target: usize,
    num_ancilla: usize,
) -> Result<(), StateError> {
    match gate {
        Gate::H(q) => state.apply_one_qubit_unchecked(*q, &matrices::hadamard()),
        Gate::X(q) => state.apply_one_qubit_unchecked(*q, &matrices::pauli_x()),
        Gate::Z(q) => state.apply_one_qubit_unchecked(*q, &matrices::pauli_z()),
        Gate::T(q) => state.apply_one_qubit_unchecked(*q, &matrices::t_gate()),
        Gate::Tdg(q) => state.apply_one_qubit_unchecked(*q, &matrices::t_dagger()),
        Gate::Cz(a, b) => state.apply_mcz(&[*a], *b)?,
        Gate::Cx(a, b) => state.apply_two_qubit_unchecked(*a, *b, &matrices::cx()),
        Gate::Swap(a, b) => state.apply_swap(*a, *b)?,
        Gate::D2(a, b) => state.apply_diffuser2(*a, *b)?,
        Gate::Mcz {
            controls,
            target: t,
        } => state.apply_mcz(controls, *t)?,
        Gate::OraclePrefix(m) => {
            state.apply_prefix_phase_flip(target << num_ancilla, m + num_ancilla)?
        }
        Gate::Barrier => {}
    }
    Ok(())
}
