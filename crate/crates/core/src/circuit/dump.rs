//! Line-oriented text dump of a circuit.
//!
//! ```text
//! QUBITS 4
//! ANCILLAS 0
//! TARGET 13
//! ORACLE 0
//! D2 2 3
//! MCZ 0 1 2      (controls..., target last)
//! BARRIER
//! ```
//!
//! `TARGET` is omitted for unbound circuits. Blank lines and lines starting
//! with `#` are ignored when parsing.

use super::{Circuit, CircuitError, Gate};
use std::fmt::Write;

pub fn to_dump(circuit: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "QUBITS {}", circuit.num_logical());
    let _ = writeln!(out, "ANCILLAS {}", circuit.num_ancilla());
    if let Some(t) = circuit.target() {
        let _ = writeln!(out, "TARGET {t}");
    }
    for g in circuit.gates() {
        let _ = writeln!(out, "{g}");
    }
    out
}

pub fn parse_dump(text: &str) -> Result<Circuit, CircuitError> {
    let mut logical = None;
    let mut ancillas = 0;
    let mut target = None;
    let mut circuit: Option<Circuit> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| CircuitError::Parse { line, message };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let op = parts.next().unwrap_or_default();
        let args: Vec<usize> = parts
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|e| err(format!("bad operand `{p}`: {e}")))
            })
            .collect::<Result<_, _>>()?;
        let arity = |k: usize| -> Result<(), CircuitError> {
            if args.len() == k {
                Ok(())
            } else {
                Err(err(format!(
                    "{op} expects {k} operand(s), got {}",
                    args.len()
                )))
            }
        };

        match op {
            "QUBITS" | "ANCILLAS" | "TARGET" => {
                if circuit.is_some() {
                    return Err(err(format!("{op} after the first gate")));
                }
                arity(1)?;
                match op {
                    "QUBITS" => logical = Some(args[0]),
                    "ANCILLAS" => ancillas = args[0],
                    _ => target = Some(args[0]),
                }
                continue;
            }
            _ => {}
        }

        if circuit.is_none() {
            let n = logical.ok_or_else(|| err("gate before QUBITS header".into()))?;
            let mut fresh = Circuit::with_ancillas(n, ancillas);
            fresh.set_target(target).map_err(|e| err(e.to_string()))?;
            circuit = Some(fresh);
        }
        let c = circuit.as_mut().expect("initialized above");
        let gate = match op {
            "H" | "X" | "Z" | "T" | "TDG" => {
                arity(1)?;
                let q = args[0];
                match op {
                    "H" => Gate::H(q),
                    "X" => Gate::X(q),
                    "Z" => Gate::Z(q),
                    "T" => Gate::T(q),
                    _ => Gate::Tdg(q),
                }
            }
            "CZ" | "CX" | "SWAP" | "D2" => {
                arity(2)?;
                let (a, b) = (args[0], args[1]);
                match op {
                    "CZ" => Gate::Cz(a, b),
                    "CX" => Gate::Cx(a, b),
                    "SWAP" => Gate::Swap(a, b),
                    _ => Gate::D2(a, b),
                }
            }
            "MCZ" => {
                if args.is_empty() {
                    return Err(err("MCZ needs a target".into()));
                }
                let (target, controls) = args.split_last().expect("non-empty");
                Gate::Mcz {
                    controls: controls.to_vec(),
                    target: *target,
                }
            }
            "ORACLE" => {
                arity(1)?;
                Gate::OraclePrefix(args[0])
            }
            "BARRIER" => {
                arity(0)?;
                Gate::Barrier
            }
            other => return Err(err(format!("unknown gate `{other}`"))),
        };
        c.push(gate).map_err(|e| err(e.to_string()))?;
    }

    match circuit {
        Some(c) => Ok(c),
        None => {
            let n = logical.ok_or(CircuitError::Parse {
                line: 0,
                message: "missing QUBITS header".into(),
            })?;
            let mut c = Circuit::with_ancillas(n, ancillas);
            c.set_target(target)?;
            Ok(c)
        }
    }
}
