//! Line-oriented circuit files.
//!
//! ```text
//! # Bell pair
//! init 00
//! rotq pi/2 0
//! cnot_q
//! ```
//!
//! Statements are separated by newlines or `;`. `init` takes a label
//! (`00`..`11`) or four amplitudes in label order, each a real number or a
//! complex literal such as `0.5-0.5i`. Angles and phases accept `pi`
//! expressions (`pi`, `-pi/2`, `3pi/4`, `2*pi`) or plain radians.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use virtual_spin::linalg::Vector4c;
use virtual_spin::{Basis, GateSpec, QubitLabel, StateVector};

/// Amplitudes must be normalized to this before they are rescaled exactly.
const NORM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "circuit line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone)]
pub struct GateLine {
    pub gate: GateSpec,
    /// Source statement, trimmed.
    pub source: String,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub struct CircuitProgram {
    /// Computational-basis state.
    pub initial: StateVector,
    pub gates: Vec<GateLine>,
}

pub fn parse_circuit(text: &str) -> Result<CircuitProgram, ParseError> {
    let mut initial = None;
    let mut gates = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| ParseError { line, message };
        let content = raw.split('#').next().unwrap_or("");
        for statement in content.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let mut words = statement.split_whitespace();
            let keyword = words.next().expect("statement is non-empty");
            let args: Vec<&str> = words.collect();
            match keyword.to_ascii_lowercase().as_str() {
                "init" => {
                    if initial.is_some() {
                        return Err(err("`init` given twice".into()));
                    }
                    if !gates.is_empty() {
                        return Err(err("`init` must come before the first gate".into()));
                    }
                    initial = Some(parse_init(&args).map_err(err)?);
                }
                kind @ ("rotq" | "rotr") => {
                    let [angle, phase] = args[..] else {
                        return Err(err(format!("`{kind}` takes <angle> <phase>")));
                    };
                    let angle = parse_angle(angle).map_err(err)?;
                    let phase = reduce_phase(parse_angle(phase).map_err(err)?);
                    let gate = if kind == "rotq" {
                        GateSpec::rot_q(angle, phase)
                    } else {
                        GateSpec::rot_r(angle, phase)
                    };
                    let gate = gate.map_err(|e| err(e.to_string()))?;
                    gates.push(GateLine {
                        gate,
                        source: statement.to_string(),
                        line,
                    });
                }
                kind @ ("cnot_q" | "cnot_r") => {
                    if !args.is_empty() {
                        return Err(err(format!("`{kind}` takes no arguments")));
                    }
                    let gate = if kind == "cnot_q" {
                        GateSpec::CnotControlQ
                    } else {
                        GateSpec::CnotControlR
                    };
                    gates.push(GateLine {
                        gate,
                        source: statement.to_string(),
                        line,
                    });
                }
                other => return Err(err(format!("unknown statement `{other}`"))),
            }
        }
    }

    Ok(CircuitProgram {
        initial: initial.unwrap_or_else(|| StateVector::basis_state(QubitLabel::new(false, false))),
        gates,
    })
}

fn parse_init(args: &[&str]) -> Result<StateVector, String> {
    match args {
        [label] if !label.contains(['[', ',']) && label.len() == 2 => label
            .parse::<QubitLabel>()
            .map(StateVector::basis_state)
            .map_err(|e| e.to_string()),
        _ => {
            let joined = args.join(" ");
            let inner = joined.trim().trim_start_matches('[').trim_end_matches(']');
            let parts: Vec<&str> = inner
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if parts.len() != 4 {
                return Err(format!(
                    "`init` takes a label like `01` or four amplitudes, got `{joined}`"
                ));
            }
            let amps = parts
                .iter()
                .map(|p| parse_complex(p))
                .collect::<Result<Vec<_>, _>>()?;
            let v = Vector4c::from_column_slice(&amps);
            let norm = v.norm();
            if (norm - 1.0).abs() > NORM_TOLERANCE {
                return Err(format!("amplitudes have norm {norm}, expected 1"));
            }
            StateVector::normalized(v, Basis::Eigen).map_err(|e| e.to_string())
        }
    }
}

/// `a`, `bi`, `a+bi`, `a-bi` (also with `j`).
fn parse_complex(text: &str) -> Result<Complex64, String> {
    let bad = || format!("cannot read amplitude `{text}`");
    let t = text.trim();
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not an exponent sign or the leading one
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// `[-]NUMBER`, `[-][k][*]pi[/d]` with `k` and `d` plain numbers.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let bad = || format!("cannot read angle `{text}`");
    let t = text.trim().to_ascii_lowercase();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t.strip_prefix('+').unwrap_or(&t)),
    };
    let (numer, denom) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let numer = match numer.find("pi") {
        Some(at) => {
            if !numer[at + 2..].is_empty() {
                return Err(bad());
            }
            let k = numer[..at].trim_end_matches('*');
            let k = if k.is_empty() { 1.0 } else { k.parse::<f64>().map_err(|_| bad())? };
            k * PI
        }
        None => numer.parse::<f64>().map_err(|_| bad())?,
    };
    let value = match denom {
        Some(d) => {
            let d: f64 = d.parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            numer / d
        }
        None => numer,
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(sign * value)
}

/// Phase folded into [0, 2π).
fn reduce_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}
