//! JSON report written by `sim run`.

use std::collections::BTreeMap;

use serde::Serialize;
use virtual_spin::gates::TruthTable;
use virtual_spin::linalg::{Matrix4c, Vector4c};
use virtual_spin::{GateSpec, Populations, PulseSchedule, QubitLabel, System};

pub const SCHEMA: u32 = 1;

/// Propagators compose in the rotating frame of H₀, with each gate's tone
/// phases referenced to the start of that gate.
pub const FRAME: &str = "rotating frame of H0; tone phases referenced to each gate's start";

#[derive(Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub engine: &'static str,
    pub frame: &'static str,
    pub system: SystemSummary,
    pub rabi_budget_rad_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_per_period: Option<usize>,
    pub initial_state: Vec<[f64; 2]>,
    pub gates: Vec<GateReport>,
    pub final_state: Vec<[f64; 2]>,
    pub final_populations: BTreeMap<String, f64>,
}

#[derive(Serialize)]
pub struct SystemSummary {
    pub omega0_rad_s: f64,
    pub delta_rad_s: f64,
    pub j_rad_s: f64,
    pub theta_rad_s: f64,
    pub phi_rad: f64,
    pub min_gap_rad_s: f64,
}

impl SystemSummary {
    pub fn of(sys: &System) -> Self {
        Self {
            omega0_rad_s: sys.params.omega0(),
            delta_rad_s: sys.params.delta(),
            j_rad_s: sys.params.j(),
            theta_rad_s: sys.eig.theta,
            phi_rad: sys.eig.phi,
            min_gap_rad_s: sys.lines.min_gap,
        }
    }
}

#[derive(Serialize)]
pub struct GateReport {
    pub index: usize,
    pub source: String,
    pub line: usize,
    pub gate: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_rad: Option<f64>,
    pub duration_s: f64,
    pub schedule: PulseSchedule,
    pub ideal: Vec<Vec<[f64; 2]>>,
    pub fidelity: f64,
    pub truth_table: BTreeMap<String, BTreeMap<String, f64>>,
}

impl GateReport {
    pub fn rotation(gate: &GateSpec) -> (Option<f64>, Option<f64>) {
        match *gate {
            GateSpec::RotQ { angle, phase } | GateSpec::RotR { angle, phase } => {
                (Some(angle), Some(phase))
            }
            GateSpec::CnotControlQ | GateSpec::CnotControlR => (None, None),
        }
    }
}

pub fn amplitudes(v: &Vector4c) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn matrix(m: &Matrix4c) -> Vec<Vec<[f64; 2]>> {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// `{"00": {"00": p, ...}, ...}`: input label to output distribution.
pub fn truth_table(t: &TruthTable) -> BTreeMap<String, BTreeMap<String, f64>> {
    QubitLabel::ALL
        .iter()
        .map(|input| {
            let row = QubitLabel::ALL
                .iter()
                .map(|output| (output.to_string(), t.0[input.position()][output.position()]))
                .collect();
            (input.to_string(), row)
        })
        .collect()
}

pub fn populations(p: &Populations) -> BTreeMap<String, f64> {
    p.iter().map(|(label, v)| (label.to_string(), v)).collect()
}
