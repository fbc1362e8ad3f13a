//! Two virtual qubits on the four collective eigenstates of an
//! exchange-coupled spin pair.
//!
//! The crate builds the two-spin Hamiltonian, diagonalizes it in closed form
//! (cross-checked by a Jacobi eigensolver), derives the four allowed NMR
//! lines, and compiles single-qubit rotations and CNOTs on the virtual
//! qubits into one- or two-tone RF pulses. Pulses can be propagated either
//! in the rotating-wave approximation or by direct integration of the
//! lab-frame Schrödinger equation.
//!
//! Energies and frequencies are angular frequencies in rad·s⁻¹ (ħ = 1).

pub mod config;
pub mod error;
pub mod gates;
pub mod levels;
pub mod linalg;
pub mod numfmt;
pub mod pulse;
pub mod spectrum;
pub mod spin_system;
pub mod validate;
pub mod virtual_basis;

pub use error::{Error, Result};
pub use gates::{compile_gate, ideal_unitary, score, CompiledGate, GateSpec, TruthTable};
pub use pulse::{
    lab_frame_propagate, rwa_propagator, selectivity_check, LabFrameOptions, Propagator, Pulse,
    PulseSchedule, SelectivityWarning, ToneGroup,
};
pub use spectrum::{forbidden_check, line_list, resolvability, LineList, Transition, TransitionId};
pub use spin_system::{
    analytic_eigensystem, build_hamiltonian, numeric_diagonalize, EigenSystem, SpinSystemParams,
};
pub use virtual_basis::{populations, to_computational, Basis, Populations, QubitLabel, StateVector};

/// Everything derived from one parameter set.
#[derive(Debug, Clone)]
pub struct System {
    pub params: SpinSystemParams,
    pub eig: EigenSystem,
    pub lines: LineList,
}

impl System {
    pub fn new(params: SpinSystemParams) -> Self {
        let eig = analytic_eigensystem(&params);
        let lines = line_list(&eig, &params);
        Self { params, eig, lines }
    }
}
