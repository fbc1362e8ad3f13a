//! Universal gate set on the virtual qubits and its lowering to RF pulses.
//!
//! Each gate is a single tone group:
//!
//! | gate              | basis-state action   | lines driven        |
//! |-------------------|----------------------|---------------------|
//! | `RotQ(θ, ϕ)`      | flips Q              | ψ₁↔ψ₃ and ψ₂↔ψ₄     |
//! | `RotR(θ, ϕ)`      | flips R              | ψ₁↔ψ₂ and ψ₃↔ψ₄     |
//! | CNOT, control Q   | `|10⟩ ↔ |11⟩`        | π pulse on ψ₃↔ψ₄    |
//! | CNOT, control R   | `|01⟩ ↔ |11⟩`        | π pulse on ψ₂↔ψ₄    |
//!
//! Gates are named by what they do to the `|QR⟩` labels under the encoding
//! `|00⟩..|11⟩ = ψ₁..ψ₄`, never by the line they happen to use.
//!
//! A π pulse realizes its CNOT only up to diagonal phases, so fidelities are
//! reported modulo a diagonal phase gauge.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c64, Matrix2c, Matrix4c, ONE, ZERO};
use crate::pulse::{
    rwa_propagator, selectivity_check, tone_phase_for_axis, Propagator, Pulse, PulseSchedule,
    ToneGroup,
};
use crate::spectrum::{LineList, TransitionId};
use crate::spin_system::EigenSystem;

const ANGLE_LIMIT: f64 = 4.0 * PI;
/// Transition moments below this are treated as dark lines.
const DARK_MOMENT: f64 = 1e-9;
const UNITARITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateSpec {
    /// Rotation of virtual spin Q by `angle` about the axis at `phase` in
    /// the xy plane.
    RotQ { angle: f64, phase: f64 },
    RotR { angle: f64, phase: f64 },
    /// NOT on R when Q = 1.
    CnotControlQ,
    /// NOT on Q when R = 1.
    CnotControlR,
}

impl GateSpec {
    pub fn rot_q(angle: f64, phase: f64) -> Result<Self> {
        check_rotation(angle, phase)?;
        Ok(Self::RotQ { angle, phase })
    }

    pub fn rot_r(angle: f64, phase: f64) -> Result<Self> {
        check_rotation(angle, phase)?;
        Ok(Self::RotR { angle, phase })
    }

    /// Lines addressed by the gate's tone group.
    pub fn transitions(&self) -> &'static [TransitionId] {
        match self {
            Self::RotQ { .. } => &[TransitionId::L13, TransitionId::L24],
            Self::RotR { .. } => &[TransitionId::L12, TransitionId::L34],
            Self::CnotControlQ => &[TransitionId::L34],
            Self::CnotControlR => &[TransitionId::L24],
        }
    }

    /// Rotation angle and axis phase applied on every addressed line.
    pub fn rotation(&self) -> (f64, f64) {
        match *self {
            Self::RotQ { angle, phase } | Self::RotR { angle, phase } => (angle, phase),
            Self::CnotControlQ | Self::CnotControlR => (PI, 0.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RotQ { .. } => "rotq",
            Self::RotR { .. } => "rotr",
            Self::CnotControlQ => "cnot_q",
            Self::CnotControlR => "cnot_r",
        }
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RotQ { angle, phase } | Self::RotR { angle, phase } => {
                write!(f, "{} {angle} {phase}", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

fn check_rotation(angle: f64, phase: f64) -> Result<()> {
    if !angle.is_finite() || angle.abs() >= ANGLE_LIMIT {
        return Err(Error::InvalidParameter(format!(
            "rotation angle must lie in (-4π, 4π), got {angle}"
        )));
    }
    if !(0.0..TAU).contains(&phase) {
        return Err(Error::InvalidParameter(format!(
            "axis phase must lie in [0, 2π), got {phase}"
        )));
    }
    Ok(())
}

/// `exp(−i(θ/2)(cos ϕ σx + sin ϕ σy))`
pub fn rotation_2x2(angle: f64, phase: f64) -> Matrix2c {
    let (s, c) = (0.5 * angle).sin_cos();
    Matrix2::new(
        c64(c, 0.0),
        c64(0.0, -s) * c64(0.0, -phase).exp(),
        c64(0.0, -s) * c64(0.0, phase).exp(),
        c64(c, 0.0),
    )
}

/// Textbook unitary in the `|QR⟩` ordering `00, 01, 10, 11`.
pub fn ideal_unitary(gate: &GateSpec) -> Matrix4c {
    let id = Matrix2c::identity();
    match *gate {
        GateSpec::RotQ { angle, phase } => rotation_2x2(angle, phase)
            .kronecker(&id)
            .fixed_view::<4, 4>(0, 0)
            .into_owned(),
        GateSpec::RotR { angle, phase } => id
            .kronecker(&rotation_2x2(angle, phase))
            .fixed_view::<4, 4>(0, 0)
            .into_owned(),
        GateSpec::CnotControlQ => permutation(&[0, 1, 3, 2]),
        GateSpec::CnotControlR => permutation(&[0, 3, 2, 1]),
    }
}

fn permutation(image: &[usize; 4]) -> Matrix4c {
    let mut m = Matrix4c::from_element(ZERO);
    for (from, &to) in image.iter().enumerate() {
        m[(to, from)] = ONE;
    }
    m
}

/// `table[i][j]`: probability of reading label `j` after preparing label
/// `i` (positions in `00, 01, 10, 11` order).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TruthTable(pub [[f64; 4]; 4]);

impl TruthTable {
    pub fn of(u: &Matrix4c) -> Self {
        let mut t = [[0.0; 4]; 4];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, p) in row.iter_mut().enumerate() {
                *p = u[(j, i)].norm_sqr();
            }
        }
        Self(t)
    }

    /// Largest entry-wise difference.
    pub fn max_deviation(&self, other: &TruthTable) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `max_D |tr(D V† U)| / 4` over diagonal unitaries `D`, so an achieved
/// `V = U·D†` (phases picked up by the input basis states) scores 1.
///
/// The maximum is attained by choosing each phase of `D` to cancel the
/// phase of the matching diagonal entry, so it equals `Σ_k |(V†U)_kk| / 4`.
pub fn phase_gauged_fidelity(achieved: &Matrix4c, ideal: &Matrix4c) -> f64 {
    let m = achieved.adjoint() * ideal;
    let sum: f64 = (0..4).map(|k| m[(k, k)].norm()).sum();
    (sum / 4.0).min(1.0)
}

#[derive(Debug, Clone)]
pub struct CompiledGate {
    pub gate: GateSpec,
    pub schedule: PulseSchedule,
    pub ideal: Matrix4c,
    pub achieved: Propagator,
    pub fidelity: f64,
    pub truth_table: TruthTable,
}

impl CompiledGate {
    /// Same gate scored against a different achieved propagator, e.g. one
    /// from lab-frame integration.
    pub fn with_achieved(&self, achieved: Propagator) -> Result<Self> {
        let (fidelity, truth_table) = score_unitary(&achieved, &self.ideal)?;
        Ok(Self {
            achieved,
            fidelity,
            truth_table,
            ..self.clone()
        })
    }
}

pub fn score_unitary(achieved: &Propagator, ideal: &Matrix4c) -> Result<(f64, TruthTable)> {
    let drift = achieved.unitarity_error();
    if !(drift <= UNITARITY_TOLERANCE) {
        return Err(Error::ContractViolation(format!(
            "achieved propagator is not unitary (|U†U - 1| = {drift:e})"
        )));
    }
    Ok((
        phase_gauged_fidelity(achieved.matrix(), ideal),
        TruthTable::of(achieved.matrix()),
    ))
}

pub fn score(compiled: &CompiledGate) -> Result<(f64, TruthTable)> {
    score_unitary(&compiled.achieved, &compiled.ideal)
}

/// Tone group for `gate` with every addressed line rotated by the same
/// angle in the same time.
///
/// The weakest addressed line is driven at `rabi_budget`; stronger lines get
/// proportionally smaller amplitudes so all reach Rabi rate
/// `rabi_budget · min μ`.
pub fn gate_tones(gate: &GateSpec, lines: &LineList, rabi_budget: f64) -> Result<ToneGroup> {
    if !(rabi_budget > 0.0) || !rabi_budget.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rabi budget must be positive and finite, got {rabi_budget}"
        )));
    }
    let ids = gate.transitions();
    let weakest = ids
        .iter()
        .map(|&id| lines.get(id))
        .min_by(|a, b| a.moment.total_cmp(&b.moment))
        .expect("every gate drives at least one line");
    if weakest.moment < DARK_MOMENT {
        return Err(Error::InvalidParameter(format!(
            "line {} is dark (moment {:e}) and cannot be driven",
            weakest.id, weakest.moment
        )));
    }
    let rabi = rabi_budget * weakest.moment;
    let (angle, axis) = gate.rotation();
    let axis = if angle < 0.0 { axis + PI } else { axis };
    let duration = angle.abs() / rabi;

    let tones = ids
        .iter()
        .map(|&id| {
            let line = lines.get(id);
            let phase = tone_phase_for_axis(axis, line.frequency, line.element.arg());
            Pulse::new(line.carrier(), phase, rabi / line.moment, duration, id)
        })
        .collect::<Result<Vec<_>>>()?;
    ToneGroup::new(tones)
}

/// Lowers `gate` to a single tone group, checks its selectivity and scores
/// the RWA propagator against the ideal unitary.
pub fn compile_gate(
    gate: &GateSpec,
    eig: &EigenSystem,
    lines: &LineList,
    rabi_budget: f64,
) -> Result<CompiledGate> {
    if let GateSpec::RotQ { angle, phase } | GateSpec::RotR { angle, phase } = *gate {
        check_rotation(angle, phase)?;
    }
    let group = gate_tones(gate, lines, rabi_budget)?;
    let warnings = selectivity_check(&group, lines);
    if !warnings.is_empty() {
        return Err(Error::Selectivity(warnings));
    }
    let achieved = rwa_propagator(&group, eig, lines)?;
    let ideal = ideal_unitary(gate);
    let (fidelity, truth_table) = score_unitary(&achieved, &ideal)?;
    Ok(CompiledGate {
        gate: *gate,
        schedule: PulseSchedule::new(vec![group]),
        ideal,
        achieved,
        fidelity,
        truth_table,
    })
}

/// Default drive budget: one hundredth of the closest line separation.
pub fn default_rabi_budget(lines: &LineList) -> f64 {
    lines.min_gap / 100.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_norm;
    use crate::spectrum::line_list;
    use crate::spin_system::{analytic_eigensystem, SpinSystemParams};
    use crate::virtual_basis::QubitLabel;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn reference() -> (EigenSystem, LineList) {
        let params = SpinSystemParams::from_frequencies(1000.0, 100.0, 100.0).unwrap();
        let eig = analytic_eigensystem(&params);
        let lines = line_list(&eig, &params);
        (eig, lines)
    }

    fn label(s: &str) -> usize {
        s.parse::<QubitLabel>().unwrap().position()
    }

    /// Brute-force phase search used as an oracle for the closed form.
    fn gauge_search(achieved: &Matrix4c, ideal: &Matrix4c) -> f64 {
        let m = achieved.adjoint() * ideal;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut best: f64 = 0.0;
        for _ in 0..5 {
            let mut phases: [f64; 3] = [0.0; 3].map(|_| rng.gen_range(0.0..TAU));
            let eval = |ph: &[f64; 3]| {
                let d = [0.0, ph[0], ph[1], ph[2]];
                (0..4).map(|k| c64(0.0, d[k]).exp() * m[(k, k)]).sum::<num_complex::Complex64>().norm() / 4.0
            };
            let mut step = 1.0;
            let mut current = eval(&phases);
            while step > 1e-12 {
                let mut improved = false;
                for k in 0..3 {
                    for dir in [-1.0, 1.0] {
                        let mut trial = phases;
                        trial[k] += dir * step;
                        let value = eval(&trial);
                        if value > current {
                            current = value;
                            phases = trial;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            best = best.max(current);
        }
        best
    }

    #[test]
    fn gate_validation() {
        assert!(GateSpec::rot_q(4.0 * PI, 0.0).is_err());
        assert!(GateSpec::rot_q(1.0, TAU).is_err());
        assert!(GateSpec::rot_r(1.0, -0.1).is_err());
        assert!(GateSpec::rot_r(-3.9 * PI, 0.0).is_ok());
    }

    #[test]
    fn ideal_cnots_are_permutations() {
        let u = ideal_unitary(&GateSpec::CnotControlQ);
        assert_eq!(u[(label("11"), label("10"))], ONE);
        assert_eq!(u[(label("10"), label("11"))], ONE);
        assert_eq!(u[(label("00"), label("00"))], ONE);
        let v = ideal_unitary(&GateSpec::CnotControlR);
        assert_eq!(v[(label("11"), label("01"))], ONE);
        assert_eq!(v[(label("10"), label("10"))], ONE);
    }

    #[test]
    fn full_turn_is_minus_identity() {
        let u = ideal_unitary(&GateSpec::rot_q(TAU, 0.0).unwrap());
        assert!(frobenius_norm(&(u + Matrix4c::identity())) < 1e-15);
    }

    #[test]
    fn rot_q_acts_the_same_for_both_r_values() {
        let u = ideal_unitary(&GateSpec::rot_q(PI, 0.0).unwrap());
        let (r0, r1) = (label("00"), label("01"));
        let (q0, q1) = (label("10"), label("11"));
        assert_eq!(u[(q0, r0)], u[(q1, r1)]);
        assert_eq!(u[(r0, q0)], u[(r1, q1)]);
        assert!((u[(q0, r0)] - c64(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn cnot_q_compiles_to_single_tone_on_34() {
        let (eig, lines) = reference();
        let compiled = compile_gate(&GateSpec::CnotControlQ, &eig, &lines, 0.1).unwrap();
        let tones = compiled.schedule.groups()[0].tones();
        assert_eq!(compiled.schedule.groups().len(), 1);
        assert_eq!(tones.len(), 1);
        assert!((tones[0].carrier - 879.289_321_9).abs() < 1e-6);
        assert_eq!(tones[0].target, TransitionId::L34);
        assert!((compiled.fidelity - 1.0).abs() < 1e-9);
        let want = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]];
        assert!(compiled.truth_table.max_deviation(&TruthTable(want)) < 1e-12);
    }

    #[test]
    fn rot_q_amplitudes_are_matched() {
        let (eig, lines) = reference();
        let compiled = compile_gate(&GateSpec::rot_q(PI, 0.0).unwrap(), &eig, &lines, 0.1).unwrap();
        let tones = compiled.schedule.groups()[0].tones();
        assert_eq!(tones.len(), 2);
        let by_id = |id| tones.iter().find(|t| t.target == id).unwrap();
        let (t13, t24) = (by_id(TransitionId::L13), by_id(TransitionId::L24));
        assert!((t13.carrier - 1_120.710_678_1).abs() < 1e-6);
        assert!((t24.carrier - 1_020.710_678_1).abs() < 1e-6);
        // μ₁₃ = p − q, μ₂₄ = p + q
        let (p, q) = (eig.p, eig.q);
        assert!((t13.amplitude / t24.amplitude - (p + q) / (p - q)).abs() < 1e-12);
        assert!((t13.amplitude / t24.amplitude - 2.414_213_6).abs() < 1e-6);
        assert_eq!(t13.duration, t24.duration);
        assert!((compiled.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn null_rotation() {
        let (eig, lines) = reference();
        let compiled = compile_gate(&GateSpec::rot_q(0.0, 0.0).unwrap(), &eig, &lines, 0.1).unwrap();
        assert_eq!(compiled.schedule.duration(), 0.0);
        assert_eq!(compiled.ideal, Matrix4c::identity());
        assert_eq!(compiled.achieved, Propagator::identity());
    }

    #[test]
    fn negative_angles_and_phases() {
        let (eig, lines) = reference();
        for gate in [
            GateSpec::rot_q(-FRAC_PI_2, 1.0).unwrap(),
            GateSpec::rot_r(2.5, 5.0).unwrap(),
            GateSpec::rot_r(-3.0 * PI, FRAC_PI_3).unwrap(),
        ] {
            let compiled = compile_gate(&gate, &eig, &lines, 0.1).unwrap();
            let diff = frobenius_norm(&(compiled.achieved.matrix() - compiled.ideal));
            assert!(diff < 1e-12, "{gate}: {diff}");
        }
    }

    #[test]
    fn selectivity_violation_is_a_compile_error() {
        let (eig, lines) = reference();
        let err = compile_gate(&GateSpec::CnotControlR, &eig, &lines, lines.min_gap).unwrap_err();
        assert!(matches!(err, Error::Selectivity(ref w) if !w.is_empty()));
        assert!(compile_gate(&GateSpec::CnotControlR, &eig, &lines, 0.0).is_err());
    }

    #[test]
    fn dark_line_cannot_be_driven() {
        let params = SpinSystemParams::from_frequencies(1000.0, 0.0, 100.0).unwrap();
        let eig = analytic_eigensystem(&params);
        let lines = line_list(&eig, &params);
        assert!(matches!(
            compile_gate(&GateSpec::CnotControlQ, &eig, &lines, 0.1),
            Err(Error::InvalidParameter(_))
        ));
        // 1<->2 and 2<->4 coincide for equivalent spins, so the bright line is
        // not selectively addressable either
        assert!(matches!(
            compile_gate(&GateSpec::CnotControlR, &eig, &lines, 0.1),
            Err(Error::Selectivity(_))
        ));
    }

    #[test]
    fn pi_pulse_on_34_scores_as_cnot() {
        let (eig, lines) = reference();
        let tone = Pulse::resonant(&lines, TransitionId::L34, 0.0, 1.0, PI / lines.get(TransitionId::L34).moment).unwrap();
        let achieved = rwa_propagator(&ToneGroup::single(tone), &eig, &lines).unwrap();
        let ideal = ideal_unitary(&GateSpec::CnotControlQ);
        let (fidelity, table) = score_unitary(&achieved, &ideal).unwrap();
        assert!((fidelity - 1.0).abs() < 1e-9);
        assert!((gauge_search(achieved.matrix(), &ideal) - 1.0).abs() < 1e-9);
        assert!(table.max_deviation(&TruthTable::of(&ideal)) < 1e-12);
        // the bare, ungauged overlap is not 1
        assert!((achieved.matrix().adjoint() * ideal).trace().norm() / 4.0 < 0.99);
    }

    #[test]
    fn gauge_absorbs_diagonal_phases() {
        let ideal = ideal_unitary(&GateSpec::rot_r(1.2, 0.3).unwrap());
        let mut d = Matrix4c::identity();
        d[(2, 2)] = c64(0.0, FRAC_PI_3).exp();
        let achieved = Propagator::from_matrix(ideal * d);
        assert!((score_unitary(&achieved, &ideal).unwrap().0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_gauge_matches_search() {
        let (eig, lines) = reference();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let angle: f64 = rng.gen_range(-3.0..3.0);
            let tone = Pulse::resonant(&lines, TransitionId::L12, rng.gen_range(0.0..TAU), 1.0, angle.abs()).unwrap();
            let other = Pulse::resonant(&lines, TransitionId::L34, rng.gen_range(0.0..TAU), 0.5, 1.0).unwrap();
            let u = rwa_propagator(&ToneGroup::new(vec![tone, other]).unwrap(), &eig, &lines).unwrap();
            let ideal = ideal_unitary(&GateSpec::rot_q(rng.gen_range(0.0..3.0), rng.gen_range(0.0..TAU)).unwrap());
            let closed = phase_gauged_fidelity(u.matrix(), &ideal);
            let searched = gauge_search(u.matrix(), &ideal);
            assert!((closed - searched).abs() < 1e-9, "{closed} vs {searched}");
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let bad = Propagator::from_matrix(Matrix4c::identity() * c64(1.1, 0.0));
        assert!(matches!(
            score_unitary(&bad, &Matrix4c::identity()),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn compilation_is_deterministic() {
        let (eig, lines) = reference();
        let gate = GateSpec::rot_r(1.234, 0.5).unwrap();
        let a = compile_gate(&gate, &eig, &lines, 0.3).unwrap();
        let b = compile_gate(&gate, &eig, &lines, 0.3).unwrap();
        assert_eq!(a.schedule.to_json(), b.schedule.to_json());
    }
}
