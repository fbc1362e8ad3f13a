//! Rectangular resonant RF tones and the unitaries they produce.
//!
//! Two independent routes are provided:
//!
//! * [`rwa_propagator`]: each tone is reduced to a two-level rotation on the
//!   transition it addresses (rotating-wave approximation);
//! * [`lab_frame_propagate`]: the full time-dependent Hamiltonian
//!   `H₀ + 2ω₁ Σ cos(ω_c t + ϕ)(Ix + Sx)` is integrated in the product basis
//!   with midpoint exponentials, counter-rotating terms included.
//!
//! Both report the propagator in the eigenbasis (label order ψ₁..ψ₄) and in
//! the rotating frame of H₀, i.e. `diag(e^{iε_k T}) · U(T)`.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, expm_neg_i_symmetric, unitarity_error, Matrix4c, Vector4c};
use crate::spectrum::{LineList, TransitionId};
use crate::spin_system::{build_hamiltonian, EigenSystem, SpinOperators, SpinSystemParams};
use crate::virtual_basis::{Basis, StateVector};

/// A tone is flagged when its Rabi rate reaches this fraction of the
/// detuning to the nearest line that shares a level with its target.
pub const SELECTIVITY_RATIO: f64 = 1.0 / 20.0;

/// Relative tolerance (in units of θ) for a carrier to count as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-6;

pub const DEFAULT_STEPS_PER_PERIOD: usize = 200;
pub const MIN_STEPS_PER_PERIOD: usize = 20;
pub const DEFAULT_MAX_STEPS: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    /// rad·s⁻¹
    pub carrier: f64,
    /// rad
    pub phase: f64,
    /// Drive strength ω₁, rad·s⁻¹.
    pub amplitude: f64,
    /// s
    pub duration: f64,
    pub target: TransitionId,
}

impl Pulse {
    pub fn new(
        carrier: f64,
        phase: f64,
        amplitude: f64,
        duration: f64,
        target: TransitionId,
    ) -> Result<Self> {
        for (name, v) in [
            ("carrier", carrier),
            ("phase", phase),
            ("amplitude", amplitude),
            ("duration", duration),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("pulse {name} must be finite")));
            }
        }
        if amplitude < 0.0 || duration < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "pulse amplitude and duration must be >= 0 (got {amplitude}, {duration})"
            )));
        }
        Ok(Self {
            carrier,
            phase,
            amplitude,
            duration,
            target,
        })
    }

    /// A tone sitting exactly on `target`.
    pub fn resonant(
        lines: &LineList,
        target: TransitionId,
        phase: f64,
        amplitude: f64,
        duration: f64,
    ) -> Result<Self> {
        Self::new(lines.get(target).carrier(), phase, amplitude, duration, target)
    }
}

/// One or two tones applied together.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneGroup {
    tones: Vec<Pulse>,
}

impl ToneGroup {
    pub fn new(tones: Vec<Pulse>) -> Result<Self> {
        if tones.is_empty() || tones.len() > 2 {
            return Err(Error::InvalidParameter(format!(
                "a tone group holds 1 or 2 tones, got {}",
                tones.len()
            )));
        }
        if tones.len() == 2 && tones[0].carrier == tones[1].carrier {
            return Err(Error::InvalidParameter(
                "tones in one group need distinct carriers".into(),
            ));
        }
        Ok(Self { tones })
    }

    pub fn single(tone: Pulse) -> Self {
        Self { tones: vec![tone] }
    }

    pub fn tones(&self) -> &[Pulse] {
        &self.tones
    }

    pub fn duration(&self) -> f64 {
        self.tones.iter().map(|t| t.duration).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSchedule {
    groups: Vec<ToneGroup>,
}

impl PulseSchedule {
    pub fn new(groups: Vec<ToneGroup>) -> Self {
        Self { groups }
    }

    pub fn groups(&self) -> &[ToneGroup] {
        &self.groups
    }

    pub fn push(&mut self, group: ToneGroup) {
        self.groups.push(group);
    }

    pub fn extend(&mut self, other: PulseSchedule) {
        self.groups.extend(other.groups);
    }

    pub fn duration(&self) -> f64 {
        self.groups.iter().map(ToneGroup::duration).sum()
    }

    pub fn to_json(&self) -> String {
        crate::numfmt::to_json_string(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Ordered product of the group propagators (first group acts first).
    pub fn rwa_propagator(&self, eig: &EigenSystem, lines: &LineList) -> Result<Propagator> {
        self.groups.iter().try_fold(Propagator::identity(), |acc, g| {
            Ok(acc.then(&rwa_propagator(g, eig, lines)?))
        })
    }

    pub fn lab_frame_propagator(
        &self,
        eig: &EigenSystem,
        params: &SpinSystemParams,
        options: &LabFrameOptions,
    ) -> Result<Propagator> {
        self.groups.iter().try_fold(Propagator::identity(), |acc, g| {
            Ok(acc.then(&lab_frame_propagate(g, eig, params, options)?))
        })
    }
}

/// Unitary in the eigenbasis, rows and columns in label order ψ₁..ψ₄.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    matrix: Matrix4c,
}

impl Propagator {
    pub fn identity() -> Self {
        Self {
            matrix: Matrix4c::identity(),
        }
    }

    pub fn from_matrix(matrix: Matrix4c) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.matrix
    }

    /// `next · self`: apply `self` first, then `next`.
    pub fn then(&self, next: &Propagator) -> Propagator {
        Propagator {
            matrix: next.matrix * self.matrix,
        }
    }

    pub fn unitarity_error(&self) -> f64 {
        unitarity_error(&self.matrix)
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.basis() != Basis::Eigen {
            return Err(Error::ContractViolation(
                "propagators act on eigenbasis states".into(),
            ));
        }
        StateVector::normalized(self.matrix * state.amplitudes(), Basis::Eigen)
    }
}

fn resonance_check(tone: &Pulse, lines: &LineList, eig: &EigenSystem) -> Result<()> {
    let line = lines.get(tone.target);
    let tolerance = RESONANCE_TOLERANCE * eig.theta + 1e-12 * line.carrier();
    if (tone.carrier - line.carrier()).abs() > tolerance {
        return Err(Error::NoMatchingLine {
            carrier: tone.carrier,
            upper: line.upper(),
            lower: line.lower(),
            expected: line.carrier(),
        });
    }
    Ok(())
}

fn conflict_check(group: &ToneGroup) -> Result<()> {
    if let [a, b] = group.tones() {
        if let Some(level) = a.target.levels().into_iter().find(|l| b.target.levels().contains(l)) {
            return Err(Error::TargetConflict { level });
        }
    }
    Ok(())
}

/// Rotation axis in the `(ψ_upper, ψ_lower)` plane produced by a tone of the
/// given phase. Equal to the tone phase on a normally ordered line with a
/// positive matrix element.
pub fn effective_axis_phase(tone_phase: f64, frequency: f64, element_arg: f64) -> f64 {
    let sense = if frequency < 0.0 { -1.0 } else { 1.0 };
    sense * tone_phase - element_arg
}

/// Inverse of [`effective_axis_phase`]: tone phase giving rotation axis
/// `axis`, reduced to [0, 2π).
pub fn tone_phase_for_axis(axis: f64, frequency: f64, element_arg: f64) -> f64 {
    let sense = if frequency < 0.0 { -1.0 } else { 1.0 };
    (sense * (axis + element_arg)).rem_euclid(TAU)
}

/// Propagator of one tone group under the rotating-wave approximation.
///
/// On each addressed pair `(ψ_a, ψ_b)` the result is
/// `exp(−i(Θ/2)(cos χ σx + sin χ σy))` with `Θ = μ_ab ω₁ t` and `χ` the
/// effective axis phase; untouched levels get the identity.
pub fn rwa_propagator(group: &ToneGroup, eig: &EigenSystem, lines: &LineList) -> Result<Propagator> {
    conflict_check(group)?;
    let mut u = Matrix4c::identity();
    for tone in group.tones() {
        resonance_check(tone, lines, eig)?;
        let line = lines.get(tone.target);
        let angle = line.moment * tone.amplitude * tone.duration;
        let axis = effective_axis_phase(tone.phase, line.frequency, line.element.arg());
        let (a, b) = (line.upper() - 1, line.lower() - 1);
        let (sin, cos) = (0.5 * angle).sin_cos();
        u[(a, a)] = c64(cos, 0.0);
        u[(b, b)] = c64(cos, 0.0);
        u[(a, b)] = c64(0.0, -sin) * c64(0.0, -axis).exp();
        u[(b, a)] = c64(0.0, -sin) * c64(0.0, axis).exp();
    }
    Ok(Propagator { matrix: u })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabFrameOptions {
    pub steps_per_period: usize,
    pub max_steps: u64,
}

impl Default for LabFrameOptions {
    fn default() -> Self {
        Self {
            steps_per_period: DEFAULT_STEPS_PER_PERIOD,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

impl LabFrameOptions {
    pub fn with_steps_per_period(steps_per_period: usize) -> Self {
        Self {
            steps_per_period,
            ..Self::default()
        }
    }
}

/// Number of midpoint steps used for a group, or a resource-limit error.
pub fn lab_frame_step_count(
    group: &ToneGroup,
    eig: &EigenSystem,
    options: &LabFrameOptions,
) -> Result<u64> {
    if options.steps_per_period < MIN_STEPS_PER_PERIOD {
        return Err(Error::InvalidParameter(format!(
            "steps_per_period must be >= {MIN_STEPS_PER_PERIOD}, got {}",
            options.steps_per_period
        )));
    }
    let duration = group.duration();
    if duration == 0.0 {
        return Ok(0);
    }
    let max_carrier = group.tones().iter().map(|t| t.carrier.abs()).fold(0.0, f64::max);
    // the midpoint step is exact for H₀ alone; only the drive needs resolving
    let fastest = if max_carrier > 0.0 {
        max_carrier
    } else {
        let (lo, hi) = eig
            .energies
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| (lo.min(e), hi.max(e)));
        hi - lo
    };
    if fastest == 0.0 {
        return Ok(1);
    }
    let periods = duration * fastest / TAU;
    let steps = (periods * options.steps_per_period as f64).ceil().max(1.0);
    if !steps.is_finite() || steps > options.max_steps as f64 {
        return Err(Error::ResourceLimit {
            required: if steps.is_finite() { steps as u64 } else { u64::MAX },
            cap: options.max_steps,
        });
    }
    Ok(steps as u64)
}

/// Integrates the driven two-spin Schrödinger equation over one tone group.
///
/// Each step uses `exp(−i dt H(t_mid))` (second-order Magnus). The step is
/// chosen so that the fastest carrier gets `steps_per_period` samples per
/// cycle.
pub fn lab_frame_propagate(
    group: &ToneGroup,
    eig: &EigenSystem,
    params: &SpinSystemParams,
    options: &LabFrameOptions,
) -> Result<Propagator> {
    let steps = lab_frame_step_count(group, eig, options)?;
    let duration = group.duration();
    if steps == 0 {
        return Ok(Propagator::identity());
    }
    let dt = duration / steps as f64;
    // both operators are real in the product basis (Iy enters only as IySy)
    let real = |m: Matrix4c| {
        debug_assert!(m.iter().all(|z| z.im == 0.0));
        m.map(|z| z.re)
    };
    let h0_dt = real(build_hamiltonian(params)) * dt;
    let drive_dt = real(SpinOperators::new().transverse_x()) * dt;

    let mut u = Matrix4c::identity();
    for k in 0..steps {
        let t = (k as f64 + 0.5) * dt;
        let field: f64 = group
            .tones()
            .iter()
            .filter(|tone| t < tone.duration)
            .map(|tone| 2.0 * tone.amplitude * (tone.carrier * t + tone.phase).cos())
            .sum();
        u = expm_neg_i_symmetric(&(h0_dt + drive_dt * field)) * u;
    }

    let frame = Vector4c::from_iterator(eig.energies.iter().map(|&e| c64(0.0, e * duration).exp()));
    let in_eigenbasis = eig.states.adjoint() * u * eig.states;
    Ok(Propagator {
        matrix: Matrix4c::from_diagonal(&frame) * in_eigenbasis,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectivityWarning {
    pub target: TransitionId,
    /// Closest line sharing a level with the target.
    pub nearest: TransitionId,
    /// `μ ω₁` on the target, rad·s⁻¹.
    pub rabi: f64,
    pub detuning: f64,
    pub ratio: f64,
}

impl fmt::Display for SelectivityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tone on {} has Rabi rate {:.6e} rad/s, {:.4} of its {:.6e} rad/s detuning from {} (limit {})",
            self.target, self.rabi, self.ratio, self.detuning, self.nearest, SELECTIVITY_RATIO
        )
    }
}

/// Flags tones whose Rabi rate is not small against the distance to the
/// neighbouring lines they could also excite.
pub fn selectivity_check(group: &ToneGroup, lines: &LineList) -> Vec<SelectivityWarning> {
    let mut warnings = Vec::new();
    for tone in group.tones() {
        let line = lines.get(tone.target);
        let rabi = line.moment * tone.amplitude;
        let nearest = TransitionId::ALL
            .iter()
            .filter(|&&id| id != tone.target && id.shares_level(tone.target))
            .map(|&id| (id, (tone.carrier - lines.get(id).carrier()).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let Some((nearest, detuning)) = nearest else {
            continue;
        };
        let ratio = if rabi == 0.0 {
            0.0
        } else if detuning == 0.0 {
            f64::INFINITY
        } else {
            rabi / detuning
        };
        if ratio >= SELECTIVITY_RATIO {
            warnings.push(SelectivityWarning {
                target: tone.target,
                nearest,
                rabi,
                detuning,
                ratio,
            });
        }
    }
    warnings
}

#[derive(Serialize, Deserialize)]
struct PulseRepr {
    carrier_rad_s: f64,
    phase_rad: f64,
    amplitude_rad_s: f64,
    duration_s: f64,
    target: [usize; 2],
}

impl Serialize for Pulse {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PulseRepr {
            carrier_rad_s: self.carrier,
            phase_rad: self.phase,
            amplitude_rad_s: self.amplitude,
            duration_s: self.duration,
            target: self.target.levels(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Pulse {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PulseRepr::deserialize(deserializer)?;
        let target = TransitionId::from_levels(r.target[0], r.target[1]).map_err(D::Error::custom)?;
        Pulse::new(r.carrier_rad_s, r.phase_rad, r.amplitude_rad_s, r.duration_s, target)
            .map_err(D::Error::custom)
    }
}

impl Serialize for ToneGroup {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.tones.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ToneGroup {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        ToneGroup::new(Vec::<Pulse>::deserialize(deserializer)?).map_err(D::Error::custom)
    }
}

impl Serialize for PulseSchedule {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.groups.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PulseSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Self {
            groups: Vec::<ToneGroup>::deserialize(deserializer)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm;
    use crate::spectrum::line_list;
    use crate::spin_system::analytic_eigensystem;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn reference() -> (SpinSystemParams, EigenSystem, LineList) {
        let params = SpinSystemParams::from_frequencies(1000.0, 100.0, 100.0).unwrap();
        let eig = analytic_eigensystem(&params);
        let lines = line_list(&eig, &params);
        (params, eig, lines)
    }

    fn pi_tone(lines: &LineList, id: TransitionId, angle: f64, rabi: f64) -> Pulse {
        let mu = lines.get(id).moment;
        Pulse::resonant(lines, id, 0.0, rabi / mu, angle / rabi).unwrap()
    }

    #[test]
    fn pulse_validation() {
        assert!(Pulse::new(1.0, 0.0, -1.0, 1.0, TransitionId::L12).is_err());
        assert!(Pulse::new(1.0, 0.0, 1.0, -1.0, TransitionId::L12).is_err());
        assert!(Pulse::new(f64::NAN, 0.0, 1.0, 1.0, TransitionId::L12).is_err());
        let t = Pulse::new(1.0, 0.0, 1.0, 1.0, TransitionId::L12).unwrap();
        assert!(ToneGroup::new(vec![]).is_err());
        assert!(ToneGroup::new(vec![t, t]).is_err());
        assert!(ToneGroup::new(vec![t; 3]).is_err());
    }

    #[test]
    fn pi_pulse_on_34() {
        let (_, eig, lines) = reference();
        let group = ToneGroup::single(pi_tone(&lines, TransitionId::L34, PI, 1.0));
        let u = rwa_propagator(&group, &eig, &lines).unwrap();
        let m = u.matrix();
        let minus_i = c64(0.0, -1.0);
        assert!((m[(3, 2)] - minus_i).norm() < 1e-15);
        assert!((m[(2, 3)] - minus_i).norm() < 1e-15);
        assert!(m[(2, 2)].norm() < 1e-15 && m[(3, 3)].norm() < 1e-15);
        assert_eq!(m[(0, 0)], c64(1.0, 0.0));
        assert_eq!(m[(1, 1)], c64(1.0, 0.0));
    }

    #[test]
    fn zero_duration_is_identity() {
        let (params, eig, lines) = reference();
        let tone = Pulse::resonant(&lines, TransitionId::L12, 0.3, 5.0, 0.0).unwrap();
        let group = ToneGroup::single(tone);
        assert_eq!(rwa_propagator(&group, &eig, &lines).unwrap(), Propagator::identity());
        let lab = lab_frame_propagate(&group, &eig, &params, &LabFrameOptions::default()).unwrap();
        assert_eq!(lab, Propagator::identity());
    }

    #[test]
    fn half_pi_block_matches_two_level_exponential() {
        let (_, eig, lines) = reference();
        let tone = pi_tone(&lines, TransitionId::L12, FRAC_PI_2, 2.0);
        let u = rwa_propagator(&ToneGroup::single(tone), &eig, &lines).unwrap();

        // oracle: exp(-i t H_rwa) with H_rwa = (μω₁/2) σx on (ψ₁, ψ₂)
        let line = lines.get(TransitionId::L12);
        let mut h = Matrix4c::zeros();
        h[(0, 1)] = c64(0.5 * line.moment * tone.amplitude, 0.0);
        h[(1, 0)] = h[(0, 1)];
        let oracle = expm(&(h * c64(0.0, -tone.duration)));
        assert!(crate::linalg::frobenius_norm(&(u.matrix() - oracle)) < 1e-13);

        let (c, s) = (FRAC_PI_4.cos(), FRAC_PI_4.sin());
        assert!((u.matrix()[(0, 0)] - c64(c, 0.0)).norm() < 1e-15);
        assert!((u.matrix()[(0, 1)] - c64(0.0, -s)).norm() < 1e-15);
    }

    #[test]
    fn off_resonant_and_conflicting_tones_rejected() {
        let (_, eig, lines) = reference();
        let off = Pulse::new(900.0, 0.0, 1.0, 1.0, TransitionId::L34).unwrap();
        assert!(matches!(
            rwa_propagator(&ToneGroup::single(off), &eig, &lines),
            Err(Error::NoMatchingLine { .. })
        ));
        let a = pi_tone(&lines, TransitionId::L12, PI, 1.0);
        let b = pi_tone(&lines, TransitionId::L24, PI, 1.0);
        let group = ToneGroup::new(vec![a, b]).unwrap();
        assert!(matches!(
            rwa_propagator(&group, &eig, &lines),
            Err(Error::TargetConflict { level: 2 })
        ));
    }

    #[test]
    fn phase_shift_by_pi_flips_axis() {
        let (_, eig, lines) = reference();
        let base = Pulse::resonant(&lines, TransitionId::L13, 0.4, 1.0, 1.7).unwrap();
        let shifted = Pulse { phase: 0.4 + PI, ..base };
        let u = rwa_propagator(&ToneGroup::single(base), &eig, &lines).unwrap();
        let v = rwa_propagator(&ToneGroup::single(shifted), &eig, &lines).unwrap();
        // conjugation by diag(1, -1) on the (ψ₁, ψ₃) block
        let mut z = Matrix4c::identity();
        z[(2, 2)] = c64(-1.0, 0.0);
        assert!(crate::linalg::frobenius_norm(&(z * u.matrix() * z - v.matrix())) < 1e-14);
    }

    #[test]
    fn schedule_composes_in_order() {
        let (_, eig, lines) = reference();
        let g1 = ToneGroup::single(pi_tone(&lines, TransitionId::L12, 1.1, 1.0));
        let g2 = ToneGroup::single(pi_tone(&lines, TransitionId::L24, 0.7, 1.0));
        let schedule = PulseSchedule::new(vec![g1.clone(), g2.clone()]);
        let total = schedule.rwa_propagator(&eig, &lines).unwrap();
        let u1 = rwa_propagator(&g1, &eig, &lines).unwrap();
        let u2 = rwa_propagator(&g2, &eig, &lines).unwrap();
        let expected = u2.matrix() * u1.matrix();
        assert!(crate::linalg::frobenius_norm(&(total.matrix() - expected)) < 1e-10);
        assert!(total.unitarity_error() < 1e-10);
    }

    #[test]
    fn undriven_lab_frame_is_identity_in_rotating_frame() {
        let (params, eig, lines) = reference();
        let tone = Pulse::resonant(&lines, TransitionId::L34, 0.0, 0.0, 0.05).unwrap();
        let u = lab_frame_propagate(&ToneGroup::single(tone), &eig, &params, &LabFrameOptions::default())
            .unwrap();
        assert!(crate::linalg::frobenius_norm(&(u.matrix() - Matrix4c::identity())) < 1e-9);
    }

    #[test]
    fn step_budget_enforced() {
        let (params, eig, lines) = reference();
        let tone = Pulse::resonant(&lines, TransitionId::L34, 0.0, 1.0, 1e3).unwrap();
        let group = ToneGroup::single(tone);
        let options = LabFrameOptions {
            steps_per_period: 200,
            max_steps: 1000,
        };
        assert!(matches!(
            lab_frame_propagate(&group, &eig, &params, &options),
            Err(Error::ResourceLimit { cap: 1000, .. })
        ));
        let coarse = LabFrameOptions::with_steps_per_period(10);
        assert!(lab_frame_propagate(&group, &eig, &params, &coarse).is_err());
    }

    #[test]
    fn selectivity_warnings() {
        let (_, _, lines) = reference();
        let quiet = ToneGroup::single(Pulse::resonant(&lines, TransitionId::L12, 0.0, 1e-9, 1.0).unwrap());
        assert!(selectivity_check(&quiet, &lines).is_empty());

        let mu = lines.get(TransitionId::L12).moment;
        let loud = Pulse::resonant(&lines, TransitionId::L12, 0.0, lines.min_gap / mu, 1.0).unwrap();
        let warnings = selectivity_check(&ToneGroup::single(loud), &lines);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].nearest, TransitionId::L24);
        assert!((warnings[0].detuning - lines.min_gap).abs() < 1e-9);
    }

    #[test]
    fn selectivity_threshold_is_inclusive() {
        // unmixed lines have μ = 1, so the Rabi rate equals ω₁ exactly
        let params = SpinSystemParams::from_frequencies(1000.0, 100.0, 0.0).unwrap();
        let lines = line_list(&analytic_eigensystem(&params), &params);
        let at = Pulse::resonant(&lines, TransitionId::L12, 0.0, 5.0, 1.0).unwrap();
        let warnings = selectivity_check(&ToneGroup::single(at), &lines);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].ratio, SELECTIVITY_RATIO);
        let below = Pulse { amplitude: 4.999, ..at };
        assert!(selectivity_check(&ToneGroup::single(below), &lines).is_empty());
    }

    #[test]
    fn schedule_json_round_trip_is_bit_exact() {
        let (_, _, lines) = reference();
        let a = Pulse::resonant(&lines, TransitionId::L13, 1.0 / 3.0, 0.1, PI / 7.0).unwrap();
        let b = Pulse::resonant(&lines, TransitionId::L24, 2.0, 0.7, PI / 7.0).unwrap();
        let schedule = PulseSchedule::new(vec![
            ToneGroup::new(vec![a, b]).unwrap(),
            ToneGroup::single(a),
        ]);
        let text = schedule.to_json();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value[0][1]["target"], serde_json::json!([2, 4]));
        let back = PulseSchedule::from_json(&text).unwrap();
        for (g, h) in schedule.groups().iter().zip(back.groups()) {
            for (x, y) in g.tones().iter().zip(h.tones()) {
                assert_eq!(x.carrier.to_bits(), y.carrier.to_bits());
                assert_eq!(x.phase.to_bits(), y.phase.to_bits());
                assert_eq!(x.amplitude.to_bits(), y.amplitude.to_bits());
                assert_eq!(x.duration.to_bits(), y.duration.to_bits());
                assert_eq!(x.target, y.target);
            }
        }
        assert_eq!(back.to_json(), text);
        assert!(PulseSchedule::from_json(r#"[[{"carrier_rad_s":1,"phase_rad":0,"amplitude_rad_s":1,"duration_s":1,"target":[1,4]}]]"#).is_err());
        assert!(PulseSchedule::from_json("[[]]").is_err());
    }
}
