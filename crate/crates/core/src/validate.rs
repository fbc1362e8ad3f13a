//! Self-consistency checks of an eigensystem and its line list against the
//! Hamiltonian it came from.

use std::fmt;

use crate::linalg::{c64, numeric_diagonalize, spectral_norm, unitarity_error};
use crate::spectrum::{forbidden_check, line_list, TransitionId, FORBIDDEN_TOLERANCE};
use crate::spin_system::{analytic_eigensystem, build_hamiltonian, EigenSystem, SpinSystemParams};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} residual {:.3e} (tolerance {:.1e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.residual,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

pub fn validate(params: &SpinSystemParams) -> ValidationReport {
    validate_eigensystem(params, &analytic_eigensystem(params))
}

/// Checks `eig` against the Hamiltonian built from `params`. Passing a
/// tampered eigensystem is how the checks themselves are tested.
pub fn validate_eigensystem(params: &SpinSystemParams, eig: &EigenSystem) -> ValidationReport {
    let h = build_hamiltonian(params);
    let h_norm = spectral_norm(&h);
    let energy_scale = eig.energies.iter().map(|e| e.abs()).fold(0.0, f64::max);
    // absolute scale for frequency identities; rounding of ε grows with |ε|
    let freq_scale = energy_scale.max(1.0);
    let mut checks = Vec::new();

    let eigen_agreement = match numeric_diagonalize(&h) {
        Ok(num) => {
            let mut sorted = eig.energies;
            sorted.sort_by(f64::total_cmp);
            sorted
                .iter()
                .zip(num.values)
                .map(|(a, n)| (a - n).abs())
                .fold(0.0, f64::max)
                / energy_scale.max(f64::MIN_POSITIVE)
        }
        Err(_) => f64::INFINITY,
    };
    checks.push(CheckResult {
        name: "analytic vs Jacobi levels",
        residual: if energy_scale == 0.0 && eigen_agreement.is_finite() { 0.0 } else { eigen_agreement },
        tolerance: 1e-9,
    });

    let residual = (1..=4)
        .map(|k| {
            let psi = eig.state(k);
            (h * psi - psi * c64(eig.energy(k), 0.0)).norm()
        })
        .fold(0.0, f64::max);
    checks.push(CheckResult {
        name: "eigenvector residual",
        residual: if h_norm > 0.0 { residual / h_norm } else { residual },
        tolerance: 1e-9,
    });

    checks.push(CheckResult {
        name: "eigenbasis unitarity",
        residual: unitarity_error(&eig.states),
        tolerance: 1e-12,
    });
    checks.push(CheckResult {
        name: "p^2 + q^2 = 1",
        residual: (eig.p * eig.p + eig.q * eig.q - 1.0).abs(),
        tolerance: 1e-15,
    });
    checks.push(CheckResult {
        name: "traceless spectrum",
        residual: eig.energies.iter().sum::<f64>().abs(),
        tolerance: 1e-9 * freq_scale,
    });

    let lines = line_list(eig, params);
    let f = |id| lines.get(id).frequency;
    let two_omega0 = 2.0 * params.omega0();
    let sum_rule = [
        f(TransitionId::L12) + f(TransitionId::L24) - two_omega0,
        f(TransitionId::L13) + f(TransitionId::L34) - two_omega0,
    ]
    .iter()
    .map(|x| x.abs())
    .fold(0.0, f64::max);
    checks.push(CheckResult {
        name: "frequency sum rule",
        residual: sum_rule,
        tolerance: 1e-9 * freq_scale,
    });
    let theta_recovery = [
        f(TransitionId::L13) - f(TransitionId::L12) - params.theta(),
        f(TransitionId::L24) - f(TransitionId::L34) - params.theta(),
    ]
    .iter()
    .map(|x| x.abs())
    .fold(0.0, f64::max);
    checks.push(CheckResult {
        name: "theta recovery",
        residual: theta_recovery,
        tolerance: 1e-9 * freq_scale,
    });
    checks.push(CheckResult {
        name: "closed-form line positions",
        residual: lines.closed_form_residual,
        tolerance: 1e-10 * freq_scale,
    });

    let intensity_residual = lines
        .iter()
        .map(|t| (t.intensity - t.id.closed_form_intensity(eig.phi)).abs())
        .fold(0.0, f64::max);
    checks.push(CheckResult {
        name: "intensities 1 +/- sin(phi)",
        residual: intensity_residual,
        tolerance: 1e-10,
    });
    checks.push(CheckResult {
        name: "intensity sum",
        residual: (lines.iter().map(|t| t.intensity).sum::<f64>() - 4.0).abs(),
        tolerance: 1e-10,
    });

    let forbidden = forbidden_check(eig);
    checks.push(CheckResult {
        name: "forbidden lines",
        residual: forbidden.moment_14.max(forbidden.moment_23),
        tolerance: FORBIDDEN_TOLERANCE,
    });

    let mut notes = Vec::new();
    if params.delta() == 0.0 && params.j() == 0.0 {
        notes.push(
            "J = δ = 0: ψ₂, ψ₃ are degenerate; using the product basis (φ = 0, p = 1, q = 0)"
                .to_string(),
        );
    } else if params.delta() == 0.0 {
        notes.push(format!(
            "δ = 0: equivalent spins, φ fixed to {}π/2; ψ₃ is the singlet and its lines are dark",
            if params.j() > 0.0 { "+" } else { "-" }
        ));
    } else if params.delta() < 0.0 {
        notes.push("δ < 0: φ = atan2(J, δ) lies outside [-π/2, π/2]".to_string());
    }

    ValidationReport { checks, notes }
}
