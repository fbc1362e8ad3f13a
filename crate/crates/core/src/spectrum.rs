//! The four allowed single-quantum lines and their strengths.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfmt::fmt_sig17;
use crate::spin_system::{EigenSystem, SpinOperators, SpinSystemParams};

/// Limit on the forbidden ψ₁↔ψ₄ and ψ₂↔ψ₃ matrix elements.
pub const FORBIDDEN_TOLERANCE: f64 = 1e-12;

/// One of the four allowed transitions, named by its eigenstate labels.
///
/// The first label is the state that lies higher in energy when the Zeeman
/// term dominates; the identity never depends on the actual energy order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TransitionId {
    L12,
    L13,
    L24,
    L34,
}

impl TransitionId {
    pub const ALL: [TransitionId; 4] = [Self::L12, Self::L13, Self::L24, Self::L34];

    pub fn upper(self) -> usize {
        match self {
            Self::L12 | Self::L13 => 1,
            Self::L24 => 2,
            Self::L34 => 3,
        }
    }

    pub fn lower(self) -> usize {
        match self {
            Self::L12 => 2,
            Self::L13 => 3,
            Self::L24 | Self::L34 => 4,
        }
    }

    pub fn levels(self) -> [usize; 2] {
        [self.upper(), self.lower()]
    }

    /// Looks up an allowed transition from its two labels, in either order.
    pub fn from_levels(a: usize, b: usize) -> Result<Self> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        match (lo, hi) {
            (1, 2) => Ok(Self::L12),
            (1, 3) => Ok(Self::L13),
            (2, 4) => Ok(Self::L24),
            (3, 4) => Ok(Self::L34),
            _ => Err(Error::ForbiddenTransition(a, b)),
        }
    }

    pub fn shares_level(self, other: TransitionId) -> bool {
        self.levels().iter().any(|l| other.levels().contains(l))
    }

    /// Line frequency from the closed-form level scheme.
    pub fn closed_form_frequency(self, params: &SpinSystemParams) -> f64 {
        let (omega0, j, theta) = (params.omega0(), params.j(), params.theta());
        match self {
            Self::L12 => omega0 + 0.5 * j - 0.5 * theta,
            Self::L13 => omega0 + 0.5 * j + 0.5 * theta,
            Self::L24 => omega0 - 0.5 * j + 0.5 * theta,
            Self::L34 => omega0 - 0.5 * j - 0.5 * theta,
        }
    }

    /// `1 ± sin φ`.
    pub fn closed_form_intensity(self, phi: f64) -> f64 {
        match self {
            Self::L12 | Self::L24 => 1.0 + phi.sin(),
            Self::L13 | Self::L34 => 1.0 - phi.sin(),
        }
    }
}

impl fmt::Display for TransitionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<->{}", self.upper(), self.lower())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub id: TransitionId,
    /// `ε_upper − ε_lower`, rad·s⁻¹. Negative only at parameters where the
    /// exchange term overwhelms the Zeeman term.
    pub frequency: f64,
    /// `⟨ψ_upper| Ix + Sx |ψ_lower⟩`.
    pub element: Complex64,
    /// `2 |element|`
    pub moment: f64,
    /// `moment²`, equal to 1 for an unmixed line.
    pub intensity: f64,
}

impl Transition {
    pub fn upper(&self) -> usize {
        self.id.upper()
    }

    pub fn lower(&self) -> usize {
        self.id.lower()
    }

    /// Frequency a resonant carrier has to use.
    pub fn carrier(&self) -> f64 {
        self.frequency.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineList {
    /// Sorted by frequency, ascending.
    pub transitions: [Transition; 4],
    /// Smallest pairwise frequency separation.
    pub min_gap: f64,
    /// Largest difference between the level-difference frequencies and the
    /// closed-form line positions.
    pub closed_form_residual: f64,
}

impl LineList {
    pub fn get(&self, id: TransitionId) -> &Transition {
        self.transitions
            .iter()
            .find(|t| t.id == id)
            .expect("line list holds every allowed transition")
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.iter()
    }
}

/// Builds the line list from eigenvalue differences and `Ix + Sx` matrix
/// elements of the given eigensystem.
///
/// The closed-form positions computed from `params` are compared against
/// the level differences and the worst mismatch is kept alongside.
pub fn line_list(eig: &EigenSystem, params: &SpinSystemParams) -> LineList {
    let x = SpinOperators::new().transverse_x();
    let mut transitions = TransitionId::ALL.map(|id| {
        let element = eig.matrix_element(&x, id.upper(), id.lower());
        let moment = 2.0 * element.norm();
        Transition {
            id,
            frequency: eig.energy(id.upper()) - eig.energy(id.lower()),
            element,
            moment,
            intensity: moment * moment,
        }
    });
    transitions.sort_by(|a, b| a.frequency.total_cmp(&b.frequency).then(a.id.cmp(&b.id)));
    let min_gap = transitions
        .windows(2)
        .map(|w| w[1].frequency - w[0].frequency)
        .fold(f64::INFINITY, f64::min);
    LineList {
        transitions,
        min_gap,
        closed_form_residual: frequency_residual(eig, params),
    }
}

/// Largest disagreement between eigenvalue differences and the closed-form
/// line frequencies.
pub fn frequency_residual(eig: &EigenSystem, params: &SpinSystemParams) -> f64 {
    TransitionId::ALL
        .iter()
        .map(|id| {
            let from_levels = eig.energy(id.upper()) - eig.energy(id.lower());
            (from_levels - id.closed_form_frequency(params)).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForbiddenReport {
    /// `|⟨ψ₁| Ix + Sx |ψ₄⟩|`
    pub moment_14: f64,
    /// `|⟨ψ₂| Ix + Sx |ψ₃⟩|`
    pub moment_23: f64,
}

impl ForbiddenReport {
    pub fn passed(&self) -> bool {
        self.moment_14 <= FORBIDDEN_TOLERANCE && self.moment_23 <= FORBIDDEN_TOLERANCE
    }
}

pub fn forbidden_check(eig: &EigenSystem) -> ForbiddenReport {
    let x = SpinOperators::new().transverse_x();
    ForbiddenReport {
        moment_14: eig.matrix_element(&x, 1, 4).norm(),
        moment_23: eig.matrix_element(&x, 2, 3).norm(),
    }
}

/// `min_gap / rabi`: how many Rabi widths separate the closest lines.
pub fn resolvability(lines: &LineList, rabi: f64) -> Result<f64> {
    if !(rabi > 0.0) || !rabi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Rabi frequency must be positive and finite, got {rabi}"
        )));
    }
    Ok(lines.min_gap / rabi)
}

pub const CSV_HEADER: &str = "upper,lower,frequency_rad_s,intensity";

pub fn to_csv(lines: &LineList) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for t in lines.iter() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            t.upper(),
            t.lower(),
            fmt_sig17(t.frequency),
            fmt_sig17(t.intensity)
        ));
    }
    out
}

#[derive(Serialize)]
struct LineJson {
    upper: usize,
    lower: usize,
    frequency_rad_s: f64,
    intensity: f64,
}

#[derive(Serialize)]
struct LineListJson {
    lines: Vec<LineJson>,
    min_gap_rad_s: f64,
}

pub fn to_json(lines: &LineList) -> String {
    let doc = LineListJson {
        lines: lines
            .iter()
            .map(|t| LineJson {
                upper: t.upper(),
                lower: t.lower(),
                frequency_rad_s: t.frequency,
                intensity: t.intensity,
            })
            .collect(),
        min_gap_rad_s: lines.min_gap,
    };
    crate::numfmt::to_json_string(&doc).expect("line list serializes")
}
