//! Two exchange-coupled spin-1/2 nuclei `I` and `S` in a static field.
//!
//! The Hamiltonian (angular-frequency units, ħ = 1) is
//!
//! ```text
//! H = ω₀ (Iz + Sz) + (δ/2)(Iz − Sz) + J (I·S)
//! ω₀ = (γ_I + γ_S) H₀ / 2,   δ = −(γ_I − γ_S) H₀
//! ```
//!
//! and is diagonalized in closed form: `|++⟩` and `|−−⟩` are eigenstates,
//! while `|+−⟩` and `|−+⟩` are mixed by the exchange term with mixing angle
//! `φ` (`tan φ = J/δ`).

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c64, Matrix2c, Matrix4c, Vector4c, ONE, ZERO};

pub use crate::linalg::{numeric_diagonalize, Eigendecomposition};

/// Gyromagnetic ratios and field strength, when the parameters were given
/// in physical form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// rad·s⁻¹·T⁻¹
    pub gamma_i: f64,
    /// rad·s⁻¹·T⁻¹
    pub gamma_s: f64,
    /// T
    pub h0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSystemParams {
    physical: Option<PhysicalConstants>,
    omega0: f64,
    delta: f64,
    j: f64,
}

impl SpinSystemParams {
    /// Parameters from gyromagnetic ratios, field and exchange integral.
    pub fn from_physical(gamma_i: f64, gamma_s: f64, h0: f64, j: f64) -> Result<Self> {
        check_finite("gamma_i", gamma_i)?;
        check_finite("gamma_s", gamma_s)?;
        check_finite("h0", h0)?;
        check_finite("j", j)?;
        if h0 < 0.0 {
            return Err(Error::InvalidParameter(format!("h0 must be >= 0, got {h0}")));
        }
        let omega0 = 0.5 * (gamma_i + gamma_s) * h0;
        let delta = -(gamma_i - gamma_s) * h0;
        check_finite("omega0", omega0)?;
        check_finite("delta", delta)?;
        Ok(Self {
            physical: Some(PhysicalConstants {
                gamma_i,
                gamma_s,
                h0,
            }),
            omega0,
            // normalizes -0.0 so the mixing-angle branch sees δ = +0
            delta: delta + 0.0,
            j,
        })
    }

    /// Parameters given directly as mean Larmor frequency, Larmor
    /// difference and exchange integral, all in rad·s⁻¹.
    pub fn from_frequencies(omega0: f64, delta: f64, j: f64) -> Result<Self> {
        check_finite("omega0", omega0)?;
        check_finite("delta", delta)?;
        check_finite("j", j)?;
        Ok(Self {
            physical: None,
            omega0,
            delta: delta + 0.0,
            j,
        })
    }

    pub fn physical(&self) -> Option<PhysicalConstants> {
        self.physical
    }

    /// Mean Larmor angular frequency ω₀.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Larmor difference δ.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Exchange integral J.
    pub fn j(&self) -> f64 {
        self.j
    }

    /// Effective splitting θ = √(J² + δ²), always non-negative.
    pub fn theta(&self) -> f64 {
        self.j.hypot(self.delta)
    }

    /// Equivalent-spin regime where the mixing angle is fixed by convention.
    pub fn is_degenerate(&self) -> bool {
        self.delta == 0.0
    }
}

fn check_finite(key: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{key} must be finite, got {value}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projection {
    Up,
    Down,
}

impl Projection {
    pub fn value(self) -> f64 {
        match self {
            Projection::Up => 0.5,
            Projection::Down => -0.5,
        }
    }

    fn bit(self) -> usize {
        match self {
            Projection::Up => 0,
            Projection::Down => 1,
        }
    }
}

/// A state `|m_I, m_S⟩` of the product basis, ordered
/// `|++⟩, |+−⟩, |−+⟩, |−−⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductBasisState {
    pub m_i: Projection,
    pub m_s: Projection,
}

impl ProductBasisState {
    pub const ALL: [ProductBasisState; 4] = [
        Self::new(Projection::Up, Projection::Up),
        Self::new(Projection::Up, Projection::Down),
        Self::new(Projection::Down, Projection::Up),
        Self::new(Projection::Down, Projection::Down),
    ];

    pub const fn new(m_i: Projection, m_s: Projection) -> Self {
        Self { m_i, m_s }
    }

    pub fn index(self) -> usize {
        2 * self.m_i.bit() + self.m_s.bit()
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn ket(self) -> Vector4c {
        let mut v = Vector4c::zeros();
        v[self.index()] = ONE;
        v
    }
}

/// Single-spin operators of both spins and `I·S`, in the product basis.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub ix: Matrix4c,
    pub iy: Matrix4c,
    pub iz: Matrix4c,
    pub sx: Matrix4c,
    pub sy: Matrix4c,
    pub sz: Matrix4c,
    pub dot: Matrix4c,
}

impl SpinOperators {
    pub fn new() -> Self {
        let half = c64(0.5, 0.0);
        let sx = Matrix2::new(ZERO, ONE, ONE, ZERO) * half;
        let sy = Matrix2::new(ZERO, c64(0.0, -1.0), c64(0.0, 1.0), ZERO) * half;
        let sz = Matrix2::new(ONE, ZERO, ZERO, -ONE) * half;
        let id = Matrix2c::identity();

        let ix = sx.kronecker(&id).fixed_view::<4, 4>(0, 0).into_owned();
        let iy = sy.kronecker(&id).fixed_view::<4, 4>(0, 0).into_owned();
        let iz = sz.kronecker(&id).fixed_view::<4, 4>(0, 0).into_owned();
        let sx4 = id.kronecker(&sx).fixed_view::<4, 4>(0, 0).into_owned();
        let sy4 = id.kronecker(&sy).fixed_view::<4, 4>(0, 0).into_owned();
        let sz4 = id.kronecker(&sz).fixed_view::<4, 4>(0, 0).into_owned();
        let dot = ix * sx4 + iy * sy4 + iz * sz4;
        Self {
            ix,
            iy,
            iz,
            sx: sx4,
            sy: sy4,
            sz: sz4,
            dot,
        }
    }

    /// Transverse operator `Ix + Sx` that couples to the RF field.
    pub fn transverse_x(&self) -> Matrix4c {
        self.ix + self.sx
    }
}

impl Default for SpinOperators {
    fn default() -> Self {
        Self::new()
    }
}

pub fn build_hamiltonian(params: &SpinSystemParams) -> Matrix4c {
    let ops = SpinOperators::new();
    let re = |x: f64| c64(x, 0.0);
    (ops.iz + ops.sz) * re(params.omega0)
        + (ops.iz - ops.sz) * re(0.5 * params.delta)
        + ops.dot * re(params.j)
}

/// Closed-form eigensystem, labelled ψ₁..ψ₄ (not sorted by energy).
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// ε₁..ε₄ in rad·s⁻¹.
    pub energies: [f64; 4],
    /// Columns are ψ₁..ψ₄ in the product basis.
    pub states: Matrix4c,
    pub theta: f64,
    pub phi: f64,
    pub p: f64,
    pub q: f64,
}

impl EigenSystem {
    /// Eigenstate ψ_k for k in 1..=4.
    pub fn state(&self, k: usize) -> Vector4c {
        self.states.column(k - 1).into_owned()
    }

    /// Energy ε_k for k in 1..=4.
    pub fn energy(&self, k: usize) -> f64 {
        self.energies[k - 1]
    }

    /// `⟨ψ_a| op |ψ_b⟩` with 1-based labels.
    pub fn matrix_element(&self, op: &Matrix4c, a: usize, b: usize) -> Complex64 {
        (self.state(a).adjoint() * op * self.state(b))[(0, 0)]
    }

    /// `op` expressed in the eigenbasis, rows and columns in label order.
    pub fn to_eigenbasis(&self, op: &Matrix4c) -> Matrix4c {
        self.states.adjoint() * op * self.states
    }
}

/// Mixing angle with `cos φ = δ/θ` and `sin φ = J/θ`.
///
/// For δ ≥ 0 this is `arctan(J/δ)` in [−π/2, π/2], with ±π/2 at δ = 0 and
/// 0 when J = δ = 0. For δ < 0 the angle leaves that interval so that ψ₂
/// keeps the upper energy −J/4 + θ/2.
pub fn mixing_angle(j: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        if j > 0.0 {
            FRAC_PI_2
        } else if j < 0.0 {
            -FRAC_PI_2
        } else {
            0.0
        }
    } else {
        j.atan2(delta)
    }
}

pub fn analytic_eigensystem(params: &SpinSystemParams) -> EigenSystem {
    let (omega0, j) = (params.omega0, params.j);
    let theta = params.theta();
    let phi = mixing_angle(j, params.delta);
    let (q, p) = (0.5 * phi).sin_cos();

    let energies = [
        omega0 + 0.25 * j,
        -0.25 * j + 0.5 * theta,
        -0.25 * j - 0.5 * theta,
        -omega0 + 0.25 * j,
    ];

    let (pc, qc) = (c64(p, 0.0), c64(q, 0.0));
    #[rustfmt::skip]
    let states = Matrix4c::new(
        ONE,  ZERO, ZERO, ZERO,
        ZERO, pc,   -qc,  ZERO,
        ZERO, qc,   pc,   ZERO,
        ZERO, ZERO, ZERO, ONE,
    );

    EigenSystem {
        energies,
        states,
        theta,
        phi,
        p,
        q,
    }
}
