//! Two virtual qubits Q and R carried by the eigenstates ψ₁..ψ₄.
//!
//! The encoding is `|00⟩ = ψ₁, |01⟩ = ψ₂, |10⟩ = ψ₃, |11⟩ = ψ₄`, with the
//! first symbol the virtual spin Q and the second R; bit 1 means
//! projection +1/2. The physical spins stay named I and S throughout, so
//! "S" never refers to a virtual spin here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, Vector4c};
use crate::spin_system::EigenSystem;

const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitLabel {
    pub q: bool,
    pub r: bool,
}

impl QubitLabel {
    pub const ALL: [QubitLabel; 4] = [
        QubitLabel::new(false, false),
        QubitLabel::new(false, true),
        QubitLabel::new(true, false),
        QubitLabel::new(true, true),
    ];

    pub const fn new(q: bool, r: bool) -> Self {
        Self { q, r }
    }

    /// Position 0..4 in the computational ordering `00, 01, 10, 11`.
    pub fn position(self) -> usize {
        2 * usize::from(self.q) + usize::from(self.r)
    }

    pub fn from_position(position: usize) -> Option<Self> {
        Self::ALL.get(position).copied()
    }

    /// Label of the eigenstate carrying this basis state, 1..=4.
    pub fn eigenindex(self) -> usize {
        self.position() + 1
    }

    pub fn from_eigenindex(index: usize) -> Option<Self> {
        index.checked_sub(1).and_then(Self::from_position)
    }
}

pub fn eigenindex_for_label(label: QubitLabel) -> usize {
    label.eigenindex()
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", u8::from(self.q), u8::from(self.r))
    }
}

impl FromStr for QubitLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bit = |c: u8| match c {
            b'0' => Some(false),
            b'1' => Some(true),
            _ => None,
        };
        match s.as_bytes() {
            [a, b] => match (bit(*a), bit(*b)) {
                (Some(q), Some(r)) => Ok(Self::new(q, r)),
                _ => Err(Error::InvalidParameter(format!("bad qubit label `{s}`"))),
            },
            _ => Err(Error::InvalidParameter(format!("bad qubit label `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `|++⟩, |+−⟩, |−+⟩, |−−⟩`
    Product,
    /// ψ₁..ψ₄, i.e. the computational basis `|00⟩..|11⟩`.
    Eigen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateVectorRepr", into = "StateVectorRepr")]
pub struct StateVector {
    amplitudes: Vector4c,
    basis: Basis,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized to 1e-12.
    pub fn new(amplitudes: Vector4c, basis: Basis) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "state vector norm is {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes, basis })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vector4c, basis: Basis) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize a zero state".into()));
        }
        Ok(Self {
            amplitudes: amplitudes / c64(norm, 0.0),
            basis,
        })
    }

    pub fn basis_state(label: QubitLabel) -> Self {
        let mut amplitudes = Vector4c::zeros();
        amplitudes[label.position()] = c64(1.0, 0.0);
        Self {
            amplitudes,
            basis: Basis::Eigen,
        }
    }

    pub fn amplitudes(&self) -> &Vector4c {
        &self.amplitudes
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    fn expect_basis(&self, basis: Basis) -> Result<()> {
        if self.basis == basis {
            Ok(())
        } else {
            Err(Error::ContractViolation(format!(
                "expected a {basis:?}-basis state, got {:?}",
                self.basis
            )))
        }
    }
}

/// Amplitudes `cᵢ = ⟨ψᵢ|state⟩`.
pub fn to_computational(state: &StateVector, eig: &EigenSystem) -> Result<StateVector> {
    state.expect_basis(Basis::Product)?;
    Ok(StateVector {
        amplitudes: eig.states.adjoint() * state.amplitudes,
        basis: Basis::Eigen,
    })
}

pub fn to_product(state: &StateVector, eig: &EigenSystem) -> Result<StateVector> {
    state.expect_basis(Basis::Eigen)?;
    Ok(StateVector {
        amplitudes: eig.states * state.amplitudes,
        basis: Basis::Product,
    })
}

/// Measurement probabilities in the computational basis, indexed by
/// [`QubitLabel::position`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations(pub [f64; 4]);

impl Populations {
    pub fn get(&self, label: QubitLabel) -> f64 {
        self.0[label.position()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (QubitLabel, f64)> + '_ {
        QubitLabel::ALL.iter().map(|&l| (l, self.get(l)))
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

pub fn populations(state: &StateVector) -> Result<Populations> {
    state.expect_basis(Basis::Eigen)?;
    let mut p = [0.0; 4];
    for (slot, amp) in p.iter_mut().zip(state.amplitudes.iter()) {
        *slot = amp.norm_sqr();
    }
    Ok(Populations(p))
}

#[derive(Serialize, Deserialize)]
struct StateVectorRepr {
    basis: Basis,
    amplitudes: Vec<[f64; 2]>,
}

impl From<StateVector> for StateVectorRepr {
    fn from(s: StateVector) -> Self {
        Self {
            basis: s.basis,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<StateVectorRepr> for StateVector {
    type Error = Error;

    fn try_from(repr: StateVectorRepr) -> Result<Self> {
        if repr.amplitudes.len() != 4 {
            return Err(Error::InvalidParameter(format!(
                "expected 4 amplitudes, got {}",
                repr.amplitudes.len()
            )));
        }
        let amps = Vector4c::from_iterator(repr.amplitudes.iter().map(|[re, im]| c64(*re, *im)));
        StateVector::new(amps, repr.basis)
    }
}
