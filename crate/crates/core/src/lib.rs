//! Cavity-assisted photon-scattering gates on neutral atoms.
//!
//! A single photon reflected from a one-sided cavity picks up a π phase if
//! and only if none of the intracavity atoms is in the cavity-coupled qubit
//! state `|1⟩`. Reflection therefore implements `exp(iπ|0…0⟩⟨0…0|)` on the
//! atomic register. This crate models that process in the single-excitation
//! sector:
//!
//! * [`model`]: cavity parameters, sampled pulses, coupling profiles and the
//!   atomic register.
//! * [`spectral`]: closed-form reflection coefficient and a frequency-domain
//!   pulse reflector, valid for constant couplings.
//! * [`dynamics`]: fixed-step RK4 integration of the cavity and atomic
//!   amplitudes, valid for time-dependent couplings.
//! * [`gates`]: assembly of per-component responses into fidelity, success
//!   probability and loss, plus ideal phase gates on register states.
//! * [`protocol`]: the two-cavity nonlocal gate network with polarization
//!   optics, detection and classical feedback.
//!
//! All rates are in units of the cavity decay rate κ and all times in 1/κ
//! unless a [`CavityParams`] with a different `kappa` is supplied.

pub mod dynamics;
pub mod error;
mod fourier;
pub mod gates;
pub mod model;
pub mod protocol;
pub mod spectral;

pub use dynamics::{simulate_component, ComponentResponse};
pub use error::{Error, Result};
pub use gates::{simulate_gate, GateResult};
pub use model::{
    gaussian_pulse, uniform_register, AtomicComponent, CavityParams, CouplingProfile, Envelope,
    Pulse, RegisterState,
};

pub use num_complex::Complex64 as C64;
