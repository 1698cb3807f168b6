//! Gate-level figures of merit assembled from per-component scattering.
//!
//! A photon reflected off a cavity holding an `N`-atom register in the basis
//! component `k` leaves with envelope `f_out^k`. Ideally the all-zero
//! component returns `−f_in` and every other component `+f_in`, which applies
//! `exp(iπ|0…0⟩⟨0…0|)` to the register. Photon loss is heralded by a missing
//! detector click; it lowers the success probability, not the fidelity.

use std::collections::BTreeMap;

use crate::dynamics::{simulate_component_with, ComponentResponse, InputDrive};
use crate::error::{Error, Result};
use crate::model::{
    uniform_register, AtomicComponent, CavityParams, CouplingProfile, Pulse, RegisterState,
};
use crate::C64;

/// Mean photon number beyond which a weak coherent pulse no longer behaves as
/// an attenuated single photon.
pub const WEAK_PULSE_LIMIT: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct GateResult {
    /// Fidelity of the heralded register state to the ideal gate output, with
    /// each component's photon normalized: `|Σ_k |c_k|² σ_k Ô_k|²`, where
    /// `Ô_k = O_k / √(1 − loss_k)` and `σ_k = −1` only for the all-zero
    /// component. Only pulse-shape distortion lowers it.
    pub fidelity: f64,
    /// `|Σ_k |c_k|² σ_k O_k|² / Σ_k |c_k|² (1 − loss_k)`: overlap of the
    /// renormalized photon-detected state, which also penalizes loss that
    /// differs between components.
    pub conditional_fidelity: f64,
    /// `Σ_k |c_k|² (1 − loss_k)`.
    pub success_prob: f64,
    pub per_component: BTreeMap<AtomicComponent, ComponentResponse>,
}

impl GateResult {
    pub fn loss(&self) -> f64 {
        1.0 - self.success_prob
    }
}

/// How the independent component simulations are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[cfg_attr(feature = "parallel", default)]
    Parallel,
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
}

/// Reflects `pulse` off the cavity for every component of `register` with
/// non-zero amplitude and assembles the gate figures of merit.
pub fn simulate_gate(
    register: &RegisterState,
    pulse: &Pulse,
    profiles: &[CouplingProfile],
    params: &CavityParams,
) -> Result<GateResult> {
    simulate_gate_with(register, pulse, profiles, params, Execution::default())
}

pub fn simulate_gate_with(
    register: &RegisterState,
    pulse: &Pulse,
    profiles: &[CouplingProfile],
    params: &CavityParams,
    execution: Execution,
) -> Result<GateResult> {
    if profiles.len() != register.n_atoms() {
        return Err(Error::invalid(format!(
            "{} coupling profiles for a {}-atom register",
            profiles.len(),
            register.n_atoms()
        )));
    }
    let drive = InputDrive::new(pulse.envelope(), params)?;
    let components: Vec<AtomicComponent> = register.support().map(|(k, _)| k).collect();
    let run = |&component: &AtomicComponent| {
        simulate_component_with(&drive, component, profiles, params).map_err(|e| {
            Error::Component {
                component: component.to_string(),
                source: Box::new(e),
            }
        })
    };
    let responses: Vec<ComponentResponse> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            components.par_iter().map(run).collect::<Result<_>>()?
        }
        _ => components.iter().map(run).collect::<Result<_>>()?,
    };
    assemble(register, responses)
}

/// Combines component responses into a [`GateResult`].
///
/// Every component in the register's support needs a response; extra
/// responses are ignored.
pub fn assemble(register: &RegisterState, responses: Vec<ComponentResponse>) -> Result<GateResult> {
    let mut per_component: BTreeMap<AtomicComponent, ComponentResponse> =
        responses.into_iter().map(|r| (r.component, r)).collect();
    per_component.retain(|k, _| register.amplitude(*k).norm_sqr() > 0.0);

    let mut shape_overlap = C64::new(0.0, 0.0);
    let mut raw_overlap = C64::new(0.0, 0.0);
    let mut success = 0.0;
    for (component, amp) in register.support() {
        let resp = per_component.get(&component).ok_or_else(|| {
            Error::invalid(format!("no response for component |{component}⟩"))
        })?;
        let weight = amp.norm_sqr();
        let sign = if component.is_all_zero() { -1.0 } else { 1.0 };
        shape_overlap += weight * sign * resp.normalized_overlap();
        raw_overlap += weight * sign * resp.overlap;
        success += weight * resp.survival();
    }
    let conditional_fidelity = if success > 0.0 {
        raw_overlap.norm_sqr() / success
    } else {
        0.0
    };
    Ok(GateResult {
        fidelity: shape_overlap.norm_sqr(),
        conditional_fidelity,
        success_prob: success,
        per_component,
    })
}

/// `Σ_{n=1}^{N} C(N,n)/2^N · [1 + n g²/(κ γ_s)]⁻¹`: the loss averaged over the
/// Dicke components of the uniform register, the `n`-th coupling as `√n g`.
pub fn empirical_loss(n_atoms: usize, g: f64, params: &CavityParams) -> Result<f64> {
    if n_atoms == 0 {
        return Err(Error::invalid("need at least one atom"));
    }
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::invalid(format!("coupling rate must be positive, got {g}")));
    }
    if params.gamma_s() == 0.0 {
        return Ok(0.0);
    }
    let cooperativity = g * g / (params.kappa() * params.gamma_s());
    let scale = 0.5f64.powi(n_atoms as i32);
    let mut binomial = 1.0;
    let mut total = 0.0;
    for n in 1..=n_atoms {
        binomial *= (n_atoms - n + 1) as f64 / n as f64;
        total += binomial * scale / (1.0 + n as f64 * cooperativity);
    }
    Ok(total)
}

/// Photon loss `1 − P` of the gate on `[(|0⟩ + |1⟩)/√2]^⊗N`.
pub fn simulated_loss(
    n_atoms: usize,
    pulse: &Pulse,
    profiles: &[CouplingProfile],
    params: &CavityParams,
) -> Result<f64> {
    let register = uniform_register(n_atoms)?;
    Ok(simulate_gate(&register, pulse, profiles, params)?.loss())
}

/// Negates the amplitude of `target`: `exp(iπ|t⟩⟨t|)`. With the all-zero
/// target this is the `N`-atom Toffoli-type phase gate.
pub fn apply_nqubit_phase(register: &RegisterState, target: AtomicComponent) -> Result<RegisterState> {
    if target.n_atoms() != register.n_atoms() {
        return Err(Error::invalid(format!(
            "{}-bit target for a {}-atom register",
            target.n_atoms(),
            register.n_atoms()
        )));
    }
    let mut amplitudes = register.amplitudes().to_vec();
    amplitudes[target.index()] = -amplitudes[target.index()];
    Ok(RegisterState::from_parts(register.n_atoms(), amplitudes))
}

/// The light used to drive the gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhotonSource {
    SinglePhoton,
    /// Coherent state `|α⟩` with `|α|² = mean_photon_number ≪ 1`.
    WeakCoherent { mean_photon_number: f64 },
}

/// Success probability after detection efficiency `eta` and, for a weak
/// coherent pulse, the chance `|α|²` that it carried a photon at all.
pub fn scale_success(p: f64, eta: f64, source: PhotonSource) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("probability must lie in [0, 1], got {p}")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::invalid(format!("detection efficiency must lie in [0, 1], got {eta}")));
    }
    let photon = match source {
        PhotonSource::SinglePhoton => 1.0,
        PhotonSource::WeakCoherent { mean_photon_number: n } => {
            if !(n.is_finite() && n >= 0.0) {
                return Err(Error::invalid(format!("mean photon number must be >= 0, got {n}")));
            }
            if n > WEAK_PULSE_LIMIT {
                return Err(Error::OutOfModel(format!(
                    "mean photon number {n} exceeds the weak-pulse limit {WEAK_PULSE_LIMIT}"
                )));
            }
            n.min(1.0)
        }
    };
    Ok(p * eta * photon)
}
