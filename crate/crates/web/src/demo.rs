use cqed_gates::gates::{empirical_loss, simulate_gate_with, Execution};
use cqed_gates::model::MAX_ATOMS;
use cqed_gates::spectral::reflection_coefficient;
use cqed_gates::{
    gaussian_pulse, uniform_register, AtomicComponent, CavityParams, CouplingProfile, Error, Result,
};

/// Pulse samples used by every view.
pub const SAMPLES: usize = 4096;

/// Largest atom number offered by the loss view; `2^N` components per point.
pub const MAX_DEMO_ATOMS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Shapes {
    pub times: Vec<f64>,
    pub input: Vec<f64>,
    pub outputs: Vec<Vec<f64>>,
    pub phase_00: Vec<f64>,
    pub fidelity: f64,
    pub success: f64,
}

pub fn reflected_shapes(g: f64, gamma_s: f64, duration: f64) -> Result<Shapes> {
    let params = CavityParams::new(1.0, gamma_s)?;
    let pulse = gaussian_pulse(duration, SAMPLES)?;
    let profiles = vec![CouplingProfile::constant(g)?; 2];
    let result = simulate_gate_with(&uniform_register(2)?, &pulse, &profiles, &params, Execution::Sequential)?;

    let zero = AtomicComponent::all_zero(2)?;
    let f00 = &result.per_component[&zero].f_out;
    let len = f00.len();
    let outputs = AtomicComponent::all(2)?
        .iter()
        .map(|k| {
            let r = &result.per_component[k];
            let scale = 1.0 / r.output_norm().sqrt();
            r.f_out.samples().iter().map(|z| scale * z.norm()).collect()
        })
        .collect();
    Ok(Shapes {
        times: f00.times().collect(),
        input: (0..len)
            .map(|j| pulse.samples().get(j).map_or(0.0, |z| z.norm()))
            .collect(),
        outputs,
        phase_00: f00.samples().iter().map(|z| z.arg()).collect(),
        fidelity: result.fidelity,
        success: result.success_prob,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossPoint {
    pub g: f64,
    pub simulated: f64,
    pub empirical: f64,
}

/// Loss of the uniform register at `points` couplings spread evenly over
/// `[g_min, g_max]`, with `T = 210/κ`.
pub fn loss_curve(n_atoms: usize, gamma_s: f64, g_min: f64, g_max: f64, points: usize) -> Result<Vec<LossPoint>> {
    if n_atoms == 0 || n_atoms > MAX_DEMO_ATOMS.min(MAX_ATOMS) {
        return Err(Error::InvalidArgument(format!(
            "the demo handles 1 to {MAX_DEMO_ATOMS} atoms, got {n_atoms}"
        )));
    }
    if !(g_min > 0.0 && g_min <= g_max) || points == 0 {
        return Err(Error::InvalidArgument(format!(
            "need 0 < g_min <= g_max and at least one point, got {g_min}..{g_max} with {points}"
        )));
    }
    let params = CavityParams::new(1.0, gamma_s)?;
    let pulse = gaussian_pulse(210.0, SAMPLES)?;
    let register = uniform_register(n_atoms)?;
    (0..points)
        .map(|i| {
            let g = if points == 1 {
                g_min
            } else {
                g_min + (g_max - g_min) * i as f64 / (points - 1) as f64
            };
            let profiles = vec![CouplingProfile::constant(g)?; n_atoms];
            let result = simulate_gate_with(&register, &pulse, &profiles, &params, Execution::Sequential)?;
            Ok(LossPoint {
                g,
                simulated: result.loss(),
                empirical: empirical_loss(n_atoms, g, &params)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub magnitude: f64,
    pub phase: f64,
}

pub fn reflection_spectrum(
    g: f64,
    gamma_s: f64,
    n_coupled: usize,
    omega_max: f64,
    points: usize,
) -> Result<Vec<SpectrumPoint>> {
    if !(omega_max.is_finite() && omega_max > 0.0) || points < 2 {
        return Err(Error::InvalidArgument(format!(
            "need omega_max > 0 and at least two points, got {omega_max} with {points}"
        )));
    }
    let params = CavityParams::new(1.0, gamma_s)?;
    let couplings = vec![g; n_coupled];
    Ok((0..points)
        .map(|j| {
            let omega = -omega_max + 2.0 * omega_max * j as f64 / (points - 1) as f64;
            let r = reflection_coefficient(omega, &couplings, &params);
            SpectrumPoint {
                omega,
                magnitude: r.norm(),
                phase: r.arg(),
            }
        })
        .collect())
}
