//! Frequency-domain reflection off the cavity for constant couplings.
//!
//! Eliminating the cavity and excited-state amplitudes in steady state gives
//!
//! ```text
//! r(ω) = 1 − κ / [κ/2 − iω + Σ_j g_j² / (γ_s/2 − iω)]
//! ```
//!
//! for a photon detuned by ω from the common cavity/atom resonance, in the
//! `e^{-iωt}` convention. Reflecting a pulse multiplies its spectrum by
//! `r(ω)`. Because this path shares nothing with the RK4 integrator in
//! [`crate::dynamics`] beyond the input samples, it serves as its oracle.

use crate::dynamics::ring_down_samples;
use crate::error::{Error, Result};
use crate::fourier;
use crate::model::{CavityParams, Envelope};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionSpectrum {
    pub frequencies: Vec<f64>,
    pub r: Vec<C64>,
}

/// Reflection amplitude at detuning `omega` with constant couplings `g_j` of
/// the atoms in `|1⟩`. An empty list is the bare cavity.
pub fn reflection_coefficient(omega: f64, couplings: &[f64], params: &CavityParams) -> C64 {
    let kappa = params.kappa();
    let atom_denominator = C64::new(params.excited_amplitude_decay(), -omega);
    let g_sqr: f64 = couplings.iter().map(|g| g * g).sum();
    if g_sqr > 0.0 && atom_denominator.norm_sqr() == 0.0 {
        // lossless atoms exactly on resonance: the dressed cavity is infinitely
        // detuned and the photon reflects untouched
        return C64::new(1.0, 0.0);
    }
    let mut denominator = C64::new(0.5 * kappa, -omega);
    if g_sqr > 0.0 {
        denominator += g_sqr / atom_denominator;
    }
    C64::new(1.0, 0.0) - kappa / denominator
}

pub fn reflection_spectrum(
    frequencies: &[f64],
    couplings: &[f64],
    params: &CavityParams,
) -> ReflectionSpectrum {
    ReflectionSpectrum {
        frequencies: frequencies.to_vec(),
        r: frequencies
            .iter()
            .map(|&w| reflection_coefficient(w, couplings, params))
            .collect(),
    }
}

/// Reflects `input` by multiplying its zero-padded DFT with `r(ω)`.
///
/// The result covers the input window plus the ring-down tail, on the same
/// grid as [`crate::dynamics::simulate_component`].
pub fn reflect_pulse_spectral(
    input: &Envelope,
    couplings: &[f64],
    params: &CavityParams,
) -> Result<Envelope> {
    let dt = input.dt();
    let out_len = input.len() + ring_down_samples(dt, params);
    let len = fourier::padded_len(out_len);
    let mut spectrum = fourier::forward(input.samples(), len);
    check_aliasing(&spectrum)?;
    for (k, z) in spectrum.iter_mut().enumerate() {
        *z *= reflection_coefficient(fourier::detuning(k, len, dt), couplings, params);
    }
    let mut out = fourier::inverse(spectrum);
    out.truncate(out_len);
    Ok(Envelope::from_parts(dt, out))
}

/// Photon loss `Σ_k |F_in(ω_k)|² (1 − |r(ω_k)|²) / Σ_k |F_in(ω_k)|²` over the
/// padded DFT grid.
pub fn spectral_loss(input: &Envelope, couplings: &[f64], params: &CavityParams) -> Result<f64> {
    let len = fourier::padded_len(input.len());
    let spectrum = fourier::forward(input.samples(), len);
    check_aliasing(&spectrum)?;
    let (mut total, mut lost) = (0.0, 0.0);
    for (k, z) in spectrum.iter().enumerate() {
        let r = reflection_coefficient(fourier::detuning(k, len, input.dt()), couplings, params);
        total += z.norm_sqr();
        lost += z.norm_sqr() * (1.0 - r.norm_sqr());
    }
    Ok(lost / total)
}

/// RMS deviation of the transfer phase `arg(F_out(ω)/F_in(ω))` from
/// `reference`, weighted by the input power spectrum.
///
/// A component that only rescales or sign-flips the pulse scores zero; a
/// frequency-dependent phase (delay, dispersion) scores its bandwidth-weighted
/// spread.
pub fn transfer_phase_deviation(input: &Envelope, output: &Envelope, reference: f64) -> f64 {
    let len = fourier::padded_len(input.len().max(output.len()));
    let fin = fourier::forward(input.samples(), len);
    let fout = fourier::forward(output.samples(), len);
    let peak = fin.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let (mut weight, mut acc) = (0.0, 0.0);
    for (a, b) in fin.iter().zip(&fout) {
        let w = a.norm_sqr();
        // bins far below the pulse spectrum carry no phase information
        if w < 1e-12 * peak {
            continue;
        }
        let dphi = wrap_phase((b / a).arg() - reference);
        weight += w;
        acc += w * dphi * dphi;
    }
    if weight == 0.0 {
        0.0
    } else {
        (acc / weight).sqrt()
    }
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut x = phi.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

fn check_aliasing(spectrum: &[C64]) -> Result<()> {
    let upper = fourier::upper_band_fraction(spectrum);
    if upper > fourier::ALIAS_TOLERANCE {
        return Err(Error::Resolution(format!(
            "{upper:.2e} of the pulse spectrum lies near the Nyquist frequency; increase the sample count"
        )));
    }
    Ok(())
}
