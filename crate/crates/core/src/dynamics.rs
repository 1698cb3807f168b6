//! Time-domain scattering of a single photon off the cavity.
//!
//! In the single-excitation sector with coupled atoms `S` the amplitudes obey
//!
//! ```text
//! dc/dt   = −(κ/2) c − i Σ_{j∈S} g_j(t) e_j − √κ f_in(t)
//! de_j/dt = −(γ_s/2) e_j − i g_j(t) c
//! f_out   = f_in + √κ c
//! ```
//!
//! where `c` is the cavity photon amplitude and `e_j` the amplitude of atom
//! `j` being excited. These are integrated with classical RK4, four substeps
//! per pulse sample. The input between samples is the band-limited
//! interpolant of the samples. Integration starts [`RING_DOWN_WINDOW`] before
//! the pulse and runs the same window past its end so the cavity and atoms
//! can empty.

use crate::error::{Error, Result};
use crate::fourier;
use crate::model::{AtomicComponent, CavityParams, CouplingProfile, Envelope, Pulse};
use crate::C64;

/// Ring-down window appended after the pulse, in units of 1/κ.
pub const RING_DOWN_WINDOW: f64 = 10.0;

/// RK4 substeps per pulse sample.
pub const SUBSTEPS: usize = 4;

/// Upper bound on `h · max(κ, g_max, γ_s)` for the RK4 step `h`.
pub const MAX_STEP_RATE: f64 = 0.1;

/// Largest norm allowed to remain in the cavity and atoms after ring-down.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Samples covering [`RING_DOWN_WINDOW`] on a grid of spacing `dt`.
pub fn ring_down_samples(dt: f64, params: &CavityParams) -> usize {
    (RING_DOWN_WINDOW / (params.kappa() * dt)).ceil() as usize
}

/// Cavity and excited-state amplitudes of one atomic component.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComponentAmplitudes {
    /// Cavity photon amplitude.
    pub c: C64,
    /// One entry per coupled atom, in coupled-set order.
    pub e: Vec<C64>,
}

impl ComponentAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.c.norm_sqr() + self.e.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }
}

/// A sampled input field prepared for integration: the samples on the output
/// grid plus the band-limited interpolant at every RK4 stage time.
#[derive(Debug, Clone)]
pub struct InputDrive {
    input: Envelope,
    pre_roll: usize,
    fine: Vec<C64>,
}

impl InputDrive {
    /// Prepares `input` for reflection off a cavity with decay rate
    /// `params.kappa()`; the output grid is the input grid plus the ring-down
    /// tail.
    pub fn new(input: &Envelope, params: &CavityParams) -> Result<Self> {
        let dt = input.dt();
        let window = ring_down_samples(dt, params);
        let out_len = input.len() + window;
        let pre_roll = window;
        let len = fourier::padded_len(pre_roll + out_len);
        let spectrum = fourier::forward(input.samples(), len);
        let upper = fourier::upper_band_fraction(&spectrum);
        if upper > fourier::ALIAS_TOLERANCE {
            return Err(Error::Resolution(format!(
                "{upper:.2e} of the input spectrum lies near the Nyquist frequency; increase the sample count"
            )));
        }
        let factor = 2 * SUBSTEPS;
        let up = fourier::upsample(&spectrum, factor);
        let period = up.len() as isize;
        let steps = total_steps(pre_roll, out_len);
        let shift = (pre_roll * factor + factor / 2) as isize;
        let fine = (0..=2 * steps + 2)
            .map(|k| up[(k as isize - shift).rem_euclid(period) as usize])
            .collect();
        Ok(Self {
            input: input.zero_extended(out_len),
            pre_roll,
            fine,
        })
    }

    /// Input samples extended with zeros over the ring-down tail.
    pub fn input(&self) -> &Envelope {
        &self.input
    }

    pub fn dt(&self) -> f64 {
        self.input.dt()
    }

    pub fn out_len(&self) -> usize {
        self.input.len()
    }

    fn start_time(&self) -> f64 {
        -(self.pre_roll as f64) * self.dt()
    }
}

/// Steps from the start of the pre-roll to the last output sample.
fn total_steps(pre_roll: usize, out_len: usize) -> usize {
    (pre_roll + out_len - 1) * SUBSTEPS + SUBSTEPS / 2
}

/// Outcome of reflecting an arbitrary envelope off the cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflection {
    /// Reflected field on the input grid extended by the ring-down tail.
    pub output: Envelope,
    /// Norm removed by spontaneous emission, `γ_s ∫ Σ|e_j|² dt`.
    pub emitted: f64,
    /// Amplitudes left at the end of the tail.
    pub remaining: ComponentAmplitudes,
}

/// Reflects a prepared input off the cavity with the given atoms coupled.
///
/// `couplings` lists only the atoms in `|1⟩`.
pub fn reflect(
    drive: &InputDrive,
    couplings: &[CouplingProfile],
    params: &CavityParams,
) -> Result<Reflection> {
    let dt = drive.dt();
    let h = dt / SUBSTEPS as f64;
    let g_max = couplings.iter().map(|p| p.max_rate()).fold(0.0, f64::max);
    let fastest = params.kappa().max(g_max).max(params.gamma_s());
    if h * fastest >= MAX_STEP_RATE {
        return Err(Error::Resolution(format!(
            "RK4 step {h:.3e} is too coarse for rate {fastest}: need step·rate < {MAX_STEP_RATE}"
        )));
    }

    let n = couplings.len();
    let system = Amplitudes {
        couplings,
        half_kappa: 0.5 * params.kappa(),
        sqrt_kappa: params.kappa().sqrt(),
        decay: params.excited_amplitude_decay(),
    };
    let mut rk = Rk4::new(n + 2);
    // [c, e_1..e_n, emitted norm]
    let mut y = vec![C64::new(0.0, 0.0); n + 2];

    let out_len = drive.out_len();
    let steps = total_steps(drive.pre_roll, out_len);
    let t0 = drive.start_time();
    let mut out = Vec::with_capacity(out_len);
    let mut next_capture = drive.pre_roll * SUBSTEPS + SUBSTEPS / 2;
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        let f = &drive.fine[2 * s..2 * s + 3];
        rk.step(&system, t, h, [f[0], f[1], f[2]], &mut y);
        if s + 1 == next_capture {
            let j = out.len();
            out.push(drive.input.samples()[j] + system.sqrt_kappa * y[0]);
            next_capture += SUBSTEPS;
        }
    }
    debug_assert_eq!(out.len(), out_len);

    Ok(Reflection {
        output: Envelope::from_parts(dt, out),
        emitted: y[n + 1].re,
        remaining: ComponentAmplitudes {
            c: y[0],
            e: y[1..=n].to_vec(),
        },
    })
}

/// Reflects an arbitrary envelope, e.g. a pulse already distorted by another
/// cavity.
pub fn reflect_envelope(
    input: &Envelope,
    couplings: &[CouplingProfile],
    params: &CavityParams,
) -> Result<Reflection> {
    reflect(&InputDrive::new(input, params)?, couplings, params)
}

/// Reflected pulse and its figures of merit for one atomic component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentResponse {
    pub component: AtomicComponent,
    /// Output envelope over `[0, T]` plus the ring-down tail.
    pub f_out: Envelope,
    /// `∫ f_in* f_out dt`.
    pub overlap: C64,
    /// `1 − ∫|f_out|² dt`.
    pub loss: f64,
    /// Norm carried off by spontaneous emission.
    pub emitted: f64,
    /// `|c|² + Σ|e_j|²` at the end of the tail.
    pub residual: f64,
    /// `∫|f_in|² dt` on the sample grid (1 for a [`Pulse`]).
    pub input_norm: f64,
}

impl ComponentResponse {
    pub fn output_norm(&self) -> f64 {
        self.f_out.norm_sqr()
    }

    /// Probability that the photon leaves through the cavity mirror.
    pub fn survival(&self) -> f64 {
        1.0 - self.loss
    }

    /// `input − output − emitted − residual`; zero up to discretization error.
    pub fn norm_defect(&self) -> f64 {
        self.input_norm - self.output_norm() - self.emitted - self.residual
    }

    /// Overlap with the input after normalizing the output photon.
    pub fn normalized_overlap(&self) -> C64 {
        let norm = self.output_norm();
        if norm > 0.0 {
            self.overlap / norm.sqrt()
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// `max_t |f_out(t) − O·f_in(t)| / max|f_in|`: distortion beyond a scalar
    /// rescaling of the input.
    pub fn shape_deviation(&self, input: &Envelope) -> f64 {
        let peak = input.max_abs();
        let inputs = input.samples().iter().chain(std::iter::repeat(&ZERO));
        self.f_out
            .samples()
            .iter()
            .zip(inputs)
            .map(|(out, inp)| (out - self.overlap * inp).norm())
            .fold(0.0, f64::max)
            / peak
    }
}

/// Scatters the pulse off the cavity with the register in `component`.
///
/// `profiles` has one entry per atom; only atoms in `|1⟩` couple.
pub fn simulate_component(
    pulse: &Pulse,
    component: AtomicComponent,
    profiles: &[CouplingProfile],
    params: &CavityParams,
) -> Result<ComponentResponse> {
    let drive = InputDrive::new(pulse.envelope(), params)?;
    simulate_component_with(&drive, component, profiles, params)
}

/// [`simulate_component`] with a drive shared across components.
pub fn simulate_component_with(
    drive: &InputDrive,
    component: AtomicComponent,
    profiles: &[CouplingProfile],
    params: &CavityParams,
) -> Result<ComponentResponse> {
    if profiles.len() != component.n_atoms() {
        return Err(Error::invalid(format!(
            "{} coupling profiles for a {}-atom component",
            profiles.len(),
            component.n_atoms()
        )));
    }
    let coupled: Vec<CouplingProfile> = component
        .coupled_set()
        .into_iter()
        .map(|i| profiles[i])
        .collect();
    let reflection = reflect(drive, &coupled, params)?;
    let residual = reflection.remaining.norm_sqr();
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::IncompleteDecay { residual });
    }
    let input = drive.input();
    let output = reflection.output;
    Ok(ComponentResponse {
        component,
        overlap: input.inner(&output),
        loss: 1.0 - output.norm_sqr(),
        emitted: reflection.emitted,
        residual,
        input_norm: input.norm_sqr(),
        f_out: output,
    })
}

struct Amplitudes<'a> {
    couplings: &'a [CouplingProfile],
    half_kappa: f64,
    sqrt_kappa: f64,
    decay: f64,
}

impl Amplitudes<'_> {
    fn derivative(&self, t: f64, drive: C64, y: &[C64], dy: &mut [C64]) {
        let n = self.couplings.len();
        let c = y[0];
        let mut coupling_sum = C64::new(0.0, 0.0);
        let mut excited = 0.0;
        for (j, profile) in self.couplings.iter().enumerate() {
            let g = profile.at(t);
            let e = y[j + 1];
            coupling_sum += g * e;
            excited += e.norm_sqr();
            dy[j + 1] = -self.decay * e - C64::new(0.0, g) * c;
        }
        dy[0] = -self.half_kappa * c - C64::new(0.0, 1.0) * coupling_sum - self.sqrt_kappa * drive;
        dy[n + 1] = C64::new(2.0 * self.decay * excited, 0.0);
    }
}

/// Classical fourth-order Runge–Kutta with preallocated stage buffers.
struct Rk4 {
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
}

impl Rk4 {
    fn new(dim: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); dim];
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    /// Advances `y` from `t` to `t + h`; `drive` holds the input at `t`,
    /// `t + h/2` and `t + h`.
    fn step(&mut self, system: &Amplitudes<'_>, t: f64, h: f64, drive: [C64; 3], y: &mut [C64]) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        system.derivative(t, drive[0], y, k1);
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        system.derivative(t + 0.5 * h, drive[1], tmp, k2);
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        system.derivative(t + 0.5 * h, drive[1], tmp, k3);
        for i in 0..y.len() {
            tmp[i] = y[i] + h * k3[i];
        }
        system.derivative(t + h, drive[2], tmp, k4);
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}
