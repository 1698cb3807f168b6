//! Physical parameters, sampled pulses and atomic-register bookkeeping.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::C64;

/// Largest supported register; a gate simulation visits up to `2^N` components.
pub const MAX_ATOMS: usize = 12;

/// Tolerance on the unit-norm invariants of [`Pulse`] and [`RegisterState`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Cavity field decay rate κ and spontaneous emission rate γ_s of `|e⟩`.
///
/// `gamma_s` is the population decay rate of the excited state, so the
/// excited-state amplitude decays at `gamma_s / 2`. With that convention the
/// cooperativity `n g² / (κ γ_s)` sets the on-resonance reflection amplitude
/// `(4C − 1)/(4C + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    kappa: f64,
    gamma_s: f64,
}

impl CavityParams {
    pub fn new(kappa: f64, gamma_s: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
        }
        if !(gamma_s.is_finite() && gamma_s >= 0.0) {
            return Err(Error::invalid(format!(
                "gamma_s must be non-negative, got {gamma_s}"
            )));
        }
        Ok(Self { kappa, gamma_s })
    }

    /// κ = 1 with the given γ_s (in units of κ).
    pub fn normalized(gamma_s: f64) -> Result<Self> {
        Self::new(1.0, gamma_s)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }

    /// Decay rate of the excited-state amplitude, `γ_s / 2`.
    pub fn excited_amplitude_decay(&self) -> f64 {
        0.5 * self.gamma_s
    }
}

impl Default for CavityParams {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            gamma_s: 1.0,
        }
    }
}

/// Complex amplitudes on the midpoint grid `t_j = (j + ½)·dt`, `j = 0..len`.
///
/// Unlike [`Pulse`] an envelope carries no normalization constraint; reflected
/// pulses, which lose norm and extend past the input window, are envelopes.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    dt: f64,
    samples: Vec<C64>,
}

impl Envelope {
    pub fn new(dt: f64, samples: Vec<C64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(format!("sample spacing must be positive, got {dt}")));
        }
        if samples.is_empty() {
            return Err(Error::invalid("envelope has no samples"));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("envelope contains non-finite samples"));
        }
        Ok(Self { dt, samples })
    }

    pub(crate) fn from_parts(dt: f64, samples: Vec<C64>) -> Self {
        Self { dt, samples }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<C64> {
        self.samples
    }

    /// End of the sampled window, `len · dt`.
    pub fn span(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    pub fn time(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |j| self.time(j))
    }

    /// `Σ |f_j|² dt`.
    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dt
    }

    /// `∫ self* · other dt`; samples beyond the shorter envelope count as zero.
    ///
    /// Panics if the grids differ in spacing.
    pub fn inner(&self, other: &Envelope) -> C64 {
        assert!(
            (self.dt - other.dt).abs() <= 1e-12 * self.dt,
            "envelopes live on different grids"
        );
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.dt
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Extends with zeros to `len` samples. No-op if already that long.
    pub fn zero_extended(&self, len: usize) -> Envelope {
        let mut samples = self.samples.clone();
        if samples.len() < len {
            samples.resize(len, C64::new(0.0, 0.0));
        }
        Envelope::from_parts(self.dt, samples)
    }

    pub fn scaled(&self, factor: C64) -> Envelope {
        Envelope::from_parts(self.dt, self.samples.iter().map(|z| z * factor).collect())
    }

    /// Pointwise sum on a common grid; the result has the longer length.
    pub fn add(&self, other: &Envelope) -> Envelope {
        let len = self.len().max(other.len());
        let mut out = self.zero_extended(len);
        for (a, b) in out.samples.iter_mut().zip(&other.samples) {
            *a += b;
        }
        out
    }
}

/// A single-photon wave packet: unit-norm sampled envelope on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    envelope: Envelope,
}

impl Pulse {
    /// Builds a pulse of the given duration from `M ≥ 2` midpoint samples and
    /// rescales it to unit norm.
    pub fn new(duration: f64, samples: Vec<C64>) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::invalid(format!("duration must be positive, got {duration}")));
        }
        if samples.len() < 2 {
            return Err(Error::invalid(format!(
                "a pulse needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        let dt = duration / samples.len() as f64;
        let envelope = Envelope::new(dt, samples)?;
        let norm = envelope.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("pulse has zero norm"));
        }
        Ok(Self {
            envelope: envelope.scaled(C64::new(1.0 / norm, 0.0)),
        })
    }

    pub fn duration(&self) -> f64 {
        self.envelope.span()
    }

    pub fn dt(&self) -> f64 {
        self.envelope.dt()
    }

    pub fn len(&self) -> usize {
        self.envelope.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[C64] {
        self.envelope.samples()
    }

    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    pub fn max_abs(&self) -> f64 {
        self.envelope.max_abs()
    }

    /// Linear interpolation onto `m` midpoint samples over the same window,
    /// holding the end samples constant over the outer half-cells. The result
    /// is not renormalized.
    pub fn resample(&self, m: usize) -> Result<Envelope> {
        if m < 2 {
            return Err(Error::invalid(format!("cannot resample to {m} samples")));
        }
        let src = self.samples();
        let n = src.len();
        let dt_new = self.duration() / m as f64;
        let samples = (0..m)
            .map(|k| {
                // position in source sample units
                let x = (k as f64 + 0.5) * dt_new / self.dt() - 0.5;
                if x <= 0.0 {
                    src[0]
                } else if x >= (n - 1) as f64 {
                    src[n - 1]
                } else {
                    let i = x.floor() as usize;
                    let w = x - i as f64;
                    src[i] * (1.0 - w) + src[i + 1] * w
                }
            })
            .collect();
        Ok(Envelope::from_parts(dt_new, samples))
    }
}

/// Gaussian single-photon pulse `f(t) ∝ exp[−(t − T/2)² / (T/5)²]`, truncated
/// to `[0, T]` and normalized there.
pub fn gaussian_pulse(duration: f64, samples: usize) -> Result<Pulse> {
    const MIN_SAMPLES: usize = 16;
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::invalid(format!("duration must be positive, got {duration}")));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "gaussian pulse needs at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let dt = duration / samples as f64;
    let center = 0.5 * duration;
    let width = duration / 5.0;
    let amps = (0..samples)
        .map(|j| {
            let x = ((j as f64 + 0.5) * dt - center) / width;
            C64::new((-x * x).exp(), 0.0)
        })
        .collect();
    Pulse::new(duration, amps)
}

/// Time dependence of one atom's coupling rate to the cavity mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CouplingProfile {
    Constant { g: f64 },
    /// `g(t) = g0 · (1 + depth · sin(ν t + φ))`, e.g. from axial motion in the trap.
    Sinusoidal { g0: f64, depth: f64, nu: f64, phi: f64 },
}

impl CouplingProfile {
    pub fn constant(g: f64) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::invalid(format!("coupling rate must be non-negative, got {g}")));
        }
        Ok(CouplingProfile::Constant { g })
    }

    pub fn sinusoidal(g0: f64, depth: f64, nu: f64, phi: f64) -> Result<Self> {
        if !(g0.is_finite() && g0 >= 0.0) {
            return Err(Error::invalid(format!("coupling rate must be non-negative, got {g0}")));
        }
        if !(depth.is_finite() && depth.abs() <= 1.0) {
            return Err(Error::invalid(format!(
                "modulation depth must satisfy |depth| <= 1, got {depth}"
            )));
        }
        if !(nu.is_finite() && phi.is_finite()) {
            return Err(Error::invalid("modulation frequency and phase must be finite"));
        }
        Ok(CouplingProfile::Sinusoidal { g0, depth, nu, phi })
    }

    pub fn at(&self, t: f64) -> f64 {
        match *self {
            CouplingProfile::Constant { g } => g,
            CouplingProfile::Sinusoidal { g0, depth, nu, phi } => {
                g0 * (1.0 + depth * (nu * t + phi).sin())
            }
        }
    }

    /// Upper bound of `g(t)` over all t.
    pub fn max_rate(&self) -> f64 {
        match *self {
            CouplingProfile::Constant { g } => g,
            CouplingProfile::Sinusoidal { g0, depth, .. } => g0 * (1.0 + depth.abs()),
        }
    }

    /// The rate when it does not depend on time.
    pub fn constant_rate(&self) -> Option<f64> {
        match *self {
            CouplingProfile::Constant { g } => Some(g),
            CouplingProfile::Sinusoidal { g0, depth, .. } => (depth == 0.0).then_some(g0),
        }
    }
}

pub fn eval_coupling(profile: &CouplingProfile, t: f64) -> f64 {
    profile.at(t)
}

/// One computational basis string of an `N`-atom register.
///
/// Atom `i` is the `i`-th character of the string form (`"01"` has atom 0 in
/// `|0⟩` and atom 1 in `|1⟩`) and the string read as a binary number is the
/// component's index into [`RegisterState::amplitudes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicComponent {
    n_atoms: u8,
    bits: u16,
}

impl AtomicComponent {
    pub fn new(n_atoms: usize, index: usize) -> Result<Self> {
        check_atom_count(n_atoms)?;
        if index >= 1 << n_atoms {
            return Err(Error::invalid(format!(
                "index {index} out of range for {n_atoms} atoms"
            )));
        }
        Ok(Self {
            n_atoms: n_atoms as u8,
            bits: index as u16,
        })
    }

    pub fn all_zero(n_atoms: usize) -> Result<Self> {
        Self::new(n_atoms, 0)
    }

    /// Every component of an `n_atoms` register in index order.
    pub fn all(n_atoms: usize) -> Result<Vec<Self>> {
        check_atom_count(n_atoms)?;
        Ok((0..1usize << n_atoms)
            .map(|k| Self {
                n_atoms: n_atoms as u8,
                bits: k as u16,
            })
            .collect())
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms as usize
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn bit(&self, atom: usize) -> bool {
        assert!(atom < self.n_atoms(), "atom {atom} out of range");
        (self.bits >> (self.n_atoms() - 1 - atom)) & 1 == 1
    }

    /// Atoms in `|1⟩`, which couple to the cavity.
    pub fn coupled_set(&self) -> Vec<usize> {
        (0..self.n_atoms()).filter(|&i| self.bit(i)).collect()
    }

    pub fn popcount(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_all_zero(&self) -> bool {
        self.bits == 0
    }
}

impl fmt::Display for AtomicComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n_atoms() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for AtomicComponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s.len();
        check_atom_count(n)?;
        let mut index = 0usize;
        for ch in s.chars() {
            index = (index << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(Error::invalid(format!("invalid bit {other:?} in {s:?}")))
                    }
                };
        }
        Self::new(n, index)
    }
}

fn check_atom_count(n_atoms: usize) -> Result<()> {
    if (1..=MAX_ATOMS).contains(&n_atoms) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "atom count must be in 1..={MAX_ATOMS}, got {n_atoms}"
        )))
    }
}

/// Normalized pure state of the `N`-atom qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState {
    n_atoms: usize,
    amplitudes: Vec<C64>,
}

impl RegisterState {
    pub fn new(n_atoms: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_atom_count(n_atoms)?;
        if amplitudes.len() != 1 << n_atoms {
            return Err(Error::invalid(format!(
                "{} amplitudes given for {n_atoms} atoms",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("register norm is {norm}, expected 1")));
        }
        Ok(Self {
            n_atoms,
            amplitudes,
        })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(n_atoms: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("register amplitudes have zero norm"));
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Self::new(n_atoms, amplitudes)
    }

    /// The basis state of one component.
    pub fn basis(component: AtomicComponent) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << component.n_atoms()];
        amplitudes[component.index()] = C64::new(1.0, 0.0);
        Self {
            n_atoms: component.n_atoms(),
            amplitudes,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, component: AtomicComponent) -> C64 {
        self.amplitudes[component.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &RegisterState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Components with non-zero amplitude, with their amplitudes.
    pub fn support(&self) -> impl Iterator<Item = (AtomicComponent, C64)> + '_ {
        let n = self.n_atoms as u8;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(move |(k, &c)| {
                (
                    AtomicComponent {
                        n_atoms: n,
                        bits: k as u16,
                    },
                    c,
                )
            })
    }

    pub(crate) fn from_parts(n_atoms: usize, amplitudes: Vec<C64>) -> Self {
        Self {
            n_atoms,
            amplitudes,
        }
    }
}

/// `[(|0⟩ + |1⟩)/√2]^⊗N`.
pub fn uniform_register(n_atoms: usize) -> Result<RegisterState> {
    check_atom_count(n_atoms)?;
    let dim = 1usize << n_atoms;
    let amp = C64::new((dim as f64).sqrt().recip(), 0.0);
    Ok(RegisterState {
        n_atoms,
        amplitudes: vec![amp; dim],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_peak_ratio_matches_truncation_depth() {
        let pulse = gaussian_pulse(210.0, 4096).unwrap();
        let s = pulse.samples();
        // t = T/2 falls between samples 2047 and 2048; compare the analytic ratio
        // at the sampled times instead of at the exact endpoints.
        let dt = pulse.dt();
        let width = 210.0 / 5.0;
        let t0 = 0.5 * dt;
        let tm = 2047.5 * dt;
        let expected = (((t0 - 105.0) / width).powi(2) - ((tm - 105.0) / width).powi(2)).exp();
        let ratio = s[2047].re / s[0].re;
        assert!((ratio / expected - 1.0).abs() < 1e-12);
        // ≈ e^{6.25} up to the half-sample offset of the grid
        assert!((ratio.ln() - 6.25).abs() < 1e-2);
        let peak = s.iter().map(|z| z.re).fold(0.0, f64::max);
        assert_eq!(peak, s[2047].re);
        assert!(s.iter().all(|z| z.re > 0.0 && z.im == 0.0));
    }

    #[test]
    fn gaussian_is_normalized_and_symmetric() {
        let p = gaussian_pulse(1.0, 16).unwrap();
        assert!((p.envelope().norm_sqr() - 1.0).abs() < NORM_TOLERANCE);

        let p = gaussian_pulse(100.0, 4096).unwrap();
        assert!((p.envelope().norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
        let s = p.samples();
        for j in 0..s.len() {
            assert!((s[j] - s[s.len() - 1 - j]).norm() < 1e-15);
        }
    }

    #[test]
    fn gaussian_rejects_bad_arguments() {
        assert!(matches!(gaussian_pulse(0.0, 64), Err(Error::InvalidArgument(_))));
        assert!(matches!(gaussian_pulse(-1.0, 64), Err(Error::InvalidArgument(_))));
        assert!(matches!(gaussian_pulse(10.0, 15), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn pulse_requires_two_samples() {
        assert!(Pulse::new(1.0, vec![C64::new(1.0, 0.0)]).is_err());
        assert!(Pulse::new(1.0, vec![C64::new(0.0, 0.0); 4]).is_err());
        let p = Pulse::new(2.0, vec![C64::new(3.0, 0.0); 2]).unwrap();
        assert!((p.envelope().norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn resampling_preserves_norm() {
        let p = gaussian_pulse(210.0, 4096).unwrap();
        for m in [4096, 5000, 8192, 12289] {
            let r = p.resample(m).unwrap();
            assert!((r.norm_sqr() - 1.0).abs() < 1e-6, "m = {m}: {}", r.norm_sqr());
        }
    }

    #[test]
    fn uniform_register_amplitudes() {
        let r = uniform_register(1).unwrap();
        assert!(r
            .amplitudes()
            .iter()
            .all(|c| (c.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15));
        let r = uniform_register(2).unwrap();
        assert!(r.amplitudes().iter().all(|c| *c == C64::new(0.5, 0.0)));
        let r = uniform_register(4).unwrap();
        assert_eq!(r.amplitudes().len(), 16);
        assert!(r.amplitudes().iter().all(|c| *c == C64::new(0.25, 0.0)));
        assert!((r.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
        assert!(uniform_register(0).is_err());
        assert!(uniform_register(13).is_err());
    }

    #[test]
    fn coupling_profiles() {
        let c = CouplingProfile::constant(3.0).unwrap();
        assert_eq!(eval_coupling(&c, 0.0), 3.0);
        assert_eq!(eval_coupling(&c, 123.4), 3.0);

        let s = CouplingProfile::sinusoidal(3.0, 1.0 / 3.0, 1.0 / 6.0, 0.0).unwrap();
        assert!((eval_coupling(&s, 0.0) - 3.0).abs() < 1e-15);
        let t_max = 3.0 * std::f64::consts::PI;
        assert!((eval_coupling(&s, t_max) - 4.0).abs() < 1e-12);
        let t_min = 9.0 * std::f64::consts::PI;
        assert!((eval_coupling(&s, t_min) - 2.0).abs() < 1e-12);
        assert!((s.max_rate() - 4.0).abs() < 1e-15);
        assert_eq!(s.constant_rate(), None);

        assert!(CouplingProfile::sinusoidal(3.0, 1.5, 1.0, 0.0).is_err());
        assert!(CouplingProfile::constant(-1.0).is_err());
    }

    #[test]
    fn component_strings_and_coupled_sets() {
        let c: AtomicComponent = "0110".parse().unwrap();
        assert_eq!(c.index(), 6);
        assert_eq!(c.coupled_set(), vec![1, 2]);
        assert_eq!(c.popcount(), 2);
        assert_eq!(c.to_string(), "0110");
        assert!(AtomicComponent::all_zero(3).unwrap().is_all_zero());
        assert!("012".parse::<AtomicComponent>().is_err());
        assert!("".parse::<AtomicComponent>().is_err());
        assert!(AtomicComponent::new(2, 4).is_err());
        let all = AtomicComponent::all(3).unwrap();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|c| c.coupled_set().len() == c.popcount()));
    }

    #[test]
    fn register_validation() {
        assert!(RegisterState::new(1, vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(RegisterState::new(1, vec![C64::new(1.0, 0.0)]).is_err());
        let r = RegisterState::normalized(1, vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        assert!((r.norm_sqr() - 1.0).abs() < NORM_TOLERANCE);
    }

    #[test]
    fn cavity_params_validation() {
        assert!(CavityParams::new(0.0, 1.0).is_err());
        assert!(CavityParams::new(1.0, -0.1).is_err());
        let p = CavityParams::new(2.0, 1.0).unwrap();
        assert_eq!(p.excited_amplitude_decay(), 0.5);
    }
}
