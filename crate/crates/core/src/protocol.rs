//! Nonlocal controlled phase flip between atoms in two distant cavities.
//!
//! A photon in `(|H⟩ + |V⟩)/√2` is split at a polarizing beam splitter: `H`
//! reflects off cavity 1 and `V` off a plain mirror. A Hadamard-type wave plate
//! then rotates the polarization, and the same split is repeated at cavity 2.
//! A second wave plate and a polarizing beam splitter route the photon to
//! detector D1 (`H` port) or D2 (`V` port). A click in D2 triggers `σ_z` on
//! atom 1. With ideal cavities, where the photon picks up `−1` only off an
//! atom in `|0⟩`, both outcomes leave the atoms in `exp(iπ|00⟩⟨00|)|ψ⟩`.
//!
//! Register components are indexed `2·a1 + a2`, matching
//! [`RegisterState`] for two atoms.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use crate::dynamics::reflect_envelope;
use crate::error::{Error, Result};
use crate::gates::apply_nqubit_phase;
use crate::model::{AtomicComponent, CavityParams, CouplingProfile, Envelope, Pulse, RegisterState};
use crate::C64;

/// Tolerance for accepting a network as implementing the CPF gate.
pub const CPF_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    /// `H` port of the final beam splitter; heralds `(|V⟩ − |H⟩)/√2` before the last wave plate.
    D1,
    /// `V` port; heralds `(|V⟩ + |H⟩)/√2` and triggers `σ_z` on atom 1.
    D2,
}

impl Detector {
    fn port(self) -> Polarization {
        match self {
            Detector::D1 => Polarization::H,
            Detector::D2 => Polarization::V,
        }
    }
}

/// Narrowband reflection amplitudes of one atom–cavity unit for the atom in
/// `|0⟩` (`r0`) and `|1⟩` (`r1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityReflection {
    pub r0: C64,
    pub r1: C64,
}

impl CavityReflection {
    pub fn new(r0: C64, r1: C64) -> Result<Self> {
        for (name, r) in [("r0", r0), ("r1", r1)] {
            if !(r.re.is_finite() && r.im.is_finite()) || r.norm() > 1.0 + 1e-12 {
                return Err(Error::invalid(format!(
                    "{name} = {r} is not a passive reflection amplitude"
                )));
            }
        }
        Ok(Self { r0, r1 })
    }

    /// `r0 = −1`, `r1 = +1`.
    pub fn ideal() -> Self {
        Self {
            r0: C64::new(-1.0, 0.0),
            r1: C64::new(1.0, 0.0),
        }
    }

    fn for_atom(&self, excited_branch: bool) -> C64 {
        if excited_branch {
            self.r1
        } else {
            self.r0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSpec {
    pub cavity1: CavityReflection,
    pub cavity2: CavityReflection,
}

impl NetworkSpec {
    pub fn new(cavity1: CavityReflection, cavity2: CavityReflection) -> Result<Self> {
        let spec = Self { cavity1, cavity2 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ideal() -> Self {
        Self {
            cavity1: CavityReflection::ideal(),
            cavity2: CavityReflection::ideal(),
        }
    }

    fn validate(&self) -> Result<()> {
        CavityReflection::new(self.cavity1.r0, self.cavity1.r1)?;
        CavityReflection::new(self.cavity2.r0, self.cavity2.r1)?;
        Ok(())
    }
}

/// Joint state of two atoms and the photon polarization, index
/// `4·a1 + 2·a2 + pol` with `H = 0`, `V = 1`. Norm below one means the photon
/// was lost in some branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizedPhotonAtomState {
    pub amplitudes: [C64; 8],
}

impl PolarizedPhotonAtomState {
    pub fn index(atoms: usize, pol: Polarization) -> usize {
        2 * atoms
            + match pol {
                Polarization::H => 0,
                Polarization::V => 1,
            }
    }

    /// `|ψ⟩_atoms ⊗ (|H⟩ + |V⟩)/√2`.
    pub fn inject(initial: &RegisterState) -> Self {
        let mut amplitudes = [C64::new(0.0, 0.0); 8];
        for (a, c) in initial.amplitudes().iter().enumerate() {
            amplitudes[Self::index(a, Polarization::H)] = c * FRAC_1_SQRT_2;
            amplitudes[Self::index(a, Polarization::V)] = c * FRAC_1_SQRT_2;
        }
        Self { amplitudes }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn amplitude(&self, atoms: usize, pol: Polarization) -> C64 {
        self.amplitudes[Self::index(atoms, pol)]
    }

    /// Reflects the `H` part off the cavity holding atom `which` (0 or 1);
    /// the `V` part bounces off the mirror unchanged.
    pub fn reflect(&mut self, which: usize, cavity: &CavityReflection) {
        for atoms in 0..4 {
            let bit = if which == 0 { atoms >> 1 } else { atoms } & 1 == 1;
            self.amplitudes[Self::index(atoms, Polarization::H)] *= cavity.for_atom(bit);
        }
    }

    /// Wave plate: `|H⟩ → (|H⟩ + |V⟩)/√2`, `|V⟩ → (|V⟩ − |H⟩)/√2`.
    pub fn rotate_polarization(&mut self) {
        for atoms in 0..4 {
            let h = self.amplitude(atoms, Polarization::H);
            let v = self.amplitude(atoms, Polarization::V);
            let (h2, v2) = waveplate(h, v);
            self.amplitudes[Self::index(atoms, Polarization::H)] = h2;
            self.amplitudes[Self::index(atoms, Polarization::V)] = v2;
        }
    }
}

/// Wave-plate action on `(H, V)` amplitudes.
pub fn waveplate(h: C64, v: C64) -> (C64, C64) {
    ((h - v) * FRAC_1_SQRT_2, (h + v) * FRAC_1_SQRT_2)
}

/// The network up to, not including, the last wave plate and beam splitter.
pub fn network_state(initial: &RegisterState, spec: &NetworkSpec) -> Result<PolarizedPhotonAtomState> {
    check_two_atoms(initial)?;
    spec.validate()?;
    let mut s = PolarizedPhotonAtomState::inject(initial);
    s.reflect(0, &spec.cavity1);
    s.rotate_polarization();
    s.reflect(1, &spec.cavity2);
    Ok(s)
}

/// Unnormalized atom state after a click in `detector` and the feedback.
pub fn branch_amplitudes(
    initial: &RegisterState,
    spec: &NetworkSpec,
    detector: Detector,
) -> Result<[C64; 4]> {
    let mut s = network_state(initial, spec)?;
    s.rotate_polarization();
    let port = detector.port();
    let mut out = [C64::new(0.0, 0.0); 4];
    for (atoms, amp) in out.iter_mut().enumerate() {
        *amp = s.amplitude(atoms, port);
        if detector == Detector::D2 && atoms >> 1 == 1 {
            *amp = -*amp;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    /// Normalized two-atom state after feedback.
    pub state: RegisterState,
    pub detector: Detector,
    /// Probability of this detector clicking.
    pub probability: f64,
}

/// Runs the network and conditions on a click in `detector`.
pub fn run_protocol(
    initial: &RegisterState,
    spec: &NetworkSpec,
    detector: Detector,
) -> Result<ProtocolRun> {
    let amps = branch_amplitudes(initial, spec, detector)?;
    let probability: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if probability <= 0.0 {
        return Err(Error::NoDetection);
    }
    Ok(ProtocolRun {
        state: RegisterState::normalized(2, amps.to_vec())?,
        detector,
        probability,
    })
}

/// Runs the network with the detector chosen by its click probability.
/// Returns [`Error::NoDetection`] when the photon is lost.
pub fn sample_protocol<R: Rng + ?Sized>(
    initial: &RegisterState,
    spec: &NetworkSpec,
    rng: &mut R,
) -> Result<ProtocolRun> {
    let p1: f64 = branch_amplitudes(initial, spec, Detector::D1)?
        .iter()
        .map(|z| z.norm_sqr())
        .sum();
    let x: f64 = rng.random();
    if x < p1 {
        run_protocol(initial, spec, Detector::D1)
    } else {
        let p2: f64 = branch_amplitudes(initial, spec, Detector::D2)?
            .iter()
            .map(|z| z.norm_sqr())
            .sum();
        if x < p1 + p2 {
            run_protocol(initial, spec, Detector::D2)
        } else {
            Err(Error::NoDetection)
        }
    }
}

/// Probability that either detector clicks.
pub fn success_probability(initial: &RegisterState, spec: &NetworkSpec) -> Result<f64> {
    let mut total = 0.0;
    for d in [Detector::D1, Detector::D2] {
        total += branch_amplitudes(initial, spec, d)?
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>();
    }
    Ok(total)
}

/// `|⟨U₁₂ ψ|φ⟩|²` for the state `φ` a run left behind.
pub fn cpf_fidelity(initial: &RegisterState, run: &ProtocolRun) -> Result<f64> {
    let target = apply_nqubit_phase(initial, AtomicComponent::all_zero(2)?)?;
    Ok(target.inner(&run.state).norm_sqr())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpfCheck {
    pub is_cpf: bool,
    /// Largest `‖√2·K_d ψ − e^{iφ_d} U₁₂ ψ‖` over probes and outcomes, where `K_d`
    /// is the outcome's (unnormalized) map and `φ_d` its best-fit global phase.
    pub max_deviation: f64,
    /// `(P(D1), P(D2))` for each probe.
    pub branch_probabilities: Vec<(f64, f64)>,
}

/// Basis states plus two superpositions used to test the induced map.
pub fn cpf_probes() -> Vec<RegisterState> {
    let mut probes: Vec<RegisterState> = AtomicComponent::all(2)
        .expect("two atoms")
        .into_iter()
        .map(RegisterState::basis)
        .collect();
    probes.push(crate::model::uniform_register(2).expect("two atoms"));
    probes.push(
        RegisterState::normalized(
            2,
            vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 1.0),
            ],
        )
        .expect("non-zero"),
    );
    probes
}

/// Checks whether the network, with feedback, applies `exp(iπ|00⟩⟨00|)` for
/// both detector outcomes.
pub fn verify_cpf_equivalence(spec: &NetworkSpec) -> Result<CpfCheck> {
    spec.validate()?;
    let zero = AtomicComponent::all_zero(2)?;
    let probes = cpf_probes();
    let mut max_deviation: f64 = 0.0;
    for detector in [Detector::D1, Detector::D2] {
        // best-fit phase from tr(U† K)
        let mut trace = C64::new(0.0, 0.0);
        for k in AtomicComponent::all(2)? {
            let column = branch_amplitudes(&RegisterState::basis(k), spec, detector)?;
            let u = if k.is_all_zero() { -1.0 } else { 1.0 };
            trace += u * column[k.index()];
        }
        let phase = if trace.norm() > 0.0 {
            trace / trace.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for probe in &probes {
            let ideal = apply_nqubit_phase(probe, zero)?;
            let got: Vec<C64> = match run_protocol(probe, spec, detector) {
                Ok(run) => {
                    let scale = (2.0 * run.probability).sqrt();
                    run.state.amplitudes().iter().map(|z| z * scale).collect()
                }
                Err(Error::NoDetection) => vec![C64::new(0.0, 0.0); 4],
                Err(e) => return Err(e),
            };
            let dev = got
                .iter()
                .zip(ideal.amplitudes())
                .map(|(g, u)| (g - phase * u).norm_sqr())
                .sum::<f64>()
                .sqrt();
            max_deviation = max_deviation.max(dev);
        }
    }
    let branch_probabilities = probes
        .iter()
        .map(|probe| {
            let p = |d| -> Result<f64> {
                Ok(branch_amplitudes(probe, spec, d)?
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum())
            };
            Ok((p(Detector::D1)?, p(Detector::D2)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CpfCheck {
        is_cpf: max_deviation < CPF_TOLERANCE,
        max_deviation,
        branch_probabilities,
    })
}

/// One atom–cavity unit simulated in the time domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsedCavity {
    pub coupling: CouplingProfile,
    pub params: CavityParams,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsedNetwork {
    pub cavity1: PulsedCavity,
    pub cavity2: PulsedCavity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulsedRun {
    pub detector: Detector,
    pub probability: f64,
    /// `⟨U₁₂ψ|ρ|U₁₂ψ⟩` for the heralded atom state `ρ`, with the photon's
    /// temporal mode traced out.
    pub fidelity: f64,
}

/// [`run_protocol`] with each reflection resolved in time, so pulse
/// distortion and leftover atom–photon entanglement show up in the fidelity.
pub fn run_protocol_pulsed(
    initial: &RegisterState,
    network: &PulsedNetwork,
    pulse: &Pulse,
    detector: Detector,
) -> Result<PulsedRun> {
    check_two_atoms(initial)?;
    let zero_env = |len: usize, dt: f64| Envelope::new(dt, vec![C64::new(0.0, 0.0); len]);
    let bounce = |env: &Envelope, cavity: &PulsedCavity, coupled: bool| -> Result<Envelope> {
        let couplings: &[CouplingProfile] = if coupled {
            std::slice::from_ref(&cavity.coupling)
        } else {
            &[]
        };
        Ok(reflect_envelope(env, couplings, &cavity.params)?.output)
    };

    let f_in = pulse.envelope();
    let half = C64::new(FRAC_1_SQRT_2, 0.0);
    let mut h_branch = Vec::with_capacity(4);
    let mut v_branch = Vec::with_capacity(4);
    for atoms in 0..4 {
        let c = initial.amplitudes()[atoms];
        let a1 = atoms >> 1 == 1;
        let h = bounce(f_in, &network.cavity1, a1)?.scaled(c * half);
        let v = f_in.scaled(c * half).zero_extended(h.len());
        let (h, v) = waveplate_envelopes(&h, &v);
        let a2 = atoms & 1 == 1;
        let h = bounce(&h, &network.cavity2, a2)?;
        let v = v.zero_extended(h.len());
        let (h, v) = waveplate_envelopes(&h, &v);
        h_branch.push(h);
        v_branch.push(v);
    }
    let mut heralded = match detector {
        Detector::D1 => h_branch,
        Detector::D2 => v_branch,
    };
    if detector == Detector::D2 {
        for env in heralded.iter_mut().skip(2) {
            *env = env.scaled(C64::new(-1.0, 0.0));
        }
    }

    let probability: f64 = heralded.iter().map(Envelope::norm_sqr).sum();
    if probability <= 0.0 {
        return Err(Error::NoDetection);
    }
    let target = apply_nqubit_phase(initial, AtomicComponent::all_zero(2)?)?;
    let len = heralded.iter().map(Envelope::len).max().unwrap_or(0);
    let dt = f_in.dt();
    let mut projected = zero_env(len, dt)?;
    for (atoms, env) in heralded.iter().enumerate() {
        projected = projected.add(&env.scaled(target.amplitudes()[atoms].conj()));
    }
    Ok(PulsedRun {
        detector,
        probability,
        fidelity: projected.norm_sqr() / probability,
    })
}

fn waveplate_envelopes(h: &Envelope, v: &Envelope) -> (Envelope, Envelope) {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let minus_v = v.scaled(C64::new(-1.0, 0.0));
    (h.add(&minus_v).scaled(s), h.add(v).scaled(s))
}

fn check_two_atoms(initial: &RegisterState) -> Result<()> {
    if initial.n_atoms() != 2 {
        return Err(Error::invalid(format!(
            "the nonlocal gate acts on 2 atoms, got {}",
            initial.n_atoms()
        )));
    }
    Ok(())
}
