//! One function per experiment, each returning a [`Table`].

use std::f64::consts::TAU;

use cqed_gates::gates::{empirical_loss, scale_success, simulated_loss, PhotonSource};
use cqed_gates::protocol::{
    cpf_fidelity, run_protocol, run_protocol_pulsed, verify_cpf_equivalence, CavityReflection, Detector,
    NetworkSpec, PulsedCavity, PulsedNetwork,
};
use cqed_gates::spectral::reflection_coefficient;
use cqed_gates::{
    gaussian_pulse, simulate_gate, uniform_register, AtomicComponent, CavityParams, CouplingProfile,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Experiment, ExperimentConfig};
use crate::{Cell, CliError, Table};

/// Shorter of the two pulse durations compared in fig3b.
pub const SHORT_DURATION: f64 = 100.0;

pub fn run(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    match cfg.experiment {
        Experiment::Fig3a => fig3a(cfg),
        Experiment::Fig3b => fig3b(cfg),
        Experiment::Fig3c => fig3c(cfg),
        Experiment::Fig3d => fig3d(cfg),
        Experiment::Reflectance => reflectance(cfg),
        Experiment::Protocol => protocol(cfg),
    }
}

fn params(cfg: &ExperimentConfig) -> Result<CavityParams, CliError> {
    Ok(CavityParams::new(1.0, cfg.gamma_s)?)
}

fn duration(cfg: &ExperimentConfig) -> f64 {
    cfg.duration.expect("pulse experiments resolve T")
}

fn atoms(cfg: &ExperimentConfig) -> usize {
    cfg.n_atoms.expect("single-size experiments resolve N")
}

fn constant_profiles(n: usize, g: f64) -> Result<Vec<CouplingProfile>, CliError> {
    Ok(vec![CouplingProfile::constant(g)?; n])
}

/// Shape functions of the reflected photon for every component of the
/// uniform register. Each output is normalized to unit norm, so the columns
/// show the detected photon's shape and not the loss.
pub fn fig3a(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let n = atoms(cfg);
    let pulse = gaussian_pulse(duration(cfg), cfg.samples)?;
    let result = simulate_gate(
        &uniform_register(n)?,
        &pulse,
        &constant_profiles(n, cfg.g)?,
        &params(cfg)?,
    )?;
    let components = AtomicComponent::all(n)?;
    let zero = AtomicComponent::all_zero(n)?;

    let mut headers = vec!["t".to_string(), "|f_in|".to_string()];
    headers.extend(components.iter().map(|k| format!("|f_out_{k}|")));
    headers.push(format!("arg(f_out_{zero})"));
    let mut table = Table::new(headers);

    let scale: Vec<f64> = components
        .iter()
        .map(|k| 1.0 / result.per_component[k].output_norm().sqrt())
        .collect();
    let out_00 = &result.per_component[&zero].f_out;
    for j in 0..out_00.len() {
        let mut row: Vec<Cell> = vec![
            out_00.time(j).into(),
            pulse.samples().get(j).map_or(0.0, |z| z.norm()).into(),
        ];
        for (k, s) in components.iter().zip(&scale) {
            row.push((s * result.per_component[k].f_out.samples()[j].norm()).into());
        }
        row.push(out_00.samples()[j].arg().into());
        table.push(row);
    }
    Ok(table)
}

/// Gate fidelity against atom number for a short and a long pulse.
pub fn fig3b(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let long = duration(cfg);
    let mut table = Table::new(vec![
        "N".into(),
        format!("F(T={SHORT_DURATION})"),
        format!("F(T={long})"),
    ]);
    let p = params(cfg)?;
    let short_pulse = gaussian_pulse(SHORT_DURATION, cfg.samples)?;
    let long_pulse = gaussian_pulse(long, cfg.samples)?;
    for n in cfg.atom_numbers() {
        let register = uniform_register(n)?;
        let profiles = constant_profiles(n, cfg.g)?;
        let short = simulate_gate(&register, &short_pulse, &profiles, &p)?.fidelity;
        let long = simulate_gate(&register, &long_pulse, &profiles, &p)?.fidelity;
        table.push(vec![(n as f64).into(), short.into(), long.into()]);
    }
    Ok(table)
}

/// Simulated photon loss against coupling rate, beside the empirical formula.
pub fn fig3c(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let ns = cfg.atom_numbers();
    let mut headers = vec!["g".to_string()];
    for n in &ns {
        headers.push(format!("P_sim(N={n})"));
        headers.push(format!("P_emp(N={n})"));
    }
    let mut table = Table::new(headers);
    let p = params(cfg)?;
    let pulse = gaussian_pulse(duration(cfg), cfg.samples)?;
    for g in cfg.coupling_grid() {
        let mut row: Vec<Cell> = vec![g.into()];
        for &n in &ns {
            row.push(simulated_loss(n, &pulse, &constant_profiles(n, g)?, &p)?.into());
            row.push(empirical_loss(n, g, &p)?.into());
        }
        table.push(row);
    }
    Ok(table)
}

/// Modulation phases for each draw, one per atom, from `seed`.
pub fn modulation_phases(seed: u64, draws: usize, n_atoms: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..draws)
        .map(|_| (0..n_atoms).map(|_| rng.random::<f64>() * TAU).collect())
        .collect()
}

/// Loss with `g_i(t) = g0 (1 + depth · sin(ν t + φ_i))` against constant `g0`.
/// The same phase draws are reused at every `g0`.
pub fn fig3d(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let n = atoms(cfg);
    let depth = cfg.depth.expect("fig3d resolves depth");
    let nu = cfg.nu.expect("fig3d resolves nu");
    let phases = modulation_phases(
        cfg.seed.expect("fig3d resolves seed"),
        cfg.n_seeds.expect("fig3d resolves n-seeds"),
        n,
    );
    let p = params(cfg)?;
    let pulse = gaussian_pulse(duration(cfg), cfg.samples)?;
    let mut table = Table::new(vec!["g0".into(), "P_sim_constant".into(), "P_sim_modulated".into()]);
    for g0 in cfg.coupling_grid() {
        let constant = simulated_loss(n, &pulse, &constant_profiles(n, g0)?, &p)?;
        let mut total = 0.0;
        for draw in &phases {
            let profiles = draw
                .iter()
                .map(|&phi| CouplingProfile::sinusoidal(g0, depth, nu, phi))
                .collect::<Result<Vec<_>, _>>()?;
            total += simulated_loss(n, &pulse, &profiles, &p)?;
        }
        table.push(vec![g0.into(), constant.into(), (total / phases.len() as f64).into()]);
    }
    Ok(table)
}

/// Narrowband reflection coefficient with `0..=N` atoms coupled.
pub fn reflectance(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let n = atoms(cfg);
    let p = params(cfg)?;
    let mut headers = vec!["omega".to_string()];
    for k in 0..=n {
        headers.push(format!("|r|(n={k})"));
        headers.push(format!("arg_r(n={k})"));
    }
    let mut table = Table::new(headers);
    let span = (2.0 * cfg.g * (n as f64).sqrt()).max(5.0);
    let points = cfg.samples;
    for j in 0..points {
        let omega = -span + 2.0 * span * j as f64 / (points - 1) as f64;
        let mut row: Vec<Cell> = vec![omega.into()];
        for k in 0..=n {
            let r = reflection_coefficient(omega, &vec![cfg.g; k], &p);
            row.push(r.norm().into());
            row.push(r.arg().into());
        }
        table.push(row);
    }
    Ok(table)
}

/// The two-cavity gate on the uniform two-atom state: ideal mirrors, the
/// narrowband reflection amplitudes of the configured cavity, and the same
/// cavity with the configured pulse resolved in time.
pub fn protocol(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let p = params(cfg)?;
    let eta = cfg.eta.expect("protocol resolves eta");
    let alpha_sq = cfg.alpha_sq.expect("protocol resolves alpha-sq");
    let source = PhotonSource::WeakCoherent {
        mean_photon_number: alpha_sq,
    };
    let register = uniform_register(2)?;
    let mut table = Table::new(
        [
            "network",
            "detector",
            "probability",
            "heralded_probability",
            "fidelity",
            "cpf_deviation",
        ]
        .map(String::from)
        .to_vec(),
    );

    let cavity = CavityReflection::new(
        reflection_coefficient(0.0, &[], &p),
        reflection_coefficient(0.0, &[cfg.g], &p),
    )?;
    let scalar = [
        ("ideal", NetworkSpec::ideal()),
        ("narrowband", NetworkSpec::new(cavity, cavity)?),
    ];
    for (name, spec) in scalar {
        let deviation = verify_cpf_equivalence(&spec)?.max_deviation;
        for d in [Detector::D1, Detector::D2] {
            let run = run_protocol(&register, &spec, d)?;
            table.push(vec![
                name.into(),
                detector_name(d).into(),
                run.probability.into(),
                scale_success(run.probability, eta, source)?.into(),
                cpf_fidelity(&register, &run)?.into(),
                deviation.into(),
            ]);
        }
    }

    let unit = PulsedCavity {
        coupling: CouplingProfile::constant(cfg.g)?,
        params: p,
    };
    let network = PulsedNetwork {
        cavity1: unit,
        cavity2: unit,
    };
    let pulse = gaussian_pulse(duration(cfg), cfg.samples)?;
    for d in [Detector::D1, Detector::D2] {
        let run = run_protocol_pulsed(&register, &network, &pulse, d)?;
        table.push(vec![
            "pulsed".into(),
            detector_name(d).into(),
            run.probability.into(),
            scale_success(run.probability, eta, source)?.into(),
            run.fidelity.into(),
            "".into(),
        ]);
    }
    Ok(table)
}

fn detector_name(d: Detector) -> &'static str {
    match d {
        Detector::D1 => "D1",
        Detector::D2 => "D2",
    }
}
