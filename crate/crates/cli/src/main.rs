use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cqed_gates_cli::{run_to, CliError, Experiment, ExperimentConfig, RawConfig};

/// Simulates cavity-assisted photon-scattering gates. Rates are in units of
/// the cavity decay rate κ, times in 1/κ.
#[derive(Parser, Debug)]
#[command(version, allow_negative_numbers = true)]
struct Args {
    /// fig3a, fig3b, fig3c, fig3d, reflectance or protocol
    experiment: String,

    /// Flat `key = value` file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,

    /// Atom–cavity coupling rate
    #[arg(long)]
    g: Option<String>,

    /// Spontaneous emission rate of the excited state
    #[arg(long = "gamma-s")]
    gamma_s: Option<String>,

    /// Pulse duration
    #[arg(long = "T")]
    duration: Option<String>,

    /// Number of atoms
    #[arg(long = "N", conflicts_with = "n_range")]
    n_atoms: Option<String>,

    /// Atom numbers as A..B
    #[arg(long = "N-range")]
    n_range: Option<String>,

    /// Coupling sweep as A..B
    #[arg(long = "g-range")]
    g_range: Option<String>,

    #[arg(long = "g-step")]
    g_step: Option<String>,

    /// Pulse samples (frequency points for reflectance)
    #[arg(long)]
    samples: Option<String>,

    /// Relative modulation depth of g(t)
    #[arg(long)]
    depth: Option<String>,

    /// Modulation frequency of g(t)
    #[arg(long)]
    nu: Option<String>,

    /// Seed for the modulation phases
    #[arg(long)]
    seed: Option<String>,

    /// Number of phase draws to average over
    #[arg(long = "n-seeds")]
    n_seeds: Option<String>,

    /// Detection efficiency
    #[arg(long)]
    eta: Option<String>,

    /// Mean photon number of a weak coherent input
    #[arg(long = "alpha-sq")]
    alpha_sq: Option<String>,

    /// Output CSV path; standard output when absent
    #[arg(long)]
    out: Option<String>,
}

impl Args {
    fn flags(&self) -> Result<RawConfig, CliError> {
        let mut raw = RawConfig::default();
        let pairs = [
            ("g", &self.g),
            ("gamma-s", &self.gamma_s),
            ("T", &self.duration),
            ("N", &self.n_atoms),
            ("N-range", &self.n_range),
            ("g-range", &self.g_range),
            ("g-step", &self.g_step),
            ("samples", &self.samples),
            ("depth", &self.depth),
            ("nu", &self.nu),
            ("seed", &self.seed),
            ("n-seeds", &self.n_seeds),
            ("eta", &self.eta),
            ("alpha-sq", &self.alpha_sq),
            ("out", &self.out),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                raw.set(key, v.as_str())?;
            }
        }
        Ok(raw)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| {
        let experiment: Experiment = args.experiment.parse()?;
        let file = match &args.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        let cfg = ExperimentConfig::resolve(experiment, &file.overlay(args.flags()?))?;
        run_to(&cfg, std::io::stdout().lock())
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
