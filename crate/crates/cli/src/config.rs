//! Command-line definition, JSON config files, and flag/file merging. Flags
//! always override file values; the effective merged configuration is echoed
//! into every output header.

use clap::{Args, Parser, Subcommand};
use polariton_core::core::{ProbeParams, ReservoirParams};
use polariton_core::SystemParams;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "polariton-lab",
    about = "Spectra, relaxation, and transport of disordered emitters in a cavity",
    version
)]
pub struct Cli {
    /// JSON configuration file; individual flags override its values.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,

    /// Worker thread cap (default: POLARITON_LAB_THREADS or all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output file path (stem; extension follows --format).
    #[arg(long, short, global = true)]
    pub output: Option<std::path::PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_parser = ["csv", "json", "both"], default_value = "csv")]
    pub format: String,

    #[command(flatten)]
    pub params: ParamFlags,

    #[command(subcommand)]
    pub command: Command,
}

/// System-parameter flags, mirrored by the JSON config file.
#[derive(Args, Debug, Clone)]
pub struct ParamFlags {
    /// Cavity energy E_C (eV).
    #[arg(long = "EC", global = true)]
    pub cavity_energy: Option<f64>,
    /// Emitter distribution center E_M (eV).
    #[arg(long = "EM", global = true)]
    pub emitter_center: Option<f64>,
    /// Cavity-emitter coupling g (eV).
    #[arg(long = "g", global = true)]
    pub coupling: Option<f64>,
    /// Number of emitters N.
    #[arg(long = "N", global = true)]
    pub emitter_count: Option<usize>,
    /// Disorder width σ (eV).
    #[arg(long = "sigma", global = true)]
    pub disorder_width: Option<f64>,
    /// Base RNG seed for ensembles.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenenergies of the effective non-Hermitian Hamiltonian over a sweep.
    Eigs {
        /// Sweep spec: AXIS START:STOP:COUNT[log], e.g. `sigma 0.001:0.2:200log`.
        #[arg(long, num_args = 2)]
        sweep: Vec<String>,
    },
    /// Analytic spectra (ν_C, ν_BS, χ_M, ν_DS, ν) on a frequency grid.
    Spectra {
        #[arg(long, default_value_t = 0.5)]
        wmin: f64,
        #[arg(long, default_value_t = 1.5)]
        wmax: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
        /// Probe coupling D for χ_M.
        #[arg(long, default_value_t = 1.0)]
        probe: f64,
    },
    /// Relaxation rates: γ(E₁) and γ̄, optionally the Monte Carlo ensemble.
    Relax {
        /// Donor energy E₁ (eV); omitted → disorder-averaged γ̄ only.
        #[arg(long = "E1")]
        donor_energy: Option<f64>,
        /// Run the finite-size ensemble oracle alongside the analytics.
        #[arg(long)]
        ensemble: bool,
        /// Sample count M_S, or `auto` for 10⁶/N.
        #[arg(long = "MS", default_value = "auto")]
        sample_count: String,
    },
    /// Transport rates Γ(E), Γ_r(E₁), Γ̄ with a reservoir-dressed acceptor.
    Transport {
        #[command(flatten)]
        reservoir: ReservoirFlags,
        /// Donor energy E₁ (eV).
        #[arg(long = "E1", default_value_t = 1.0)]
        donor_energy: f64,
        /// Run the finite-size ensemble oracle alongside the analytics.
        #[arg(long)]
        ensemble: bool,
        #[arg(long = "MS", default_value = "auto")]
        sample_count: String,
    },
    /// Disorder-averaged finite-size spectrum (cavity channel).
    Ensemble {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Broadening δ (eV).
        #[arg(long, default_value_t = 1e-3)]
        broadening: f64,
        #[arg(long, default_value_t = 0.5)]
        wmin: f64,
        #[arg(long, default_value_t = 1.5)]
        wmax: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Sweep an axis and tabulate rates: AXIS START:STOP:COUNT[log].
    Sweep {
        #[arg(long, num_args = 2)]
        axis: Vec<String>,
        /// Quantity: gamma_bar | gamma | gamma_r.
        #[arg(long, default_value = "gamma_bar")]
        quantity: String,
        /// Donor energy for gamma / gamma_r.
        #[arg(long = "E1", default_value_t = 1.0)]
        donor_energy: f64,
    },
    /// Emit the data behind a published-style figure panel.
    ReproduceFig {
        /// Figure number: 2..6.
        figure: u8,
        #[arg(long, default_value = "a")]
        panel: String,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ReservoirFlags {
    #[arg(long = "EN", default_value_t = 1.0)]
    pub acceptor_energy: f64,
    #[arg(long = "ER", default_value_t = 1.0)]
    pub reservoir_center: f64,
    #[arg(long = "Sigma", default_value_t = 0.1)]
    pub reservoir_width: f64,
    #[arg(long = "gR", default_value_t = 1e-3)]
    pub reservoir_coupling: f64,
    #[arg(long = "NR", default_value_t = 500)]
    pub reservoir_mode_count: usize,
    #[arg(long = "nu0", default_value_t = 1.0)]
    pub acceptor_ldos_const: f64,
}

impl ReservoirFlags {
    pub fn to_params(&self) -> ReservoirParams {
        ReservoirParams {
            acceptor_energy: self.acceptor_energy,
            reservoir_center: self.reservoir_center,
            reservoir_width: self.reservoir_width,
            reservoir_coupling: self.reservoir_coupling,
            reservoir_mode_count: self.reservoir_mode_count,
            acceptor_ldos_const: self.acceptor_ldos_const,
        }
    }
}

/// JSON config file schema; unknown keys are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub cavity_energy: Option<f64>,
    pub emitter_center: Option<f64>,
    pub coupling: Option<f64>,
    pub emitter_count: Option<usize>,
    pub disorder_width: Option<f64>,
    pub seed: Option<u64>,
}

/// The merged, effective configuration echoed into output headers.
#[derive(Debug, Clone, Serialize)]
pub struct Effective {
    pub cavity_energy: f64,
    pub emitter_center: f64,
    pub coupling: f64,
    pub emitter_count: usize,
    pub disorder_width: f64,
    pub seed: u64,
}

impl Effective {
    pub fn system(&self) -> SystemParams {
        SystemParams::new(
            self.cavity_energy,
            self.emitter_center,
            self.coupling,
            self.emitter_count,
            self.disorder_width,
        )
    }

    pub fn header_pairs(&self) -> Vec<(String, String)> {
        vec![
            ("cavity_energy".into(), format!("{:.16e}", self.cavity_energy)),
            ("emitter_center".into(), format!("{:.16e}", self.emitter_center)),
            ("coupling".into(), format!("{:.16e}", self.coupling)),
            ("emitter_count".into(), self.emitter_count.to_string()),
            ("disorder_width".into(), format!("{:.16e}", self.disorder_width)),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

/// Loads the optional config file and merges it with the flags (flags win).
/// Conflicts between a set flag and a differing file value are reported on
/// stderr as required.
pub fn merge(cli: &Cli) -> Result<Effective, String> {
    let file: FileConfig = match &cli.config {
        None => FileConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| {
                format!(
                    "config parse error in {} at line {}, column {}: {e}",
                    path.display(),
                    e.line(),
                    e.column()
                )
            })?
        }
    };
    fn pick<T: Copy + PartialEq + std::fmt::Debug>(
        name: &str,
        flag: Option<T>,
        file: Option<T>,
        default: T,
    ) -> T {
        match (flag, file) {
            (Some(f), Some(v)) if f != v => {
                eprintln!("note: flag --{name} {f:?} overrides config value {v:?}");
                f
            }
            (Some(f), _) => f,
            (None, Some(v)) => v,
            (None, None) => default,
        }
    }
    let p = &cli.params;
    Ok(Effective {
        cavity_energy: pick("EC", p.cavity_energy, file.cavity_energy, 1.0),
        emitter_center: pick("EM", p.emitter_center, file.emitter_center, 1.0),
        coupling: pick("g", p.coupling, file.coupling, 0.001),
        emitter_count: pick("N", p.emitter_count, file.emitter_count, 2000),
        disorder_width: pick("sigma", p.disorder_width, file.disorder_width, 0.04),
        seed: pick("seed", p.seed, file.seed, 1),
    })
}

/// Parsed sweep/axis grid spec `START:STOP:COUNT[log]`.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub axis: String,
    pub values: Vec<f64>,
}

pub fn parse_grid(words: &[String]) -> Result<GridSpec, String> {
    if words.len() != 2 {
        return Err("sweep spec needs two arguments: AXIS START:STOP:COUNT[log]".into());
    }
    let axis = words[0].clone();
    if !["sigma", "N", "E1"].contains(&axis.as_str()) {
        return Err(format!("unknown sweep axis `{axis}` (use sigma, N, or E1)"));
    }
    let spec = &words[1];
    let (body, log) = match spec.strip_suffix("log") {
        Some(b) => (b, true),
        None => (spec.as_str(), false),
    };
    let parts: Vec<&str> = body.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("malformed grid spec `{spec}`"));
    }
    let start: f64 = parts[0].parse().map_err(|e| format!("bad start: {e}"))?;
    let stop: f64 = parts[1].parse().map_err(|e| format!("bad stop: {e}"))?;
    let count: usize = parts[2].parse().map_err(|e| format!("bad count: {e}"))?;
    if count < 2 {
        return Err("sweep grids need at least 2 points".into());
    }
    if log && (start <= 0.0 || stop <= 0.0) {
        return Err("log grids need positive endpoints".into());
    }
    let values = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            if log {
                start * (stop / start).powf(t)
            } else {
                start + (stop - start) * t
            }
        })
        .collect();
    Ok(GridSpec { axis, values })
}

pub fn probe(probe_coupling: f64) -> ProbeParams {
    ProbeParams { probe_coupling }
}
