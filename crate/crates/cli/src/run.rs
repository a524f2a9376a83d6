//! Command dispatch: builds the requested computation from the merged
//! configuration and serializes the result. Exit codes: 0 success, 2 invalid
//! configuration, 3 numeric failure.

use crate::config::{self, Cli, Command, Effective, GridSpec};
use crate::output::{Table, Value};
use polariton_core::effham::eigenenergies;
use polariton_core::ensemble::{
    run_relaxation_ensemble, run_spectrum_ensemble, run_transport_ensemble, DonorEnergy,
    EnsembleConfig,
};
use polariton_core::greens::SiteIndex;
use polariton_core::rates::{
    avg_relaxation_rate, avg_transport_rate, relaxation_rate, resonant_transport_rate,
    transport_rate,
};
use polariton_core::spectra::{
    bright_state_ldos, cavity_ldos, dark_state_ldos, matter_absorption, total_dos, DosForm,
};
use polariton_core::SystemParams;

const EXIT_CONFIG: i32 = 2;
const EXIT_NUMERIC: i32 = 3;

pub fn dispatch(cli: Cli) -> i32 {
    let effective = match config::merge(&cli) {
        Ok(e) => e,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_CONFIG;
        }
    };
    let report = polariton_core::core::validate(&effective.system());
    if !report.is_ok() {
        for e in &report.errors {
            eprintln!("invalid configuration: {e}");
        }
        return EXIT_CONFIG;
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(threads) = cli
        .threads
        .or_else(|| std::env::var("POLARITON_LAB_THREADS").ok()?.parse().ok())
    {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("warning: could not set thread count: {e}");
        }
    }

    let table = match build(&cli, &effective) {
        Ok(t) => t,
        Err(Failure::Config(msg)) => {
            eprintln!("invalid configuration: {msg}");
            return EXIT_CONFIG;
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            return EXIT_NUMERIC;
        }
    };
    match table.write(cli.output.as_deref(), &cli.format) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: cannot write output: {e}");
            EXIT_CONFIG
        }
    }
}

enum Failure {
    Config(String),
    Numeric(String),
}

fn numeric(op: &str) -> impl Fn(polariton_core::Error) -> Failure + '_ {
    move |e| Failure::Numeric(format!("{op}: {e}"))
}

fn meta(effective: &Effective, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut pairs = vec![("tool".to_string(), "polariton-lab".to_string())];
    pairs.extend(effective.header_pairs());
    pairs.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
    pairs
}

fn parse_ms(spec: &str, n: usize) -> Result<usize, Failure> {
    if spec == "auto" {
        return Ok((1_000_000 / n).max(2));
    }
    spec.parse()
        .map_err(|e| Failure::Config(format!("bad --MS value `{spec}`: {e}")))
}

fn build(cli: &Cli, effective: &Effective) -> Result<Table, Failure> {
    let params = effective.system();
    match &cli.command {
        Command::Eigs { sweep } => eigs(effective, params, sweep),
        Command::Spectra {
            wmin,
            wmax,
            points,
            probe,
        } => spectra(effective, params, *wmin, *wmax, *points, *probe),
        Command::Relax {
            donor_energy,
            ensemble,
            sample_count,
        } => relax(effective, params, *donor_energy, *ensemble, sample_count),
        Command::Transport {
            reservoir,
            donor_energy,
            ensemble,
            sample_count,
        } => transport(
            effective,
            params,
            reservoir,
            *donor_energy,
            *ensemble,
            sample_count,
        ),
        Command::Ensemble {
            samples,
            broadening,
            wmin,
            wmax,
            points,
        } => ensemble_spectrum(effective, params, *samples, *broadening, *wmin, *wmax, *points),
        Command::Sweep {
            axis,
            quantity,
            donor_energy,
        } => sweep(effective, params, axis, quantity, *donor_energy),
        Command::ReproduceFig { figure, panel } => reproduce(effective, *figure, panel),
    }
}

fn eigs(effective: &Effective, base: SystemParams, sweep: &[String]) -> Result<Table, Failure> {
    let grid = if sweep.is_empty() {
        GridSpec {
            axis: "sigma".into(),
            values: vec![base.disorder_width],
        }
    } else {
        config::parse_grid(sweep).map_err(Failure::Config)?
    };
    let mut table = Table::new(
        meta(effective, &[("sweep_axis", grid.axis.clone())]),
        &[
            &grid.axis,
            "re_eps1",
            "im_eps1",
            "re_eps2",
            "im_eps2",
            "regime",
        ],
    );
    for &v in &grid.values {
        let p = apply_axis(base, &grid.axis, v).map_err(Failure::Config)?;
        let e = eigenenergies(&p);
        table.push(vec![
            v.into(),
            e.eps1.re.into(),
            e.eps1.im.into(),
            e.eps2.re.into(),
            e.eps2.im.into(),
            format!("{}", e.regime).as_str().into(),
        ]);
    }
    Ok(table)
}

fn apply_axis(mut p: SystemParams, axis: &str, v: f64) -> Result<SystemParams, String> {
    match axis {
        "sigma" => p.disorder_width = v,
        "N" => p.emitter_count = v.round() as usize,
        "E1" => return Err("axis E1 is only meaningful for rate sweeps".into()),
        other => return Err(format!("unknown axis {other}")),
    }
    Ok(p)
}

fn spectra(
    effective: &Effective,
    p: SystemParams,
    wmin: f64,
    wmax: f64,
    points: usize,
    probe: f64,
) -> Result<Table, Failure> {
    if points < 2 || !(wmax > wmin) {
        return Err(Failure::Config("need points ≥ 2 and wmax > wmin".into()));
    }
    let probe_params = config::probe(probe);
    let mut table = Table::new(
        meta(effective, &[("probe_coupling", format!("{probe:.16e}"))]),
        &["omega", "nu_C", "nu_BS", "chi_M", "nu_DS", "nu"],
    );
    for i in 0..points {
        let w = wmin + (wmax - wmin) * i as f64 / (points - 1) as f64;
        table.push(vec![
            w.into(),
            cavity_ldos(w, &p).map_err(numeric("cavity_ldos"))?.into(),
            bright_state_ldos(w, &p)
                .map_err(numeric("bright_state_ldos"))?
                .into(),
            matter_absorption(w, &p, &probe_params)
                .map_err(numeric("matter_absorption"))?
                .into(),
            dark_state_ldos(w, &p)
                .map_err(numeric("dark_state_ldos"))?
                .into(),
            total_dos(w, &p, DosForm::Partition)
                .map_err(numeric("total_dos"))?
                .into(),
        ]);
    }
    Ok(table)
}

fn relax(
    effective: &Effective,
    p: SystemParams,
    donor_energy: Option<f64>,
    ensemble: bool,
    sample_count: &str,
) -> Result<Table, Failure> {
    let mut extra = vec![("mode", "relaxation".to_string())];
    let gamma_bar = avg_relaxation_rate(&p).map_err(numeric("avg_relaxation_rate"))?;
    let mut columns: Vec<&str> = vec!["quantity", "value"];
    let mut rows: Vec<Vec<Value>> = vec![vec!["gamma_bar".into(), gamma_bar.value.into()]];
    if let Some(e1) = donor_energy {
        let gamma = relaxation_rate(e1, &p).map_err(numeric("relaxation_rate"))?;
        rows.push(vec!["gamma_E1".into(), gamma.value.into()]);
        extra.push(("donor_energy", format!("{e1:.16e}")));
    }
    if ensemble {
        let ms = parse_ms(sample_count, p.emitter_count)?;
        extra.push(("sample_count", ms.to_string()));
        let donor = match donor_energy {
            Some(e1) => DonorEnergy::Pinned(e1),
            None => DonorEnergy::Sampled,
        };
        let cfg = EnsembleConfig::new(p, ms, effective.seed).with_donor(donor);
        let est = run_relaxation_ensemble(&cfg).map_err(numeric("run_relaxation_ensemble"))?;
        for w in &est.warnings {
            eprintln!("warning: {w}");
        }
        columns = vec!["quantity", "value", "stderr", "samples"];
        for row in &mut rows {
            row.push(f64::NAN.into());
            row.push(f64::NAN.into());
        }
        rows.push(vec![
            "gamma_ensemble".into(),
            est.mean.into(),
            est.stderr.into(),
            (est.samples_used as f64).into(),
        ]);
    }
    let mut table = Table::new(meta(effective, &extra), &columns);
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

fn transport(
    effective: &Effective,
    p: SystemParams,
    reservoir: &config::ReservoirFlags,
    donor_energy: f64,
    ensemble: bool,
    sample_count: &str,
) -> Result<Table, Failure> {
    let res = reservoir.to_params();
    res.validate()
        .map_err(|e| Failure::Config(format!("reservoir: {e}")))?;
    let mut extra = vec![
        ("mode", "transport".to_string()),
        ("donor_energy", format!("{donor_energy:.16e}")),
        ("reservoir_mode_count", res.reservoir_mode_count.to_string()),
    ];
    let gamma_e = transport_rate(donor_energy, &p, &res, DosForm::Thermodynamic)
        .map_err(numeric("transport_rate"))?;
    let gamma_r = resonant_transport_rate(
        donor_energy,
        &p,
        res.acceptor_ldos_const,
        DosForm::Thermodynamic,
    )
    .map_err(numeric("resonant_transport_rate"))?;
    let (gamma_avg, warning) =
        avg_transport_rate(&p, 1).map_err(numeric("avg_transport_rate"))?;
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }
    let mut columns: Vec<&str> = vec!["quantity", "value"];
    let mut rows: Vec<Vec<Value>> = vec![
        vec!["Gamma_E1".into(), gamma_e.value.into()],
        vec!["Gamma_r_E1".into(), gamma_r.value.into()],
        vec!["Gamma_bar".into(), gamma_avg.value.into()],
    ];
    if ensemble {
        let ms = parse_ms(sample_count, p.emitter_count)?;
        extra.push(("sample_count", ms.to_string()));
        let cfg = EnsembleConfig::new(p, ms, effective.seed)
            .with_reservoir(res)
            .with_donor(DonorEnergy::Sampled);
        let est = run_transport_ensemble(&cfg).map_err(numeric("run_transport_ensemble"))?;
        for w in &est.warnings {
            eprintln!("warning: {w}");
        }
        columns = vec!["quantity", "value", "stderr", "samples"];
        for row in &mut rows {
            row.push(f64::NAN.into());
            row.push(f64::NAN.into());
        }
        rows.push(vec![
            "Gamma_ensemble".into(),
            est.mean.into(),
            est.stderr.into(),
            (est.samples_used as f64).into(),
        ]);
    }
    let mut table = Table::new(meta(effective, &extra), &columns);
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

fn ensemble_spectrum(
    effective: &Effective,
    p: SystemParams,
    samples: usize,
    broadening: f64,
    wmin: f64,
    wmax: f64,
    points: usize,
) -> Result<Table, Failure> {
    if points < 2 || !(wmax > wmin) {
        return Err(Failure::Config("need points ≥ 2 and wmax > wmin".into()));
    }
    let grid: Vec<f64> = (0..points)
        .map(|i| wmin + (wmax - wmin) * i as f64 / (points - 1) as f64)
        .collect();
    let cfg = EnsembleConfig::new(p, samples, effective.seed);
    let spec = run_spectrum_ensemble(&cfg, &[SiteIndex::Cavity], &grid, broadening)
        .map_err(numeric("run_spectrum_ensemble"))?;
    let nu_c = spec.channel("nu_C").expect("cavity channel");
    let mut table = Table::new(
        meta(
            effective,
            &[
                ("sample_count", samples.to_string()),
                ("broadening", format!("{broadening:.16e}")),
            ],
        ),
        &["omega", "nu_C_ensemble", "nu_C_analytic"],
    );
    for (i, &w) in grid.iter().enumerate() {
        table.push(vec![
            w.into(),
            nu_c[i].into(),
            cavity_ldos(w, &p).map_err(numeric("cavity_ldos"))?.into(),
        ]);
    }
    Ok(table)
}

fn sweep(
    effective: &Effective,
    base: SystemParams,
    axis: &[String],
    quantity: &str,
    donor_energy: f64,
) -> Result<Table, Failure> {
    let grid = config::parse_grid(axis).map_err(Failure::Config)?;
    let mut table = Table::new(
        meta(
            effective,
            &[
                ("sweep_axis", grid.axis.clone()),
                ("quantity", quantity.to_string()),
            ],
        ),
        &[&grid.axis, quantity],
    );
    for &v in &grid.values {
        let (p, e1) = match grid.axis.as_str() {
            "E1" => (base, v),
            other => (
                apply_axis(base, other, v).map_err(Failure::Config)?,
                donor_energy,
            ),
        };
        let value = match quantity {
            "gamma_bar" => avg_relaxation_rate(&p).map_err(numeric("avg_relaxation_rate"))?.value,
            "gamma" => relaxation_rate(e1, &p).map_err(numeric("relaxation_rate"))?.value,
            "gamma_r" => resonant_transport_rate(e1, &p, 1.0, DosForm::Thermodynamic)
                .map_err(numeric("resonant_transport_rate"))?
                .value,
            other => {
                return Err(Failure::Config(format!(
                    "unknown quantity `{other}` (use gamma_bar, gamma, or gamma_r)"
                )))
            }
        };
        table.push(vec![v.into(), value.into()]);
    }
    Ok(table)
}

/// Reference-figure data: each target re-runs the corresponding analytics at
/// the published parameter sets (E_C = E_M = 1 eV, g = 0.001 eV, N = 2000
/// unless the panel dictates otherwise).
fn reproduce(effective: &Effective, figure: u8, panel: &str) -> Result<Table, Failure> {
    let std = SystemParams::new(1.0, 1.0, 0.001, 2000, 0.04);
    match (figure, panel) {
        (2, _) => {
            let sweep = vec!["sigma".to_string(), "0.001:0.2:200log".to_string()];
            eigs(effective, std, &sweep)
        }
        (3, "a") => spectra(effective, std, 0.8, 1.2, 2001, 1.0),
        (3, "b") => spectra(
            effective,
            SystemParams::new(1.0, 1.0, 0.001, 2000, 0.15),
            0.5,
            1.5,
            2001,
            1.0,
        ),
        (4, _) => {
            let axis = vec!["sigma".to_string(), "0.001:1.0:200log".to_string()];
            sweep(effective, std, &axis, "gamma_bar", 1.0)
        }
        (5, _) => {
            let axis = vec!["N".to_string(), "10:1000000:200log".to_string()];
            sweep(effective, std, &axis, "gamma", 1.025)
        }
        (6, _) => {
            let axis = vec!["sigma".to_string(), "0.0001:10:200log".to_string()];
            sweep(effective, std, &axis, "gamma_r", 1.025)
        }
        (f, p) => Err(Failure::Config(format!(
            "no data target for figure {f} panel {p} (figures 2-6)"
        ))),
    }
}
