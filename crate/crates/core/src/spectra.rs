//! Analytic LDOS and absorption channels in the thermodynamic limit — cavity,
//! bright-state (matter absorption), dark-state, and total density of states —
//! plus broadened finite-size LDOS for ensemble comparison.
//!
//! LDOS convention: ν_X(ω) = (1/π)·Re G_{X,X}(−iω + 0⁺) in the resolvent
//! convention of [`crate::greens`]; this is the standard retarded LDOS
//! −(1/π)·Im G_R(ω + i0⁺), guaranteed non-negative.

use crate::core::{C64, DisorderSample, Error, ProbeParams, Result, SystemParams};
use crate::effham::eigenenergies;
use crate::greens::{averaged_greens_element, greens_element, SiteIndex};

/// Metadata attached to every spectrum: the parameters that produced it and,
/// for finite-size data, the broadening δ.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMeta {
    pub params: SystemParams,
    pub broadening: Option<f64>,
    pub note: String,
}

/// A frequency grid with one or more named channels evaluated on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: Vec<f64>,
    pub channels: Vec<(String, Vec<f64>)>,
    pub metadata: SpectrumMeta,
}

impl Spectrum {
    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

fn require_disorder(params: &SystemParams, what: &str) -> Result<()> {
    if !(params.disorder_width > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "{what} requires σ > 0; at σ = 0 the spectrum is a set of delta \
             peaks — use the finite-size path (finite_size_ldos) instead"
        )));
    }
    Ok(())
}

/// Cavity LDOS ν_C(ω) in closed κ-form,
///   ν_C = (1/π)·κσ / ((E_C − ω − κ(E_M − ω))² + κ²σ²),
///   κ   = g²N / ((E_M − ω)² + σ²).
pub fn cavity_ldos(omega: f64, params: &SystemParams) -> Result<f64> {
    require_disorder(params, "cavity_ldos")?;
    if params.coupling == 0.0 {
        return Err(Error::InvalidParameter(
            "cavity_ldos at g = 0 is a delta peak at E_C; use the finite-size path".into(),
        ));
    }
    let sigma = params.disorder_width;
    let dm = params.emitter_center - omega;
    let kappa =
        params.coupling * params.coupling * params.emitter_count as f64 / (dm * dm + sigma * sigma);
    let shifted = params.cavity_energy - omega - kappa * dm;
    Ok(kappa * sigma / (std::f64::consts::PI * (shifted * shifted + kappa * kappa * sigma * sigma)))
}

/// Residue coefficients (A₁, A₂) of the two-pole form
/// G̅_CC(z) = A₁/(z+iε₁) + A₂/(z+iε₂); A₁ + A₂ = 1 identically.
pub fn cavity_residues(params: &SystemParams) -> (C64, C64) {
    let e = eigenenergies(params);
    let num = e.eps1 - C64::new(params.emitter_center, -params.disorder_width);
    let a1 = num / (e.eps1 - e.eps2);
    (a1, C64::new(1.0, 0.0) - a1)
}

/// Cavity LDOS through the two-pole residue form, −(1/π)Im-equivalent of the
/// κ-form; kept as an independent implementation for cross-checks.
pub fn cavity_ldos_two_pole(omega: f64, params: &SystemParams) -> Result<f64> {
    require_disorder(params, "cavity_ldos_two_pole")?;
    let e = eigenenergies(params);
    let (a1, a2) = cavity_residues(params);
    let z = C64::new(0.0, -omega);
    let g = a1 / (z + C64::i() * e.eps1) + a2 / (z + C64::i() * e.eps2);
    Ok(g.re / std::f64::consts::PI)
}

/// Cavity absorption χ_C(ω) = π·ν_C(ω).
pub fn cavity_absorption(omega: f64, params: &SystemParams) -> Result<f64> {
    Ok(std::f64::consts::PI * cavity_ldos(omega, params)?)
}

/// Bright-state LDOS ν_BS(ω) = (1/π)·Re G̅_BS,BS(−iω), which reduces to the
/// two-pole closed form (1/π)·Re[(z+iE_C)/((z+iε₁)(z+iε₂))] at z = −iω.
pub fn bright_state_ldos(omega: f64, params: &SystemParams) -> Result<f64> {
    require_disorder(params, "bright_state_ldos")?;
    let e = eigenenergies(params);
    let z = C64::new(0.0, -omega);
    let val = (z + C64::new(0.0, params.cavity_energy))
        / ((z + C64::i() * e.eps1) * (z + C64::i() * e.eps2));
    Ok(val.re / std::f64::consts::PI)
}

/// Matter absorption χ_M(ω) = N·π·D²·ν_BS(ω).
pub fn matter_absorption(
    omega: f64,
    params: &SystemParams,
    probe: &ProbeParams,
) -> Result<f64> {
    let d2 = probe.probe_coupling * probe.probe_coupling;
    Ok(params.emitter_count as f64 * std::f64::consts::PI * d2 * bright_state_ldos(omega, params)?)
}

/// Matter absorption through the shifted-argument identity: the same χ_M(ω)
/// expressed via the *cavity* Green's function at a complex-shifted argument,
///   χ_M(ω) = −N·D²·π·(1/π)·Re G̅_CC(iω − i(E_C+E_M) − σ).
/// Implemented independently of [`matter_absorption`] as a consistency route.
pub fn matter_absorption_shifted(
    omega: f64,
    params: &SystemParams,
    probe: &ProbeParams,
) -> Result<f64> {
    require_disorder(params, "matter_absorption_shifted")?;
    let d2 = probe.probe_coupling * probe.probe_coupling;
    let z = C64::new(
        -params.disorder_width,
        omega - params.cavity_energy - params.emitter_center,
    );
    // At ω = E_C the shifted argument lands on the emitter pole, where the
    // limit of G̅_CC is exactly 0 — the level-repulsion zero of χ_M.
    if omega == params.cavity_energy {
        return Ok(0.0);
    }
    let g = averaged_greens_element(SiteIndex::Cavity, SiteIndex::Cavity, z, params)?;
    Ok(-(params.emitter_count as f64) * d2 * g.re)
}

/// Dark-state LDOS in the thermodynamic limit: (N−1)·P(ω).
pub fn dark_state_ldos(omega: f64, params: &SystemParams) -> Result<f64> {
    if params.emitter_count <= 1 {
        return Ok(0.0);
    }
    Ok((params.emitter_count as f64 - 1.0)
        * crate::core::lorentz_pdf(omega, params.emitter_center, params.disorder_width)?)
}

/// Which form of the total density of states to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DosForm {
    /// Full partition ν = ν_C + ν_BS + (N−1)P.
    Partition,
    /// Thermodynamic simplification ν = N·P.
    Thermodynamic,
}

/// Total density of states ν(ω).
pub fn total_dos(omega: f64, params: &SystemParams, form: DosForm) -> Result<f64> {
    match form {
        DosForm::Partition => Ok(cavity_ldos(omega, params)?
            + bright_state_ldos(omega, params)?
            + dark_state_ldos(omega, params)?),
        DosForm::Thermodynamic => Ok(params.emitter_count as f64
            * crate::core::lorentz_pdf(omega, params.emitter_center, params.disorder_width)?),
    }
}

/// Default 2001-point uniform grid covering both polariton peaks and the
/// disorder tails: [min(E_M,E_C) − h, max(E_M,E_C) + h], h = max(5σ, 2Ω).
pub fn default_grid(params: &SystemParams) -> Vec<f64> {
    let h = (5.0 * params.disorder_width).max(2.0 * params.rabi_frequency());
    let lo = params.cavity_energy.min(params.emitter_center) - h;
    let hi = params.cavity_energy.max(params.emitter_center) + h;
    let n = 2001usize;
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Default finite-size broadening δ = max(10·Δω_grid, 5/(N·P(E_M))): larger
/// than both the grid step and the mean level spacing at the distribution
/// peak, so sample spectra are smooth enough to compare with the analytics.
pub fn default_broadening(params: &SystemParams, grid: &[f64]) -> f64 {
    let dw = if grid.len() > 1 {
        (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64
    } else {
        0.0
    };
    let peak_density = params.emitter_count as f64
        / (std::f64::consts::PI * params.disorder_width.max(f64::MIN_POSITIVE));
    (10.0 * dw).max(5.0 / peak_density)
}

/// Finite-size LDOS of one sample: ν_X(ω) = (1/π)·Re G_{X,X}(−iω + δ).
pub fn finite_size_ldos(
    x: SiteIndex,
    grid: &[f64],
    sample: &DisorderSample,
    params: &SystemParams,
    delta: f64,
) -> Result<Spectrum> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(
            "finite_size_ldos requires broadening δ > 0".into(),
        ));
    }
    let name = match x {
        SiteIndex::Cavity => "nu_C".to_string(),
        SiteIndex::Emitter(j) => format!("nu_E{j}"),
        SiteIndex::BrightState => "nu_BS".to_string(),
        SiteIndex::DarkState(k) => format!("nu_DS{k}"),
    };
    let values = grid
        .iter()
        .map(|&w| {
            greens_element(x, x, C64::new(delta, -w), sample, params)
                .map(|g| g.re / std::f64::consts::PI)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Spectrum {
        grid: grid.to_vec(),
        channels: vec![(name, values)],
        metadata: SpectrumMeta {
            params: *params,
            broadening: Some(delta),
            note: String::new(),
        },
    })
}

/// Trapezoid integral of tabulated values plus the analytic 1/ω² tail beyond
/// both window edges: beyond the window the integrand is modelled as
/// C±/(ω−center)² with C± pinned by the edge values. Lorentzian-tailed
/// channels (ν_BS, ν_DS, ν) need this; for ν_C (∝ ω⁻⁴) the correction is a
/// harmless overestimate of an already negligible remainder.
pub fn integrate_with_tail(grid: &[f64], values: &[f64], center: f64) -> f64 {
    assert_eq!(grid.len(), values.len());
    let mut acc = 0.0;
    for i in 1..grid.len() {
        acc += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    }
    let wl = center - grid[0];
    let wr = grid[grid.len() - 1] - center;
    if wl > 0.0 {
        acc += values[0] * wl * wl / wl; // C_L/w_L with C_L = v₀·w_L²
    }
    if wr > 0.0 {
        acc += values[values.len() - 1] * wr * wr / wr;
    }
    acc
}

/// Sum-rule quadrature for one analytic channel: dense uniform grid on
/// center ± inner, geometric grid out to center ± outer, then the 1/ω² tail.
pub fn sum_rule_integral(
    f: impl Fn(f64) -> Result<f64>,
    center: f64,
    inner: f64,
    outer: f64,
) -> Result<f64> {
    let mut grid: Vec<f64> = Vec::new();
    let n_inner = 8001usize;
    for i in 0..n_inner {
        grid.push(center - inner + 2.0 * inner * i as f64 / (n_inner - 1) as f64);
    }
    let n_outer = 3000usize;
    let ratio = (outer / inner).max(1.0);
    for i in 1..=n_outer {
        let r = inner * ratio.powf(i as f64 / n_outer as f64);
        grid.push(center + r);
        grid.push(center - r);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let values = grid.iter().map(|&w| f(w)).collect::<Result<Vec<f64>>>()?;
    Ok(integrate_with_tail(&grid, &values, center))
}
