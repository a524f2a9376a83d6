//! Analytic relaxation and transport rates (ħ = 1, rates in eV): the
//! energy-resolved donor relaxation rate γ(E₁) = g²ν_C(E₁), its disorder
//! average γ̄, the cavity-mediated transport rate Γ(E) into a reservoir-dressed
//! acceptor, the resonant rate Γ_r, and the disorder average Γ̄ = γ̄/N.

use crate::core::{C64, Error, ReservoirParams, Result, SystemParams};
use crate::spectra::{cavity_ldos, total_dos, DosForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateKind {
    RelaxEnergyResolved,
    RelaxAveraged,
    TransportEnergyResolved,
    TransportResonant,
    TransportAveraged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Analytic,
    /// Monte Carlo estimate from `samples` disorder realizations.
    Ensemble { samples: usize, stderr: f64 },
}

/// A rate with its meaning and origin attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub value: f64,
    pub kind: RateKind,
    pub provenance: Provenance,
}

impl RateResult {
    pub fn analytic(value: f64, kind: RateKind) -> Self {
        Self {
            value,
            kind,
            provenance: Provenance::Analytic,
        }
    }

    /// Mean first-passage time 1/value (eV⁻¹ in ħ = 1 units).
    pub fn mean_first_passage_time(&self) -> f64 {
        1.0 / self.value
    }
}

/// Energy-resolved relaxation rate of a donor at E₁: γ(E₁) = g²·ν_C(E₁).
pub fn relaxation_rate(e1: f64, params: &SystemParams) -> Result<RateResult> {
    if params.coupling == 0.0 {
        // Decoupled donor: no cavity channel to relax through.
        return Ok(RateResult::analytic(0.0, RateKind::RelaxEnergyResolved));
    }
    let g2 = params.coupling * params.coupling;
    Ok(RateResult::analytic(
        g2 * cavity_ldos(e1, params)?,
        RateKind::RelaxEnergyResolved,
    ))
}

/// Disorder-averaged relaxation rate, closed form:
/// γ̄ = (g²/π)·S/((E_M−E_C)² + S²) with S = σ + g²N/(2σ).
pub fn avg_relaxation_rate(params: &SystemParams) -> Result<RateResult> {
    if !(params.disorder_width > 0.0) {
        return Err(Error::InvalidParameter(
            "avg_relaxation_rate requires σ > 0".into(),
        ));
    }
    let g2 = params.coupling * params.coupling;
    let s = params.disorder_width
        + g2 * params.emitter_count as f64 / (2.0 * params.disorder_width);
    let d = params.emitter_center - params.cavity_energy;
    Ok(RateResult::analytic(
        g2 / std::f64::consts::PI * s / (d * d + s * s),
        RateKind::RelaxAveraged,
    ))
}

/// LDOS of the acceptor dressed by the Lorentz-averaged reservoir self-energy
/// N_R g_R²/(z + iE_R + Σ), evaluated at z = −iE. The order-g² cavity
/// back-action is excluded here; it is what the transport rate adds.
pub fn acceptor_ldos(energy: f64, res: &ReservoirParams) -> Result<f64> {
    res.validate()?;
    let z = C64::new(0.0, -energy);
    let denom = z
        + C64::new(0.0, res.acceptor_energy)
        + res.self_energy_weight()
            / (z + C64::new(res.reservoir_width, res.reservoir_center));
    Ok(denom.inv().re / std::f64::consts::PI)
}

/// Energy-resolved transport rate Γ(E) = g²·(ν_C(E)/ν(E))·ν_N(E).
pub fn transport_rate(
    energy: f64,
    params: &SystemParams,
    res: &ReservoirParams,
    form: DosForm,
) -> Result<RateResult> {
    if params.coupling == 0.0 {
        return Ok(RateResult::analytic(0.0, RateKind::TransportEnergyResolved));
    }
    let nu = total_dos(energy, params, form)?;
    if !(nu > 0.0) {
        return Err(Error::Domain(format!(
            "total DOS vanishes at E = {energy}; transport rate undefined"
        )));
    }
    let g2 = params.coupling * params.coupling;
    Ok(RateResult::analytic(
        g2 * cavity_ldos(energy, params)? / nu * acceptor_ldos(energy, res)?,
        RateKind::TransportEnergyResolved,
    ))
}

/// Resonant transport rate Γ_r(E₁) = g²·ν₀·ν_C(E₁)/ν(E₁) for a structureless
/// acceptor of constant LDOS ν₀.
pub fn resonant_transport_rate(
    e1: f64,
    params: &SystemParams,
    nu0: f64,
    form: DosForm,
) -> Result<RateResult> {
    if params.coupling == 0.0 {
        return Ok(RateResult::analytic(0.0, RateKind::TransportResonant));
    }
    let nu = total_dos(e1, params, form)?;
    if !(nu > 0.0) {
        return Err(Error::Domain(format!(
            "total DOS vanishes at E = {e1}; resonant transport rate undefined"
        )));
    }
    let g2 = params.coupling * params.coupling;
    Ok(RateResult::analytic(
        g2 * nu0 * cavity_ldos(e1, params)? / nu,
        RateKind::TransportResonant,
    ))
}

/// Disorder-averaged transport rate Γ̄ = (N_A/N)·γ̄ for N_A acceptors.
/// Returns a validity warning string alongside when N_A is not ≪ N.
pub fn avg_transport_rate(
    params: &SystemParams,
    n_acceptors: usize,
) -> Result<(RateResult, Option<String>)> {
    if n_acceptors < 1 {
        return Err(Error::InvalidParameter("n_acceptors must be ≥ 1".into()));
    }
    let warning = if n_acceptors * 10 >= params.emitter_count {
        Some(format!(
            "n_acceptors = {n_acceptors} is not ≪ N = {}; the Γ̄ = (N_A/N)·γ̄ \
             relation assumes a dilute acceptor fraction",
            params.emitter_count
        ))
    } else {
        None
    };
    let gamma_bar = avg_relaxation_rate(params)?;
    Ok((
        RateResult::analytic(
            n_acceptors as f64 / params.emitter_count as f64 * gamma_bar.value,
            RateKind::TransportAveraged,
        ),
        warning,
    ))
}

/// Log-log regression slope of f over a geometric grid on [lo, hi] — the
/// probe used to verify power-law scaling regimes of the rates.
pub fn loglog_slope(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, n: usize) -> Result<f64> {
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let x = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
        let y = f(x)?;
        if !(y > 0.0) {
            return Err(Error::NumericFailure(format!(
                "loglog_slope: non-positive value {y} at {x}"
            )));
        }
        xs.push(x.ln());
        ys.push(y.ln());
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    Ok(num / den)
}
