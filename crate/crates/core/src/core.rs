//! Domain types, parameter validation, and the Lorentzian disorder model
//! shared by all other modules.
//!
//! Energies are expressed in eV throughout (ħ = 1), matching the regimes the
//! library targets: optical cavities around 1 eV with collective couplings of
//! a few tens of meV.

use std::hash::{Hash, Hasher};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

/// Complex double, used for Laplace-space arguments and Green's functions.
pub type C64 = num_complex::Complex64;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Laplace argument collides with the pole of emitter {index} at E = {energy} eV")]
    PoleCollision { index: usize, energy: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("input outside the validity regime: {0}")]
    OutOfValidity(String),
    #[error("degenerate perturbation breakdown at root index {0}: vanishing denominator")]
    DegenerateBreakdown(usize),
    #[error("system size {n} exceeds the dense-eigensolve guard {guard}; use the analytic path")]
    SizeGuard { n: usize, guard: usize },
    #[error("numeric failure in {0}")]
    NumericFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Parameters of the disordered emitter ensemble coupled to one cavity mode.
///
/// The collective (Rabi) coupling `Ω = 2g√N` is always recomputed from these
/// fields, never cached, so it cannot go stale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cavity mode energy E_C (eV).
    pub cavity_energy: f64,
    /// Center E_M of the Lorentzian emitter-energy distribution (eV).
    pub emitter_center: f64,
    /// Homogeneous cavity-emitter coupling g (eV).
    pub coupling: f64,
    /// Number of emitters N.
    pub emitter_count: usize,
    /// Half width at half maximum σ of the Lorentzian disorder (eV).
    pub disorder_width: f64,
}

impl SystemParams {
    pub fn new(
        cavity_energy: f64,
        emitter_center: f64,
        coupling: f64,
        emitter_count: usize,
        disorder_width: f64,
    ) -> Self {
        Self {
            cavity_energy,
            emitter_center,
            coupling,
            emitter_count,
            disorder_width,
        }
    }

    /// Collective coupling g√N (eV).
    pub fn collective_coupling(&self) -> f64 {
        self.coupling * (self.emitter_count as f64).sqrt()
    }

    /// Collective Rabi frequency Ω = 2g√N (eV).
    pub fn rabi_frequency(&self) -> f64 {
        2.0 * self.collective_coupling()
    }

    /// Detuning E_C − E_M (eV).
    pub fn detuning(&self) -> f64 {
        self.cavity_energy - self.emitter_center
    }

    /// Hash of the parameter set, stored in every `DisorderSample` so a
    /// sample cannot silently be reused with different parameters.
    pub fn digest(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.cavity_energy.to_bits().hash(&mut h);
        self.emitter_center.to_bits().hash(&mut h);
        self.coupling.to_bits().hash(&mut h);
        self.emitter_count.hash(&mut h);
        self.disorder_width.to_bits().hash(&mut h);
        h.finish()
    }
}

/// Acceptor/reservoir parameters for the transport configuration: the last
/// emitter (the acceptor) is additionally coupled to N_R reservoir modes whose
/// energies follow a Lorentzian of center E_R and width Σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirParams {
    /// Acceptor energy E_N (eV).
    pub acceptor_energy: f64,
    /// Reservoir distribution center E_R (eV).
    pub reservoir_center: f64,
    /// Reservoir distribution width Σ (eV), strictly positive.
    pub reservoir_width: f64,
    /// Acceptor-reservoir coupling g_R (eV).
    pub reservoir_coupling: f64,
    /// Number of reservoir modes N_R.
    pub reservoir_mode_count: usize,
    /// Constant acceptor LDOS ν₀ (1/eV) used by the resonant transport rate.
    pub acceptor_ldos_const: f64,
}

impl ReservoirParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.reservoir_width > 0.0) {
            return Err(Error::InvalidParameter(
                "reservoir_width must be > 0".into(),
            ));
        }
        if self.reservoir_coupling < 0.0 {
            return Err(Error::InvalidParameter(
                "reservoir_coupling must be ≥ 0".into(),
            ));
        }
        if self.reservoir_mode_count < 1 {
            return Err(Error::InvalidParameter(
                "reservoir_mode_count must be ≥ 1".into(),
            ));
        }
        Ok(())
    }

    /// Lorentz-averaged reservoir weight N_R·g_R² (eV²): strength of the
    /// exact single-pole self-energy N_R g_R²/(z + iE_R + Σ).
    pub fn self_energy_weight(&self) -> f64 {
        self.reservoir_mode_count as f64 * self.reservoir_coupling * self.reservoir_coupling
    }
}

/// One disorder realization {E_j}.
///
/// `energies[0]` is the donor when a donor is configured; the last entry is
/// the acceptor in the transport setup. Regenerating with the same seed and
/// parameters reproduces the list bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderSample {
    pub energies: Vec<f64>,
    pub seed: u64,
    pub params_hash: u64,
}

impl DisorderSample {
    pub fn matches(&self, params: &SystemParams) -> bool {
        self.params_hash == params.digest() && self.energies.len() == params.emitter_count
    }
}

/// Probe-field coupling for absorption spectra (homogeneous D_j = D).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeParams {
    pub probe_coupling: f64,
}

/// Outcome of parameter validation: fatal violations plus non-fatal warnings.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Collect every invariant violation of `params`. Never aborts; the caller
/// decides what to do with the list.
pub fn validate(params: &SystemParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    if params.emitter_count < 1 {
        report.errors.push("emitter_count must be ≥ 1".into());
    }
    if !(params.coupling >= 0.0) {
        report.errors.push("coupling must be ≥ 0".into());
    }
    if !(params.disorder_width >= 0.0) {
        report.errors.push("disorder_width must be ≥ 0".into());
    }
    for (name, v) in [
        ("cavity_energy", params.cavity_energy),
        ("emitter_center", params.emitter_center),
        ("coupling", params.coupling),
        ("disorder_width", params.disorder_width),
    ] {
        if !v.is_finite() {
            report.errors.push(format!("{name} must be finite"));
        }
    }
    if report.is_ok() {
        let gn = params.collective_coupling();
        let scale = params.cavity_energy.min(params.emitter_center);
        if gn > 0.1 * scale {
            report.warnings.push(format!(
                "collective coupling g√N = {gn:.3e} eV exceeds 10% of min(E_C, E_M); \
                 outside the weak-coupling regime the model targets"
            ));
        }
    }
    report
}

/// Lorentz (Cauchy) probability density (1/eV) of the disorder model:
/// P(E) = (1/π)·σ/((E−E_M)² + σ²).
pub fn lorentz_pdf(energy: f64, center: f64, width: f64) -> Result<f64> {
    if !(width > 0.0) {
        return Err(Error::InvalidParameter(
            "lorentz_pdf requires σ > 0".into(),
        ));
    }
    let d = energy - center;
    Ok(width / (std::f64::consts::PI * (d * d + width * width)))
}

/// Closed-form Lorentz CDF (arctan antiderivative), used as the sampling and
/// quadrature reference.
pub fn lorentz_cdf(energy: f64, center: f64, width: f64) -> Result<f64> {
    if !(width > 0.0) {
        return Err(Error::InvalidParameter(
            "lorentz_cdf requires σ > 0".into(),
        ));
    }
    Ok(0.5 + ((energy - center) / width).atan() / std::f64::consts::PI)
}

fn inverse_cdf_draw(params: &SystemParams, rng: &mut ChaCha12Rng) -> f64 {
    // u strictly inside (0,1): gen::<f64>() yields [0,1); shift away from 0.
    let mut u: f64 = rng.gen();
    if u == 0.0 {
        u = f64::MIN_POSITIVE;
    }
    params.emitter_center
        + params.disorder_width * (std::f64::consts::PI * (u - 0.5)).tan()
}

/// Draw one disorder realization by inverse-CDF sampling,
/// E_j = E_M + σ·tan(π(u_j − ½)). Deterministic for a fixed seed.
///
/// σ = 0 returns the homogeneous sample (all E_j = E_M) without touching the
/// RNG. Tails are never truncated: the analytics assume the full distribution.
pub fn sample_disorder(params: &SystemParams, seed: u64) -> Result<DisorderSample> {
    sample_disorder_stream(params, seed, 0)
}

/// Like [`sample_disorder`], but draws from stream `stream` of the
/// counter-based generator. Ensembles assign one stream per sample index, so
/// parallel sampling is independent of worker scheduling.
pub fn sample_disorder_stream(
    params: &SystemParams,
    base_seed: u64,
    stream: u64,
) -> Result<DisorderSample> {
    let report = validate(params);
    if !report.is_ok() {
        return Err(Error::InvalidParameter(report.errors.join("; ")));
    }
    let energies = if params.disorder_width == 0.0 {
        vec![params.emitter_center; params.emitter_count]
    } else {
        let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
        rng.set_stream(stream);
        (0..params.emitter_count)
            .map(|_| inverse_cdf_draw(params, &mut rng))
            .collect()
    };
    Ok(DisorderSample {
        energies,
        seed: base_seed ^ stream.rotate_left(32),
        params_hash: params.digest(),
    })
}

/// Rejection-sampling variant with a hard cutoff |E_j − E_M| ≤ cutoff·σ, for
/// numerical experiments only. The cutoff biases heavy-tailed averages and
/// must be recorded in any output metadata.
pub fn sample_disorder_with_cutoff(
    params: &SystemParams,
    seed: u64,
    cutoff: f64,
) -> Result<DisorderSample> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidParameter("cutoff must be > 0".into()));
    }
    let mut base = sample_disorder(params, seed)?;
    if params.disorder_width == 0.0 {
        return Ok(base);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let bound = cutoff * params.disorder_width;
    for e in base.energies.iter_mut() {
        loop {
            let draw = inverse_cdf_draw(params, &mut rng);
            if (draw - params.emitter_center).abs() <= bound {
                *e = draw;
                break;
            }
        }
    }
    Ok(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig3_params() -> SystemParams {
        SystemParams::new(1.0, 1.0, 0.001, 2000, 0.04)
    }

    #[test]
    fn lorentz_pdf_peak_and_half_maximum() {
        // 1/(πσ) at the peak, half that at E_M ± σ.
        assert_relative_eq!(lorentz_pdf(1.0, 1.0, 0.04).unwrap(), 7.957747154594767, max_relative = 1e-12);
        assert_relative_eq!(lorentz_pdf(1.04, 1.0, 0.04).unwrap(), 3.9788735772973833, max_relative = 1e-12);
    }

    #[test]
    fn lorentz_pdf_symmetry() {
        // Exact symmetry in the offset E − E_M (center 0 keeps ±x exact).
        for x in [0.001, 0.04, 0.3, 2.0, 57.0] {
            assert_eq!(
                lorentz_pdf(x, 0.0, 0.04).unwrap(),
                lorentz_pdf(-x, 0.0, 0.04).unwrap()
            );
        }
        // Dyadic offsets stay exact around a nonzero center too.
        for x in [0.25, 0.5, 4.0] {
            assert_eq!(
                lorentz_pdf(1.0 + x, 1.0, 0.04).unwrap(),
                lorentz_pdf(1.0 - x, 1.0, 0.04).unwrap()
            );
        }
    }

    #[test]
    fn lorentz_pdf_rejects_nonpositive_width() {
        assert!(lorentz_pdf(1.0, 1.0, 0.0).is_err());
        assert!(lorentz_pdf(1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn lorentz_pdf_normalizes_against_cdf() {
        // Trapezoid over E_M ± 10⁴σ vs the arctan antiderivative.
        let (center, width) = (1.0, 0.04);
        let lo = center - 1e4 * width;
        let hi = center + 1e4 * width;
        let n = 4_000_001usize;
        let dx = (hi - lo) / (n - 1) as f64;
        let mut acc = 0.0;
        let mut prev = lorentz_pdf(lo, center, width).unwrap();
        for i in 1..n {
            let f = lorentz_pdf(lo + i as f64 * dx, center, width).unwrap();
            acc += 0.5 * (prev + f) * dx;
            prev = f;
        }
        let reference =
            lorentz_cdf(hi, center, width).unwrap() - lorentz_cdf(lo, center, width).unwrap();
        assert_relative_eq!(acc, reference, epsilon = 1e-6);
        assert_relative_eq!(reference, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = fig3_params();
        let a = sample_disorder(&p, 42).unwrap();
        let b = sample_disorder(&p, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_disorder(&p, 43).unwrap();
        assert_ne!(a.energies, c.energies);
    }

    #[test]
    fn sampling_streams_are_distinct_but_reproducible() {
        let p = fig3_params();
        let a = sample_disorder_stream(&p, 7, 3).unwrap();
        let b = sample_disorder_stream(&p, 7, 3).unwrap();
        let c = sample_disorder_stream(&p, 7, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.energies, c.energies);
    }

    #[test]
    fn zero_width_gives_homogeneous_sample() {
        let p = SystemParams::new(1.0, 1.0, 0.001, 50, 0.0);
        let s = sample_disorder(&p, 1).unwrap();
        assert!(s.energies.iter().all(|&e| e == 1.0));
    }

    #[test]
    fn inverse_cdf_hits_known_quantiles() {
        // u = 0.5 is the median (E_M); u = 0.75 gives E_M + σ since tan(π/4)=1.
        let p = SystemParams::new(1.0, 1.0, 0.001, 1, 0.04);
        let median = p.emitter_center
            + p.disorder_width * (std::f64::consts::PI * (0.5 - 0.5)).tan();
        assert_eq!(median, 1.0);
        let q75 = p.emitter_center
            + p.disorder_width * (std::f64::consts::PI * (0.75 - 0.5)).tan();
        assert_relative_eq!(q75, 1.04, max_relative = 1e-12);
    }

    #[test]
    fn empirical_cdf_matches_lorentz_cdf() {
        // Kolmogorov–Smirnov statistic of 10⁶ draws against the arctan CDF.
        let p = SystemParams::new(1.0, 1.0, 0.001, 1_000_000, 0.04);
        let mut e = sample_disorder(&p, 2024).unwrap().energies;
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = e.len() as f64;
        let mut ks = 0.0f64;
        for (i, &x) in e.iter().enumerate() {
            let f = lorentz_cdf(x, 1.0, 0.04).unwrap();
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            ks = ks.max((f - lo).abs()).max((f - hi).abs());
        }
        assert!(ks < 0.002, "KS statistic {ks} too large");
    }

    #[test]
    fn validate_accepts_reference_parameters() {
        assert!(validate(&fig3_params()).is_ok());
    }

    #[test]
    fn validate_flags_violations() {
        let bad = SystemParams::new(1.0, 1.0, 0.001, 0, -0.1);
        let report = validate(&bad);
        assert!(report.errors.iter().any(|e| e.contains("emitter_count")));
        assert!(report.errors.iter().any(|e| e.contains("disorder_width")));
    }

    #[test]
    fn validate_warns_on_ultrastrong_coupling() {
        let strong = SystemParams::new(1.0, 1.0, 0.01, 2000, 0.04);
        let report = validate(&strong);
        assert!(report.is_ok());
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn cutoff_sampling_respects_bound() {
        let p = fig3_params();
        let s = sample_disorder_with_cutoff(&p, 5, 3.0).unwrap();
        assert!(s
            .energies
            .iter()
            .all(|&e| (e - 1.0).abs() <= 3.0 * 0.04 + 1e-15));
    }

    proptest! {
        #[test]
        fn pdf_positive_and_symmetric(x in -1e3f64..1e3, width in 1e-6f64..10.0) {
            let up = lorentz_pdf(x, 0.0, width).unwrap();
            let dn = lorentz_pdf(-x, 0.0, width).unwrap();
            prop_assert!(up > 0.0);
            prop_assert_eq!(up, dn);
        }

        #[test]
        fn samples_reproducible(seed in any::<u64>(), stream in any::<u64>()) {
            let p = SystemParams::new(1.0, 1.0, 0.001, 16, 0.04);
            let a = sample_disorder_stream(&p, seed, stream).unwrap();
            let b = sample_disorder_stream(&p, seed, stream).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
