//! Reusable numerical tools: first-order polynomial perturbation theory (PPT)
//! for root corrections, the exact stochastic mapping (ESM) expansion of a
//! half-plane-analytic function into an imaginary-axis pole sum, and the
//! Laplace-space rate fitter used by the finite-size ensemble.

use crate::core::{C64, Error, Result};

pub type ComplexFn = Box<dyn Fn(C64) -> C64 + Sync + Send>;

/// A characteristic-polynomial split P = P₀ + P₁: the roots of P₀ plus the
/// perturbation callable (and optionally its analytic derivative; central
/// differences otherwise).
pub struct PptProblem {
    pub unperturbed_roots: Vec<C64>,
    pub perturbation: ComplexFn,
    pub derivative: Option<ComplexFn>,
}

/// Central-difference step used when no analytic derivative is supplied.
fn fd_step(z: C64) -> f64 {
    1e-7 * z.norm().max(1.0)
}

impl PptProblem {
    pub fn new(unperturbed_roots: Vec<C64>, perturbation: ComplexFn) -> Self {
        Self {
            unperturbed_roots,
            perturbation,
            derivative: None,
        }
    }

    pub fn with_derivative(mut self, derivative: ComplexFn) -> Self {
        self.derivative = Some(derivative);
        self
    }

    fn derivative_at(&self, z: C64) -> C64 {
        match &self.derivative {
            Some(d) => d(z),
            None => {
                let h = fd_step(z);
                ((self.perturbation)(z + h) - (self.perturbation)(z - h)) / (2.0 * h)
            }
        }
    }

    /// Consistency check of a supplied analytic derivative against central
    /// differences at one probe point (relative error < 10⁻⁶).
    pub fn validate_derivative(&self, probe: C64) -> Result<()> {
        let Some(d) = &self.derivative else {
            return Ok(());
        };
        let h = fd_step(probe);
        let fd = ((self.perturbation)(probe + h) - (self.perturbation)(probe - h)) / (2.0 * h);
        let analytic = d(probe);
        let scale = analytic.norm().max(fd.norm());
        if scale > 0.0 && (analytic - fd).norm() > 1e-6 * scale {
            return Err(Error::InvalidParameter(format!(
                "PPT derivative inconsistent with perturbation at probe {probe}: \
                 analytic {analytic}, finite-difference {fd}"
            )));
        }
        Ok(())
    }
}

/// First-order root corrections
///   δ_μ' = −P₁(z_μ'⁰) / (Π_{μ≠μ'}(z_μ'⁰ − z_μ⁰) + ∂_z P₁(z_μ'⁰)),
/// which interpolates between non-degenerate (product-dominated) and
/// degenerate (derivative-dominated) perturbation theory.
pub fn ppt_corrections(problem: &PptProblem) -> Result<Vec<C64>> {
    if problem.unperturbed_roots.is_empty() {
        return Err(Error::InvalidParameter(
            "PPT needs at least one unperturbed root".into(),
        ));
    }
    let roots = &problem.unperturbed_roots;
    let mut out = Vec::with_capacity(roots.len());
    for (mu, &z0) in roots.iter().enumerate() {
        let mut product = C64::new(1.0, 0.0);
        for (nu, &z) in roots.iter().enumerate() {
            if nu != mu {
                product *= z0 - z;
            }
        }
        let denom = product + problem.derivative_at(z0);
        let p1 = (problem.perturbation)(z0);
        if denom.norm() == 0.0 {
            if p1.norm() == 0.0 {
                // 0/0: the root is unshifted at first order (degenerate case
                // with a perturbation vanishing at the root).
                out.push(C64::new(0.0, 0.0));
                continue;
            }
            return Err(Error::DegenerateBreakdown(mu));
        }
        out.push(-p1 / denom);
    }
    Ok(out)
}

/// ESM expansion data: F(z) ≈ Σ_j i·r_j/(z − iE_j).
#[derive(Debug, Clone)]
pub struct EsmExpansion {
    pub pole_positions: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl EsmExpansion {
    pub fn reconstruct(&self, z: C64) -> C64 {
        self.pole_positions
            .iter()
            .zip(&self.coefficients)
            .map(|(&e, &r)| C64::i() * r / (z - C64::new(0.0, e)))
            .sum()
    }
}

/// Expansion coefficients r_j = (1/π)·Im F(iE_j)/ν(E_j) of the exact
/// stochastic mapping over the supplied pole set with density ν. The caller
/// asserts F is analytic in one half-plane; the real part of the
/// reconstruction is then consistent automatically (Kramers–Kronig).
pub fn esm_expand(
    target: impl Fn(C64) -> C64,
    pole_positions: &[f64],
    density: impl Fn(f64) -> f64,
) -> Result<EsmExpansion> {
    let mut coefficients = Vec::with_capacity(pole_positions.len());
    for &e in pole_positions {
        let nu = density(e);
        if !(nu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ESM pole density must be positive; ν({e}) = {nu}"
            )));
        }
        coefficients.push(target(C64::new(0.0, e)).im / (std::f64::consts::PI * nu));
    }
    Ok(EsmExpansion {
        pole_positions: pole_positions.to_vec(),
        coefficients,
    })
}

/// Extract the decay rate of a donor level at E₁ from its Laplace-space
/// Green's function: the single-pole inversion
///   r(δ) = 2·Re[(1 − (z+iE₁)·G(z))/G(z)],  z = −iE₁ + δ,
/// sharpened by 3-point Richardson extrapolation over δ, δ/2, δ/4 to cancel
/// the Lorentzian broadening bias of a finite offset. Exact (and
/// δ-independent) on any single-pole G.
pub fn fit_rate_from_greens(
    greens: impl Fn(C64) -> C64,
    e1: f64,
    delta: f64,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter("fit offset δ must be > 0".into()));
    }
    let node = |d: f64| -> Result<f64> {
        let z = C64::new(d, -e1);
        let g = greens(z);
        if g.norm() == 0.0 {
            return Err(Error::NumericFailure(
                "fit_rate_from_greens: G(z) vanished at the fit point".into(),
            ));
        }
        Ok(2.0 * ((C64::new(1.0, 0.0) - (z + C64::new(0.0, e1)) * g) / g).re)
    };
    let r1 = node(delta)?;
    let r2 = node(delta / 2.0)?;
    let r4 = node(delta / 4.0)?;
    Ok((8.0 * r4 - 6.0 * r2 + r1) / 3.0)
}

/// Default fitting offset √(Ω/ν(E₁)): the geometric mean of the admissible
/// window 1/ν(E₁) ≪ δ ≪ Ω.
pub fn default_fit_offset(rabi_frequency: f64, nu_e1: f64) -> f64 {
    (rabi_frequency / nu_e1).sqrt()
}

/// Order-independent pairwise summation (error O(log n) ulps), used for all
/// ensemble reductions so results do not depend on the reduction tree.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}
