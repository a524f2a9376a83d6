//! Disorder-averaged effective non-Hermitian 2×2 Hamiltonian of cavity and
//! bright state, its complex eigenenergies, exceptional-point classification,
//! and the small-/large-disorder asymptotic expansions.

use crate::core::{C64, Error, Result, SystemParams};

/// Tolerance for "resonant" (|E_C − E_M|) and "at the exceptional point"
/// (|σ − Ω|) classification, in eV.
pub const CLASSIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Underdamped,
    ExceptionalPoint,
    Overdamped,
    OffResonant,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Underdamped => "underdamped",
            Regime::ExceptionalPoint => "exceptional-point",
            Regime::Overdamped => "overdamped",
            Regime::OffResonant => "off-resonant",
        };
        write!(f, "{s}")
    }
}

/// The two complex polariton eigenenergies of the effective Hamiltonian,
/// ordered so Re ε₁ ≤ Re ε₂ (ties broken by Im ε₁ ≤ Im ε₂).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub eps1: C64,
    pub eps2: C64,
    /// Rabi splitting Re(ε₂ − ε₁) of the disordered system (eV).
    pub rabi_splitting: f64,
    pub regime: Regime,
}

/// Effective 2×2 block together with the scalar dark-state block E_M − iσ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveHamiltonian {
    /// Row-major [[E_C, Ω/2], [Ω/2, E_M − iσ]].
    pub matrix: [[C64; 2]; 2],
    /// Dark-state block, identical for every k: E_M − iσ.
    pub dark_block: C64,
}

/// The cavity/bright-state block [[E_C, Ω/2],[Ω/2, E_M−iσ]] with Ω = 2g√N,
/// plus the (scalar) dark-state block.
pub fn effective_hamiltonian(params: &SystemParams) -> EffectiveHamiltonian {
    let half_omega = params.collective_coupling();
    let em_sigma = C64::new(params.emitter_center, -params.disorder_width);
    EffectiveHamiltonian {
        matrix: [
            [C64::new(params.cavity_energy, 0.0), C64::new(half_omega, 0.0)],
            [C64::new(half_omega, 0.0), em_sigma],
        ],
        dark_block: em_sigma,
    }
}

fn order(a: C64, b: C64) -> (C64, C64) {
    if a.re < b.re || (a.re == b.re && a.im <= b.im) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Complex eigenenergies ε_{1,2} = (E_C + E_M − iσ)/2 ∓ ½√((E_C−E_M+iσ)² + Ω²)
/// with the principal-branch square root, ordered as in [`EigenPair`].
pub fn eigenenergies(params: &SystemParams) -> EigenPair {
    let omega = params.rabi_frequency();
    let d = C64::new(
        params.cavity_energy - params.emitter_center,
        params.disorder_width,
    );
    let mean = C64::new(
        params.cavity_energy + params.emitter_center,
        -params.disorder_width,
    ) / 2.0;
    let root = (d * d + C64::new(omega * omega, 0.0)).sqrt() / 2.0;
    let (eps1, eps2) = order(mean - root, mean + root);
    EigenPair {
        eps1,
        eps2,
        rabi_splitting: eps2.re - eps1.re,
        regime: classify_regime(params),
    }
}

/// Label the disorder regime of the resonant system; anything detuned beyond
/// tolerance is `OffResonant` (no exceptional point exists off resonance).
pub fn classify_regime(params: &SystemParams) -> Regime {
    if (params.cavity_energy - params.emitter_center).abs() > CLASSIFY_TOL {
        return Regime::OffResonant;
    }
    let omega = params.rabi_frequency();
    let sigma = params.disorder_width;
    if (sigma - omega).abs() <= CLASSIFY_TOL {
        Regime::ExceptionalPoint
    } else if sigma < omega {
        Regime::Underdamped
    } else {
        Regime::Overdamped
    }
}

/// Asymptotic eigenenergies of the resonant system:
///   σ ≪ Ω: ε_{1,2} = E_M − iσ/2 ∓ (Ω/2 − σ²/(4Ω)),
///   σ ≫ Ω: ε₁ = E_M − iσ + iΩ²/(4σ), ε₂ = E_M − iΩ²/(4σ),
/// valid for σ/Ω < 0.3 or σ/Ω > 3 (guarded).
pub fn asymptotic_eigenenergies(params: &SystemParams) -> Result<EigenPair> {
    if (params.cavity_energy - params.emitter_center).abs() > CLASSIFY_TOL {
        return Err(Error::OutOfValidity(
            "asymptotic eigenenergies are derived for the resonant system".into(),
        ));
    }
    let omega = params.rabi_frequency();
    let sigma = params.disorder_width;
    if omega <= 0.0 {
        return Err(Error::OutOfValidity("requires Ω > 0".into()));
    }
    let ratio = sigma / omega;
    let em = params.emitter_center;
    let (eps1, eps2) = if ratio < 0.3 {
        let split = omega / 2.0 - sigma * sigma / (4.0 * omega);
        (
            C64::new(em - split, -sigma / 2.0),
            C64::new(em + split, -sigma / 2.0),
        )
    } else if ratio > 3.0 {
        let shift = omega * omega / (4.0 * sigma);
        (
            C64::new(em, -sigma + shift),
            C64::new(em, -shift),
        )
    } else {
        return Err(Error::OutOfValidity(format!(
            "σ/Ω = {ratio:.3} is mid-regime; the expansions need σ/Ω < 0.3 or > 3"
        )));
    };
    let (eps1, eps2) = order(eps1, eps2);
    Ok(EigenPair {
        eps1,
        eps2,
        rabi_splitting: eps2.re - eps1.re,
        regime: classify_regime(params),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn resonant(sigma: f64) -> SystemParams {
        SystemParams::new(1.0, 1.0, 0.001, 2000, sigma)
    }

    /// Dense 2×2 complex eigenvalues (quadratic formula on the matrix
    /// entries), as an independent check of the closed form.
    fn dense_eigs(h: &EffectiveHamiltonian) -> (C64, C64) {
        let [[a, b], [c, d]] = h.matrix;
        let tr = a + d;
        let det = a * d - b * c;
        let disc = (tr * tr - 4.0 * det).sqrt();
        order((tr - disc) / 2.0, (tr + disc) / 2.0)
    }

    #[test]
    fn hamiltonian_structure() {
        let p = resonant(0.04);
        let h = effective_hamiltonian(&p);
        assert_relative_eq!(h.matrix[0][1].re, 0.0447213595499958, max_relative = 1e-12);
        assert_eq!(h.matrix[0][1], h.matrix[1][0]);
        assert_eq!(h.dark_block, C64::new(1.0, -0.04));
        // σ=0 is Hermitian.
        let h0 = effective_hamiltonian(&resonant(0.0));
        assert_eq!(h0.matrix[1][1].im, 0.0);
    }

    #[test]
    fn underdamped_reference() {
        let e = eigenenergies(&resonant(0.04));
        assert_relative_eq!(e.eps1.re, 0.96, max_relative = 1e-12);
        assert_relative_eq!(e.eps1.im, -0.02, max_relative = 1e-12);
        assert_relative_eq!(e.eps2.re, 1.04, max_relative = 1e-12);
        assert_relative_eq!(e.eps2.im, -0.02, max_relative = 1e-12);
        assert_eq!(e.regime, Regime::Underdamped);
    }

    #[test]
    fn overdamped_reference() {
        let e = eigenenergies(&resonant(0.15));
        assert_relative_eq!(e.eps1.re, 1.0, max_relative = 1e-12);
        assert_relative_eq!(e.eps2.re, 1.0, max_relative = 1e-12);
        assert_relative_eq!(e.eps1.im, -0.13520797289396418, max_relative = 1e-6);
        assert_relative_eq!(e.eps2.im, -0.014792027106035815, max_relative = 1e-6);
        assert_eq!(e.regime, Regime::Overdamped);
    }

    #[test]
    fn clean_limit_polaritons() {
        let e = eigenenergies(&resonant(0.0));
        assert_relative_eq!(e.eps1.re, 1.0 - 0.0447213595499958, max_relative = 1e-12);
        assert_relative_eq!(e.eps2.re, 1.0 + 0.0447213595499958, max_relative = 1e-12);
        assert_eq!(e.eps1.im, 0.0);
        assert_eq!(e.eps2.im, 0.0);
    }

    #[test]
    fn trace_and_product_identities() {
        for (ec, em, sigma) in [(1.0, 1.0, 0.04), (1.05, 0.95, 0.1), (1.0, 1.0, 0.15), (0.9, 1.1, 0.01)] {
            let p = SystemParams::new(ec, em, 0.001, 2000, sigma);
            let e = eigenenergies(&p);
            let tr = e.eps1 + e.eps2;
            assert!((tr - C64::new(ec + em, -sigma)).norm() < 1e-12);
            let shift = C64::new(-em, sigma);
            let prod = (e.eps1 + shift) * (e.eps2 + shift);
            let g2n = p.coupling * p.coupling * p.emitter_count as f64;
            assert!((prod + C64::new(g2n, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn matches_dense_2x2_eigensolve() {
        // Points away from the exceptional point: the quadratic-formula
        // oracle loses √ε accuracy where the discriminant vanishes.
        for (ec, em, sigma) in [(1.0, 1.0, 0.04), (1.0, 1.0, 0.2), (1.02, 0.98, 0.2)] {
            let p = SystemParams::new(ec, em, 0.001, 2000, sigma);
            let closed = eigenenergies(&p);
            let (d1, d2) = dense_eigs(&effective_hamiltonian(&p));
            assert!((closed.eps1 - d1).norm() < 1e-12);
            assert!((closed.eps2 - d2).norm() < 1e-12);
        }
    }

    #[test]
    fn regime_classification() {
        assert_eq!(classify_regime(&resonant(0.04)), Regime::Underdamped);
        assert_eq!(
            classify_regime(&resonant(0.0894427190999916)),
            Regime::ExceptionalPoint
        );
        assert_eq!(classify_regime(&resonant(0.15)), Regime::Overdamped);
        let off = SystemParams::new(1.05, 0.95, 0.001, 2000, 0.04);
        assert_eq!(classify_regime(&off), Regime::OffResonant);
    }

    #[test]
    fn resonant_exact_symmetries() {
        // σ < Ω: both Im = −σ/2 exactly; σ > Ω: both Re = E_M exactly.
        let under = eigenenergies(&resonant(0.05));
        assert_eq!(under.eps1.im, -0.025);
        assert_eq!(under.eps2.im, -0.025);
        let over = eigenenergies(&resonant(0.3));
        assert_eq!(over.eps1.re, 1.0);
        assert_eq!(over.eps2.re, 1.0);
    }

    #[test]
    fn asymptotics_small_and_large_sigma() {
        let p = resonant(0.0008944271909999159); // σ = 0.01·Ω
        let asym = asymptotic_eigenenergies(&p).unwrap();
        let exact = eigenenergies(&p);
        let omega = p.rabi_frequency();
        assert!((asym.eps1 - exact.eps1).norm() < 1e-4 * omega);
        assert!((asym.eps2 - exact.eps2).norm() < 1e-4 * omega);
        assert_eq!(asym.eps1.im, -p.disorder_width / 2.0);
        assert_eq!(asym.eps2.im, -p.disorder_width / 2.0);

        let pl = resonant(2.0);
        let asym = asymptotic_eigenenergies(&pl).unwrap();
        let omega = pl.rabi_frequency();
        let shift = omega * omega / (4.0 * 2.0);
        assert_relative_eq!(asym.eps2.im, -shift, max_relative = 1e-12);
        assert_eq!(asym.eps2.re, 1.0);
        let exact = eigenenergies(&pl);
        assert!((asym.eps1 - exact.eps1).norm() < 1e-4 * omega);
        assert!((asym.eps2 - exact.eps2).norm() < 1e-4 * omega);
    }

    #[test]
    fn asymptotics_guard_rejects_midregime() {
        assert!(asymptotic_eigenenergies(&resonant(0.0894)).is_err());
        let off = SystemParams::new(1.05, 0.95, 0.001, 2000, 0.001);
        assert!(asymptotic_eigenenergies(&off).is_err());
    }

    #[test]
    fn decay_only_and_splitting_nonnegative() {
        for sigma in [0.0, 0.01, 0.0894427191, 0.12, 0.5, 3.0] {
            let e = eigenenergies(&resonant(sigma));
            assert!(e.eps1.im <= 0.0 && e.eps2.im <= 0.0);
            assert!(e.rabi_splitting >= 0.0);
        }
    }
}
