//! Exact single-particle retarded Green's functions in Laplace space for an
//! arbitrary finite disorder sample, their disorder-averaged thermodynamic
//! forms, and the residue-based inverse Laplace transform.
//!
//! Conventions: the resolvent is G(z) = (z·1 + iH)⁻¹, so a free level E
//! contributes 1/(z + iE) and the physical (retarded) spectral weight at
//! real frequency ω is (1/π)·Re G(−iω + δ), δ → 0⁺. All poles of a lossless
//! finite sample therefore sit on the imaginary axis, z_α = −iE_α.

use crate::core::{C64, DisorderSample, Error, Result, SystemParams};

/// Which constituent of the single-excitation space an element refers to.
///
/// `Emitter(j)` and `DarkState(k)` are 1-based: 1 ≤ j ≤ N, 1 ≤ k ≤ N−1.
/// The dark states are the standard orthonormal combinations
/// |DS_k⟩ = (|1⟩ + … + |k⟩ − k|k+1⟩)/√(k(k+1)), orthogonal to the bright
/// state |BS⟩ = Σ_j |j⟩/√N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteIndex {
    Cavity,
    Emitter(usize),
    BrightState,
    DarkState(usize),
}

/// A Green's function element as a finite pole sum Σ_α A_α/(z − z_α).
#[derive(Debug, Clone)]
pub struct PoleExpansion {
    pub poles: Vec<C64>,
    pub amplitudes: Vec<C64>,
}

impl PoleExpansion {
    /// Evaluate the pole sum at a Laplace point z.
    pub fn evaluate(&self, z: C64) -> C64 {
        self.poles
            .iter()
            .zip(&self.amplitudes)
            .map(|(&p, &a)| a / (z - p))
            .sum()
    }
}

/// Time-domain value Σ_α A_α·exp(z_α t) of a pole expansion (the residue
/// inverse Laplace transform). Errors for t < 0: the function is retarded.
pub fn inverse_laplace(expansion: &PoleExpansion, t: f64) -> Result<C64> {
    if t < 0.0 {
        return Err(Error::Domain(
            "inverse_laplace is defined for t ≥ 0 only (retarded function)".into(),
        ));
    }
    Ok(expansion
        .poles
        .iter()
        .zip(&expansion.amplitudes)
        .map(|(&p, &a)| a * (p * t).exp())
        .sum())
}

const POLE_TOL: f64 = 1e-12;

fn check_pole_collision(z: C64, energies: &[f64]) -> Result<()> {
    for (j, &e) in energies.iter().enumerate() {
        let d = z + C64::new(0.0, e);
        if d.norm() < POLE_TOL * e.abs().max(1.0) {
            return Err(Error::PoleCollision {
                index: j + 1,
                energy: e,
            });
        }
    }
    Ok(())
}

/// The auxiliary cavity energy E_C(z) = E_C − i·Σ_j g²/(z + iE_j) that closes
/// the cavity equation of motion exactly for any finite sample.
pub fn aux_cavity_energy(
    z: C64,
    sample: &DisorderSample,
    params: &SystemParams,
) -> Result<C64> {
    check_pole_collision(z, &sample.energies)?;
    let g2 = params.coupling * params.coupling;
    let sum: C64 = sample
        .energies
        .iter()
        .map(|&e| (z + C64::new(0.0, e)).inv())
        .sum();
    Ok(C64::new(params.cavity_energy, 0.0) - C64::i() * g2 * sum)
}

// ---------------------------------------------------------------------------
// Site coefficient patterns
// ---------------------------------------------------------------------------

/// Expansion of a SiteIndex over {cavity} ∪ {emitters}: a cavity amplitude
/// plus a structured emitter coefficient pattern (kept symbolic so bright- and
/// dark-state elements stay O(N) and the disorder-averaged forms stay O(1)).
#[derive(Debug, Clone, Copy)]
enum EmitterPattern {
    None,
    /// One-hot on 0-based emitter index.
    Single(usize),
    /// 1/√N on every emitter.
    Uniform,
    /// Dark state k: 1/√(k(k+1)) on 0-based indices 0..k, −k/√(k(k+1)) on k.
    Dark(usize),
}

#[derive(Debug, Clone, Copy)]
struct SiteCoeffs {
    cavity: f64,
    pattern: EmitterPattern,
}

fn site_coeffs(x: SiteIndex, n: usize) -> Result<SiteCoeffs> {
    match x {
        SiteIndex::Cavity => Ok(SiteCoeffs {
            cavity: 1.0,
            pattern: EmitterPattern::None,
        }),
        SiteIndex::Emitter(j) => {
            if j < 1 || j > n {
                return Err(Error::Unsupported(format!(
                    "emitter index {j} out of range 1..={n}"
                )));
            }
            Ok(SiteCoeffs {
                cavity: 0.0,
                pattern: EmitterPattern::Single(j - 1),
            })
        }
        SiteIndex::BrightState => Ok(SiteCoeffs {
            cavity: 0.0,
            pattern: EmitterPattern::Uniform,
        }),
        SiteIndex::DarkState(k) => {
            if n < 2 || k < 1 || k > n - 1 {
                return Err(Error::Unsupported(format!(
                    "dark-state index {k} out of range 1..={}",
                    n.saturating_sub(1)
                )));
            }
            Ok(SiteCoeffs {
                cavity: 0.0,
                pattern: EmitterPattern::Dark(k),
            })
        }
    }
}

/// Visit the (index, coefficient) support of a pattern.
fn for_each_coeff(pattern: EmitterPattern, n: usize, mut f: impl FnMut(usize, f64)) {
    match pattern {
        EmitterPattern::None => {}
        EmitterPattern::Single(j) => f(j, 1.0),
        EmitterPattern::Uniform => {
            let c = 1.0 / (n as f64).sqrt();
            for j in 0..n {
                f(j, c);
            }
        }
        EmitterPattern::Dark(k) => {
            let c = 1.0 / (k as f64 * (k as f64 + 1.0)).sqrt();
            for j in 0..k {
                f(j, c);
            }
            f(k, -(k as f64) * c);
        }
    }
}

fn coeff_at(pattern: EmitterPattern, j: usize, n: usize) -> f64 {
    match pattern {
        EmitterPattern::None => 0.0,
        EmitterPattern::Single(i) => (i == j) as u64 as f64,
        EmitterPattern::Uniform => 1.0 / (n as f64).sqrt(),
        EmitterPattern::Dark(k) => {
            let c = 1.0 / (k as f64 * (k as f64 + 1.0)).sqrt();
            if j < k {
                c
            } else if j == k {
                -(k as f64) * c
            } else {
                0.0
            }
        }
    }
}

/// Σ_j c_j (closed form per pattern).
fn coeff_sum(pattern: EmitterPattern, n: usize) -> f64 {
    match pattern {
        EmitterPattern::None => 0.0,
        EmitterPattern::Single(_) => 1.0,
        EmitterPattern::Uniform => (n as f64).sqrt(),
        EmitterPattern::Dark(_) => 0.0,
    }
}

/// Σ_j c_j d_j (closed form per pattern pair).
fn coeff_dot(a: EmitterPattern, b: EmitterPattern, n: usize) -> f64 {
    use EmitterPattern::*;
    match (a, b) {
        (None, _) | (_, None) => 0.0,
        (Single(i), _) => coeff_at(b, i, n),
        (_, Single(j)) => coeff_at(a, j, n),
        (Uniform, Uniform) => 1.0,
        (Uniform, Dark(_)) | (Dark(_), Uniform) => 0.0,
        (Dark(k), Dark(l)) => (k == l) as u64 as f64,
    }
}

// ---------------------------------------------------------------------------
// Finite-sample elements
// ---------------------------------------------------------------------------

/// Σ_j c_j/(z + iE_j); `sum_all` is the precomputed full sum Σ_j 1/(z+iE_j).
fn weighted_resolvent_sum(
    pattern: EmitterPattern,
    z: C64,
    energies: &[f64],
    sum_all: C64,
) -> C64 {
    match pattern {
        EmitterPattern::None => C64::new(0.0, 0.0),
        EmitterPattern::Uniform => sum_all / (energies.len() as f64).sqrt(),
        _ => {
            let mut acc = C64::new(0.0, 0.0);
            for_each_coeff(pattern, energies.len(), |j, c| {
                acc += c * (z + C64::new(0.0, energies[j])).inv();
            });
            acc
        }
    }
}

/// Σ_j c_j d_j/(z + iE_j).
fn paired_resolvent_sum(
    a: EmitterPattern,
    b: EmitterPattern,
    z: C64,
    energies: &[f64],
    sum_all: C64,
) -> C64 {
    use EmitterPattern::*;
    let n = energies.len();
    match (a, b) {
        (None, _) | (_, None) => C64::new(0.0, 0.0),
        (Single(i), _) => coeff_at(b, i, n) * (z + C64::new(0.0, energies[i])).inv(),
        (_, Single(j)) => coeff_at(a, j, n) * (z + C64::new(0.0, energies[j])).inv(),
        (Uniform, Uniform) => sum_all / n as f64,
        (Uniform, Dark(_)) => weighted_resolvent_sum(b, z, energies, sum_all) / (n as f64).sqrt(),
        (Dark(_), Uniform) => weighted_resolvent_sum(a, z, energies, sum_all) / (n as f64).sqrt(),
        (Dark(k), Dark(l)) => {
            let kmin = k.min(l);
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..=kmin {
                acc += coeff_at(a, j, n) * coeff_at(b, j, n)
                    * (z + C64::new(0.0, energies[j])).inv();
            }
            acc
        }
    }
}

/// Exact Laplace-space Green's function element G_{X,Y}(z) of one disorder
/// sample: the resolvent element of the (N+1)-dimensional arrowhead
/// Hamiltonian, written in the O(N) closed form
///   G_CC  = 1/(z + iE_C(z)),
///   G_Cj  = −i g /((z + iE_C(z))(z + iE_j))  (= G_jC),
///   G_ij  = δ_ij/(z + iE_i) − g²/((z + iE_i)(z + iE_C(z))(z + iE_j)),
/// with bright/dark elements obtained by the corresponding unitary sums.
pub fn greens_element(
    x: SiteIndex,
    y: SiteIndex,
    z: C64,
    sample: &DisorderSample,
    params: &SystemParams,
) -> Result<C64> {
    let n = params.emitter_count;
    let cx = site_coeffs(x, n)?;
    let cy = site_coeffs(y, n)?;
    check_pole_collision(z, &sample.energies)?;

    let g = params.coupling;
    let sum_all: C64 = sample
        .energies
        .iter()
        .map(|&e| (z + C64::new(0.0, e)).inv())
        .sum();
    // z + iE_C(z), the dressed cavity denominator.
    let dc = z + C64::new(0.0, params.cavity_energy) + g * g * sum_all;
    if dc.norm() == 0.0 {
        return Err(Error::NumericFailure(
            "greens_element: dressed cavity denominator vanished".into(),
        ));
    }

    let sx = weighted_resolvent_sum(cx.pattern, z, &sample.energies, sum_all);
    let sy = weighted_resolvent_sum(cy.pattern, z, &sample.energies, sum_all);
    let txy = paired_resolvent_sum(cx.pattern, cy.pattern, z, &sample.energies, sum_all);

    let cross = -C64::i() * g * (cx.cavity * sy + cy.cavity * sx) / dc;
    // Note (sx*sy) is grouped so G_{X,Y} = G_{Y,X} holds bit-for-bit.
    Ok(cx.cavity * cy.cavity / dc + cross + txy - g * g * (sx * sy) / dc)
}

/// Disorder-averaged Green's function element in the thermodynamic limit:
/// exactly the finite-sample form with every E_j replaced by E_M − iσ, i.e.
/// with the uniform emitter denominator w = z + iE_M + σ and the dressed
/// cavity denominator z + iE_C + g²N/w.
pub fn averaged_greens_element(
    x: SiteIndex,
    y: SiteIndex,
    z: C64,
    params: &SystemParams,
) -> Result<C64> {
    let n = params.emitter_count;
    let cx = site_coeffs(x, n)?;
    let cy = site_coeffs(y, n)?;

    let g = params.coupling;
    let w = z + C64::new(params.disorder_width, params.emitter_center);
    if w.norm() == 0.0 {
        return Err(Error::Domain(
            "averaged_greens_element needs σ > 0 or z off the emitter pole".into(),
        ));
    }
    let dc = z + C64::new(0.0, params.cavity_energy) + g * g * n as f64 / w;
    if dc.norm() == 0.0 {
        return Err(Error::NumericFailure(
            "averaged_greens_element: dressed cavity denominator vanished".into(),
        ));
    }

    let sx = coeff_sum(cx.pattern, n) / w;
    let sy = coeff_sum(cy.pattern, n) / w;
    let txy = coeff_dot(cx.pattern, cy.pattern, n) / w;

    let cross = -C64::i() * g * (cx.cavity * sy + cy.cavity * sx) / dc;
    Ok(cx.cavity * cy.cavity / dc + cross + txy - g * g * (sx * sy) / dc)
}

// ---------------------------------------------------------------------------
// Arrowhead eigensolver (secular equation)
// ---------------------------------------------------------------------------

/// Default size guard for the dense/secular eigensolve path.
pub const DEFAULT_EIGEN_GUARD: usize = 100_000;

/// One root of the secular equation, stored as an offset `t` from its anchor
/// pole so the (possibly tiny) gap λ − E_anchor keeps full relative precision.
#[derive(Debug, Clone, Copy)]
struct SecularRoot {
    lambda: f64,
    anchor: usize,
    t: f64,
}

/// Spectral decomposition data of the arrowhead Hamiltonian
/// H = diag(E_C, E_1..E_N) + g·(|C⟩⟨row| + h.c.).
struct ArrowheadDecomp {
    /// Unique emitter energies, ascending.
    unique: Vec<f64>,
    /// Multiplicity of each unique value.
    mult: Vec<usize>,
    /// Original emitter index → unique index.
    map: Vec<usize>,
    /// Original emitter indices grouped by unique value.
    groups: Vec<Vec<usize>>,
    /// The K+1 non-trivial (secular) eigenvalues, ascending.
    secular: Vec<SecularRoot>,
    g: f64,
}

impl ArrowheadDecomp {
    /// λ − unique[k] for secular root `r`, at full relative precision when k
    /// is the anchor.
    fn gap(&self, r: &SecularRoot, k: usize) -> f64 {
        if k == r.anchor {
            r.t
        } else {
            (self.unique[r.anchor] - self.unique[k]) + r.t
        }
    }
}

/// Solve the secular equation f(λ) = (E_C − λ) + Σ_k m_k g²/(λ − u_k) = 0 on
/// every pole interval with a bracketed, safeguarded Newton iteration in the
/// gap variable. Requires g > 0.
fn solve_arrowhead(head: f64, energies: &[f64], g: f64) -> ArrowheadDecomp {
    let n = energies.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| energies[a].partial_cmp(&energies[b]).unwrap());

    let mut unique: Vec<f64> = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut map = vec![0usize; n];
    for &j in &order {
        let e = energies[j];
        if unique.last() == Some(&e) {
            *mult.last_mut().unwrap() += 1;
            groups.last_mut().unwrap().push(j);
        } else {
            unique.push(e);
            mult.push(1);
            groups.push(vec![j]);
        }
        map[j] = unique.len() - 1;
    }
    let k = unique.len();
    let g2 = g * g;
    let weights: Vec<f64> = mult.iter().map(|&m| m as f64 * g2).collect();

    // f and f' expressed around anchor a: λ = unique[a] + t.
    let eval = |a: usize, t: f64| -> (f64, f64) {
        let lam = unique[a] + t;
        let mut f = head - lam;
        let mut df = -1.0;
        for i in 0..k {
            let d = if i == a {
                t
            } else {
                (unique[a] - unique[i]) + t
            };
            f += weights[i] / d;
            df -= weights[i] / (d * d);
        }
        (f, df)
    };

    // Safeguarded Newton on t in (lo, hi) with f(lo) > 0 > f(hi).
    let solve_in = |a: usize, mut lo: f64, mut hi: f64| -> SecularRoot {
        let mut t = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (f, df) = eval(a, t);
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let newton = t - f / df;
            let next = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    // tiny-magnitude intervals: midpoint can underflow to an
                    // endpoint; fall back to the geometric mean of magnitudes
                    let gm = (lo.abs().max(f64::MIN_POSITIVE)
                        * hi.abs().max(f64::MIN_POSITIVE))
                    .sqrt()
                        .copysign(lo + hi);
                    if gm > lo && gm < hi {
                        gm
                    } else {
                        break;
                    }
                } else {
                    mid
                }
            };
            if next == t {
                break;
            }
            t = next;
        }
        SecularRoot {
            lambda: unique[a] + t,
            anchor: a,
            t,
        }
    };

    let margin = g * (n as f64).sqrt() + 1.0;
    let mut secular = Vec::with_capacity(k + 1);

    // Leftmost root, anchored at unique[0] with t < 0.
    {
        let lo = (head.min(unique[0]) - margin) - unique[0];
        secular.push(solve_in(0, lo, -f64::MIN_POSITIVE));
    }
    // Interior roots.
    for i in 0..k - 1 {
        let mid = 0.5 * (unique[i] + unique[i + 1]);
        let (fmid, _) = eval(i, mid - unique[i]);
        if fmid > 0.0 {
            // Root in (mid, u_{i+1}); anchor right pole, t < 0.
            secular.push(solve_in(i + 1, mid - unique[i + 1], -f64::MIN_POSITIVE));
        } else {
            // Root in (u_i, mid]; anchor left pole, t > 0.
            secular.push(solve_in(i, f64::MIN_POSITIVE, mid - unique[i]));
        }
    }
    // Rightmost root, anchored at unique[K−1] with t > 0.
    {
        let hi = (head.max(unique[k - 1]) + margin) - unique[k - 1];
        secular.push(solve_in(k - 1, f64::MIN_POSITIVE, hi));
    }
    secular.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());

    ArrowheadDecomp {
        unique,
        mult,
        map,
        groups,
        secular,
        g,
    }
}

fn guard_check(n: usize) -> Result<()> {
    if n + 1 > DEFAULT_EIGEN_GUARD {
        return Err(Error::SizeGuard {
            n: n + 1,
            guard: DEFAULT_EIGEN_GUARD,
        });
    }
    Ok(())
}

/// All N+1 eigenvalues of the single-excitation arrowhead Hamiltonian of one
/// sample, ascending. Exactly coincident emitter energies are deflated:
/// a value of multiplicity m contributes m−1 eigenvalues at that energy.
pub fn arrowhead_eigenvalues(
    sample: &DisorderSample,
    params: &SystemParams,
) -> Result<Vec<f64>> {
    guard_check(params.emitter_count)?;
    if params.coupling == 0.0 {
        let mut out = sample.energies.clone();
        out.push(params.cavity_energy);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return Ok(out);
    }
    let d = solve_arrowhead(params.cavity_energy, &sample.energies, params.coupling);
    let mut out: Vec<f64> = Vec::with_capacity(params.emitter_count + 1);
    for r in &d.secular {
        out.push(r.lambda);
    }
    for (i, &m) in d.mult.iter().enumerate() {
        for _ in 1..m {
            out.push(d.unique[i]);
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Roots z_α = −iE_α of the characteristic polynomial P(z) of one sample
/// (all N+1 of them, degenerate ones repeated). The amplitudes carried along
/// are the residues of G_CC at each pole — zero on deflated (dark) poles —
/// so that Σ_α A_α = 1 expresses completeness.
pub fn char_poly_poles(
    sample: &DisorderSample,
    params: &SystemParams,
) -> Result<PoleExpansion> {
    guard_check(params.emitter_count)?;
    if params.coupling == 0.0 {
        let mut entries: Vec<(f64, C64)> = sample
            .energies
            .iter()
            .map(|&e| (e, C64::new(0.0, 0.0)))
            .collect();
        entries.push((params.cavity_energy, C64::new(1.0, 0.0)));
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        return Ok(PoleExpansion {
            poles: entries.iter().map(|e| C64::new(0.0, -e.0)).collect(),
            amplitudes: entries.iter().map(|e| e.1).collect(),
        });
    }
    let d = solve_arrowhead(params.cavity_energy, &sample.energies, params.coupling);
    let g2 = d.g * d.g;
    let mut entries: Vec<(f64, C64)> = Vec::with_capacity(params.emitter_count + 1);
    for r in &d.secular {
        let mut norm2 = 1.0;
        for i in 0..d.unique.len() {
            let gap = d.gap(r, i);
            norm2 += d.mult[i] as f64 * g2 / (gap * gap);
        }
        entries.push((r.lambda, C64::new(1.0 / norm2, 0.0)));
    }
    for (i, &m) in d.mult.iter().enumerate() {
        for _ in 1..m {
            entries.push((d.unique[i], C64::new(0.0, 0.0)));
        }
    }
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(PoleExpansion {
        poles: entries.iter().map(|e| C64::new(0.0, -e.0)).collect(),
        amplitudes: entries.iter().map(|e| e.1).collect(),
    })
}

/// Full pole expansion of G_{X,Y} for one sample: residues from the arrowhead
/// eigenvectors (cavity component 1, emitter components g/(λ−E_j), then
/// normalized). Exactly degenerate emitter energies contribute one combined
/// entry per degenerate level (the basis-free residue sum).
pub fn pole_expansion(
    x: SiteIndex,
    y: SiteIndex,
    sample: &DisorderSample,
    params: &SystemParams,
) -> Result<PoleExpansion> {
    guard_check(params.emitter_count)?;
    let n = params.emitter_count;
    let cx = site_coeffs(x, n)?;
    let cy = site_coeffs(y, n)?;
    let g = params.coupling;

    let mut entries: Vec<(f64, C64)> = Vec::new();
    if g == 0.0 {
        // Decoupled: every level is its own eigenvector.
        entries.push((
            params.cavity_energy,
            C64::new(cx.cavity * cy.cavity, 0.0),
        ));
        for j in 0..n {
            let a = coeff_at(cx.pattern, j, n) * coeff_at(cy.pattern, j, n);
            entries.push((sample.energies[j], C64::new(a, 0.0)));
        }
    } else {
        let d = solve_arrowhead(params.cavity_energy, &sample.energies, params.coupling);
        for r in &d.secular {
            let mut norm2 = 1.0;
            for i in 0..d.unique.len() {
                let gap = d.gap(r, i);
                norm2 += d.mult[i] as f64 * g * g / (gap * gap);
            }
            // Overlaps ⟨X|v⟩, ⟨Y|v⟩ with the unnormalized eigenvector.
            let mut ox = cx.cavity;
            let mut oy = cy.cavity;
            for j in 0..n {
                let v = g / d.gap(r, d.map[j]);
                ox += coeff_at(cx.pattern, j, n) * v;
                oy += coeff_at(cy.pattern, j, n) * v;
            }
            entries.push((r.lambda, C64::new(ox * oy / norm2, 0.0)));
        }
        // Deflated levels: within a group of m coincident energies the m−1
        // degenerate eigenvectors project as δ_ij − 1/m on the group.
        for (i, grp) in d.groups.iter().enumerate() {
            let m = grp.len();
            if m < 2 {
                continue;
            }
            let mut dot = 0.0;
            let mut sx = 0.0;
            let mut sy = 0.0;
            for &j in grp {
                let a = coeff_at(cx.pattern, j, n);
                let b = coeff_at(cy.pattern, j, n);
                dot += a * b;
                sx += a;
                sy += b;
            }
            let amp = dot - sx * sy / m as f64;
            entries.push((d.unique[i], C64::new(amp, 0.0)));
        }
    }
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(PoleExpansion {
        poles: entries.iter().map(|e| C64::new(0.0, -e.0)).collect(),
        amplitudes: entries.iter().map(|e| e.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{sample_disorder, SystemParams};
    use approx::assert_relative_eq;

    fn params(n: usize, sigma: f64) -> SystemParams {
        SystemParams::new(1.0, 1.0, 0.001, n, sigma)
    }

    /// Brute-force resolvent element (zI + iH)⁻¹ via dense complex Gaussian
    /// elimination, for small-N equivalence checks.
    fn resolvent_element(
        x: &[f64],
        y: &[f64],
        z: C64,
        sample: &DisorderSample,
        p: &SystemParams,
    ) -> C64 {
        let n = p.emitter_count + 1;
        // A = zI + iH, arrowhead with head E_C at index 0.
        let mut a = vec![vec![C64::new(0.0, 0.0); n]; n];
        a[0][0] = z + C64::new(0.0, p.cavity_energy);
        for j in 1..n {
            a[j][j] = z + C64::new(0.0, sample.energies[j - 1]);
            a[0][j] = C64::new(0.0, p.coupling);
            a[j][0] = C64::new(0.0, p.coupling);
        }
        // Solve A·u = y.
        let mut u: Vec<C64> = y.iter().map(|&v| C64::new(v, 0.0)).collect();
        let mut m = a.clone();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| m[i][col].norm().partial_cmp(&m[j][col].norm()).unwrap())
                .unwrap();
            m.swap(col, piv);
            u.swap(col, piv);
            let d = m[col][col];
            for row in col + 1..n {
                let f = m[row][col] / d;
                for c in col..n {
                    let sub = f * m[col][c];
                    m[row][c] -= sub;
                }
                let sub = f * u[col];
                u[row] -= sub;
            }
        }
        for col in (0..n).rev() {
            let mut s = u[col];
            for c in col + 1..n {
                s -= m[col][c] * u[c];
            }
            u[col] = s / m[col][col];
        }
        x.iter().zip(&u).map(|(&xi, &ui)| xi * ui).sum()
    }

    fn basis_vector(idx: SiteIndex, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n + 1];
        match idx {
            SiteIndex::Cavity => v[0] = 1.0,
            SiteIndex::Emitter(j) => v[j] = 1.0,
            SiteIndex::BrightState => {
                for j in 1..=n {
                    v[j] = 1.0 / (n as f64).sqrt();
                }
            }
            SiteIndex::DarkState(k) => {
                let c = 1.0 / (k as f64 * (k as f64 + 1.0)).sqrt();
                for j in 1..=k {
                    v[j] = c;
                }
                v[k + 1] = -(k as f64) * c;
            }
        }
        v
    }

    #[test]
    fn aux_cavity_energy_single_emitter() {
        // One emitter at E₁=1, z = −1.1i: E_C(z) = E_C − g²/(E₁−1.1) = E_C + 1e−5.
        let p = SystemParams::new(1.0, 1.0, 0.001, 1, 0.04);
        let s = DisorderSample {
            energies: vec![1.0],
            seed: 0,
            params_hash: p.digest(),
        };
        let e = aux_cavity_energy(C64::new(0.0, -1.1), &s, &p).unwrap();
        assert_relative_eq!(e.re, 1.0 + 1e-5, max_relative = 1e-12);
        assert_relative_eq!(e.im, 0.0, epsilon = 1e-18);
    }

    #[test]
    fn aux_cavity_energy_decoupled() {
        let p = SystemParams::new(1.0, 1.0, 0.0, 5, 0.04);
        let s = sample_disorder(&p, 3).unwrap();
        let e = aux_cavity_energy(C64::new(0.2, -0.7), &s, &p).unwrap();
        assert_eq!(e, C64::new(1.0, 0.0));
    }

    #[test]
    fn aux_cavity_energy_pole_collision() {
        let p = params(3, 0.04);
        let s = sample_disorder(&p, 3).unwrap();
        let z = C64::new(0.0, -s.energies[1]);
        match aux_cavity_energy(z, &s, &p) {
            Err(Error::PoleCollision { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected pole collision, got {other:?}"),
        }
    }

    #[test]
    fn aux_cavity_energy_thermodynamic_average() {
        // Lorentz-averaging the sum gives E_C − i g²N/(z + iE_M + σ).
        let p = params(1_000_000, 0.15);
        let s = sample_disorder(&p, 11).unwrap();
        let z = C64::new(0.05, -0.9);
        let e = aux_cavity_energy(z, &s, &p).unwrap();
        let g2n = p.coupling * p.coupling * p.emitter_count as f64;
        let expect = C64::new(p.cavity_energy, 0.0)
            - C64::i() * g2n / (z + C64::new(p.disorder_width, p.emitter_center));
        // Monte Carlo: agreement only statistical, ~1/√N of the term size.
        assert!((e - expect).norm() < 1e-2 * g2n, "dev {}", (e - expect).norm());
    }

    #[test]
    fn greens_matches_brute_force_resolvent() {
        let p = params(7, 0.1);
        let s = sample_disorder(&p, 17).unwrap();
        let sites = [
            SiteIndex::Cavity,
            SiteIndex::Emitter(1),
            SiteIndex::Emitter(7),
            SiteIndex::BrightState,
            SiteIndex::DarkState(1),
            SiteIndex::DarkState(6),
        ];
        for z in [C64::new(0.01, -1.0), C64::new(0.3, 0.4), C64::new(1e-4, -0.96)] {
            for &x in &sites {
                for &y in &sites {
                    let got = greens_element(x, y, z, &s, &p).unwrap();
                    let want =
                        resolvent_element(&basis_vector(x, 7), &basis_vector(y, 7), z, &s, &p);
                    assert!(
                        (got - want).norm() < 1e-12 * want.norm().max(1.0),
                        "{x:?},{y:?} at {z}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn greens_decoupled_cavity() {
        let p = SystemParams::new(1.0, 1.0, 0.0, 4, 0.04);
        let s = sample_disorder(&p, 1).unwrap();
        let z = C64::new(0.1, -0.5);
        let g = greens_element(SiteIndex::Cavity, SiteIndex::Cavity, z, &s, &p).unwrap();
        assert_eq!(g, (z + C64::new(0.0, 1.0)).inv());
    }

    #[test]
    fn greens_symmetry() {
        let p = params(9, 0.08);
        let s = sample_disorder(&p, 23).unwrap();
        let z = C64::new(0.02, -0.97);
        for j in 1..=9 {
            let a = greens_element(SiteIndex::Cavity, SiteIndex::Emitter(j), z, &s, &p).unwrap();
            let b = greens_element(SiteIndex::Emitter(j), SiteIndex::Cavity, z, &s, &p).unwrap();
            assert_eq!(a, b);
            for i in 1..=9 {
                let gij =
                    greens_element(SiteIndex::Emitter(i), SiteIndex::Emitter(j), z, &s, &p)
                        .unwrap();
                let gji =
                    greens_element(SiteIndex::Emitter(j), SiteIndex::Emitter(i), z, &s, &p)
                        .unwrap();
                assert_eq!(gij, gji);
            }
        }
    }

    #[test]
    fn averaged_element_reference_value() {
        // G̅_CC(−iω+0⁺) at ω = E_M = E_C = 1, σ=0.15, g²N=0.002 → 75.0.
        let p = SystemParams::new(1.0, 1.0, 0.001, 2000, 0.15);
        let g = averaged_greens_element(
            SiteIndex::Cavity,
            SiteIndex::Cavity,
            C64::new(0.0, -1.0),
            &p,
        )
        .unwrap();
        assert_relative_eq!(g.re, 75.0, max_relative = 1e-12);
        assert_relative_eq!(g.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn averaged_element_sigma_zero_limit_is_homogeneous() {
        let mut p = params(50, 0.0);
        p.disorder_width = 0.0;
        let s = sample_disorder(&p, 0).unwrap(); // all E_j = E_M
        let z = C64::new(0.07, -0.93);
        for (x, y) in [
            (SiteIndex::Cavity, SiteIndex::Cavity),
            (SiteIndex::Cavity, SiteIndex::BrightState),
            (SiteIndex::BrightState, SiteIndex::BrightState),
            (SiteIndex::Emitter(3), SiteIndex::Emitter(5)),
            (SiteIndex::DarkState(2), SiteIndex::DarkState(2)),
        ] {
            let avg = averaged_greens_element(x, y, z, &p).unwrap();
            let fin = greens_element(x, y, z, &s, &p).unwrap();
            assert!((avg - fin).norm() < 1e-12 * fin.norm().max(1.0));
        }
    }

    #[test]
    fn averaged_matches_monte_carlo() {
        // Sample mean of G_CC over 10⁴ samples vs the analytic average,
        // within 3 standard errors.
        let p = params(200, 0.04);
        let z = C64::new(0.02, -1.01);
        let m = 10_000usize;
        let mut vals = Vec::with_capacity(m);
        for i in 0..m {
            let s = crate::core::sample_disorder_stream(&p, 99, i as u64).unwrap();
            vals.push(greens_element(SiteIndex::Cavity, SiteIndex::Cavity, z, &s, &p).unwrap());
        }
        let mean = vals.iter().sum::<C64>() / m as f64;
        let var = vals.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (m as f64 - 1.0);
        let stderr = (var / m as f64).sqrt();
        let avg =
            averaged_greens_element(SiteIndex::Cavity, SiteIndex::Cavity, z, &p).unwrap();
        assert!(
            (mean - avg).norm() < 3.0 * stderr,
            "MC mean {mean} vs analytic {avg}, stderr {stderr}"
        );
    }

    #[test]
    fn char_poly_decoupled_and_resonant() {
        let p0 = SystemParams::new(1.0, 1.0, 0.0, 3, 0.04);
        let s0 = sample_disorder(&p0, 5).unwrap();
        let pe = char_poly_poles(&s0, &p0).unwrap();
        let mut expect: Vec<f64> = s0.energies.clone();
        expect.push(1.0);
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let got: Vec<f64> = pe.poles.iter().map(|z| -z.im).collect();
        assert_eq!(got, expect);

        // N=1 resonant: E_C ± g.
        let p1 = SystemParams::new(1.0, 1.0, 0.001, 1, 0.04);
        let s1 = DisorderSample {
            energies: vec![1.0],
            seed: 0,
            params_hash: p1.digest(),
        };
        let pe1 = char_poly_poles(&s1, &p1).unwrap();
        let es: Vec<f64> = pe1.poles.iter().map(|z| -z.im).collect();
        assert_relative_eq!(es[0], 0.999, max_relative = 1e-12);
        assert_relative_eq!(es[1], 1.001, max_relative = 1e-12);
    }

    #[test]
    fn char_poly_homogeneous_polaritons() {
        // σ=0: E_M ± g√N plus an (N−1)-fold dark level at E_M.
        let p = SystemParams::new(1.0, 1.0, 0.001, 400, 0.0);
        let s = sample_disorder(&p, 0).unwrap();
        let es = arrowhead_eigenvalues(&s, &p).unwrap();
        let gn = p.collective_coupling();
        assert_relative_eq!(es[0], 1.0 - gn, max_relative = 1e-12);
        assert_relative_eq!(*es.last().unwrap(), 1.0 + gn, max_relative = 1e-12);
        assert!(es[1..400].iter().all(|&e| e == 1.0));
    }

    #[test]
    fn eigenvalues_match_secular_equation_zero() {
        let p = params(50, 0.1);
        let s = sample_disorder(&p, 31).unwrap();
        let es = arrowhead_eigenvalues(&s, &p).unwrap();
        assert_eq!(es.len(), 51);
        // Every non-deflated eigenvalue must satisfy the secular equation to
        // within backward error |f|/|f'| ≲ ulp(λ) (f' blows up next to the
        // poles, so the raw residual is not a meaningful yardstick there).
        let g2 = p.coupling * p.coupling;
        for &lam in &es {
            if s.energies.iter().any(|&e| e == lam) {
                continue;
            }
            let f = (1.0 - lam)
                + s.energies.iter().map(|&e| g2 / (lam - e)).sum::<f64>();
            let df = -1.0
                - s.energies
                    .iter()
                    .map(|&e| g2 / ((lam - e) * (lam - e)))
                    .sum::<f64>();
            assert!(
                (f / df).abs() < 1e-12 * lam.abs().max(1.0),
                "backward error {} at λ={lam}",
                (f / df).abs()
            );
        }
    }

    #[test]
    fn cavity_residues_complete() {
        // Σ residues of G_CC = 1 to 1e−10 at N = 100.
        let p = params(100, 0.15);
        let s = sample_disorder(&p, 77).unwrap();
        let pe = char_poly_poles(&s, &p).unwrap();
        let total: C64 = pe.amplitudes.iter().sum();
        assert_relative_eq!(total.re, 1.0, epsilon = 1e-10);
        assert_relative_eq!(total.im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn pole_expansion_reproduces_greens_element() {
        let p = params(12, 0.1);
        let s = sample_disorder(&p, 41).unwrap();
        let z = C64::new(0.05, -0.9);
        for (x, y) in [
            (SiteIndex::Cavity, SiteIndex::Cavity),
            (SiteIndex::Emitter(1), SiteIndex::Emitter(1)),
            (SiteIndex::Cavity, SiteIndex::Emitter(4)),
            (SiteIndex::BrightState, SiteIndex::BrightState),
            (SiteIndex::DarkState(3), SiteIndex::DarkState(3)),
        ] {
            let pe = pole_expansion(x, y, &s, &p).unwrap();
            let direct = greens_element(x, y, z, &s, &p).unwrap();
            assert!(
                (pe.evaluate(z) - direct).norm() < 1e-10 * direct.norm().max(1.0),
                "{x:?},{y:?}"
            );
        }
    }

    #[test]
    fn inverse_laplace_free_and_rabi() {
        let free = PoleExpansion {
            poles: vec![C64::new(0.0, -1.0)],
            amplitudes: vec![C64::new(1.0, 0.0)],
        };
        for t in [0.0, 1.0, 357.0] {
            assert_relative_eq!(inverse_laplace(&free, t).unwrap().norm(), 1.0, epsilon = 1e-13);
        }
        // Two poles at −i(E±g), amplitude ½ each: |G(t)|² = cos²(gt).
        let g = 0.001;
        let rabi = PoleExpansion {
            poles: vec![C64::new(0.0, -(1.0 - g)), C64::new(0.0, -(1.0 + g))],
            amplitudes: vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0)],
        };
        for t in [0.0, 100.0, 785.4, 2000.0] {
            let got = inverse_laplace(&rabi, t).unwrap().norm_sqr();
            assert_relative_eq!(got, (g * t).cos().powi(2), epsilon = 1e-12);
        }
        assert!(inverse_laplace(&free, -1.0).is_err());
    }

    #[test]
    fn ldos_positivity_from_re_greens() {
        // (1/π)·Re G_XX(−iω+δ) ≥ 0 — the retarded LDOS in this convention.
        let p = params(20, 0.1);
        let s = sample_disorder(&p, 13).unwrap();
        for &x in &[SiteIndex::Cavity, SiteIndex::Emitter(5), SiteIndex::BrightState] {
            for i in 0..200 {
                let w = 0.5 + i as f64 * 0.005;
                let g = greens_element(x, x, C64::new(1e-3, -w), &s, &p).unwrap();
                assert!(g.re >= 0.0, "{x:?} at ω={w}: Re G = {}", g.re);
            }
        }
    }
}
