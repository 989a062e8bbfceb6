//! Comparison of a general symmetric ferromagnet with a rescaled Ising model.
//!
//! Under the condition `χ([a√2, ∞)) ≥ χ([0, a])` every one-site integral
//! `∫[(σ+a)^m(σ−a)^n + (σ−a)^m(σ+a)^n] χ(dσ)` is non-negative, which yields
//! `⟨σ_x⟩^{+a}_β ≥ a·⟨σ_x⟩^{Ising}_{a²β}` in every finite volume.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geomgraph::{build_graph, GilbertGraph};
use crate::pointprocess::{BoundaryMode, BoxWindow, PointConfiguration};
use crate::quadrature;
use crate::rng::{stream, Purpose};
use crate::spinsystem::{
    exact_enumeration_ising, quadrature_marginals, InteractionProfile, SingleSpinMeasure, DEFAULT_TOL,
    MAX_QUADRATURE_SITES,
};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// `χ([a√2, ∞))` and `χ([0, a])`.
pub fn wells_masses(measure: &SingleSpinMeasure, a: f64, tol: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid(format!("a must be positive, got {a}")));
    }
    measure.validate()?;
    let tol = tol.clamp(1e-15, 1e-6);
    Ok((measure.mass(a * SQRT_2, f64::INFINITY, tol)?, measure.mass(0.0, a, tol)?))
}

/// Whether `χ([a√2, ∞)) ≥ χ([0, a]) − tol`.
pub fn wells_condition_holds(measure: &SingleSpinMeasure, a: f64, tol: f64) -> Result<bool> {
    let (tail, core) = wells_masses(measure, a, tol)?;
    Ok(tail >= core - tol)
}

/// Supremum of the feasible set of the Wells condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoundA {
    pub a: f64,
    /// Whether the condition holds at `a` itself.
    pub attained: bool,
}

impl FoundA {
    /// A value at which the condition holds: `a` itself when attained,
    /// otherwise `a·(1 − 10⁻⁶)`.
    pub fn usable(&self) -> f64 {
        if self.attained {
            self.a
        } else {
            self.a * (1.0 - 1e-6)
        }
    }
}

/// Largest `a` satisfying the Wells condition, to absolute accuracy `tol`.
///
/// For continuous measures the tail mass is strictly decreasing and the core
/// mass non-decreasing in `a`, so bisection on their difference converges to
/// the unique crossing. For atomic measures both masses are step functions and
/// the feasible set is read off between consecutive breakpoints.
pub fn find_a(measure: &SingleSpinMeasure, tol: f64) -> Result<FoundA> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    measure.validate()?;
    if measure.is_atomic() {
        return find_a_atomic(measure);
    }
    let mass_tol = (tol * 1e-3).max(1e-14);
    let gap = |a: f64| -> Result<(f64, f64)> { wells_masses(measure, a, mass_tol) };
    let mut lo = 0.0;
    let mut lo_masses = (0.5, 0.0);
    let mut hi = 1.0;
    let mut hi_masses = gap(hi)?;
    while hi_masses.0 >= hi_masses.1 {
        lo = hi;
        lo_masses = hi_masses;
        hi *= 2.0;
        hi_masses = gap(hi)?;
        if hi > 1e12 {
            return Err(Error::Infeasible("condition holds for every tested a".into()));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let m = gap(mid)?;
        // Monotone structure: tail decreasing, core non-decreasing.
        if m.0 > lo_masses.0 + mass_tol || m.0 < hi_masses.0 - mass_tol || m.1 < lo_masses.1 - mass_tol || m.1 > hi_masses.1 + mass_tol {
            return Err(Error::Numerical(format!("Wells masses not monotone near a = {mid}")));
        }
        if m.0 >= m.1 {
            lo = mid;
            lo_masses = m;
        } else {
            hi = mid;
            hi_masses = m;
        }
    }
    if lo == 0.0 {
        return Err(Error::Infeasible(format!("no a above {tol} satisfies the Wells condition")));
    }
    Ok(FoundA { a: lo, attained: true })
}

fn find_a_atomic(measure: &SingleSpinMeasure) -> Result<FoundA> {
    let holds = |a: f64| -> Result<bool> { wells_condition_holds(measure, a, 0.0) };
    let mut breaks: Vec<f64> = measure
        .atoms()
        .iter()
        .filter(|(t, _)| *t > 0.0)
        .flat_map(|&(t, _)| [t, t / SQRT_2])
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let last = *breaks.last().ok_or_else(|| Error::Infeasible("measure has no positive atoms".into()))?;
    if holds(2.0 * last)? {
        return Err(Error::Infeasible("condition holds for every a".into()));
    }
    // Walk the pieces (b_{k−1}, b_k), {b_k} from the right.
    let mut best: Option<FoundA> = None;
    for k in (0..breaks.len()).rev() {
        let right = breaks[k];
        let left = if k == 0 { 0.0 } else { breaks[k - 1] };
        if holds(right)? {
            best = Some(FoundA { a: right, attained: true });
            break;
        }
        if holds(0.5 * (left + right))? {
            best = Some(FoundA { a: right, attained: false });
            break;
        }
    }
    best.ok_or_else(|| Error::Infeasible("no a satisfies the Wells condition".into()))
}

/// Integration of even integrands against χ on sub-intervals of `[0, ∞)`.
struct HalfLine {
    measure: SingleSpinMeasure,
    z: f64,
}

impl HalfLine {
    fn new(measure: &SingleSpinMeasure) -> Result<Self> {
        measure.validate()?;
        Ok(HalfLine { measure: *measure, z: measure.normalization(DEFAULT_TOL)? })
    }

    /// Cut-off beyond which a density times a polynomial of degree `deg` is negligible.
    fn radius(&self, deg: usize) -> f64 {
        self.measure.truncation_radius(deg as f64)
    }

    /// `∫_{[lo, hi)} f dχ` to absolute accuracy `tol`, relaxed to 10⁻¹³
    /// relative when the integral is large.
    fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64, deg: usize, tol: f64) -> Result<f64> {
        if self.measure.is_atomic() {
            return Ok(self.measure.atoms().iter().filter(|&&(t, _)| lo <= t && t < hi).map(|&(t, w)| w * f(t)).sum());
        }
        let b = hi.min(self.radius(deg));
        if b <= lo {
            return Ok(0.0);
        }
        let g = |t: f64| f(t) * self.measure.log_density(t).exp();
        let rough = quadrature::integrate(&g, lo, b, (tol * self.z).max(1e-6 * self.z))?;
        let abs_tol = (tol * self.z).max(1e-13 * rough.abs());
        Ok(quadrature::integrate(&g, lo, b, abs_tol)? / self.z)
    }
}

fn one_site_integrand(a: f64, m: u32, n: u32) -> impl Fn(f64) -> f64 {
    move |s: f64| {
        let (p, q) = (s + a, s - a);
        p.powi(m as i32) * q.powi(n as i32) + q.powi(m as i32) * p.powi(n as i32)
    }
}

/// `∫[(σ+a)^m(σ−a)^n + (σ−a)^m(σ+a)^n] χ(dσ)`.
///
/// The symmetry of χ folds the integral onto `[0, ∞)`; when `m + n` is odd
/// the folded integrand cancels exactly.
pub fn one_site_integral(measure: &SingleSpinMeasure, a: f64, m: u32, n: u32, tol: f64) -> Result<f64> {
    let half = HalfLine::new(measure)?;
    one_site_integral_on(&half, a, m, n, tol)
}

fn one_site_integral_on(half: &HalfLine, a: f64, m: u32, n: u32, tol: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::invalid("a must be finite"));
    }
    let f = one_site_integrand(a, m, n);
    let folded = |s: f64| if s == 0.0 { f(0.0) } else { f(s) + f(-s) };
    let deg = (m + n) as usize;
    if half.measure.is_atomic() {
        return Ok(half.measure.atoms().iter().map(|&(t, w)| w * f(t)).sum());
    }
    // The point σ = 0 carries no mass for a density, so counting it once is harmless.
    half.integrate(folded, 0.0, f64::INFINITY, deg, tol)
}

/// The three pieces of a folded odd–odd one-site integral, with the lower
/// bounds on the outer pieces implied by monotonicity of the even part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OddOddDecomposition {
    pub m: u32,
    pub n: u32,
    /// `∫_{[0,a)}`, `∫_{[a,a√2)}`, `∫_{[a√2,∞)}` of `(σ²−a²)^n ψ(σ)`,
    /// `ψ(σ) = (σ+a)^{m−n} + (σ−a)^{m−n}`, for `m ≥ n`.
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// `−a^{2n} ψ(a) χ([0,a])`.
    pub i1_bound: f64,
    /// `a^{2n} ψ(a√2) χ([a√2,∞))`.
    pub i3_bound: f64,
    /// `I₂ ≥ −tol`, `I₁ + I₃ ≥ −tol`, and both bounds respected.
    pub consistent: bool,
}

/// Splits the odd–odd integral for `(m, n)` into `2(I₁ + I₂ + I₃)`.
pub fn odd_odd_decomposition(measure: &SingleSpinMeasure, a: f64, m: u32, n: u32, tol: f64) -> Result<OddOddDecomposition> {
    let half = HalfLine::new(measure)?;
    decompose_on(&half, a, m, n, tol)
}

fn decompose_on(half: &HalfLine, a: f64, m: u32, n: u32, tol: f64) -> Result<OddOddDecomposition> {
    if m % 2 == 0 || n % 2 == 0 {
        return Err(Error::invalid(format!("({m}, {n}) is not an odd–odd pair")));
    }
    let (hi, lo) = (m.max(n), m.min(n));
    let even = hi - lo;
    let psi = move |s: f64| (s + a).powi(even as i32) + (s - a).powi(even as i32);
    let g = |s: f64| (s * s - a * a).powi(lo as i32) * psi(s);
    let deg = (m + n) as usize;
    let b = a * SQRT_2;
    let i1 = half.integrate(g, 0.0, a, deg, tol)?;
    let i2 = half.integrate(g, a, b, deg, tol)?;
    let i3 = half.integrate(g, b, f64::INFINITY, deg, tol)?;
    let mass_tol = tol.clamp(1e-15, 1e-6);
    let core = half.measure.mass(0.0, a, mass_tol)?;
    let tail = half.measure.mass(b, f64::INFINITY, mass_tol)?;
    let a2n = a.powi(2 * lo as i32);
    let i1_bound = -a2n * psi(a) * core;
    let i3_bound = a2n * psi(b) * tail;
    let slack = tol.max(1e-12 * (i1.abs() + i3.abs()));
    let consistent = i2 >= -slack && i1 + i3 >= -slack && i1 >= i1_bound - slack && i3 >= i3_bound - slack;
    Ok(OddOddDecomposition { m, n, i1, i2, i3, i1_bound, i3_bound, consistent })
}

/// Sign check of all one-site integrals with exponents up to `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellsCertificate {
    pub measure: String,
    pub a: f64,
    #[serde(rename = "M")]
    pub max_exponent: u32,
    pub min_integral: f64,
    pub all_nonnegative: bool,
    pub failures: Vec<(u32, u32, f64)>,
    pub condition_holds: bool,
    pub decompositions: Vec<OddOddDecomposition>,
}

impl WellsCertificate {
    pub fn decompositions_consistent(&self) -> bool {
        self.decompositions.iter().all(|d| d.consistent)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Evaluates every one-site integral with `0 ≤ m, n ≤ M`, recording those
/// below `−tol`, and decomposes the odd–odd ones.
pub fn verify_one_site_positivity(measure: &SingleSpinMeasure, a: f64, max_exponent: u32, tol: f64) -> Result<WellsCertificate> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid(format!("a must be positive, got {a}")));
    }
    let half = HalfLine::new(measure)?;
    let mut min = f64::INFINITY;
    let mut failures = Vec::new();
    let mut decompositions = Vec::new();
    for m in 0..=max_exponent {
        for n in 0..=max_exponent {
            let v = one_site_integral_on(&half, a, m, n, tol)?;
            min = min.min(v);
            if v < -tol {
                failures.push((m, n, v));
            }
            if m % 2 == 1 && n % 2 == 1 && m >= n {
                decompositions.push(decompose_on(&half, a, m, n, tol)?);
            }
        }
    }
    Ok(WellsCertificate {
        measure: measure.to_string(),
        a,
        max_exponent,
        min_integral: min,
        all_nonnegative: failures.is_empty(),
        failures,
        condition_holds: wells_condition_holds(measure, a, tol)?,
        decompositions,
    })
}

/// Both sides of the finite-volume comparison for every interior vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellsComparison {
    pub vertices: Vec<usize>,
    /// `⟨σ_x⟩` of the general model, boundary `+a`, inverse temperature β.
    pub lhs: Vec<f64>,
    /// `a⟨σ_x⟩` of the Ising model with boundary `+1` at `a²β`.
    pub rhs: Vec<f64>,
    pub holds: bool,
}

/// Exact check of `⟨σ_x⟩^{+a}_β ≥ a·⟨σ_x⟩^{Ising,+1}_{a²β}` on a tiny system.
pub fn finite_volume_wells_check(
    graph: &GilbertGraph,
    interior: &[bool],
    measure: &SingleSpinMeasure,
    profile: &InteractionProfile,
    a: f64,
    beta: f64,
    tol: f64,
) -> Result<WellsComparison> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid(format!("a must be positive, got {a}")));
    }
    let (vertices, lhs) = if measure.is_atomic() {
        let e = exact_enumeration_ising(graph, interior, profile, beta, a)?;
        (e.vertices, e.means)
    } else {
        let q = quadrature_marginals(graph, interior, measure, profile, beta, a, (0.1 * tol).max(1e-13))?;
        (q.vertices, q.means)
    };
    let ising = exact_enumeration_ising(graph, interior, &profile.scaled(a * a), beta, 1.0)?;
    let rhs: Vec<f64> = ising.means.iter().map(|m| a * m).collect();
    let holds = lhs.iter().zip(&rhs).all(|(l, r)| *l >= r - tol);
    Ok(WellsComparison { vertices, lhs, rhs, holds })
}

/// For one interior site in boundary field `K = β·a·Σφ`, the difference
/// `⟨σ⟩^{+a} − a·tanh(aK)` expanded as
/// `Σ_m K^m/m!·J(m,1) / (2 cosh(aK)·E[e^{Kσ}])` with `J` the one-site integrals.
pub fn one_site_difference_series(measure: &SingleSpinMeasure, a: f64, k: f64, tol: f64) -> Result<f64> {
    let half = HalfLine::new(measure)?;
    let z = measure.expectation(|t| (k * t).exp(), DEFAULT_TOL)?;
    let mut sum = 0.0;
    let mut coef = 1.0; // K^m / m!
    for m in 0..400u32 {
        if m > 0 {
            coef *= k / m as f64;
        }
        if m % 2 == 1 {
            let term = coef * one_site_integral_on(&half, a, m, 1, tol)?;
            sum += term;
            if m as f64 > 2.0 * k.abs() * (a + half.radius(0)) + 10.0 && term.abs() <= 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
    }
    Ok(sum / (2.0 * (a * k).cosh() * z))
}

/// A small random system for the finite-volume comparison.
#[derive(Debug, Clone)]
pub struct TinyInstance {
    pub graph: GilbertGraph,
    pub interior: Vec<bool>,
    pub profile: InteractionProfile,
    pub beta: f64,
}

/// Random instance: a handful of interior sites in a unit square (up to 8 for
/// Ising spins, 3 otherwise) with 1 to 3 collar sites nearby, random `φ*`,
/// shape and β.
pub fn random_tiny_instance(measure: &SingleSpinMeasure, seed: u64) -> Result<TinyInstance> {
    let mut rng = stream(seed, Purpose::Instance, 0);
    let inner = if measure.is_atomic() { rng.random_range(2..=8) } else { rng.random_range(1..=MAX_QUADRATURE_SITES) };
    let outer = rng.random_range(1..=3);
    let mut points = Vec::with_capacity(inner + outer);
    for k in 0..inner + outer {
        let h = if k < inner { 0.5 } else { 1.0 };
        points.push([rng.random_range(-h..h), rng.random_range(-h..h), 0.0]);
    }
    let window = BoxWindow::new(2, 10.0, BoundaryMode::Free)?;
    let graph = build_graph(&PointConfiguration::from_points(window, points, 1.0, seed)?, 1.0)?;
    let phi_star = rng.random_range(0.3..1.2);
    let profile = if rng.random_bool(0.5) {
        InteractionProfile::constant(phi_star, 1.0)?
    } else {
        InteractionProfile::linear_taper(phi_star, phi_star * rng.random_range(1.0..2.0), 1.0)?
    };
    let beta = rng.random_range(0.05..1.5);
    let interior = (0..inner + outer).map(|k| k < inner).collect();
    Ok(TinyInstance { graph, interior, profile, beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform() -> SingleSpinMeasure {
        SingleSpinMeasure::UniformInterval { half_width: 1.0 }
    }

    #[test]
    fn condition_cases() {
        assert!(wells_condition_holds(&uniform(), 1e-9, 1e-12).unwrap());
        assert!(!wells_condition_holds(&SingleSpinMeasure::Ising, 1.2, 1e-12).unwrap());
        let a = SQRT_2 - 1.0;
        let (tail, core) = wells_masses(&uniform(), a, 1e-14).unwrap();
        assert!((tail - core).abs() < 1e-15);
        assert!((core - a / 2.0).abs() < 1e-15);
    }

    #[test]
    fn find_a_closed_forms() {
        let f = find_a(&uniform(), 1e-10).unwrap();
        assert!((f.a - (SQRT_2 - 1.0)).abs() < 1e-9);
        assert!(f.attained);
        let f = find_a(&SingleSpinMeasure::Ising, 1e-10).unwrap();
        assert_eq!(f, FoundA { a: 1.0, attained: false });
        assert!(wells_condition_holds(&SingleSpinMeasure::Ising, f.usable(), 0.0).unwrap());
        let f = find_a(&SingleSpinMeasure::gaussian(), 1e-9).unwrap();
        assert!((f.a - 0.562_567_145_250_355_6).abs() < 1e-8, "{}", f.a);
        let f = find_a(&SingleSpinMeasure::double_well(), 1e-9).unwrap();
        assert!((f.a - 0.710_769_765_385_333_3).abs() < 1e-8, "{}", f.a);
    }

    #[test]
    fn one_site_values() {
        assert_eq!(one_site_integral(&SingleSpinMeasure::Ising, 1.0, 1, 1, 1e-12).unwrap(), 0.0);
        let v = one_site_integral(&uniform(), 0.4, 1, 1, 1e-12).unwrap();
        assert!((v - 2.0 * (1.0 / 3.0 - 0.16)).abs() < 1e-12);
        for m in [SingleSpinMeasure::double_well(), uniform(), SingleSpinMeasure::gaussian()] {
            assert_eq!(one_site_integral(&m, 0.5, 3, 2, 1e-12).unwrap(), 0.0);
            let a = one_site_integral(&m, 0.5, 5, 3, 1e-12).unwrap();
            let b = one_site_integral(&m, 0.5, 3, 5, 1e-12).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn decomposition_reassembles() {
        for m in [SingleSpinMeasure::double_well(), uniform(), SingleSpinMeasure::Ising] {
            let a = find_a(&m, 1e-10).unwrap().usable();
            for (p, q) in [(1, 1), (3, 1), (5, 3), (7, 7)] {
                let d = odd_odd_decomposition(&m, a, p, q, 1e-12).unwrap();
                let full = one_site_integral(&m, a, p, q, 1e-12).unwrap();
                let sum = 2.0 * (d.i1 + d.i2 + d.i3);
                assert!((sum - full).abs() <= 1e-9 * full.abs().max(1.0), "{m} {p} {q}: {sum} vs {full}");
                assert!(d.consistent, "{d:?}");
            }
        }
    }

    #[test]
    fn certificates() {
        let c = verify_one_site_positivity(&SingleSpinMeasure::Ising, 0.5, 8, 1e-10).unwrap();
        assert!(c.all_nonnegative && c.decompositions_consistent());
        assert_eq!(c.decompositions.len(), 10);
        let c = verify_one_site_positivity(&SingleSpinMeasure::Ising, 1.5, 4, 1e-10).unwrap();
        assert!(!c.condition_holds);
        let json = c.to_json().unwrap();
        assert!(json.contains("\"M\": 4") && json.contains("\"failures\""));
    }

    #[test]
    fn two_site_uniform_reference() {
        // Sites at the origin and (0.5, 0); each has one collar neighbour.
        let w = BoxWindow::new(2, 10.0, BoundaryMode::Free).unwrap();
        let pts = vec![[0.0; 3], [0.5, 0.0, 0.0], [-0.9, 0.0, 0.0], [1.4, 0.0, 0.0]];
        let g = build_graph(&PointConfiguration::from_points(w, pts, 1.0, 0).unwrap(), 1.0).unwrap();
        assert_eq!(g.edge_count(), 3);
        let phi = InteractionProfile::constant(1.0, 1.0).unwrap();
        let a = SQRT_2 - 1.0;
        let refs = [
            (0.5, 0.080_959_408_226_304_54, 0.038_456_326_111_375_98),
            (1.0, 0.185_673_035_199_474, 0.081_934_629_640_846_5),
            (2.0, 0.436_287_127_462_551_3, 0.175_663_801_169_850_56),
        ];
        for (beta, lhs, rhs) in refs {
            let c = finite_volume_wells_check(&g, &[true, true, false, false], &uniform(), &phi, a, beta, 1e-8).unwrap();
            assert!(c.holds);
            for k in 0..2 {
                assert!((c.lhs[k] - lhs).abs() < 1e-8, "{beta}: {} vs {lhs}", c.lhs[k]);
                assert!((c.rhs[k] - rhs).abs() < 1e-12, "{beta}: {} vs {rhs}", c.rhs[k]);
            }
        }
    }

    #[test]
    fn random_instances_hold() {
        for m in [SingleSpinMeasure::Ising, uniform()] {
            let a = find_a(&m, 1e-10).unwrap().usable();
            for seed in 0..5 {
                let t = random_tiny_instance(&m, seed).unwrap();
                let c = finite_volume_wells_check(&t.graph, &t.interior, &m, &t.profile, a, t.beta, 1e-8).unwrap();
                assert!(c.holds, "{m} seed {seed}: {c:?}");
            }
        }
    }

    #[test]
    fn series_matches_direct_difference() {
        let w = BoxWindow::new(2, 10.0, BoundaryMode::Free).unwrap();
        let pts = vec![[0.0; 3], [0.5, 0.0, 0.0], [-0.7, 0.0, 0.0]];
        let g = build_graph(&PointConfiguration::from_points(w, pts, 1.0, 0).unwrap(), 1.0).unwrap();
        let phi = InteractionProfile::constant(0.8, 1.0).unwrap();
        for m in [SingleSpinMeasure::double_well(), uniform(), SingleSpinMeasure::Ising] {
            let a = find_a(&m, 1e-10).unwrap().usable();
            let beta = 0.6;
            let c = finite_volume_wells_check(&g, &[true, false, false], &m, &phi, a, beta, 1e-10).unwrap();
            let k = beta * a * 2.0 * 0.8;
            let series = one_site_difference_series(&m, a, k, 1e-12).unwrap();
            let direct = c.lhs[0] - c.rhs[0];
            assert!((series - direct).abs() < 1e-9, "{m}: {series} vs {direct}");
        }
    }
}
