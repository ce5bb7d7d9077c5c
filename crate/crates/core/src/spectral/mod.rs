//! Spectral multipliers on the Walsh levels and the constants K_α, k_β.

pub mod gamma;
pub mod quad;

use std::f64::consts::FRAC_PI_2;

pub use gamma::gamma;
pub use quad::{integrate_singular, integrate_singular_at, integrate_vec, Abscissa, QuadratureResult};

use crate::cube::CubeFunction;
use crate::error::{invalid, Result};
use crate::C64;

/// Default absolute tolerance for the constants.
pub const CONSTANT_TOL: f64 = 1e-12;

/// A function of the level k = |A|, applied coefficientwise:
/// f̂(A) ↦ m(|A|) f̂(A).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMultiplier {
    levels: Vec<C64>,
}

impl SpectralMultiplier {
    pub fn new(levels: Vec<C64>) -> Self {
        Self { levels }
    }

    pub fn from_fn(n: usize, m: impl Fn(usize) -> C64) -> Self {
        Self::new((0..=n).map(m).collect())
    }

    pub fn real(n: usize, m: impl Fn(usize) -> f64) -> Self {
        Self::from_fn(n, |k| C64::new(m(k), 0.0))
    }

    /// cos^N θ.
    pub fn cosine(n: usize, theta: f64) -> Result<Self> {
        check_angle(theta)?;
        Ok(Self::real(n, |k| cos_pow(theta, k)))
    }

    /// Δ^α with the convention 0^α = 0 on the constants.
    pub fn laplacian_power(n: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(invalid(format!("exponent {alpha} must be positive")));
        }
        Ok(Self::real(n, |k| if k == 0 { 0.0 } else { (4.0 * k as f64).powf(alpha) }))
    }

    /// N^α = (Δ/4)^α for any real α, with the level 0 sent to 0.
    pub fn number_power(n: usize, alpha: f64) -> Self {
        Self::real(n, |k| if k == 0 { 0.0 } else { (k as f64).powf(alpha) })
    }

    /// e^{-tΔ}.
    pub fn heat(n: usize, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(invalid(format!("time {t} must be nonnegative")));
        }
        Ok(Self::real(n, |k| (-4.0 * k as f64 * t).exp()))
    }

    pub fn n(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> C64 {
        self.levels[k]
    }

    pub fn levels(&self) -> &[C64] {
        &self.levels
    }

    /// Pointwise product m₁·m₂, i.e. the composition of the two multipliers.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.levels.len() != other.levels.len() {
            return Err(invalid("multipliers of different dimension"));
        }
        Ok(Self::new(self.levels.iter().zip(&other.levels).map(|(a, b)| a * b).collect()))
    }
}

pub(crate) fn check_angle(theta: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(invalid(format!("angle {theta} outside [0, π/2]")));
    }
    Ok(())
}

/// cos^k θ with the exact limit 0 at θ = π/2 for k ≥ 1.
pub(crate) fn cos_pow(theta: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else if theta == FRAC_PI_2 {
        0.0
    } else {
        theta.cos().powi(k as i32)
    }
}

pub fn apply_multiplier(f: &CubeFunction, m: &SpectralMultiplier) -> Result<CubeFunction> {
    if m.n() != f.n() {
        return Err(invalid(format!("multiplier for n = {} applied to n = {}", m.n(), f.n())));
    }
    Ok(f.map_coeffs(|a, z| z * m.level(a.count_ones() as usize)))
}

pub fn cosine_semigroup(f: &CubeFunction, theta: f64) -> Result<CubeFunction> {
    apply_multiplier(f, &SpectralMultiplier::cosine(f.n(), theta)?)
}

pub fn fractional_laplacian(f: &CubeFunction, alpha: f64) -> Result<CubeFunction> {
    apply_multiplier(f, &SpectralMultiplier::laplacian_power(f.n(), alpha)?)
}

pub fn number_power(f: &CubeFunction, alpha: f64) -> Result<CubeFunction> {
    apply_multiplier(f, &SpectralMultiplier::number_power(f.n(), alpha))
}

pub fn heat_semigroup(f: &CubeFunction, t: f64) -> Result<CubeFunction> {
    apply_multiplier(f, &SpectralMultiplier::heat(f.n(), t)?)
}

/// Δ^α f from the singular-integral representation
/// Γ(1-α) N^α f = -∫_0^{π/2} (-ln cos θ)^{-α} d/dθ cos^N θ(f) dθ,
/// with d/dθ cos^k θ = -k cos^{k-1}θ sin θ taken analytically.
pub fn fractional_laplacian_integral(f: &CubeFunction, alpha: f64, tol: f64) -> Result<CubeFunction> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(invalid(format!("exponent {alpha} outside (0, 1/2)")));
    }
    let n = f.n();
    let r = integrate_vec(
        |p, out: &mut [f64]| {
            let lc = quad::log_cos(p);
            let w = (-alpha * lc.ln_l).exp() * lc.sin;
            for (i, o) in out.iter_mut().enumerate() {
                let k = i + 1;
                *o = k as f64 * (-(k as f64 - 1.0) * lc.l).exp() * w;
            }
        },
        n,
        0.0,
        FRAC_PI_2,
        tol,
    )?;
    let scale = 4f64.powf(alpha) / gamma(1.0 - alpha);
    let m = SpectralMultiplier::real(n, |k| if k == 0 { 0.0 } else { r.values[k - 1] * scale });
    apply_multiplier(f, &m)
}

/// K_α = ∫_0^{π/2} (-ln cos θ)^{-α} dθ / Γ(1-α) for 0 < α < 1/2.
pub fn constant_k_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(invalid(format!("K_α needs 0 < α < 1/2, got {alpha}")));
    }
    let r = quad::integrate_quarter(|lc| (-alpha * lc.ln_l).exp(), CONSTANT_TOL)?;
    Ok(r.value / gamma(1.0 - alpha))
}

/// k_β = ∫_0^{π/2} (-ln cos θ)^{β-1} dθ / Γ(β) for β > 1/2.
pub fn constant_k_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.5) || !beta.is_finite() {
        return Err(invalid(format!("k_β needs β > 1/2, got {beta}")));
    }
    if beta == 1.0 {
        return Ok(FRAC_PI_2);
    }
    let r = quad::integrate_quarter(|lc| ((beta - 1.0) * lc.ln_l).exp(), CONSTANT_TOL)?;
    Ok(r.value / gamma(beta))
}

/// Both sides of Γ(β)λ^{-β} = ∫_0^{π/2} cos^{λ-1}θ (-ln cos θ)^{β-1} sin θ dθ.
pub fn gamma_integral_check(lambda: f64, beta: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0 && beta > 0.0) {
        return Err(invalid("λ and β must be positive"));
    }
    let lhs = gamma(beta) * lambda.powf(-beta);
    let r = quad::integrate_quarter(
        |lc| (-(lambda - 1.0) * lc.l + (beta - 1.0) * lc.ln_l).exp() * lc.sin,
        1e-11,
    )?;
    Ok((lhs, r.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{partial_derivative, subset};
    use rand::{Rng, SeedableRng};

    fn random(n: usize, seed: u64) -> CubeFunction {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        CubeFunction::from_values(
            (0..1 << n)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    fn max_diff(a: &CubeFunction, b: &CubeFunction) -> f64 {
        a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn laplacian_points(f: &CubeFunction) -> CubeFunction {
        let mut acc = f.scale(C64::new(0.0, 0.0));
        for j in 1..=f.n() {
            let d = partial_derivative(&partial_derivative(f, j).unwrap(), j).unwrap();
            acc = acc.add(&d).unwrap();
        }
        acc
    }

    #[test]
    fn identity_and_cosine_examples() {
        let f = random(4, 1);
        let id = SpectralMultiplier::real(4, |_| 1.0);
        assert_eq!(apply_multiplier(&f, &id).unwrap().coeffs(), f.coeffs());
        let w = CubeFunction::walsh(2, subset(&[1, 2])).unwrap();
        let m = SpectralMultiplier::real(2, |k| (std::f64::consts::PI / 3.0).cos().powi(k as i32));
        let g = apply_multiplier(&w, &m).unwrap();
        assert!((g.coeffs()[3].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn level_multiplier_four_k_is_the_laplacian() {
        let f = random(5, 2);
        let g = apply_multiplier(&f, &SpectralMultiplier::real(5, |k| 4.0 * k as f64)).unwrap();
        assert!(max_diff(&g, &laplacian_points(&f)) < 1e-11);
        let h = fractional_laplacian(&f, 1.0).unwrap();
        assert!(max_diff(&h, &laplacian_points(&f)) < 1e-11);
    }

    #[test]
    fn cosine_semigroup_cases() {
        let f = random(6, 3);
        assert_eq!(cosine_semigroup(&f, 0.0).unwrap().coeffs(), f.coeffs());
        let e = cosine_semigroup(&f, FRAC_PI_2).unwrap();
        assert_eq!(e.coeffs()[0], f.mean());
        assert!(e.coeffs()[1..].iter().all(|z| *z == C64::new(0.0, 0.0)));
        assert!(cosine_semigroup(&f, -0.1).is_err());
        assert!(cosine_semigroup(&f, 1.6).is_err());
        let th = 0.7;
        for a in 0..64usize {
            let w = CubeFunction::walsh(6, a).unwrap();
            let g = cosine_semigroup(&w, th).unwrap();
            assert!((g.coeffs()[a].re - th.cos().powi(a.count_ones() as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn fractional_powers() {
        for a in 0..16usize {
            let w = CubeFunction::walsh(4, a).unwrap();
            let g = fractional_laplacian(&w, 0.5).unwrap();
            assert!((g.coeffs()[a].re - 2.0 * (a.count_ones() as f64).sqrt()).abs() < 1e-14);
        }
        let f = random(5, 4);
        let lhs = fractional_laplacian(&fractional_laplacian(&f, 0.3).unwrap(), 0.45).unwrap();
        let rhs = fractional_laplacian(&f, 0.75).unwrap();
        assert!(max_diff(&lhs, &rhs) < 1e-11);
        assert!(fractional_laplacian(&f, 0.0).is_err());
    }

    #[test]
    fn multiplier_calculus() {
        let f = random(5, 5);
        let m1 = SpectralMultiplier::real(5, |k| 1.0 + k as f64);
        let m2 = SpectralMultiplier::from_fn(5, |k| C64::new(0.5, k as f64));
        let lhs = apply_multiplier(&apply_multiplier(&f, &m1).unwrap(), &m2).unwrap();
        let rhs = apply_multiplier(&f, &m1.compose(&m2).unwrap()).unwrap();
        assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn heat_semigroup_is_markovian() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let vals: Vec<f64> = (0..64).map(|_| rng.gen_range(-2.0..3.0)).collect();
        let f = CubeFunction::from_real_values(&vals).unwrap();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        for t in [0.0, 0.01, 0.1, 1.0, 5.0] {
            let g = heat_semigroup(&f, t).unwrap();
            assert!(g.values().iter().all(|z| z.re >= lo - 1e-12));
            assert!((g.mean() - f.mean()).norm() < 1e-14);
        }
    }

    #[test]
    fn integral_fractional_laplacian_examples() {
        let w = CubeFunction::walsh(1, 1).unwrap();
        let g = fractional_laplacian_integral(&w, 0.25, 1e-11).unwrap();
        assert!((g.coeffs()[1].re - 2f64.sqrt()).abs() < 1e-8);
        let c = CubeFunction::constant(3, C64::new(2.0, 1.0)).unwrap();
        assert!(fractional_laplacian_integral(&c, 0.25, 1e-11).unwrap().sup_norm() < 1e-15);
        let f = random(4, 7);
        let a = fractional_laplacian_integral(&f, 0.4, 1e-11).unwrap();
        let b = fractional_laplacian(&f, 0.4).unwrap();
        assert!(max_diff(&a, &b) < 1e-7);
        assert!(fractional_laplacian_integral(&f, 0.5, 1e-11).is_err());
    }

    #[test]
    fn constants_basic_values() {
        assert!((constant_k_beta(1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let k2 = constant_k_beta(2.0).unwrap();
        assert!((k2 - FRAC_PI_2 * std::f64::consts::LN_2).abs() < 1e-11);
        assert!((constant_k_alpha(1e-9).unwrap() - FRAC_PI_2).abs() < 1e-7);
        assert!(constant_k_alpha(0.49).unwrap().is_finite());
        assert!(constant_k_alpha(0.5).is_err());
        assert!(constant_k_alpha(0.0).is_err());
        assert!(constant_k_beta(0.5).is_err());
        assert!(constant_k_beta(0.6).unwrap().is_finite());
    }

    #[test]
    fn reverse_constant_exceeds_walsh_requirement() {
        for beta in [0.6, 0.75, 1.0, 1.5, 2.0, 3.0] {
            let k = constant_k_beta(beta).unwrap();
            assert!(k >= 2.0 / 4f64.powf(beta), "β={beta}");
        }
    }

    #[test]
    fn gamma_integral_small_cases() {
        let (l, r) = gamma_integral_check(1.0, 1.0).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (r - 1.0).abs() < 1e-10);
        let (l, r) = gamma_integral_check(4.0, 0.5).unwrap();
        assert!((l - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
        assert!((l - r).abs() < 1e-8);
        let (l, r) = gamma_integral_check(20.0, 0.75).unwrap();
        assert!((l - r).abs() < 1e-8);
        assert!(gamma_integral_check(0.0, 1.0).is_err());
    }
}
