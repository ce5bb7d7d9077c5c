//! Quadrature-backed identities against spectral sides computed by the
//! oracle from Walsh or Q'_A coefficients and Γ.

use cubecar::car::{car_generator, car_number, car_projection_pi_prime, CarElement};
use cubecar::cube::CubeFunction;
use cubecar::matrix::{pauli_generator, projection_pi, rotation_integral, Letter, PauliElement};
use cubecar::spectral::{fractional_laplacian, fractional_laplacian_integral, gamma_integral_check};
use cubecar_oracles::{self as o, Mat, C};

use super::{max_diff, oracle_dense};

const TOL: f64 = 1e-11;

/// |library quadrature - Γ(β)λ^{-β}| with Γ from the oracle.
pub fn gamma_identity_error(lambda: f64, beta: f64) -> f64 {
    let (lhs, quad) = gamma_integral_check(lambda, beta).unwrap();
    let exact = o::gamma(beta) * lambda.powf(-beta);
    (quad - exact).abs().max((lhs - exact).abs())
}

/// Integral representation of Δ^α f against (4|A|)^α f̂(A).
pub fn fractional_integral_error(f: &CubeFunction, alpha: f64) -> f64 {
    let expect: Vec<C> = o::walsh_coefficients(f.values())
        .iter()
        .enumerate()
        .map(|(a, z)| if a == 0 { C::new(0.0, 0.0) } else { z * (4.0 * a.count_ones() as f64).powf(alpha) })
        .collect();
    let integral = fractional_laplacian_integral(f, alpha, TOL).unwrap();
    let spectral = fractional_laplacian(f, alpha).unwrap();
    max_diff(integral.coeffs(), &expect).max(max_diff(spectral.coeffs(), &expect))
}

fn weight(beta: f64) -> impl Fn(&cubecar::spectral::quad::LogCos) -> f64 {
    move |lc| ((beta - 1.0) * lc.ln_l).exp()
}

/// P_jΠ_j ∫_0^{π/2} e^{θ𝓓}(S)(-ln cos θ)^{β-1} dθ = Γ(β) D_j N^{-β}(S) for
/// S ∈ M_n of mean zero; the right side is assembled from τ(Q_A S).
pub fn rotation_identity_error(s: &PauliElement, beta: f64, j: usize) -> f64 {
    let n = s.n();
    let integral = rotation_integral(s, weight(beta), TOL).unwrap();
    let lhs = pauli_generator(Letter::P, j, n).unwrap().mul(&projection_pi(&integral, j).unwrap()).unwrap();
    let os = oracle_dense(s);
    let dim = 1usize << n;
    let rhs = (0..dim).filter(|&a| a >> (j - 1) & 1 == 1).fold(Mat::zeros(dim, dim), |m, a| {
        let coef = o::pairing(&o::q_set(a, n), &os) * (o::gamma(beta) * (a.count_ones() as f64).powf(-beta));
        m + o::q_set(a & !(1 << (j - 1)), n) * coef
    });
    o::max_abs_diff(&oracle_dense(&lhs), &rhs)
}

/// P'_jΠ'_j ∫ e^{θ𝓓}(N'^β T)(-ln cos θ)^{β-1} dθ = Γ(β) D'_j(T), with
/// D'_j(T) = Q'_j times the part of T on the Q'_A with j ∈ A.
pub fn car_rotation_identity_error(t: &CarElement, beta: f64, j: usize) -> f64 {
    let n = t.n();
    let integral = rotation_integral(car_number(t, beta).unwrap().pauli(), weight(beta), TOL).unwrap();
    let lhs = car_generator(Letter::P, j, n).unwrap().mul(&car_projection_pi_prime(&integral, j).unwrap()).unwrap();
    let dim = 1usize << n;
    let with_j: Vec<Mat> = (0..dim).filter(|&a| a >> (j - 1) & 1 == 1).map(|a| o::q_prime(a, n)).collect();
    let rhs = o::jw('Q', j, n) * o::project(&with_j, &oracle_dense(t.pauli())) * C::new(o::gamma(beta), 0.0);
    o::max_abs_diff(&oracle_dense(&lhs), &rhs)
}
