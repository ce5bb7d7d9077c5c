//! Exact algebraic identities checked in coefficient arithmetic, with the
//! expected sides produced by the oracle.

use cubecar::car::{car_generator, car_semigroup, conditional_expectation_mn_prime, CarElement};
use cubecar::cube::CubeFunction;
use cubecar::matrix::{conditional_expectation_mn, embed_function, extract_function, rotate, Letter, PauliElement};
use cubecar::spectral::cosine_semigroup;
use cubecar_oracles::{self as o, Mat, C};

use super::{max_diff, oracle_dense};

/// max_A |𝓔_{M_n} e^{θ𝓓} I_n(f) - cos^{|A|}θ f̂(A)|, also against the
/// library's spectral semigroup.
pub fn factorization_deviation(f: &CubeFunction, theta: f64) -> f64 {
    let lhs = extract_function(&conditional_expectation_mn(&rotate(&embed_function(f), theta))).unwrap();
    let expect: Vec<C> = o::walsh_coefficients(f.values())
        .iter()
        .enumerate()
        .map(|(a, z)| z * theta.cos().powi(a.count_ones() as i32))
        .collect();
    let spectral = cosine_semigroup(f, theta).unwrap();
    max_diff(lhs.coeffs(), &expect).max(max_diff(spectral.coeffs(), &expect))
}

/// 𝓔_{M'_n} e^{θ𝓓} T = cos^{N'}θ(T): the library's word arithmetic against
/// the oracle's rotated matrix projected on the Q'_A.
pub fn car_factorization_deviation(t: &CarElement, theta: f64) -> f64 {
    let n = t.n();
    let dim = 1usize << n;
    let lib = conditional_expectation_mn_prime(&rotate(t.pauli(), theta));
    let r = Mat::from_diagonal(&o::nalgebra::DVector::from_fn(dim, |x, _| {
        C::from_polar(1.0, theta * x.count_ones() as f64)
    }));
    let ot = oracle_dense(t.pauli());
    let fam: Vec<Mat> = (0..dim).map(|a| o::q_prime(a, n)).collect();
    let oracle = o::project(&fam, &(r.adjoint() * &ot * &r));
    let expect = fam.iter().enumerate().fold(Mat::zeros(dim, dim), |m, (a, q)| {
        m + q * (o::pairing(q, &ot) * theta.cos().powi(a.count_ones() as i32))
    });
    let mut d = o::max_abs_diff(&oracle_dense(lib.pauli()), &expect).max(o::max_abs_diff(&oracle, &expect));
    if (0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        d = d.max(o::max_abs_diff(&oracle_dense(car_semigroup(t, theta).unwrap().pauli()), &expect));
    }
    d
}

fn gen(l: Letter, j: usize, n: usize) -> PauliElement {
    car_generator(l, j, n).unwrap()
}

fn anti(a: &PauliElement, b: &PauliElement) -> PauliElement {
    a.mul(b).unwrap().add(&b.mul(a).unwrap()).unwrap()
}

/// Largest coefficient error in the anticommutation relations, hermiticity,
/// unitarity and P'_j Q'_A P'_j = (-1)^{|A|} Q'_A = P'_1 Q'_A P'_1;
/// zero when they hold exactly.
pub fn car_relation_error(n: usize) -> f64 {
    let id = PauliElement::identity(n).unwrap();
    let zero = PauliElement::zero(n).unwrap();
    let two = id.scale(C::new(2.0, 0.0));
    let mut err = 0.0f64;
    for j in 1..=n {
        let (qj, pj) = (gen(Letter::Q, j, n), gen(Letter::P, j, n));
        err = err.max(qj.adjoint().max_abs_diff(&qj)).max(pj.adjoint().max_abs_diff(&pj));
        err = err.max(qj.mul(&qj).unwrap().max_abs_diff(&id)).max(pj.mul(&pj).unwrap().max_abs_diff(&id));
        for k in 1..=n {
            let (qk, pk) = (gen(Letter::Q, k, n), gen(Letter::P, k, n));
            err = err.max(anti(&qj, &pk).max_abs_diff(&zero));
            let same = if j == k { &two } else { &zero };
            err = err.max(anti(&qj, &qk).max_abs_diff(same)).max(anti(&pj, &pk).max_abs_diff(same));
        }
    }
    let p1 = gen(Letter::P, 1, n);
    for a in 0..1usize << n {
        let qa = CarElement::q_prime(n, a).unwrap();
        let qa = qa.pauli();
        let sign = if a.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let expect = qa.scale(C::new(sign, 0.0));
        for j in 1..=n {
            let pj = gen(Letter::P, j, n);
            err = err.max(pj.mul(qa).unwrap().mul(&pj).unwrap().max_abs_diff(&expect));
        }
        err = err.max(p1.mul(qa).unwrap().mul(&p1).unwrap().max_abs_diff(&expect));
    }
    err
}

/// R_θ* Q'_A R_θ = Π_{j∈A} (cos θ Q'_j + sin θ P'_j), in word arithmetic.
pub fn car_rotation_error(n: usize, theta: f64) -> f64 {
    let (c, s) = (C::new(theta.cos(), 0.0), C::new(theta.sin(), 0.0));
    let mut err = 0.0f64;
    for a in 0..1usize << n {
        let prod = (1..=n).filter(|&j| a >> (j - 1) & 1 == 1).fold(PauliElement::identity(n).unwrap(), |m, j| {
            let factor = gen(Letter::Q, j, n).scale(c).add(&gen(Letter::P, j, n).scale(s)).unwrap();
            m.mul(&factor).unwrap()
        });
        let rotated = rotate(CarElement::q_prime(n, a).unwrap().pauli(), theta);
        err = err.max(rotated.max_abs_diff(&prod));
    }
    err
}
