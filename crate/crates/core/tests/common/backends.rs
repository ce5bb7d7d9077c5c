//! Pauli-coefficient results against matrices assembled by the oracle from
//! the defining formulas, one deviation per operation.

use std::collections::BTreeMap;

use cubecar::car::{
    car_annihilation, car_creation, car_generator, car_number, car_projection_pi_prime, car_semigroup,
    car_sign_flip, conditional_expectation_mn_prime, symmetrized_gradient, symmetrized_gradient_square,
    v_operator, CarElement,
};
use cubecar::cube::CubeFunction;
use cubecar::matrix::{
    conditional_expectation_mn, d_operator_mn, derivation, embed_function, extract_function, multiplier_mn,
    pauli_generator, projection_pi, projection_pi_total, q_set, rotate, sign_flip, trace, vn_conjugation,
    Letter, PauliElement,
};
use cubecar::C64;
use cubecar_oracles::{self as o, c, Mat, C};
use rand::Rng;

use super::{complex, oracle_dense, random_function, random_pauli, to_mat};

fn bit(m: usize, j: usize) -> bool {
    m >> (j - 1) & 1 == 1
}

fn dev(a: &Mat, b: &Mat) -> f64 {
    o::max_abs_diff(a, b)
}

fn rotation(theta: f64, n: usize) -> Mat {
    Mat::from_diagonal(&nalgebra_vec((0..1usize << n).map(|x| C::from_polar(1.0, theta * x.count_ones() as f64)).collect()))
}

fn nalgebra_vec(v: Vec<C>) -> o::nalgebra::DVector<C> {
    o::nalgebra::DVector::from_vec(v)
}

fn car_family(n: usize) -> Vec<Mat> {
    (0..1 << n).map(|a| o::q_prime(a, n)).collect()
}

/// Every word-level operation compared with its dense definition on one
/// random instance; returns the deviation per operation.
pub fn deviations(n: usize, rng: &mut impl Rng, sparse: bool) -> BTreeMap<&'static str, f64> {
    let mut out = BTreeMap::new();
    let mut put = |k: &'static str, v: f64| {
        let e = out.entry(k).or_insert(0.0f64);
        *e = e.max(v);
    };
    let dim = 1usize << n;
    let terms = if sparse { Some(12) } else { None };
    let a = random_pauli(n, terms, rng);
    let b = random_pauli(n, terms, rng);
    let (oa, ob) = (oracle_dense(&a), oracle_dense(&b));
    let f: CubeFunction = random_function(n, rng);
    let s = embed_function(&f);
    let os = oracle_dense(&s);
    let theta = rng.gen_range(-3.0..3.0);
    let j = rng.gen_range(1..=n);
    let eps: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();

    put("to_dense", dev(&to_mat(&a.to_dense()), &oa));
    put("from_dense", PauliElement::from_dense(&a.to_dense()).unwrap().max_abs_diff(&a));
    put("mul", dev(&oracle_dense(&a.mul(&b).unwrap()), &(&oa * &ob)));
    put("add", dev(&oracle_dense(&a.add(&b).unwrap()), &(&oa + &ob)));
    put("adjoint", dev(&oracle_dense(&a.adjoint()), &oa.adjoint()));
    put("trace", (trace(&a) - o::tau(&oa)).norm());
    for l in [Letter::Q, Letter::P, Letter::U] {
        put("pauli_generator", dev(&oracle_dense(&pauli_generator(l, j, n).unwrap()), &o::site(l.symbol(), j, n)));
    }
    let set = rng.gen_range(0..dim);
    put("q_set", dev(&oracle_dense(&q_set(n, set).unwrap()), &o::q_set(set, n)));

    // I_n(f) = Σ f̂(A) Q_A, and 𝓥_n carries it to the multiplication operator
    let fhat = o::walsh_coefficients(f.values());
    let embed = (0..dim).fold(Mat::zeros(dim, dim), |m, x| m + o::q_set(x, n) * fhat[x]);
    put("embed_function", dev(&os, &embed));
    let back = extract_function(&s).unwrap();
    put("extract_function", super::max_diff(back.values(), f.values()));
    let diag = Mat::from_diagonal(&nalgebra_vec(f.values().to_vec()));
    put("vn_conjugation", dev(&to_mat(&vn_conjugation(&s.to_dense()).unwrap()), &diag));

    let r = rotation(theta, n);
    put("rotate", dev(&oracle_dense(&rotate(&a, theta)), &(r.adjoint() * &oa * &r)));
    let ntil = Mat::from_diagonal(&nalgebra_vec((0..dim).map(|x| c(x.count_ones() as f64)).collect()));
    let gen = (&os * &ntil - &ntil * &os) * C::new(0.0, 1.0);
    put("derivation", dev(&oracle_dense(&derivation(&s).unwrap()), &gen));
    let (qj, uj) = (o::site('Q', j, n), o::site('U', j, n));
    let dj = &qj * (&os - &uj * &os * &uj) * c(0.5);
    put("d_operator_mn", dev(&oracle_dense(&d_operator_mn(&s, j).unwrap()), &dj));
    let m = |k: usize| C64::new((k as f64 + 1.0).ln(), 0.3 * k as f64);
    let multiplied = (0..dim).fold(Mat::zeros(dim, dim), |acc, x| {
        let q = o::q_set(x, n);
        let k = x.count_ones() as usize;
        let coef = o::pairing(&q, &os) * m(k);
        acc + q * coef
    });
    put("multiplier_mn", dev(&oracle_dense(&multiplier_mn(&s, m).unwrap()), &multiplied));
    let qs: Vec<Mat> = (0..dim).map(|x| o::q_set(x, n)).collect();
    put("conditional_expectation_mn", dev(&oracle_dense(&conditional_expectation_mn(&a)), &o::project(&qs, &oa)));
    put(
        "conditional_expectation_mn_dense",
        dev(&to_mat(&cubecar::matrix::dense::conditional_expectation_mn(&a.to_dense()).unwrap()), &o::project(&qs, &oa)),
    );
    let mut total = Mat::zeros(dim, dim);
    for k in 1..=n {
        let pk = o::site('P', k, n);
        let fam: Vec<Mat> = qs.iter().map(|q| &pk * q).collect();
        let pr = o::project(&fam, &oa);
        if k == j {
            put("projection_pi", dev(&oracle_dense(&projection_pi(&a, k).unwrap()), &pr));
        }
        total += pr;
    }
    put("projection_pi_total", dev(&oracle_dense(&projection_pi_total(&a)), &total));
    let qe = o::q_set((0..n).filter(|&i| eps[i] == -1).fold(0, |m, i| m | 1 << i), n);
    put("sign_flip", dev(&oracle_dense(&sign_flip(&a, &eps).unwrap()), &(&qe * &oa * &qe)));

    // CAR side
    let fam = car_family(n);
    for l in [Letter::Q, Letter::P] {
        put("car_generator", dev(&oracle_dense(&car_generator(l, j, n).unwrap()), &o::jw(l.symbol(), j, n)));
    }
    let v = o::word_matrix(&(1..=n).map(|k| if k < j { 'I' } else if k == j { 'Q' } else { 'U' }).collect::<Vec<_>>());
    put("v_operator", dev(&oracle_dense(&v_operator(j, n).unwrap()), &v));
    let set = rng.gen_range(0..dim);
    put("q_prime", dev(&oracle_dense(CarElement::q_prime(n, set).unwrap().pauli()), &fam[set]));
    let coeffs: Vec<(usize, C64)> = (0..dim).map(|x| (x, complex(rng))).collect();
    let t = CarElement::from_coefficients(n, coeffs.clone()).unwrap();
    let u = CarElement::from_coefficients(n, (0..dim).map(|x| (x, complex(rng)))).unwrap();
    let ot = coeffs.iter().fold(Mat::zeros(dim, dim), |m, &(x, z)| m + &fam[x] * z);
    let ou = oracle_dense(u.pauli());
    put("car_element", dev(&oracle_dense(t.pauli()), &ot));
    put("car_to_dense", dev(&to_mat(&t.to_dense()), &ot));
    put("car_mul", dev(&oracle_dense(t.mul(&u).unwrap().pauli()), &(&ot * &ou)));
    put("car_adjoint", dev(&oracle_dense(t.adjoint().pauli()), &ot.adjoint()));
    put("car_trace", (t.trace() - o::tau(&ot)).norm());
    put("car_from_pauli", CarElement::from_pauli(t.pauli()).unwrap().pauli().max_abs_diff(t.pauli()));
    // D'_j(Q'_A) = Q'_j Q'_A for j ∈ A, 0 otherwise, and D'*_j = Q'_j on j ∉ A
    let with_j: Vec<Mat> = (0..dim).filter(|&x| bit(x, j)).map(|x| fam[x].clone()).collect();
    let without_j: Vec<Mat> = (0..dim).filter(|&x| !bit(x, j)).map(|x| fam[x].clone()).collect();
    let qpj = o::jw('Q', j, n);
    let ann = &qpj * o::project(&with_j, &ot);
    put("car_annihilation", dev(&oracle_dense(car_annihilation(&t, j).unwrap().pauli()), &ann));
    put("car_creation", dev(&oracle_dense(car_creation(&t, j).unwrap().pauli()), &(&qpj * o::project(&without_j, &ot))));
    let alpha = rng.gen_range(0.0..2.0);
    let level = |x: usize, w: &dyn Fn(usize) -> f64| fam[x].clone() * (o::pairing(&fam[x], &ot) * w(x.count_ones() as usize));
    let num = (1..dim).fold(Mat::zeros(dim, dim), |m, x| m + level(x, &|k| (k as f64).powf(alpha)));
    put("car_number", dev(&oracle_dense(car_number(&t, alpha).unwrap().pauli()), &num));
    let phi = rng.gen_range(0.0..std::f64::consts::FRAC_PI_2);
    let semi = (0..dim).fold(Mat::zeros(dim, dim), |m, x| m + level(x, &|k| phi.cos().powi(k as i32)));
    put("car_semigroup", dev(&oracle_dense(car_semigroup(&t, phi).unwrap().pauli()), &semi));
    let mut g2 = Mat::zeros(dim, dim);
    for k in 1..=n {
        let wk: Vec<Mat> = (0..dim).filter(|&x| bit(x, k)).map(|x| fam[x].clone()).collect();
        let x = o::jw('Q', k, n) * o::project(&wk, &ot);
        g2 += x.adjoint() * &x + &x * x.adjoint();
    }
    put("symmetrized_gradient_square", dev(&oracle_dense(&symmetrized_gradient_square(&t).unwrap()), &g2));
    let g = to_mat(&symmetrized_gradient(&t).unwrap());
    put("symmetrized_gradient", dev(&(&g * &g), &g2).max(dev(&g, &g.adjoint())));
    put("conditional_expectation_mn_prime", dev(&oracle_dense(conditional_expectation_mn_prime(&a).pauli()), &o::project(&fam, &oa)));
    let ppj = o::jw('P', j, n);
    let pfam: Vec<Mat> = fam.iter().map(|q| &ppj * q).collect();
    put("car_projection_pi_prime", dev(&oracle_dense(&car_projection_pi_prime(&a, j).unwrap()), &o::project(&pfam, &oa)));
    put("car_sign_flip", dev(&oracle_dense(&car_sign_flip(&a, j).unwrap()), &(&v * &oa * &v)));
    out
}
