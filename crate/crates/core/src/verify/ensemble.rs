//! Random inputs and deterministic corpora.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{AsWitness, Witness};
use crate::car::CarElement;
use crate::cube::{full_set, riesz_product, CubeFunction};
use crate::matrix::{PauliElement, Word};
use crate::{bit, Mask, C64};

fn gaussian(rng: &mut impl Rng, real: bool) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, if real { 0.0 } else { im })
}

/// Level weight for the three spectral profiles, cycled by trial index:
/// flat, decaying like 1/|A|, and concentrated on one random level.
fn profile_weight(index: usize, level: usize, k: usize) -> f64 {
    match index % 3 {
        0 => 1.0,
        1 => 1.0 / k.max(1) as f64,
        _ => {
            if k == level {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Random function with i.i.d. Gaussian Walsh coefficients shaped by the
/// profile of `index`. Real coefficients give a real function.
pub fn random_function(n: usize, index: usize, rng: &mut impl Rng, real: bool) -> CubeFunction {
    let level = rng.gen_range(1..=n);
    let coeffs = (0..1usize << n)
        .map(|a| gaussian(rng, real) * profile_weight(index, level, a.count_ones() as usize))
        .collect();
    CubeFunction::from_coefficients(coeffs).expect("length is a power of two")
}

/// Random element of M'_n with Gaussian Q'-coefficients, profiled like
/// [`random_function`]; `hermitian` symmetrizes it.
pub fn random_car(n: usize, index: usize, rng: &mut impl Rng, hermitian: bool) -> CarElement {
    let level = rng.gen_range(1..=n);
    let coeffs: Vec<(Mask, C64)> = (0..1usize << n)
        .map(|a| (a, gaussian(rng, false) * profile_weight(index, level, a.count_ones() as usize)))
        .collect();
    let t = CarElement::from_coefficients(n, coeffs).expect("valid subsets");
    if hermitian {
        t.add(&t.adjoint()).expect("same n").scale(C64::new(0.5, 0.0))
    } else {
        t
    }
}

/// Random operator on n sites: dense Gaussian Pauli coefficients, or a
/// sparse handful of words, or only words of the form (P or U at one site,
/// I or Q elsewhere).
pub fn random_operator(n: usize, index: usize, rng: &mut impl Rng) -> PauliElement {
    let words = 1u64 << (2 * n);
    let terms: Vec<(Word, C64)> = match index % 3 {
        0 => (0..words).map(|w| (w, gaussian(rng, false))).collect(),
        1 => (0..8).map(|_| (rng.gen_range(0..words), gaussian(rng, false))).collect(),
        _ => (0..words)
            // the high bit of a site is set exactly for P and U
            .filter(|&w| (w >> 1 & 0x5555_5555_5555_5555).count_ones() == 1)
            .map(|w| (w, gaussian(rng, false)))
            .collect(),
    };
    PauliElement::from_terms(n, terms).expect("words fit n sites")
}

fn set_label(a: Mask) -> String {
    let items: Vec<String> = (0..usize::BITS as usize).filter(|&j| a >> j & 1 == 1).map(|j| (j + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn corpus_sets(n: usize) -> Vec<Mask> {
    let all = full_set(n);
    if n <= 6 {
        return (1..=all).collect();
    }
    let mut sets: Vec<Mask> = (1..=all).filter(|a| a.count_ones() <= 2).collect();
    sets.push((1 << n.div_ceil(2)) - 1);
    sets.push(all);
    sets
}

/// Walsh functions, Riesz product, dictator sums, indicators, majority and
/// a constant.
pub fn cube_corpus(n: usize) -> Vec<(String, CubeFunction)> {
    let mut out: Vec<(String, CubeFunction)> = corpus_sets(n)
        .into_iter()
        .map(|a| (format!("omega{}", set_label(a)), CubeFunction::walsh(n, a).expect("valid set")))
        .collect();
    out.push(("riesz".into(), riesz_product(n).expect("valid n")));
    let level1 = |w: f64| {
        let mut c = vec![C64::new(0.0, 0.0); 1 << n];
        for j in 1..=n {
            c[bit(j)] = C64::new(w, 0.0);
        }
        CubeFunction::from_coefficients(c).expect("valid length")
    };
    out.push(("dictator-sum".into(), level1(1.0 / (n as f64).sqrt())));
    out.push(("hamming".into(), level1(1.0 / n as f64)));
    let from = |f: &dyn Fn(Mask) -> f64| {
        CubeFunction::from_real_values(&(0..1usize << n).map(f).collect::<Vec<_>>()).expect("valid length")
    };
    out.push(("indicator-x1".into(), from(&|x| if x & 1 == 0 { 1.0 } else { 0.0 })));
    out.push(("majority".into(), from(&|x| (n as f64 - 2.0 * x.count_ones() as f64).signum())));
    out.push(("constant".into(), CubeFunction::constant(n, C64::new(1.0, 0.0)).expect("valid n")));
    out
}

/// Q'_A, the identity and linear combinations of the generators.
pub fn car_corpus(n: usize) -> Vec<(String, CarElement)> {
    let mut out: Vec<(String, CarElement)> = corpus_sets(n.min(4))
        .into_iter()
        .chain((n > 4).then(|| full_set(n)))
        .map(|a| (format!("qprime{}", set_label(a)), CarElement::q_prime(n, a).expect("valid set")))
        .collect();
    out.push(("identity".into(), CarElement::q_prime(n, 0).expect("valid n")));
    let lin = |w: &dyn Fn(usize) -> f64| {
        CarElement::from_coefficients(n, (1..=n).map(|j| (bit(j), C64::new(w(j), 0.0)))).expect("valid sets")
    };
    out.push(("generator-sum".into(), lin(&|_| 1.0 / (n as f64).sqrt())));
    out.push(("generator-ramp".into(), lin(&|j| j as f64)));
    out
}

impl AsWitness for CubeFunction {
    fn witness(&self, label: String) -> Witness {
        Witness {
            label,
            basis: "walsh".into(),
            terms: self
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() != 0.0)
                .map(|(a, c)| (a as u64, c.re, c.im))
                .collect(),
        }
    }
}

impl AsWitness for CarElement {
    fn witness(&self, label: String) -> Witness {
        Witness {
            label,
            basis: "car".into(),
            terms: self.coeffs().iter().map(|(&a, c)| (a as u64, c.re, c.im)).collect(),
        }
    }
}

impl AsWitness for PauliElement {
    fn witness(&self, label: String) -> Witness {
        Witness {
            label,
            basis: "pauli".into(),
            terms: self.terms().iter().map(|(&w, c)| (w, c.re, c.im)).collect(),
        }
    }
}

impl<T: AsWitness, S> AsWitness for (T, S) {
    fn witness(&self, label: String) -> Witness {
        self.0.witness(label)
    }
}
