#![allow(dead_code)]

use cubecar::cube::CubeFunction;
use cubecar::matrix::{DenseOperator, PauliElement};
use cubecar::C64;
use cubecar_oracles::{Mat, C};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_mat(d: &DenseOperator) -> Mat {
    Mat::from_fn(d.dim(), d.dim(), |r, c| d.get(r, c))
}

pub fn complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_values(n: usize, rng: &mut impl Rng) -> Vec<C> {
    (0..1 << n).map(|_| complex(rng)).collect()
}

pub fn random_function(n: usize, rng: &mut impl Rng) -> CubeFunction {
    CubeFunction::from_values(random_values(n, rng)).unwrap()
}

pub fn random_real_function(n: usize, rng: &mut impl Rng) -> CubeFunction {
    CubeFunction::from_values((0..1 << n).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)).collect()).unwrap()
}

/// Random element of M_{2^n} with `terms` random words (all words when
/// `terms` is None).
pub fn random_pauli(n: usize, terms: Option<usize>, rng: &mut impl Rng) -> PauliElement {
    let words = 1u64 << (2 * n);
    match terms {
        None => PauliElement::from_terms(n, (0..words).map(|w| (w, complex(rng)))).unwrap(),
        Some(k) => PauliElement::from_terms(n, (0..k).map(|_| (rng.gen_range(0..words), complex(rng)))).unwrap(),
    }
}

/// Letters of a packed word, site 1 first.
pub fn letters_of(w: u64, n: usize) -> Vec<char> {
    (0..n).map(|j| ['I', 'Q', 'P', 'U'][((w >> (2 * j)) & 3) as usize]).collect()
}

/// Σ c_w W as a matrix assembled by the oracle.
pub fn oracle_dense(a: &PauliElement) -> Mat {
    let n = a.n();
    a.terms().iter().fold(Mat::zeros(1 << n, 1 << n), |m, (&w, &c)| m + cubecar_oracles::word_matrix(&letters_of(w, n)) * c)
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

pub mod backends;
pub mod identities;
pub mod quadrature;
