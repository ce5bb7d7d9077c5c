//! The CAR algebra M'_n generated by the Jordan–Wigner words
//! Q'_j = U ⊗ … ⊗ U ⊗ Q ⊗ I ⊗ … ⊗ I (U on the sites before j).
//!
//! Elements of M'_n are stored both as Pauli words and as their coefficients
//! α_A on the ordered products Q'_A = Q'_{a_1} ⋯ Q'_{a_k}, a_1 < … < a_k.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::matrix::pauli::{flip_mask, i_pow, with_letter, word_mul};
use crate::matrix::{check_site, DenseOperator, Letter, PauliElement, Word};
use crate::norms::psd_sqrt;
use crate::spectral::{check_angle, cos_pow};
use crate::{bit, Mask, C64};

/// Word and phase (power of i) of Q'_A for every subset A, cached per n.
type Table = Arc<Vec<(Word, u8)>>;

fn table(n: usize) -> Table {
    static CACHE: OnceLock<Mutex<HashMap<usize, Table>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("table cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut t = vec![(0u64, 0u8); 1 << n];
            for a in 1usize..1 << n {
                // Q'_A = Q'_{A without its top element} · Q'_top
                let top = usize::BITS as usize - a.leading_zeros() as usize;
                let (w, k) = t[a ^ bit(top)];
                let (v, p) = word_mul(w, jw_word(Letter::Q, top), n);
                t[a] = (v, (k + p) % 4);
            }
            Arc::new(t)
        })
        .clone()
}

fn jw_word(kind: Letter, j: usize) -> Word {
    let mut w = 0;
    for k in 1..j {
        w = with_letter(w, k, Letter::U);
    }
    with_letter(w, j, kind)
}

/// Jordan–Wigner generator Q'_j or P'_j as a Pauli element.
pub fn car_generator(kind: Letter, j: usize, n: usize) -> Result<PauliElement> {
    PauliElement::zero(n)?;
    check_site(j, n)?;
    if !matches!(kind, Letter::Q | Letter::P) {
        return Err(crate::error::invalid("CAR generators are Q' or P'"));
    }
    PauliElement::from_word(n, jw_word(kind, j), C64::new(1.0, 0.0))
}

/// V_j = Q at site j and U on every later site.
pub fn v_operator(j: usize, n: usize) -> Result<PauliElement> {
    PauliElement::zero(n)?;
    check_site(j, n)?;
    let mut w = with_letter(0, j, Letter::Q);
    for k in j + 1..=n {
        w = with_letter(w, k, Letter::U);
    }
    PauliElement::from_word(n, w, C64::new(1.0, 0.0))
}

/// An element of M'_n.
#[derive(Debug, Clone, PartialEq)]
pub struct CarElement {
    pauli: PauliElement,
    coeffs: BTreeMap<Mask, C64>,
}

impl CarElement {
    /// Σ_A α_A Q'_A.
    pub fn from_coefficients(n: usize, coeffs: impl IntoIterator<Item = (Mask, C64)>) -> Result<Self> {
        PauliElement::zero(n)?;
        let t = table(n);
        let mut map: BTreeMap<Mask, C64> = BTreeMap::new();
        for (a, c) in coeffs {
            crate::cube::check_subset(n, a)?;
            *map.entry(a).or_default() += c;
        }
        map.retain(|_, c| *c != C64::new(0.0, 0.0));
        let pauli = PauliElement::from_terms(n, map.iter().map(|(&a, &c)| (t[a].0, c * i_pow(t[a].1))))?;
        Ok(Self { pauli, coeffs: map })
    }

    /// Q'_A.
    pub fn q_prime(n: usize, a: Mask) -> Result<Self> {
        Self::from_coefficients(n, [(a, C64::new(1.0, 0.0))])
    }

    /// Recovers the Q'-coefficients; fails unless `a` lies in M'_n.
    pub fn from_pauli(a: &PauliElement) -> Result<Self> {
        let n = a.n();
        let t = table(n);
        let mut coeffs = BTreeMap::new();
        for (&w, &c) in a.terms() {
            let set = flip_mask(w, n);
            if t[set].0 != w {
                return Err(Error::InvalidDomain(format!(
                    "word {} is not in the CAR algebra M'_{n}",
                    crate::matrix::pauli::word_string(w, n)
                )));
            }
            coeffs.insert(set, c * i_pow(t[set].1).conj());
        }
        Ok(Self { pauli: a.clone(), coeffs })
    }

    pub fn n(&self) -> usize {
        self.pauli.n()
    }

    pub fn pauli(&self) -> &PauliElement {
        &self.pauli
    }

    pub fn coeffs(&self) -> &BTreeMap<Mask, C64> {
        &self.coeffs
    }

    pub fn coeff(&self, a: Mask) -> C64 {
        self.coeffs.get(&a).copied().unwrap_or_default()
    }

    pub fn to_dense(&self) -> DenseOperator {
        self.pauli.to_dense()
    }

    pub fn trace(&self) -> C64 {
        self.coeff(0)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_pauli(&self.pauli.adjoint()).expect("M'_n is a *-algebra")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::from_pauli(&self.pauli.add(&other.pauli)?)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_pauli(&self.pauli.scale(s)).expect("scaling stays in M'_n")
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Self::from_pauli(&self.pauli.mul(&other.pauli)?)
    }

    fn map_coeffs(&self, f: impl Fn(Mask, C64) -> Option<(Mask, C64)>) -> Self {
        let n = self.n();
        Self::from_coefficients(n, self.coeffs.iter().filter_map(|(&a, &c)| f(a, c))).expect("subsets stay in range")
    }
}

fn sign_below(a: Mask, j: usize) -> f64 {
    if (a & (bit(j) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// D'_j(Q'_A) = Q'_j Q'_A = (-1)^{|A ∩ [1, j)|} Q'_{A∖j} for j ∈ A, else 0.
pub fn car_annihilation(t: &CarElement, j: usize) -> Result<CarElement> {
    check_site(j, t.n())?;
    Ok(t.map_coeffs(|a, c| (a & bit(j) != 0).then(|| (a ^ bit(j), c * sign_below(a, j)))))
}

/// The τ-adjoint D'*_j: Q'_B ↦ (-1)^{|B ∩ [1, j)|} Q'_{B∪j} for j ∉ B.
pub fn car_creation(t: &CarElement, j: usize) -> Result<CarElement> {
    check_site(j, t.n())?;
    Ok(t.map_coeffs(|a, c| (a & bit(j) == 0).then(|| (a | bit(j), c * sign_below(a, j)))))
}

/// N'^α: multiplies α_A by |A|^α, with the empty set sent to 0.
pub fn car_number(t: &CarElement, alpha: f64) -> Result<CarElement> {
    if !(alpha >= 0.0) {
        return Err(crate::error::invalid("the power of N' must be nonnegative"));
    }
    Ok(t.map_coeffs(|a, c| (a != 0).then(|| (a, c * (a.count_ones() as f64).powf(alpha)))))
}

/// |∇_s T|² = Σ_j |D'_j(T)*|² + |D'_j(T)|² as a Pauli element.
pub fn symmetrized_gradient_square(t: &CarElement) -> Result<PauliElement> {
    let n = t.n();
    let mut acc = PauliElement::zero(n)?;
    for j in 1..=n {
        let x = car_annihilation(t, j)?;
        let (x, xs) = (x.pauli(), x.pauli().adjoint());
        acc = acc.add(&xs.mul(x)?)?.add(&x.mul(&xs)?)?;
    }
    Ok(acc)
}

/// |∇_s T|, the positive square root of [`symmetrized_gradient_square`].
pub fn symmetrized_gradient(t: &CarElement) -> Result<DenseOperator> {
    psd_sqrt(&symmetrized_gradient_square(t)?.to_dense())
}

/// cos^{N'}θ(T) = τ(T) Id + Σ_A α_A cos^{|A|}θ Q'_A.
pub fn car_semigroup(t: &CarElement, theta: f64) -> Result<CarElement> {
    check_angle(theta)?;
    Ok(t.map_coeffs(|a, c| Some((a, c * cos_pow(theta, a.count_ones() as usize)))))
}

/// 𝓔_{M'_n}: α_A = τ(Q'_A* a).
pub fn conditional_expectation_mn_prime(a: &PauliElement) -> CarElement {
    let n = a.n();
    let t = table(n);
    let kept = a.filter(|w| t[flip_mask(w, n)].0 == w);
    CarElement::from_pauli(&kept).expect("filtered to Jordan–Wigner words")
}

/// Π'_j: projection onto P'_j M'_n = span{P'_j Q'_A}. Each P'_j Q'_A is a
/// unimodular multiple of a single word, so the projection keeps those words.
pub fn car_projection_pi_prime(a: &PauliElement, j: usize) -> Result<PauliElement> {
    let n = a.n();
    check_site(j, n)?;
    let t = table(n);
    let pj = jw_word(Letter::P, j);
    Ok(a.filter(|w| {
        let rest = w ^ pj;
        t[flip_mask(rest, n)].0 == rest
    }))
}

/// Conjugation by V_j.
pub fn car_sign_flip(a: &PauliElement, j: usize) -> Result<PauliElement> {
    let v = v_operator(j, a.n())?;
    v.mul(a)?.mul(&v)
}
