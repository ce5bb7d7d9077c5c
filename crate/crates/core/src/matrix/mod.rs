//! The *-algebra M_{2^n}: generators Q_j, P_j, U_j, the rotation group
//! e^{θ𝓓}, conditional expectation onto M_n and the projections Π_j.

pub mod dense;
pub mod pauli;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

pub use dense::DenseOperator;
pub use pauli::{letter, word_of_set, Letter, PauliElement, Word};

use crate::cube::CubeFunction;
use crate::error::{invalid, Error, Result};
use crate::spectral::quad::{integrate_vec, log_cos, LogCos};
use crate::{Mask, C64};

use pauli::{is_mn_word, with_letter};

pub(crate) fn check_site(j: usize, n: usize) -> Result<()> {
    if j == 0 || j > n {
        return Err(invalid(format!("site {j} outside 1..={n}")));
    }
    Ok(())
}

/// The word with `kind` at site j.
pub fn pauli_generator(kind: Letter, j: usize, n: usize) -> Result<PauliElement> {
    PauliElement::zero(n)?;
    check_site(j, n)?;
    PauliElement::from_word(n, with_letter(0, j, kind), C64::new(1.0, 0.0))
}

pub fn pauli_mul(a: &PauliElement, b: &PauliElement) -> Result<PauliElement> {
    a.mul(b)
}

/// Q_A = Π_{j∈A} Q_j.
pub fn q_set(n: usize, a: Mask) -> Result<PauliElement> {
    crate::cube::check_subset(n, a)?;
    PauliElement::from_word(n, word_of_set(a, Letter::Q), C64::new(1.0, 0.0))
}

/// I_n(f) = Σ_A f̂(A) Q_A.
pub fn embed_function(f: &CubeFunction) -> PauliElement {
    let n = f.n();
    PauliElement::from_terms(
        n,
        f.coeffs().iter().enumerate().map(|(a, &c)| (word_of_set(a, Letter::Q), c)),
    )
    .expect("words fit in n sites")
}

/// Inverse of the embedding on M_n.
pub fn extract_function(a: &PauliElement) -> Result<CubeFunction> {
    if !a.in_mn() {
        return Err(Error::InvalidDomain("element has P or U letters".into()));
    }
    let n = a.n();
    let mut coeffs = vec![C64::new(0.0, 0.0); 1 << n];
    for (&w, &c) in a.terms() {
        coeffs[pauli::flip_mask(w, n)] = c;
    }
    CubeFunction::from_coefficients(coeffs)
}

/// Normalized trace: the coefficient of the identity word.
pub fn trace(a: &PauliElement) -> C64 {
    a.coeff(0)
}

/// e^{θ𝓓}(a) = 𝓡_θ* a 𝓡_θ: per site Q ↦ cos θ Q + sin θ P and
/// P ↦ -sin θ Q + cos θ P, with I and U fixed.
pub fn rotate(a: &PauliElement, theta: f64) -> PauliElement {
    rotate_cs(a, theta.cos(), theta.sin())
}

pub(crate) fn rotate_cs(a: &PauliElement, cos: f64, sin: f64) -> PauliElement {
    let n = a.n();
    let mut out: BTreeMap<Word, C64> = BTreeMap::new();
    let mut branch: Vec<(Word, f64)> = Vec::new();
    for (&w, &c) in a.terms() {
        branch.clear();
        branch.push((w, 1.0));
        for j in 1..=n {
            let (to_q, to_p) = match letter(w, j) {
                Letter::Q => (cos, sin),
                Letter::P => (-sin, cos),
                _ => continue,
            };
            let len = branch.len();
            for i in 0..len {
                let (v, s) = branch[i];
                branch[i] = (with_letter(v, j, Letter::Q), s * to_q);
                branch.push((with_letter(v, j, Letter::P), s * to_p));
            }
            branch.retain(|&(_, s)| s != 0.0);
        }
        for &(v, s) in &branch {
            *out.entry(v).or_default() += c * s;
        }
    }
    PauliElement::from_terms(n, out).expect("rotation preserves the site count")
}

/// 𝓓(T) = Σ_j P_j D_j(T) on M_n: each Q letter in turn becomes a P.
pub fn derivation(a: &PauliElement) -> Result<PauliElement> {
    if !a.in_mn() {
        return Err(Error::InvalidDomain("the derivation is defined on M_n only".into()));
    }
    let n = a.n();
    let mut out = PauliElement::zero(n)?;
    for (&w, &c) in a.terms() {
        for j in 1..=n {
            if letter(w, j) == Letter::Q {
                out.add_term(with_letter(w, j, Letter::P), c);
            }
        }
    }
    Ok(out)
}

/// D_j on M_n, the operator counterpart of D_j on functions.
pub fn d_operator_mn(a: &PauliElement, j: usize) -> Result<PauliElement> {
    check_site(j, a.n())?;
    if !a.in_mn() {
        return Err(Error::InvalidDomain("D_j is defined on M_n only".into()));
    }
    Ok(a.map_words(|w, c| (letter(w, j) == Letter::Q).then(|| (with_letter(w, j, Letter::I), c))))
}

/// Applies a level multiplier m(|A|) to the Q_A expansion of an element of M_n.
pub fn multiplier_mn(a: &PauliElement, m: impl Fn(usize) -> C64) -> Result<PauliElement> {
    if !a.in_mn() {
        return Err(Error::InvalidDomain("level multipliers act on M_n".into()));
    }
    let n = a.n();
    Ok(a.map_words(|w, c| Some((w, c * m(pauli::flip_mask(w, n).count_ones() as usize)))))
}

/// 𝓔_{M_n}: drops every word containing P or U.
pub fn conditional_expectation_mn(a: &PauliElement) -> PauliElement {
    let n = a.n();
    a.filter(|w| is_mn_word(w, n))
}

/// Π_j: the orthogonal projection onto P_j M_n, spanned by the words with P
/// or U (= -i P_j Q_j) at site j and only I or Q elsewhere.
pub fn projection_pi(a: &PauliElement, j: usize) -> Result<PauliElement> {
    let n = a.n();
    check_site(j, n)?;
    Ok(a.filter(|w| in_pi_range(w, j, n)))
}

fn in_pi_range(w: Word, j: usize, n: usize) -> bool {
    (1..=n).all(|k| {
        let l = letter(w, k);
        if k == j {
            matches!(l, Letter::P | Letter::U)
        } else {
            matches!(l, Letter::I | Letter::Q)
        }
    })
}

/// Π = Σ_j Π_j.
pub fn projection_pi_total(a: &PauliElement) -> PauliElement {
    let n = a.n();
    a.filter(|w| (1..=n).any(|j| in_pi_range(w, j, n)))
}

/// Conjugation by Q_{A_ε} with A_ε = {i : ε_i = -1}; P and U letters on A_ε
/// change sign.
pub fn sign_flip(a: &PauliElement, eps: &[i8]) -> Result<PauliElement> {
    let n = a.n();
    if eps.len() != n || eps.iter().any(|&e| e != 1 && e != -1) {
        return Err(invalid("sign pattern must have n entries in {-1, +1}"));
    }
    Ok(a.map_words(|w, c| {
        let flips = (1..=n)
            .filter(|&j| eps[j - 1] == -1 && matches!(letter(w, j), Letter::P | Letter::U))
            .count();
        Some((w, if flips % 2 == 0 { c } else { -c }))
    }))
}

pub use dense::vn_conjugation;

/// ∫_0^{π/2} rotate(a, θ) w(θ) dθ, coefficientwise by vector quadrature;
/// `weight` sees accurate trigonometric data through [`LogCos`].
pub fn rotation_integral(a: &PauliElement, weight: impl Fn(&LogCos) -> f64, tol: f64) -> Result<PauliElement> {
    let n = a.n();
    let support: Vec<Word> = rotate_cs(a, 0.6, 0.8).terms().keys().copied().collect();
    let index: BTreeMap<Word, usize> = support.iter().enumerate().map(|(i, &w)| (w, i)).collect();
    let r = integrate_vec(
        |p, out: &mut [f64]| {
            out.iter_mut().for_each(|o| *o = 0.0);
            let lc = log_cos(p);
            let wt = weight(&lc);
            if wt == 0.0 {
                return;
            }
            for (w, c) in rotate_cs(a, lc.cos, lc.sin).terms() {
                if let Some(&i) = index.get(w) {
                    out[2 * i] += c.re * wt;
                    out[2 * i + 1] += c.im * wt;
                }
            }
        },
        2 * support.len(),
        0.0,
        FRAC_PI_2,
        tol,
    )?;
    PauliElement::from_terms(
        n,
        support.iter().enumerate().map(|(i, &w)| (w, C64::new(r.values[2 * i], r.values[2 * i + 1]))),
    )
}
