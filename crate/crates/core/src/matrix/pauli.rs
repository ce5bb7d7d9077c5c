//! Sparse elements of M_{2^n} in the tensor-word basis {I, Q, P, U}^⊗n.
//!
//! A word packs two bits per site (I = 00, Q = 01, P = 10, U = 11); site j
//! occupies bits 2(j-1) and 2(j-1)+1 of a `u64`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::{Mask, C64};

use super::dense::DenseOperator;

pub type Word = u64;

pub const MAX_SITES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I = 0,
    Q = 1,
    P = 2,
    U = 3,
}

impl Letter {
    pub fn from_bits(b: u64) -> Self {
        match b & 3 {
            0 => Letter::I,
            1 => Letter::Q,
            2 => Letter::P,
            _ => Letter::U,
        }
    }

    pub fn symbol(self) -> char {
        ['I', 'Q', 'P', 'U'][self as usize]
    }
}

#[inline]
pub fn letter(w: Word, j: usize) -> Letter {
    Letter::from_bits(w >> (2 * (j - 1)))
}

#[inline]
pub fn with_letter(w: Word, j: usize, l: Letter) -> Word {
    let sh = 2 * (j - 1);
    (w & !(3 << sh)) | ((l as u64) << sh)
}

/// The word with letter `l` on every site of `a` and I elsewhere.
pub fn word_of_set(a: Mask, l: Letter) -> Word {
    let mut w = 0;
    let mut rest = a;
    while rest != 0 {
        let j = rest.trailing_zeros() as usize + 1;
        w = with_letter(w, j, l);
        rest &= rest - 1;
    }
    w
}

pub fn word_from_letters(letters: &[Letter]) -> Word {
    letters.iter().enumerate().fold(0, |w, (i, &l)| with_letter(w, i + 1, l))
}

pub fn letters(w: Word, n: usize) -> Vec<Letter> {
    (1..=n).map(|j| letter(w, j)).collect()
}

pub fn word_string(w: Word, n: usize) -> String {
    letters(w, n).into_iter().map(Letter::symbol).collect()
}

/// Sites carrying an odd letter bit pattern: Q or P flip the basis index.
#[inline]
pub(crate) fn flip_mask(w: Word, n: usize) -> usize {
    let mut m = 0;
    for j in 1..=n {
        if matches!(letter(w, j), Letter::Q | Letter::P) {
            m |= 1 << (j - 1);
        }
    }
    m
}

// PHASE[a][b]: power of i in the single-site product a·b = i^k (a xor b).
const PHASE: [[u8; 4]; 4] = [[0, 0, 0, 0], [0, 0, 3, 1], [0, 1, 0, 3], [0, 3, 1, 0]];

const I_POW: [C64; 4] = [
    C64 { re: 1.0, im: 0.0 },
    C64 { re: 0.0, im: 1.0 },
    C64 { re: -1.0, im: 0.0 },
    C64 { re: 0.0, im: -1.0 },
];

/// Product of two words: the resulting word and its phase as a power of i.
#[inline]
pub fn word_mul(a: Word, b: Word, n: usize) -> (Word, u8) {
    let mut k = 0u8;
    for j in 0..n {
        let (x, y) = ((a >> (2 * j)) & 3, (b >> (2 * j)) & 3);
        k += PHASE[x as usize][y as usize];
    }
    (a ^ b, k % 4)
}

pub fn i_pow(k: u8) -> C64 {
    I_POW[(k % 4) as usize]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliElement {
    n: usize,
    terms: BTreeMap<Word, C64>,
}

impl PauliElement {
    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_SITES {
            return Err(invalid(format!("site count {n} outside 1..={MAX_SITES}")));
        }
        Ok(Self { n, terms: BTreeMap::new() })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_word(n, 0, C64::new(1.0, 0.0))
    }

    pub fn from_word(n: usize, w: Word, c: C64) -> Result<Self> {
        Self::from_terms(n, [(w, c)])
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Word, C64)>) -> Result<Self> {
        let mut out = Self::zero(n)?;
        for (w, c) in terms {
            if n < MAX_SITES && w >> (2 * n) != 0 {
                return Err(invalid(format!("word {w:#x} has letters beyond site {n}")));
            }
            out.add_term(w, c);
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Word, C64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: Word) -> C64 {
        self.terms.get(&w).copied().unwrap_or_default()
    }

    /// Adds `c` to the coefficient of `w`, dropping it if it becomes exactly 0.
    pub(crate) fn add_term(&mut self, w: Word, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let e = self.terms.entry(w).or_default();
        *e += c;
        if *e == C64::new(0.0, 0.0) {
            self.terms.remove(&w);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SiteMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (&w, &c) in &other.terms {
            out.add_term(w, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self { n: self.n, terms: BTreeMap::new() };
        for (&w, &c) in &self.terms {
            out.add_term(w, c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self { n: self.n, terms: BTreeMap::new() };
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                let (w, k) = word_mul(a, b, self.n);
                out.add_term(w, ca * cb * i_pow(k));
            }
        }
        Ok(out)
    }

    /// Every basis word is Hermitian, so the adjoint conjugates coefficients.
    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(&w, c)| (w, c.conj())).collect(),
        }
    }

    /// Keeps the terms whose word satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(Word) -> bool) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().filter(|(&w, _)| keep(w)).map(|(&w, &c)| (w, c)).collect(),
        }
    }

    pub fn map_words(&self, f: impl Fn(Word, C64) -> Option<(Word, C64)>) -> Self {
        let mut out = Self { n: self.n, terms: BTreeMap::new() };
        for (&w, &c) in &self.terms {
            if let Some((v, d)) = f(w, c) {
                out.add_term(v, d);
            }
        }
        out
    }

    /// True when only I and Q letters occur, i.e. the element lies in M_n.
    pub fn in_mn(&self) -> bool {
        self.terms.keys().all(|&w| is_mn_word(w, self.n))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (&w, &c) in &self.terms {
            m = m.max((c - other.coeff(w)).norm());
        }
        for (&w, &c) in &other.terms {
            if !self.terms.contains_key(&w) {
                m = m.max(c.norm());
            }
        }
        m
    }

    pub fn to_dense(&self) -> DenseOperator {
        let d = 1usize << self.n;
        let mut out = DenseOperator::zeros(d);
        for (&w, &c) in &self.terms {
            let x = flip_mask(w, self.n);
            for col in 0..d {
                let v = word_entry(w, self.n, col);
                let r = col ^ x;
                out.set(r, col, out.get(r, col) + c * v);
            }
        }
        out
    }

    /// Expansion of a 2^n × 2^n matrix in the word basis via τ(w* M).
    pub fn from_dense(m: &DenseOperator) -> Result<Self> {
        let n = m.sites().ok_or_else(|| invalid("dimension is not a power of two"))?;
        let mut out = Self::zero(n)?;
        let d = m.dim();
        for w in 0..(1u64 << (2 * n)) {
            let x = flip_mask(w, n);
            let mut acc = C64::new(0.0, 0.0);
            for col in 0..d {
                acc += word_entry(w, n, col).conj() * m.get(col ^ x, col);
            }
            out.add_term(w, acc / d as f64);
        }
        Ok(out)
    }

    /// Drops coefficients of modulus at most `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        self.filter_coeffs(|c| c.norm() > tol)
    }

    fn filter_coeffs(&self, keep: impl Fn(C64) -> bool) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().filter(|(_, &c)| keep(c)).map(|(&w, &c)| (w, c)).collect(),
        }
    }

    /// ‖a‖_{C_2} = (Σ |c_w|²)^{1/2}, from trace orthonormality of the words.
    pub fn hilbert_schmidt(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub(crate) fn is_mn_word(w: Word, n: usize) -> bool {
    (1..=n).all(|j| matches!(letter(w, j), Letter::I | Letter::Q))
}

/// Nonzero entry of word `w` in column `col`; the row is `col ^ flip_mask(w)`.
#[inline]
pub(crate) fn word_entry(w: Word, n: usize, col: usize) -> C64 {
    let mut k = 0u8;
    for j in 1..=n {
        let b = (col >> (j - 1)) & 1;
        match letter(w, j) {
            Letter::P => k += if b == 0 { 3 } else { 1 },
            Letter::U => k += 2 * b as u8,
            _ => {}
        }
    }
    i_pow(k % 4)
}
