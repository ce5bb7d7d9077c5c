//! Dense 2^n × 2^n complex matrices. Site j of a tensor word is bit j-1 of
//! the basis index, so a word is the Kronecker product L_n ⊗ … ⊗ L_1.
//!
//! Besides the arithmetic this module holds matrix-level realizations of the
//! algebra operations (conjugations, averaging, trace pairings) that are used to
//! cross-check the Pauli-word engine.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::C64;

use super::pauli::Letter;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<C64>,
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

impl DenseOperator {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim || dim == 0 {
            return Err(invalid(format!("{} entries do not form a {dim}×{dim} matrix", data.len())));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    pub fn diagonal(d: &[C64]) -> Self {
        Self::from_fn(d.len(), |r, c| if r == c { d[r] } else { ZERO })
    }

    /// Entries uniform in the unit square of ℂ.
    pub fn random(dim: usize, rng: &mut impl Rng) -> Self {
        let data = (0..dim * dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Site count n with dim = 2^n, if the dimension is a power of two.
    pub fn sites(&self) -> Option<usize> {
        self.dim.is_power_of_two().then(|| self.dim.trailing_zeros() as usize)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(invalid(format!("dimensions differ: {} vs {}", self.dim, other.dim)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * d..(k + 1) * d];
                for (o, b) in out[r * d..(r + 1) * d].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { dim: d, data: out })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |r, c| 0.5 * (self.get(r, c) + self.get(c, r).conj()))
    }

    /// τ(A) = tr(A)/dim.
    pub fn trace_normalized(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum::<C64>() / self.dim as f64
    }

    /// τ(A*B), the normalized Hilbert–Schmidt pairing.
    pub fn pairing(&self, other: &Self) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum::<C64>() / self.dim as f64
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Largest off-diagonal modulus.
    pub fn off_diagonal_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                if r != c {
                    m = m.max(self.get(r, c).norm());
                }
            }
        }
        m
    }

    /// self ⊗ other, with `other` on the low index bits.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        Self::from_fn(a * b, |r, c| self.get(r / b, c / b) * other.get(r % b, c % b))
    }

    /// U* A U.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.adjoint().mul(self)?.mul(u)
    }

    /// U A U*.
    pub fn conjugate_by_adj(&self, u: &Self) -> Result<Self> {
        u.mul(self)?.mul(&u.adjoint())
    }
}

fn two(e: [[C64; 2]; 2]) -> DenseOperator {
    DenseOperator::new(2, vec![e[0][0], e[0][1], e[1][0], e[1][1]]).expect("2×2")
}

/// The single-site matrices Q = σ_x, P = [[0, i], [-i, 0]], U = diag(1, -1).
pub fn letter_matrix(l: Letter) -> DenseOperator {
    match l {
        Letter::I => DenseOperator::identity(2),
        Letter::Q => two([[ZERO, ONE], [ONE, ZERO]]),
        Letter::P => two([[ZERO, I], [-I, ZERO]]),
        Letter::U => two([[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// L_n ⊗ … ⊗ L_1 for per-site matrices `per_site[j-1] = L_j`.
pub fn tensor(per_site: &[DenseOperator]) -> DenseOperator {
    let mut out = DenseOperator::identity(1);
    for m in per_site.iter().rev() {
        out = out.kron(m);
    }
    out
}

/// Tensor product of single-site letters, built by Kronecker products.
pub fn word_by_kron(letters: &[Letter]) -> DenseOperator {
    tensor(&letters.iter().map(|&l| letter_matrix(l)).collect::<Vec<_>>())
}

/// The letter `l` at site j and identities elsewhere.
pub fn site_operator(l: Letter, j: usize, n: usize) -> DenseOperator {
    let letters: Vec<Letter> = (1..=n).map(|k| if k == j { l } else { Letter::I }).collect();
    word_by_kron(&letters)
}

/// Jordan–Wigner generator: U at sites < j, `l` at site j.
pub fn jordan_wigner(l: Letter, j: usize, n: usize) -> DenseOperator {
    let letters: Vec<Letter> = (1..=n)
        .map(|k| match k.cmp(&j) {
            std::cmp::Ordering::Less => Letter::U,
            std::cmp::Ordering::Equal => l,
            std::cmp::Ordering::Greater => Letter::I,
        })
        .collect();
    word_by_kron(&letters)
}

/// R_θ^{⊗n} with R_θ = diag(1, e^{iθ}).
pub fn rotation_operator(theta: f64, n: usize) -> DenseOperator {
    let r = two([[ONE, ZERO], [ZERO, C64::from_polar(1.0, theta)]]);
    tensor(&vec![r; n])
}

/// R_θ* A R_θ.
pub fn rotate(a: &DenseOperator, theta: f64) -> Result<DenseOperator> {
    let n = sites(a)?;
    a.conjugate_by(&rotation_operator(theta, n))
}

/// The generator of θ ↦ R_θ* A R_θ: i(AÑ - ÑA) with Ñ = diag(popcount).
pub fn rotation_generator(a: &DenseOperator) -> DenseOperator {
    let cnt = |i: usize| i.count_ones() as f64;
    DenseOperator::from_fn(a.dim(), |r, c| I * a.get(r, c) * (cnt(c) - cnt(r)))
}

fn rho() -> DenseOperator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    two([[C64::new(h, 0.0), C64::new(h, 0.0)], [C64::new(-h, 0.0), C64::new(h, 0.0)]])
}

fn sites(a: &DenseOperator) -> Result<usize> {
    a.sites().ok_or_else(|| invalid(format!("dimension {} is not a power of two", a.dim())))
}

/// 𝓥_n(A) = ρ^{⊗n} A (ρ*)^{⊗n}, ρ = (1/√2)[[1, 1], [-1, 1]].
pub fn vn_conjugation(a: &DenseOperator) -> Result<DenseOperator> {
    let n = sites(a)?;
    a.conjugate_by_adj(&tensor(&vec![rho(); n]))
}

pub fn vn_inverse(a: &DenseOperator) -> Result<DenseOperator> {
    let n = sites(a)?;
    a.conjugate_by(&tensor(&vec![rho(); n]))
}

/// 𝓗_n ⋯ 𝓗_1 with 𝓗_j(T) = ½(T + U_j T U_j): the diagonal part.
pub fn average_over_u(a: &DenseOperator) -> Result<DenseOperator> {
    let n = sites(a)?;
    let mut t = a.clone();
    for j in 1..=n {
        let u = site_operator(Letter::U, j, n);
        let flipped = u.mul(&t)?.mul(&u)?;
        t = t.add(&flipped)?.scale(C64::new(0.5, 0.0));
    }
    Ok(t)
}

/// 𝓔_{M_n} = 𝓥_n^{-1} ∘ (diagonal part) ∘ 𝓥_n.
pub fn conditional_expectation_mn(a: &DenseOperator) -> Result<DenseOperator> {
    vn_inverse(&average_over_u(&vn_conjugation(a)?)?)
}

/// Orthogonal projection onto the span of a τ-orthonormal family.
pub fn project_onto(family: &[DenseOperator], a: &DenseOperator) -> Result<DenseOperator> {
    let mut out = DenseOperator::zeros(a.dim());
    for b in family {
        out = out.add(&b.scale(b.pairing(a)))?;
    }
    Ok(out)
}
