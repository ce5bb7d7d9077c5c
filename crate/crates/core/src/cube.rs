//! Functions on the discrete cube Ω_n = {-1,1}^n and the Walsh basis.
//!
//! A [`CubeFunction`] holds point values and Walsh coefficients; whichever one
//! is missing is computed once on first access and cached.

use std::sync::OnceLock;

use crate::error::{invalid, Result};
use crate::{bit, Mask, C64};

pub const MAX_DIM: usize = 24;

#[derive(Debug, Clone)]
pub struct CubeFunction {
    n: usize,
    values: OnceLock<Vec<C64>>,
    coeffs: OnceLock<Vec<C64>>,
}

impl PartialEq for CubeFunction {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.coeffs() == other.coeffs()
    }
}

fn dim_of(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(invalid(format!("length {len} is not a power of two ≥ 2")));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_DIM {
        return Err(invalid(format!("dimension {n} exceeds {MAX_DIM}")));
    }
    Ok(n)
}

/// Value of ω_A at the point x: (-1)^{|A ∩ x|}.
#[inline]
pub fn walsh_char(a: Mask, x: Mask) -> f64 {
    if (a & x).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Unnormalized in-place Walsh–Hadamard butterfly.
pub fn fwht_in_place(v: &mut [C64]) {
    let len = v.len();
    let mut h = 1;
    while h < len {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Walsh coefficients f̂(A) = E[f ω_A].
pub fn walsh_transform(values: &[C64]) -> Result<Vec<C64>> {
    dim_of(values.len())?;
    let mut v = values.to_vec();
    fwht_in_place(&mut v);
    let scale = 1.0 / values.len() as f64;
    v.iter_mut().for_each(|c| *c *= scale);
    Ok(v)
}

/// Point values f = Σ f̂(A) ω_A.
pub fn inverse_walsh(coeffs: &[C64]) -> Result<Vec<C64>> {
    dim_of(coeffs.len())?;
    let mut v = coeffs.to_vec();
    fwht_in_place(&mut v);
    Ok(v)
}

impl CubeFunction {
    pub fn from_values(values: Vec<C64>) -> Result<Self> {
        let n = dim_of(values.len())?;
        Ok(Self {
            n,
            values: OnceLock::from(values),
            coeffs: OnceLock::new(),
        })
    }

    pub fn from_real_values(values: &[f64]) -> Result<Self> {
        Self::from_values(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_coefficients(coeffs: Vec<C64>) -> Result<Self> {
        let n = dim_of(coeffs.len())?;
        Ok(Self {
            n,
            values: OnceLock::new(),
            coeffs: OnceLock::from(coeffs),
        })
    }

    pub fn constant(n: usize, c: C64) -> Result<Self> {
        check_dim(n)?;
        let mut coeffs = vec![C64::new(0.0, 0.0); 1 << n];
        coeffs[0] = c;
        Self::from_coefficients(coeffs)
    }

    /// The Walsh function ω_A.
    pub fn walsh(n: usize, a: Mask) -> Result<Self> {
        check_dim(n)?;
        check_subset(n, a)?;
        let mut coeffs = vec![C64::new(0.0, 0.0); 1 << n];
        coeffs[a] = C64::new(1.0, 0.0);
        Self::from_coefficients(coeffs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[C64] {
        self.values.get_or_init(|| {
            let c = self.coeffs.get().expect("one representation is always present");
            inverse_walsh(c).expect("validated length")
        })
    }

    pub fn coeffs(&self) -> &[C64] {
        self.coeffs.get_or_init(|| {
            let v = self.values.get().expect("one representation is always present");
            walsh_transform(v).expect("validated length")
        })
    }

    pub fn mean(&self) -> C64 {
        self.coeffs()[0]
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values().iter().all(|v| v.im.abs() <= tol)
    }

    pub fn map_values(&self, f: impl Fn(Mask, C64) -> C64) -> Self {
        let v = self.values().iter().enumerate().map(|(x, &z)| f(x, z)).collect();
        Self::from_values(v).expect("same length")
    }

    pub fn map_coeffs(&self, f: impl Fn(Mask, C64) -> C64) -> Self {
        let c = self.coeffs().iter().enumerate().map(|(a, &z)| f(a, z)).collect();
        Self::from_coefficients(c).expect("same length")
    }

    pub fn scale(&self, s: C64) -> Self {
        if self.coeffs.get().is_some() {
            self.map_coeffs(|_, z| z * s)
        } else {
            self.map_values(|_, z| z * s)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_values(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_values(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_values(other, |a, b| a * b)
    }

    fn zip_values(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.n != other.n {
            return Err(invalid(format!("dimensions differ: {} vs {}", self.n, other.n)));
        }
        let v = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_values(v)
    }

    /// max_x |f(x)|.
    pub fn sup_norm(&self) -> f64 {
        self.values().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(invalid(format!("dimension {n} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

fn check_coord(f: &CubeFunction, j: usize) -> Result<()> {
    if j == 0 || j > f.n {
        return Err(invalid(format!("coordinate {j} outside 1..={}", f.n)));
    }
    Ok(())
}

pub(crate) fn check_subset(n: usize, a: Mask) -> Result<()> {
    if a >> n != 0 {
        return Err(invalid(format!("subset {a:#b} is not contained in 1..={n}")));
    }
    Ok(())
}

/// Bitmask of the full coordinate set {1..n}.
pub fn full_set(n: usize) -> Mask {
    (1 << n) - 1
}

/// Converts a list of 1-based coordinates into a mask.
pub fn subset(coords: &[usize]) -> Mask {
    coords.iter().fold(0, |m, &j| m | bit(j))
}

/// ∂_j f(x) = f(x) - f(x e_j), where x e_j flips coordinate j.
pub fn partial_derivative(f: &CubeFunction, j: usize) -> Result<CubeFunction> {
    check_coord(f, j)?;
    let b = bit(j);
    let v = f.values();
    Ok(f.map_values(|x, z| z - v[x ^ b]))
}

/// D_j = ½ ω_j ∂_j, so D_j ω_A = ω_{A∖j} when j ∈ A and 0 otherwise.
pub fn d_operator(f: &CubeFunction, j: usize) -> Result<CubeFunction> {
    check_coord(f, j)?;
    let b = bit(j);
    let c = f.coeffs();
    Ok(f.map_coeffs(|a, _| if a & b == 0 { c[a | b] } else { C64::new(0.0, 0.0) }))
}

/// The translate x ↦ f(x e_j), written h∗δ_{e_j} in convolution notation.
pub fn translate(f: &CubeFunction, j: usize) -> Result<CubeFunction> {
    check_coord(f, j)?;
    let b = bit(j);
    let v = f.values();
    Ok(f.map_values(|x, _| v[x ^ b]))
}

/// Pointwise (Σ_{j∈J} |∂_j f|²)^{1/2}.
pub fn partial_gradient_length(f: &CubeFunction, set: Mask) -> Result<CubeFunction> {
    check_subset(f.n, set)?;
    let v = f.values();
    let out = (0..v.len())
        .map(|x| {
            let s: f64 = (1..=f.n)
                .filter(|&j| set & bit(j) != 0)
                .map(|j| (v[x] - v[x ^ bit(j)]).norm_sqr())
                .sum();
            C64::new(s.sqrt(), 0.0)
        })
        .collect();
    CubeFunction::from_values(out)
}

/// Pointwise |∇f| = (Σ_j |∂_j f|²)^{1/2}.
pub fn gradient_length(f: &CubeFunction) -> CubeFunction {
    partial_gradient_length(f, full_set(f.n)).expect("full set is valid")
}

/// f_n = Π_j (1 + ω_j) = 2^n 1_{(1,…,1)}.
pub fn riesz_product(n: usize) -> Result<CubeFunction> {
    check_dim(n)?;
    CubeFunction::from_coefficients(vec![C64::new(1.0, 0.0); 1 << n])
}

/// Splits f = V_J f + P_{J̄} f, where V_J keeps coefficients with A ∩ J ≠ ∅
/// and P_{J̄} keeps those with A ⊆ J̄.
pub fn project_coordinates(f: &CubeFunction, set: Mask) -> Result<(CubeFunction, CubeFunction)> {
    check_subset(f.n, set)?;
    let zero = C64::new(0.0, 0.0);
    let v = f.map_coeffs(|a, z| if a & set != 0 { z } else { zero });
    let p = f.map_coeffs(|a, z| if a & set == 0 { z } else { zero });
    Ok((v, p))
}
