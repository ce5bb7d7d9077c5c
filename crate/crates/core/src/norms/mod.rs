//! Function norms on the cube, Schatten norms with the normalized trace, and
//! the Khintchine constants attached to each space.

pub mod jacobi;

use serde::{Deserialize, Serialize};

use crate::cube::CubeFunction;
use crate::error::{invalid, Error, Result};
use crate::matrix::DenseOperator;

pub use jacobi::{hermitian_eigen, psd_function, psd_sqrt, singular_values};

const ORLICZ_MAX_ITER: usize = 200;

/// The rearrangement-invariant spaces handled here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FunctionSpace {
    Lp(f64),
    Linf,
    /// The Orlicz space of Φ(x) = x² ln(1 + x²) with the Luxemburg norm.
    Orlicz,
}

impl FunctionSpace {
    pub fn lp(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(invalid(format!("L^p needs p ≥ 1, got {p}")));
        }
        Ok(if p.is_infinite() { Self::Linf } else { Self::Lp(p) })
    }

    /// The exponent of a finite L^p space.
    pub fn exponent(&self) -> Option<f64> {
        match *self {
            Self::Lp(p) => Some(p),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Lp(p) if !(p >= 1.0 && p.is_finite()) => Err(invalid(format!("L^p needs 1 ≤ p < ∞, got {p}"))),
            _ => Ok(()),
        }
    }

    pub fn two_convex(&self) -> bool {
        match *self {
            Self::Lp(p) => p >= 2.0,
            Self::Linf | Self::Orlicz => true,
        }
    }

    pub fn two_concave(&self) -> bool {
        match *self {
            Self::Lp(p) => p <= 2.0,
            Self::Linf | Self::Orlicz => false,
        }
    }

    /// Smallest q for which the space is known to be q-concave.
    pub fn concavity(&self) -> Option<f64> {
        match *self {
            Self::Lp(p) => Some(p.max(2.0)),
            Self::Linf => None,
            Self::Orlicz => Some(6.0),
        }
    }

    /// The Köthe dual, when it is again one of the handled spaces.
    pub fn dual(&self) -> Option<Self> {
        match *self {
            Self::Lp(p) if p > 1.0 => Some(Self::Lp(p / (p - 1.0))),
            Self::Lp(_) => Some(Self::Linf),
            _ => None,
        }
    }

    /// Stable short label, the same syntax the CLI accepts.
    pub fn label(&self) -> String {
        match *self {
            Self::Lp(p) => format!("lp:{p}"),
            Self::Linf => "linf".into(),
            Self::Orlicz => "orlicz".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "linf" | "lp:inf" => Ok(Self::Linf),
            "orlicz" => Ok(Self::Orlicz),
            _ => {
                let p = s
                    .strip_prefix("lp:")
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| invalid(format!("unknown space `{s}`")))?;
                Self::lp(p)
            }
        }
    }
}

/// K_E together with whether the value is the sharp one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Khintchine {
    pub value: f64,
    pub sharp: bool,
}

/// Khintchine constant of the space; `c` is the universal constant used where
/// only the order of growth is known.
pub fn khintchine_constant(sp: &FunctionSpace, c: f64) -> Result<Khintchine> {
    sp.validate()?;
    match *sp {
        FunctionSpace::Lp(p) if p <= 2.0 => Ok(Khintchine { value: 1.0, sharp: true }),
        FunctionSpace::Lp(p) if p.fract() == 0.0 && (p as u64) % 2 == 0 => {
            let k = p as u64 / 2;
            let dfact: f64 = (1..=k).map(|i| (2 * i - 1) as f64).product();
            Ok(Khintchine { value: dfact.powf(1.0 / p), sharp: true })
        }
        FunctionSpace::Lp(p) => Ok(Khintchine { value: c * p.sqrt(), sharp: false }),
        FunctionSpace::Orlicz => Ok(Khintchine { value: 6.0 * c, sharp: false }),
        FunctionSpace::Linf => Err(Error::UnsupportedSpace("L^∞ is not q-concave for any finite q".into())),
    }
}

fn phi(x: f64) -> f64 {
    let s = x * x;
    s * s.ln_1p()
}

/// Norm of a nonnegative sequence under the uniform probability on its indices.
pub fn sequence_norm(mags: &[f64], sp: &FunctionSpace) -> Result<f64> {
    sp.validate()?;
    if mags.is_empty() {
        return Err(invalid("empty sequence"));
    }
    let max = mags.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    if max == 0.0 {
        return Ok(0.0);
    }
    let len = mags.len() as f64;
    match *sp {
        FunctionSpace::Linf => Ok(max),
        FunctionSpace::Lp(p) => {
            let s: f64 = mags.iter().map(|x| (x.abs() / max).powf(p)).sum::<f64>() / len;
            Ok(max * s.powf(1.0 / p))
        }
        FunctionSpace::Orlicz => {
            let excess = |t: f64| mags.iter().map(|x| phi(x.abs() / t)).sum::<f64>() / len - 1.0;
            // Φ(1) = ln 2 < 1, so t = max is always feasible
            let mut hi = max;
            let mut lo = 0.5 * max;
            let mut iter = 0;
            while excess(lo) <= 0.0 && iter < ORLICZ_MAX_ITER {
                hi = lo;
                lo *= 0.5;
                iter += 1;
            }
            while iter < ORLICZ_MAX_ITER && hi - lo > 1e-15 * hi {
                let mid = 0.5 * (lo + hi);
                if excess(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                iter += 1;
            }
            Ok(hi)
        }
    }
}

pub fn function_norm(f: &CubeFunction, sp: &FunctionSpace) -> Result<f64> {
    let mags: Vec<f64> = f.values().iter().map(|z| z.norm()).collect();
    sequence_norm(&mags, sp)
}

/// The space norm applied to singular values, normalized so ‖Id‖ = 1.
pub fn schatten_norm(m: &DenseOperator, sp: &FunctionSpace) -> Result<f64> {
    sequence_norm(&singular_values(m)?, sp)
}

/// Schatten norm of a positive semidefinite operator via its eigenvalues.
pub fn psd_norm(m: &DenseOperator, sp: &FunctionSpace) -> Result<f64> {
    let (vals, _) = hermitian_eigen(m)?;
    let mags: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    sequence_norm(&mags, sp)
}
