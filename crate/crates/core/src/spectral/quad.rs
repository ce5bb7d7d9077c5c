//! Quadrature for integrands with algebraic endpoint singularities.
//!
//! The main engine is tanh-sinh. Abscissae carry their distances to both end
//! points so integrands can be evaluated without cancellation near the ends.
//! The part of the integral beyond the last node is added analytically from
//! the locally estimated power law, which matters once the singularity
//! exponent approaches 1. Adaptive Gauss–Kronrod bisection is the fallback.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VecQuadrature {
    pub values: Vec<f64>,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// A quadrature node `x` in `(a, b)` with `from_a = x - a` and `from_b = b - x`
/// both computed to full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_a: f64,
    pub from_b: f64,
}

// keeps the tail point at T_MAX + H0/2 well inside the normal range
const T_MAX: f64 = 5.5;
const H0: f64 = 0.5;
const MAX_LEVEL: usize = 8;
const MIN_LEVEL: usize = 3;
const MAX_INTERVALS: usize = 4000;

pub fn integrate_singular(g: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    integrate_singular_at(|p| g(p.x), a, b, tol)
}

pub fn integrate_singular_at(g: impl Fn(Abscissa) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    let r = integrate_vec(|p, out: &mut [f64]| out[0] = g(p), 1, a, b, tol)?;
    Ok(QuadratureResult {
        value: r.values[0],
        error_estimate: r.error_estimate,
        evaluations: r.evaluations,
    })
}

/// Integrates a vector-valued integrand; `g` writes its `dim` components into
/// the output slice. The error estimate is the largest componentwise one and
/// is accepted when it is at most `tol · max(1, largest |value|)`.
pub fn integrate_vec(
    g: impl Fn(Abscissa, &mut [f64]),
    dim: usize,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<VecQuadrature> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(invalid(format!("bad interval ({a}, {b})")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let ts = tanh_sinh(&g, dim, a, b, tol);
    if accepted(&ts, tol) {
        return Ok(ts);
    }
    let gk = gauss_kronrod(&g, dim, a, b, tol);
    if accepted(&gk, tol) {
        return Ok(VecQuadrature {
            evaluations: gk.evaluations + ts.evaluations,
            ..gk
        });
    }
    let best = if ts.error_estimate <= gk.error_estimate { ts.clone() } else { gk.clone() };
    Err(Error::Quadrature {
        value: best.values.first().copied().unwrap_or(f64::NAN),
        error_estimate: best.error_estimate,
        evaluations: ts.evaluations + gk.evaluations,
    })
}

fn scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0, |m, v| m.max(v.abs()))
}

fn accepted(r: &VecQuadrature, tol: f64) -> bool {
    !is_bad(&r.values) && r.error_estimate <= tol * scale(&r.values)
}

struct Node {
    at: Abscissa,
    weight: f64,
}

fn node(t: f64, a: f64, b: f64) -> Node {
    let len = b - a;
    let u = FRAC_PI_2 * t.sinh();
    let e = (-2.0 * u.abs()).exp();
    let near = len * e / (1.0 + e);
    let far = len / (1.0 + e);
    let weight = 0.5 * len * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
    let at = if t < 0.0 {
        Abscissa { x: a + near, from_a: near, from_b: far }
    } else {
        Abscissa { x: b - near, from_a: far, from_b: near }
    };
    Node { at, weight }
}

fn is_bad(v: &[f64]) -> bool {
    v.iter().any(|x| !x.is_finite())
}

/// Integral over the sliver of width `d` next to an endpoint, from the local
/// power law fitted at distances `d` and `2d`. The node sum stops half a cell
/// short of the edge parameter `te`, so the midpoint-rule term h²/24 F'(te) of
/// the transformed integrand is added as well.
#[allow(clippy::too_many_arguments)]
fn tail(
    g: &impl Fn(Abscissa, &mut [f64]),
    dim: usize,
    a: f64,
    b: f64,
    (d, te, h): (f64, f64, f64),
    left: bool,
    out: &mut [f64],
) {
    let len = b - a;
    let at = |dist: f64| {
        if left {
            Abscissa { x: a + dist, from_a: dist, from_b: len - dist }
        } else {
            Abscissa { x: b - dist, from_a: len - dist, from_b: dist }
        }
    };
    let mut g1 = vec![0.0; dim];
    let mut g2 = vec![0.0; dim];
    g(at(d), &mut g1);
    g(at(2.0 * d), &mut g2);
    let du = FRAC_PI_2 * te.cosh();
    for c in 0..dim {
        let (v1, v2) = (g1[c], g2[c]);
        out[c] = if v1 == 0.0 || !v1.is_finite() || !v2.is_finite() {
            0.0
        } else if v1.signum() == v2.signum() {
            let gamma = -(v2 / v1).log2();
            if gamma < 0.999 {
                // F(t) = g(x) |dx/dt| with x ≈ d exp(-2(u(t) - u(te)))
                let f_edge = 2.0 * du * (d * v1);
                let slope = f_edge * (te.tanh() - 2.0 * (1.0 - gamma) * du);
                d * v1 / (1.0 - gamma) + h * h / 24.0 * slope
            } else {
                f64::INFINITY
            }
        } else {
            d * v1
        };
    }
}

fn tanh_sinh(g: &impl Fn(Abscissa, &mut [f64]), dim: usize, a: f64, b: f64, tol: f64) -> VecQuadrature {
    let mut sum = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    let mut evals = 0;
    let mut prev: Option<Vec<f64>> = None;
    let mut best = VecQuadrature {
        values: vec![f64::NAN; dim],
        error_estimate: f64::INFINITY,
        evaluations: 0,
    };
    let mut h = H0;
    for level in 0..=MAX_LEVEL {
        let kmax = (T_MAX / h).round() as i64;
        let step = if level == 0 { 1 } else { 2 };
        let start = if level == 0 { -kmax } else { -kmax + 1 };
        let mut k = start;
        while k <= kmax {
            let nd = node(k as f64 * h, a, b);
            if nd.weight > 0.0 && nd.at.from_a > 0.0 && nd.at.from_b > 0.0 {
                g(nd.at, &mut buf);
                evals += 1;
                for c in 0..dim {
                    sum[c] += nd.weight * buf[c];
                }
            }
            k += step;
        }
        let edge = T_MAX + 0.5 * h;
        let d = node(-edge, a, b).at.from_a;
        let mut tl = vec![0.0; dim];
        let mut tr = vec![0.0; dim];
        tail(g, dim, a, b, (d, edge, h), true, &mut tl);
        tail(g, dim, a, b, (d, edge, h), false, &mut tr);
        evals += 4;
        let est: Vec<f64> = (0..dim).map(|c| h * sum[c] + tl[c] + tr[c]).collect();
        if is_bad(&est) {
            return best;
        }
        if let Some(p) = &prev {
            let err = est.iter().zip(p).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            best = VecQuadrature {
                values: est.clone(),
                error_estimate: err,
                evaluations: evals,
            };
            if level >= MIN_LEVEL && err <= tol * scale(&est) {
                return best;
            }
        }
        prev = Some(est);
        h *= 0.5;
    }
    best.evaluations = evals;
    best
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Piece {
    lo: f64,
    hi: f64,
    value: Vec<f64>,
    err: f64,
}

fn kronrod_piece(g: &impl Fn(Abscissa, &mut [f64]), dim: usize, a: f64, b: f64, lo: f64, hi: f64) -> Piece {
    let half = 0.5 * (hi - lo);
    let mut k = vec![0.0; dim];
    let mut gs = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    let mut eval = |off_lo: f64, w: f64, wg: Option<f64>| {
        let at = Abscissa {
            x: lo + off_lo,
            from_a: (lo - a) + off_lo,
            from_b: (b - hi) + (2.0 * half - off_lo),
        };
        g(at, &mut buf);
        for c in 0..dim {
            k[c] += w * buf[c];
            if let Some(wg) = wg {
                gs[c] += wg * buf[c];
            }
        }
    };
    for i in 0..8 {
        let wg = if i % 2 == 1 { Some(WG[i / 2]) } else { None };
        if i == 7 {
            eval(half, WGK[i], wg);
        } else {
            eval(half * (1.0 - XGK[i]), WGK[i], wg);
            eval(half * (1.0 + XGK[i]), WGK[i], wg);
        }
    }
    let value: Vec<f64> = k.iter().map(|v| v * half).collect();
    let err = k.iter().zip(&gs).map(|(x, y)| ((x - y) * half).abs()).fold(0.0, f64::max);
    Piece { lo, hi, value, err }
}

fn gauss_kronrod(g: &impl Fn(Abscissa, &mut [f64]), dim: usize, a: f64, b: f64, tol: f64) -> VecQuadrature {
    let mut pieces = vec![kronrod_piece(g, dim, a, b, a, b)];
    let mut evals = 15;
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.err).sum();
        let size = pieces.iter().map(|p| p.value.iter().fold(0.0, |m: f64, v| m.max(v.abs()))).sum::<f64>().max(1.0);
        if total_err <= tol * size && size.is_finite() || pieces.len() >= MAX_INTERVALS || total_err.is_nan() {
            let mut values = vec![0.0; dim];
            for p in &pieces {
                for c in 0..dim {
                    values[c] += p.value[c];
                }
            }
            let error_estimate = if is_bad(&values) { f64::INFINITY } else { total_err };
            return VecQuadrature { values, error_estimate, evaluations: evals };
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("nonempty");
        let p = pieces.swap_remove(idx);
        let mid = 0.5 * (p.lo + p.hi);
        if !(mid > p.lo && mid < p.hi) {
            // the worst piece cannot be split further
            return VecQuadrature {
                values: vec![f64::NAN; dim],
                error_estimate: f64::INFINITY,
                evaluations: evals,
            };
        }
        pieces.push(kronrod_piece(g, dim, a, b, p.lo, mid));
        pieces.push(kronrod_piece(g, dim, a, b, mid, p.hi));
        evals += 30;
    }
}

/// Trigonometric data at θ ∈ (0, π/2) given as an abscissa of that interval:
/// `l = -ln cos θ` and its logarithm, both accurate at either end.
#[derive(Debug, Clone, Copy)]
pub struct LogCos {
    pub l: f64,
    pub ln_l: f64,
    pub sin: f64,
    pub cos: f64,
}

pub fn log_cos(p: Abscissa) -> LogCos {
    let (theta, co) = (p.from_a, p.from_b);
    let sin = if theta < PI / 4.0 { theta.sin() } else { co.cos() };
    let cos = if theta < PI / 4.0 { theta.cos() } else { co.sin() };
    if theta < 1e-3 {
        let t2 = theta * theta;
        let ln_l = 2.0 * theta.ln() - std::f64::consts::LN_2 + t2 / 6.0 + t2 * t2 * (2.0 / 45.0 - 1.0 / 72.0);
        return LogCos { l: ln_l.exp(), ln_l, sin, cos };
    }
    let l = if theta < PI / 4.0 {
        let s = (0.5 * theta).sin();
        -(-2.0 * s * s).ln_1p()
    } else {
        -co.sin().ln()
    };
    LogCos { l, ln_l: l.ln(), sin, cos }
}

/// Convenience for integrands written in terms of θ on (0, π/2).
pub fn integrate_quarter(g: impl Fn(LogCos) -> f64, tol: f64) -> Result<QuadratureResult> {
    integrate_singular_at(|p| g(log_cos(p)), 0.0, FRAC_PI_2, tol)
}
