//! Reference computations written from the definitions alone, with no code
//! shared with `cubecar`: naive Walsh sums, matrices assembled entry by entry,
//! SVD-based Schatten norms and graded Gauss–Legendre quadrature.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
pub use nalgebra;
pub use num_complex::Complex64 as C;

pub type Mat = DMatrix<C>;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// ω_A(x) = (-1)^{|A ∩ x|} with subsets and points as bitmasks.
pub fn walsh(a: usize, x: usize) -> f64 {
    if (a & x).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// f̂(A) = 2^{-n} Σ_x f(x) ω_A(x), by the O(4^n) sum.
pub fn walsh_coefficients(values: &[C]) -> Vec<C> {
    let len = values.len();
    (0..len)
        .map(|a| values.iter().enumerate().map(|(x, v)| v * walsh(a, x)).sum::<C>() / len as f64)
        .collect()
}

/// f(x) = Σ_A f̂(A) ω_A(x).
pub fn walsh_synthesis(coeffs: &[C]) -> Vec<C> {
    (0..coeffs.len())
        .map(|x| coeffs.iter().enumerate().map(|(a, v)| v * walsh(a, x)).sum())
        .collect()
}

/// (E|v|^p)^{1/p} under the uniform probability; p = ∞ gives the max.
pub fn lp_norm(mags: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return mags.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    (mags.iter().map(|v| v.abs().powf(p)).sum::<f64>() / mags.len() as f64).powf(1.0 / p)
}

/// Luxemburg norm inf{λ > 0 : E Φ(|v|/λ) ≤ 1} for an increasing convex Φ
/// with Φ(0) = 0, by bisection.
pub fn luxemburg(mags: &[f64], phi: impl Fn(f64) -> f64) -> f64 {
    let mean = |lam: f64| mags.iter().map(|v| phi(v.abs() / lam)).sum::<f64>() / mags.len() as f64;
    let (mut lo, mut hi) = (0.0, 1.0);
    if mags.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    while mean(hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if mean(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Single-site matrices Q = σ_x, P = [[0, i], [-i, 0]], U = diag(1, -1).
pub fn letter(l: char) -> [[C; 2]; 2] {
    let (o, z, i) = (c(1.0), c(0.0), C::new(0.0, 1.0));
    match l {
        'I' => [[o, z], [z, o]],
        'Q' => [[z, o], [o, z]],
        'P' => [[z, i], [-i, z]],
        'U' => [[o, z], [z, -o]],
        _ => panic!("unknown letter {l}"),
    }
}

/// The word with `letters[j-1]` at site j; site j acts on bit j-1 of the
/// basis index. Entries are products of single-site entries.
pub fn word_matrix(letters: &[char]) -> Mat {
    let n = letters.len();
    let mats: Vec<_> = letters.iter().map(|&l| letter(l)).collect();
    Mat::from_fn(1 << n, 1 << n, |r, col| {
        (0..n).map(|j| mats[j][(r >> j) & 1][(col >> j) & 1]).product()
    })
}

/// `l` at site j, identity elsewhere.
pub fn site(l: char, j: usize, n: usize) -> Mat {
    word_matrix(&(1..=n).map(|k| if k == j { l } else { 'I' }).collect::<Vec<_>>())
}

/// Q_A = Π_{j∈A} Q_j.
pub fn q_set(a: usize, n: usize) -> Mat {
    word_matrix(&(1..=n).map(|k| if a >> (k - 1) & 1 == 1 { 'Q' } else { 'I' }).collect::<Vec<_>>())
}

/// Jordan–Wigner generator: U before site j, `l` at j, identity after.
pub fn jw(l: char, j: usize, n: usize) -> Mat {
    word_matrix(&(1..=n).map(|k| if k < j { 'U' } else if k == j { l } else { 'I' }).collect::<Vec<_>>())
}

/// Q'_A = Q'_{a_1} ⋯ Q'_{a_k} in increasing order, as a matrix product.
pub fn q_prime(a: usize, n: usize) -> Mat {
    (1..=n).filter(|&j| a >> (j - 1) & 1 == 1).fold(Mat::identity(1 << n, 1 << n), |m, j| m * jw('Q', j, n))
}

/// Normalized trace.
pub fn tau(m: &Mat) -> C {
    m.trace() / m.nrows() as f64
}

/// τ(a* b).
pub fn pairing(a: &Mat, b: &Mat) -> C {
    tau(&(a.adjoint() * b))
}

/// Σ_k ⟨e_k, m⟩ e_k for a τ-orthonormal family.
pub fn project(family: &[Mat], m: &Mat) -> Mat {
    family.iter().fold(Mat::zeros(m.nrows(), m.ncols()), |acc, e| acc + e * pairing(e, m))
}

/// Normalized Schatten norm (τ|m|^p)^{1/p} from an SVD.
pub fn schatten(m: &Mat, p: f64) -> f64 {
    lp_norm(m.singular_values().as_slice(), p)
}

/// Spectrum of a Hermitian matrix, ascending.
pub fn hermitian_spectrum(m: &Mat) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// C(n, k) as a float.
pub fn binomial(n: u64, k: u64) -> f64 {
    statrs::function::factorial::binomial(n, k)
}

/// (2k-1)!! = 1·3·5⋯(2k-1).
pub fn odd_double_factorial(k: u64) -> f64 {
    (1..=k).map(|i| (2 * i - 1) as f64).product()
}

/// Nodes and weights of the m-point Gauss–Legendre rule on [-1, 1], by
/// Newton iteration on P_m.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (1..=m)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

const GRADING: f64 = 0.2;
// 0.2^200 ≈ 1e-140 keeps squared distances representable
const GRADED_PANELS: usize = 200;
const GL_POINTS: usize = 20;

/// ∫_a^b g over a mesh graded geometrically toward both endpoints, so that
/// integrable power and log singularities at either end are resolved. `g`
/// receives (x - a, b - x), each computed without cancellation.
pub fn integrate_graded(g: impl Fn(f64, f64) -> f64, a: f64, b: f64) -> f64 {
    let rule = gauss_legendre(GL_POINTS);
    let half = 0.5 * (b - a);
    // panel [lo, hi] measured as distance from the endpoint
    let panel = |lo: f64, hi: f64, from_a: bool| -> f64 {
        let (mid, rad) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        rule.iter()
            .map(|&(t, w)| {
                let d = mid + rad * t;
                let v = if from_a { g(d, 2.0 * half - d) } else { g(2.0 * half - d, d) };
                w * v
            })
            .sum::<f64>()
            * rad
    };
    let mut total = 0.0;
    for from_a in [true, false] {
        let mut hi = half;
        for _ in 0..GRADED_PANELS {
            let lo = hi * GRADING;
            total += panel(lo, hi, from_a);
            hi = lo;
        }
    }
    total
}

/// -ln cos θ from θ and π/2 - θ, accurate at both ends.
pub fn neg_log_cos(theta: f64, co: f64) -> f64 {
    if theta < 1e-4 {
        let t2 = theta * theta;
        t2 / 2.0 * (1.0 + t2 / 6.0)
    } else if theta < FRAC_PI_2 / 2.0 {
        let s = (0.5 * theta).sin();
        -(-2.0 * s * s).ln_1p()
    } else {
        -co.sin().ln()
    }
}

/// ∫_0^{π/2} g over the quarter period, with g seeing (θ, π/2 - θ).
pub fn integrate_quarter(g: impl Fn(f64, f64) -> f64) -> f64 {
    integrate_graded(g, 0.0, FRAC_PI_2)
}
