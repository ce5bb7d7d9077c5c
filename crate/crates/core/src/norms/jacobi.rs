//! Complex Jacobi methods: two-sided for Hermitian spectra, one-sided
//! (Hestenes) for singular values.

use crate::error::{Error, Result};
use crate::matrix::DenseOperator;
use crate::C64;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and unitary eigenvectors (columns) of a Hermitian
/// operator. Only the Hermitian part of `a` is used.
pub fn hermitian_eigen(a: &DenseOperator) -> Result<(Vec<f64>, DenseOperator)> {
    let d = a.dim();
    let mut m = a.hermitian_part();
    let mut v = DenseOperator::identity(d);
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let mut converged = d < 2;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&m) <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = m.get(p, q);
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let tau = (m.get(q, q).re - m.get(p, p).re) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ph = apq / mag;
                rotate_cols(&mut m, p, q, c, s, ph.conj());
                rotate_rows(&mut m, p, q, c, s, ph);
                rotate_cols(&mut v, p, q, c, s, ph.conj());
                m.set(p, q, C64::new(0.0, 0.0));
                m.set(q, p, C64::new(0.0, 0.0));
            }
        }
    }
    if !converged && off_diagonal(&m) > 1e-13 * scale {
        return Err(Error::Eigen { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m.get(i, i).re.total_cmp(&m.get(j, j).re));
    let vals = order.iter().map(|&i| m.get(i, i).re).collect();
    let vecs = DenseOperator::from_fn(d, |r, c| v.get(r, order[c]));
    Ok((vals, vecs))
}

fn off_diagonal(m: &DenseOperator) -> f64 {
    let d = m.dim();
    let mut s = 0.0;
    for r in 0..d {
        for c in 0..d {
            if r != c {
                s += m.get(r, c).norm_sqr();
            }
        }
    }
    s.sqrt()
}

// columns p, q ← (c·p − s·ph·q, s·p + c·ph·q)
fn rotate_cols(m: &mut DenseOperator, p: usize, q: usize, c: f64, s: f64, ph: C64) {
    for r in 0..m.dim() {
        let (x, y) = (m.get(r, p), m.get(r, q));
        m.set(r, p, x * c - y * ph * s);
        m.set(r, q, x * s + y * ph * c);
    }
}

// rows p, q ← (c·p − s·ph·q, s·p + c·ph·q)
fn rotate_rows(m: &mut DenseOperator, p: usize, q: usize, c: f64, s: f64, ph: C64) {
    for k in 0..m.dim() {
        let (x, y) = (m.get(p, k), m.get(q, k));
        m.set(p, k, x * c - y * ph * s);
        m.set(q, k, x * s + y * ph * c);
    }
}

/// Singular values in decreasing order, computed by one-sided Jacobi on the
/// columns so that small values are not squared away.
pub fn singular_values(a: &DenseOperator) -> Result<Vec<f64>> {
    let d = a.dim();
    let mut cols: Vec<Vec<C64>> = (0..d).map(|c| (0..d).map(|r| a.get(r, c)).collect()).collect();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..d {
            for j in i + 1..d {
                let (ci, cj) = (&cols[i], &cols[j]);
                let alpha: f64 = ci.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cj.iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = ci.iter().zip(cj).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ph = (gamma / g).conj();
                let (lo, hi) = cols.split_at_mut(j);
                for (x, y) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
                    let (u, w) = (*x, *y);
                    *x = u * c - w * ph * s;
                    *y = u * s + w * ph * c;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Eigen { sweeps: MAX_SWEEPS });
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// f(A) for Hermitian A, by spectral calculus.
pub fn psd_function(a: &DenseOperator, f: impl Fn(f64) -> f64) -> Result<DenseOperator> {
    let (vals, v) = hermitian_eigen(a)?;
    let d = a.dim();
    let fv: Vec<f64> = vals.iter().map(|&x| f(x)).collect();
    Ok(DenseOperator::from_fn(d, |r, c| {
        (0..d).map(|k| v.get(r, k) * fv[k] * v.get(c, k).conj()).sum()
    }))
}

/// The positive square root, with eigenvalues below zero clamped to 0.
pub fn psd_sqrt(a: &DenseOperator) -> Result<DenseOperator> {
    psd_function(a, |x| x.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn diagonal_cases() {
        let d = DenseOperator::diagonal(&[C64::new(3.0, 0.0), C64::new(-4.0, 0.0)]);
        assert_eq!(singular_values(&d).unwrap(), vec![4.0, 3.0]);
        let (vals, _) = hermitian_eigen(&d).unwrap();
        assert_eq!(vals, vec![-4.0, 3.0]);
        assert_eq!(singular_values(&DenseOperator::identity(4)).unwrap(), vec![1.0; 4]);
    }

    #[test]
    fn eigen_reconstructs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for d in [1, 2, 5, 16, 32] {
            let a = DenseOperator::random(d, &mut rng).hermitian_part();
            let (vals, v) = hermitian_eigen(&a).unwrap();
            let lam = DenseOperator::diagonal(&vals.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
            let back = v.mul(&lam).unwrap().mul(&v.adjoint()).unwrap();
            assert!(back.max_abs_diff(&a) < 1e-12);
            let vv = v.adjoint().mul(&v).unwrap();
            assert!(vv.max_abs_diff(&DenseOperator::identity(d)) < 1e-12);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        let b = DenseOperator::random(8, &mut rng);
        let a = b.adjoint().mul(&b).unwrap();
        let r = psd_sqrt(&a).unwrap();
        assert!(r.mul(&r).unwrap().max_abs_diff(&a) < 1e-11);
        assert!(r.is_hermitian(1e-12));
    }

    #[test]
    fn rank_deficient_singular_values() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let u = DenseOperator::random(8, &mut rng);
        let mut parts = vec![C64::new(0.0, 0.0); 8];
        parts[0] = C64::new(2.0, 0.0);
        parts[1] = C64::new(1e-9, 0.0);
        let a = u.mul(&DenseOperator::diagonal(&parts)).unwrap();
        let sv = singular_values(&a).unwrap();
        assert!(sv[2..].iter().all(|&s| s < 1e-14));
        let gram = a.adjoint().mul(&a).unwrap();
        let (vals, _) = hermitian_eigen(&gram).unwrap();
        let top = vals[vals.len() - 1].sqrt();
        assert!((sv[0] - top).abs() < 1e-11 * top);
    }
}
