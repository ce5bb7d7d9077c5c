//! Checkers on matrix algebras: square-function domination and the CAR
//! inequalities. Norms are computed from dense spectra.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde_json::json;

use super::cube_checks::TIE_TOL;
use super::ensemble::{car_corpus, random_car, random_operator};
use super::{
    check_cube_n, params, ratio_of, Mode, Outcome, Report, Verifier, MAX_DENSE_SITES, STREAM_CAR,
    STREAM_MATRIX,
};
use crate::car::{car_annihilation, car_number, symmetrized_gradient_square, CarElement};
use crate::error::{invalid, Error, Result};
use crate::matrix::{pauli_generator, projection_pi, DenseOperator, Letter, PauliElement};
use crate::norms::{hermitian_eigen, khintchine_constant, schatten_norm, sequence_norm, singular_values, FunctionSpace};
use crate::par::trial_rng;
use crate::spectral::{constant_k_alpha, constant_k_beta};
use crate::C64;

/// Square roots of the eigenvalues of a PSD matrix, i.e. the spectrum of its
/// square root.
fn sqrt_spectrum(y: &DenseOperator) -> Result<Vec<f64>> {
    let (vals, _) = hermitian_eigen(&y.hermitian_part())?;
    Ok(vals.into_iter().map(|v| v.max(0.0).sqrt()).collect())
}

/// Spectrum of |∇_s T|.
pub fn gradient_spectrum(t: &CarElement) -> Result<Vec<f64>> {
    sqrt_spectrum(&symmetrized_gradient_square(t)?.to_dense())
}

fn sum_dense(n: usize, terms: impl Iterator<Item = DenseOperator>) -> DenseOperator {
    terms.fold(DenseOperator::zeros(1 << n), |acc, m| acc.add(&m).expect("same dimension"))
}

/// ‖(Σ_j c_j² X_j* X_j)^{1/2}‖_E (or with X_j X_j* when `star`).
fn weighted_square_function(xs: &[DenseOperator], weights: &[f64], star: bool, sp: &FunctionSpace) -> Result<f64> {
    let dim = xs.first().map_or(1, DenseOperator::dim);
    let mut y = DenseOperator::zeros(dim);
    for (x, &w) in xs.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        let (l, r) = if star { (x.clone(), x.adjoint()) } else { (x.adjoint(), x.clone()) };
        y = y.add(&l.mul(&r)?.scale(C64::new(w * w, 0.0)))?;
    }
    sequence_norm(&sqrt_spectrum(&y)?, sp)
}

const GOLDEN_CYCLES: usize = 2;
const GOLDEN_STEPS: usize = 16;

/// Upper bound of inf over D'_j(T) = V_j + W_j of ‖(Σ|V_j|²)^{1/2}‖ +
/// ‖(Σ|W_j*|²)^{1/2}‖, searched over V_j = t_j D'_j(T) with t ∈ [0, 1]^n by
/// cyclic golden-section steps (the objective is convex in each t_j).
/// Returns (best trivial split, best found).
pub fn decomposition_bound_car(t: &CarElement, sp: &FunctionSpace) -> Result<(f64, f64)> {
    let n = t.n();
    let xs: Vec<DenseOperator> = (1..=n).map(|j| Ok(car_annihilation(t, j)?.to_dense())).collect::<Result<_>>()?;
    let value = |w: &[f64]| -> Result<f64> {
        let rest: Vec<f64> = w.iter().map(|x| 1.0 - x).collect();
        Ok(weighted_square_function(&xs, w, false, sp)? + weighted_square_function(&xs, &rest, true, sp)?)
    };
    let trivial = value(&vec![1.0; n])?.min(value(&vec![0.0; n])?);
    let mut w = vec![0.5; n];
    let mut best = trivial.min(value(&w)?);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..GOLDEN_CYCLES {
        for j in 0..n {
            let at = |x: f64, w: &mut Vec<f64>| -> Result<f64> {
                w[j] = x;
                value(w)
            };
            let (mut a, mut b) = (0.0, 1.0);
            let mut c = b - phi * (b - a);
            let mut d = a + phi * (b - a);
            let mut fc = at(c, &mut w)?;
            let mut fd = at(d, &mut w)?;
            for _ in 0..GOLDEN_STEPS {
                if fc <= fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - phi * (b - a);
                    fc = at(c, &mut w)?;
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + phi * (b - a);
                    fd = at(d, &mut w)?;
                }
            }
            let (x, fx) = if fc <= fd { (c, fc) } else { (d, fd) };
            w[j] = x;
            best = best.min(fx);
        }
    }
    Ok((trivial, best))
}

fn check_dense_n(n: usize) -> Result<()> {
    check_cube_n(n, MAX_DENSE_SITES)
}

impl Verifier {
    fn random_t(&self, n: usize, seed: u64, i: usize, hermitian: bool) -> CarElement {
        random_car(n, i, &mut trial_rng(seed, STREAM_CAR, i), hermitian)
    }

    pub fn check_lemma53(&self, n: usize, sp: &FunctionSpace, trials: usize, seed: u64) -> Result<Report> {
        check_cube_n(n, 5)?;
        if !sp.two_convex() {
            return Err(invalid(format!("{} is not 2-convex", sp.label())));
        }
        let p: Vec<DenseOperator> = (1..=n).map(|j| Ok(pauli_generator(Letter::P, j, n)?.to_dense())).collect::<Result<_>>()?;
        let eval = |s: &PauliElement| -> Result<Outcome> {
            let sj: Vec<DenseOperator> = (1..=n)
                .map(|j| Ok(pauli_generator(Letter::P, j, n)?.mul(&projection_pi(s, j)?)?.to_dense()))
                .collect::<Result<_>>()?;
            let first = sum_dense(n, sj.iter().map(|x| x.adjoint().mul(x).expect("same dimension")));
            let second = sum_dense(
                n,
                sj.iter().zip(&p).map(|(x, pj)| pj.mul(&x.mul(&x.adjoint()).expect("dim")).and_then(|m| m.mul(pj)).expect("dim")),
            );
            let den = schatten_norm(&s.to_dense(), sp)?;
            let l1 = sequence_norm(&sqrt_spectrum(&first)?, sp)?;
            let l2 = sequence_norm(&sqrt_spectrum(&second)?, sp)?;
            let scale = s.hilbert_schmidt();
            Ok(match (ratio_of(l1, den, scale), ratio_of(l2, den, scale)) {
                (Some(a), Some(b)) => Outcome::strict(a.max(b), vec![("square_ratio", a), ("adjoint_square_ratio", b)]),
                _ => Outcome::Skip("zero operator"),
            })
        };
        let word = |letters: &[(usize, Letter)]| {
            let w = letters.iter().fold(0, |w, &(j, l)| crate::matrix::pauli::with_letter(w, j, l));
            PauliElement::from_word(n, w, C64::new(1.0, 0.0)).expect("fits")
        };
        let mut corpus = vec![("q1".to_string(), word(&[(1, Letter::Q)]))];
        if n >= 2 {
            corpus.push(("p1q2".into(), word(&[(1, Letter::P), (2, Letter::Q)])));
            corpus.push(("u1p2".into(), word(&[(1, Letter::U), (2, Letter::P)])));
        }
        corpus.push(("p-sum".into(), (2..=n).fold(word(&[(1, Letter::P)]), |a, j| a.add(&word(&[(j, Letter::P)])).expect("n"))));
        let tally = self.tally(
            corpus,
            trials,
            |i| random_operator(n, i, &mut trial_rng(seed, STREAM_MATRIX, i)),
            eval,
            1.0 + self.slack,
        )?;
        let pr = params(&[("n", json!(n)), ("space", json!(sp.label())), ("trials", json!(trials))]);
        Ok(self.build_report("lemma53", pr, tally, Mode::Checked(1.0), seed, vec![]))
    }

    pub fn check_car_main(&self, n: usize, sp: &FunctionSpace, trials: usize, seed: u64) -> Result<Report> {
        check_dense_n(n)?;
        sp.validate()?;
        let alpha = self.alpha;
        let ka = constant_k_alpha(alpha)?;
        let mut notes = Vec::new();
        let ke = match khintchine_constant(sp, self.c) {
            Ok(k) => {
                if !k.sharp {
                    notes.push(format!("K_E for {} uses the non-sharp estimate with C = {}", sp.label(), self.c));
                }
                Some(k.value)
            }
            Err(Error::UnsupportedSpace(_)) => {
                notes.push("K_E is undefined on C_inf; raw ratios are reported only".into());
                None
            }
            Err(e) => return Err(e),
        };
        let eval = |t: &CarElement| -> Result<Outcome> {
            let den = sequence_norm(&gradient_spectrum(t)?, sp)?;
            let centered = t.to_dense().sub(&DenseOperator::identity(1 << n).scale(t.trace()))?;
            let num1 = schatten_norm(&centered, sp)?;
            let num2 = schatten_norm(&car_number(t, alpha)?.to_dense(), sp)?;
            let scale = t.pauli().hilbert_schmidt();
            let (Some(r1), Some(r2)) = (ratio_of(num1, den, scale), ratio_of(num2, den, scale)) else {
                return Ok(Outcome::Skip("scalar operator (0/0)"));
            };
            let parts = vec![("poincare_raw", r1), ("number_raw", r2)];
            Ok(match ke {
                Some(k) => Outcome::strict((r1 / (FRAC_PI_2 * k)).max(r2 / (ka * k)), parts),
                None => Outcome::strict(r1, parts),
            })
        };
        let mode = if ke.is_some() { Mode::Checked(1.0) } else { Mode::Informational(None) };
        let limit = if ke.is_some() { 1.0 + self.slack } else { f64::INFINITY };
        let tally = self.tally(car_corpus(n), trials, |i| self.random_t(n, seed, i, false), eval, limit)?;
        if ke.is_some() {
            notes.push("worst_ratio is the larger of the two ratios, each divided by its own constant".into());
        }
        let pr = params(&[("n", json!(n)), ("space", json!(sp.label())), ("trials", json!(trials)), ("alpha", json!(alpha))]);
        Ok(self.build_report("car-main", pr, tally, mode, seed, notes))
    }

    pub fn check_car_concentration(&self, n: usize, t_grid: &[f64], trials: usize, seed: u64) -> Result<Report> {
        check_dense_n(n)?;
        if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) {
            return Err(invalid("t grid must be nonempty and positive"));
        }
        let alpha = self.alpha;
        let ka = constant_k_alpha(alpha)?;
        let eval = |t: &CarElement| -> Result<Outcome> {
            let g = gradient_spectrum(t)?;
            let gmax = g.iter().fold(0.0f64, |m, x| m.max(*x));
            let scale = t.pauli().hilbert_schmidt();
            if gmax <= 1e-13 * scale {
                return Ok(Outcome::Skip("scalar operator"));
            }
            let centered = t.to_dense().sub(&DenseOperator::identity(1 << n).scale(t.trace()))?;
            let s = singular_values(&centered)?;
            let sa = singular_values(&car_number(t, alpha)?.to_dense())?;
            let mean = |v: &mut dyn Iterator<Item = f64>| v.sum::<f64>() / (1usize << n) as f64;
            let e1 = 0.5 * mean(&mut s.iter().map(|x| x.exp())) / mean(&mut g.iter().map(|x| (PI * PI / 16.0 * x * x).exp()));
            let e2 = 0.5 * mean(&mut sa.iter().map(|x| x.exp())) / mean(&mut g.iter().map(|x| (0.5 * ka * ka * x * x).exp()));
            let mut c1 = 0.0f64;
            let mut c2 = 0.0f64;
            let spread = s.iter().chain(&sa).fold(0.0f64, |m, x| m.max(*x));
            for &u in t_grid {
                // the spectral tail includes the atom at u, up to rounding
                let cut = u - TIE_TOL * (u + spread);
                let tail = mean(&mut s.iter().map(|&x| f64::from(u8::from(x >= cut))));
                let tail_a = mean(&mut sa.iter().map(|&x| f64::from(u8::from(x >= cut))));
                c1 = c1.max(tail / (2.0 * (-4.0 * u * u / (PI * PI * gmax * gmax)).exp()));
                c2 = c2.max(tail_a / (2.0 * (-u * u / (2.0 * ka * ka * gmax * gmax)).exp()));
            }
            let ratio = e1.max(e2).max(c1).max(c2);
            Ok(Outcome::strict(
                ratio,
                vec![("exp_ratio", e1), ("exp_number_ratio", e2), ("tail_ratio", c1), ("tail_number_ratio", c2)],
            ))
        };
        let generate = |i: usize| {
            let mut rng = trial_rng(seed, STREAM_CAR, i);
            let t = random_car(n, i, &mut rng, i % 2 == 0);
            let u: f64 = rng.gen();
            // (π²/16)‖∇_s T‖²_∞ log-uniform in [0.01, 20]
            let target = (0.01f64.ln() + u * (20.0f64 / 0.01).ln()).exp();
            let g = gradient_spectrum(&t).expect("eigensolver").into_iter().fold(0.0f64, f64::max);
            if g > 0.0 {
                t.scale(C64::new((target / (PI * PI / 16.0)).sqrt() / g, 0.0))
            } else {
                t
            }
        };
        let tally = self.tally(car_corpus(n), trials, generate, eval, 1.0 + self.slack)?;
        let notes = vec!["spectra from full eigendecompositions; random T alternate Hermitian and general".to_string()];
        let pr = params(&[("n", json!(n)), ("trials", json!(trials)), ("alpha", json!(alpha)), ("t_grid", json!(t_grid))]);
        Ok(self.build_report("car-concentration", pr, tally, Mode::Checked(1.0), seed, notes))
    }

    pub fn check_car_reverse(&self, n: usize, sp: &FunctionSpace, beta: f64, trials: usize, seed: u64) -> Result<Report> {
        check_dense_n(n)?;
        sp.validate()?;
        let (convex, concave) = (sp.two_convex(), matches!(*sp, FunctionSpace::Lp(p) if p > 1.0 && p <= 2.0));
        if !convex && !concave {
            return Err(invalid(format!("{} is neither 2-convex nor 2-concave and r-convex", sp.label())));
        }
        let mut notes = Vec::new();
        let informational = beta == 0.5;
        if informational {
            notes.push("β = 1/2 needs the UMD constant H_E, which is not computed".into());
        } else if !(beta > 0.5) {
            return Err(invalid(format!("reverse inequalities need β > 1/2, got {beta}")));
        }
        let kb = if informational { 1.0 } else { constant_k_beta(beta)? };
        let kd = if concave {
            let k = khintchine_constant(&sp.dual().expect("L^p has a dual"), self.c)?;
            if !k.sharp {
                notes.push(format!("K_E* uses the non-sharp estimate with C = {}", self.c));
            }
            k.value
        } else {
            1.0
        };
        let eval = |t: &CarElement| -> Result<Outcome> {
            let den = schatten_norm(&car_number(t, beta)?.to_dense(), sp)?;
            let scale = t.pauli().hilbert_schmidt();
            let mut parts = Vec::new();
            let (mut ratio, mut strict) = (0.0f64, 0.0f64);
            if convex {
                let num = sequence_norm(&gradient_spectrum(t)?, sp)?;
                let Some(r) = ratio_of(num, den, scale) else {
                    return Ok(Outcome::Skip("scalar operator (0/0)"));
                };
                parts.push(("gradient_raw", r));
                ratio = ratio.max(r / (2.0 * kb));
                strict = ratio;
            }
            if concave {
                let (trivial, best) = decomposition_bound_car(t, sp)?;
                let Some(r) = ratio_of(best, den, scale) else {
                    return Ok(Outcome::Skip("scalar operator (0/0)"));
                };
                parts.push(("split_raw", r));
                parts.push(("trivial_split_raw", trivial / den));
                ratio = ratio.max(r / (kb * kd * kd));
            }
            Ok(Outcome::Ratio { ratio, strict, parts })
        };
        let mode = if informational { Mode::Informational(None) } else { Mode::Checked(1.0) };
        let limit = if informational { f64::INFINITY } else { 1.0 + self.slack };
        let corpus = car_corpus(n).into_iter().filter(|(l, _)| l != "identity").collect();
        let tally = self.tally(corpus, trials, |i| self.random_t(n, seed, i, false), eval, limit)?;
        if concave {
            notes.push("the split infimum is only upper-bounded over V_j = t_j D'_j(T)".into());
        }
        notes.push("worst_ratio is normalized by each part's constant".into());
        let pr = params(&[("n", json!(n)), ("space", json!(sp.label())), ("trials", json!(trials)), ("beta", json!(beta))]);
        Ok(self.build_report("car-reverse", pr, tally, mode, seed, notes))
    }
}
