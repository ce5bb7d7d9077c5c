//! Checkers for inequalities on the cube.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;
use serde_json::json;

use super::ensemble::{cube_corpus, random_function};
use super::{
    check_cube_n, params, ratio_of, AsWitness, Mode, Outcome, Report, Verifier, Witness,
    MAX_CUBE_SITES, STREAM_CUBE, STREAM_SETS,
};
use crate::cube::{full_set, gradient_length, partial_gradient_length, project_coordinates, riesz_product, CubeFunction};
use crate::error::{invalid, Error, Result};
use crate::norms::{function_norm, khintchine_constant, FunctionSpace};
use crate::par::trial_rng;
use crate::spectral::{constant_k_alpha, constant_k_beta, cosine_semigroup, fractional_laplacian};
use crate::{Mask, C64};

fn scale_of(f: &CubeFunction) -> f64 {
    f.sup_norm()
}

fn grad_norm(f: &CubeFunction, sp: &FunctionSpace) -> Result<f64> {
    function_norm(&gradient_length(f), sp)
}

fn centered(f: &CubeFunction) -> CubeFunction {
    f.map_coeffs(|a, c| if a == 0 { C64::new(0.0, 0.0) } else { c })
}

/// ‖f − Ef‖_E / ‖|∇f|‖_E, or `None` for constant f.
pub fn poincare_ratio(f: &CubeFunction, sp: &FunctionSpace) -> Result<Option<f64>> {
    let num = function_norm(&centered(f), sp)?;
    Ok(ratio_of(num, grad_norm(f, sp)?, scale_of(f)))
}

/// ‖f − cos^N θ₀ f‖_E / ‖|∇f|‖_E.
pub fn semigroup_ratio(f: &CubeFunction, sp: &FunctionSpace, theta0: f64) -> Result<Option<f64>> {
    let num = function_norm(&f.sub(&cosine_semigroup(f, theta0)?)?, sp)?;
    Ok(ratio_of(num, grad_norm(f, sp)?, scale_of(f)))
}

/// ‖Δ^α f‖_E / ‖|∇f|‖_E.
pub fn fractional_ratio(f: &CubeFunction, sp: &FunctionSpace, alpha: f64) -> Result<Option<f64>> {
    let num = function_norm(&fractional_laplacian(f, alpha)?, sp)?;
    Ok(ratio_of(num, grad_norm(f, sp)?, scale_of(f)))
}

/// ‖Δ^β f‖_E / (‖f‖_E^{1−β} ‖Δf‖_E^β).
pub fn moment_ratio(f: &CubeFunction, sp: &FunctionSpace, beta: f64) -> Result<Option<f64>> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(invalid(format!("the moment exponent must lie in (0, 1), got {beta}")));
    }
    let num = function_norm(&fractional_laplacian(f, beta)?, sp)?;
    let den = function_norm(f, sp)?.powf(1.0 - beta) * function_norm(&fractional_laplacian(f, 1.0)?, sp)?.powf(beta);
    Ok(ratio_of(num, den, scale_of(f)))
}

/// ‖|∇f|‖_E / ‖Δ^β f‖_E.
pub fn reverse_convex_ratio(f: &CubeFunction, sp: &FunctionSpace, beta: f64) -> Result<Option<f64>> {
    let num = grad_norm(f, sp)?;
    Ok(ratio_of(num, function_norm(&fractional_laplacian(f, beta)?, sp)?, scale_of(f)))
}

/// (‖V_J f‖, ‖|∇_J f|‖, ‖P_{J̄} f‖, ‖f‖) in E.
pub fn partial_poincare_parts(f: &CubeFunction, sp: &FunctionSpace, set: Mask) -> Result<[f64; 4]> {
    let (v, p) = project_coordinates(f, set)?;
    Ok([
        function_norm(&v, sp)?,
        function_norm(&partial_gradient_length(f, set)?, sp)?,
        function_norm(&p, sp)?,
        function_norm(f, sp)?,
    ])
}

fn outcome(r: Option<f64>, part: &'static str) -> Outcome {
    match r {
        None => Outcome::Skip("constant function (0/0)"),
        Some(r) => Outcome::strict(r, vec![(part, r)]),
    }
}

fn khintchine(sp: &FunctionSpace, c: f64, notes: &mut Vec<String>) -> Result<f64> {
    let k = khintchine_constant(sp, c)?;
    if !k.sharp {
        notes.push(format!("K_E for {} uses the non-sharp estimate with C = {c}", sp.label()));
    }
    Ok(k.value)
}

/// One row of the Riesz product table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszRow {
    pub n: usize,
    /// ‖Δf_n‖_p / (2^{1+1/p} n ‖f_n‖_p), at most 1.
    pub laplacian_ratio: f64,
    /// n^{1/p} ‖f_n‖_p / ‖|∇f_n|‖_p, at most 1.
    pub gradient_ratio: f64,
    /// ‖|∇f_n|‖_p / ‖Δ^β f_n‖_p.
    pub growth: f64,
}

pub fn riesz_table(n_max: usize, p: f64, beta: f64) -> Result<Vec<RieszRow>> {
    check_cube_n(n_max, MAX_CUBE_SITES)?;
    let sp = FunctionSpace::lp(p)?;
    if !(beta > 0.0) {
        return Err(invalid("β must be positive"));
    }
    (1..=n_max)
        .map(|n| {
            let f = riesz_product(n)?;
            let fp = function_norm(&f, &sp)?;
            let lap = function_norm(&fractional_laplacian(&f, 1.0)?, &sp)?;
            let grad = grad_norm(&f, &sp)?;
            let frac = function_norm(&fractional_laplacian(&f, beta)?, &sp)?;
            Ok(RieszRow {
                n,
                laplacian_ratio: lap / (2f64.powf(1.0 + 1.0 / p) * n as f64 * fp),
                gradient_ratio: (n as f64).powf(1.0 / p) * fp / grad,
                growth: grad / frac,
            })
        })
        .collect()
}

/// Least-squares slope of ln y against ln x.
pub(crate) fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / m, sy / m);
    let (mut num, mut den) = (0.0, 0.0);
    for &(x, y) in points {
        num += (x.ln() - mx) * (y.ln() - my);
        den += (x.ln() - mx).powi(2);
    }
    num / den
}

/// Allowed distance between the fitted and the predicted growth slope.
pub const SLOPE_TOL: f64 = 0.1;

/// Relative width within which a value counts as sitting on a tail threshold.
pub(crate) const TIE_TOL: f64 = 1e-12;

/// Random set from its own stream so that the functions line up with other
/// checkers on the same seed.
fn random_set(n: usize, seed: u64, k: usize) -> Mask {
    trial_rng(seed, STREAM_SETS, k).gen_range(0..=full_set(n))
}

struct WithSet(CubeFunction, Mask);

impl AsWitness for WithSet {
    fn witness(&self, label: String) -> Witness {
        let n = self.0.n();
        let label = if self.1 == full_set(n) {
            label
        } else {
            let items: Vec<String> = (1..=n).filter(|j| self.1 >> (j - 1) & 1 == 1).map(|j| j.to_string()).collect();
            format!("{label} J={{{}}}", items.join(","))
        };
        self.0.witness(label)
    }
}

/// Largest absolute value of g(x) over the cube.
fn sup(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

impl Verifier {
    fn random_cube(&self, n: usize, seed: u64, i: usize) -> CubeFunction {
        random_function(n, i, &mut trial_rng(seed, STREAM_CUBE, i), false)
    }

    fn random_real(&self, n: usize, seed: u64, i: usize) -> (CubeFunction, f64) {
        let mut rng = trial_rng(seed, STREAM_CUBE, i);
        let f = random_function(n, i, &mut rng, true);
        let u: f64 = rng.gen();
        (f, u)
    }

    pub fn check_poincare(&self, n: usize, sp: &FunctionSpace, trials: usize, seed: u64) -> Result<Report> {
        let mut r = self.partial_core(n, sp, &[full_set(n)], trials, seed, false)?;
        r.theorem_id = "poincare".into();
        r.params.remove("sets");
        r.params.remove("corollary");
        Ok(r)
    }

    pub fn check_appendix_partial(
        &self,
        n: usize,
        sp: &FunctionSpace,
        j_samples: usize,
        trials: usize,
        seed: u64,
    ) -> Result<Report> {
        check_cube_n(n, 10)?;
        let sets: Vec<Mask> = (0..j_samples).map(|k| random_set(n, seed, k)).collect();
        self.partial_core(n, sp, &sets, trials, seed, true)
    }

    /// The partial-coordinate inequality over the given sets J. The
    /// corollary part is normalized and rescaled onto the theorem's
    /// constant so that one number summarizes both.
    pub fn check_appendix_sets(
        &self,
        n: usize,
        sp: &FunctionSpace,
        sets: &[Mask],
        trials: usize,
        seed: u64,
        corollary: bool,
    ) -> Result<Report> {
        check_cube_n(n, 10)?;
        self.partial_core(n, sp, sets, trials, seed, corollary)
    }

    fn partial_core(
        &self,
        n: usize,
        sp: &FunctionSpace,
        sets: &[Mask],
        trials: usize,
        seed: u64,
        corollary: bool,
    ) -> Result<Report> {
        check_cube_n(n, MAX_CUBE_SITES)?;
        for &s in sets {
            crate::cube::check_subset(n, s)?;
        }
        if sets.is_empty() {
            return Err(invalid("at least one coordinate set is needed"));
        }
        let mut notes = Vec::new();
        let sqrt_n = (n as f64).sqrt();
        // on L^∞ only the corollary with constant C√n is available
        let linf = matches!(sp, FunctionSpace::Linf);
        let bound = if linf {
            if !corollary {
                return Err(Error::UnsupportedSpace("K_E is undefined on L^inf".into()));
            }
            self.c * sqrt_n
        } else {
            FRAC_PI_4 * khintchine(sp, self.c, &mut notes)?
        };
        let lp = sp.exponent();
        if corollary && !linf && lp.is_none() {
            notes.push("the corollary is stated for L^p only and was not evaluated".into());
        }
        let c = self.c;
        let eval = |w: &WithSet| -> Result<Outcome> {
            let [v, g, p, full] = partial_poincare_parts(&w.0, sp, w.1)?;
            let Some(theorem) = ratio_of(v, g, scale_of(&w.0)) else {
                return Ok(Outcome::Skip("V_J f and grad_J f both vanish"));
            };
            if linf {
                return Ok(Outcome::strict(theorem, vec![("corollary_linf_raw", theorem)]));
            }
            let mut parts = vec![("theorem_raw", theorem)];
            let mut ratio = theorem;
            if let (true, Some(q)) = (corollary, lp) {
                let cor = full / (c * q.sqrt() * g + p);
                parts.push(("corollary_normalized", cor));
                ratio = ratio.max(cor * bound);
            }
            Ok(Outcome::strict(ratio, parts))
        };
        let corpus: Vec<(String, WithSet)> = sets
            .iter()
            .flat_map(|&s| cube_corpus(n).into_iter().map(move |(l, f)| (l, WithSet(f, s))))
            .collect();
        let tally = self.tally(
            corpus,
            trials * sets.len(),
            |i| WithSet(self.random_cube(n, seed, i % trials.max(1)), sets[i / trials.max(1)]),
            eval,
            bound + self.slack,
        )?;
        let mut p = params(&[
            ("n", json!(n)),
            ("space", json!(sp.label())),
            ("trials", json!(trials)),
            ("sets", json!(sets)),
            ("corollary", json!(corollary)),
            ("C", json!(self.c)),
        ]);
        if !corollary {
            p.remove("C");
        }
        Ok(self.build_report("appendix", p, tally, Mode::Checked(bound), seed, notes))
    }

    pub fn check_semigroup_difference(
        &self,
        n: usize,
        sp: &FunctionSpace,
        theta0: f64,
        trials: usize,
        seed: u64,
    ) -> Result<Report> {
        check_cube_n(n, MAX_CUBE_SITES)?;
        if !(0.0..=FRAC_PI_2).contains(&theta0) {
            return Err(Error::InvalidDomain(format!("θ₀ must lie in [0, π/2], got {theta0}")));
        }
        if theta0 == FRAC_PI_2 {
            let mut r = self.check_poincare(n, sp, trials, seed)?;
            r.theorem_id = "semigroup".into();
            r.params.insert("theta0".into(), json!(theta0));
            r.notes.push("θ₀ = π/2 is the Poincaré inequality".into());
            return Ok(r);
        }
        let mut notes = Vec::new();
        let bound = 0.5 * theta0 * khintchine(sp, self.c, &mut notes)?;
        let tally = self.tally(
            cube_corpus(n),
            trials,
            |i| self.random_cube(n, seed, i),
            |f| Ok(outcome(semigroup_ratio(f, sp, theta0)?, "ratio")),
            bound + self.slack,
        )?;
        let p = params(&[("n", json!(n)), ("space", json!(sp.label())), ("trials", json!(trials)), ("theta0", json!(theta0))]);
        Ok(self.build_report("semigroup", p, tally, Mode::Checked(bound), seed, notes))
    }

    pub fn check_fractional(&self, n: usize, sp: &FunctionSpace, alpha: f64, trials: usize, seed: u64) -> Result<Report> {
        check_cube_n(n, MAX_CUBE_SITES)?;
        if !(alpha > 0.0 && alpha <= 0.5) {
            return Err(invalid(format!("the fractional check needs 0 < α ≤ 1/2, got {alpha}")));
        }
        let mut notes = Vec::new();
        let ke = khintchine(sp, self.c, &mut notes)?;
        let mode = if alpha == 0.5 {
            notes.push("α = 1/2 needs the UMD constant H_E, which is not computed".into());
            Mode::Informational(None)
        } else {
            Mode::Checked(constant_k_alpha(alpha)? * ke)
        };
        let limit = match mode {
            Mode::Checked(b) => b + self.slack,
            Mode::Informational(_) => f64::INFINITY,
        };
        let tally = self.tally(
            cube_corpus(n),
            trials,
            |i| self.random_cube(n, seed, i),
            |f| Ok(outcome(fractional_ratio(f, sp, alpha)?, "ratio")),
            limit,
        )?;
        let p = params(&[("n", json!(n)), ("space", json!(sp.label())), ("trials", json!(trials)), ("alpha", json!(alpha))]);
        Ok(self.build_report("fractional", p, tally, mode, seed, notes))
    }

    pub fn check_exponential(&self, n: usize, trials: usize, seed: u64) -> Result<Report> {
        check_cube_n(n, MAX_CUBE_SITES)?;
        let alpha = self.alpha;
        let ka = constant_k_alpha(alpha)?;
        let eval = |f: &CubeFunction| -> Result<Outcome> {
            let grad = gradient_length(f);
            let g2: Vec<f64> = grad.values().iter().map(|v| v.re * v.re).collect();
            let mean = |it: &mut dyn Iterator<Item = f64>| it.sum::<f64>() / g2.len() as f64;
            let rhs1 = 2.0 * mean(&mut g2.iter().map(|g| (PI * PI / 32.0 * g).exp()));
            let rhs2 = 2.0 * mean(&mut g2.iter().map(|g| (0.5 * ka * ka * g).exp()));
            if !(rhs1 < 1e12 && rhs2 < 1e12) {
                return Ok(Outcome::Skip("right side above the overflow guard 1e12"));
            }
            let m = f.mean();
            let lhs1 = mean(&mut f.values().iter().map(|v| (v - m).norm().exp()));
            let frac = fractional_laplacian(f, alpha)?;
            let lhs2 = mean(&mut frac.values().iter().map(|v| v.norm().exp()));
            let (r1, r2) = (lhs1 / rhs1, lhs2 / rhs2);
            Ok(Outcome::strict(r1.max(r2), vec![("exp_ratio", r1), ("exp_alpha_ratio", r2)]))
        };
        let mut corpus = vec![("zero".to_string(), CubeFunction::constant(n, C64::new(0.0, 0.0))?)];
        for lambda in [0.1, 0.5, 1.0, 2.0, 3.0] {
            corpus.push((format!("omega{{1}}*{lambda}"), CubeFunction::walsh(n, 1)?.scale(C64::new(lambda, 0.0))));
        }
        corpus.extend(cube_corpus(n).into_iter().map(|(l, f)| (l, unit_gradient(&f))));
        let generate = |i: usize| {
            let (f, u) = self.random_real(n, seed, i);
            // sup |∇f| log-uniform in [0.05, 4]
            let target = (0.05f64.ln() + u * (4.0f64 / 0.05).ln()).exp();
            unit_gradient(&f).scale(C64::new(target, 0.0))
        };
        let tally = self.tally(corpus, trials, generate, eval, 1.0 + self.slack)?;
        let p = params(&[("n", json!(n)), ("trials", json!(trials)), ("alpha", json!(alpha))]);
        let notes = vec!["exact expectations by enumeration of all 2^n points".into()];
        Ok(self.build_report("exponential", p, tally, Mode::Checked(1.0), seed, notes))
    }

    pub fn check_concentration(&self, n: usize, trials: usize, t_grid: &[f64], seed: u64) -> Result<Report> {
        check_cube_n(n, MAX_CUBE_SITES)?;
        if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) {
            return Err(invalid("t grid must be nonempty and positive"));
        }
        let alpha = self.alpha;
        let ka = constant_k_alpha(alpha)?;
        let tails = |f: &CubeFunction| -> Result<Option<Vec<[f64; 4]>>> {
            let gsup = sup(gradient_length(f).values().iter().map(|v| v.re));
            if gsup <= 1e-13 * scale_of(f) {
                return Ok(None);
            }
            let m = f.mean();
            let frac = fractional_laplacian(f, alpha)?;
            let len = f.len() as f64;
            // values sitting exactly on t up to rounding count as equal to t
            let spread = sup(f.values().iter().map(|v| (*v - m).norm())).max(sup(frac.values().iter().map(|v| v.norm())));
            let rows = t_grid
                .iter()
                .map(|&t| {
                    let cut = t + TIE_TOL * (t + spread);
                    let tail = f.values().iter().filter(|v| (*v - m).norm() > cut).count() as f64 / len;
                    let bound = 2.0 * (-8.0 * t * t / (PI * PI * gsup * gsup)).exp();
                    let tail_a = frac.values().iter().filter(|v| v.norm() > cut).count() as f64 / len;
                    let bound_a = 2.0 * (-t * t / (2.0 * ka * ka * gsup * gsup)).exp();
                    [tail, bound, tail_a, bound_a]
                })
                .collect();
            Ok(Some(rows))
        };
        let eval = |f: &CubeFunction| -> Result<Outcome> {
            let Some(rows) = tails(f)? else {
                return Ok(Outcome::Skip("constant function"));
            };
            let r1 = rows.iter().map(|r| r[0] / r[1]).fold(0.0, f64::max);
            let r2 = rows.iter().map(|r| r[2] / r[3]).fold(0.0, f64::max);
            Ok(Outcome::strict(r1.max(r2), vec![("tail_ratio", r1), ("tail_alpha_ratio", r2)]))
        };
        let corpus: Vec<_> = cube_corpus(n).into_iter().filter(|(l, _)| l != "riesz").collect();
        let generate = |i: usize| {
            let (f, _) = self.random_real(n, seed, i);
            let c = centered(&f);
            let s = c.sup_norm();
            if s > 0.0 {
                f.scale(C64::new(1.0 / s, 0.0))
            } else {
                f
            }
        };
        let mut tally = self.tally(corpus, trials, generate, eval, 1.0 + self.slack)?;
        let hamming = cube_corpus(n).into_iter().find(|(l, _)| l == "hamming").expect("in corpus").1;
        for (t, row) in t_grid.iter().zip(tails(&hamming)?.expect("not constant")) {
            tally.details.insert(format!("hamming_tail_t{t:.3}"), row[0]);
            tally.details.insert(format!("hamming_bound_t{t:.3}"), row[1]);
        }
        let p = params(&[("n", json!(n)), ("trials", json!(trials)), ("alpha", json!(alpha)), ("t_grid", json!(t_grid))]);
        Ok(self.build_report("concentration", p, tally, Mode::Checked(1.0), seed, vec![]))
    }

    pub fn check_reverse_convex(&self, n: usize, sp: &FunctionSpace, beta: f64, trials: usize, seed: u64) -> Result<Report> {
        check_cube_n(n, MAX_CUBE_SITES)?;
        if !sp.two_convex() {
            return Err(invalid(format!("{} is not 2-convex", sp.label())));
        }
        let (mode, limit, mut notes) = reverse_mode(beta, self.slack, constant_k_beta)?;
        let tally = self.tally(
            cube_corpus(n).into_iter().filter(|(l, _)| l != "constant").map(|(l, f)| (l, centered(&f))).collect(),
            trials,
            |i| centered(&self.random_cube(n, seed, i)),
            |f| Ok(outcome(reverse_convex_ratio(f, sp, beta)?, "ratio")),
            limit,
        )?;
        notes.push("functions are centered; constants carry no gradient".into());
        let p = params(&[("n", json!(n)), ("space", json!(sp.label())), ("trials", json!(trials)), ("beta", json!(beta))]);
        Ok(self.build_report("reverse-convex", p, tally, mode, seed, notes))
    }

    pub fn check_reverse_concave(&self, n: usize, sp: &FunctionSpace, beta: f64, trials: usize, seed: u64) -> Result<Report> {
        check_cube_n(n, MAX_CUBE_SITES)?;
        let p = match sp {
            FunctionSpace::Lp(p) if *p > 1.0 && *p <= 2.0 => *p,
            _ => return Err(invalid(format!("the split bound needs L^p with 1 < p <= 2, got {}", sp.label()))),
        };
        let mut notes = Vec::new();
        let dual = sp.dual().expect("L^p has a dual");
        let kd = khintchine(&dual, self.c, &mut notes)?;
        let (mode, limit, more) = reverse_mode(beta, self.slack, |b| Ok(constant_k_beta(b)? * kd * kd))?;
        notes.extend(more);
        let iters = self.descent_iterations;
        let eval = |f: &CubeFunction| -> Result<Outcome> {
            let den = function_norm(&fractional_laplacian(f, beta)?, sp)?;
            let (trivial, best) = split_upper_bound(f, p, iters);
            Ok(match ratio_of(best, den, scale_of(f)) {
                None => Outcome::Skip("constant function"),
                Some(r) => Outcome::Ratio {
                    ratio: r,
                    strict: 0.0,
                    parts: vec![("split_ratio", r), ("trivial_ratio", trivial / den)],
                },
            })
        };
        let tally = self.tally(
            cube_corpus(n).into_iter().filter(|(l, _)| l != "constant").map(|(l, f)| (l, centered(&f))).collect(),
            trials,
            |i| centered(&self.random_cube(n, seed, i)),
            eval,
            limit,
        )?;
        notes.push(format!(
            "the infimum over splits is only upper-bounded: trivial splits plus {iters} subgradient steps"
        ));
        let pr = params(&[("n", json!(n)), ("space", json!(sp.label())), ("trials", json!(trials)), ("beta", json!(beta))]);
        Ok(self.build_report("reverse-concave", pr, tally, mode, seed, notes))
    }

    pub fn check_riesz_growth(&self, n_max: usize, p: f64, beta: f64) -> Result<Report> {
        if n_max < 2 {
            return Err(invalid("the growth fit needs n_max >= 2"));
        }
        let rows = riesz_table(n_max, p, beta)?;
        let lo = n_max.saturating_sub(6).max(1);
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.n >= lo).map(|r| (r.n as f64, r.growth)).collect();
        let slope = log_log_slope(&pts);
        let expected = (1.0 / p - beta).max(0.0);
        let mut tally = super::Tally::default();
        for r in &rows {
            tally.push(Outcome::strict(
                r.laplacian_ratio.max(r.gradient_ratio),
                vec![("laplacian_ratio", r.laplacian_ratio), ("gradient_ratio", r.gradient_ratio)],
            ));
            tally.details.insert(format!("growth_n{:02}", r.n), r.growth);
        }
        let slope_ratio = (slope - expected).abs() / SLOPE_TOL;
        tally.push(Outcome::strict(slope_ratio, vec![("slope_ratio", slope_ratio)]));
        tally.instances -= 1;
        tally.details.insert("slope".into(), slope);
        tally.details.insert("expected_slope".into(), expected);
        let notes = vec![
            format!("slope fitted over n in {lo}..={n_max}; slope_ratio = |slope - expected| / {SLOPE_TOL}"),
            "the inputs are the Riesz products f_n, so no witness is stored".into(),
        ];
        let pr = params(&[("n_max", json!(n_max)), ("space", json!(format!("lp:{p}"))), ("beta", json!(beta))]);
        Ok(self.build_report("riesz", pr, tally, Mode::Checked(1.0), 0, notes))
    }

    pub fn check_moment_inequality(&self, n: usize, sp: &FunctionSpace, beta: f64, trials: usize, seed: u64) -> Result<Report> {
        check_cube_n(n, MAX_CUBE_SITES)?;
        sp.validate()?;
        let tally = self.tally(
            cube_corpus(n),
            trials,
            |i| self.random_cube(n, seed, i),
            |f| Ok(outcome(moment_ratio(f, sp, beta)?, "ratio")),
            4.0 + self.slack,
        )?;
        let p = params(&[("n", json!(n)), ("space", json!(sp.label())), ("trials", json!(trials)), ("beta", json!(beta))]);
        Ok(self.build_report("moment", p, tally, Mode::Checked(4.0), seed, vec![]))
    }
}

/// Strict for β > 1/2, informational at β = 1/2.
fn reverse_mode(beta: f64, slack: f64, constant: impl Fn(f64) -> Result<f64>) -> Result<(Mode, f64, Vec<String>)> {
    if beta == 0.5 {
        let notes = vec!["β = 1/2 needs the UMD constant H_E, which is not computed".to_string()];
        return Ok((Mode::Informational(None), f64::INFINITY, notes));
    }
    if !(beta > 0.5) {
        return Err(invalid(format!("reverse inequalities need β > 1/2, got {beta}")));
    }
    let b = constant(beta)?;
    Ok((Mode::Checked(b), b + slack, Vec::new()))
}

/// Rescales f so that sup|∇f| = 1 (or leaves it if ∇f = 0).
fn unit_gradient(f: &CubeFunction) -> CubeFunction {
    let s = sup(gradient_length(f).values().iter().map(|v| v.re));
    if s > 0.0 {
        f.scale(C64::new(1.0 / s, 0.0))
    } else {
        f.clone()
    }
}

/// Upper bound of inf over ∂_j f = g_j + h_j of ‖(Σ|g_j|²)^{1/2}‖_p +
/// ‖(Σ|h_j(· e_j)|²)^{1/2}‖_p. Returns (trivial split value, best found).
pub(crate) fn split_upper_bound(f: &CubeFunction, p: f64, iters: usize) -> (f64, f64) {
    let n = f.n();
    let len = f.len();
    let d: Vec<Vec<C64>> = (1..=n).map(|j| crate::cube::partial_derivative(f, j).expect("valid site").values().to_vec()).collect();
    let lp = |sq: &[f64]| (sq.iter().map(|s| s.powf(p / 2.0)).sum::<f64>() / len as f64).powf(1.0 / p);
    let objective = |g: &[Vec<C64>]| {
        let mut gs = vec![0.0; len];
        let mut hs = vec![0.0; len];
        for j in 0..n {
            for x in 0..len {
                gs[x] += g[j][x].norm_sqr();
                hs[x ^ (1 << j)] += (d[j][x] - g[j][x]).norm_sqr();
            }
        }
        (lp(&gs) + lp(&hs), gs, hs)
    };
    // all-g and all-h both give ‖|∇f|‖_p since ∂_j f(x e_j) = −∂_j f(x)
    let trivial = objective(&d).0;
    let radius = d.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut g: Vec<Vec<C64>> = d.iter().map(|dj| dj.iter().map(|c| c * 0.5).collect()).collect();
    let mut best = trivial;
    if radius == 0.0 {
        return (trivial, best);
    }
    for k in 0..iters {
        let (val, gs, hs) = objective(&g);
        if val.is_finite() {
            best = best.min(val);
        }
        let (ng, nh) = (lp(&gs), lp(&hs));
        let mut grad = vec![vec![C64::new(0.0, 0.0); len]; n];
        for j in 0..n {
            for x in 0..len {
                let mut v = C64::new(0.0, 0.0);
                if gs[x] > 0.0 && ng > 0.0 {
                    v += g[j][x] * (ng.powf(1.0 - p) * gs[x].powf(p / 2.0 - 1.0));
                }
                let y = x ^ (1 << j);
                if hs[y] > 0.0 && nh > 0.0 {
                    v -= (d[j][x] - g[j][x]) * (nh.powf(1.0 - p) * hs[y].powf(p / 2.0 - 1.0));
                }
                grad[j][x] = v;
            }
        }
        let gn = grad.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(gn > 0.0 && gn.is_finite()) {
            break;
        }
        let step = 0.25 * radius / ((k + 1) as f64).sqrt() / gn;
        for j in 0..n {
            for x in 0..len {
                g[j][x] -= grad[j][x] * step;
            }
        }
    }
    (trivial, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{subset, translate};

    fn lp(p: f64) -> FunctionSpace {
        FunctionSpace::Lp(p)
    }

    #[test]
    fn walsh_ratios_in_closed_form() {
        let n = 5;
        for a in [1usize, 0b11, 0b10110, 0b11111] {
            let k = a.count_ones() as f64;
            let w = CubeFunction::walsh(n, a).unwrap();
            for p in [1.0, 2.0, 3.0, 4.0] {
                let r = poincare_ratio(&w, &lp(p)).unwrap().unwrap();
                assert!((r - 1.0 / (2.0 * k.sqrt())).abs() < 1e-13);
                let r = fractional_ratio(&w, &lp(p), 0.25).unwrap().unwrap();
                assert!((r - 4f64.powf(0.25) * k.powf(-0.25) / 2.0).abs() < 1e-13);
                let r = moment_ratio(&w, &lp(p), 0.5).unwrap().unwrap();
                assert!((r - 1.0).abs() < 1e-13);
                let th = 0.7f64;
                let r = semigroup_ratio(&w, &lp(p), th).unwrap().unwrap();
                assert!((r - (1.0 - th.cos().powi(k as i32)) / (2.0 * k.sqrt())).abs() < 1e-13);
            }
        }
        assert!(poincare_ratio(&CubeFunction::constant(3, C64::new(2.0, 0.0)).unwrap(), &lp(2.0)).unwrap().is_none());
    }

    #[test]
    fn dictator_sum_gives_one_half_in_l2() {
        let n = 8;
        let f = cube_corpus(n).into_iter().find(|(l, _)| l == "dictator-sum").unwrap().1;
        assert!((poincare_ratio(&f, &lp(2.0)).unwrap().unwrap() - 0.5).abs() < 1e-13);
    }

    #[test]
    fn ratios_are_scale_invariant() {
        let mut rng = trial_rng(4, 9, 0);
        let f = random_function(5, 0, &mut rng, false);
        let lambda = C64::new(rng.gen_range(0.1..10.0), 0.0);
        let g = f.scale(lambda);
        let sp = lp(3.0);
        let pairs = [
            (poincare_ratio(&f, &sp).unwrap(), poincare_ratio(&g, &sp).unwrap()),
            (semigroup_ratio(&f, &sp, 0.4).unwrap(), semigroup_ratio(&g, &sp, 0.4).unwrap()),
            (fractional_ratio(&f, &sp, 0.3).unwrap(), fractional_ratio(&g, &sp, 0.3).unwrap()),
            (moment_ratio(&f, &sp, 0.3).unwrap(), moment_ratio(&g, &sp, 0.3).unwrap()),
            (reverse_convex_ratio(&f, &sp, 0.8).unwrap(), reverse_convex_ratio(&g, &sp, 0.8).unwrap()),
        ];
        for (a, b) in pairs {
            let (a, b) = (a.unwrap(), b.unwrap());
            assert!((a - b).abs() <= 1e-12 * a);
        }
        let (t1, b1) = split_upper_bound(&centered(&f), 1.5, 50);
        let (t2, b2) = split_upper_bound(&centered(&g), 1.5, 50);
        assert!((t2 / t1 - lambda.re).abs() < 1e-9 && (b2 / b1 - lambda.re).abs() < 1e-9);
    }

    #[test]
    fn poincare_passes_and_matches_partial_with_full_set() {
        let v = Verifier::default();
        let r = v.check_poincare(5, &lp(4.0), 60, 7).unwrap();
        assert!(r.passed);
        let a = v.check_appendix_sets(5, &lp(4.0), &[full_set(5)], 60, 7, false).unwrap();
        assert_eq!(a.worst_ratio, r.worst_ratio);
        let c = v.check_appendix_sets(5, &lp(4.0), &[full_set(5)], 60, 7, true).unwrap();
        assert_eq!(c.details["theorem_raw"], r.worst_ratio);
        assert!(r.notes.iter().any(|s| s.contains("skipped")));
    }

    #[test]
    fn appendix_empty_set_is_degenerate() {
        let v = Verifier::default();
        let r = v.check_appendix_sets(4, &lp(2.0), &[0], 10, 1, true).unwrap();
        assert!(r.passed);
        assert!(r.notes.iter().any(|s| s.contains("skipped")));
        let r = v.check_appendix_partial(6, &lp(4.0), 3, 30, 2).unwrap();
        assert!(r.passed, "{r:?}");
        let r = v.check_appendix_partial(5, &FunctionSpace::Linf, 2, 20, 2).unwrap();
        assert!(r.passed);
        assert!(v.check_poincare(3, &FunctionSpace::Linf, 2, 0).is_err());
    }

    #[test]
    fn semigroup_cases() {
        let v = Verifier::default();
        let r = v.check_semigroup_difference(4, &lp(3.0), 0.0, 10, 1).unwrap();
        assert_eq!(r.worst_ratio, 0.0);
        assert!(r.passed);
        let r = v.check_semigroup_difference(6, &lp(3.0), 1.0, 40, 1).unwrap();
        assert!(r.passed);
        let r = v.check_semigroup_difference(4, &lp(2.0), FRAC_PI_2, 10, 1).unwrap();
        assert_eq!(r.worst_ratio, v.check_poincare(4, &lp(2.0), 10, 1).unwrap().worst_ratio);
        assert!(v.check_semigroup_difference(4, &lp(2.0), 2.0, 1, 1).is_err());
    }

    #[test]
    fn fractional_modes() {
        let v = Verifier::default();
        let r = v.check_fractional(6, &lp(4.0), 0.25, 50, 3).unwrap();
        assert!(r.passed && r.verdict == super::super::Verdict::Pass);
        let r = v.check_fractional(4, &lp(4.0), 0.5, 10, 3).unwrap();
        assert_eq!(r.verdict, super::super::Verdict::Informational);
        assert!(v.check_fractional(4, &lp(4.0), 0.6, 10, 3).is_err());
    }

    #[test]
    fn exponential_and_concentration_pass() {
        let v = Verifier::default();
        let r = v.check_exponential(6, 30, 5).unwrap();
        assert!(r.passed, "{r:?}");
        let grid: Vec<f64> = (1..=10).map(|k| 0.1 * k as f64).collect();
        let r = v.check_concentration(6, 30, &grid, 5).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.details.contains_key("hamming_tail_t0.100"));
    }

    #[test]
    fn one_dimensional_exponential_by_hand() {
        // E e^{|λω₁|} = e^λ and |∇(λω₁)| = 2λ
        for lambda in [0.1f64, 0.5, 1.0, 2.0, 3.0] {
            let lhs = lambda.exp();
            let rhs = 2.0 * (PI * PI / 32.0 * 4.0 * lambda * lambda).exp();
            assert!(lhs <= rhs);
        }
    }

    #[test]
    fn reverse_checks() {
        let v = Verifier::default();
        let r = v.check_reverse_convex(6, &lp(4.0), 0.75, 40, 1).unwrap();
        assert!(r.passed, "{r:?}");
        let w = CubeFunction::walsh(3, 1).unwrap();
        assert!((reverse_convex_ratio(&w, &lp(4.0), 1.0).unwrap().unwrap() - 0.5).abs() < 1e-13);
        assert!(v.check_reverse_convex(4, &lp(1.5), 0.75, 1, 1).is_err());
        assert!(v.check_reverse_convex(4, &lp(4.0), 0.4, 1, 1).is_err());
        let r = v.check_reverse_convex(4, &lp(4.0), 0.5, 3, 1).unwrap();
        assert_eq!(r.verdict, super::super::Verdict::Informational);
        let r = v.check_reverse_concave(5, &lp(1.5), 1.0, 10, 1).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.details["split_ratio"] <= r.details["trivial_ratio"] + 1e-12);
        assert!(v.check_reverse_concave(4, &lp(3.0), 1.0, 1, 1).is_err());
    }

    #[test]
    fn descent_improves_on_the_trivial_split() {
        let f = centered(&random_function(5, 0, &mut trial_rng(3, 1, 0), false));
        let (trivial, best) = split_upper_bound(&f, 1.5, 300);
        assert!(best < trivial);
        assert!((trivial - grad_norm(&f, &lp(1.5)).unwrap()).abs() < 1e-12 * trivial);
    }

    #[test]
    fn translate_identity_for_the_split() {
        let w = CubeFunction::walsh(3, subset(&[1])).unwrap();
        let h = translate(&w, 1).unwrap();
        for x in 0..8usize {
            assert_eq!(h.values()[x], w.values()[x ^ 1]);
        }
    }

    #[test]
    fn riesz_small_case_and_bounds() {
        let rows = riesz_table(4, 2.0, 1.0).unwrap();
        // f_1 = 1 + ω₁: ‖Δf₁‖₂ = 4 and ‖f₁‖₂ = √2
        assert!((rows[0].laplacian_ratio - 4.0 / (2f64.powf(1.5) * 2f64.sqrt())).abs() < 1e-13);
        for r in &rows {
            assert!(r.laplacian_ratio <= 1.0 + 1e-12 && r.gradient_ratio <= 1.0 + 1e-12);
        }
        for w in rows.windows(2) {
            assert!(w[1].growth <= w[0].growth + 1e-12);
        }
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..8).map(|n| (n as f64, 3.0 * (n as f64).powf(0.7))).collect();
        assert!((log_log_slope(&pts) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn moment_passes() {
        let v = Verifier::default();
        let r = v.check_moment_inequality(6, &lp(3.0), 0.5, 60, 2).unwrap();
        assert!(r.passed);
        assert!(r.worst_ratio >= 1.0 - 1e-12);
        assert!(v.check_moment_inequality(3, &lp(3.0), 1.0, 1, 2).is_err());
    }

    #[test]
    fn same_seed_same_report() {
        let v = Verifier::default();
        let a = v.check_poincare(5, &lp(2.0), 30, 11).unwrap();
        let b = Verifier { exec: crate::par::Execution::Sequential, ..v }.check_poincare(5, &lp(2.0), 30, 11).unwrap();
        assert_eq!(a, b);
    }
}
