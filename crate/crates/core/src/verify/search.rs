//! Best-effort search for functions that push a ratio toward its sharp
//! constant.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::cube_checks::{fractional_ratio, moment_ratio, poincare_ratio, reverse_convex_ratio, semigroup_ratio};
use super::ensemble::random_function;
use super::{check_cube_n, AsWitness, Witness, MAX_CUBE_SITES, STREAM_SEARCH};
use crate::cube::CubeFunction;
use crate::error::{invalid, Result};
use crate::norms::FunctionSpace;
use crate::par::trial_rng;
use crate::C64;

/// Ratio functionals the search can maximize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Poincare,
    Semigroup(f64),
    Fractional(f64),
    Moment(f64),
    ReverseConvex(f64),
}

impl Objective {
    fn eval(&self, f: &CubeFunction, sp: &FunctionSpace) -> Result<Option<f64>> {
        match *self {
            Objective::Poincare => poincare_ratio(f, sp),
            Objective::Semigroup(t) => semigroup_ratio(f, sp, t),
            Objective::Fractional(a) => fractional_ratio(f, sp, a),
            Objective::Moment(b) => moment_ratio(f, sp, b),
            Objective::ReverseConvex(b) => reverse_convex_ratio(f, sp, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_ratio: f64,
    pub evaluations: usize,
    pub witness: Witness,
}

const STARTS: usize = 4;
const INITIAL_STEP: f64 = 0.5;
const MIN_STEP: f64 = 1e-4;

/// Multi-start coordinate-perturbation ascent over real Walsh coefficients.
/// `budget` caps the number of ratio evaluations; the result is a
/// deterministic function of the arguments.
pub fn extremal_search(n: usize, sp: &FunctionSpace, objective: Objective, budget: usize, seed: u64) -> Result<SearchResult> {
    check_cube_n(n, MAX_CUBE_SITES)?;
    sp.validate()?;
    if budget == 0 {
        return Err(invalid("search budget must be positive"));
    }
    // probe once so that bad objective parameters surface as errors
    let level_one = CubeFunction::from_coefficients(
        (0..1usize << n).map(|a| C64::new(f64::from(u8::from(a.count_ones() == 1)), 0.0)).collect(),
    )?;
    let score = |f: &CubeFunction| objective.eval(f, sp).map(|r| r.unwrap_or(0.0));
    let mut best = (score(&level_one)?, level_one.clone());
    let mut evaluations = 1;
    let mut rng = trial_rng(seed, STREAM_SEARCH, 0);
    let per_start = (budget - 1) / STARTS;
    for s in 0..STARTS {
        if evaluations >= budget {
            break;
        }
        let mut x: Vec<f64> = if s == 0 {
            level_one.coeffs().iter().map(|c| c.re).collect()
        } else {
            random_function(n, s, &mut rng, true).coeffs().iter().map(|c| c.re).collect()
        };
        let build = |x: &[f64]| CubeFunction::from_coefficients(x.iter().map(|&v| C64::new(v, 0.0)).collect());
        let mut current = score(&build(&x)?)?;
        evaluations += 1;
        let mut step = INITIAL_STEP;
        let mut misses = 0;
        let stop = (evaluations + per_start).min(budget);
        while evaluations < stop && step >= MIN_STEP {
            let k = rng.gen_range(0..x.len());
            let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
            let delta: f64 = rng.sample::<f64, _>(StandardNormal) * step * scale;
            let old = x[k];
            x[k] += delta;
            let trial = score(&build(&x)?)?;
            evaluations += 1;
            if trial.is_finite() && trial > current {
                current = trial;
                misses = 0;
            } else {
                x[k] = old;
                misses += 1;
                if misses >= 2 * x.len() {
                    step /= 2.0;
                    misses = 0;
                }
            }
        }
        if current > best.0 {
            best = (current, build(&x)?);
        }
    }
    Ok(SearchResult { best_ratio: best.0, evaluations, witness: best.1.witness("search".into()) })
}
