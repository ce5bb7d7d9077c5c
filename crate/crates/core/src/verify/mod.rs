//! Instance checks for each inequality. A checker evaluates a deterministic
//! corpus first, then seeded random trials, and condenses everything into a
//! [`Report`] whose `worst_ratio` is compared against `bound_constant`.

mod cube_checks;
mod ensemble;
mod operators;
mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Result};
use crate::norms::FunctionSpace;
use crate::par::Execution;

pub use cube_checks::{
    fractional_ratio, moment_ratio, partial_poincare_parts, poincare_ratio, reverse_convex_ratio, riesz_table,
    semigroup_ratio, RieszRow,
};
pub use ensemble::{car_corpus, cube_corpus, random_car, random_function, random_operator};
pub use operators::{decomposition_bound_car, gradient_spectrum};
pub use search::{extremal_search, Objective, SearchResult};

/// Additive slack allowed on every inequality.
pub const SLACK: f64 = 1e-9;
/// Tolerance for identities computed exactly up to rounding.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for identities that go through quadrature.
pub const QUADRATURE_TOL: f64 = 1e-7;

pub const MAX_CUBE_SITES: usize = 12;
pub const MAX_DENSE_SITES: usize = 6;

/// Trial streams; checkers that draw the same functions share a stream.
pub(crate) const STREAM_CUBE: u64 = 1;
pub(crate) const STREAM_SETS: u64 = 2;
pub(crate) const STREAM_CAR: u64 = 3;
pub(crate) const STREAM_MATRIX: u64 = 4;
pub(crate) const STREAM_SEARCH: u64 = 5;

/// Stable checker ids with the inequality each one tests.
pub const THEOREM_IDS: [(&str, &str); 14] = [
    ("poincare", "||f - Ef||_E <= (pi/4) K_E || |grad f| ||_E"),
    ("semigroup", "||f - cos^N(t0) f||_E <= (t0/2) K_E || |grad f| ||_E"),
    ("fractional", "||Lap^a f||_E <= K_a K_E || |grad f| ||_E, 0 < a < 1/2 (a = 1/2 report only)"),
    ("exponential", "E exp|f - Ef| <= 2 E exp((pi^2/32)|grad f|^2), and the Lap^a variant"),
    ("concentration", "P{|f - Ef| > t} <= 2 exp(-8 t^2 / (pi^2 || |grad f| ||_inf^2)), and the Lap^a variant"),
    ("reverse-convex", "|| |grad f| ||_E <= k_b ||Lap^b f||_E for 2-convex E, b > 1/2"),
    ("reverse-concave", "inf over grad splits g + h of ||g||_E + ||h o flip||_E <= k_b K_E*^2 ||Lap^b f||_E"),
    ("riesz", "growth of || |grad f_n| ||_p / ||Lap^b f_n||_p along Riesz products"),
    ("moment", "||Lap^b f||_E <= 4 ||f||_E^(1-b) ||Lap f||_E^b"),
    ("lemma53", "square functions of S_j = P_j Pi_j(S) are dominated by ||S||_{C_E}"),
    ("car-main", "||T - tau(T)||_{C_E} <= (pi/2) K_E || |grad_s T| ||_{C_E}, and the N'^a variant"),
    ("car-concentration", "exponential integrability and spectral tails of |T - tau(T)| on the CAR algebra"),
    ("car-reverse", "|| |grad_s T| ||_{C_E} <= 2 k_b ||N'^b T||_{C_E}, and the split bound for 2-concave E"),
    ("appendix", "||V_J f||_E <= (pi/4) K_E || |grad_J f| ||_E and ||f||_p <= C sqrt(p) || |grad_J f| ||_p + ||P_J' f||_p"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// No reference constant is available; the ratio is reported only.
    Informational,
    /// Only an upper bound of the left side was found and it exceeds the bound.
    Inconclusive,
}

impl Verdict {
    pub fn fails_run(self) -> bool {
        self == Verdict::Fail
    }
}

/// Worst-case input: `terms` are `(index, re, im)` in the named basis
/// (`walsh` masks, `car` Q'-subsets or `pauli` words).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub basis: String,
    pub terms: Vec<(u64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub theorem_id: String,
    pub params: BTreeMap<String, Value>,
    pub instances: usize,
    pub worst_ratio: f64,
    pub bound_constant: f64,
    pub passed: bool,
    pub tol: f64,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
    pub seed: u64,
    pub version: String,
    pub verdict: Verdict,
    pub details: BTreeMap<String, f64>,
}

impl Report {
    pub fn fails_run(&self) -> bool {
        self.verdict.fails_run()
    }
}

/// JSON cannot carry non-finite numbers; they are clamped to ±f64::MAX.
pub(crate) fn finite(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        f64::MAX
    } else if x == f64::NEG_INFINITY {
        -f64::MAX
    } else {
        x
    }
}

/// How a tally turns into a verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Mode {
    /// Pass or fail against the constant; upper-bound-only parts may only
    /// produce `Inconclusive`.
    Checked(f64),
    /// Report only, optionally against a reference constant.
    Informational(Option<f64>),
}

pub(crate) enum Outcome {
    Skip(&'static str),
    Ratio {
        ratio: f64,
        /// Largest ratio among parts that are proper evaluations rather than
        /// upper bounds of an infimum.
        strict: f64,
        parts: Vec<(&'static str, f64)>,
    },
}

impl Outcome {
    pub(crate) fn strict(ratio: f64, parts: Vec<(&'static str, f64)>) -> Self {
        Outcome::Ratio { ratio, strict: ratio, parts }
    }
}

/// Converts a numerator and denominator into a ratio. 0/0 is degenerate and
/// skipped; anything else over 0 is infinite.
pub(crate) fn ratio_of(num: f64, den: f64, scale: f64) -> Option<f64> {
    let tiny = 1e-13 * scale;
    if den <= tiny {
        if num <= 1e-11 * scale {
            None
        } else {
            Some(f64::INFINITY)
        }
    } else {
        Some(num / den)
    }
}

pub(crate) trait AsWitness {
    fn witness(&self, label: String) -> Witness;
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Tally {
    pub instances: usize,
    pub skipped: BTreeMap<&'static str, usize>,
    pub worst: Option<f64>,
    pub strict_worst: f64,
    pub witness: Option<Witness>,
    pub details: BTreeMap<String, f64>,
    pub corpus_failed: bool,
}

impl Tally {
    /// Folds one outcome; returns true if it became the new worst.
    fn push(&mut self, o: Outcome) -> bool {
        self.instances += 1;
        match o {
            Outcome::Skip(why) => {
                *self.skipped.entry(why).or_default() += 1;
                false
            }
            Outcome::Ratio { ratio, strict, parts } => {
                let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
                for (k, v) in parts {
                    let e = self.details.entry(k.to_string()).or_insert(f64::NEG_INFINITY);
                    *e = e.max(v);
                }
                self.strict_worst = self.strict_worst.max(if strict.is_nan() { f64::INFINITY } else { strict });
                if self.worst.is_none_or(|w| ratio > w) {
                    self.worst = Some(ratio);
                    return true;
                }
                false
            }
        }
    }
}

/// Knobs shared by all checkers.
#[derive(Debug, Clone, Copy)]
pub struct Verifier {
    /// The universal constant C of the non-sharp Khintchine estimates.
    pub c: f64,
    pub exec: Execution,
    /// The exponent used by the secondary parts of the exponential and
    /// concentration checks.
    pub alpha: f64,
    /// Subgradient iterations for split upper bounds on the cube.
    pub descent_iterations: usize,
    /// Additive slack on every inequality.
    pub slack: f64,
}

impl Default for Verifier {
    fn default() -> Self {
        Self {
            c: 1.0,
            exec: Execution::default(),
            alpha: 0.25,
            descent_iterations: 500,
            slack: SLACK,
        }
    }
}

/// Everything needed to run a checker by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub theorem: String,
    pub n: usize,
    pub space: FunctionSpace,
    pub trials: usize,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub theta0: f64,
    pub j_samples: usize,
    pub t_grid: Vec<f64>,
    pub n_max: usize,
}

impl Request {
    pub fn new(theorem: &str) -> Self {
        Self {
            theorem: theorem.to_string(),
            n: 6,
            space: FunctionSpace::Lp(2.0),
            trials: 200,
            seed: 0,
            alpha: 0.25,
            beta: 0.75,
            theta0: 1.0,
            j_samples: 4,
            t_grid: Vec::new(),
            n_max: 12,
        }
    }
}

pub fn default_t_grid(theorem: &str) -> Vec<f64> {
    let (step, count) = if theorem == "car-concentration" { (0.25, 12) } else { (0.1, 10) };
    (1..=count).map(|k| step * k as f64).collect()
}

pub(crate) fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

impl Verifier {
    pub fn run(&self, r: &Request) -> Result<Report> {
        let grid = if r.t_grid.is_empty() { default_t_grid(&r.theorem) } else { r.t_grid.clone() };
        let sp = &r.space;
        match r.theorem.as_str() {
            "poincare" => self.check_poincare(r.n, sp, r.trials, r.seed),
            "semigroup" => self.check_semigroup_difference(r.n, sp, r.theta0, r.trials, r.seed),
            "fractional" => self.check_fractional(r.n, sp, r.alpha, r.trials, r.seed),
            "exponential" => self.check_exponential(r.n, r.trials, r.seed),
            "concentration" => self.check_concentration(r.n, r.trials, &grid, r.seed),
            "reverse-convex" => self.check_reverse_convex(r.n, sp, r.beta, r.trials, r.seed),
            "reverse-concave" => self.check_reverse_concave(r.n, sp, r.beta, r.trials, r.seed),
            "riesz" => {
                let p = sp.exponent().ok_or_else(|| invalid("the Riesz growth check needs an L^p space"))?;
                self.check_riesz_growth(r.n_max, p, r.beta)
            }
            "moment" => self.check_moment_inequality(r.n, sp, r.beta, r.trials, r.seed),
            "lemma53" => self.check_lemma53(r.n, sp, r.trials, r.seed),
            "car-main" => self.check_car_main(r.n, sp, r.trials, r.seed),
            "car-concentration" => self.check_car_concentration(r.n, &grid, r.trials, r.seed),
            "car-reverse" => self.check_car_reverse(r.n, sp, r.beta, r.trials, r.seed),
            "appendix" => self.check_appendix_partial(r.n, sp, r.j_samples, r.trials, r.seed),
            other => Err(invalid(format!("unknown theorem id {other:?}"))),
        }
    }

    /// Evaluates the corpus, then the trials. A corpus violation of `limit`
    /// stops before any trial runs.
    pub(crate) fn tally<I: AsWitness + Send>(
        &self,
        corpus: Vec<(String, I)>,
        trials: usize,
        generate: impl Fn(usize) -> I + Sync,
        eval: impl Fn(&I) -> Result<Outcome> + Sync,
        limit: f64,
    ) -> Result<Tally> {
        let mut t = Tally::default();
        for (label, item) in &corpus {
            if t.push(eval(item)?) {
                t.witness = Some(item.witness(format!("corpus:{label}")));
            }
        }
        if t.worst.is_some_and(|w| w > limit) {
            t.corpus_failed = true;
            return Ok(t);
        }
        let outcomes = self.exec.map(trials, |i| eval(&generate(i)));
        let mut worst_trial = None;
        for (i, o) in outcomes.into_iter().enumerate() {
            if t.push(o?) {
                worst_trial = Some(i);
            }
        }
        if let Some(i) = worst_trial {
            t.witness = Some(generate(i).witness(format!("trial:{i}")));
        }
        Ok(t)
    }
}

impl Verifier {
    pub(crate) fn build_report(
        &self,
        theorem_id: &str,
        params: BTreeMap<String, Value>,
        tally: Tally,
        mode: Mode,
        seed: u64,
        notes: Vec<String>,
    ) -> Report {
        build_report(theorem_id, params, tally, mode, seed, notes, self.slack)
    }
}

#[allow(clippy::too_many_arguments)]
fn build_report(
    theorem_id: &str,
    params: BTreeMap<String, Value>,
    tally: Tally,
    mode: Mode,
    seed: u64,
    mut notes: Vec<String>,
    slack: f64,
) -> Report {
    let worst = finite(tally.worst.unwrap_or(0.0));
    let (bound, verdict) = match mode {
        Mode::Checked(b) => {
            let v = if worst <= b + slack {
                Verdict::Pass
            } else if tally.strict_worst > b + slack {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            };
            (b, v)
        }
        Mode::Informational(b) => (b.unwrap_or(worst), Verdict::Informational),
    };
    if let Mode::Informational(None) = mode {
        notes.push("no reference constant; bound_constant echoes the observed ratio".into());
    }
    if tally.corpus_failed {
        notes.push("corpus violation; random trials were not run".into());
    }
    for (why, count) in &tally.skipped {
        notes.push(format!("{count} instance(s) skipped: {why}"));
    }
    let details = tally.details.into_iter().map(|(k, v)| (k, finite(v))).collect();
    Report {
        theorem_id: theorem_id.to_string(),
        params,
        instances: tally.instances,
        worst_ratio: worst,
        bound_constant: finite(bound),
        passed: worst <= finite(bound) + slack,
        tol: slack,
        witness: tally.witness,
        notes,
        seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        verdict,
        details,
    }
}

pub(crate) fn check_cube_n(n: usize, cap: usize) -> Result<()> {
    if n == 0 || n > cap {
        return Err(invalid(format!("n must lie in 1..={cap}, got {n}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio_of(0.0, 0.0, 1.0), None);
        assert_eq!(ratio_of(1.0, 0.0, 1.0), Some(f64::INFINITY));
        assert_eq!(ratio_of(1.0, 2.0, 1.0), Some(0.5));
        assert_eq!(finite(f64::INFINITY), f64::MAX);
        assert_eq!(finite(f64::NAN), f64::MAX);
    }

    #[test]
    fn verdict_rules() {
        let mut t = Tally::default();
        t.push(Outcome::Ratio { ratio: 2.0, strict: 0.5, parts: vec![] });
        let r = build_report("x", params(&[]), t.clone(), Mode::Checked(1.0), 0, vec![], SLACK);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(!r.passed && !r.fails_run());
        t.push(Outcome::strict(3.0, vec![]));
        let r = build_report("x", params(&[]), t.clone(), Mode::Checked(1.0), 0, vec![], SLACK);
        assert_eq!(r.verdict, Verdict::Fail);
        let r = build_report("x", params(&[]), t, Mode::Informational(None), 0, vec![], SLACK);
        assert!(r.passed && r.verdict == Verdict::Informational);
        assert_eq!(r.bound_constant, 3.0);
    }

    #[test]
    fn tally_keeps_first_maximum() {
        let mut t = Tally::default();
        assert!(t.push(Outcome::strict(1.0, vec![("a", 1.0)])));
        t.witness = Some(Witness { label: "first".into(), basis: "walsh".into(), terms: vec![] });
        assert!(!t.push(Outcome::strict(1.0, vec![("a", 0.5)])));
        assert!(t.push(Outcome::strict(2.0, vec![])));
        assert!(!t.push(Outcome::Skip("degenerate")));
        assert_eq!(t.instances, 4);
        assert_eq!(t.details["a"], 1.0);
    }

    #[test]
    fn every_id_dispatches() {
        let v = Verifier::default();
        for (id, _) in THEOREM_IDS {
            let mut r = Request::new(id);
            r.n = 2;
            r.trials = 2;
            r.j_samples = 1;
            r.n_max = 3;
            match id {
                "reverse-concave" => r.space = FunctionSpace::Lp(1.5),
                "reverse-convex" | "lemma53" | "car-reverse" => r.space = FunctionSpace::Lp(4.0),
                _ => {}
            }
            let rep = v.run(&r).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(rep.theorem_id, id);
        }
        assert!(v.run(&Request::new("nope")).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let v = Verifier::default();
        let mut r = Request::new("poincare");
        r.n = 3;
        r.trials = 5;
        let rep = v.run(&r).unwrap();
        let s = serde_json::to_string(&rep).unwrap();
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, rep);
    }
}
