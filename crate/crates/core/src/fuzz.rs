//! Randomized verification of every relation.
//!
//! Each relation runs `trials` independent instances. Trial `t` of relation
//! `r` draws from `Seed(root).split(r).split(t)`, so any failure can be
//! replayed from the printed seed with [`run_trial`]. Observables are GUE-like
//! Hermitian matrices, states Haar-random, λ log-uniform in [1e-3, 1e3], and
//! fixed perps random unit vectors orthogonal to ψ.
//!
//! Inequalities report the violation `bound − lhs`; identities and saturation
//! checks report an absolute residual. Either counts as a failure above
//! [`VIOLATION_TOL`].

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multi::{self, all_pairs, MultiInstance, MultiPerps, PairIndex, RemainingPairs};
use crate::pair::{self, GeneralWeights, PerpRule};
use crate::sampling::{Sampler, Seed};
use crate::state::{perp_from_vector, Observable, Perp, PureState};

pub const VIOLATION_TOL: f64 = 1e-9;

/// λ range for weighted relations.
pub const LAMBDA_LO: f64 = 1e-3;
pub const LAMBDA_HI: f64 = 1e3;

/// Relation names in run order.
pub const RELATIONS: [&str; 18] = [
    "robertson",
    "schrodinger",
    "mp1",
    "mp2",
    "ahr",
    "l1",
    "l2",
    "t3",
    "derived",
    "c1",
    "t4",
    "lemma1",
    "l0",
    "lij",
    "t7",
    "parallelogram",
    "multi-parallelogram",
    "saturation",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    pub trials: u64,
    pub dim_max: usize,
    pub n_max: usize,
    pub seed: u64,
    /// `None` runs every relation.
    pub relation: Option<String>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            trials: 1000,
            dim_max: 6,
            n_max: 4,
            seed: 0,
            relation: None,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::usage("trials must be positive"));
        }
        if self.dim_max < 2 {
            return Err(Error::usage(format!(
                "dim-max must be at least 2, got {}",
                self.dim_max
            )));
        }
        if self.n_max < 2 {
            return Err(Error::usage(format!(
                "n-max must be at least 2, got {}",
                self.n_max
            )));
        }
        if let Some(r) = &self.relation {
            if r != "all" && relation_index(r).is_none() {
                return Err(Error::usage(format!(
                    "unknown relation {r:?}; expected one of {} or all",
                    RELATIONS.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn selected(&self) -> Vec<usize> {
        match self.relation.as_deref() {
            None | Some("all") => (0..RELATIONS.len()).collect(),
            Some(r) => relation_index(r).into_iter().collect(),
        }
    }
}

fn relation_index(name: &str) -> Option<usize> {
    RELATIONS.iter().position(|r| *r == name)
}

/// Result of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// Violation or residual; a failure when above [`VIOLATION_TOL`].
    Checked(f64),
    /// Hypotheses not met on this draw (zero spread, degenerate saturating state).
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationStats {
    pub relation: &'static str,
    pub checked: u64,
    pub skipped: u64,
    pub violations: u64,
    /// Largest violation or residual seen, floored at 0.
    pub max_violation: f64,
    /// Trial index and seed of the first failure.
    pub first_failure: Option<(u64, Seed)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzSummary {
    pub config: FuzzConfig,
    pub stats: Vec<RelationStats>,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.stats.iter().all(|s| s.violations == 0)
    }

    pub fn total_violations(&self) -> u64 {
        self.stats.iter().map(|s| s.violations).sum()
    }

    pub fn max_violation(&self) -> f64 {
        self.stats
            .iter()
            .map(|s| s.max_violation)
            .fold(0.0, f64::max)
    }

    pub fn render(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "fuzz seed={} trials={} dim_max={} n_max={}",
            c.seed, c.trials, c.dim_max, c.n_max
        );
        let _ = writeln!(
            out,
            "{:<20} {:>8} {:>8} {:>10} {:>14}",
            "relation", "checked", "skipped", "violations", "max_violation"
        );
        for s in &self.stats {
            let _ = writeln!(
                out,
                "{:<20} {:>8} {:>8} {:>10} {:>14.6e}",
                s.relation, s.checked, s.skipped, s.violations, s.max_violation
            );
        }
        for s in &self.stats {
            if let Some((t, seed)) = s.first_failure {
                let _ = writeln!(
                    out,
                    "FAILURE {} trial {} seed {:#018x} (replay: --seed {} --relation {} --trials {})",
                    s.relation,
                    t,
                    seed.0,
                    c.seed,
                    s.relation,
                    t + 1
                );
            }
        }
        let _ = writeln!(
            out,
            "result: {} ({} violations, max {:.6e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.total_violations(),
            self.max_violation()
        );
        out
    }
}

/// Seed of trial `t` of relation `relation` under `root`.
pub fn trial_seed(root: u64, relation: &str, t: u64) -> Result<Seed> {
    let r = relation_index(relation)
        .ok_or_else(|| Error::usage(format!("unknown relation {relation:?}")))?;
    Ok(Seed(root).split(r as u64).split(t))
}

pub fn run(config: &FuzzConfig) -> Result<FuzzSummary> {
    config.validate()?;
    let mut stats = Vec::new();
    for r in config.selected() {
        let name = RELATIONS[r];
        let mut s = RelationStats {
            relation: name,
            checked: 0,
            skipped: 0,
            violations: 0,
            max_violation: 0.0,
            first_failure: None,
        };
        for t in 0..config.trials {
            let seed = Seed(config.seed).split(r as u64).split(t);
            // A numeric breakdown is recorded as a failure, not an abort.
            let outcome = match run_trial(name, seed, config.dim_max, config.n_max) {
                Err(Error::Numeric(_)) => Outcome::Checked(f64::NAN),
                other => other?,
            };
            match outcome {
                Outcome::Skipped => s.skipped += 1,
                Outcome::Checked(v) => {
                    s.checked += 1;
                    // NaN counts as a failure.
                    if !(v <= VIOLATION_TOL) {
                        s.violations += 1;
                        s.first_failure.get_or_insert((t, seed));
                    }
                    if v.is_nan() {
                        s.max_violation = f64::NAN;
                    } else if !s.max_violation.is_nan() {
                        s.max_violation = s.max_violation.max(v);
                    }
                }
            }
        }
        stats.push(s);
    }
    Ok(FuzzSummary {
        config: config.clone(),
        stats,
    })
}

/// A random unit vector orthogonal to ψ.
pub fn random_perp(rng: &mut Sampler, psi: &PureState) -> Result<Perp> {
    loop {
        let v = rng.state(psi.dim());
        let p = perp_from_vector(v.amplitudes(), psi, "draw parallel to the state")?;
        if !p.is_degenerate() {
            return Ok(p);
        }
    }
}

/// Random pair instance.
pub struct PairCase {
    pub a: Observable,
    pub b: Observable,
    pub psi: PureState,
    pub lambda: f64,
    pub perps: [Perp; 2],
}

pub fn pair_case(rng: &mut Sampler, dim_max: usize) -> Result<PairCase> {
    let d = rng.index(2, dim_max);
    let a = rng.hermitian(d).with_name("A");
    let b = rng.hermitian(d).with_name("B");
    let psi = rng.state(d);
    let lambda = rng.log_uniform(LAMBDA_LO, LAMBDA_HI);
    let perps = [random_perp(rng, &psi)?, random_perp(rng, &psi)?];
    Ok(PairCase {
        a,
        b,
        psi,
        lambda,
        perps,
    })
}

pub fn multi_case(
    rng: &mut Sampler,
    dim_max: usize,
    n_max: usize,
) -> Result<(MultiInstance, Perp)> {
    let d = rng.index(2, dim_max);
    let n = rng.index(2, n_max);
    let obs = (0..n)
        .map(|k| rng.hermitian(d).with_name(format!("A{}", k + 1)))
        .collect();
    let psi = rng.state(d);
    let weights = (0..n)
        .map(|_| rng.log_uniform(LAMBDA_LO, LAMBDA_HI))
        .collect();
    let perp = random_perp(rng, &psi)?;
    Ok((MultiInstance::new(obs, psi, weights)?, perp))
}

fn violation(r: &crate::BoundReport) -> Outcome {
    Outcome::Checked((-r.slack).max(0.0))
}

/// Precondition failures mean the draw does not meet the relation's hypotheses.
fn or_skip(r: Result<crate::BoundReport>) -> Result<Outcome> {
    match r {
        Ok(r) => Ok(violation(&r)),
        Err(Error::Precondition(_)) => Ok(Outcome::Skipped),
        Err(e) => Err(e),
    }
}

/// Runs one trial of `relation` from `seed`.
pub fn run_trial(relation: &str, seed: Seed, dim_max: usize, n_max: usize) -> Result<Outcome> {
    let mut rng = seed.rng();
    if matches!(
        relation,
        "lemma1" | "l0" | "lij" | "t7" | "multi-parallelogram"
    ) {
        let (m, perp) = multi_case(&mut rng, dim_max, n_max)?;
        return match relation {
            "lemma1" => Ok(violation(&multi::lemma1(&m)?)),
            "l0" => Ok(violation(&multi::l0(&m, &perp)?)),
            "lij" => {
                let pairs = all_pairs(m.n());
                let p = pairs[rng.index(0, pairs.len() - 1)];
                let p = PairIndex::one_based(p.i() + 1, p.j() + 1, m.n())?;
                Ok(violation(&multi::lij(
                    &m,
                    p,
                    &perp,
                    RemainingPairs::AllOthers,
                )?))
            }
            "t7" => {
                let perps = if rng.uniform() < 0.5 {
                    MultiPerps::Default
                } else {
                    MultiPerps::Fixed(perp)
                };
                Ok(violation(&multi::theorem7(&m, &perps)?))
            }
            _ => Ok(Outcome::Checked(multi::multi_parallelogram_residual(&m)?)),
        };
    }
    let c = pair_case(&mut rng, dim_max)?;
    let (a, b, psi, lambda) = (&c.a, &c.b, &c.psi, c.lambda);
    let [u1, u2] = &c.perps;
    match relation {
        "robertson" => Ok(violation(&pair::robertson(a, b, psi)?)),
        "schrodinger" => Ok(violation(&pair::schrodinger(a, b, psi)?)),
        "mp1" => Ok(violation(&pair::mp1(a, b, psi, u1)?)),
        "mp2" => Ok(violation(&pair::mp2(a, b, psi)?)),
        "ahr" => or_skip(pair::amended_hr(a, b, psi, u1)),
        "l1" => Ok(violation(&pair::l1(a, b, psi, lambda, u1, u2)?)),
        "l2" => Ok(violation(&pair::l2(a, b, psi, lambda, u1)?)),
        "t3" => Ok(violation(&pair::theorem3(a, b, psi, lambda, (u1, u2), u1)?)),
        "derived" => {
            let l1 = rng.log_uniform(1.0, LAMBDA_HI).max(1.0 + 1e-6);
            let l2 = rng.log_uniform(LAMBDA_LO, 1.0).min(1.0 - 1e-6);
            let k = if rng.uniform() < 0.5 { 1 } else { 2 };
            let rule = if rng.uniform() < 0.5 {
                PerpRule::Saturating
            } else {
                PerpRule::Fixed(u1.clone())
            };
            Ok(violation(&pair::derived_sum_bound(
                a, b, psi, l1, l2, k, &rule,
            )?))
        }
        "c1" => {
            let grid: Vec<f64> = (0..8)
                .map(|_| rng.log_uniform(LAMBDA_LO, LAMBDA_HI))
                .collect();
            Ok(violation(&pair::corollary1(a, b, psi, u1, &grid)?))
        }
        "t4" => {
            let w = GeneralWeights::new(
                rng.log_uniform(LAMBDA_LO, LAMBDA_HI),
                rng.log_uniform(LAMBDA_LO, LAMBDA_HI),
            )?;
            Ok(violation(&pair::theorem4(a, b, psi, w, u1)?))
        }
        "parallelogram" => {
            let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * rng.uniform());
            Ok(Outcome::Checked(pair::parallelogram_residual(
                a, b, psi, lambda, phase,
            )?))
        }
        "saturation" => {
            let (p1, p2) = pair::l1_saturating_perps(a, b, psi, lambda)?;
            let p = pair::l2_saturating_perp(a, b, psi, lambda)?;
            if p1.is_degenerate() || p2.is_degenerate() || p.is_degenerate() {
                return Ok(Outcome::Skipped);
            }
            let s1 = pair::l1(a, b, psi, lambda, &p1, &p2)?.slack.abs();
            let s2 = pair::l2(a, b, psi, lambda, &p)?.slack.abs();
            Ok(Outcome::Checked(s1.max(s2)))
        }
        other => Err(Error::usage(format!("unknown relation {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(relation: Option<&str>, trials: u64) -> FuzzConfig {
        FuzzConfig {
            trials,
            dim_max: 4,
            n_max: 4,
            seed: 42,
            relation: relation.map(String::from),
        }
    }

    #[test]
    fn all_relations_pass() {
        let s = run(&small(None, 50)).unwrap();
        assert_eq!(s.stats.len(), RELATIONS.len());
        assert!(s.passed(), "{}", s.render());
        for r in &s.stats {
            assert_eq!(r.checked + r.skipped, 50);
            assert!(r.checked > 0, "{} never checked", r.relation);
        }
    }

    #[test]
    fn deterministic() {
        let a = run(&small(None, 10)).unwrap().render();
        let b = run(&small(None, 10)).unwrap().render();
        assert_eq!(a, b);
        let c = run(&FuzzConfig {
            seed: 43,
            ..small(None, 10)
        })
        .unwrap()
        .render();
        assert_ne!(a, c);
    }

    #[test]
    fn usage_errors() {
        assert!(run(&small(None, 0)).is_err());
        assert!(run(&small(Some("nope"), 5)).is_err());
        assert!(run(&FuzzConfig {
            dim_max: 1,
            ..small(None, 5)
        })
        .is_err());
        assert_eq!(
            run(&small(Some("all"), 2)).unwrap().stats.len(),
            RELATIONS.len()
        );
    }

    #[test]
    fn replay_matches() {
        let cfg = small(Some("l2"), 5);
        let seed = trial_seed(cfg.seed, "l2", 3).unwrap();
        let a = run_trial("l2", seed, cfg.dim_max, cfg.n_max).unwrap();
        assert_eq!(a, run_trial("l2", seed, cfg.dim_max, cfg.n_max).unwrap());
    }

    #[test]
    fn perps_are_orthogonal() {
        let mut rng = Seed(3).rng();
        for _ in 0..100 {
            let psi = rng.state(5);
            let u = random_perp(&mut rng, &psi).unwrap();
            let u = u.state().unwrap();
            assert!(psi.overlap(u).unwrap().norm() < 1e-12);
        }
    }
}
