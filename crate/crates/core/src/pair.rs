//! Two-observable uncertainty bounds.
//!
//! Every weighted bound here comes from the identity, valid for real λ ≠ 0 and |α| = 1,
//!
//! ```text
//! (1+λ)ΔA² + (1+λ⁻¹)ΔB² = ‖(Â − αB̂)ψ‖² + λ⁻¹‖(λÂ + αB̂)ψ‖²
//! ```
//!
//! by keeping one square exactly and relaxing the others with Cauchy-Schwarz
//! against a unit vector orthogonal to ψ. Perpendicular states are passed in
//! already resolved ([`Perp`]); a degenerate perp contributes a zero term and
//! is recorded in the report's flags.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, I};
use crate::optimize::{self, GridSpec};
use crate::report::{term, BoundReport};
use crate::state::{
    anticommutator_centered_expectation, centered_apply, commutator_expectation, make_perp,
    perp_from_vector, std_dev, transition, variance, Observable, Perp, PerpChoice, PureState,
};

/// |⟨[A,B]⟩| at or below which the sign rule falls back to +1.
const SIGN_TIE: f64 = 1e-12;

/// Lower limit for standard deviations and denominators in the amended
/// Heisenberg-Robertson bound.
const AHR_EPS: f64 = 1e-12;

/// Which λ values [`l2`] accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaDomain {
    /// λ > 0.
    #[default]
    Positive,
    /// Any real λ ∉ {0, −1}. For λ < 0 the λ⁻¹ Cauchy-Schwarz step flips
    /// direction, so the result is an evaluation, not a guaranteed lower bound.
    ExtendedReal,
}

/// Weights x, y of the general weighted sum xΔA² + yΔB².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralWeights {
    pub x: f64,
    pub y: f64,
}

impl GeneralWeights {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x * y * (x + y) > 0.0) {
            return Err(Error::usage(format!(
                "weights must satisfy xy(x+y) > 0, got x = {x}, y = {y}"
            )));
        }
        Ok(GeneralWeights { x, y })
    }
}

/// How the derived sum-of-variances bound picks perps at each λᵢ.
#[derive(Debug, Clone, PartialEq)]
pub enum PerpRule {
    /// The equality-case state at each λᵢ.
    Saturating,
    /// The same resolved perp at every λᵢ (and in both ℒ₁ slots).
    Fixed(Perp),
}

fn check_pair(a: &Observable, b: &Observable, psi: &PureState) -> Result<()> {
    if a.dim() != psi.dim() || b.dim() != psi.dim() {
        return Err(Error::usage(format!(
            "dimension mismatch: {} is {}, {} is {}, state is {}",
            a.name(),
            a.dim(),
            b.name(),
            b.dim(),
            psi.dim()
        )));
    }
    Ok(())
}

fn check_perp(perp: &Perp, psi: &PureState) -> Result<()> {
    if let Perp::State(u) = perp {
        if u.dim() != psi.dim() {
            return Err(Error::usage("perp state dimension mismatch"));
        }
    }
    Ok(())
}

fn check_positive_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::usage(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(())
}

fn flag(perp: &Perp, slot: &str) -> Option<String> {
    match perp {
        Perp::Degenerate(why) => Some(format!("{slot}: {why}")),
        Perp::State(_) => None,
    }
}

/// c₁·A + c₂·B as a raw matrix.
fn combo(c1: Complex64, a: &Observable, c2: Complex64, b: &Observable) -> CMatrix {
    a.matrix().scale(c1).axpy(c2, b.matrix())
}

/// |⟨ψ|X|u⟩|².
fn cs_term(x: &CMatrix, psi: &PureState, perp: &Perp) -> Result<f64> {
    Ok(transition(x, psi, perp)?.norm_sqr())
}

/// (1+λ)ΔA² + (1+λ⁻¹)ΔB².
pub fn weighted_pair_lhs(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
) -> Result<f64> {
    Ok((1.0 + lambda) * variance(a, psi)? + (1.0 + 1.0 / lambda) * variance(b, psi)?)
}

/// Sign for the ±i⟨[A,B]⟩ convention: the returned s makes s·i⟨[A,B]⟩ ≥ 0.
fn mp_sign(comm: Complex64) -> i8 {
    if comm.norm() <= SIGN_TIE || (I * comm).re >= 0.0 {
        1
    } else {
        -1
    }
}

/// Sign for the ∓2i⟨[A,B]⟩ convention of ℒ₁: s·(−2i)⟨[A,B]⟩ ≥ 0.
fn l1_sign(comm: Complex64) -> i8 {
    if comm.norm() <= SIGN_TIE || (-2.0 * I * comm).re >= 0.0 {
        1
    } else {
        -1
    }
}

/// ΔA·ΔB ≥ ½|⟨[A,B]⟩|.
pub fn robertson(a: &Observable, b: &Observable, psi: &PureState) -> Result<BoundReport> {
    check_pair(a, b, psi)?;
    let lhs = std_dev(a, psi)? * std_dev(b, psi)?;
    let comm = commutator_expectation(a, b, psi)?;
    Ok(BoundReport::new(
        "robertson",
        lhs,
        vec![term("commutator", 0.5 * comm.norm())],
    ))
}

/// ΔA²·ΔB² ≥ |½⟨[A,B]⟩|² + |½⟨{Â,B̂}⟩|².
pub fn schrodinger(a: &Observable, b: &Observable, psi: &PureState) -> Result<BoundReport> {
    check_pair(a, b, psi)?;
    let lhs = variance(a, psi)? * variance(b, psi)?;
    let comm = commutator_expectation(a, b, psi)?;
    let anti = anticommutator_centered_expectation(a, b, psi)?;
    Ok(BoundReport::new(
        "schrodinger",
        lhs,
        vec![
            term("commutator", (0.5 * comm).norm_sqr()),
            term("anticommutator", (0.5 * anti).powi(2)),
        ],
    ))
}

/// ΔA² + ΔB² ≥ s·i⟨[A,B]⟩ + |⟨ψ|A + s·iB|ψ⊥⟩|², s chosen so the first term is ≥ 0.
pub fn mp1(a: &Observable, b: &Observable, psi: &PureState, perp: &Perp) -> Result<BoundReport> {
    check_pair(a, b, psi)?;
    check_perp(perp, psi)?;
    let lhs = variance(a, psi)? + variance(b, psi)?;
    let comm = commutator_expectation(a, b, psi)?;
    let s = mp_sign(comm);
    let sf = f64::from(s);
    let x = combo(1.0.into(), a, sf * I, b);
    Ok(BoundReport::new(
        "mp1",
        lhs,
        vec![
            term("commutator", sf * (I * comm).re),
            term("cs", cs_term(&x, psi, perp)?),
        ],
    )
    .with_sign(s)
    .with_flags(flag(perp, "perp")))
}

/// The perp maximizing the Cauchy-Schwarz term of [`mp1`].
pub fn mp1_optimal_perp(a: &Observable, b: &Observable, psi: &PureState) -> Result<Perp> {
    check_pair(a, b, psi)?;
    let sf = f64::from(mp_sign(commutator_expectation(a, b, psi)?));
    make_perp(&PerpChoice::Optimal(combo(1.0.into(), a, sf * I, b)), psi)
}

/// ΔA² + ΔB² ≥ ½|⟨ψ⊥_{A+B}|A+B|ψ⟩|² with the Vaidman state of A+B.
pub fn mp2(a: &Observable, b: &Observable, psi: &PureState) -> Result<BoundReport> {
    check_pair(a, b, psi)?;
    let lhs = variance(a, psi)? + variance(b, psi)?;
    let s = Observable::sum(a, b)?;
    let perp = make_perp(&PerpChoice::Vaidman(s.clone()), psi)?;
    let t = cs_term(s.matrix(), psi, &perp)?;
    Ok(
        BoundReport::new("mp2", lhs, vec![term("vaidman_sum", 0.5 * t)])
            .with_flags(flag(&perp, "perp_sum")),
    )
}

/// ΔA·ΔB ≥ s·(i/2)⟨[A,B]⟩ / (1 − ½|⟨ψ|A/ΔA + s·iB/ΔB|ψ⊥⟩|²).
pub fn amended_hr(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    perp: &Perp,
) -> Result<BoundReport> {
    check_pair(a, b, psi)?;
    check_perp(perp, psi)?;
    let da = std_dev(a, psi)?;
    let db = std_dev(b, psi)?;
    for (o, d) in [(a, da), (b, db)] {
        if d <= AHR_EPS {
            return Err(Error::precondition(format!(
                "amended Heisenberg-Robertson bound needs a nonzero spread of {}",
                o.name()
            )));
        }
    }
    let comm = commutator_expectation(a, b, psi)?;
    let s = mp_sign(comm);
    let sf = f64::from(s);
    let numerator = sf * (0.5 * I * comm).re;
    let x = combo((1.0 / da).into(), a, sf * I / db, b);
    let denominator = 1.0 - 0.5 * cs_term(&x, psi, perp)?;
    if denominator <= AHR_EPS {
        return Err(Error::precondition(format!(
            "amended Heisenberg-Robertson denominator is not positive ({denominator:e})"
        )));
    }
    Ok(BoundReport::new(
        "amended_hr",
        da * db,
        vec![term("ratio", numerator / denominator)],
    )
    .with_sign(s)
    .with_detail("numerator", numerator)
    .with_detail("denominator", denominator)
    .with_flags(flag(perp, "perp")))
}

/// The perp maximizing the Cauchy-Schwarz term of [`amended_hr`]. Spreads
/// that vanish leave the direction undefined and give a Degenerate perp.
pub fn amended_hr_optimal_perp(a: &Observable, b: &Observable, psi: &PureState) -> Result<Perp> {
    check_pair(a, b, psi)?;
    let (da, db) = (std_dev(a, psi)?, std_dev(b, psi)?);
    if da <= AHR_EPS || db <= AHR_EPS {
        return Ok(Perp::Degenerate("zero spread".into()));
    }
    let sf = f64::from(mp_sign(commutator_expectation(a, b, psi)?));
    make_perp(
        &PerpChoice::Optimal(combo((1.0 / da).into(), a, sf * I / db, b)),
        psi,
    )
}

/// Weighted bound ℒ₁:
/// s·(−2i)⟨[A,B]⟩ + |⟨ψ|A − s·iB|ψ⊥₁⟩|² + λ⁻¹|⟨ψ|λA − s·iB|ψ⊥₂⟩|².
pub fn l1(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
    perp1: &Perp,
    perp2: &Perp,
) -> Result<BoundReport> {
    check_pair(a, b, psi)?;
    check_positive_lambda(lambda)?;
    check_perp(perp1, psi)?;
    check_perp(perp2, psi)?;
    let lhs = weighted_pair_lhs(a, b, psi, lambda)?;
    let comm = commutator_expectation(a, b, psi)?;
    let s = l1_sign(comm);
    let sf = f64::from(s);
    let x1 = combo(1.0.into(), a, -sf * I, b);
    let x2 = combo(lambda.into(), a, -sf * I, b);
    Ok(BoundReport::new(
        "l1",
        lhs,
        vec![
            term("commutator", sf * (-2.0 * I * comm).re),
            term("cs_1", cs_term(&x1, psi, perp1)?),
            term("cs_2", cs_term(&x2, psi, perp2)? / lambda),
        ],
    )
    .with_lambda(lambda)
    .with_sign(s)
    .with_flags(
        flag(perp1, "perp_1")
            .into_iter()
            .chain(flag(perp2, "perp_2")),
    ))
}

/// Equality-case perps for [`l1`]: normalized (Â + s·iB̂)ψ and (λÂ + s·iB̂)ψ,
/// with s the sign [`l1`] selects.
pub fn l1_saturating_perps(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
) -> Result<(Perp, Perp)> {
    check_pair(a, b, psi)?;
    check_positive_lambda(lambda)?;
    let sf = f64::from(l1_sign(commutator_expectation(a, b, psi)?));
    let a_hat = centered_apply(a, psi)?;
    let b_hat = centered_apply(b, psi)?;
    let v1 = a_hat.axpy(sf * I, &b_hat);
    let v2 = a_hat.scale_re(lambda).axpy(sf * I, &b_hat);
    Ok((
        perp_from_vector(&v1, psi, "(A + isB)|psi> vanishes")?,
        perp_from_vector(&v2, psi, "(lambda A + isB)|psi> vanishes")?,
    ))
}

/// Weighted bound ℒ₂: |⟨ψ|A+B|ψ⊥_{A+B}⟩|² + λ⁻¹|⟨ψ|λA − B|ψ⊥⟩|².
pub fn l2(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
    perp: &Perp,
) -> Result<BoundReport> {
    l2_in(a, b, psi, lambda, perp, LambdaDomain::Positive)
}

pub fn l2_in(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
    perp: &Perp,
    domain: LambdaDomain,
) -> Result<BoundReport> {
    check_pair(a, b, psi)?;
    check_l2_lambda(lambda, domain)?;
    check_perp(perp, psi)?;
    let lhs = weighted_pair_lhs(a, b, psi, lambda)?;
    let s = Observable::sum(a, b)?;
    let perp_sum = make_perp(&PerpChoice::Vaidman(s.clone()), psi)?;
    let x = combo(lambda.into(), a, (-1.0).into(), b);
    Ok(BoundReport::new(
        "l2",
        lhs,
        vec![
            term("vaidman_sum", cs_term(s.matrix(), psi, &perp_sum)?),
            term("cs", cs_term(&x, psi, perp)? / lambda),
        ],
    )
    .with_lambda(lambda)
    .with_flags(
        flag(&perp_sum, "perp_sum")
            .into_iter()
            .chain(flag(perp, "perp")),
    ))
}

fn check_l2_lambda(lambda: f64, domain: LambdaDomain) -> Result<()> {
    match domain {
        LambdaDomain::Positive => check_positive_lambda(lambda),
        LambdaDomain::ExtendedReal => {
            if !lambda.is_finite() || lambda == 0.0 || lambda == -1.0 {
                Err(Error::usage(format!(
                    "lambda must be real and not 0 or -1, got {lambda}"
                )))
            } else {
                Ok(())
            }
        }
    }
}

/// Equality-case perp for [`l2`]: normalized (λÂ − B̂)ψ.
pub fn l2_saturating_perp(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
) -> Result<Perp> {
    check_pair(a, b, psi)?;
    check_l2_lambda(lambda, LambdaDomain::ExtendedReal)?;
    let v = centered_apply(a, psi)?
        .scale_re(lambda)
        .axpy((-1.0).into(), &centered_apply(b, psi)?);
    perp_from_vector(&v, psi, "(lambda A - B)|psi> vanishes")
}

/// max(ℒ₁, ℒ₂); `branch` names the winner, both values are in `details`.
pub fn theorem3(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
    l1_perps: (&Perp, &Perp),
    l2_perp: &Perp,
) -> Result<BoundReport> {
    let r1 = l1(a, b, psi, lambda, l1_perps.0, l1_perps.1)?;
    let r2 = l2(a, b, psi, lambda, l2_perp)?;
    let (b1, b2) = (r1.bound, r2.bound);
    let (winner, name) = if b1 >= b2 { (r1, "l1") } else { (r2, "l2") };
    let mut report = BoundReport::new("theorem3", winner.lhs, winner.terms)
        .with_lambda(lambda)
        .with_branch(name)
        .with_flags(winner.degenerate_flags)
        .with_detail("l1", b1)
        .with_detail("l2", b2);
    report.sign_used = winner.sign_used;
    Ok(report)
}

/// ℒ₁ or ℒ₂ at one λ under a [`PerpRule`].
fn lk_at(
    k: u8,
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
    rule: &PerpRule,
) -> Result<BoundReport> {
    match (k, rule) {
        (1, PerpRule::Saturating) => {
            let (p1, p2) = l1_saturating_perps(a, b, psi, lambda)?;
            l1(a, b, psi, lambda, &p1, &p2)
        }
        (1, PerpRule::Fixed(u)) => l1(a, b, psi, lambda, u, u),
        (2, PerpRule::Saturating) => l2(a, b, psi, lambda, &l2_saturating_perp(a, b, psi, lambda)?),
        (2, PerpRule::Fixed(u)) => l2(a, b, psi, lambda, u),
        _ => Err(Error::usage(format!("bound index must be 1 or 2, got {k}"))),
    }
}

/// ΔA² + ΔB² from two weighted relations at λ₁ > 1 > λ₂ > 0:
///
/// ```text
/// (λ₁−λ₂)⁻¹ [ (1−λ₂)/(1+λ₁⁻¹)·ℒ_k(λ₁) + (λ₁−1)/(1+λ₂⁻¹)·ℒ_k(λ₂) ]
/// ```
///
/// With λ₁ = λ₂ = 1 this is the limit form ½ℒ_k(1).
pub fn derived_sum_bound(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda1: f64,
    lambda2: f64,
    k: u8,
    rule: &PerpRule,
) -> Result<BoundReport> {
    check_pair(a, b, psi)?;
    let lhs = variance(a, psi)? + variance(b, psi)?;
    let relation = format!("derived_sum_l{k}");
    if lambda1 == 1.0 && lambda2 == 1.0 {
        let r = lk_at(k, a, b, psi, 1.0, rule)?;
        let terms = r
            .terms
            .iter()
            .map(|t| term(t.label.clone(), 0.5 * t.value))
            .collect();
        return Ok(BoundReport::new(relation, lhs, terms)
            .with_branch("limit")
            .with_flags(r.degenerate_flags));
    }
    if !(lambda1 > 1.0 && 1.0 > lambda2 && lambda2 > 0.0) {
        return Err(Error::usage(format!(
            "need lambda1 > 1 > lambda2 > 0 (or both 1), got {lambda1}, {lambda2}"
        )));
    }
    let r1 = lk_at(k, a, b, psi, lambda1, rule)?;
    let r2 = lk_at(k, a, b, psi, lambda2, rule)?;
    let gap = lambda1 - lambda2;
    let c1 = (1.0 - lambda2) / (1.0 + 1.0 / lambda1) / gap;
    let c2 = (lambda1 - 1.0) / (1.0 + 1.0 / lambda2) / gap;
    Ok(BoundReport::new(
        relation,
        lhs,
        vec![
            term("at_lambda1", c1 * r1.bound),
            term("at_lambda2", c2 * r2.bound),
        ],
    )
    .with_detail("lambda1", lambda1)
    .with_detail("lambda2", lambda2)
    .with_flags(
        r1.degenerate_flags
            .into_iter()
            .map(|f| format!("lambda1 {f}"))
            .chain(
                r2.degenerate_flags
                    .into_iter()
                    .map(|f| format!("lambda2 {f}")),
            ),
    ))
}

/// ℒ₂ at weight λ evaluated on the rescaled pair A/√(1+λ), B/√(1+λ⁻¹), whose
/// weighted sum is exactly ΔA² + ΔB².
pub fn rescaled_l2(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
    perp: &Perp,
) -> Result<BoundReport> {
    check_positive_lambda(lambda)?;
    let a2 = a.scaled(1.0 / (1.0 + lambda).sqrt());
    let b2 = b.scaled(1.0 / (1.0 + 1.0 / lambda).sqrt());
    l2(&a2, &b2, psi, lambda, perp)
}

/// sup over λ of [`rescaled_l2`], scanned on `lambdas` (λ = 1 is always
/// included) and refined by golden-section search around the best grid point.
pub fn corollary1(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    perp: &Perp,
    lambdas: &[f64],
) -> Result<BoundReport> {
    check_pair(a, b, psi)?;
    if lambdas.is_empty() {
        return Err(Error::usage("lambda grid is empty"));
    }
    if let Some(bad) = lambdas.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
        return Err(Error::usage(format!(
            "lambda grid must be positive, got {bad}"
        )));
    }
    let mut grid: Vec<f64> = lambdas.to_vec();
    grid.push(1.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let at_one = rescaled_l2(a, b, psi, 1.0, perp)?;
    let scan = optimize::scan_points(|l| rescaled_l2(a, b, psi, l, perp).map(|r| r.bound), &grid)?;
    let (best_lambda, _) = scan.argmax;
    let best = rescaled_l2(a, b, psi, best_lambda, perp)?;
    let lhs = variance(a, psi)? + variance(b, psi)?;
    Ok(BoundReport::new("corollary1", lhs, best.terms)
        .with_lambda(best_lambda)
        .with_detail("lambda_one_value", at_one.bound)
        .with_flags(best.degenerate_flags))
}

/// [`corollary1`] over a [`GridSpec`].
pub fn corollary1_on_grid(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    perp: &Perp,
    grid: &GridSpec,
) -> Result<BoundReport> {
    corollary1(a, b, psi, perp, &grid.points())
}

/// xΔA² + yΔB² ≥ xy/(x+y)·ℒ₂(x/y).
pub fn theorem4(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    w: GeneralWeights,
    perp: &Perp,
) -> Result<BoundReport> {
    let w = GeneralWeights::new(w.x, w.y)?;
    let lambda = w.x / w.y;
    let r = l2_in(a, b, psi, lambda, perp, LambdaDomain::ExtendedReal)?;
    let scale = w.x * w.y / (w.x + w.y);
    let lhs = w.x * variance(a, psi)? + w.y * variance(b, psi)?;
    let terms = r
        .terms
        .iter()
        .map(|t| term(t.label.clone(), scale * t.value))
        .collect();
    Ok(BoundReport::new("theorem4", lhs, terms)
        .with_lambda(lambda)
        .with_detail("scale", scale)
        .with_flags(r.degenerate_flags))
}

/// ln n!.
fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

/// Series lower-bound candidate for 1/(1−ΔA) + exp(ΔB):
///
/// ```text
/// Σ_{n=0}^{N} [ℒ₂(r_n) / (2(r_n + 1))]ⁿ,   r_n = (n!)^{1/n},  n = 0 term = 1
/// ```
///
/// ℒ₂ is evaluated on (A, B) as given. Whether the inequality holds is not
/// assumed; read it from [`BoundReport::holds`]. The last series term is kept
/// in `details` as `last_term`.
pub fn remark1(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    perp: &Perp,
    n_max: u32,
) -> Result<BoundReport> {
    check_pair(a, b, psi)?;
    let da = std_dev(a, psi)?;
    if da >= 1.0 - 1e-9 {
        return Err(Error::precondition(format!(
            "series bound needs the spread of {} below 1, got {da}",
            a.name()
        )));
    }
    let lhs = 1.0 / (1.0 - da) + std_dev(b, psi)?.exp();
    let mut terms = vec![term("n0", 1.0)];
    let mut flags = Vec::new();
    for n in 1..=n_max {
        let r = (ln_factorial(n) / f64::from(n)).exp();
        let l2r = l2(a, b, psi, r, perp)?;
        if n == 1 {
            flags.extend(l2r.degenerate_flags.iter().cloned());
        }
        let base = l2r.bound / (2.0 * (r + 1.0));
        let value = base.powi(n as i32);
        if !value.is_finite() {
            return Err(Error::numeric(format!("series term {n} is not finite")));
        }
        terms.push(term(format!("n{n}"), value));
    }
    let last = terms.last().map_or(1.0, |t| t.value);
    let report = BoundReport::new("remark1", lhs, terms)
        .with_detail("last_term", last)
        .with_flags(flags);
    let valid = if report.holds() { 1.0 } else { 0.0 };
    Ok(report.with_detail("holds", valid))
}

/// |(1+λ)ΔA² + (1+λ⁻¹)ΔB² − ‖(Â−αB̂)ψ‖² − λ⁻¹‖(λÂ+αB̂)ψ‖²|.
pub fn parallelogram_residual(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
    alpha: Complex64,
) -> Result<f64> {
    check_pair(a, b, psi)?;
    if ((alpha.norm()) - 1.0).abs() > 1e-10 {
        return Err(Error::usage(format!(
            "alpha must have modulus 1, got |alpha| = {}",
            alpha.norm()
        )));
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::usage("lambda must be a nonzero real"));
    }
    let lhs = weighted_pair_lhs(a, b, psi, lambda)?;
    let a_hat = centered_apply(a, psi)?;
    let b_hat = centered_apply(b, psi)?;
    let first = a_hat.axpy(-alpha, &b_hat).norm_sqr();
    let second = a_hat.scale_re(lambda).axpy(alpha, &b_hat).norm_sqr() / lambda;
    Ok((lhs - first - second).abs())
}
