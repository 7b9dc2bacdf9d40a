//! Sum uncertainty relations for n ≥ 2 observables.
//!
//! All bounds rest on the exact identity
//!
//! ```text
//! Σ_{i,j} (λᵢ/λⱼ) ΔAᵢ² = ‖Ŝψ‖² + Σ_{i<j} ‖(√(λᵢ/λⱼ)Âᵢ − √(λⱼ/λᵢ)Âⱼ)ψ‖²,   S = Σᵢ Aᵢ
//! ```
//!
//! Pairwise terms kept exact are evaluated as squared norms directly. The
//! weighted bounds and the identity residual run in double-double arithmetic
//! (see [`crate::dd`]) and report a slack taken at that precision.

use crate::error::{Error, Result};
use crate::report::{term, BoundReport, Term};
use twofloat::TwoFloat;

use crate::dd::{dd, recip, Dc, DcVec};
use crate::state::{make_perp, transition, variance, Observable, Perp, PerpChoice, PureState};

/// Observables A₁…A_n, a state, and positive weights λ₁…λ_n.
#[derive(Debug, Clone)]
pub struct MultiInstance {
    observables: Vec<Observable>,
    psi: PureState,
    weights: Vec<f64>,
}

impl MultiInstance {
    pub fn new(observables: Vec<Observable>, psi: PureState, weights: Vec<f64>) -> Result<Self> {
        if observables.len() < 2 {
            return Err(Error::usage("need at least two observables"));
        }
        if weights.len() != observables.len() {
            return Err(Error::usage(format!(
                "{} weights for {} observables",
                weights.len(),
                observables.len()
            )));
        }
        if let Some(o) = observables.iter().find(|o| o.dim() != psi.dim()) {
            return Err(Error::usage(format!(
                "observable {} has dimension {} but the state has dimension {}",
                o.name(),
                o.dim(),
                psi.dim()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::usage(format!("weights must be positive, got {w}")));
        }
        Ok(MultiInstance {
            observables,
            psi,
            weights,
        })
    }

    /// Equal weights.
    pub fn unweighted(observables: Vec<Observable>, psi: PureState) -> Result<Self> {
        let n = observables.len();
        Self::new(observables, psi, vec![1.0; n])
    }

    pub fn n(&self) -> usize {
        self.observables.len()
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn psi(&self) -> &PureState {
        &self.psi
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// S = Σᵢ Aᵢ.
    pub fn sum_observable(&self) -> Observable {
        let terms: Vec<(f64, &Observable)> = self.observables.iter().map(|o| (1.0, o)).collect();
        Observable::combination("S", &terms).expect("dimensions checked on construction")
    }

    /// Double-double view: ψ renormalized, Âᵢψ, ΔAᵢ² = ‖Aᵢψ‖² − ⟨Aᵢ⟩², weights.
    fn exact(&self) -> Exact {
        let raw = DcVec::from_cvector(self.psi.amplitudes());
        let psi = raw.normalized();
        let mut hats = Vec::with_capacity(self.n());
        let mut vars = Vec::with_capacity(self.n());
        for o in &self.observables {
            let a = DcVec::apply(o.matrix(), &psi);
            let mean = psi.inner(&a).re;
            vars.push(a.norm_sqr() - mean * mean);
            hats.push(a.sub_scaled(
                Dc {
                    re: mean,
                    im: dd(0.0),
                },
                &psi,
            ));
        }
        Exact {
            psi,
            hats,
            vars,
            weights: self.weights.iter().map(|&w| dd(w)).collect(),
        }
    }

    /// (√(λᵢ/λⱼ)Aᵢ − √(λⱼ/λᵢ)Aⱼ) as a matrix (0-based indices).
    fn pair_operator(&self, p: PairIndex) -> Observable {
        let r = (self.weights[p.i] / self.weights[p.j]).sqrt();
        Observable::combination(
            format!("pair({},{})", p.i + 1, p.j + 1),
            &[
                (r, &self.observables[p.i]),
                (-1.0 / r, &self.observables[p.j]),
            ],
        )
        .expect("dimensions checked on construction")
    }
}

struct Exact {
    psi: DcVec,
    hats: Vec<DcVec>,
    vars: Vec<TwoFloat>,
    weights: Vec<TwoFloat>,
}

impl Exact {
    fn lhs(&self) -> TwoFloat {
        let inv_sum = self.weights.iter().fold(dd(0.0), |acc, &w| acc + recip(w));
        self.weights
            .iter()
            .zip(&self.vars)
            .fold(dd(0.0), |acc, (&w, &v)| acc + w * inv_sum * v)
    }

    fn s_hat(&self) -> DcVec {
        self.hats
            .iter()
            .fold(DcVec::zeros(self.psi.0.len()), |acc, h| acc.add(h))
    }

    /// (√(λᵢ/λⱼ)Âᵢ − √(λⱼ/λᵢ)Âⱼ)ψ.
    fn pair_vector(&self, p: PairIndex) -> DcVec {
        let r = (self.weights[p.i] * recip(self.weights[p.j])).sqrt();
        let one = Dc {
            re: recip(r),
            im: dd(0.0),
        };
        self.hats[p.i].scale(r).sub_scaled(one, &self.hats[p.j])
    }

    /// |⟨v|u⟩|² with u re-orthogonalized against ψ and renormalized, so the
    /// Cauchy-Schwarz relaxation of ‖v‖² holds to double-double precision.
    /// For v = X̂ψ this equals |⟨ψ|X|u⟩|².
    fn relaxed(&self, v: &DcVec, perp: &Perp) -> TwoFloat {
        let Perp::State(u) = perp else {
            return dd(0.0);
        };
        let u = DcVec::from_cvector(u.amplitudes());
        let u = u.sub_scaled(self.psi.inner(&u), &self.psi).normalized();
        v.inner(&u).norm_sqr()
    }
}

/// Assembles a report whose slack is taken in double-double precision.
fn exact_report(relation: String, lhs: TwoFloat, terms: Vec<(String, TwoFloat)>) -> BoundReport {
    let total = terms.iter().fold(dd(0.0), |acc, (_, v)| acc + *v);
    let slack = f64::from(lhs - total);
    BoundReport::new(
        relation,
        f64::from(lhs),
        terms
            .into_iter()
            .map(|(l, v)| term(l, f64::from(v)))
            .collect(),
    )
    .with_slack(slack)
}

/// Ordered pair i < j, stored 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairIndex {
    i: usize,
    j: usize,
}

impl PairIndex {
    /// From 1-based indices with 1 ≤ i < j ≤ n.
    pub fn one_based(i: usize, j: usize, n: usize) -> Result<Self> {
        if !(1 <= i && i < j && j <= n) {
            return Err(Error::usage(format!(
                "pair ({i},{j}) needs 1 <= i < j <= {n}"
            )));
        }
        Ok(PairIndex { i: i - 1, j: j - 1 })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    fn label(&self) -> String {
        format!("pair_{}_{}", self.i + 1, self.j + 1)
    }

    fn touches(&self, other: &PairIndex) -> bool {
        self.i == other.i || self.i == other.j || self.j == other.i || self.j == other.j
    }
}

/// All pairs i < j for n observables.
pub fn all_pairs(n: usize) -> Vec<PairIndex> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| PairIndex { i, j }))
        .collect()
}

/// Which remaining pairs the single-pair bounds keep exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RemainingPairs {
    /// Every pair other than the selected one. This is the reading under which
    /// the bound is a rearrangement of the exact identity.
    #[default]
    AllOthers,
    /// Only pairs sharing no index with the selected one. Exposed for
    /// comparison; no inequality is asserted for it beyond what follows from
    /// dropping nonnegative terms.
    Disjoint,
}

/// Σ_{i,j} (λᵢ/λⱼ) ΔAᵢ², diagonal included.
pub fn weighted_lhs(m: &MultiInstance) -> Result<f64> {
    let v = f64::from(m.exact().lhs());
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::numeric("non-finite weighted variance sum"))
    }
}

fn flag(perp: &Perp, slot: &str) -> Option<String> {
    match perp {
        Perp::Degenerate(why) => Some(format!("{slot}: {why}")),
        Perp::State(_) => None,
    }
}

fn check_perp(perp: &Perp, psi: &PureState) -> Result<()> {
    match perp {
        Perp::State(u) if u.dim() != psi.dim() => {
            Err(Error::usage("perp state dimension mismatch"))
        }
        _ => Ok(()),
    }
}

/// ΣᵢΔAᵢ² ≥ (1/n)ΔS², via the Vaidman state of S. Weights are ignored.
pub fn lemma1(m: &MultiInstance) -> Result<BoundReport> {
    let lhs: f64 = m
        .observables
        .iter()
        .map(|o| variance(o, &m.psi))
        .sum::<Result<f64>>()?;
    let s = m.sum_observable();
    let perp = make_perp(&PerpChoice::Vaidman(s.clone()), &m.psi)?;
    let t = transition(s.matrix(), &m.psi, &perp)?.norm_sqr();
    Ok(
        BoundReport::new("lemma1", lhs, vec![term("vaidman_sum", t / m.n() as f64)])
            .with_flags(flag(&perp, "perp_sum")),
    )
}

/// ℒ₀: |⟨ψ|S|ψ⊥₀⟩|² + every pairwise term kept exactly.
pub fn l0(m: &MultiInstance, perp0: &Perp) -> Result<BoundReport> {
    check_perp(perp0, &m.psi)?;
    let x = m.exact();
    let mut terms = vec![("sum".to_string(), x.relaxed(&x.s_hat(), perp0))];
    terms.extend(
        all_pairs(m.n())
            .into_iter()
            .map(|p| (p.label(), x.pair_vector(p).norm_sqr())),
    );
    Ok(exact_report("l0".into(), x.lhs(), terms).with_flags(flag(perp0, "perp_0")))
}

/// ℒᵢⱼ: ΔS² exactly, the (i,j) term relaxed against `perp_ij`, and the
/// remaining pairs (per `mode`) kept exactly.
pub fn lij(
    m: &MultiInstance,
    p: PairIndex,
    perp_ij: &Perp,
    mode: RemainingPairs,
) -> Result<BoundReport> {
    if p.j >= m.n() {
        return Err(Error::usage(format!(
            "pair ({},{}) out of range for n = {}",
            p.i + 1,
            p.j + 1,
            m.n()
        )));
    }
    check_perp(perp_ij, &m.psi)?;
    let perp_s = make_perp(&PerpChoice::Vaidman(m.sum_observable()), &m.psi)?;
    let x = m.exact();
    let mut terms = vec![
        ("sum".to_string(), x.relaxed(&x.s_hat(), &perp_s)),
        (
            format!("{}_cs", p.label()),
            x.relaxed(&x.pair_vector(p), perp_ij),
        ),
    ];
    let rest = all_pairs(m.n()).into_iter().filter(|q| match mode {
        RemainingPairs::AllOthers => *q != p,
        RemainingPairs::Disjoint => !q.touches(&p),
    });
    terms.extend(rest.map(|q| (q.label(), x.pair_vector(q).norm_sqr())));
    Ok(
        exact_report(format!("l{}{}", p.i + 1, p.j + 1), x.lhs(), terms)
            .with_branch(p.label())
            .with_flags(
                flag(&perp_s, "perp_sum")
                    .into_iter()
                    .chain(flag(perp_ij, "perp_ij")),
            ),
    )
}

/// The perp maximizing the relaxed (i,j) term of [`lij`]; with it the bound
/// equals the exact identity value.
pub fn pair_optimal_perp(m: &MultiInstance, p: PairIndex) -> Result<Perp> {
    if p.j >= m.n() {
        return Err(Error::usage(format!(
            "pair ({},{}) out of range for n = {}",
            p.i + 1,
            p.j + 1,
            m.n()
        )));
    }
    make_perp(
        &PerpChoice::Optimal(m.pair_operator(p).matrix().clone()),
        &m.psi,
    )
}

/// Perps for [`theorem7`].
#[derive(Debug, Clone, PartialEq)]
pub enum MultiPerps {
    /// Vaidman state of S for ℒ₀; the optimal state for each pair operator.
    Default,
    /// One resolved perp used in every slot.
    Fixed(Perp),
}

/// max(ℒ₀, ℒᵢⱼ over all pairs); `branch` names the winner.
pub fn theorem7(m: &MultiInstance, perps: &MultiPerps) -> Result<BoundReport> {
    let perp0 = match perps {
        MultiPerps::Default => make_perp(&PerpChoice::Vaidman(m.sum_observable()), &m.psi)?,
        MultiPerps::Fixed(u) => u.clone(),
    };
    let mut best = l0(m, &perp0)?.with_branch("l0");
    let mut candidates: Vec<Term> = vec![term("l0", best.bound)];
    for p in all_pairs(m.n()) {
        let perp = match perps {
            MultiPerps::Default => pair_optimal_perp(m, p)?,
            MultiPerps::Fixed(u) => u.clone(),
        };
        let r = lij(m, p, &perp, RemainingPairs::AllOthers)?;
        candidates.push(term(p.label(), r.bound));
        if r.bound > best.bound {
            best = r;
        }
    }
    let mut out = BoundReport::new("theorem7", best.lhs, best.terms)
        .with_slack(best.slack)
        .with_flags(best.degenerate_flags);
    out.branch = best.branch;
    out.details = candidates;
    Ok(out)
}

/// |Σ_{i,j}(λᵢ/λⱼ)ΔAᵢ² − ‖Ŝψ‖² − Σ_{i<j}‖(√(λᵢ/λⱼ)Âᵢ − √(λⱼ/λᵢ)Âⱼ)ψ‖²|.
///
/// Evaluated in double-double arithmetic: with weight ratios near 10⁶ the
/// individual terms reach 10⁷ and f64 rounding alone exceeds 10⁻⁹.
pub fn multi_parallelogram_residual(m: &MultiInstance) -> Result<f64> {
    let x = m.exact();
    let mut rhs = x.s_hat().norm_sqr();
    for p in all_pairs(m.n()) {
        rhs += x.pair_vector(p).norm_sqr();
    }
    let res = f64::from(x.lhs() - rhs).abs();
    if res.is_finite() {
        Ok(res)
    } else {
        Err(Error::numeric("non-finite parallelogram residual"))
    }
}
