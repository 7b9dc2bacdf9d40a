//! Pure states, observables, and the statistics taken over them.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, inner, CMatrix, CVector, HERMITIAN_TOL};

/// Normalization tolerance accepted when constructing a [`PureState`].
pub const NORM_TOL: f64 = 1e-10;

/// Tolerance on orthogonality and normalization of resolved perpendicular states.
pub const PERP_TOL: f64 = 1e-9;

/// Pre-normalization norm at or below which a perpendicular state is degenerate.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Amplitude magnitude above which an entry counts as nonzero when fixing phase.
const PHASE_THRESHOLD: f64 = 1e-9;

/// A normalized state vector |ψ⟩.
///
/// Amplitudes are rescaled to unit norm on construction once the input passes
/// the normalization check, so downstream inner products see ⟨ψ|ψ⟩ = 1 to
/// machine precision.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    /// Accepts `amplitudes` if |⟨ψ|ψ⟩ − 1| ≤ [`NORM_TOL`].
    pub fn new(amplitudes: CVector) -> Result<Self> {
        Self::with_tolerance(amplitudes, NORM_TOL)
    }

    pub fn with_tolerance(amplitudes: CVector, norm_tol: f64) -> Result<Self> {
        let n2 = amplitudes.norm_sqr();
        if (n2 - 1.0).abs() > norm_tol {
            return Err(Error::precondition(format!(
                "state is not normalized: <psi|psi> = {n2}"
            )));
        }
        Ok(PureState {
            amplitudes: amplitudes.scale_re(1.0 / n2.sqrt()),
        })
    }

    /// Rescales any nonzero vector to unit norm.
    pub fn normalized(v: CVector) -> Result<Self> {
        let n = v.norm();
        if n <= DEGENERATE_NORM {
            return Err(Error::precondition("cannot normalize a zero vector"));
        }
        Ok(PureState {
            amplitudes: v.scale_re(1.0 / n),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        PureState {
            amplitudes: CVector::basis(dim, k),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn overlap(&self, other: &PureState) -> Result<Complex64> {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

/// A Hermitian matrix with a display label.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    name: String,
    matrix: CMatrix,
}

impl Observable {
    /// Accepts `matrix` if it is Hermitian within [`HERMITIAN_TOL`].
    pub fn new(name: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        let name = name.into();
        let defect = linalg::hermitian_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::precondition(format!(
                "observable {name} is not Hermitian (defect {defect:e})"
            )));
        }
        Ok(Observable { name, matrix })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Real linear combination Σ c_k·O_k. Stays Hermitian.
    pub fn combination(name: impl Into<String>, terms: &[(f64, &Observable)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::usage("empty linear combination"))?;
        let dim = first.dim();
        let mut m = CMatrix::zeros(dim);
        for (c, o) in terms {
            if o.dim() != dim {
                return Err(Error::usage(format!(
                    "combining observables of dimensions {dim} and {}",
                    o.dim()
                )));
            }
            m = m.axpy(Complex64::new(*c, 0.0), &o.matrix);
        }
        Ok(Observable {
            name: name.into(),
            matrix: m,
        })
    }

    pub fn sum(a: &Observable, b: &Observable) -> Result<Self> {
        Self::combination(format!("{}+{}", a.name, b.name), &[(1.0, a), (1.0, b)])
    }

    pub fn scaled(&self, c: f64) -> Observable {
        Observable {
            name: format!("{c}*{}", self.name),
            matrix: self.matrix.scale_re(c),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Observable {
            name: "I".into(),
            matrix: CMatrix::identity(dim),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn check_dims(a: &Observable, psi: &PureState) -> Result<()> {
    if a.dim() != psi.dim() {
        return Err(Error::usage(format!(
            "observable {} has dimension {} but the state has dimension {}",
            a.name(),
            a.dim(),
            psi.dim()
        )));
    }
    Ok(())
}

/// ⟨ψ|A|ψ⟩.
pub fn expectation(a: &Observable, psi: &PureState) -> Result<f64> {
    check_dims(a, psi)?;
    let z = inner(psi.amplitudes(), &(a.matrix() * psi.amplitudes()))?;
    if z.im.abs() > HERMITIAN_TOL {
        return Err(Error::numeric(format!(
            "expectation of {} has imaginary part {:e}",
            a.name(),
            z.im
        )));
    }
    Ok(z.re)
}

/// ΔA² = ⟨A²⟩ − ⟨A⟩², with ⟨A²⟩ taken as ‖A|ψ⟩‖².
pub fn variance(a: &Observable, psi: &PureState) -> Result<f64> {
    check_dims(a, psi)?;
    let a_psi = a.matrix() * psi.amplitudes();
    let second = a_psi.norm_sqr();
    let mean = inner(psi.amplitudes(), &a_psi)?;
    if mean.im.abs() > HERMITIAN_TOL {
        return Err(Error::numeric(format!(
            "expectation of {} has imaginary part {:e}",
            a.name(),
            mean.im
        )));
    }
    let var = second - mean.re * mean.re;
    if var < 0.0 {
        // Cancellation near eigenstates.
        if var < -1e-12 * second.max(1.0) {
            return Err(Error::numeric(format!(
                "variance of {} is negative ({var:e})",
                a.name()
            )));
        }
        return Ok(0.0);
    }
    Ok(var)
}

/// ΔA, the standard deviation.
pub fn std_dev(a: &Observable, psi: &PureState) -> Result<f64> {
    variance(a, psi).map(f64::sqrt)
}

/// ⟨ψ|[A,B]|ψ⟩ = ⟨Aψ|Bψ⟩ − ⟨Bψ|Aψ⟩; purely imaginary for Hermitian A, B.
pub fn commutator_expectation(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
) -> Result<Complex64> {
    check_dims(a, psi)?;
    check_dims(b, psi)?;
    let a_psi = a.matrix() * psi.amplitudes();
    let b_psi = b.matrix() * psi.amplitudes();
    Ok(inner(&a_psi, &b_psi)? - inner(&b_psi, &a_psi)?)
}

/// ⟨ψ|{Â,B̂}|ψ⟩ = 2·Re⟨Âψ|B̂ψ⟩.
pub fn anticommutator_centered_expectation(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
) -> Result<f64> {
    let a_hat = centered_apply(a, psi)?;
    let b_hat = centered_apply(b, psi)?;
    Ok(2.0 * inner(&a_hat, &b_hat)?.re)
}

/// Â = A − ⟨A⟩·I.
pub fn centered(a: &Observable, psi: &PureState) -> Result<CMatrix> {
    let mean = expectation(a, psi)?;
    Ok(a.matrix()
        .axpy(Complex64::new(-mean, 0.0), &CMatrix::identity(a.dim())))
}

/// Â|ψ⟩ = A|ψ⟩ − ⟨A⟩|ψ⟩, without forming Â.
pub fn centered_apply(a: &Observable, psi: &PureState) -> Result<CVector> {
    let mean = expectation(a, psi)?;
    let a_psi = a.matrix() * psi.amplitudes();
    Ok(a_psi.axpy(Complex64::new(-mean, 0.0), psi.amplitudes()))
}

/// Strategy for picking a unit vector orthogonal to |ψ⟩.
#[derive(Debug, Clone, PartialEq)]
pub enum PerpChoice {
    /// (A − ⟨A⟩)|ψ⟩ / ΔA.
    Vaidman(Observable),
    /// The unit u ⊥ ψ maximizing |⟨ψ|M|u⟩|²: normalized (I − |ψ⟩⟨ψ|) M†|ψ⟩.
    Optimal(CMatrix),
    /// A caller-supplied vector, checked for orthogonality and unit norm.
    Explicit(CVector),
    /// |k⟩ with its |ψ⟩ component removed, normalized.
    BasisCompletion(usize),
}

/// A resolved perpendicular state, or the reason none exists.
#[derive(Debug, Clone, PartialEq)]
pub enum Perp {
    State(PureState),
    Degenerate(String),
}

impl Perp {
    pub fn state(&self) -> Option<&PureState> {
        match self {
            Perp::State(s) => Some(s),
            Perp::Degenerate(_) => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Perp::Degenerate(_))
    }
}

/// Multiplies by a global phase so the first nonzero amplitude is real positive.
fn fix_phase(v: CVector) -> CVector {
    let Some(z) = v
        .entries()
        .iter()
        .find(|z| z.norm() > PHASE_THRESHOLD)
        .copied()
    else {
        return v;
    };
    v.scale(z.conj() / z.norm())
}

/// Removes the |ψ⟩ component of `v` (twice, for near-degenerate inputs) and
/// normalizes. Degenerate if the remainder has norm ≤ [`DEGENERATE_NORM`].
pub fn perp_from_vector(v: &CVector, psi: &PureState, reason: &str) -> Result<Perp> {
    if v.dim() != psi.dim() {
        return Err(Error::usage(format!(
            "vector of dimension {} for a state of dimension {}",
            v.dim(),
            psi.dim()
        )));
    }
    let p = psi.amplitudes();
    let mut w = v.axpy(-inner(p, v)?, p);
    if w.norm() <= DEGENERATE_NORM {
        return Ok(Perp::Degenerate(reason.to_string()));
    }
    w = w.axpy(-inner(p, &w)?, p);
    let n = w.norm();
    if n <= DEGENERATE_NORM {
        return Ok(Perp::Degenerate(reason.to_string()));
    }
    Ok(Perp::State(PureState {
        amplitudes: fix_phase(w.scale_re(1.0 / n)),
    }))
}

/// Resolves a [`PerpChoice`] against |ψ⟩.
pub fn make_perp(choice: &PerpChoice, psi: &PureState) -> Result<Perp> {
    match choice {
        PerpChoice::Vaidman(a) => {
            let v = centered_apply(a, psi)?;
            if v.norm() <= DEGENERATE_NORM {
                return Ok(Perp::Degenerate(format!(
                    "state is an eigenstate of {}",
                    a.name()
                )));
            }
            perp_from_vector(&v, psi, &format!("state is an eigenstate of {}", a.name()))
        }
        PerpChoice::Optimal(m) => {
            if m.dim() != psi.dim() {
                return Err(Error::usage("optimal perp matrix dimension mismatch"));
            }
            let v = &m.adjoint() * psi.amplitudes();
            perp_from_vector(&v, psi, "M† maps the state onto itself")
        }
        PerpChoice::Explicit(v) => {
            if v.dim() != psi.dim() {
                return Err(Error::usage(format!(
                    "explicit perp has dimension {} but the state has dimension {}",
                    v.dim(),
                    psi.dim()
                )));
            }
            let overlap = inner(psi.amplitudes(), v)?.norm();
            let n2 = v.norm_sqr();
            if overlap > PERP_TOL || (n2 - 1.0).abs() > PERP_TOL {
                return Err(Error::precondition(format!(
                    "explicit perp is not a unit vector orthogonal to the state \
                     (|<psi|u>| = {overlap:e}, <u|u> = {n2})"
                )));
            }
            Ok(Perp::State(PureState {
                amplitudes: v.scale_re(1.0 / n2.sqrt()),
            }))
        }
        PerpChoice::BasisCompletion(k) => {
            if *k >= psi.dim() {
                return Err(Error::usage(format!(
                    "basis index {k} out of range for dimension {}",
                    psi.dim()
                )));
            }
            perp_from_vector(
                &CVector::basis(psi.dim(), *k),
                psi,
                &format!("state is proportional to |{k}>"),
            )
        }
    }
}

/// ⟨ψ|X|u⟩ for a resolved perp, zero when degenerate.
pub fn transition(x: &CMatrix, psi: &PureState, perp: &Perp) -> Result<Complex64> {
    match perp {
        Perp::State(u) => inner(psi.amplitudes(), &(x * u.amplitudes())),
        Perp::Degenerate(_) => Ok(Complex64::new(0.0, 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::sampling::{pauli_x, pauli_y, random_hermitian, random_state, spin1, Seed};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn expectation_examples() {
        let f0 = spin1(0.0);
        assert_eq!(expectation(&f0.jz, &f0.psi).unwrap(), 1.0);
        let f = spin1(FRAC_PI_2);
        assert!(close(expectation(&f.jx, &f.psi).unwrap(), 0.0, 1e-15));
        let psi = random_state(5, Seed(3));
        assert!(close(
            expectation(&Observable::identity(5), &psi).unwrap(),
            1.0,
            1e-14
        ));
    }

    #[test]
    fn variance_examples() {
        for k in 0..32 {
            let theta = 2.0 * PI * k as f64 / 32.0;
            let f = spin1(theta);
            let v = variance(&f.jx, &f.psi).unwrap();
            assert!(close(v, 0.5 * (1.0 + theta.sin()), 1e-14), "theta={theta}");
        }
        let f0 = spin1(0.0);
        assert_eq!(variance(&f0.jz, &f0.psi).unwrap(), 0.0);
        assert!(close(
            variance(&pauli_x(), &PureState::basis(2, 0)).unwrap(),
            1.0,
            0.0
        ));
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let err = expectation(&pauli_x(), &PureState::basis(3, 0)).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn commutator_examples() {
        let zero = PureState::basis(2, 0);
        let c = commutator_expectation(&pauli_x(), &pauli_y(), &zero).unwrap();
        assert_eq!(c, Complex64::new(0.0, 2.0));
        let a = random_hermitian(4, Seed(9));
        let psi = random_state(4, Seed(10));
        assert_eq!(commutator_expectation(&a, &a, &psi).unwrap().norm(), 0.0);
        let f = spin1(FRAC_PI_2);
        assert!(commutator_expectation(&f.jx, &f.jy, &f.psi).unwrap().norm() < 1e-15);
    }

    #[test]
    fn centered_examples() {
        let f0 = spin1(0.0);
        let jz_hat = centered(&f0.jz, &f0.psi).unwrap();
        let expected = f0.jz.matrix() - &CMatrix::identity(3);
        assert_eq!(jz_hat, expected);
        let f = spin1(FRAC_PI_2);
        assert!(centered(&f.jx, &f.psi).unwrap().max_abs_diff(f.jx.matrix()) < 1e-15);
        for s in 0..20 {
            let a = random_hermitian(6, Seed(100 + s));
            let psi = random_state(6, Seed(200 + s));
            let a_hat = centered(&a, &psi).unwrap();
            let z = inner(psi.amplitudes(), &(&a_hat * psi.amplitudes())).unwrap();
            assert!(z.norm() < 1e-10);
        }
    }

    #[test]
    fn variance_matches_centered_norm() {
        for s in 0..200u64 {
            let d = 2 + (s % 7) as usize;
            let a = random_hermitian(d, Seed(s));
            let psi = random_state(d, Seed(s + 1000));
            let v = variance(&a, &psi).unwrap();
            let n = centered_apply(&a, &psi).unwrap().norm_sqr();
            assert!(close(v, n, 1e-10), "seed {s}: {v} vs {n}");
        }
    }

    #[test]
    fn vaidman_degenerate_on_eigenstate() {
        let f0 = spin1(0.0);
        let p = make_perp(&PerpChoice::Vaidman(f0.jz.clone()), &f0.psi).unwrap();
        assert!(p.is_degenerate());
    }

    #[test]
    fn vaidman_of_jx_plus_jy_gives_half() {
        for k in 0..16 {
            let f = spin1(2.0 * PI * k as f64 / 16.0);
            let s = Observable::sum(&f.jx, &f.jy).unwrap();
            let p = make_perp(&PerpChoice::Vaidman(s.clone()), &f.psi).unwrap();
            let u = p.state().unwrap();
            assert!(f.psi.overlap(u).unwrap().norm() < PERP_TOL);
            let t = transition(s.matrix(), &f.psi, &p).unwrap();
            assert!(close(0.5 * t.norm_sqr(), 0.5, 1e-12));
        }
    }

    #[test]
    fn explicit_perp_orthogonality_is_checked() {
        let r = 1.0 / 3f64.sqrt();
        let u = CVector::from_real(&[r, r, -r]).unwrap();
        let f = spin1(FRAC_PI_2);
        assert!(make_perp(&PerpChoice::Explicit(u.clone()), &f.psi).is_ok());
        // Not orthogonal to |0>.
        let f0 = spin1(0.0);
        let err = make_perp(&PerpChoice::Explicit(u), &f0.psi).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        let unnormalized = CVector::from_real(&[0.0, 2.0, 0.0]).unwrap();
        assert!(make_perp(&PerpChoice::Explicit(unnormalized), &f0.psi).is_err());
    }

    #[test]
    fn basis_completion() {
        let f = spin1(1.0);
        let p = make_perp(&PerpChoice::BasisCompletion(0), &f.psi).unwrap();
        let u = p.state().unwrap();
        assert!(f.psi.overlap(u).unwrap().norm() < 1e-15);
        let p = make_perp(&PerpChoice::BasisCompletion(0), &PureState::basis(3, 0)).unwrap();
        assert!(p.is_degenerate());
        assert!(make_perp(&PerpChoice::BasisCompletion(3), &f.psi).is_err());
    }

    #[test]
    fn phase_convention() {
        let psi = PureState::basis(2, 0);
        let v = CVector::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -3.0)]).unwrap();
        let p = perp_from_vector(&v, &psi, "zero").unwrap();
        assert_eq!(p.state().unwrap().amplitudes()[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn perp_outputs_are_orthonormal() {
        for s in 0..300u64 {
            let d = 2 + (s % 7) as usize;
            let psi = random_state(d, Seed(s));
            let a = random_hermitian(d, Seed(s + 7));
            let choices = [
                PerpChoice::Vaidman(a.clone()),
                PerpChoice::Optimal(a.matrix().clone()),
                PerpChoice::BasisCompletion((s as usize) % d),
            ];
            for c in &choices {
                if let Perp::State(u) = make_perp(c, &psi).unwrap() {
                    assert!(psi.overlap(&u).unwrap().norm() <= PERP_TOL);
                    assert!((u.amplitudes().norm_sqr() - 1.0).abs() <= PERP_TOL);
                }
            }
        }
    }

    #[test]
    fn optimal_beats_random_orthogonal_vectors() {
        for s in 0..12u64 {
            let d = 2 + (s % 3) as usize;
            let psi = random_state(d, Seed(s));
            let m = random_hermitian(d, Seed(s + 50));
            let best = make_perp(&PerpChoice::Optimal(m.matrix().clone()), &psi).unwrap();
            let best_val = transition(m.matrix(), &psi, &best).unwrap().norm_sqr();
            for t in 0..1000u64 {
                let v = random_state(d, Seed(s * 100_000 + t + 1));
                let u = perp_from_vector(v.amplitudes(), &psi, "").unwrap();
                let val = transition(m.matrix(), &psi, &u).unwrap().norm_sqr();
                assert!(val <= best_val + 1e-9, "seed {s}/{t}: {val} > {best_val}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let v = CVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(PureState::new(v), Err(Error::Precondition(_))));
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = ONE;
        assert!(matches!(
            Observable::new("M", m),
            Err(Error::Precondition(_))
        ));
    }
}
