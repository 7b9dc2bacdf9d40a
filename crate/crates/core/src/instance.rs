//! JSON problem instances.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "observables": [
//!     {"name": "X", "matrix": [[[0,0],[1,0]], [[1,0],[0,0]]]},
//!     {"name": "Y", "matrix": [[[0,0],[0,-1]], [[0,1],[0,0]]]}
//!   ],
//!   "state": [[1,0],[0,0]],
//!   "weights": [2, 1],
//!   "perp": {"mode": "basis", "payload": 1}
//! }
//! ```
//!
//! Every complex number is an `[re, im]` pair. Matrices must be Hermitian to
//! [`HERMITIAN_TOL`] and the state normalized to [`NORM_TOL`]; nothing is
//! silently repaired beyond renormalizing within that tolerance.
//!
//! Perp modes: `vaidman` (payload: observable name, or absent for the sum of
//! all observables), `optimal` (no payload: the bound's own optimal state),
//! `explicit` (payload: vector of `[re, im]`, or `"eK"` for basis vector |K⟩),
//! `basis` (payload: index K; |K⟩ with the state component removed).

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, CMatrix, CVector, HERMITIAN_TOL};
use crate::state::{Observable, PerpChoice, PureState, NORM_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub name: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerpSpec {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub payload: Value,
}

/// On-disk form of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInstance {
    pub dim: usize,
    pub observables: Vec<ObservableSpec>,
    pub state: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perp: Option<PerpSpec>,
}

/// How a perpendicular state was requested.
#[derive(Debug, Clone, PartialEq)]
pub enum PerpRequest {
    /// Each bound's own optimal (saturating) state.
    Optimal,
    /// Vaidman state of the named observable; `None` means the sum of all.
    Vaidman(Option<String>),
    Explicit(Vec<Complex64>),
    /// Exactly |K⟩, which must already be orthogonal to the state.
    ExplicitBasis(usize),
    Basis(usize),
}

impl PerpRequest {
    /// Parses the command-line form: `optimal`, `vaidman[:NAME]`,
    /// `explicit:eK`, `explicit:[[re,im],...]`, `basis:K`.
    pub fn parse(s: &str) -> Result<Self> {
        let (mode, payload) = match s.split_once(':') {
            Some((m, p)) => (m, Some(p)),
            None => (s, None),
        };
        let payload = match payload {
            None => Value::Null,
            Some(p) if p.starts_with('[') => serde_json::from_str(p)
                .map_err(|e| Error::usage(format!("bad perp payload {p:?}: {e}")))?,
            Some(p) => match p.parse::<u64>() {
                Ok(k) => Value::from(k),
                Err(_) => Value::from(p),
            },
        };
        PerpRequest::from_spec(&PerpSpec {
            mode: mode.to_string(),
            payload,
        })
    }

    pub fn from_spec(spec: &PerpSpec) -> Result<Self> {
        let p = &spec.payload;
        match spec.mode.as_str() {
            "optimal" | "saturating" => match p {
                Value::Null => Ok(PerpRequest::Optimal),
                _ => Err(Error::usage("optimal perp takes no payload")),
            },
            "vaidman" => match p {
                Value::Null => Ok(PerpRequest::Vaidman(None)),
                Value::String(name) => Ok(PerpRequest::Vaidman(Some(name.clone()))),
                _ => Err(Error::usage("vaidman payload must be an observable name")),
            },
            "basis" => p
                .as_u64()
                .map(|k| PerpRequest::Basis(k as usize))
                .ok_or_else(|| Error::usage("basis payload must be a nonnegative integer")),
            "explicit" => match p {
                Value::String(s) => {
                    let k = s
                        .strip_prefix('e')
                        .and_then(|k| k.parse::<usize>().ok())
                        .ok_or_else(|| {
                            Error::usage(format!("explicit payload {s:?} is not of the form eK"))
                        })?;
                    Ok(PerpRequest::ExplicitBasis(k))
                }
                Value::Array(_) => {
                    let pairs: Vec<[f64; 2]> = serde_json::from_value(p.clone())
                        .map_err(|e| Error::usage(format!("explicit payload: {e}")))?;
                    Ok(PerpRequest::Explicit(
                        pairs.iter().map(|z| Complex64::new(z[0], z[1])).collect(),
                    ))
                }
                _ => Err(Error::usage("explicit payload must be a vector or eK")),
            },
            other => Err(Error::usage(format!(
                "unknown perp mode {other:?} (expected optimal, vaidman, explicit, basis)"
            ))),
        }
    }

    /// The concrete choice for `inst`, or `None` for [`PerpRequest::Optimal`].
    pub fn choice(&self, inst: &Instance) -> Result<Option<PerpChoice>> {
        let dim = inst.psi.dim();
        Ok(Some(match self {
            PerpRequest::Optimal => return Ok(None),
            PerpRequest::Vaidman(None) => {
                let terms: Vec<(f64, &Observable)> =
                    inst.observables.iter().map(|o| (1.0, o)).collect();
                PerpChoice::Vaidman(Observable::combination("S", &terms)?)
            }
            PerpRequest::Vaidman(Some(name)) => PerpChoice::Vaidman(inst.observable(name)?.clone()),
            PerpRequest::Basis(k) => PerpChoice::BasisCompletion(*k),
            PerpRequest::ExplicitBasis(k) => {
                let k = *k;
                if k >= dim {
                    return Err(Error::usage(format!(
                        "basis vector e{k} out of range for dimension {dim}"
                    )));
                }
                PerpChoice::Explicit(CVector::basis(dim, k))
            }
            PerpRequest::Explicit(v) => PerpChoice::Explicit(CVector::new(v.clone())?),
        }))
    }
}

/// A validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub observables: Vec<Observable>,
    pub psi: PureState,
    pub weights: Option<Vec<f64>>,
    pub perp: Option<PerpRequest>,
}

impl Instance {
    pub fn observable(&self, name: &str) -> Result<&Observable> {
        self.observables
            .iter()
            .find(|o| o.name() == name)
            .ok_or_else(|| Error::usage(format!("no observable named {name:?}")))
    }

    /// The first two observables.
    pub fn pair(&self) -> Result<(&Observable, &Observable)> {
        match self.observables.as_slice() {
            [a, b, ..] => Ok((a, b)),
            _ => Err(Error::usage("pair bounds need at least two observables")),
        }
    }
}

fn complex(z: [f64; 2]) -> Complex64 {
    Complex64::new(z[0], z[1])
}

impl ProblemInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::usage(format!("invalid instance JSON: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// Checks shapes, Hermiticity and normalization.
    pub fn validate(&self) -> Result<Instance> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::usage("dim must be positive"));
        }
        if self.observables.is_empty() {
            return Err(Error::usage("instance has no observables"));
        }
        let mut observables = Vec::with_capacity(self.observables.len());
        for spec in &self.observables {
            if spec.matrix.len() != d || spec.matrix.iter().any(|r| r.len() != d) {
                return Err(Error::usage(format!(
                    "matrix of {} is not {d}x{d}",
                    spec.name
                )));
            }
            let entries = spec.matrix.iter().flatten().copied().map(complex).collect();
            let m = CMatrix::new(d, entries)?;
            let defect = hermitian_defect(&m);
            if defect > HERMITIAN_TOL {
                return Err(Error::precondition(format!(
                    "observable {} is not Hermitian (defect {defect:e})",
                    spec.name
                )));
            }
            observables.push(Observable::new(spec.name.clone(), m)?);
        }
        if self.state.len() != d {
            return Err(Error::usage(format!(
                "state has {} amplitudes, dim is {d}",
                self.state.len()
            )));
        }
        let v = CVector::new(self.state.iter().copied().map(complex).collect())?;
        let n2 = v.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::precondition(format!(
                "state is not normalized (<psi|psi> = {n2})"
            )));
        }
        let psi = PureState::new(v)?;
        if let Some(w) = &self.weights {
            if w.len() != observables.len() {
                return Err(Error::usage(format!(
                    "{} weights for {} observables",
                    w.len(),
                    observables.len()
                )));
            }
        }
        let perp = self.perp.as_ref().map(PerpRequest::from_spec).transpose()?;
        Ok(Instance {
            observables,
            psi,
            weights: self.weights.clone(),
            perp,
        })
    }

    /// The file form of in-memory observables and a state.
    pub fn from_parts(observables: &[Observable], psi: &PureState) -> Self {
        let to_pair = |z: &Complex64| [z.re, z.im];
        ProblemInstance {
            dim: psi.dim(),
            observables: observables
                .iter()
                .map(|o| ObservableSpec {
                    name: o.name().to_string(),
                    matrix: (0..o.dim())
                        .map(|j| o.matrix().row(j).iter().map(to_pair).collect())
                        .collect(),
                })
                .collect(),
            state: psi.amplitudes().entries().iter().map(to_pair).collect(),
            weights: None,
            perp: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{pauli_x, pauli_y, spin1};

    const PAULI: &str = r#"{
        "dim": 2,
        "observables": [
            {"name": "X", "matrix": [[[0,0],[1,0]], [[1,0],[0,0]]]},
            {"name": "Y", "matrix": [[[0,0],[0,-1]], [[0,1],[0,0]]]}
        ],
        "state": [[1,0],[0,0]]
    }"#;

    #[test]
    fn parses_pauli() {
        let inst = ProblemInstance::from_json(PAULI)
            .unwrap()
            .validate()
            .unwrap();
        assert_eq!(inst.observables.len(), 2);
        assert_eq!(inst.observables[0].matrix(), pauli_x().matrix());
        assert_eq!(inst.observables[1].matrix(), pauli_y().matrix());
        assert!(inst.perp.is_none());
    }

    #[test]
    fn rejects_bad_inputs() {
        let non_herm = PAULI.replace("[[0,1],[0,0]]", "[[0,2],[0,0]]");
        let e = ProblemInstance::from_json(&non_herm)
            .unwrap()
            .validate()
            .unwrap_err();
        assert_eq!(e.exit_code(), 3);
        let unnormalized = PAULI.replace(r#""state": [[1,0],[0,0]]"#, r#""state": [[1,0],[1,0]]"#);
        let e = ProblemInstance::from_json(&unnormalized)
            .unwrap()
            .validate()
            .unwrap_err();
        assert_eq!(e.exit_code(), 3);
        let short = PAULI.replace(r#""state": [[1,0],[0,0]]"#, r#""state": [[1,0]]"#);
        assert_eq!(
            ProblemInstance::from_json(&short)
                .unwrap()
                .validate()
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(ProblemInstance::from_json("{").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn round_trip() {
        let f = spin1(0.7);
        let p = ProblemInstance::from_parts(&[f.jx.clone(), f.jy.clone()], &f.psi);
        let back = ProblemInstance::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        let inst = back.validate().unwrap();
        assert_eq!(inst.observables[1].matrix(), f.jy.matrix());
        assert_eq!(inst.psi.amplitudes(), f.psi.amplitudes());
    }

    #[test]
    fn perp_requests() {
        let inst = ProblemInstance::from_json(PAULI)
            .unwrap()
            .validate()
            .unwrap();
        assert_eq!(PerpRequest::parse("optimal").unwrap(), PerpRequest::Optimal);
        assert_eq!(
            PerpRequest::parse("vaidman:X").unwrap(),
            PerpRequest::Vaidman(Some("X".into()))
        );
        assert_eq!(
            PerpRequest::parse("basis:1").unwrap(),
            PerpRequest::Basis(1)
        );
        let e1 = PerpRequest::parse("explicit:e1")
            .unwrap()
            .choice(&inst)
            .unwrap();
        assert_eq!(e1, Some(PerpChoice::Explicit(CVector::basis(2, 1))));
        let v = PerpRequest::parse("explicit:[[0,0],[0,1]]")
            .unwrap()
            .choice(&inst)
            .unwrap();
        assert_eq!(
            v,
            Some(PerpChoice::Explicit(
                CVector::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap()
            ))
        );
        assert!(PerpRequest::parse("explicit:e5")
            .unwrap()
            .choice(&inst)
            .is_err());
        assert!(PerpRequest::parse("vaidman:Z")
            .unwrap()
            .choice(&inst)
            .is_err());
        assert!(PerpRequest::parse("sideways").is_err());
        let with_perp = PAULI.replace(
            r#""state""#,
            r#""perp": {"mode": "basis", "payload": 1}, "state""#,
        );
        let inst = ProblemInstance::from_json(&with_perp)
            .unwrap()
            .validate()
            .unwrap();
        assert_eq!(inst.perp, Some(PerpRequest::Basis(1)));
    }
}
