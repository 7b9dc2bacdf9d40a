//! CSV sweeps over the spin-1 fixture.
//!
//! Figures 1 and 2 sweep θ over [0, 2π) for the pairs (J_x, J_y) and
//! (J_y, J_z), writing `theta,sum_var,half_L2,L_MP2`. Figure 3 sweeps λ at a
//! fixed θ for (J_y, J_z), writing `lambda,f_lambda,L2`. The perpendicular
//! state is |1⟩ throughout. Values use 17 significant digits and LF endings,
//! so output is byte-stable.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::pair::{l2, mp2};
use crate::sampling::spin1;
use crate::state::{make_perp, variance, Observable, Perp, PerpChoice, PureState};

/// Default number of θ samples.
pub const DEFAULT_THETA_STEPS: usize = 400;

pub const THETA_HEADER: [&str; 4] = ["theta", "sum_var", "half_L2", "L_MP2"];
pub const LAMBDA_HEADER: [&str; 3] = ["lambda", "f_lambda", "L2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// (J_x, J_y).
    One,
    /// (J_y, J_z).
    Two,
    /// Error function of (J_y, J_z) against λ.
    Three,
}

impl Figure {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Figure::One),
            2 => Ok(Figure::Two),
            3 => Ok(Figure::Three),
            _ => Err(Error::usage(format!("figure must be 1, 2 or 3, got {n}"))),
        }
    }
}

/// Inclusive, linearly spaced λ range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl LambdaRange {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) || points < 2 {
            return Err(Error::usage(format!(
                "lambda range needs 0 < lo < hi and at least 2 points, got {lo}:{hi}:{points}"
            )));
        }
        Ok(LambdaRange { lo, hi, points })
    }

    /// Parses `lo:hi:N`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::usage(format!("lambda range {s:?} is not lo:hi:N"));
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(bad());
        };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        LambdaRange::new(lo, hi, n)
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * k as f64 / last
                }
            })
            .collect()
    }
}

impl Default for LambdaRange {
    fn default() -> Self {
        LambdaRange {
            lo: 0.1,
            hi: 10.0,
            points: 100,
        }
    }
}

fn perp_one(psi: &PureState) -> Result<Perp> {
    make_perp(&PerpChoice::Explicit(CVector::basis(3, 1)), psi)
}

/// One row of figure 1 or 2.
pub fn theta_row(a: &Observable, b: &Observable, psi: &PureState, theta: f64) -> Result<[f64; 4]> {
    let perp = perp_one(psi)?;
    Ok([
        theta,
        variance(a, psi)? + variance(b, psi)?,
        0.5 * l2(a, b, psi, 1.0, &perp)?.bound,
        mp2(a, b, psi)?.bound,
    ])
}

/// Rows of figure 1 or 2 at θ = 2πk/steps, k = 0..steps.
pub fn theta_rows(figure: Figure, steps: usize) -> Result<Vec<[f64; 4]>> {
    if steps == 0 {
        return Err(Error::usage("theta steps must be positive"));
    }
    (0..steps)
        .map(|k| {
            let theta = TAU * k as f64 / steps as f64;
            let f = spin1(theta);
            match figure {
                Figure::One => theta_row(&f.jx, &f.jy, &f.psi, theta),
                Figure::Two => theta_row(&f.jy, &f.jz, &f.psi, theta),
                Figure::Three => Err(Error::usage("figure 3 is a lambda sweep")),
            }
        })
        .collect()
}

/// Rows of figure 3: λ, f(λ) = lhs − ℒ₂(λ), ℒ₂(λ).
pub fn lambda_rows(theta: f64, range: &LambdaRange) -> Result<Vec<[f64; 3]>> {
    if !theta.is_finite() {
        return Err(Error::usage(format!("theta must be finite, got {theta}")));
    }
    let f = spin1(theta);
    let perp = perp_one(&f.psi)?;
    range
        .points()
        .into_iter()
        .map(|lambda| {
            let r = l2(&f.jy, &f.jz, &f.psi, lambda, &perp)?;
            Ok([lambda, r.slack, r.bound])
        })
        .collect()
}

/// Header plus one line per row, `{:.16e}` per value, LF endings.
pub fn to_csv<const N: usize>(header: [&str; N], rows: &[[f64; N]]) -> Result<String> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (k, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::numeric(format!(
                    "non-finite value in column {}",
                    header[k]
                )));
            }
            if k > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").expect("write to String");
        }
        out.push('\n');
    }
    Ok(out)
}

/// CSV text for a figure.
pub fn figure_csv(
    figure: Figure,
    theta_steps: usize,
    theta: f64,
    range: &LambdaRange,
) -> Result<String> {
    match figure {
        Figure::One | Figure::Two => to_csv(THETA_HEADER, &theta_rows(figure, theta_steps)?),
        Figure::Three => to_csv(LAMBDA_HEADER, &lambda_rows(theta, range)?),
    }
}

/// Writes `text` to `path`; I/O failures are precondition errors.
pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::precondition(format!("cannot write {}: {e}", path.display())))
}
