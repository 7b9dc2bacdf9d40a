//! Scans over the weight λ: sup searches, the error function, extremal points.

use crate::error::{Error, Result};
use crate::pair::{l2, l2_saturating_perp, PerpRule};
use crate::state::{variance, Observable, Perp, PureState};

/// Relative width at which golden-section refinement stops.
const REFINE_REL_WIDTH: f64 = 1e-6;

/// Derivative magnitude treated as zero when looking for sign changes. Central
/// differences of an O(1) function with step 1e-5 carry noise near 1e-11.
const DERIVATIVE_ZERO: f64 = 1e-7;

/// Bracket width at which derivative-root bisection stops.
const ROOT_WIDTH: f64 = 1e-8;

/// Central-difference step for derivatives in λ.
pub fn fd_step(lambda: f64) -> f64 {
    1e-5 * lambda.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Log,
    Linear,
}

/// `points` values from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub scale: GridScale,
}

impl Default for GridSpec {
    /// Log-spaced [1e-3, 1e3], 201 points (contains λ = 1 exactly).
    fn default() -> Self {
        GridSpec {
            lo: 1e-3,
            hi: 1e3,
            points: 201,
            scale: GridScale::Log,
        }
    }
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize, scale: GridScale) -> Result<Self> {
        let g = GridSpec {
            lo,
            hi,
            points,
            scale,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo) {
            return Err(Error::usage(format!(
                "grid needs lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.points < 2 {
            return Err(Error::usage("grid needs at least 2 points"));
        }
        if self.scale == GridScale::Log && !(self.lo > 0.0) {
            return Err(Error::usage("log grid needs lo > 0"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|k| {
                if k == 0 {
                    return self.lo;
                }
                if k == n - 1 {
                    return self.hi;
                }
                let t = k as f64 / last;
                match self.scale {
                    GridScale::Linear => self.lo + t * (self.hi - self.lo),
                    GridScale::Log => {
                        let (a, b) = (self.lo.ln(), self.hi.ln());
                        let x = (a + t * (b - a)).exp();
                        // Snap exp(0) rounding noise so symmetric log grids hit λ = 1.
                        if (a + t * (b - a)).abs() < 1e-14 {
                            1.0
                        } else {
                            x
                        }
                    }
                }
            })
            .collect()
    }
}

/// Sampled values of a function of λ and its best point.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaScan {
    pub samples: Vec<(f64, f64)>,
    pub argmax: (f64, f64),
    pub refined: bool,
}

fn eval<F: FnMut(f64) -> Result<f64>>(f: &mut F, lambda: f64) -> Result<f64> {
    let v = f(lambda)?;
    if !v.is_finite() {
        return Err(Error::numeric(format!(
            "non-finite value {v} at lambda = {lambda}"
        )));
    }
    Ok(v)
}

/// Maximizes `f` on `grid`, then refines by golden-section search.
pub fn scan_lambda<F: FnMut(f64) -> Result<f64>>(f: F, grid: &GridSpec) -> Result<LambdaScan> {
    grid.validate()?;
    scan_points(f, &grid.points())
}

/// [`scan_lambda`] over explicit, increasing λ values.
///
/// The first grid maximum wins ties. Refinement runs golden-section search on
/// the interval between the argmax's grid neighbours until its width is at most
/// 1e-6·λ*; the refined point replaces the argmax only if strictly better.
pub fn scan_points<F: FnMut(f64) -> Result<f64>>(mut f: F, points: &[f64]) -> Result<LambdaScan> {
    if points.is_empty() {
        return Err(Error::usage("lambda grid is empty"));
    }
    let mut samples = Vec::with_capacity(points.len());
    for &l in points {
        samples.push((l, eval(&mut f, l)?));
    }
    let mut best = 0;
    for (k, s) in samples.iter().enumerate() {
        if s.1 > samples[best].1 {
            best = k;
        }
    }
    let mut argmax = samples[best];
    let mut refined = false;
    if samples.len() >= 2 {
        let lo = samples[best.saturating_sub(1)].0;
        let hi = samples[(best + 1).min(samples.len() - 1)].0;
        let (l, v) = golden_max(
            &mut f,
            lo,
            hi,
            REFINE_REL_WIDTH * argmax.0.abs().max(f64::MIN_POSITIVE),
        )?;
        refined = true;
        if v > argmax.1 {
            argmax = (l, v);
        }
    }
    Ok(LambdaScan {
        samples,
        argmax,
        refined,
    })
}

/// Golden-section maximization on [lo, hi].
pub fn golden_max<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    mut lo: f64,
    mut hi: f64,
    width: f64,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = eval(f, x1)?;
    let mut f2 = eval(f, x2)?;
    let mut iters = 0;
    while hi - lo > width && iters < 200 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(f, x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(f, x1)?;
        }
        iters += 1;
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// f(λ) = (1+λ)ΔA² + (1+λ⁻¹)ΔB² − ℒ₂(λ) with a fixed perp.
pub fn error_function(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
    perp: &Perp,
) -> Result<f64> {
    let r = l2(a, b, psi, lambda, perp)?;
    Ok(r.slack)
}

/// Error function under a λ-dependent perp rule.
pub fn error_function_with(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    lambda: f64,
    rule: &PerpRule,
) -> Result<f64> {
    match rule {
        PerpRule::Fixed(p) => error_function(a, b, psi, lambda, p),
        PerpRule::Saturating => {
            let p = l2_saturating_perp(a, b, psi, lambda)?;
            error_function(a, b, psi, lambda, &p)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Min,
    Max,
    /// Second difference too small to classify.
    Flat,
}

/// Central difference (f(λ+h) − f(λ−h)) / 2h with h = [`fd_step`].
pub fn derivative<F: FnMut(f64) -> Result<f64>>(f: &mut F, lambda: f64) -> Result<f64> {
    let h = fd_step(lambda);
    Ok((eval(f, lambda + h)? - eval(f, lambda - h)?) / (2.0 * h))
}

fn second_difference<F: FnMut(f64) -> Result<f64>>(f: &mut F, lambda: f64) -> Result<f64> {
    // A wider step than the first derivative keeps rounding noise below curvature.
    let h = (1e-3 * lambda.abs().max(1.0)).min(0.5 * lambda.abs());
    Ok((eval(f, lambda + h)? - 2.0 * eval(f, lambda)? + eval(f, lambda - h)?) / (h * h))
}

/// Interior extrema of `f` on `grid`: sign changes of the central-difference
/// derivative between neighbouring grid points, refined by bisection to 1e-8.
/// Derivative values within 1e-7 of zero do not count as a sign.
pub fn find_extrema<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    grid: &GridSpec,
) -> Result<Vec<(f64, ExtremumKind)>> {
    grid.validate()?;
    let pts = grid.points();
    let mut signed: Vec<(f64, f64)> = Vec::new();
    for &l in &pts {
        // Keep λ − h inside the positive domain of the weighted bounds.
        if l - fd_step(l) <= 0.0 {
            continue;
        }
        let d = derivative(&mut f, l)?;
        if d.abs() > DERIVATIVE_ZERO {
            signed.push((l, d));
        }
    }
    let mut out = Vec::new();
    for w in signed.windows(2) {
        let ((mut lo, dlo), (mut hi, _)) = (w[0], w[1]);
        if dlo.signum() == w[1].1.signum() {
            continue;
        }
        while hi - lo > ROOT_WIDTH {
            let mid = 0.5 * (lo + hi);
            let dm = derivative(&mut f, mid)?;
            if dm.signum() == dlo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        let c = second_difference(&mut f, root)?;
        let kind = if c > DERIVATIVE_ZERO {
            ExtremumKind::Min
        } else if c < -DERIVATIVE_ZERO {
            ExtremumKind::Max
        } else {
            ExtremumKind::Flat
        };
        out.push((root, kind));
    }
    Ok(out)
}

/// Extrema of the error function with a fixed perp.
pub fn find_extremal_lambda(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    perp: &Perp,
    grid: &GridSpec,
) -> Result<Vec<(f64, ExtremumKind)>> {
    find_extrema(|l| error_function(a, b, psi, l, perp), grid)
}

/// Numeric ℒ₂′(1) and ΔA² − ΔB²; λ = 1 is an equilibrium point when they agree.
pub fn equilibrium_gap(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    perp: &Perp,
) -> Result<(f64, f64)> {
    let mut bound = |l: f64| l2(a, b, psi, l, perp).map(|r| r.bound);
    let slope = derivative(&mut bound, 1.0)?;
    Ok((slope, variance(a, psi)? - variance(b, psi)?))
}

/// |ℒ₂′(1) − (ΔA² − ΔB²)| ≤ tol.
pub fn is_equilibrium(
    a: &Observable,
    b: &Observable,
    psi: &PureState,
    perp: &Perp,
    tol: f64,
) -> Result<bool> {
    if !(tol > 0.0) {
        return Err(Error::usage("equilibrium tolerance must be positive"));
    }
    let (slope, diff) = equilibrium_gap(a, b, psi, perp)?;
    Ok((slope - diff).abs() <= tol)
}
