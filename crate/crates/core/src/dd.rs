//! Complex double-double arithmetic on top of `twofloat`.
//!
//! Used where exact identities are checked or nearly saturated bounds are
//! compared at magnitudes (weight ratios up to 10⁶) where f64 rounding alone
//! exceeds the 1e-9 absolute tolerance. Inputs are f64 and converted exactly.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::linalg::{CMatrix, CVector};

pub fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

/// 1/x accurate to double-double precision. The library quotient carries
/// only about f64 accuracy, so the leading quotient is refined by long division.
pub fn recip(x: TwoFloat) -> TwoFloat {
    let q0 = 1.0 / x.hi();
    let r = dd(1.0) - x * q0;
    let q1 = r.hi() / x.hi();
    let r = r - x * q1;
    let q2 = r.hi() / x.hi();
    dd(q0) + q1 + q2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dc {
    pub re: TwoFloat,
    pub im: TwoFloat,
}

impl Dc {
    pub const ZERO: Dc = Dc {
        re: TwoFloat::from_f64(0.0),
        im: TwoFloat::from_f64(0.0),
    };

    pub fn conj(self) -> Dc {
        Dc {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn scale(self, c: TwoFloat) -> Dc {
        Dc {
            re: self.re * c,
            im: self.im * c,
        }
    }

    pub fn norm_sqr(self) -> TwoFloat {
        self.re * self.re + self.im * self.im
    }
}

impl Add for Dc {
    type Output = Dc;
    fn add(self, o: Dc) -> Dc {
        Dc {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Dc {
    type Output = Dc;
    fn sub(self, o: Dc) -> Dc {
        Dc {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Dc {
    type Output = Dc;
    fn mul(self, o: Dc) -> Dc {
        Dc {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl From<Complex64> for Dc {
    fn from(z: Complex64) -> Self {
        Dc {
            re: dd(z.re),
            im: dd(z.im),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcVec(pub Vec<Dc>);

impl DcVec {
    pub fn from_cvector(v: &CVector) -> Self {
        DcVec(v.entries().iter().map(|&z| Dc::from(z)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        DcVec(vec![Dc::ZERO; dim])
    }

    /// m·v with the f64 matrix entries taken as exact.
    pub fn apply(m: &CMatrix, v: &DcVec) -> Self {
        DcVec(
            (0..m.dim())
                .map(|j| {
                    m.row(j)
                        .iter()
                        .zip(&v.0)
                        .fold(Dc::ZERO, |acc, (&x, &y)| acc + Dc::from(x) * y)
                })
                .collect(),
        )
    }

    /// ⟨self|o⟩, conjugate-linear in `self`.
    pub fn inner(&self, o: &DcVec) -> Dc {
        self.0
            .iter()
            .zip(&o.0)
            .fold(Dc::ZERO, |acc, (a, b)| acc + a.conj() * *b)
    }

    pub fn norm_sqr(&self) -> TwoFloat {
        self.0.iter().fold(dd(0.0), |acc, z| acc + z.norm_sqr())
    }

    pub fn scale(&self, c: TwoFloat) -> DcVec {
        DcVec(self.0.iter().map(|z| z.scale(c)).collect())
    }

    pub fn add(&self, o: &DcVec) -> DcVec {
        DcVec(self.0.iter().zip(&o.0).map(|(a, b)| *a + *b).collect())
    }

    /// self − c·o.
    pub fn sub_scaled(&self, c: Dc, o: &DcVec) -> DcVec {
        DcVec(self.0.iter().zip(&o.0).map(|(a, b)| *a - c * *b).collect())
    }

    /// self / ‖self‖; zero stays zero.
    pub fn normalized(&self) -> DcVec {
        let n = self.norm_sqr();
        if n == dd(0.0) {
            return self.clone();
        }
        self.scale(recip(n.sqrt()))
    }
}
