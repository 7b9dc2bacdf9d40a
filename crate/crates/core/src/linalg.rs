//! Dense complex vectors and square matrices for small Hilbert spaces.
//!
//! Storage is a flat `Vec<Complex64>` (row-major for matrices). Sizes of interest
//! are d ≤ 64, so everything is a plain loop.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_finite(entries: &[Complex64]) -> Result<()> {
    match entries
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        Some(k) => Err(Error::numeric(format!("non-finite entry at index {k}"))),
        None => Ok(()),
    }
}

/// A column vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    entries: Vec<Complex64>,
}

impl CVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::usage("vector dimension must be positive"));
        }
        check_finite(&entries)?;
        Ok(CVector { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        CVector {
            entries: vec![ZERO; dim],
        }
    }

    /// The computational basis vector |k⟩.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[k] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> CVector {
        CVector {
            entries: self.entries.iter().map(|&z| c * z).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> CVector {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self + c·other`. Panics on dimension mismatch.
    pub fn axpy(&self, c: Complex64, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        CVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + c * b)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &CVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;
    fn index(&self, k: usize) -> &Complex64 {
        &self.entries[k]
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        self.axpy(ONE, rhs)
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        self.axpy(-ONE, rhs)
    }
}

/// ⟨u|v⟩ = Σ conj(u_k) v_k, conjugate-linear in the first argument.
pub fn inner(u: &CVector, v: &CVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::usage(format!(
            "inner product of vectors with dimensions {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    Ok(u.entries
        .iter()
        .zip(&v.entries)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("matrix dimension must be positive"));
        }
        if entries.len() != dim * dim {
            return Err(Error::usage(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        check_finite(&entries)?;
        Ok(CMatrix { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::usage(
                "matrix rows must all have length equal to the row count",
            ));
        }
        Self::new(dim, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        CMatrix {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        &self.entries[j * self.dim..(j + 1) * self.dim]
    }

    pub fn adjoint(&self) -> CMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for j in 0..n {
            for k in 0..n {
                out[(k, j)] = self[(j, k)].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| c * z).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> CMatrix {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self + c·other`. Panics on dimension mismatch.
    pub fn axpy(&self, c: Complex64, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        CMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + c * b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.dim != other.dim {
            return Err(Error::usage(format!(
                "matrix product of dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for j in 0..n {
            for l in 0..n {
                let a = self[(j, l)];
                if a == ZERO {
                    continue;
                }
                for k in 0..n {
                    out.entries[j * n + k] += a * other.entries[l * n + k];
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (j, k): (usize, usize)) -> &Complex64 {
        &self.entries[j * self.dim + k]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (j, k): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[j * self.dim + k]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.axpy(ONE, rhs)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.axpy(-ONE, rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul<&CVector> for &CMatrix {
    type Output = CVector;
    /// Panicking form of [`apply`].
    fn mul(self, v: &CVector) -> CVector {
        apply(self, v).expect("dimension mismatch")
    }
}

/// Matrix-vector product M·v.
pub fn apply(m: &CMatrix, v: &CVector) -> Result<CVector> {
    if m.dim != v.dim() {
        return Err(Error::usage(format!(
            "applying a {0}x{0} matrix to a vector of dimension {1}",
            m.dim,
            v.dim()
        )));
    }
    let entries = (0..m.dim)
        .map(|j| m.row(j).iter().zip(v.entries()).map(|(a, b)| a * b).sum())
        .collect();
    Ok(CVector { entries })
}

/// True iff max |M_jk − conj(M_kj)| ≤ tol.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermitian_defect(m) <= tol
}

/// max |M_jk − conj(M_kj)|.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.dim;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}
