//! Seeded random instances and the spin-1 fixture family.
//!
//! Generator: ChaCha20 keyed by a 64-bit seed (`rand_chacha::ChaCha20Rng::seed_from_u64`),
//! Gaussian variates from `rand_distr::StandardNormal`. Substreams are derived with a
//! SplitMix64 finalizer over `(seed, index)`, so streams never share state and any
//! fuzz failure is reproducible from the printed seed alone.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMatrix, CVector, I, ONE, ZERO};
use crate::state::{Observable, PureState};

/// Root of a reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    /// Independent child seed for substream `index`.
    pub fn split(self, index: u64) -> Seed {
        Seed(splitmix64(
            splitmix64(self.0) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03),
        ))
    }

    pub fn rng(self) -> Sampler {
        Sampler {
            rng: ChaCha20Rng::seed_from_u64(self.0),
        }
    }
}

/// A stream of random instances.
pub struct Sampler {
    rng: ChaCha20Rng,
}

impl Sampler {
    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.gaussian(), self.gaussian())
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    /// exp(U[ln lo, ln hi]).
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let (a, b) = (lo.ln(), hi.ln());
        (a + (b - a) * self.uniform()).exp()
    }

    /// Haar-distributed unit vector: normalized i.i.d. complex Gaussians.
    pub fn state(&mut self, dim: usize) -> PureState {
        assert!(dim >= 1, "state dimension must be positive");
        loop {
            let v: Vec<Complex64> = (0..dim).map(|_| self.complex_gaussian()).collect();
            if let Ok(s) = PureState::normalized(CVector::new(v).expect("finite")) {
                return s;
            }
        }
    }

    /// (G + G†)/2 for G with i.i.d. standard complex Gaussian entries.
    pub fn hermitian(&mut self, dim: usize) -> Observable {
        assert!(dim >= 1, "observable dimension must be positive");
        let g: Vec<Complex64> = (0..dim * dim).map(|_| self.complex_gaussian()).collect();
        let g = CMatrix::new(dim, g).expect("finite");
        let mut h = CMatrix::zeros(dim);
        for j in 0..dim {
            h[(j, j)] = Complex64::new(g[(j, j)].re, 0.0);
            for k in j + 1..dim {
                let z = (g[(j, k)] + g[(k, j)].conj()) * 0.5;
                h[(j, k)] = z;
                h[(k, j)] = z.conj();
            }
        }
        Observable::new("H", h).expect("Hermitian by construction")
    }
}

pub fn random_state(dim: usize, seed: Seed) -> PureState {
    seed.rng().state(dim)
}

pub fn random_hermitian(dim: usize, seed: Seed) -> Observable {
    seed.rng().hermitian(dim)
}

pub fn pauli_x() -> Observable {
    let m = CMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
    Observable::new("sigma_x", m).unwrap()
}

pub fn pauli_y() -> Observable {
    let m = CMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
    Observable::new("sigma_y", m).unwrap()
}

pub fn pauli_z() -> Observable {
    let m = CMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]).unwrap();
    Observable::new("sigma_z", m).unwrap()
}

/// Spin-1 angular momentum operators (ħ = 1) with the state
/// cos(θ/2)|0⟩ + sin(θ/2)|2⟩.
#[derive(Debug, Clone)]
pub struct Spin1Fixture {
    pub theta: f64,
    pub jx: Observable,
    pub jy: Observable,
    pub jz: Observable,
    pub psi: PureState,
}

pub fn spin_x() -> Observable {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let m = CMatrix::from_rows(&[vec![ZERO, r, ZERO], vec![r, ZERO, r], vec![ZERO, r, ZERO]]);
    Observable::new("J_x", m.unwrap()).unwrap()
}

pub fn spin_y() -> Observable {
    let r = Complex64::new(0.0, FRAC_1_SQRT_2);
    let m = CMatrix::from_rows(&[vec![ZERO, -r, ZERO], vec![r, ZERO, -r], vec![ZERO, r, ZERO]]);
    Observable::new("J_y", m.unwrap()).unwrap()
}

pub fn spin_z() -> Observable {
    let m = CMatrix::from_rows(&[
        vec![ONE, ZERO, ZERO],
        vec![ZERO, ZERO, ZERO],
        vec![ZERO, ZERO, -ONE],
    ]);
    Observable::new("J_z", m.unwrap()).unwrap()
}

/// cos(θ/2)|0⟩ + sin(θ/2)|2⟩.
pub fn spin1_state(theta: f64) -> PureState {
    let (s, c) = (0.5 * theta).sin_cos();
    PureState::new(CVector::from_real(&[c, 0.0, s]).unwrap()).unwrap()
}

pub fn spin1(theta: f64) -> Spin1Fixture {
    Spin1Fixture {
        theta,
        jx: spin_x(),
        jy: spin_y(),
        jz: spin_z(),
        psi: spin1_state(theta),
    }
}

/// Closed-form variances of the spin-1 fixture, for cross-checking.
pub mod spin1_closed_form {
    pub fn var_jx(theta: f64) -> f64 {
        0.5 * (1.0 + theta.sin())
    }
    pub fn var_jy(theta: f64) -> f64 {
        0.5 * (1.0 - theta.sin())
    }
    pub fn var_jz(theta: f64) -> f64 {
        theta.sin().powi(2)
    }
    pub fn var_jx_plus_jy(_theta: f64) -> f64 {
        1.0
    }
    pub fn var_jy_plus_jz(theta: f64) -> f64 {
        0.5 * (1.0 - theta.sin()) + theta.sin().powi(2)
    }
    pub fn var_jx_plus_jz(theta: f64) -> f64 {
        0.5 * (1.0 + theta.sin()) + theta.sin().powi(2)
    }
    pub fn var_all(theta: f64) -> f64 {
        1.0 + theta.sin().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_hermitian;
    use crate::state::{variance, Observable};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn states_are_unit_and_reproducible() {
        let a = random_state(2, Seed(17));
        assert!((a.amplitudes().norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(a, random_state(2, Seed(17)));
        assert_ne!(a, random_state(2, Seed(18)));
    }

    #[test]
    fn haar_first_moment() {
        let mut rng = Seed(2024).rng();
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| rng.state(2).amplitudes()[0].norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn hermitian_draws() {
        let h = random_hermitian(5, Seed(1));
        assert!(is_hermitian(h.matrix(), 0.0));
        assert_eq!(h, random_hermitian(5, Seed(1)));
        let mut rng = Seed(77).rng();
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| rng.hermitian(4).matrix().trace().re)
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 0.1, "trace mean {mean}");
    }

    #[test]
    fn split_streams_differ() {
        let root = Seed(42);
        assert_ne!(root.split(0), root.split(1));
        assert_eq!(root.split(5), root.split(5));
        assert_ne!(root.split(0), Seed(43).split(0));
    }

    #[test]
    fn spin_matrices_are_hermitian() {
        for o in [spin_x(), spin_y(), spin_z()] {
            assert!(is_hermitian(o.matrix(), 1e-10));
        }
    }

    #[test]
    fn spin1_variance_examples() {
        let f = spin1(0.0);
        assert_eq!(variance(&f.jz, &f.psi).unwrap(), 0.0);
        let f = spin1(FRAC_PI_2);
        assert!((variance(&f.jx, &f.psi).unwrap() - 1.0).abs() < 1e-15);
        assert!(variance(&f.jy, &f.psi).unwrap() < 1e-15);
    }

    #[test]
    fn spin1_closed_forms_on_grid() {
        use spin1_closed_form as cf;
        for k in 0..1000 {
            let theta = 2.0 * PI * k as f64 / 1000.0;
            let f = spin1(theta);
            let xy = Observable::sum(&f.jx, &f.jy).unwrap();
            let yz = Observable::sum(&f.jy, &f.jz).unwrap();
            let xz = Observable::sum(&f.jx, &f.jz).unwrap();
            let all =
                Observable::combination("S", &[(1.0, &f.jx), (1.0, &f.jy), (1.0, &f.jz)]).unwrap();
            let cases: [(&Observable, f64); 7] = [
                (&f.jx, cf::var_jx(theta)),
                (&f.jy, cf::var_jy(theta)),
                (&f.jz, cf::var_jz(theta)),
                (&xy, cf::var_jx_plus_jy(theta)),
                (&yz, cf::var_jy_plus_jz(theta)),
                (&xz, cf::var_jx_plus_jz(theta)),
                (&all, cf::var_all(theta)),
            ];
            for (o, expected) in cases {
                let v = variance(o, &f.psi).unwrap();
                assert!(
                    (v - expected).abs() <= 1e-12,
                    "{} at {theta}: {v} vs {expected}",
                    o.name()
                );
            }
        }
    }
}
