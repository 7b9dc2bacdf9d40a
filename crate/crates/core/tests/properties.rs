use proptest::prelude::*;

use wunc::fuzz::random_perp;
use wunc::multi::{self, MultiInstance};
use wunc::pair::{self, l1, l2, mp1, mp2, theorem3, weighted_pair_lhs};
use wunc::sampling::Seed;
use wunc::state::variance;
use wunc::{Observable, Perp, PureState};

struct Case {
    a: Observable,
    b: Observable,
    psi: PureState,
    u: Perp,
}

fn case(seed: u64, dim: usize) -> Case {
    let mut rng = Seed(seed).rng();
    let a = rng.hermitian(dim);
    let b = rng.hermitian(dim);
    let psi = rng.state(dim);
    let u = random_perp(&mut rng, &psi).unwrap();
    Case { a, b, psi, u }
}

fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn l2_never_exceeds_lhs(seed in any::<u64>(), dim in 2usize..7, lambda in 1e-3f64..1e3) {
        let c = case(seed, dim);
        let r = l2(&c.a, &c.b, &c.psi, lambda, &c.u).unwrap();
        prop_assert!(r.slack >= -1e-9, "{r:?}");
        prop_assert!(r.terms.iter().all(|t| t.value >= 0.0));
    }

    #[test]
    fn half_l2_dominates_mp2(seed in any::<u64>(), dim in 2usize..7) {
        let c = case(seed, dim);
        let half = 0.5 * l2(&c.a, &c.b, &c.psi, 1.0, &c.u).unwrap().bound;
        prop_assert!(half >= mp2(&c.a, &c.b, &c.psi).unwrap().bound - 1e-12);
    }

    #[test]
    fn l2_scales_quadratically(seed in any::<u64>(), dim in 2usize..7, lambda in 0.01f64..100.0, s in 0.1f64..10.0) {
        let c = case(seed, dim);
        let base = l2(&c.a, &c.b, &c.psi, lambda, &c.u).unwrap();
        let scaled = l2(&c.a.scaled(s), &c.b.scaled(s), &c.psi, lambda, &c.u).unwrap();
        prop_assert!(close(scaled.bound, s * s * base.bound, 1e-10));
        prop_assert!(close(scaled.lhs, s * s * base.lhs, 1e-10));
    }

    #[test]
    fn l1_at_unit_weight_doubles_mp1(seed in any::<u64>(), dim in 2usize..7) {
        let c = case(seed, dim);
        let r1 = l1(&c.a, &c.b, &c.psi, 1.0, &c.u, &c.u).unwrap();
        let m1 = mp1(&c.a, &c.b, &c.psi, &c.u).unwrap();
        prop_assert!(close(r1.bound, 2.0 * m1.bound, 1e-10), "{} vs {}", r1.bound, m1.bound);
        prop_assert!(close(r1.lhs, 2.0 * m1.lhs, 1e-10));
    }

    #[test]
    fn mp2_is_half_sum_variance(seed in any::<u64>(), dim in 2usize..7) {
        let c = case(seed, dim);
        let s = Observable::sum(&c.a, &c.b).unwrap();
        let want = 0.5 * variance(&s, &c.psi).unwrap();
        prop_assert!(close(mp2(&c.a, &c.b, &c.psi).unwrap().bound, want, 1e-12));
    }

    #[test]
    fn commutator_term_is_nonnegative(seed in any::<u64>(), dim in 2usize..7, lambda in 1e-3f64..1e3) {
        let c = case(seed, dim);
        let r = l1(&c.a, &c.b, &c.psi, lambda, &c.u, &c.u).unwrap();
        prop_assert!(r.term("commutator").unwrap() >= 0.0);
        prop_assert!(r.slack >= -1e-9);
    }

    #[test]
    fn weighted_lhs_is_affine_in_weights(seed in any::<u64>(), dim in 2usize..7, lambda in 1e-3f64..1e3) {
        let c = case(seed, dim);
        let (va, vb) = (variance(&c.a, &c.psi).unwrap(), variance(&c.b, &c.psi).unwrap());
        let lhs = weighted_pair_lhs(&c.a, &c.b, &c.psi, lambda).unwrap();
        prop_assert!(close(lhs, (1.0 + lambda) * va + (1.0 + 1.0 / lambda) * vb, 1e-12));
    }

    #[test]
    fn theorem3_takes_the_larger(seed in any::<u64>(), dim in 2usize..7, lambda in 1e-2f64..1e2) {
        let c = case(seed, dim);
        let b1 = l1(&c.a, &c.b, &c.psi, lambda, &c.u, &c.u).unwrap().bound;
        let b2 = l2(&c.a, &c.b, &c.psi, lambda, &c.u).unwrap().bound;
        let t = theorem3(&c.a, &c.b, &c.psi, lambda, (&c.u, &c.u), &c.u).unwrap();
        prop_assert_eq!(t.bound, b1.max(b2));
    }

    #[test]
    fn saturating_perps_reach_equality(seed in any::<u64>(), dim in 2usize..7, lambda in 1e-2f64..1e2) {
        let c = case(seed, dim);
        let p = pair::l2_saturating_perp(&c.a, &c.b, &c.psi, lambda).unwrap();
        prop_assume!(!p.is_degenerate());
        prop_assert!(l2(&c.a, &c.b, &c.psi, lambda, &p).unwrap().saturated);
        let (p1, p2) = pair::l1_saturating_perps(&c.a, &c.b, &c.psi, lambda).unwrap();
        prop_assume!(!p1.is_degenerate() && !p2.is_degenerate());
        prop_assert!(l1(&c.a, &c.b, &c.psi, lambda, &p1, &p2).unwrap().saturated);
    }

    #[test]
    fn multi_bounds_hold(seed in any::<u64>(), dim in 2usize..6, n in 2usize..5) {
        let mut rng = Seed(seed).rng();
        let obs = (0..n).map(|k| rng.hermitian(dim).with_name(format!("A{k}"))).collect();
        let psi = rng.state(dim);
        let weights = (0..n).map(|_| rng.log_uniform(0.1, 10.0)).collect();
        let u = random_perp(&mut rng, &psi).unwrap();
        let m = MultiInstance::new(obs, psi, weights).unwrap();
        prop_assert!(multi::lemma1(&m).unwrap().slack >= -1e-9);
        prop_assert!(multi::l0(&m, &u).unwrap().slack >= -1e-9);
        prop_assert!(multi::multi_parallelogram_residual(&m).unwrap() <= 1e-9);
    }
}
