mod common;

use common::{random_affinity, random_interior};
use domset::affinity::{covariance_distance, homogenize, CovarianceDescriptor, NodeScoreVector};
use domset::dsets::{brute_force_dominant_sets, is_dominant_set, peel_off_enumerate, ExtractConfig, PeelStop};
use domset::dynamics::{kkt_residual, solve_local_max, Solver, SolverConfig};
use domset::{quadratic_value, IndexSet};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spd(rng: &mut ChaCha8Rng, d: usize) -> CovarianceDescriptor {
    let g = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    CovarianceDescriptor::new(&g * g.transpose() + DMatrix::identity(d, d) * 0.1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_supports_are_dominant_sets(seed in any::<u64>(), n in 2usize..9, p in 0.3f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_affinity(&mut rng, n, p);
        prop_assume!(!a.is_all_zero());
        let oracle = brute_force_dominant_sets(&a).unwrap();
        let cfg = SolverConfig { tolerance: 1e-12, max_iterations: 200_000, ..SolverConfig::default() };
        for solver in [Solver::InImDyn, Solver::Replicator] {
            let res = solve_local_max(solver, a.as_matrix(), &random_interior(&mut rng, n), &cfg).unwrap();
            prop_assert!(res.converged);
            let support = res.x.support_relative(cfg.zero_tol);
            prop_assert!(oracle.contains(&support), "{:?} gave {:?}, oracle {:?}", solver, support, oracle);
            prop_assert!(is_dominant_set(&a, &support).unwrap().is_dominant);
        }
    }

    #[test]
    fn inimdyn_stops_at_equilibria(seed in any::<u64>(), n in 2usize..30, p in 0.1f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_affinity(&mut rng, n, p);
        let cfg = SolverConfig::default();
        let res = solve_local_max(Solver::InImDyn, a.as_matrix(), &random_interior(&mut rng, n), &cfg).unwrap();
        prop_assert!(res.converged);
        prop_assert!(kkt_residual(a.as_matrix(), &res.x).unwrap() <= cfg.tolerance);
    }

    #[test]
    fn peeled_clusters_are_disjoint(seed in any::<u64>(), n in 2usize..40, p in 0.05f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_affinity(&mut rng, n, p);
        let peel = peel_off_enumerate(&a, PeelStop::default(), &ExtractConfig::default()).unwrap();
        let mut seen = IndexSet::new(std::iter::empty());
        for c in &peel.clusters {
            prop_assert!(c.support.len() >= 2);
            prop_assert!(c.support.is_disjoint(&seen));
            seen = seen.union(&c.support);
        }
        prop_assert!(seen.is_disjoint(&peel.residual));
        prop_assert_eq!(seen.len() + peel.residual.len(), n);
    }

    #[test]
    fn homogenized_form_adds_linear_term(seed in any::<u64>(), n in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_affinity(&mut rng, n, 0.5);
        let b = NodeScoreVector::new((0..n).map(|_| rng.random_range(0.0..2.0)).collect()).unwrap();
        let x = random_interior(&mut rng, n);
        let h = homogenize(&a, &b).unwrap();
        let lhs = (x.as_vector().transpose() * &h * x.as_vector())[(0, 0)];
        let linear: f64 = x.as_slice().iter().zip(b.as_slice()).map(|(u, v)| u * v).sum();
        prop_assert!((lhs - quadratic_value(&a, &x).unwrap() - 2.0 * linear).abs() <= 1e-12);
    }

    #[test]
    fn covariance_distance_invariances(seed in any::<u64>(), d in 1usize..6, s in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c1, c2, c3) = (spd(&mut rng, d), spd(&mut rng, d), spd(&mut rng, d));
        let d12 = covariance_distance(&c1, &c2).unwrap();
        let scaled = |c: &CovarianceDescriptor| CovarianceDescriptor::new(c.as_matrix() * s).unwrap();
        let inverse = |c: &CovarianceDescriptor| CovarianceDescriptor::new(c.as_matrix().clone().try_inverse().unwrap()).unwrap();
        prop_assert!(d12 >= 0.0);
        prop_assert!((covariance_distance(&scaled(&c1), &scaled(&c2)).unwrap() - d12).abs() <= 1e-8);
        prop_assert!((covariance_distance(&inverse(&c1), &inverse(&c2)).unwrap() - d12).abs() <= 1e-8);
        let via = covariance_distance(&c1, &c3).unwrap() + covariance_distance(&c3, &c2).unwrap();
        prop_assert!(d12 <= via + 1e-9);
    }
}
