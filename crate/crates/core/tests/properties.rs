use entdist::convexroof::{mixing_param_count, realize_ensemble};
use entdist::cvmode::{cv_ed, symmetric_cat, CatSpec, Cutoff};
use entdist::fsmetric::{entanglement_distance, metric_tensor, LocalStatistics};
use entdist::locc::{check_monotonicity, per_qubit_monotonicity, random_unilocal_measurement};
use entdist::random::{random_density_matrix, random_frame, random_local_unitaries, random_state, rng};
use entdist::C64;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ed_is_bounded_and_lu_invariant(seed in any::<u64>(), m in 1usize..=6, phase in 0.0..6.3f64) {
        let mut r = rng(seed);
        let psi = random_state(&mut r, m);
        let rep = entanglement_distance(&psi);
        prop_assert!(rep.total >= -1e-12 && rep.total <= m as f64 + 1e-12);
        prop_assert!(rep.per_qubit.iter().all(|e| (-1e-12..=1.0 + 1e-12).contains(e)));
        let moved = psi.apply_local_unitaries(&random_local_unitaries(&mut r, m)).unwrap().with_global_phase(phase);
        prop_assert!((entanglement_distance(&moved).total - rep.total).abs() < 1e-10);
    }

    #[test]
    fn optimal_frame_minimizes_trace(seed in any::<u64>(), m in 2usize..=5) {
        let mut r = rng(seed);
        let psi = random_state(&mut r, m);
        let rep = entanglement_distance(&psi);
        prop_assert!((rep.em.trace() - rep.total).abs() < 1e-10);
        let g = metric_tensor(&psi, &random_frame(&mut r, m)).unwrap();
        prop_assert!(g.trace() >= rep.total - 1e-10);
        prop_assert!(g.symmetry_error() < 1e-12);
        prop_assert!(g.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn fast_metric_agrees_with_correlators(seed in any::<u64>(), m in 2usize..=5) {
        let mut r = rng(seed);
        let psi = random_state(&mut r, m);
        let frame = random_frame(&mut r, m);
        let stats = LocalStatistics::new(&psi);
        let direct = stats.metric(frame.vectors());
        prop_assert!(metric_tensor(&psi, &frame).unwrap().max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn measurements_never_raise_average_ed(seed in any::<u64>(), m in 2usize..=4, complete in any::<bool>()) {
        let mut r = rng(seed);
        let psi = random_state(&mut r, m);
        let q = (seed % m as u64) as usize;
        let k = random_unilocal_measurement(seed.rotate_left(17), q, complete);
        prop_assert!(check_monotonicity(&psi, &k).unwrap() >= -1e-9);
        for (mu, margin) in per_qubit_monotonicity(&psi, &k).unwrap().into_iter().enumerate() {
            if mu != q {
                prop_assert!(margin >= -1e-9);
            }
        }
    }

    #[test]
    fn ensembles_reproduce_the_state(seed in any::<u64>(), rank in 1usize..=3, extra in 0usize..=2) {
        let mut r = rng(seed);
        let rho = random_density_matrix(&mut r, 2, rank);
        let size = rank + extra;
        let params: Vec<f64> = (0..mixing_param_count(size)).map(|_| r.random_range(-3.0..3.0)).collect();
        let ens = realize_ensemble(&rho, size, &params).unwrap();
        prop_assert!((ens.total_weight() - 1.0).abs() < 1e-10);
        prop_assert!(ens.density_matrix().unwrap().max_abs_diff(&rho) < 1e-8);
    }

    #[test]
    fn cat_ed_matches_closed_form(a in -2.0..2.0f64, b in -2.0..2.0f64, c in -2.0..2.0f64, d in -2.0..2.0f64) {
        let spec = CatSpec::new(C64::new(a, b), C64::new(c, d)).unwrap();
        let e = cv_ed(&symmetric_cat(&spec, Cutoff::Auto).unwrap());
        prop_assert!((e - spec.closed_form_ed()).abs() < 1e-7);
    }
}
