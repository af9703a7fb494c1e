use blockpythag::partition::{pinwheel5, Pinwheel5Sizes};
use blockpythag::random::{random_compatible, random_matrix, rng};
use blockpythag::search::{feasibility_search, random_point, retract, Objective, SearchConfig, SearchMethod};
use blockpythag::PartitionedMatrix;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn retraction_lands_on_isometries(seed in any::<u64>(), rows in 1usize..10, cols in 1usize..10) {
        prop_assume!(cols <= rows);
        let v = random_matrix(&mut rng(seed), rows, cols);
        let u = retract(&v).unwrap();
        prop_assert!(u.isometry_defect() <= 1e-12 * rows as f64);
    }

    #[test]
    fn objective_traces_are_monotone(seed in any::<u64>(), d in 2usize..=6, dp in 2usize..=6, lm in any::<bool>()) {
        let mut r = rng(seed);
        let p = random_compatible(&mut r, d, dp, false);
        let pm = PartitionedMatrix::new(random_matrix(&mut r, d, dp), p).unwrap();
        let cfg = SearchConfig {
            method: if lm { SearchMethod::LevenbergMarquardt } else { SearchMethod::Gradient },
            iterations: 60,
            restarts: 1,
            seed,
            record_trace: true,
            ..SearchConfig::default()
        };
        let res = feasibility_search(&pm, &cfg).unwrap();
        let trace = res.objective_trace.unwrap();
        for w in trace.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-300);
        }
        for e in &res.isometry_defects {
            prop_assert!(*e <= 1e-10);
        }
    }

    #[test]
    fn search_reports_its_own_residual(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pm = PartitionedMatrix::new(random_matrix(&mut r, 5, 5), pinwheel5(Pinwheel5Sizes::default()).unwrap()).unwrap();
        let cfg = SearchConfig { seed, restarts: 2, iterations: 150, ..SearchConfig::default() };
        let res = feasibility_search(&pm, &cfg).unwrap();
        let value = Objective::new(&pm).value(&res.point);
        prop_assert!((value.sqrt() - res.best_residual).abs() <= 1e-9 * (1.0 + res.best_residual));
    }
}

#[test]
fn random_points_are_isometries() {
    let mut r = rng(9);
    let pm = PartitionedMatrix::new(random_matrix(&mut r, 5, 5), pinwheel5(Pinwheel5Sizes::default()).unwrap()).unwrap();
    for u in random_point(&pm, &mut r) {
        assert_eq!(u.rows(), 5);
        assert!(u.isometry_defect() < 1e-12);
    }
}

#[test]
fn isometries_stay_tight_over_long_runs() {
    let mut r = rng(10);
    for (rows, cols) in [(5, 2), (8, 3), (6, 6)] {
        let mut u = retract(&random_matrix(&mut r, rows, cols)).unwrap();
        for _ in 0..10_000 {
            u = retract(&(&u + &random_matrix(&mut r, rows, cols).scale(0.05))).unwrap();
        }
        assert!(u.isometry_defect() <= 1e-12, "{rows}x{cols}: {:e}", u.isometry_defect());
    }
}
