use east_core::exact::{
    dirichlet_form, generator_quadratic_form, hitting_survival, leftmost_zero_law, spectral_gap, FunctionOnConfigs,
    Flavor, SparseGenerator,
};
use east_core::reach::{certify_energy_barrier, enumerate_reachable, Barrier};
use east_core::ModelParams;
use proptest::prelude::*;

fn plain(len: usize, q: f64) -> SparseGenerator {
    SparseGenerator::build(len, &ModelParams::new(q).unwrap(), Flavor::Plain).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generator_is_reversible(len in 1usize..=9, q in 0.01f64..0.99) {
        let g = plain(len, q);
        prop_assert!(g.max_row_sum() <= 1e-12);
        prop_assert!(g.max_detailed_balance_defect() <= 1e-12);
    }

    #[test]
    fn dirichlet_form_matches_generator(len in 1usize..=8, q in 0.05f64..0.95, seed in any::<u64>()) {
        let p = ModelParams::new(q).unwrap();
        let g = plain(len, q);
        // cheap deterministic scramble, enough to get varied f
        let f = FunctionOnConfigs::from_fn(len, |s| {
            let h = (s as u64 ^ seed).wrapping_mul(0x9e37_79b9_7f4a_7c15);
            (h >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .unwrap();
        let d = dirichlet_form(&p, &f).unwrap();
        prop_assert!(d >= -1e-14);
        prop_assert!((d + generator_quadratic_form(&g, &f).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn leftmost_zero_law_is_a_distribution(len in 3usize..=14, q in 0.01f64..0.99) {
        let law = leftmost_zero_law(len, &ModelParams::new(q).unwrap()).unwrap();
        prop_assert!((law.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(law.iter().all(|&w| w >= 0.0));
    }
}

#[test]
fn gap_shrinks_with_the_window() {
    for q in [0.2, 0.5, 0.8] {
        let gaps: Vec<f64> = (1..=9).map(|l| spectral_gap(&plain(l, q)).unwrap().gap).collect();
        assert!((gaps[0] - 1.0).abs() < 1e-12);
        for w in gaps.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "{gaps:?}");
        }
    }
}

#[test]
fn hitting_a_vacancy_at_the_origin() {
    let p = ModelParams::new(0.3).unwrap();
    for len in 1..=6 {
        let c = hitting_survival(len, &p, |s| s & 1 == 0, &[0.5, 1.0, 3.0], 1e-10).unwrap();
        assert!(c.holds);
        assert!(c.survival.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn zero_budget_reach() {
    for n in 1..=4 {
        let r = enumerate_reachable(n).unwrap();
        assert_eq!(r.ell, (1 << n) - 1);
        assert_eq!(r.counts.iter().sum::<u64>(), r.total);
    }
    assert!(matches!(certify_energy_barrier(7, 3).unwrap(), Barrier::Reachable));
    assert!(matches!(certify_energy_barrier(8, 3).unwrap(), Barrier::Unreachable));
}
