use east_core::model::sample_equilibrium;
use east_core::rng::Purpose;
use east_core::simulate::{run_graphical, track_distinguished, Mode, Probes};
use east_core::stats::chi_square_homogeneity;
use east_core::{Boundary, Configuration, EstimateCI, Interval, ModelParams, ReplicaRunner, Sequential, StreamSeed};

const SEED: u64 = 7;

fn final_histogram(p: &ModelParams, len: usize, t: f64, mode: Mode, replicas: u64) -> Vec<u64> {
    let window = Interval::from_len(len).unwrap();
    let full = Configuration::filled(window, Boundary::FrozenZeroRight);
    let ends = Sequential.run(replicas, |r| {
        let st = run_graphical(&full, p, t, &Probes::default(), StreamSeed::new(SEED, r), mode).unwrap();
        st.final_state.unwrap().index().unwrap()
    });
    let mut h = vec![0; 1 << len];
    for e in ends {
        h[e as usize] += 1;
    }
    h
}

#[test]
fn both_modes_give_the_same_law() {
    let p = ModelParams::new(0.4).unwrap();
    let a = final_histogram(&p, 4, 3.0, Mode::Faithful, 20_000);
    let b = final_histogram(&p, 4, 3.0, Mode::RejectionFree, 20_000);
    let (chi, df) = chi_square_homogeneity(&a, &b);
    // 0.999 quantile of chi-square with 15 degrees of freedom
    assert_eq!(df, 15);
    assert!(chi < 37.7, "chi2 = {chi}");
}

#[test]
fn equilibrium_is_preserved() {
    let q = 0.3;
    let p = ModelParams::new(q).unwrap();
    let window = Interval::from_len(8).unwrap();
    for mode in [Mode::Faithful, Mode::RejectionFree] {
        let v = Sequential.run(20_000, |r| {
            let s = StreamSeed::new(SEED, r);
            let init = sample_equilibrium(&p, window, Boundary::FrozenZeroRight, &mut s.rng(Purpose::Initial));
            let end = run_graphical(&init, &p, 4.0, &Probes::default(), s, mode).unwrap().final_state.unwrap();
            (8 - end.count_occupied()) as f64 / 8.0
        });
        assert!(EstimateCI::from_samples(&v).agrees_with(q, 4.0, 0.0));
    }
}

// Left of the distinguished zero the law stays product Bernoulli, in either mode.
#[test]
fn product_law_left_of_the_distinguished_zero() {
    let q = 0.4;
    let p = ModelParams::new(q).unwrap();
    let window = Interval::new(0, 15).unwrap();
    let start = 6;
    for mode in [Mode::Faithful, Mode::RejectionFree] {
        let runs = Sequential.run(10_000, |r| {
            let s = StreamSeed::new(SEED, r);
            let mut init = sample_equilibrium(&p, window, Boundary::FrozenZeroRight, &mut s.rng(Purpose::Initial));
            init.set(start, false).unwrap();
            let probes = Probes { sample_times: vec![3.0], sites: (0..start).collect(), ..Probes::default() };
            let (st, path) = track_distinguished(&init, start, &p, 3.0, &probes, s, mode).unwrap();
            (path.position_at(3.0), st.occupation[0].clone())
        });
        for y in 0..start {
            let v: Vec<f64> =
                runs.iter().filter(|(xi, _)| y < *xi).map(|(_, o)| (!o[y as usize]) as u8 as f64).collect();
            assert!(EstimateCI::from_samples(&v).agrees_with(q, 4.0, 0.0), "site {y} in {mode:?}");
        }
    }
}
