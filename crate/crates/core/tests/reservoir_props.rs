use proptest::prelude::*;
use qrc_vol::esn::{EchoStateNetwork, EsnConfig, EsnForecaster, EsnState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn inputs(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn states_are_deterministic_and_bounded(seed in any::<u64>(), leak in 0.05f64..1.0, rho in 0.1f64..1.5, d in 1usize..4) {
        let cfg = EsnConfig { n_hidden: 12, leak_rate: leak, spectral_radius: rho, seed, ..EsnConfig::rc() };
        let a = EchoStateNetwork::new(cfg.clone(), d).unwrap();
        let b = EchoStateNetwork::new(cfg, d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = inputs(&mut rng, 60, d);
        let ha = a.features(&xs).unwrap();
        prop_assert_eq!(&ha, &b.features(&xs).unwrap());
        // |h_t| <= sum_k (1-a)^k < 1/a when starting from zero
        for (t, h) in ha.iter().enumerate() {
            let bound = (1.0 - (1.0 - leak).powi(t as i32 + 1)) / leak + 1e-12;
            prop_assert!(h.iter().all(|v| v.is_finite() && v.abs() <= bound));
        }
    }
}

/// Largest state gap after 200 shared inputs from two different starts.
fn forgetting_gap(network: &EchoStateNetwork, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
    let n = network.config().n_hidden;
    let mut a = EsnState::zeros(n);
    let mut b = EsnState { hidden: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };
    for x in inputs(&mut rng, 200, network.n_inputs()) {
        a = network.step(&a, &x).unwrap();
        b = network.step(&b, &x).unwrap();
    }
    a.hidden.iter().zip(&b.hidden).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[test]
fn rcx_forgets_its_initial_state() {
    for seed in 0..10 {
        let gap = forgetting_gap(EsnForecaster::rcx(seed).unwrap().network(), seed);
        assert!(gap <= 1e-6, "seed {seed}: gap {gap:e}");
    }
}

#[test]
fn rc_forgets_its_initial_state() {
    let gaps: Vec<f64> = (0..10).map(|seed| forgetting_gap(EsnForecaster::rc(seed).unwrap().network(), seed)).collect();
    println!("RC state gaps after 200 steps: {gaps:?}");
    for (seed, gap) in gaps.iter().enumerate() {
        assert!(*gap <= 1e-6, "seed {seed}: gap {gap:e}");
    }
}
