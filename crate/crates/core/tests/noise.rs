use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrp_qaoa::sim::{apply_noisy_gate, depolarizing_max, sample, Gate, Gate1, Gate2};
use vrp_qaoa::{DensityMatrix, NoiseModel, QuantumState, StateVector};

fn random_state(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mix = Vec::new();
    for _ in 0..3 {
        let mut psi = StateVector::uniform(n);
        for q in 0..n {
            psi.apply_gate(&Gate::One(q, Gate1::Rx(rng.random_range(-3.0..3.0))))
                .unwrap();
            psi.apply_gate(&Gate::One(q, Gate1::Rz(rng.random_range(-3.0..3.0))))
                .unwrap();
        }
        psi.apply_gate(&Gate::Two(0, n - 1, Gate2::Cnot)).unwrap();
        mix.push((rng.random_range(0.1..1.0), psi));
    }
    let total: f64 = mix.iter().map(|(w, _)| w).sum();
    let mix: Vec<_> = mix.into_iter().map(|(w, s)| (w / total, s)).collect();
    DensityMatrix::mixture(&mix).unwrap()
}

#[test]
fn full_depolarization_of_one_qubit() {
    let mut rho = DensityMatrix::zero(1);
    rho.depolarize(&[0], 1.0).unwrap();
    assert!(rho.max_abs_diff(&DensityMatrix::maximally_mixed(1)) < 1e-15);
}

#[test]
fn zero_strength_is_identity() {
    let rho = random_state(3, 1);
    let mut copy = rho.clone();
    copy.depolarize(&[0, 2], 0.0).unwrap();
    assert_eq!(rho.max_abs_diff(&copy), 0.0);
}

#[test]
fn out_of_range_strength_rejected() {
    let mut rho = DensityMatrix::zero(2);
    assert!(rho.depolarize(&[0], depolarizing_max(1) + 1e-9).is_err());
    assert!(rho.depolarize(&[0, 1], -0.1).is_err());
    assert!(rho.depolarize(&[0], depolarizing_max(1)).is_ok());
}

#[test]
fn uniform_sampling_concentrates() {
    let probs = vec![1.0 / 64.0; 64];
    let h = sample(&probs, 100_000, 7).unwrap();
    for i in 0..64 {
        assert!((h.frequency(i) - 1.0 / 64.0).abs() < 0.004);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn depolarizing_keeps_trace_and_lowers_purity(
        seed in 0u64..1000,
        lambda in 0.0f64..=1.0,
        two in any::<bool>(),
    ) {
        let mut rho = random_state(3, seed);
        let before = rho.purity();
        let targets: &[usize] = if two { &[0, 2] } else { &[1] };
        rho.depolarize(targets, lambda).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.trace().im.abs() < 1e-12);
        prop_assert!(rho.purity() <= before + 1e-12);
        prop_assert!(rho.hermiticity_error() < 1e-12);
    }

    #[test]
    fn noisy_gates_never_purify(seed in 0u64..1000) {
        let noise = NoiseModel::reference();
        let mut rho = random_state(3, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut purity = rho.purity();
        for _ in 0..10 {
            let gate = match rng.random_range(0..3) {
                0 => Gate::One(rng.random_range(0..3), Gate1::Rx(rng.random_range(-3.0..3.0))),
                1 => Gate::Two(0, 1, Gate2::Rzz(rng.random_range(-3.0..3.0))),
                _ => Gate::Two(2, 1, Gate2::Ryy(rng.random_range(-3.0..3.0))),
            };
            apply_noisy_gate(&mut rho, &gate, &noise).unwrap();
            prop_assert!(rho.purity() <= purity + 1e-12);
            purity = rho.purity();
        }
    }
}
