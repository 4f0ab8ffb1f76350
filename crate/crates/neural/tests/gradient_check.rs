use hrl_neural::{backward, forward, init_params, Architecture, NetworkParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-4;

/// Scalar probe loss `sum_k c_k q_k`, whose gradient w.r.t. the outputs is `c`.
fn probe_loss(params: &NetworkParams, input: &[f64], c: &[f64]) -> f64 {
    let q = params.predict(input).unwrap();
    q.iter().zip(c).map(|(a, b)| a * b).sum()
}

fn central_difference(params: &NetworkParams, input: &[f64], c: &[f64], index: usize) -> f64 {
    let mut p = params.clone();
    let base = p.get_flat(index);
    p.set_flat(index, base + EPS);
    let up = probe_loss(&p, input, c);
    p.set_flat(index, base - EPS);
    let down = probe_loss(&p, input, c);
    (up - down) / (2.0 * EPS)
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-5)
}

fn random_case(rng: &mut ChaCha8Rng, arch: &Architecture) -> (NetworkParams, Vec<f64>, Vec<f64>) {
    let params = init_params(arch, rng.random()).unwrap();
    let input: Vec<f64> = (0..arch.input_len())
        .map(|_| rng.random_range(-1.5..1.5))
        .collect();
    let c: Vec<f64> = (0..arch.output_dim)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    (params, input, c)
}

#[test]
fn every_parameter_of_small_networks_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let archs = [
        Architecture::lstm(3, 3, 2, &[4], 2),
        Architecture::lstm(2, 3, 3, &[3, 2], 3),
        Architecture::dense(3, 3, 4, &[5], 2),
        Architecture::dense(4, 1, 3, &[], 6),
    ];
    for arch in &archs {
        let (params, input, c) = random_case(&mut rng, arch);
        let (_, trace) = forward(&params, &input).unwrap();
        let grads = backward(&params, &trace, &c).unwrap();
        for i in 0..params.param_count() {
            let fd = central_difference(&params, &input, &c, i);
            let bp = grads.get_flat(i);
            assert!(
                relative_error(fd, bp) < 1e-4,
                "{arch:?} param {i}: fd {fd} bp {bp}"
            );
        }
    }
}

#[test]
fn lstm_grid_sampled_parameters_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for input_dim in [14, 17] {
        for units in [8, 32] {
            for hidden in [vec![16], vec![12, 8]] {
                let arch = Architecture::lstm(input_dim, 3, units, &hidden, 3);
                let (params, input, c) = random_case(&mut rng, &arch);
                let (_, trace) = forward(&params, &input).unwrap();
                let grads = backward(&params, &trace, &c).unwrap();
                for _ in 0..60 {
                    let i = rng.random_range(0..params.param_count());
                    let err = relative_error(
                        central_difference(&params, &input, &c, i),
                        grads.get_flat(i),
                    );
                    worst = worst.max(err);
                }
            }
        }
    }
    assert!(worst < 1e-4, "worst relative error {worst}");
}

#[test]
fn extreme_inputs_stay_finite() {
    let arch = Architecture::lstm(16, 3, 8, &[8], 3);
    let params = init_params(&arch, 1).unwrap();
    for scale in [1e3, 1e6, -1e8] {
        let input: Vec<f64> = (0..48).map(|i| scale * ((i % 7) as f64 - 3.0)).collect();
        let (q, trace) = forward(&params, &input).unwrap();
        assert!(q.iter().all(|v| v.is_finite()));
        let g = backward(&params, &trace, &[1.0, -1.0, 0.5]).unwrap();
        assert!(g.iter().all(|v| v.is_finite()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn forward_is_pure(seed in any::<u64>(), xs in prop::collection::vec(-5.0f64..5.0, 30)) {
        let arch = Architecture::lstm(10, 3, 4, &[6], 2);
        let params = init_params(&arch, seed).unwrap();
        let a = params.predict(&xs).unwrap();
        let b = params.copy_params().predict(&xs).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn checkpoint_round_trip(seed in any::<u64>(), units in 1usize..6, out in 1usize..4) {
        let arch = Architecture::lstm(4, 3, units, &[3], out);
        let p = init_params(&arch, seed).unwrap();
        let back = hrl_neural::io::from_str(&hrl_neural::io::to_string(&p)).unwrap();
        prop_assert_eq!(back.blocks(), p.blocks());
    }
}
