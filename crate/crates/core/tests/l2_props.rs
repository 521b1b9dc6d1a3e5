mod common;

use common::{feasible_kinked, instance, zero_mean_tents};
use proptest::prelude::*;
use tbvp_core::l2min::{a1_constant, l2_minimizer};
use tbvp_core::problem::{full_norm, shift_sequence};

const N: usize = 257;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn perturbations_cost_k_times_their_energy(inst in instance(), p in common::coeffs(), scale in 0.0f64..3.0) {
        let spec = inst.spec();
        let ts = shift_sequence(&spec, N).unwrap();
        let sol = l2_minimizer(&ts, spec.a()).unwrap();
        let w = zero_mean_tents(&sol.v, &p, scale);
        let v = sol.v.zip_map(&w, |a, b| a + b).unwrap();
        let energy = w.map(|y| y * y).integrate();
        let k = ts.k() as f64;
        let gain = full_norm(&v, &ts, 2).unwrap() - sol.objective;
        prop_assert!(gain >= (1.0 - 1e-6) * k * energy - 1e-10, "{} {}", gain, energy);
        prop_assert!((gain - k * energy).abs() <= 1e-10 * (1.0 + sol.objective));
    }

    #[test]
    fn residual_bound_from_holder(inst in instance(), p in common::coeffs()) {
        let spec = inst.spec();
        let ts = shift_sequence(&spec, N).unwrap();
        let v = feasible_kinked(&spec, &p, N);
        let mean = ts.mean();
        let residual = v.zip_map(&mean, |a, b| (a - b) * (a - b)).unwrap().integrate();
        let a1 = a1_constant(&ts, spec.a());
        prop_assert!(residual >= a1 * a1 / (2.0 * spec.t()) - 1e-10);
    }

    #[test]
    fn decomposition_identity(inst in instance(), p in common::coeffs()) {
        let spec = inst.spec();
        let ts = shift_sequence(&spec, N).unwrap();
        let v = feasible_kinked(&spec, &p, N);
        let k = ts.k() as f64;
        let mean = ts.mean();
        let lhs = full_norm(&v, &ts, 2).unwrap();
        let spread = v.with_values(
            (0..N)
                .map(|i| {
                    let s: f64 = ts.functions().iter().map(|t| t.values()[i]).sum();
                    let s2: f64 = ts.functions().iter().map(|t| t.values()[i].powi(2)).sum();
                    s2 - s * s / k
                })
                .collect(),
        );
        let rhs = k * v.zip_map(&mean, |a, b| (a - b) * (a - b)).unwrap().integrate() + spread.integrate();
        prop_assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(1e-12), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn minimizer_is_feasible_and_parallel_to_mean(inst in instance()) {
        let spec = inst.spec();
        let ts = shift_sequence(&spec, N).unwrap();
        let sol = l2_minimizer(&ts, spec.a()).unwrap();
        prop_assert!((sol.v.integrate() - spec.a()).abs() <= 1e-12 * (1.0 + spec.a().abs()));
        let lift = sol.a1 / (2.0 * spec.t());
        for (v, m) in sol.v.values().iter().zip(sol.mean_shift.values()) {
            prop_assert!((v - m - lift).abs() <= 1e-13 * (1.0 + m.abs()));
        }
    }
}
