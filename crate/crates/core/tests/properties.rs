//! Invariants checked over randomized inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use sn_interference::analysis::{find_peaks, fringe_metrics, rms_spread};
use sn_interference::lattice::{discrete_norm, prepare_double_gaussian, Lattice, SetupParams, WaveState};
use sn_interference::potential::{self_potential_direct, self_potential_fast};
use sn_interference::propagator::{cn_step, evolve, kinetic_energy, StepScheme};
use sn_interference::potential::PotentialField;
use sn_interference::units::{Dimension, Quantity, ScaleSystem};

fn lattice_256() -> Lattice {
    Lattice::new(-20.0, 20.0, 256, 1.0, 1).unwrap()
}

fn state_from(parts: &[(f64, f64)], lattice: &Lattice) -> WaveState {
    let mut s = WaveState::new(parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect(), 0.0);
    s.normalize(lattice).unwrap();
    s
}

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_filter("non-zero state", |v| v.iter().any(|&(a, b)| a * a + b * b > 1e-6))
}

fn rel_inf(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fast_and_direct_kernels_agree(parts in amplitudes(256), m in 0.05f64..2.0, eps in 1e-3f64..1.0) {
        let l = lattice_256();
        let s = state_from(&parts, &l);
        let d = self_potential_direct(&s, &l, m, eps).unwrap();
        let f = self_potential_fast(&s, &l, m, eps).unwrap();
        prop_assert!(rel_inf(&f.values, &d.values) < 1e-10);
    }

    #[test]
    fn potential_is_attractive_and_mirror_symmetric(parts in amplitudes(128)) {
        let l = Lattice::new(-10.0, 10.0, 255, 1.0, 1).unwrap();
        // symmetrize: psi(x) + psi(-x)
        let half: Vec<(f64, f64)> = parts.iter().chain(parts.iter().rev().skip(1)).copied().collect();
        let s = state_from(&half, &l);
        let v = self_potential_direct(&s, &l, 0.7, 0.05).unwrap();
        let n = v.values.len();
        for i in 0..n {
            prop_assert!(v.values[i] <= 0.0);
            prop_assert!((v.values[i] - v.values[n - 1 - i]).abs() <= 1e-12 * v.values[i].abs().max(1.0));
        }
    }

    #[test]
    fn crank_nicolson_step_is_unitary(parts in amplitudes(200), m in 0.1f64..2.0, vscale in 0.0f64..5.0) {
        let l = Lattice::new(-10.0, 10.0, 200, 1.0, 100).unwrap();
        let s = state_from(&parts, &l);
        let v = PotentialField { values: l.nodes().iter().map(|x| -vscale * (-x * x).exp()).collect(), built_from_time: 0.0 };
        let next = cn_step(&s, &v, &l, m).unwrap();
        prop_assert!((discrete_norm(&next, &l).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn si_round_trip(sigma_nm in 0.1f64..100.0, value in 1e-3f64..1e3, which in 0usize..3) {
        let scale = ScaleSystem::new(sigma_nm * 1e-9).unwrap();
        let q = match which {
            0 => Quantity::meters(value * 1e-9),
            1 => Quantity::seconds(value),
            _ => Quantity::kilograms(value * 1e-17),
        };
        let back = scale.to_si(scale.to_dimensionless(q).unwrap()).unwrap();
        prop_assert_eq!(back.dimension, q.dimension);
        prop_assert!(((back.value - q.value) / q.value).abs() < 1e-12);
    }

    #[test]
    fn scaled_mass_matches_dimension_check(sigma_nm in 0.5f64..50.0, u in 1e6f64..1e12) {
        let scale = ScaleSystem::new(sigma_nm * 1e-9).unwrap();
        let s = scale.to_dimensionless(Quantity::atomic_mass_units(u)).unwrap();
        prop_assert!(s.expect(Dimension::Mass).is_ok());
        prop_assert!(s.expect(Dimension::Length).is_err());
    }

    #[test]
    fn metrics_ignore_density_scale(k in 0.2f64..1.0, width in 8.0f64..30.0, c in 1e-3f64..1e3) {
        let l = Lattice::new(-40.0, 40.0, 801, 1.0, 1).unwrap();
        let rho: Vec<f64> = l.nodes().iter().map(|x| (k * x).cos().powi(2) * (-(x * x) / (2.0 * width * width)).exp()).collect();
        let scaled: Vec<f64> = rho.iter().map(|r| c * r).collect();
        let a = fringe_metrics(&rho, &l, 0.05).unwrap();
        let b = fringe_metrics(&scaled, &l, 0.05).unwrap();
        prop_assert_eq!(a.peak_count, b.peak_count);
        prop_assert_eq!(a.w.is_some(), b.w.is_some());
        if let (Some(x), Some(y)) = (a.w, b.w) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        prop_assert!((a.visibility - b.visibility).abs() < 1e-9);
        prop_assert!((rms_spread(&rho, &l).unwrap() - rms_spread(&scaled, &l).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn mirrored_density_gives_mirrored_peaks(k in 0.2f64..1.0, shift in -3.0f64..3.0) {
        let l = Lattice::new(-40.0, 40.0, 801, 1.0, 1).unwrap();
        let f = |x: f64| (k * x).cos().powi(2) * (-((x - shift).powi(2)) / 200.0).exp();
        let rho: Vec<f64> = l.nodes().iter().map(|&x| f(x)).collect();
        let mirrored: Vec<f64> = rho.iter().rev().copied().collect();
        let a = find_peaks(&rho, &l, 0.05).unwrap().positions();
        let mut b: Vec<f64> = find_peaks(&mirrored, &l, 0.05).unwrap().positions().iter().map(|p| -p).collect();
        b.reverse();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn free_kinetic_energy_is_conserved(m in 0.2f64..1.0) {
        let l = Lattice::new(-40.0, 40.0, 401, 2.0, 100).unwrap();
        let p = SetupParams::with_mass(m, false);
        let s = prepare_double_gaussian(&l, &p).unwrap();
        let r = evolve(&s, &p, &l, &StepScheme::frozen(), &[]).unwrap();
        let e0 = kinetic_energy(&s, &l, m).unwrap();
        let e1 = kinetic_energy(&r.final_state, &l, m).unwrap();
        prop_assert!(((e1 - e0) / e0).abs() < 1e-10);
    }
}

#[test]
fn frozen_energy_drift_is_first_order_in_dt() {
    let drift = |steps: usize| {
        let l = Lattice::new(-70.0, 70.0, 2001, 10.0, steps).unwrap();
        let p = SetupParams::with_mass(0.5, true);
        let s = prepare_double_gaussian(&l, &p).unwrap();
        evolve(&s, &p, &l, &StepScheme::frozen(), &[]).unwrap().max_relative_energy_drift()
    };
    let d = [drift(1000), drift(2000), drift(4000)];
    for w in d.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.8..2.2).contains(&ratio), "drifts {d:?}");
    }
}

#[test]
fn predictor_corrector_beats_frozen_energy_drift() {
    let l = Lattice::standard();
    let p = SetupParams::with_mass(0.5, true);
    let s = prepare_double_gaussian(&l, &p).unwrap();
    let frozen = evolve(&s, &p, &l, &StepScheme::frozen(), &[]).unwrap().max_relative_energy_drift();
    let pc = evolve(&s, &p, &l, &StepScheme::predictor_corrector(2), &[]).unwrap().max_relative_energy_drift();
    assert!(pc < 1e-3 * frozen, "pc {pc:e}, frozen {frozen:e}");
}
