use core::f64::consts::PI;

use eit_core::nearfield::{ArrayElement, ClusterRay};
use eit_core::pattern::PatternSet;
use eit_core::rng::{complex_normal, derive_seed, rng_from_seed, stream_id, uniform_phase};
use eit_core::tripol::{
    aligned_relative_error, benchmark_uplink_only, combining_reference, downlink_measure,
    group_ports, joint_estimate, normalize, planar_cluster_channel, port_normalized_error,
    port_powers, precoded_capacity, quantize_feedback, run_protocol, uplink_estimate,
    GroupingRule, NormalizationRecord, PilotProfile, PortGrouping, ProtocolConfig, TriPolChannel,
};
use eit_core::{CMatrix, Complex64, Error, Position3, WaveContext};
use proptest::prelude::*;
use rand::Rng;

fn iid(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(&mut rng, 1.0))
}

/// iid channel whose last `weak` rows are `drop_db` down.
fn imbalanced(rows: usize, cols: usize, weak: usize, drop_db: f64, seed: u64) -> CMatrix {
    let g = 10f64.powf(-drop_db / 20.0);
    let scale: Vec<f64> = (0..rows).map(|i| if i >= rows - weak { g } else { 1.0 }).collect();
    iid(rows, cols, seed).scale_rows(&scale).unwrap()
}

fn noiseless() -> ProtocolConfig {
    ProtocolConfig {
        uplink_snr_db: f64::INFINITY,
        downlink_snr_db: f64::INFINITY,
        feedback_bits: None,
    }
}

#[test]
fn noiseless_protocol_recovers_the_channel() {
    for seed in 0..50 {
        let h = imbalanced(12, 64, 4, 10.0, seed);
        let g = group_ports(&port_powers(&h), GroupingRule::Median).unwrap();
        assert!(!g.weak.is_empty());
        let est = run_protocol(&h, &g, &noiseless(), seed).unwrap();
        assert!(aligned_relative_error(&est.assembled, &h).unwrap() < 1e-10);
        // the uplink rows and the downlink rows share one scale
        let ratio = est.assembled[(g.strong[0], 0)] / h[(g.strong[0], 0)];
        let weak_ratio = est.assembled[(g.weak[0], 0)] / h[(g.weak[0], 0)];
        assert!((ratio - weak_ratio).norm() < 1e-10 * ratio.norm());
    }
}

#[test]
fn joint_estimate_beats_uplink_only_on_weak_ports() {
    let mut wins = 0;
    let trials = 1000;
    for t in 0..trials {
        let h = imbalanced(12, 64, 4, 10.0, derive_seed(1, 0, t));
        let g = group_ports(&port_powers(&h), GroupingRule::Median).unwrap();
        let cfg = ProtocolConfig {
            uplink_snr_db: 10.0,
            downlink_snr_db: 26.64,
            feedback_bits: None,
        };
        let seed = derive_seed(1, 1, t);
        let est = run_protocol(&h, &g, &cfg, seed).unwrap();
        let bench = benchmark_uplink_only(&h, &PilotProfile::uniform(12, 10.0), derive_seed(seed, stream_id("uplink"), 0)).unwrap();
        if port_normalized_error(&est.assembled, &h).unwrap() < port_normalized_error(&bench, &h).unwrap() {
            wins += 1;
        }
    }
    assert!(wins >= 950, "{wins}/{trials}");
}

#[test]
fn uplink_noise_variance() {
    let h = CMatrix::zeros(4, 25);
    let mut sum = 0.0;
    let mut count = 0usize;
    for seed in 0..1000 {
        let e = uplink_estimate(&h, &[0, 1, 2, 3], 7.0, seed).unwrap();
        sum += e.frobenius_norm_sqr();
        count += 100;
    }
    let want = 10f64.powf(-0.7);
    assert!((sum / count as f64 / want - 1.0).abs() < 0.05);
    let h = iid(3, 5, 1);
    assert_eq!(uplink_estimate(&h, &[2, 0], f64::INFINITY, 4).unwrap(), h.select_rows(&[2, 0]));
    assert_eq!(uplink_estimate(&h, &[0, 1, 2], f64::INFINITY, 4).unwrap(), h);
    assert!(matches!(uplink_estimate(&h, &[], 10.0, 0), Err(Error::Domain(_))));
}

#[test]
fn downlink_partitions_and_noise() {
    let h = iid(6, 10, 3);
    let g = group_ports(&port_powers(&h), GroupingRule::Median).unwrap();
    let (a, b) = downlink_measure(&h, &g, f64::INFINITY, 1).unwrap();
    assert_eq!(a, h.select_rows(&g.strong));
    assert_eq!(b, h.select_rows(&g.weak));
    let mut stacked = CMatrix::zeros(6, 10);
    for (k, &r) in g.strong.iter().enumerate() {
        for c in 0..10 {
            stacked[(r, c)] = a[(k, c)];
        }
    }
    for (k, &r) in g.weak.iter().enumerate() {
        for c in 0..10 {
            stacked[(r, c)] = b[(k, c)];
        }
    }
    assert_eq!(stacked, h);

    // noise in the two parts is uncorrelated
    let zero = CMatrix::zeros(2, 1);
    let split = PortGrouping {
        strong: vec![0],
        weak: vec![1],
        powers: vec![1.0, 0.5],
    };
    let n = 100_000;
    let mut cross = Complex64::new(0.0, 0.0);
    let var = 10f64.powf(-0.5);
    for seed in 0..n {
        let (x, y) = downlink_measure(&zero, &split, 5.0, seed).unwrap();
        cross += x[(0, 0)] * y[(0, 0)].conj();
    }
    let bound = 3.0 * var / (n as f64).sqrt();
    assert!((cross / n as f64).norm() < bound * 2f64.sqrt());
}

#[test]
fn benchmark_row_errors_scale_with_pilot_snr() {
    let h = CMatrix::zeros(2, 8);
    let profile = PilotProfile { snr_db: vec![10.0, 0.0] };
    let mut strong = 0.0;
    let mut weak = 0.0;
    for seed in 0..10_000 {
        let e = benchmark_uplink_only(&h, &profile, seed).unwrap();
        strong += e.row(0).iter().map(|z| z.norm_sqr()).sum::<f64>();
        weak += e.row(1).iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    let ratio = weak / strong;
    assert!((ratio / 10.0 - 1.0).abs() < 0.2, "{ratio}");
    // equal SNRs reduce to the plain uplink estimate
    let h = iid(3, 4, 2);
    let a = benchmark_uplink_only(&h, &PilotProfile::uniform(3, 12.0), 9).unwrap();
    let b = uplink_estimate(&h, &[0, 1, 2], 12.0, 9).unwrap();
    assert_eq!(a, b);
    assert!(matches!(benchmark_uplink_only(&h, &PilotProfile::uniform(2, 1.0), 0), Err(Error::Shape(_))));
}

#[test]
fn grouping_examples() {
    let g = group_ports(&[4.0, 4.0, 1.0, 1.0], GroupingRule::Median).unwrap();
    assert_eq!((g.strong.clone(), g.weak.clone()), (vec![0, 1], vec![2, 3]));
    let g = group_ports(&[2.0; 5], GroupingRule::Median).unwrap();
    assert_eq!(g.strong.len(), 5);
    assert!(g.weak.is_empty());
    let g = group_ports(&[10.0, 0.5, 3.0, 1.0], GroupingRule::Threshold(0.2)).unwrap();
    assert_eq!((g.strong, g.weak), (vec![0, 2], vec![1, 3]));
    assert!(group_ports(&[], GroupingRule::Median).is_err());
    assert!(group_ports(&[1.0, f64::NAN], GroupingRule::Median).is_err());
    assert!(group_ports(&[1.0], GroupingRule::Threshold(1.5)).is_err());
}

#[test]
fn facing_dipoles_end_up_weak() {
    // 2×2 positions with horizontal, vertical and facing-axis dipoles, the
    // facing one 10 dB down
    let ctx = WaveContext::new(6.7e9).unwrap();
    let lambda = ctx.wavelength();
    let mut ue = Vec::new();
    for i in 0..4 {
        let p = Position3::new(0.0, (i % 2) as f64 * lambda / 2.0, (i / 2) as f64 * lambda / 2.0);
        ue.push(ArrayElement { position: p, pattern: PatternSet::dipole(Position3::new(0.0, 1.0, 0.0)) });
        ue.push(ArrayElement { position: p, pattern: PatternSet::dipole(Position3::new(0.0, 0.0, 1.0)) });
        ue.push(ArrayElement {
            position: p,
            pattern: PatternSet::dipole(Position3::new(1.0, 0.0, 0.0)).with_amplitude(10f64.powf(-0.5)),
        });
    }
    let bs: Vec<ArrayElement> = (0..16)
        .map(|i| ArrayElement {
            position: Position3::new(0.0, 0.02 * i as f64, 0.0),
            pattern: PatternSet::directional(65f64.to_radians(), PI / 2.0, 0.0, if i % 2 == 0 { PI / 4.0 } else { -PI / 4.0 }),
        })
        .collect();
    let mut rng = rng_from_seed(8);
    let rays: Vec<ClusterRay> = (0..40)
        .map(|m| ClusterRay {
            cluster: m / 4,
            ray: m % 4,
            power: 0.1,
            rays_in_cluster: 4,
            delay: 1e-7,
            departure: (PI / 2.0 + 0.2 * (rng.random::<f64>() - 0.5), 1.2 * (rng.random::<f64>() - 0.5)),
            arrival: (PI / 2.0 + 0.5 * (rng.random::<f64>() - 0.5), 2.0 * PI * rng.random::<f64>()),
            kappa: 10f64.powf(0.8),
            phases: [uniform_phase(&mut rng), uniform_phase(&mut rng), uniform_phase(&mut rng), uniform_phase(&mut rng)],
        })
        .collect();
    let h = planar_cluster_channel(&ue, &bs, &rays, &ctx).unwrap();
    assert_eq!(h.shape(), (12, 16));
    let g = group_ports(&port_powers(&h), GroupingRule::Median).unwrap();
    for facing in [2, 5, 8, 11] {
        assert!(g.weak.contains(&facing), "{:?}", g.weak);
    }
}

#[test]
fn normalize_examples() {
    let m = CMatrix::from_vec(1, 1, vec![Complex64::new(0.0, 2.0)]).unwrap();
    let (n, rec) = normalize(&m).unwrap();
    assert!((rec.amplitude - 2.0).abs() < 1e-15);
    assert!((rec.phase - PI / 2.0).abs() < 1e-15);
    assert!((n[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    let m = CMatrix::from_vec(1, 3, vec![Complex64::new(0.0, 0.0), Complex64::new(-3.0, 0.0), Complex64::new(0.0, 4.0)]).unwrap();
    let (n, rec) = normalize(&m).unwrap();
    assert!((rec.phase - PI).abs() < 1e-15);
    assert!((n[(0, 1)] - Complex64::new(0.6, 0.0)).norm() < 1e-15);
    assert!(matches!(normalize(&CMatrix::zeros(2, 2)), Err(Error::Domain(_))));
}

#[test]
fn combining_reference_examples() {
    let a = NormalizationRecord { amplitude: 1.5, phase: 0.4 };
    assert!((combining_reference(&a, &a).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    let one = NormalizationRecord { amplitude: 1.0, phase: 0.0 };
    let two = NormalizationRecord { amplitude: 2.0, phase: PI / 2.0 };
    assert!((combining_reference(&two, &one).unwrap() - Complex64::new(0.0, 2.0)).norm() < 1e-15);
    let zero = NormalizationRecord { amplitude: 0.0, phase: 0.0 };
    assert!(combining_reference(&one, &zero).is_err());
}

#[test]
fn no_weak_ports_gives_the_normalized_uplink() {
    let h = iid(4, 6, 5);
    let g = PortGrouping::all_strong(port_powers(&h));
    let up = uplink_estimate(&h, &g.strong, 15.0, 2).unwrap();
    let est = joint_estimate(&up, Complex64::new(3.0, 1.0), &CMatrix::zeros(0, 6), &g).unwrap();
    assert_eq!(est.assembled, normalize(&up).unwrap().0);
    let run = run_protocol(&h, &g, &noiseless(), 0).unwrap();
    assert!(aligned_relative_error(&run.assembled, &h).unwrap() < 1e-12);
}

#[test]
fn joint_estimate_rejects_bad_inputs() {
    let g = PortGrouping {
        strong: vec![0],
        weak: vec![1],
        powers: vec![2.0, 1.0],
    };
    let up = iid(1, 3, 0);
    let down = iid(1, 3, 1);
    assert!(matches!(joint_estimate(&up, Complex64::new(0.0, 0.0), &down, &g), Err(Error::Domain(_))));
    assert!(matches!(joint_estimate(&up, Complex64::new(1.0, 0.0), &iid(1, 2, 1), &g), Err(Error::Shape(_))));
    assert!(matches!(joint_estimate(&iid(2, 3, 0), Complex64::new(1.0, 0.0), &down, &g), Err(Error::Shape(_))));
}

#[test]
fn permuting_ports_permutes_rows() {
    let h = imbalanced(6, 8, 3, 10.0, 11);
    let perm = [4, 0, 5, 2, 1, 3];
    let hp = h.select_rows(&perm);
    let cfg = noiseless();
    let g = group_ports(&port_powers(&h), GroupingRule::Median).unwrap();
    let gp = group_ports(&port_powers(&hp), GroupingRule::Median).unwrap();
    let a = run_protocol(&h, &g, &cfg, 1).unwrap().assembled;
    let b = run_protocol(&hp, &gp, &cfg, 1).unwrap().assembled;
    // equal up to the global scalar each run picks
    let c = b[(0, 0)] / a[(perm[0], 0)];
    for (k, &r) in perm.iter().enumerate() {
        for col in 0..8 {
            assert!((b[(k, col)] - a[(r, col)] * c).norm() < 1e-12);
        }
    }
}

#[test]
fn feedback_quantizer() {
    let m = CMatrix::from_vec(1, 3, vec![Complex64::new(0.1, -0.9), Complex64::new(1.0, -1.0), Complex64::new(0.0, 0.49)]).unwrap();
    let q = quantize_feedback(&m, 2).unwrap();
    assert_eq!(q[(0, 0)], Complex64::new(0.25, -0.75));
    assert_eq!(q[(0, 1)], Complex64::new(0.75, -0.75));
    assert_eq!(q[(0, 2)], Complex64::new(0.25, 0.25));
    assert!(quantize_feedback(&m, 0).is_err());
    // fine quantization leaves recovery nearly exact
    let h = imbalanced(8, 16, 4, 10.0, 4);
    let g = group_ports(&port_powers(&h), GroupingRule::Median).unwrap();
    let cfg = ProtocolConfig { feedback_bits: Some(16), ..noiseless() };
    let est = run_protocol(&h, &g, &cfg, 0).unwrap();
    assert!(aligned_relative_error(&est.assembled, &h).unwrap() < 1e-4);
}

#[test]
fn perfect_estimates_maximise_precoded_capacity() {
    let h = iid(4, 16, 21);
    let exact = precoded_capacity(&h, &h, 2, 10.0).unwrap();
    let noisy = precoded_capacity(&h, &h.add(&iid(4, 16, 22)).unwrap(), 2, 10.0).unwrap();
    assert!(exact > noisy);
    // phase-rotated estimates precode identically
    let rotated = h.scale(Complex64::from_polar(2.0, 1.0));
    assert!((precoded_capacity(&h, &rotated, 2, 10.0).unwrap() - exact).abs() < 1e-10);
    let blocks = TriPolChannel::new(h.clone(), [2, 1, 1], [8, 8, 0]).unwrap();
    assert_eq!(blocks.block(eit_core::tripol::Polarization::X, eit_core::tripol::Polarization::Y).shape(), (2, 8));
    assert!(TriPolChannel::new(h, [2, 2, 1], [16, 0, 0]).is_err());
}

proptest! {
    #[test]
    fn normalize_is_scale_invariant(seed in 0u64..5000, re in -5.0f64..5.0, im in -5.0f64..5.0) {
        prop_assume!(re.hypot(im) > 1e-3);
        let m = iid(3, 4, seed);
        let (a, rec) = normalize(&m).unwrap();
        let (b, _) = normalize(&m.scale(Complex64::new(re, im))).unwrap();
        prop_assert!((a.frobenius_norm() - 1.0).abs() < 1e-12);
        prop_assert!(a[(0, 0)].im.abs() < 1e-12 && a[(0, 0)].re > 0.0);
        prop_assert!(a.sub(&b).unwrap().frobenius_norm() < 1e-12);
        prop_assert!(rec.amplitude > 0.0);
    }

    #[test]
    fn delta_magnitude_is_amplitude_ratio(r1 in 1e-3f64..1e3, w1 in -PI..PI, r2 in 1e-3f64..1e3, w2 in -PI..PI) {
        let d = combining_reference(
            &NormalizationRecord { amplitude: r1, phase: w1 },
            &NormalizationRecord { amplitude: r2, phase: w2 },
        ).unwrap();
        prop_assert!((d.norm() / (r1 / r2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn median_grouping_is_sound(powers in prop::collection::vec(0.0f64..100.0, 1..20)) {
        let g = group_ports(&powers, GroupingRule::Median).unwrap();
        prop_assert_eq!(g.strong.len() + g.weak.len(), powers.len());
        prop_assert!(!g.strong.is_empty());
        let min_strong = g.strong.iter().map(|&i| powers[i]).fold(f64::INFINITY, f64::min);
        let max_weak = g.weak.iter().map(|&i| powers[i]).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(min_strong >= max_weak);
    }

    #[test]
    fn scaling_the_channel_keeps_the_aligned_error(seed in 0u64..2000, scale in 0.01f64..100.0, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        prop_assume!(re.hypot(im) > 1e-2);
        let h = imbalanced(6, 10, 2, 10.0, seed);
        let g = group_ports(&port_powers(&h), GroupingRule::Median).unwrap();
        // complex scales are absorbed exactly without noise
        let hc = h.scale(Complex64::new(re, im));
        let exact = run_protocol(&hc, &g, &noiseless(), seed).unwrap().assembled;
        prop_assert!(aligned_relative_error(&exact, &hc).unwrap() < 1e-10);
        // with noise raised by the same factor the SNR and the error are unchanged
        let cfg = ProtocolConfig { uplink_snr_db: 20.0, downlink_snr_db: 36.64, feedback_bits: None };
        let err = aligned_relative_error(&run_protocol(&h, &g, &cfg, seed).unwrap().assembled, &h).unwrap();
        let hs = h.scale_real(scale);
        let shift = 20.0 * scale.log10();
        let cfg_s = ProtocolConfig { uplink_snr_db: cfg.uplink_snr_db - shift, downlink_snr_db: cfg.downlink_snr_db - shift, ..cfg };
        let err_s = aligned_relative_error(&run_protocol(&hs, &g, &cfg_s, seed).unwrap().assembled, &hs).unwrap();
        prop_assert!((err - err_s).abs() < 1e-9 * err);
    }
}
