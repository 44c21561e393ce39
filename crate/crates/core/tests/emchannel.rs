use eit_core::emchannel::{assemble_em_channel, em_channel_entry, Aperture, PortFunction, PortKind};
use eit_core::green::dyadic_green;
use eit_core::rng::{complex_normal, rng_from_seed};
use eit_core::{Complex64, Error, Position3, WaveContext};
use proptest::prelude::*;
use rand::Rng;

fn minus_j_omega_mu(ctx: &WaveContext) -> Complex64 {
    Complex64::new(0.0, -ctx.angular_frequency() * ctx.permeability())
}

fn random_vec3<R: Rng>(rng: &mut R) -> [Complex64; 3] {
    [complex_normal(rng, 1.0), complex_normal(rng, 1.0), complex_normal(rng, 1.0)]
}

// Written out without the crate's Hermitian-form helper.
fn brute_force_entry(
    phi: &PortFunction,
    psi: &PortFunction,
    ar: &Aperture,
    at: &Aperture,
    ctx: &WaveContext,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for q in 0..ar.len() {
        for p in 0..at.len() {
            let g = dyadic_green(ar.points()[q], at.points()[p], ctx).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    acc += phi.samples[q][i].conj() * g.0[i][j] * psi.samples[p][j]
                        * ar.weights()[q]
                        * at.weights()[p];
                }
            }
        }
    }
    minus_j_omega_mu(ctx) * acc
}

fn line_aperture(x0: f64, n: usize, spacing: f64) -> Aperture {
    let pts = (0..n).map(|i| Position3::new(x0, i as f64 * spacing, 0.1 * i as f64)).collect();
    Aperture::discrete(pts).unwrap()
}

#[test]
fn delta_functions_reduce_to_conventional_channel() {
    let ctx = WaveContext::new(4.7e9).unwrap();
    let lambda = ctx.wavelength();
    let ar = line_aperture(3.0, 8, lambda / 2.0);
    let at = line_aperture(0.0, 8, lambda / 2.0);
    let mut rng = rng_from_seed(3);
    let pol_r: Vec<[Complex64; 3]> = (0..8).map(|_| random_vec3(&mut rng)).collect();
    let pol_s: Vec<[Complex64; 3]> = (0..8).map(|_| random_vec3(&mut rng)).collect();
    let phis: Vec<_> = (0..8).map(|m| PortFunction::delta(8, m, pol_r[m], PortKind::Combining)).collect();
    let psis: Vec<_> = (0..8).map(|n| PortFunction::delta(8, n, pol_s[n], PortKind::Precoding)).collect();
    let g = assemble_em_channel(&phis, &psis, &ar, &at, &ctx).unwrap();
    assert_eq!((g.receive_ports(), g.transmit_ports()), (8, 8));
    for m in 0..8 {
        for n in 0..8 {
            let d = dyadic_green(ar.points()[m], at.points()[n], &ctx).unwrap();
            let mut want = Complex64::new(0.0, 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    want += pol_r[m][i].conj() * d.0[i][j] * pol_s[n][j];
                }
            }
            want *= minus_j_omega_mu(&ctx);
            let got = g.matrix()[(m, n)];
            assert!((got - want).norm() <= 1e-12 * want.norm(), "({m},{n}) {got} vs {want}");
        }
    }
}

#[test]
fn unit_polarizations_give_dyadic_entries() {
    let ctx = WaveContext::new(4.7e9).unwrap();
    let ar = line_aperture(1.0, 1, 0.0);
    let at = line_aperture(0.0, 1, 0.0);
    let e = |k: usize| {
        let mut v = [Complex64::new(0.0, 0.0); 3];
        v[k] = Complex64::new(1.0, 0.0);
        v
    };
    let d = dyadic_green(ar.points()[0], at.points()[0], &ctx).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let phi = PortFunction::delta(1, 0, e(i), PortKind::Combining);
            let psi = PortFunction::delta(1, 0, e(j), PortKind::Precoding);
            let got = em_channel_entry(&phi, &psi, &ar, &at, &ctx).unwrap();
            assert!((got - minus_j_omega_mu(&ctx) * d.0[i][j]).norm() <= 1e-12 * got.norm().max(1e-300));
        }
    }
}

#[test]
fn three_point_apertures_match_triple_loop() {
    let ctx = WaveContext::new(2.4e9).unwrap();
    let mut rng = rng_from_seed(17);
    let pts = |rng: &mut _, x0: f64| -> Vec<Position3> {
        (0..3).map(|_| Position3::new(x0 + Rng::random::<f64>(rng), Rng::random(rng), Rng::random(rng))).collect()
    };
    let ar = Aperture::new(pts(&mut rng, 5.0), vec![0.2, 0.3, 0.5], 1).unwrap();
    let at = Aperture::new(pts(&mut rng, 0.0), vec![0.1, 0.7, 0.2], 1).unwrap();
    let phi = PortFunction::new((0..3).map(|_| random_vec3(&mut rng)).collect(), PortKind::Combining);
    let psi = PortFunction::new((0..3).map(|_| random_vec3(&mut rng)).collect(), PortKind::Precoding);
    let got = em_channel_entry(&phi, &psi, &ar, &at, &ctx).unwrap();
    let want = brute_force_entry(&phi, &psi, &ar, &at, &ctx);
    assert!((got - want).norm() <= 1e-12 * want.norm());
}

#[test]
fn assembly_matches_entrywise_oracle() {
    let ctx = WaveContext::new(4.7e9).unwrap();
    let ar = Aperture::planar_grid(Position3::new(-0.05, -0.05, 1.0), 0.1, 0.1, 3, 3).unwrap();
    let at = Aperture::planar_grid(Position3::new(-0.05, -0.05, 0.0), 0.1, 0.1, 3, 2).unwrap();
    let mut rng = rng_from_seed(23);
    let phis: Vec<_> = (0..4)
        .map(|_| PortFunction::new((0..ar.len()).map(|_| random_vec3(&mut rng)).collect(), PortKind::Combining))
        .collect();
    let psis: Vec<_> = (0..4)
        .map(|_| PortFunction::new((0..at.len()).map(|_| random_vec3(&mut rng)).collect(), PortKind::Precoding))
        .collect();
    let g = assemble_em_channel(&phis, &psis, &ar, &at, &ctx).unwrap();
    for m in 0..4 {
        for n in 0..4 {
            let want = brute_force_entry(&phis[m], &psis[n], &ar, &at, &ctx);
            assert!((g.matrix()[(m, n)] - want).norm() <= 1e-12 * want.norm());
        }
    }
    let single = assemble_em_channel(&phis[..1], &psis[..1], &ar, &at, &ctx).unwrap();
    let entry = em_channel_entry(&phis[0], &psis[0], &ar, &at, &ctx).unwrap();
    assert!((single.matrix()[(0, 0)] - entry).norm() <= 1e-14 * entry.norm());
}

#[test]
fn planar_grid_weights_and_extent() {
    let a = Aperture::planar_grid(Position3::new(0.0, 0.0, 0.0), 0.4, 0.2, 4, 2).unwrap();
    assert_eq!(a.len(), 8);
    assert!((a.weights().iter().sum::<f64>() - 0.08).abs() < 1e-15);
    // farthest midpoints: (0.05, 0.05) and (0.35, 0.15)
    assert!((a.extent() - (0.3f64.powi(2) + 0.1f64.powi(2)).sqrt()).abs() < 1e-12);
}

#[test]
fn overlapping_apertures_are_rejected() {
    let ctx = WaveContext::new(1e9).unwrap();
    let a = line_aperture(0.0, 2, 0.1);
    let phi = PortFunction::delta(2, 0, [Complex64::new(1.0, 0.0); 3], PortKind::Combining);
    assert!(matches!(em_channel_entry(&phi, &phi, &a, &a, &ctx), Err(Error::Singularity(_))));
    let short = PortFunction::delta(1, 0, [Complex64::new(1.0, 0.0); 3], PortKind::Combining);
    assert!(matches!(em_channel_entry(&short, &phi, &a, &line_aperture(1.0, 2, 0.1), &ctx), Err(Error::Shape(_))));
}

proptest! {
    #[test]
    fn precoding_is_linear(re in -3.0f64..3.0, im in -3.0f64..3.0, seed in 0u64..1000) {
        let ctx = WaveContext::new(4.7e9).unwrap();
        let ar = line_aperture(2.0, 3, 0.05);
        let at = line_aperture(0.0, 3, 0.05);
        let mut rng = rng_from_seed(seed);
        let phi = PortFunction::new((0..3).map(|_| random_vec3(&mut rng)).collect(), PortKind::Combining);
        let psi = PortFunction::new((0..3).map(|_| random_vec3(&mut rng)).collect(), PortKind::Precoding);
        let c = Complex64::new(re, im);
        let base = em_channel_entry(&phi, &psi, &ar, &at, &ctx).unwrap();
        let scaled = em_channel_entry(&phi, &psi.scaled(c), &ar, &at, &ctx).unwrap();
        prop_assert!((scaled - base * c).norm() <= 1e-12 * (base * c).norm().max(1e-300));
    }
}
