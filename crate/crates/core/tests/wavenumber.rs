use std::f64::consts::PI;

use eit_core::pattern::PatternSet;
use eit_core::rng::{complex_normal, rng_from_seed};
use eit_core::wavenumber::{
    apply_polarization, assemble_channel, cell_powers, coupling_variances, fourier_harmonics,
    hannan_efficiency, hemisphere_mass, sample_wavenumber_channel, vmf_pdf, wavenumber_support,
    wavenumber_to_angles, CellQuadrature, CouplingVariances, EfficiencyMatrix, PlanarArray, Side,
    VmfCluster, VmfMixture,
};
use eit_core::{CMatrix, Complex64, Error, WaveContext};
use proptest::prelude::*;
use rand::Rng;

fn unit_ctx() -> WaveContext {
    WaveContext::from_wavelength(1.0).unwrap()
}

fn cluster(theta: f64, phi: f64, alpha: f64) -> VmfCluster {
    VmfCluster {
        weight: 1.0,
        mean_theta: theta,
        mean_phi: phi,
        concentration: alpha,
    }
}

fn brute_force_support(lx: f64, ly: f64, lambda: f64) -> Vec<(i32, i32)> {
    let bx = (lx / lambda).floor() as i32 + 1;
    let by = (ly / lambda).floor() as i32 + 1;
    let mut out = Vec::new();
    for a in -bx..=bx {
        for b in -by..=by {
            let u = a as f64 * lambda / lx;
            let v = b as f64 * lambda / ly;
            if u * u + v * v <= 1.0 {
                out.push((a, b));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn support_counts() {
    let ctx = unit_ctx();
    assert_eq!(wavenumber_support(4.0, 4.0, &ctx, Side::Transmitter).unwrap().len(), 49);
    let mut small = wavenumber_support(1.0, 1.0, &ctx, Side::Receiver).unwrap().indices().to_vec();
    small.sort();
    assert_eq!(small, vec![(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]);
}

#[test]
fn support_matches_enumeration() {
    let ctx = unit_ctx();
    let mut rng = rng_from_seed(5);
    for _ in 0..20 {
        let lx = rng.random_range(1.0..10.0);
        let ly = rng.random_range(1.0..10.0);
        let mut got = wavenumber_support(lx, ly, &ctx, Side::Receiver).unwrap().indices().to_vec();
        got.sort();
        assert_eq!(got, brute_force_support(lx, ly, 1.0), "{lx} x {ly}");
    }
    assert!(wavenumber_support(0.0, 1.0, &ctx, Side::Receiver).is_err());
}

#[test]
fn square_support_symmetry() {
    let s = wavenumber_support(3.3, 3.3, &unit_ctx(), Side::Receiver).unwrap();
    for &(a, b) in s.indices() {
        for img in [(-a, -b), (b, a), (-a, b), (a, -b)] {
            assert!(s.position(img).is_some(), "{img:?}");
        }
    }
}

#[test]
fn angles_of_lattice_points() {
    let ctx = unit_ctx();
    assert_eq!(wavenumber_to_angles(0, 0, 4.0, 4.0, &ctx).unwrap(), (0.0, 0.0));
    let (t, _) = wavenumber_to_angles(4, 0, 4.0, 4.0, &ctx).unwrap();
    assert!((t - PI / 2.0).abs() < 1e-12);
    let (t, p) = wavenumber_to_angles(1, 0, 4.0, 4.0, &ctx).unwrap();
    assert!((t.sin() * p.cos() - 0.25).abs() < 1e-15);
    assert!(matches!(wavenumber_to_angles(5, 0, 4.0, 4.0, &ctx), Err(Error::Domain(_))));
}

// Composite Simpson in (cos θ, φ): independent of the crate's quadrature.
fn sphere_integral(c: &VmfCluster, n: usize) -> f64 {
    let simpson = |i: usize, n: usize| if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
    let (nu, np) = (n, 2 * n);
    let du = 2.0 / nu as f64;
    let dp = 2.0 * PI / np as f64;
    let mut total = 0.0;
    for i in 0..=nu {
        let u = (-1.0 + i as f64 * du).clamp(-1.0, 1.0);
        let theta = u.acos();
        let mut row = 0.0;
        for j in 0..=np {
            row += simpson(j, np) * vmf_pdf(theta, -PI + j as f64 * dp, c).unwrap();
        }
        total += simpson(i, nu) * row * dp / 3.0;
    }
    total * du / 3.0
}

#[test]
fn vmf_integrates_to_one() {
    for alpha in [0.0, 0.1, 1.0, 10.0, 50.0] {
        let c = cluster(1.1, 0.7, alpha);
        let s = sphere_integral(&c, 1200);
        assert!((s - 1.0).abs() < 1e-6, "alpha {alpha}: {s}");
    }
}

#[test]
fn vmf_peak_and_limit() {
    assert!((vmf_pdf(0.3, 2.0, &cluster(1.0, 1.0, 0.0)).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-15);
    for alpha in [0.5, 5.0, 50.0] {
        let c = cluster(0.8, -1.2, alpha);
        let peak = vmf_pdf(0.8, -1.2, &c).unwrap();
        let want = alpha * alpha.exp() / (4.0 * PI * alpha.sinh());
        assert!((peak - want).abs() < 1e-12 * want);
    }
    let big = vmf_pdf(0.8, -1.2, &cluster(0.8, -1.2, 500.0)).unwrap();
    assert!((big / (500.0 / (2.0 * PI)) - 1.0).abs() < 1e-12);
    assert!(vmf_pdf(0.0, 0.0, &cluster(0.0, 0.0, -1.0)).is_err());
}

#[test]
fn isotropic_partition_of_unity() {
    let ctx = unit_ctx();
    for (lx, ly) in [(1.0, 1.0), (4.0, 4.0), (2.5, 1.3)] {
        let s = wavenumber_support(lx, ly, &ctx, Side::Receiver).unwrap();
        let p = cell_powers(&s, &VmfMixture::isotropic(), &ctx, CellQuadrature::default()).unwrap();
        let total: f64 = p.iter().sum();
        assert!((total - 0.5).abs() < 1e-6, "{lx}x{ly}: {total}");
        assert!(p.iter().all(|v| *v >= 0.0));
    }
    let rx = wavenumber_support(1.0, 1.0, &ctx, Side::Receiver).unwrap();
    let tx = wavenumber_support(4.0, 4.0, &ctx, Side::Transmitter).unwrap();
    let iso = VmfMixture::isotropic();
    let v = coupling_variances(&rx, &tx, &iso, &iso, &ctx, CellQuadrature::default()).unwrap();
    assert!((v.total() - 1.0).abs() < 1e-3);
    let again = coupling_variances(&rx, &tx, &iso, &iso, &ctx, CellQuadrature::default()).unwrap();
    assert_eq!(v, again);
}

// Share of the front-hemisphere VMF mass falling in each lattice cell,
// by classifying a dense midpoint grid of directions.
fn dense_cell_shares(lx: f64, ly: f64, c: &VmfCluster, ctx: &WaveContext, n: usize) -> Vec<f64> {
    let support = wavenumber_support(lx, ly, ctx, Side::Receiver).unwrap();
    let k0 = ctx.wavenumber();
    let (dkx, dky) = (2.0 * PI / lx, 2.0 * PI / ly);
    let mut shares = vec![0.0; support.len()];
    let (nu, np) = (n, 2 * n);
    let du = 1.0 / nu as f64;
    let dp = 2.0 * PI / np as f64;
    for i in 0..nu {
        let u = (i as f64 + 0.5) * du;
        let theta = u.acos();
        for j in 0..np {
            let phi = -PI + (j as f64 + 0.5) * dp;
            let kx = k0 * theta.sin() * phi.cos();
            let ky = k0 * theta.sin() * phi.sin();
            let cell = ((kx / dkx).round() as i32, (ky / dky).round() as i32);
            let owner = support.position(cell).unwrap_or_else(|| {
                let mut best = (f64::INFINITY, 0);
                for (k, &(a, b)) in support.indices().iter().enumerate() {
                    let d = ((a - cell.0) as f64 * dkx).powi(2) + ((b - cell.1) as f64 * dky).powi(2);
                    if d < best.0 {
                        best = (d, k);
                    }
                }
                best.1
            });
            shares[owner] += vmf_pdf(theta, phi, c).unwrap() * du * dp;
        }
    }
    let total: f64 = shares.iter().sum();
    shares.iter().map(|s| s / total).collect()
}

#[test]
fn concentrated_cluster_fills_its_cell() {
    let ctx = unit_ctx();
    // grazing mean direction, where the lattice cells are angularly wide
    let c = cluster(80f64.to_radians(), 0.0, 50.0);
    let support = wavenumber_support(4.0, 4.0, &ctx, Side::Receiver).unwrap();
    let mix = VmfMixture::new(vec![c]).unwrap();
    let p = cell_powers(&support, &mix, &ctx, CellQuadrature::default()).unwrap();
    let mass = hemisphere_mass(&mix);
    let oracle = dense_cell_shares(4.0, 4.0, &c, &ctx, 1500);
    let idx = support.position((4, 0)).unwrap();
    assert!(p[idx] / mass > 0.5, "share {}", p[idx] / mass);
    for (k, (got, want)) in p.iter().zip(&oracle).enumerate() {
        assert!((got / mass - want).abs() < 1e-3, "cell {:?}: {} vs {}", support.indices()[k], got / mass, want);
    }
}

#[test]
fn separable_variances_multiply() {
    let v = CouplingVariances::from_separable(&[0.2, 0.8], &[0.5, 0.25, 0.25]).unwrap();
    assert_eq!((v.rows(), v.cols()), (2, 3));
    assert!((v.get(1, 0) - 0.4).abs() < 1e-15);
    assert!((v.total() - 1.0).abs() < 1e-15);
}

#[test]
fn coefficient_moments() {
    let sigma2 = vec![0.5, 2.0, 0.1, 1.0];
    let mean = CMatrix::from_vec(2, 2, vec![
        Complex64::new(1.0, -1.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-0.5, 0.2),
        Complex64::new(0.0, 3.0),
    ])
    .unwrap();
    let v = CouplingVariances::new(2, 2, sigma2.clone()).unwrap().with_mean(mean.clone()).unwrap();
    let n = 100_000;
    let mut sum = [Complex64::new(0.0, 0.0); 4];
    let mut sq = [0.0; 4];
    for s in 0..n {
        let h = sample_wavenumber_channel(&v, s);
        for k in 0..4 {
            let z = h.as_slice()[k];
            sum[k] += z;
            sq[k] += (z - mean.as_slice()[k]).norm_sqr();
        }
    }
    for k in 0..4 {
        let var = sq[k] / n as f64;
        assert!((var / sigma2[k] - 1.0).abs() < 0.05, "entry {k}: {var}");
        let m = sum[k] / n as f64;
        // each real component has variance σ²/2
        let bound = 3.0 * (sigma2[k] / 2.0 / n as f64).sqrt();
        assert!((m.re - mean.as_slice()[k].re).abs() < bound && (m.im - mean.as_slice()[k].im).abs() < bound);
    }
    let zero = CouplingVariances::new(2, 2, vec![0.0; 4]).unwrap();
    assert!(sample_wavenumber_channel(&zero, 1).as_slice().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
}

#[test]
fn polarization_amplitudes() {
    let mut rng = rng_from_seed(9);
    let h = CMatrix::from_fn(3, 5, |_, _| complex_normal(&mut rng, 1.0));
    let p = apply_polarization(&h, 10.0, 0.0, 4).unwrap();
    for b in 0..3 {
        for a in 0..5 {
            let co = h[(b, a)].norm();
            assert!((p.theta_theta[(b, a)].norm() - co).abs() < 1e-15 * co.max(1.0));
            assert!((p.theta_phi[(b, a)].norm() / co - 10f64.powf(-0.5)).abs() < 1e-12);
            assert!((p.phi_theta[(b, a)].norm() / co - 10f64.powf(-0.5)).abs() < 1e-12);
            assert!((p.phi_phi[(b, a)].norm() - co).abs() < 1e-15 * co.max(1.0));
        }
    }
    let p = apply_polarization(&h, 300.0, 0.0, 4).unwrap();
    for (x, co) in p.theta_phi.as_slice().iter().zip(h.as_slice()) {
        assert!(x.norm() < 1e-14 * co.norm());
    }
}

#[test]
fn xpr_draws_follow_the_lognormal_law() {
    let h = CMatrix::from_fn(40, 50, |_, _| Complex64::new(1.0, 0.0));
    let p = apply_polarization(&h, 8.0, 3.0, 21).unwrap();
    assert_eq!(p.xpr_db(), (8.0, 3.0));
    let x: Vec<f64> = (0..40).flat_map(|b| (0..50).map(move |a| (b, a))).map(|(b, a)| 10.0 * p.kappa(b, a).log10()).collect();
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let sd = (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((m - 8.0).abs() < 3.0 * 3.0 / n.sqrt() + 1e-9, "{m}");
    assert!((sd / 3.0 - 1.0).abs() < 0.05, "{sd}");
}

#[test]
fn harmonics_match_entrywise_formula() {
    let ctx = unit_ctx();
    let array = PlanarArray::uniform(1.0, 1.0, 0.5, 0.5).unwrap();
    let support = wavenumber_support(1.0, 1.0, &ctx, Side::Receiver).unwrap();
    assert_eq!((array.len(), support.len()), (4, 5));
    let pattern = PatternSet::directional(70f64.to_radians(), 0.0, 0.0, PI / 4.0);
    let psi = fourier_harmonics(&array, &support, std::slice::from_ref(&pattern), &ctx).unwrap();
    let k0 = 2.0 * PI;
    for (b, &(lx, ly)) in support.indices().iter().enumerate() {
        let kx = 2.0 * PI * lx as f64;
        let ky = 2.0 * PI * ly as f64;
        let gamma = (k0 * k0 - kx * kx - ky * ky).sqrt();
        let theta = (gamma / k0).acos();
        let phi = if lx == 0 && ly == 0 { 0.0 } else { ky.atan2(kx) };
        let (ft, fp) = pattern.field(theta, phi);
        for (q, r) in array.positions().iter().enumerate() {
            let e = Complex64::from_polar(0.5, kx * r.x + ky * r.y + gamma * r.z);
            assert!((psi.theta[(q, b)] - e * ft).norm() < 1e-14);
            assert!((psi.phi[(q, b)] - e * fp).norm() < 1e-14);
        }
    }
    // isotropic elements: broadside column is constant 1/√N, all columns ≤ 1
    let iso = fourier_harmonics(&array, &support, &[PatternSet::isotropic_theta()], &ctx).unwrap();
    let b0 = support.position((0, 0)).unwrap();
    for q in 0..4 {
        assert!((iso.theta[(q, b0)] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }
    for b in 0..support.len() {
        let norm: f64 = (0..4).map(|q| iso.theta[(q, b)].norm_sqr()).sum::<f64>().sqrt();
        assert!(norm <= 1.0 + 1e-12);
    }
}

fn random_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(&mut rng, 1.0))
}

#[test]
fn assembly_expands_term_by_term() {
    let ctx = unit_ctx();
    let rx_array = PlanarArray::uniform(1.0, 1.0, 0.25, 0.5).unwrap();
    let tx_array = PlanarArray::uniform(2.0, 1.0, 0.5, 0.5).unwrap();
    let rs = wavenumber_support(1.0, 1.0, &ctx, Side::Receiver).unwrap();
    let ts = wavenumber_support(2.0, 1.0, &ctx, Side::Transmitter).unwrap();
    let pr = fourier_harmonics(&rx_array, &rs, &[PatternSet::dipole(eit_core::Position3::new(1.0, 0.0, 0.0))], &ctx).unwrap();
    let ps = fourier_harmonics(&tx_array, &ts, &[PatternSet::directional(1.2, 0.0, 0.0, 0.3)], &ctx).unwrap();
    let h = apply_polarization(&random_matrix(rs.len(), ts.len(), 1), 8.0, 3.0, 2).unwrap();
    let gr = EfficiencyMatrix::new((0..rx_array.len()).map(|i| 0.5 + 0.05 * i as f64).collect()).unwrap();
    let gs = EfficiencyMatrix::uniform(tx_array.len(), 0.8).unwrap();
    let got = assemble_channel(&gr, &pr, &h, &ps, &gs).unwrap();
    let term = |a: &CMatrix, m: &CMatrix, b: &CMatrix| a.matmul(m).unwrap().matmul(&b.adjoint()).unwrap();
    let sum = term(&pr.theta, &h.theta_theta, &ps.theta)
        .add(&term(&pr.theta, &h.theta_phi, &ps.phi))
        .unwrap()
        .add(&term(&pr.phi, &h.phi_theta, &ps.theta))
        .unwrap()
        .add(&term(&pr.phi, &h.phi_phi, &ps.phi))
        .unwrap();
    let want = sum.scale_rows(gr.values()).unwrap().scale_cols(gs.values()).unwrap();
    let err = got.sub(&want).unwrap().frobenius_norm() / want.frobenius_norm();
    assert!(err < 1e-13, "{err}");

    let half = EfficiencyMatrix::new(gr.values().iter().map(|v| v * 0.5).collect()).unwrap();
    let scaled = assemble_channel(&half, &pr, &h, &ps, &gs).unwrap();
    let ratio = scaled.frobenius_norm_sqr() / got.frobenius_norm_sqr();
    assert!((ratio - 0.25).abs() < 1e-13);
}

#[test]
fn scalar_channel_case() {
    let ctx = unit_ctx();
    let array = PlanarArray::uniform(0.4, 0.4, 0.4, 0.4).unwrap();
    let support = wavenumber_support(0.4, 0.4, &ctx, Side::Receiver).unwrap();
    assert_eq!(support.len(), 1);
    let unit = PatternSet::unit_dual();
    let psi = fourier_harmonics(&array, &support, &[unit], &ctx).unwrap();
    let h = apply_polarization(&CMatrix::from_vec(1, 1, vec![Complex64::new(0.3, -0.4)]).unwrap(), 8.0, 3.0, 5).unwrap();
    let id = EfficiencyMatrix::identity(1);
    let got = assemble_channel(&id, &psi, &h, &psi, &id).unwrap();
    let e = psi.theta[(0, 0)];
    let want = (h.theta_theta[(0, 0)] + h.theta_phi[(0, 0)] + h.phi_theta[(0, 0)] + h.phi_phi[(0, 0)]) * e * e.conj();
    assert!((got[(0, 0)] - want).norm() < 1e-15);
}

#[test]
fn hannan_values() {
    let ctx = unit_ctx();
    assert!((hannan_efficiency(0.5, 0.5, &ctx).unwrap() - PI / 4.0).abs() < 1e-12);
    assert!((hannan_efficiency(0.25, 0.25, &ctx).unwrap() - PI / 16.0).abs() < 1e-12);
    assert!((hannan_efficiency(0.125, 0.125, &ctx).unwrap() - PI / 64.0).abs() < 1e-12);
    assert_eq!(hannan_efficiency(1.0, 1.0, &ctx).unwrap(), 1.0);
    assert!(hannan_efficiency(0.0, 0.5, &ctx).is_err());
    assert!(EfficiencyMatrix::new(vec![0.5, 1.2]).is_err());
    assert!(EfficiencyMatrix::new(vec![0.0]).is_err());
}

proptest! {
    #[test]
    fn vmf_density_nonnegative_and_bounded(
        theta in 0.0f64..PI, phi in -PI..PI, mt in 0.0f64..PI, mp in -PI..PI, alpha in 0.0f64..200.0
    ) {
        let c = cluster(mt, mp, alpha);
        let d = vmf_pdf(theta, phi, &c).unwrap();
        let peak = vmf_pdf(mt, mp, &c).unwrap();
        prop_assert!(d >= 0.0 && d.is_finite());
        prop_assert!(d <= peak * (1.0 + 1e-12));
    }

    #[test]
    fn support_is_inside_the_ellipse(lx in 0.3f64..8.0, ly in 0.3f64..8.0) {
        let s = wavenumber_support(lx, ly, &unit_ctx(), Side::Transmitter).unwrap();
        prop_assert_eq!(s.len(), brute_force_support(lx, ly, 1.0).len());
        for &(a, b) in s.indices() {
            let u = a as f64 / lx;
            let v = b as f64 / ly;
            prop_assert!(u * u + v * v <= 1.0);
        }
    }
}
