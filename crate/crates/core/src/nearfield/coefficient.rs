//! Per element-pair LOS and NLOS coefficients.

use core::f64::consts::PI;

use alloc::format;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::geometry::{ArrayGeometry, BounceGeometry, ClusterRay};
use crate::error::{domain, Result};
use crate::pattern::PatternSet;
use crate::wave::{Position3, WaveContext};

/// Spherical: per-element distances and angles. Planar: reference-element
/// angles with phase extended linearly across each array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wavefront {
    Spherical,
    Planar,
}

type Pol = [[Complex64; 2]; 2];

fn contract(rx: (Complex64, Complex64), pol: &Pol, tx: (Complex64, Complex64)) -> Complex64 {
    rx.0 * (pol[0][0] * tx.0 + pol[0][1] * tx.1) + rx.1 * (pol[1][0] * tx.0 + pol[1][1] * tx.1)
}

fn pattern_at(p: &PatternSet, angles: (f64, f64)) -> (Complex64, Complex64) {
    p.field(angles.0, angles.1)
}

fn phase(cycles: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * cycles)
}

/// LOS coefficient between Rx element `u` and Tx element `s` at time `t`;
/// `velocity` is the receiver's.
pub fn los_coefficient(
    geom: &ArrayGeometry,
    u: usize,
    s: usize,
    t: f64,
    velocity: Position3,
    wavefront: Wavefront,
    ctx: &WaveContext,
) -> Result<Complex64> {
    let (rx, tx) = (&geom.rx()[u], &geom.tx()[s]);
    let lambda = ctx.wavelength();
    let r0 = geom.rx_reference();
    let s0 = geom.tx_reference();
    let d00 = r0.distance(&s0);
    if !(d00 > 0.0) {
        return Err(domain("reference elements coincide"));
    }
    let pol: Pol = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
    ];
    let absolute = phase(-d00 / lambda);
    match wavefront {
        Wavefront::Spherical => {
            let v = tx.position - rx.position;
            let d = v.norm();
            if !(d > 0.0) {
                return Err(domain(format!("Rx element {u} coincides with Tx element {s}")));
            }
            let r_hat = v * (1.0 / d);
            let gain = contract(
                pattern_at(&rx.pattern, v.to_angles()),
                &pol,
                pattern_at(&tx.pattern, (-v).to_angles()),
            );
            Ok(gain * absolute * phase((d00 - d) / lambda) * phase(r_hat.dot(&velocity) * t / lambda))
        }
        Wavefront::Planar => {
            let r_hat = (s0 - r0) * (1.0 / d00);
            let t_hat = -r_hat;
            let gain = contract(
                pattern_at(&rx.pattern, r_hat.to_angles()),
                &pol,
                pattern_at(&tx.pattern, t_hat.to_angles()),
            );
            let steer = phase(r_hat.dot(&(rx.position - r0)) / lambda)
                * phase(t_hat.dot(&(tx.position - s0)) / lambda);
            Ok(gain * absolute * steer * phase(r_hat.dot(&velocity) * t / lambda))
        }
    }
}

/// NLOS coefficient of `ray` between Rx element `u` and Tx element `s`.
#[allow(clippy::too_many_arguments)]
pub fn nlos_coefficient(
    ray: &ClusterRay,
    bounce: &BounceGeometry,
    geom: &ArrayGeometry,
    u: usize,
    s: usize,
    t: f64,
    velocity: Position3,
    wavefront: Wavefront,
    ctx: &WaveContext,
) -> Result<Complex64> {
    let (rx, tx) = (&geom.rx()[u], &geom.tx()[s]);
    let lambda = ctx.wavelength();
    let xp = 1.0 / ray.kappa.sqrt();
    let pol: Pol = [
        [phase_rad(ray.phases[0]), phase_rad(ray.phases[1]) * xp],
        [phase_rad(ray.phases[2]) * xp, phase_rad(ray.phases[3])],
    ];
    let amp = (ray.power / ray.rays_in_cluster as f64).sqrt();
    match wavefront {
        Wavefront::Spherical => {
            let gain = contract(
                pattern_at(&rx.pattern, bounce.rx_angles[u]),
                &pol,
                pattern_at(&tx.pattern, bounce.tx_angles[s]),
            );
            let r_hat = (bounce.last_bounce - rx.position) * (1.0 / bounce.rx_distances[u]);
            let steer = phase((bounce.rx_distances[0] - bounce.rx_distances[u]) / lambda)
                * phase((bounce.tx_distances[0] - bounce.tx_distances[s]) / lambda);
            Ok(gain * amp * steer * phase(r_hat.dot(&velocity) * t / lambda))
        }
        Wavefront::Planar => {
            let gain = contract(
                pattern_at(&rx.pattern, bounce.rx_angles[0]),
                &pol,
                pattern_at(&tx.pattern, bounce.tx_angles[0]),
            );
            let r_hat = Position3::from_spherical(bounce.rx_angles[0].0, bounce.rx_angles[0].1);
            let t_hat = Position3::from_spherical(bounce.tx_angles[0].0, bounce.tx_angles[0].1);
            let steer = phase(r_hat.dot(&(rx.position - geom.rx_reference())) / lambda)
                * phase(t_hat.dot(&(tx.position - geom.tx_reference())) / lambda);
            Ok(gain * amp * steer * phase(r_hat.dot(&velocity) * t / lambda))
        }
    }
}

fn phase_rad(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}
