//! Impulse response, narrowband channel and the wavefront correlation metric.

use alloc::{format, vec::Vec};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::coefficient::{los_coefficient, nlos_coefficient, Wavefront};
use super::geometry::{locate_bounce_scatterers, ArrayGeometry, BounceGeometry, ClusterRay};
use super::visibility::Attenuation;
use crate::error::{domain, shape, Result};
use crate::linalg::{inner, vector_norm, CMatrix};
use crate::wave::{Position3, WaveContext, SPEED_OF_LIGHT};

/// Geometry, rays with their placed scatterers, K-factor and UE motion.
#[derive(Debug, Clone)]
pub struct NearFieldLink {
    pub geometry: ArrayGeometry,
    pub rays: Vec<ClusterRay>,
    pub bounces: Vec<BounceGeometry>,
    /// Linear LOS-to-NLOS power ratio; `f64::INFINITY` for pure LOS.
    pub k_factor: f64,
    pub velocity: Position3,
}

impl NearFieldLink {
    pub fn new(
        geometry: ArrayGeometry,
        rays: Vec<ClusterRay>,
        k_factor: f64,
        velocity: Position3,
        ctx: &WaveContext,
    ) -> Result<Self> {
        if !(k_factor >= 0.0) {
            return Err(domain(format!("K-factor {k_factor} must be nonnegative")));
        }
        if !velocity.is_finite() {
            return Err(domain("velocity must be finite"));
        }
        if !(geometry.reference_distance() > 0.0) {
            return Err(domain("reference elements coincide"));
        }
        let bounces = rays
            .iter()
            .map(|r| locate_bounce_scatterers(r, &geometry, ctx))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            geometry,
            rays,
            bounces,
            k_factor,
            velocity,
        })
    }

    pub fn los_delay(&self) -> f64 {
        self.geometry.reference_distance() / SPEED_OF_LIGHT
    }

    /// (√(K/(K+1)), √(1/(K+1))).
    pub fn path_weights(&self) -> (f64, f64) {
        if self.k_factor.is_infinite() {
            (1.0, 0.0)
        } else {
            let k = self.k_factor;
            ((k / (k + 1.0)).sqrt(), (1.0 / (k + 1.0)).sqrt())
        }
    }

    pub fn rx_len(&self) -> usize {
        self.geometry.rx().len()
    }

    pub fn tx_len(&self) -> usize {
        self.geometry.tx().len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    /// s
    pub delay: f64,
    pub coefficient: Complex64,
}

fn check_attenuation(link: &NearFieldLink, att: &Attenuation) -> Result<()> {
    let nt = link.tx_len();
    if att.los.len() != nt || att.rays.len() != link.rays.len() || att.rays.iter().any(|r| r.len() != nt) {
        return Err(shape("attenuation factors do not match the link"));
    }
    Ok(())
}

fn impulse_response(
    link: &NearFieldLink,
    att: &Attenuation,
    t: f64,
    alpha_threshold: f64,
    wavefront: Wavefront,
    ctx: &WaveContext,
) -> Result<Vec<Vec<Tap>>> {
    check_attenuation(link, att)?;
    let (w_los, w_nlos) = link.path_weights();
    let (nr, nt) = (link.rx_len(), link.tx_len());
    let los_delay = link.los_delay();
    let mut out = Vec::with_capacity(nr * nt);
    for u in 0..nr {
        for s in 0..nt {
            let mut taps = Vec::with_capacity(1 + link.rays.len());
            if att.los[s] > alpha_threshold {
                let h = los_coefficient(&link.geometry, u, s, t, link.velocity, wavefront, ctx)?;
                taps.push(Tap {
                    delay: los_delay,
                    coefficient: h * (w_los * att.los[s]),
                });
            }
            for (i, (ray, bounce)) in link.rays.iter().zip(&link.bounces).enumerate() {
                let a = att.rays[i][s];
                if a <= alpha_threshold {
                    continue;
                }
                let h = nlos_coefficient(ray, bounce, &link.geometry, u, s, t, link.velocity, wavefront, ctx)?;
                taps.push(Tap {
                    delay: ray.delay,
                    coefficient: h * (w_nlos * a),
                });
            }
            out.push(taps);
        }
    }
    Ok(out)
}

/// Spherical-wavefront taps for every (u, s), indexed `u·N_T + s`. Taps whose
/// attenuation does not exceed `alpha_threshold` are dropped; equal delays
/// are kept as separate taps.
pub fn channel_impulse_response(
    link: &NearFieldLink,
    att: &Attenuation,
    t: f64,
    alpha_threshold: f64,
    ctx: &WaveContext,
) -> Result<Vec<Vec<Tap>>> {
    impulse_response(link, att, t, alpha_threshold, Wavefront::Spherical, ctx)
}

/// As [`channel_impulse_response`] under the planar-wavefront assumption.
pub fn planar_wave_channel(
    link: &NearFieldLink,
    att: &Attenuation,
    t: f64,
    alpha_threshold: f64,
    ctx: &WaveContext,
) -> Result<Vec<Vec<Tap>>> {
    impulse_response(link, att, t, alpha_threshold, Wavefront::Planar, ctx)
}

/// N_R × N_T matrix of tap sums.
pub fn narrowband_channel(
    link: &NearFieldLink,
    att: &Attenuation,
    t: f64,
    wavefront: Wavefront,
    ctx: &WaveContext,
) -> Result<CMatrix> {
    let taps = impulse_response(link, att, t, 0.0, wavefront, ctx)?;
    let data = taps
        .iter()
        .map(|ts| ts.iter().map(|t| t.coefficient).sum())
        .collect();
    CMatrix::from_vec(link.rx_len(), link.tx_len(), data)
}

/// ρ = |aᴴb| / (‖a‖‖b‖).
pub fn spatial_correlation(planar: &[Complex64], spherical: &[Complex64]) -> Result<f64> {
    if planar.len() != spherical.len() {
        return Err(shape(format!("{} vs {} entries", planar.len(), spherical.len())));
    }
    let na = vector_norm(planar);
    let nb = vector_norm(spherical);
    if !(na > 0.0 && nb > 0.0) {
        return Err(domain("correlation of a zero channel"));
    }
    Ok((inner(planar, spherical).norm() / (na * nb)).min(1.0))
}
