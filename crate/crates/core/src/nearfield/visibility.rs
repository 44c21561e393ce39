//! Cluster visibility and the per-element attenuation factor.

use alloc::{format, vec, vec::Vec};
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::geometry::{ArrayGeometry, BounceGeometry, ClusterRay};
use crate::error::{domain, shape, Result};
use crate::rng::{derive_seed, rng_from_seed, standard_normal, stream_id};

/// V = clamp(A·exp(−(P_max − P)/λ) + B + δ, 0, 1) with powers in dB and
/// δ ~ N(0, ξ²); `roll_off` is the logistic slope C of the attenuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityModel {
    pub a: f64,
    /// dB
    pub lambda: f64,
    pub b: f64,
    pub xi: f64,
    pub roll_off: f64,
}

impl Default for VisibilityModel {
    fn default() -> Self {
        Self {
            a: 0.6,
            lambda: 10.0,
            b: 0.4,
            xi: 0.05,
            roll_off: 10.0,
        }
    }
}

impl VisibilityModel {
    pub fn validate(&self) -> Result<()> {
        let ok = self.a >= 0.0
            && self.lambda > 0.0
            && (0.0..=1.0).contains(&self.b)
            && self.xi >= 0.0
            && self.roll_off > 0.0
            && [self.a, self.lambda, self.xi, self.roll_off].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(domain(format!("invalid visibility model {self:?}")))
        }
    }
}

/// Visibility probability of a cluster with linear power `power`.
pub fn visibility_probability(
    power: f64,
    max_power: f64,
    model: &VisibilityModel,
    seed: u64,
) -> Result<f64> {
    model.validate()?;
    if !(max_power > 0.0) || !(power >= 0.0) || power > max_power * (1.0 + 1e-12) {
        return Err(domain(format!(
            "cluster power {power} must lie in [0, {max_power}] with a positive maximum"
        )));
    }
    let gap_db = if power > 0.0 { 10.0 * (max_power / power).log10().max(0.0) } else { f64::INFINITY };
    let delta = if model.xi > 0.0 {
        model.xi * standard_normal(&mut rng_from_seed(seed))
    } else {
        0.0
    };
    Ok((model.a * (-gap_db / model.lambda).exp() + model.b + delta).clamp(0.0, 1.0))
}

/// 1/(1 + exp(Δd·C)).
pub fn attenuation_factor(offset: f64, roll_off: f64) -> f64 {
    let x = offset * roll_off;
    if x > 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Δd = (d − d_min)/(d_max − d_min) − V; equal extremes give −V.
pub fn normalized_offset(distance: f64, min: f64, max: f64, visibility: f64) -> f64 {
    if max - min <= 1e-12 * max.abs().max(1.0) {
        -visibility
    } else {
        (distance - min) / (max - min) - visibility
    }
}

/// Attenuation factors α for the LOS path and each ray, per Tx element.
#[derive(Debug, Clone, PartialEq)]
pub struct Attenuation {
    pub los: Vec<f64>,
    /// Indexed [ray][tx element].
    pub rays: Vec<Vec<f64>>,
    /// V per cluster, followed by the LOS value.
    pub visibility: Vec<f64>,
}

fn spread(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

impl Attenuation {
    /// α ≡ 1.
    pub fn unity(rays: usize, tx_elements: usize) -> Self {
        Self {
            los: vec![1.0; tx_elements],
            rays: vec![vec![1.0; tx_elements]; rays],
            visibility: Vec::new(),
        }
    }

    /// Draws one visibility per cluster (seeded by `(seed, cluster)`) and
    /// one for LOS, treated as a cluster at the maximum power.
    pub fn draw(
        geom: &ArrayGeometry,
        rays: &[ClusterRay],
        bounces: &[BounceGeometry],
        model: &VisibilityModel,
        seed: u64,
    ) -> Result<Self> {
        model.validate()?;
        if rays.len() != bounces.len() {
            return Err(shape("one bounce geometry per ray is required"));
        }
        let clusters = rays.iter().map(|r| r.cluster + 1).max().unwrap_or(0);
        let mut power = vec![0.0f64; clusters];
        for r in rays {
            power[r.cluster] = power[r.cluster].max(r.power);
        }
        let max_power = power.iter().copied().fold(0.0, f64::max);
        let stream = stream_id("cluster-visibility");
        let mut visibility = Vec::with_capacity(clusters + 1);
        for (n, &p) in power.iter().enumerate() {
            let v = if max_power > 0.0 {
                visibility_probability(p, max_power, model, derive_seed(seed, stream, n as u64))?
            } else {
                model.b
            };
            visibility.push(v);
        }
        let v_los = visibility_probability(1.0, 1.0, model, derive_seed(seed, stream_id("los-visibility"), 0))?;
        visibility.push(v_los);

        let r0 = geom.rx_reference();
        let los_d: Vec<f64> = geom.tx().iter().map(|e| e.position.distance(&r0)).collect();
        let factors = |d: &[f64], v: f64| -> Vec<f64> {
            let (lo, hi) = spread(d);
            d.iter().map(|&x| attenuation_factor(normalized_offset(x, lo, hi, v), model.roll_off)).collect()
        };
        let los = factors(&los_d, v_los);
        let rays = rays
            .iter()
            .zip(bounces)
            .map(|(r, b)| factors(&b.tx_distances, visibility[r.cluster]))
            .collect();
        Ok(Self { los, rays, visibility })
    }
}
