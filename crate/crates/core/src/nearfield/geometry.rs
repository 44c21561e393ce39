//! Element layout, rays and bounce-scatterer placement.

use alloc::{format, vec::Vec};
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::cdl::CdlTable;
use crate::error::{domain, Error, Result};
use crate::pattern::PatternSet;
use crate::rng::{rng_from_seed, standard_normal, uniform_phase};
use crate::wave::{Position3, WaveContext, SPEED_OF_LIGHT};

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayElement {
    pub position: Position3,
    pub pattern: PatternSet,
}

/// Transmit and receive elements; index 0 on each side is the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    tx: Vec<ArrayElement>,
    rx: Vec<ArrayElement>,
}

impl ArrayGeometry {
    pub fn new(tx: Vec<ArrayElement>, rx: Vec<ArrayElement>) -> Result<Self> {
        if tx.is_empty() || rx.is_empty() {
            return Err(domain("both arrays need at least one element"));
        }
        if tx.iter().chain(&rx).any(|e| !e.position.is_finite()) {
            return Err(domain("element positions must be finite"));
        }
        Ok(Self { tx, rx })
    }

    pub fn tx(&self) -> &[ArrayElement] {
        &self.tx
    }

    pub fn rx(&self) -> &[ArrayElement] {
        &self.rx
    }

    pub fn tx_reference(&self) -> Position3 {
        self.tx[0].position
    }

    pub fn rx_reference(&self) -> Position3 {
        self.rx[0].position
    }

    /// Distance between the reference elements.
    pub fn reference_distance(&self) -> f64 {
        self.tx_reference().distance(&self.rx_reference())
    }
}

/// One ray of a cluster. Angles are global (zenith, azimuth) in radians;
/// `power` is the cluster power, shared by its `rays_in_cluster` rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterRay {
    pub cluster: usize,
    pub ray: usize,
    pub power: f64,
    pub rays_in_cluster: usize,
    /// Absolute propagation delay between the reference elements, s.
    pub delay: f64,
    pub departure: (f64, f64),
    pub arrival: (f64, f64),
    pub kappa: f64,
    /// Φ^θθ, Φ^θφ, Φ^φθ, Φ^φφ
    pub phases: [f64; 4],
}

impl ClusterRay {
    pub fn validate(&self) -> Result<()> {
        if !(self.power >= 0.0 && self.power.is_finite()) {
            return Err(domain(format!("ray power {} must be nonnegative", self.power)));
        }
        if !(self.kappa > 0.0) {
            return Err(domain(format!("ray XPR {} must be positive", self.kappa)));
        }
        if !(self.delay >= 0.0 && self.delay.is_finite()) || self.rays_in_cluster == 0 {
            return Err(domain("ray delay must be nonnegative and the cluster nonempty"));
        }
        Ok(())
    }
}

/// Rays of a cluster table with absolute delays
/// `los_delay + excess_offset + delay_spread·normalized_delay`.
///
/// XPR per ray is log-normal around the table value with `xpr_std_db`;
/// polarization phases are uniform. Draws are a function of `seed` only.
pub fn rays_from_cdl(
    table: &CdlTable,
    los_delay: f64,
    excess_offset: f64,
    delay_spread: f64,
    xpr_std_db: f64,
    seed: u64,
) -> Result<Vec<ClusterRay>> {
    if !(los_delay >= 0.0 && excess_offset > 0.0 && delay_spread >= 0.0 && xpr_std_db >= 0.0) {
        return Err(domain("ray delays and XPR spread must be nonnegative, the offset positive"));
    }
    let mut rng = rng_from_seed(seed);
    let powers = table.linear_powers();
    let rays = table.rays();
    let m = rays.len() / table.clusters.len();
    Ok(rays
        .iter()
        .map(|r| {
            let x = table.xpr_db + xpr_std_db * standard_normal(&mut rng);
            let phases = [
                uniform_phase(&mut rng),
                uniform_phase(&mut rng),
                uniform_phase(&mut rng),
                uniform_phase(&mut rng),
            ];
            ClusterRay {
                cluster: r.cluster,
                ray: r.ray,
                power: powers[r.cluster],
                rays_in_cluster: m,
                delay: los_delay + excess_offset + delay_spread * r.delay,
                departure: (r.zod, r.aod),
                arrival: (r.zoa, r.aoa),
                kappa: 10f64.powf(x / 10.0),
                phases,
            }
        })
        .collect())
}

/// Scatterer positions of a ray and what each element sees.
#[derive(Debug, Clone, PartialEq)]
pub struct BounceGeometry {
    pub first_bounce: Position3,
    pub last_bounce: Position3,
    /// Distance from each Tx element to the first bounce.
    pub tx_distances: Vec<f64>,
    /// Distance from each Rx element to the last bounce.
    pub rx_distances: Vec<f64>,
    /// (zenith, azimuth) from each Tx element toward the first bounce.
    pub tx_angles: Vec<(f64, f64)>,
    /// (zenith, azimuth) from each Rx element toward the last bounce.
    pub rx_angles: Vec<(f64, f64)>,
}

impl BounceGeometry {
    /// Path length through both bounces between the reference elements.
    pub fn path_length(&self) -> f64 {
        self.tx_distances[0] + self.first_bounce.distance(&self.last_bounce) + self.rx_distances[0]
    }
}

/// Places the bounces at equal leg length t along the departure ray from the
/// Tx reference and the arrival ray from the Rx reference, with t chosen so
/// that 2t + |first − last| = c·τ.
pub fn locate_bounce_scatterers(
    ray: &ClusterRay,
    geom: &ArrayGeometry,
    _ctx: &WaveContext,
) -> Result<BounceGeometry> {
    ray.validate()?;
    let t0 = geom.tx_reference();
    let r0 = geom.rx_reference();
    let path = SPEED_OF_LIGHT * ray.delay;
    let direct = t0.distance(&r0);
    if !(path > direct * (1.0 + 1e-12)) {
        return Err(Error::InfeasibleGeometry(format!(
            "ray ({}, {}) path {path:.6} m does not exceed the direct distance {direct:.6} m",
            ray.cluster, ray.ray
        )));
    }
    let ud = Position3::from_spherical(ray.departure.0, ray.departure.1);
    let ua = Position3::from_spherical(ray.arrival.0, ray.arrival.1);
    let total = |t: f64| 2.0 * t + (t0 + ud * t).distance(&(r0 + ua * t));
    // total(0) = direct < path and total(path/2) ≥ path
    let (mut lo, mut hi) = (0.0, 0.5 * path);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < path {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * path {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    let first = t0 + ud * t;
    let last = r0 + ua * t;
    let per_element = |elems: &[ArrayElement], target: Position3| -> (Vec<f64>, Vec<(f64, f64)>) {
        elems
            .iter()
            .map(|e| {
                let v = target - e.position;
                (v.norm(), v.to_angles())
            })
            .unzip()
    };
    let (tx_distances, tx_angles) = per_element(geom.tx(), first);
    let (rx_distances, rx_angles) = per_element(geom.rx(), last);
    if tx_distances.iter().chain(&rx_distances).any(|d| !(*d > 0.0)) {
        return Err(Error::InfeasibleGeometry(format!(
            "ray ({}, {}) scatterer coincides with an element",
            ray.cluster, ray.ray
        )));
    }
    Ok(BounceGeometry {
        first_bounce: first,
        last_bounce: last,
        tx_distances,
        rx_distances,
        tx_angles,
        rx_angles,
    })
}
