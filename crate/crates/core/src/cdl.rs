//! Cluster-delay-line tables and their conversion to angular spectra and rays.

use core::f64::consts::PI;

use alloc::{format, vec::Vec};
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{domain, Result};
use crate::wave::Position3;
use crate::wavenumber::{VmfCluster, VmfMixture};

/// Offsets (in units of the cluster spread) of the 20 rays inside a cluster.
pub const RAY_OFFSETS: [f64; 20] = [
    0.0447, -0.0447, 0.1413, -0.1413, 0.2492, -0.2492, 0.3715, -0.3715, 0.5129, -0.5129, 0.6797,
    -0.6797, 0.8844, -0.8844, 1.1481, -1.1481, 1.5195, -1.5195, 2.1551, -2.1551,
];

/// One tabulated cluster; angles in degrees, delay normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdlCluster {
    pub delay: f64,
    pub power_db: f64,
    pub aod_deg: f64,
    pub aoa_deg: f64,
    pub zod_deg: f64,
    pub zoa_deg: f64,
}

/// Intra-cluster spreads in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterSpreads {
    pub asd_deg: f64,
    pub asa_deg: f64,
    pub zsd_deg: f64,
    pub zsa_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdlTable {
    pub clusters: Vec<CdlCluster>,
    pub spreads: ClusterSpreads,
    pub xpr_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkEnd {
    Departure,
    Arrival,
}

/// A ray with angles in radians and linear power (all rays sum to 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdlRay {
    pub cluster: usize,
    pub ray: usize,
    pub power: f64,
    pub delay: f64,
    pub aod: f64,
    pub aoa: f64,
    pub zod: f64,
    pub zoa: f64,
}

/// Horizontal array frame facing `boresight_azimuth` (rad): local z is the
/// boresight, local y is global vertical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayFrame {
    x: Position3,
    y: Position3,
    z: Position3,
}

impl ArrayFrame {
    pub fn facing(boresight_azimuth: f64) -> Self {
        let (s, c) = boresight_azimuth.sin_cos();
        Self {
            x: Position3::new(-s, c, 0.0),
            y: Position3::new(0.0, 0.0, 1.0),
            z: Position3::new(c, s, 0.0),
        }
    }

    /// Local direction of a global (zenith, azimuth) pair, both in radians.
    pub fn to_local(&self, zenith: f64, azimuth: f64) -> Position3 {
        let d = Position3::from_spherical(zenith, azimuth);
        Position3::new(d.dot(&self.x), d.dot(&self.y), d.dot(&self.z))
    }
}

impl CdlTable {
    pub fn new(clusters: Vec<CdlCluster>, spreads: ClusterSpreads, xpr_db: f64) -> Result<Self> {
        if clusters.is_empty() {
            return Err(domain("cluster table is empty"));
        }
        for (i, c) in clusters.iter().enumerate() {
            let vals = [c.delay, c.power_db, c.aod_deg, c.aoa_deg, c.zod_deg, c.zoa_deg];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(domain(format!("cluster {} has a non-finite field", i + 1)));
            }
            if c.delay < 0.0 {
                return Err(domain(format!("cluster {} has negative delay", i + 1)));
            }
            if !(0.0..=180.0).contains(&c.zod_deg) || !(0.0..=180.0).contains(&c.zoa_deg) {
                return Err(domain(format!("cluster {} zenith outside [0, 180] deg", i + 1)));
            }
        }
        let s = [spreads.asd_deg, spreads.asa_deg, spreads.zsd_deg, spreads.zsa_deg];
        if s.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(domain("cluster spreads must be nonnegative"));
        }
        if !xpr_db.is_finite() {
            return Err(domain("XPR must be finite"));
        }
        Ok(Self {
            clusters,
            spreads,
            xpr_db,
        })
    }

    /// Cluster powers in linear scale normalized to sum to one.
    pub fn linear_powers(&self) -> Vec<f64> {
        let lin: Vec<f64> = self.clusters.iter().map(|c| 10f64.powf(c.power_db / 10.0)).collect();
        let total: f64 = lin.iter().sum();
        lin.into_iter().map(|p| p / total).collect()
    }

    pub fn strongest(&self) -> &CdlCluster {
        self.clusters
            .iter()
            .max_by(|a, b| a.power_db.total_cmp(&b.power_db))
            .expect("table is nonempty")
    }

    /// Azimuth (rad) of the strongest cluster at `end`.
    pub fn boresight(&self, end: LinkEnd) -> f64 {
        let c = self.strongest();
        match end {
            LinkEnd::Departure => c.aod_deg.to_radians(),
            LinkEnd::Arrival => c.aoa_deg.to_radians(),
        }
    }

    /// One VMF component per cluster, means expressed in `frame`.
    pub fn angular_spectrum(
        &self,
        end: LinkEnd,
        frame: &ArrayFrame,
        concentration: f64,
    ) -> Result<VmfMixture> {
        if !(concentration >= 0.0 && concentration.is_finite()) {
            return Err(domain(format!("concentration {concentration} must be nonnegative")));
        }
        let clusters = self
            .clusters
            .iter()
            .zip(self.linear_powers())
            .map(|(c, w)| {
                let (zen, az) = match end {
                    LinkEnd::Departure => (c.zod_deg, c.aod_deg),
                    LinkEnd::Arrival => (c.zoa_deg, c.aoa_deg),
                };
                let (mean_theta, mean_phi) = frame.to_local(zen.to_radians(), az.to_radians()).to_angles();
                VmfCluster {
                    weight: w,
                    mean_theta,
                    mean_phi,
                    concentration,
                }
            })
            .collect();
        VmfMixture::normalized(clusters)
    }

    /// 20 rays per cluster with offsets scaled by the intra-cluster spreads.
    pub fn rays(&self) -> Vec<CdlRay> {
        let sp = self.spreads;
        let m = RAY_OFFSETS.len() as f64;
        let mut out = Vec::with_capacity(self.clusters.len() * RAY_OFFSETS.len());
        for (n, (c, p)) in self.clusters.iter().zip(self.linear_powers()).enumerate() {
            for (k, off) in RAY_OFFSETS.iter().enumerate() {
                out.push(CdlRay {
                    cluster: n,
                    ray: k,
                    power: p / m,
                    delay: c.delay,
                    aod: (c.aod_deg + sp.asd_deg * off).to_radians(),
                    aoa: (c.aoa_deg + sp.asa_deg * off).to_radians(),
                    zod: (c.zod_deg + sp.zsd_deg * off).to_radians().clamp(0.0, PI),
                    zoa: (c.zoa_deg + sp.zsa_deg * off).to_radians().clamp(0.0, PI),
                });
            }
        }
        out
    }
}

/// VMF concentration for an angular spread in degrees: α = 1/spread².
pub fn concentration_from_spread(spread_deg: f64) -> Result<f64> {
    if !(spread_deg > 0.0 && spread_deg.is_finite()) {
        return Err(domain(format!("angular spread {spread_deg} deg must be positive")));
    }
    let s = spread_deg.to_radians();
    Ok(1.0 / (s * s))
}
