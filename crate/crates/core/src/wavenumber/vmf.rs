use core::f64::consts::PI;

use alloc::{format, vec::Vec};
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{domain, Result};
use crate::wave::Position3;

/// One scattering cluster of an angular power spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VmfCluster {
    pub weight: f64,
    pub mean_theta: f64,
    pub mean_phi: f64,
    /// Concentration α ≥ 0; α = 0 is isotropic.
    pub concentration: f64,
}

impl VmfCluster {
    pub fn mean_direction(&self) -> Position3 {
        Position3::from_spherical(self.mean_theta, self.mean_phi)
    }

    /// Density toward the unit vector `dir`.
    pub fn density_toward(&self, dir: &Position3) -> f64 {
        vmf_density(self.concentration, self.mean_direction().dot(dir))
    }
}

/// α/(4π sinh α) · exp(α cos γ), written to stay finite for large α.
fn vmf_density(alpha: f64, cos_gamma: f64) -> f64 {
    if alpha < 1e-12 {
        return 1.0 / (4.0 * PI);
    }
    // α/(4π sinh α) e^{α c} = α/(2π(1 − e^{−2α})) e^{α(c − 1)}
    alpha / (2.0 * PI * -(-2.0 * alpha).exp_m1()) * (alpha * (cos_gamma - 1.0)).exp()
}

/// Von Mises-Fisher density at (θ, φ) in 1/sr.
pub fn vmf_pdf(theta: f64, phi: f64, cluster: &VmfCluster) -> Result<f64> {
    if !(cluster.concentration >= 0.0) || !cluster.concentration.is_finite() {
        return Err(domain(format!(
            "VMF concentration must be non-negative, got {}",
            cluster.concentration
        )));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(domain(format!("zenith angle {theta} outside [0, π]")));
    }
    let cos_gamma = theta.sin() * cluster.mean_theta.sin() * (phi - cluster.mean_phi).cos()
        + theta.cos() * cluster.mean_theta.cos();
    Ok(vmf_density(cluster.concentration, cos_gamma))
}

/// Weighted VMF mixture; weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct VmfMixture {
    clusters: Vec<VmfCluster>,
    means: Vec<Position3>,
}

impl VmfMixture {
    pub fn new(clusters: Vec<VmfCluster>) -> Result<Self> {
        if clusters.is_empty() {
            return Err(domain("VMF mixture needs at least one cluster"));
        }
        for (i, c) in clusters.iter().enumerate() {
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(domain(format!("cluster {i} weight {} is negative", c.weight)));
            }
            if !(c.concentration >= 0.0 && c.concentration.is_finite()) {
                return Err(domain(format!(
                    "cluster {i} concentration {} is negative",
                    c.concentration
                )));
            }
            if !(c.mean_theta.is_finite() && c.mean_phi.is_finite()) {
                return Err(domain(format!("cluster {i} mean direction is not finite")));
            }
        }
        let total: f64 = clusters.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!("mixture weights sum to {total}, expected 1")));
        }
        let means = clusters.iter().map(|c| c.mean_direction()).collect();
        Ok(Self { clusters, means })
    }

    /// Weights are rescaled to sum to one before validation.
    pub fn normalized(mut clusters: Vec<VmfCluster>) -> Result<Self> {
        let total: f64 = clusters.iter().map(|c| c.weight).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(domain("mixture weights must have a positive sum"));
        }
        for c in &mut clusters {
            c.weight /= total;
        }
        Self::new(clusters)
    }

    /// Single uniform cluster.
    pub fn isotropic() -> Self {
        Self::new(alloc::vec![VmfCluster {
            weight: 1.0,
            mean_theta: 0.0,
            mean_phi: 0.0,
            concentration: 0.0,
        }])
        .expect("isotropic mixture is valid")
    }

    pub fn clusters(&self) -> &[VmfCluster] {
        &self.clusters
    }

    /// A²(direction) for a unit vector.
    pub fn density_toward(&self, dir: &Position3) -> f64 {
        self.clusters
            .iter()
            .zip(&self.means)
            .map(|(c, m)| c.weight * vmf_density(c.concentration, m.dot(dir)))
            .sum()
    }

    pub fn density(&self, theta: f64, phi: f64) -> f64 {
        self.density_toward(&Position3::from_spherical(theta, phi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cluster(alpha: f64) -> VmfCluster {
        VmfCluster {
            weight: 1.0,
            mean_theta: 0.7,
            mean_phi: -1.2,
            concentration: alpha,
        }
    }

    #[test]
    fn isotropic_limit() {
        let v = vmf_pdf(1.3, 2.0, &cluster(0.0)).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-15);
        // continuity at tiny α
        let v = vmf_pdf(1.3, 2.0, &cluster(1e-9)).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn peak_density() {
        for alpha in [0.5, 5.0, 50.0, 500.0] {
            let v = vmf_pdf(0.7, -1.2, &cluster(alpha)).unwrap();
            let expected = alpha / (2.0 * PI * (1.0 - (-2.0 * alpha).exp()));
            assert!((v - expected).abs() < 1e-12 * expected);
        }
        let v = vmf_pdf(0.7, -1.2, &cluster(400.0)).unwrap();
        assert!((v - 400.0 / (2.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn negative_concentration_rejected() {
        assert!(vmf_pdf(0.1, 0.1, &cluster(-1.0)).is_err());
        assert!(VmfMixture::new(alloc::vec![cluster(-1.0)]).is_err());
    }

    #[test]
    fn mixture_weights_must_sum_to_one() {
        let mut a = cluster(1.0);
        a.weight = 0.5;
        let mut b = cluster(2.0);
        b.weight = 0.4;
        assert!(VmfMixture::new(alloc::vec![a, b]).is_err());
        let m = VmfMixture::normalized(alloc::vec![a, b]).unwrap();
        assert!((m.clusters()[0].weight - 5.0 / 9.0).abs() < 1e-15);
    }
}
