//! Wavenumber-cell powers of an angular spectrum.
//!
//! Cell β is the image on the front hemisphere of the k-space rectangle
//! centred on its lattice point, clipped to the propagating disk. Lattice
//! rectangles whose centre falls outside the support but which still reach
//! into the disk are merged into the nearest supported cell, so the cells of
//! a support tile the whole hemisphere.
//!
//! With kʸ = R sin t and R = √(k₀² − kˣ²) the solid-angle element
//! dΩ = dkˣ dkʸ/(k₀ k_z) becomes dkˣ dt / k₀, which removes the 1/k_z edge
//! singularity. The remaining square-root kinks in kˣ are split out and
//! integrated with an endpoint-clustered Gauss-Legendre rule.

use core::f64::consts::PI;

use alloc::{format, vec, vec::Vec};
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::support::WavenumberSupport;
use super::vmf::VmfMixture;
use crate::error::{domain, shape, Error, Result};
use crate::linalg::CMatrix;
use crate::quadrature::GaussLegendre;
use crate::wave::{Position3, WaveContext};

/// Per-cell Gauss-Legendre order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellQuadrature {
    pub order: usize,
}

impl Default for CellQuadrature {
    fn default() -> Self {
        Self { order: 16 }
    }
}

/// Tolerance on Σ cells versus the independent hemisphere integral.
const PARTITION_TOLERANCE: f64 = 1e-3;

/// Variances σ²_{β,α} (and optional means μ_{β,α}) of the wavenumber-domain
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingVariances {
    rows: usize,
    cols: usize,
    sigma2: Vec<f64>,
    mean: Option<CMatrix>,
}

impl CouplingVariances {
    pub fn new(rows: usize, cols: usize, sigma2: Vec<f64>) -> Result<Self> {
        if sigma2.len() != rows * cols {
            return Err(shape(format!(
                "{} variances for a {rows}x{cols} channel",
                sigma2.len()
            )));
        }
        if let Some(v) = sigma2.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(domain(format!("variance {v} is negative or not finite")));
        }
        Ok(Self {
            rows,
            cols,
            sigma2,
            mean: None,
        })
    }

    /// σ²_{β,α} = rx[β]·tx[α].
    pub fn from_separable(rx: &[f64], tx: &[f64]) -> Result<Self> {
        let sigma2 = rx.iter().flat_map(|r| tx.iter().map(move |t| r * t)).collect();
        Self::new(rx.len(), tx.len(), sigma2)
    }

    pub fn with_mean(mut self, mean: CMatrix) -> Result<Self> {
        if mean.shape() != (self.rows, self.cols) {
            return Err(shape("mean matrix does not match variance shape"));
        }
        if !mean.is_finite() {
            return Err(domain("mean matrix is not finite"));
        }
        self.mean = Some(mean);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, beta: usize, alpha: usize) -> f64 {
        self.sigma2[beta * self.cols + alpha]
    }

    pub fn values(&self) -> &[f64] {
        &self.sigma2
    }

    pub fn mean(&self) -> Option<&CMatrix> {
        self.mean.as_ref()
    }

    pub fn total(&self) -> f64 {
        self.sigma2.iter().sum()
    }
}

fn integrate_rectangle(
    (kx0, kx1): (f64, f64),
    (ky0, ky1): (f64, f64),
    k0: f64,
    gl: &GaussLegendre,
    f: &dyn Fn(&Position3) -> f64,
) -> f64 {
    let a = kx0.max(-k0);
    let b = kx1.min(k0);
    if a >= b {
        return 0.0;
    }
    let mut cuts = vec![a, b];
    for c in [ky0, ky1] {
        if c.abs() < k0 {
            let x = (k0 * k0 - c * c).sqrt();
            for x in [-x, x] {
                if x > a && x < b {
                    cuts.push(x);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for seg in cuts.windows(2) {
        if seg[1] - seg[0] <= 0.0 {
            continue;
        }
        for (kx, wx) in gl.clustered_points(seg[0], seg[1]) {
            let r = (k0 * k0 - kx * kx).max(0.0).sqrt();
            if r == 0.0 {
                continue;
            }
            let lo = ky0.max(-r);
            let hi = ky1.min(r);
            if lo >= hi {
                continue;
            }
            let t_lo = (lo / r).clamp(-1.0, 1.0).asin();
            let t_hi = (hi / r).clamp(-1.0, 1.0).asin();
            let inner = gl.integrate(t_lo, t_hi, |t| {
                let (s, c) = t.sin_cos();
                f(&Position3::new(kx / k0, r * s / k0, r * c / k0))
            });
            total += wx * inner;
        }
    }
    total / k0
}

/// Unnormalized ∫_{Ω(β)} A² dΩ for each index of `support`.
pub fn cell_powers(
    support: &WavenumberSupport,
    mixture: &VmfMixture,
    ctx: &WaveContext,
    quad: CellQuadrature,
) -> Result<Vec<f64>> {
    if support.is_empty() {
        return Err(domain("empty wavenumber support"));
    }
    if quad.order == 0 {
        return Err(domain("quadrature order must be positive"));
    }
    let gl = GaussLegendre::new(quad.order);
    let k0 = ctx.wavenumber();
    let (length_x, length_y) = support.lengths();
    let dkx = 2.0 * PI / length_x;
    let dky = 2.0 * PI / length_y;
    let mx = (k0 / dkx).ceil() as i32 + 1;
    let my = (k0 / dky).ceil() as i32 + 1;
    let density = |d: &Position3| mixture.density_toward(d);
    let mut powers = vec![0.0; support.len()];
    for ly in -my..=my {
        for lx in -mx..=mx {
            let xr = ((lx as f64 - 0.5) * dkx, (lx as f64 + 0.5) * dkx);
            let yr = ((ly as f64 - 0.5) * dky, (ly as f64 + 0.5) * dky);
            // nearest point of the rectangle to the origin
            let nx = 0f64.clamp(xr.0, xr.1);
            let ny = 0f64.clamp(yr.0, yr.1);
            if nx * nx + ny * ny >= k0 * k0 {
                continue;
            }
            let owner = match support.position((lx, ly)) {
                Some(i) => i,
                None => nearest_supported(support, lx as f64 * dkx, ly as f64 * dky, dkx, dky),
            };
            powers[owner] += integrate_rectangle(xr, yr, k0, &gl, &density);
        }
    }
    Ok(powers)
}

fn nearest_supported(support: &WavenumberSupport, kx: f64, ky: f64, dkx: f64, dky: f64) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (i, &(sx, sy)) in support.indices().iter().enumerate() {
        let d = (sx as f64 * dkx - kx).powi(2) + (sy as f64 * dky - ky).powi(2);
        if d < best.0 - 1e-12 * best.0.min(1e300) {
            best = (d, i);
        }
    }
    best.1
}

/// ∫ A² dΩ over the front hemisphere θ ≤ π/2 by a composite (θ, φ) rule.
pub fn hemisphere_mass(mixture: &VmfMixture) -> f64 {
    let gl = GaussLegendre::new(8);
    let theta_panels = 48;
    let phi_panels = 96;
    let dt = 0.5 * PI / theta_panels as f64;
    let dp = 2.0 * PI / phi_panels as f64;
    let mut total = 0.0;
    for i in 0..theta_panels {
        let t0 = i as f64 * dt;
        total += gl.integrate(t0, t0 + dt, |theta| {
            let st = theta.sin();
            let mut ring = 0.0;
            for j in 0..phi_panels {
                let p0 = -PI + j as f64 * dp;
                ring += gl.integrate(p0, p0 + dp, |phi| mixture.density(theta, phi));
            }
            ring * st
        });
    }
    total
}

/// Separable coupling variances: per-side cell powers normalized by the
/// front-hemisphere power of that side's spectrum.
///
/// Fails with [`Error::Numerical`] when the cells do not reproduce the
/// hemisphere integral to 1e-3.
pub fn coupling_variances(
    support_r: &WavenumberSupport,
    support_s: &WavenumberSupport,
    aps_r: &VmfMixture,
    aps_s: &VmfMixture,
    ctx: &WaveContext,
    quad: CellQuadrature,
) -> Result<CouplingVariances> {
    let rx = normalized_cells(support_r, aps_r, ctx, quad, "receiver")?;
    let tx = normalized_cells(support_s, aps_s, ctx, quad, "transmitter")?;
    CouplingVariances::from_separable(&rx, &tx)
}

fn normalized_cells(
    support: &WavenumberSupport,
    aps: &VmfMixture,
    ctx: &WaveContext,
    quad: CellQuadrature,
    side: &str,
) -> Result<Vec<f64>> {
    let cells = cell_powers(support, aps, ctx, quad)?;
    let mass = hemisphere_mass(aps);
    if !(mass > 1e-12) {
        return Err(Error::Numerical(format!(
            "{side} angular spectrum has no power in the front hemisphere (mass {mass:e})"
        )));
    }
    let sum: f64 = cells.iter().sum();
    if ((sum - mass) / mass).abs() > PARTITION_TOLERANCE {
        return Err(Error::Numerical(format!(
            "{side} cell quadrature (order {}) sums to {sum:.6e} but the hemisphere holds {mass:.6e}",
            quad.order
        )));
    }
    Ok(cells.into_iter().map(|c| c / mass).collect())
}

#[cfg(test)]
mod tests {
    use super::super::support::{wavenumber_support, Side};
    use super::super::vmf::VmfCluster;
    use super::*;

    fn ctx() -> WaveContext {
        WaveContext::from_wavelength(1.0).unwrap()
    }

    #[test]
    fn isotropic_cells_tile_hemisphere() {
        let iso = VmfMixture::isotropic();
        for l in [1.0, 2.5, 4.0] {
            let s = wavenumber_support(l, l, &ctx(), Side::Receiver).unwrap();
            let cells = cell_powers(&s, &iso, &ctx(), CellQuadrature::default()).unwrap();
            let sum: f64 = cells.iter().sum();
            assert!((sum - 0.5).abs() < 1e-6, "L = {l}: {sum}");
            assert!(cells.iter().all(|&c| c > 0.0));
        }
        assert!((hemisphere_mass(&iso) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn broadside_cell_of_isotropic_spectrum() {
        // the (0,0) cell of a 4λ aperture is the square |u|,|v| ≤ 1/8 in
        // direction cosines; ∬ du dv / √(1 − u² − v²) evaluated in extended
        // precision
        let s = wavenumber_support(4.0, 4.0, &ctx(), Side::Receiver).unwrap();
        let cells = cell_powers(&s, &VmfMixture::isotropic(), &ctx(), CellQuadrature::default()).unwrap();
        let centre = cells[s.position((0, 0)).unwrap()] * 4.0 * PI;
        let exact = 0.062_829_133_182_459_016;
        assert!((centre - exact).abs() < 1e-10, "{centre} vs {exact}");
    }

    #[test]
    fn variances_are_separable_and_normalized() {
        let c = ctx();
        let sr = wavenumber_support(1.0, 1.0, &c, Side::Receiver).unwrap();
        let ss = wavenumber_support(4.0, 4.0, &c, Side::Transmitter).unwrap();
        let aps = VmfMixture::new(alloc::vec![VmfCluster {
            weight: 1.0,
            mean_theta: 0.4,
            mean_phi: 1.0,
            concentration: 10.0,
        }])
        .unwrap();
        let v = coupling_variances(&sr, &ss, &aps, &VmfMixture::isotropic(), &c, CellQuadrature::default()).unwrap();
        assert_eq!((v.rows(), v.cols()), (5, 49));
        assert!((v.total() - 1.0).abs() < 1e-3);
        assert!(v.values().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn spectrum_behind_the_array_is_an_error() {
        let c = ctx();
        let s = wavenumber_support(1.0, 1.0, &c, Side::Receiver).unwrap();
        let back = VmfMixture::new(alloc::vec![VmfCluster {
            weight: 1.0,
            mean_theta: PI,
            mean_phi: 0.0,
            concentration: 2000.0,
        }])
        .unwrap();
        let r = coupling_variances(&s, &s, &back, &back, &c, CellQuadrature::default());
        assert!(matches!(r, Err(Error::Numerical(_))));
    }
}
