use alloc::{format, vec::Vec};

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{domain, Result};
use crate::wave::WaveContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Receiver,
    Transmitter,
}

/// Propagating lattice indices of a rectangular aperture.
#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberSupport {
    indices: Vec<(i32, i32)>,
    length_x: f64,
    length_y: f64,
    side: Side,
}

const ELLIPSE_TOL: f64 = 1e-12;

fn ellipse_value(lx: i32, ly: i32, length_x: f64, length_y: f64, wavelength: f64) -> f64 {
    let a = lx as f64 * wavelength / length_x;
    let b = ly as f64 * wavelength / length_y;
    a * a + b * b
}

impl WavenumberSupport {
    /// Index pairs, ordered by lʸ then lˣ.
    pub fn indices(&self) -> &[(i32, i32)] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn lengths(&self) -> (f64, f64) {
        (self.length_x, self.length_y)
    }

    pub fn position(&self, index: (i32, i32)) -> Option<usize> {
        self.indices.iter().position(|&i| i == index)
    }
}

/// All (lˣ, lʸ) with (lˣλ/Lx)² + (lʸλ/Ly)² ≤ 1.
pub fn wavenumber_support(
    length_x: f64,
    length_y: f64,
    ctx: &WaveContext,
    side: Side,
) -> Result<WavenumberSupport> {
    if !(length_x.is_finite() && length_x > 0.0 && length_y.is_finite() && length_y > 0.0) {
        return Err(domain(format!(
            "aperture must be positive, got {length_x} x {length_y}"
        )));
    }
    let lam = ctx.wavelength();
    let mx = (length_x / lam + 1e-9).floor() as i32;
    let my = (length_y / lam + 1e-9).floor() as i32;
    let mut indices = Vec::new();
    for ly in -my..=my {
        for lx in -mx..=mx {
            if ellipse_value(lx, ly, length_x, length_y, lam) <= 1.0 + ELLIPSE_TOL {
                indices.push((lx, ly));
            }
        }
    }
    Ok(WavenumberSupport {
        indices,
        length_x,
        length_y,
        side,
    })
}

/// Transverse wavenumbers and γ for an index; γ is clamped to 0 on the
/// ellipse boundary.
pub(crate) fn wavevector(
    lx: i32,
    ly: i32,
    length_x: f64,
    length_y: f64,
    ctx: &WaveContext,
) -> Result<(f64, f64, f64)> {
    if ellipse_value(lx, ly, length_x, length_y, ctx.wavelength()) > 1.0 + ELLIPSE_TOL {
        return Err(domain(format!(
            "index ({lx}, {ly}) is evanescent for a {length_x} x {length_y} aperture"
        )));
    }
    let k0 = ctx.wavenumber();
    let kx = 2.0 * core::f64::consts::PI * lx as f64 / length_x;
    let ky = 2.0 * core::f64::consts::PI * ly as f64 / length_y;
    let gamma = (k0 * k0 - kx * kx - ky * ky).max(0.0).sqrt();
    Ok((kx, ky, gamma))
}

/// Direction (θ̂, φ̂) of the plane wave for lattice index (lˣ, lʸ).
pub fn wavenumber_to_angles(
    lx: i32,
    ly: i32,
    length_x: f64,
    length_y: f64,
    ctx: &WaveContext,
) -> Result<(f64, f64)> {
    let (kx, ky, kz) = wavevector(lx, ly, length_x, length_y, ctx)?;
    let theta = (kz / ctx.wavenumber()).clamp(-1.0, 1.0).acos();
    let phi = if kx == 0.0 && ky == 0.0 { 0.0 } else { ky.atan2(kx) };
    Ok((theta, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn ctx() -> WaveContext {
        WaveContext::from_wavelength(1.0).unwrap()
    }

    #[test]
    fn one_wavelength_support() {
        let s = wavenumber_support(1.0, 1.0, &ctx(), Side::Receiver).unwrap();
        let mut got = s.indices().to_vec();
        got.sort();
        assert_eq!(got, alloc::vec![(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]);
    }

    #[test]
    fn four_wavelength_support_count() {
        let s = wavenumber_support(4.0, 4.0, &ctx(), Side::Transmitter).unwrap();
        assert_eq!(s.len(), 49);
        for &(a, b) in s.indices() {
            assert!(s.position((-a, -b)).is_some());
            assert!(s.position((b, a)).is_some());
        }
    }

    #[test]
    fn angles_of_special_indices() {
        let c = ctx();
        assert_eq!(wavenumber_to_angles(0, 0, 4.0, 4.0, &c).unwrap(), (0.0, 0.0));
        let (t, _) = wavenumber_to_angles(4, 0, 4.0, 4.0, &c).unwrap();
        assert!((t - PI / 2.0).abs() < 1e-7);
        let (t, p) = wavenumber_to_angles(1, 0, 4.0, 4.0, &c).unwrap();
        assert!((t.sin() * p.cos() - 0.25).abs() < 1e-14);
        assert!(wavenumber_to_angles(5, 0, 4.0, 4.0, &c).is_err());
    }

    #[test]
    fn rejects_non_positive_aperture() {
        assert!(wavenumber_support(0.0, 1.0, &ctx(), Side::Receiver).is_err());
    }
}
