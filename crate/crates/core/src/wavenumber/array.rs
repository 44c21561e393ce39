use alloc::{format, vec::Vec};

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{domain, Result};
use crate::wave::Position3;

/// Uniform planar array in the local xy-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarArray {
    pub length_x: f64,
    pub length_y: f64,
    pub spacing_x: f64,
    pub spacing_y: f64,
    positions: Vec<Position3>,
}

impl PlanarArray {
    /// ⌊L/Δ⌋ elements per axis, centred in their Δ-wide cells.
    pub fn uniform(length_x: f64, length_y: f64, spacing_x: f64, spacing_y: f64) -> Result<Self> {
        for (name, v) in [
            ("length_x", length_x),
            ("length_y", length_y),
            ("spacing_x", spacing_x),
            ("spacing_y", spacing_y),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        let nx = (length_x / spacing_x + 1e-9).floor() as usize;
        let ny = (length_y / spacing_y + 1e-9).floor() as usize;
        if nx == 0 || ny == 0 {
            return Err(domain("element spacing exceeds the aperture"));
        }
        let mut positions = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                positions.push(Position3::new(
                    (ix as f64 + 0.5) * spacing_x,
                    (iy as f64 + 0.5) * spacing_y,
                    0.0,
                ));
            }
        }
        Ok(Self {
            length_x,
            length_y,
            spacing_x,
            spacing_y,
            positions,
        })
    }

    /// Arbitrary element positions inside [0, Lx] × [0, Ly].
    pub fn with_positions(
        length_x: f64,
        length_y: f64,
        spacing_x: f64,
        spacing_y: f64,
        positions: Vec<Position3>,
    ) -> Result<Self> {
        if positions.is_empty() {
            return Err(domain("array needs at least one element"));
        }
        let tol = 1e-12 * length_x.max(length_y);
        if positions.iter().any(|p| {
            !p.is_finite() || p.x < -tol || p.x > length_x + tol || p.y < -tol || p.y > length_y + tol
        }) {
            return Err(domain("element position outside the aperture"));
        }
        if !(spacing_x > 0.0 && spacing_y > 0.0 && length_x > 0.0 && length_y > 0.0) {
            return Err(domain("aperture and spacing must be positive"));
        }
        Ok(Self {
            length_x,
            length_y,
            spacing_x,
            spacing_y,
            positions,
        })
    }

    pub fn positions(&self) -> &[Position3] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}
