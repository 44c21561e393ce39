//! Element field patterns F^θ(θ, φ), F^φ(θ, φ).

use core::f64::consts::PI;

use alloc::{format, vec::Vec};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{domain, shape, Result};
use crate::wave::Position3;

/// Sampled pattern on a regular (θ, φ) grid with bilinear interpolation.
///
/// θ is clamped to the grid range; φ wraps with period 2π when the grid
/// spans a full turn and is clamped otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternTable {
    thetas: Vec<f64>,
    phis: Vec<f64>,
    /// Row-major over (θ index, φ index).
    f_theta: Vec<Complex64>,
    f_phi: Vec<Complex64>,
}

impl PatternTable {
    pub fn new(
        thetas: Vec<f64>,
        phis: Vec<f64>,
        f_theta: Vec<Complex64>,
        f_phi: Vec<Complex64>,
    ) -> Result<Self> {
        if thetas.len() < 2 || phis.len() < 2 {
            return Err(domain("pattern grid needs at least two θ and two φ samples"));
        }
        let n = thetas.len() * phis.len();
        if f_theta.len() != n || f_phi.len() != n {
            return Err(shape(format!(
                "pattern grid {}x{} needs {n} values per component",
                thetas.len(),
                phis.len()
            )));
        }
        for axis in [&thetas, &phis] {
            if axis.windows(2).any(|w| !(w[1] > w[0])) || axis.iter().any(|v| !v.is_finite()) {
                return Err(domain("pattern grid axes must be finite and strictly increasing"));
            }
        }
        if thetas[0] < 0.0 || *thetas.last().unwrap() > PI + 1e-12 {
            return Err(domain("pattern θ grid must lie in [0, π]"));
        }
        // propagating directions of a planar array fill the upper hemisphere
        if thetas[0] > 1e-9 || *thetas.last().unwrap() < PI / 2.0 - 1e-9 {
            return Err(domain("pattern θ grid must cover [0, π/2]"));
        }
        if phis.last().unwrap() - phis[0] > 2.0 * PI + 1e-9 {
            return Err(domain("pattern φ grid spans more than 2π"));
        }
        if f_theta.iter().chain(&f_phi).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(domain("pattern values must be finite"));
        }
        Ok(Self {
            thetas,
            phis,
            f_theta,
            f_phi,
        })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    fn full_turn(&self) -> bool {
        (self.phis.last().unwrap() - self.phis[0] - 2.0 * PI).abs() < 1e-6
    }

    fn locate(axis: &[f64], v: f64) -> (usize, f64) {
        let v = v.clamp(axis[0], axis[axis.len() - 1]);
        let i = match axis.iter().position(|&a| a > v) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => axis.len() - 2,
        };
        let t = (v - axis[i]) / (axis[i + 1] - axis[i]);
        (i, t.clamp(0.0, 1.0))
    }

    pub fn interpolate(&self, theta: f64, phi: f64) -> (Complex64, Complex64) {
        let phi0 = self.phis[0];
        let phi = if self.full_turn() {
            let r = (phi - phi0) % (2.0 * PI);
            phi0 + if r < 0.0 { r + 2.0 * PI } else { r }
        } else {
            phi
        };
        let (i, u) = Self::locate(&self.thetas, theta);
        let (j, v) = Self::locate(&self.phis, phi);
        let np = self.phis.len();
        let at = |vals: &[Complex64]| {
            let a = vals[i * np + j];
            let b = vals[i * np + j + 1];
            let c = vals[(i + 1) * np + j];
            let d = vals[(i + 1) * np + j + 1];
            a * ((1.0 - u) * (1.0 - v)) + b * ((1.0 - u) * v) + c * (u * (1.0 - v)) + d * (u * v)
        };
        (at(&self.f_theta), at(&self.f_phi))
    }
}

/// Functional form of an element pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternShape {
    /// Direction-independent components.
    Constant { f_theta: Complex64, f_phi: Complex64 },
    /// Short dipole along `axis`: F^θ = â·θ̂, F^φ = â·φ̂.
    Dipole { axis: Position3 },
    /// Cosine-power directional element whose power pattern falls to one
    /// half at `half_power_beamwidth / 2` from the boresight, with linear
    /// polarization slant `slant` (0 = pure θ) and a power floor behind.
    Directional {
        half_power_beamwidth: f64,
        boresight_theta: f64,
        boresight_phi: f64,
        slant: f64,
        floor: f64,
    },
    Table(PatternTable),
}

/// An element pattern with an overall amplitude gain.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSet {
    pub shape: PatternShape,
    pub amplitude: f64,
}

impl PatternSet {
    pub fn new(shape: PatternShape) -> Self {
        Self {
            shape,
            amplitude: 1.0,
        }
    }

    /// F^θ = F^φ = 1.
    pub fn unit_dual() -> Self {
        Self::new(PatternShape::Constant {
            f_theta: Complex64::new(1.0, 0.0),
            f_phi: Complex64::new(1.0, 0.0),
        })
    }

    /// F^θ = 1, F^φ = 0.
    pub fn isotropic_theta() -> Self {
        Self::new(PatternShape::Constant {
            f_theta: Complex64::new(1.0, 0.0),
            f_phi: Complex64::new(0.0, 0.0),
        })
    }

    pub fn dipole(axis: Position3) -> Self {
        Self::new(PatternShape::Dipole { axis })
    }

    /// Patch-like element of the given half-power beamwidth (radians).
    pub fn directional(half_power_beamwidth: f64, boresight_theta: f64, boresight_phi: f64, slant: f64) -> Self {
        Self::new(PatternShape::Directional {
            half_power_beamwidth,
            boresight_theta,
            boresight_phi,
            slant,
            floor: 1e-3,
        })
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// (F^θ, F^φ) toward zenith `theta`, azimuth `phi`.
    pub fn field(&self, theta: f64, phi: f64) -> (Complex64, Complex64) {
        let (ft, fp) = match &self.shape {
            PatternShape::Constant { f_theta, f_phi } => (*f_theta, *f_phi),
            PatternShape::Dipole { axis } => {
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = phi.sin_cos();
                let theta_hat = Position3::new(ct * cp, ct * sp, -st);
                let phi_hat = Position3::new(-sp, cp, 0.0);
                let a = axis.normalized().unwrap_or(Position3::new(0.0, 0.0, 1.0));
                (
                    Complex64::new(a.dot(&theta_hat), 0.0),
                    Complex64::new(a.dot(&phi_hat), 0.0),
                )
            }
            PatternShape::Directional {
                half_power_beamwidth,
                boresight_theta,
                boresight_phi,
                slant,
                floor,
            } => {
                let dir = Position3::from_spherical(theta, phi);
                let bore = Position3::from_spherical(*boresight_theta, *boresight_phi);
                let cos_off = dir.dot(&bore);
                let q = cosine_power_exponent(*half_power_beamwidth);
                let power = if cos_off > 0.0 { cos_off.powf(q).max(*floor) } else { *floor };
                let amp = power.sqrt();
                let (s, c) = slant.sin_cos();
                (Complex64::new(amp * c, 0.0), Complex64::new(amp * s, 0.0))
            }
            PatternShape::Table(t) => t.interpolate(theta, phi),
        };
        (ft * self.amplitude, fp * self.amplitude)
    }
}

/// Exponent q with cos^q(hpbw/2) = 1/2.
pub fn cosine_power_exponent(half_power_beamwidth: f64) -> f64 {
    let half = (0.5 * half_power_beamwidth).clamp(1e-6, PI / 2.0 - 1e-9);
    0.5f64.ln() / half.cos().ln()
}
