//! Carrier description and 3-D points.

use core::ops::{Add, Mul, Neg, Sub};

use alloc::format;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{domain, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permeability 4π×10⁻⁷ H/m.
pub const VACUUM_PERMEABILITY: f64 = 4.0e-7 * core::f64::consts::PI;

/// Carrier-dependent constants shared by all propagation models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveContext {
    frequency: f64,
    wavelength: f64,
    wavenumber: f64,
    angular_frequency: f64,
    permeability: f64,
}

impl WaveContext {
    /// Free-space context at `frequency` Hz with vacuum permeability.
    pub fn new(frequency: f64) -> Result<Self> {
        Self::with_permeability(frequency, VACUUM_PERMEABILITY)
    }

    pub fn with_permeability(frequency: f64, permeability: f64) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(domain(format!("frequency must be positive, got {frequency}")));
        }
        if !(permeability.is_finite() && permeability > 0.0) {
            return Err(domain(format!(
                "permeability must be positive, got {permeability}"
            )));
        }
        let wavelength = SPEED_OF_LIGHT / frequency;
        Ok(Self {
            frequency,
            wavelength,
            wavenumber: 2.0 * core::f64::consts::PI / wavelength,
            angular_frequency: 2.0 * core::f64::consts::PI * frequency,
            permeability,
        })
    }

    /// Context whose wavelength is exactly `wavelength` metres.
    pub fn from_wavelength(wavelength: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(domain(format!("wavelength must be positive, got {wavelength}")));
        }
        let mut ctx = Self::new(SPEED_OF_LIGHT / wavelength)?;
        ctx.wavelength = wavelength;
        ctx.wavenumber = 2.0 * core::f64::consts::PI / wavelength;
        Ok(ctx)
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// k0 = 2π/λ, rad/m.
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn angular_frequency(&self) -> f64 {
        self.angular_frequency
    }

    pub fn permeability(&self) -> f64 {
        self.permeability
    }
}

/// A point or displacement in metres.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub const ORIGIN: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Unit vector for zenith `theta` and azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        Self::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit vector along `self`; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| *self * (1.0 / n))
    }

    /// Zenith and azimuth (θ ∈ [0, π], φ ∈ (−π, π]) of the direction of `self`.
    pub fn to_angles(&self) -> (f64, f64) {
        let n = self.norm();
        let theta = (self.z / n).clamp(-1.0, 1.0).acos();
        let phi = self.y.atan2(self.x);
        (theta, phi)
    }
}

impl Add for Position3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Position3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Position3 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Neg for Position3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}
