//! Free-space Green's functions and field-region classification.
//!
//! Time convention is e^{jωt}, so outgoing waves carry e^{−jk₀R}. For R ≠ 0
//!
//! ```text
//! Ḡ(r, s) = [I + ∇∇ᵀ/k₀²] e^{−jk₀R}/(4πR)
//!         = G_INF + G_RNF + G_FF
//! G_INF = e^{−jk₀R}/(4πk₀²R³) (−I + 3R̂R̂ᵀ)
//! G_RNF = −j e^{−jk₀R}/(4πk₀R²) (I − 3R̂R̂ᵀ)
//! G_FF  = e^{−jk₀R}/(4πR) (I − R̂R̂ᵀ)
//! ```
//!
//! The point self-term at R = 0 is not modelled; coincident points are an error.

use core::f64::consts::PI;
use core::ops::{Add, Index, IndexMut, Mul, Sub};

use alloc::format;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;
use num_traits::Zero;

use crate::error::{domain, Error, Result};
use crate::wave::{Position3, WaveContext};

/// A 3×3 complex tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicValue(pub [[Complex64; 3]; 3]);

impl DyadicValue {
    pub fn zero() -> Self {
        Self([[Complex64::zero(); 3]; 3])
    }

    /// `a·I + b·ûûᵀ` for a unit vector û.
    fn identity_plus_projector(a: Complex64, b: Complex64, u: [f64; 3]) -> Self {
        let mut m = Self::zero();
        for (i, row) in m.0.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = b * (u[i] * u[j]);
                if i == j {
                    *e += a;
                }
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `self · v`.
    pub fn apply(&self, v: &[Complex64; 3]) -> [Complex64; 3] {
        let mut out = [Complex64::zero(); 3];
        for (o, row) in out.iter_mut().zip(&self.0) {
            *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        out
    }
}

impl Index<(usize, usize)> for DyadicValue {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for DyadicValue {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for DyadicValue {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for DyadicValue {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Mul<Complex64> for DyadicValue {
    type Output = Self;
    fn mul(mut self, rhs: Complex64) -> Self {
        for e in self.0.iter_mut().flatten() {
            *e *= rhs;
        }
        self
    }
}

/// The three distance-ordered parts of the dyadic Green's function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenDecomposition {
    /// Reactive near-field part, ∝ 1/R³.
    pub inf: DyadicValue,
    /// Radiating near-field part, ∝ 1/R².
    pub rnf: DyadicValue,
    /// Far-field part, ∝ 1/R.
    pub ff: DyadicValue,
}

impl GreenDecomposition {
    pub fn sum(&self) -> DyadicValue {
        self.inf + self.rnf + self.ff
    }
}

/// e^{−jk₀|p|}/(4π|p|).
pub fn scalar_green(p: Position3, ctx: &WaveContext) -> Result<Complex64> {
    let r = p.norm();
    if r == 0.0 {
        return Err(Error::Singularity("scalar Green's function at |p| = 0"));
    }
    if !r.is_finite() {
        return Err(domain("non-finite separation"));
    }
    Ok(outgoing(ctx.wavenumber() * r) / (4.0 * PI * r))
}

fn outgoing(kr: f64) -> Complex64 {
    Complex64::from_polar(1.0, -kr)
}

fn separation(r: Position3, s: Position3) -> Result<(f64, [f64; 3])> {
    let d = r - s;
    let big_r = d.norm();
    if big_r == 0.0 {
        return Err(Error::Singularity("dyadic Green's function at r = s"));
    }
    if !big_r.is_finite() {
        return Err(domain("non-finite separation"));
    }
    Ok((big_r, [d.x / big_r, d.y / big_r, d.z / big_r]))
}

/// Dyadic Green's function [I + ∇∇ᵀ/k₀²] G₀ in closed form.
pub fn dyadic_green(r: Position3, s: Position3, ctx: &WaveContext) -> Result<DyadicValue> {
    let (big_r, u) = separation(r, s)?;
    let kr = ctx.wavenumber() * big_r;
    let g = outgoing(kr) / (4.0 * PI * big_r);
    let inv = 1.0 / kr;
    let j = Complex64::i();
    let a = g * (Complex64::new(1.0 - inv * inv, 0.0) - j * inv);
    let b = g * (Complex64::new(-1.0 + 3.0 * inv * inv, 0.0) + j * (3.0 * inv));
    Ok(DyadicValue::identity_plus_projector(a, b, u))
}

/// Splits the dyadic Green's function into its 1/R³, 1/R² and 1/R parts.
pub fn green_decomposition(
    r: Position3,
    s: Position3,
    ctx: &WaveContext,
) -> Result<GreenDecomposition> {
    let (big_r, u) = separation(r, s)?;
    let k = ctx.wavenumber();
    let phase = outgoing(k * big_r);
    let inf_pref = phase / (4.0 * PI * k * k * big_r.powi(3));
    let rnf_pref = -Complex64::i() * phase / (4.0 * PI * k * big_r * big_r);
    let ff_pref = phase / (4.0 * PI * big_r);
    Ok(GreenDecomposition {
        inf: DyadicValue::identity_plus_projector(-inf_pref, inf_pref * 3.0, u),
        rnf: DyadicValue::identity_plus_projector(rnf_pref, rnf_pref * -3.0, u),
        ff: DyadicValue::identity_plus_projector(ff_pref, -ff_pref, u),
    })
}

/// Electromagnetic field regions around an aperture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldRegion {
    ReactiveNear,
    RadiatingNear,
    Far,
}

impl FieldRegion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ReactiveNear => "reactive-near",
            Self::RadiatingNear => "radiating-near",
            Self::Far => "far",
        }
    }
}

impl core::fmt::Display for FieldRegion {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outer edge of the reactive near field, 0.62·√(D³/λ).
pub fn reactive_boundary(aperture: f64, ctx: &WaveContext) -> f64 {
    0.62 * (aperture.powi(3) / ctx.wavelength()).sqrt()
}

/// Rayleigh distance 2D²/λ.
pub fn rayleigh_distance(aperture: f64, ctx: &WaveContext) -> f64 {
    2.0 * aperture * aperture / ctx.wavelength()
}

pub fn field_region(distance: f64, aperture: f64, ctx: &WaveContext) -> Result<FieldRegion> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(domain(format!("distance must be positive, got {distance}")));
    }
    if !(aperture.is_finite() && aperture > 0.0) {
        return Err(domain(format!("aperture must be positive, got {aperture}")));
    }
    Ok(if distance < reactive_boundary(aperture, ctx) {
        FieldRegion::ReactiveNear
    } else if distance < rayleigh_distance(aperture, ctx) {
        FieldRegion::RadiatingNear
    } else {
        FieldRegion::Far
    })
}
