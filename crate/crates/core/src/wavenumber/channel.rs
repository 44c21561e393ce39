//! Random wavenumber-domain coefficients and the assembled spatial channel.

use core::f64::consts::PI;

use alloc::{format, vec, vec::Vec};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::array::PlanarArray;
use super::support::{wavevector, WavenumberSupport};
use super::variance::CouplingVariances;
use crate::error::{domain, shape, Result};
use crate::linalg::CMatrix;
use crate::pattern::PatternSet;
use crate::rng::{complex_normal, rng_from_seed, standard_normal, uniform_phase};
use crate::wave::WaveContext;

/// Draws H_a with independent CN(μ, σ²) entries, row-major.
pub fn sample_wavenumber_channel(variances: &CouplingVariances, seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    let (rows, cols) = (variances.rows(), variances.cols());
    CMatrix::from_fn(rows, cols, |b, a| {
        let mean = variances.mean().map_or(Complex64::new(0.0, 0.0), |m| m[(b, a)]);
        mean + complex_normal(&mut rng, variances.get(b, a))
    })
}

/// The four polarized coefficient blocks plus the per-entry XPR draws.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedWavenumberChannel {
    pub theta_theta: CMatrix,
    pub theta_phi: CMatrix,
    pub phi_theta: CMatrix,
    pub phi_phi: CMatrix,
    xpr_mean_db: f64,
    xpr_std_db: f64,
    kappa: Vec<f64>,
}

impl PolarizedWavenumberChannel {
    pub fn xpr_db(&self) -> (f64, f64) {
        (self.xpr_mean_db, self.xpr_std_db)
    }

    /// Linear cross-polarization ratio κ of entry (β, α).
    pub fn kappa(&self, beta: usize, alpha: usize) -> f64 {
        self.kappa[beta * self.theta_theta.cols() + alpha]
    }

    pub fn shape(&self) -> (usize, usize) {
        self.theta_theta.shape()
    }

    /// `[[θθ, θφ], [φθ, φφ]]` as one 2|E_R| × 2|E_S| matrix.
    pub fn block_matrix(&self) -> CMatrix {
        let top = self.theta_theta.hstack(&self.theta_phi).expect("blocks conform");
        let bottom = self.phi_theta.hstack(&self.phi_phi).expect("blocks conform");
        top.vstack(&bottom).expect("blocks conform")
    }
}

/// Applies random polarization phases and log-normal XPR to `h_a`.
///
/// Per entry the draws are X, Φθθ, Φθφ, Φφθ, Φφφ in that order.
pub fn apply_polarization(
    h_a: &CMatrix,
    xpr_mean_db: f64,
    xpr_std_db: f64,
    seed: u64,
) -> Result<PolarizedWavenumberChannel> {
    if !h_a.is_finite() {
        return Err(domain("wavenumber coefficients are not finite"));
    }
    if !xpr_mean_db.is_finite() || !(xpr_std_db.is_finite() && xpr_std_db >= 0.0) {
        return Err(domain(format!(
            "invalid XPR parameters (mean {xpr_mean_db} dB, std {xpr_std_db} dB)"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let (rows, cols) = h_a.shape();
    let n = rows * cols;
    let mut kappa = Vec::with_capacity(n);
    let mut blocks = [vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n],
        vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]];
    for (i, &h) in h_a.as_slice().iter().enumerate() {
        let x = xpr_mean_db + xpr_std_db * standard_normal(&mut rng);
        let k = 10f64.powf(x / 10.0);
        let cross = 1.0 / k.sqrt();
        kappa.push(k);
        for (b, block) in blocks.iter_mut().enumerate() {
            let rot = Complex64::from_polar(1.0, uniform_phase(&mut rng));
            let amp = if b == 1 || b == 2 { cross } else { 1.0 };
            block[i] = h * rot * amp;
        }
    }
    let [tt, tp, pt, pp] = blocks;
    Ok(PolarizedWavenumberChannel {
        theta_theta: CMatrix::from_vec(rows, cols, tt)?,
        theta_phi: CMatrix::from_vec(rows, cols, tp)?,
        phi_theta: CMatrix::from_vec(rows, cols, pt)?,
        phi_phi: CMatrix::from_vec(rows, cols, pp)?,
        xpr_mean_db,
        xpr_std_db,
        kappa,
    })
}

/// Pattern-weighted Fourier harmonics, one column per support index.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierHarmonics {
    pub theta: CMatrix,
    pub phi: CMatrix,
}

impl FourierHarmonics {
    /// `[Ψ^θ, Ψ^φ]`.
    pub fn stacked(&self) -> CMatrix {
        self.theta.hstack(&self.phi).expect("harmonic blocks conform")
    }
}

/// Builds Ψ^θ, Ψ^φ for `array` over `support`.
///
/// `patterns` holds one pattern shared by all elements or one per element.
pub fn fourier_harmonics(
    array: &PlanarArray,
    support: &WavenumberSupport,
    patterns: &[PatternSet],
    ctx: &WaveContext,
) -> Result<FourierHarmonics> {
    let n = array.len();
    if n == 0 {
        return Err(shape("array has no elements"));
    }
    if patterns.len() != 1 && patterns.len() != n {
        return Err(shape(format!(
            "{} patterns for {n} elements (need 1 or {n})",
            patterns.len()
        )));
    }
    let (length_x, length_y) = support.lengths();
    let k0 = ctx.wavenumber();
    let norm = 1.0 / (n as f64).sqrt();
    let e = support.len();
    let mut theta = CMatrix::zeros(n, e);
    let mut phi = CMatrix::zeros(n, e);
    for (col, &(lx, ly)) in support.indices().iter().enumerate() {
        let (kx, ky, kz) = wavevector(lx, ly, length_x, length_y, ctx)?;
        let th = (kz / k0).clamp(-1.0, 1.0).acos();
        let ph = if kx == 0.0 && ky == 0.0 { 0.0 } else { ky.atan2(kx) };
        for (q, r) in array.positions().iter().enumerate() {
            let pattern = &patterns[if patterns.len() == 1 { 0 } else { q }];
            let (f_t, f_p) = pattern.field(th, ph);
            let phase = Complex64::from_polar(norm, kx * r.x + ky * r.y + kz * r.z);
            theta[(q, col)] = phase * f_t;
            phi[(q, col)] = phase * f_p;
        }
    }
    Ok(FourierHarmonics { theta, phi })
}

/// min(1, πΔxΔy/λ²).
pub fn hannan_efficiency(spacing_x: f64, spacing_y: f64, ctx: &WaveContext) -> Result<f64> {
    if !(spacing_x > 0.0 && spacing_y > 0.0) || !spacing_x.is_finite() || !spacing_y.is_finite() {
        return Err(domain("element spacings must be positive"));
    }
    let lambda = ctx.wavelength();
    Ok((PI * spacing_x * spacing_y / (lambda * lambda)).min(1.0))
}

/// Diagonal per-element efficiency Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyMatrix {
    values: Vec<f64>,
}

impl EfficiencyMatrix {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
            return Err(domain(format!("efficiency {v} outside (0, 1]")));
        }
        Ok(Self { values })
    }

    pub fn identity(n: usize) -> Self {
        Self { values: vec![1.0; n] }
    }

    pub fn uniform(n: usize, efficiency: f64) -> Result<Self> {
        Self::new(vec![efficiency; n])
    }

    pub fn hannan(n: usize, spacing_x: f64, spacing_y: f64, ctx: &WaveContext) -> Result<Self> {
        Self::uniform(n, hannan_efficiency(spacing_x, spacing_y, ctx)?)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// H = Γ_R [Ψ_R^θ, Ψ_R^φ] H_pol [Ψ_S^θ, Ψ_S^φ]ᴴ Γ_S.
pub fn assemble_channel(
    gamma_r: &EfficiencyMatrix,
    psi_r: &FourierHarmonics,
    h: &PolarizedWavenumberChannel,
    psi_s: &FourierHarmonics,
    gamma_s: &EfficiencyMatrix,
) -> Result<CMatrix> {
    let (er, es) = h.shape();
    if psi_r.theta.cols() != er || psi_s.theta.cols() != es {
        return Err(shape(format!(
            "harmonics cover {}x{} indices but the channel has {er}x{es}",
            psi_r.theta.cols(),
            psi_s.theta.cols()
        )));
    }
    if gamma_r.len() != psi_r.theta.rows() || gamma_s.len() != psi_s.theta.rows() {
        return Err(shape("efficiency length does not match element count"));
    }
    let left = psi_r.stacked().matmul(&h.block_matrix())?;
    let full = left.matmul(&psi_s.stacked().adjoint())?;
    full.scale_rows(gamma_r.values())?.scale_cols(gamma_s.values())
}
