//! A fully specified densely spaced link that can be realized repeatedly.

use alloc::{format, vec::Vec};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use super::array::PlanarArray;
use super::channel::{
    apply_polarization, assemble_channel, fourier_harmonics, sample_wavenumber_channel,
    EfficiencyMatrix, FourierHarmonics, PolarizedWavenumberChannel,
};
use super::support::WavenumberSupport;
use super::variance::CouplingVariances;
use crate::error::{shape, Result};
use crate::linalg::CMatrix;
use crate::pattern::PatternSet;
use crate::rng::{derive_seed, stream_id};
use crate::wave::WaveContext;

/// One end of the link.
#[derive(Debug, Clone)]
pub struct DenseArraySide {
    pub array: PlanarArray,
    pub support: WavenumberSupport,
    /// One shared pattern or one per element.
    pub patterns: Vec<PatternSet>,
    pub efficiency: EfficiencyMatrix,
}

/// Fixed geometry, spectra and hardware; each call to [`realize`] draws a new
/// set of wavenumber coefficients and polarization phases.
///
/// [`realize`]: DenseArrayModel::realize
#[derive(Debug, Clone)]
pub struct DenseArrayModel {
    variances: CouplingVariances,
    psi_r: FourierHarmonics,
    psi_s: FourierHarmonics,
    gamma_r: EfficiencyMatrix,
    gamma_s: EfficiencyMatrix,
    xpr_mean_db: f64,
    xpr_std_db: f64,
    gain: f64,
    // rows span the row space of Γ[Ψ^θ, Ψ^φ]
    factor_r: CMatrix,
    factor_s: CMatrix,
}

impl DenseArrayModel {
    pub fn new(
        ctx: &WaveContext,
        rx: &DenseArraySide,
        tx: &DenseArraySide,
        variances: CouplingVariances,
        xpr_mean_db: f64,
        xpr_std_db: f64,
    ) -> Result<Self> {
        if variances.rows() != rx.support.len() || variances.cols() != tx.support.len() {
            return Err(shape(format!(
                "variances are {}x{} but supports hold {}x{} indices",
                variances.rows(),
                variances.cols(),
                rx.support.len(),
                tx.support.len()
            )));
        }
        let psi_r = fourier_harmonics(&rx.array, &rx.support, &rx.patterns, ctx)?;
        let psi_s = fourier_harmonics(&tx.array, &tx.support, &tx.patterns, ctx)?;
        if rx.efficiency.len() != rx.array.len() || tx.efficiency.len() != tx.array.len() {
            return Err(shape("efficiency length does not match element count"));
        }
        let factor_r = row_space_factor(&psi_r.stacked().scale_rows(rx.efficiency.values())?)?;
        let factor_s = row_space_factor(&psi_s.stacked().scale_rows(tx.efficiency.values())?)?;
        Ok(Self {
            variances,
            psi_r,
            psi_s,
            gamma_r: rx.efficiency.clone(),
            gamma_s: tx.efficiency.clone(),
            xpr_mean_db,
            xpr_std_db,
            gain: 1.0,
            factor_r,
            factor_s,
        })
    }

    /// Multiplies every realized channel by `gain`.
    pub fn with_gain(mut self, gain: f64) -> Self {
        self.gain = gain;
        self
    }

    pub fn receive_elements(&self) -> usize {
        self.psi_r.theta.rows()
    }

    pub fn transmit_elements(&self) -> usize {
        self.psi_s.theta.rows()
    }

    pub fn variances(&self) -> &CouplingVariances {
        &self.variances
    }

    /// Polarized wavenumber coefficients for realization `seed`.
    pub fn coefficients(&self, seed: u64) -> Result<PolarizedWavenumberChannel> {
        let h_a = sample_wavenumber_channel(
            &self.variances,
            derive_seed(seed, stream_id("wavenumber-coefficients"), 0),
        );
        apply_polarization(
            &h_a,
            self.xpr_mean_db,
            self.xpr_std_db,
            derive_seed(seed, stream_id("wavenumber-polarization"), 0),
        )
    }

    /// Full N_R × N_S spatial channel.
    pub fn realize(&self, seed: u64) -> Result<CMatrix> {
        let pol = self.coefficients(seed)?;
        Ok(assemble_channel(&self.gamma_r, &self.psi_r, &pol, &self.psi_s, &self.gamma_s)?
            .scale_real(self.gain))
    }

    /// A small matrix with the same nonzero singular values as
    /// [`realize`](Self::realize) for the same seed.
    pub fn compressed(&self, seed: u64) -> Result<CMatrix> {
        let pol = self.coefficients(seed)?;
        let inner = self.factor_r.matmul(&pol.block_matrix())?;
        Ok(inner.matmul(&self.factor_s.adjoint())?.scale_real(self.gain))
    }
}

/// For A = Q D^{1/2} Uᴴ returns D^{1/2} Uᴴ restricted to nonzero D, so that
/// A X Bᴴ and D_A^{1/2}U_Aᴴ X U_B D_B^{1/2} share nonzero singular values.
fn row_space_factor(a: &CMatrix) -> Result<CMatrix> {
    let gram = a.adjoint().matmul(a)?;
    let (values, vectors) = gram.hermitian_eigen()?;
    let top = values.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 1e-12 * top).collect();
    let cols = a.cols();
    Ok(CMatrix::from_fn(keep.len(), cols, |r, c| {
        let i = keep[r];
        vectors[(c, i)].conj() * Complex64::new(values[i].sqrt(), 0.0)
    }))
}
