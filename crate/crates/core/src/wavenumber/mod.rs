//! Densely spaced (holographic) array channel in the wavenumber domain.
//!
//! A planar aperture of size Lx × Ly only couples to plane waves whose
//! transverse wavenumbers fall on the lattice (2πlˣ/Lx, 2πlʸ/Ly) inside the
//! propagating disk. The channel is
//!
//! ```text
//! H = Γ_R [Ψ_R^θ, Ψ_R^φ] [[H^θθ, H^θφ], [H^φθ, H^φφ]] [Ψ_S^θ, Ψ_S^φ]ᴴ Γ_S
//! ```
//!
//! where the wavenumber-domain coefficients are complex Gaussian with
//! variances set by von Mises-Fisher angular power spectra, the Ψ are Fourier
//! harmonics weighted by element patterns, and Γ holds element efficiencies.
//!
//! All angles here are in the array's local frame: the array lies in the
//! local xy-plane and radiates into the z ≥ 0 half-space.

mod array;
mod channel;
mod model;
mod support;
mod variance;
mod vmf;

pub use array::PlanarArray;
pub use channel::{
    apply_polarization, assemble_channel, fourier_harmonics, hannan_efficiency,
    sample_wavenumber_channel, EfficiencyMatrix, FourierHarmonics, PolarizedWavenumberChannel,
};
pub use model::{DenseArrayModel, DenseArraySide};
pub use support::{wavenumber_support, wavenumber_to_angles, Side, WavenumberSupport};
pub use variance::{
    cell_powers, coupling_variances, hemisphere_mass, CellQuadrature, CouplingVariances,
};
pub use vmf::{vmf_pdf, VmfCluster, VmfMixture};
