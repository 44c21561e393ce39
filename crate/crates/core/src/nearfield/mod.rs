//! Near-field extension of the cluster channel.
//!
//! Each ray's delay and reference-element angles place a first- and a
//! last-bounce scatterer; every element pair then sees its own distances and
//! angles (spherical wavefront). A per-cluster visibility probability and a
//! logistic roll-off across the transmit array model spatial
//! non-stationarity. The planar-wavefront counterpart evaluates angles once at
//! the reference elements and extends the phase linearly.

mod coefficient;
mod geometry;
mod response;
mod visibility;

pub use coefficient::{los_coefficient, nlos_coefficient, Wavefront};
pub use geometry::{
    locate_bounce_scatterers, rays_from_cdl, ArrayElement, ArrayGeometry, BounceGeometry,
    ClusterRay,
};
pub use response::{
    channel_impulse_response, narrowband_channel, planar_wave_channel, spatial_correlation,
    NearFieldLink, Tap,
};
pub use visibility::{
    attenuation_factor, normalized_offset, visibility_probability, Attenuation, VisibilityModel,
};
