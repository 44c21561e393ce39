//! Port-to-port EM channel from precoding and combining current distributions.
//!
//! Entry (m, n) is the quadrature discretization of
//! `−jωμ ∬ φ_m(r)ᴴ Ḡ(r, s) ψ_n(s) ds dr` over the receive and transmit
//! apertures.

use alloc::{format, vec::Vec};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{domain, shape, Result};
use crate::green::{dyadic_green, DyadicValue};
use crate::linalg::CMatrix;
use crate::wave::{Position3, WaveContext};

/// A sampled antenna volume: quadrature points, weights and dimensionality.
#[derive(Debug, Clone, PartialEq)]
pub struct Aperture {
    points: Vec<Position3>,
    weights: Vec<f64>,
    dimensionality: u8,
    extent: f64,
}

impl Aperture {
    pub fn new(points: Vec<Position3>, weights: Vec<f64>, dimensionality: u8) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("aperture needs at least one point"));
        }
        if points.len() != weights.len() {
            return Err(shape(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if !(1..=3).contains(&dimensionality) {
            return Err(domain(format!("dimensionality {dimensionality} not in 1..=3")));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(domain(format!("quadrature weight {w} is not positive")));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(domain("aperture point is not finite"));
        }
        let mut extent = 0.0f64;
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                extent = extent.max(a.distance(b));
            }
        }
        Ok(Self {
            points,
            weights,
            dimensionality,
            extent,
        })
    }

    /// Unit-weight points, the conventional discrete-antenna limit.
    pub fn discrete(points: Vec<Position3>) -> Result<Self> {
        let weights = alloc::vec![1.0; points.len()];
        Self::new(points, weights, 1)
    }

    /// Midpoint-rule grid of `nx × ny` cells covering an `lx × ly` rectangle
    /// in the plane z = `origin.z`, with `origin` at the lower-left corner.
    pub fn planar_grid(origin: Position3, lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) || nx == 0 || ny == 0 {
            return Err(domain("planar grid needs positive size and cell counts"));
        }
        let dx = lx / nx as f64;
        let dy = ly / ny as f64;
        let mut points = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                points.push(
                    origin + Position3::new((ix as f64 + 0.5) * dx, (iy as f64 + 0.5) * dy, 0.0),
                );
            }
        }
        let weights = alloc::vec![dx * dy; nx * ny];
        Self::new(points, weights, 2)
    }

    pub fn points(&self) -> &[Position3] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimensionality(&self) -> u8 {
        self.dimensionality
    }

    /// Largest pairwise point distance D.
    pub fn extent(&self) -> f64 {
        self.extent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortKind {
    Precoding,
    Combining,
}

/// A vector current density (precoding) or field sampling function
/// (combining) evaluated at each aperture point.
#[derive(Debug, Clone, PartialEq)]
pub struct PortFunction {
    pub samples: Vec<[Complex64; 3]>,
    pub kind: PortKind,
}

impl PortFunction {
    pub fn new(samples: Vec<[Complex64; 3]>, kind: PortKind) -> Self {
        Self { samples, kind }
    }

    /// Point excitation with `polarization` at aperture point `index`.
    pub fn delta(len: usize, index: usize, polarization: [Complex64; 3], kind: PortKind) -> Self {
        let mut samples = alloc::vec![[Complex64::zero(); 3]; len];
        samples[index] = polarization;
        Self { samples, kind }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v.map(|z| z * c)).collect(),
            kind: self.kind,
        }
    }
}

/// The M×N port-level channel G.
#[derive(Debug, Clone, PartialEq)]
pub struct EmChannelMatrix(CMatrix);

impl EmChannelMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// Receive ports M.
    pub fn receive_ports(&self) -> usize {
        self.0.rows()
    }

    /// Transmit ports N.
    pub fn transmit_ports(&self) -> usize {
        self.0.cols()
    }
}

fn check_samples(f: &PortFunction, aperture: &Aperture, what: &str) -> Result<()> {
    if f.samples.len() != aperture.len() {
        return Err(shape(format!(
            "{what} has {} samples for an aperture of {} points",
            f.samples.len(),
            aperture.len()
        )));
    }
    Ok(())
}

fn hermitian_form(a: &[Complex64; 3], g: &DyadicValue, b: &[Complex64; 3]) -> Complex64 {
    let gb = g.apply(b);
    a[0].conj() * gb[0] + a[1].conj() * gb[1] + a[2].conj() * gb[2]
}

fn prefactor(ctx: &WaveContext) -> Complex64 {
    Complex64::new(0.0, -ctx.angular_frequency() * ctx.permeability())
}

/// Single channel entry g_{m,n}.
pub fn em_channel_entry(
    phi_m: &PortFunction,
    psi_n: &PortFunction,
    aperture_r: &Aperture,
    aperture_s: &Aperture,
    ctx: &WaveContext,
) -> Result<Complex64> {
    check_samples(phi_m, aperture_r, "combining function")?;
    check_samples(psi_n, aperture_s, "precoding function")?;
    let mut acc = Complex64::zero();
    for (q, (rq, wq)) in aperture_r.points().iter().zip(aperture_r.weights()).enumerate() {
        for (p, (sp, wp)) in aperture_s.points().iter().zip(aperture_s.weights()).enumerate() {
            let g = dyadic_green(*rq, *sp, ctx)?;
            acc += hermitian_form(&phi_m.samples[q], &g, &psi_n.samples[p]) * (wq * wp);
        }
    }
    Ok(prefactor(ctx) * acc)
}

/// Full M×N channel; the Green's function is evaluated once per point pair.
pub fn assemble_em_channel(
    phis: &[PortFunction],
    psis: &[PortFunction],
    aperture_r: &Aperture,
    aperture_s: &Aperture,
    ctx: &WaveContext,
) -> Result<EmChannelMatrix> {
    if phis.is_empty() || psis.is_empty() {
        return Err(domain("need at least one combining and one precoding function"));
    }
    for phi in phis {
        check_samples(phi, aperture_r, "combining function")?;
    }
    for psi in psis {
        check_samples(psi, aperture_s, "precoding function")?;
    }
    let q_len = aperture_r.len();
    let p_len = aperture_s.len();
    let mut greens = Vec::with_capacity(q_len * p_len);
    for rq in aperture_r.points() {
        for sp in aperture_s.points() {
            greens.push(dyadic_green(*rq, *sp, ctx)?);
        }
    }
    let pre = prefactor(ctx);
    let mut out = CMatrix::zeros(phis.len(), psis.len());
    let mut field = alloc::vec![[Complex64::zero(); 3]; q_len];
    for (n, psi) in psis.iter().enumerate() {
        // weighted field at each receive point radiated by ψ_n
        for (q, f) in field.iter_mut().enumerate() {
            let mut e = [Complex64::zero(); 3];
            for (p, wp) in aperture_s.weights().iter().enumerate() {
                let v = greens[q * p_len + p].apply(&psi.samples[p]);
                for k in 0..3 {
                    e[k] += v[k] * *wp;
                }
            }
            *f = e;
        }
        for (m, phi) in phis.iter().enumerate() {
            let mut acc = Complex64::zero();
            for (q, wq) in aperture_r.weights().iter().enumerate() {
                let a = &phi.samples[q];
                let e = &field[q];
                acc += (a[0].conj() * e[0] + a[1].conj() * e[1] + a[2].conj() * e[2]) * *wq;
            }
            out[(m, n)] = pre * acc;
        }
    }
    Ok(EmChannelMatrix(out))
}
