//! Tri-polarized links and joint uplink/downlink channel estimation.
//!
//! Receive ports (rows of H) with strong gain are estimated from uplink
//! pilots through TDD reciprocity; weak ports are measured on the downlink,
//! normalized and fed back together with a complex reference that lets the
//! transmitter splice the two parts into one consistently scaled estimate.

use alloc::{format, vec, vec::Vec};
use num_complex::Complex64;
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::capacity::equal_power_from_eigenvalues;
use crate::error::{domain, shape, Result};
use crate::linalg::{inner, CMatrix};
use crate::nearfield::{ArrayElement, ClusterRay};
use crate::rng::{complex_normal, derive_seed, rng_from_seed, stream_id};
use crate::wave::{Position3, WaveContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    X,
    Y,
    Z,
}

impl Polarization {
    pub const ALL: [Polarization; 3] = [Polarization::X, Polarization::Y, Polarization::Z];

    pub fn axis(self) -> Position3 {
        match self {
            Polarization::X => Position3::new(1.0, 0.0, 0.0),
            Polarization::Y => Position3::new(0.0, 1.0, 0.0),
            Polarization::Z => Position3::new(0.0, 0.0, 1.0),
        }
    }
}

/// A channel whose rows and columns are ordered x-ports, y-ports, z-ports.
#[derive(Debug, Clone, PartialEq)]
pub struct TriPolChannel {
    matrix: CMatrix,
    rx_counts: [usize; 3],
    tx_counts: [usize; 3],
}

impl TriPolChannel {
    pub fn new(matrix: CMatrix, rx_counts: [usize; 3], tx_counts: [usize; 3]) -> Result<Self> {
        let nr: usize = rx_counts.iter().sum();
        let ns: usize = tx_counts.iter().sum();
        if matrix.shape() != (nr, ns) {
            return Err(shape(format!(
                "channel is {}x{} but port counts give {nr}x{ns}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            matrix,
            rx_counts,
            tx_counts,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn rx_counts(&self) -> [usize; 3] {
        self.rx_counts
    }

    pub fn tx_counts(&self) -> [usize; 3] {
        self.tx_counts
    }

    /// Block H_{ij} between receive polarization `i` and transmit `j`.
    pub fn block(&self, i: Polarization, j: Polarization) -> CMatrix {
        let range = |counts: &[usize; 3], p: Polarization| {
            let k = p as usize;
            let start: usize = counts[..k].iter().sum();
            (start..start + counts[k]).collect::<Vec<_>>()
        };
        self.matrix
            .select_rows(&range(&self.rx_counts, i))
            .select_cols(&range(&self.tx_counts, j))
    }
}

/// Narrowband planar-wavefront cluster channel, rows = `rx` elements.
///
/// Each ray contributes √(P/M)·F_rxᵀ X F_tx·e^{jk r̂_rx·r_u}·e^{jk r̂_tx·s_s}
/// with X the cross-polarization matrix of the ray.
pub fn planar_cluster_channel(
    rx: &[ArrayElement],
    tx: &[ArrayElement],
    rays: &[ClusterRay],
    ctx: &WaveContext,
) -> Result<CMatrix> {
    if rx.is_empty() || tx.is_empty() {
        return Err(domain("both ends need at least one port"));
    }
    let k0 = ctx.wavenumber();
    let mut h = CMatrix::zeros(rx.len(), tx.len());
    for ray in rays {
        ray.validate()?;
        let amp = (ray.power / ray.rays_in_cluster as f64).sqrt();
        let xp = 1.0 / ray.kappa.sqrt();
        let e = |x: f64| Complex64::from_polar(1.0, x);
        let pol = [
            [e(ray.phases[0]), e(ray.phases[1]) * xp],
            [e(ray.phases[2]) * xp, e(ray.phases[3])],
        ];
        let r_hat = Position3::from_spherical(ray.arrival.0, ray.arrival.1);
        let t_hat = Position3::from_spherical(ray.departure.0, ray.departure.1);
        let tx_terms: Vec<(Complex64, Complex64)> = tx
            .iter()
            .map(|el| {
                let (ft, fp) = el.pattern.field(ray.departure.0, ray.departure.1);
                let ph = e(k0 * t_hat.dot(&el.position));
                (ft * ph, fp * ph)
            })
            .collect();
        for (u, el) in rx.iter().enumerate() {
            let (gt, gp) = el.pattern.field(ray.arrival.0, ray.arrival.1);
            let ph = e(k0 * r_hat.dot(&el.position)) * amp;
            let row_t = (gt * pol[0][0] + gp * pol[1][0]) * ph;
            let row_p = (gt * pol[0][1] + gp * pol[1][1]) * ph;
            for (s, (ft, fp)) in tx_terms.iter().enumerate() {
                h[(u, s)] += row_t * ft + row_p * fp;
            }
        }
    }
    Ok(h)
}

/// Σ_j |H_ij|² per receive port.
pub fn port_powers(h: &CMatrix) -> Vec<f64> {
    (0..h.rows()).map(|i| h.row(i).iter().map(|z| z.norm_sqr()).sum()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupingRule {
    /// G1 = ports with power ≥ the median.
    Median,
    /// G1 = ports with power ≥ fraction·max.
    Threshold(f64),
}

/// Strong (G1) and weak (G2) receive ports, each in ascending index order.
#[derive(Debug, Clone, PartialEq)]
pub struct PortGrouping {
    pub strong: Vec<usize>,
    pub weak: Vec<usize>,
    pub powers: Vec<f64>,
}

impl PortGrouping {
    pub fn ports(&self) -> usize {
        self.powers.len()
    }

    /// All ports in G1.
    pub fn all_strong(powers: Vec<f64>) -> Self {
        Self {
            strong: (0..powers.len()).collect(),
            weak: Vec::new(),
            powers,
        }
    }
}

pub fn group_ports(powers: &[f64], rule: GroupingRule) -> Result<PortGrouping> {
    if powers.is_empty() {
        return Err(domain("no ports to group"));
    }
    if powers.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(domain("port powers must be finite and nonnegative"));
    }
    let threshold = match rule {
        GroupingRule::Median => {
            let mut s = powers.to_vec();
            s.sort_by(f64::total_cmp);
            let n = s.len();
            if n % 2 == 1 {
                s[n / 2]
            } else {
                0.5 * (s[n / 2 - 1] + s[n / 2])
            }
        }
        GroupingRule::Threshold(f) => {
            if !(0.0..=1.0).contains(&f) {
                return Err(domain(format!("threshold fraction {f} outside [0, 1]")));
            }
            f * powers.iter().copied().fold(0.0, f64::max)
        }
    };
    let (strong, weak) = (0..powers.len()).partition(|&i| powers[i] >= threshold);
    Ok(PortGrouping {
        strong,
        weak,
        powers: powers.to_vec(),
    })
}

fn noise_variance(snr_db: f64) -> Result<f64> {
    if snr_db.is_nan() {
        return Err(domain("pilot SNR is NaN"));
    }
    Ok(if snr_db == f64::INFINITY { 0.0 } else { 10f64.powf(-snr_db / 10.0) })
}

fn add_noise(m: &CMatrix, variances: &[f64], seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    CMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] + complex_normal(&mut rng, variances[i]))
}

/// Uplink estimate of the G1 rows with per-entry noise variance
/// 10^(−snr/10); `f64::INFINITY` is noiseless.
pub fn uplink_estimate(h: &CMatrix, strong: &[usize], pilot_snr_db: f64, seed: u64) -> Result<CMatrix> {
    if strong.is_empty() {
        return Err(domain("uplink estimation needs at least one port"));
    }
    if strong.iter().any(|&i| i >= h.rows()) {
        return Err(shape("port index outside the channel"));
    }
    let var = noise_variance(pilot_snr_db)?;
    Ok(add_noise(&h.select_rows(strong), &vec![var; strong.len()], seed))
}

/// Full downlink measurement split into (G1 rows, G2 rows).
pub fn downlink_measure(
    h: &CMatrix,
    grouping: &PortGrouping,
    pilot_snr_db: f64,
    seed: u64,
) -> Result<(CMatrix, CMatrix)> {
    if grouping.ports() != h.rows() {
        return Err(shape("grouping does not cover the channel rows"));
    }
    let var = noise_variance(pilot_snr_db)?;
    let measured = add_noise(h, &vec![var; h.rows()], seed);
    Ok((measured.select_rows(&grouping.strong), measured.select_rows(&grouping.weak)))
}

/// Per-port pilot SNRs (dB) for the uplink-only benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotProfile {
    pub snr_db: Vec<f64>,
}

impl PilotProfile {
    pub fn uniform(ports: usize, snr_db: f64) -> Self {
        Self {
            snr_db: vec![snr_db; ports],
        }
    }
}

/// Uplink estimate of every row, row i at `profile.snr_db[i]`.
pub fn benchmark_uplink_only(h: &CMatrix, profile: &PilotProfile, seed: u64) -> Result<CMatrix> {
    if profile.snr_db.len() != h.rows() {
        return Err(shape("pilot profile length does not match the port count"));
    }
    let vars = profile.snr_db.iter().map(|&s| noise_variance(s)).collect::<Result<Vec<_>>>()?;
    Ok(add_noise(h, &vars, seed))
}

/// Amplitude ρ and phase ω removed by [`normalize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationRecord {
    pub amplitude: f64,
    pub phase: f64,
}

impl NormalizationRecord {
    pub fn factor(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

/// M' = M/(ρe^{jω}) with ρ = ‖M‖_F and ω the phase of the first nonzero
/// entry in row-major order.
pub fn normalize(m: &CMatrix) -> Result<(CMatrix, NormalizationRecord)> {
    let rho = m.frobenius_norm();
    let first = m.as_slice().iter().find(|z| z.norm_sqr() > 0.0);
    let Some(first) = first.filter(|_| rho > 0.0 && rho.is_finite()) else {
        return Err(domain("cannot normalize a zero or non-finite matrix"));
    };
    let rec = NormalizationRecord {
        amplitude: rho,
        phase: first.arg(),
    };
    Ok((m.scale(rec.factor().inv()), rec))
}

/// δ = ρ₁e^{jω₁}/(ρ₂e^{jω₂}).
pub fn combining_reference(strong: &NormalizationRecord, weak: &NormalizationRecord) -> Result<Complex64> {
    if !(weak.amplitude > 0.0) {
        return Err(domain("weak-port normalization amplitude is zero"));
    }
    Ok(strong.factor() / weak.factor())
}

/// Uniform mid-rise quantizer with `bits` per real component on [−1, 1].
pub fn quantize_feedback(m: &CMatrix, bits: u32) -> Result<CMatrix> {
    if bits == 0 || bits > 24 {
        return Err(domain(format!("feedback bits {bits} outside 1..=24")));
    }
    let levels = (1u32 << bits) as f64;
    let step = 2.0 / levels;
    let q = |x: f64| {
        let k = ((x.clamp(-1.0, 1.0) + 1.0) / step).floor().min(levels - 1.0);
        -1.0 + (k + 0.5) * step
    };
    Ok(CMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m[(i, j)];
        Complex64::new(q(z.re), q(z.im))
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriPolEstimate {
    /// Normalized uplink estimate rescaled onto the downlink's reference.
    pub strong_adjusted: CMatrix,
    /// Normalized downlink measurement of the weak ports.
    pub weak_normalized: CMatrix,
    pub delta: Complex64,
    /// Rows back in the original port order.
    pub assembled: CMatrix,
}

/// Splices the uplink rows (normalized and multiplied by δ) with the
/// normalized downlink rows. With no weak ports the result is the
/// normalized uplink estimate.
pub fn joint_estimate(
    strong_uplink: &CMatrix,
    delta: Complex64,
    weak_normalized: &CMatrix,
    grouping: &PortGrouping,
) -> Result<TriPolEstimate> {
    if strong_uplink.rows() != grouping.strong.len() || weak_normalized.rows() != grouping.weak.len() {
        return Err(shape("estimates do not match the port grouping"));
    }
    if !grouping.weak.is_empty() && weak_normalized.cols() != strong_uplink.cols() {
        return Err(shape("uplink and downlink estimates differ in column count"));
    }
    let (bar, _) = normalize(strong_uplink)?;
    let adjusted = if grouping.weak.is_empty() {
        bar
    } else {
        if !(delta.norm() > 0.0 && delta.is_finite()) {
            return Err(domain("combining reference must be finite and nonzero"));
        }
        bar.scale(delta)
    };
    let cols = strong_uplink.cols();
    let mut assembled = CMatrix::zeros(grouping.ports(), cols);
    for (k, &r) in grouping.strong.iter().enumerate() {
        for c in 0..cols {
            assembled[(r, c)] = adjusted[(k, c)];
        }
    }
    for (k, &r) in grouping.weak.iter().enumerate() {
        for c in 0..cols {
            assembled[(r, c)] = weak_normalized[(k, c)];
        }
    }
    Ok(TriPolEstimate {
        strong_adjusted: adjusted,
        weak_normalized: weak_normalized.clone(),
        delta,
        assembled,
    })
}

/// Pilot and feedback settings of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub uplink_snr_db: f64,
    pub downlink_snr_db: f64,
    /// `None` feeds back at full precision.
    pub feedback_bits: Option<u32>,
}

/// Steps 2–5 for a given grouping.
pub fn run_protocol(
    h: &CMatrix,
    grouping: &PortGrouping,
    config: &ProtocolConfig,
    seed: u64,
) -> Result<TriPolEstimate> {
    let up = uplink_estimate(h, &grouping.strong, config.uplink_snr_db, derive_seed(seed, stream_id("uplink"), 0))?;
    if grouping.weak.is_empty() {
        return joint_estimate(&up, Complex64::new(1.0, 0.0), &CMatrix::zeros(0, h.cols()), grouping);
    }
    let (h1d, h2d) = downlink_measure(h, grouping, config.downlink_snr_db, derive_seed(seed, stream_id("downlink"), 0))?;
    let (_, rec1) = normalize(&h1d)?;
    let (mut h2n, rec2) = normalize(&h2d)?;
    if let Some(bits) = config.feedback_bits {
        h2n = quantize_feedback(&h2n, bits)?;
    }
    let delta = combining_reference(&rec1, &rec2)?;
    joint_estimate(&up, delta, &h2n, grouping)
}

/// min_c ‖c·estimate − truth‖_F / ‖truth‖_F.
pub fn aligned_relative_error(estimate: &CMatrix, truth: &CMatrix) -> Result<f64> {
    if estimate.shape() != truth.shape() {
        return Err(shape("estimate and truth differ in shape"));
    }
    let t = truth.frobenius_norm();
    if !(t > 0.0) {
        return Err(domain("reference channel is zero"));
    }
    let ee = estimate.frobenius_norm_sqr();
    if ee == 0.0 {
        return Ok(1.0);
    }
    let c = inner(estimate.as_slice(), truth.as_slice()) / ee;
    Ok(estimate.scale(c).sub(truth)?.frobenius_norm() / t)
}

/// Aligned error with every port row rescaled to unit mean power in `truth`,
/// so weak ports count as much as strong ones. Returns the mean squared
/// error per entry of the rescaled rows.
pub fn port_normalized_error(estimate: &CMatrix, truth: &CMatrix) -> Result<f64> {
    if estimate.shape() != truth.shape() {
        return Err(shape("estimate and truth differ in shape"));
    }
    let cols = truth.cols() as f64;
    let mut w = Vec::with_capacity(truth.rows());
    for r in 0..truth.rows() {
        let p: f64 = truth.row(r).iter().map(|z| z.norm_sqr()).sum();
        if !(p > 0.0) {
            return Err(domain("reference port row is zero"));
        }
        w.push((cols / p).sqrt());
    }
    let e = estimate.scale_rows(&w)?;
    let t = truth.scale_rows(&w)?;
    let rel = aligned_relative_error(&e, &t)?;
    Ok(rel * rel)
}

/// Capacity on `truth` with equal power over `streams` eigenbeams taken from
/// `estimate` (right singular vectors).
pub fn precoded_capacity(truth: &CMatrix, estimate: &CMatrix, streams: usize, snr: f64) -> Result<f64> {
    if truth.shape() != estimate.shape() {
        return Err(shape("estimate and truth differ in shape"));
    }
    let streams = streams.min(estimate.rows()).min(estimate.cols());
    if streams == 0 {
        return Err(domain("need at least one stream"));
    }
    // right singular vectors from the small Gram: v_k = Ĥᴴu_k/σ_k
    let (vals, vecs) = estimate.gram().hermitian_eigen()?;
    let top = vals.first().copied().unwrap_or(0.0);
    let k = (0..streams).take_while(|&i| vals[i] > 1e-12 * top && top > 0.0).count();
    if k == 0 {
        return Ok(0.0);
    }
    let ha = estimate.adjoint();
    let precoder = CMatrix::from_fn(estimate.cols(), k, |r, c| {
        let sigma = vals[c].sqrt();
        (0..estimate.rows()).map(|i| ha[(r, i)] * vecs[(i, c)]).sum::<Complex64>() / sigma
    });
    let eff = truth.matmul(&precoder)?;
    let eig = eff.adjoint().gram().hermitian_eigenvalues()?;
    Ok(equal_power_from_eigenvalues(eig, snr, 1.0)?.capacity)
}
