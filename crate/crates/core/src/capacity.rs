//! Log-det MIMO capacity with equal-power or water-filling inputs.

use alloc::{boxed::Box, format, vec, vec::Vec};
#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::linalg::CMatrix;
use crate::rng::{derive_seed, stream_id};

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// bits/s/Hz
    pub capacity: f64,
    /// Power per eigenmode, aligned with `eigenvalues`.
    pub allocation: Vec<f64>,
    /// Eigenvalues of GᴴG, descending.
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Allocation {
    EqualPower,
    WaterFilling,
}

impl Allocation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Allocation::EqualPower => "equal-power",
            Allocation::WaterFilling => "water-filling",
        }
    }

    pub fn evaluate(&self, g: &CMatrix, power: f64, noise: f64) -> Result<CapacityResult> {
        self.evaluate_streams(g, power, noise, g.cols())
    }

    /// As [`evaluate`](Self::evaluate) but with an explicit stream count,
    /// for matrices that are a compressed stand-in for a wider channel.
    pub fn evaluate_streams(
        &self,
        g: &CMatrix,
        power: f64,
        noise: f64,
        streams: usize,
    ) -> Result<CapacityResult> {
        let eig = channel_eigenvalues(g, streams)?;
        match self {
            Allocation::EqualPower => equal_power_from_eigenvalues(eig, power, noise),
            Allocation::WaterFilling => waterfilling_from_eigenvalues(eig, power, noise),
        }
    }
}

/// Eigenvalues of GᴴG padded with zeros to `streams` entries.
fn channel_eigenvalues(g: &CMatrix, streams: usize) -> Result<Vec<f64>> {
    if !g.is_finite() {
        return Err(domain("channel matrix has non-finite entries"));
    }
    if streams == 0 {
        return Err(domain("channel has no transmit streams"));
    }
    let gram = if g.rows() <= g.cols() { g.gram() } else { g.adjoint().gram() };
    let mut eig: Vec<f64> = gram.hermitian_eigenvalues()?.into_iter().map(|v| v.max(0.0)).collect();
    if eig.len() > streams {
        return Err(domain(format!(
            "{} eigenmodes exceed the {streams} declared streams",
            eig.len()
        )));
    }
    eig.resize(streams, 0.0);
    Ok(eig)
}

fn check_powers(power: f64, noise: f64) -> Result<()> {
    if !(noise > 0.0 && noise.is_finite()) {
        return Err(domain(format!("noise power must be positive, got {noise}")));
    }
    if !(power >= 0.0 && power.is_finite()) {
        return Err(domain(format!("transmit power must be nonnegative, got {power}")));
    }
    Ok(())
}

/// Capacity with Ξ = (P/K)I, K = columns of `g`.
pub fn capacity_equal_power(g: &CMatrix, power: f64, noise: f64) -> Result<CapacityResult> {
    Allocation::EqualPower.evaluate(g, power, noise)
}

/// Capacity under the optimal water-filling input covariance.
pub fn capacity_waterfilling(g: &CMatrix, power: f64, noise: f64) -> Result<CapacityResult> {
    Allocation::WaterFilling.evaluate(g, power, noise)
}

/// Equal-power capacity from eigenvalues of GᴴG (one per stream).
pub fn equal_power_from_eigenvalues(
    mut eigenvalues: Vec<f64>,
    power: f64,
    noise: f64,
) -> Result<CapacityResult> {
    check_powers(power, noise)?;
    if eigenvalues.is_empty() {
        return Err(domain("no eigenmodes"));
    }
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let k = eigenvalues.len();
    let p = power / k as f64;
    let capacity = eigenvalues.iter().map(|&l| (p * l / noise).ln_1p()).sum::<f64>()
        / core::f64::consts::LN_2;
    Ok(CapacityResult {
        capacity,
        allocation: vec![p; k],
        eigenvalues,
    })
}

/// Water-filling over eigenvalues of GᴴG by the exact sorted active set.
pub fn waterfilling_from_eigenvalues(
    mut eigenvalues: Vec<f64>,
    power: f64,
    noise: f64,
) -> Result<CapacityResult> {
    check_powers(power, noise)?;
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let mut allocation = vec![0.0; eigenvalues.len()];
    let top = eigenvalues.first().copied().unwrap_or(0.0);
    let usable = eigenvalues.iter().take_while(|&&l| l > 0.0 && l > 1e-300 * top).count();
    if usable == 0 || power == 0.0 {
        return Ok(CapacityResult {
            capacity: 0.0,
            allocation,
            eigenvalues,
        });
    }
    let floors: Vec<f64> = eigenvalues[..usable].iter().map(|l| noise / l).collect();
    // largest k whose weakest mode still sits below the water level
    let mut active = 0;
    let mut sum = 0.0;
    for k in 1..=usable {
        sum += floors[k - 1];
        let nu = (power + sum) / k as f64;
        if nu > floors[k - 1] {
            active = k;
        } else {
            break;
        }
    }
    let mut capacity = 0.0;
    for i in 0..active {
        // ν − floor_i without subtracting two large numbers
        let spread: f64 = floors[..active].iter().map(|f| f - floors[i]).sum();
        allocation[i] = ((power + spread) / active as f64).max(0.0);
        capacity += (allocation[i] / floors[i]).ln_1p();
    }
    Ok(CapacityResult {
        capacity: capacity / core::f64::consts::LN_2,
        allocation,
        eigenvalues,
    })
}

/// Water level ν of a water-filling result (0 when nothing is active).
pub fn water_level(result: &CapacityResult, noise: f64) -> f64 {
    result
        .allocation
        .iter()
        .zip(&result.eigenvalues)
        .find(|(p, _)| **p > 0.0)
        .map_or(0.0, |(p, l)| p + noise / l)
}

/// Per-realization capacities of an ensemble and their summary.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    capacities: Vec<f64>,
    sorted: Vec<f64>,
    mean: f64,
}

impl EnsembleStats {
    pub fn from_capacities(capacities: Vec<f64>) -> Result<Self> {
        if capacities.is_empty() {
            return Err(domain("ensemble needs at least one realization"));
        }
        if capacities.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numerical("non-finite capacity in ensemble".into()));
        }
        let mean = capacities.iter().sum::<f64>() / capacities.len() as f64;
        let mut sorted = capacities.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(Self {
            capacities,
            sorted,
            mean,
        })
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn len(&self) -> usize {
        self.capacities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacities.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std_dev(&self) -> f64 {
        let n = self.capacities.len() as f64;
        (self.capacities.iter().map(|c| (c - self.mean).powi(2)).sum::<f64>() / n).sqrt()
    }

    /// Empirical F(x) = #{c ≤ x}/n.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&c| c <= x);
        count as f64 / self.sorted.len() as f64
    }

    /// Lower empirical quantile, p ∈ [0, 1].
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let idx = ((p.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[idx]
    }

    /// (x, F(x)) on `points` evenly spaced values spanning the sample range.
    pub fn cdf_grid(&self, points: usize) -> Vec<(f64, f64)> {
        let lo = self.sorted[0];
        let hi = self.sorted[self.sorted.len() - 1];
        if points <= 1 || hi == lo {
            return vec![(hi, 1.0)];
        }
        (0..points)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
                (x, self.cdf_at(x))
            })
            .collect()
    }
}

/// Monte Carlo capacity over `realizations` draws.
///
/// Draw i receives seed `derive_seed(master_seed, stream_id("realization"), i)`.
pub fn ergodic_capacity<F>(
    mut generator: F,
    master_seed: u64,
    realizations: usize,
    power: f64,
    noise: f64,
    allocation: Allocation,
) -> Result<EnsembleStats>
where
    F: FnMut(u64) -> Result<CMatrix>,
{
    if realizations == 0 {
        return Err(domain("realizations must be at least 1"));
    }
    let stream = stream_id("realization");
    let mut caps = Vec::with_capacity(realizations);
    for i in 0..realizations {
        let seed = derive_seed(master_seed, stream, i as u64);
        let wrap = |e: Error| Error::Realization {
            index: i,
            source: Box::new(e),
        };
        let g = generator(seed).map_err(wrap)?;
        caps.push(allocation.evaluate(&g, power, noise).map_err(wrap)?.capacity);
    }
    EnsembleStats::from_capacities(caps)
}
