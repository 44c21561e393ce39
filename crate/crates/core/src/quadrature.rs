//! Gauss-Legendre rules.

use alloc::{vec, vec::Vec};
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be at least 1");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// ∫ₐᵇ f(x) dx.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights mapped to [a, b] with the endpoint-clustering
    /// substitution x = a + (b − a)(1 − cos πt)/2, t ∈ [0, 1]. Square-root
    /// endpoint behaviour of the integrand becomes smooth in t.
    pub fn clustered_points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().zip(&self.weights).map(move |(&u, &w)| {
            let t = 0.5 * (u + 1.0);
            let x = a + (b - a) * 0.5 * (1.0 - (PI * t).cos());
            let dx_dt = (b - a) * 0.5 * PI * (PI * t).sin();
            (x, 0.5 * w * dx_dt)
        })
    }
}

/// Pₙ(x) and Pₙ'(x).
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
