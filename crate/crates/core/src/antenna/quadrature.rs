//! Deterministic product quadrature over the unit sphere.
//!
//! The polar integral uses Gauss-Legendre panels on `[0, pi/2]` and
//! `[pi/2, pi]`; splitting at the equator keeps hemisphere-truncated element
//! patterns smooth inside every panel, so the rule converges spectrally for
//! all shipped patterns. The azimuth integral uses the periodic trapezoid
//! rule, which is likewise spectrally accurate for smooth periodic
//! integrands.

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Nodes are found by Newton iteration on the Legendre recurrence, seeded
/// with the Chebyshev-angle approximation; weights follow from
/// `w = 2 / ((1 - x^2) P_n'(x)^2)`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for k in 0..m {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if n % 2 == 1 {
        // Midpoint node is exactly zero.
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p_next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// One quadrature node on the sphere. `weight` already contains the
/// `sin(theta) dtheta dphi` surface element.
#[derive(Debug, Clone, Copy)]
pub struct SphereNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

/// Product quadrature grid over the full sphere.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    nodes: Vec<SphereNode>,
    n_theta: usize,
    n_phi: usize,
}

impl SphereQuadrature {
    /// Builds the grid. `n_theta` is the total polar node count (split
    /// evenly over the two hemisphere panels, so it must be even); `n_phi`
    /// is the azimuth node count.
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || !n_theta.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "quadrature.n_theta ({n_theta}) must be an even integer >= 2"
            )));
        }
        if n_phi < 4 {
            return Err(Error::Config(format!(
                "quadrature.n_phi ({n_phi}) must be >= 4"
            )));
        }
        let half = n_theta / 2;
        let (gl_nodes, gl_weights) = gauss_legendre(half);
        let mut polar: Vec<(f64, f64)> = Vec::with_capacity(n_theta);
        for (panel_lo, panel_hi) in [(0.0, std::f64::consts::FRAC_PI_2), (std::f64::consts::FRAC_PI_2, std::f64::consts::PI)] {
            let c = 0.5 * (panel_hi - panel_lo);
            let mid = 0.5 * (panel_hi + panel_lo);
            for (x, w) in gl_nodes.iter().zip(&gl_weights) {
                polar.push((mid + c * x, c * w));
            }
        }
        let dphi = std::f64::consts::TAU / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        for &(theta, wt) in &polar {
            let sin_theta = theta.sin();
            for j in 0..n_phi {
                nodes.push(SphereNode {
                    theta,
                    phi: j as f64 * dphi,
                    weight: wt * dphi * sin_theta,
                });
            }
        }
        Ok(Self {
            nodes,
            n_theta,
            n_phi,
        })
    }

    pub fn nodes(&self) -> &[SphereNode] {
        &self.nodes
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.n_theta, self.n_phi)
    }

    /// Integrates a scalar function of `(theta, phi)` over the sphere.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.weight * f(n.theta, n.phi))
            .sum()
    }
}
