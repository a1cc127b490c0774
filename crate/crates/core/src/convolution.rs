//! Product integration of weakly singular Volterra convolutions
//! `∫_0^t k(t-s) f(s) ds` against the piecewise-linear interpolant of f.
//!
//! A kernel is described by its first two antiderivatives `G1' = k`,
//! `G2' = G1`, both vanishing at 0. On a cell `[a, b]` with `A = t-a`,
//! `B = t-b`, `h = b-a`:
//!
//! ```text
//! M0 = G1(A) - G1(B)
//! M1 = G2(A) - G2(B) - h G1(B)
//! ∫_a^b k(t-s) f(s) ds = f_a (M0 - M1/h) + f_b M1/h
//! ```
//!
//! which is exact whenever f is linear on the cell.

use crate::error::{Error, Result};
use crate::mittag_leffler::MittagLeffler;
use crate::special::rgamma;
use rayon::prelude::*;

pub trait KernelMoments: Sync {
    /// `(G1(τ), G2(τ))` for τ ≥ 0.
    fn moments(&self, tau: f64) -> Result<(f64, f64)>;
}

/// `k(τ) = τ^{a-1}/Γ(a)`, the Riemann-Liouville kernel of order a > 0.
#[derive(Debug, Clone, Copy)]
pub struct PowerKernel {
    order: f64,
    c1: f64,
    c2: f64,
}

impl PowerKernel {
    pub fn new(order: f64) -> Result<Self> {
        if !(order > 0.0) || !order.is_finite() {
            return Err(Error::InvalidOrder(format!("kernel order must be positive, got {order}")));
        }
        Ok(Self { order, c1: rgamma(order + 1.0), c2: rgamma(order + 2.0) })
    }
}

impl KernelMoments for PowerKernel {
    fn moments(&self, tau: f64) -> Result<(f64, f64)> {
        if tau <= 0.0 {
            return Ok((0.0, 0.0));
        }
        let p = tau.powf(self.order);
        Ok((self.c1 * p, self.c2 * p * tau))
    }
}

/// `k(τ) = τ^{α-1} E_{α,α}(-μ τ^α)`, with `G1 = τ^α E_{α,1+α}(-μτ^α)` and
/// `G2 = τ^{1+α} E_{α,2+α}(-μτ^α)`.
#[derive(Debug, Clone)]
pub struct RelaxationKernel {
    alpha: f64,
    mu: f64,
    e1: MittagLeffler,
    e2: MittagLeffler,
}

impl RelaxationKernel {
    pub fn new(alpha: f64, mu: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidOrder(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidInput(format!("mu must be finite and >= 0, got {mu}")));
        }
        Ok(Self {
            alpha,
            mu,
            e1: MittagLeffler::new(alpha, 1.0 + alpha)?,
            e2: MittagLeffler::new(alpha, 2.0 + alpha)?,
        })
    }
}

impl KernelMoments for RelaxationKernel {
    fn moments(&self, tau: f64) -> Result<(f64, f64)> {
        if tau <= 0.0 {
            return Ok((0.0, 0.0));
        }
        let ta = tau.powf(self.alpha);
        let z = -self.mu * ta;
        let g1 = ta * self.e1.eval(z)?.value;
        let g2 = ta * tau * self.e2.eval(z)?.value;
        Ok((g1, g2))
    }
}

/// Precomputed convolution weights for one kernel on one set of nodes.
///
/// Uniform grids store two lag tables (O(N) memory); general nodes store
/// one combined weight per pair (n, j) (O(N²) memory).
#[derive(Debug, Clone)]
pub enum ConvolutionWeights {
    Uniform { left: Vec<f64>, right: Vec<f64> },
    General { rows: Vec<Vec<f64>> },
}

fn cell_weights(g_a: (f64, f64), g_b: (f64, f64), h: f64) -> (f64, f64) {
    let m0 = g_a.0 - g_b.0;
    let m1 = g_a.1 - g_b.1 - h * g_b.0;
    (m0 - m1 / h, m1 / h)
}

impl ConvolutionWeights {
    /// Lag tables for the uniform grid `j·h`, j = 0..=n.
    pub fn uniform(n: usize, h: f64, kernel: &dyn KernelMoments) -> Result<Self> {
        let g = (0..=n)
            .map(|m| kernel.moments(m as f64 * h))
            .collect::<Result<Vec<_>>>()?;
        let mut left = vec![0.0; n + 1];
        let mut right = vec![0.0; n + 1];
        for m in 1..=n {
            let (l, r) = cell_weights(g[m], g[m - 1], h);
            left[m] = l;
            right[m] = r;
        }
        Ok(ConvolutionWeights::Uniform { left, right })
    }

    /// Combined node weights for arbitrary ascending nodes.
    pub fn general(nodes: &[f64], kernel: &dyn KernelMoments) -> Result<Self> {
        check_nodes(nodes)?;
        let rows = (0..nodes.len())
            .map(|n| node_weights(nodes, n, kernel))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConvolutionWeights::General { rows })
    }

    /// Picks the lag-table form when the nodes are uniform to rounding.
    pub fn for_nodes(nodes: &[f64], kernel: &dyn KernelMoments) -> Result<Self> {
        check_nodes(nodes)?;
        let n = nodes.len() - 1;
        let h = (nodes[n] - nodes[0]) / n as f64;
        let uniform = nodes
            .iter()
            .enumerate()
            .all(|(j, t)| (t - nodes[0] - j as f64 * h).abs() <= 1e-12 * nodes[n].abs().max(1.0));
        if uniform && nodes[0] == 0.0 {
            Self::uniform(n, h, kernel)
        } else {
            Self::general(nodes, kernel)
        }
    }

    /// `p_n = ∫_0^{t_n} k(t_n - s) f_lin(s) ds` for every node.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        match self {
            ConvolutionWeights::Uniform { left, right } => {
                assert_eq!(f.len(), left.len(), "sample count must match the weight table");
                let n = f.len() - 1;
                let mut out = vec![0.0; n + 1];
                for (i, o) in out.iter_mut().enumerate().skip(1) {
                    let mut s = 0.0;
                    for m in 1..=i {
                        s += left[m] * f[i - m] + right[m] * f[i - m + 1];
                    }
                    *o = s;
                }
                out
            }
            ConvolutionWeights::General { rows } => {
                assert_eq!(f.len(), rows.len(), "sample count must match the weight table");
                rows.iter()
                    .map(|w| w.iter().zip(f).map(|(a, b)| a * b).sum())
                    .collect()
            }
        }
    }
}

fn check_nodes(nodes: &[f64]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::InvalidInput("at least two nodes are required".into()));
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes[0] != 0.0 {
        return Err(Error::InvalidInput("nodes must start at 0 and increase strictly".into()));
    }
    Ok(())
}

fn node_weights(nodes: &[f64], n: usize, kernel: &dyn KernelMoments) -> Result<Vec<f64>> {
    let t = nodes[n];
    let mut w = vec![0.0; n + 1];
    if n == 0 {
        return Ok(w);
    }
    let mut g_a = kernel.moments(t - nodes[0])?;
    for j in 0..n {
        let g_b = kernel.moments(t - nodes[j + 1])?;
        let (l, r) = cell_weights(g_a, g_b, nodes[j + 1] - nodes[j]);
        w[j] += l;
        w[j + 1] += r;
        g_a = g_b;
    }
    Ok(w)
}

/// Convolution at every node of arbitrary ascending nodes, without storing
/// the weight matrix.
pub fn convolve_nodes(nodes: &[f64], f: &[f64], kernel: &dyn KernelMoments) -> Result<Vec<f64>> {
    check_nodes(nodes)?;
    if f.len() != nodes.len() {
        return Err(Error::InvalidInput("sample count differs from node count".into()));
    }
    (0..nodes.len())
        .into_par_iter()
        .map(|n| Ok(node_weights(nodes, n, kernel)?.iter().zip(f).map(|(a, b)| a * b).sum()))
        .collect()
}

/// Convolution on the uniform grid `j·h`.
pub fn convolve_uniform(f: &[f64], h: f64, kernel: &dyn KernelMoments) -> Result<Vec<f64>> {
    if f.len() < 2 {
        return Err(Error::InvalidInput("at least two samples are required".into()));
    }
    Ok(ConvolutionWeights::uniform(f.len() - 1, h, kernel)?.apply(f))
}

/// Convolution evaluated at an arbitrary point `t ∈ [0, T]` of a uniform
/// grid, with f interpolated linearly inside the last partial cell.
pub fn convolve_uniform_at(f: &[f64], h: f64, t: f64, kernel: &dyn KernelMoments) -> Result<f64> {
    let n = f.len() - 1;
    if !(t >= 0.0) || t > n as f64 * h * (1.0 + 1e-14) {
        return Err(Error::OutOfRange(format!("evaluation point {t} outside the grid")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let m = ((t / h).floor() as usize).min(n);
    let mut s = 0.0;
    let mut g_a = kernel.moments(t)?;
    for j in 0..m {
        let b = (j + 1) as f64 * h;
        let g_b = kernel.moments(t - b)?;
        let (l, r) = cell_weights(g_a, g_b, h);
        s += l * f[j] + r * f[j + 1];
        g_a = g_b;
    }
    let a = m as f64 * h;
    let tail = t - a;
    if tail > 0.0 && m < n {
        let ft = f[m] + (f[m + 1] - f[m]) * tail / h;
        let (l, r) = cell_weights(g_a, (0.0, 0.0), tail);
        s += l * f[m] + r * ft;
    }
    Ok(s)
}
