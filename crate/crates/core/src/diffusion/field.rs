//! Time grids and space-time fields on a uniform space mesh.

use crate::error::{Error, Result};

/// Time nodes `0 = t_0 < … < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn uniform(t_end: f64, n: usize) -> Result<Self> {
        Self::graded(t_end, n, 1.0)
    }

    /// `t_j = T (j/N)^γ`; γ = 1 is uniform, γ > 1 clusters nodes near 0.
    pub fn graded(t_end: f64, n: usize, gamma: f64) -> Result<Self> {
        if !(t_end > 0.0) || !t_end.is_finite() {
            return Err(Error::InvalidInput(format!("T must be positive, got {t_end}")));
        }
        if n < 2 {
            return Err(Error::InvalidInput(format!("need at least 2 time steps, got {n}")));
        }
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!("grading exponent must be >= 1, got {gamma}")));
        }
        let nodes = (0..=n)
            .map(|j| {
                if gamma == 1.0 {
                    t_end * j as f64 / n as f64
                } else {
                    t_end * (j as f64 / n as f64).powf(gamma)
                }
            })
            .collect();
        Ok(Self { nodes })
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 || nodes[0] != 0.0 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(
                "time nodes must start at 0, increase strictly and number at least 3".into(),
            ));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn t_end(&self) -> f64 {
        self.nodes[self.n()]
    }

    pub fn is_uniform(&self) -> bool {
        let n = self.n();
        let h = self.t_end() / n as f64;
        self.nodes
            .iter()
            .enumerate()
            .all(|(j, t)| (t - j as f64 * h).abs() <= 1e-12 * self.t_end())
    }
}

/// Modal representation `u(x,t) = Σ_k p_k(t) φ_k(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalData {
    pub mu: Vec<f64>,
    /// `p[k][n]`.
    pub p: Vec<Vec<f64>>,
}

/// Samples on `(M+1) × (N+1)` nodes, x outer.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub length: f64,
    pub m: usize,
    pub time: TimeGrid,
    values: Vec<f64>,
    pub modal: Option<ModalData>,
}

impl SpaceTimeField {
    pub fn new(length: f64, m: usize, time: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if !(length > 0.0) || m < 2 {
            return Err(Error::InvalidInput("need L > 0 and M >= 2".into()));
        }
        if values.len() != (m + 1) * (time.n() + 1) {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                (m + 1) * (time.n() + 1),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at flat index {i}")));
        }
        Ok(Self { length, m, time, values, modal: None })
    }

    pub fn from_fn(length: f64, m: usize, time: TimeGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let h = length / m as f64;
        let mut values = Vec::with_capacity((m + 1) * (time.n() + 1));
        for i in 0..=m {
            let x = i as f64 * h;
            for &t in time.nodes() {
                values.push(f(x, t));
            }
        }
        Self::new(length, m, time, values)
    }

    pub fn zeros(length: f64, m: usize, time: TimeGrid) -> Result<Self> {
        let len = (m + 1) * (time.n() + 1);
        Self::new(length, m, time, vec![0.0; len])
    }

    pub fn h(&self) -> f64 {
        self.length / self.m as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, n: usize) -> f64 {
        self.values[i * (self.time.n() + 1) + n]
    }

    /// `u(·, t_n)` over the mesh.
    pub fn time_slice(&self, n: usize) -> Vec<f64> {
        let stride = self.time.n() + 1;
        (0..=self.m).map(|i| self.values[i * stride + n]).collect()
    }

    /// Builds a field from per-time-node space slices (`slices[n][i]`).
    pub fn from_slices(length: f64, m: usize, time: TimeGrid, slices: &[Vec<f64>]) -> Result<Self> {
        let nt = time.n() + 1;
        if slices.len() != nt || slices.iter().any(|s| s.len() != m + 1) {
            return Err(Error::InvalidInput("slice dimensions do not match the grids".into()));
        }
        let mut values = vec![0.0; (m + 1) * nt];
        for (n, s) in slices.iter().enumerate() {
            for (i, v) in s.iter().enumerate() {
                values[i * nt + n] = *v;
            }
        }
        Self::new(length, m, time, values)
    }

    pub fn same_grid(&self, other: &SpaceTimeField) -> bool {
        self.length == other.length && self.m == other.m && self.time == other.time
    }

    /// `‖u(·,t_n)‖_{L²(0,L)}` for every time node (trapezoid in x).
    pub fn space_norms(&self) -> Vec<f64> {
        let h = self.h();
        (0..=self.time.n())
            .map(|n| {
                let s = self.time_slice(n);
                let mut acc = 0.5 * (s[0] * s[0] + s[self.m] * s[self.m]);
                for v in &s[1..self.m] {
                    acc += v * v;
                }
                (h * acc).sqrt()
            })
            .collect()
    }

    /// L²(0,T;L²(0,L)) norm over the time nodes with `t ≥ t_min`
    /// (trapezoid in both variables).
    pub fn l2_norm_from(&self, t_min: f64) -> f64 {
        let norms = self.space_norms();
        let nodes = self.time.nodes();
        let mut s = 0.0;
        for n in 0..self.time.n() {
            if nodes[n] >= t_min {
                let dt = nodes[n + 1] - nodes[n];
                s += 0.5 * dt * (norms[n] * norms[n] + norms[n + 1] * norms[n + 1]);
            }
        }
        s.sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_from(0.0)
    }

    /// `self - other` on a shared grid.
    pub fn difference(&self, other: &SpaceTimeField) -> Result<SpaceTimeField> {
        if !self.same_grid(other) {
            return Err(Error::InvalidInput("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Self::new(self.length, self.m, self.time.clone(), values)
    }

    pub fn linear_combination(&self, a: f64, other: &SpaceTimeField, b: f64) -> Result<SpaceTimeField> {
        if !self.same_grid(other) {
            return Err(Error::InvalidInput("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Self::new(self.length, self.m, self.time.clone(), values)
    }
}
