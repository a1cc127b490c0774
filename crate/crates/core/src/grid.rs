//! Sampled functions on uniform 1-D grids and the fractional order type.

use crate::error::{Error, Result};

/// A real function sampled at the N+1 nodes `j·h`, `h = domain_length / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain_length: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(domain_length: f64, values: Vec<f64>) -> Result<Self> {
        if !(domain_length > 0.0) || !domain_length.is_finite() {
            return Err(Error::InvalidInput(format!(
                "domain length must be positive and finite, got {domain_length}"
            )));
        }
        if values.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "a grid needs at least 2 intervals, got {}",
                values.len().saturating_sub(1)
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at node {j}")));
        }
        Ok(Self { domain_length, values })
    }

    /// Samples `f` at the nodes of an `n`-interval grid.
    pub fn from_fn(domain_length: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = domain_length / n as f64;
        Self::new(domain_length, (0..=n).map(|j| f(j as f64 * h)).collect())
    }

    pub fn zeros(domain_length: f64, n: usize) -> Result<Self> {
        Self::new(domain_length, vec![0.0; n + 1])
    }

    /// Same grid, new samples.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                self.values.len(),
                values.len()
            )));
        }
        Self::new(self.domain_length, values)
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn n_intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> f64 {
        self.domain_length / self.n_intervals() as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.values.len()).map(|j| j as f64 * h).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|v| c * v).collect())
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.values.len() == other.values.len() && self.domain_length == other.domain_length
    }

    /// L² norm of the piecewise-linear interpolant's samples, trapezoid rule.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_from(0)
    }

    /// Trapezoid L² norm over `[t_{j0}, T]`.
    pub fn l2_norm_from(&self, j0: usize) -> f64 {
        let v = &self.values[j0.min(self.values.len() - 1)..];
        let mut s = 0.0;
        for (i, x) in v.iter().enumerate() {
            let w = if i == 0 || i == v.len() - 1 { 0.5 } else { 1.0 };
            s += w * x * x;
        }
        (s * self.h()).sqrt()
    }

    /// Linear interpolation at an arbitrary point of `[0, T]`.
    pub fn interpolate(&self, t: f64) -> f64 {
        interpolate_nodes_uniform(&self.values, self.h(), t)
    }
}

fn interpolate_nodes_uniform(values: &[f64], h: f64, t: f64) -> f64 {
    let n = values.len() - 1;
    let x = (t / h).clamp(0.0, n as f64);
    let j = (x.floor() as usize).min(n - 1);
    let w = x - j as f64;
    values[j] * (1.0 - w) + values[j + 1] * w
}

/// Linear interpolation of samples on arbitrary ascending nodes.
pub fn interpolate_nodes(nodes: &[f64], values: &[f64], t: f64) -> f64 {
    let n = nodes.len();
    if t <= nodes[0] {
        return values[0];
    }
    if t >= nodes[n - 1] {
        return values[n - 1];
    }
    let j = nodes.partition_point(|&x| x <= t) - 1;
    let w = (t - nodes[j]) / (nodes[j + 1] - nodes[j]);
    values[j] * (1.0 - w) + values[j + 1] * w
}

/// Position of α relative to 1/2, which changes the range characterisation
/// of the fractional integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderRegime {
    BelowHalf,
    Half,
    AboveHalf,
}

impl OrderRegime {
    pub fn name(self) -> &'static str {
        match self {
            OrderRegime::BelowHalf => "below_half",
            OrderRegime::Half => "half",
            OrderRegime::AboveHalf => "above_half",
        }
    }
}

/// Tolerance on |α - 1/2| under which α is treated as exactly one half.
pub const HALF_TOL: f64 = 1e-12;

/// An order α in (0, 1) with its regime tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    alpha: f64,
    regime: OrderRegime,
}

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidOrder(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let regime = if (alpha - 0.5).abs() < HALF_TOL {
            OrderRegime::Half
        } else if alpha < 0.5 {
            OrderRegime::BelowHalf
        } else {
            OrderRegime::AboveHalf
        };
        Ok(Self { alpha, regime })
    }

    pub fn value(self) -> f64 {
        self.alpha
    }

    pub fn regime(self) -> OrderRegime {
        self.regime
    }

    /// The complementary order 1 - α.
    pub fn complement(self) -> FractionalOrder {
        FractionalOrder::new(1.0 - self.alpha).expect("1 - alpha stays in (0, 1)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GridFunction::new(1.0, vec![0.0, 1.0]).is_err());
        assert!(GridFunction::new(0.0, vec![0.0; 5]).is_err());
        assert!(GridFunction::new(1.0, vec![0.0, f64::NAN, 1.0]).is_err());
        let g = GridFunction::from_fn(2.0, 4, |t| t).unwrap();
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.values(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!((g.interpolate(0.75) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn regimes() {
        assert_eq!(FractionalOrder::new(0.3).unwrap().regime(), OrderRegime::BelowHalf);
        assert_eq!(FractionalOrder::new(0.5 + 1e-13).unwrap().regime(), OrderRegime::Half);
        assert_eq!(FractionalOrder::new(0.5 + 1e-9).unwrap().regime(), OrderRegime::AboveHalf);
        assert!(FractionalOrder::new(1.0).is_err());
        assert!(FractionalOrder::new(0.0).is_err());
    }

    #[test]
    fn trapezoid_norm_of_linear() {
        let g = GridFunction::from_fn(1.0, 1000, |t| t).unwrap();
        assert!((g.l2_norm() - (1.0f64 / 3.0).sqrt()).abs() < 1e-6);
        assert!((interpolate_nodes(&[0.0, 1.0, 4.0], &[0.0, 1.0, 4.0], 2.5) - 2.5).abs() < 1e-15);
    }
}
