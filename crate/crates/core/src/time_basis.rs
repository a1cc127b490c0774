//! Eigenbasis of `A = -d²/dt²` on (0, T) with `u(0) = 0`, `u'(T) = 0`:
//! `λ_k = (2k-1)²π²/(4T²)`, `ψ_k(t) = sqrt(2/T) sin(sqrt(λ_k) t)`.
//!
//! Projections use composite Simpson weights and require `N ≥ 4K`.

use crate::error::{Error, Result};
use crate::grid::{FractionalOrder, GridFunction, OrderRegime};
use crate::quadrature::simpson_weights;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Default number of modes for norm computations.
pub const DEFAULT_MODES: usize = 64;
/// Default trace tolerance of [`range_membership`].
pub const DEFAULT_TRACE_TOL: f64 = 1e-6;
/// Number of halvings in the ε-sequence of the α = 1/2 diagnostic.
pub const HARDY_HALVINGS: usize = 20;

/// Which orthonormal family a coefficient vector refers to.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// `ψ_k` of the operator A on (0, T).
    ASine { domain_length: f64 },
    /// `sqrt(2/L) sin(kπx/L)`, Dirichlet Laplacian on (0, L).
    DirichletLaplacian { length: f64 },
    /// Eigenvectors supplied from outside (e.g. a discrete Sturm-Liouville
    /// solve); only pass-through operations are available.
    UserSupplied { name: String },
}

impl Basis {
    pub fn name(&self) -> String {
        match self {
            Basis::ASine { .. } => "a_sine".into(),
            Basis::DirichletLaplacian { .. } => "dirichlet_laplacian".into(),
            Basis::UserSupplied { name } => format!("user_supplied:{name}"),
        }
    }

    pub fn domain_length(&self) -> Option<f64> {
        match self {
            Basis::ASine { domain_length } => Some(*domain_length),
            Basis::DirichletLaplacian { length } => Some(*length),
            Basis::UserSupplied { .. } => None,
        }
    }

    /// Eigenvalue attached to the 1-based index `k`.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        match self {
            Basis::ASine { domain_length } => a_eigenvalue(k, *domain_length),
            Basis::DirichletLaplacian { length } => {
                check_index(k)?;
                Ok((k as f64 * PI / length).powi(2))
            }
            Basis::UserSupplied { name } => Err(Error::BasisMismatch(format!(
                "eigenvalues of user-supplied basis '{name}' are not known here"
            ))),
        }
    }

    /// Basis function `k` at a point.
    pub fn eval(&self, k: usize, x: f64) -> Result<f64> {
        match self {
            Basis::ASine { domain_length } => {
                check_index(k)?;
                Ok(a_eigenfunction(k, *domain_length, x))
            }
            Basis::DirichletLaplacian { length } => {
                check_index(k)?;
                Ok((2.0 / length).sqrt() * (k as f64 * PI * x / length).sin())
            }
            Basis::UserSupplied { name } => Err(Error::BasisMismatch(format!(
                "user-supplied basis '{name}' cannot be evaluated pointwise"
            ))),
        }
    }
}

/// Expansion coefficients; `coeffs[k-1]` multiplies the k-th basis function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    pub basis: Basis,
    pub coeffs: Vec<f64>,
}

impl SpectralCoefficients {
    pub fn new(basis: Basis, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("at least one coefficient is required".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        Ok(Self { basis, coeffs })
    }

    /// Unit vector e_k (1-based) in the A-basis.
    pub fn unit(domain_length: f64, k: usize, len: usize) -> Result<Self> {
        check_index(k)?;
        let mut c = vec![0.0; len.max(k)];
        c[k - 1] = 1.0;
        Self::new(Basis::ASine { domain_length }, c)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn check_index(k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidInput("mode index k must be at least 1".into()));
    }
    Ok(())
}

/// `λ_k = (2k-1)²π²/(4T²)`.
pub fn a_eigenvalue(k: usize, t_len: f64) -> Result<f64> {
    check_index(k)?;
    if !(t_len > 0.0) {
        return Err(Error::InvalidInput(format!("T must be positive, got {t_len}")));
    }
    let s = (2 * k - 1) as f64 * PI / (2.0 * t_len);
    Ok(s * s)
}

/// `ψ_k(t)`.
pub fn a_eigenfunction(k: usize, t_len: f64, t: f64) -> f64 {
    (2.0 / t_len).sqrt() * ((2 * k - 1) as f64 * PI * t / (2.0 * t_len)).sin()
}

/// ψ_k at node j of an n-interval grid; the phase is reduced exactly in
/// integers so ψ_k(0) is exactly zero and large k lose no accuracy.
fn psi_node(k: usize, j: usize, n: usize, t_len: f64) -> f64 {
    let period = 4 * n;
    let m = ((2 * k - 1) * j) % period;
    (2.0 / t_len).sqrt() * (m as f64 * PI / (2 * n) as f64).sin()
}

/// Eigenvalue and samples of ψ_k on the grid of `template`.
pub fn eigenpair(k: usize, template: &GridFunction) -> Result<(f64, GridFunction)> {
    let t_len = template.domain_length();
    let lambda = a_eigenvalue(k, t_len)?;
    let n = template.n_intervals();
    let values = (0..=n).map(|j| psi_node(k, j, n, t_len)).collect();
    Ok((lambda, template.with_values(values)?))
}

/// Precomputed Simpson-weighted samples `w_j ψ_k(t_j)` for repeated
/// projections onto the first K modes of one grid.
#[derive(Debug, Clone)]
pub struct Projector {
    domain_length: f64,
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl Projector {
    pub fn new(domain_length: f64, n: usize, modes: usize) -> Result<Self> {
        if modes < 1 {
            return Err(Error::InvalidInput("K must be at least 1".into()));
        }
        if n < 4 * modes {
            return Err(Error::UnderResolved(format!(
                "projection onto {modes} modes needs N >= {}, got N = {n}",
                4 * modes
            )));
        }
        let h = domain_length / n as f64;
        let w = simpson_weights(n, h)?;
        let rows = (1..=modes)
            .into_par_iter()
            .map(|k| (0..=n).map(|j| w[j] * psi_node(k, j, n, domain_length)).collect())
            .collect();
        Ok(Self { domain_length, n, rows })
    }

    pub fn modes(&self) -> usize {
        self.rows.len()
    }

    pub fn project(&self, u: &GridFunction) -> Result<SpectralCoefficients> {
        if u.n_intervals() != self.n || u.domain_length() != self.domain_length {
            return Err(Error::BasisMismatch(format!(
                "projector built for (T={}, N={}), got (T={}, N={})",
                self.domain_length,
                self.n,
                u.domain_length(),
                u.n_intervals()
            )));
        }
        let v = u.values();
        let coeffs = self
            .rows
            .par_iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect();
        SpectralCoefficients::new(Basis::ASine { domain_length: self.domain_length }, coeffs)
    }
}

/// `(u, ψ_k)` for k = 1..K by composite Simpson quadrature.
pub fn project(u: &GridFunction, modes: usize) -> Result<SpectralCoefficients> {
    Projector::new(u.domain_length(), u.n_intervals(), modes)?.project(u)
}

/// `Σ_k c_k φ_k(t_j)` on the grid of `template`.
pub fn reconstruct(c: &SpectralCoefficients, template: &GridFunction) -> Result<GridFunction> {
    let len = c.basis.domain_length().ok_or_else(|| {
        Error::BasisMismatch(format!("cannot reconstruct basis {} on a grid", c.basis.name()))
    })?;
    if (len - template.domain_length()).abs() > 1e-12 * len {
        return Err(Error::BasisMismatch(format!(
            "basis domain length {len} differs from grid length {}",
            template.domain_length()
        )));
    }
    let n = template.n_intervals();
    let h = template.h();
    let values = (0..=n)
        .into_par_iter()
        .map(|j| {
            let mut s = 0.0;
            for (i, ck) in c.coeffs.iter().enumerate() {
                if *ck != 0.0 {
                    let phi = match c.basis {
                        Basis::ASine { .. } => psi_node(i + 1, j, n, len),
                        _ => c.basis.eval(i + 1, j as f64 * h).expect("checked basis"),
                    };
                    s += ck * phi;
                }
            }
            s
        })
        .collect();
    template.with_values(values)
}

/// Diagonal action `c_k ↦ λ_k^γ c_k`, γ ∈ [0, 1].
pub fn frac_power_a(c: &SpectralCoefficients, gamma: f64) -> Result<SpectralCoefficients> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::OutOfRange(format!("gamma must lie in [0, 1], got {gamma}")));
    }
    let coeffs = c
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, ck)| Ok(c.basis.eigenvalue(i + 1)?.powf(gamma) * ck))
        .collect::<Result<Vec<f64>>>()?;
    SpectralCoefficients::new(c.basis.clone(), coeffs)
}

/// Truncated `D(A^{α/2})` norm together with its truncation indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub norm: f64,
    /// `λ_K^α |c_K|² / Σ_{k≤K} λ_k^α |c_k|²` (0 when the sum vanishes).
    pub tail_ratio: f64,
}

/// `(Σ_{k≤K} λ_k^α |c_k|²)^{1/2}` from coefficients.
pub fn sobolev_norm_coeffs(c: &SpectralCoefficients, alpha: FractionalOrder) -> Result<NormEstimate> {
    let a = alpha.value();
    let mut sum = 0.0;
    let mut last = 0.0;
    for (i, ck) in c.coeffs.iter().enumerate() {
        last = c.basis.eigenvalue(i + 1)?.powf(a) * ck * ck;
        sum += last;
    }
    let tail_ratio = if sum > 0.0 { last / sum } else { 0.0 };
    Ok(NormEstimate { norm: sum.sqrt(), tail_ratio })
}

/// The H^α(0,T) norm surrogate used throughout the crate.
pub fn sobolev_norm(u: &GridFunction, alpha: FractionalOrder, modes: usize) -> Result<f64> {
    Ok(sobolev_norm_detail(u, alpha, modes)?.norm)
}

pub fn sobolev_norm_detail(
    u: &GridFunction,
    alpha: FractionalOrder,
    modes: usize,
) -> Result<NormEstimate> {
    sobolev_norm_coeffs(&project(u, modes)?, alpha)
}

/// Trend of `∫_ε^T |u|²/t dt` along ε = 2^{-j} h.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyTrend {
    pub eps: Vec<f64>,
    pub integrals: Vec<f64>,
    pub converging: bool,
}

/// Numerical diagnostic for membership in the range of J^α.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDiagnostic {
    pub in_range: bool,
    pub evidence: String,
    pub norm: f64,
    pub trace: f64,
    pub hardy: Option<HardyTrend>,
}

pub fn range_membership(
    u: &GridFunction,
    alpha: FractionalOrder,
    modes: usize,
) -> Result<RangeDiagnostic> {
    range_membership_with(u, alpha, modes, DEFAULT_TRACE_TOL)
}

pub fn range_membership_with(
    u: &GridFunction,
    alpha: FractionalOrder,
    modes: usize,
    trace_tol: f64,
) -> Result<RangeDiagnostic> {
    if !(trace_tol >= 0.0) {
        return Err(Error::InvalidInput(format!("trace_tol must be >= 0, got {trace_tol}")));
    }
    let norm = sobolev_norm(u, alpha, modes)?;
    let trace = u.values()[0];
    let finite = norm.is_finite();
    let mut evidence = format!("sobolev_norm(K={modes})={norm:.6e}");
    let (in_range, hardy) = match alpha.regime() {
        OrderRegime::BelowHalf => (finite, None),
        OrderRegime::AboveHalf => {
            let ok = trace.abs() <= trace_tol;
            evidence.push_str(&format!("; |u(0)|={:.3e} vs trace_tol={trace_tol:.1e}", trace.abs()));
            (finite && ok, None)
        }
        OrderRegime::Half => {
            let trend = hardy_trend(u, trace_tol);
            let last = trend.integrals.last().copied().unwrap_or(0.0);
            evidence.push_str(&format!(
                "; int_eps^T |u|^2/t dt at eps=2^-{HARDY_HALVINGS}h is {last:.6e}, {}",
                if trend.converging { "converging" } else { "diverging" }
            ));
            (finite && trend.converging, Some(trend))
        }
    };
    Ok(RangeDiagnostic { in_range, evidence, norm, trace, hardy })
}

fn hardy_trend(u: &GridFunction, trace_tol: f64) -> HardyTrend {
    let v = u.values();
    let h = u.h();
    let n = u.n_intervals();
    // nodes t_1..t_N by trapezoid, first cell in closed form for the linear
    // interpolant u0 + s t
    let mut outer = 0.0;
    for j in 1..=n {
        let w = if j == 1 || j == n { 0.5 } else { 1.0 };
        outer += w * v[j] * v[j] / (j as f64 * h);
    }
    outer *= h;
    let u0 = v[0];
    let s = (v[1] - v[0]) / h;
    let mut eps = Vec::with_capacity(HARDY_HALVINGS + 1);
    let mut integrals = Vec::with_capacity(HARDY_HALVINGS + 1);
    for j in 0..=HARDY_HALVINGS {
        let e = h * 0.5f64.powi(j as i32);
        let cell = u0 * u0 * (h / e).ln() + 2.0 * u0 * s * (h - e) + 0.5 * s * s * (h * h - e * e);
        eps.push(e);
        integrals.push(outer + cell);
    }
    let first = integrals[1] - integrals[0];
    let last = integrals[HARDY_HALVINGS] - integrals[HARDY_HALVINGS - 1];
    let converging = !(last > 0.5 * first && last > trace_tol * trace_tol);
    HardyTrend { eps, integrals, converging }
}
