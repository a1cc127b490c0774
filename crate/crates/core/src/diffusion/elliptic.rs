//! One-dimensional elliptic operators `L u = -(a u')' - b u' - c u` on
//! (0, L) with homogeneous Dirichlet conditions, and their eigenpairs.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// A coefficient function of the space variable.
pub type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn constant(v: f64) -> Coefficient {
    Arc::new(move |_| v)
}

/// Coefficient data of the elliptic operator.
#[derive(Clone)]
pub struct EllipticSpec {
    pub length: f64,
    pub a: Coefficient,
    pub b: Coefficient,
    pub c: Coefficient,
    /// Set when a, b and c are known to be constant; enables the analytic
    /// eigenpairs.
    pub constant_coefficients: Option<(f64, f64, f64)>,
}

impl fmt::Debug for EllipticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EllipticSpec")
            .field("length", &self.length)
            .field("constant_coefficients", &self.constant_coefficients)
            .finish_non_exhaustive()
    }
}

impl EllipticSpec {
    pub fn new(length: f64, a: Coefficient, b: Coefficient, c: Coefficient) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidInput(format!("domain length must be positive, got {length}")));
        }
        Ok(Self { length, a, b, c, constant_coefficients: None })
    }

    pub fn constant(length: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        let mut s = Self::new(length, constant(a), constant(b), constant(c))?;
        s.constant_coefficients = Some((a, b, c));
        Ok(s)
    }

    /// `-u''` on (0, L).
    pub fn laplacian(length: f64) -> Result<Self> {
        Self::constant(length, 1.0, 0.0, 0.0)
    }

    /// Same diffusion coefficient, drift and potential removed.
    pub fn principal_part(&self) -> Self {
        Self {
            length: self.length,
            a: self.a.clone(),
            b: constant(0.0),
            c: constant(0.0),
            constant_coefficients: self.constant_coefficients.map(|(a, _, _)| (a, 0.0, 0.0)),
        }
    }

    /// Minimum of a over mesh nodes and cell midpoints; errors unless it is
    /// positive and every coefficient sample is finite.
    pub fn check(&self, m: usize) -> Result<f64> {
        let h = self.length / m as f64;
        let mut nu0 = f64::INFINITY;
        for i in 0..=2 * m {
            let x = 0.5 * i as f64 * h;
            let (a, b, c) = ((self.a)(x), (self.b)(x), (self.c)(x));
            if !a.is_finite() || !b.is_finite() || !c.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite coefficient at x = {x}")));
            }
            nu0 = nu0.min(a);
        }
        if !(nu0 > 0.0) {
            return Err(Error::Ellipticity(format!("min a(x) = {nu0} is not positive")));
        }
        Ok(nu0)
    }

    /// Whether b vanishes on the mesh (the self-adjoint branch).
    pub fn drift_free(&self, m: usize) -> bool {
        let h = self.length / m as f64;
        (0..=m).all(|i| (self.b)(i as f64 * h) == 0.0)
    }

    /// Whether c ≤ 0 on the mesh.
    pub fn nonpositive_potential(&self, m: usize) -> bool {
        let h = self.length / m as f64;
        (0..=m).all(|i| (self.c)(i as f64 * h) <= 0.0)
    }
}

/// Eigenvalues (ascending) and L²-orthonormal eigenvectors on the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub length: f64,
    /// Number of mesh intervals M.
    pub m: usize,
    pub mu: Vec<f64>,
    /// `phi[k][i]`, mode k at node i (boundary samples are 0).
    pub phi: Vec<Vec<f64>>,
    pub name: String,
}

impl EigenDecomposition {
    /// Wraps externally computed pairs after checking ordering, positivity
    /// and orthonormality under the mesh inner product.
    pub fn user_supplied(
        length: f64,
        m: usize,
        mu: Vec<f64>,
        phi: Vec<Vec<f64>>,
        name: &str,
    ) -> Result<Self> {
        if mu.is_empty() || mu.len() != phi.len() {
            return Err(Error::InvalidInput("need one eigenvector per eigenvalue".into()));
        }
        if phi.iter().any(|p| p.len() != m + 1) {
            return Err(Error::InvalidInput(format!("eigenvectors need {} samples", m + 1)));
        }
        if !(mu[0] > 0.0) || mu.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput("eigenvalues must be positive and ascending".into()));
        }
        let d = Self { length, m, mu, phi, name: name.to_string() };
        let g = d.gram_error();
        if g > 1e-8 {
            return Err(Error::InvalidInput(format!("eigenvectors are not orthonormal (error {g:e})")));
        }
        Ok(d)
    }

    pub fn modes(&self) -> usize {
        self.mu.len()
    }

    pub fn h(&self) -> f64 {
        self.length / self.m as f64
    }

    /// `(v, φ_k)` with the trapezoid rule on the mesh.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let h = self.h();
        let last = self.m;
        self.phi
            .iter()
            .map(|p| {
                let mut s = 0.5 * (p[0] * v[0] + p[last] * v[last]);
                for i in 1..last {
                    s += p[i] * v[i];
                }
                h * s
            })
            .collect()
    }

    /// `Σ_k c_k φ_k` on the mesh.
    pub fn reconstruct(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m + 1];
        for (ck, p) in c.iter().zip(&self.phi) {
            for (o, pi) in out.iter_mut().zip(p) {
                *o += ck * pi;
            }
        }
        out
    }

    /// Largest deviation of the discrete Gram matrix from the identity.
    pub fn gram_error(&self) -> f64 {
        let mut err = 0.0f64;
        for (i, pi) in self.phi.iter().enumerate() {
            let c = self.project(pi);
            for (j, cj) in c.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                err = err.max((cj - want).abs());
            }
        }
        err
    }

    /// Analytic pairs when the coefficients are constant and drift-free,
    /// the finite-difference Sturm-Liouville solve otherwise.
    pub fn for_spec(spec: &EllipticSpec, m: usize, modes: usize) -> Result<Self> {
        match spec.constant_coefficients {
            Some((a, b, c)) if b == 0.0 => {
                spec.check(m)?;
                let mut d = laplacian_eigs(spec.length, m, modes)?;
                for mu in d.mu.iter_mut() {
                    *mu = a * *mu - c;
                }
                if !(d.mu[0] > 0.0) {
                    return Err(Error::Eigensolver(format!(
                        "lowest eigenvalue {} is not positive",
                        d.mu[0]
                    )));
                }
                d.name = "constant_coefficient".into();
                Ok(d)
            }
            _ => sturm_liouville_eigs(spec, m, modes),
        }
    }
}

fn check_modes(m: usize, modes: usize) -> Result<()> {
    if modes < 1 {
        return Err(Error::InvalidInput("K must be at least 1".into()));
    }
    if 4 * modes > m {
        return Err(Error::UnderResolved(format!(
            "{modes} eigenmodes need a mesh with M >= {}, got M = {m}",
            4 * modes
        )));
    }
    Ok(())
}

/// Dirichlet Laplacian on (0, L): `μ_k = (kπ/L)²`, `φ_k = sqrt(2/L) sin(kπx/L)`.
pub fn laplacian_eigs(length: f64, m: usize, modes: usize) -> Result<EigenDecomposition> {
    check_modes(m, modes)?;
    if !(length > 0.0) {
        return Err(Error::InvalidInput(format!("length must be positive, got {length}")));
    }
    let scale = (2.0 / length).sqrt();
    let mu = (1..=modes).map(|k| (k as f64 * PI / length).powi(2)).collect();
    let phi = (1..=modes)
        .map(|k| {
            (0..=m)
                .map(|i| {
                    // exact zeros at both ends, phase reduced in integers
                    let p = (k * i) % (2 * m);
                    if p % m == 0 {
                        0.0
                    } else {
                        scale * (p as f64 * PI / m as f64).sin()
                    }
                })
                .collect()
        })
        .collect();
    Ok(EigenDecomposition { length, m, mu, phi, name: "laplacian".into() })
}

/// Conservative second-order finite differences for `-(a v')' - c v`,
/// solved as a dense symmetric eigenproblem. Eigenvectors are scaled to
/// unit mesh L² norm with the sign of the matching Laplacian mode.
pub fn sturm_liouville_eigs(spec: &EllipticSpec, m: usize, modes: usize) -> Result<EigenDecomposition> {
    check_modes(m, modes)?;
    spec.check(m)?;
    if !spec.drift_free(m) {
        return Err(Error::InvalidInput(
            "the self-adjoint eigensolver requires b = 0".into(),
        ));
    }
    let h = spec.length / m as f64;
    let n = m - 1;
    let mut mat = DMatrix::<f64>::zeros(n, n);
    for r in 0..n {
        let i = r + 1;
        let x = i as f64 * h;
        let am = (spec.a)(x - 0.5 * h);
        let ap = (spec.a)(x + 0.5 * h);
        mat[(r, r)] = (am + ap) / (h * h) - (spec.c)(x);
        if r + 1 < n {
            mat[(r, r + 1)] = -ap / (h * h);
            mat[(r + 1, r)] = -ap / (h * h);
        }
    }
    let eig = SymmetricEigen::new(mat);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut mu = Vec::with_capacity(modes);
    let mut phi = Vec::with_capacity(modes);
    for (k, &idx) in order.iter().take(modes).enumerate() {
        let lam = eig.eigenvalues[idx];
        if !lam.is_finite() {
            return Err(Error::Eigensolver("non-finite eigenvalue".into()));
        }
        if lam <= 0.0 {
            return Err(Error::Eigensolver(format!(
                "discrete eigenvalue {} = {lam} is not positive",
                k + 1
            )));
        }
        let col = eig.eigenvectors.column(idx);
        let mut v = vec![0.0; m + 1];
        for r in 0..n {
            v[r + 1] = col[r] / h.sqrt();
        }
        let align: f64 = (1..m)
            .map(|i| v[i] * ((k + 1) as f64 * PI * i as f64 / m as f64).sin())
            .sum();
        let first = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
        let flip = if align != 0.0 { align < 0.0 } else { first < 0.0 };
        if flip {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        mu.push(lam);
        phi.push(v);
    }
    Ok(EigenDecomposition { length: spec.length, m, mu, phi, name: "sturm_liouville".into() })
}

/// `(L_h u)_i` at interior nodes for the full operator
/// `-(a u')' - b u' - c u`, zero at the boundary nodes.
pub fn apply_operator(spec: &EllipticSpec, u: &[f64]) -> Vec<f64> {
    let m = u.len() - 1;
    let h = spec.length / m as f64;
    let mut out = vec![0.0; m + 1];
    for i in 1..m {
        let x = i as f64 * h;
        let am = (spec.a)(x - 0.5 * h);
        let ap = (spec.a)(x + 0.5 * h);
        let diff = -(ap * (u[i + 1] - u[i]) - am * (u[i] - u[i - 1])) / (h * h);
        let grad = (u[i + 1] - u[i - 1]) / (2.0 * h);
        out[i] = diff - (spec.b)(x) * grad - (spec.c)(x) * u[i];
    }
    out
}

/// `u'` by central differences, second-order one-sided at the ends.
pub fn gradient(u: &[f64], h: f64) -> Vec<f64> {
    let m = u.len() - 1;
    let mut g = vec![0.0; m + 1];
    g[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    g[m] = (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * h);
    for i in 1..m {
        g[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    }
    g
}
