//! Modal solution of `∂_t^α u = -L u + F`, `u(·,0) = 0`, Dirichlet data.
//!
//! With `L φ_k = μ_k φ_k`, each mode obeys
//! `p_k(t) = ∫_0^t (t-s)^{α-1} E_{α,α}(-μ_k (t-s)^α) F_k(s) ds`,
//! computed by product integration against the piecewise-linear
//! interpolant of `F_k`. Drift and potential terms are handled by the
//! fixed point `u = Qu + G` with
//! `Qu(t) = ∫_0^t K(t-s) (b u_x + c u)(s) ds` over the principal part.

use super::elliptic::{gradient, EigenDecomposition, EllipticSpec};
use super::field::{ModalData, SpaceTimeField, TimeGrid};
use crate::convolution::{convolve_nodes, ConvolutionWeights, RelaxationKernel};
use crate::error::{Error, Result};
use crate::grid::{FractionalOrder, GridFunction};
use crate::mittag_leffler::MlKernel;
use crate::time_basis::SpectralCoefficients;
use rayon::prelude::*;

/// `p(t) = ∫_0^t (t-s)^{α-1} E_{α,α}(-μ (t-s)^α) F(s) ds` on a uniform grid.
pub fn modal_response(fk: &GridFunction, mu: f64, alpha: FractionalOrder) -> Result<GridFunction> {
    let kernel = RelaxationKernel::new(alpha.value(), mu)?;
    let w = ConvolutionWeights::uniform(fk.n_intervals(), fk.h(), &kernel)?;
    fk.with_values(w.apply(fk.values()))
}

/// [`modal_response`] on arbitrary ascending nodes starting at 0.
pub fn modal_response_nodes(nodes: &[f64], fk: &[f64], mu: f64, alpha: FractionalOrder) -> Result<Vec<f64>> {
    let kernel = RelaxationKernel::new(alpha.value(), mu)?;
    let grid = TimeGrid::from_nodes(nodes.to_vec())?;
    if grid.is_uniform() {
        let n = grid.n();
        Ok(ConvolutionWeights::uniform(n, grid.t_end() / n as f64, &kernel)?.apply(fk))
    } else {
        convolve_nodes(nodes, fk, &kernel)
    }
}

/// Samples a source term, replacing non-finite values at t = 0 (a
/// singularity in time) by the samples at the first positive node.
pub fn source_from_fn(
    length: f64,
    m: usize,
    time: TimeGrid,
    f: impl Fn(f64, f64) -> f64,
) -> Result<SpaceTimeField> {
    let h = length / m as f64;
    let t1 = time.nodes()[1];
    SpaceTimeField::from_fn(length, m, time, |x, t| {
        let v = f(x, t);
        if t == 0.0 && !v.is_finite() {
            f(x.min(m as f64 * h), t1)
        } else {
            v
        }
    })
}

fn modal_source(f: &SpaceTimeField, eig: &EigenDecomposition) -> Result<Vec<Vec<f64>>> {
    if f.m != eig.m || (f.length - eig.length).abs() > 1e-12 * f.length {
        return Err(Error::BasisMismatch(format!(
            "source mesh (L={}, M={}) differs from eigenbasis mesh (L={}, M={})",
            f.length, f.m, eig.length, eig.m
        )));
    }
    let nt = f.time.n() + 1;
    let by_time: Vec<Vec<f64>> = (0..nt).into_par_iter().map(|n| eig.project(&f.time_slice(n))).collect();
    Ok((0..eig.modes()).map(|k| by_time.iter().map(|c| c[k]).collect()).collect())
}

fn synthesize(eig: &EigenDecomposition, p: &[Vec<f64>], time: &TimeGrid, length: f64) -> Result<SpaceTimeField> {
    let nt = time.n() + 1;
    let slices: Vec<Vec<f64>> = (0..nt)
        .into_par_iter()
        .map(|n| {
            let c: Vec<f64> = p.iter().map(|pk| pk[n]).collect();
            eig.reconstruct(&c)
        })
        .collect();
    SpaceTimeField::from_slices(length, eig.m, time.clone(), &slices)
}

/// Self-adjoint case (b = 0): eigenpairs from [`EigenDecomposition::for_spec`].
pub fn solve_self_adjoint(
    f: &SpaceTimeField,
    spec: &EllipticSpec,
    alpha: FractionalOrder,
    modes: usize,
) -> Result<SpaceTimeField> {
    if !spec.drift_free(f.m) {
        return Err(Error::InvalidInput("the self-adjoint solver requires b = 0".into()));
    }
    if !spec.nonpositive_potential(f.m) {
        return Err(Error::InvalidInput("the self-adjoint solver requires c <= 0".into()));
    }
    let eig = EigenDecomposition::for_spec(spec, f.m, modes)?;
    solve_with_eigen(f, &eig, alpha)
}

/// Modal solve with caller-supplied eigenpairs.
pub fn solve_with_eigen(f: &SpaceTimeField, eig: &EigenDecomposition, alpha: FractionalOrder) -> Result<SpaceTimeField> {
    let fk = modal_source(f, eig)?;
    let nodes = f.time.nodes();
    let p = fk
        .par_iter()
        .zip(eig.mu.par_iter())
        .map(|(fkk, &mu)| modal_response_nodes(nodes, fkk, mu, alpha))
        .collect::<Result<Vec<_>>>()?;
    let mut u = synthesize(eig, &p, &f.time, f.length)?;
    u.modal = Some(ModalData { mu: eig.mu.clone(), p });
    Ok(u)
}

/// `K(t) a = Σ_k t^{α-1} E_{α,α}(-μ_k t^α) a_k φ_k`.
pub fn k_apply(
    t: f64,
    a: &SpectralCoefficients,
    mu: &[f64],
    alpha: FractionalOrder,
) -> Result<SpectralCoefficients> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("K(t) needs t > 0, got {t}")));
    }
    if a.coeffs.len() > mu.len() {
        return Err(Error::BasisMismatch(format!(
            "{} coefficients but only {} eigenvalues",
            a.coeffs.len(),
            mu.len()
        )));
    }
    let kernel = MlKernel::new(alpha.value())?;
    let coeffs = a
        .coeffs
        .iter()
        .zip(mu)
        .map(|(ak, &m)| Ok(kernel.eval(m, t)? * ak))
        .collect::<Result<Vec<f64>>>()?;
    SpectralCoefficients::new(a.basis.clone(), coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSolution {
    pub field: SpaceTimeField,
    /// Relative L²(0,T;H¹) increment of each iteration.
    pub increments: Vec<f64>,
}

impl GeneralSolution {
    pub fn iterations(&self) -> usize {
        self.increments.len()
    }

    /// Ratios of consecutive increments.
    pub fn ratios(&self) -> Vec<f64> {
        self.increments.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// L²(0,T;H¹(0,L)) norm of mesh slices (FD gradient, trapezoid rules).
fn l2h1_norm(slices: &[Vec<f64>], h: f64, nodes: &[f64]) -> f64 {
    let per_time: Vec<f64> = slices
        .iter()
        .map(|u| {
            let g = gradient(u, h);
            let m = u.len() - 1;
            let mut s = 0.5 * (u[0] * u[0] + g[0] * g[0] + u[m] * u[m] + g[m] * g[m]);
            for i in 1..m {
                s += u[i] * u[i] + g[i] * g[i];
            }
            h * s
        })
        .collect();
    let mut total = 0.0;
    for n in 0..nodes.len() - 1 {
        total += 0.5 * (nodes[n + 1] - nodes[n]) * (per_time[n] + per_time[n + 1]);
    }
    total.sqrt()
}

/// General operator with drift and an arbitrary-sign potential, by Picard
/// iteration on `u = Qu + G` in the eigenbasis of `-(a u')'`.
pub fn solve_general(
    f: &SpaceTimeField,
    spec: &EllipticSpec,
    alpha: FractionalOrder,
    modes: usize,
    opts: PicardOptions,
) -> Result<GeneralSolution> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidInput("need tol > 0 and max_iter >= 1".into()));
    }
    spec.check(f.m)?;
    let eig = EigenDecomposition::for_spec(&spec.principal_part(), f.m, modes)?;
    let nodes = f.time.nodes().to_vec();
    let convolvers = eig
        .mu
        .par_iter()
        .map(|&mu| ConvolutionWeights::for_nodes(&nodes, &RelaxationKernel::new(alpha.value(), mu)?))
        .collect::<Result<Vec<_>>>()?;
    let fk = modal_source(f, &eig)?;
    let g: Vec<Vec<f64>> = convolvers.par_iter().zip(fk.par_iter()).map(|(c, x)| c.apply(x)).collect();

    let h = f.h();
    let bx: Vec<f64> = (0..=f.m).map(|i| (spec.b)(i as f64 * h)).collect();
    let cx: Vec<f64> = (0..=f.m).map(|i| (spec.c)(i as f64 * h)).collect();
    let nt = nodes.len();
    let slices_of = |p: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..nt)
            .into_par_iter()
            .map(|n| {
                let c: Vec<f64> = p.iter().map(|pk| pk[n]).collect();
                eig.reconstruct(&c)
            })
            .collect()
    };

    let mut p = g.clone();
    let mut slices = slices_of(&p);
    let mut increments = Vec::new();
    loop {
        // modal coefficients of b u_x + c u at every time node
        let rhs_by_time: Vec<Vec<f64>> = slices
            .par_iter()
            .map(|u| {
                let ux = gradient(u, h);
                let v: Vec<f64> = (0..u.len()).map(|i| bx[i] * ux[i] + cx[i] * u[i]).collect();
                eig.project(&v)
            })
            .collect();
        let p_new: Vec<Vec<f64>> = (0..eig.modes())
            .into_par_iter()
            .map(|k| {
                let vk: Vec<f64> = rhs_by_time.iter().map(|c| c[k]).collect();
                let q = convolvers[k].apply(&vk);
                q.iter().zip(&g[k]).map(|(a, b)| a + b).collect()
            })
            .collect();
        let new_slices = slices_of(&p_new);
        let diff: Vec<Vec<f64>> = new_slices
            .iter()
            .zip(&slices)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        let denom = l2h1_norm(&new_slices, h, &nodes);
        let inc = if denom > 0.0 { l2h1_norm(&diff, h, &nodes) / denom } else { 0.0 };
        if !inc.is_finite() {
            return Err(Error::Numerical("Picard increment is not finite".into()));
        }
        increments.push(inc);
        p = p_new;
        slices = new_slices;
        if inc <= opts.tol {
            break;
        }
        if increments.len() >= opts.max_iter {
            return Err(Error::NoConvergence { iterations: increments.len(), increment: inc });
        }
    }
    let mut field = SpaceTimeField::from_slices(f.length, f.m, f.time.clone(), &slices)?;
    field.modal = Some(ModalData { mu: eig.mu.clone(), p });
    Ok(GeneralSolution { field, increments })
}
