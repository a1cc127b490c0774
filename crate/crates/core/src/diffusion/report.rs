//! Maximal-regularity diagnostics for computed solutions.

use super::elliptic::{apply_operator, EigenDecomposition, EllipticSpec};
use super::field::{ModalData, SpaceTimeField};
use crate::error::{Error, Result};
use crate::frac_ops::l1_caputo_nodes;
use crate::grid::{interpolate_nodes, FractionalOrder, GridFunction};
use crate::time_basis::sobolev_norm;
use rayon::prelude::*;

/// Window `[SLOPE_T_MIN·T, SLOPE_T_MAX·T]` of the small-time log-log fit.
pub const SLOPE_T_MIN: f64 = 1e-3;
pub const SLOPE_T_MAX: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    /// `‖u‖_{H^α(0,T;L²)}` from the modal time series.
    pub norm_halpha_time: f64,
    /// `(Σ_k μ_k² ‖p_k‖²_{L²(0,T)})^{1/2}`.
    pub norm_l2h2: f64,
    /// `‖u_xx‖_{L²(0,T;L²)}` by second differences.
    pub norm_l2h2_fd: f64,
    pub norm_f: f64,
    /// `(norm_halpha_time + norm_l2h2) / norm_f`.
    pub c_observed: f64,
    /// Fitted exponent of `‖u(·,t)‖ ~ t^s` for small t, when enough nodes fall in the window.
    pub log_slope: Option<f64>,
}

/// Attaches modal coefficients to a field by projecting each time slice.
pub fn attach_modal(u: &mut SpaceTimeField, eig: &EigenDecomposition) -> Result<()> {
    if u.m != eig.m {
        return Err(Error::BasisMismatch(format!("field has M={}, eigenbasis M={}", u.m, eig.m)));
    }
    let by_time: Vec<Vec<f64>> = (0..=u.time.n()).into_par_iter().map(|n| eig.project(&u.time_slice(n))).collect();
    let p = (0..eig.modes()).map(|k| by_time.iter().map(|c| c[k]).collect()).collect();
    u.modal = Some(ModalData { mu: eig.mu.clone(), p });
    Ok(())
}

fn time_integral_sq(nodes: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for n in 0..nodes.len() - 1 {
        s += 0.5 * (nodes[n + 1] - nodes[n]) * (v[n] * v[n] + v[n + 1] * v[n + 1]);
    }
    s
}

/// Computes the regularity report; `time_modes` is the A-basis truncation
/// used for the `H^α` norm in time.
pub fn regularity_report(
    u: &SpaceTimeField,
    f: &SpaceTimeField,
    alpha: FractionalOrder,
    time_modes: usize,
) -> Result<RegularityReport> {
    if !u.same_grid(f) {
        return Err(Error::InvalidInput("solution and source live on different grids".into()));
    }
    let modal = u
        .modal
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("solution carries no modal coefficients".into()))?;
    let norm_f = f.l2_norm();
    if norm_f == 0.0 {
        return Err(Error::InvalidInput("source has zero norm".into()));
    }
    let nodes = u.time.nodes();
    let t_end = u.time.t_end();
    let n_uniform = u.time.n().max(4 * time_modes);
    let uniform = u.time.is_uniform() && n_uniform == u.time.n();

    let halpha_sq = modal
        .p
        .par_iter()
        .map(|pk| {
            let g = if uniform {
                GridFunction::new(t_end, pk.clone())?
            } else {
                GridFunction::from_fn(t_end, n_uniform, |t| interpolate_nodes(nodes, pk, t))?
            };
            let s = sobolev_norm(&g, alpha, time_modes)?;
            Ok(s * s)
        })
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum::<f64>();
    let norm_halpha_time = halpha_sq.sqrt();

    let norm_l2h2 = modal
        .p
        .iter()
        .zip(&modal.mu)
        .map(|(pk, mu)| mu * mu * time_integral_sq(nodes, pk))
        .sum::<f64>()
        .sqrt();

    let h = u.h();
    let uxx_norms: Vec<f64> = (0..nodes.len())
        .map(|n| {
            let s = u.time_slice(n);
            let mut acc = 0.0;
            for i in 1..u.m {
                let d = (s[i + 1] - 2.0 * s[i] + s[i - 1]) / (h * h);
                acc += d * d;
            }
            (h * acc).sqrt()
        })
        .collect();
    let norm_l2h2_fd = time_integral_sq(nodes, &uxx_norms).sqrt();

    let norms = u.space_norms();
    let (lo, hi) = (SLOPE_T_MIN * t_end, SLOPE_T_MAX * t_end);
    let pts: Vec<(f64, f64)> = nodes
        .iter()
        .zip(&norms)
        .filter(|(t, v)| **t >= lo && **t <= hi && **v > 0.0)
        .map(|(t, v)| (t.ln(), v.ln()))
        .collect();
    let log_slope = if pts.len() >= 3 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    } else {
        None
    };

    Ok(RegularityReport {
        norm_halpha_time,
        norm_l2h2,
        norm_l2h2_fd,
        norm_f,
        c_observed: (norm_halpha_time + norm_l2h2) / norm_f,
        log_slope,
    })
}

/// `‖F - P_K F‖ / ‖F‖` over time nodes `t ≥ t_min`, the part of the residual
/// that no choice of time discretisation can remove at truncation K.
pub fn source_truncation(f: &SpaceTimeField, eig: &EigenDecomposition, t_min: f64) -> Result<f64> {
    if f.m != eig.m {
        return Err(Error::BasisMismatch(format!("field has M={}, eigenbasis M={}", f.m, eig.m)));
    }
    let slices: Vec<Vec<f64>> = (0..=f.time.n())
        .into_par_iter()
        .map(|n| {
            let s = f.time_slice(n);
            let back = eig.reconstruct(&eig.project(&s));
            s.iter().zip(&back).map(|(a, b)| a - b).collect()
        })
        .collect();
    let d = SpaceTimeField::from_slices(f.length, f.m, f.time.clone(), &slices)?;
    let denom = f.l2_norm_from(t_min);
    if denom == 0.0 {
        return Err(Error::InvalidInput("source has zero norm on the window".into()));
    }
    Ok(d.l2_norm_from(t_min) / denom)
}

/// Discrete residual `‖∂^α u + L_h u - F‖ / ‖F‖` over interior mesh nodes
/// and time nodes `t ≥ t_min`, with the L1 Caputo derivative on the time nodes.
pub fn residual(
    u: &SpaceTimeField,
    f: &SpaceTimeField,
    spec: &EllipticSpec,
    alpha: FractionalOrder,
    t_min: f64,
) -> Result<f64> {
    if !u.same_grid(f) {
        return Err(Error::InvalidInput("solution and source live on different grids".into()));
    }
    let nodes = u.time.nodes();
    let nt = nodes.len();
    let caputo_rows = (0..=u.m)
        .into_par_iter()
        .map(|i| {
            let row: Vec<f64> = (0..nt).map(|n| u.get(i, n)).collect();
            l1_caputo_nodes(nodes, &row, alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    let slices: Vec<Vec<f64>> = (0..nt)
        .into_par_iter()
        .map(|n| {
            let lu = apply_operator(spec, &u.time_slice(n));
            let mut r = vec![0.0; u.m + 1];
            for i in 1..u.m {
                r[i] = caputo_rows[i][n] + lu[i] - f.get(i, n);
            }
            r
        })
        .collect();
    let r = SpaceTimeField::from_slices(u.length, u.m, u.time.clone(), &slices)?;
    let denom = f.l2_norm_from(t_min);
    if denom == 0.0 {
        return Err(Error::InvalidInput("source has zero norm on the residual window".into()));
    }
    Ok(r.l2_norm_from(t_min) / denom)
}
