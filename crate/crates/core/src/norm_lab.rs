//! Ratio statistics for the norm equivalences
//! `‖J^α u‖_{H^α} ~ ‖u‖_{L²}` and `‖∂^α u‖_{L²} ~ ‖u‖_{H^α}`.

use crate::error::{Error, Result};
use crate::frac_ops::{rl_integral, CaputoModes};
use crate::grid::{FractionalOrder, GridFunction, OrderRegime};
use crate::time_basis::{eigenpair, range_membership, sobolev_norm_coeffs, Projector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Default seed of the random trigonometric family.
pub const DEFAULT_SEED: u64 = 20_240_521;
/// Default grid for the shipped families.
pub const DEFAULT_N: usize = 2048;
pub const EIGEN_FAMILY_SIZE: usize = 16;
pub const TRIG_FAMILY_SIZE: usize = 20;
/// Highest frequency index in a random trigonometric polynomial.
pub const TRIG_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub family_name: String,
    pub alpha: FractionalOrder,
    pub ratios: Vec<f64>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub spread: f64,
    /// Members skipped by the range diagnostic, with the reason.
    pub excluded: Vec<(usize, String)>,
    /// Extra diagnostics (the Hardy-type trend at α = 1/2).
    pub notes: Vec<String>,
}

impl EquivalenceReport {
    fn from_ratios(
        family_name: &str,
        alpha: FractionalOrder,
        ratios: Vec<f64>,
        excluded: Vec<(usize, String)>,
        notes: Vec<String>,
    ) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::InvalidInput(format!("family '{family_name}' has no usable member")));
        }
        let ratio_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let ratio_max = ratios.iter().copied().fold(0.0, f64::max);
        if !(ratio_min > 0.0) || !ratio_max.is_finite() {
            return Err(Error::Numerical(format!(
                "ratios of family '{family_name}' are not finite and positive"
            )));
        }
        Ok(Self {
            family_name: family_name.to_string(),
            alpha,
            spread: ratio_max / ratio_min,
            ratios,
            ratio_min,
            ratio_max,
            excluded,
            notes,
        })
    }
}

fn check_family(family: &[GridFunction]) -> Result<()> {
    let first = family
        .first()
        .ok_or_else(|| Error::InvalidInput("family must not be empty".into()))?;
    for (i, u) in family.iter().enumerate() {
        if !u.same_grid(first) {
            return Err(Error::InvalidInput(format!("member {i} lives on a different grid")));
        }
        if u.l2_norm() == 0.0 {
            return Err(Error::InvalidInput(format!("member {i} has zero L2 norm")));
        }
    }
    Ok(())
}

/// `sobolev_norm(J^α u_i) / ‖u_i‖_{L²}`.
pub fn verify_forward(
    family_name: &str,
    family: &[GridFunction],
    alpha: FractionalOrder,
    modes: usize,
) -> Result<EquivalenceReport> {
    check_family(family)?;
    let projector = Projector::new(family[0].domain_length(), family[0].n_intervals(), modes)?;
    let ratios = family
        .par_iter()
        .map(|u| {
            let ju = rl_integral(u, alpha)?;
            let norm = sobolev_norm_coeffs(&projector.project(&ju)?, alpha)?.norm;
            Ok(norm / u.l2_norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    EquivalenceReport::from_ratios(family_name, alpha, ratios, Vec::new(), Vec::new())
}

/// `‖∂^α u_i‖_{L²} / sobolev_norm(u_i)` with the spectral Caputo derivative.
/// Members failing the range diagnostic are excluded and listed.
pub fn verify_inverse(
    family_name: &str,
    family: &[GridFunction],
    alpha: FractionalOrder,
    modes: usize,
) -> Result<EquivalenceReport> {
    check_family(family)?;
    let table = CaputoModes::new(alpha, family[0].domain_length(), family[0].n_intervals(), modes)?;
    verify_inverse_with(family_name, family, &table)
}

/// As [`verify_inverse`] with a prebuilt Caputo mode table.
pub fn verify_inverse_with(
    family_name: &str,
    family: &[GridFunction],
    table: &CaputoModes,
) -> Result<EquivalenceReport> {
    check_family(family)?;
    let alpha = table.alpha();
    let modes = table.modes();
    let projector = Projector::new(family[0].domain_length(), family[0].n_intervals(), modes)?;
    let mut ratios = Vec::new();
    let mut excluded = Vec::new();
    let mut notes = Vec::new();
    for (i, u) in family.iter().enumerate() {
        let range = range_membership(u, alpha, modes)?;
        if alpha.regime() == OrderRegime::Half {
            notes.push(format!("member {i}: {}", range.evidence));
        }
        if !range.in_range {
            excluded.push((i, range.evidence));
            continue;
        }
        let d = table.apply(u)?.result.l2_norm();
        let s = sobolev_norm_coeffs(&projector.project(u)?, alpha)?.norm;
        ratios.push(d / s);
    }
    EquivalenceReport::from_ratios(family_name, alpha, ratios, excluded, notes)
}

/// ψ_1..ψ_count on an n-interval grid over (0, T).
pub fn eigen_family(domain_length: f64, n: usize, count: usize) -> Result<Vec<GridFunction>> {
    let template = GridFunction::zeros(domain_length, n)?;
    (1..=count).map(|k| Ok(eigenpair(k, &template)?.1)).collect()
}

/// Random trigonometric polynomials
/// `Σ_{m=0}^{D} (a_m cos(mπt/T) + b_m sin(mπt/T))` with coefficients drawn
/// uniformly from `[-1, 1]/(1+m)`.
pub fn trig_family(domain_length: f64, n: usize, count: usize, seed: u64) -> Result<Vec<GridFunction>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coef: Vec<(f64, f64)> = (0..=TRIG_DEGREE)
                .map(|m| {
                    let s = 1.0 / (1.0 + m as f64);
                    (s * rng.random_range(-1.0..=1.0), s * rng.random_range(-1.0..=1.0))
                })
                .collect();
            GridFunction::from_fn(domain_length, n, |t| {
                coef.iter()
                    .enumerate()
                    .map(|(m, (a, b))| {
                        let w = m as f64 * PI * t / domain_length;
                        a * w.cos() + b * w.sin()
                    })
                    .sum()
            })
        })
        .collect()
}

/// `{J^α f}` for f in the trigonometric family.
pub fn image_family(
    domain_length: f64,
    n: usize,
    count: usize,
    seed: u64,
    alpha: FractionalOrder,
) -> Result<Vec<GridFunction>> {
    trig_family(domain_length, n, count, seed)?
        .iter()
        .map(|f| rl_integral(f, alpha))
        .collect()
}

/// Shipped family names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Eigen,
    Trig,
    Image,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Eigen => "eigen",
            Family::Trig => "trig",
            Family::Image => "image",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "eigen" => Ok(Family::Eigen),
            "trig" => Ok(Family::Trig),
            "image" => Ok(Family::Image),
            other => Err(Error::InvalidInput(format!(
                "unknown family '{other}' (expected eigen, trig or image)"
            ))),
        }
    }

    /// Members of the family on (0, 1) with `n` intervals.
    pub fn build(self, n: usize, seed: u64, alpha: FractionalOrder) -> Result<Vec<GridFunction>> {
        match self {
            Family::Eigen => eigen_family(1.0, n, EIGEN_FAMILY_SIZE),
            Family::Trig => trig_family(1.0, n, TRIG_FAMILY_SIZE, seed),
            Family::Image => image_family(1.0, n, TRIG_FAMILY_SIZE, seed, alpha),
        }
    }
}
