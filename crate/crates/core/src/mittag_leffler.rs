//! Two-parameter Mittag-Leffler function E_{α,β}(z) on the real axis.
//!
//! Evaluation switches between three regimes:
//!
//! * **Taylor series** `Σ z^k / Γ(αk+β)` for |z| ≤ [`TAYLOR_RADIUS`], accepted
//!   only when the rounding bound of the (possibly cancelling) partial sums is
//!   below `1e-13·max(1,|E|)`. For z > 0 all terms are positive and the series
//!   is always accepted.
//! * **Asymptotic expansion** for |z| ≥ [`ASYMPTOTIC_THRESHOLD`] when the
//!   series was not accepted: residues of the Laplace-domain pole(s) plus
//!   `-Σ_{k≥1} z^{-k}/Γ(β-αk)`, accepted when the terms drop below
//!   `1e-15·max(1,|E|)` within a fixed budget before they start to grow.
//!   The remainder is bounded by the next terms times `1/sin²(πα)` when
//!   the cut denominator can dip to `z² sin²(πα)`.
//! * **Integral representation** otherwise: the Bromwich inversion of
//!   `s^{α-β}/(s^α - z)` collapsed onto the branch cut, i.e.
//!   `(1/π)∫_0^∞ e^{-r} r^{α-β}(r^α sin πβ + z sin π(α-β)) / (r^{2α} - 2 z r^α cos πα + z²) dr`
//!   plus pole residues, integrated with adaptive Gauss-Kronrod in `ln r`.
//!   β is first lowered into (0, α] so the integrand vanishes at least like
//!   `r` at the origin; the exact recurrence `E_{α,β+α} = (E_{α,β} - 1/Γ(β))/z`
//!   brings the value back up.
//!
//! For α = 1 and z < 0 the pole sits on the cut, so that case uses the Kummer
//! form `E_{1,β}(-x) = Γ(β)^{-1} Σ_k Poisson(k; x) (β-1)/(β-1+k)` instead.

use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk;
use crate::special::{cos_pi, ln_gamma, rgamma, sin_pi};
use std::f64::consts::PI;

/// Largest |z| accepted by [`ml`].
pub const Z_MAX: f64 = 1.0e8;
/// Taylor series is only attempted inside this radius (and for z > 0 when the
/// contour route is degenerate).
pub const TAYLOR_RADIUS: f64 = 5.0;
/// The asymptotic expansion is only attempted beyond this |z|.
pub const ASYMPTOTIC_THRESHOLD: f64 = 1.0;

const TAYLOR_TOL: f64 = 1e-13;
const ASYMPTOTIC_TOL: f64 = 1e-15;
const INTEGRAL_TOL: f64 = 1e-15;
const TAYLOR_MAX_TERMS: usize = 20_000;
const ASYMPTOTIC_TERMS: usize = 64;
const POISSON_X_MAX: f64 = 700.0;

/// Input of a single Mittag-Leffler evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlQuery {
    pub alpha: f64,
    pub beta: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MlRegime {
    TaylorSeries,
    Asymptotic,
    IntegralRepresentation,
}

impl MlRegime {
    pub fn name(self) -> &'static str {
        match self {
            MlRegime::TaylorSeries => "taylor_series",
            MlRegime::Asymptotic => "asymptotic",
            MlRegime::IntegralRepresentation => "integral_representation",
        }
    }
}

impl std::fmt::Display for MlRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlResult {
    pub value: f64,
    pub est_abs_error: f64,
    pub regime: MlRegime,
}

/// Evaluate E_{α,β}(z).
pub fn ml(q: MlQuery) -> Result<MlResult> {
    MittagLeffler::new(q.alpha, q.beta)?.eval(q.z)
}

/// `t^{α-1} E_{α,α}(-μ t^α)`, the kernel of the modal responses. Accepts
/// α in (0, 1].
pub fn ml_kernel(alpha: f64, mu: f64, t: f64) -> Result<f64> {
    MlKernel::new(alpha)?.eval(mu, t)
}

/// Reusable evaluator for `t^{α-1} E_{α,α}(-μ t^α)` at fixed α.
#[derive(Debug, Clone)]
pub struct MlKernel {
    alpha: f64,
    ml: MittagLeffler,
}

impl MlKernel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidOrder(format!(
                "kernel order must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(Self { alpha, ml: MittagLeffler::new(alpha, alpha)? })
    }

    pub fn eval(&self, mu: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::OutOfRange(format!("kernel needs t > 0, got {t}")));
        }
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidInput(format!("kernel needs mu >= 0, got {mu}")));
        }
        let ta = t.powf(self.alpha);
        Ok(ta / t * self.ml.eval(-mu * ta)?.value)
    }
}

/// Evaluator for E_{α,β} at fixed (α, β), caching the coefficient tables.
#[derive(Debug, Clone)]
pub struct MittagLeffler {
    alpha: f64,
    beta: f64,
    /// 1/Γ(αk+β), k = 0..
    taylor: Vec<f64>,
    /// 1/Γ(β-αk), k = 0.. (index 0 unused by the series)
    asym: Vec<f64>,
    /// β lowered into (0, α]
    beta0: f64,
    /// 1/Γ(β0 + jα) for the upward recurrence, j = 0..n-1
    ladder: Vec<f64>,
}

impl MittagLeffler {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() || !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidOrder(format!(
                "Mittag-Leffler parameters must be positive, got alpha={alpha}, beta={beta}"
            )));
        }
        let mut taylor = Vec::with_capacity(256);
        for k in 0..4096 {
            let c = rgamma(alpha * k as f64 + beta);
            taylor.push(c);
            if c < 1e-300 && k > 8 {
                break;
            }
        }
        let asym = (0..=ASYMPTOTIC_TERMS + 2)
            .map(|k| rgamma(beta - alpha * k as f64))
            .collect();
        let mut beta0 = beta;
        let mut ladder_rev = Vec::new();
        while beta0 > alpha * (1.0 + 1e-12) {
            beta0 -= alpha;
            ladder_rev.push(rgamma(beta0));
        }
        ladder_rev.reverse();
        Ok(Self { alpha, beta, taylor, asym, beta0, ladder: ladder_rev })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eval(&self, z: f64) -> Result<MlResult> {
        if !z.is_finite() || z.abs() > Z_MAX {
            return Err(Error::OutOfRange(format!(
                "Mittag-Leffler argument {z} outside [-{Z_MAX:e}, {Z_MAX:e}]"
            )));
        }
        if z == 0.0 {
            let v = self.taylor[0];
            return Ok(MlResult {
                value: v,
                est_abs_error: f64::EPSILON * v.abs(),
                regime: MlRegime::TaylorSeries,
            });
        }
        let degenerate = self.pole_on_cut(z);
        if z.abs() <= TAYLOR_RADIUS || (z > 0.0 && degenerate) {
            if let Some(r) = self.taylor_series(z) {
                let accept = z > 0.0 || r.est_abs_error <= TAYLOR_TOL * r.value.abs().max(1.0);
                if accept {
                    return finite(r);
                }
            }
        }
        if z < 0.0 && self.alpha == 1.0 {
            let x = -z;
            if x <= POISSON_X_MAX {
                return finite(self.kummer_poisson(x));
            }
            if let Some(r) = self.asymptotic(z, &self.asym, self.beta) {
                return finite(r);
            }
        }
        if degenerate {
            return Err(Error::OutOfRange(format!(
                "E_{{{},{}}}({z}) has a pole on the branch cut and the series does not converge reliably",
                self.alpha, self.beta
            )));
        }
        if z.abs() >= ASYMPTOTIC_THRESHOLD {
            if let Some(r) = self.asymptotic(z, &self.asym, self.beta) {
                return finite(r);
            }
        }
        finite(self.integral(z))
    }

    /// True when a Laplace-domain pole of `s^{α-β}/(s^α - z)` lies on the
    /// negative real axis.
    fn pole_on_cut(&self, z: f64) -> bool {
        let theta = if z < 0.0 { PI } else { 0.0 };
        let lim = self.alpha * PI;
        let kmax = (self.alpha / 2.0).ceil() as i64 + 1;
        (-kmax..=kmax).any(|k| (((theta + 2.0 * PI * k as f64).abs()) - lim).abs() < 1e-12 * lim.max(1.0))
    }

    fn taylor_coef(&self, k: usize) -> f64 {
        if k < self.taylor.len() {
            self.taylor[k]
        } else {
            rgamma(self.alpha * k as f64 + self.beta)
        }
    }

    fn taylor_series(&self, z: f64) -> Option<MlResult> {
        let az = z.abs();
        let lz = az.ln();
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        let mut comp = 0.0; // Kahan compensation
        let mut zk = 1.0f64;
        let mut prev = f64::INFINITY;
        for k in 0..TAYLOR_MAX_TERMS {
            let c = self.taylor_coef(k);
            let mag = if zk.is_finite() && zk < 1e290 {
                zk * c
            } else {
                let arg = self.alpha * k as f64 + self.beta;
                (k as f64 * lz - ln_gamma(arg)).exp()
            };
            let term = if z < 0.0 && k % 2 == 1 { -mag } else { mag };
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            abs_sum += mag;
            if !abs_sum.is_finite() {
                return None;
            }
            zk *= az;
            let shrinking = mag < prev && self.alpha * k as f64 + self.beta > 2.0;
            if shrinking && mag <= 1e-17 * abs_sum.max(1e-300) {
                let ratio = mag / prev;
                if ratio < 0.5 {
                    let tail = 2.0 * mag;
                    let rounding = (k as f64 + 4.0) * f64::EPSILON * abs_sum * 0.5;
                    return Some(MlResult {
                        value: sum,
                        est_abs_error: tail + rounding,
                        regime: MlRegime::TaylorSeries,
                    });
                }
            }
            prev = mag;
        }
        None
    }

    /// Sum of residues of e^s s^{α-β}/(s^α - z) over poles on the principal
    /// sheet, with β given.
    fn residues(&self, z: f64, beta: f64) -> f64 {
        let theta = if z < 0.0 { PI } else { 0.0 };
        let rho = z.abs().powf(1.0 / self.alpha);
        let lim = self.alpha * PI;
        let kmax = (self.alpha / 2.0).ceil() as i64 + 1;
        let mut sum = 0.0;
        for k in -kmax..=kmax {
            let ang = theta + 2.0 * PI * k as f64;
            if ang.abs() < lim {
                let phi = ang / self.alpha;
                let amp = rho.powf(1.0 - beta) * (rho * phi.cos()).exp();
                sum += amp * ((1.0 - beta) * phi + rho * phi.sin()).cos();
            }
        }
        sum / self.alpha
    }

    fn asymptotic(&self, z: f64, coefs: &[f64], beta: f64) -> Option<MlResult> {
        let res = self.residues(z, beta);
        let inv = 1.0 / z;
        let mut p = 1.0;
        let mut terms = [0.0f64; ASYMPTOTIC_TERMS + 2];
        for (t, c) in terms.iter_mut().zip(coefs.iter().skip(1)) {
            p *= inv;
            *t = -p * c;
        }
        // bound for a term: |z|^{-k}/|Γ(β-αk)| may vanish at isolated k, so
        // look at the envelope of two consecutive magnitudes
        let scale = res.abs().max(1.0);
        let mut series = 0.0f64;
        let mut abs_sum = 0.0f64;
        let mut env_prev = f64::INFINITY;
        let mut done = None;
        for k in 0..terms.len() - 2 {
            series += terms[k];
            abs_sum += terms[k].abs();
            let env = terms[k + 1].abs() + terms[k + 2].abs();
            if env <= ASYMPTOTIC_TOL * scale.max(series.abs()) {
                done = Some(env);
                break;
            }
            if env > env_prev && k > 2 {
                // the terms started to grow before converging
                return None;
            }
            env_prev = env;
        }
        let env = done?;
        let value = res + series;
        let rounding = 4.0 * f64::EPSILON * (res.abs() + abs_sum);
        // the cut denominator r^{2α} - 2z r^α cos πα + z² is bounded below
        // by z² sin²(πα) or by z², which scales the remainder
        let cos = cos_pi(self.alpha);
        let sin = sin_pi(self.alpha);
        let factor = if z * cos > 0.0 && sin != 0.0 { 1.0 / (sin * sin) } else { 1.0 };
        if factor * env > 100.0 * ASYMPTOTIC_TOL * scale.max(value.abs()) {
            return None;
        }
        let mut est = factor * env + rounding;
        if self.alpha == 1.0 {
            // exponentially small contribution of the pole on the cut
            est += (z.abs().ln() * (1.0 - beta).abs() + z).exp();
        }
        Some(MlResult { value, est_abs_error: est, regime: MlRegime::Asymptotic })
    }

    fn kummer_poisson(&self, x: f64) -> MlResult {
        let a = self.beta - 1.0;
        let lx = x.ln();
        let kmax = (x + 40.0 * x.sqrt() + 60.0).ceil() as usize;
        let mut sum = 0.0;
        let mut lfact = 0.0;
        for k in 0..=kmax {
            if k > 0 {
                lfact += (k as f64).ln();
            }
            let w = (k as f64 * lx - x - lfact).exp();
            let c = if k == 0 { 1.0 } else { a / (a + k as f64) };
            sum += w * c;
        }
        let g = self.taylor[0];
        MlResult {
            value: g * sum,
            est_abs_error: g.abs() * (kmax as f64 + 4.0) * f64::EPSILON * (1.0 + a.abs()) + 1e-300,
            regime: MlRegime::TaylorSeries,
        }
    }

    fn integral(&self, z: f64) -> MlResult {
        let (v0, e0) = self.integral_base(z);
        // upward recurrence E_{α,b+α} = (E_{α,b} - 1/Γ(b)) / z
        let mut v = v0;
        let mut e = e0;
        for c in &self.ladder {
            let nv = (v - c) / z;
            e = (e + f64::EPSILON * (v.abs() + c.abs())) / z.abs() + f64::EPSILON * nv.abs();
            v = nv;
        }
        MlResult { value: v, est_abs_error: e, regime: MlRegime::IntegralRepresentation }
    }

    /// E_{α,β0}(z) with β0 in (0, α] from the cut integral plus residues.
    fn integral_base(&self, z: f64) -> (f64, f64) {
        let a = self.alpha;
        let b = self.beta0;
        let sb = sin_pi(b);
        let sab = sin_pi(a - b);
        let ca = cos_pi(a);
        let expo = a - b + 1.0;
        let f = move |u: f64| {
            let r = u.exp();
            let ra = (a * u).exp();
            let d = ra * ra - 2.0 * z * ra * ca + z * z;
            let num = ra * sb + z * sab;
            (-r + expo * u).exp() * num / d
        };
        let x = z.abs();
        let u0 = x.ln() / a;
        let lo = (-40.0f64).min(u0 - 40.0);
        let hi = 64.0f64.ln();
        let breaks = [u0 - 1.0, u0, u0 + 1.0, 0.0, -10.0, -20.0];
        let integral = adaptive_gk(f, lo, hi, &breaks, INTEGRAL_TOL * PI, 1e-15, 4000);
        let res = self.residues(z, b);
        let value = integral.value / PI + res;
        let err = integral.abs_error / PI + 4.0 * f64::EPSILON * (res.abs() + value.abs());
        (value, err)
    }
}

fn finite(r: MlResult) -> Result<MlResult> {
    if r.value.is_finite() && r.est_abs_error.is_finite() {
        Ok(r)
    } else {
        Err(Error::OutOfRange(format!(
            "Mittag-Leffler value overflows ({} via {})",
            r.value, r.regime
        )))
    }
}
