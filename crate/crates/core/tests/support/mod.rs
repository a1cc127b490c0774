#![allow(dead_code)]
//! Test-only oracles, independent of the library's evaluation paths.

pub mod hp;

use std::f64::consts::PI;

/// Plain f64 partial sum of the Mittag-Leffler series with statrs' gamma,
/// Kahan-compensated.
pub fn ml_partial_sum(alpha: f64, beta: f64, z: f64, terms: usize) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for k in 0..terms {
        let g = statrs::function::gamma::gamma(alpha * k as f64 + beta);
        if !g.is_finite() {
            break;
        }
        let t = z.powi(k as i32) / g;
        let y = t - c;
        let s = sum + y;
        c = (s - sum) - y;
        sum = s;
    }
    sum
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// ψ_k(t) = sqrt(2/T) sin((2k-1)π t / (2T)) written out independently.
pub fn psi(k: usize, t_len: f64, t: f64) -> f64 {
    (2.0 / t_len).sqrt() * ((2 * k - 1) as f64 * PI * t / (2.0 * t_len)).sin()
}

pub fn l2_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let mut s = 0.0;
    for (i, v) in values.iter().enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        s += w * v * v;
    }
    (s * h).sqrt()
}

pub fn rel_l2(a: &[f64], b: &[f64], h: f64) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    l2_uniform(&d, h) / l2_uniform(b, h)
}
