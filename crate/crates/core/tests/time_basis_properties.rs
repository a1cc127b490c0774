mod support;

use fracsob_core::time_basis::{
    a_eigenvalue, eigenpair, frac_power_a, project, range_membership, reconstruct, sobolev_norm,
    sobolev_norm_coeffs, Basis, SpectralCoefficients,
};
use fracsob_core::{FractionalOrder, GridFunction};
use proptest::prelude::*;
use std::f64::consts::PI;

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn simpson_inner(a: &[f64], b: &[f64], h: f64) -> f64 {
    let n = a.len() - 1;
    let mut s = 0.0;
    for j in 0..=n {
        let w = if j == 0 || j == n {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        s += w * a[j] * b[j];
    }
    s * h / 3.0
}

#[test]
fn eigenpairs_match_closed_form() {
    for t_len in [1.0, 2.5] {
        let template = GridFunction::zeros(t_len, 200).unwrap();
        for k in [1, 2, 7, 30] {
            let (lambda, psi) = eigenpair(k, &template).unwrap();
            let w = (2 * k - 1) as f64 * PI / (2.0 * t_len);
            assert!((lambda - w * w).abs() < 1e-12 * w * w);
            for (j, t) in template.nodes().into_iter().enumerate() {
                assert!((psi.values()[j] - support::psi(k, t_len, t)).abs() < 1e-12);
            }
            if k > 7 {
                continue;
            }
            // -ψ'' = λψ by second differences, ψ'(T) = 0 by a one-sided stencil
            let h = template.h();
            let v = psi.values();
            for j in 1..200 {
                let d2 = -(v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
                assert!((d2 - lambda * v[j]).abs() < 1e-2 * lambda * (2.0 / t_len).sqrt(), "k={k}");
            }
            let dt = (3.0 * v[200] - 4.0 * v[199] + v[198]) / (2.0 * h);
            assert!(dt.abs() < 1e-2 * lambda, "k={k}");
        }
    }
}

#[test]
fn projection_of_linear_function() {
    // (t, ψ_k) = sqrt(2)(-1)^{k+1}/λ_k on T = 1
    let u = GridFunction::from_fn(1.0, 4096, |t| t).unwrap();
    let c = project(&u, 16).unwrap();
    for (i, ck) in c.coeffs.iter().enumerate() {
        let k = i + 1;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let want = 2f64.sqrt() * sign / a_eigenvalue(k, 1.0).unwrap();
        assert!((ck - want).abs() < 1e-9, "k={k}: {ck} vs {want}");
    }
}

#[test]
fn project_reconstruct_roundtrip_on_span() {
    let template = GridFunction::zeros(2.0, 512).unwrap();
    let coeffs = vec![0.3, -1.2, 0.0, 0.7, 0.05, -0.4, 0.0, 0.9];
    let c = SpectralCoefficients::new(Basis::ASine { domain_length: 2.0 }, coeffs.clone()).unwrap();
    let u = reconstruct(&c, &template).unwrap();
    let back = project(&u, 8).unwrap();
    for (a, b) in back.coeffs.iter().zip(&coeffs) {
        assert!((a - b).abs() < 1e-10);
    }
    let again = reconstruct(&back, &template).unwrap();
    assert!(support::rel_l2(again.values(), u.values(), u.h()) < 1e-10);
}

#[test]
fn gram_matrix_is_identity() {
    for (n, modes) in [(128, 32), (256, 64), (1000, 40)] {
        let template = GridFunction::zeros(1.0, n).unwrap();
        let psis: Vec<GridFunction> = (1..=modes).map(|k| eigenpair(k, &template).unwrap().1).collect();
        let mut worst = 0.0f64;
        for i in 0..modes {
            for j in 0..modes {
                let g = simpson_inner(psis[i].values(), psis[j].values(), template.h());
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - want).abs());
            }
        }
        assert!(worst < 1e-6, "N={n} K={modes}: {worst}");
    }
}

#[test]
fn sobolev_norm_examples() {
    let template = GridFunction::zeros(1.0, 512).unwrap();
    let psi1 = eigenpair(1, &template).unwrap().1;
    for a in [0.2, 0.5, 0.9] {
        let want = a_eigenvalue(1, 1.0).unwrap().powf(a / 2.0);
        assert!((sobolev_norm(&psi1, order(a), 64).unwrap() - want).abs() < 1e-8);
        assert_eq!(sobolev_norm(&template, order(a), 64).unwrap(), 0.0);
    }
}

#[test]
fn sobolev_norm_two_paths() {
    // t(2T - t) vanishes at 0 and is flat at T, so its coefficients decay fast
    for t_len in [1.0, 3.0] {
        let u = GridFunction::from_fn(t_len, 2048, |t| t * (2.0 * t_len - t)).unwrap();
        for a in [0.25, 0.5, 0.75] {
            let direct = sobolev_norm(&u, order(a), 64).unwrap();
            let c = project(&u, 64).unwrap();
            let v = reconstruct(&frac_power_a(&c, a / 2.0).unwrap(), &u).unwrap();
            let other = v.l2_norm();
            assert!((direct - other).abs() < 1e-8 * direct, "T={t_len} a={a}: {direct} vs {other}");
        }
    }
}

#[test]
fn sobolev_norm_is_monotone_in_modes() {
    let u = GridFunction::from_fn(1.0, 2048, |t| (3.0 * t).cos() + t).unwrap();
    for a in [0.3, 0.8] {
        let mut prev = 0.0;
        for modes in [4, 8, 16, 32, 64, 128, 256, 512] {
            let s = sobolev_norm(&u, order(a), modes).unwrap();
            assert!(s >= prev);
            prev = s;
        }
    }
}

#[test]
fn trace_obstruction_above_half() {
    // u_n = 1 - exp(-n t) tends to the constant 1, which has no zero trace
    let norms = |a: f64| -> Vec<f64> {
        [8.0, 32.0, 128.0]
            .iter()
            .map(|nu: &f64| {
                let u = GridFunction::from_fn(1.0, 8192, |t: f64| 1.0 - (-nu * t).exp()).unwrap();
                sobolev_norm(&u, order(a), 1024).unwrap()
            })
            .collect()
    };
    let above = norms(0.8);
    assert!(above[1] > 1.5 * above[0] && above[2] > 1.5 * above[1], "{above:?}");
    let below = norms(0.3);
    assert!(below[2] < 1.2 * below[1], "{below:?}");
}

#[test]
fn range_membership_examples() {
    let lin = GridFunction::from_fn(1.0, 1024, |t| t).unwrap();
    let one = GridFunction::from_fn(1.0, 1024, |_| 1.0).unwrap();
    assert!(range_membership(&lin, order(0.75), 64).unwrap().in_range);
    assert!(!range_membership(&one, order(0.75), 64).unwrap().in_range);
    assert!(range_membership(&one, order(0.25), 64).unwrap().in_range);
    let half = range_membership(&one, order(0.5), 64).unwrap();
    assert!(!half.in_range && half.hardy.is_some());
    assert!(range_membership(&lin, order(0.5), 64).unwrap().in_range);
}

fn coeffs_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 1..24)
}

proptest! {
    #[test]
    fn frac_power_additivity(c in coeffs_strategy(), g1 in 0.0f64..0.5, g2 in 0.0f64..0.5) {
        let c = SpectralCoefficients::new(Basis::ASine { domain_length: 1.7 }, c).unwrap();
        let two = frac_power_a(&frac_power_a(&c, g1).unwrap(), g2).unwrap();
        let one = frac_power_a(&c, g1 + g2).unwrap();
        for (a, b) in two.coeffs.iter().zip(&one.coeffs) {
            prop_assert!((a - b).abs() <= 1e-13 * b.abs().max(1e-300));
        }
        prop_assert_eq!(frac_power_a(&c, 0.0).unwrap(), c);
    }

    #[test]
    fn frac_power_is_diagonal(k in 1usize..40, g in 0.0f64..=1.0) {
        let e = SpectralCoefficients::unit(1.0, k, 40).unwrap();
        let r = frac_power_a(&e, g).unwrap();
        for (i, v) in r.coeffs.iter().enumerate() {
            if i + 1 == k {
                prop_assert!((v - a_eigenvalue(k, 1.0).unwrap().powf(g)).abs() < 1e-12 * v);
            } else {
                prop_assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn norm_sandwich(c in coeffs_strategy(), a in 0.01f64..0.99) {
        prop_assume!(c.iter().any(|x| x.abs() > 1e-3));
        let modes = c.len();
        let template = GridFunction::zeros(1.0, 4 * modes.max(8)).unwrap();
        let sc = SpectralCoefficients::new(Basis::ASine { domain_length: 1.0 }, c).unwrap();
        let u = reconstruct(&sc, &template).unwrap();
        let s = sobolev_norm(&u, order(a), modes).unwrap();
        let l2 = u.l2_norm();
        let lo = a_eigenvalue(1, 1.0).unwrap().powf(a / 2.0) * l2;
        let hi = a_eigenvalue(modes, 1.0).unwrap().powf(a / 2.0) * l2;
        prop_assert!(s >= lo * (1.0 - 1e-9) && s <= hi * (1.0 + 1e-9), "{lo} {s} {hi}");
    }

    #[test]
    fn coefficient_norm_is_homogeneous(c in coeffs_strategy(), s in 0.01f64..100.0, a in 0.01f64..0.99) {
        let base = SpectralCoefficients::new(Basis::ASine { domain_length: 1.0 }, c.clone()).unwrap();
        let scaled = SpectralCoefficients::new(Basis::ASine { domain_length: 1.0 }, c.iter().map(|x| s * x).collect()).unwrap();
        let n0 = sobolev_norm_coeffs(&base, order(a)).unwrap().norm;
        let n1 = sobolev_norm_coeffs(&scaled, order(a)).unwrap().norm;
        prop_assert!((n1 - s * n0).abs() <= 1e-12 * (s * n0).max(1e-300));
    }
}
