use fracsob_core::time_basis::{Basis, SpectralCoefficients};
use fracsob_core::{GridFunction, SpaceTimeField, TimeGrid};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e6f64..1e6,
        prop::num::f64::NORMAL,
        prop::num::f64::SUBNORMAL,
        Just(0.0),
        Just(-0.0),
    ]
}

proptest! {
    #[test]
    fn grid_function_roundtrip(len in 1e-3f64..1e3, values in prop::collection::vec(finite(), 3..64)) {
        let g = GridFunction::new(len, values).unwrap();
        let back = GridFunction::from_csv(&g.to_csv()).unwrap();
        prop_assert_eq!(back.domain_length().to_bits(), g.domain_length().to_bits());
        for (a, b) in back.values().iter().zip(g.values()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(back.to_csv(), g.to_csv());
    }

    #[test]
    fn coefficients_roundtrip(len in 1e-3f64..1e3, coeffs in prop::collection::vec(finite(), 1..40), kind in 0usize..3) {
        let basis = match kind {
            0 => Basis::ASine { domain_length: len },
            1 => Basis::DirichletLaplacian { length: len },
            _ => Basis::UserSupplied { name: "fd".into() },
        };
        let c = SpectralCoefficients::new(basis, coeffs).unwrap();
        let back = SpectralCoefficients::from_csv(&c.to_csv()).unwrap();
        prop_assert_eq!(back.basis, c.basis);
        for (a, b) in back.coeffs.iter().zip(&c.coeffs) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn field_roundtrip(m in 2usize..12, n in 2usize..12, graded in any::<bool>(), seed in -1e300f64..1e300) {
        let time = if graded { TimeGrid::graded(2.0, n, 2.0).unwrap() } else { TimeGrid::uniform(2.0, n).unwrap() };
        let f = SpaceTimeField::from_fn(1.5, m, time, |x, t| if x == 0.0 || x == 1.5 { 0.0 } else { seed * (x + 1.0) / (t + 1.0) }).unwrap();
        let back = SpaceTimeField::from_csv(&f.to_csv()).unwrap();
        prop_assert_eq!(back.m, f.m);
        prop_assert_eq!(back.time.nodes(), f.time.nodes());
        for (a, b) in back.values().iter().zip(f.values()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn rejects_malformed_input() {
    assert!(GridFunction::from_csv("").is_err());
    assert!(GridFunction::from_csv("# domain_length=1 n_intervals=2\n0,1\n0.5,2\n").is_err());
    assert!(GridFunction::from_csv("# domain_length=1 n_intervals=1\n0,1\n1,nope\n").is_err());
    assert!(GridFunction::from_csv("# domain_length=1 n_intervals=1\n0,1\n0.7,2\n").is_err());
    assert!(SpaceTimeField::from_csv("# L=1 M=1 T=1 N=1\n0,0,0\n").is_err());
}
