//! Shared inputs for the benchmarks.

use fracsob_core::{GridFunction, SpaceTimeField, TimeGrid};
use std::f64::consts::PI;

/// A smooth time profile with a nonzero value at the origin.
pub fn time_profile(n: usize) -> GridFunction {
    GridFunction::from_fn(1.0, n, |t| (2.0 * PI * t).cos() + t * t).expect("valid grid")
}

/// A space-time source that vanishes on the boundary.
pub fn source(m: usize, n: usize) -> SpaceTimeField {
    let time = TimeGrid::uniform(1.0, n).expect("valid grid");
    SpaceTimeField::from_fn(1.0, m, time, |x, t| (PI * x).sin() * (1.0 + t) + x * (1.0 - x) * t)
        .expect("finite source")
}
