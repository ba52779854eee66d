//! Displacement curves, counting lower bounds, bottleneck matchings and curve calculus.

mod calculus;
mod counting;
mod curve;
mod linear;
mod map;
mod matching;

pub use calculus::{compose_curves, half_linear_threshold, inverse_curve_bound, InverseBound};
pub use counting::{counting_lower_bound, counting_lower_bound_curve, CountingBound};
pub use curve::{
    displacement_curve, displacement_curve_about, realized_radii, CurveKind, DisplacementCurve,
};
pub use linear::{linear_displacement_bijection, linear_displacement_bijection_with, LinearBijection};
pub use map::ExplicitMap;
pub use matching::{
    bottleneck_bijection, bottleneck_bijection_auto, brute_force_bottleneck, hopcroft_karp,
    Matching,
};
