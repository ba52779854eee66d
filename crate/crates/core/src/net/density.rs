use rayon::prelude::*;

use super::NetWindow;
use crate::construct::DensityField;
use crate::error::{NetError, Result};
use crate::geom::{self, AxisBox};

/// Reference measure for the counting-measure discrepancy.
#[derive(Clone, Debug)]
pub enum TargetMeasure {
    /// Lebesgue measure.
    Lebesgue,
    /// `c · 𝓛` for a constant intensity `c`.
    Scaled(f64),
    /// `ρ · 𝓛` with `ρ` supported on `[0,1]^d`.
    Density(DensityField),
}

impl TargetMeasure {
    pub fn of_box(&self, b: &AxisBox) -> f64 {
        match self {
            TargetMeasure::Lebesgue => b.volume(),
            TargetMeasure::Scaled(c) => c * b.volume(),
            TargetMeasure::Density(f) => f.integrate_box(b),
        }
    }
}

/// `(R, |W ∩ B̄(0,R)| / 𝓛(B̄(0,R)))` for each radius.
pub fn natural_density_curve(w: &NetWindow, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    radii
        .iter()
        .map(|&r| {
            let count = w.ball_count(r)?;
            Ok((r, count as f64 / geom::ball_volume(w.dim(), r)))
        })
        .collect()
}

/// `μ_R(S) = |R·S ∩ W| / R^d`.
pub fn counting_measure(w: &NetWindow, radius: f64, b: &AxisBox) -> f64 {
    let count = w
        .points()
        .filter(|p| {
            p.iter()
                .zip(b.lo.iter().zip(&b.hi))
                .all(|(x, (lo, hi))| *x >= lo * radius && *x < hi * radius)
        })
        .count();
    count as f64 / radius.powi(w.dim() as i32)
}

/// `max_S |μ_R(S) − target(S)|` over the test boxes (all inside the unit ball).
pub fn counting_measure_discrepancy(
    w: &NetWindow,
    radius: f64,
    test_sets: &[AxisBox],
    target: &TargetMeasure,
) -> Result<f64> {
    if test_sets.is_empty() {
        return Err(NetError::InvalidParameter("empty test family".into()));
    }
    if !(radius > 0.0) {
        return Err(NetError::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    if radius > w.window_radius() + geom::MEMBERSHIP_TOL {
        return Err(NetError::IncompleteWindow {
            requested: radius,
            available: w.window_radius(),
        });
    }
    for b in test_sets {
        if b.dim() != w.dim() {
            return Err(NetError::InvalidParameter("test box dimension mismatch".into()));
        }
        if b.max_corner_norm() > 1.0 + geom::MEMBERSHIP_TOL {
            return Err(NetError::InvalidParameter(format!(
                "test box {b:?} leaves the unit ball"
            )));
        }
    }
    Ok(test_sets
        .par_iter()
        .map(|b| (counting_measure(w, radius, b) - target.of_box(b)).abs())
        .reduce(|| 0.0, f64::max))
}

/// Dyadic sub-boxes of the cube inscribed in the unit ball, levels `0..=depth`.
pub fn dyadic_boxes(dim: usize, depth: u32) -> Vec<AxisBox> {
    let half = 1.0 / (dim as f64).sqrt();
    let mut out = Vec::new();
    for level in 0..=depth {
        let per_axis = 1i64 << level;
        let h = 2.0 * half / per_axis as f64;
        let bound = per_axis - 1;
        // enumerate [0, per_axis)^d via a shifted symmetric box
        geom::for_each_in_box(dim, bound, |z| {
            if z.iter().any(|k| *k < 0) {
                return;
            }
            out.push(AxisBox::new(
                z.iter().map(|&k| -half + k as f64 * h).collect(),
                z.iter().map(|&k| -half + (k + 1) as f64 * h).collect(),
            ));
        });
    }
    out
}
