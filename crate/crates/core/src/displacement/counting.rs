use serde::Serialize;

use super::{CurveKind, DisplacementCurve};
use crate::error::Result;
use crate::net::NetWindow;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CountingBound {
    pub radius: f64,
    pub value: f64,
    /// `Z` ran out before the count was reached; `value` is still a lower bound.
    pub truncated: bool,
}

/// `sup{t ≥ 0 : |Z ∩ B̄(0, R+t)| < |Y ∩ B̄(0, R)|}`: every injection `Y → Z` moves
/// some point of `B̄(0, R)` at least this far.
pub fn counting_lower_bound(y: &NetWindow, z: &NetWindow, radius: f64) -> Result<CountingBound> {
    let need = y.ball_count(radius)?;
    if need == 0 {
        return Ok(CountingBound {
            radius,
            value: 0.0,
            truncated: false,
        });
    }
    Ok(match z.sorted_norms().get(need - 1) {
        Some(&r) if r <= z.window_radius() => CountingBound {
            radius,
            value: (r - radius).max(0.0),
            truncated: false,
        },
        _ => CountingBound {
            radius,
            value: (z.window_radius() - radius).max(0.0),
            truncated: true,
        },
    })
}

pub fn counting_lower_bound_curve(
    y: &NetWindow,
    z: &NetWindow,
    radii: &[f64],
) -> Result<DisplacementCurve> {
    let mut samples = Vec::with_capacity(radii.len());
    let mut truncated = false;
    for &r in radii {
        let b = counting_lower_bound(y, z, r)?;
        truncated |= b.truncated;
        samples.push((r, b.value));
    }
    let mut curve = DisplacementCurve::new(CurveKind::CountingLowerBound, samples)?;
    curve.truncated = truncated;
    Ok(curve)
}
