use serde::{Deserialize, Serialize};

use super::ExplicitMap;
use crate::error::{NetError, Result};
use crate::geom::MEMBERSHIP_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    ExactOfMap,
    CountingLowerBound,
    BottleneckOptimal,
    AnalyticUpperBound,
}

impl CurveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveKind::ExactOfMap => "exact-of-map",
            CurveKind::CountingLowerBound => "counting-lower-bound",
            CurveKind::BottleneckOptimal => "bottleneck-optimal",
            CurveKind::AnalyticUpperBound => "analytic-upper-bound",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "exact-of-map" => CurveKind::ExactOfMap,
            "counting-lower-bound" => CurveKind::CountingLowerBound,
            "bottleneck-optimal" => CurveKind::BottleneckOptimal,
            "analytic-upper-bound" => CurveKind::AnalyticUpperBound,
            other => return Err(NetError::Format(format!("unknown curve kind {other:?}"))),
        })
    }
}

/// Sampled `R ↦ value` with strictly increasing radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementCurve {
    pub kind: CurveKind,
    pub samples: Vec<(f64, f64)>,
    /// Set when a bound could not be evaluated over the full requested range.
    #[serde(default)]
    pub truncated: bool,
}

impl DisplacementCurve {
    pub fn new(kind: CurveKind, samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(NetError::InvalidParameter("curve radii must be strictly increasing".into()));
        }
        Ok(DisplacementCurve {
            kind,
            samples,
            truncated: false,
        })
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn last_radius(&self) -> Option<f64> {
        self.samples.last().map(|s| s.0)
    }

    /// Value at the smallest sample radius `≥ r`; an upper bound for any
    /// non-decreasing curve through the samples.
    pub fn value_at_or_above(&self, r: f64) -> Option<f64> {
        let i = self.samples.partition_point(|s| s.0 < r - MEMBERSHIP_TOL);
        self.samples.get(i).map(|s| s.1)
    }

    /// Value at the largest sample radius `≤ r` (0 before the first sample).
    pub fn value_at_or_below(&self, r: f64) -> f64 {
        let i = self.samples.partition_point(|s| s.0 <= r + MEMBERSHIP_TOL);
        if i == 0 {
            0.0
        } else {
            self.samples[i - 1].1
        }
    }

    pub fn sup(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(0.0, f64::max)
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 >= w[0].1)
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.iter().any(|r| !(*r >= 0.0)) || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(NetError::InvalidParameter(
            "radii must be non-negative and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// `disp_R(f) = max{‖f(x) − x‖ : x ∈ B̄(0, R)}` (0 on an empty ball).
pub fn displacement_curve(f: &ExplicitMap, radii: &[f64]) -> Result<DisplacementCurve> {
    displacement_curve_about(f, radii, &vec![0.0; f.dim()])
}

/// Displacement curve with balls centred at `center` instead of the origin.
pub fn displacement_curve_about(
    f: &ExplicitMap,
    radii: &[f64],
    center: &[f64],
) -> Result<DisplacementCurve> {
    check_radii(radii)?;
    let shift = crate::geom::norm(center);
    if let Some(&last) = radii.last() {
        // every source in B̄(center, R) lies in B̄(0, R + ‖center‖)
        if last + shift > f.complete_radius() + MEMBERSHIP_TOL {
            return Err(NetError::IncompleteMap(last + shift));
        }
    }
    let mut disp = f.radial_displacements(center);
    disp.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut prefix = Vec::with_capacity(disp.len());
    let mut running = 0.0f64;
    for d in &disp {
        running = running.max(d.1);
        prefix.push(running);
    }
    let samples = radii
        .iter()
        .map(|&r| {
            let n = disp.partition_point(|d| d.0 <= r + MEMBERSHIP_TOL);
            (r, if n == 0 { 0.0 } else { prefix[n - 1] })
        })
        .collect();
    DisplacementCurve::new(CurveKind::ExactOfMap, samples)
}

/// Distinct source norms up to the completeness radius: the radii where the exact
/// curve can jump.
pub fn realized_radii(f: &ExplicitMap) -> Vec<f64> {
    let mut r: Vec<f64> = f
        .sources()
        .map(crate::geom::norm)
        .filter(|r| *r > 0.0 && *r <= f.complete_radius() + MEMBERSHIP_TOL)
        .collect();
    r.sort_by(f64::total_cmp);
    r.dedup_by(|a, b| (*a - *b).abs() <= MEMBERSHIP_TOL);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::integer_lattice_window;

    fn lattice_map(shift: &[f64], scale: f64) -> ExplicitMap {
        let w = integer_lattice_window(shift.len(), 10.0, 1.0, &vec![0.0; shift.len()]).unwrap();
        let pairs = w
            .points()
            .map(|p| {
                let y = p.iter().zip(shift).map(|(a, b)| a * scale + b).collect();
                (p.to_vec(), y)
            })
            .collect();
        ExplicitMap::new(shift.len(), pairs, 10.0).unwrap()
    }

    #[test]
    fn identity_and_translation() {
        let radii = [1.0, 2.0, 5.0, 10.0];
        let id = displacement_curve(&lattice_map(&[0.0, 0.0], 1.0), &radii).unwrap();
        assert!(id.samples.iter().all(|s| s.1 == 0.0));
        let tr = displacement_curve(&lattice_map(&[1.0, 0.0], 1.0), &radii).unwrap();
        assert!(tr.samples.iter().all(|s| s.1 == 1.0));
    }

    #[test]
    fn halving_even_integers() {
        let w = integer_lattice_window(1, 20.0, 2.0, &[0.0]).unwrap();
        let pairs = w.points().map(|p| (p.to_vec(), vec![p[0] / 2.0])).collect();
        let f = ExplicitMap::new(1, pairs, 20.0).unwrap();
        let c = displacement_curve(&f, &[10.0]).unwrap();
        assert_eq!(c.samples[0].1, 5.0);
    }

    #[test]
    fn empty_ball_and_incomplete_map() {
        let f = ExplicitMap::new(1, vec![(vec![5.0], vec![6.0])], 5.0).unwrap();
        let c = displacement_curve(&f, &[1.0, 5.0]).unwrap();
        assert_eq!(c.samples, vec![(1.0, 0.0), (5.0, 1.0)]);
        assert!(matches!(
            displacement_curve(&f, &[6.0]),
            Err(NetError::IncompleteMap(_))
        ));
    }

    #[test]
    fn shifted_origin_bound() {
        // disp^y_R(f) ≤ disp^z_{R+‖z−y‖}(f) with z = 0
        let f = lattice_map(&[0.5, 0.0], 1.1);
        let y = [1.0, -2.0];
        let shift = crate::geom::norm(&y);
        let radii = [1.0, 2.0, 4.0, 6.0];
        let about = displacement_curve_about(&f, &radii, &y).unwrap();
        let widened: Vec<f64> = radii.iter().map(|r| r + shift).collect();
        let origin = displacement_curve(&f, &widened).unwrap();
        for (a, b) in about.samples.iter().zip(&origin.samples) {
            assert!(a.1 <= b.1);
        }
    }
}
