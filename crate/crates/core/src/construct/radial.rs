use serde::{Deserialize, Serialize};

use crate::displacement::ExplicitMap;
use crate::error::{NetError, Result};
use crate::geom::{self, MEMBERSHIP_TOL};
use crate::growth::{GrowthFunction, RadiusSchedule};
use crate::net::NetWindow;

/// The net whose counts the rescaled net has to beat.
#[derive(Clone, Copy, Debug)]
pub enum Reference<'a> {
    /// `Z = X`; then `R̄ = R + φ(R)` exactly.
    Same,
    Other(&'a NetWindow),
}

/// `R̄ = min{r : |X ∩ B̄(0,r)| ≥ |Z ∩ B̄(0, R + φ(R))|}`.
pub fn rbar(x: &NetWindow, z: Reference<'_>, r: f64, phi: &GrowthFunction) -> Result<f64> {
    rbar_for_reach(x, z, r + phi.evaluate(r)?)
}

/// [`rbar`] with `R + φ(R)` already evaluated.
pub fn rbar_for_reach(x: &NetWindow, z: Reference<'_>, reach: f64) -> Result<f64> {
    match z {
        Reference::Same => {
            if reach > x.window_radius() + MEMBERSHIP_TOL {
                return Err(NetError::IncompleteWindow {
                    requested: reach,
                    available: x.window_radius(),
                });
            }
            Ok(reach)
        }
        Reference::Other(z) => {
            let need = z.ball_count(reach)?;
            if need == 0 {
                return Ok(0.0);
            }
            // counts only jump at realized norms, so the minimum is the need-th norm
            x.sorted_norms()
                .get(need - 1)
                .copied()
                .ok_or(NetError::IncompleteWindow {
                    requested: reach,
                    available: x.window_radius(),
                })
        }
    }
}

/// Piecewise linear `γ` through `(0,0)` and the points `(R̄_i, R_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    /// `(R̄_i, R_i)` including the origin as entry 0.
    pub breakpoints: Vec<(f64, f64)>,
    /// `c_i` for `i = 1..=n`.
    pub slopes: Vec<f64>,
}

impl RadialProfile {
    pub fn new(knots: &[(f64, f64)]) -> Result<Self> {
        let mut breakpoints = vec![(0.0, 0.0)];
        breakpoints.extend_from_slice(knots);
        if breakpoints
            .windows(2)
            .any(|w| !(w[1].0 > w[0].0) || !(w[1].1 > w[0].1))
        {
            return Err(NetError::InvalidParameter(
                "profile breakpoints must increase strictly in both coordinates".into(),
            ));
        }
        let slopes = breakpoints
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        Ok(RadialProfile {
            breakpoints,
            slopes,
        })
    }

    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }

    pub fn outer(&self) -> (f64, f64) {
        *self.breakpoints.last().expect("origin is always present")
    }

    fn segment(&self, r: f64) -> usize {
        let i = self.breakpoints.partition_point(|b| b.0 < r);
        i.clamp(1, self.breakpoints.len() - 1)
    }

    /// `γ(r)`; beyond the last breakpoint the last segment is extended.
    pub fn gamma(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let i = self.segment(r);
        let (a, b) = (self.breakpoints[i - 1], self.breakpoints[i]);
        if r == b.0 {
            return b.1;
        }
        a.1 + self.slopes[i - 1] * (r - a.0)
    }

    pub fn gamma_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let i = self
            .breakpoints
            .partition_point(|b| b.1 < y)
            .clamp(1, self.breakpoints.len() - 1);
        let (a, b) = (self.breakpoints[i - 1], self.breakpoints[i]);
        if y == b.1 {
            return b.0;
        }
        a.0 + (y - a.1) / self.slopes[i - 1]
    }

    /// `g(x) = γ(‖x‖)·x/‖x‖`, with `g(0) = 0`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let r = geom::norm(x);
        if r == 0.0 {
            return vec![0.0; x.len()];
        }
        let f = self.gamma(r) / r;
        x.iter().map(|c| c * f).collect()
    }

    /// `(L, U)` as `0.9·min` and `1.1·max` of `R̄_i / R_i`.
    pub fn ratio_bounds(&self) -> (f64, f64) {
        let ratios = self.breakpoints[1..].iter().map(|b| b.0 / b.1);
        let (lo, hi) = ratios.fold((f64::INFINITY, 0.0f64), |(l, h), q| (l.min(q), h.max(q)));
        (0.9 * lo, 1.1 * hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeEntry {
    pub index: usize,
    pub slope: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeReport {
    pub ok: bool,
    pub lower: f64,
    pub upper: f64,
    pub entries: Vec<SlopeEntry>,
}

impl SlopeReport {
    pub fn violations(&self) -> Vec<usize> {
        self.entries.iter().filter(|e| !e.ok).map(|e| e.index).collect()
    }
}

/// Checks `(K−1)/(KU) ≤ c_i ≤ K/(LK−U)` for every slope (1-based indices).
pub fn slope_bounds_check(profile: &RadialProfile, k: f64, l: f64, u: f64) -> Result<SlopeReport> {
    if !(l > 0.0 && u > 0.0) {
        return Err(NetError::InvalidParameter("L and U must be positive".into()));
    }
    if !(k > u / l) {
        return Err(NetError::Precondition(format!("K = {k} must exceed U/L = {}", u / l)));
    }
    let lower = (k - 1.0) / (k * u);
    let upper = k / (l * k - u);
    let entries: Vec<SlopeEntry> = profile
        .slopes
        .iter()
        .enumerate()
        .map(|(i, &c)| SlopeEntry {
            index: i + 1,
            slope: c,
            ok: c >= lower - 1e-9 && c <= upper + 1e-9,
        })
        .collect();
    Ok(SlopeReport {
        ok: entries.iter().all(|e| e.ok),
        lower,
        upper,
        entries,
    })
}

/// Output of the radial rescale: `Y = g(X ∩ B̄(0, R̄_n))`, `γ`, and the pairing `x ↦ g(x)`.
#[derive(Clone, Debug)]
pub struct RadialRescale {
    pub y: NetWindow,
    pub profile: RadialProfile,
    pub map: ExplicitMap,
}

/// Longest prefix of `sched` whose `R̄_i` fit in the windows of `X` and `Z`.
pub fn fit_schedule(
    x: &NetWindow,
    z: Reference<'_>,
    phi: &GrowthFunction,
    sched: &RadiusSchedule,
) -> Result<RadiusSchedule> {
    let mut n = 0;
    for &r in &sched.radii {
        match rbar(x, z, r, phi) {
            Ok(rb) if rb <= x.window_radius() + MEMBERSHIP_TOL => n += 1,
            Ok(_) | Err(NetError::IncompleteWindow { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    if n == 0 {
        return Err(NetError::IncompleteWindow {
            requested: sched.radii.first().copied().unwrap_or(0.0),
            available: x.window_radius(),
        });
    }
    Ok(sched.truncated(n))
}

pub fn radial_rescale(
    x: &NetWindow,
    z: Reference<'_>,
    phi: &GrowthFunction,
    sched: &RadiusSchedule,
) -> Result<RadialRescale> {
    if sched.is_empty() {
        return Err(NetError::InvalidParameter("empty schedule".into()));
    }
    let mut knots = Vec::with_capacity(sched.len());
    for &r in &sched.radii {
        let rb = rbar(x, z, r, phi)?;
        if rb > x.window_radius() + MEMBERSHIP_TOL {
            return Err(NetError::IncompleteWindow {
                requested: rb,
                available: x.window_radius(),
            });
        }
        knots.push((rb, r));
    }
    let profile = RadialProfile::new(&knots)?;
    let reach = profile.outer().0;
    apply_profile(x, profile, reach)
}

/// Rescale of `X ∩ B̄(0, ρ)` with `ρ = min(R̄_n, window)`, where `γ` uses every
/// breakpoint that can be computed, including those beyond the window (always the
/// case for `Z = X`, where `R̄_i = R_i + φ(R_i)` needs no counting).
pub fn radial_rescale_to_window(
    x: &NetWindow,
    z: Reference<'_>,
    phi: &GrowthFunction,
    sched: &RadiusSchedule,
) -> Result<RadialRescale> {
    let mut knots = Vec::with_capacity(sched.len());
    for &r in &sched.radii {
        let rb = match z {
            Reference::Same => r + phi.evaluate(r)?,
            Reference::Other(_) => match rbar(x, z, r, phi) {
                Ok(rb) => rb,
                Err(NetError::IncompleteWindow { .. }) => break,
                Err(e) => return Err(e),
            },
        };
        knots.push((rb, r));
    }
    if knots.is_empty() {
        return Err(NetError::IncompleteWindow {
            requested: sched.radii.first().copied().unwrap_or(0.0),
            available: x.window_radius(),
        });
    }
    let profile = RadialProfile::new(&knots)?;
    let reach = profile.outer().0.min(x.window_radius());
    apply_profile(x, profile, reach)
}

fn apply_profile(x: &NetWindow, profile: RadialProfile, reach: f64) -> Result<RadialRescale> {
    let cut = reach + MEMBERSHIP_TOL;
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    for p in x.points().filter(|p| geom::norm(p) <= cut) {
        sources.extend_from_slice(p);
        targets.extend(profile.apply(p));
    }
    let y = NetWindow::from_flat(
        x.dim(),
        profile.gamma(reach),
        format!("radial({})", x.label()),
        targets.clone(),
    )?;
    let map = ExplicitMap::from_flat(x.dim(), sources, targets, reach)?;
    Ok(RadialRescale { y, profile, map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::integer_lattice_window;

    #[test]
    fn rbar_examples() {
        let z2 = integer_lattice_window(2, 40.0, 1.0, &[0.0, 0.0]).unwrap();
        assert_eq!(rbar(&z2, Reference::Same, 16.0, &GrowthFunction::sqrt()).unwrap(), 20.0);
        let half = integer_lattice_window(1, 30.0, 0.5, &[0.0]).unwrap();
        let z1 = integer_lattice_window(1, 30.0, 1.0, &[0.0]).unwrap();
        // φ ≡ 0
        assert_eq!(rbar_for_reach(&half, Reference::Other(&z1), 10.0).unwrap(), 5.0);
        let x2 = integer_lattice_window(2, 40.0, 1.0, &[0.0, 0.0]).unwrap();
        assert_eq!(rbar_for_reach(&x2, Reference::Other(&z2), 5.0).unwrap(), 5.0);
        let short = integer_lattice_window(1, 10.0, 0.5, &[0.0]).unwrap();
        assert!(matches!(
            rbar_for_reach(&short, Reference::Other(&z1), 29.0),
            Err(NetError::IncompleteWindow { .. })
        ));
    }

    #[test]
    fn profile_interpolates() {
        let p = RadialProfile::new(&[(20.0, 16.0), (272.0, 256.0)]).unwrap();
        assert_eq!(p.slopes, vec![0.8, 240.0 / 252.0]);
        assert_eq!(p.gamma(20.0), 16.0);
        assert_eq!(p.gamma(272.0), 256.0);
        assert!((p.gamma(146.0) - 136.0).abs() < 1e-12);
        assert!((p.gamma_inverse(p.gamma(100.0)) - 100.0).abs() < 1e-12);
        assert_eq!(p.apply(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn slope_check_flags_corrupted_breakpoint() {
        let p = RadialProfile::new(&[(20.0, 16.0), (272.0, 256.0)]).unwrap();
        let (l, u) = p.ratio_bounds();
        assert!(slope_bounds_check(&p, 16.0, l, u).unwrap().ok);
        assert!(matches!(slope_bounds_check(&p, 1.0, l, u), Err(NetError::Precondition(_))));
        let bad = RadialProfile::new(&[(20.0, 16.0), (21.0, 256.0)]).unwrap();
        let rep = slope_bounds_check(&bad, 16.0, l, u).unwrap();
        assert_eq!(rep.violations(), vec![2]);
        let single = RadialProfile::new(&[(20.0, 16.0)]).unwrap();
        assert!(slope_bounds_check(&single, 16.0, l, u).unwrap().ok);
    }

    #[test]
    fn rescale_preserves_counts() {
        let x = integer_lattice_window(2, 300.0, 1.0, &[0.0, 0.0]).unwrap();
        let phi = GrowthFunction::sqrt();
        let sched = crate::growth::radius_schedule(&phi, 4.0, 1.0, 3).unwrap();
        assert!(radial_rescale(&x, Reference::Same, &phi, &sched).is_err());
        let fitted = fit_schedule(&x, Reference::Same, &phi, &sched).unwrap();
        assert_eq!(fitted.radii, vec![16.0, 256.0]);
        let out = radial_rescale(&x, Reference::Same, &phi, &fitted).unwrap();
        assert!(out.profile.slopes.iter().all(|&c| c <= 1.0));
        for (rb, r) in &out.profile.breakpoints[1..] {
            assert_eq!(out.y.ball_count(*r).unwrap(), x.ball_count(*rb).unwrap());
        }
        let wide = radial_rescale_to_window(&x, Reference::Same, &phi, &sched).unwrap();
        assert_eq!(wide.profile.len(), 3);
        assert_eq!(wide.map.complete_radius(), 300.0);
        assert_eq!(wide.y.len(), x.len());
        for &r in x.sorted_norms().iter().filter(|&&r| r <= 272.0).step_by(97) {
            assert_eq!(
                out.y.ball_count(out.profile.gamma(r)).unwrap(),
                x.ball_count(r).unwrap()
            );
        }
    }
}
