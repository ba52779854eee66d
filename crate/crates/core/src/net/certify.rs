use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::NetWindow;
use crate::error::{NetError, Result};
use crate::geom::{self, MEMBERSHIP_TOL};
use crate::index::PointIndex;

/// Default ceiling on the number of probe points used for the net constant.
pub const DEFAULT_MAX_PROBES: usize = 2_000_000;

/// Metric certificate of a window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetCertificate {
    /// Minimum pairwise distance.
    pub separation: f64,
    /// Largest distance from a probe point to the net, over probes farther than
    /// `boundary_margin` from the window boundary.
    pub net_constant: f64,
    /// Largest gap between consecutive distinct norms, counting the gap from 0.
    pub layer_gap: f64,
    /// Probe-grid pitch used for the net constant (at most `separation / 4`).
    pub probe_pitch: f64,
    /// Probes closer than this to `∂B̄(0, window_radius)` were ignored.
    pub boundary_margin: f64,
    /// Radius of the region actually probed; smaller than the window when the
    /// probe budget forced a restriction.
    pub probe_radius: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct CertifyOptions {
    pub max_probes: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            max_probes: DEFAULT_MAX_PROBES,
        }
    }
}

pub fn certify(w: &NetWindow) -> Result<NetCertificate> {
    certify_with(w, CertifyOptions::default())
}

pub fn certify_with(w: &NetWindow, opts: CertifyOptions) -> Result<NetCertificate> {
    if w.len() < 2 {
        return Err(NetError::Degenerate(format!(
            "certify needs at least 2 points, window has {}",
            w.len()
        )));
    }
    let index = PointIndex::new(w.dim(), w.coords(), 0.0);
    let separation = separation_of(w.dim(), w.coords(), &index);
    if !(separation > 0.0) {
        return Err(NetError::Degenerate("coincident points".into()));
    }
    let layer_gap = layer_gap(w.sorted_norms());

    let dim = w.dim();
    let pitch = separation / 4.0;
    let budget_steps = (opts.max_probes.max(1) as f64).powf(1.0 / dim as f64);
    let mut steps = (w.window_radius() / pitch).floor();
    let mut probe_radius = w.window_radius();
    if 2.0 * steps + 1.0 > budget_steps {
        steps = ((budget_steps - 1.0) / 2.0).floor().max(1.0);
        probe_radius = steps * pitch;
    }
    let steps = steps as i64;
    let mut probes = Vec::new();
    geom::for_each_in_box(dim, steps, |z| {
        let p: Vec<f64> = z.iter().map(|k| *k as f64 * pitch).collect();
        if geom::norm(&p) <= probe_radius + MEMBERSHIP_TOL {
            probes.push(p);
        }
    });
    // (distance to window boundary, distance to net)
    let mut samples: Vec<(f64, f64)> = probes
        .par_iter()
        .map(|p| {
            let to_net = index.nearest(p).map(|(d, _)| d).unwrap_or(f64::INFINITY);
            (w.window_radius() - geom::norm(p), to_net)
        })
        .collect();
    let (margin, net_constant) = margin_fixed_point(&mut samples);
    Ok(NetCertificate {
        separation,
        net_constant,
        layer_gap,
        probe_pitch: pitch,
        boundary_margin: margin,
        probe_radius,
    })
}

/// Minimum distance between distinct points of a flat coordinate array.
pub fn separation_of(dim: usize, coords: &[f64], index: &PointIndex<'_>) -> f64 {
    let n = coords.len() / dim;
    (0..n)
        .into_par_iter()
        .map(|i| {
            index
                .nearest_excluding(&coords[i * dim..(i + 1) * dim], Some(i))
                .map(|(d, _)| d)
                .unwrap_or(f64::INFINITY)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Smallest margin `t ≥ 0` such that every probe farther than `t` from the boundary
/// is within `t` of the net, returned with the max net distance over those probes.
fn margin_fixed_point(samples: &mut [(f64, f64)]) -> (f64, f64) {
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = samples.len();
    // suffix[i] = max net distance over samples[i..]
    let mut suffix = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1].max(samples[i].1);
    }
    // On [start, next_boundary) the probes still counted are those with boundary distance > t.
    let mut start = 0.0f64;
    let mut i = samples.partition_point(|s| s.0 <= start);
    loop {
        let worst = suffix[i];
        let end = if i < n { samples[i].0 } else { f64::INFINITY };
        let t = start.max(worst);
        if t < end {
            return (t, worst);
        }
        start = end;
        i = samples.partition_point(|s| s.0 <= start);
    }
}

/// Maximum gap between consecutive distinct norms, with `ℓ₀ = 0`.
pub fn layer_gap(sorted_norms: &[f64]) -> f64 {
    let mut prev = 0.0f64;
    let mut gap = 0.0f64;
    for &r in sorted_norms {
        if r - prev > MEMBERSHIP_TOL {
            gap = gap.max(r - prev);
            prev = r;
        }
    }
    gap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::integer_lattice_window;

    fn lattice(d: usize, r: f64, s: f64) -> NetWindow {
        integer_lattice_window(d, r, s, &vec![0.0; d]).unwrap()
    }

    #[test]
    fn integer_line() {
        let c = certify(&lattice(1, 10.0, 1.0)).unwrap();
        assert_eq!(c.separation, 1.0);
        assert_eq!(c.net_constant, 0.5);
        assert_eq!(c.layer_gap, 1.0);
        assert!(c.boundary_margin >= c.net_constant);
    }

    #[test]
    fn even_integers() {
        let c = certify(&lattice(1, 10.0, 2.0)).unwrap();
        assert_eq!(c.separation, 2.0);
        assert_eq!(c.layer_gap, 2.0);
        assert_eq!(c.net_constant, 1.0);
    }

    #[test]
    fn square_lattice() {
        // distinct norms 0, 1, √2, 2, √5, ... ; the largest consecutive gap is the first one
        let w = lattice(2, 10.0, 1.0);
        let mut norms: Vec<i64> = w.points().map(|p| (p[0] * p[0] + p[1] * p[1]) as i64).collect();
        norms.sort();
        norms.dedup();
        let expected = norms
            .windows(2)
            .map(|v| (v[1] as f64).sqrt() - (v[0] as f64).sqrt())
            .fold((norms[0] as f64).sqrt(), f64::max);
        let c = certify(&w).unwrap();
        assert_eq!(c.separation, 1.0);
        assert_eq!(c.layer_gap, expected);
        assert_eq!(c.layer_gap, 1.0);
        assert!((c.net_constant - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn separation_scales_with_the_window() {
        let w = lattice(2, 8.0, 1.0);
        for s in [0.5, 3.0, 7.25] {
            let a = certify(&w).unwrap().separation;
            let b = certify(&w.scaled(s).unwrap()).unwrap().separation;
            assert!((b - s * a).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_points() {
        let w = NetWindow::new(1, 1.0, "one", vec![vec![0.0]]).unwrap();
        assert!(matches!(certify(&w), Err(NetError::Degenerate(_))));
    }

    #[test]
    fn probe_budget_restricts_region() {
        let c = certify_with(&lattice(2, 20.0, 1.0), CertifyOptions { max_probes: 1000 }).unwrap();
        assert!(c.probe_radius < 20.0);
        assert!((c.net_constant - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
