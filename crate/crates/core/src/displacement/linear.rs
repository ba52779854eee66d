use super::{displacement_curve, realized_radii, DisplacementCurve, ExplicitMap, Matching};
use crate::error::{NetError, Result};
use crate::geom::{self, MEMBERSHIP_TOL};
use crate::index::PointIndex;
use crate::net::{certify, NetCertificate, NetWindow};

/// A bijection between the nets of two windows on the largest ball where it is
/// complete in both directions, with linear displacement.
#[derive(Clone, Debug)]
pub struct LinearBijection {
    pub matching: Matching,
    pub map: ExplicitMap,
    /// Scale of the snapping `X → rY` and of `Y → r'X`.
    pub r_forward: f64,
    pub r_backward: f64,
    /// Every point of either net inside this radius is matched.
    pub complete_radius: f64,
    /// `max disp_R / R` over sampled `R ≥ 1`, both directions.
    pub constant: f64,
    pub forward: DisplacementCurve,
    pub backward: DisplacementCurve,
}

/// Injection `a → b` snapping `a`-points to the nearest point of `r·b`; entries are
/// `None` where the snap target would lie outside `b`'s window.
fn snap(a: &NetWindow, b: &NetWindow, r: f64, reach: f64) -> Vec<Option<usize>> {
    let dim = a.dim();
    let scaled: Vec<f64> = b.coords().iter().map(|c| c * r).collect();
    let index = PointIndex::new(dim, &scaled, 0.0);
    a.points()
        .map(|p| match index.nearest(p) {
            Some((d, j)) if d <= reach + MEMBERSHIP_TOL => Some(j),
            _ => None,
        })
        .collect()
}

fn injective(m: &[Option<usize>]) -> bool {
    let mut seen = std::collections::HashSet::new();
    m.iter().flatten().all(|j| seen.insert(*j))
}

/// `r = 1` when that snapping is injective on the window, else `r = s/(4b)`, for
/// which `2·r·b < s` forces injectivity.
fn choose_snap(
    a: &NetWindow,
    b: &NetWindow,
    ca: &NetCertificate,
    cb: &NetCertificate,
) -> (f64, Vec<Option<usize>>) {
    let unit = snap(a, b, 1.0, cb.net_constant);
    if injective(&unit) {
        return (1.0, unit);
    }
    let r = ca.separation / (4.0 * cb.net_constant);
    (r, snap(a, b, r, r * cb.net_constant))
}

pub fn linear_displacement_bijection(x: &NetWindow, y: &NetWindow) -> Result<LinearBijection> {
    let cx = certify(x)?;
    let cy = certify(y)?;
    linear_displacement_bijection_with(x, y, &cx, &cy)
}

pub fn linear_displacement_bijection_with(
    x: &NetWindow,
    y: &NetWindow,
    cx: &NetCertificate,
    cy: &NetCertificate,
) -> Result<LinearBijection> {
    if x.dim() != y.dim() {
        return Err(NetError::InvalidParameter("dimension mismatch".into()));
    }
    if !(cx.net_constant > 0.0 && cy.net_constant > 0.0) {
        return Err(NetError::Degenerate("net constants must be positive".into()));
    }
    let (r_f, fx) = choose_snap(x, y, cx, cy);
    let (r_b, gy) = choose_snap(y, x, cy, cx);

    // vertices 0..nx are X, nx.. are Y; every vertex has degree ≤ 2
    let nx = x.len();
    let n = nx + y.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(2); n];
    let link = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
        if !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    };
    for (i, j) in fx.iter().enumerate() {
        if let Some(j) = j {
            link(i, nx + j, &mut adj);
        }
    }
    for (j, i) in gy.iter().enumerate() {
        if let Some(i) = i {
            link(*i, nx + j, &mut adj);
        }
    }
    let point = |v: usize| if v < nx { x.point(v) } else { y.point(v - nx) };
    let mut partner = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] || (adj[start].len() == 2) {
            continue;
        }
        let path = walk(start, &adj, &mut seen);
        match_path(&path, &mut partner, &point);
    }
    // what remains are cycles
    for start in 0..n {
        if !seen[start] {
            let cycle = walk(start, &adj, &mut seen);
            let skip = usize::from(start >= nx);
            for k in (skip..cycle.len()).step_by(2) {
                let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                partner[a] = b;
                partner[b] = a;
            }
        }
    }
    let unmatched_norm = (0..n)
        .filter(|&v| partner[v] == usize::MAX)
        .map(|v| geom::norm(point(v)))
        .fold(f64::INFINITY, f64::min);
    let complete_radius = (unmatched_norm - 1e-6)
        .min(x.window_radius())
        .min(y.window_radius());
    let mut pairs = Vec::new();
    for i in 0..nx {
        if partner[i] != usize::MAX {
            pairs.push((x.point(i).to_vec(), y.point(partner[i] - nx).to_vec()));
        }
    }
    let complete = pairs.len() == nx;
    let matching = Matching::from_pairs(pairs, complete);
    let map = matching.to_map(complete_radius)?;
    let inverse = map.inverse(complete_radius);
    let forward = displacement_curve(&map, &realized_radii(&map))?;
    let backward = displacement_curve(&inverse, &realized_radii(&inverse))?;
    let constant = forward
        .samples
        .iter()
        .chain(&backward.samples)
        .filter(|s| s.0 >= 1.0)
        .map(|s| s.1 / s.0)
        .fold(0.0, f64::max);
    Ok(LinearBijection {
        matching,
        map,
        r_forward: r_f,
        r_backward: r_b,
        complete_radius,
        constant,
        forward,
        backward,
    })
}

/// Walks a path from an endpoint (or a cycle from any vertex), marking vertices seen.
fn walk(start: usize, adj: &[Vec<usize>], seen: &mut [bool]) -> Vec<usize> {
    let mut out = vec![start];
    seen[start] = true;
    let mut cur = start;
    while let Some(&next) = adj[cur].iter().find(|&&v| !seen[v]) {
        seen[next] = true;
        out.push(next);
        cur = next;
    }
    out
}

/// Perfect matching along an even path; on an odd path the even-position vertex of
/// largest norm stays unmatched.
fn match_path<'a>(path: &[usize], partner: &mut [usize], point: &impl Fn(usize) -> &'a [f64]) {
    let skip = if path.len() % 2 == 1 {
        (0..path.len())
            .step_by(2)
            .max_by(|&a, &b| {
                geom::norm(point(path[a]))
                    .total_cmp(&geom::norm(point(path[b])))
                    .then(b.cmp(&a))
            })
    } else {
        None
    };
    let mut k = 0;
    while k + 1 < path.len() {
        if Some(k) == skip {
            k += 1;
            continue;
        }
        partner[path[k]] = path[k + 1];
        partner[path[k + 1]] = path[k];
        k += 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::integer_lattice_window;

    #[test]
    fn identical_lattices_give_identity() {
        let z = integer_lattice_window(2, 15.0, 1.0, &[0.0, 0.0]).unwrap();
        let b = linear_displacement_bijection(&z, &z).unwrap();
        assert_eq!(b.forward.sup(), 0.0);
        assert!(b.complete_radius >= 14.0);
    }

    #[test]
    fn even_integers_to_integers() {
        let x = integer_lattice_window(1, 400.0, 2.0, &[0.0]).unwrap();
        let y = integer_lattice_window(1, 400.0, 1.0, &[0.0]).unwrap();
        let b = linear_displacement_bijection(&x, &y).unwrap();
        assert!(2.0 * b.r_forward * 0.5 < 2.0);
        assert!(b.complete_radius > 50.0, "{}", b.complete_radius);
        assert!(b.forward.samples.iter().all(|(r, v)| *v <= 1.1 * r));
        let inv = b.map.inverse(b.complete_radius);
        // every matched pair is an edge of one of the two snapping maps
        assert_eq!(inv.len(), b.map.len());
    }
}
