use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DensityField;
use crate::displacement::ExplicitMap;
use crate::error::{NetError, Result};
use crate::geom::MEMBERSHIP_TOL;
use crate::growth::GrowthFunction;
use crate::index::PointIndex;
use crate::net::{separation_of, NetWindow};

/// Closed axis-parallel cube `corner + [0, side]^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub corner: Vec<f64>,
    pub side: f64,
}

impl Cube {
    pub fn new(corner: Vec<f64>, side: f64) -> Self {
        Cube { corner, side }
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.corner[axis] + self.side
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().enumerate().all(|(a, &x)| {
            x >= self.corner[a] - MEMBERSHIP_TOL && x <= self.hi(a) + MEMBERSHIP_TOL
        })
    }

    pub fn diameter(&self) -> f64 {
        self.side * (self.dim() as f64).sqrt()
    }

    pub fn distance(&self, other: &Cube) -> f64 {
        (0..self.dim())
            .map(|a| {
                let gap = (other.corner[a] - self.hi(a)).max(self.corner[a] - other.hi(a)).max(0.0);
                gap * gap
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Distance from this cube to the complement of `outer`.
    pub fn margin_in(&self, outer: &Cube) -> f64 {
        (0..self.dim())
            .map(|a| (self.corner[a] - outer.corner[a]).min(outer.hi(a) - self.hi(a)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_corner_norm(&self) -> f64 {
        (0..self.dim())
            .map(|a| {
                let m = self.corner[a].abs().max(self.hi(a).abs());
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `ℤ^d ∩ self` in lexicographic order.
    pub fn integer_points(&self) -> Vec<Vec<f64>> {
        let ranges: Vec<(i64, i64)> = (0..self.dim())
            .map(|a| {
                (
                    (self.corner[a] - MEMBERSHIP_TOL).ceil() as i64,
                    (self.hi(a) + MEMBERSHIP_TOL).floor() as i64,
                )
            })
            .collect();
        let mut out = Vec::new();
        let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        if ranges.iter().any(|r| r.0 > r.1) {
            return out;
        }
        loop {
            out.push(cur.iter().map(|&c| c as f64).collect());
            let mut a = self.dim();
            loop {
                if a == 0 {
                    return out;
                }
                a -= 1;
                if cur[a] < ranges[a].1 {
                    cur[a] += 1;
                    break;
                }
                cur[a] = ranges[a].0;
            }
        }
    }
}

fn for_each_multi_index(dim: usize, n: usize, mut f: impl FnMut(&[usize])) {
    if n == 0 {
        return;
    }
    let mut idx = vec![0usize; dim];
    loop {
        f(&idx);
        let mut a = dim;
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < n {
                break;
            }
            idx[a] = 0;
        }
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// How many points one subcube `T_{k,i}` received.
#[derive(Clone, Debug, PartialEq)]
pub struct CellAllocation {
    pub index: Vec<usize>,
    /// `l_k^d · ∫_{cell} ρ`, exact.
    pub target: BigRational,
    pub floor: u64,
    pub count: u64,
}

impl CellAllocation {
    /// `|count − target| ≤ 1`, decided in exact arithmetic.
    pub fn within_one(&self) -> bool {
        let diff = BigRational::from_integer(BigInt::from(self.count)) - &self.target;
        diff.abs() <= BigRational::from_integer(BigInt::from(1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Placement {
    pub points: Vec<Vec<f64>>,
    pub cells: Vec<CellAllocation>,
    /// `m_k = ⌊√l_k⌋`.
    pub subdivision: usize,
}

/// First `n` dyadic centres of `corner + [0, side]^d`: the centre, then the centres
/// of each successive dyadic partition, lexicographically within a level.
pub fn pot_fill(corner: &[f64], side: f64, n: u64) -> Vec<Vec<f64>> {
    let dim = corner.len();
    let mut out = Vec::with_capacity(n as usize);
    let mut level = 0u32;
    while (out.len() as u64) < n {
        let parts = 1usize << level;
        let step = side / parts as f64;
        for_each_multi_index(dim, parts, |a| {
            if (out.len() as u64) < n {
                out.push(
                    a.iter()
                        .zip(corner)
                        .map(|(&i, &c)| c + (i as f64 + 0.5) * step)
                        .collect(),
                );
            }
        });
        level += 1;
    }
    out
}

/// Places exactly `l_k^d` points in `s_k` following `ρ` on an `m_k`-grid of subcubes.
pub fn dyadic_placement(rho: &DensityField, l_k: u64, s_k: &Cube) -> Result<Placement> {
    let dim = rho.dim();
    if l_k == 0 {
        return Err(NetError::InvalidParameter("l_k must be positive".into()));
    }
    if s_k.dim() != dim || (s_k.side - l_k as f64).abs() > MEMBERSHIP_TOL {
        return Err(NetError::InvalidParameter(format!(
            "S_k must be a {dim}-cube of side {l_k}"
        )));
    }
    let m = isqrt(l_k) as usize;
    let total = l_k.pow(dim as u32);
    let scale = BigRational::from_integer(BigInt::from(total));
    let mut cells = Vec::with_capacity(m.pow(dim as u32));
    for_each_multi_index(dim, m, |idx| {
        let target = rho.exact_grid_cell_mass(m, idx) * &scale;
        let floor = target.floor().to_integer().to_u64().expect("cell target fits u64");
        cells.push(CellAllocation {
            index: idx.to_vec(),
            target,
            floor,
            count: floor,
        });
    });
    let floors: u64 = cells.iter().map(|c| c.floor).sum();
    assert!(floors <= total, "sum of floors exceeds l_k^d");
    let deficit = (total - floors) as usize;
    // largest remainders first, ties by cell order
    let mut order: Vec<usize> = (0..cells.len()).collect();
    let rem: Vec<BigRational> = cells
        .iter()
        .map(|c| &c.target - BigRational::from_integer(BigInt::from(c.floor)))
        .collect();
    order.sort_by(|&a, &b| rem[b].cmp(&rem[a]).then(a.cmp(&b)));
    assert!(deficit <= cells.len(), "apportionment deficit exceeds the cell count");
    for &i in order.iter().take(deficit) {
        cells[i].count += 1;
    }
    let t = s_k.side / m as f64;
    let mut points = Vec::with_capacity(total as usize);
    for c in &cells {
        let corner: Vec<f64> = c
            .index
            .iter()
            .zip(&s_k.corner)
            .map(|(&i, &o)| o + i as f64 * t)
            .collect();
        points.extend(pot_fill(&corner, t, c.count));
    }
    Ok(Placement {
        points,
        cells,
        subdivision: m,
    })
}

/// Geometry of the patched net: `U_k`, their translates `R_k`, the patches `S_k ⊆ R_k`
/// and the placed sets `Ξ_k ⊆ S_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeLayout {
    pub dim: usize,
    pub k_max: usize,
    pub l: Vec<u64>,
    /// `ψ(k)` for `k = 1..=k_max + 1`.
    pub psi: Vec<f64>,
    pub u: Vec<Cube>,
    pub r: Vec<Cube>,
    pub s: Vec<Cube>,
    pub xi: Vec<Vec<Vec<f64>>>,
    pub window_radius: f64,
}

/// Nearest point of `parity + ℤ` to `x`, ties toward −∞.
fn snap(x: f64, parity: f64) -> f64 {
    let shifted = x - parity;
    let lo = shifted.floor();
    let pick = if shifted - lo <= 0.5 { lo } else { lo + 1.0 };
    pick + parity
}

impl CubeLayout {
    /// Lays out `R_1, …, R_{k_max}` along the first axis with gaps `ψ(k)`.
    pub fn build(dim: usize, l: &[u64], psi: &GrowthFunction, k_max: usize) -> Result<Self> {
        if dim == 0 || k_max == 0 || l.len() < k_max {
            return Err(NetError::InvalidParameter(format!(
                "need k_max ≥ 1 side lengths, got {} for k_max = {k_max}",
                l.len()
            )));
        }
        let l = l[..k_max].to_vec();
        if l[0] == 0 || l.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NetError::InvalidParameter(
                "side lengths must be strictly increasing positive integers".into(),
            ));
        }
        let psi_v = (1..=k_max + 1)
            .map(|k| psi.evaluate(k as f64))
            .collect::<Result<Vec<f64>>>()?;
        if psi_v.windows(2).any(|w| w[1] < w[0]) {
            return Err(NetError::InvalidParameter("ψ must be increasing".into()));
        }
        let mut u = Vec::with_capacity(k_max);
        let mut r: Vec<Cube> = Vec::with_capacity(k_max);
        let mut s = Vec::with_capacity(k_max);
        for (k, &lk) in l.iter().enumerate() {
            let big = (lk * lk) as f64;
            let side = lk as f64;
            // S_k has half-odd vertices iff its centre lies in `parity + ℤ`
            let parity = if lk % 2 == 0 { 0.5 } else { 0.0 };
            let perp_center = snap(0.0, parity);
            let x_lo = match r.last() {
                None => snap(0.0, parity) - big / 2.0,
                Some(prev) => prev.hi(0) + psi_v[k],
            };
            let mut r_corner = vec![perp_center - big / 2.0; dim];
            r_corner[0] = x_lo;
            let rk = Cube::new(r_corner, big);
            let s_corner: Vec<f64> = rk
                .corner
                .iter()
                .map(|&c| snap(c + big / 2.0, parity) - side / 2.0)
                .collect();
            let sk = Cube::new(s_corner, side);
            if sk.margin_in(&rk) < big / 4.0 - MEMBERSHIP_TOL {
                return Err(NetError::InvalidParameter(format!(
                    "l_{} = {lk} leaves a margin below l_k²/4 around S_k",
                    k + 1
                )));
            }
            u.push(Cube::new(vec![0.0; dim], big));
            r.push(rk);
            s.push(sk);
        }
        let window_radius = r.iter().map(Cube::max_corner_norm).fold(0.0, f64::max);
        let next_start = r[k_max - 1].hi(0) + psi_v[k_max];
        if window_radius >= next_start {
            return Err(NetError::IncompleteWindow {
                requested: window_radius,
                available: next_start,
            });
        }
        Ok(CubeLayout {
            dim,
            k_max,
            l,
            psi: psi_v,
            u,
            r,
            s,
            xi: Vec::new(),
            window_radius,
        })
    }

    /// Patch index containing `p`, if any.
    pub fn patch_of(&self, p: &[f64]) -> Option<usize> {
        self.s.iter().position(|s| s.contains(p))
    }

    /// `√d · l_n` with `n = max(1, max{n ≤ k_max : ψ(n) ≤ R})`.
    pub fn diameter_bound(&self, radius: f64) -> f64 {
        let n = self.psi[..self.k_max]
            .iter()
            .rposition(|&p| p <= radius)
            .unwrap_or(0);
        self.s[n].diameter()
    }

    /// Every violated layout invariant, as a message.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let tol = 1e-9;
        if !self.r[0].contains(&vec![0.0; self.dim]) {
            out.push("0 ∉ R_1".into());
        }
        for k in 0..self.k_max {
            let lk = self.l[k];
            if k > 0 {
                let d_prev = self.r[k].distance(&self.r[k - 1]);
                if (d_prev - self.psi[k]).abs() > tol {
                    out.push(format!("dist(R_{}, R_{}) = {d_prev} ≠ ψ = {}", k + 1, k, self.psi[k]));
                }
                let d_all = (0..self.k_max)
                    .filter(|&j| j != k)
                    .map(|j| self.r[k].distance(&self.r[j]))
                    .fold(f64::INFINITY, f64::min);
                if (d_all - d_prev).abs() > tol {
                    out.push(format!("R_{} is closer to a non-neighbour", k + 1));
                }
            }
            let margin = self.s[k].margin_in(&self.r[k]);
            if margin < (lk * lk) as f64 / 4.0 - tol {
                out.push(format!("margin of S_{} is {margin}", k + 1));
            }
            let half_odd = |c: f64| (c - c.floor() - 0.5).abs() < tol;
            if !self.s[k].corner.iter().all(|&c| half_odd(c) && half_odd(c + lk as f64)) {
                out.push(format!("S_{} has vertices off (1/2)ℤ^d ∖ ℤ^d", k + 1));
            }
            if let Some(xi) = self.xi.get(k) {
                if xi.len() as u64 != lk.pow(self.dim as u32) {
                    out.push(format!("|Ξ_{}| = {} ≠ l_k^d", k + 1, xi.len()));
                }
                if !xi.iter().all(|p| self.s[k].contains(p)) {
                    out.push(format!("Ξ_{} leaves S_{}", k + 1, k + 1));
                }
            } else {
                out.push(format!("Ξ_{} missing", k + 1));
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `X(ρ, l, ψ) = ∪ Ξ_k ∪ (ℤ^d ∖ ∪ S_k)` inside the window enclosing `R_1, …, R_{k_max}`.
pub fn patched_net(
    rho: &DensityField,
    l: &[u64],
    psi: &GrowthFunction,
    k_max: usize,
) -> Result<(NetWindow, CubeLayout)> {
    let dim = rho.dim();
    let mut layout = CubeLayout::build(dim, l, psi, k_max)?;
    layout.xi = layout
        .s
        .par_iter()
        .zip(&layout.l)
        .map(|(s, &lk)| dyadic_placement(rho, lk, s).map(|p| p.points))
        .collect::<Result<Vec<_>>>()?;
    let base = crate::net::integer_lattice_window(dim, layout.window_radius, 1.0, &vec![0.0; dim])?;
    // integer points never sit on ∂S_k, so membership is unambiguous
    let mut coords: Vec<f64> = base
        .points()
        .filter(|p| layout.patch_of(p).is_none())
        .flatten()
        .copied()
        .collect();
    for xi in &layout.xi {
        for p in xi {
            coords.extend_from_slice(p);
        }
    }
    let net = NetWindow::from_flat(dim, layout.window_radius, "patched", coords)?;
    Ok((net, layout))
}

/// `(|X ∩ S_k|, |ℤ^d ∩ S_k|)` per patch.
pub fn patch_counts(x: &NetWindow, layout: &CubeLayout) -> Vec<(usize, usize)> {
    layout
        .s
        .iter()
        .map(|s| (x.points().filter(|p| s.contains(p)).count(), s.integer_points().len()))
        .collect()
}

/// `h: X_ψ → ℤ^d`, the identity off the patches and the lexicographic pairing inside.
pub fn patch_bijection(x: &NetWindow, layout: &CubeLayout) -> Result<ExplicitMap> {
    let dim = x.dim();
    let mut inside: Vec<Vec<&[f64]>> = vec![Vec::new(); layout.k_max];
    let mut sources = Vec::with_capacity(x.coords().len());
    let mut targets = Vec::with_capacity(x.coords().len());
    for p in x.points() {
        match layout.patch_of(p) {
            Some(k) => inside[k].push(p),
            None => {
                if p.iter().any(|c| c.fract() != 0.0) {
                    return Err(NetError::Precondition(format!(
                        "off-patch point {p:?} is not an integer point"
                    )));
                }
                sources.extend_from_slice(p);
                targets.extend_from_slice(p);
            }
        }
    }
    for (k, xs) in inside.iter().enumerate() {
        let zs = layout.s[k].integer_points();
        if xs.len() != zs.len() {
            return Err(NetError::Precondition(format!(
                "patch {} holds {} net points but {} integer points",
                k + 1,
                xs.len(),
                zs.len()
            )));
        }
        // net windows are already lexicographic, and so is integer_points
        for (a, b) in xs.iter().zip(&zs) {
            sources.extend_from_slice(a);
            targets.extend_from_slice(b);
        }
    }
    ExplicitMap::from_flat(dim, sources, targets, x.window_radius())
}

/// Separation of a finite point set (∞ for fewer than two points).
pub fn point_set_separation(dim: usize, points: &[Vec<f64>]) -> f64 {
    let coords: Vec<f64> = points.iter().flatten().copied().collect();
    if points.len() < 2 {
        return f64::INFINITY;
    }
    let index = PointIndex::new(dim, &coords, 0.0);
    separation_of(dim, &coords, &index)
}

/// `max_{q ∈ cube} dist(q, points)`, sampled on a grid of the given pitch.
pub fn cube_covering_radius(points: &[Vec<f64>], cube: &Cube, pitch: f64) -> Result<f64> {
    let dim = cube.dim();
    if points.is_empty() {
        return Err(NetError::Degenerate("no points to cover with".into()));
    }
    if !(pitch > 0.0) {
        return Err(NetError::InvalidParameter("pitch must be positive".into()));
    }
    let coords: Vec<f64> = points.iter().flatten().copied().collect();
    let index = PointIndex::new(dim, &coords, 0.0);
    let steps = (cube.side / pitch).ceil() as usize;
    let h = cube.side / steps as f64;
    let mut worst = 0.0f64;
    let mut q = vec![0.0; dim];
    for_each_multi_index(dim, steps + 1, |idx| {
        for a in 0..dim {
            q[a] = cube.corner[a] + idx[a] as f64 * h;
        }
        if let Some((d, _)) = index.nearest(&q) {
            worst = worst.max(d);
        }
    });
    Ok(worst)
}
