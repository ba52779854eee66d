//! Small Euclidean helpers shared by every module.

use std::cmp::Ordering;

/// Absolute tolerance used for ball membership: a point `p` is in `B̄(0, R)`
/// when `‖p‖ ≤ R + MEMBERSHIP_TOL`.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

pub fn norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lexicographic order on coordinate vectors, total on finite floats.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Lebesgue measure of the closed unit ball in `ℝ^d`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        d => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

pub fn ball_volume(dim: usize, radius: f64) -> f64 {
    unit_ball_volume(dim) * radius.powi(dim as i32)
}

/// Calls `f` with every integer vector in `[-bound, bound]^dim`, in lexicographic order.
pub fn for_each_in_box(dim: usize, bound: i64, mut f: impl FnMut(&[i64])) {
    if dim == 0 {
        return;
    }
    let mut z = vec![-bound; dim];
    loop {
        f(&z);
        let mut axis = dim;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if z[axis] < bound {
                z[axis] += 1;
                for later in z.iter_mut().skip(axis + 1) {
                    *later = -bound;
                }
                break;
            }
        }
    }
}

/// Axis-aligned box `[lo, hi)` (half-open per coordinate).
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        AxisBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a).max(0.0))
            .product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (a, b))| *x >= *a && *x < *b)
    }

    /// Largest corner norm; the box lies in `B̄(0, max_corner_norm)`.
    pub fn max_corner_norm(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| a.abs().max(b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Measure of the intersection with another box.
    pub fn overlap_volume(&self, other: &AxisBox) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .map(|((a0, a1), (b0, b1))| (a1.min(*b1) - a0.max(*b0)).max(0.0))
            .product()
    }
}
