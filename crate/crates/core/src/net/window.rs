use serde::{Deserialize, Serialize};

use crate::error::{NetError, Result};
use crate::geom::{self, MEMBERSHIP_TOL};

/// A finite snapshot of a separated net: every net point inside `B̄(0, window_radius)`,
/// stored in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetWindowFile", into = "NetWindowFile")]
pub struct NetWindow {
    dim: usize,
    window_radius: f64,
    label: String,
    coords: Vec<f64>,
    sorted_norms: Vec<f64>,
}

/// On-disk layout of a [`NetWindow`].
#[derive(Serialize, Deserialize)]
struct NetWindowFile {
    dim: usize,
    window_radius: f64,
    label: String,
    points: Vec<Vec<f64>>,
}

impl TryFrom<NetWindowFile> for NetWindow {
    type Error = NetError;

    fn try_from(f: NetWindowFile) -> Result<Self> {
        NetWindow::new(f.dim, f.window_radius, f.label, f.points)
    }
}

impl From<NetWindow> for NetWindowFile {
    fn from(w: NetWindow) -> Self {
        NetWindowFile {
            dim: w.dim,
            window_radius: w.window_radius,
            points: w.points().map(<[f64]>::to_vec).collect(),
            label: w.label,
        }
    }
}

impl NetWindow {
    pub fn new(
        dim: usize,
        window_radius: f64,
        label: impl Into<String>,
        points: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(NetError::InvalidParameter(format!(
                    "point of dimension {} in a {dim}-dimensional window",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, window_radius, label, coords)
    }

    /// Builds a window from row-major coordinates (`dim` values per point).
    pub fn from_flat(
        dim: usize,
        window_radius: f64,
        label: impl Into<String>,
        coords: Vec<f64>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(NetError::InvalidParameter("dimension must be positive".into()));
        }
        if !(window_radius > 0.0) || !window_radius.is_finite() {
            return Err(NetError::InvalidParameter(format!(
                "window radius must be positive and finite, got {window_radius}"
            )));
        }
        if coords.len() % dim != 0 {
            return Err(NetError::InvalidParameter(
                "coordinate count is not a multiple of the dimension".into(),
            ));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(NetError::InvalidParameter("non-finite coordinate".into()));
        }
        let n = coords.len() / dim;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            geom::lex_cmp(&coords[a * dim..(a + 1) * dim], &coords[b * dim..(b + 1) * dim])
        });
        let mut sorted = Vec::with_capacity(coords.len());
        for &i in &order {
            sorted.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
        }
        let mut norms = Vec::with_capacity(n);
        for (i, p) in sorted.chunks_exact(dim).enumerate() {
            let r = geom::norm(p);
            if r > window_radius + MEMBERSHIP_TOL {
                return Err(NetError::InvalidParameter(format!(
                    "point of norm {r} lies outside the window of radius {window_radius}"
                )));
            }
            if i > 0 && sorted[(i - 1) * dim..i * dim] == *p {
                return Err(NetError::InvalidParameter(format!("duplicate point {p:?}")));
            }
            norms.push(r);
        }
        norms.sort_by(f64::total_cmp);
        Ok(NetWindow {
            dim,
            window_radius,
            label: label.into(),
            coords: sorted,
            sorted_norms: norms,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sorted_norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_norms.is_empty()
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Norms of all points in increasing order.
    pub fn sorted_norms(&self) -> &[f64] {
        &self.sorted_norms
    }

    /// `|points ∩ B̄(0, R)|`, exact up to the membership tolerance.
    pub fn ball_count(&self, radius: f64) -> Result<usize> {
        if radius > self.window_radius + MEMBERSHIP_TOL {
            return Err(NetError::IncompleteWindow {
                requested: radius,
                available: self.window_radius,
            });
        }
        Ok(self.count_within(radius))
    }

    /// Same as [`ball_count`](Self::ball_count) without the completeness check.
    pub(crate) fn count_within(&self, radius: f64) -> usize {
        let cut = radius + MEMBERSHIP_TOL;
        self.sorted_norms.partition_point(|&r| r <= cut)
    }

    /// The points of `B̄(0, R)`, as a new window of radius `R`.
    pub fn restrict(&self, radius: f64) -> Result<NetWindow> {
        if radius > self.window_radius + MEMBERSHIP_TOL {
            return Err(NetError::IncompleteWindow {
                requested: radius,
                available: self.window_radius,
            });
        }
        let cut = radius + MEMBERSHIP_TOL;
        let coords: Vec<f64> = self
            .points()
            .filter(|p| geom::norm(p) <= cut)
            .flatten()
            .copied()
            .collect();
        NetWindow::from_flat(self.dim, radius, self.label.clone(), coords)
    }

    /// Points of `B̄(0, R)` as owned vectors, in canonical order.
    pub fn points_within(&self, radius: f64) -> Vec<Vec<f64>> {
        let cut = radius + MEMBERSHIP_TOL;
        self.points()
            .filter(|p| geom::norm(p) <= cut)
            .map(<[f64]>::to_vec)
            .collect()
    }

    /// `factor · W`, with the window radius scaled accordingly.
    pub fn scaled(&self, factor: f64) -> Result<NetWindow> {
        if !(factor > 0.0) {
            return Err(NetError::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        NetWindow::from_flat(
            self.dim,
            self.window_radius * factor,
            format!("{}*{factor}", self.label),
            self.coords.iter().map(|c| c * factor).collect(),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// `{scale·z + offset : z ∈ ℤ^d} ∩ B̄(0, R_max)` in canonical order.
pub fn integer_lattice_window(
    dim: usize,
    window_radius: f64,
    scale: f64,
    offset: &[f64],
) -> Result<NetWindow> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(NetError::InvalidParameter(format!(
            "lattice scale must be positive, got {scale}"
        )));
    }
    if !(window_radius > 0.0) {
        return Err(NetError::InvalidParameter(format!(
            "window radius must be positive, got {window_radius}"
        )));
    }
    if offset.len() != dim {
        return Err(NetError::InvalidParameter("offset dimension mismatch".into()));
    }
    let reach = offset.iter().fold(0.0f64, |m, o| m.max(o.abs()));
    let bound = ((window_radius + reach) / scale).ceil() as i64 + 1;
    let cut = window_radius + MEMBERSHIP_TOL;
    let mut coords = Vec::new();
    let mut p = vec![0.0; dim];
    crate::geom::for_each_in_box(dim, bound, |z| {
        for ((pi, zi), oi) in p.iter_mut().zip(z).zip(offset) {
            *pi = scale * *zi as f64 + oi;
        }
        if geom::norm(&p) <= cut {
            coords.extend_from_slice(&p);
        }
    });
    let label = if offset.iter().all(|o| *o == 0.0) {
        format!("{scale}*Z^{dim}")
    } else {
        format!("{scale}*Z^{dim}+{offset:?}")
    };
    NetWindow::from_flat(dim, window_radius, label, coords)
}
