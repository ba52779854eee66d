use std::collections::HashMap;

use crate::error::{NetError, Result};
use crate::geom;

/// A finite injective map given by its graph, sorted by source.
///
/// `complete_radius` records the ball `B̄(0, r)` inside which every point of the
/// source net has an image in `pairs`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitMap {
    dim: usize,
    sources: Vec<f64>,
    targets: Vec<f64>,
    complete_radius: f64,
}

fn key(p: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 must collide
    p.iter().map(|x| (x + 0.0).to_bits()).collect()
}

impl ExplicitMap {
    pub fn new(dim: usize, pairs: Vec<(Vec<f64>, Vec<f64>)>, complete_radius: f64) -> Result<Self> {
        let mut sources = Vec::with_capacity(pairs.len() * dim);
        let mut targets = Vec::with_capacity(pairs.len() * dim);
        for (x, y) in &pairs {
            if x.len() != dim || y.len() != dim {
                return Err(NetError::InvalidParameter("pair dimension mismatch".into()));
            }
            sources.extend_from_slice(x);
            targets.extend_from_slice(y);
        }
        Self::from_flat(dim, sources, targets, complete_radius)
    }

    pub fn from_flat(
        dim: usize,
        sources: Vec<f64>,
        targets: Vec<f64>,
        complete_radius: f64,
    ) -> Result<Self> {
        if dim == 0 || sources.len() != targets.len() || sources.len() % dim != 0 {
            return Err(NetError::InvalidParameter("malformed map".into()));
        }
        let n = sources.len() / dim;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            geom::lex_cmp(&sources[a * dim..(a + 1) * dim], &sources[b * dim..(b + 1) * dim])
        });
        let mut s = Vec::with_capacity(sources.len());
        let mut t = Vec::with_capacity(targets.len());
        for &i in &order {
            s.extend_from_slice(&sources[i * dim..(i + 1) * dim]);
            t.extend_from_slice(&targets[i * dim..(i + 1) * dim]);
        }
        let map = ExplicitMap {
            dim,
            sources: s,
            targets: t,
            complete_radius,
        };
        if map.sources().zip(map.sources().skip(1)).any(|(a, b)| a == b) {
            return Err(NetError::InvalidParameter("map has a repeated source".into()));
        }
        let mut seen = std::collections::HashSet::with_capacity(n);
        if !map.targets().all(|y| seen.insert(key(y))) {
            return Err(NetError::InvalidParameter("map is not injective".into()));
        }
        Ok(map)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sources.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn complete_radius(&self) -> f64 {
        self.complete_radius
    }

    pub fn sources(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.sources.chunks_exact(self.dim)
    }

    pub fn targets(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.targets.chunks_exact(self.dim)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&[f64], &[f64])> + '_ {
        self.sources().zip(self.targets())
    }

    /// Image of an exact source point.
    pub fn image(&self, x: &[f64]) -> Option<&[f64]> {
        let i = self
            .sources()
            .collect::<Vec<_>>()
            .binary_search_by(|s| geom::lex_cmp(s, x))
            .ok()?;
        Some(&self.targets[i * self.dim..(i + 1) * self.dim])
    }

    /// The inverse map; the caller states its completeness radius.
    pub fn inverse(&self, complete_radius: f64) -> ExplicitMap {
        ExplicitMap::from_flat(self.dim, self.targets.clone(), self.sources.clone(), complete_radius)
            .expect("inverse of an injective map is injective")
    }

    /// `g ∘ self` on the sources whose image lies in the domain of `g`.
    pub fn then(&self, g: &ExplicitMap, complete_radius: f64) -> Result<ExplicitMap> {
        if g.dim != self.dim {
            return Err(NetError::InvalidParameter("dimension mismatch".into()));
        }
        let lookup: HashMap<Vec<u64>, usize> =
            g.sources().enumerate().map(|(i, s)| (key(s), i)).collect();
        let mut sources = Vec::new();
        let mut targets = Vec::new();
        for (x, y) in self.pairs() {
            if let Some(&j) = lookup.get(&key(y)) {
                sources.extend_from_slice(x);
                targets.extend_from_slice(&g.targets[j * g.dim..(j + 1) * g.dim]);
            }
        }
        ExplicitMap::from_flat(self.dim, sources, targets, complete_radius)
    }

    /// `(‖x‖, ‖f(x) − x‖)` for every pair, measured from `center`.
    pub fn radial_displacements(&self, center: &[f64]) -> Vec<(f64, f64)> {
        self.pairs()
            .map(|(x, y)| (geom::dist(x, center), geom::dist(x, y)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_injective() {
        let pairs = vec![(vec![0.0], vec![1.0]), (vec![1.0], vec![1.0])];
        assert!(ExplicitMap::new(1, pairs, 1.0).is_err());
    }

    #[test]
    fn compose_and_invert() {
        let f = ExplicitMap::new(1, vec![(vec![0.0], vec![1.0]), (vec![2.0], vec![3.0])], 2.0).unwrap();
        let g = ExplicitMap::new(1, vec![(vec![1.0], vec![5.0]), (vec![3.0], vec![7.0])], 3.0).unwrap();
        let h = f.then(&g, 2.0).unwrap();
        assert_eq!(h.image(&[2.0]), Some(&[7.0][..]));
        let inv = h.inverse(7.0);
        assert_eq!(inv.image(&[5.0]), Some(&[0.0][..]));
    }
}
