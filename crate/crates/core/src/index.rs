//! Uniform cell grid over a point set: nearest-neighbour and fixed-radius queries.

use std::collections::HashMap;

use crate::geom;

pub struct PointIndex<'a> {
    dim: usize,
    coords: &'a [f64],
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
    /// Chebyshev radius (in cells) of the occupied region around the origin cell.
    extent: i64,
}

impl<'a> PointIndex<'a> {
    /// Indexes `coords` (row-major, `dim` per point) with cells of side `cell`.
    /// A non-positive `cell` picks the mean point spacing of the bounding box.
    pub fn new(dim: usize, coords: &'a [f64], cell: f64) -> Self {
        let n = coords.len() / dim;
        let cell = if cell > 0.0 {
            cell
        } else {
            Self::mean_spacing(dim, coords)
        };
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::with_capacity(n);
        let mut extent = 0;
        for (i, p) in coords.chunks_exact(dim).enumerate() {
            let key = Self::key_of(p, cell);
            extent = key.iter().fold(extent, |m, k| m.max(k.abs()));
            cells.entry(key).or_default().push(i);
        }
        PointIndex {
            dim,
            coords,
            cell,
            cells,
            extent,
        }
    }

    fn mean_spacing(dim: usize, coords: &[f64]) -> f64 {
        let n = coords.len() / dim;
        if n < 2 {
            return 1.0;
        }
        let mut vol = 1.0;
        for axis in 0..dim {
            let (lo, hi) = coords
                .iter()
                .skip(axis)
                .step_by(dim)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            vol *= (hi - lo).max(1e-12);
        }
        let h = (vol / n as f64).powf(1.0 / dim as f64);
        if h.is_finite() && h > 0.0 {
            h
        } else {
            1.0
        }
    }

    fn key_of(p: &[f64], cell: f64) -> Vec<i64> {
        p.iter().map(|x| (x / cell).floor() as i64).collect()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Visits the points of every cell at Chebyshev distance exactly `ring` from `center`.
    fn visit_shell(&self, center: &[i64], ring: i64, f: &mut impl FnMut(usize)) {
        let last = self.dim - 1;
        let mut head = vec![-ring; last];
        let mut key = vec![0i64; self.dim];
        loop {
            let on_face = head.iter().any(|o| o.abs() == ring);
            for (k, (c, o)) in key.iter_mut().zip(center.iter().zip(&head)) {
                *k = c + o;
            }
            let mut visit = |o: i64| {
                key[last] = center[last] + o;
                if let Some(list) = self.cells.get(&key) {
                    list.iter().for_each(|&i| f(i));
                }
            };
            if on_face {
                (-ring..=ring).for_each(&mut visit);
            } else if ring == 0 {
                visit(0);
            } else {
                visit(-ring);
                visit(ring);
            }
            let mut axis = last;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                if head[axis] < ring {
                    head[axis] += 1;
                    for later in head.iter_mut().skip(axis + 1) {
                        *later = -ring;
                    }
                    break;
                }
            }
        }
    }

    /// Nearest indexed point to `q`, skipping index `exclude`; returns `(distance, index)`.
    pub fn nearest_excluding(&self, q: &[f64], exclude: Option<usize>) -> Option<(f64, usize)> {
        let center = Self::key_of(q, self.cell);
        let reach = center.iter().fold(0, |m: i64, c| m.max(c.abs())) + self.extent + 1;
        let mut best: Option<(f64, usize)> = None;
        for ring in 0..=reach {
            self.visit_shell(&center, ring, &mut |i| {
                if Some(i) == exclude {
                    return;
                }
                let d = geom::dist_sq(q, self.point(i));
                if best.map_or(true, |(b, j)| d < b || (d == b && i < j)) {
                    best = Some((d, i));
                }
            });
            if let Some((b, _)) = best {
                let cleared = ring as f64 * self.cell;
                if b <= cleared * cleared {
                    break;
                }
            }
        }
        best.map(|(d, i)| (d.sqrt(), i))
    }

    pub fn nearest(&self, q: &[f64]) -> Option<(f64, usize)> {
        self.nearest_excluding(q, None)
    }

    /// All indexed points within distance `radius` of `q` (inclusive), unordered.
    pub fn within(&self, q: &[f64], radius: f64) -> Vec<(f64, usize)> {
        let lo: Vec<i64> = q.iter().map(|x| ((x - radius) / self.cell).floor() as i64).collect();
        let hi: Vec<i64> = q.iter().map(|x| ((x + radius) / self.cell).floor() as i64).collect();
        let r2 = radius * radius;
        let mut out = Vec::new();
        let mut key = lo.clone();
        loop {
            if let Some(list) = self.cells.get(&key) {
                for &i in list {
                    let d = geom::dist_sq(q, self.point(i));
                    if d <= r2 {
                        out.push((d.sqrt(), i));
                    }
                }
            }
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                if key[axis] < hi[axis] {
                    key[axis] += 1;
                    for (k, l) in key.iter_mut().zip(&lo).skip(axis + 1) {
                        *k = *l;
                    }
                    break;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn nearest_matches_linear_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for dim in 1..=3 {
            let coords: Vec<f64> = (0..300 * dim).map(|_| rng.gen_range(-20.0..20.0)).collect();
            let idx = PointIndex::new(dim, &coords, 0.0);
            for _ in 0..200 {
                let q: Vec<f64> = (0..dim).map(|_| rng.gen_range(-30.0..30.0)).collect();
                let brute = coords
                    .chunks_exact(dim)
                    .map(|p| geom::dist(&q, p))
                    .fold(f64::INFINITY, f64::min);
                let (d, _) = idx.nearest(&q).unwrap();
                assert!((d - brute).abs() < 1e-12, "dim {dim}: {d} vs {brute}");
                let r = 4.0;
                let expect = coords
                    .chunks_exact(dim)
                    .filter(|p| geom::dist(&q, p) <= r)
                    .count();
                assert_eq!(idx.within(&q, r).len(), expect);
            }
        }
    }

    #[test]
    fn excluding_self_finds_neighbour() {
        let coords = vec![0.0, 0.0, 3.0, 0.0, 0.0, 5.0];
        let idx = PointIndex::new(2, &coords, 1.0);
        assert_eq!(idx.nearest_excluding(&[0.0, 0.0], Some(0)), Some((3.0, 1)));
    }
}
