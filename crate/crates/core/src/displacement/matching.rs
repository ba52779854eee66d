use std::collections::VecDeque;

use serde::Serialize;

use super::ExplicitMap;
use crate::error::{NetError, Result};
use crate::geom;
use crate::index::PointIndex;

/// An injection between two finite point sets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Matching {
    pub pairs: Vec<(Vec<f64>, Vec<f64>)>,
    pub bottleneck: f64,
    /// Every source is matched.
    pub complete: bool,
}

impl Matching {
    pub fn from_pairs(pairs: Vec<(Vec<f64>, Vec<f64>)>, complete: bool) -> Self {
        let bottleneck = pairs
            .iter()
            .map(|(x, y)| geom::dist(x, y))
            .fold(0.0, f64::max);
        Matching {
            pairs,
            bottleneck,
            complete,
        }
    }

    pub fn recomputed_bottleneck(&self) -> f64 {
        self.pairs
            .iter()
            .map(|(x, y)| geom::dist(x, y))
            .fold(0.0, f64::max)
    }

    pub fn to_map(&self, complete_radius: f64) -> Result<ExplicitMap> {
        let dim = self.pairs.first().map_or(1, |p| p.0.len());
        ExplicitMap::new(dim, self.pairs.clone(), complete_radius)
    }
}

/// Maximum-cardinality bipartite matching; `adj[u]` lists the right vertices of `u`.
/// Returns the right partner of each left vertex.
pub fn hopcroft_karp(adj: &[&[usize]], n_right: usize) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l = vec![FREE; n_left];
    let mut match_r = vec![FREE; n_right];
    let mut dist = vec![0u32; n_left];
    loop {
        // layered BFS from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        // iterative DFS along the layers
        let mut next = vec![0usize; n_left];
        for root in 0..n_left {
            if match_l[root] != FREE {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&u) = stack.last() {
                if next[u] == adj[u].len() {
                    dist[u] = u32::MAX;
                    stack.pop();
                    continue;
                }
                let v = adj[u][next[u]];
                next[u] += 1;
                let w = match_r[v];
                if w == FREE {
                    // augment along the stack
                    let mut v = v;
                    while let Some(u) = stack.pop() {
                        let prev = match_l[u];
                        match_l[u] = v;
                        match_r[v] = u;
                        v = prev;
                    }
                    break;
                } else if dist[w] == dist[u] + 1 {
                    stack.push(w);
                }
            }
        }
    }
    match_l
        .into_iter()
        .map(|v| (v != FREE).then_some(v))
        .collect()
}

struct Candidates {
    /// Per source: `(distance, target)` sorted by distance then target.
    lists: Vec<Vec<(f64, usize)>>,
}

impl Candidates {
    fn build(sources: &[Vec<f64>], targets: &[Vec<f64>], cap: f64) -> Self {
        let dim = sources.first().map_or(1, Vec::len);
        let flat: Vec<f64> = targets.iter().flatten().copied().collect();
        let index = PointIndex::new(dim, &flat, 0.0);
        let lists = sources
            .iter()
            .map(|s| {
                let mut l: Vec<(f64, usize)> = index
                    .within(s, cap)
                    .into_iter()
                    .map(|(_, j)| (geom::dist(s, &targets[j]), j))
                    .filter(|(d, _)| *d <= cap)
                    .collect();
                l.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                l
            })
            .collect();
        Candidates { lists }
    }

    fn adjacency(&self, threshold: f64) -> Vec<Vec<usize>> {
        self.lists
            .iter()
            .map(|l| {
                let k = l.partition_point(|e| e.0 <= threshold);
                l[..k].iter().map(|e| e.1).collect()
            })
            .collect()
    }

    fn solve(&self, threshold: f64, n_right: usize) -> Vec<Option<usize>> {
        let adj = self.adjacency(threshold);
        let refs: Vec<&[usize]> = adj.iter().map(Vec::as_slice).collect();
        hopcroft_karp(&refs, n_right)
    }
}

fn check_dims(sources: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<()> {
    let dim = sources.first().or(targets.first()).map_or(0, Vec::len);
    if sources.iter().chain(targets).any(|p| p.len() != dim) {
        return Err(NetError::InvalidParameter("mixed point dimensions".into()));
    }
    if sources.len() > targets.len() {
        return Err(NetError::InvalidParameter(format!(
            "{} sources cannot be injected into {} targets",
            sources.len(),
            targets.len()
        )));
    }
    Ok(())
}

/// Injection `sources → targets` minimizing the largest pair distance, using only
/// pairs at distance `≤ radius_cap`. The optimum is a realized distance.
pub fn bottleneck_bijection(
    sources: &[Vec<f64>],
    targets: &[Vec<f64>],
    radius_cap: f64,
) -> Result<Matching> {
    check_dims(sources, targets)?;
    if sources.is_empty() {
        return Ok(Matching::from_pairs(Vec::new(), true));
    }
    let cand = Candidates::build(sources, targets, radius_cap);
    let mut thresholds: Vec<f64> = cand.lists.iter().flatten().map(|e| e.0).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let full = cand.solve(radius_cap, targets.len());
    let achieved = full.iter().flatten().count();
    if achieved < sources.len() {
        return Err(NetError::InfeasibleUnderCap {
            cap: radius_cap,
            achieved,
            needed: sources.len(),
        });
    }
    // the largest per-source nearest distance is a lower bound on the optimum
    let floor = cand
        .lists
        .iter()
        .map(|l| l[0].0)
        .fold(0.0, f64::max);
    let mut lo = thresholds.partition_point(|&t| t < floor);
    let mut hi = thresholds.len() - 1;
    let mut best = full;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let m = cand.solve(thresholds[mid], targets.len());
        if m.iter().flatten().count() == sources.len() {
            hi = mid;
            best = m;
        } else {
            lo = mid + 1;
        }
    }
    // `best` always holds the matching found at `thresholds[hi]`
    let pairs = best
        .iter()
        .enumerate()
        .map(|(i, j)| (sources[i].clone(), targets[j.expect("complete matching")].clone()))
        .collect();
    Ok(Matching::from_pairs(pairs, true))
}

/// [`bottleneck_bijection`] that doubles the cap until a complete matching exists.
pub fn bottleneck_bijection_auto(
    sources: &[Vec<f64>],
    targets: &[Vec<f64>],
    initial_cap: f64,
) -> Result<Matching> {
    check_dims(sources, targets)?;
    let reach = |ps: &[Vec<f64>]| ps.iter().map(|p| geom::norm(p)).fold(0.0, f64::max);
    let diameter = reach(sources) + reach(targets);
    let mut cap = initial_cap.max(f64::MIN_POSITIVE);
    loop {
        match bottleneck_bijection(sources, targets, cap) {
            Err(NetError::InfeasibleUnderCap { .. }) if cap <= diameter => cap *= 2.0,
            other => return other,
        }
    }
}

/// Exact bottleneck by enumerating all injections; refuses more than 8 points per side.
pub fn brute_force_bottleneck(sources: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64> {
    check_dims(sources, targets)?;
    if targets.len() > 8 {
        return Err(NetError::TooLarge(targets.len()));
    }
    fn go(
        i: usize,
        used: &mut [bool],
        current: f64,
        best: &mut f64,
        s: &[Vec<f64>],
        t: &[Vec<f64>],
    ) {
        if i == s.len() {
            *best = best.min(current);
            return;
        }
        for j in 0..t.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, used, current.max(geom::dist(&s[i], &t[j])), best, s, t);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, &mut vec![false; targets.len()], 0.0, &mut best, sources, targets);
    Ok(if sources.is_empty() { 0.0 } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn pts(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn small_examples() {
        let m = bottleneck_bijection(&pts(&[0.0, 1.0]), &pts(&[0.4, 0.5]), 10.0).unwrap();
        assert_eq!(m.bottleneck, 0.5);
        assert_eq!(m.pairs[0].1, vec![0.4]);
        assert_eq!(brute_force_bottleneck(&pts(&[0.0, 1.0]), &pts(&[0.4, 0.5])).unwrap(), 0.5);
        let same = pts(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(bottleneck_bijection(&same, &same, 1.0).unwrap().bottleneck, 0.0);
        assert_eq!(brute_force_bottleneck(&same, &same).unwrap(), 0.0);
        assert_eq!(brute_force_bottleneck(&pts(&[1.0]), &pts(&[3.5])).unwrap(), 2.5);
        assert!(matches!(
            brute_force_bottleneck(&pts(&[0.0; 9]), &pts(&[0.0; 9])),
            Err(NetError::TooLarge(9))
        ));
    }

    #[test]
    fn infeasible_cap_reports_cardinality() {
        let err = bottleneck_bijection(&pts(&[0.0, 10.0]), &pts(&[0.5, 20.0]), 1.0).unwrap_err();
        assert_eq!(
            err,
            NetError::InfeasibleUnderCap {
                cap: 1.0,
                achieved: 1,
                needed: 2
            }
        );
        let m = bottleneck_bijection_auto(&pts(&[0.0, 10.0]), &pts(&[0.5, 20.0]), 1.0).unwrap();
        assert_eq!(m.bottleneck, 10.0);
    }

    #[test]
    fn hopcroft_karp_needs_augmenting_paths() {
        let adj: Vec<Vec<usize>> = vec![vec![0, 1], vec![0], vec![1, 2]];
        let refs: Vec<&[usize]> = adj.iter().map(Vec::as_slice).collect();
        let m = hopcroft_karp(&refs, 3);
        assert_eq!(m, vec![Some(1), Some(0), Some(2)]);
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let d = rng.gen_range(1..=2);
            let n = rng.gen_range(1..=6);
            let extra = rng.gen_range(0..=2);
            let mut draw = |k: usize| -> Vec<Vec<f64>> {
                (0..k)
                    .map(|_| (0..d).map(|_| rng.gen_range(0.0..10.0)).collect())
                    .collect()
            };
            let s = draw(n);
            let t = draw(n + extra);
            let fast = bottleneck_bijection_auto(&s, &t, 1.0).unwrap();
            assert_eq!(fast.bottleneck, brute_force_bottleneck(&s, &t).unwrap());
            assert_eq!(fast.bottleneck, fast.recomputed_bottleneck());
        }
    }
}
