//! Fixtures shared by the benchmarks.

use sepnet_core::net::{integer_lattice_window, NetWindow};

pub fn lattice(dim: usize, radius: f64) -> NetWindow {
    integer_lattice_window(dim, radius, 1.0, &vec![0.0; dim]).expect("valid lattice")
}

/// `ℤ²` points in `B̄(0, R)` and the same points shifted by a fixed irrational offset.
pub fn shifted_pair(radius: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let w = lattice(2, radius);
    let sources: Vec<Vec<f64>> = w.points().map(<[f64]>::to_vec).collect();
    let targets = sources
        .iter()
        .map(|p| vec![p[0] + 0.31, p[1] - 0.17])
        .collect();
    (sources, targets)
}

#[cfg(test)]
mod tests {
    #[test]
    fn shifted_pair_is_balanced() {
        let (s, t) = super::shifted_pair(5.0);
        assert_eq!(s.len(), t.len());
        assert_eq!(s.len(), 81);
    }
}
