use crate::displacement::ExplicitMap;
use crate::error::{NetError, Result};
use crate::growth::GrowthFunction;
use crate::net::{integer_lattice_window, NetWindow};

/// The pair of 1-dimensional nets with a linear-displacement bijection whose inverse
/// displaces by at least `n·ζ(ψ(n−1))` at radius `ψ(n−1)`.
#[derive(Clone, Debug)]
pub struct OneDimExample {
    /// `ψ(1), …, ψ(n_max)`.
    pub psi: Vec<f64>,
    pub x: NetWindow,
    pub y: NetWindow,
    pub f: ExplicitMap,
}

impl OneDimExample {
    /// `ψ(n)` for `n ≥ 1`.
    pub fn psi_at(&self, n: usize) -> f64 {
        self.psi[n - 1]
    }

    /// `f⁻¹`, complete on `B̄(0, ψ(n_max)/2)`.
    pub fn inverse(&self) -> ExplicitMap {
        self.f.inverse(self.x.window_radius() / 2.0)
    }
}

/// Smallest element of `1/2 + ℤ` that is `≥ t`.
fn half_odd_ceil(t: f64) -> f64 {
    (t - 0.5).ceil() + 0.5
}

/// `X = 2ℤ ∪ {ψ(n) : n ≥ 2}`, `Y = ℤ ∪ {ψ(n) : n ≥ 1}` and `f`, which halves `2ℤ` and
/// sends `ψ(n)` to `ψ(n−1)`, all windowed at `ψ(n_max)`.
pub fn onedim_counterexample(zeta: &GrowthFunction, n_max: usize) -> Result<OneDimExample> {
    if n_max < 2 {
        return Err(NetError::InvalidParameter("n_max must be at least 2".into()));
    }
    let mut psi = vec![0.5];
    for n in 2..=n_max {
        let prev = psi[n - 2];
        let next = half_odd_ceil(prev + n as f64 * zeta.evaluate(prev)?);
        if !next.is_finite() || next > 2f64.powi(52) {
            return Err(NetError::InvalidParameter(format!("ψ({n}) overflows exact range")));
        }
        psi.push(next);
    }
    let w = psi[n_max - 1];
    let evens = integer_lattice_window(1, w, 2.0, &[0.0])?;
    let ints = integer_lattice_window(1, w, 1.0, &[0.0])?;
    let mut xs: Vec<f64> = evens.coords().to_vec();
    xs.extend_from_slice(&psi[1..]);
    let mut ys: Vec<f64> = ints.coords().to_vec();
    ys.extend_from_slice(&psi);
    let x = NetWindow::from_flat(1, w, "2Z+psi", xs)?;
    let y = NetWindow::from_flat(1, w, "Z+psi", ys)?;
    let mut sources = Vec::with_capacity(x.len());
    let mut targets = Vec::with_capacity(x.len());
    for &e in evens.coords() {
        sources.push(e);
        targets.push(e / 2.0);
    }
    for n in 2..=n_max {
        sources.push(psi[n - 1]);
        targets.push(psi[n - 2]);
    }
    let f = ExplicitMap::from_flat(1, sources, targets, w)?;
    Ok(OneDimExample { psi, x, y, f })
}

/// `c^{-1/d}ℤ^d ∩ {x₁ ≥ 0} ∪ (2−c)^{-1/d}ℤ^d ∩ {x₁ < 0}` inside `B̄(0, R_max)`.
pub fn halfspace_net(c: f64, dim: usize, r_max: f64) -> Result<NetWindow> {
    if !(c > 1.0 && c < 2.0) {
        return Err(NetError::InvalidParameter(format!("c must lie in (1,2), got {c}")));
    }
    let zero = vec![0.0; dim];
    let dense = integer_lattice_window(dim, r_max, c.powf(-1.0 / dim as f64), &zero)?;
    let sparse = integer_lattice_window(dim, r_max, (2.0 - c).powf(-1.0 / dim as f64), &zero)?;
    let mut coords: Vec<f64> = dense.points().filter(|p| p[0] >= 0.0).flatten().copied().collect();
    coords.extend(sparse.points().filter(|p| p[0] < 0.0).flatten());
    NetWindow::from_flat(dim, r_max, format!("halfspace(c={c})"), coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::displacement::displacement_curve;

    #[test]
    fn psi_recurrence_for_identity() {
        let ex = onedim_counterexample(&GrowthFunction::identity(), 8).unwrap();
        assert_eq!(
            ex.psi,
            vec![0.5, 1.5, 6.5, 32.5, 195.5, 1368.5, 10948.5, 98536.5]
        );
        for n in 2..=8 {
            assert!(ex.psi_at(n) - ex.psi_at(n - 1) >= n as f64 * ex.psi_at(n - 1));
        }
        assert_eq!(ex.x.len(), ex.f.len());
    }

    #[test]
    fn inverse_blows_up() {
        let ex = onedim_counterexample(&GrowthFunction::identity(), 5).unwrap();
        let inv = ex.inverse();
        for n in 2..=5 {
            let r = ex.psi_at(n - 1);
            let c = displacement_curve(&inv, &[r]).unwrap();
            assert!(c.samples[0].1 >= ex.psi_at(n) - ex.psi_at(n - 1));
        }
    }

    #[test]
    fn halfspace_densities() {
        assert!(halfspace_net(1.0, 2, 10.0).is_err());
        assert!(halfspace_net(2.0, 2, 10.0).is_err());
        let w = halfspace_net(1.5, 2, 120.0).unwrap();
        let count = |lo: f64| {
            w.points()
                .filter(|p| p[0] >= lo && p[0] < lo + 40.0 && p[1] >= -20.0 && p[1] < 20.0)
                .count() as f64
                / 1600.0
        };
        assert!((count(20.0) - 1.5).abs() < 0.05);
        assert!((count(-60.0) - 0.5).abs() < 0.05);
    }
}
