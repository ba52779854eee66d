use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{NetError, Result};
use crate::geom::AxisBox;

/// Piecewise-constant density on `[0,1]^d` over an `m × … × m` grid,
/// normalized so that its integral is 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    dim: usize,
    side: usize,
    /// Raw positive weights in row-major (lexicographic cell index) order.
    weights: Vec<f64>,
    /// `weights / mean(weights)`.
    values: Vec<f64>,
}

impl DensityField {
    pub fn new(dim: usize, side: usize, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || side == 0 {
            return Err(NetError::InvalidParameter("empty density grid".into()));
        }
        let cells = side.pow(dim as u32);
        if weights.len() != cells {
            return Err(NetError::InvalidParameter(format!(
                "density grid needs {cells} values, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(NetError::InvalidParameter(
                "density values must be positive and finite".into(),
            ));
        }
        let mean = weights.iter().sum::<f64>() / cells as f64;
        let values = weights.iter().map(|w| w / mean).collect();
        Ok(DensityField {
            dim,
            side,
            weights,
            values,
        })
    }

    pub fn uniform(dim: usize) -> Self {
        DensityField::new(dim, 1, vec![1.0]).expect("uniform field is valid")
    }

    /// Two-valued checkerboard on a `side^d` grid; a cell gets `low` when the sum of
    /// its grid indices is even.
    pub fn checkerboard(dim: usize, side: usize, low: f64, high: f64) -> Result<Self> {
        let cells = side.pow(dim as u32);
        let weights = (0..cells)
            .map(|c| {
                let parity: usize = Self::unflatten(c, dim, side).iter().sum();
                if parity % 2 == 0 {
                    low
                } else {
                    high
                }
            })
            .collect();
        DensityField::new(dim, side, weights)
    }

    fn unflatten(mut c: usize, dim: usize, side: usize) -> Vec<usize> {
        let mut idx = vec![0; dim];
        for slot in idx.iter_mut().rev() {
            *slot = c % side;
            c /= side;
        }
        idx
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Density at `x ∈ [0,1]^d`; zero outside the unit cube.
    pub fn eval(&self, x: &[f64]) -> f64 {
        if x.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return 0.0;
        }
        let mut c = 0;
        for t in x {
            let i = ((t * self.side as f64).floor() as usize).min(self.side - 1);
            c = c * self.side + i;
        }
        self.values[c]
    }

    /// `∫_B ρ` for a box in unit-cube coordinates (floating point).
    pub fn integrate_box(&self, b: &AxisBox) -> f64 {
        let h = 1.0 / self.side as f64;
        (0..self.values.len())
            .map(|c| {
                let idx = Self::unflatten(c, self.dim, self.side);
                let cell = AxisBox::new(
                    idx.iter().map(|&i| i as f64 * h).collect(),
                    idx.iter().map(|&i| (i + 1) as f64 * h).collect(),
                );
                cell.overlap_volume(b) * self.values[c]
            })
            .sum()
    }

    /// Exact `∫ ρ` over the cell `∏ [i_a / m, (i_a+1) / m]` of an `m`-grid of `[0,1]^d`.
    pub fn exact_grid_cell_mass(&self, m: usize, index: &[usize]) -> BigRational {
        let to_rat = |x: f64| BigRational::from_f64(x).expect("finite weight");
        let total: BigRational = self.weights.iter().map(|w| to_rat(*w)).sum();
        let own = BigInt::from(self.side);
        let theirs = BigInt::from(m);
        let mut mass = BigRational::zero();
        for (c, w) in self.weights.iter().enumerate() {
            let idx = Self::unflatten(c, self.dim, self.side);
            let mut overlap = BigRational::from_integer(1.into());
            for (&j, &i) in idx.iter().zip(index) {
                let lo_a = BigRational::new(BigInt::from(j), own.clone());
                let hi_a = BigRational::new(BigInt::from(j + 1), own.clone());
                let lo_b = BigRational::new(BigInt::from(i), theirs.clone());
                let hi_b = BigRational::new(BigInt::from(i + 1), theirs.clone());
                let lo = if lo_a > lo_b { lo_a } else { lo_b };
                let hi = if hi_a < hi_b { hi_a } else { hi_b };
                if hi <= lo {
                    overlap = BigRational::zero();
                    break;
                }
                overlap *= hi - lo;
            }
            if !overlap.is_zero() {
                mass += overlap * to_rat(*w);
            }
        }
        // values = weights · side^d / Σ weights
        mass * BigRational::from_integer(own.pow(self.dim as u32)) / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn normalization() {
        let f = DensityField::new(2, 3, (1..=9).map(f64::from).collect()).unwrap();
        assert!((f.integral() - 1.0).abs() <= 1e-12);
        assert!(f.min() > 0.0 && f.min() <= f.max());
    }

    #[test]
    fn checkerboard_values() {
        let f = DensityField::checkerboard(2, 2, 0.5, 1.5).unwrap();
        assert_eq!(f.values(), &[0.5, 1.5, 1.5, 0.5]);
        assert_eq!(f.eval(&[0.1, 0.9]), 1.5);
    }

    #[test]
    fn exact_masses_sum_to_one() {
        let f = DensityField::checkerboard(2, 8, 0.5, 1.5).unwrap();
        let mut total = BigRational::zero();
        for i in 0..3 {
            for j in 0..3 {
                let m = f.exact_grid_cell_mass(3, &[i, j]);
                let approx = f.integrate_box(&AxisBox::new(
                    vec![i as f64 / 3.0, j as f64 / 3.0],
                    vec![(i + 1) as f64 / 3.0, (j + 1) as f64 / 3.0],
                ));
                assert!((m.to_f64().unwrap() - approx).abs() < 1e-12);
                total += m;
            }
        }
        assert_eq!(total, BigRational::from_integer(1.into()));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(DensityField::new(2, 2, vec![1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(DensityField::new(2, 2, vec![1.0; 3]).is_err());
    }
}
