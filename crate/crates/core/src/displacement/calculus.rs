use super::{CurveKind, DisplacementCurve};
use crate::error::{NetError, Result};
use crate::growth::GrowthFunction;

/// Upper bound `R ↦ g(R + f(R)) + f(R)` for the displacement of `g ∘ f`; `g` is read
/// at the smallest sample radius `≥ R + f(R)`, an upper bound for non-decreasing `g`.
pub fn compose_curves(f: &DisplacementCurve, g: &DisplacementCurve) -> Result<DisplacementCurve> {
    let mut samples = Vec::with_capacity(f.samples.len());
    let mut truncated = f.truncated || g.truncated;
    for &(r, fr) in &f.samples {
        match g.value_at_or_above(r + fr) {
            Some(gr) => samples.push((r, gr + fr)),
            None => {
                truncated = true;
                break;
            }
        }
    }
    let mut out = DisplacementCurve::new(CurveKind::AnalyticUpperBound, samples)?;
    out.truncated = truncated;
    Ok(out)
}

/// `disp_R(f⁻¹) ≤ C_φ·φ(R)` for `R ≥ R₀`, given `disp_R(f) ≤ φ(R)`.
#[derive(Clone, Debug)]
pub struct InverseBound {
    /// Least `R` with `φ(R) ≤ R/2`.
    pub r0: f64,
    pub c_phi: f64,
    pub phi: GrowthFunction,
    pub curve: DisplacementCurve,
}

impl InverseBound {
    pub fn at(&self, r: f64) -> Result<f64> {
        if r < self.r0 {
            return Err(NetError::Domain(r, self.r0));
        }
        Ok(self.c_phi * self.phi.evaluate(r)?)
    }
}

/// Least `R > domain_min` with `φ(R) ≤ R/2`, to relative precision 1e-12.
pub fn half_linear_threshold(phi: &GrowthFunction) -> Result<f64> {
    let below = |r: f64| -> Result<bool> { Ok(phi.evaluate(r)? <= r / 2.0) };
    let mut lo = phi.domain_min().max(0.0);
    let mut hi = lo.max(1e-6) * 2.0;
    while !below(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(NetError::Precondition("φ(R) ≤ R/2 never holds".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid > phi.domain_min() && below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn inverse_curve_bound(f: &DisplacementCurve, phi: &GrowthFunction) -> Result<InverseBound> {
    for &(r, v) in &f.samples {
        if r > phi.domain_min() && v > phi.evaluate(r)? + 1e-9 {
            return Err(NetError::Precondition(format!(
                "curve exceeds φ at R = {r}: {v} > {}",
                phi.evaluate(r)?
            )));
        }
    }
    let r0 = half_linear_threshold(phi)?;
    let top = f.last_radius().unwrap_or(r0).max(2.0 * r0);
    // φ(2R) ≤ C_φ·φ(R) is needed for R ∈ [R₀, top]
    let c_phi = phi.doubling_constant(r0, 2.0 * top)?.max(1.0);
    let samples = f
        .samples
        .iter()
        .filter(|s| s.0 >= r0)
        .map(|s| Ok((s.0, c_phi * phi.evaluate(s.0)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(InverseBound {
        r0,
        c_phi,
        phi: phi.clone(),
        curve: DisplacementCurve::new(CurveKind::AnalyticUpperBound, samples)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(kind: CurveKind, s: &[(f64, f64)]) -> DisplacementCurve {
        DisplacementCurve::new(kind, s.to_vec()).unwrap()
    }

    #[test]
    fn compose_examples() {
        let radii: Vec<f64> = (1..=10).map(f64::from).collect();
        let g = curve(CurveKind::ExactOfMap, &radii.iter().map(|&r| (r, r.sqrt())).collect::<Vec<_>>());
        let zero = curve(CurveKind::ExactOfMap, &radii.iter().map(|&r| (r, 0.0)).collect::<Vec<_>>());
        assert_eq!(compose_curves(&zero, &g).unwrap().samples, g.samples);
        let a = curve(CurveKind::ExactOfMap, &radii.iter().map(|&r| (r, 2.0)).collect::<Vec<_>>());
        let b = curve(CurveKind::ExactOfMap, &radii.iter().map(|&r| (r, 3.0)).collect::<Vec<_>>());
        let c = compose_curves(&a, &b).unwrap();
        assert!(c.truncated);
        assert!(c.samples.iter().all(|s| s.1 == 5.0));
        assert_eq!(c.samples.len(), 8);
    }

    #[test]
    fn inverse_bound_examples() {
        let k = GrowthFunction::constant(3.0).unwrap();
        let f = curve(CurveKind::ExactOfMap, &[(1.0, 1.0), (10.0, 3.0), (100.0, 3.0)]);
        let b = inverse_curve_bound(&f, &k).unwrap();
        assert_eq!(b.c_phi, 1.0);
        assert!((b.r0 - 6.0).abs() < 1e-9);
        assert!(b.curve.samples.iter().all(|s| s.1 == 3.0));

        let sqrt = GrowthFunction::sqrt();
        let f = curve(CurveKind::ExactOfMap, &[(4.0, 1.0), (64.0, 8.0)]);
        let b = inverse_curve_bound(&f, &sqrt).unwrap();
        assert!((b.r0 - 4.0).abs() < 1e-9);
        assert!((b.c_phi - 2f64.sqrt()).abs() < 1e-12);

        let bad = curve(CurveKind::ExactOfMap, &[(4.0, 3.0)]);
        assert!(matches!(inverse_curve_bound(&bad, &sqrt), Err(NetError::Precondition(_))));
    }
}
