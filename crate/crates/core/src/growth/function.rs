use serde::{Deserialize, Serialize};

use crate::error::{NetError, Result};

/// A positive increasing growth function.
///
/// `PowerLog` is `a·R^β·(ln(e+R))^α + c₀`; `Table` interpolates linearly between
/// breakpoints and extrapolates with the end slopes (the right slope clamped at 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GrowthFunction {
    PowerLog {
        a: f64,
        beta: f64,
        alpha: f64,
        c0: f64,
        #[serde(default)]
        domain_min: f64,
    },
    Table {
        points: Vec<[f64; 2]>,
        #[serde(default)]
        domain_min: f64,
    },
}

impl GrowthFunction {
    pub fn power_log(a: f64, beta: f64, alpha: f64, c0: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(NetError::InvalidParameter(format!("a must be positive, got {a}")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(NetError::InvalidParameter(format!("beta must lie in [0,1], got {beta}")));
        }
        if !alpha.is_finite() || !(c0 >= 0.0) || !c0.is_finite() {
            return Err(NetError::InvalidParameter("alpha must be finite and c0 ≥ 0".into()));
        }
        Ok(GrowthFunction::PowerLog {
            a,
            beta,
            alpha,
            c0,
            domain_min: 0.0,
        })
    }

    /// `R ↦ √R`.
    pub fn sqrt() -> Self {
        Self::power_log(1.0, 0.5, 0.0, 0.0).unwrap()
    }

    /// `R ↦ R`.
    pub fn identity() -> Self {
        Self::power_log(1.0, 1.0, 0.0, 0.0).unwrap()
    }

    /// `R ↦ a·R^β`.
    pub fn power(a: f64, beta: f64) -> Result<Self> {
        Self::power_log(a, beta, 0.0, 0.0)
    }

    /// Constant function `R ↦ c` (c > 0).
    pub fn constant(c: f64) -> Result<Self> {
        Self::power_log(c, 0.0, 0.0, 0.0)
    }

    /// `R ↦ ln(e + R)`.
    pub fn log() -> Self {
        Self::power_log(1.0, 0.0, 1.0, 0.0).unwrap()
    }

    pub fn table(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.len() < 2 {
            return Err(NetError::InvalidParameter("a table needs at least 2 breakpoints".into()));
        }
        if points.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return Err(NetError::InvalidParameter(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        if points.iter().any(|p| !(p[1] > 0.0) || !p[0].is_finite() || !p[1].is_finite()) {
            return Err(NetError::InvalidParameter("table values must be positive".into()));
        }
        let s0 = (points[1][1] - points[0][1]) / (points[1][0] - points[0][0]);
        let domain_min = if s0 > 0.0 {
            (points[0][0] - points[0][1] / s0).max(0.0)
        } else {
            0.0
        };
        Ok(GrowthFunction::Table { points, domain_min })
    }

    pub fn with_domain_min(mut self, min: f64) -> Self {
        match &mut self {
            GrowthFunction::PowerLog { domain_min, .. } | GrowthFunction::Table { domain_min, .. } => {
                *domain_min = min
            }
        }
        self
    }

    pub fn domain_min(&self) -> f64 {
        match self {
            GrowthFunction::PowerLog { domain_min, .. } | GrowthFunction::Table { domain_min, .. } => {
                *domain_min
            }
        }
    }

    /// Unbounded growth, declared from the family parameters.
    pub fn declared_unbounded(&self) -> bool {
        match self {
            GrowthFunction::PowerLog { beta, alpha, .. } => *beta > 0.0 || *alpha > 0.0,
            GrowthFunction::Table { points, .. } => {
                let n = points.len();
                points[n - 1][1] > points[n - 2][1]
            }
        }
    }

    /// `φ(R) ∈ o(R)`, declared from the family parameters.
    pub fn declared_sublinear(&self) -> bool {
        match self {
            GrowthFunction::PowerLog { beta, alpha, .. } => *beta < 1.0 || *alpha < 0.0,
            GrowthFunction::Table { points, .. } => {
                let n = points.len();
                points[n - 1][1] <= points[n - 2][1]
            }
        }
    }

    /// Strictly increasing on the whole domain, declared from the parameters.
    pub fn declared_strictly_increasing(&self) -> bool {
        match self {
            GrowthFunction::PowerLog { beta, alpha, .. } => {
                (*beta > 0.0 && *alpha >= 0.0) || (*beta == 0.0 && *alpha > 0.0)
            }
            GrowthFunction::Table { points, .. } => points.windows(2).all(|w| w[1][1] > w[0][1]),
        }
    }

    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !(r > self.domain_min()) {
            return Err(NetError::Domain(r, self.domain_min()));
        }
        let v = self.raw(r);
        if !(v > 0.0) {
            return Err(NetError::Domain(r, self.domain_min()));
        }
        Ok(v)
    }

    fn raw(&self, r: f64) -> f64 {
        match self {
            GrowthFunction::PowerLog {
                a, beta, alpha, c0, ..
            } => {
                let power = if *beta == 0.0 {
                    1.0
                } else if *beta == 1.0 {
                    r
                } else if *beta == 0.5 {
                    r.sqrt()
                } else {
                    r.powf(*beta)
                };
                let log = if *alpha == 0.0 {
                    1.0
                } else {
                    (std::f64::consts::E + r).ln().powf(*alpha)
                };
                a * power * log + c0
            }
            GrowthFunction::Table { points, .. } => table_eval(points, r),
        }
    }

    /// Some `R` with `|φ(R) − y| ≤ 1e-9·max(1, y)`; the least such `R` for tables.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let tol = 1e-9 * y.abs().max(1.0);
        match self {
            GrowthFunction::PowerLog {
                a,
                beta,
                alpha,
                c0,
                domain_min,
            } if *alpha == 0.0 && *c0 == 0.0 && *beta > 0.0 => {
                let r = if *beta == 1.0 {
                    y / a
                } else if *beta == 0.5 {
                    (y / a) * (y / a)
                } else {
                    (y / a).powf(1.0 / beta)
                };
                if !(r > *domain_min) {
                    return Err(NetError::Range(y));
                }
                Ok(r)
            }
            GrowthFunction::Table { points, domain_min } => {
                let r = table_inverse(points, y).ok_or(NetError::Range(y))?;
                if !(r > *domain_min) {
                    return Err(NetError::Range(y));
                }
                Ok(r)
            }
            _ => {
                let r = self.bisect(y)?;
                if (self.raw(r) - y).abs() <= tol {
                    Ok(r)
                } else {
                    Err(NetError::Range(y))
                }
            }
        }
    }

    fn bisect(&self, y: f64) -> Result<f64> {
        let dmin = self.domain_min();
        let mut hi = (2.0 * dmin).max(1.0);
        while self.raw(hi) < y {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(NetError::Range(y));
            }
        }
        let mut lo = dmin;
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if mid > dmin && self.raw(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if hi <= dmin {
            return Err(NetError::Range(y));
        }
        Ok(hi)
    }

    /// `sup φ(R)/φ(R/2)` over a geometric sample of `[2·R_lo, R_hi]`.
    pub fn doubling_constant(&self, r_lo: f64, r_hi: f64) -> Result<f64> {
        if !(r_lo > 0.0) || !(r_hi > 2.0 * r_lo) {
            return Err(NetError::InvalidParameter(format!(
                "doubling range needs R_hi > 2·R_lo > 0, got [{r_lo}, {r_hi}]"
            )));
        }
        let mut grid = geometric_grid(2.0 * r_lo, r_hi, 256);
        if let GrowthFunction::Table { points, .. } = self {
            for p in points {
                for r in [p[0], 2.0 * p[0]] {
                    if r >= 2.0 * r_lo && r <= r_hi {
                        grid.push(r);
                    }
                }
            }
        }
        let mut sup = 0.0f64;
        for r in grid {
            sup = sup.max(self.evaluate(r)? / self.evaluate(r / 2.0)?);
        }
        Ok(sup)
    }

    /// Checks monotonicity and concavity on `[R_lo, R_hi]`: tables through their
    /// breakpoints, closed forms on 256 geometric samples.
    pub fn check_concave_increasing(&self, r_lo: f64, r_hi: f64) -> Result<ConcavityReport> {
        if !(r_hi > r_lo) || !(r_lo > self.domain_min()) {
            return Err(NetError::Domain(r_lo, self.domain_min()));
        }
        let samples: Vec<f64> = match self {
            GrowthFunction::Table { points, .. } => {
                let mut g: Vec<f64> = vec![r_lo];
                g.extend(points.iter().map(|p| p[0]).filter(|r| *r > r_lo && *r < r_hi));
                g.push(r_hi);
                g
            }
            GrowthFunction::PowerLog { .. } => geometric_grid(r_lo, r_hi, 256),
        };
        let values = samples
            .iter()
            .map(|r| self.evaluate(*r))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..samples.len().saturating_sub(2) {
            let (a, b, c) = (samples[i], samples[i + 1], samples[i + 2]);
            let s1 = (values[i + 1] - values[i]) / (b - a);
            let s2 = (values[i + 2] - values[i + 1]) / (c - b);
            let tol = 1e-9 * (s1.abs() + s2.abs()) + 1e-300;
            if s1 < -tol || s2 < -tol || s2 > s1 + tol {
                return Ok(ConcavityReport {
                    ok: false,
                    witness: Some((a, b, c)),
                });
            }
        }
        Ok(ConcavityReport {
            ok: true,
            witness: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConcavityReport {
    pub ok: bool,
    /// First sampled triple `(R₁, R₂, R₃)` violating monotonicity or concavity.
    pub witness: Option<(f64, f64, f64)>,
}

pub(crate) fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| lo * (ratio * i as f64).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

fn table_eval(points: &[[f64; 2]], r: f64) -> f64 {
    let n = points.len();
    let i = points.partition_point(|p| p[0] <= r);
    if i > 0 && points[i - 1][0] == r {
        return points[i - 1][1];
    }
    let (p, slope) = if i == 0 {
        (points[0], (points[1][1] - points[0][1]) / (points[1][0] - points[0][0]))
    } else if i == n {
        let s = (points[n - 1][1] - points[n - 2][1]) / (points[n - 1][0] - points[n - 2][0]);
        (points[n - 1], s.max(0.0))
    } else {
        (points[i - 1], (points[i][1] - points[i - 1][1]) / (points[i][0] - points[i - 1][0]))
    };
    p[1] + slope * (r - p[0])
}

fn table_inverse(points: &[[f64; 2]], y: f64) -> Option<f64> {
    let n = points.len();
    if let Some(p) = points.iter().find(|p| p[1] == y) {
        return Some(p[0]);
    }
    if y < points[0][1] {
        let s = (points[1][1] - points[0][1]) / (points[1][0] - points[0][0]);
        return (s > 0.0).then(|| points[0][0] + (y - points[0][1]) / s);
    }
    for w in points.windows(2) {
        if w[0][1] < y && y < w[1][1] {
            return Some(w[0][0] + (y - w[0][1]) * (w[1][0] - w[0][0]) / (w[1][1] - w[0][1]));
        }
    }
    let s = (points[n - 1][1] - points[n - 2][1]) / (points[n - 1][0] - points[n - 2][0]);
    (s > 0.0 && y > points[n - 1][1]).then(|| points[n - 1][0] + (y - points[n - 1][1]) / s)
}

/// Least concave non-decreasing piecewise-linear majorant of the samples
/// (upper hull, cut at its maximum and continued flat).
pub fn concave_majorant(samples: &[(f64, f64)]) -> Result<GrowthFunction> {
    if samples.len() < 2 {
        return Err(NetError::InvalidParameter("need at least 2 samples".into()));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(NetError::InvalidParameter("sample radii must be strictly increasing".into()));
    }
    if samples.iter().any(|s| !(s.1 > 0.0) || !s.1.is_finite()) {
        return Err(NetError::InvalidParameter("sample values must be positive".into()));
    }
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in samples {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let top = hull
        .iter()
        .enumerate()
        .fold(0, |best, (i, p)| if p.1 > hull[best].1 { i } else { best });
    let last_r = samples[samples.len() - 1].0;
    let peak = hull[top];
    hull.truncate(top + 1);
    if peak.0 < last_r {
        hull.push((last_r, peak.1));
    }
    if hull.len() == 1 {
        // all samples below the first one: flat line
        hull.push((last_r, peak.1));
    }
    GrowthFunction::table(hull.into_iter().map(|(r, v)| [r, v]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        assert_eq!(GrowthFunction::sqrt().evaluate(16.0).unwrap(), 4.0);
        let c = GrowthFunction::constant(3.0).unwrap();
        assert_eq!(c.evaluate(0.1).unwrap(), 3.0);
        assert_eq!(c.evaluate(1e9).unwrap(), 3.0);
        let t = GrowthFunction::table(vec![[1.0, 1.0], [10.0, 4.0]]).unwrap();
        assert_eq!(t.evaluate(5.5).unwrap(), 2.5);
        assert_eq!(t.evaluate(10.0).unwrap(), 4.0);
        assert!(matches!(
            GrowthFunction::sqrt().evaluate(0.0),
            Err(NetError::Domain(..))
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(GrowthFunction::sqrt().inverse(4.0).unwrap(), 16.0);
        assert_eq!(GrowthFunction::identity().inverse(7.0).unwrap(), 7.0);
        let f = GrowthFunction::power_log(1.0, 0.5, 1.0, 0.0).unwrap();
        let r = f.inverse(20.0).unwrap();
        let direct = r.sqrt() * (std::f64::consts::E + r).ln();
        assert!((direct - 20.0).abs() <= 1e-9 * 20.0);
        // below the range of ln(e+R) + 5
        let g = GrowthFunction::power_log(1.0, 0.0, 1.0, 5.0).unwrap();
        assert!(matches!(g.inverse(2.0), Err(NetError::Range(_))));
        assert!(matches!(
            GrowthFunction::constant(3.0).unwrap().inverse(4.0),
            Err(NetError::Range(_))
        ));
    }

    #[test]
    fn doubling_examples() {
        assert!((GrowthFunction::identity().doubling_constant(1.0, 100.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(
            GrowthFunction::constant(2.0).unwrap().doubling_constant(1.0, 100.0).unwrap(),
            1.0
        );
        let c = GrowthFunction::sqrt().doubling_constant(1.0, 1e6).unwrap();
        assert!((c - 2f64.sqrt()).abs() < 1e-6);
        assert!(GrowthFunction::sqrt().doubling_constant(1.0, 2.0).is_err());
    }

    #[test]
    fn majorant_examples() {
        let already = [(1.0, 1.0), (2.0, 1.5), (4.0, 2.0)];
        let m = concave_majorant(&already).unwrap();
        assert_eq!(
            m,
            GrowthFunction::table(vec![[1.0, 1.0], [2.0, 1.5], [4.0, 2.0]]).unwrap()
        );
        let saw = [(1.0, 1.0), (2.0, 3.0), (3.0, 1.0), (4.0, 5.0)];
        let m = concave_majorant(&saw).unwrap();
        assert_eq!(
            m,
            GrowthFunction::table(vec![[1.0, 1.0], [2.0, 3.0], [4.0, 5.0]]).unwrap()
        );
        let two = concave_majorant(&[(1.0, 2.0), (3.0, 5.0)]).unwrap();
        assert_eq!(two.evaluate(2.0).unwrap(), 3.5);
        let falling = concave_majorant(&[(1.0, 2.0), (3.0, 1.0)]).unwrap();
        assert_eq!(falling.evaluate(3.0).unwrap(), 2.0);
        assert_eq!(falling.evaluate(30.0).unwrap(), 2.0);
        assert!(concave_majorant(&[(2.0, 1.0), (1.0, 1.0)]).is_err());
        assert!(concave_majorant(&[(1.0, 0.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn concavity_examples() {
        assert!(GrowthFunction::sqrt().check_concave_increasing(1.0, 1e4).unwrap().ok);
        let sq = GrowthFunction::PowerLog {
            a: 1.0,
            beta: 2.0,
            alpha: 0.0,
            c0: 0.0,
            domain_min: 0.0,
        };
        let rep = sq.check_concave_increasing(1.0, 100.0).unwrap();
        assert!(!rep.ok);
        assert!(rep.witness.is_some());
        let saw = GrowthFunction::table(vec![[1.0, 1.0], [2.0, 3.0], [3.0, 1.0], [4.0, 5.0]]).unwrap();
        let rep = saw.check_concave_increasing(1.0, 4.0).unwrap();
        assert_eq!(rep.witness, Some((1.0, 2.0, 3.0)));
    }

    #[test]
    fn json_shapes() {
        let s = serde_json::to_string(&GrowthFunction::sqrt()).unwrap();
        assert_eq!(
            s,
            r#"{"family":"power-log","a":1.0,"beta":0.5,"alpha":0.0,"c0":0.0,"domain_min":0.0}"#
        );
        let t: GrowthFunction =
            serde_json::from_str(r#"{"family":"table","points":[[1,1],[10,4]]}"#).unwrap();
        assert_eq!(t.evaluate(5.5).unwrap(), 2.5);
    }
}
