use serde::{Deserialize, Serialize};

use super::GrowthFunction;
use crate::error::{NetError, Result};

/// Radii `R_1 < … < R_n` with `R_1 > s`, `R_i ≥ K·R_{i−1}` and `φ(R_{i+1}) ≤ M·φ(R_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusSchedule {
    pub radii: Vec<f64>,
    pub m: f64,
    pub k: f64,
    pub s: f64,
}

const RELATIVE_SLACK: f64 = 1e-9;

impl RadiusSchedule {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Re-checks the three schedule inequalities against `phi`.
    pub fn verify(&self, phi: &GrowthFunction) -> Result<()> {
        let Some(&first) = self.radii.first() else {
            return Err(NetError::ScheduleInfeasible("empty schedule".into()));
        };
        if !(first > self.s) {
            return Err(NetError::ScheduleInfeasible(format!(
                "R_1 = {first} does not exceed s = {}",
                self.s
            )));
        }
        for (i, w) in self.radii.windows(2).enumerate() {
            if w[1] < self.k * w[0] * (1.0 - RELATIVE_SLACK) {
                return Err(NetError::ScheduleInfeasible(format!(
                    "R_{} = {} < K·R_{} = {}",
                    i + 2,
                    w[1],
                    i + 1,
                    self.k * w[0]
                )));
            }
            let (lo, hi) = (phi.evaluate(w[0])?, phi.evaluate(w[1])?);
            if hi > self.m * lo * (1.0 + RELATIVE_SLACK) {
                return Err(NetError::ScheduleInfeasible(format!(
                    "φ(R_{}) = {hi} > M·φ(R_{}) = {}",
                    i + 2,
                    i + 1,
                    self.m * lo
                )));
            }
        }
        Ok(())
    }

    /// Keeps the first `n` radii.
    pub fn truncated(&self, n: usize) -> RadiusSchedule {
        RadiusSchedule {
            radii: self.radii.iter().copied().take(n).collect(),
            ..self.clone()
        }
    }
}

fn check_family(phi: &GrowthFunction, k: f64, n: usize) -> Result<()> {
    if !(k > 1.0) {
        return Err(NetError::InvalidParameter(format!("K must exceed 1, got {k}")));
    }
    if n == 0 {
        return Err(NetError::InvalidParameter("schedule length must be positive".into()));
    }
    if !phi.declared_unbounded() || !phi.declared_sublinear() {
        return Err(NetError::ScheduleInfeasible(
            "φ must be declared unbounded and o(R)".into(),
        ));
    }
    Ok(())
}

/// Whether `M` meets the conditions used to seed the schedule:
/// `M ≥ K`, `M > φ(s)`, and `φ(R) < R` for all `R ≥ M` (checked as `φ(M) < M` plus a
/// left secant slope ≤ 1 at `M`, which is sufficient for concave φ).
fn admissible_m(phi: &GrowthFunction, k: f64, s: f64, m: f64) -> Result<bool> {
    if m < k {
        return Ok(false);
    }
    if s > phi.domain_min() && !(m > phi.evaluate(s)?) {
        return Ok(false);
    }
    let at_m = phi.evaluate(m)?;
    let h = m * 1e-6;
    let slope = (at_m - phi.evaluate(m - h)?) / h;
    Ok(at_m < m && slope <= 1.0)
}

fn build(phi: &GrowthFunction, k: f64, s: f64, n: usize, m: f64) -> Result<RadiusSchedule> {
    let mut radii = Vec::with_capacity(n);
    let mut r = phi.inverse(m)?;
    radii.push(r);
    for _ in 1..n {
        r = phi.inverse(m * phi.evaluate(r)?)?;
        radii.push(r);
    }
    Ok(RadiusSchedule { radii, m, k, s })
}

/// Schedule `R_1 = φ⁻¹(M)`, `R_i = φ⁻¹(M·φ(R_{i−1}))` with `M` the smallest power of two
/// for which the seed conditions hold and the result verifies.
pub fn radius_schedule(phi: &GrowthFunction, k: f64, s: f64, n: usize) -> Result<RadiusSchedule> {
    check_family(phi, k, n)?;
    let mut m = 2f64.powi(k.log2().ceil() as i32).max(2.0);
    for _ in 0..128 {
        if admissible_m(phi, k, s, m)? {
            if let Ok(sched) = build(phi, k, s, n, m) {
                if sched.verify(phi).is_ok() {
                    return Ok(sched);
                }
            }
        }
        m *= 2.0;
    }
    Err(NetError::ScheduleInfeasible("no admissible M up to 2^128".into()))
}

/// Same recurrence with a caller-chosen `M`, which must satisfy the seed conditions.
pub fn radius_schedule_with_m(
    phi: &GrowthFunction,
    k: f64,
    s: f64,
    n: usize,
    m: f64,
) -> Result<RadiusSchedule> {
    check_family(phi, k, n)?;
    if !admissible_m(phi, k, s, m)? {
        return Err(NetError::ScheduleInfeasible(format!(
            "M = {m} violates M ≥ K, M > φ(s) or φ(R) < R beyond M"
        )));
    }
    let sched = build(phi, k, s, n, m)?;
    sched.verify(phi)?;
    Ok(sched)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn sqrt_schedule() {
        let phi = GrowthFunction::sqrt();
        let s = radius_schedule(&phi, 4.0, 1.0, 3).unwrap();
        assert_eq!(s.m, 4.0);
        assert_eq!(s.radii, vec![16.0, 256.0, 4096.0]);
        let forced = radius_schedule_with_m(&phi, 2.0, 1.0, 3, 4.0).unwrap();
        assert_eq!(forced.radii, vec![16.0, 256.0, 4096.0]);
    }

    #[test]
    fn two_thirds_power_schedule() {
        let phi = GrowthFunction::power(1.0, 2.0 / 3.0).unwrap();
        let s = radius_schedule_with_m(&phi, 2.0, 1.0, 2, 8.0).unwrap();
        // closed form: R_1 = 8^{3/2}, R_2 = 8^{3/2}·R_1
        let r1 = 8f64.powf(1.5);
        assert!((s.radii[0] - r1).abs() < 1e-9 * r1);
        assert!((s.radii[1] - 512.0).abs() < 1e-9 * 512.0);
    }

    #[test]
    fn infeasible_inputs() {
        assert!(matches!(
            radius_schedule(&GrowthFunction::constant(2.0).unwrap(), 2.0, 1.0, 3),
            Err(NetError::ScheduleInfeasible(_))
        ));
        assert!(matches!(
            radius_schedule(&GrowthFunction::identity(), 2.0, 1.0, 3),
            Err(NetError::ScheduleInfeasible(_))
        ));
        assert!(radius_schedule(&GrowthFunction::sqrt(), 1.0, 1.0, 3).is_err());
        // M = 2 < K = 4
        assert!(radius_schedule_with_m(&GrowthFunction::sqrt(), 4.0, 1.0, 3, 2.0).is_err());
    }

    #[test]
    fn random_power_log_schedules_verify() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
        for _ in 0..20 {
            let beta = rng.gen_range(0.1..0.9);
            let alpha = rng.gen_range(0.0..1.5);
            let a = rng.gen_range(0.5..3.0);
            let phi = GrowthFunction::power_log(a, beta, alpha, 0.0).unwrap();
            let k = rng.gen_range(1.5..6.0);
            let s = rng.gen_range(0.5..3.0);
            let sched = radius_schedule(&phi, k, s, 4).unwrap();
            // independent re-check of (i)-(iii)
            assert!(sched.radii[0] > s);
            for w in sched.radii.windows(2) {
                assert!(w[1] >= k * w[0] * (1.0 - 1e-9));
                let ratio = phi.evaluate(w[1]).unwrap() / phi.evaluate(w[0]).unwrap();
                assert!(ratio <= sched.m * (1.0 + 1e-9));
            }
        }
    }
}
