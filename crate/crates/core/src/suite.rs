//! The acceptance checks as library functions, shared by the test suite and the CLI.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::construct::{
    cube_covering_radius, dyadic_placement, fit_schedule, halfspace_net, onedim_counterexample,
    patch_bijection, patch_counts, patched_net, point_set_separation, radial_rescale,
    radial_rescale_to_window, slope_bounds_check, CellAllocation, Cube, DensityField,
    RadialRescale, Reference,
};
use crate::displacement::{
    bottleneck_bijection, bottleneck_bijection_auto, brute_force_bottleneck,
    counting_lower_bound, displacement_curve, inverse_curve_bound, realized_radii,
};
use crate::error::Result;
use crate::geom::AxisBox;
use crate::growth::{radius_schedule, GrowthFunction};
use crate::net::{
    certify, counting_measure_discrepancy, integer_lattice_window, layer_gap,
    natural_density_curve, NetWindow, TargetMeasure,
};

pub const CRITERIA: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub elapsed_s: f64,
    pub budget_s: Option<f64>,
    pub checks: Vec<Check>,
    pub details: Value,
}

impl CriterionReport {
    pub fn summary_line(&self) -> String {
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        format!(
            "[{}] {:>2} {} ({:.2}s){}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_s,
            if failed.is_empty() {
                String::new()
            } else {
                format!(" failed: {}", failed.join("; "))
            }
        )
    }
}

#[derive(Default)]
struct Checks {
    list: Vec<Check>,
}

impl Checks {
    fn add(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.list.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }
}

fn name_of(id: u8) -> &'static str {
    match id {
        1 => "radial upper bound at schedule radii",
        2 => "counting lower bound and bottleneck sandwich",
        3 => "bottleneck matches brute force",
        4 => "slope bounds of the radial profile",
        5 => "dyadic placement counts and uniformity",
        6 => "patch bijection diameter bound",
        7 => "one-dimensional counterexample",
        8 => "halfspace density falsifier",
        9 => "log versus sqrt displacement gap",
        10 => "inverse displacement bound",
        _ => "unknown criterion",
    }
}

fn budget_of(id: u8) -> Option<f64> {
    match id {
        1 | 6 => Some(10.0),
        2 | 9 => Some(60.0),
        3 | 5 | 10 => Some(5.0),
        7 => Some(1.0),
        8 => Some(30.0),
        _ => None,
    }
}

/// Runs one criterion; construction errors become a failed check.
pub fn run_criterion(id: u8, seed: u64) -> CriterionReport {
    let start = Instant::now();
    let mut checks = Checks::default();
    let outcome = match id {
        1 => criterion_1(&mut checks),
        2 => criterion_2(&mut checks),
        3 => criterion_3(&mut checks, seed),
        4 => criterion_4(&mut checks, None),
        5 => criterion_5(&mut checks),
        6 => criterion_6(&mut checks),
        7 => criterion_7(&mut checks),
        8 => criterion_8(&mut checks),
        9 => criterion_9(&mut checks),
        10 => criterion_10(&mut checks),
        _ => Ok(json!({ "error": "no such criterion" })),
    };
    let details = match outcome {
        Ok(v) => v,
        Err(e) => {
            checks.add("construction", false, e.to_string());
            Value::Null
        }
    };
    finish(id, start, checks, details)
}

fn finish(id: u8, start: Instant, mut checks: Checks, details: Value) -> CriterionReport {
    let elapsed_s = start.elapsed().as_secs_f64();
    let budget_s = budget_of(id);
    if let Some(b) = budget_s {
        checks.add("runtime", elapsed_s < b, format!("{elapsed_s:.3}s of {b}s"));
    }
    let pass = !checks.list.is_empty() && checks.list.iter().all(|c| c.pass);
    CriterionReport {
        id,
        name: name_of(id),
        pass,
        elapsed_s,
        budget_s,
        checks: checks.list,
        details,
    }
}

pub fn run_suite(ids: &[u8], seed: u64) -> Vec<CriterionReport> {
    ids.iter().map(|&id| run_criterion(id, seed)).collect()
}

/// Fault injection for the slope certificate: moves breakpoint `index` (1-based)
/// to `(R̄, R)` before checking.
pub fn run_slope_check_with_corruption(index: usize, rbar: f64, r: f64) -> CriterionReport {
    let start = Instant::now();
    let mut checks = Checks::default();
    let details = criterion_4(&mut checks, Some((index, rbar, r))).unwrap_or_else(|e| {
        checks.add("construction", false, e.to_string());
        Value::Null
    });
    finish(4, start, checks, details)
}

/// `X = Z = ℤ²` on `B̄(0, 600)`, `φ = √R`, schedule truncated to the window.
fn sqrt_lattice_rescale() -> Result<(NetWindow, RadialRescale, GrowthFunction)> {
    let x = integer_lattice_window(2, 600.0, 1.0, &[0.0, 0.0])?;
    let phi = GrowthFunction::sqrt();
    let s = layer_gap(x.sorted_norms());
    let sched = radius_schedule(&phi, 4.0, s, 3)?;
    let fitted = fit_schedule(&x, Reference::Same, &phi, &sched)?;
    let out = radial_rescale(&x, Reference::Same, &phi, &fitted)?;
    Ok((x, out, phi))
}

fn criterion_1(c: &mut Checks) -> Result<Value> {
    let (x, out, phi) = sqrt_lattice_rescale()?;
    let knots = &out.profile.breakpoints[1..];
    c.add(
        "schedule",
        knots == [(20.0, 16.0), (272.0, 256.0)],
        format!("(R̄_i, R_i) = {knots:?}"),
    );
    let radii: Vec<f64> = knots.iter().map(|k| k.0).collect();
    let curve = displacement_curve(&out.map, &radii)?;
    let mut rows = Vec::new();
    for (&(rbar, r), &(_, disp)) in knots.iter().zip(&curve.samples) {
        let bound = phi.evaluate(r)?;
        c.add(
            format!("disp at R̄ = {rbar}"),
            disp <= bound + 1e-9,
            format!("{disp} ≤ φ({r}) = {bound}"),
        );
        let n = x.count_within(rbar);
        let r_star = x.sorted_norms()[n - 1];
        let outer = r_star - out.profile.gamma(r_star);
        c.add(
            format!("outermost point at R̄ = {rbar}"),
            (disp - outer).abs() <= 1e-9,
            format!("disp = {disp}, r* − γ(r*) = {outer} at r* = {r_star}"),
        );
        rows.push(json!({ "R": r, "Rbar": rbar, "disp": disp, "phi": bound, "r_star": r_star }));
    }
    Ok(json!({ "radii": rows, "slopes": out.profile.slopes }))
}

fn criterion_2(c: &mut Checks) -> Result<Value> {
    let (x, out, phi) = sqrt_lattice_rescale()?;
    let s_z = layer_gap(x.sorted_norms());
    let mut rows = Vec::new();
    let mut first = None;
    for &(_, r) in &out.profile.breakpoints[1..] {
        let b = counting_lower_bound(&out.y, &x, r)?;
        let need = phi.evaluate(r)? - s_z;
        c.add(
            format!("counting bound at R = {r}"),
            b.value >= need && !b.truncated,
            format!("{} ≥ φ(R) − s_Z = {need}", b.value),
        );
        first.get_or_insert(b);
        rows.push(json!({ "R": r, "bound": b.value, "phi_minus_s": need }));
    }
    let b1 = first.expect("schedule is non-empty");
    let r1 = b1.radius;
    let sources = out.y.points_within(r1);
    let targets = x.points_within(r1 + 2.0 * phi.evaluate(r1)?);
    let b_net = certify(&integer_lattice_window(2, 30.0, 1.0, &[0.0, 0.0])?)?.net_constant;
    let m = bottleneck_bijection_auto(&sources, &targets, b1.value + 4.0 * b_net)?;
    c.add(
        "bottleneck dominates counting bound",
        m.complete && m.bottleneck >= b1.value,
        format!("bottleneck {} ≥ {} on {} → {} points", m.bottleneck, b1.value, sources.len(), targets.len()),
    );
    Ok(json!({
        "s_Z": s_z,
        "counting": rows,
        "bottleneck": m.bottleneck,
        "sources": sources.len(),
        "targets": targets.len(),
    }))
}

fn criterion_3(c: &mut Checks, seed: u64) -> Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_dim = Vec::new();
    for d in 1..=2usize {
        let mut matches = 0;
        let mut mismatch = None;
        for _ in 0..200 {
            let n = rng.gen_range(2..=7);
            let mut draw = || -> Vec<Vec<f64>> {
                (0..n)
                    .map(|_| (0..d).map(|_| rng.gen_range(0.0..10.0)).collect())
                    .collect()
            };
            let s = draw();
            let t = draw();
            let cap = 10.0 * (d as f64).sqrt() + 1.0;
            let fast = bottleneck_bijection(&s, &t, cap)?.bottleneck;
            let slow = brute_force_bottleneck(&s, &t)?;
            if fast == slow {
                matches += 1;
            } else {
                mismatch.get_or_insert((fast, slow));
            }
        }
        c.add(
            format!("d = {d}"),
            matches == 200,
            format!("{matches}/200 exact matches{}", mismatch.map_or(String::new(), |m| format!(", first mismatch {m:?}"))),
        );
        per_dim.push(json!({ "dim": d, "matches": matches, "instances": 200 }));
    }
    Ok(json!({ "seed": seed, "results": per_dim }))
}

fn criterion_4(c: &mut Checks, corrupt: Option<(usize, f64, f64)>) -> Result<Value> {
    let (_, out, _) = sqrt_lattice_rescale()?;
    let mut profile = out.profile;
    let (l, u) = profile.ratio_bounds();
    let k = 2.0 * u / l;
    if let Some((i, rbar, r)) = corrupt {
        let mut knots = profile.breakpoints[1..].to_vec();
        if let Some(kn) = knots.get_mut(i.wrapping_sub(1)) {
            *kn = (rbar, r);
        }
        profile = crate::construct::RadialProfile::new(&knots)?;
    }
    let rep = slope_bounds_check(&profile, k, l, u)?;
    for e in &rep.entries {
        c.add(
            format!("slope c_{}", e.index),
            e.ok,
            format!("{} ≤ {} ≤ {}", rep.lower, e.slope, rep.upper),
        );
    }
    Ok(json!({ "L": l, "U": u, "K": k, "report": rep }))
}

struct PlacementStats {
    separations: Vec<f64>,
    coverings: Vec<f64>,
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(0.0, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn placement_stats(c: &mut Checks, label: &str, rho: &DensityField) -> Result<PlacementStats> {
    let mut separations = Vec::new();
    let mut coverings = Vec::new();
    for l in 2..=12u64 {
        let s = Cube::new(vec![0.5, 0.5], l as f64);
        let p = dyadic_placement(rho, l, &s)?;
        let total: u64 = p.cells.iter().map(|c| c.count).sum();
        c.add(
            format!("{label}: |Ξ| for l = {l}"),
            p.points.len() as u64 == l * l && total == l * l,
            format!("{} points", p.points.len()),
        );
        c.add(
            format!("{label}: apportionment for l = {l}"),
            p.cells.iter().all(CellAllocation::within_one),
            format!("{} cells", p.cells.len()),
        );
        separations.push(point_set_separation(2, &p.points));
        coverings.push(cube_covering_radius(&p.points, &s, 1.0 / 32.0)?);
    }
    Ok(PlacementStats {
        separations,
        coverings,
    })
}

fn criterion_5(c: &mut Checks) -> Result<Value> {
    let fields = [
        ("uniform", DensityField::uniform(2)),
        ("checkerboard", DensityField::checkerboard(2, 8, 0.5, 1.5)?),
    ];
    let mut out = Vec::new();
    for (label, rho) in &fields {
        let st = placement_stats(c, label, rho)?;
        let (sr, cr) = (spread(&st.separations), spread(&st.coverings));
        c.add(format!("{label}: separation spread"), sr < 2.0, format!("max/min = {sr}"));
        c.add(format!("{label}: covering spread"), cr < 2.0, format!("max/min = {cr}"));
        out.push(json!({
            "field": label,
            "separation": st.separations,
            "covering_radius": st.coverings,
            "separation_spread": sr,
            "covering_spread": cr,
        }));
    }
    Ok(json!({ "l": (2..=12).collect::<Vec<u64>>(), "fields": out, "checkerboard_grid": 8 }))
}

fn criterion_6(c: &mut Checks) -> Result<Value> {
    let psi = GrowthFunction::power(25.0, 1.0)?;
    let (net, layout) = patched_net(&DensityField::uniform(2), &[2, 3, 4, 5], &psi, 4)?;
    let v = layout.violations();
    c.add("layout invariants", v.is_empty(), v.join("; "));
    for (k, (a, b)) in patch_counts(&net, &layout).into_iter().enumerate() {
        c.add(format!("|X ∩ S_{}|", k + 1), a == b, format!("{a} vs {b}"));
    }
    let h = patch_bijection(&net, &layout)?;
    let mut radii = realized_radii(&h);
    radii.extend(layout.psi.iter().copied().filter(|&p| p <= layout.window_radius));
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let curve = displacement_curve(&h, &radii)?;
    let worst = curve
        .samples
        .iter()
        .map(|&(r, v)| (r, v, layout.diameter_bound(r)))
        .filter(|(_, v, b)| v > &(b + 1e-9))
        .collect::<Vec<_>>();
    c.add(
        "disp_R(h) ≤ √2·l_n",
        worst.is_empty(),
        format!("{} radii checked, {} violations {:?}", curve.samples.len(), worst.len(), worst.first()),
    );
    Ok(json!({
        "window_radius": layout.window_radius,
        "points": net.len(),
        "max_displacement": curve.sup(),
        "psi": layout.psi,
    }))
}

fn criterion_7(c: &mut Checks) -> Result<Value> {
    let ex = onedim_counterexample(&GrowthFunction::identity(), 8)?;
    let radii = realized_radii(&ex.f);
    let fwd = displacement_curve(&ex.f, &radii)?;
    let over: Vec<(f64, f64)> = fwd
        .samples
        .iter()
        .copied()
        .filter(|&(r, v)| v > r / 2.0 + 1.0)
        .collect();
    c.add(
        "forward disp_R(f) ≤ R/2 + 1",
        over.is_empty(),
        format!("{} of {} radii exceed, first {:?}", over.len(), fwd.samples.len(), over.first()),
    );
    let linear = fwd.samples.iter().all(|&(r, v)| v <= r);
    c.add("forward disp_R(f) ≤ R", linear, "the O(R) bound");
    let inv = ex.inverse();
    let mut rows = Vec::new();
    for n in 2..=8 {
        let (p, q) = (ex.psi_at(n - 1), ex.psi_at(n));
        let d = displacement_curve(&inv, &[p])?.samples[0].1;
        let ok = d >= q - p && q - p >= n as f64 * p;
        c.add(
            format!("inverse blow-up n = {n}"),
            ok,
            format!("{d} ≥ {} ≥ {}", q - p, n as f64 * p),
        );
        rows.push(json!({ "n": n, "psi_prev": p, "psi": q, "disp_inverse": d }));
    }
    Ok(json!({ "psi": ex.psi, "inverse": rows, "forward_violations": over.len() }))
}

fn criterion_8(c: &mut Checks) -> Result<Value> {
    let w = halfspace_net(1.5, 2, 500.0)?;
    let alpha = natural_density_curve(&w, &[500.0])?[0].1;
    c.add("|α̂(500) − 1| ≤ 0.05", (alpha - 1.0).abs() <= 0.05, format!("α̂ = {alpha}"));
    let test_box = AxisBox::new(vec![0.1, -0.1], vec![0.6, 0.1]);
    let mut rows = Vec::new();
    for r in [200.0, 350.0, 500.0] {
        let d = counting_measure_discrepancy(&w, r, std::slice::from_ref(&test_box), &TargetMeasure::Lebesgue)?;
        c.add(
            format!("discrepancy at R = {r}"),
            (0.03..=0.07).contains(&d),
            format!("{d} (target 0.05)"),
        );
        rows.push(json!({ "R": r, "discrepancy": d }));
    }
    Ok(json!({ "alpha_hat": alpha, "box": test_box, "discrepancy": rows }))
}

fn criterion_9(c: &mut Checks) -> Result<Value> {
    let x = integer_lattice_window(2, 600.0, 1.0, &[0.0, 0.0])?;
    let s = layer_gap(x.sorted_norms());
    let phi1 = GrowthFunction::log();
    let phi2 = GrowthFunction::sqrt();
    let y1 = radial_rescale_to_window(&x, Reference::Same, &phi1, &radius_schedule(&phi1, 4.0, s, 2)?)?;
    let sched2 = radius_schedule(&phi2, 4.0, s, 3)?;
    let y2 = radial_rescale_to_window(&x, Reference::Same, &phi2, &sched2)?;
    let radii: Vec<f64> = sched2
        .radii
        .iter()
        .copied()
        .filter(|&r| r <= y2.y.window_radius() && r <= y1.map.complete_radius())
        .collect();
    c.add("common radii", !radii.is_empty(), format!("{radii:?}"));
    let upper = displacement_curve(&y1.map, &radii)?;
    let mut rows = Vec::new();
    for (&r, &(_, up)) in radii.iter().zip(&upper.samples) {
        let low = counting_lower_bound(&y2.y, &x, r)?;
        let (p1, p2) = (phi1.evaluate(r)?, phi2.evaluate(r)?);
        c.add(
            format!("lower bound for Y₂ at R = {r}"),
            low.value >= p2 - s && !low.truncated,
            format!("{} ≥ {}", low.value, p2 - s),
        );
        c.add(format!("upper bound for Y₁ at R = {r}"), up <= p1, format!("{up} ≤ {p1}"));
        c.add(format!("gap at R = {r}"), low.value > up, format!("{}", low.value - up));
        rows.push(json!({ "R": r, "lower_Y2": low.value, "upper_Y1": up, "phi1": p1, "phi2": p2 }));
    }
    Ok(json!({ "s": s, "rows": rows }))
}

fn criterion_10(c: &mut Checks) -> Result<Value> {
    let (_, out, phi) = sqrt_lattice_rescale()?;
    let fwd = displacement_curve(&out.map, &realized_radii(&out.map))?;
    let bound = inverse_curve_bound(&fwd, &phi)?;
    let c_phi = phi.doubling_constant(bound.r0, 2.0 * out.map.complete_radius())?;
    c.add("R₀ = 4", (bound.r0 - 4.0).abs() <= 1e-6, format!("R₀ = {}", bound.r0));
    c.add(
        "C_φ from doubling constant",
        (bound.c_phi - c_phi).abs() <= 1e-12,
        format!("C_φ = {}", bound.c_phi),
    );
    let inv = out.map.inverse(out.y.window_radius());
    let curve = displacement_curve(&inv, &realized_radii(&inv))?;
    let mut checked = 0;
    let mut worst: Option<(f64, f64, f64)> = None;
    for &(r, v) in curve.samples.iter().filter(|s| s.0 >= bound.r0) {
        let b = bound.at(r)?;
        checked += 1;
        if v > b + 1e-6 {
            worst.get_or_insert((r, v, b));
        }
    }
    c.add(
        "disp_R(g⁻¹) ≤ C_φ·φ(R)",
        worst.is_none() && checked > 0,
        format!("{checked} radii, first violation {worst:?}"),
    );
    let slack = curve
        .samples
        .iter()
        .filter(|s| s.0 >= bound.r0)
        .map(|&(r, v)| bound.at(r).map(|b| b - v))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(json!({ "R0": bound.r0, "C_phi": bound.c_phi, "radii": checked, "min_slack": slack }))
}
