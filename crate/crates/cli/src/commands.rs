use serde_json::json;

use sepnet_core::construct::{
    fit_schedule, halfspace_net, onedim_counterexample, patch_bijection, patch_counts,
    patched_net, radial_rescale, slope_bounds_check, RadialRescale, Reference,
};
use sepnet_core::displacement::{
    bottleneck_bijection, counting_lower_bound_curve, displacement_curve, inverse_curve_bound,
    linear_displacement_bijection, realized_radii, CurveKind, DisplacementCurve,
};
use sepnet_core::geom;
use sepnet_core::growth::{radius_schedule, GrowthFunction, RadiusSchedule};
use sepnet_core::io::{write_curves, write_map, write_matching, write_pairs, write_schedule, write_table};
use sepnet_core::net::{
    certify, counting_measure_discrepancy, dyadic_boxes, integer_lattice_window, layer_gap,
    natural_density_curve, NetWindow, TargetMeasure,
};
use sepnet_core::suite::{run_slope_check_with_corruption, run_suite, CRITERIA};
use sepnet_core::{NetError, Result};

use crate::config::{parse_list, ExperimentConfig};
use crate::run::{say, Run};

const TOL: f64 = 1e-9;

fn unknown_net(command: &str, net: &str, known: &str) -> NetError {
    NetError::InvalidParameter(format!("{command} does not support net {net:?} (expected {known})"))
}

fn lattice(cfg: &ExperimentConfig, default_radius: f64) -> Result<NetWindow> {
    let dim = cfg.dim();
    integer_lattice_window(
        dim,
        cfg.radius.unwrap_or(default_radius),
        cfg.scale.unwrap_or(1.0),
        &vec![0.0; dim],
    )
}

/// `|{z ∈ ℤ^d : |s·z| ≤ R}|` by direct enumeration.
fn enumerate_lattice(dim: usize, scale: f64, radius: f64) -> usize {
    let bound = (radius / scale).floor() as i64;
    let mut n = 0;
    geom::for_each_in_box(dim, bound, |z| {
        let sq: f64 = z.iter().map(|&k| (scale * k as f64).powi(2)).sum();
        if sq.sqrt() <= radius + TOL {
            n += 1;
        }
    });
    n
}

/// `X = ℤ^d` in `B̄(0, W)`, `Z = X`, and the rescale along the part of the schedule
/// that fits the window.
fn lattice_rescale(cfg: &ExperimentConfig) -> Result<(NetWindow, GrowthFunction, RadiusSchedule, RadialRescale)> {
    let x = lattice(cfg, 600.0)?;
    let phi = cfg.growth(cfg.phi.as_deref(), "sqrt")?;
    let s = layer_gap(x.sorted_norms());
    let sched = radius_schedule(&phi, cfg.schedule_k.unwrap_or(4.0), s, cfg.schedule_n.unwrap_or(3))?;
    let fitted = fit_schedule(&x, Reference::Same, &phi, &sched)?;
    let out = radial_rescale(&x, Reference::Same, &phi, &fitted)?;
    Ok((x, phi, fitted, out))
}

pub fn generate(cfg: &ExperimentConfig) -> Result<bool> {
    let mut run = Run::new(cfg)?;
    let net = cfg.net_name("lattice");
    let details = match net.as_str() {
        "lattice" => {
            let w = lattice(cfg, 50.0)?;
            let scale = cfg.scale.unwrap_or(1.0);
            let expected = enumerate_lattice(w.dim(), scale, w.window_radius());
            run.check(
                "point count",
                w.len() == expected,
                format!("{} points, enumeration gives {expected}", w.len()),
            );
            let cert = certify(&w)?;
            run.check(
                "separation",
                (cert.separation - scale).abs() <= TOL,
                format!("{} (spacing {scale})", cert.separation),
            );
            let rows = (1..=w.window_radius().floor() as usize)
                .map(|r| Ok(vec![r as f64, w.ball_count(r as f64)? as f64]))
                .collect::<Result<Vec<_>>>()?;
            run.save("counts.csv", &write_table(&["R", "count"], &rows)?)?;
            run.save("net.json", &w.to_json()?)?;
            run.save_json("certificate.json", &cert)?;
            json!({ "points": w.len(), "certificate": cert })
        }
        "halfspace" => {
            let c = cfg.c.unwrap_or(1.5);
            let w = halfspace_net(c, cfg.dim(), cfg.radius.unwrap_or(100.0))?;
            let cert = certify(&w)?;
            run.check("separated", cert.separation > 0.0, format!("separation {}", cert.separation));
            run.check(
                "relatively dense",
                cert.net_constant.is_finite(),
                format!("net constant {}", cert.net_constant),
            );
            run.save("net.json", &w.to_json()?)?;
            run.save_json("certificate.json", &cert)?;
            json!({ "points": w.len(), "c": c, "certificate": cert })
        }
        "patched" => {
            let rho = cfg.density_field()?;
            let sides = cfg.sides(&[2, 3])?;
            let psi = cfg.growth(cfg.psi.as_deref(), "power:10,1")?;
            let k_max = cfg.k_max.unwrap_or(sides.len());
            let (w, layout) = patched_net(&rho, &sides, &psi, k_max)?;
            let violations = layout.violations();
            run.check("layout", violations.is_empty(), format!("{violations:?}"));
            let counts = patch_counts(&w, &layout);
            run.check(
                "patch counts",
                counts.iter().all(|(a, b)| a == b),
                format!("(net, lattice) per patch: {counts:?}"),
            );
            let cert = certify(&w)?;
            run.check("separated", cert.separation > 0.0, format!("separation {}", cert.separation));
            let rows: Vec<Vec<f64>> = counts
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| vec![(k + 1) as f64, layout.l[k] as f64, a as f64, b as f64])
                .collect();
            run.save("patch_counts.csv", &write_table(&["k", "side", "net", "lattice"], &rows)?)?;
            run.save("net.json", &w.to_json()?)?;
            run.save("layout.json", &layout.to_json()?)?;
            run.save_json("certificate.json", &cert)?;
            json!({ "points": w.len(), "window": w.window_radius(), "certificate": cert })
        }
        "radial" => {
            let (x, phi, sched, out) = lattice_rescale(cfg)?;
            let requested = cfg.schedule_n.unwrap_or(3);
            let slopes_ok = out.profile.slopes.iter().all(|&c| c <= 1.0 + TOL);
            run.check("slopes ≤ 1", slopes_ok, format!("{:?}", out.profile.slopes));
            let (l, u) = out.profile.ratio_bounds();
            let k = 2.0 * u / l;
            let report = slope_bounds_check(&out.profile, k, l, u)?;
            run.check(
                "slope bounds",
                report.ok,
                format!("[{}, {}] with K = {k}, L = {l}, U = {u}", report.lower, report.upper),
            );
            let knots = &out.profile.breakpoints[1..];
            let curve = displacement_curve(&out.map, &knots.iter().map(|k| k.0).collect::<Vec<_>>())?;
            for (&(rb, r), &(_, d)) in knots.iter().zip(&curve.samples) {
                let bound = phi.evaluate(r)?;
                run.check(format!("disp at R̄ = {rb}"), d <= bound + TOL, format!("{d} ≤ φ({r}) = {bound}"));
            }
            let rows: Vec<Vec<f64>> = knots
                .iter()
                .zip(&out.profile.slopes)
                .enumerate()
                .map(|(i, (&(rb, r), &c))| vec![(i + 1) as f64, rb, r, c])
                .collect();
            run.save("slopes.csv", &write_table(&["i", "Rbar_i", "R_i", "slope"], &rows)?)?;
            run.save("schedule.csv", &write_schedule(&sched, &phi)?)?;
            run.save("map.csv", &write_map(&out.map)?)?;
            run.save("net.json", &out.y.to_json()?)?;
            run.save_json("profile.json", &out.profile)?;
            json!({
                "source_points": x.len(),
                "schedule_requested": requested,
                "schedule_fitted": sched.len(),
                "slope_report": report,
            })
        }
        "onedim" => {
            let zeta = cfg.growth(cfg.phi.as_deref(), "identity")?;
            let n_max = cfg.schedule_n.unwrap_or(6);
            let ex = onedim_counterexample(&zeta, n_max)?;
            for n in 2..=n_max {
                let (prev, cur) = (ex.psi_at(n - 1), ex.psi_at(n));
                let need = prev + n as f64 * zeta.evaluate(prev)?;
                run.check(format!("ψ({n})"), cur >= need, format!("{cur} ≥ {need}"));
            }
            let rows: Vec<Vec<f64>> =
                ex.psi.iter().enumerate().map(|(i, &p)| vec![(i + 1) as f64, p]).collect();
            run.save("psi.csv", &write_table(&["n", "psi"], &rows)?)?;
            run.save("x.json", &ex.x.to_json()?)?;
            run.save("y.json", &ex.y.to_json()?)?;
            run.save("map.csv", &write_map(&ex.f)?)?;
            json!({ "psi": ex.psi, "x_points": ex.x.len(), "y_points": ex.y.len() })
        }
        other => return Err(unknown_net("generate", other, "lattice, halfspace, patched, radial, onedim")),
    };
    run.finish("generate", cfg, details)
}

fn grid(top: f64) -> Vec<f64> {
    (1..=top.floor() as usize).map(|r| r as f64).collect()
}

fn save_curves(run: &mut Run, title: &str, curves: &[&DisplacementCurve]) -> Result<()> {
    run.save("curves.csv", &write_curves(curves)?)?;
    let labels: Vec<&str> = curves.iter().map(|c| c.kind.as_str()).collect();
    let series: Vec<(&str, &[(f64, f64)])> =
        labels.iter().zip(curves).map(|(l, c)| (*l, c.samples.as_slice())).collect();
    run.plot("curves.svg", title, &series)
}

/// First radius where `lo` exceeds `hi`, comparing samples at equal radii.
fn first_excess(lo: &DisplacementCurve, hi: &DisplacementCurve) -> (usize, Option<(f64, f64, f64)>) {
    let mut compared = 0;
    let mut bad = None;
    for &(r, a) in &lo.samples {
        if let Some(&(_, b)) = hi.samples.iter().find(|s| s.0 == r) {
            compared += 1;
            if a > b + 1e-6 {
                bad.get_or_insert((r, a, b));
            }
        }
    }
    (compared, bad)
}

fn check_below(run: &mut Run, name: &str, lo: &DisplacementCurve, hi: &DisplacementCurve) {
    let (n, bad) = first_excess(lo, hi);
    run.check(name, n > 0 && bad.is_none(), format!("{n} radii, first violation {bad:?}"));
}

pub fn displacement(cfg: &ExperimentConfig) -> Result<bool> {
    let mut run = Run::new(cfg)?;
    let net = cfg.net_name("radial");
    let details = match net.as_str() {
        "radial" => {
            let (x, phi, _, out) = lattice_rescale(cfg)?;
            let fwd = displacement_curve(&out.map, &realized_radii(&out.map))?;
            let bound = inverse_curve_bound(&fwd, &phi)?;
            let top = out.y.window_radius();
            let inv = out.map.inverse(top);
            let radii = grid(top);
            let exact = displacement_curve(&inv, &radii)?;
            let lower = counting_lower_bound_curve(&out.y, &x, &radii)?;
            let analytic = DisplacementCurve::new(
                CurveKind::AnalyticUpperBound,
                radii
                    .iter()
                    .filter(|&&r| r >= bound.r0)
                    .map(|&r| Ok((r, bound.at(r)?)))
                    .collect::<Result<Vec<_>>>()?,
            )?;
            let cap = cfg.bottleneck_max.unwrap_or(32.0);
            let mut samples = Vec::new();
            let mut last = None;
            for &(r, e) in exact.samples.iter().filter(|s| s.0 <= cap && s.0 % 4.0 == 0.0) {
                let sources = out.y.points_within(r);
                let targets = x.points_within(r + e + TOL);
                // g⁻¹ restricted to the ball is feasible at cap e
                let m = bottleneck_bijection(&sources, &targets, e + TOL)?;
                samples.push((r, m.bottleneck));
                last = Some(m);
            }
            let optimal = DisplacementCurve::new(CurveKind::BottleneckOptimal, samples)?;
            check_below(&mut run, "counting ≤ exact", &lower, &exact);
            check_below(&mut run, "counting ≤ bottleneck", &lower, &optimal);
            check_below(&mut run, "bottleneck ≤ exact", &optimal, &exact);
            check_below(&mut run, "exact ≤ C_φ·φ", &exact, &analytic);
            save_curves(&mut run, "displacement of the inverse radial rescale", &[&exact, &lower, &optimal, &analytic])?;
            if let Some(m) = &last {
                run.save("matching.csv", &write_matching(m)?)?;
            }
            json!({ "R0": bound.r0, "C_phi": bound.c_phi, "window": top, "truncated": lower.truncated })
        }
        "identity" => {
            let x = lattice(cfg, 30.0)?;
            let lin = linear_displacement_bijection(&x, &x)?;
            let radii = grid(lin.complete_radius);
            let curve = displacement_curve(&lin.map, &radii)?;
            run.check(
                "zero displacement",
                curve.samples.iter().all(|s| s.1 == 0.0),
                format!("sup {} over {} radii (r = {})", curve.sup(), radii.len(), lin.r_forward),
            );
            save_curves(&mut run, "identity", &[&curve])?;
            run.save("matching.csv", &write_matching(&lin.matching)?)?;
            json!({ "points": x.len(), "complete_radius": lin.complete_radius, "constant": lin.constant })
        }
        "onedim" => {
            let zeta = cfg.growth(cfg.phi.as_deref(), "identity")?;
            let n_max = cfg.schedule_n.unwrap_or(6);
            let ex = onedim_counterexample(&zeta, n_max)?;
            let fwd = displacement_curve(&ex.f, &realized_radii(&ex.f))?;
            let (worst, ratio) = fwd
                .samples
                .iter()
                .filter(|s| s.0 > 0.0)
                .map(|&(r, v)| (r, v / r))
                .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
            run.check("disp_R(f) ≤ R", ratio <= 1.0 + TOL, format!("max ratio {ratio} at R = {worst}"));
            let inv = ex.inverse();
            let inv_curve = displacement_curve(&inv, &realized_radii(&inv))?;
            let mut rows = Vec::new();
            for n in 2..=n_max {
                let prev = ex.psi_at(n - 1);
                if prev > inv.complete_radius() {
                    break;
                }
                let d = displacement_curve(&inv, &[prev])?.samples[0].1;
                let need = n as f64 * zeta.evaluate(prev)?;
                run.check(format!("inverse blow-up n = {n}"), d >= need, format!("{d} ≥ {need} at R = {prev}"));
                rows.push(vec![n as f64, prev, d, need]);
            }
            run.save("blowup.csv", &write_table(&["n", "R", "inverse_disp", "bound"], &rows)?)?;
            run.save("curves.csv", &write_curves(&[&fwd])?)?;
            run.save("inverse_curve.csv", &write_curves(&[&inv_curve])?)?;
            let id: Vec<(f64, f64)> = fwd.samples.iter().map(|s| (s.0, s.0)).collect();
            run.plot(
                "curves.svg",
                "1-d example",
                &[("forward", &fwd.samples), ("inverse", &inv_curve.samples), ("R", &id)],
            )?;
            json!({ "psi": ex.psi, "max_forward_ratio": ratio })
        }
        "patched" => {
            let rho = cfg.density_field()?;
            let sides = cfg.sides(&[2, 3])?;
            let psi = cfg.growth(cfg.psi.as_deref(), "power:10,1")?;
            let k_max = cfg.k_max.unwrap_or(sides.len());
            let (w, layout) = patched_net(&rho, &sides, &psi, k_max)?;
            let h = patch_bijection(&w, &layout)?;
            let curve = displacement_curve(&h, &realized_radii(&h))?;
            let analytic = DisplacementCurve::new(
                CurveKind::AnalyticUpperBound,
                curve.samples.iter().map(|s| (s.0, layout.diameter_bound(s.0))).collect(),
            )?;
            check_below(&mut run, "disp_R(h) ≤ patch diameter bound", &curve, &analytic);
            save_curves(&mut run, "patch bijection", &[&curve, &analytic])?;
            run.save("map.csv", &write_map(&h)?)?;
            json!({ "points": w.len(), "sup": curve.sup() })
        }
        other => return Err(unknown_net("displacement", other, "radial, identity, onedim, patched")),
    };
    run.finish("displacement", cfg, details)
}

pub fn verify(cfg: &ExperimentConfig) -> Result<bool> {
    let mut run = Run::new(cfg)?;
    let seed = cfg.seed.unwrap_or(7);
    let reports = match &cfg.corrupt_slope {
        Some(arg) => {
            let v: Vec<f64> = parse_list(arg)?;
            if v.len() != 3 || v[0] < 1.0 || v[0].fract() != 0.0 {
                return Err(NetError::InvalidParameter("--corrupt-slope takes INDEX,RBAR,R".into()));
            }
            vec![run_slope_check_with_corruption(v[0] as usize, v[1], v[2])]
        }
        None => {
            let ids: Vec<u8> = match cfg.suite.as_deref().unwrap_or("all") {
                "all" => CRITERIA.to_vec(),
                list => parse_list(list)?,
            };
            if let Some(bad) = ids.iter().find(|i| !CRITERIA.contains(i)) {
                return Err(NetError::InvalidParameter(format!("no criterion {bad}")));
            }
            run_suite(&ids, seed)
        }
    };
    for r in &reports {
        say(&r.summary_line());
        run.save_json(&format!("criterion_{}.json", r.id), r)?;
        for c in &r.checks {
            run.check(format!("{}: {}", r.id, c.name), c.pass, c.detail.clone());
        }
    }
    let failed: Vec<u8> = reports.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    run.finish("verify", cfg, json!({ "seed": seed, "failed": failed }))
}

pub fn density(cfg: &ExperimentConfig) -> Result<bool> {
    let mut run = Run::new(cfg)?;
    let net = cfg.net_name("lattice");
    let dim = cfg.dim();
    let radius = cfg.radius.unwrap_or(200.0);
    let (w, expected) = match net.as_str() {
        "lattice" => {
            let w = lattice(cfg, radius)?;
            let intensity = cfg.scale.unwrap_or(1.0).powi(-(dim as i32));
            (w, intensity)
        }
        "halfspace" => (halfspace_net(cfg.c.unwrap_or(1.5), dim, radius)?, 1.0),
        other => return Err(unknown_net("density", other, "lattice, halfspace")),
    };
    let radii: Vec<f64> = (1..=16).map(|i| radius * i as f64 / 16.0).collect();
    let alpha = natural_density_curve(&w, &radii)?;
    let &(_, last) = alpha.last().expect("16 radii");
    run.check(
        "natural density",
        (last - expected).abs() <= 0.05 * expected,
        format!("α̂({radius}) = {last}, expected {expected}"),
    );
    let boxes = dyadic_boxes(dim, 3);
    let target = TargetMeasure::Scaled(expected);
    let disc = [8.0, 4.0, 2.0, 1.0]
        .iter()
        .map(|f| {
            let r = radius / f;
            Ok((r, counting_measure_discrepancy(&w, r, &boxes, &target)?))
        })
        .collect::<Result<Vec<_>>>()?;
    run.save("density.csv", &write_pairs("R", "alpha_hat", &alpha)?)?;
    run.save("discrepancy.csv", &write_pairs("R", "discrepancy", &disc)?)?;
    run.plot("density.svg", "natural density", &[("alpha_hat", &alpha)])?;
    run.plot("discrepancy.svg", "dyadic-box discrepancy", &[("discrepancy", &disc)])?;
    let details = json!({ "points": w.len(), "boxes": boxes.len(), "expected": expected });
    run.finish("density", cfg, details)
}
