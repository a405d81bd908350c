use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::output::{director_svg, fmt_num, output_path, write_json, write_text, Table};
use super::{
    ClassifyArgs, CliError, FloquetArgs, SimulateArgs, SweepArgs, SweepParam, VerifyOrderArgs,
};
use crate::bifurcation::{
    interior_grid, ldg_region_check, predict, region_grid, BifurcationReport, Stability,
};
use crate::dynamics::{integrate, FrameKind, IntegratorConfig};
use crate::models::{ldg_equilibrium, ModelSpec};
use crate::poincare::{
    classify_point, classify_trajectory, fixed_point, floquet, return_displacement, FixedPoint,
    FloquetReport, OrbitReport, Turn,
};
use crate::tensor::{
    distance_to_orbit, nearest_orbit_coordinates, orbit_point, SphericalPoint, I0, I11, I12, I21,
    I22,
};

/// Files written and lines for the terminal.
#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub summary: Vec<String>,
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn equilibrium_scale(spec: &ModelSpec) -> Result<f64, CliError> {
    Ok(ldg_equilibrium(&spec.ldg)?.a)
}

pub fn cmd_predict(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let report = predict(&cfg.model_spec())?;
    let path = output_path(out, "predict.json")?;
    write_json(&path, &report)?;
    let mut summary = vec![
        format!(
            "a = {}, λ = {}, μ = {}",
            report.equilibrium.a, report.spectral.lambda.nu, report.spectral.mu.nu
        ),
        format!(
            "Λ0 = {}, Λ2 = {}, ρ = τ_λ/τ_μ = {}",
            report.coeffs.lambda0, report.coeffs.lambda2, report.rho
        ),
        format!(
            "kayak_exists = {}, theta_kayak = {}",
            report.kayak_exists(),
            opt(report.theta_kayak)
        ),
    ];
    for z in &report.zeros.zeros {
        summary.push(format!(
            "zero θ = {} ({:?}, {:?})",
            z.theta, z.kind, z.stability
        ));
    }
    summary.extend(report.equilibrium.warnings.iter().cloned());
    summary.extend(report.region.notes.iter().cloned());
    Ok(Outcome {
        outputs: vec![path],
        summary,
    })
}

pub fn cmd_simulate(cfg: &RunConfig, args: &SimulateArgs) -> Result<Outcome, CliError> {
    let spec = cfg.model_spec();
    let a = equilibrium_scale(&spec)?;
    let q0 = orbit_point(&SphericalPoint::new(args.theta0, args.phi0), a);
    let t_final = args.t_final.unwrap_or(20.0 * TAU / spec.omega);
    let icfg = IntegratorConfig {
        max_step: cfg.integrator().max_step.min(0.5 / spec.omega),
        ..cfg.integrator()
    };
    let traj = integrate(FrameKind::Lab, &spec, &q0, (0.0, t_final), &icfg)?;
    let mut table = Table::new(&[
        "t",
        "q_e0",
        "q_e11",
        "q_e12",
        "q_e21",
        "q_e22",
        "theta_rad",
        "phi_rad",
        "dist_to_orbit",
    ]);
    let mut trace = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let c = s.q.coords();
        let (th, ph) = match nearest_orbit_coordinates(&s.q) {
            Ok(o) => (o.point.theta, o.point.phi),
            Err(_) => (f64::NAN, f64::NAN),
        };
        let dist = distance_to_orbit(&s.q, a).unwrap_or(f64::NAN);
        trace.push((s.t, th, ph));
        let mut row = vec![fmt_num(s.t)];
        row.extend(c.iter().map(|&x| fmt_num(x)));
        row.extend([fmt_num(th), fmt_num(ph), fmt_num(dist)]);
        table.push(row);
    }
    let csv = output_path(&args.common.out, "trajectory.csv")?;
    table.write(&csv)?;
    let report = classify_trajectory(&traj, &spec, &cfg.poincare())?;
    let json = output_path(&args.common.out, "orbit.json")?;
    write_json(&json, &report)?;
    let mut outputs = vec![csv, json];
    if args.svg {
        let svg = output_path(&args.common.out, "trajectory.svg")?;
        write_text(&svg, &director_svg(&trace))?;
        outputs.push(svg);
    }
    Ok(Outcome {
        outputs,
        summary: orbit_summary(&report),
    })
}

fn orbit_summary(r: &OrbitReport) -> Vec<String> {
    let mut s = vec![
        format!("kind = {:?}", r.kind),
        format!("period = {}", opt(r.period)),
        format!("mean polar angle = {}", fmt_num(r.mean_polar_angle)),
        format!("stability = {:?}", r.stability),
    ];
    s.extend(r.notes.iter().cloned());
    s
}

fn resolve_turn(turn: Option<Turn>, theta0: f64) -> Turn {
    turn.unwrap_or(if (theta0 - FRAC_PI_2).abs() < 1e-12 {
        Turn::Half
    } else {
        Turn::Full
    })
}

/// Periodic point or equilibrium from a guess on the orbit of equilibria; `θ0` defaults to the predicted kayak angle.
fn periodic_point(
    cfg: &RunConfig,
    theta0: Option<f64>,
    turn: Option<Turn>,
) -> Result<FixedPoint, CliError> {
    let spec = cfg.model_spec();
    let a = equilibrium_scale(&spec)?;
    let theta0 = match theta0 {
        Some(t) => t,
        None => predict(&spec)?.theta_kayak.unwrap_or(FRAC_PI_2),
    };
    let section = cfg.section().with_turn(resolve_turn(turn, theta0));
    let guess = orbit_point(&SphericalPoint::new(theta0, section.phi0), a);
    Ok(fixed_point(&guess, &spec, &section, &cfg.poincare())?)
}

#[derive(Serialize)]
struct ClassifyFile<'a> {
    fixed_point: &'a FixedPoint,
    orbit: &'a OrbitReport,
}

pub fn cmd_classify(cfg: &RunConfig, args: &ClassifyArgs) -> Result<Outcome, CliError> {
    let fp = periodic_point(cfg, args.theta0, args.turn)?;
    let report = classify_point(&fp.q, &cfg.model_spec(), &cfg.poincare())?;
    let path = output_path(&args.common.out, "orbit.json")?;
    write_json(
        &path,
        &ClassifyFile {
            fixed_point: &fp,
            orbit: &report,
        },
    )?;
    let mut summary = orbit_summary(&report);
    summary.insert(0, format!("Newton residuals: {:?}", fp.residuals));
    Ok(Outcome {
        outputs: vec![path],
        summary,
    })
}

pub fn cmd_floquet(cfg: &RunConfig, args: &FloquetArgs) -> Result<Outcome, CliError> {
    let fp = periodic_point(cfg, args.theta0, args.turn)?;
    let report: FloquetReport = floquet(&fp.q, &cfg.model_spec(), &cfg.poincare())?;
    let mut table = Table::new(&["index", "re", "im", "modulus", "trivial"]);
    for (i, z) in report.multipliers.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            fmt_num(z.re),
            fmt_num(z.im),
            fmt_num(z.norm()),
            (i == report.trivial_index).to_string(),
        ]);
    }
    let csv = output_path(&args.common.out, "floquet.csv")?;
    table.write(&csv)?;
    let json = output_path(&args.common.out, "floquet.json")?;
    write_json(&json, &report)?;
    Ok(Outcome {
        outputs: vec![csv, json],
        summary: vec![
            format!("period = {} ({:?} turn)", report.period, report.turn),
            format!(
                "largest nontrivial |multiplier| = {}",
                report.max_nontrivial
            ),
            format!("stability = {:?}", report.stability),
        ],
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn cmd_verify_order(cfg: &RunConfig, args: &VerifyOrderArgs) -> Result<Outcome, CliError> {
    let spec = cfg.model_spec();
    let (section, pcfg) = (cfg.section(), cfg.poincare());
    let mut table = Table::new(&[
        "theta_rad",
        "beta",
        "d_e0",
        "d_e11",
        "d_e12",
        "d_e21",
        "d_e22",
        "normal_norm",
    ]);
    let mut slopes = Table::new(&["theta_rad", "tangential_slope", "normal_slope"]);
    let mut summary = Vec::new();
    for &theta in &args.thetas {
        let mut tang = Vec::new();
        let mut norm = Vec::new();
        for &beta in &args.betas {
            let d = return_displacement(theta, &[0.0; 3], &spec.with_beta(beta), &section, &pcfg)?;
            let nn = (d[I0].powi(2) + d[I21].powi(2) + d[I22].powi(2)).sqrt();
            tang.push((beta, d[I11].abs()));
            norm.push((beta, nn));
            let mut row = vec![fmt_num(theta), fmt_num(beta)];
            row.extend([d[I0], d[I11], d[I12], d[I21], d[I22], nn].map(fmt_num));
            table.push(row);
        }
        let (st, sn) = (loglog_slope(&tang), loglog_slope(&norm));
        slopes.push(vec![fmt_num(theta), fmt_num(st), fmt_num(sn)]);
        summary.push(format!(
            "θ = {theta}: tangential slope {st:.4}, normal slope {sn:.4}"
        ));
    }
    let p1 = output_path(&args.common.out, "order.csv")?;
    table.write(&p1)?;
    let p2 = output_path(&args.common.out, "order_slopes.csv")?;
    slopes.write(&p2)?;
    Ok(Outcome {
        outputs: vec![p1, p2],
        summary,
    })
}

/// `n` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..n)
            .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn with_param(cfg: &RunConfig, param: SweepParam, value: f64) -> RunConfig {
    let mut c = cfg.clone();
    match param {
        SweepParam::Omega => c.model.omega = value,
        SweepParam::TauLdg => c.model.tau_ldg = value,
        SweepParam::B => c.model.b = value,
        SweepParam::C => c.model.c = value,
        SweepParam::Beta => c.model.beta = value,
    }
    c
}

struct SweepPoint {
    report: BifurcationReport,
    simulated: Option<(f64, bool)>,
}

/// Largest nontrivial Floquet modulus of the tumbling orbit and whether it repels.
pub fn tumbling_verdict(cfg: &RunConfig) -> Result<(f64, bool), CliError> {
    let fp = periodic_point(cfg, Some(FRAC_PI_2), Some(Turn::Half))?;
    let fl = floquet(&fp.q, &cfg.model_spec(), &cfg.poincare())?;
    Ok((fl.max_nontrivial, fl.stability == Stability::Unstable))
}

fn sweep_point(cfg: &RunConfig, simulate: bool) -> Result<SweepPoint, CliError> {
    cfg.validate()?;
    let report = predict(&cfg.model_spec())?;
    let simulated = if simulate {
        Some(tumbling_verdict(cfg)?)
    } else {
        None
    };
    Ok(SweepPoint { report, simulated })
}

pub fn cmd_sweep(cfg: &RunConfig, args: &SweepArgs) -> Result<Outcome, CliError> {
    if args.region {
        return region_sweep(cfg, args);
    }
    let values = linspace(args.from, args.to, args.n);
    let results: Vec<Result<SweepPoint, CliError>> = values
        .par_iter()
        .map(|&v| sweep_point(&with_param(cfg, args.param, v), args.simulate))
        .collect();
    let mut table = Table::new(&[
        "parameter",
        "value",
        "a",
        "lambda",
        "mu",
        "rho",
        "lambda0",
        "lambda2",
        "k_sign",
        "kayak_exists",
        "kayak_stable",
        "theta_kayak_rad",
        "sim_tumbling_max_modulus",
        "sim_kayak_exists",
        "error",
    ]);
    let name = args.param.name();
    let mut flips = Vec::new();
    let mut prev: Option<bool> = None;
    for (v, r) in values.iter().zip(&results) {
        match r {
            Ok(p) => {
                let rep = &p.report;
                let exists = rep.kayak_exists();
                if prev.is_some_and(|e| e != exists) {
                    flips.push(*v);
                }
                prev = Some(exists);
                table.push(vec![
                    name.to_string(),
                    fmt_num(*v),
                    fmt_num(rep.spectral.a),
                    fmt_num(rep.spectral.lambda.nu),
                    fmt_num(rep.spectral.mu.nu),
                    fmt_num(rep.rho),
                    fmt_num(rep.coeffs.lambda0),
                    fmt_num(rep.coeffs.lambda2),
                    rep.k_sign.to_string(),
                    exists.to_string(),
                    rep.kayak.stable.map(|s| s.to_string()).unwrap_or_default(),
                    opt(rep.theta_kayak),
                    opt(p.simulated.map(|s| s.0)),
                    p.simulated.map(|s| s.1.to_string()).unwrap_or_default(),
                    String::new(),
                ]);
            }
            Err(e) => {
                let mut row = vec![name.to_string(), fmt_num(*v)];
                row.extend(std::iter::repeat_n(String::new(), 12));
                row.push(e.to_string());
                table.push(row);
            }
        }
    }
    let path = output_path(&args.common.out, "sweep.csv")?;
    table.write(&path)?;
    let failures = results.iter().filter(|r| r.is_err()).count();
    let mut summary = vec![format!("{} points, {failures} failed", values.len())];
    if !flips.is_empty() {
        summary.push(format!("kayak_exists flips just before {name} = {flips:?}"));
    }
    Ok(Outcome {
        outputs: vec![path],
        summary,
    })
}

fn region_sweep(cfg: &RunConfig, args: &SweepArgs) -> Result<Outcome, CliError> {
    let (b, c) = (cfg.model.b, cfg.model.c);
    let check = ldg_region_check(b, c, cfg.model.omega, args.n_tau);
    let omegas = interior_grid(0.0, args.omega_max, args.n_omega);
    let taus = interior_grid(check.tau_range.0, check.tau_range.1, args.n_tau);
    let grid = region_grid(b, c, &omegas, &taus);
    let mut table = Table::new(&["omega", "tau_ldg", "a", "direct", "verbatim", "disagree"]);
    let mut disagree = 0;
    for p in grid.iter().flatten() {
        disagree += usize::from(p.disagree());
        table.push(vec![
            fmt_num(p.omega),
            fmt_num(p.tau_ldg),
            fmt_num(p.a),
            p.direct.to_string(),
            p.verbatim.to_string(),
            p.disagree().to_string(),
        ]);
    }
    let p1 = output_path(&args.common.out, "region.csv")?;
    table.write(&p1)?;
    let p2 = output_path(&args.common.out, "region.json")?;
    write_json(&p2, &check)?;
    let mut summary = vec![format!(
        "{}×{} grid over ω ∈ (0, {}) and τ ∈ ({}, {}): {disagree} disagreeing points",
        args.n_omega, args.n_tau, args.omega_max, check.tau_range.0, check.tau_range.1
    )];
    summary.extend(check.notes.iter().cloned());
    Ok(Outcome {
        outputs: vec![p1, p2],
        summary,
    })
}
