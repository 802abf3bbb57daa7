//! One function per subcommand. Each writes its artifacts and returns the
//! verification failures it found, if any.

use legendre_flow::asymptotics::{fit_decay_rate, FIT_WINDOW};
use legendre_flow::curve::{curvature_from_samples, grid, grid_point, LegendreCurvature, LegendreCurve};
use legendre_flow::cusps::{detect_strict_decrease, find_zeros, log_grid, CuspReport};
use legendre_flow::fd::{observed_order, solve_beta_fd, solve_phi_fd, FDGrid, Scheme};
use legendre_flow::fourier::spectral_derivative;
use legendre_flow::io::{read_curve_csv_file, render_svg, write_curve_csv, SvgStyle};
use legendre_flow::reparam::{hausdorff_distance, reparametrize};
use legendre_flow::self_similar::CATALOG;
use legendre_flow::spectral::{evolve_beta, evolve_curve, reconstruct_initial_curve, truncation_residual};
use legendre_flow::{analyze_beta, SelfSimilarProfile, SpectralBeta, Vec2};
use serde::Serialize;

use crate::config::{Coefficients, Equation, RunConfig, Source};
use crate::error::{CliError, Result};
use crate::output::Outputs;

fn curve_csv(curve: &LegendreCurve, curvature: Option<&LegendreCurvature>, t: Option<f64>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_curve_csv(&mut buf, curve, curvature, t)?;
    Ok(buf)
}

fn svg(curve: &LegendreCurve) -> Result<String> {
    Ok(render_svg(curve.positions(), &SvgStyle::default())?)
}

/// How a sampled input curve was turned into spectral data.
#[derive(Debug, Serialize)]
struct CurveIntake {
    rotation_index: u32,
    theta0: f64,
    truncation: usize,
    /// `‖β₀ − synthesis‖∞` of the retained modes.
    truncation_residual: f64,
    /// `max |X₀ − normalized input|` after rebuilding from the spectrum.
    reconstruction_gap: f64,
}

struct Initial {
    s: SpectralBeta,
    x0: LegendreCurve,
    intake: Option<CurveIntake>,
}

fn read_curve(path: &std::path::Path) -> Result<LegendreCurve> {
    read_curve_csv_file(path)
        .map(|t| t.curve)
        .map_err(|e| CliError::Input { path: path.display().to_string(), source: e })
}

fn initial(config: &RunConfig) -> Result<Initial> {
    let base = Vec2::new(config.base[0], config.base[1]);
    match config.source()? {
        Source::Coefficients(c) => {
            let s = c.spectral()?;
            let x0 = reconstruct_initial_curve(&s, base, config.grid())?;
            Ok(Initial { s, x0, intake: None })
        }
        Source::Profile(p) => {
            let profile = p.profile()?;
            let s = profile.spectral();
            let x0 = reconstruct_initial_curve(&s, base + profile.position(0.0), config.grid())?;
            Ok(Initial { s, x0, intake: None })
        }
        Source::Curve(path) => {
            let input = read_curve(&path)?;
            let (normal, r) = reparametrize(&input)?;
            let len = normal.grid_size();
            let n = r.rotation_index;
            let xs: Vec<f64> = normal.positions().iter().map(|p| p.x).collect();
            let ys: Vec<f64> = normal.positions().iter().map(|p| p.y).collect();
            let (dx, dy) = (spectral_derivative(&xs)?, spectral_derivative(&ys)?);
            let beta: Vec<f64> = normal
                .normals()
                .iter()
                .enumerate()
                .map(|(j, nu)| Vec2::new(dx[j], dy[j]).dot(nu.perp()))
                .collect();
            // keep K + n below the Nyquist band so that X₀ can be checked spectrally
            let k_max = ((len - 2) / 2).saturating_sub(n as usize);
            let s = analyze_beta(&beta, n, k_max)?;
            let x0 = reconstruct_initial_curve(&s, normal.positions()[0], len)?;
            let gap = x0
                .positions()
                .iter()
                .zip(normal.positions())
                .map(|(a, b)| (*a - *b).norm())
                .fold(0.0, f64::max);
            let intake = CurveIntake {
                rotation_index: n,
                theta0: r.theta0,
                truncation: k_max,
                truncation_residual: truncation_residual(&beta, &s),
                reconstruction_gap: gap,
            };
            Ok(Initial { s, x0, intake: Some(intake) })
        }
    }
}

#[derive(Debug, Serialize)]
struct SimulationSummary<'a> {
    rotation_index: u32,
    truncation: usize,
    center: Vec2,
    intake: Option<&'a CurveIntake>,
    frames: Vec<Frame>,
}

#[derive(Debug, Serialize)]
struct Frame {
    t: f64,
    csv: String,
    svg: String,
    centroid: Vec2,
    zero_count: usize,
}

pub fn simulate(config: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let init = initial(config)?;
    let times = config.times.clone().unwrap_or_else(|| vec![0.0, 0.5, 1.0]);
    let mut frames = Vec::new();
    for (i, &t) in times.iter().enumerate() {
        let state = evolve_curve(&init.s, &init.x0, t)?;
        let (csv, svg_name) = (format!("curve_{i:03}.csv"), format!("curve_{i:03}.svg"));
        out.bytes(&csv, &curve_csv(&state.curve, Some(&state.curvature), Some(t))?)?;
        out.bytes(&svg_name, svg(&state.curve)?.as_bytes())?;
        let zero_count = match find_zeros(&init.s, t) {
            Ok(r) => r.count,
            Err(_) => 0,
        };
        frames.push(Frame { t, csv, svg: svg_name, centroid: state.curve.centroid(), zero_count });
    }
    let summary = SimulationSummary {
        rotation_index: init.s.rotation_index(),
        truncation: init.s.truncation(),
        center: init.x0.centroid(),
        intake: init.intake.as_ref(),
        frames,
    };
    out.json("summary.json", &summary)?;
    Ok(Vec::new())
}

#[derive(Debug, Serialize)]
struct ProfileEntry {
    n: u32,
    m: u32,
    c1: f64,
    c2: f64,
    lap_count: u32,
    cusp_count: u32,
    growth_rate: f64,
    samples: usize,
    csv: String,
    svg: String,
}

fn emit_profile(p: &SelfSimilarProfile, stem: &str, samples: usize, out: &mut Outputs) -> Result<ProfileEntry> {
    let curve = p.sample(samples)?;
    let curvature = LegendreCurvature {
        ell: vec![p.n() as f64; samples],
        beta: (0..samples).map(|j| p.beta(grid_point(j, samples))).collect(),
    };
    let (csv, svg_name) = (format!("{stem}.csv"), format!("{stem}.svg"));
    out.bytes(&csv, &curve_csv(&curve, Some(&curvature), None)?)?;
    out.bytes(&svg_name, svg(&curve)?.as_bytes())?;
    let (c1, c2) = p.constants();
    Ok(ProfileEntry {
        n: p.n(),
        m: p.m(),
        c1,
        c2,
        lap_count: p.lap_count(),
        cusp_count: p.cusp_count(),
        growth_rate: p.growth_rate(),
        samples,
        csv,
        svg: svg_name,
    })
}

pub fn self_similar(config: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let mut entries = Vec::new();
    if config.catalog {
        for (i, &(n, m, c1, c2)) in CATALOG.iter().enumerate() {
            let p = SelfSimilarProfile::new(n, m, c1, c2)?;
            let samples = config.grid.unwrap_or(p.render_grid());
            entries.push(emit_profile(&p, &format!("profile_{:02}_n{n}_m{m}", i + 1), samples, out)?);
        }
    } else {
        let p = config.profile.expect("validated").profile()?;
        let samples = config.grid.unwrap_or(p.render_grid());
        entries.push(emit_profile(&p, "profile", samples, out)?);
    }
    out.json("index.json", &entries)?;
    Ok(Vec::new())
}

#[derive(Debug, Serialize)]
struct ReparamReport {
    rotation_index: u32,
    theta0: f64,
    degree_increment: f64,
    min_phi_prime: f64,
    max_phi_prime: f64,
    /// `max |ℓ − n|` of the output, by centered differences.
    ell_deviation: f64,
    hausdorff_distance: f64,
}

pub fn reparam(config: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let Source::Curve(path) = config.source()? else { unreachable!("validated") };
    let input = read_curve(&path)?;
    let (normal, r) = reparametrize(&input)?;
    let k = curvature_from_samples(&normal)?;
    let n = r.rotation_index as f64;
    let report = ReparamReport {
        rotation_index: r.rotation_index,
        theta0: r.theta0,
        degree_increment: r.degree_increment,
        min_phi_prime: r.phi_prime.iter().copied().fold(f64::INFINITY, f64::min),
        max_phi_prime: r.phi_prime.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ell_deviation: k.ell.iter().map(|l| (l - n).abs()).fold(0.0, f64::max),
        hausdorff_distance: hausdorff_distance(&input, &normal)?,
    };
    out.bytes("normalized.csv", &curve_csv(&normal, Some(&k), None)?)?;
    out.json("reparam.json", &report)?;
    Ok(Vec::new())
}

#[derive(Debug, Serialize)]
struct CuspSummary<'a> {
    reports: &'a [CuspReport],
    events: Vec<legendre_flow::cusps::DecreaseEvent>,
}

pub fn cusps(config: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let init = initial(config)?;
    let times = config.times.clone().unwrap_or_else(|| log_grid(0.01, 10.0, 30));
    let reports = times.iter().map(|&t| find_zeros(&init.s, t)).collect::<legendre_flow::Result<Vec<_>>>()?;
    let series: Vec<(f64, usize)> = reports.iter().map(|r| (r.t, r.count)).collect();
    let mut failures = Vec::new();
    for w in series.windows(2) {
        if w[1].1 > w[0].1 {
            failures.push(format!("zero count rose from {} at t = {} to {} at t = {}", w[0].1, w[0].0, w[1].1, w[1].0));
        }
    }
    let events = detect_strict_decrease(&init.s, &series)?;
    for e in &events {
        if !e.witness.is_some_and(|w| w.is_degenerate()) {
            failures.push(format!("no degenerate zero found near the drop at t ≈ {:.6}", e.time));
        }
    }
    let mut csv = String::from("t,z,events\n");
    for &(t, z) in &series {
        let n_events = events.iter().filter(|e| e.interval.1 == t).count();
        csv.push_str(&format!("{t:?},{z},{n_events}\n"));
    }
    out.bytes("cusps.csv", csv.as_bytes())?;
    out.json("cusps.json", &CuspSummary { reports: &reports, events })?;
    Ok(failures)
}

pub fn converge(config: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let init = initial(config)?;
    let times = config
        .times
        .clone()
        .unwrap_or_else(|| (0..=10).map(|i| 1.0 + 0.5 * i as f64).collect());
    let report = fit_decay_rate(&init.s, &init.x0, &times, FIT_WINDOW)?;
    let mut csv = String::from("t,scaled_error\n");
    for (t, e) in &report.errors {
        csv.push_str(&format!("{t:?},{e:?}\n"));
    }
    out.bytes("converge.csv", csv.as_bytes())?;
    out.json("converge.json", &report)?;
    let mut failures = Vec::new();
    if let Some(rel) = report.relative_rate_error() {
        if rel >= 0.01 {
            failures.push(format!(
                "fitted rate {:?} differs from the predicted {:?} by {:.2}%",
                report.fitted_rate,
                report.predicted_rate,
                rel * 100.0
            ));
        }
    }
    if !report.envelope_ok {
        failures.push("scaled error leaves the ε-envelope".into());
    }
    Ok(failures)
}

#[derive(Debug, Serialize)]
struct BetaOracleReport {
    equation: Equation,
    grid: FDGrid,
    refined_grid: FDGrid,
    t_end: f64,
    error: f64,
    refined_error: f64,
    observed_order: f64,
    required_order: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct PhiOracleReport {
    equation: Equation,
    grid: FDGrid,
    t_end: f64,
    forcing_amplitude: f64,
    warp: f64,
    accepted_steps: usize,
    halvings: u32,
    initial_min_gradient: f64,
    initial_max_gradient: f64,
    final_min_gradient: f64,
    final_max_gradient: f64,
    /// Largest relative excess over the gradient bounds; `≤ 0` means they hold.
    bound_violation: f64,
    max_integral_error: f64,
    pass: bool,
}

fn beta_error(s: &SpectralBeta, t_end: f64, grid: &FDGrid) -> Result<f64> {
    let beta0 = s.coefficients().sample(grid.n_points);
    let r = solve_beta_fd(&beta0, s.rotation_index(), t_end, grid)?;
    Ok(r.beta
        .iter()
        .enumerate()
        .map(|(j, b)| (b - evolve_beta(s, t_end, grid_point(j, grid.n_points))).abs())
        .fold(0.0, f64::max))
}

pub fn oracle_check(config: &RunConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let o = &config.oracle;
    let mut failures = Vec::new();
    match o.equation {
        Equation::Beta => {
            let coeffs = config.coefficients.clone().unwrap_or(Coefficients::parse(1, "2:1")?);
            let s = coeffs.spectral()?;
            let g = FDGrid { n_points: o.n_points, dt: o.dt, scheme: o.scheme, stencil: o.stencil };
            // explicit steps scale with h², so halving h quarters dt
            let refine = if o.scheme == Scheme::ExplicitEuler { 4.0 } else { 2.0 };
            let fine = FDGrid { n_points: 2 * o.n_points, dt: o.dt / refine, ..g };
            let (e1, e2) = (beta_error(&s, o.t_end, &g)?, beta_error(&s, o.t_end, &fine)?);
            let order = observed_order(e1, e2);
            let pass = order >= 1.9;
            if !pass {
                failures.push(format!("observed order {order:.3} below 1.9"));
            }
            out.json(
                "oracle.json",
                &BetaOracleReport {
                    equation: o.equation,
                    grid: g,
                    refined_grid: fine,
                    t_end: o.t_end,
                    error: e1,
                    refined_error: e2,
                    observed_order: order,
                    required_order: 1.9,
                    pass,
                },
            )?;
        }
        Equation::Phi => {
            let g = FDGrid::explicit(o.n_points, o.dt);
            let phi0: Vec<f64> = grid(o.n_points).iter().map(|u| u + o.warp * u.sin()).collect();
            let a = o.forcing;
            let tr = solve_phi_fd(&phi0, &|_, _| 1.0, &|u, _| a * u.sin(), o.t_end, &g)?;
            let (first, last) = (tr.steps[0], *tr.steps.last().expect("initial step recorded"));
            let violation = tr.bound_violation();
            let integral = tr.max_integral_error();
            let pass = violation <= 0.0 && integral < 1e-8;
            if violation > 0.0 {
                failures.push(format!("gradient bounds exceeded by {violation:.3e} (relative)"));
            }
            if integral >= 1e-8 {
                failures.push(format!("∫∂_uφ du drifted from 2π by {integral:.3e}"));
            }
            out.json(
                "oracle.json",
                &PhiOracleReport {
                    equation: o.equation,
                    grid: g,
                    t_end: o.t_end,
                    forcing_amplitude: a,
                    warp: o.warp,
                    accepted_steps: tr.steps.len() - 1,
                    halvings: tr.halvings,
                    initial_min_gradient: first.min_grad,
                    initial_max_gradient: first.max_grad,
                    final_min_gradient: last.min_grad,
                    final_max_gradient: last.max_grad,
                    bound_violation: violation,
                    max_integral_error: integral,
                    pass,
                },
            )?;
            let mut csv = String::from("t,min_grad,max_grad,m\n");
            for s in tr.steps.iter().step_by((tr.steps.len() / 200).max(1)) {
                csv.push_str(&format!("{:?},{:?},{:?},{:?}\n", s.t, s.min_grad, s.max_grad, s.m));
            }
            out.bytes("phi_gradients.csv", csv.as_bytes())?;
        }
    }
    Ok(failures)
}
