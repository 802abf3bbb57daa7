//! Long-time behaviour: centering, the leading mode, and decay of the
//! rescaled flow towards its self-similar attractor.
//!
//! Writing `X(u, t) − p = Σ_k e^{λ_k t}A_k(u)` with mean-free mode curves
//! `A_k`, the rescaled error is `Σ_{k≠m} e^{(λ_k − λ_m)t}A_k(u)`. Evaluating
//! that sum directly keeps full relative precision however small the error
//! gets, whereas `(X − p)/λ* − X*` bottoms out at roughly `ε_mach·e^{|λ_m|t}`.

use serde::Serialize;

use crate::curve::{grid_point, LegendreCurve};
use crate::fourier::TrigPoly;
use crate::spectral::{centered_position, check_consistency, eigenvalue, evolve_curve, mode_antiderivative, SpectralBeta};
use crate::{FlowError, Result, Vec2};

/// Coefficients below this fraction of the largest one count as absent.
pub const MODE_THRESHOLD: f64 = 1e-12;
/// Default fit window.
pub const FIT_WINDOW: (f64, f64) = (1.0, 6.0);
/// Errors below this fraction of `‖X*‖∞` are treated as underflow. The
/// modal sum keeps full relative precision, so only the approach to the
/// subnormal range counts; the direct form would need `1e−14` here.
pub const UNDERFLOW: f64 = 1e-280;
/// Tolerance between the direct and the modal evolution of `X − p`.
pub const MODAL_CONSISTENCY_TOL: f64 = 1e-8;

/// `p = (1/2π)∫X₀ du`, by the periodic trapezoid rule.
pub fn center_point(x0: &LegendreCurve) -> Vec2 {
    x0.centroid()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeadingMode {
    pub m: u32,
    pub a: f64,
    pub b: f64,
}

fn present(s: &SpectralBeta, k: u32) -> bool {
    let cut = MODE_THRESHOLD * s.coefficients().max_coefficient();
    let (a, b) = if k == 0 { (s.a0(), 0.0) } else { s.mode(k) };
    a.abs() > cut || b.abs() > cut
}

/// The first mode with a non-negligible coefficient; `m = 0` iff `a₀ ≠ 0`.
pub fn leading_mode(s: &SpectralBeta) -> LeadingMode {
    let m = (0..=s.truncation() as u32)
        .find(|k| present(s, *k))
        .expect("spectral data is nonzero");
    let (a, b) = if m == 0 { (s.a0(), 0.0) } else { s.mode(m) };
    LeadingMode { m, a, b }
}

/// The next surviving mode after `m`, ignoring the `k = n` band.
pub fn next_mode(s: &SpectralBeta, m: u32) -> Option<u32> {
    let n = s.rotation_index();
    (m + 1..=s.truncation() as u32).find(|k| *k != n && present(s, *k))
}

fn leading_checked(s: &SpectralBeta) -> Result<LeadingMode> {
    let lead = leading_mode(s);
    if lead.m == s.rotation_index() {
        return Err(FlowError::Inconsistent(format!(
            "leading mode equals the rotation index {}; closed data cannot start at the n-band",
            lead.m
        )));
    }
    Ok(lead)
}

/// `X*_{n,m,a_m,b_m}` at `u`, the attractor of the rescaled flow.
pub fn attractor(s: &SpectralBeta, u: f64) -> Result<Vec2> {
    let lead = leading_checked(s)?;
    Ok(mode_antiderivative(s.rotation_index(), lead.m, lead.a, lead.b, u))
}

/// `(X(·, t) − p)/λ*(t) − X*` on the grid of `grid_size` points, in modal form.
fn modal_error(s: &SpectralBeta, lead: LeadingMode, t: f64, grid_size: usize) -> Vec<Vec2> {
    let n = s.rotation_index();
    let lm = eigenvalue(n, lead.m);
    let mut terms: Vec<(u32, f64, f64, f64)> = Vec::new();
    for k in 0..=s.truncation() as u32 {
        if k == lead.m || k == n || !present(s, k) {
            continue;
        }
        let (a, b) = if k == 0 { (s.a0(), 0.0) } else { s.mode(k) };
        terms.push((k, a, b, ((eigenvalue(n, k) - lm) * t).exp()));
    }
    (0..grid_size)
        .map(|j| {
            let u = grid_point(j, grid_size);
            terms
                .iter()
                .fold(Vec2::ZERO, |acc, &(k, a, b, w)| acc + mode_antiderivative(n, k, a, b, u) * w)
        })
        .collect()
}

fn sup(v: &[Vec2]) -> f64 {
    v.iter().map(|p| p.norm()).fold(0.0, f64::max)
}

/// `sup_u |(X(u, t) − p)/λ*_{n,m}(t) − X*_{n,m,a_m,b_m}(u)|` on the grid of `x0`.
///
/// `x0` supplies the centre `p` and is checked against the spectral data and
/// against the modal form of the evolution.
pub fn scaled_error(s: &SpectralBeta, x0: &LegendreCurve, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(FlowError::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    let lead = leading_checked(s)?;
    check_consistency(s, x0)?;
    let p = center_point(x0);
    let state = evolve_curve(s, x0, t)?;
    let len = x0.grid_size();
    let gap = state
        .curve
        .positions()
        .iter()
        .enumerate()
        .map(|(j, x)| (*x - p - centered_position(s, t, grid_point(j, len))).norm())
        .fold(0.0, f64::max);
    let size = x0.positions().iter().map(|x| (*x - p).norm()).fold(1.0, f64::max);
    if gap > MODAL_CONSISTENCY_TOL * size * t.exp().max(1.0) {
        return Err(FlowError::Inconsistent(format!(
            "direct and modal evolution differ by {gap:.3e} at t = {t}"
        )));
    }
    Ok(sup(&modal_error(s, lead, t, len)))
}

/// The same quantity evaluated from the evolved curve directly; it carries a
/// floating-point floor of about `ε_mach·|X|/λ*(t)`.
pub fn scaled_error_direct(s: &SpectralBeta, x0: &LegendreCurve, t: f64) -> Result<f64> {
    let lead = leading_checked(s)?;
    let p = center_point(x0);
    let state = evolve_curve(s, x0, t)?;
    let lambda = (eigenvalue(s.rotation_index(), lead.m) * t).exp();
    let len = x0.grid_size();
    Ok(state
        .curve
        .positions()
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let u = grid_point(j, len);
            ((*x - p) / lambda - mode_antiderivative(s.rotation_index(), lead.m, lead.a, lead.b, u)).norm()
        })
        .fold(0.0, f64::max))
}

/// Least-squares slope of `ln y` against `t`.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|(_, y)| !(*y > 0.0)) {
        return None;
    }
    let n = points.len() as f64;
    let mt = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in points {
        sxy += (t - mt) * (y.ln() - my);
        sxx += (t - mt) * (t - mt);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub leading_mode: u32,
    pub center: Vec2,
    /// `(t, scaled sup-norm error)`.
    pub errors: Vec<(f64, f64)>,
    /// `None` for exactly self-similar data.
    pub fitted_rate: Option<f64>,
    /// `λ_{k′} − λ_m`, `k′` the next surviving mode.
    pub predicted_rate: Option<f64>,
    pub window: (f64, f64),
    pub exactly_self_similar: bool,
    /// The weaker envelope `error·e^{εt/n²}` with `ε = (k′² − m²)/2` stays
    /// bounded by its value at the start of the window.
    pub envelope_ok: bool,
}

impl ConvergenceReport {
    pub fn relative_rate_error(&self) -> Option<f64> {
        match (self.fitted_rate, self.predicted_rate) {
            (Some(f), Some(p)) => Some(((f - p) / p).abs()),
            _ => None,
        }
    }
}

fn profile_scale(s: &SpectralBeta, grid_size: usize) -> Result<f64> {
    let mut scale = 0.0f64;
    for j in 0..grid_size {
        scale = scale.max(attractor(s, grid_point(j, grid_size))?.norm());
    }
    Ok(scale)
}

/// Collects scaled errors at `times` and fits the decay rate over the part
/// of `times` inside `window`.
///
/// If any error in the window underflows, the window is cut just before the
/// first such time and the fit is retried once.
pub fn fit_decay_rate(s: &SpectralBeta, x0: &LegendreCurve, times: &[f64], window: (f64, f64)) -> Result<ConvergenceReport> {
    let lead = leading_checked(s)?;
    let center = center_point(x0);
    let mut errors = Vec::with_capacity(times.len());
    for &t in times {
        errors.push((t, scaled_error(s, x0, t)?));
    }
    let mut report = ConvergenceReport {
        leading_mode: lead.m,
        center,
        errors,
        fitted_rate: None,
        predicted_rate: None,
        window,
        exactly_self_similar: false,
        envelope_ok: true,
    };
    let Some(k) = next_mode(s, lead.m) else {
        report.exactly_self_similar = true;
        return Ok(report);
    };
    let n = s.rotation_index();
    let predicted = eigenvalue(n, k) - eigenvalue(n, lead.m);
    report.predicted_rate = Some(predicted);

    let floor = UNDERFLOW * profile_scale(s, x0.grid_size())?;
    let mut win = window;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for attempt in 0..2 {
        pts = report.errors.iter().copied().filter(|(t, _)| *t >= win.0 && *t <= win.1).collect();
        match pts.iter().find(|(_, e)| *e < floor) {
            None => break,
            Some(&(t_bad, _)) if attempt == 0 => {
                win.1 = pts.iter().map(|p| p.0).filter(|t| *t < t_bad).fold(win.0, f64::max);
            }
            Some(_) => {
                return Err(FlowError::Inconsistent(
                    "scaled error underflows throughout the fit window".into(),
                ))
            }
        }
    }
    if pts.len() < 5 {
        return Err(FlowError::InvalidParameter(format!(
            "need at least 5 error samples in [{}, {}], got {}",
            win.0,
            win.1,
            pts.len()
        )));
    }
    report.window = win;
    report.fitted_rate = fit_log_slope(&pts);

    let eps = ((k * k - lead.m * lead.m) as f64) / 2.0;
    let damp = eps / (n * n) as f64;
    let ratios: Vec<f64> = pts.iter().map(|(t, e)| e * (damp * t).exp()).collect();
    report.envelope_ok = ratios.iter().all(|r| *r <= ratios[0] * (1.0 + 1e-9));
    Ok(report)
}

/// `sup_u |∂_uⁱ(β(·,t) − β̃(·,t))|/e^{λ_m t}` with `β̃` the leading mode alone.
pub fn scaled_beta_derivative_error(s: &SpectralBeta, t: f64, order: u32, grid_size: usize) -> Result<f64> {
    let lead = leading_checked(s)?;
    let n = s.rotation_index();
    let lm = eigenvalue(n, lead.m);
    let mut rest = s.coefficients().scale_modes(|k| {
        if k as u32 == lead.m {
            0.0
        } else {
            ((eigenvalue(n, k as u32) - lm) * t).exp()
        }
    });
    if lead.m == 0 {
        rest.a0 = 0.0;
    }
    let d: TrigPoly = rest.derivative(order);
    Ok(d.sample(grid_size).iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Fitted decay rate of [`scaled_beta_derivative_error`] for each order.
pub fn derivative_rates(s: &SpectralBeta, orders: &[u32], times: &[f64], grid_size: usize) -> Result<Vec<(u32, Option<f64>)>> {
    orders
        .iter()
        .map(|&i| {
            let pts = times
                .iter()
                .map(|&t| Ok((t, scaled_beta_derivative_error(s, t, i, grid_size)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((i, fit_log_slope(&pts)))
        })
        .collect()
}
