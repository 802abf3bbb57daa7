//! Zeros of `β(·, t)` and the monotone zero count `z(t)`.
//!
//! Between consecutive critical points `β` is monotone, so each such arc holds
//! at most one zero, found by bisection when its end values have opposite
//! signs. Critical points where `|β|` itself is negligible are tangential zeros,
//! which a plain sign scan would miss.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::curve::grid_point;
use crate::fourier::TrigPoly;
use crate::spectral::SpectralBeta;
use crate::{FlowError, Result};

/// Bisection stops once `|β| < ZERO_TOL·scale`.
pub const ZERO_TOL: f64 = 1e-13;
/// A critical point with `|β| ≤ TANGENTIAL_TOL·scale` counts as a zero.
pub const TANGENTIAL_TOL: f64 = 1e-10;
/// Zeros with `|∂_uβ| ≤ SLOPE_TOL·scale` are degenerate.
pub const SLOPE_TOL: f64 = 1e-8;
/// Zeros closer than this are merged.
pub const SEPARATION_TOL: f64 = 1e-7;
/// Event times are refined to this width.
pub const EVENT_RESOLUTION: f64 = 1e-6;
/// A witness needs `|β|, |∂_uβ| < WITNESS_TOL·scale`.
pub const WITNESS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    /// `β = 0`, `∂_uβ ≠ 0`: a (2,3)-cusp of the frontal.
    SimpleCusp,
    /// `β = ∂_uβ = 0`.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zero {
    pub u: f64,
    pub slope: f64,
    pub kind: ZeroKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspReport {
    pub t: f64,
    pub zeros: Vec<Zero>,
    pub count: usize,
    /// `‖β(·, t)‖∞` on the scan grid; all thresholds are relative to it.
    pub scale: f64,
}

impl CuspReport {
    pub fn simple_cusps(&self) -> usize {
        self.zeros.iter().filter(|z| z.kind == ZeroKind::SimpleCusp).count()
    }
}

fn scan_grid(s: &SpectralBeta) -> usize {
    512.max(16 * s.truncation())
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, stop: impl Fn(f64) -> bool) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 || stop(fm) {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Critical points of a trigonometric polynomial, sorted in `[0, 2π)`.
fn critical_points(beta: &TrigPoly, grid_size: usize) -> Vec<f64> {
    let d = beta.derivative(1);
    let vals = d.sample(grid_size);
    let mut out = Vec::new();
    for j in 0..grid_size {
        let (a, b) = (vals[j], vals[(j + 1) % grid_size]);
        let lo = grid_point(j, grid_size);
        let hi = lo + TAU / grid_size as f64;
        if a == 0.0 {
            out.push(lo);
        } else if b != 0.0 && (a > 0.0) != (b > 0.0) {
            out.push(bisect(|u| d.eval(u), lo, hi, |_| false).rem_euclid(TAU));
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Zeros of an arbitrary trigonometric polynomial `beta`.
pub fn zeros_of(beta: &TrigPoly, grid_size: usize, t: f64) -> Result<CuspReport> {
    let samples = beta.sample(grid_size);
    let scale = samples.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    if !(scale > f64::MIN_POSITIVE) || !scale.is_finite() {
        return Err(FlowError::DegenerateState { t });
    }
    let slope = beta.derivative(1);
    let crit = critical_points(beta, grid_size);
    let mut found: Vec<f64> = Vec::new();
    if crit.is_empty() {
        // β is constant and nonzero
    } else {
        for (i, &c) in crit.iter().enumerate() {
            if beta.eval(c).abs() <= TANGENTIAL_TOL * scale {
                found.push(c);
            }
            let next = if i + 1 < crit.len() { crit[i + 1] } else { crit[0] + TAU };
            let (fa, fb) = (beta.eval(c), beta.eval(next));
            if fa != 0.0 && fb != 0.0 && (fa > 0.0) != (fb > 0.0) {
                let z = bisect(|u| beta.eval(u), c, next, |v| v.abs() < ZERO_TOL * scale);
                found.push(z.rem_euclid(TAU));
            }
        }
    }
    found.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::new();
    for u in found {
        match merged.last_mut() {
            Some(prev) if circular_gap(*prev, u) < SEPARATION_TOL => {
                if beta.eval(u).abs() < beta.eval(*prev).abs() {
                    *prev = u;
                }
            }
            _ => merged.push(u),
        }
    }
    if merged.len() > 1 && circular_gap(merged[0], *merged.last().unwrap()) < SEPARATION_TOL {
        merged.pop();
    }
    let zeros: Vec<Zero> = merged
        .into_iter()
        .map(|u| {
            let d = slope.eval(u);
            let kind = if d.abs() > SLOPE_TOL * scale { ZeroKind::SimpleCusp } else { ZeroKind::Degenerate };
            Zero { u, slope: d, kind }
        })
        .collect();
    Ok(CuspReport { t, count: zeros.len(), zeros, scale })
}

/// Zeros of `β(·, t)`.
pub fn find_zeros(s: &SpectralBeta, t: f64) -> Result<CuspReport> {
    zeros_of(&s.beta_at(t), scan_grid(s), t)
}

/// Zeros of raw periodic samples, for data that need not be band-limited.
///
/// Runs of samples with `|β| ≤ tol·scale` spanning two or more points are
/// reported as flat segments rather than zeros, since the zero count is not
/// defined there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledZeros {
    pub zeros: Vec<f64>,
    pub flat_segments: Vec<(f64, f64)>,
}

pub fn find_zeros_sampled(samples: &[f64], tol: f64) -> SampledZeros {
    let n = samples.len();
    let scale = samples.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let small = |j: usize| samples[j % n].abs() <= tol * scale;
    let mut out = SampledZeros { zeros: Vec::new(), flat_segments: Vec::new() };
    if n == 0 || scale == 0.0 {
        if n > 0 {
            out.flat_segments.push((0.0, TAU));
        }
        return out;
    }
    // start the sweep on a sample that is clearly nonzero
    let start = (0..n).find(|&j| !small(j)).expect("scale > 0");
    let mut j = 0;
    while j < n {
        let i = start + j;
        if small(i) {
            let mut len = 1;
            while small(i + len) {
                len += 1;
            }
            let a = grid_point(i % n, n);
            let b = grid_point((i + len - 1) % n, n);
            if len >= 2 {
                out.flat_segments.push((a, b));
            } else {
                out.zeros.push(a);
            }
            j += len;
            continue;
        }
        let (x, y) = (samples[i % n], samples[(i + 1) % n]);
        if !small(i + 1) && (x > 0.0) != (y > 0.0) {
            let h = TAU / n as f64;
            out.zeros.push((grid_point(i % n, n) + h * x / (x - y)).rem_euclid(TAU));
        }
        j += 1;
    }
    out.zeros.sort_by(f64::total_cmp);
    out
}

/// `(t, z(t))` over strictly increasing positive times.
///
/// Any increase of the count is reported as an invariant violation.
pub fn zero_count_series(s: &SpectralBeta, times: &[f64]) -> Result<Vec<(f64, usize)>> {
    if times.iter().any(|t| !(*t > 0.0)) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FlowError::InvalidParameter(
            "times must be positive and strictly increasing".into(),
        ));
    }
    let mut out: Vec<(f64, usize)> = Vec::with_capacity(times.len());
    for &t in times {
        let z = find_zeros(s, t)?.count;
        if let Some(&(t0, z0)) = out.last() {
            if z > z0 {
                return Err(FlowError::InvariantViolation(format!(
                    "zero count rose from {z0} at t = {t0} to {z} at t = {t}"
                )));
            }
        }
        out.push((t, z));
    }
    Ok(out)
}

/// A point near which `β = ∂_uβ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub u: f64,
    pub t: f64,
    /// `|β|/scale` at the witness.
    pub beta: f64,
    /// `|∂_uβ|/scale` at the witness.
    pub slope: f64,
}

impl Witness {
    pub fn is_degenerate(&self) -> bool {
        self.beta < WITNESS_TOL && self.slope < WITNESS_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecreaseEvent {
    pub interval: (f64, f64),
    pub time: f64,
    pub from: usize,
    pub to: usize,
    pub witness: Option<Witness>,
}

fn residual(s: &SpectralBeta, u: f64, t: f64) -> Option<(f64, f64, f64)> {
    let beta = s.beta_at(t);
    let scale = beta.sample(scan_grid(s)).iter().fold(0.0f64, |m, b| m.max(b.abs()));
    if scale == 0.0 {
        return None;
    }
    Some((beta.eval(u) / scale, beta.derivative(1).eval(u) / scale, scale))
}

/// Damped Gauss–Newton on `(β, ∂_uβ) = 0` in `(u, t)`, starting at `(u, t)`.
/// The damping keeps the step defined when the Jacobian is singular, as at a
/// triple zero.
fn polish_witness(s: &SpectralBeta, mut u: f64, mut t: f64, window: (f64, f64)) -> Option<Witness> {
    let (mut r0, mut r1, mut scale) = residual(s, u, t)?;
    let mut cost = r0 * r0 + r1 * r1;
    for _ in 0..60 {
        if cost == 0.0 {
            break;
        }
        let bt = s.beta_at(t);
        let dt = s.beta_time_derivative(t);
        let j00 = bt.derivative(1).eval(u) / scale;
        let j01 = dt.eval(u) / scale;
        let j10 = bt.derivative(2).eval(u) / scale;
        let j11 = dt.derivative(1).eval(u) / scale;
        // (JᵀJ + μI)δ = −Jᵀr
        let a = j00 * j00 + j10 * j10;
        let b = j00 * j01 + j10 * j11;
        let c = j01 * j01 + j11 * j11;
        let mu = 1e-12 * (a + c).max(1e-300);
        let g0 = j00 * r0 + j10 * r1;
        let g1 = j01 * r0 + j11 * r1;
        let det = (a + mu) * (c + mu) - b * b;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let du = -((c + mu) * g0 - b * g1) / det;
        let dtt = -((a + mu) * g1 - b * g0) / det;
        let (nu, nt) = (u + du, (t + dtt).clamp(window.0, window.1));
        let Some((q0, q1, qs)) = residual(s, nu, nt) else { break };
        let next = q0 * q0 + q1 * q1;
        if next >= cost {
            break;
        }
        (u, t, r0, r1, scale, cost) = (nu, nt, q0, q1, qs, next);
    }
    Some(Witness { u: u.rem_euclid(TAU), t, beta: r0.abs(), slope: r1.abs() })
}

/// Locates the drops in a zero-count series, refines each event time by
/// bisection on the count, and searches for a degenerate zero near it.
pub fn detect_strict_decrease(s: &SpectralBeta, series: &[(f64, usize)]) -> Result<Vec<DecreaseEvent>> {
    let mut events = Vec::new();
    for w in series.windows(2) {
        let ((t0, z0), (t1, z1)) = (w[0], w[1]);
        if z1 >= z0 {
            continue;
        }
        let (mut lo, mut hi) = (t0, t1);
        while hi - lo > EVENT_RESOLUTION {
            let mid = 0.5 * (lo + hi);
            if find_zeros(s, mid)?.count >= z0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let time = 0.5 * (lo + hi);
        let report = find_zeros(s, time)?;
        let beta = s.beta_at(time);
        let mut starts: Vec<f64> = critical_points(&beta, scan_grid(s));
        starts.extend(report.zeros.iter().map(|z| z.u));
        let window = (t0, t1);
        let witness = starts
            .into_iter()
            .filter_map(|u| polish_witness(s, u, time, window))
            .filter(|w| (w.t - time).abs() <= 1e-3)
            .min_by(|a, b| a.beta.max(a.slope).total_cmp(&b.beta.max(b.slope)));
        events.push(DecreaseEvent { interval: (t0, t1), time, from: z0, to: z1, witness });
    }
    Ok(events)
}

/// Logarithmically spaced times in `[a, b]`.
pub fn log_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..points)
        .map(|i| (la + (lb - la) * i as f64 / (points - 1) as f64).exp())
        .collect()
}
