//! Normalization of an ℓ-convex Legendre curve to `ν(u) = (sin nu, −cos nu)`,
//! which makes `ℓ ≡ n`.
//!
//! With `ψ₁(v) = (1/n)∫₀ᵛ ℓ` and `φ₁ = ψ₁⁻¹`, the curve `(X∘φ₁, ν∘φ₁)` has
//! constant curvature `n` and angle `Θ(0) + nu`. The shift
//! `φ(u) = φ₁(u − θ₀/n)` with `θ₀ = Θ(0) mod 2π` removes the phase.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::curve::{angle_unwrap, grid_point, LegendreCurve, WINDING_TOL};
use crate::fourier::spectral_derivative;
use crate::interp::{MonotoneMap, PeriodicSpline};
use crate::{FlowError, Result, Vec2};

/// Bookkeeping of the parameter change `φ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reparametrization {
    /// `φ(u_j)`, continuous across the period (not reduced mod 2π).
    pub phi: Vec<f64>,
    /// `∂_uφ(u_j) = n/ℓ(φ(u_j))`.
    pub phi_prime: Vec<f64>,
    pub rotation_index: u32,
    /// Phase `θ₀ ∈ [0, 2π)`, so that `φ = φ₁ ∘ φ₂` with `φ₂(u) = u − θ₀/n`.
    pub theta0: f64,
    /// `φ(2π) − φ(0)`.
    pub degree_increment: f64,
}

fn check_ell(ell: &[f64]) -> Result<()> {
    if let Some((index, value)) = ell.iter().copied().enumerate().find(|(_, l)| !(*l > 0.0)) {
        return Err(FlowError::NotConvex { index, value });
    }
    Ok(())
}

/// `ψ₁(v) = (1/n)∫₀ᵛ ℓ` from periodic samples of `ℓ`.
///
/// Cumulative trapezoid quadrature with the endpoint correction
/// `−h²/12·(ℓ'(b) − ℓ'(a))`, where `ℓ'` is the spectral derivative; the
/// correction vanishes over a full period, so `ψ₁(2π)` is the plain
/// trapezoid total.
pub fn build_psi1(ell: &[f64], n: u32) -> Result<MonotoneMap> {
    let len = ell.len();
    if len < 8 {
        return Err(FlowError::GridTooCoarse { got: len, min: 8 });
    }
    check_ell(ell)?;
    if n == 0 {
        return Err(FlowError::InvalidParameter("rotation index must be at least 1".into()));
    }
    let h = TAU / len as f64;
    let turns = ell.iter().sum::<f64>() * h / TAU;
    let residual = (turns - n as f64).abs();
    if residual >= WINDING_TOL {
        return Err(FlowError::InconsistentNormalField { turns, residual });
    }
    let d_ell = spectral_derivative(ell)?;
    let nf = n as f64;
    let mut values = Vec::with_capacity(len + 1);
    let mut acc = 0.0;
    values.push(0.0);
    for j in 0..len {
        let k = (j + 1) % len;
        acc += 0.5 * h * (ell[j] + ell[k]) - h * h / 12.0 * (d_ell[k] - d_ell[j]);
        values.push(acc / nf);
    }
    let slopes = (0..=len).map(|j| ell[j % len] / nf).collect();
    MonotoneMap::new(values, slopes)
}

/// Periodic cubic-spline interpolant of a sampled curve.
#[derive(Debug, Clone)]
pub struct CurveSpline {
    x: PeriodicSpline,
    y: PeriodicSpline,
}

impl CurveSpline {
    pub fn new(points: &[Vec2]) -> Result<Self> {
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
        Ok(CurveSpline { x: PeriodicSpline::new(&xs)?, y: PeriodicSpline::new(&ys)? })
    }

    pub fn eval(&self, u: f64) -> Vec2 {
        Vec2::new(self.x.eval(u), self.y.eval(u))
    }
}

/// Reparametrizes so that the normal is `(sin nu, −cos nu)` on the same grid.
///
/// `ψ₁` is tabulated from the unwrapped angle `Θ` itself, `ψ₁(v_j) =
/// (Θ_j − Θ_0)/n`, with slopes `ℓ/n` from the spectral derivative of the
/// periodic part `Θ − nu`; this avoids integrating a differenced `ℓ`.
pub fn reparametrize(curve: &LegendreCurve) -> Result<(LegendreCurve, Reparametrization)> {
    let len = curve.grid_size();
    if len < 8 {
        return Err(FlowError::GridTooCoarse { got: len, min: 8 });
    }
    let angle = angle_unwrap(curve)?;
    let n = angle.rotation_index;
    let nf = n as f64;
    let periodic: Vec<f64> = angle
        .theta
        .iter()
        .enumerate()
        .map(|(j, t)| t - nf * grid_point(j, len))
        .collect();
    let ell: Vec<f64> = spectral_derivative(&periodic)?.into_iter().map(|d| d + nf).collect();
    check_ell(&ell)?;
    let theta_start = angle.theta[0];
    let values: Vec<f64> = (0..=len as isize).map(|j| (angle.lifted(j) - theta_start) / nf).collect();
    let slopes: Vec<f64> = (0..=len).map(|j| ell[j % len] / nf).collect();
    let psi1 = MonotoneMap::new(values, slopes)?;

    let theta0 = theta_start.rem_euclid(TAU);
    let shift = theta0 / nf;
    let phi: Vec<f64> = (0..len).map(|j| psi1.inverse(grid_point(j, len) - shift)).collect();
    let phi_end = psi1.inverse(TAU - shift);
    let phi_prime: Vec<f64> = phi.iter().map(|p| 1.0 / psi1.derivative(*p)).collect();
    if phi_prime.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(FlowError::Inconsistent("reparametrization lost monotonicity".into()));
    }

    let xs = CurveSpline::new(curve.positions())?;
    let ns = CurveSpline::new(curve.normals())?;
    let positions: Vec<Vec2> = phi.iter().map(|p| xs.eval(*p)).collect();
    let normals: Vec<Vec2> = phi
        .iter()
        .map(|p| {
            let v = ns.eval(*p);
            v / v.norm()
        })
        .collect();
    let out = LegendreCurve::new(positions, normals)?;
    let degree_increment = phi_end - phi[0];
    Ok((
        out,
        Reparametrization { phi, phi_prime, rotation_index: n, theta0, degree_increment },
    ))
}

/// Distance from `p` to the spline through `curve`, minimized locally around
/// the nearest sample.
fn distance_to(p: Vec2, curve: &LegendreCurve, spline: &CurveSpline) -> f64 {
    let pts = curve.positions();
    let (j, _) = pts
        .iter()
        .enumerate()
        .map(|(j, q)| (j, (*q - p).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty curve");
    let h = curve.spacing();
    let centre = grid_point(j, pts.len());
    // golden-section search over a two-cell window around the nearest node
    let f = |u: f64| (spline.eval(u) - p).norm();
    let (mut a, mut b) = (centre - h, centre + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min((pts[j] - p).norm())
}

/// Symmetric Hausdorff distance between the images of two sampled curves,
/// each taken as its periodic spline interpolant.
pub fn hausdorff_distance(a: &LegendreCurve, b: &LegendreCurve) -> Result<f64> {
    let sa = CurveSpline::new(a.positions())?;
    let sb = CurveSpline::new(b.positions())?;
    let ab = a.positions().iter().map(|p| distance_to(*p, b, &sb)).fold(0.0, f64::max);
    let ba = b.positions().iter().map(|p| distance_to(*p, a, &sa)).fold(0.0, f64::max);
    Ok(ab.max(ba))
}
