//! Sampled Legendre curves, their moving frames and Legendre curvature.
//!
//! A curve is stored on the uniform periodic grid `u_j = 2πj/N`; all index
//! arithmetic wraps modulo `N`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::spectral::SpectralBeta;
use crate::{FlowError, Result, Vec2};

/// Unit-length tolerance for normal vectors.
pub const UNIT_TOL: f64 = 1e-12;

/// Smallest grid on which curvature is computed.
pub const MIN_GRID: usize = 8;

/// Maximum allowed distance of the total turning from an integer.
pub const WINDING_TOL: f64 = 1e-6;

/// The uniform grid `u_j = 2πj/n`.
pub fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| grid_point(j, n)).collect()
}

#[inline]
pub fn grid_point(j: usize, n: usize) -> f64 {
    TAU * j as f64 / n as f64
}

/// A closed frontal `X` together with its unit normal field `ν`.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreCurve {
    positions: Vec<Vec2>,
    normals: Vec<Vec2>,
}

impl LegendreCurve {
    pub fn new(positions: Vec<Vec2>, normals: Vec<Vec2>) -> Result<Self> {
        if positions.len() != normals.len() {
            return Err(FlowError::LengthMismatch {
                what: "normals",
                got: normals.len(),
                expected: positions.len(),
            });
        }
        if positions.len() < 3 {
            return Err(FlowError::GridTooCoarse {
                got: positions.len(),
                min: 3,
            });
        }
        for nu in &normals {
            check_unit(*nu)?;
        }
        Ok(LegendreCurve { positions, normals })
    }

    /// Samples `f(u) = (X(u), ν(u))` on the `n`-point grid.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> (Vec2, Vec2)) -> Result<Self> {
        let (positions, normals) = grid(n).into_iter().map(f).unzip();
        LegendreCurve::new(positions, normals)
    }

    pub fn grid_size(&self) -> usize {
        self.positions.len()
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.grid_size() as f64
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn normals(&self) -> &[Vec2] {
        &self.normals
    }

    /// Tangents `μ = Jν`.
    pub fn tangents(&self) -> Vec<Vec2> {
        self.normals.iter().map(|nu| nu.perp()).collect()
    }

    /// `max_j |⟨ΔX/Δu, ν⟩|` with centered periodic differences; `O(Δu²)`
    /// for a smooth Legendre curve.
    pub fn frontal_residual(&self) -> f64 {
        let n = self.grid_size();
        let h = self.spacing();
        (0..n)
            .map(|j| {
                let dx = (self.positions[(j + 1) % n] - self.positions[(j + n - 1) % n]) / (2.0 * h);
                dx.dot(self.normals[j]).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Mean position `(1/2π)∫X du` by the periodic trapezoid rule.
    pub fn centroid(&self) -> Vec2 {
        let sum = self.positions.iter().fold(Vec2::ZERO, |acc, p| acc + *p);
        sum / self.grid_size() as f64
    }

    pub fn translated(&self, by: Vec2) -> LegendreCurve {
        LegendreCurve {
            positions: self.positions.iter().map(|p| *p + by).collect(),
            normals: self.normals.clone(),
        }
    }
}

/// Samples of the Legendre curvature `(ℓ, β)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendreCurvature {
    pub ell: Vec<f64>,
    pub beta: Vec<f64>,
}

impl LegendreCurvature {
    pub fn is_l_convex(&self) -> bool {
        self.ell.iter().all(|&l| l > 0.0)
    }

    /// Classical curvature `ℓ/|β|` at sample `j`, if the point is regular.
    pub fn classical_curvature(&self, j: usize) -> Option<f64> {
        let b = self.beta[j];
        (b != 0.0).then(|| self.ell[j] / b.abs())
    }
}

fn check_unit(nu: Vec2) -> Result<()> {
    let norm = nu.norm();
    if (norm - 1.0).abs() > UNIT_TOL || !norm.is_finite() {
        return Err(FlowError::NonUnitNormal { norm });
    }
    Ok(())
}

/// The tangent `μ = Jν` of a unit normal.
pub fn frame_from_normal(nu: Vec2) -> Result<Vec2> {
    check_unit(nu)?;
    Ok(nu.perp())
}

/// `ℓ = ⟨∂_u ν, μ⟩` and `β = ⟨∂_u X, μ⟩` by centered periodic differences.
pub fn curvature_from_samples(curve: &LegendreCurve) -> Result<LegendreCurvature> {
    let n = curve.grid_size();
    if n < MIN_GRID {
        return Err(FlowError::GridTooCoarse { got: n, min: MIN_GRID });
    }
    let h = curve.spacing();
    let x = curve.positions();
    let nu = curve.normals();
    let (ell, beta) = (0..n)
        .map(|j| {
            let (prev, next) = ((j + n - 1) % n, (j + 1) % n);
            let mu = nu[j].perp();
            let dnu = (nu[next] - nu[prev]) / (2.0 * h);
            let dx = (x[next] - x[prev]) / (2.0 * h);
            (dnu.dot(mu), dx.dot(mu))
        })
        .unzip();
    Ok(LegendreCurvature { ell, beta })
}

/// Legendre curvature of an open arc sampled with uniform spacing `h`.
///
/// Interior samples use centered differences; the two end samples use
/// second-order one-sided differences.
pub fn curvature_on_arc(positions: &[Vec2], normals: &[Vec2], h: f64) -> Result<LegendreCurvature> {
    let n = positions.len();
    if normals.len() != n {
        return Err(FlowError::LengthMismatch {
            what: "normals",
            got: normals.len(),
            expected: n,
        });
    }
    if n < 3 {
        return Err(FlowError::GridTooCoarse { got: n, min: 3 });
    }
    for nu in normals {
        check_unit(*nu)?;
    }
    let diff = |f: &[Vec2], j: usize| -> Vec2 {
        if j == 0 {
            (f[0] * -3.0 + f[1] * 4.0 - f[2]) / (2.0 * h)
        } else if j == n - 1 {
            (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) / (2.0 * h)
        } else {
            (f[j + 1] - f[j - 1]) / (2.0 * h)
        }
    };
    let (ell, beta) = (0..n)
        .map(|j| {
            let mu = normals[j].perp();
            (diff(normals, j).dot(mu), diff(positions, j).dot(mu))
        })
        .unzip();
    Ok(LegendreCurvature { ell, beta })
}

/// Unwrapped angle function `Θ` with `ν = (sin Θ, −cos Θ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleField {
    pub theta: Vec<f64>,
    pub rotation_index: u32,
}

impl AngleField {
    /// `Θ(2π) − Θ(0)`; exactly `2πn` by construction.
    pub fn total_turning(&self) -> f64 {
        TAU * self.rotation_index as f64
    }

    /// Angle of sample `j` for any integer `j`, lifted across periods.
    pub fn lifted(&self, j: isize) -> f64 {
        let n = self.theta.len() as isize;
        let wraps = j.div_euclid(n);
        self.theta[j.rem_euclid(n) as usize] + wraps as f64 * self.total_turning()
    }

    /// `ℓ = ∂_uΘ` by centered differences of the unwrapped angle.
    pub fn ell(&self) -> Vec<f64> {
        let n = self.theta.len();
        let h = TAU / n as f64;
        (0..n as isize)
            .map(|j| (self.lifted(j + 1) - self.lifted(j - 1)) / (2.0 * h))
            .collect()
    }

    /// `max_j |ν_j − (sin Θ_j, −cos Θ_j)|`.
    pub fn normal_mismatch(&self, curve: &LegendreCurve) -> f64 {
        self.theta
            .iter()
            .zip(curve.normals())
            .map(|(t, nu)| (Vec2::normal_at(*t) - *nu).norm())
            .fold(0.0, f64::max)
    }
}

#[inline]
fn angle_of_normal(nu: Vec2) -> f64 {
    nu.x.atan2(-nu.y)
}

/// Wraps an angle increment into `(−π, π]`.
#[inline]
fn wrap_increment(d: f64) -> f64 {
    let w = d.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Continues `Θ` sample to sample along the nearest branch.
///
/// Requires strictly positive increments (ℓ-convexity); the total turning
/// must be an integer multiple of `2π` within [`WINDING_TOL`].
pub fn angle_unwrap(curve: &LegendreCurve) -> Result<AngleField> {
    let nu = curve.normals();
    let n = nu.len();
    let mut theta = Vec::with_capacity(n);
    let mut current = angle_of_normal(nu[0]);
    theta.push(current);
    let mut total = 0.0;
    for j in 0..n {
        let next = angle_of_normal(nu[(j + 1) % n]);
        let d = wrap_increment(next - angle_of_normal(nu[j]));
        if d <= 0.0 {
            return Err(FlowError::NotConvex {
                index: j,
                value: d / curve.spacing(),
            });
        }
        total += d;
        if j + 1 < n {
            current += d;
            theta.push(current);
        }
    }
    let turns = total / TAU;
    let rounded = turns.round();
    let residual = (turns - rounded).abs();
    if residual >= WINDING_TOL || rounded < 1.0 {
        return Err(FlowError::InconsistentNormalField { turns, residual });
    }
    Ok(AngleField {
        theta,
        rotation_index: rounded as u32,
    })
}

/// Trapezoid quadrature of `∫ β(u)(cos nu, sin nu) du`; zero iff the curve
/// rebuilt from `β` with `ν = (sin nu, −cos nu)` closes up.
pub fn check_closure(beta: &[f64], n: u32) -> Vec2 {
    let len = beta.len();
    let h = TAU / len as f64;
    beta.iter()
        .enumerate()
        .fold(Vec2::ZERO, |acc, (j, b)| {
            acc + Vec2::tangent_at(n as f64 * grid_point(j, len)) * *b
        })
        * h
}

/// Max-norm residuals of the evolution equations along an exact flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricResiduals {
    /// `∂_tβ − (∂_u²β/n² + β)`.
    pub beta_flow: f64,
    /// `∂_tβ − (Nℓ + ∂_uT)` with `N = β/ℓ`, `T = ∂_uβ/ℓ²`.
    pub beta_general: f64,
    /// `β²∂_tℓ − β∂_u(Tℓ − ∂_uN) + ∂_uβ(Tℓ − ∂_uN)` with `∂_tℓ = 0`.
    pub ell_general: f64,
}

/// Evaluates the geometric evolution equations on the `grid`-point grid at
/// time `t`, using exact mode-wise time and space derivatives.
pub fn residual_geometric_equations(flow: &SpectralBeta, t: f64, grid: usize) -> GeometricResiduals {
    let n = flow.rotation_index() as f64;
    let ell = n;
    let beta = flow.beta_at(t);
    let beta_t = flow.beta_time_derivative(t);
    let d1 = beta.derivative(1);
    let d2 = beta.derivative(2);
    let (b, bt, b1, b2) = (
        beta.sample(grid),
        beta_t.sample(grid),
        d1.sample(grid),
        d2.sample(grid),
    );
    // ℓ ≡ n along the special flow
    let ell_t = 0.0;
    let mut out = GeometricResiduals {
        beta_flow: 0.0,
        beta_general: 0.0,
        ell_general: 0.0,
    };
    for j in 0..grid {
        out.beta_flow = out.beta_flow.max((bt[j] - (b2[j] / (n * n) + b[j])).abs());

        let normal_velocity = b[j] / ell;
        let du_tangent_velocity = b2[j] / (ell * ell);
        out.beta_general = out
            .beta_general
            .max((bt[j] - (normal_velocity * ell + du_tangent_velocity)).abs());

        // W = Tℓ − ∂_uN and its u-derivative, with ∂_uℓ = 0.
        let w = b1[j] / (ell * ell) * ell - b1[j] / ell;
        let dw = b2[j] / (ell * ell) * ell - b2[j] / ell;
        out.ell_general = out
            .ell_general
            .max((b[j] * b[j] * ell_t - (b[j] * dw - b1[j] * w)).abs());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n_grid: usize, n: u32, c1: f64) -> LegendreCurve {
        let nf = n as f64;
        LegendreCurve::from_fn(n_grid, |u| {
            (Vec2::normal_at(nf * u) * (c1 / nf), Vec2::normal_at(nf * u))
        })
        .unwrap()
    }

    #[test]
    fn frame_examples() {
        let mu = frame_from_normal(Vec2::new(0.0, -1.0)).unwrap();
        assert_eq!(mu, Vec2::new(1.0, 0.0));
        assert_eq!(frame_from_normal(Vec2::new(1.0, 0.0)).unwrap(), Vec2::new(0.0, 1.0));
        for u in [0.0, 0.4, 1.3, 2.9, 5.5] {
            let mu = frame_from_normal(Vec2::normal_at(u)).unwrap();
            assert!((mu - Vec2::tangent_at(u)).norm() < 1e-15);
            assert!((mu.norm() - 1.0).abs() < 1e-15);
            assert!(mu.dot(Vec2::normal_at(u)).abs() < 1e-15);
        }
    }

    #[test]
    fn frame_rejects_non_unit() {
        let err = frame_from_normal(Vec2::new(1.0, 1.0)).unwrap_err();
        match err {
            FlowError::NonUnitNormal { norm } => assert!((norm - 2f64.sqrt()).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn double_rotation_is_negation() {
        for u in [0.1, 1.0, 2.5, 4.0] {
            let nu = Vec2::normal_at(u);
            let twice = frame_from_normal(frame_from_normal(nu).unwrap()).unwrap();
            assert!((twice + nu).norm() < 1e-15);
        }
    }

    #[test]
    fn circle_curvature_is_constant() {
        let curve = circle(512, 2, 1.0);
        let k = curvature_from_samples(&curve).unwrap();
        let h = curve.spacing();
        for (l, b) in k.ell.iter().zip(&k.beta) {
            assert!((l - 2.0).abs() < 4.0 * h * h, "ℓ = {l}");
            assert!((b - 1.0).abs() < 4.0 * h * h, "β = {b}");
        }
        assert!(k.is_l_convex());
    }

    #[test]
    fn circle_curvature_error_is_second_order() {
        let err = |g: usize| {
            let k = curvature_from_samples(&circle(g, 2, 1.0)).unwrap();
            k.ell.iter().map(|l| (l - 2.0).abs()).fold(0.0, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn cusp_arc_curvature() {
        let n = 401;
        let h = 2.0 / (n - 1) as f64;
        let us: Vec<f64> = (0..n).map(|j| -1.0 + h * j as f64).collect();
        let pos: Vec<Vec2> = us.iter().map(|u| Vec2::new(u * u / 2.0, u * u * u / 3.0)).collect();
        let nor: Vec<Vec2> = us
            .iter()
            .map(|u| Vec2::new(*u, -1.0) / (1.0 + u * u).sqrt())
            .collect();
        let k = curvature_on_arc(&pos, &nor, h).unwrap();
        for (j, u) in us.iter().enumerate() {
            let ell = 1.0 / (1.0 + u * u);
            let beta = u * (1.0 + u * u).sqrt();
            assert!((k.ell[j] - ell).abs() < 10.0 * h * h, "ℓ at {u}");
            assert!((k.beta[j] - beta).abs() < 10.0 * h * h, "β at {u}");
        }
        assert!(k.is_l_convex());
        // regular points: ℓ/|β| is the curvature of the semicubical parabola
        let j = 300;
        let u = us[j];
        let kappa = 1.0 / (u.abs() * (1.0 + u * u).powf(1.5));
        assert!((k.classical_curvature(j).unwrap() - kappa).abs() < 1e-3);
    }

    #[test]
    fn constant_curve_has_zero_beta() {
        let p = Vec2::new(0.3, -2.0);
        let curve = LegendreCurve::from_fn(64, |u| (p, Vec2::normal_at(u + 0.2 * u.sin()))).unwrap();
        let k = curvature_from_samples(&curve).unwrap();
        assert!(k.beta.iter().all(|b| *b == 0.0));
    }

    #[test]
    fn coarse_grid_rejected() {
        let curve = circle(6, 1, 1.0);
        assert!(matches!(
            curvature_from_samples(&curve),
            Err(FlowError::GridTooCoarse { got: 6, min: 8 })
        ));
    }

    #[test]
    fn frontal_residual_converges_at_second_order() {
        // warped circle: X = (sin ψ, −cos ψ), ν = (sin ψ, −cos ψ) shifted frame
        let make = |g: usize| {
            LegendreCurve::from_fn(g, |u| {
                let psi = u + 0.3 * u.sin();
                (Vec2::normal_at(psi) * 1.5 + Vec2::new(0.2, 0.1), Vec2::normal_at(psi))
            })
            .unwrap()
            .frontal_residual()
        };
        let (r1, r2, r4) = (make(64), make(128), make(256));
        assert!(r1 / r2 > 3.8 && r2 / r4 > 3.9, "{r1} {r2} {r4}");
    }

    #[test]
    fn unwrap_examples() {
        let c = LegendreCurve::from_fn(256, |u| (Vec2::ZERO, Vec2::normal_at(2.0 * u))).unwrap();
        let a = angle_unwrap(&c).unwrap();
        assert_eq!(a.rotation_index, 2);
        for (j, t) in a.theta.iter().enumerate() {
            assert!((t - 2.0 * grid_point(j, 256)).abs() < 1e-12);
        }
        assert!(a.normal_mismatch(&c) < 1e-10);

        let warp = LegendreCurve::from_fn(256, |u| (Vec2::ZERO, Vec2::normal_at(u + 0.3 * u.sin()))).unwrap();
        let a = angle_unwrap(&warp).unwrap();
        assert_eq!(a.rotation_index, 1);
        for (j, t) in a.theta.iter().enumerate() {
            let u = grid_point(j, 256);
            assert!((t - (u + 0.3 * u.sin())).abs() < 1e-12);
        }

        let c3 = LegendreCurve::from_fn(256, |u| (Vec2::ZERO, Vec2::normal_at(3.0 * u + 1.0))).unwrap();
        assert_eq!(angle_unwrap(&c3).unwrap().rotation_index, 3);
    }

    #[test]
    fn unwrap_rejects_non_convex() {
        let c = LegendreCurve::from_fn(256, |u| (Vec2::ZERO, Vec2::normal_at(u + 1.5 * u.sin()))).unwrap();
        assert!(matches!(angle_unwrap(&c), Err(FlowError::NotConvex { .. })));
    }

    #[test]
    fn angle_field_ell_matches_rotation() {
        let c = LegendreCurve::from_fn(128, |u| (Vec2::ZERO, Vec2::normal_at(3.0 * u))).unwrap();
        let a = angle_unwrap(&c).unwrap();
        assert!(a.ell().iter().all(|l| (l - 3.0).abs() < 1e-12));
    }

    #[test]
    fn closure_examples() {
        let n = 256;
        let us = grid(n);
        let r = check_closure(&us.iter().map(|u| (2.0 * u).cos()).collect::<Vec<_>>(), 1);
        assert!(r.norm() < 1e-14);
        let r = check_closure(&us.iter().map(|u| u.cos()).collect::<Vec<_>>(), 1);
        assert!((r.x - PI).abs() < 1e-13 && r.y.abs() < 1e-13);
        let r = check_closure(&vec![3.0; n], 1);
        assert!(r.norm() < 1e-13);
    }

    #[test]
    fn geometric_residual_examples() {
        let s = SpectralBeta::from_modes(1, 1.0, &[]).unwrap();
        let r = residual_geometric_equations(&s, 0.7, 256);
        assert!(r.beta_flow < 1e-12 && r.beta_general < 1e-12 && r.ell_general < 1e-12);

        let s = SpectralBeta::from_modes(1, 0.0, &[(2, 1.0, 0.0)]).unwrap();
        let r = residual_geometric_equations(&s, 0.5, 256);
        assert!(r.beta_flow < 1e-10 && r.beta_general < 1e-10 && r.ell_general < 1e-10);

        let s = SpectralBeta::from_modes(2, 0.0, &[(3, 0.4, 0.0), (5, 0.0, 0.2)]).unwrap();
        let r = residual_geometric_equations(&s, 1.0, 256);
        assert!(r.beta_flow < 1e-10 && r.beta_general < 1e-10 && r.ell_general < 1e-10);
    }
}
