//! Closed-form solution of the special inverse curvature flow.
//!
//! With `ℓ ≡ n` the singular-speed function obeys `∂_tβ = ∂_u²β/n² + β`,
//! whose Fourier modes evolve independently with rates `λ_k = 1 − k²/n²`.
//! The curve is rebuilt from `β` by integrating `∂_tX = (β/n)ν + (∂_uβ/n²)μ`
//! in time, which is again exact mode by mode.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::curve::{check_closure, grid, grid_point, LegendreCurvature, LegendreCurve};
use crate::fourier::{project, spectral_derivative, TrigPoly};
use crate::{FlowError, Result, Vec2};

/// `|a_n|, |b_n|` above this reject the data as not closed.
pub const CLOSURE_TOL: f64 = 1e-8;

/// Closure gap `|X(2π) − X(0)|` tolerated when rebuilding a curve.
pub const RECONSTRUCTION_CLOSURE_TOL: f64 = 1e-10;

/// `max|∂_uX₀ − β₀μ|` tolerated when pairing a sampled curve with its spectrum.
pub const CONSISTENCY_TOL: f64 = 1e-8;

/// Tolerance for `ν₀ = (sin nu, −cos nu)` on a supplied initial curve.
pub const NORMAL_FORM_TOL: f64 = 1e-10;

/// `λ_k = 1 − k²/n²`.
pub fn eigenvalue(n: u32, k: u32) -> f64 {
    let (n, k) = (n as f64, k as f64);
    1.0 - (k * k) / (n * n)
}

/// `∫₀ᵗ e^{λτ} dτ`, with the `λ = 0` limit taken explicitly.
pub fn time_integral(lambda: f64, t: f64) -> f64 {
    if lambda == 0.0 {
        t
    } else {
        (lambda * t).exp_m1() / lambda
    }
}

/// Fourier data of `β₀` together with the rotation index `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralBeta {
    n: u32,
    coefficients: TrigPoly,
}

impl SpectralBeta {
    pub fn new(n: u32, coefficients: TrigPoly) -> Result<Self> {
        if n == 0 {
            return Err(FlowError::InvalidParameter("rotation index must be at least 1".into()));
        }
        if coefficients.max_coefficient() == 0.0 {
            return Err(FlowError::PointCurve);
        }
        let (a, b) = coefficients.mode(n as usize);
        if a.abs() > CLOSURE_TOL || b.abs() > CLOSURE_TOL {
            return Err(FlowError::NotClosed { a, b });
        }
        Ok(SpectralBeta { n, coefficients })
    }

    /// Builds the data from `a₀` and sparse `(k, a_k, b_k)` triples.
    pub fn from_modes(n: u32, a0: f64, modes: &[(u32, f64, f64)]) -> Result<Self> {
        let top = modes.iter().map(|m| m.0 as usize).max().unwrap_or(0);
        let mut cos = vec![0.0; top];
        let mut sin = vec![0.0; top];
        for &(k, a, b) in modes {
            if k == 0 {
                return Err(FlowError::InvalidParameter(
                    "mode 0 is the mean; pass it as a0".into(),
                ));
            }
            cos[k as usize - 1] += a;
            sin[k as usize - 1] += b;
        }
        SpectralBeta::new(n, TrigPoly::new(a0, cos, sin))
    }

    pub fn rotation_index(&self) -> u32 {
        self.n
    }

    pub fn coefficients(&self) -> &TrigPoly {
        &self.coefficients
    }

    pub fn a0(&self) -> f64 {
        self.coefficients.a0
    }

    pub fn mode(&self, k: u32) -> (f64, f64) {
        self.coefficients.mode(k as usize)
    }

    /// Top retained frequency `K`.
    pub fn truncation(&self) -> usize {
        self.coefficients.degree()
    }

    pub fn eigenvalue(&self, k: u32) -> f64 {
        eigenvalue(self.n, k)
    }

    /// `β(·, t)` as a trigonometric polynomial.
    pub fn beta_at(&self, t: f64) -> TrigPoly {
        self.coefficients
            .scale_modes(|k| (eigenvalue(self.n, k as u32) * t).exp())
    }

    /// `∂_tβ(·, t)`, differentiated mode by mode.
    pub fn beta_time_derivative(&self, t: f64) -> TrigPoly {
        self.coefficients.scale_modes(|k| {
            let lambda = eigenvalue(self.n, k as u32);
            lambda * (lambda * t).exp()
        })
    }

    /// The data re-based at time `t`, so that `advanced(t₁)` evolved by `t₂`
    /// equals the original evolved by `t₁ + t₂`.
    pub fn advanced(&self, t: f64) -> Result<SpectralBeta> {
        SpectralBeta::new(self.n, self.beta_at(t))
    }
}

/// Discrete trigonometric projection of `β₀` onto modes `0..=k_max`.
pub fn analyze_beta(beta0: &[f64], n: u32, k_max: usize) -> Result<SpectralBeta> {
    if beta0.iter().all(|b| b.abs() < 1e-14) {
        return Err(FlowError::PointCurve);
    }
    let poly = project(beta0, k_max)?;
    SpectralBeta::new(n, poly)
}

/// [`analyze_beta`] with the default truncation `K = N/2 − 1`.
pub fn analyze_beta_full(beta0: &[f64], n: u32) -> Result<SpectralBeta> {
    analyze_beta(beta0, n, (beta0.len().max(2) - 2) / 2)
}

/// `‖β₀ − synthesis‖∞`, the part of `β₀` not captured by the truncation.
pub fn truncation_residual(beta0: &[f64], s: &SpectralBeta) -> f64 {
    let synth = s.coefficients().sample(beta0.len());
    beta0
        .iter()
        .zip(&synth)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// `β(u, t) = e^t a₀ + Σ e^{λ_k t}(a_k cos ku + b_k sin ku)`.
pub fn evolve_beta(s: &SpectralBeta, t: f64, u: f64) -> f64 {
    s.beta_at(t).eval(u)
}

/// Exact antiderivative of `(a cos ku + b sin ku)(cos nu, sin nu)`, using
/// product-to-sum expansion. Mean-free for `k ≠ n`.
pub(crate) fn mode_antiderivative(n: u32, k: u32, a: f64, b: f64, u: f64) -> Vec2 {
    let nf = n as f64;
    if k == 0 {
        return Vec2::normal_at(nf * u) * (a / nf);
    }
    let kf = k as f64;
    if k == n {
        let s2 = (2.0 * nf * u).sin();
        let sq = (nf * u).sin().powi(2) / (2.0 * nf);
        return Vec2::new(
            a * (u / 2.0 + s2 / (4.0 * nf)) + b * sq,
            a * sq + b * (u / 2.0 - s2 / (4.0 * nf)),
        );
    }
    let (sp, cp) = ((nf + kf) * u).sin_cos();
    let (sm, cm) = ((nf - kf) * u).sin_cos();
    let (p, m) = (nf + kf, nf - kf);
    let cos_part = Vec2::new(sp / p + sm / m, -cp / p - cm / m) * (a / 2.0);
    let sin_part = Vec2::new(-cp / p + cm / m, -sp / p + sm / m) * (b / 2.0);
    cos_part + sin_part
}

/// `Σ_k A_k(u)` over all modes of `poly`, `A_k` the mode antiderivatives.
fn antiderivative(n: u32, poly: &TrigPoly, u: f64) -> Vec2 {
    let mut acc = mode_antiderivative(n, 0, poly.a0, 0.0, u);
    for k in 1..=poly.degree() as u32 {
        let (a, b) = poly.mode(k as usize);
        if a != 0.0 || b != 0.0 {
            acc += mode_antiderivative(n, k, a, b, u);
        }
    }
    acc
}

/// `X₀(u) = base + ∫₀ᵘ β₀μ dv` with `ν₀ = (sin nu, −cos nu)`, sampled on `grid_size` points.
pub fn reconstruct_initial_curve(s: &SpectralBeta, base_point: Vec2, grid_size: usize) -> Result<LegendreCurve> {
    let min = 2 * s.truncation() + 2;
    if grid_size < min.max(crate::curve::MIN_GRID) {
        return Err(FlowError::GridTooCoarse {
            got: grid_size,
            min: min.max(crate::curve::MIN_GRID),
        });
    }
    let n = s.rotation_index();
    let (a, b) = s.mode(n);
    let gap = antiderivative(n, s.coefficients(), TAU) - antiderivative(n, s.coefficients(), 0.0);
    if gap.norm() > RECONSTRUCTION_CLOSURE_TOL {
        return Err(FlowError::NotClosed { a, b });
    }
    let origin = antiderivative(n, s.coefficients(), 0.0);
    let nf = n as f64;
    LegendreCurve::from_fn(grid_size, |u| {
        (
            base_point + antiderivative(n, s.coefficients(), u) - origin,
            Vec2::normal_at(nf * u),
        )
    })
}

/// The base point for which [`reconstruct_initial_curve`] yields a curve
/// with the given centroid.
pub fn base_point_for_centroid(s: &SpectralBeta, centroid: Vec2) -> Vec2 {
    centroid + antiderivative(s.rotation_index(), s.coefficients(), 0.0)
}

/// `X(u, t) − p = Σ_k e^{λ_k t} A_k(u)` for the curve whose centroid is `p`.
///
/// This is the flow written in its self-similar modes; it avoids the
/// cancellation between `X₀` and the accumulated displacement for
/// shrinking flows. The `k = n` band is excluded (it vanishes for closed data).
pub fn centered_position(s: &SpectralBeta, t: f64, u: f64) -> Vec2 {
    let n = s.rotation_index();
    let at_t = s.beta_at(t);
    let mut acc = mode_antiderivative(n, 0, at_t.a0, 0.0, u);
    for k in 1..=at_t.degree() as u32 {
        if k == n {
            continue;
        }
        let (a, b) = at_t.mode(k as usize);
        if a != 0.0 || b != 0.0 {
            acc += mode_antiderivative(n, k, a, b, u);
        }
    }
    acc
}

/// The evolved curve, its Legendre curvature, and the time.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub curve: LegendreCurve,
    pub curvature: LegendreCurvature,
}

impl FlowState {
    /// `max_u |⟨∂_uX, ν⟩|` with `∂_uX` from spectral differentiation.
    pub fn frontal_residual(&self) -> Result<f64> {
        let (dx, dy) = spectral_gradient(&self.curve)?;
        Ok(self
            .curve
            .normals()
            .iter()
            .enumerate()
            .map(|(j, nu)| Vec2::new(dx[j], dy[j]).dot(*nu).abs())
            .fold(0.0, f64::max))
    }

    /// `max_u |∂_uX − βμ|`.
    pub fn legendre_residual(&self) -> Result<f64> {
        let (dx, dy) = spectral_gradient(&self.curve)?;
        Ok(self
            .curve
            .normals()
            .iter()
            .enumerate()
            .map(|(j, nu)| (Vec2::new(dx[j], dy[j]) - nu.perp() * self.curvature.beta[j]).norm())
            .fold(0.0, f64::max))
    }
}

fn spectral_gradient(curve: &LegendreCurve) -> Result<(Vec<f64>, Vec<f64>)> {
    let xs: Vec<f64> = curve.positions().iter().map(|p| p.x).collect();
    let ys: Vec<f64> = curve.positions().iter().map(|p| p.y).collect();
    Ok((spectral_derivative(&xs)?, spectral_derivative(&ys)?))
}

/// Checks that `x0` is the curve described by `s`: normals in normal form and
/// `∂_uX₀ = β₀μ` under spectral differentiation.
pub fn check_consistency(s: &SpectralBeta, x0: &LegendreCurve) -> Result<()> {
    let grid_size = x0.grid_size();
    let n = s.rotation_index();
    let min = 2 * (s.truncation() + n as usize) + 2;
    if grid_size < min {
        return Err(FlowError::GridTooCoarse { got: grid_size, min });
    }
    let nf = n as f64;
    for (j, nu) in x0.normals().iter().enumerate() {
        let expected = Vec2::normal_at(nf * grid_point(j, grid_size));
        let err = (*nu - expected).norm();
        if err > NORMAL_FORM_TOL {
            return Err(FlowError::Inconsistent(format!(
                "initial normal deviates from (sin nu, −cos nu) by {err:.3e} at sample {j}"
            )));
        }
    }
    let beta0 = s.coefficients().sample(grid_size);
    let scale = beta0.iter().fold(1.0f64, |m, b| m.max(b.abs()));
    let (dx, dy) = spectral_gradient(x0)?;
    for (j, nu) in x0.normals().iter().enumerate() {
        let err = (Vec2::new(dx[j], dy[j]) - nu.perp() * beta0[j]).norm();
        if err > CONSISTENCY_TOL * scale {
            return Err(FlowError::Inconsistent(format!(
                "∂_uX₀ − β₀μ = {err:.3e} at sample {j}; the curve does not match its spectral data"
            )));
        }
    }
    Ok(())
}

/// `X(u, t) = X₀(u) + Σ_k g_k(t)[(β_k/n)ν + (∂_uβ_k/n²)μ]`, `g_k(t) = ∫₀ᵗ e^{λ_k τ}dτ`.
pub fn evolve_curve(s: &SpectralBeta, x0: &LegendreCurve, t: f64) -> Result<FlowState> {
    if !(t >= 0.0) {
        return Err(FlowError::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    check_consistency(s, x0)?;
    let grid_size = x0.grid_size();
    let n = s.rotation_index();
    let nf = n as f64;
    let integrated = s
        .coefficients()
        .scale_modes(|k| time_integral(eigenvalue(n, k as u32), t));
    let along_normal = integrated.sample(grid_size);
    let along_tangent = integrated.derivative(1).sample(grid_size);
    let positions: Vec<Vec2> = x0
        .positions()
        .iter()
        .zip(x0.normals())
        .enumerate()
        .map(|(j, (p, nu))| *p + *nu * (along_normal[j] / nf) + nu.perp() * (along_tangent[j] / (nf * nf)))
        .collect();
    let curve = LegendreCurve::new(positions, x0.normals().to_vec())?;
    Ok(FlowState {
        t,
        curve,
        curvature: LegendreCurvature {
            ell: vec![nf; grid_size],
            beta: s.beta_at(t).sample(grid_size),
        },
    })
}

/// Closure gap of the sampled `β₀` in the module's normal form.
pub fn closure_residual(s: &SpectralBeta, grid_size: usize) -> Vec2 {
    check_closure(&s.coefficients().sample(grid_size), s.rotation_index())
}

/// Uniform grid shared by the sampled representations.
pub fn parameter_grid(grid_size: usize) -> Vec<f64> {
    grid(grid_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue(2, 2), 0.0);
        assert_eq!(eigenvalue(1, 2), -3.0);
        assert_eq!(eigenvalue(3, 0), 1.0);
    }

    #[test]
    fn analyze_examples() {
        let us = grid(128);
        let s = analyze_beta_full(&us.iter().map(|u| (2.0 * u).cos()).collect::<Vec<_>>(), 1).unwrap();
        assert!((s.mode(2).0 - 1.0).abs() < 1e-14);
        assert!(s.a0().abs() < 1e-15);
        let s = analyze_beta(&vec![3.0; 128], 1, 10).unwrap();
        assert!((s.a0() - 3.0).abs() < 1e-14);
        assert_eq!(s.truncation(), 10);
    }

    #[test]
    fn analyze_matches_quadrature_oracle() {
        // oracle: the projection integrals by composite Simpson on a fine grid
        let f = |u: f64| (2.0 * u).cos() + 0.3 * (5.0 * u).sin();
        let simpson = |g: &dyn Fn(f64) -> f64| {
            let m = 4000;
            let h = TAU / m as f64;
            (0..=m)
                .map(|i| {
                    let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    w * g(i as f64 * h)
                })
                .sum::<f64>()
                * h
                / 3.0
        };
        let a2 = simpson(&|u| f(u) * (2.0 * u).cos()) / PI;
        let b5 = simpson(&|u| f(u) * (5.0 * u).sin()) / PI;
        let us = grid(64);
        let s = analyze_beta_full(&us.iter().map(|u| f(*u)).collect::<Vec<_>>(), 1).unwrap();
        assert!((s.mode(2).0 - a2).abs() < 1e-10);
        assert!((s.mode(5).1 - b5).abs() < 1e-10);
        assert!((a2 - 1.0).abs() < 1e-10 && (b5 - 0.3).abs() < 1e-10);
    }

    #[test]
    fn analyze_rejections() {
        assert!(matches!(analyze_beta_full(&[0.0; 64], 1), Err(FlowError::PointCurve)));
        let us = grid(64);
        let cosu: Vec<f64> = us.iter().map(|u| u.cos()).collect();
        assert!(matches!(analyze_beta_full(&cosu, 1), Err(FlowError::NotClosed { .. })));
        assert!(matches!(analyze_beta(&cosu, 2, 40), Err(FlowError::GridTooCoarse { .. })));
    }

    #[test]
    fn round_trip_synthesis_is_exact() {
        let s = SpectralBeta::from_modes(2, 0.3, &[(1, 0.2, -0.1), (3, 0.5, 0.0), (7, 0.0, 0.25)]).unwrap();
        let samples = s.coefficients().sample(64);
        let back = analyze_beta_full(&samples, 2).unwrap();
        assert!(truncation_residual(&samples, &back) < 1e-14);
        for k in 1..=7u32 {
            let (a, b) = s.mode(k);
            let (c, d) = back.mode(k);
            assert!((a - c).abs() < 1e-14 && (b - d).abs() < 1e-14);
        }
    }

    #[test]
    fn evolve_beta_examples() {
        let s = SpectralBeta::from_modes(1, 1.0, &[]).unwrap();
        assert!((evolve_beta(&s, 1.0, 0.4) - E).abs() < 1e-15);
        let s = SpectralBeta::from_modes(1, 0.0, &[(2, 1.0, 0.0)]).unwrap();
        for (t, u) in [(0.3f64, 0.1f64), (1.0, 2.0), (2.5, 4.0)] {
            let expected = (-3.0 * t).exp() * (2.0 * u).cos();
            assert!((evolve_beta(&s, t, u) - expected).abs() < 1e-15);
        }
        let s = SpectralBeta::from_modes(3, 0.2, &[(1, 0.4, 0.1), (5, -0.3, 0.7)]).unwrap();
        for u in [0.0, 1.0, 3.0] {
            assert_eq!(evolve_beta(&s, 0.0, u), s.coefficients().eval(u));
        }
    }

    #[test]
    fn semigroup_property() {
        let s = SpectralBeta::from_modes(2, 0.1, &[(1, 0.5, 0.2), (3, -0.4, 0.3), (4, 0.1, 0.0)]).unwrap();
        let (t1, t2) = (0.4, 0.9);
        let mid = analyze_beta_full(&s.beta_at(t1).sample(64), 2).unwrap();
        for u in grid(17) {
            let direct = evolve_beta(&s, t1 + t2, u);
            let split = evolve_beta(&mid, t2, u);
            assert!((direct - split).abs() < 1e-10);
        }
    }

    #[test]
    fn reconstruct_constant_beta_is_circle() {
        let c1 = 1.7;
        let base = Vec2::new(0.5, -0.25);
        let s = SpectralBeta::from_modes(1, c1, &[]).unwrap();
        let curve = reconstruct_initial_curve(&s, base, 64).unwrap();
        for (j, p) in curve.positions().iter().enumerate() {
            let u = grid_point(j, 64);
            let expected = Vec2::new(c1 * u.sin(), -c1 * u.cos()) + base - Vec2::new(0.0, -c1);
            assert!((*p - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn reconstruct_matches_quadrature_oracle() {
        // oracle: cumulative Simpson quadrature of β₀μ
        let s = SpectralBeta::from_modes(1, 0.0, &[(2, 1.5, 0.0)]).unwrap();
        let base = Vec2::new(0.2, 0.3);
        let curve = reconstruct_initial_curve(&s, base, 64).unwrap();
        let integrand = |v: f64| Vec2::tangent_at(v) * (1.5 * (2.0 * v).cos());
        for (j, p) in curve.positions().iter().enumerate().step_by(7) {
            let u = grid_point(j, 64);
            let m = 2000;
            let h = u / m as f64;
            let mut acc = Vec2::ZERO;
            for i in 0..=m {
                let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += integrand(i as f64 * h) * w;
            }
            let expected = base + acc * (h / 3.0);
            assert!((*p - expected).norm() < 1e-10, "sample {j}");
        }
    }

    #[test]
    fn reconstruct_rejects_open_data() {
        let r = SpectralBeta::from_modes(1, 0.0, &[(1, 1.0, 0.0)])
            .and_then(|s| reconstruct_initial_curve(&s, Vec2::ZERO, 64));
        assert!(matches!(r, Err(FlowError::NotClosed { .. })));
        // below the analysis threshold but above the reconstruction one
        let s = SpectralBeta::from_modes(1, 1.0, &[(1, 1e-9, 0.0)]).unwrap();
        assert!(matches!(
            reconstruct_initial_curve(&s, Vec2::ZERO, 64),
            Err(FlowError::NotClosed { .. })
        ));
    }

    #[test]
    fn evolve_curve_at_zero_is_identity() {
        let s = SpectralBeta::from_modes(2, 0.3, &[(1, 0.5, 0.0), (3, 0.0, 0.2)]).unwrap();
        let x0 = reconstruct_initial_curve(&s, Vec2::new(1.0, 2.0), 64).unwrap();
        let st = evolve_curve(&s, &x0, 0.0).unwrap();
        assert_eq!(st.curve.positions(), x0.positions());
        assert!(st.curvature.ell.iter().all(|l| *l == 2.0));
    }

    #[test]
    fn evolve_constant_beta_matches_time_quadrature() {
        // oracle: 10⁴-step Simpson integration in τ of (β/ℓ)ν + (∂_uβ/ℓ²)μ
        let s = SpectralBeta::from_modes(1, 2.0, &[]).unwrap();
        let x0 = reconstruct_initial_curve(&s, Vec2::new(0.0, -2.0), 64).unwrap();
        let t = 0.8;
        let st = evolve_curve(&s, &x0, t).unwrap();
        let steps = 10_000;
        let h = t / steps as f64;
        for (j, p) in st.curve.positions().iter().enumerate().step_by(5) {
            let u = grid_point(j, 64);
            let mut acc = Vec2::ZERO;
            for i in 0..=steps {
                let w = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                let tau = i as f64 * h;
                acc += Vec2::normal_at(u) * (2.0 * tau.exp()) * w;
            }
            let expected = x0.positions()[j] + acc * (h / 3.0);
            assert!((*p - expected).norm() < 1e-10);
            // centered circle of radius 2e^t
            assert!((p.norm() - 2.0 * t.exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn evolve_rejects_inconsistent_pair() {
        let s = SpectralBeta::from_modes(1, 1.0, &[(2, 0.5, 0.0)]).unwrap();
        let other = SpectralBeta::from_modes(1, 1.0, &[(2, 0.6, 0.0)]).unwrap();
        let x0 = reconstruct_initial_curve(&other, Vec2::ZERO, 64).unwrap();
        assert!(matches!(evolve_curve(&s, &x0, 0.5), Err(FlowError::Inconsistent(_))));
    }

    #[test]
    fn zero_rate_mode_uses_linear_time_factor() {
        assert_eq!(time_integral(0.0, 1.25), 1.25);
        assert!((time_integral(1e-300, 2.0) - 2.0).abs() < 1e-15);
        assert!((time_integral(-3.0, 1.0) - (1.0 - (-3.0f64).exp()) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn flow_preserves_frontal_and_closure() {
        let s = SpectralBeta::from_modes(2, 0.0, &[(1, 0.3, 0.1), (3, 1.0, -0.5), (5, 0.2, 0.2)]).unwrap();
        let x0 = reconstruct_initial_curve(&s, Vec2::new(0.3, 0.3), 64).unwrap();
        for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let st = evolve_curve(&s, &x0, t).unwrap();
            assert!(st.frontal_residual().unwrap() < 1e-9);
            assert!(st.legendre_residual().unwrap() < 1e-9);
            assert!((st.curve.centroid() - x0.centroid()).norm() < 1e-9);
        }
    }

    #[test]
    fn centered_form_agrees_with_direct_evolution() {
        let s = SpectralBeta::from_modes(1, 0.0, &[(2, 1.0, 0.0), (4, 0.1, 0.0)]).unwrap();
        let x0 = reconstruct_initial_curve(&s, Vec2::new(1.0, -1.0), 64).unwrap();
        let p = x0.centroid();
        let st = evolve_curve(&s, &x0, 0.7).unwrap();
        for (j, x) in st.curve.positions().iter().enumerate() {
            let c = centered_position(&s, 0.7, grid_point(j, 64));
            assert!((*x - p - c).norm() < 1e-13);
        }
    }
}
