//! Self-similar solutions `(λ*(t)X*(u), ν*(u))` and their lap and cusp counts.
//!
//! For `β* = C1 cos mu + C2 sin mu` and `ℓ* ≡ n` the flow only rescales the
//! curve, by `λ*(t) = e^{(1 − m²/n²)t}`. Such profiles expand when `m < n` and
//! shrink when `m > n`; `m = n` gives an open curve and is excluded.

use serde::Serialize;

use crate::curve::{grid_point, LegendreCurve};
use crate::spectral::{evolve_curve, reconstruct_initial_curve, SpectralBeta};
use crate::{FlowError, Result, Vec2};

/// The twelve parameter sets `(n, m, C1, C2)` of the reference catalog.
pub const CATALOG: [(u32, u32, f64, f64); 12] = [
    (1, 2, 1.5, 0.0),
    (1, 3, 2.3, 0.0),
    (1, 4, 3.5, 0.0),
    (2, 1, 1.3, 0.0),
    (2, 3, 1.5, 0.0),
    (2, 4, 3.0, 0.0),
    (3, 1, 2.5, 0.0),
    (3, 2, 1.5, 0.0),
    (3, 4, 5.0, 0.0),
    (1, 3, 1.0, 2.0),
    (1, 3, 2.0, 2.0),
    (1, 3, 2.0, 1.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfSimilarProfile {
    n: u32,
    m: u32,
    c1: f64,
    c2: f64,
}

fn check_indices(n: u32, m: u32) -> Result<()> {
    if n == 0 {
        return Err(FlowError::InvalidParameter("rotation index must be at least 1".into()));
    }
    if m == n {
        return Err(FlowError::ResonantMode { n });
    }
    Ok(())
}

impl SelfSimilarProfile {
    pub fn new(n: u32, m: u32, c1: f64, c2: f64) -> Result<Self> {
        check_indices(n, m)?;
        if !(c1.is_finite() && c2.is_finite()) {
            return Err(FlowError::InvalidParameter("profile constants must be finite".into()));
        }
        if m == 0 {
            if c2 != 0.0 || c1 == 0.0 {
                return Err(FlowError::InvalidParameter(
                    "the circle case m = 0 needs C2 = 0 and C1 ≠ 0".into(),
                ));
            }
        } else if c1 == 0.0 && c2 == 0.0 {
            return Err(FlowError::InvalidParameter("(C1, C2) must not both vanish".into()));
        }
        Ok(SelfSimilarProfile { n, m, c1, c2 })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn constants(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }

    /// `X*(u)`, evaluated term by term as the closed-form profile.
    pub fn position(&self, u: f64) -> Vec2 {
        let (n, m) = (self.n as f64, self.m as f64);
        if self.m == 0 {
            return Vec2::new((n * u).sin(), -(n * u).cos()) * (self.c1 / n);
        }
        let d = n * n - m * m;
        let (p, q) = (n / d, m / d);
        let (sn, cn) = (n * u).sin_cos();
        let (sm, cm) = (m * u).sin_cos();
        let first = Vec2::new(p * sn * cm - q * cn * sm, -p * cn * cm - q * sn * sm);
        let second = Vec2::new(p * sn * sm + q * cn * cm, -p * cn * sm + q * sn * cm);
        first * self.c1 + second * self.c2
    }

    /// `∂_uX*`, differentiated in the product-to-sum form.
    pub fn derivative(&self, u: f64) -> Vec2 {
        let (n, m) = (self.n as f64, self.m as f64);
        let (sp, cp) = ((n + m) * u).sin_cos();
        let (sd, cd) = ((n - m) * u).sin_cos();
        let from_c1 = Vec2::new(cp + cd, sp + sd) * (self.c1 / 2.0);
        let from_c2 = Vec2::new(sp - sd, -cp + cd) * (self.c2 / 2.0);
        from_c1 + from_c2
    }

    /// `ν*(u) = (sin nu, −cos nu)`.
    pub fn normal(&self, u: f64) -> Vec2 {
        Vec2::normal_at(self.n as f64 * u)
    }

    /// `μ*(u) = (cos nu, sin nu)`.
    pub fn tangent(&self, u: f64) -> Vec2 {
        Vec2::tangent_at(self.n as f64 * u)
    }

    /// `β*(u) = C1 cos mu + C2 sin mu`.
    pub fn beta(&self, u: f64) -> f64 {
        let (s, c) = (self.m as f64 * u).sin_cos();
        self.c1 * c + self.c2 * s
    }

    pub fn beta_derivative(&self, u: f64) -> f64 {
        let m = self.m as f64;
        let (s, c) = (m * u).sin_cos();
        m * (self.c2 * c - self.c1 * s)
    }

    /// `λ*(t)`.
    pub fn scale_at(&self, t: f64) -> f64 {
        (self.growth_rate() * t).exp()
    }

    /// `1 − m²/n²`.
    pub fn growth_rate(&self) -> f64 {
        crate::spectral::eigenvalue(self.n, self.m)
    }

    pub fn lap_count(&self) -> u32 {
        lap_count(self.n, self.m).expect("validated at construction")
    }

    pub fn cusp_count(&self) -> u32 {
        cusp_count(self.n, self.m).expect("validated at construction")
    }

    /// `β₀ = β*` as spectral data.
    pub fn spectral(&self) -> SpectralBeta {
        let s = if self.m == 0 {
            SpectralBeta::from_modes(self.n, self.c1, &[])
        } else {
            SpectralBeta::from_modes(self.n, 0.0, &[(self.m, self.c1, self.c2)])
        };
        s.expect("profile data is closed and nonzero")
    }

    /// The profile with `(C1, C2)` rotated by `δ`. Its curve is the original
    /// shifted in `u` by `δ/m` and rotated in the plane by `nδ/m`.
    pub fn rotated(&self, delta: f64) -> Result<SelfSimilarProfile> {
        let (s, c) = delta.sin_cos();
        SelfSimilarProfile::new(
            self.n,
            self.m,
            self.c1 * c - self.c2 * s,
            self.c1 * s + self.c2 * c,
        )
    }

    /// Samples `(X*, ν*)` on `grid_size` uniform points.
    pub fn sample(&self, grid_size: usize) -> Result<LegendreCurve> {
        LegendreCurve::from_fn(grid_size, |u| (self.position(u), self.normal(u)))
    }

    /// Grid size that resolves the top frequency `n + m` of the profile.
    pub fn render_grid(&self) -> usize {
        512.max(64 * (self.n + self.m) as usize)
    }

    pub fn render_samples(&self) -> Result<LegendreCurve> {
        self.sample(self.render_grid())
    }
}

/// `λ*(t) = e^{(1 − m²/n²)t}`.
pub fn lambda_star(n: u32, m: u32, t: f64) -> Result<f64> {
    check_indices(n, m)?;
    if !(t >= 0.0) {
        return Err(FlowError::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    Ok((crate::spectral::eigenvalue(n, m) * t).exp())
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Number of times the profile traces its image: `gcd(n + m, |n − m|)`,
/// or `n` for the circle `m = 0`.
pub fn lap_count(n: u32, m: u32) -> Result<u32> {
    check_indices(n, m)?;
    if m == 0 {
        return Ok(n);
    }
    Ok(gcd(n + m, n.abs_diff(m)))
}

/// Number of (2,3)-cusps on the image traced once: `2m / lap_count`.
pub fn cusp_count(n: u32, m: u32) -> Result<u32> {
    if m == 0 {
        check_indices(n, m)?;
        return Ok(0);
    }
    Ok(2 * m / lap_count(n, m)?)
}

/// `max_t max_u |X(u, t) − λ*(t)X*(u)|` with `X` produced by the spectral flow
/// from `X₀ = X*`, whose centroid is the origin.
pub fn verify_self_similarity(p: &SelfSimilarProfile, times: &[f64]) -> Result<f64> {
    let s = p.spectral();
    let grid_size = p.render_grid();
    let x0 = reconstruct_initial_curve(&s, p.position(0.0), grid_size)?;
    let mut worst = 0.0f64;
    for &t in times {
        if !(0.0..=10.0).contains(&t) {
            return Err(FlowError::InvalidParameter(format!("time {t} outside [0, 10]")));
        }
        let state = evolve_curve(&s, &x0, t)?;
        let scale = p.scale_at(t);
        for (j, x) in state.curve.positions().iter().enumerate() {
            let expected = p.position(grid_point(j, grid_size)) * scale;
            worst = worst.max((*x - expected).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2, TAU};

    #[test]
    fn circle_evaluation() {
        let p = SelfSimilarProfile::new(1, 0, 2.0, 0.0).unwrap();
        let x = p.position(FRAC_PI_2);
        assert!((x - Vec2::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn construction_constraints() {
        assert!(matches!(SelfSimilarProfile::new(2, 2, 1.0, 0.0), Err(FlowError::ResonantMode { n: 2 })));
        assert!(SelfSimilarProfile::new(1, 0, 1.0, 1.0).is_err());
        assert!(SelfSimilarProfile::new(1, 0, 0.0, 0.0).is_err());
        assert!(SelfSimilarProfile::new(1, 3, 0.0, 0.0).is_err());
        assert!(SelfSimilarProfile::new(0, 3, 1.0, 0.0).is_err());
        assert!(SelfSimilarProfile::new(1, 3, 0.0, 1.0).is_ok());
    }

    #[test]
    fn frontal_identity_against_finite_differences() {
        // oracle: fourth-order central differences of the closed-form position
        for &(n, m, c1, c2) in CATALOG.iter() {
            let p = SelfSimilarProfile::new(n, m, c1, c2).unwrap();
            let h = 1e-3;
            for i in 0..50 {
                let u = TAU * i as f64 / 50.0 + 0.013;
                let fd = (p.position(u - 2.0 * h) - p.position(u - h) * 8.0 + p.position(u + h) * 8.0
                    - p.position(u + 2.0 * h))
                    / (12.0 * h);
                let exact = p.tangent(u) * p.beta(u);
                assert!((fd - exact).norm() < 1e-7 * (1.0 + (n + m).pow(5) as f64));
                assert!((p.derivative(u) - exact).norm() < 1e-12 * (c1.abs() + c2.abs()));
            }
        }
    }

    #[test]
    fn profiles_have_zero_mean() {
        for &(n, m, c1, c2) in CATALOG.iter() {
            let p = SelfSimilarProfile::new(n, m, c1, c2).unwrap();
            let samples = p.sample(256).unwrap();
            assert!(samples.centroid().norm() < 1e-12);
        }
    }

    #[test]
    fn lambda_examples() {
        assert!((lambda_star(1, 0, 1.0).unwrap() - E).abs() < 1e-15);
        assert!((lambda_star(1, 2, 1.0).unwrap() - (-3.0f64).exp()).abs() < 1e-17);
        for (n, m) in [(1, 0), (2, 3), (3, 1)] {
            assert_eq!(lambda_star(n, m, 0.0).unwrap(), 1.0);
        }
        assert!(lambda_star(2, 1, 1.0).unwrap() > 1.0);
        assert!(lambda_star(2, 3, 1.0).unwrap() < 1.0);
        assert!(matches!(lambda_star(2, 2, 1.0), Err(FlowError::ResonantMode { .. })));
    }

    #[test]
    fn lap_and_cusp_counts() {
        assert_eq!(lap_count(1, 3).unwrap(), 2);
        assert_eq!(lap_count(2, 4).unwrap(), 2);
        assert_eq!(lap_count(1, 2).unwrap(), 1);
        assert_eq!(lap_count(3, 0).unwrap(), 3);
        assert_eq!(cusp_count(1, 3).unwrap(), 3);
        assert_eq!(cusp_count(1, 2).unwrap(), 4);
        assert_eq!(cusp_count(2, 4).unwrap(), 4);
        assert_eq!(cusp_count(5, 0).unwrap(), 0);
        assert!(lap_count(4, 4).is_err());
    }

    #[test]
    fn same_parity_gives_at_least_two_laps() {
        for n in 1..12u32 {
            for m in 1..12u32 {
                if m != n && n % 2 == m % 2 {
                    assert!(lap_count(n, m).unwrap() >= 2);
                }
            }
        }
    }

    #[test]
    fn doubled_indices_trace_same_image() {
        let a = SelfSimilarProfile::new(2, 4, 3.0, 0.0).unwrap();
        let b = SelfSimilarProfile::new(1, 2, 1.5, 0.0).unwrap();
        for i in 0..100 {
            let u = TAU * i as f64 / 100.0;
            assert!((a.position(u) - b.position(2.0 * u)).norm() < 1e-14);
        }
    }

    #[test]
    fn lap_count_matches_period_of_image() {
        // the curve repeats after 2π/lap in u, up to the matching rotation of the normal
        for &(n, m, c1, c2) in CATALOG.iter() {
            let p = SelfSimilarProfile::new(n, m, c1, c2).unwrap();
            let lap = p.lap_count();
            let shift = TAU / lap as f64;
            for i in 0..40 {
                let u = 0.1 + i as f64 * 0.157;
                assert!((p.position(u + shift) - p.position(u)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_equivariance() {
        let p = SelfSimilarProfile::new(1, 3, 1.0, 2.0).unwrap();
        let delta = 0.7;
        let q = p.rotated(delta).unwrap();
        let (n, m) = (1.0, 3.0);
        for i in 0..30 {
            let u = i as f64 * 0.21;
            let expected = p.position(u - delta / m).rotate(n * delta / m);
            assert!((q.position(u) - expected).norm() < 1e-13);
        }
        assert_eq!(q.cusp_count(), p.cusp_count());
        assert_eq!(q.lap_count(), p.lap_count());
    }

    #[test]
    fn verify_examples() {
        let p = SelfSimilarProfile::new(1, 2, 1.5, 0.0).unwrap();
        assert!(verify_self_similarity(&p, &[0.0, 1.0, 2.0]).unwrap() < 1e-9);
        let c = SelfSimilarProfile::new(1, 0, 2.0, 0.0).unwrap();
        assert!(verify_self_similarity(&c, &[0.0, 1.0]).unwrap() < 1e-9);
        let f = SelfSimilarProfile::new(3, 1, 2.5, 0.0).unwrap();
        assert!(verify_self_similarity(&f, &[0.0, 1.0, 2.0]).unwrap() < 1e-9);
    }

    #[test]
    fn render_grid_resolves_top_frequency() {
        assert_eq!(SelfSimilarProfile::new(1, 2, 1.5, 0.0).unwrap().render_grid(), 512);
        assert_eq!(SelfSimilarProfile::new(3, 6, 1.0, 0.0).unwrap().render_grid(), 576);
    }
}
