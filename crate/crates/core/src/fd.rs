//! Finite-difference oracles, independent of the spectral solution.
//!
//! * [`solve_beta_fd`] integrates `∂_tβ = ∂_u²β/n² + β` on a periodic grid.
//! * [`solve_phi_fd`] integrates the reparametrization equation
//!   `∂_tφ = ∂_u²φ/((∂_uφ)²ℓ(φ, t)²) − F(φ, t)` and records the gradient
//!   range needed for the bound `e^{−M}min ∂_uφ₀ ≤ ∂_uφ ≤ e^{M}max ∂_uφ₀`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::linalg::solve_cyclic_tridiagonal;
use crate::spectral::{FlowState, SpectralBeta};
use crate::{FlowError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExplicitEuler,
    CrankNicolson,
}

/// Spatial discretization of `∂_u²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    /// `(β_{j+1} − 2β_j + β_{j−1})/h²`, second order.
    Standard,
    /// Implicit fourth-order form `B·β'' = D·β` with `B = (1, 10, 1)/12` and
    /// `D = (1, −2, 1)/h²`; still tridiagonal.
    Compact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FDGrid {
    pub n_points: usize,
    pub dt: f64,
    pub scheme: Scheme,
    pub stencil: Stencil,
}

impl FDGrid {
    pub fn crank_nicolson(n_points: usize, dt: f64) -> Self {
        FDGrid { n_points, dt, scheme: Scheme::CrankNicolson, stencil: Stencil::Compact }
    }

    pub fn explicit(n_points: usize, dt: f64) -> Self {
        FDGrid { n_points, dt, scheme: Scheme::ExplicitEuler, stencil: Stencil::Standard }
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.n_points as f64
    }

    /// Largest stable explicit step for rotation index `n`.
    pub fn explicit_limit(&self, n: u32) -> f64 {
        let h = self.spacing();
        let nn = (n * n) as f64;
        match self.stencil {
            Stencil::Standard => nn * h * h / 2.0,
            Stencil::Compact => nn * h * h / 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaSolution {
    pub beta: Vec<f64>,
    pub t: f64,
    pub steps: usize,
    /// The step actually taken, `T/steps`.
    pub dt: f64,
    pub grid: FDGrid,
}

/// `y = A·x` for the periodic tridiagonal matrix with constant `(off, diag, off)`.
fn periodic_apply(x: &[f64], off: f64, diag: f64) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|j| off * x[(j + n - 1) % n] + diag * x[j] + off * x[(j + 1) % n])
        .collect()
}

pub fn solve_beta_fd(beta0: &[f64], n: u32, t_end: f64, grid: &FDGrid) -> Result<BetaSolution> {
    let len = grid.n_points;
    if beta0.len() != len {
        return Err(FlowError::LengthMismatch { what: "β₀ samples", got: beta0.len(), expected: len });
    }
    if len < 8 {
        return Err(FlowError::GridTooCoarse { got: len, min: 8 });
    }
    if n == 0 || !(t_end >= 0.0) || !(grid.dt > 0.0) {
        return Err(FlowError::InvalidParameter("need n ≥ 1, T ≥ 0 and dt > 0".into()));
    }
    if grid.scheme == Scheme::ExplicitEuler && grid.dt > grid.explicit_limit(n) {
        return Err(FlowError::Unstable { dt: grid.dt, max_dt: grid.explicit_limit(n) });
    }
    let steps = (t_end / grid.dt).ceil() as usize;
    let dt = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let h = grid.spacing();
    let c = 1.0 / ((n * n) as f64 * h * h);
    // B and L = D/n² + B as (off, diag) pairs
    let (b_off, b_diag) = match grid.stencil {
        Stencil::Standard => (0.0, 1.0),
        Stencil::Compact => (1.0 / 12.0, 10.0 / 12.0),
    };
    let (l_off, l_diag) = (c + b_off, -2.0 * c + b_diag);
    let mut beta = beta0.to_vec();
    match grid.scheme {
        Scheme::ExplicitEuler => {
            for _ in 0..steps {
                let rhs = periodic_apply(&beta, b_off + dt * l_off, b_diag + dt * l_diag);
                beta = if grid.stencil == Stencil::Standard {
                    rhs
                } else {
                    solve_cyclic_tridiagonal(&vec![b_off; len], &vec![b_diag; len], &vec![b_off; len], &rhs)?
                };
            }
        }
        Scheme::CrankNicolson => {
            let lhs_off = b_off - 0.5 * dt * l_off;
            let lhs_diag = b_diag - 0.5 * dt * l_diag;
            let (sub, diag, sup) = (vec![lhs_off; len], vec![lhs_diag; len], vec![lhs_off; len]);
            for _ in 0..steps {
                let rhs = periodic_apply(&beta, b_off + 0.5 * dt * l_off, b_diag + 0.5 * dt * l_diag);
                beta = solve_cyclic_tridiagonal(&sub, &diag, &sup, &rhs)?;
            }
        }
    }
    Ok(BetaSolution { beta, t: t_end, steps, dt, grid: *grid })
}

/// `log₂(coarse/fine)`, the observed order under halving of `h` and `dt`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// One accepted step of the φ solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiStep {
    pub t: f64,
    pub min_grad: f64,
    pub max_grad: f64,
    /// `Σ ∂_uφ·h`, which should equal `2π`.
    pub integral: f64,
    /// `M(t) = ∫₀ᵗ max_u ∂_uF dτ`.
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiTrajectory {
    /// Final `φ(u_j) = u_j + w_j`.
    pub phi: Vec<f64>,
    pub steps: Vec<PhiStep>,
    /// Total number of step halvings needed to keep `∂_uφ > 0`.
    pub halvings: u32,
    pub grid: FDGrid,
}

impl PhiTrajectory {
    /// Largest relative excess over the two gradient bounds (`≤ 0` when both hold).
    pub fn bound_violation(&self) -> f64 {
        let first = self.steps[0];
        let mut worst = f64::NEG_INFINITY;
        for s in &self.steps {
            let lower = (-s.m).exp() * first.min_grad;
            let upper = s.m.exp() * first.max_grad;
            worst = worst.max((lower - s.min_grad) / lower).max((s.max_grad - upper) / upper);
        }
        worst
    }

    pub fn max_integral_error(&self) -> f64 {
        self.steps.iter().map(|s| (s.integral - TAU).abs()).fold(0.0, f64::max)
    }
}

/// Forward-difference gradients `(φ_{j+1} − φ_j)/h`; their `h`-weighted sum
/// telescopes to `2π` because `w` is periodic.
fn gradients(w: &[f64], h: f64) -> Vec<f64> {
    let n = w.len();
    (0..n).map(|j| 1.0 + (w[(j + 1) % n] - w[j]) / h).collect()
}

fn record(w: &[f64], h: f64, t: f64, m: f64) -> PhiStep {
    let g = gradients(w, h);
    PhiStep {
        t,
        min_grad: g.iter().copied().fold(f64::INFINITY, f64::min),
        max_grad: g.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        integral: g.iter().sum::<f64>() * h,
        m,
    }
}

/// `max_u ∂_uF(u, t)` by centered differences on the grid.
fn max_forcing_slope(forcing: &dyn Fn(f64, f64) -> f64, len: usize, t: f64) -> f64 {
    let d = 1e-6;
    (0..len)
        .map(|j| {
            let u = TAU * j as f64 / len as f64;
            (forcing(u + d, t) - forcing(u - d, t)) / (2.0 * d)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Explicit integration of the φ equation with `φ = u + w`, `w` periodic.
///
/// The step is capped at `0.4·h²·min(∂_uφ·ℓ)²` for stability and halved (up
/// to ten times) whenever a trial step would make a gradient non-positive.
pub fn solve_phi_fd(
    phi0: &[f64],
    ell: &dyn Fn(f64, f64) -> f64,
    forcing: &dyn Fn(f64, f64) -> f64,
    t_end: f64,
    grid: &FDGrid,
) -> Result<PhiTrajectory> {
    let len = grid.n_points;
    if phi0.len() != len {
        return Err(FlowError::LengthMismatch { what: "φ₀ samples", got: phi0.len(), expected: len });
    }
    if len < 8 {
        return Err(FlowError::GridTooCoarse { got: len, min: 8 });
    }
    if grid.scheme != Scheme::ExplicitEuler {
        return Err(FlowError::InvalidParameter("the φ solver steps explicitly".into()));
    }
    let h = grid.spacing();
    let mut w: Vec<f64> = phi0.iter().enumerate().map(|(j, p)| p - h * j as f64).collect();
    if gradients(&w, h).iter().any(|g| !(*g > 0.0)) {
        return Err(FlowError::InvalidParameter("φ₀ must be strictly increasing".into()));
    }
    let mut t = 0.0;
    let mut m = 0.0;
    let mut halvings = 0;
    let mut steps = vec![record(&w, h, t, m)];
    while t < t_end {
        let phi: Vec<f64> = w.iter().enumerate().map(|(j, x)| h * j as f64 + x).collect();
        let mut coeff = Vec::with_capacity(len);
        let mut rate = Vec::with_capacity(len);
        for j in 0..len {
            let (wm, wp) = (w[(j + len - 1) % len], w[(j + 1) % len]);
            let grad = 1.0 + (wp - wm) / (2.0 * h);
            let l = ell(phi[j], t);
            let a = 1.0 / (grad * grad * l * l);
            coeff.push(a);
            rate.push(a * (wp - 2.0 * w[j] + wm) / (h * h) - forcing(phi[j], t));
        }
        let a_max = coeff.iter().copied().fold(0.0, f64::max);
        let mut dt = grid.dt.min(0.4 * h * h / a_max).min(t_end - t);
        let mut local = 0;
        let next = loop {
            let trial: Vec<f64> = w.iter().zip(&rate).map(|(x, r)| x + dt * r).collect();
            if gradients(&trial, h).iter().all(|g| *g > 0.0) {
                break trial;
            }
            if local == 10 {
                return Err(FlowError::GradientCollapse { t, halvings: local });
            }
            local += 1;
            dt *= 0.5;
        };
        halvings += local;
        m += dt * max_forcing_slope(forcing, len, t);
        t += dt;
        w = next;
        let step = record(&w, h, t, m);
        if (step.integral - TAU).abs() > 1e-8 {
            return Err(FlowError::InvariantViolation(format!(
                "∫∂_uφ du drifted to {} at t = {t}",
                step.integral
            )));
        }
        steps.push(step);
    }
    let phi = w.iter().enumerate().map(|(j, x)| h * j as f64 + x).collect();
    Ok(PhiTrajectory { phi, steps, halvings, grid: *grid })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentCheck {
    /// `max_u |⟨ΔX/δt, μ⟩ − ∂_uβ/n²|` at the midpoint time.
    pub residual: f64,
    /// `‖β(·, t_mid)‖∞`.
    pub scale: f64,
    /// `max_u |Δν/δt|`, zero for the special flow.
    pub normal_drift: f64,
}

/// Measures the tangential velocity of the flow between two nearby states and
/// compares it with `∂_uβ/ℓ²`, the velocity of the special flow (`F ≡ 0`).
pub fn tangent_velocity_residual(s: &SpectralBeta, earlier: &FlowState, later: &FlowState) -> Result<TangentCheck> {
    let len = earlier.curve.grid_size();
    if later.curve.grid_size() != len {
        return Err(FlowError::LengthMismatch { what: "later state", got: later.curve.grid_size(), expected: len });
    }
    let dt = later.t - earlier.t;
    if !(dt > 0.0) {
        return Err(FlowError::InvalidParameter("states must be in increasing time order".into()));
    }
    let mid = 0.5 * (earlier.t + later.t);
    let beta = s.beta_at(mid);
    let slope = beta.derivative(1).sample(len);
    let scale = beta.sample(len).iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let nn = (s.rotation_index() * s.rotation_index()) as f64;
    let mut residual = 0.0f64;
    let mut normal_drift = 0.0f64;
    let (x1, x2) = (earlier.curve.positions(), later.curve.positions());
    let (nu1, nu2) = (earlier.curve.normals(), later.curve.normals());
    for (j, s_j) in slope.iter().enumerate() {
        let velocity = (x2[j] - x1[j]) / dt;
        residual = residual.max((velocity.dot(nu1[j].perp()) - s_j / nn).abs());
        normal_drift = normal_drift.max(((nu2[j] - nu1[j]) / dt).norm());
    }
    Ok(TangentCheck { residual, scale, normal_drift })
}
