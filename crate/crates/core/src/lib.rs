//! Exact simulation of the inverse curvature flow of ℓ-convex Legendre curves.
//!
//! A closed Legendre curve is a sampled frontal `X` together with its unit
//! normal field `ν`. After normalizing the parametrization so that
//! `ν(u) = (sin nu, −cos nu)`, the flow reduces to the linear equation
//! `∂_t β = ∂_u²β / n² + β` for the singular-speed function `β`, which is
//! solved mode by mode and integrated back into a curve in closed form.
//!
//! Module map:
//!
//! * [`curve`]: sampled curves, moving frames, Legendre curvature, angle unwrap.
//! * [`reparam`]: normalization of an ℓ-convex curve to constant `ℓ ≡ n`.
//! * [`spectral`]: Fourier analysis of `β₀`, exact evolution, curve reconstruction.
//! * [`self_similar`]: the self-similar profile family with lap and cusp counts.
//! * [`cusps`]: zero tracking of `β(·, t)` and the zero-count series.
//! * [`asymptotics`]: centering, leading mode, scaled error, decay-rate fits.
//! * [`fd`]: finite-difference oracles for the `β` equation and the
//!   time-dependent reparametrization PDE.
//! * [`io`]: curve CSV exchange and SVG rendering.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod curve;
pub mod cusps;
mod error;
pub mod fd;
pub mod fourier;
pub mod interp;
pub mod io;
pub mod linalg;
pub mod reparam;
pub mod self_similar;
pub mod spectral;
mod vec2;

pub use error::{FlowError, Result};
pub use vec2::Vec2;

pub use asymptotics::{center_point, leading_mode, scaled_error, ConvergenceReport, LeadingMode};
pub use curve::{
    angle_unwrap, check_closure, curvature_from_samples, frame_from_normal, AngleField,
    LegendreCurvature, LegendreCurve,
};
pub use cusps::{detect_strict_decrease, find_zeros, zero_count_series, CuspReport, ZeroKind};
pub use reparam::{build_psi1, reparametrize, Reparametrization};
pub use self_similar::{cusp_count, lambda_star, lap_count, SelfSimilarProfile};
pub use spectral::{
    analyze_beta, eigenvalue, evolve_beta, evolve_curve, reconstruct_initial_curve, FlowState,
    SpectralBeta,
};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default number of uniform samples on `[0, 2π)`.
pub const DEFAULT_GRID: usize = 512;
