//! Banded solvers used by the spline interpolants and the Crank–Nicolson oracle.

use crate::{FlowError, Result};

/// Solves a tridiagonal system with the Thomas algorithm.
///
/// Row `i` reads `sub[i]·x[i−1] + diag[i]·x[i] + sup[i]·x[i+1] = rhs[i]`;
/// `sub[0]` and `sup[n−1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n {
        return Err(FlowError::LengthMismatch {
            what: "tridiagonal system",
            got: rhs.len(),
            expected: n,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut gam = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut bet = diag[0];
    if bet == 0.0 {
        return Err(FlowError::Inconsistent("zero pivot in tridiagonal solve".into()));
    }
    x[0] = rhs[0] / bet;
    for i in 1..n {
        gam[i] = sup[i - 1] / bet;
        bet = diag[i] - sub[i] * gam[i];
        if bet == 0.0 {
            return Err(FlowError::Inconsistent("zero pivot in tridiagonal solve".into()));
        }
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / bet;
    }
    for i in (0..n - 1).rev() {
        x[i] -= gam[i + 1] * x[i + 1];
    }
    Ok(x)
}

/// Solves a cyclic tridiagonal system by the Sherman–Morrison correction.
///
/// Same layout as [`solve_tridiagonal`], except that `sub[0]` is the corner
/// coefficient of `x[n−1]` in row 0 and `sup[n−1]` the corner coefficient of
/// `x[0]` in row `n−1`. Requires `n ≥ 3`.
pub fn solve_cyclic_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    if n < 3 {
        return Err(FlowError::GridTooCoarse { got: n, min: 3 });
    }
    if sub.len() != n || sup.len() != n || rhs.len() != n {
        return Err(FlowError::LengthMismatch {
            what: "cyclic tridiagonal system",
            got: rhs.len(),
            expected: n,
        });
    }
    let top_right = sub[0];
    let bottom_left = sup[n - 1];
    let gamma = -diag[0];

    let mut bb = diag.to_vec();
    bb[0] = diag[0] - gamma;
    bb[n - 1] = diag[n - 1] - bottom_left * top_right / gamma;

    let x = solve_tridiagonal(sub, &bb, sup, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = bottom_left;
    let z = solve_tridiagonal(sub, &bb, sup, &u)?;

    let fact = (x[0] + top_right * x[n - 1] / gamma) / (1.0 + z[0] + top_right * z[n - 1] / gamma);
    Ok(x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect())
}
