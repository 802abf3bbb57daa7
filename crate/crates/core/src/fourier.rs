//! Real trigonometric polynomials on the periodic interval `[0, 2π)`.
//!
//! Coefficients follow the normalization under which synthesis inverts
//! analysis: `a₀ = (1/2π)∫f`, `a_k = (1/π)∫f cos ku`, `b_k = (1/π)∫f sin ku`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{FlowError, Result};

/// `f(u) = a₀ + Σ_{k≥1} a_k cos ku + b_k sin ku`, with `cos[k−1] = a_k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigPoly {
    pub a0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn new(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        let k = cos.len().max(sin.len());
        let mut p = TrigPoly { a0, cos, sin };
        p.cos.resize(k, 0.0);
        p.sin.resize(k, 0.0);
        p
    }

    pub fn constant(a0: f64) -> Self {
        TrigPoly::new(a0, Vec::new(), Vec::new())
    }

    /// Highest stored frequency.
    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    /// `(a_k, b_k)` for `k ≥ 1`; zero beyond the stored degree.
    pub fn mode(&self, k: usize) -> (f64, f64) {
        if k == 0 || k > self.degree() {
            (0.0, 0.0)
        } else {
            (self.cos[k - 1], self.sin[k - 1])
        }
    }

    pub fn max_coefficient(&self) -> f64 {
        self.cos
            .iter()
            .chain(&self.sin)
            .fold(self.a0.abs(), |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, u: f64) -> f64 {
        let (s1, c1) = u.sin_cos();
        let (mut s, mut c) = (s1, c1);
        let mut acc = self.a0;
        for (a, b) in self.cos.iter().zip(&self.sin) {
            acc += a * c + b * s;
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        acc
    }

    /// The `order`-th derivative in `u`, exact mode by mode.
    pub fn derivative(&self, order: u32) -> TrigPoly {
        if order == 0 {
            return self.clone();
        }
        let mut cos = self.cos.clone();
        let mut sin = self.sin.clone();
        for (i, (a, b)) in cos.iter_mut().zip(sin.iter_mut()).enumerate() {
            let k = (i + 1) as f64;
            for _ in 0..order {
                let (na, nb) = (k * *b, -k * *a);
                *a = na;
                *b = nb;
            }
        }
        TrigPoly { a0: 0.0, cos, sin }
    }

    /// Values on the uniform grid `u_j = 2πj/n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        let table = TrigTable::new(n);
        (0..n)
            .map(|j| {
                let mut acc = self.a0;
                for (i, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
                    let (c, s) = table.cos_sin((i + 1) * j);
                    acc += a * c + b * s;
                }
                acc
            })
            .collect()
    }

    /// Multiplies coefficient `k` by `factor(k)` (`k = 0` for the mean).
    pub fn scale_modes(&self, factor: impl Fn(usize) -> f64) -> TrigPoly {
        TrigPoly {
            a0: self.a0 * factor(0),
            cos: self.cos.iter().enumerate().map(|(i, a)| a * factor(i + 1)).collect(),
            sin: self.sin.iter().enumerate().map(|(i, b)| b * factor(i + 1)).collect(),
        }
    }
}

/// `cos(2πm/n)` and `sin(2πm/n)` for `m` taken modulo `n`.
#[derive(Debug, Clone)]
pub struct TrigTable {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigTable {
    pub fn new(n: usize) -> Self {
        let (sin, cos) = (0..n).map(|m| (TAU * m as f64 / n as f64).sin_cos()).unzip();
        TrigTable { cos, sin }
    }

    #[inline]
    pub fn cos_sin(&self, m: usize) -> (f64, f64) {
        let i = m % self.cos.len();
        (self.cos[i], self.sin[i])
    }
}

/// Discrete trigonometric projection of uniform periodic samples onto modes `0..=k_max`.
///
/// Exact for trigonometric polynomials of degree `≤ k_max` once `N ≥ 2·k_max + 2`.
pub fn project(samples: &[f64], k_max: usize) -> Result<TrigPoly> {
    let n = samples.len();
    let min = 2 * k_max + 2;
    if n < min {
        return Err(FlowError::GridTooCoarse { got: n, min });
    }
    let table = TrigTable::new(n);
    let a0 = samples.iter().sum::<f64>() / n as f64;
    let mut cos = vec![0.0; k_max];
    let mut sin = vec![0.0; k_max];
    for k in 1..=k_max {
        let (mut sa, mut sb) = (0.0, 0.0);
        for (j, f) in samples.iter().enumerate() {
            let (c, s) = table.cos_sin(k * j);
            sa += f * c;
            sb += f * s;
        }
        cos[k - 1] = 2.0 * sa / n as f64;
        sin[k - 1] = 2.0 * sb / n as f64;
    }
    Ok(TrigPoly { a0, cos, sin })
}

/// Derivative of uniform periodic samples by exact differentiation of the
/// interpolating trigonometric polynomial (Nyquist mode dropped).
pub fn spectral_derivative(samples: &[f64]) -> Result<Vec<f64>> {
    let n = samples.len();
    if n < 4 {
        return Err(FlowError::GridTooCoarse { got: n, min: 4 });
    }
    let poly = project(samples, (n - 2) / 2)?;
    Ok(poly.derivative(1).sample(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_recovers_low_modes() {
        let n = 64;
        let f: Vec<f64> = (0..n)
            .map(|j| {
                let u = TAU * j as f64 / n as f64;
                0.5 + (2.0 * u).cos() + 0.3 * (5.0 * u).sin()
            })
            .collect();
        let p = project(&f, 8).unwrap();
        assert!((p.a0 - 0.5).abs() < 1e-14);
        assert!((p.mode(2).0 - 1.0).abs() < 1e-14);
        assert!((p.mode(5).1 - 0.3).abs() < 1e-14);
        assert!(p.mode(3).0.abs() < 1e-14);
    }

    #[test]
    fn derivative_rotates_modes() {
        let p = TrigPoly::new(1.0, vec![0.0, 1.0], vec![0.0, 0.0]);
        let d = p.derivative(1);
        // d/du cos 2u = −2 sin 2u
        assert_eq!(d.mode(2), (0.0, -2.0));
        let d2 = p.derivative(2);
        assert_eq!(d2.mode(2), (-4.0, 0.0));
        assert_eq!(d2.a0, 0.0);
    }

    #[test]
    fn eval_matches_grid_sampling() {
        let p = TrigPoly::new(0.2, vec![0.1, -0.4, 0.0, 0.7], vec![0.3, 0.0, -0.2, 0.05]);
        let n = 40;
        let s = p.sample(n);
        for (j, v) in s.iter().enumerate() {
            let u = TAU * j as f64 / n as f64;
            assert!((p.eval(u) - v).abs() < 1e-13);
        }
    }

    #[test]
    fn spectral_derivative_is_exact_for_band_limited_data() {
        let n = 32;
        let f: Vec<f64> = (0..n).map(|j| (3.0 * TAU * j as f64 / n as f64).sin()).collect();
        let d = spectral_derivative(&f).unwrap();
        for (j, v) in d.iter().enumerate() {
            let u = TAU * j as f64 / n as f64;
            assert!((v - 3.0 * (3.0 * u).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_rejects_aliasing_grid() {
        assert!(matches!(project(&[0.0; 10], 5), Err(FlowError::GridTooCoarse { .. })));
    }
}
