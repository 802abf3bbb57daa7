//! Interpolation on uniform grids: periodic cubic splines and monotone
//! piecewise-cubic maps with their inverses.

use std::f64::consts::TAU;

use crate::linalg::solve_cyclic_tridiagonal;
use crate::{FlowError, Result};

/// Periodic cubic spline through samples at `u_j = 2πj/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpline {
    values: Vec<f64>,
    second: Vec<f64>,
    h: f64,
}

impl PeriodicSpline {
    pub fn new(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 4 {
            return Err(FlowError::GridTooCoarse { got: n, min: 4 });
        }
        let h = TAU / n as f64;
        let rhs: Vec<f64> = (0..n)
            .map(|j| 6.0 * (values[(j + 1) % n] - 2.0 * values[j] + values[(j + n - 1) % n]) / (h * h))
            .collect();
        let second = solve_cyclic_tridiagonal(&vec![1.0; n], &vec![4.0; n], &vec![1.0; n], &rhs)?;
        Ok(PeriodicSpline { values: values.to_vec(), second, h })
    }

    fn locate(&self, u: f64) -> (usize, usize, f64) {
        let n = self.values.len();
        let x = u.rem_euclid(TAU) / self.h;
        let j = (x.floor() as usize).min(n - 1);
        let s = x - j as f64;
        (j, (j + 1) % n, s)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let (j, k, s) = self.locate(u);
        let r = 1.0 - s;
        let (y0, y1, m0, m1) = (self.values[j], self.values[k], self.second[j], self.second[k]);
        r * y0 + s * y1 + self.h * self.h / 6.0 * ((r * r * r - r) * m0 + (s * s * s - s) * m1)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        let (j, k, s) = self.locate(u);
        let r = 1.0 - s;
        let (y0, y1, m0, m1) = (self.values[j], self.values[k], self.second[j], self.second[k]);
        (y1 - y0) / self.h + self.h / 6.0 * ((1.0 - 3.0 * r * r) * m0 + (3.0 * s * s - 1.0) * m1)
    }
}

/// Strictly increasing map on `[0, 2π]` given by values and slopes at
/// `v_j = 2πj/N`, `j = 0..=N`, and extended to `ℝ` by
/// `f(v + 2π) = f(v) + (f(2π) − f(0))`.
///
/// Between nodes it is the cubic Hermite interpolant, with slopes limited
/// (Fritsch–Carlson) so that each piece stays monotone.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneMap {
    values: Vec<f64>,
    slopes: Vec<f64>,
    h: f64,
}

impl MonotoneMap {
    pub fn new(values: Vec<f64>, mut slopes: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 3 || slopes.len() != n {
            return Err(FlowError::LengthMismatch {
                what: "monotone map slopes",
                got: slopes.len(),
                expected: n,
            });
        }
        let h = TAU / (n - 1) as f64;
        for j in 0..n - 1 {
            let secant = (values[j + 1] - values[j]) / h;
            if !(secant > 0.0) {
                return Err(FlowError::Inconsistent(format!(
                    "map samples are not strictly increasing at node {j}"
                )));
            }
        }
        for j in 0..n {
            if !(slopes[j] > 0.0) {
                return Err(FlowError::Inconsistent(format!("non-positive slope at node {j}")));
            }
            let left = if j > 0 { Some((values[j] - values[j - 1]) / h) } else { None };
            let right = if j + 1 < n { Some((values[j + 1] - values[j]) / h) } else { None };
            for sec in [left, right].into_iter().flatten() {
                slopes[j] = slopes[j].min(3.0 * sec);
            }
        }
        Ok(MonotoneMap { values, slopes, h })
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    /// `f(2π) − f(0)`.
    pub fn period_increment(&self) -> f64 {
        self.values[self.intervals()] - self.values[0]
    }

    pub fn node_values(&self) -> &[f64] {
        &self.values
    }

    fn split(&self, v: f64) -> (f64, usize, f64) {
        let wraps = v.div_euclid(TAU);
        let r = v - wraps * TAU;
        let x = r / self.h;
        let j = (x.floor() as usize).min(self.intervals() - 1);
        (wraps, j, x - j as f64)
    }

    fn piece(&self, j: usize, s: f64) -> (f64, f64) {
        let (y0, y1) = (self.values[j], self.values[j + 1]);
        let (d0, d1) = (self.slopes[j] * self.h, self.slopes[j + 1] * self.h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1;
        let slope = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * d1)
            / self.h;
        (value, slope)
    }

    pub fn eval(&self, v: f64) -> f64 {
        let (wraps, j, s) = self.split(v);
        wraps * self.period_increment() + self.piece(j, s).0
    }

    pub fn derivative(&self, v: f64) -> f64 {
        let (_, j, s) = self.split(v);
        self.piece(j, s).1
    }

    /// `f⁻¹(y)`: bisection over the node table, then safeguarded Newton
    /// inside the bracketing piece.
    pub fn inverse(&self, y: f64) -> f64 {
        let inc = self.period_increment();
        let wraps = ((y - self.values[0]) / inc).floor();
        let mut target = y - wraps * inc;
        // guard against rounding pushing the target just outside the table
        target = target.clamp(self.values[0], self.values[self.intervals()]);
        let j = match self.values.partition_point(|v| *v <= target) {
            0 => 0,
            p => (p - 1).min(self.intervals() - 1),
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut s = (target - self.values[j]) / (self.values[j + 1] - self.values[j]);
        for _ in 0..100 {
            let (f, df) = self.piece(j, s);
            let g = f - target;
            if g == 0.0 {
                break;
            }
            if g > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let newton = s - g / (df * self.h);
            let next = if df > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - s).abs() < 1e-16 {
                s = next;
                break;
            }
            s = next;
        }
        wraps * TAU + (j as f64 + s) * self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_smooth_periodic_data() {
        for n in [32, 64] {
            let values: Vec<f64> = (0..n).map(|j| (TAU * j as f64 / n as f64).sin()).collect();
            let sp = PeriodicSpline::new(&values).unwrap();
            let mut err = 0.0f64;
            let mut derr = 0.0f64;
            for i in 0..997 {
                let u = TAU * i as f64 / 997.0;
                err = err.max((sp.eval(u) - u.sin()).abs());
                derr = derr.max((sp.derivative(u) - u.cos()).abs());
            }
            let h = TAU / n as f64;
            assert!(err < 0.02 * h.powi(4), "n = {n}: {err}");
            assert!(derr < 0.1 * h.powi(3), "n = {n}: {derr}");
        }
    }

    #[test]
    fn spline_interpolates_nodes_and_wraps() {
        let values = [1.0, 3.0, -2.0, 0.5, 4.0];
        let sp = PeriodicSpline::new(&values).unwrap();
        for (j, v) in values.iter().enumerate() {
            let u = TAU * j as f64 / 5.0;
            assert!((sp.eval(u) - v).abs() < 1e-13);
            assert!((sp.eval(u + TAU) - v).abs() < 1e-12);
        }
    }

    fn warp(n: usize) -> MonotoneMap {
        let v: Vec<f64> = (0..=n).map(|j| TAU * j as f64 / n as f64).collect();
        MonotoneMap::new(
            v.iter().map(|x| x + 0.3 * x.sin()).collect(),
            v.iter().map(|x| 1.0 + 0.3 * x.cos()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn monotone_map_round_trip() {
        let m = warp(512);
        for i in 0..1000 {
            let y = -7.0 + 20.0 * i as f64 / 1000.0;
            assert!((m.eval(m.inverse(y)) - y).abs() < 1e-12);
        }
        // oracle: closed form of the warp
        for i in 0..100 {
            let v = 0.05 + i as f64 * 0.06;
            assert!((m.eval(v) - (v + 0.3 * v.sin())).abs() < 1e-9);
        }
        assert!((m.eval(TAU + 1.0) - m.eval(1.0) - TAU).abs() < 1e-12);
    }

    #[test]
    fn monotone_map_rejects_decreasing_data() {
        let r = MonotoneMap::new(vec![0.0, 2.0, 1.0, 7.0], vec![1.0; 4]);
        assert!(matches!(r, Err(FlowError::Inconsistent(_))));
    }

    #[test]
    fn limited_slopes_keep_pieces_monotone() {
        // exaggerated slopes would overshoot without limiting
        let m = MonotoneMap::new(vec![0.0, 0.1, 0.2, TAU], vec![50.0; 4]).unwrap();
        let mut prev = m.eval(0.0);
        for i in 1..=3000 {
            let x = m.eval(TAU * i as f64 / 3000.0);
            assert!(x >= prev);
            prev = x;
        }
    }
}
