//! Interpolation helpers shared by the wave, front and envelope code.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Cubic Hermite interpolation on `[x0, x1]` from values and slopes.
/// Returns the value and the derivative at `x`.
pub fn hermite3(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let v = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * s2 - 6.0 * s;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = -6.0 * s2 + 6.0 * s;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let d = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (v, d)
}

/// Quintic Hermite interpolation using value, first and second derivative at
/// both ends. Returns value and first derivative.
#[allow(clippy::too_many_arguments)]
pub fn hermite5(
    x0: f64,
    x1: f64,
    y0: [f64; 3],
    y1: [f64; 3],
    x: f64,
) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    let h3 = 0.5 * s3 - s4 + 0.5 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let v = h0 * y0[0] + h * h1 * y0[1] + h * h * h2 * y0[2] + h * h * h3 * y1[2] + h * h4 * y1[1] + h5 * y1[0];
    let d0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    let d1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    let d2 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
    let d3 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;
    let d4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    let d5 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
    let d = (d0 * y0[0] + d5 * y1[0]) / h + d1 * y0[1] + d4 * y1[1] + h * (d2 * y0[2] + d3 * y1[2]);
    (v, d)
}

/// Four-point Lagrange weights for nodes at offsets -1, 0, 1, 2 and
/// fractional position `s` in `[0, 1)`.
pub fn lagrange4_weights(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Wrap into `[0, 1)`.
pub fn frac(y: f64) -> f64 {
    let r = y - y.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Linear interpolation in a uniformly sampled table, clamped at the ends.
pub fn linear_uniform(x0: f64, dx: f64, vals: &[f64], x: f64) -> f64 {
    let n = vals.len();
    let s = (x - x0) / dx;
    if s <= 0.0 {
        return vals[0];
    }
    let i = s.floor() as usize;
    if i + 1 >= n {
        return vals[n - 1];
    }
    let w = s - i as f64;
    vals[i] * (1.0 - w) + vals[i + 1] * w
}

/// Periodic samples of a smooth function on `[0, 1)` at nodes `j/n`,
/// evaluated by trigonometric interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSamples {
    values: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
    mean: f64,
}

impl PeriodicSamples {
    pub fn new(values: Vec<f64>) -> Self {
        let n = values.len();
        assert!(n >= 1, "need at least one sample");
        let mean = values.iter().sum::<f64>() / n as f64;
        let kmax = n / 2;
        let mut cos = Vec::with_capacity(kmax);
        let mut sin = Vec::with_capacity(kmax);
        for k in 1..=kmax {
            let mut a = 0.0;
            let mut b = 0.0;
            for (j, v) in values.iter().enumerate() {
                let th = 2.0 * PI * (k * j) as f64 / n as f64;
                a += v * th.cos();
                b += v * th.sin();
            }
            let mut scale = 2.0 / n as f64;
            if n % 2 == 0 && k == kmax {
                scale = 1.0 / n as f64;
                b = 0.0;
            }
            cos.push(a * scale);
            sin.push(b * scale);
        }
        Self { values, cos, sin, mean }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eval(&self, y: f64) -> f64 {
        let mut s = self.mean;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let th = 2.0 * PI * (k + 1) as f64 * y;
            s += a * th.cos() + b * th.sin();
        }
        s
    }

    pub fn derivative(&self, y: f64) -> f64 {
        let mut s = 0.0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let w = 2.0 * PI * (k + 1) as f64;
            let th = w * y;
            s += w * (-a * th.sin() + b * th.cos());
        }
        s
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
