//! The squared Fejér kernel `κ(x) = (sin(πnx)/sin(πx))⁴`, `n = ⌊m/2⌋ + 1`.

use alloc::vec::Vec;

use crate::math::sine_ratio_d2;

/// Frequency parameter `n = ⌊m/2⌋ + 1` used for degree `m`.
pub fn fejer_n(m: u32) -> u32 {
    m / 2 + 1
}

/// Unnormalized `κ`, `κ′`, `κ″` at `x`, so that `κ(0) = n⁴`.
pub fn fejer4(m: u32, x: f64) -> (f64, f64, f64) {
    let (r, r1, r2) = sine_ratio_d2(fejer_n(m), x);
    let r2v = r * r;
    (r2v * r2v, 4.0 * r2v * r * r1, 12.0 * r2v * r1 * r1 + 4.0 * r2v * r * r2)
}

/// `κ/κ(0)` and its two derivatives.
pub fn fejer4_normalized(m: u32, x: f64) -> (f64, f64, f64) {
    let n = f64::from(fejer_n(m));
    let k0 = n * n * n * n;
    let (a, b, c) = fejer4(m, x);
    (a / k0, b / k0, c / k0)
}

/// `κ″(0)/κ(0) = -(4π²/3)(n² − 1)`.
pub fn fejer4_curvature(m: u32) -> f64 {
    let n = f64::from(fejer_n(m));
    -4.0 * core::f64::consts::PI * core::f64::consts::PI * (n * n - 1.0) / 3.0
}

/// Fourier coefficients of `κ/κ(0)` for frequencies `-2(n−1)..=2(n−1)`.
///
/// `(sin(πnx)/sin(πx))²` has the triangle coefficients `n − |j|`, so the
/// fourth power is the triangle convolved with itself.
pub fn fejer4_coeffs(m: u32) -> Vec<f64> {
    let n = fejer_n(m) as i64;
    let tri: Vec<f64> = (-(n - 1)..n).map(|j| (n - j.abs()) as f64).collect();
    let mut out = alloc::vec![0.0; 2 * tri.len() - 1];
    for (i, a) in tri.iter().enumerate() {
        for (j, b) in tri.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    let k0 = (n * n * n * n) as f64;
    out.iter_mut().for_each(|v| *v /= k0);
    out
}
