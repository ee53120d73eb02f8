//! Scalar special functions with their removable singularities handled.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

/// Below this `|πt|` closed-form sine ratios switch to their Taylor series.
pub const SERIES_SWITCH: f64 = 1e-4;

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// Offset of `x` from its nearest integer, in `[-1/2, 1/2]`.
#[inline]
pub fn wrap_centered(x: f64) -> f64 {
    x - x.round()
}

/// Normalized sinc `sin(πu)/(πu)`.
pub fn sinc(u: f64) -> f64 {
    let a = PI * u;
    if a.abs() < SERIES_SWITCH {
        let a2 = a * a;
        1.0 - a2 / 6.0 + a2 * a2 / 120.0
    } else {
        a.sin() / a
    }
}

/// `sinc` and its first two derivatives with respect to `u`.
pub fn sinc_d2(u: f64) -> (f64, f64, f64) {
    let a = PI * u;
    if a.abs() < SERIES_SWITCH {
        let a2 = a * a;
        let v = 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
        let d1 = PI * (-a / 3.0 + a2 * a / 30.0);
        let d2 = PI * PI * (-1.0 / 3.0 + a2 / 10.0);
        (v, d1, d2)
    } else {
        let (s, c) = (a.sin(), a.cos());
        let v = s / a;
        let d1 = PI * (c / a - s / (a * a));
        let d2 = PI * PI * (-s / a - 2.0 * c / (a * a) + 2.0 * s / (a * a * a));
        (v, d1, d2)
    }
}

/// Ratio `sin(nπt)/sin(πt)` and its first two `t`-derivatives.
///
/// The ratio is periodic up to the sign `(-1)^{k(n-1)}` for `t` near the
/// integer `k`, which is applied explicitly so the series branch is exact.
pub fn sine_ratio_d2(n: u32, t: f64) -> (f64, f64, f64) {
    let k = t.round();
    let r = t - k;
    let nf = f64::from(n);
    let sign = if (k as i64).rem_euclid(2) == 1 && n.is_multiple_of(2) {
        -1.0
    } else {
        1.0
    };
    let a = PI * r;
    if a.abs() < SERIES_SWITCH {
        let n2 = nf * nf;
        let c2 = (n2 - 1.0) / 6.0;
        let c4 = (n2 - 1.0) * (3.0 * n2 - 7.0) / 360.0;
        let a2 = a * a;
        let v = nf * (1.0 - c2 * a2 + c4 * a2 * a2);
        let d1 = nf * PI * (-2.0 * c2 * a + 4.0 * c4 * a2 * a);
        let d2 = nf * PI * PI * (-2.0 * c2 + 12.0 * c4 * a2);
        (sign * v, sign * d1, sign * d2)
    } else {
        let u = PI * t;
        let (num, num1, num2) = {
            let (s, c) = ((nf * u).sin(), (nf * u).cos());
            (s, nf * c, -nf * nf * s)
        };
        let (den, den1, den2) = (u.sin(), u.cos(), -u.sin());
        let q1 = num1 * den - num * den1;
        let v = num / den;
        let d1 = q1 / (den * den);
        let d2 = (num2 * den - num * den2) / (den * den) - 2.0 * den1 * q1 / (den * den * den);
        (v, PI * d1, PI * PI * d2)
    }
}

/// Normalized Dirichlet kernel `D_m(x) = (2m+1)^{-1} Σ_{|k|≤m} e^{2πikx}`.
pub fn dirichlet(m: u32, x: f64) -> f64 {
    let n = 2 * m + 1;
    sine_ratio_d2(n, x).0 / f64::from(n)
}

/// `e^{-x²/2}`-weighted monomial `e^{-|z|²/2} z^n / √(n!)` for `n = 0..len`.
///
/// Computed by the stable recursion `v_n = v_{n-1} z / √n`.
pub fn weighted_monomials(z: C64, len: usize) -> alloc::vec::Vec<C64> {
    let mut out = alloc::vec::Vec::with_capacity(len);
    let mut v = C64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for n in 0..len {
        if n > 0 {
            v = v * z / (n as f64).sqrt();
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_branches_agree_at_switch() {
        let u = 0.999 * SERIES_SWITCH / PI;
        let a = PI * u;
        assert!((sinc(u) - a.sin() / a).abs() < 1e-15);
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(0.5) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn sinc_derivatives_match_differences() {
        for &u in &[0.0, 1e-6, 0.3, -1.7, 2.5] {
            let h = 1e-5;
            let (_, d1, d2) = sinc_d2(u);
            let fd1 = (sinc(u + h) - sinc(u - h)) / (2.0 * h);
            let fd2 = (sinc(u + h) - 2.0 * sinc(u) + sinc(u - h)) / (h * h);
            assert!((d1 - fd1).abs() < 1e-8, "u={u}");
            assert!((d2 - fd2).abs() < 1e-4, "u={u}");
        }
    }

    #[test]
    fn dirichlet_values() {
        assert_eq!(dirichlet(5, 0.0), 1.0);
        assert!((dirichlet(1, 0.25) - 1.0 / 3.0).abs() < 1e-15);
        let m = 4;
        for k in 1..=2 * m {
            let x = f64::from(k) / f64::from(2 * m + 1);
            assert!(dirichlet(m, x).abs() < 1e-15);
        }
        // periodic, including just off the integers
        assert!((dirichlet(3, 2.0 + 1e-6) - dirichlet(3, 1e-6)).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_matches_sum() {
        let m = 7u32;
        for i in 0..50 {
            let x = -1.3 + 0.0531 * f64::from(i);
            let direct: f64 = (-(m as i32)..=(m as i32))
                .map(|k| (2.0 * PI * f64::from(k) * x).cos())
                .sum::<f64>()
                / f64::from(2 * m + 1);
            assert!((dirichlet(m, x) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn sine_ratio_sign_for_even_n() {
        // sin(2πt)/sin(πt) = 2cos(πt), which is -2 near t = 1
        let (v, _, _) = sine_ratio_d2(2, 1.0 + 1e-7);
        assert!((v + 2.0).abs() < 1e-10);
        let (v, _, _) = sine_ratio_d2(2, 1.0 + 0.1);
        assert!((v - 2.0 * (PI * 1.1).cos()).abs() < 1e-12);
    }

    #[test]
    fn monomials_recursion() {
        let z = C64::new(1.5, -0.5);
        let v = weighted_monomials(z, 6);
        let w = (-0.5 * z.norm_sqr()).exp();
        let mut fact = 1.0;
        for (n, vn) in v.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let direct = z.powu(n as u32) * w / fact.sqrt();
            assert!((vn - direct).norm() < 1e-14);
        }
    }
}
