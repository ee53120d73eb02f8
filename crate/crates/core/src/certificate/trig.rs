//! Fejér-kernel interpolation `q = Σ α_j κ(·−y_j) + β_j κ′(·−y_j)` on the
//! torus and its windowed transplant `q(x/L) h(x)` to the line.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use super::fejer::{fejer4_coeffs, fejer4_curvature, fejer4_normalized, fejer_n};
use super::{check_signs, Certificate, CertificateContext};
use crate::domain::{min_separation, SupportSet};
use crate::linalg::{condition_number, solve, CMatrix};
use crate::math::{cis, sinc};
use crate::measurements::{window_d2, MeasurementOperator};
use crate::rkhs::KernelSpace;
use crate::{Error, Result, C64};

/// Largest interpolation-system condition number accepted.
pub const MAX_CONDITION: f64 = 1e12;

struct Interp {
    alpha: Vec<C64>,
    beta: Vec<C64>,
    cond: f64,
}

/// Solve `q(y_k) = v_k`, `q′(y_k) = d_k`.
///
/// The derivative unknowns and rows are scaled by `√|κ″(0)|` so the system
/// is a perturbation of `diag(I, −I)`.
fn interpolate(m: u32, ys: &[f64], vals: &[C64], ds: &[C64]) -> Result<Interp> {
    let s = ys.len();
    let c = fejer4_curvature(m).abs().sqrt();
    let mut a = CMatrix::zeros(2 * s, 2 * s);
    for k in 0..s {
        for j in 0..s {
            let (k0, k1, k2) = fejer4_normalized(m, ys[k] - ys[j]);
            a[(k, j)] = C64::new(k0, 0.0);
            a[(k, s + j)] = C64::new(k1 / c, 0.0);
            a[(s + k, j)] = C64::new(k1 / c, 0.0);
            a[(s + k, s + j)] = C64::new(k2 / (c * c), 0.0);
        }
    }
    let cond = condition_number(&a);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SeparationTooSmall { condition: cond });
    }
    let rhs: Vec<C64> = vals.iter().copied().chain(ds.iter().map(|d| d / c)).collect();
    let x = solve(&a, &rhs).map_err(|_| Error::SeparationTooSmall { condition: cond })?;
    Ok(Interp {
        alpha: x[..s].to_vec(),
        beta: x[s..].iter().map(|b| b / c).collect(),
        cond,
    })
}

/// `q(y)` and `q′(y)` with nodes `y_k = x_k / length`.
pub(super) fn q_eval(m: u32, support: &SupportSet, alpha: &[C64], beta: &[C64], y: f64, length: f64) -> (C64, C64) {
    let mut q = C64::new(0.0, 0.0);
    let mut q1 = C64::new(0.0, 0.0);
    for ((p, a), b) in support.points().iter().zip(alpha).zip(beta) {
        let yk = p.real().unwrap_or(0.0) / length;
        let (k0, k1, k2) = fejer4_normalized(m, y - yk);
        q += a * k0 + b * k1;
        q1 += a * k1 + b * k2;
    }
    (q, q1)
}

/// Fourier coefficients `q̂_{-m..m}` of the interpolant.
fn q_coeffs(m: u32, ys: &[f64], alpha: &[C64], beta: &[C64]) -> Vec<C64> {
    let kc = fejer4_coeffs(m);
    let d = (kc.len() / 2) as i64;
    let m = i64::from(m);
    (-m..=m)
        .map(|k| {
            if k.abs() > d {
                return C64::new(0.0, 0.0);
            }
            let kf = k as f64;
            let s: C64 = ys
                .iter()
                .zip(alpha.iter().zip(beta))
                .map(|(&y, (a, b))| (a + b * C64::new(0.0, 2.0 * PI * kf)) * cis(-2.0 * PI * kf * y))
                .sum();
            s * kc[(k + d) as usize]
        })
        .collect()
}

fn separation_ok(ys: &SupportSet, scale: f64, need: f64) -> bool {
    match min_separation(ys) {
        Ok(d) => d / scale >= need,
        Err(_) => true,
    }
}

/// Torus certificate of degree `m` interpolating `ω` with vanishing derivative on `T`.
///
/// `ν` is expressed in the normalized Fourier family of degree `m`.
pub fn build_torus_certificate(support: &SupportSet, omega: &[C64], m: u32) -> Result<Certificate> {
    check_signs(support, omega)?;
    if m == 0 {
        return Err(Error::InvalidParameter("degree must be positive".into()));
    }
    KernelSpace::TrigTorus { degree: m }.check_point(&support.points()[0])?;
    let ys: Vec<f64> = support.points().iter().map(|p| p.real().unwrap_or(0.0)).collect();
    let zeros = alloc::vec![C64::new(0.0, 0.0); ys.len()];
    let it = interpolate(m, &ys, omega, &zeros)?;
    let scale = f64::from(2 * m + 1).sqrt();
    let nu = q_coeffs(m, &ys, &it.alpha, &it.beta).into_iter().map(|c| c * scale).collect();
    Ok(Certificate {
        context: CertificateContext::Torus { m, fejer_n: fejer_n(m) },
        separation_ok: separation_ok(support, 1.0, 2.0 / f64::from(m)),
        support: support.clone(),
        omega: omega.to_vec(),
        alpha: it.alpha,
        beta: it.beta,
        op: MeasurementOperator::torus(m, m, true),
        nu,
        condition_number: it.cond,
    })
}

/// Bandlimited certificate `g(x) = q(x/L) h(x)` on a support inside `[-L/2, L/2]`.
///
/// `q` interpolates `ω_k / h(x_k)` with `q′(x_k/L) = −L ω_k h′(x_k)/h(x_k)²`, so
/// that `g(x_k) = ω_k` and `g′(x_k) = 0`. `ν` holds the coefficients of `q`.
pub fn build_pw_certificate(support: &SupportSet, omega: &[C64], m: u32, rho: f64, length: f64) -> Result<Certificate> {
    check_signs(support, omega)?;
    let op = MeasurementOperator::MollifiedFourier { m_meas: m, length, rho };
    op.check(&KernelSpace::PaleyWiener)?;
    KernelSpace::PaleyWiener.check_point(&support.points()[0])?;
    let xs: Vec<f64> = support.points().iter().map(|p| p.real().unwrap_or(0.0)).collect();
    if let Some(x) = xs.iter().find(|x| x.abs() > 0.5 * length) {
        return Err(Error::InvalidParameter(alloc::format!("node {x} outside [-L/2, L/2]")));
    }
    let mut vals = Vec::with_capacity(xs.len());
    let mut ds = Vec::with_capacity(xs.len());
    for (&x, w) in xs.iter().zip(omega) {
        let (h, h1, _) = window_d2(length, rho, x);
        vals.push(w / h);
        ds.push(w * (-length * h1 / (h * h)));
    }
    let ys: Vec<f64> = xs.iter().map(|x| x / length).collect();
    let it = interpolate(m, &ys, &vals, &ds)?;
    let nu = q_coeffs(m, &ys, &it.alpha, &it.beta);
    Ok(Certificate {
        context: CertificateContext::PaleyWiener { m, length, rho },
        separation_ok: separation_ok(support, length, 2.0 / f64::from(m)),
        support: support.clone(),
        omega: omega.to_vec(),
        alpha: it.alpha,
        beta: it.beta,
        op,
        nu,
        condition_number: it.cond,
    })
}

/// `√(2L/(ρ sinc(ρ/2L)²))`, the bound on `‖ν‖₂` for the bandlimited certificate.
pub fn pw_norm_bound(rho: f64, length: f64) -> f64 {
    let s = sinc(rho / (2.0 * length));
    (2.0 * length / (rho * s * s)).sqrt()
}
