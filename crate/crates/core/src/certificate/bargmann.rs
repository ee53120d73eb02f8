//! The `Φ(W)` interpolation system in the Bargmann space and the `σ̄`
//! separation quantities.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{check_signs, Certificate, CertificateContext};
use crate::domain::SupportSet;
use crate::linalg::{condition_number, solve, CMatrix};
use crate::math::weighted_monomials;
use crate::measurements::{truncation_n, MeasurementOperator};
use crate::rkhs::{bargmann_inner, bargmann_kernel, BargmannVector, KernelSpace};
use crate::{Error, Result, C64};

/// Default grid spacing for `σ̄↑` and the separation sup.
pub const SIGMA_GRID: f64 = 0.01;

fn sigma_term(d: f64) -> f64 {
    (-0.5 * d * d).exp() * (1.0 + d + d * d + d * d * d)
}

/// `sup_d |d/dd sigma_term(d)|`, from a fine scan with a small safety factor.
fn sigma_term_lipschitz() -> f64 {
    let mut best = 0.0f64;
    for i in 0..=20_000 {
        let d = f64::from(i) * 5e-4;
        let v = (-0.5 * d * d).exp() * (1.0 + d + 2.0 * d * d - d * d * d - d * d * d * d);
        best = best.max(v.abs());
    }
    best * 1.01
}

fn centers(set: &SupportSet) -> Vec<C64> {
    set.points().iter().map(|p| p.as_complex()).collect()
}

/// `σ̄(W, z) = Σ_j e^{-d_j²/2}(1 + d_j + d_j² + d_j³)`, `d_j = |z − w_j|`.
pub fn sigma_bar(set: &SupportSet, z: C64) -> f64 {
    centers(set).iter().map(|w| sigma_term((z - w).norm())).sum()
}

/// `σ̄↓(W) = max_i σ̄(W, w_i)`.
pub fn sigma_down(set: &SupportSet) -> f64 {
    centers(set).iter().map(|&w| sigma_bar(set, w)).fold(0.0, f64::max)
}

fn bounding_box(ws: &[C64], pad: f64) -> (f64, f64, f64, f64) {
    let lo_re = ws.iter().map(|z| z.re).fold(f64::INFINITY, f64::min) - pad;
    let hi_re = ws.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max) + pad;
    let lo_im = ws.iter().map(|z| z.im).fold(f64::INFINITY, f64::min) - pad;
    let hi_im = ws.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max) + pad;
    (lo_re, hi_re, lo_im, hi_im)
}

/// Upper estimate of `σ̄↑(W) = sup_z σ̄(W, z)`: grid sup at spacing `h` plus a
/// per-cell Lipschitz slack.
///
/// Points farther than 4 from `W` contribute at most `s·85e^{-8}` and never
/// attain the sup, so the grid covers the 4-neighborhood of `W`.
pub fn sigma_up(set: &SupportSet, h: f64) -> f64 {
    let ws = centers(set);
    if ws.is_empty() {
        return 0.0;
    }
    let (lo_re, hi_re, lo_im, hi_im) = bounding_box(&ws, 4.0);
    let nx = ((hi_re - lo_re) / h).ceil() as usize;
    let ny = ((hi_im - lo_im) / h).ceil() as usize;
    let mut best = 0.0f64;
    for i in 0..=nx {
        for j in 0..=ny {
            let z = C64::new(lo_re + i as f64 * h, lo_im + j as f64 * h);
            best = best.max(ws.iter().map(|w| sigma_term((z - w).norm())).sum());
        }
    }
    best + ws.len() as f64 * sigma_term_lipschitz() * h * core::f64::consts::FRAC_1_SQRT_2
}

/// Outcome of the separation condition check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationCheck {
    /// Exclusion radius `(√5 − 1)/(4σ̄↑)`.
    pub radius: f64,
    /// `sup Σ_j e^{-|z−w_j|²/2}` over `dist(z, W) > radius`.
    pub sup: f64,
    /// `(1 − τ) − sup`.
    pub margin: f64,
    /// `margin > 0`.
    pub ok: bool,
}

/// Evaluate the separation condition for a given `τ`.
pub fn check_separation(set: &SupportSet, tau: f64, h: f64) -> SeparationCheck {
    let ws = centers(set);
    let radius = (5f64.sqrt() - 1.0) / (4.0 * sigma_up(set, h));
    let gauss = |z: C64| -> f64 { ws.iter().map(|w| (-0.5 * (z - w).norm_sqr()).exp()).sum() };
    let mut sup = 0.0f64;
    let (lo_re, hi_re, lo_im, hi_im) = bounding_box(&ws, 4.0);
    let nx = ((hi_re - lo_re) / h).ceil() as usize;
    let ny = ((hi_im - lo_im) / h).ceil() as usize;
    for i in 0..=nx {
        for j in 0..=ny {
            let z = C64::new(lo_re + i as f64 * h, lo_im + j as f64 * h);
            if ws.iter().all(|w| (z - w).norm() > radius) {
                sup = sup.max(gauss(z));
            }
        }
    }
    // the sup sits on the boundary circles, which the lattice only brushes
    let rim = radius * (1.0 + 1e-9);
    for w in &ws {
        for a in 0..1440 {
            let z = w + crate::math::cis(f64::from(a) * core::f64::consts::TAU / 1440.0) * rim;
            if ws.iter().all(|v| (z - v).norm() > radius) {
                sup = sup.max(gauss(z));
            }
        }
    }
    let margin = (1.0 - tau) - sup;
    SeparationCheck {
        radius,
        sup,
        margin,
        ok: margin > 0.0,
    }
}

/// `g(z)` from the closed-form ansatz.
pub(super) fn eval_fast(cert: &Certificate, z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for ((p, a), b) in cert.support.points().iter().zip(&cert.alpha).zip(&cert.beta) {
        let w = p.as_complex();
        acc += bargmann_kernel(w, z) * (a + b * (z - w));
    }
    acc
}

fn ansatz_vector(ws: &[C64], idx: usize) -> BargmannVector {
    let s = ws.len();
    BargmannVector {
        center: ws[idx % s],
        order: (idx / s) as u32,
    }
}

/// Certificate `g = Σ α_k η_{w_k} + β_k dη_{w_k}` with `g(w_k) = ω_k` and
/// `⟨g, dη_{w_k}⟩ = 0`.
///
/// `ν_n = ⟨g, M_n⟩` for `n ≤ N+1`, where `N` is `trunc` or the tail rule on
/// `max|w_k| + 1`; the remainder `‖g − P_N g‖` is reported in the context.
pub fn build_bargmann_certificate(support: &SupportSet, omega: &[C64], trunc: Option<usize>) -> Result<Certificate> {
    check_signs(support, omega)?;
    KernelSpace::Bargmann { radius: 1.0 }.check_point(&support.points()[0])?;
    let sd = sigma_down(support);
    if sd - 1.0 >= 0.5 {
        return Err(Error::SeparationConditionViolated { excess: sd - 1.0 });
    }
    let su = sigma_up(support, SIGMA_GRID);
    let ws = centers(support);
    let s = ws.len();
    let phi = CMatrix::from_fn(2 * s, 2 * s, |r, c| bargmann_inner(&ansatz_vector(&ws, c), &ansatz_vector(&ws, r)));
    let defect = (0..2 * s)
        .map(|r| (0..2 * s).map(|c| (phi[(r, c)] - if r == c { 1.0 } else { 0.0 }).norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let cond = condition_number(&phi);
    let rhs: Vec<C64> = omega.iter().copied().chain(std::iter::repeat_n(C64::new(0.0, 0.0), s)).collect();
    let x = solve(&phi, &rhs).map_err(|_| Error::SeparationConditionViolated { excess: sd - 1.0 })?;
    let (alpha, beta) = (x[..s].to_vec(), x[s..].to_vec());

    let bound = 2.0 * defect / (1.0 - 2.0 * defect);
    let coeff_bound_ok = defect < 0.5
        && alpha.iter().zip(omega).all(|(a, w)| (a - w).norm() <= bound + 1e-12)
        && beta.iter().all(|b| b.norm() <= bound + 1e-12);

    let n = trunc.unwrap_or_else(|| truncation_n(ws.iter().map(|w| w.norm()).fold(0.0, f64::max) + 1.0));
    let len = n + 2;
    let mut nu = alloc::vec![C64::new(0.0, 0.0); len];
    for ((w, a), b) in ws.iter().zip(&alpha).zip(&beta) {
        let c: Vec<C64> = weighted_monomials(*w, len).into_iter().map(|v| v.conj()).collect();
        for k in 0..len {
            let shifted = if k > 0 { c[k - 1] * (k as f64).sqrt() } else { C64::new(0.0, 0.0) };
            nu[k] += a * c[k] + b * (shifted - w * c[k]);
        }
    }
    let mut g_norm2 = 0.0;
    for i in 0..2 * s {
        for j in 0..2 * s {
            g_norm2 += (x[i] * x[j].conj() * bargmann_inner(&ansatz_vector(&ws, i), &ansatz_vector(&ws, j))).re;
        }
    }
    let nu_norm2: f64 = nu.iter().map(|v| v.norm_sqr()).sum();
    let truncation_defect = (g_norm2 - nu_norm2).max(0.0).sqrt();

    Ok(Certificate {
        context: CertificateContext::Bargmann {
            trunc: n,
            phi_defect: defect,
            sigma_down: sd,
            sigma_up: su,
            coeff_bound_ok,
            truncation_defect,
        },
        separation_ok: defect <= sd - 1.0 + 1e-12,
        support: support.clone(),
        omega: omega.to_vec(),
        alpha,
        beta,
        op: MeasurementOperator::BargmannMonomials { trunc: n },
        nu,
        condition_number: cond,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainPoint;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sigma_examples() {
        let one = SupportSet::plane(&[c(0.7, 0.2)]).unwrap();
        assert_eq!(sigma_bar(&one, c(0.7, 0.2)), 1.0);
        let two = SupportSet::plane(&[c(0.0, 0.0), c(4.0, 0.0)]).unwrap();
        let want = 1.0 + 85.0 * (-8.0f64).exp();
        assert!((sigma_bar(&two, c(0.0, 0.0)) - want).abs() < 1e-15);
        assert!((sigma_down(&two) - want).abs() < 1e-15);
        assert!(sigma_up(&two, 0.02) >= sigma_down(&two));
    }

    #[test]
    fn single_center_is_identity_system() {
        let w = c(1.5, -2.0);
        let set = SupportSet::plane(&[w]).unwrap();
        let om = c(0.6, 0.8);
        let cert = build_bargmann_certificate(&set, &[om], Some(60)).unwrap();
        let CertificateContext::Bargmann { phi_defect, .. } = cert.context else { panic!() };
        assert!(phi_defect < 1e-15);
        assert!((cert.alpha[0] - om).norm() < 1e-15);
        assert!(cert.beta[0].norm() < 1e-15);
        let jet = cert.jet(&DomainPoint::Plane(w)).unwrap();
        let (lo, hi) = crate::linalg::hermitian2_eigenvalues(
            jet[1].norm_sqr() - jet[0].norm_sqr(),
            jet[0].conj() * jet[2],
            jet[1].norm_sqr() - jet[0].norm_sqr(),
        );
        assert!((lo + 1.0).abs() < 1e-14 && (hi + 1.0).abs() < 1e-14);
    }

    #[test]
    fn pair_at_distance_four() {
        let set = SupportSet::plane(&[c(0.0, 0.0), c(4.0, 0.0)]).unwrap();
        let cert = build_bargmann_certificate(&set, &[c(1.0, 0.0), c(-1.0, 0.0)], None).unwrap();
        let CertificateContext::Bargmann { phi_defect, sigma_down, coeff_bound_ok, truncation_defect, .. } = cert.context
        else {
            panic!()
        };
        assert!(phi_defect <= sigma_down - 1.0 + 1e-15);
        assert!(coeff_bound_ok);
        assert!(truncation_defect < 1e-4);
        let (r0, r1) = cert.residuals().unwrap();
        assert!(r0 < 1e-12 && r1 < 1e-12);
        let psi = cert.adjoint().unwrap();
        let z = DomainPoint::Plane(c(1.0, 0.5));
        assert!((psi.eval(&z).unwrap() - cert.eval(&z).unwrap()).norm() < 1e-5);
    }

    #[test]
    fn crowded_centers_rejected() {
        let set = SupportSet::plane(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        let r = build_bargmann_certificate(&set, &[c(1.0, 0.0), c(1.0, 0.0)], None);
        assert!(matches!(r, Err(Error::SeparationConditionViolated { .. })));
    }
}
