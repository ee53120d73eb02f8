//! Closed forms against independent numerical oracles.

mod common;

use std::f64::consts::PI;

use atomkernel_core::certificate::{fejer4, fejer4_curvature, fejer4_normalized};
use atomkernel_core::domain::DomainPoint;
use atomkernel_core::math::{cis, dirichlet};
use atomkernel_core::measure::{Atom, AtomicMeasure};
use atomkernel_core::measurements::{
    apply, encode_trig_poly, poisson_tail, radar_to_bargmann, truncation_n, window_d2, MeasurementOperator,
    Reflector,
};
use atomkernel_core::rkhs::{bargmann_inner, bargmann_kernel, BargmannVector, KernelSpace};
use atomkernel_core::C64;
use common::{bargmann_quadrature, integrate, integrate_panels};
use rand::Rng;

/// `(L/2ρ)^{1/2} ∫_{(k−ρ)/L}^{(k+ρ)/L} K̂_t(ω) dω` with `K̂_t(ω) = e^{-2πiωt}` on `[-1/2, 1/2]`.
fn mollified_by_quadrature(t: f64, k: i64, length: f64, rho: f64) -> C64 {
    let (a, b) = ((k as f64 - rho) / length, (k as f64 + rho) / length);
    let f = |w: f64| if w.abs() <= 0.5 { cis(-2.0 * PI * w * t) } else { C64::new(0.0, 0.0) };
    integrate(&f, a, b, 1e-14) * (length / (2.0 * rho)).sqrt()
}

#[test]
fn mollified_closed_form_matches_spectral_integral() {
    let (m, length) = (32u32, 100.0);
    let mut rng = common::rng(11);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let rho = [0.2, 0.1, 0.05, 0.5][i % 4];
        let t = if i == 0 { 0.0 } else { rng.gen_range(-60.0..60.0) };
        let op = MeasurementOperator::MollifiedFourier { m_meas: m, length, rho };
        let col = op.column(&DomainPoint::Line(t)).unwrap();
        for (j, k) in (-(m as i64)..=m as i64).enumerate().step_by(7) {
            worst = worst.max((col[j] - mollified_by_quadrature(t, k, length, rho)).norm());
        }
    }
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn mollified_example_atom() {
    let (t, length, rho) = (12.3, 100.0, 0.05);
    let op = MeasurementOperator::MollifiedFourier { m_meas: 32, length, rho };
    let mu = AtomicMeasure::new(vec![Atom::new(DomainPoint::Line(t), C64::new(1.0, 0.0))]).unwrap();
    let b = apply(&op, &KernelSpace::PaleyWiener, &mu, None).unwrap();
    let q = mollified_by_quadrature(t, 0, length, rho);
    assert!((b.values[32] - q).norm() <= 1e-10);
}

#[test]
fn window_derivatives_match_differences() {
    let (length, rho, h) = (100.0, 0.1, 1e-4);
    for &x in &[0.0, 1e-7, 3.0, -17.5, 49.0] {
        let (v, d1, d2) = window_d2(length, rho, x);
        let (vp, vm) = (window_d2(length, rho, x + h).0, window_d2(length, rho, x - h).0);
        assert!((d1 - (vp - vm) / (2.0 * h)).abs() <= 1e-8 * v.abs().max(1e-3));
        assert!((d2 - (vp - 2.0 * v + vm) / (h * h)).abs() <= 1e-5 * v.abs().max(1e-3));
    }
}

#[test]
fn bargmann_inner_products_match_plane_quadrature() {
    let centers = [
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
        (C64::new(0.3, -0.4), C64::new(1.1, 0.7)),
        (C64::new(-1.0, 2.0), C64::new(1.5, -0.5)),
        (C64::new(2.0, 0.0), C64::new(-2.0, 0.0)),
    ];
    let mut worst = 0.0f64;
    for (a, b) in centers {
        for p in 0..3 {
            for q in 0..3 {
                let u = BargmannVector { center: a, order: p };
                let v = BargmannVector { center: b, order: q };
                let mid = 0.5 * (a + b);
                let half = 0.5 * (a - b).norm() + 9.0;
                let num = bargmann_quadrature(&|z| u.eval(z), &|z| v.eval(z), mid, half);
                worst = worst.max((num - bargmann_inner(&u, &v)).norm());
            }
        }
    }
    assert!(worst <= 1e-8, "{worst}");
}

#[test]
fn bargmann_kernel_modulus_and_orthogonality() {
    let (w, z) = (C64::new(0.7, -1.2), C64::new(-0.4, 0.9));
    let ip = bargmann_inner(&BargmannVector::eta(w), &BargmannVector::eta(z));
    assert!((ip.norm() - (-0.5 * (z - w).norm_sqr()).exp()).abs() < 1e-15);
    assert!(bargmann_inner(&BargmannVector::eta(w), &BargmannVector::d_eta(w)).norm() < 1e-15);
    assert!((bargmann_inner(&BargmannVector::eta(w), &BargmannVector::eta(w)) - 1.0).norm() < 1e-15);
}

#[test]
fn bargmann_monomial_measurements_match_plane_quadrature() {
    let op = MeasurementOperator::BargmannMonomials { trunc: 8 };
    for w in [C64::new(0.0, 0.0), C64::new(0.8, -0.5), C64::new(-1.5, 1.0)] {
        let col = op.column(&DomainPoint::Plane(w)).unwrap();
        let mut fact = 1.0;
        for (n, c) in col.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            let mono = |z: C64| (-0.5 * z.norm_sqr()).exp() * z.powu(n as u32) / fact.sqrt();
            let num = bargmann_quadrature(&|z| bargmann_kernel(w, z), &mono, C64::new(0.0, 0.0), 10.0);
            assert!((num - c).norm() <= 1e-8, "n = {n}, w = {w}");
        }
    }
}

/// `e^{-|z|²/2} A_Λ r(z)` by quadrature, with `r(t) = g(t − τ) e^{2πiωt}`.
fn radar_by_quadrature(tau: f64, omega: f64, lambda: f64, z: C64) -> C64 {
    let norm = (2.0 / PI).powf(0.25) * lambda.sqrt();
    let f = |s: f64| {
        let g = norm * (-(lambda * (s - tau)).powi(2)).exp();
        let r = cis(2.0 * PI * omega * s) * g;
        (-(z - lambda * s).powu(2)).exp() * r
    };
    let c = 0.5 * (tau + z.re / lambda);
    let span = 14.0 / lambda + (tau - z.re / lambda).abs();
    let a = integrate_panels(&f, c - span, c + span, 400);
    norm * (0.5 * z * z - 0.5 * z.norm_sqr()).exp() * a
}

#[test]
fn radar_atoms_match_transform_quadrature() {
    for &(r, tau, omega, lambda) in &[(1.0, 0.0, 0.0, 1.0), (1.0, 2.0, 0.0, 1.0), (1.0, 1.0, 1.0, 1.0), (0.7, -0.6, 0.4, 1.7)] {
        let mu = radar_to_bargmann(&[Reflector { r, tau, omega }], lambda).unwrap();
        let atom = mu.atoms()[0];
        let zk = atom.location.as_complex();
        assert!((zk - C64::new(lambda * tau, -PI * omega / lambda)).norm() < 1e-14);
        for dz in [C64::new(0.0, 0.0), C64::new(0.5, 0.3), C64::new(-0.8, 0.6)] {
            let z = zk + dz;
            let num = radar_by_quadrature(tau, omega, lambda, z) * r;
            let closed = atom.weight * bargmann_kernel(zk, z);
            assert!((num - closed).norm() <= 1e-9, "{num} vs {closed} at {z}");
        }
    }
}

#[test]
fn torus_reproducing_property_by_trapezoid() {
    let mut rng = common::rng(5);
    for m in [1u32, 4, 16] {
        let n = 16 * (2 * m as usize + 1);
        let coeffs: Vec<C64> = (0..2 * m + 1).map(|_| common::cnormal(&mut rng)).collect();
        let p = |x: f64| -> C64 {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * cis(2.0 * PI * (i as f64 - m as f64) * x))
                .sum()
        };
        for _ in 0..5 {
            let y: f64 = rng.gen();
            let ip: C64 = (0..n)
                .map(|i| {
                    let x = i as f64 / n as f64;
                    p(x) * dirichlet(m, x - y)
                })
                .sum::<C64>()
                * (f64::from(2 * m + 1) / n as f64);
            assert!((ip - p(y)).norm() <= 1e-10);
        }
    }
}

#[test]
fn trig_reencoding_matches_direct_sum() {
    let (m, length, rho) = (16u32, 60.0, 0.1);
    let op = MeasurementOperator::MollifiedFourier { m_meas: m, length, rho };
    let mut rng = common::rng(9);
    let atoms: Vec<Atom> = (0..6)
        .map(|_| Atom::new(DomainPoint::Line(rng.gen_range(-30.0..30.0)), common::cnormal(&mut rng)))
        .collect();
    let mu = AtomicMeasure::new(atoms).unwrap();
    let p = encode_trig_poly(&apply(&op, &KernelSpace::PaleyWiener, &mu, None).unwrap()).unwrap();
    assert_eq!(p.degree(), m);
    for i in 0..40 {
        let y = i as f64 / 40.0 - 0.5;
        let direct: C64 = mu
            .atoms()
            .iter()
            .map(|a| {
                let t = a.location.real().unwrap();
                a.weight * (f64::from(2 * m + 1) * dirichlet(m, y - t / length) * window_d2(length, rho, t).0)
            })
            .sum();
        assert!((p.eval(y) - direct).norm() <= 1e-9);
    }
}

#[test]
fn centered_atom_reencodes_to_real_even_polynomial() {
    let op = MeasurementOperator::MollifiedFourier { m_meas: 8, length: 40.0, rho: 0.2 };
    let mu = AtomicMeasure::new(vec![Atom::new(DomainPoint::Line(0.0), C64::new(1.0, 0.0))]).unwrap();
    let p = encode_trig_poly(&apply(&op, &KernelSpace::PaleyWiener, &mu, None).unwrap()).unwrap();
    for &y in &[0.1, 0.27, 0.43] {
        assert!(p.eval(y).im.abs() < 1e-13);
        assert!((p.eval(y) - p.eval(-y)).norm() < 1e-13);
    }
    let zero = AtomicMeasure::empty();
    let p0 = encode_trig_poly(&apply(&op, &KernelSpace::PaleyWiener, &zero, None).unwrap()).unwrap();
    assert!(p0.coeffs.iter().all(|c| c.norm() == 0.0));
}

#[test]
fn truncation_tail_by_direct_summation() {
    for &r in &[0.5, 1.0, 3.0, 6.0, 7.0] {
        let n = truncation_n(r);
        let x = r * r;
        let mut tail = 0.0;
        let mut log_fact = 0.0;
        for k in 1..=4 * n.max(4) {
            log_fact += (k as f64).ln();
            if k > n + 1 {
                tail += (k as f64 * x.ln() - x - log_fact).exp();
            }
        }
        assert!(tail <= 1e-10, "R = {r}: tail {tail}");
        assert!((poisson_tail(x, n + 2) - tail).abs() <= 1e-12);
    }
    assert!(truncation_n(6.0) >= 194);
}

#[test]
fn fejer_derivatives_match_central_differences() {
    let h = 1e-5;
    for m in [8u32, 15, 128] {
        for &x in &[0.0, 1e-6, 0.0031, 0.2, 0.49, 0.77] {
            let (k, k1, k2) = fejer4(m, x);
            let (kp, kp1, _) = fejer4(m, x + h);
            let (km, km1, _) = fejer4(m, x - h);
            // absolute floor where κ′ or κ″ vanish, relative to the curvature at 0
            let scale = fejer4(m, 0.0).2.abs() * 1e2;
            assert!((k1 - (kp - km) / (2.0 * h)).abs() <= 1e-4 * k1.abs().max(1e-6 * scale));
            let fd1 = (kp1 - km1) / (2.0 * h);
            assert!((k2 - fd1).abs() <= 1e-4 * k2.abs().max(1e-6 * scale), "m {m} x {x}: {k2} vs {fd1}");
            let fd2 = (kp - 2.0 * k + km) / (h * h);
            assert!((k2 - fd2).abs() <= 1e-4 * k2.abs().max(1e-6 * scale), "m {m} x {x}: {k2} vs {fd2}");
        }
    }
}

#[test]
fn fejer_values_at_origin() {
    for m in [2u32, 16, 128] {
        let (k, k1, k2) = fejer4(m, 0.0);
        assert_eq!(k, f64::from(m / 2 + 1).powi(4));
        assert_eq!(k1, 0.0);
        assert!(k2 < 0.0);
        let (_, _, n2) = fejer4_normalized(m, 0.0);
        assert!((n2 - fejer4_curvature(m)).abs() <= 1e-9 * n2.abs());
    }
}
