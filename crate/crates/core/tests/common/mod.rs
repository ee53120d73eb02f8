//! Independent numerical oracles and random generators shared by the test suites.
#![allow(dead_code)]

use atomkernel_core::domain::{min_separation, DomainPoint, SupportSet};
use atomkernel_core::measure::{Atom, AtomicMeasure};
use atomkernel_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for i in 0..7 {
        let s = f(c - h * GK_X[i]) + f(c + h * GK_X[i]);
        k += s * GK_WK[i];
        if i % 2 == 1 {
            g += s * GK_WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of a complex integrand on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: f64) -> C64 {
    fn rec(f: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: f64, depth: u32) -> C64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth >= 40 {
            return v;
        }
        let c = 0.5 * (a + b);
        rec(f, a, c, 0.5 * tol, depth + 1) + rec(f, c, b, 0.5 * tol, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

/// Composite 15-point Kronrod rule on `panels` equal pieces of `[a, b]`.
pub fn integrate_panels(f: &dyn Fn(f64) -> C64, a: f64, b: f64, panels: usize) -> C64 {
    let h = (b - a) / panels as f64;
    (0..panels).map(|i| gk15(f, a + i as f64 * h, a + (i + 1) as f64 * h).0).sum()
}

/// Trapezoid rule of `f` over the square `[cx ± half] × [cy ± half]`.
///
/// Spectrally accurate for integrands with Gaussian decay inside the box.
pub fn trapezoid_plane(f: &dyn Fn(C64) -> C64, center: C64, half: f64, h: f64) -> C64 {
    let n = (2.0 * half / h).round() as i64;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..=n {
        let wx = if i == 0 || i == n { 0.5 } else { 1.0 };
        let x = center.re - half + i as f64 * h;
        for j in 0..=n {
            let wy = if j == 0 || j == n { 0.5 } else { 1.0 };
            let y = center.im - half + j as f64 * h;
            acc += f(C64::new(x, y)) * (wx * wy);
        }
    }
    acc * (h * h)
}

/// `(1/π)∫ u conj(v) dA`, the inner product of the normalized Bargmann space.
pub fn bargmann_quadrature(u: &dyn Fn(C64) -> C64, v: &dyn Fn(C64) -> C64, center: C64, half: f64) -> C64 {
    trapezoid_plane(&|z| u(z) * v(z).conj(), center, half, 0.04) / std::f64::consts::PI
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn cnormal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `s` torus points with wrap-around separation at least `sep`.
pub fn separated_torus(rng: &mut ChaCha8Rng, s: usize, sep: f64) -> SupportSet {
    loop {
        let xs: Vec<f64> = (0..s).map(|_| rng.gen::<f64>()).collect();
        if let Ok(t) = SupportSet::torus(&xs) {
            if s < 2 || min_separation(&t).unwrap() >= sep {
                return t;
            }
        }
    }
}

/// Weights with moduli in `[0.5, 2]` and uniform phases on a support.
pub fn weighted(rng: &mut ChaCha8Rng, t: &SupportSet) -> AtomicMeasure {
    let atoms = t
        .points()
        .iter()
        .map(|p| Atom::new(*p, C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU))))
        .collect();
    AtomicMeasure::new(atoms).unwrap()
}

pub fn random_point(rng: &mut ChaCha8Rng, variant: &str) -> DomainPoint {
    match variant {
        "torus" => DomainPoint::torus(rng.gen()).unwrap(),
        "line" => DomainPoint::line(rng.gen_range(-50.0..50.0)).unwrap(),
        _ => DomainPoint::plane(C64::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0))).unwrap(),
    }
}
