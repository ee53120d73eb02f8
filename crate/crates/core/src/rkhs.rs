//! The three unit-norm kernel spaces and the synthesis map `μ ↦ K*μ`.
//!
//! * `TrigTorus { degree: m }`: trigonometric polynomials of degree `≤ m` on
//!   `[0, 1)` with inner product `(2m+1)∫ p q̄`, kernel `K_y(x) = D_m(x − y)`.
//! * `PaleyWiener`: `L²` functions on the line with spectrum in `[-1/2, 1/2]`,
//!   kernel `K_t(s) = sinc(t − s)`.
//! * `Bargmann { radius }`: the normalized Bargmann space
//!   `{e^{-|z|²/2} F(z) : F entire}` with Lebesgue measure `dA/π` and kernel
//!   `K_w(z) = e^{-(|z|²+|w|²)/2} e^{z w̄}`. The radius only bounds the search
//!   region of the recovery program.

use alloc::vec::Vec;


use crate::domain::{DomainPoint, SupportSet};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::math::{dirichlet, sinc};
use crate::measure::AtomicMeasure;
use crate::{Error, Result, C64};

/// Descriptor of a reproducing kernel Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpace {
    /// Trigonometric polynomials of degree at most `degree` on the torus.
    TrigTorus {
        /// Polynomial degree `m`.
        degree: u32,
    },
    /// Bandlimited functions on the real line.
    PaleyWiener,
    /// Normalized Bargmann space on the complex plane.
    Bargmann {
        /// Radius `R` of the disc searched for atoms.
        radius: f64,
    },
}

impl KernelSpace {
    /// Domain variant the space is defined over.
    pub fn variant(&self) -> &'static str {
        match self {
            Self::TrigTorus { .. } => "torus",
            Self::PaleyWiener => "line",
            Self::Bargmann { .. } => "plane",
        }
    }

    /// Error unless `x` lives in this space's domain.
    pub fn check_point(&self, x: &DomainPoint) -> Result<()> {
        if x.variant() == self.variant() {
            Ok(())
        } else {
            Err(Error::VariantMismatch {
                expected: self.variant(),
                found: x.variant(),
            })
        }
    }

    /// Error unless every atom of `mu` lives in this space's domain.
    pub fn check_measure(&self, mu: &AtomicMeasure) -> Result<()> {
        mu.atoms().iter().try_for_each(|a| self.check_point(&a.location))
    }
}

/// Kernel value `K(x, y) = K_x(y) = ⟨K_x, K_y⟩`.
pub fn kernel_eval(space: &KernelSpace, x: &DomainPoint, y: &DomainPoint) -> Result<C64> {
    space.check_point(x)?;
    space.check_point(y)?;
    Ok(match (space, *x, *y) {
        (KernelSpace::TrigTorus { degree }, DomainPoint::Torus(a), DomainPoint::Torus(b)) => {
            C64::new(dirichlet(*degree, b - a), 0.0)
        }
        (KernelSpace::PaleyWiener, DomainPoint::Line(a), DomainPoint::Line(b)) => C64::new(sinc(a - b), 0.0),
        (KernelSpace::Bargmann { .. }, DomainPoint::Plane(w), DomainPoint::Plane(z)) => bargmann_kernel(w, z),
        _ => unreachable!("variants checked above"),
    })
}

/// Normalized Bargmann kernel `K_w(z) = e^{-(|z|²+|w|²)/2 + z w̄}`.
#[inline]
pub fn bargmann_kernel(w: C64, z: C64) -> C64 {
    (z * w.conj() - 0.5 * (z.norm_sqr() + w.norm_sqr())).exp()
}

/// The function `f = K*μ`, evaluable pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthFunction {
    space: KernelSpace,
    measure: AtomicMeasure,
}

impl SynthFunction {
    /// Underlying space.
    pub fn space(&self) -> &KernelSpace {
        &self.space
    }

    /// Synthesizing measure.
    pub fn measure(&self) -> &AtomicMeasure {
        &self.measure
    }

    /// `f(x) = Σ c_i K_{x_i}(x)`.
    pub fn eval(&self, x: &DomainPoint) -> Result<C64> {
        self.space.check_point(x)?;
        let mut acc = C64::new(0.0, 0.0);
        for a in self.measure.atoms() {
            acc += a.weight * kernel_eval(&self.space, &a.location, x)?;
        }
        Ok(acc)
    }
}

/// Synthesis operator `D: μ ↦ K*μ`.
pub fn synthesize(space: &KernelSpace, mu: &AtomicMeasure) -> Result<SynthFunction> {
    space.check_measure(mu)?;
    Ok(SynthFunction {
        space: *space,
        measure: mu.clone(),
    })
}

/// Gram matrix `G[i][j] = ⟨K_{x_j}, K_{x_i}⟩`.
pub fn gram(space: &KernelSpace, set: &SupportSet) -> Result<CMatrix> {
    let pts = set.points();
    for p in pts {
        space.check_point(p)?;
    }
    let mut g = CMatrix::zeros(pts.len(), pts.len());
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            g[(i, j)] = kernel_eval(space, &pts[j], &pts[i])?;
        }
    }
    Ok(g)
}

/// Outcome of a linear-independence check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrtReport {
    /// True when the smallest Gram eigenvalue exceeds the tolerance.
    pub independent: bool,
    /// Smallest Gram eigenvalue.
    pub min_eigenvalue: f64,
}

/// Whether the kernels at `set` are numerically linearly independent.
pub fn hrt_check(space: &KernelSpace, set: &SupportSet, tol: f64) -> Result<HrtReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("hrt tolerance {tol} must be positive")));
    }
    let g = gram(space, set)?;
    let min_eigenvalue = hermitian_eigenvalues(&g).first().copied().unwrap_or(f64::INFINITY);
    Ok(HrtReport {
        independent: min_eigenvalue > tol,
        min_eigenvalue,
    })
}

/// Bargmann kernel derivatives `d^k η_w(z) = K_w(z)(z − w)^k`, `k ≤ 2`.
///
/// For `g` in the space, `⟨g, dη_w⟩ = e^{-|w|²/2}(G′(w) − w̄ G(w))` where
/// `g = e^{-|z|²/2} G`, which is exactly the factor that makes
/// `∂_z |g|²(w) = conj(g(w)) ⟨g, dη_w⟩` vanish at local maxima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargmannVector {
    /// Center `w`.
    pub center: C64,
    /// Derivative order `k ∈ {0, 1, 2}`.
    pub order: u32,
}

impl BargmannVector {
    /// `η_w`.
    pub fn eta(center: C64) -> Self {
        Self { center, order: 0 }
    }

    /// `dη_w`.
    pub fn d_eta(center: C64) -> Self {
        Self { center, order: 1 }
    }

    /// `d²η_w`.
    pub fn d2_eta(center: C64) -> Self {
        Self { center, order: 2 }
    }

    /// Pointwise value at `z`.
    pub fn eval(&self, z: C64) -> C64 {
        bargmann_kernel(self.center, z) * (z - self.center).powu(self.order)
    }
}

/// The triple `(η_w, dη_w, d²η_w)`.
pub fn bargmann_vectors(w: C64) -> [BargmannVector; 3] {
    [BargmannVector::eta(w), BargmannVector::d_eta(w), BargmannVector::d2_eta(w)]
}

/// Closed-form inner product `⟨u, v⟩` of two Bargmann derivative vectors.
///
/// With `u = (z−a)^p η_a`, `v = (z−b)^q η_b` and `δ = b − a`,
/// `⟨u, v⟩ = K_a(b) Σ_k C(q,k) p!/(p−k)! (−δ̄)^{q−k} δ^{p−k}`.
pub fn bargmann_inner(u: &BargmannVector, v: &BargmannVector) -> C64 {
    let (a, b) = (u.center, v.center);
    let (p, q) = (u.order, v.order);
    let delta = b - a;
    let shift = -delta.conj();
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..=p.min(q) {
        let binom = binomial(q, k);
        let falling = (p - k + 1..=p).fold(1.0, |f, i| f * f64::from(i));
        acc += shift.powu(q - k) * delta.powu(p - k) * (binom * falling);
    }
    bargmann_kernel(a, b) * acc
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// All kernel vectors `K_{x_i}` evaluated at `y`.
pub fn kernel_row(space: &KernelSpace, xs: &[DomainPoint], y: &DomainPoint) -> Result<Vec<C64>> {
    xs.iter().map(|x| kernel_eval(space, x, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;
    use core::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kernel_examples() {
        let b = KernelSpace::Bargmann { radius: 6.0 };
        let z = DomainPoint::Plane(c(0.7, -1.1));
        assert!((kernel_eval(&b, &z, &z).unwrap() - 1.0).norm() < 1e-15);
        let v = kernel_eval(&b, &DomainPoint::Plane(c(0.0, 0.0)), &DomainPoint::Plane(c(2.0, 0.0))).unwrap();
        assert!((v - (-2.0f64).exp()).norm() < 1e-15);
        let v = kernel_eval(&KernelSpace::PaleyWiener, &DomainPoint::Line(0.0), &DomainPoint::Line(0.5)).unwrap();
        assert!((v.re - 2.0 / PI).abs() < 1e-15);
        let t = KernelSpace::TrigTorus { degree: 3 };
        assert!(kernel_eval(&t, &DomainPoint::Line(0.0), &DomainPoint::Torus(0.0)).is_err());
    }

    #[test]
    fn kernels_are_hermitian() {
        let b = KernelSpace::Bargmann { radius: 6.0 };
        let (x, y) = (DomainPoint::Plane(c(1.0, 2.0)), DomainPoint::Plane(c(-0.5, 0.25)));
        let (u, v) = (kernel_eval(&b, &x, &y).unwrap(), kernel_eval(&b, &y, &x).unwrap());
        assert!((u - v.conj()).norm() <= 1e-15);
    }

    #[test]
    fn synthesize_examples() {
        let space = KernelSpace::TrigTorus { degree: 16 };
        let x0 = DomainPoint::torus(0.3).unwrap();
        let f = synthesize(&space, &AtomicMeasure::new(alloc::vec![Atom::new(x0, c(1.0, 0.0))]).unwrap()).unwrap();
        assert!((f.eval(&x0).unwrap() - 1.0).norm() < 1e-15);
        let zero = synthesize(&space, &AtomicMeasure::empty()).unwrap();
        assert_eq!(zero.eval(&x0).unwrap(), c(0.0, 0.0));
        // 2δ_{0.3}: grid sweep never reaches 2 away from the atom
        let f = synthesize(&space, &AtomicMeasure::new(alloc::vec![Atom::new(x0, c(2.0, 0.0))]).unwrap()).unwrap();
        assert!((f.eval(&x0).unwrap() - 2.0).norm() < 1e-14);
        for i in 0..4000 {
            let x = DomainPoint::torus(f64::from(i) / 4000.0).unwrap();
            if crate::domain::distance(&x, &x0).unwrap() > 1e-6 {
                assert!(f.eval(&x).unwrap().norm() < 2.0);
            }
        }
    }

    #[test]
    fn gram_structure() {
        let space = KernelSpace::TrigTorus { degree: 16 };
        let one = SupportSet::torus(&[0.4]).unwrap();
        let g = gram(&space, &one).unwrap();
        assert_eq!(g[(0, 0)], c(1.0, 0.0));
        let two = SupportSet::torus(&[0.1, 0.13]).unwrap();
        let g = gram(&space, &two).unwrap();
        assert!((g[(0, 1)].re - dirichlet(16, 0.1 - 0.13)).abs() < 1e-15);
        assert!((g[(1, 0)].re - dirichlet(16, 0.13 - 0.1)).abs() < 1e-15);
    }

    #[test]
    fn hrt_on_torus_dimension_boundary() {
        let m = 3u32;
        let n = 2 * m + 1;
        let space = KernelSpace::TrigTorus { degree: m };
        let pts: Vec<f64> = (0..n).map(|i| (f64::from(i) + 0.3) / f64::from(n)).collect();
        let rep = hrt_check(&space, &SupportSet::torus(&pts).unwrap(), 1e-10).unwrap();
        assert!(rep.independent);
        let mut more = pts.clone();
        more.push(0.5 / f64::from(n));
        let rep = hrt_check(&space, &SupportSet::torus(&more).unwrap(), 1e-10).unwrap();
        assert!(!rep.independent, "{}", rep.min_eigenvalue);
        assert!(rep.min_eigenvalue.abs() < 1e-12);
    }

    #[test]
    fn bargmann_inner_examples() {
        let w = c(0.8, -0.3);
        let [eta, deta, d2eta] = bargmann_vectors(w);
        assert!((bargmann_inner(&eta, &eta) - 1.0).norm() < 1e-15);
        assert!(bargmann_inner(&eta, &deta).norm() < 1e-15);
        assert!((bargmann_inner(&deta, &deta) - 1.0).norm() < 1e-15);
        assert!(bargmann_inner(&eta, &d2eta).norm() < 1e-15);
        let z = c(-1.0, 1.5);
        let v = bargmann_inner(&eta, &BargmannVector::eta(z));
        assert!((v.norm() - (-0.5 * (z - w).norm_sqr()).exp()).abs() < 1e-15);
        // inner product is conjugate symmetric
        let u = BargmannVector::d_eta(z);
        assert!((bargmann_inner(&d2eta, &u) - bargmann_inner(&u, &d2eta).conj()).norm() < 1e-15);
    }
}
