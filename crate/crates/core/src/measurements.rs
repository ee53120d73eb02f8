//! Finite Bessel families `{M_j}` and the maps `μ ↦ (⟨K*μ, M_j⟩)_j`, `ν ↦ M*ν`.
//!
//! Every family member lies in the space, so `⟨K_x, M_j⟩ = conj(M_j(x))` and
//! one closed-form column per atom is all that is needed.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::domain::DomainPoint;
use crate::linalg::{cholesky, norm2, singular_values, CMatrix};
use crate::math::{cis, sinc_d2, weighted_monomials};
use crate::measure::{AtomicMeasure, ContaminationSpec};
use crate::rkhs::KernelSpace;
use crate::{Error, Result, C64};

/// Descriptor of a finite measurement family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementOperator {
    /// Fourier coefficients `j = -m_meas..m_meas` of a trigonometric polynomial.
    TorusFourier {
        /// Largest measured frequency.
        m_meas: u32,
        /// Degree of the underlying space.
        degree: u32,
        /// Scale by `(2·degree+1)^{-1/2}` so the family is orthonormal.
        normalized: bool,
    },
    /// Window-averaged Fourier samples `k = -m_meas..m_meas` of a bandlimited function.
    MollifiedFourier {
        /// Largest sample index.
        m_meas: u32,
        /// Observation length `L`.
        length: f64,
        /// Half width `ρ` of the averaging window, in units of `1/L`.
        rho: f64,
    },
    /// Weighted monomials `e^{-|z|²/2} zⁿ/√n!` for `n = 0..=trunc+1`.
    BargmannMonomials {
        /// Truncation index `N`.
        trunc: usize,
    },
}

impl MeasurementOperator {
    /// Torus Fourier family on a degree-`degree` space.
    pub fn torus(m_meas: u32, degree: u32, normalized: bool) -> Self {
        Self::TorusFourier {
            m_meas,
            degree,
            normalized,
        }
    }

    /// Number of measurements.
    pub fn len(&self) -> usize {
        match *self {
            Self::TorusFourier { m_meas, .. } | Self::MollifiedFourier { m_meas, .. } => 2 * m_meas as usize + 1,
            Self::BargmannMonomials { trunc } => trunc + 2,
        }
    }

    /// Always false: every family has at least one member.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Domain variant the family acts on.
    pub fn variant(&self) -> &'static str {
        match self {
            Self::TorusFourier { .. } => "torus",
            Self::MollifiedFourier { .. } => "line",
            Self::BargmannMonomials { .. } => "plane",
        }
    }

    /// Check the parameters and their compatibility with `space`.
    pub fn check(&self, space: &KernelSpace) -> Result<()> {
        match (*self, *space) {
            (Self::TorusFourier { m_meas, degree, .. }, KernelSpace::TrigTorus { degree: d }) => {
                if degree != d {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "operator built for degree {degree}, space has degree {d}"
                    )));
                }
                if m_meas > degree {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "measured frequency {m_meas} exceeds degree {degree}"
                    )));
                }
                Ok(())
            }
            (Self::MollifiedFourier { m_meas, length, rho }, KernelSpace::PaleyWiener) => {
                check_mollified(m_meas, length, rho)
            }
            (Self::BargmannMonomials { .. }, KernelSpace::Bargmann { radius }) => {
                if radius > 0.0 && radius.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(alloc::format!("Bargmann radius {radius} must be positive")))
                }
            }
            _ => Err(Error::VariantMismatch {
                expected: space.variant(),
                found: self.variant(),
            }),
        }
    }

    fn check_point(&self, x: &DomainPoint) -> Result<()> {
        if x.variant() == self.variant() {
            Ok(())
        } else {
            Err(Error::VariantMismatch {
                expected: self.variant(),
                found: x.variant(),
            })
        }
    }

    /// Measurement column of a unit atom: `a_j(x) = ⟨K_x, M_j⟩ = conj(M_j(x))`.
    pub fn column(&self, x: &DomainPoint) -> Result<Vec<C64>> {
        self.check_point(x)?;
        Ok(match (*self, *x) {
            (Self::TorusFourier { m_meas, degree, normalized }, DomainPoint::Torus(t)) => {
                let s = torus_scale(degree, normalized);
                freqs(m_meas).map(|j| cis(-2.0 * PI * j * t) * s).collect()
            }
            (Self::MollifiedFourier { m_meas, length, rho }, DomainPoint::Line(t)) => {
                let w = window_d2(length, rho, t).0;
                freqs(m_meas).map(|k| cis(-2.0 * PI * k * t / length) * w).collect()
            }
            (Self::BargmannMonomials { trunc }, DomainPoint::Plane(z)) => {
                weighted_monomials(z, trunc + 2).into_iter().map(|v| v.conj()).collect()
            }
            _ => unreachable!("variant checked above"),
        })
    }

    /// Column together with its partial derivatives in the real coordinates
    /// of `x` (one for the torus and the line, `∂_re` and `∂_im` on the plane).
    pub fn column_jet(&self, x: &DomainPoint) -> Result<(Vec<C64>, Vec<Vec<C64>>)> {
        self.check_point(x)?;
        Ok(match (*self, *x) {
            (Self::TorusFourier { m_meas, degree, normalized }, DomainPoint::Torus(t)) => {
                let s = torus_scale(degree, normalized);
                let col: Vec<C64> = freqs(m_meas).map(|j| cis(-2.0 * PI * j * t) * s).collect();
                let d = freqs(m_meas)
                    .zip(&col)
                    .map(|(j, &a)| a * C64::new(0.0, -2.0 * PI * j))
                    .collect();
                (col, alloc::vec![d])
            }
            (Self::MollifiedFourier { m_meas, length, rho }, DomainPoint::Line(t)) => {
                let (w, w1, _) = window_d2(length, rho, t);
                let mut col = Vec::with_capacity(self.len());
                let mut d = Vec::with_capacity(self.len());
                for k in freqs(m_meas) {
                    let e = cis(-2.0 * PI * k * t / length);
                    col.push(e * w);
                    d.push(e * (C64::new(w1, 0.0) + C64::new(0.0, -2.0 * PI * k / length) * w));
                }
                (col, alloc::vec![d])
            }
            (Self::BargmannMonomials { trunc }, DomainPoint::Plane(z)) => {
                let m = weighted_monomials(z, trunc + 2);
                let i = C64::new(0.0, 1.0);
                let mut dx = Vec::with_capacity(m.len());
                let mut dy = Vec::with_capacity(m.len());
                for n in 0..m.len() {
                    let prev = if n > 0 { m[n - 1] * (n as f64).sqrt() } else { C64::new(0.0, 0.0) };
                    dx.push((m[n] * -z.re + prev).conj());
                    dy.push((m[n] * -z.im + i * prev).conj());
                }
                (m.into_iter().map(|v| v.conj()).collect(), alloc::vec![dx, dy])
            }
            _ => unreachable!("variant checked above"),
        })
    }

    /// Dense measurement matrix with one column per point.
    pub fn matrix(&self, points: &[DomainPoint]) -> Result<CMatrix> {
        let cols = points.iter().map(|p| self.column(p)).collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_fn(self.len(), points.len(), |j, i| cols[i][j]))
    }
}

fn check_mollified(m_meas: u32, length: f64, rho: f64) -> Result<()> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("length {length} must be positive")));
    }
    if !(rho > 0.0 && rho <= 0.5) {
        return Err(Error::InvalidParameter(alloc::format!("window half width {rho} outside (0, 1/2]")));
    }
    if f64::from(2 * m_meas + 1) >= length {
        return Err(Error::InvalidParameter(alloc::format!(
            "need (2m+1)/L < 1, got m = {m_meas}, L = {length}"
        )));
    }
    Ok(())
}

fn freqs(m: u32) -> impl Iterator<Item = f64> {
    let m = i64::from(m);
    (-m..=m).map(|j| j as f64)
}

fn torus_scale(degree: u32, normalized: bool) -> f64 {
    if normalized {
        1.0 / f64::from(2 * degree + 1).sqrt()
    } else {
        1.0
    }
}

/// Window `h(x) = (L/2ρ)^{1/2} sin(2πρx/L)/(πx)` and its first two derivatives.
///
/// Its Fourier transform is `(L/2ρ)^{1/2}` on `[-ρ/L, ρ/L]`, so `‖h‖₂ = 1` and
/// the shifted copies `e^{2πikx/L} h(x)` are orthonormal.
pub fn window_d2(length: f64, rho: f64, x: f64) -> (f64, f64, f64) {
    let a = 2.0 * rho / length;
    let amp = (length / (2.0 * rho)).sqrt() * a;
    let (s, s1, s2) = sinc_d2(a * x);
    (amp * s, amp * a * s1, amp * a * a * s2)
}

/// Number of monomials needed on `B_R`: the smallest `N` with
/// `R²e/(N+2) ≤ 1/2` and `Σ_{n>N+1} e^{-R²}R^{2n}/n! ≤ 1e-10`.
pub fn truncation_n(radius: f64) -> usize {
    let r2 = radius * radius;
    let mut n = 0usize;
    loop {
        if r2 * core::f64::consts::E / (n as f64 + 2.0) <= 0.5 && poisson_tail(r2, n + 2) <= 1e-10 {
            return n;
        }
        n += 1;
    }
}

/// `Σ_{n ≥ start} e^{-x} xⁿ/n!`.
pub fn poisson_tail(x: f64, start: usize) -> f64 {
    if x == 0.0 {
        return if start == 0 { 1.0 } else { 0.0 };
    }
    let mut log_term = -x;
    for n in 1..=start {
        log_term += x.ln() - (n as f64).ln();
    }
    let mut term = log_term.exp();
    let mut sum = 0.0;
    let mut n = start;
    while term > 1e-300 && (n < start + 10 || term > 1e-18 * sum) {
        sum += term;
        n += 1;
        term *= x / n as f64;
    }
    sum
}

/// Measured values together with the family that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVector {
    /// Producing family.
    pub op: MeasurementOperator,
    /// `(⟨f, M_j⟩)_j`.
    pub values: Vec<C64>,
}

impl MeasurementVector {
    /// Wrap values after a length check.
    pub fn new(op: MeasurementOperator, values: Vec<C64>) -> Result<Self> {
        if values.len() != op.len() {
            return Err(Error::LengthMismatch {
                expected: op.len(),
                got: values.len(),
            });
        }
        Ok(Self { op, values })
    }

    /// Euclidean norm of the values.
    pub fn norm(&self) -> f64 {
        norm2(&self.values)
    }
}

/// `M(K*(μ + μ_c))`.
pub fn apply(
    op: &MeasurementOperator,
    space: &KernelSpace,
    mu: &AtomicMeasure,
    contamination: Option<&ContaminationSpec>,
) -> Result<MeasurementVector> {
    op.check(space)?;
    let mut values = alloc::vec![C64::new(0.0, 0.0); op.len()];
    let extra = contamination.map(|c| c.measure.atoms()).unwrap_or(&[]);
    for atom in mu.atoms().iter().chain(extra) {
        for (v, a) in values.iter_mut().zip(op.column(&atom.location)?) {
            *v += atom.weight * a;
        }
    }
    Ok(MeasurementVector { op: *op, values })
}

/// The function `ψ = M*ν = Σ ν_j M_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointFunction {
    op: MeasurementOperator,
    nu: Vec<C64>,
}

impl AdjointFunction {
    /// Coefficients `ν`.
    pub fn nu(&self) -> &[C64] {
        &self.nu
    }

    /// Family the coefficients refer to.
    pub fn op(&self) -> &MeasurementOperator {
        &self.op
    }

    /// `ψ(x)`.
    pub fn eval(&self, x: &DomainPoint) -> Result<C64> {
        let col = self.op.column(x)?;
        Ok(self.nu.iter().zip(col).map(|(n, a)| n * a.conj()).sum())
    }

    /// `ψ`, `ψ′`, `ψ″` at a torus or line point.
    pub fn eval_d2(&self, x: &DomainPoint) -> Result<[C64; 3]> {
        self.op.check_point(x)?;
        match (self.op, *x) {
            (MeasurementOperator::TorusFourier { m_meas, degree, normalized }, DomainPoint::Torus(t)) => {
                let s = torus_scale(degree, normalized);
                let mut out = [C64::new(0.0, 0.0); 3];
                for (j, n) in freqs(m_meas).zip(&self.nu) {
                    let w = 2.0 * PI * j;
                    let e = cis(w * t) * *n * s;
                    out[0] += e;
                    out[1] += e * C64::new(0.0, w);
                    out[2] += e * -(w * w);
                }
                Ok(out)
            }
            (MeasurementOperator::MollifiedFourier { m_meas, length, rho }, DomainPoint::Line(x)) => {
                let (h, h1, h2) = window_d2(length, rho, x);
                let mut q = [C64::new(0.0, 0.0); 3];
                for (k, n) in freqs(m_meas).zip(&self.nu) {
                    let w = 2.0 * PI * k / length;
                    let e = cis(w * x) * *n;
                    q[0] += e;
                    q[1] += e * C64::new(0.0, w);
                    q[2] += e * -(w * w);
                }
                Ok([q[0] * h, q[1] * h + q[0] * h1, q[2] * h + q[1] * (2.0 * h1) + q[0] * h2])
            }
            _ => Err(Error::WrongOperator("derivatives need a real-line or torus family")),
        }
    }
}

/// `M*ν` as a pointwise-evaluable function.
pub fn adjoint_function(op: &MeasurementOperator, nu: &[C64]) -> Result<AdjointFunction> {
    if nu.len() != op.len() {
        return Err(Error::LengthMismatch {
            expected: op.len(),
            got: nu.len(),
        });
    }
    Ok(AdjointFunction {
        op: *op,
        nu: nu.to_vec(),
    })
}

/// Trigonometric polynomial `p(y) = Σ_{|k|≤m} p_k e^{2πiky}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    /// Coefficients `p_{-m}, …, p_m`.
    pub coeffs: Vec<C64>,
}

impl TrigPoly {
    /// Degree `m`.
    pub fn degree(&self) -> u32 {
        (self.coeffs.len() / 2) as u32
    }

    /// `p(y)`.
    pub fn eval(&self, y: f64) -> C64 {
        freqs(self.degree())
            .zip(&self.coeffs)
            .map(|(k, c)| c * cis(2.0 * PI * k * y))
            .sum()
    }
}

/// Re-encode mollified Fourier samples as `p(y) = Σ_k ⟨f, M_k⟩ e^{2πiky}`.
///
/// For `f = K*μ` this is `(2m+1) Σ_j c_j D_m(y − t_j/L) h(t_j)`.
pub fn encode_trig_poly(mv: &MeasurementVector) -> Result<TrigPoly> {
    match mv.op {
        MeasurementOperator::MollifiedFourier { .. } => Ok(TrigPoly {
            coeffs: mv.values.clone(),
        }),
        _ => Err(Error::WrongOperator("trigonometric re-encoding needs mollified Fourier samples")),
    }
}

/// Add a seeded perturbation of Euclidean norm exactly `eps`.
pub fn add_noise(mv: &MeasurementVector, eps: f64, seed: u64) -> Result<MeasurementVector> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("noise level {eps} must be nonnegative")));
    }
    if eps == 0.0 {
        return Ok(mv.clone());
    }
    let noise = sphere_vector(mv.values.len(), seed);
    let values = mv.values.iter().zip(noise).map(|(v, n)| v + n * eps).collect();
    Ok(MeasurementVector { op: mv.op, values })
}

/// Uniform point on the unit sphere of `ℂⁿ`, deterministic per seed.
pub fn sphere_vector(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let r = norm2(&v);
        if r > 0.0 {
            return v.into_iter().map(|x| x / r).collect();
        }
    }
}

/// Largest Bessel ratio `max_c ‖M(K*c)‖₂ / ‖K*c‖` over measures supported on `points`.
pub fn bessel_bound(op: &MeasurementOperator, space: &KernelSpace, points: &[DomainPoint]) -> Result<f64> {
    op.check(space)?;
    let a = op.matrix(points)?;
    let g = crate::rkhs::gram(space, &crate::domain::SupportSet::new(points.to_vec())?)?;
    let l = cholesky(&g)?;
    // B = A L^{-H}: each row b solves L conj(b) = conj(a) by forward substitution
    let n = points.len();
    let b = {
        let mut b = CMatrix::zeros(a.rows(), n);
        for r in 0..a.rows() {
            let mut y = alloc::vec![C64::new(0.0, 0.0); n];
            for i in 0..n {
                let mut acc = a[(r, i)].conj();
                for k in 0..i {
                    acc -= l[(i, k)] * y[k];
                }
                y[i] = acc / l[(i, i)];
            }
            for i in 0..n {
                b[(r, i)] = y[i].conj();
            }
        }
        b
    };
    Ok(singular_values(&b).first().copied().unwrap_or(0.0))
}

/// One reflector `r·h(t − τ) e^{2πiωt}` of a radar return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflector {
    /// Reflection coefficient.
    pub r: f64,
    /// Delay.
    pub tau: f64,
    /// Doppler shift.
    pub omega: f64,
}

/// Bargmann-space measure of a Gaussian-window radar return.
///
/// With the unit-norm window `g(t) = (2Λ²/π)^{1/4} e^{-Λ²t²}` the transform
/// `A_Λ` sends `M_ω T_τ g` to `e^{iπωτ} e^{-|z_k|²/2} e^{z z̄_k}`, so each
/// reflector becomes an atom at `z_k = Λτ − iπω/Λ` with weight `r e^{iπωτ}`.
pub fn radar_to_bargmann(reflectors: &[Reflector], lambda: f64) -> Result<AtomicMeasure> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("window scale {lambda} must be positive")));
    }
    let atoms = reflectors
        .iter()
        .map(|p| {
            let z = DomainPoint::plane(C64::new(lambda * p.tau, -PI * p.omega / lambda))?;
            Ok(crate::measure::Atom::new(z, cis(PI * p.omega * p.tau) * p.r))
        })
        .collect::<Result<Vec<_>>>()?;
    AtomicMeasure::new(atoms)
}
