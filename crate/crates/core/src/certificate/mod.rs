//! Dual certificates `ψ = M*ν` that interpolate unit signs on a support and
//! stay strictly below one in modulus elsewhere, together with their
//! grid-based validation.

mod bargmann;
mod fejer;
mod trig;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

pub use bargmann::{
    build_bargmann_certificate, check_separation, sigma_bar, sigma_down, sigma_up, SeparationCheck,
};
pub use fejer::{fejer4, fejer4_coeffs, fejer4_curvature, fejer4_normalized, fejer_n};
pub use trig::{build_pw_certificate, build_torus_certificate, pw_norm_bound};

use crate::domain::{DomainPoint, SupportSet};
use crate::measurements::{adjoint_function, window_d2, AdjointFunction, MeasurementOperator};
use crate::rkhs::{bargmann_inner, BargmannVector};
use crate::{Error, Result, C64};

/// Radius of the near regions in units of `1/m`.
pub const NEAR_RADIUS: f64 = 0.16749;
/// Quadratic near-bound coefficient for the torus certificate.
pub const TORUS_NEAR_COEFF: f64 = 0.3354;
/// Quadratic near-bound coefficient for the bandlimited certificate.
pub const PW_NEAR_COEFF: f64 = 0.34;

/// Far-region level `1 − 0.34·0.16749²`.
pub fn far_level_default() -> f64 {
    1.0 - PW_NEAR_COEFF * NEAR_RADIUS * NEAR_RADIUS
}

/// Setting a certificate was built for.
#[derive(Debug, Clone, PartialEq)]
pub enum CertificateContext {
    /// Trigonometric polynomial of degree `m` on the torus.
    Torus {
        /// Degree.
        m: u32,
        /// Fejér frequency parameter `n`.
        fejer_n: u32,
    },
    /// `q(x/L) h(x)` on the line.
    PaleyWiener {
        /// Degree of `q`.
        m: u32,
        /// Observation length.
        length: f64,
        /// Window half width.
        rho: f64,
    },
    /// `Σ α_k η_{w_k} + β_k dη_{w_k}` in the Bargmann space.
    Bargmann {
        /// Truncation index of the monomial family `ν` refers to.
        trunc: usize,
        /// `‖Φ(W) − I‖_∞`.
        phi_defect: f64,
        /// `σ̄↓(W)`.
        sigma_down: f64,
        /// `σ̄↑(W)`.
        sigma_up: f64,
        /// Whether `|α_k − ω_k|, |β_k| ≤ 2ε/(1−2ε)` with `ε = ‖Φ(W) − I‖_∞`.
        coeff_bound_ok: bool,
        /// `‖g − P_N g‖`, the part of the ansatz outside the measured span.
        truncation_defect: f64,
    },
}

/// Interpolating function with its coefficients and measurement-side form.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// Setting and derived constants.
    pub context: CertificateContext,
    /// Interpolation nodes.
    pub support: SupportSet,
    /// Unit signs `ω`.
    pub omega: Vec<C64>,
    /// Value-ansatz coefficients.
    pub alpha: Vec<C64>,
    /// Derivative-ansatz coefficients.
    pub beta: Vec<C64>,
    /// Measurement family `ν` is expressed in.
    pub op: MeasurementOperator,
    /// `ν` with `ψ = M*ν`.
    pub nu: Vec<C64>,
    /// Condition number of the interpolation system.
    pub condition_number: f64,
    /// False when the support is below the separation the construction assumes.
    pub separation_ok: bool,
}

impl Certificate {
    /// `ψ(x)`.
    pub fn eval(&self, x: &DomainPoint) -> Result<C64> {
        Ok(self.jet(x)?[0])
    }

    /// Torus/line: `[ψ, ψ′, 0]`; plane: `[⟨ψ, η_z⟩, ⟨ψ, dη_z⟩, ⟨ψ, d²η_z⟩]`.
    pub fn jet(&self, x: &DomainPoint) -> Result<[C64; 3]> {
        let zero = C64::new(0.0, 0.0);
        match (&self.context, *x) {
            (CertificateContext::Torus { m, .. }, DomainPoint::Torus(t)) => {
                let (q, q1) = trig::q_eval(*m, &self.support, &self.alpha, &self.beta, t, 1.0);
                Ok([q, q1, zero])
            }
            (CertificateContext::PaleyWiener { m, length, rho }, DomainPoint::Line(t)) => {
                let (q, q1) = trig::q_eval(*m, &self.support, &self.alpha, &self.beta, t / length, *length);
                let (h, h1, _) = window_d2(*length, *rho, t);
                Ok([q * h, q1 / *length * h + q * h1, zero])
            }
            (CertificateContext::Bargmann { .. }, DomainPoint::Plane(z)) => {
                let mut out = [zero; 3];
                for (k, w) in self.support.points().iter().enumerate() {
                    let w = w.as_complex();
                    for (q, o) in out.iter_mut().enumerate() {
                        let probe = BargmannVector { center: z, order: q as u32 };
                        *o += self.alpha[k] * bargmann_inner(&BargmannVector::eta(w), &probe)
                            + self.beta[k] * bargmann_inner(&BargmannVector::d_eta(w), &probe);
                    }
                }
                Ok(out)
            }
            _ => Err(Error::VariantMismatch {
                expected: self.op.variant(),
                found: x.variant(),
            }),
        }
    }

    /// `M*ν` built from the stored measurement coefficients.
    pub fn adjoint(&self) -> Result<AdjointFunction> {
        adjoint_function(&self.op, &self.nu)
    }

    /// `‖ν‖₂`.
    pub fn nu_norm(&self) -> f64 {
        crate::linalg::norm2(&self.nu)
    }

    /// `max_k |ψ(x_k) − ω_k|` and `max_k |∂ψ(x_k)|`.
    pub fn residuals(&self) -> Result<(f64, f64)> {
        let mut r0 = 0.0f64;
        let mut r1 = 0.0f64;
        for (p, w) in self.support.points().iter().zip(&self.omega) {
            let j = self.jet(p)?;
            r0 = r0.max((j[0] - w).norm());
            r1 = r1.max(j[1].norm());
        }
        Ok((r0, r1))
    }
}

fn check_signs(support: &SupportSet, omega: &[C64]) -> Result<()> {
    if omega.len() != support.len() {
        return Err(Error::LengthMismatch {
            expected: support.len(),
            got: omega.len(),
        });
    }
    if support.is_empty() {
        return Err(Error::InvalidParameter("empty support".into()));
    }
    for w in omega {
        if (w.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(alloc::format!("sign {w} is not unimodular")));
        }
    }
    Ok(())
}

/// Grids and thresholds for [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    /// Grid spacing, shared by the far grid and the near grids.
    pub grid_res: f64,
    /// Radius of the near region around each node.
    pub near_radius: f64,
    /// Quadratic coefficient `c` of the near bound `1 − c m² d²` (trigonometric settings).
    pub near_coeff: f64,
    /// `|ψ|` must stay strictly below this level on the far grid.
    pub far_level: f64,
}

impl ValidationOptions {
    /// Defaults for a certificate's setting.
    ///
    /// Torus: spacing `1/(64m)`, radius `0.16749/m`, near coefficient
    /// `0.3354`, far level `0.991`. Line: the same in the `x/L` coordinate with
    /// coefficient `0.34` and far level `1 − 0.34·0.16749²`. Plane: radius
    /// `δ̄ = (√3−1)/(4σ̄↑)`, spacing `δ̄/16`, far level `1`.
    pub fn for_certificate(cert: &Certificate) -> Self {
        match cert.context {
            CertificateContext::Torus { m, .. } => {
                let m = f64::from(m);
                Self {
                    grid_res: 1.0 / (64.0 * m),
                    near_radius: NEAR_RADIUS / m,
                    near_coeff: TORUS_NEAR_COEFF,
                    far_level: 1.0 - 0.009,
                }
            }
            CertificateContext::PaleyWiener { m, length, .. } => {
                let m = f64::from(m);
                Self {
                    grid_res: length / (64.0 * m),
                    near_radius: NEAR_RADIUS * length / m,
                    near_coeff: PW_NEAR_COEFF,
                    far_level: far_level_default(),
                }
            }
            CertificateContext::Bargmann { sigma_up, .. } => {
                let delta = bargmann_near_radius(sigma_up);
                Self {
                    grid_res: delta / 16.0,
                    near_radius: delta,
                    near_coeff: 0.0,
                    far_level: 1.0,
                }
            }
        }
    }
}

/// `δ̄ = (√3 − 1)/(4σ̄↑)`.
pub fn bargmann_near_radius(sigma_up: f64) -> f64 {
    (3f64.sqrt() - 1.0) / (4.0 * sigma_up)
}

/// Outcome of a two-tier grid validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    /// `max_k |ψ(x_k) − ω_k|`.
    pub interp_residual: f64,
    /// `max_k |∂ψ(x_k)|`.
    pub deriv_residual: f64,
    /// Largest `|ψ|` on the far grid.
    pub offgrid_sup: f64,
    /// Largest `|ψ|` over every grid point, near and far.
    pub grid_sup: f64,
    /// Near grids respect the quadratic bound (trigonometric settings).
    pub near_bound_ok: bool,
    /// `offgrid_sup < far_level`.
    pub far_bound_ok: bool,
    /// Wirtinger Hessian of `|ψ|²` negative definite on the near grids (plane only).
    pub hessian_ok: Option<bool>,
    /// Largest Hessian eigenvalue on the near grids (plane only).
    pub hessian_max_eig: Option<f64>,
    /// Smallest `bound − |ψ|` on the near grids.
    pub near_margin: f64,
    /// `far_level − offgrid_sup`.
    pub far_margin: f64,
    /// Near-grid points evaluated.
    pub near_points: usize,
    /// Far-grid points evaluated.
    pub far_points: usize,
}

impl ValidationReport {
    /// All checks hold and `‖ψ‖_∞ ≤ 1 + 1e-9` on the grid.
    pub fn passed(&self) -> bool {
        self.interp_residual <= 1e-8
            && self.deriv_residual <= 1e-8
            && self.near_bound_ok
            && self.far_bound_ok
            && self.hessian_ok.unwrap_or(true)
            && self.grid_sup <= 1.0 + 1e-9
    }
}

/// Minimum number of near-grid points per node.
pub const MIN_NEAR_POINTS: usize = 8;

/// Check `|ψ|` against the near and far bounds on uniform grids.
pub fn validate(cert: &Certificate, opts: &ValidationOptions) -> Result<ValidationReport> {
    if !(opts.grid_res > 0.0 && opts.near_radius > 0.0) {
        return Err(Error::InvalidParameter("grid spacing and near radius must be positive".into()));
    }
    let (interp_residual, deriv_residual) = cert.residuals()?;
    let mut rep = ValidationReport {
        interp_residual,
        deriv_residual,
        offgrid_sup: 0.0,
        grid_sup: 0.0,
        near_bound_ok: true,
        far_bound_ok: true,
        hessian_ok: None,
        hessian_max_eig: None,
        near_margin: f64::INFINITY,
        far_margin: 0.0,
        near_points: 0,
        far_points: 0,
    };
    match cert.context {
        CertificateContext::Torus { m, .. } => validate_line_like(cert, opts, f64::from(m), 1.0, &mut rep)?,
        CertificateContext::PaleyWiener { m, length, .. } => {
            validate_line_like(cert, opts, f64::from(m), length, &mut rep)?
        }
        CertificateContext::Bargmann { .. } => validate_plane(cert, opts, &mut rep)?,
    }
    rep.far_margin = opts.far_level - rep.offgrid_sup;
    rep.far_bound_ok = rep.offgrid_sup < opts.far_level;
    Ok(rep)
}

fn validate_line_like(
    cert: &Certificate,
    opts: &ValidationOptions,
    m: f64,
    scale: f64,
    rep: &mut ValidationReport,
) -> Result<()> {
    let h = opts.grid_res;
    let r = opts.near_radius;
    let per_node = 2 * (r / h).floor() as usize + 1;
    if per_node < MIN_NEAR_POINTS {
        return Err(Error::GridTooCoarse(alloc::format!(
            "{per_node} points per near region at spacing {h}, need {MIN_NEAR_POINTS}"
        )));
    }
    let torus = matches!(cert.context, CertificateContext::Torus { .. });
    let make = |x: f64| {
        if torus {
            DomainPoint::torus(x)
        } else {
            DomainPoint::line(x)
        }
    };
    let nodes: Vec<f64> = cert.support.points().iter().map(|p| p.real().unwrap_or(0.0)).collect();
    // q is periodic in x/L, so on the line nodes near one window edge also
    // lift |ψ| at the other: distances are taken modulo the window
    let dist_to = |x: f64| {
        nodes
            .iter()
            .map(|&y| {
                let d = (x - y).abs() % scale;
                d.min(scale - d)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let half = 0.5 * scale;
    let shifts: &[f64] = if torus { &[0.0] } else { &[0.0, -1.0, 1.0] };
    let steps = (r / h).floor() as i64;
    for &x0 in &nodes {
        for &k in shifts {
            for i in -steps..=steps {
                let xr = x0 + k * scale + i as f64 * h;
                if k != 0.0 && !(-half..=half).contains(&xr) {
                    continue;
                }
                let x = make(xr)?;
                // the nearest node defines the bound where near regions overlap
                let dist = dist_to(xr);
                let v = cert.eval(&x)?.norm();
                let u = m * dist / scale;
                let bound = 1.0 - opts.near_coeff * u * u;
                rep.grid_sup = rep.grid_sup.max(v);
                if dist > 0.0 {
                    rep.near_margin = rep.near_margin.min(bound - v);
                    if v > bound + 1e-12 {
                        rep.near_bound_ok = false;
                    }
                }
                rep.near_points += 1;
            }
        }
    }
    let (lo, span) = if torus { (0.0, 1.0) } else { (-half, scale) };
    let n = (span / h).ceil() as usize;
    for i in 0..=n {
        if torus && i == n {
            break;
        }
        let xr = lo + span * i as f64 / n as f64;
        if dist_to(xr) < r {
            continue;
        }
        let x = make(xr)?;
        let v = cert.eval(&x)?.norm();
        rep.offgrid_sup = rep.offgrid_sup.max(v);
        rep.grid_sup = rep.grid_sup.max(v);
        rep.far_points += 1;
    }
    Ok(())
}

/// Largest eigenvalue `a + |b|` of the Wirtinger Hessian `[[a, b], [b̄, a]]` of `|ψ|²`.
pub fn wirtinger_hessian_max(jet: &[C64; 3]) -> f64 {
    let a = jet[1].norm_sqr() - jet[0].norm_sqr();
    let b = jet[0].conj() * jet[2];
    crate::linalg::hermitian2_eigenvalues(a, b, a).1
}

fn validate_plane(cert: &Certificate, opts: &ValidationOptions, rep: &mut ValidationReport) -> Result<()> {
    let h = opts.grid_res;
    let r = opts.near_radius;
    let steps = (r / h).floor() as i64;
    let mut max_eig = f64::NEG_INFINITY;
    for p in cert.support.points() {
        let w = p.as_complex();
        let mut count = 0usize;
        for i in -steps..=steps {
            for j in -steps..=steps {
                let d = C64::new(i as f64 * h, j as f64 * h);
                if d.norm() > r {
                    continue;
                }
                let jet = cert.jet(&DomainPoint::Plane(w + d))?;
                let v = jet[0].norm();
                rep.grid_sup = rep.grid_sup.max(v);
                rep.near_margin = rep.near_margin.min(1.0 - v);
                max_eig = max_eig.max(wirtinger_hessian_max(&jet));
                count += 1;
            }
        }
        if count < MIN_NEAR_POINTS {
            return Err(Error::GridTooCoarse(alloc::format!(
                "{count} points in a near disc at spacing {h}, need {MIN_NEAR_POINTS}"
            )));
        }
        rep.near_points += count;
    }
    rep.hessian_max_eig = Some(max_eig);
    rep.hessian_ok = Some(max_eig < 0.0);

    // beyond distance 5 from W every term is below e^{-12.5}·6
    let pts: Vec<C64> = cert.support.points().iter().map(|p| p.as_complex()).collect();
    let pad = 5.0;
    let lo_re = pts.iter().map(|z| z.re).fold(f64::INFINITY, f64::min) - pad;
    let hi_re = pts.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max) + pad;
    let lo_im = pts.iter().map(|z| z.im).fold(f64::INFINITY, f64::min) - pad;
    let hi_im = pts.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max) + pad;
    let nx = ((hi_re - lo_re) / h).ceil() as usize;
    let ny = ((hi_im - lo_im) / h).ceil() as usize;
    for i in 0..=nx {
        let x = lo_re + i as f64 * h;
        for j in 0..=ny {
            let z = C64::new(x, lo_im + j as f64 * h);
            if pts.iter().any(|w| (z - w).norm() < r) {
                continue;
            }
            let v = bargmann::eval_fast(cert, z).norm();
            rep.offgrid_sup = rep.offgrid_sup.max(v);
            rep.grid_sup = rep.grid_sup.max(v);
            rep.far_points += 1;
        }
    }
    Ok(())
}
