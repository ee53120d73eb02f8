//! Search domains, their uniform grids, and the grid Beurling-LASSO.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::domain::DomainPoint;
use crate::linalg::{norm2, CMatrix};
use crate::measure::{Atom, AtomicMeasure};
use crate::measurements::MeasurementOperator;
use crate::rkhs::KernelSpace;
use crate::{Error, Result, C64};

/// Region the recovery program searches for atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchDomain {
    /// The whole torus.
    Torus,
    /// A closed interval of the line.
    Interval {
        /// Left end.
        lo: f64,
        /// Right end.
        hi: f64,
    },
    /// A closed disc around the origin.
    Disc {
        /// Radius.
        radius: f64,
    },
}

impl SearchDomain {
    /// Torus, `[-L/2, L/2]`, or `B_R(0)` depending on the setting.
    pub fn for_setting(op: &MeasurementOperator, space: &KernelSpace) -> Result<Self> {
        op.check(space)?;
        Ok(match (*op, *space) {
            (MeasurementOperator::MollifiedFourier { length, .. }, _) => Self::Interval {
                lo: -0.5 * length,
                hi: 0.5 * length,
            },
            (_, KernelSpace::Bargmann { radius }) => Self::Disc { radius },
            _ => Self::Torus,
        })
    }

    /// Number of real coordinates.
    pub fn dim(&self) -> usize {
        match self {
            Self::Disc { .. } => 2,
            _ => 1,
        }
    }

    /// Grid spacing for `n` points (per axis on the disc).
    pub fn cell(&self, n: usize) -> f64 {
        match *self {
            Self::Torus => 1.0 / n as f64,
            Self::Interval { lo, hi } => (hi - lo) / (n.max(2) - 1) as f64,
            Self::Disc { radius } => 2.0 * radius / (n.max(2) - 1) as f64,
        }
    }

    /// Uniform grid with `n` points (`n × n` lattice clipped to the disc).
    pub fn grid(&self, n: usize) -> Vec<DomainPoint> {
        let h = self.cell(n);
        match *self {
            Self::Torus => (0..n).map(|i| DomainPoint::Torus(i as f64 * h)).collect(),
            Self::Interval { lo, .. } => (0..n).map(|i| DomainPoint::Line(lo + i as f64 * h)).collect(),
            Self::Disc { radius } => {
                let mut out = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        let z = C64::new(-radius + i as f64 * h, -radius + j as f64 * h);
                        if z.norm() <= radius * (1.0 + 1e-12) {
                            out.push(DomainPoint::Plane(z));
                        }
                    }
                }
                out
            }
        }
    }

    /// Real coordinates of a point.
    pub fn coords(&self, p: &DomainPoint) -> [f64; 2] {
        let z = p.as_complex();
        [z.re, z.im]
    }

    /// Point from coordinates, wrapped or clamped into the domain.
    pub fn point(&self, c: [f64; 2]) -> DomainPoint {
        match *self {
            Self::Torus => {
                let y = c[0] - c[0].floor();
                DomainPoint::Torus(if y >= 1.0 { 0.0 } else { y })
            }
            Self::Interval { lo, hi } => DomainPoint::Line(c[0].clamp(lo, hi)),
            Self::Disc { radius } => {
                let z = C64::new(c[0], c[1]);
                let r = z.norm();
                DomainPoint::Plane(if r > radius { z * (radius / r) } else { z })
            }
        }
    }
}

/// Result of the grid Beurling-LASSO.
#[derive(Debug, Clone, PartialEq)]
pub struct GridLasso {
    /// One coefficient per grid point.
    pub coeffs: Vec<C64>,
    /// Final duality gap.
    pub gap: f64,
    /// Iterations run.
    pub iterations: usize,
    /// Gap tolerance reached.
    pub converged: bool,
}

/// Complex soft threshold `z max(0, 1 − τ/|z|)`.
#[inline]
pub fn soft(z: C64, tau: f64) -> C64 {
    let r = z.norm();
    if r <= tau {
        C64::new(0.0, 0.0)
    } else {
        z * (1.0 - tau / r)
    }
}

fn spectral_norm_sq(a: &CMatrix) -> f64 {
    let n = a.cols();
    if n == 0 {
        return 0.0;
    }
    let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + (i % 7) as f64 * 0.1, 0.0)).collect();
    let mut est = 0.0;
    for _ in 0..100 {
        let w = a.adjoint_mul_vec(&a.mul_vec(&v));
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let prev = est;
        est = nw / norm2(&v);
        v = w.into_iter().map(|x| x / nw).collect();
        if (est - prev).abs() <= 1e-10 * est {
            break;
        }
    }
    est
}

/// FISTA on `½‖Ax − b‖² + λ‖x‖₁` over grid coefficients, from `x = 0`.
///
/// Stops when the duality gap falls below `tol · ½‖b‖²`.
pub fn beurling_lasso(a: &CMatrix, b: &[C64], lambda: f64, max_iter: usize, tol: f64) -> Result<GridLasso> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("regularization {lambda} must be positive")));
    }
    let n = a.cols();
    let zero = C64::new(0.0, 0.0);
    let scale = 0.5 * norm2(b).powi(2);
    if scale == 0.0 {
        return Ok(GridLasso {
            coeffs: alloc::vec![zero; n],
            gap: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let lip = spectral_norm_sq(a) * 1.01;
    let mut x = alloc::vec![zero; n];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut gap = f64::INFINITY;
    let mut it = 0;
    while it < max_iter {
        it += 1;
        let ay = a.mul_vec(&y);
        let res: Vec<C64> = ay.iter().zip(b).map(|(u, v)| u - v).collect();
        let g = a.adjoint_mul_vec(&res);
        let x_new: Vec<C64> = y.iter().zip(&g).map(|(yi, gi)| soft(yi - gi / lip, lambda / lip)).collect();
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mom = (t - 1.0) / t_new;
        y = x_new.iter().zip(&x).map(|(xn, xo)| xn + (xn - xo) * mom).collect();
        x = x_new;
        t = t_new;
        if it % 10 == 0 || it == max_iter {
            gap = duality_gap(a, b, &x, lambda);
            if gap <= tol * scale {
                break;
            }
        }
    }
    Ok(GridLasso {
        converged: gap <= tol * scale,
        coeffs: x,
        gap,
        iterations: it,
    })
}

fn duality_gap(a: &CMatrix, b: &[C64], x: &[C64], lambda: f64) -> f64 {
    let ax = a.mul_vec(x);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
    let primal = 0.5 * norm2(&r).powi(2) + lambda * x.iter().map(|v| v.norm()).sum::<f64>();
    let corr = a.adjoint_mul_vec(&r).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let s = (corr / lambda).max(1.0);
    let theta: Vec<C64> = r.iter().map(|v| v / s).collect();
    let dual = crate::linalg::inner(b, &theta).re - 0.5 * norm2(&theta).powi(2);
    (primal - dual).max(0.0)
}

/// Atoms from grid coefficients: keep `|c| ≥ rel · max|c|`, then merge clusters.
pub fn extract_atoms(grid: &[DomainPoint], coeffs: &[C64], rel: f64, merge_radius: f64) -> AtomicMeasure {
    let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return AtomicMeasure::empty();
    }
    let atoms: Vec<Atom> = grid
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| c.norm() >= rel * top)
        .map(|(p, c)| Atom::new(*p, *c))
        .collect();
    AtomicMeasure::new(atoms).map(|m| m.normalize(merge_radius)).unwrap_or_default()
}
