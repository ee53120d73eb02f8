//! Points of the three index sets and their metrics.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// A point of the ambient index set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainPoint {
    /// Torus coordinate, canonical in `[0, 1)`.
    Torus(f64),
    /// Real-line coordinate.
    Line(f64),
    /// Complex-plane coordinate.
    Plane(C64),
}

impl DomainPoint {
    /// Torus point, reduced modulo 1.
    pub fn torus(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut r = x - x.floor();
        if r >= 1.0 {
            r = 0.0;
        }
        Ok(Self::Torus(r))
    }

    /// Point on the real line.
    pub fn line(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self::Line(x))
    }

    /// Point in the complex plane.
    pub fn plane(z: C64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self::Plane(z))
    }

    /// Variant name, used in error messages.
    pub fn variant(&self) -> &'static str {
        match self {
            Self::Torus(_) => "torus",
            Self::Line(_) => "line",
            Self::Plane(_) => "plane",
        }
    }

    /// Real coordinate of a torus or line point.
    pub fn real(&self) -> Option<f64> {
        match *self {
            Self::Torus(x) | Self::Line(x) => Some(x),
            Self::Plane(_) => None,
        }
    }

    /// Coordinate as a complex number (`x + 0i` for the real variants).
    pub fn as_complex(&self) -> C64 {
        match *self {
            Self::Torus(x) | Self::Line(x) => C64::new(x, 0.0),
            Self::Plane(z) => z,
        }
    }

    /// Same variant as `self`, with coordinate moved by `delta`.
    ///
    /// The imaginary part of `delta` is ignored for the real variants.
    pub fn shifted(&self, delta: C64) -> Self {
        match *self {
            Self::Torus(x) => {
                let y = x + delta.re;
                Self::Torus(y - y.floor())
            }
            Self::Line(x) => Self::Line(x + delta.re),
            Self::Plane(z) => Self::Plane(z + delta),
        }
    }

    fn same_variant(&self, other: &Self) -> bool {
        core::mem::discriminant(self) == core::mem::discriminant(other)
    }
}

/// Metric distance between two points of the same variant.
pub fn distance(a: &DomainPoint, b: &DomainPoint) -> Result<f64> {
    match (*a, *b) {
        (DomainPoint::Torus(x), DomainPoint::Torus(y)) => {
            let d = (x - y).abs();
            Ok(d.min((x - y + 1.0).abs()).min((x - y - 1.0).abs()))
        }
        (DomainPoint::Line(x), DomainPoint::Line(y)) => Ok((x - y).abs()),
        (DomainPoint::Plane(z), DomainPoint::Plane(w)) => Ok((z - w).norm()),
        _ => Err(Error::VariantMismatch {
            expected: a.variant(),
            found: b.variant(),
        }),
    }
}

/// Points closer than this count as one point.
pub const DUPLICATE_TOL: f64 = 1e-13;

/// Ordered set of distinct points of a single variant.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet {
    points: Vec<DomainPoint>,
}

impl SupportSet {
    /// Validate and wrap a list of points.
    pub fn new(points: Vec<DomainPoint>) -> Result<Self> {
        if let Some(first) = points.first() {
            for p in &points {
                if !first.same_variant(p) {
                    return Err(Error::VariantMismatch {
                        expected: first.variant(),
                        found: p.variant(),
                    });
                }
            }
        }
        for (i, p) in points.iter().enumerate() {
            for q in &points[..i] {
                if distance(p, q)? <= DUPLICATE_TOL {
                    return Err(Error::DuplicatePoint(i));
                }
            }
        }
        Ok(Self { points })
    }

    /// Torus support from raw coordinates.
    pub fn torus(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| DomainPoint::torus(x)).collect::<Result<_>>()?)
    }

    /// Line support from raw coordinates.
    pub fn line(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| DomainPoint::line(x)).collect::<Result<_>>()?)
    }

    /// Plane support from raw coordinates.
    pub fn plane(zs: &[C64]) -> Result<Self> {
        Self::new(zs.iter().map(|&z| DomainPoint::plane(z)).collect::<Result<_>>()?)
    }

    /// The points in order.
    pub fn points(&self) -> &[DomainPoint] {
        &self.points
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// True when the set has no points.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `x` to the nearest point of the set (`∞` when empty).
    pub fn distance_to(&self, x: &DomainPoint) -> f64 {
        self.points
            .iter()
            .filter_map(|t| distance(x, t).ok())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Smallest pairwise distance `Δ(T)`.
pub fn min_separation(set: &SupportSet) -> Result<f64> {
    if set.len() < 2 {
        return Err(Error::SeparationUndefined);
    }
    let pts = set.points();
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.min(distance(&pts[i], &pts[j])?);
        }
    }
    Ok(best)
}

/// Whether `x` lies in the open `δ`-neighborhood `S_δ` of the set.
pub fn in_neighborhood(x: &DomainPoint, set: &SupportSet, delta: f64) -> bool {
    set.distance_to(x) < delta
}
