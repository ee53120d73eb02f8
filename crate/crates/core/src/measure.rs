//! Finitely supported complex measures `μ = Σ c_i δ_{x_i}`.

use alloc::vec::Vec;


use crate::domain::{distance, in_neighborhood, DomainPoint, SupportSet};
use crate::{Error, Result, C64};

/// One weighted Dirac mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    /// Support point.
    pub location: DomainPoint,
    /// Complex weight.
    pub weight: C64,
}

impl Atom {
    /// Atom at `location` with weight `weight`.
    pub fn new(location: DomainPoint, weight: C64) -> Self {
        Self { location, weight }
    }
}

/// Finite list of atoms sharing one domain variant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    /// The zero measure.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Wrap atoms after checking they share a variant.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if let Some(first) = atoms.first() {
            for a in &atoms {
                if a.location.variant() != first.location.variant() {
                    return Err(Error::VariantMismatch {
                        expected: first.location.variant(),
                        found: a.location.variant(),
                    });
                }
            }
        }
        Ok(Self { atoms })
    }

    /// Measure from parallel location/weight slices.
    pub fn from_parts(locations: &[DomainPoint], weights: &[C64]) -> Result<Self> {
        if locations.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: locations.len(),
                got: weights.len(),
            });
        }
        Self::new(
            locations
                .iter()
                .zip(weights)
                .map(|(&l, &w)| Atom::new(l, w))
                .collect(),
        )
    }

    /// The atoms in order.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    /// True for the zero measure with no atoms.
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Variant of the support, if any atom exists.
    pub fn variant(&self) -> Option<&'static str> {
        self.atoms.first().map(|a| a.location.variant())
    }

    /// Support locations.
    pub fn locations(&self) -> Vec<DomainPoint> {
        self.atoms.iter().map(|a| a.location).collect()
    }

    /// Weights.
    pub fn weights(&self) -> Vec<C64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    /// `a · μ`.
    pub fn scaled(&self, a: C64) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|t| Atom::new(t.location, t.weight * a))
                .collect(),
        }
    }

    /// `μ + ν` as a concatenated atom list (not merged).
    pub fn plus(&self, other: &Self) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        Self::new(atoms)
    }

    /// Coalesce atoms closer than `merge_radius` and drop zero weights.
    ///
    /// Merged atoms sit at the `|c|`-weighted centroid and carry the summed
    /// weight. Coincident atoms always merge, even at radius 0.
    pub fn normalize(&self, merge_radius: f64) -> Self {
        let mut atoms = self.atoms.clone();
        loop {
            let mut best: Option<(usize, usize, f64)> = None;
            for i in 0..atoms.len() {
                for j in i + 1..atoms.len() {
                    let d = distance(&atoms[i].location, &atoms[j].location).unwrap_or(f64::INFINITY);
                    if d <= merge_radius && best.is_none_or(|(_, _, bd)| d < bd) {
                        best = Some((i, j, d));
                    }
                }
            }
            let Some((i, j, _)) = best else { break };
            let (a, b) = (atoms[i], atoms[j]);
            let (wa, wb) = (a.weight.norm(), b.weight.norm());
            let frac = if wa + wb > 0.0 { wb / (wa + wb) } else { 0.5 };
            let offset = displacement(&a.location, &b.location);
            atoms[i] = Atom::new(a.location.shifted(offset * frac), a.weight + b.weight);
            atoms.remove(j);
        }
        atoms.retain(|a| a.weight != C64::new(0.0, 0.0));
        Self { atoms }
    }

    /// Sum of weight moduli after merging coincident atoms.
    pub fn tv_norm(&self) -> f64 {
        self.normalize(0.0).atoms.iter().map(|a| a.weight.norm()).fold(0.0, |s, w| s + w)
    }
}

/// Shortest displacement from `a` to `b` (wrapping on the torus).
pub fn displacement(a: &DomainPoint, b: &DomainPoint) -> C64 {
    match (*a, *b) {
        (DomainPoint::Torus(x), DomainPoint::Torus(y)) => C64::new(crate::math::wrap_centered(y - x), 0.0),
        _ => b.as_complex() - a.as_complex(),
    }
}

/// Bookkeeping for the non-sparse part `μ_c` of a signal.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContaminationSpec {
    /// Finitely supported stand-in for the contamination.
    pub measure: AtomicMeasure,
}

impl ContaminationSpec {
    /// Wrap a contamination measure.
    pub fn new(measure: AtomicMeasure) -> Self {
        Self { measure }
    }

    /// `‖μ_c‖_TV`.
    pub fn tv_norm(&self) -> f64 {
        self.measure.tv_norm()
    }
}

/// `|μ|(S_δ)`: mass of atoms inside the open `δ`-neighborhood of `set`.
pub fn mass_in_neighborhood(mu: &AtomicMeasure, set: &SupportSet, delta: f64) -> f64 {
    mu.normalize(0.0)
        .atoms
        .iter()
        .filter(|a| in_neighborhood(&a.location, set, delta))
        .map(|a| a.weight.norm())
        .fold(0.0, |s, w| s + w)
}

/// Recovery error of an estimate against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchError {
    /// Largest distance between matched atoms (`∞` if a true atom is unmatched).
    pub support_err: f64,
    /// Largest relative weight error over matched pairs.
    pub weight_err: f64,
    /// TV mass of estimated atoms with no true partner.
    pub unmatched_mass: f64,
}

/// Greedy nearest-pair matching of estimated atoms to true atoms.
pub fn atom_match_error(estimate: &AtomicMeasure, truth: &AtomicMeasure) -> MatchError {
    let est = estimate.atoms();
    let tru = truth.atoms();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(est.len() * tru.len());
    for (i, e) in est.iter().enumerate() {
        for (j, t) in tru.iter().enumerate() {
            if let Ok(d) = distance(&e.location, &t.location) {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut est_used = alloc::vec![false; est.len()];
    let mut tru_used = alloc::vec![false; tru.len()];
    let mut support_err = 0.0f64;
    let mut weight_err = 0.0f64;
    for (d, i, j) in pairs {
        if est_used[i] || tru_used[j] {
            continue;
        }
        est_used[i] = true;
        tru_used[j] = true;
        support_err = support_err.max(d);
        let cw = tru[j].weight;
        let rel = (est[i].weight - cw).norm() / cw.norm().max(f64::MIN_POSITIVE);
        weight_err = weight_err.max(rel);
    }
    if tru_used.iter().any(|u| !u) {
        support_err = f64::INFINITY;
    }
    let unmatched_mass = est
        .iter()
        .zip(&est_used)
        .filter(|(_, u)| !**u)
        .map(|(a, _)| a.weight.norm())
        .fold(0.0, |s, w| s + w);
    MatchError {
        support_err,
        weight_err,
        unmatched_mass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(x: f64) -> DomainPoint {
        DomainPoint::torus(x).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn torus_measure(atoms: &[(f64, C64)]) -> AtomicMeasure {
        AtomicMeasure::new(atoms.iter().map(|&(x, w)| Atom::new(t(x), w)).collect()).unwrap()
    }

    #[test]
    fn tv_norm_examples() {
        assert_eq!(torus_measure(&[(0.2, c(1.0, 0.0)), (0.7, c(0.0, -2.0))]).tv_norm(), 3.0);
        assert_eq!(AtomicMeasure::empty().tv_norm(), 0.0);
        assert_eq!(torus_measure(&[(0.2, c(1.0, 0.0)), (0.2, c(-1.0, 0.0))]).tv_norm(), 0.0);
    }

    #[test]
    fn normalize_examples() {
        let m = torus_measure(&[(0.2, c(1.0, 0.0)), (0.2001, c(1.0, 0.0))]).normalize(1e-3);
        assert_eq!(m.len(), 1);
        assert_eq!(m.atoms()[0].weight, c(2.0, 0.0));
        assert!((m.atoms()[0].location.real().unwrap() - 0.20005).abs() < 1e-12);

        let one = torus_measure(&[(0.2, c(1.0, 0.0))]);
        assert_eq!(one.normalize(0.0), one);
        let two = torus_measure(&[(0.2, c(1.0, 0.0)), (0.7, c(1.0, 0.0))]);
        assert_eq!(two.normalize(1e-3), two);
    }

    #[test]
    fn normalize_merges_across_the_wrap() {
        let m = torus_measure(&[(0.9999, c(1.0, 0.0)), (0.0001, c(1.0, 0.0))]).normalize(1e-3);
        assert_eq!(m.len(), 1);
        let x = m.atoms()[0].location.real().unwrap();
        assert!(!(1e-12..=1.0 - 1e-12).contains(&x), "{x}");
    }

    #[test]
    fn mixed_variants_rejected() {
        let r = AtomicMeasure::new(alloc::vec![
            Atom::new(t(0.1), c(1.0, 0.0)),
            Atom::new(DomainPoint::Line(0.1), c(1.0, 0.0)),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn neighborhood_mass_examples() {
        let set = SupportSet::torus(&[0.3]).unwrap();
        let mu = torus_measure(&[(0.3, c(2.0, 0.0))]);
        assert_eq!(mass_in_neighborhood(&mu, &set, 0.01), 2.0);
        let mu = torus_measure(&[(0.3, c(2.0, 0.0)), (0.6, c(1.0, 0.0))]);
        assert_eq!(mass_in_neighborhood(&mu, &set, 0.01), 2.0);
        assert_eq!(mass_in_neighborhood(&AtomicMeasure::empty(), &set, 0.01), 0.0);
    }

    #[test]
    fn match_error_examples() {
        let truth = torus_measure(&[(0.3, c(2.0, 0.0))]);
        let e = atom_match_error(&truth, &truth);
        assert_eq!((e.support_err, e.weight_err, e.unmatched_mass), (0.0, 0.0, 0.0));

        let est = torus_measure(&[(0.3001, c(2.0, 0.0))]);
        let e = atom_match_error(&est, &truth);
        assert!((e.support_err - 1e-4).abs() < 1e-15);
        assert_eq!((e.weight_err, e.unmatched_mass), (0.0, 0.0));

        let est = torus_measure(&[(0.3, c(2.0, 0.0)), (0.9, c(0.01, 0.0))]);
        let e = atom_match_error(&est, &truth);
        assert_eq!((e.support_err, e.weight_err), (0.0, 0.0));
        assert!((e.unmatched_mass - 0.01).abs() < 1e-15);

        let e = atom_match_error(&AtomicMeasure::empty(), &truth);
        assert!(e.support_err.is_infinite());
    }
}
