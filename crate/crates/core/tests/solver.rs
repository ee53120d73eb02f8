use atomkernel_core::domain::{min_separation, DomainPoint, SupportSet};
use atomkernel_core::measure::{atom_match_error, Atom, AtomicMeasure};
use atomkernel_core::measurements::{add_noise, apply, truncation_n, MeasurementOperator, MeasurementVector};
use atomkernel_core::rkhs::KernelSpace;
use atomkernel_core::solver::{dual_optimality_check, solve, tv_min_value, SolverConfig};
use atomkernel_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn torus(m: u32) -> (MeasurementOperator, KernelSpace) {
    (MeasurementOperator::torus(m, m, true), KernelSpace::TrigTorus { degree: m })
}

#[test]
fn single_atom_noiseless() {
    let (op, space) = torus(16);
    let mu = AtomicMeasure::new(vec![Atom::new(DomainPoint::Torus(0.3), C64::new(2.5, 0.0))]).unwrap();
    let b = apply(&op, &space, &mu, None).unwrap();
    let r = solve(&op, &space, &b, &SolverConfig::for_operator(&op)).unwrap();
    let e = atom_match_error(&r.measure, &mu);
    assert_eq!(r.measure.len(), 1, "{r:?}");
    assert!(e.support_err <= 1e-6 && e.weight_err <= 1e-6, "{e:?}");
    assert!(r.converged);
    let (sup, ok) = dual_optimality_check(&r, &op, &space, 8 * 33).unwrap();
    assert!(ok, "{sup}");
}

#[test]
fn zero_data_gives_empty_measure() {
    let (op, space) = torus(16);
    let b = apply(&op, &space, &AtomicMeasure::empty(), None).unwrap();
    let r = solve(&op, &space, &b, &SolverConfig::for_operator(&op)).unwrap();
    assert!(r.measure.is_empty());
    assert_eq!(r.tv_value, 0.0);
    let (_, ok) = dual_optimality_check(&r, &op, &space, 8 * 33).unwrap();
    assert!(ok);
}

fn random_instance(m: u32, s: usize, seed: u64) -> AtomicMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let xs: Vec<f64> = (0..s).map(|_| rng.gen::<f64>()).collect();
        let Ok(t) = SupportSet::torus(&xs) else { continue };
        if min_separation(&t).unwrap() < 2.0 / f64::from(m) {
            continue;
        }
        let atoms = xs
            .iter()
            .map(|&x| {
                let r = rng.gen_range(0.5..2.0);
                let th = rng.gen_range(0.0..std::f64::consts::TAU);
                Atom::new(DomainPoint::Torus(x), C64::from_polar(r, th))
            })
            .collect();
        return AtomicMeasure::new(atoms).unwrap();
    }
}

#[test]
fn five_atoms_m128() {
    let (op, space) = torus(128);
    for seed in 0..3 {
        let mu = random_instance(128, 5, seed);
        let b = apply(&op, &space, &mu, None).unwrap();
        let r = solve(&op, &space, &b, &SolverConfig::for_operator(&op)).unwrap();
        let e = atom_match_error(&r.measure, &mu);
        assert_eq!(r.measure.len(), 5, "seed {seed}");
        assert!(e.support_err <= 1e-6 && e.weight_err <= 1e-6, "seed {seed}: {e:?}");
        assert!((r.tv_value - mu.tv_norm()).abs() <= 1e-6 * mu.tv_norm());
    }
}

#[test]
fn noisy_solution_is_feasible() {
    let (op, space) = torus(128);
    let mu = random_instance(128, 5, 7);
    for (k, &eps) in [1e-3, 1e-2].iter().enumerate() {
        let b = add_noise(&apply(&op, &space, &mu, None).unwrap(), eps, k as u64).unwrap();
        let r = solve(&op, &space, &b, &SolverConfig::for_operator(&op).with_eps(eps)).unwrap();
        assert!(r.residual_norm <= eps * (1.0 + 1e-9), "{} > {eps}", r.residual_norm);
        assert!(r.converged);
        assert!(r.tv_value <= mu.tv_norm() * (1.0 + 1e-6));
    }
}

#[test]
fn tv_value_is_homogeneous() {
    let (op, space) = torus(32);
    let mu = random_instance(32, 3, 11);
    let b = apply(&op, &space, &mu, None).unwrap();
    let cfg = SolverConfig::for_operator(&op);
    let r1 = solve(&op, &space, &b, &cfg).unwrap();
    let a = C64::from_polar(3.0, 0.7);
    let b2 = MeasurementVector::new(op, b.values.iter().map(|v| v * a).collect()).unwrap();
    let r2 = solve(&op, &space, &b2, &cfg).unwrap();
    assert!((r2.tv_value - 3.0 * r1.tv_value).abs() <= 1e-9 * r2.tv_value, "{} {}", r1.tv_value, r2.tv_value);
}

#[test]
fn tv_value_decreases_with_eps() {
    let (op, space) = torus(32);
    let mu = random_instance(32, 3, 12);
    let b = add_noise(&apply(&op, &space, &mu, None).unwrap(), 1e-3, 5).unwrap();
    let mut last = f64::INFINITY;
    for &eps in &[1e-3, 1e-2, 1e-1] {
        let v = tv_min_value(&op, &space, &b, eps).unwrap();
        assert!(v <= last + 1e-9, "{v} > {last}");
        last = v;
    }
}

#[test]
fn bargmann_recovery() {
    let bop = MeasurementOperator::BargmannMonomials { trunc: truncation_n(7.0) };
    let bspace = KernelSpace::Bargmann { radius: 6.0 };
    let zs = [C64::new(-2.5, -1.0), C64::new(2.0, -2.5), C64::new(1.5, 2.5), C64::new(-2.8, 3.3)];
    let mu = AtomicMeasure::new(
        zs.iter()
            .enumerate()
            .map(|(i, z)| Atom::new(DomainPoint::Plane(*z), C64::from_polar(1.0 + 0.2 * i as f64, i as f64)))
            .collect(),
    )
    .unwrap();
    let b = apply(&bop, &bspace, &mu, None).unwrap();
    let r = solve(&bop, &bspace, &b, &SolverConfig::for_operator(&bop)).unwrap();
    let e = atom_match_error(&r.measure, &mu);
    assert_eq!(r.measure.len(), 4);
    assert!(e.support_err <= 1e-6 && e.weight_err <= 1e-6, "{e:?}");
}

#[test]
fn paley_wiener_recovery() {
    let op = MeasurementOperator::MollifiedFourier { m_meas: 32, length: 100.0, rho: 0.1 };
    let mu = AtomicMeasure::new(vec![
        Atom::new(DomainPoint::Line(-30.0), C64::new(1.0, 0.5)),
        Atom::new(DomainPoint::Line(10.0), C64::new(-0.7, 0.0)),
        Atom::new(DomainPoint::Line(35.0), C64::new(0.0, 1.3)),
    ])
    .unwrap();
    let b = apply(&op, &KernelSpace::PaleyWiener, &mu, None).unwrap();
    let r = solve(&op, &KernelSpace::PaleyWiener, &b, &SolverConfig::for_operator(&op)).unwrap();
    let e = atom_match_error(&r.measure, &mu);
    assert_eq!(r.measure.len(), 3);
    assert!(e.support_err <= 1e-6 && e.weight_err <= 1e-6, "{e:?}");
}

#[test]
fn wrong_operator_is_rejected() {
    let (op, space) = torus(16);
    let b = apply(&op, &space, &AtomicMeasure::empty(), None).unwrap();
    let other = MeasurementOperator::torus(8, 8, true);
    assert!(solve(&other, &KernelSpace::TrigTorus { degree: 8 }, &b, &SolverConfig::for_operator(&other)).is_err());
}
