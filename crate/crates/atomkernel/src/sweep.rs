//! Cartesian expansion of ranged configs.

use crate::config::{ContaminationDesc, OperatorDesc, RandomContamination, ScenarioConfig, SpaceDesc, TruthDesc};
use crate::Error;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of scenario `index` in a sweep over base seed `seed`.
pub fn derived_seed(seed: u64, index: usize) -> u64 {
    mix(seed ^ mix(index as u64))
}

/// Expand `sweep` into concrete scenarios in a fixed order.
///
/// Axes nest as seed, m, rho, s, min_separation, noise_eps, contamination_tv
/// (the last varies fastest). Swept seeds are used as given; otherwise each
/// scenario gets [`derived_seed`] of the base seed. A config without a sweep
/// expands to itself.
pub fn sweep_expand(cfg: &ScenarioConfig) -> Result<Vec<ScenarioConfig>, Error> {
    cfg.validate()
        .map_err(|(p, m)| Error::Config { line: None, message: format!("{p}: {m}") })?;
    let Some(sw) = cfg.sweep.clone() else {
        return Ok(vec![cfg.clone()]);
    };
    let seeds: Vec<Option<u64>> = sw.seed.map(|s| s.values().into_iter().map(Some).collect()).unwrap_or(vec![None]);
    let ms: Vec<Option<u32>> = opt_axis(sw.m);
    let rhos = opt_axis(sw.rho);
    let ss = opt_axis(sw.s);
    let seps = opt_axis(sw.min_separation);
    let epss = opt_axis(sw.noise_eps);
    let tvs = opt_axis(sw.contamination_tv);
    let mut out = Vec::new();
    for seed in &seeds {
        for m in &ms {
            for rho in &rhos {
                for s in &ss {
                    for sep in &seps {
                        for eps in &epss {
                            for tv in &tvs {
                                let idx = out.len();
                                let mut c = cfg.clone();
                                c.sweep = None;
                                c.name = format!("{}-{idx:03}", cfg.name);
                                c.seed = seed.unwrap_or_else(|| derived_seed(cfg.seed, idx));
                                if let Some(m) = *m {
                                    set_m(&mut c, m);
                                }
                                if let (Some(r), OperatorDesc::MollifiedFourier { rho, .. }) = (*rho, &mut c.operator) {
                                    *rho = r;
                                }
                                if let TruthDesc::Random(t) = &mut c.truth {
                                    if let Some(s) = *s {
                                        t.s = s;
                                    }
                                    if let Some(d) = *sep {
                                        t.min_separation = Some(d);
                                    }
                                }
                                if let Some(e) = *eps {
                                    c.noise_eps = e;
                                }
                                if let Some(tv) = *tv {
                                    let atoms = match &c.contamination {
                                        Some(ContaminationDesc::Random(r)) => r.atoms,
                                        _ => 1,
                                    };
                                    c.contamination = Some(ContaminationDesc::Random(RandomContamination { tv, atoms }));
                                }
                                out.push(c);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn opt_axis<T: Copy>(v: Option<Vec<T>>) -> Vec<Option<T>> {
    v.map(|v| v.into_iter().map(Some).collect()).unwrap_or(vec![None])
}

fn set_m(c: &mut ScenarioConfig, new: u32) {
    match &mut c.operator {
        OperatorDesc::TorusFourier { m, .. } => {
            *m = new;
            if let SpaceDesc::Torus { degree } = &mut c.space {
                *degree = new;
            }
        }
        OperatorDesc::MollifiedFourier { m, .. } => *m = new,
        OperatorDesc::BargmannMonomials { .. } => {}
    }
}
