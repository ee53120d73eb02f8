//! certify, recover and stability pipelines for one scenario.

use std::f64::consts::TAU;

use atomkernel_core::certificate::{
    build_bargmann_certificate, build_pw_certificate, build_torus_certificate, far_level_default, pw_norm_bound,
    validate, Certificate, CertificateContext, ValidationOptions, NEAR_RADIUS,
};
use atomkernel_core::domain::{min_separation, DomainPoint, SupportSet};
use atomkernel_core::measure::{atom_match_error, Atom, AtomicMeasure, ContaminationSpec};
use atomkernel_core::measurements::{add_noise, apply, radar_to_bargmann, MeasurementOperator, MeasurementVector, Reflector};
use atomkernel_core::rkhs::KernelSpace;
use atomkernel_core::solver::{dual_optimality_check, solve, SolverConfig, SolverResult};
use atomkernel_core::stability::{check_concentration, concentration_bound, estimate_c};
use atomkernel_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ContaminationDesc, Pipeline, RandomTruth, ScenarioConfig, SpaceDesc, TruthDesc};
use crate::dto::{
    certificate_json, match_json, measure_from_dto, measure_json, solver_json, stability_json, validation_json,
    MeasurementVectorDto,
};
use crate::sweep::mix;
use crate::Error;

const TRUTH_STREAM: u64 = 0;
const CONTAMINATION_STREAM: u64 = 1;
const NOISE_SALT: u64 = 0x6e6f_6973_65;
const SIGNS_SALT: u64 = 0x7369_676e_73;

/// Flat results row; absent values print as empty cells.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Row {
    /// Position in the expanded scenario list.
    pub scenario: usize,
    /// Scenario name.
    pub name: String,
    /// Pipeline name.
    pub pipeline: String,
    /// Scenario seed.
    pub seed: u64,
    /// Number of true atoms.
    pub s: Option<usize>,
    /// Minimum separation of the true support.
    pub min_separation: Option<f64>,
    /// Noise level.
    pub eps: f64,
    /// Contamination mass.
    pub contamination_tv: f64,
    /// Largest matched-atom distance.
    pub support_err: Option<f64>,
    /// Largest relative weight error.
    pub weight_err: Option<f64>,
    /// Recovered mass without a true partner.
    pub unmatched_mass: Option<f64>,
    /// Recovered atoms.
    pub n_atoms: Option<usize>,
    /// Recovered TV norm.
    pub tv_value: Option<f64>,
    /// True TV norm.
    pub tv_true: Option<f64>,
    /// Data residual.
    pub residual: Option<f64>,
    /// Largest dual-function modulus on the grid.
    pub dual_sup: Option<f64>,
    /// Solver convergence flag.
    pub converged: Option<bool>,
    /// Certificate interpolation residual.
    pub interp_residual: Option<f64>,
    /// Interpolation-system condition number.
    pub condition_number: Option<f64>,
    /// Largest certificate modulus on the far grid.
    pub far_sup: Option<f64>,
    /// Far level minus far sup.
    pub far_margin: Option<f64>,
    /// Smallest near-bound slack.
    pub near_margin: Option<f64>,
    /// `‖ν‖₂` of the certificate.
    pub nu_norm: Option<f64>,
    /// `C(λ, δ)` estimate.
    pub c_upper: Option<f64>,
    /// Concentration lower bound.
    pub bound_rhs: Option<f64>,
    /// Recovered mass near the true support.
    pub observed_mass: Option<f64>,
    /// Observed mass minus bound.
    pub bound_margin: Option<f64>,
    /// Pipeline-specific acceptance check.
    pub passed: bool,
    /// `ok` or the error message.
    pub status: String,
}

/// Result of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    /// Structured output.
    pub details: Value,
    /// CSV row.
    pub row: Row,
    /// Error that stopped the pipeline.
    pub error: Option<String>,
}

impl ScenarioOutcome {
    /// Pipeline ran and its check held.
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.row.passed
    }
}

/// Measured scenario data.
#[derive(Debug, Clone)]
pub struct Instance {
    /// Kernel space.
    pub space: KernelSpace,
    /// Measurement family.
    pub op: MeasurementOperator,
    /// Ground truth.
    pub truth: AtomicMeasure,
    /// Its support.
    pub support: SupportSet,
    /// Contamination.
    pub contamination: ContaminationSpec,
    /// Clean measurements of truth plus contamination.
    pub clean: MeasurementVector,
    /// Measurements with noise of norm `ε`.
    pub data: MeasurementVector,
}

fn stream(seed: u64, s: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(s);
    r
}

fn random_point(r: &mut ChaCha8Rng, cfg: &ScenarioConfig, region: Option<f64>) -> Result<DomainPoint, Error> {
    let p = match cfg.space {
        SpaceDesc::Torus { .. } => DomainPoint::torus(r.gen::<f64>()),
        SpaceDesc::PaleyWiener => {
            let half = match cfg.measurement_operator() {
                MeasurementOperator::MollifiedFourier { length, .. } => region.unwrap_or(0.5 * length),
                _ => region.unwrap_or(1.0),
            };
            DomainPoint::line(r.gen_range(-half..=half))
        }
        SpaceDesc::Bargmann { radius } => {
            let rad = region.unwrap_or(radius) * r.gen::<f64>().sqrt();
            DomainPoint::plane(C64::from_polar(rad, r.gen_range(0.0..TAU)))
        }
    };
    Ok(p?)
}

fn default_separation(cfg: &ScenarioConfig) -> f64 {
    match cfg.measurement_operator() {
        MeasurementOperator::TorusFourier { m_meas, .. } => 2.0 / f64::from(m_meas),
        MeasurementOperator::MollifiedFourier { m_meas, length, .. } => 5.0 * length / f64::from(m_meas),
        MeasurementOperator::BargmannMonomials { .. } => 4.0,
    }
}

// On the line the certificate is periodic in x/L, so nodes near opposite
// window edges count as neighbours.
fn separation(cfg: &ScenarioConfig, p: &DomainPoint, q: &DomainPoint) -> Option<f64> {
    let d = atomkernel_core::domain::distance(p, q).ok()?;
    match cfg.measurement_operator() {
        MeasurementOperator::MollifiedFourier { length, .. } => {
            let d = d % length;
            Some(d.min(length - d))
        }
        _ => Some(d),
    }
}

fn random_truth(cfg: &ScenarioConfig, t: &RandomTruth) -> Result<AtomicMeasure, Error> {
    let mut r = stream(cfg.seed, TRUTH_STREAM);
    let sep = t.min_separation.unwrap_or_else(|| default_separation(cfg));
    let mut pts: Vec<DomainPoint> = Vec::with_capacity(t.s);
    'restart: for _ in 0..200 {
        pts.clear();
        while pts.len() < t.s {
            let mut placed = false;
            for _ in 0..20_000 {
                let p = random_point(&mut r, cfg, t.region)?;
                if pts.iter().all(|q| separation(cfg, &p, q).is_some_and(|d| d >= sep && d > 0.0)) {
                    pts.push(p);
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }
        let atoms = pts
            .iter()
            .map(|p| Atom::new(*p, C64::from_polar(r.gen_range(t.weight_min..=t.weight_max), r.gen_range(0.0..TAU))))
            .collect();
        return Ok(AtomicMeasure::new(atoms)?);
    }
    Err(Error::Scenario(format!("could not place {} atoms with separation {sep}", t.s)))
}

/// Ground truth of a scenario.
pub fn truth(cfg: &ScenarioConfig) -> Result<AtomicMeasure, Error> {
    match &cfg.truth {
        TruthDesc::Atoms(a) => measure_from_dto(a, cfg.space),
        TruthDesc::Random(t) => random_truth(cfg, t),
        TruthDesc::Radar(radar) => {
            let refl: Vec<Reflector> = radar
                .reflectors
                .iter()
                .map(|p| Reflector { r: p.r, tau: p.tau, omega: p.omega })
                .collect();
            Ok(radar_to_bargmann(&refl, radar.lambda)?)
        }
    }
}

/// Contamination of a scenario.
pub fn contamination(cfg: &ScenarioConfig) -> Result<ContaminationSpec, Error> {
    match &cfg.contamination {
        None => Ok(ContaminationSpec::default()),
        Some(ContaminationDesc::Atoms(a)) => Ok(ContaminationSpec::new(measure_from_dto(a, cfg.space)?)),
        Some(ContaminationDesc::Random(c)) => {
            if c.tv == 0.0 {
                return Ok(ContaminationSpec::default());
            }
            let mut r = stream(cfg.seed, CONTAMINATION_STREAM);
            let w = c.tv / c.atoms as f64;
            let mut atoms = Vec::with_capacity(c.atoms);
            for _ in 0..c.atoms {
                atoms.push(Atom::new(random_point(&mut r, cfg, None)?, C64::from_polar(w, r.gen_range(0.0..TAU))));
            }
            Ok(ContaminationSpec::new(AtomicMeasure::new(atoms)?))
        }
    }
}

/// Truth, contamination and noisy measurements of a scenario.
pub fn instance(cfg: &ScenarioConfig) -> Result<Instance, Error> {
    let space = cfg.kernel_space();
    let op = cfg.measurement_operator();
    let truth = truth(cfg)?;
    if truth.is_empty() {
        return Err(Error::Scenario("empty ground truth".into()));
    }
    let support = SupportSet::new(truth.locations())?;
    let contamination = contamination(cfg)?;
    let clean = apply(&op, &space, &truth, Some(&contamination))?;
    let data = if cfg.noise_eps > 0.0 {
        add_noise(&clean, cfg.noise_eps, mix(cfg.seed ^ NOISE_SALT))?
    } else {
        clean.clone()
    };
    Ok(Instance {
        space,
        op,
        truth,
        support,
        contamination,
        clean,
        data,
    })
}

/// Solver settings of a scenario.
pub fn solver_config(cfg: &ScenarioConfig, op: &MeasurementOperator) -> SolverConfig {
    let mut sc = SolverConfig::for_operator(op).with_eps(cfg.noise_eps);
    let s = &cfg.solver;
    if let Some(g) = s.grid_size {
        sc.grid_size = g;
    }
    sc.reg_lambda = s.reg_lambda;
    if let Some(v) = s.max_outer_iters {
        sc.max_outer_iters = v;
    }
    if let Some(v) = s.prox_tol {
        sc.prox_tol = v;
    }
    if s.merge_radius.is_some() {
        sc.merge_radius = s.merge_radius;
    }
    if let Some(v) = s.refine_max_iters {
        sc.refine.max_iters = v;
    }
    if let Some(v) = s.grad_tol {
        sc.refine.grad_tol = v;
    }
    sc
}

/// Certificate of a support with the given signs.
pub fn build_certificate(op: &MeasurementOperator, support: &SupportSet, omega: &[C64]) -> Result<Certificate, Error> {
    Ok(match *op {
        MeasurementOperator::TorusFourier { m_meas, .. } => build_torus_certificate(support, omega, m_meas)?,
        MeasurementOperator::MollifiedFourier { m_meas, length, rho } => {
            build_pw_certificate(support, omega, m_meas, rho, length)?
        }
        MeasurementOperator::BargmannMonomials { trunc } => build_bargmann_certificate(support, omega, Some(trunc))?,
    })
}

/// Validation settings: the certificate defaults with config overrides.
pub fn validation_options(cfg: &ScenarioConfig, cert: &Certificate) -> ValidationOptions {
    let mut o = ValidationOptions::for_certificate(cert);
    let c = &cfg.certificate;
    if let Some(v) = c.grid_res {
        o.grid_res = v;
    }
    if let Some(v) = c.near_radius {
        o.near_radius = v;
    }
    if let Some(v) = c.far_level {
        o.far_level = v;
    }
    o
}

/// Default `(λ, δ)` of the stability check.
///
/// Trigonometric settings use the certificate's far level
/// `1 − 0.34·0.16749²` and `δ = 0.16749/m` (times `L` on the line); the plane
/// uses `λ = 0.99`, `δ = 0.3`.
pub fn stability_params(cfg: &ScenarioConfig, op: &MeasurementOperator) -> (f64, f64) {
    let (lam, delta) = match *op {
        MeasurementOperator::TorusFourier { m_meas, .. } => (far_level_default(), NEAR_RADIUS / f64::from(m_meas)),
        MeasurementOperator::MollifiedFourier { m_meas, length, .. } => {
            (far_level_default(), NEAR_RADIUS * length / f64::from(m_meas))
        }
        MeasurementOperator::BargmannMonomials { .. } => (0.99, 0.3),
    };
    (cfg.certificate.lambda.unwrap_or(lam), cfg.certificate.delta.unwrap_or(delta))
}

fn base_row(index: usize, cfg: &ScenarioConfig, pipeline: Pipeline) -> Row {
    Row {
        scenario: index,
        name: cfg.name.clone(),
        pipeline: pipeline.name().into(),
        seed: cfg.seed,
        eps: cfg.noise_eps,
        status: "ok".into(),
        ..Row::default()
    }
}

fn describe(inst: &Instance, row: &mut Row) -> Value {
    row.s = Some(inst.truth.len());
    row.min_separation = min_separation(&inst.support).ok();
    row.contamination_tv = inst.contamination.tv_norm();
    row.tv_true = Some(inst.truth.tv_norm());
    json!({
        "truth": measure_json(&inst.truth),
        "contamination": measure_json(&inst.contamination.measure),
        "measurements": MeasurementVectorDto::from(&inst.data),
    })
}

/// Run one scenario; errors end up in the outcome, not in the return type.
pub fn run_scenario(index: usize, cfg: &ScenarioConfig, pipeline: Pipeline) -> ScenarioOutcome {
    let mut row = base_row(index, cfg, pipeline);
    let mut details = json!({
        "scenario": index,
        "name": cfg.name,
        "pipeline": pipeline.name(),
        "seed": cfg.seed,
    });
    let res = match pipeline {
        Pipeline::Certify => certify(cfg, &mut row),
        Pipeline::Recover => recover(cfg, &mut row),
        Pipeline::Stability => stability(cfg, &mut row),
    };
    let error = match res {
        Ok(v) => {
            if let (Value::Object(d), Value::Object(v)) = (&mut details, v) {
                d.extend(v);
            }
            None
        }
        Err(e) => {
            row.passed = false;
            row.status = format!("error: {e}");
            Some(e.to_string())
        }
    };
    details["passed"] = json!(row.passed);
    details["status"] = json!(row.status);
    ScenarioOutcome { details, row, error }
}

fn certify(cfg: &ScenarioConfig, row: &mut Row) -> Result<Value, Error> {
    let inst = instance(cfg)?;
    let mut out = describe(&inst, row);
    let omega: Vec<C64> = inst.truth.weights().iter().map(|w| w / w.norm()).collect();
    let cert = build_certificate(&inst.op, &inst.support, &omega)?;
    let opts = validation_options(cfg, &cert);
    let rep = validate(&cert, &opts)?;
    row.interp_residual = Some(rep.interp_residual);
    row.condition_number = Some(cert.condition_number);
    row.far_sup = Some(rep.offgrid_sup);
    row.far_margin = Some(rep.far_margin);
    row.near_margin = Some(rep.near_margin);
    row.nu_norm = Some(cert.nu_norm());
    let mut extra = true;
    match (cert.context.clone(), inst.op) {
        (_, MeasurementOperator::MollifiedFourier { length, rho, .. }) => {
            let bound = pw_norm_bound(rho, length);
            extra = cert.nu_norm() <= bound;
            out["nu_norm_bound"] = json!(bound);
        }
        (
            CertificateContext::Bargmann {
                phi_defect,
                sigma_down,
                coeff_bound_ok,
                ..
            },
            _,
        ) => extra = phi_defect <= sigma_down - 1.0 && coeff_bound_ok,
        _ => {}
    }
    row.passed = rep.passed() && extra;
    out["certificate"] = certificate_json(&cert);
    out["validation"] = validation_json(&rep);
    out["options"] = json!({
        "grid_res": opts.grid_res,
        "near_radius": opts.near_radius,
        "near_coeff": opts.near_coeff,
        "far_level": opts.far_level,
    });
    Ok(out)
}

fn record_solve(row: &mut Row, r: &SolverResult, inst: &Instance) -> Value {
    let e = atom_match_error(&r.measure, &inst.truth);
    row.support_err = Some(e.support_err);
    row.weight_err = Some(e.weight_err);
    row.unmatched_mass = Some(e.unmatched_mass);
    row.n_atoms = Some(r.measure.len());
    row.tv_value = Some(r.tv_value);
    row.residual = Some(r.residual_norm);
    row.dual_sup = Some(r.dual_sup);
    row.converged = Some(r.converged);
    json!({ "solver": solver_json(r), "match": match_json(&e) })
}

fn recover(cfg: &ScenarioConfig, row: &mut Row) -> Result<Value, Error> {
    let inst = instance(cfg)?;
    let mut out = describe(&inst, row);
    let sc = solver_config(cfg, &inst.op);
    let r = solve(&inst.op, &inst.space, &inst.data, &sc)?;
    let v = record_solve(row, &r, &inst);
    out["solver"] = v["solver"].clone();
    out["match"] = v["match"].clone();
    let (sup, ok) = dual_optimality_check(&r, &inst.op, &inst.space, sc.grid_size)?;
    out["dual_check"] = json!({ "sup": sup, "ok": ok });
    let exact = cfg.noise_eps == 0.0 && inst.contamination.tv_norm() == 0.0;
    let ex = &cfg.expect;
    row.passed = if exact {
        let tv = inst.truth.tv_norm();
        r.measure.len() == inst.truth.len()
            && row.support_err.is_some_and(|e| e <= ex.support_err)
            && row.weight_err.is_some_and(|e| e <= ex.weight_err)
            && (r.tv_value - tv).abs() <= ex.tv_rel * tv
    } else {
        r.converged && r.residual_norm <= cfg.noise_eps + sc.prox_tol
    };
    Ok(out)
}

fn stability(cfg: &ScenarioConfig, row: &mut Row) -> Result<Value, Error> {
    let inst = instance(cfg)?;
    let mut out = describe(&inst, row);
    let (lam, delta) = stability_params(cfg, &inst.op);
    let c = estimate_c(
        &inst.space,
        &inst.op,
        &inst.support,
        lam,
        delta,
        cfg.certificate.trials,
        mix(cfg.seed ^ SIGNS_SALT),
    )?;
    row.c_upper = Some(c);
    let sc = solver_config(cfg, &inst.op);
    let r = solve(&inst.op, &inst.space, &inst.data, &sc)?;
    let v = record_solve(row, &r, &inst);
    out["solver"] = v["solver"].clone();
    out["match"] = v["match"].clone();
    let bound = concentration_bound(&inst.truth, &inst.contamination, cfg.noise_eps, lam, delta, c)?;
    let rep = check_concentration(&r, &inst.support, &bound);
    row.bound_rhs = Some(rep.bound_rhs);
    row.observed_mass = Some(rep.observed_mass);
    row.bound_margin = Some(rep.observed_mass - rep.bound_rhs);
    row.passed = rep.satisfied;
    out["stability"] = stability_json(&rep);
    out["rhs_upper"] = json!(bound.rhs_upper);
    Ok(out)
}
