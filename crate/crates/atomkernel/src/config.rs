//! Scenario configuration files.

use std::path::Path;

use atomkernel_core::measurements::{truncation_n, MeasurementOperator};
use atomkernel_core::rkhs::KernelSpace;
use serde::{Deserialize, Serialize};

use crate::dto::AtomDto;
use crate::Error;

/// Pipeline a scenario runs through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Build and validate the dual certificate of the true support.
    Certify,
    /// Measure, solve, and compare with the truth.
    Recover,
    /// Estimate `C(λ, δ)` and check the concentration bound.
    Stability,
}

impl Pipeline {
    /// Lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            Self::Certify => "certify",
            Self::Recover => "recover",
            Self::Stability => "stability",
        }
    }
}

/// Kernel space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceDesc {
    /// Trigonometric polynomials of degree `degree`.
    Torus {
        /// Degree `m`.
        degree: u32,
    },
    /// Paley-Wiener space on the line.
    PaleyWiener,
    /// Normalized Bargmann space, searched on the disc of radius `radius`.
    Bargmann {
        /// Search radius.
        radius: f64,
    },
}

/// Measurement family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorDesc {
    /// Fourier coefficients `-m..m`.
    TorusFourier {
        /// Largest frequency.
        m: u32,
        /// Orthonormal scaling.
        #[serde(default = "yes")]
        normalized: bool,
    },
    /// Window-averaged Fourier samples `-m..m`.
    MollifiedFourier {
        /// Largest index.
        m: u32,
        /// Observation length `L`.
        length: f64,
        /// Window parameter `ρ`.
        rho: f64,
    },
    /// Weighted monomials up to `trunc + 1`.
    BargmannMonomials {
        /// Truncation index; the tail rule at radius + 1 when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trunc: Option<usize>,
    },
}

fn yes() -> bool {
    true
}

/// Random support and weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomTruth {
    /// Number of atoms.
    pub s: usize,
    /// Minimum pairwise distance; `2/m` (torus), `5L/m` (line) or `4` (plane) when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<f64>,
    /// Smallest weight modulus.
    #[serde(default = "half")]
    pub weight_min: f64,
    /// Largest weight modulus.
    #[serde(default = "two")]
    pub weight_max: f64,
    /// Sampling region: half width on the line, disc radius on the plane.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<f64>,
}

fn half() -> f64 {
    0.5
}

fn two() -> f64 {
    2.0
}

/// One radar reflector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectorDto {
    /// Reflection coefficient.
    pub r: f64,
    /// Delay.
    pub tau: f64,
    /// Doppler shift.
    pub omega: f64,
}

/// Radar return mapped to the Bargmann space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarTruth {
    /// Window scale `Λ`.
    pub lambda: f64,
    /// Reflectors.
    pub reflectors: Vec<ReflectorDto>,
}

/// Ground-truth measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TruthDesc {
    /// Explicit atoms.
    Atoms(Vec<AtomDto>),
    /// Random atoms with a separation constraint.
    Random(RandomTruth),
    /// Radar reflectors.
    Radar(RadarTruth),
}

/// Random contamination of given total variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomContamination {
    /// `‖μ_c‖_TV`.
    pub tv: f64,
    /// Number of atoms sharing the mass.
    #[serde(default = "one")]
    pub atoms: usize,
}

fn one() -> usize {
    1
}

/// Contamination measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ContaminationDesc {
    /// Explicit atoms.
    Atoms(Vec<AtomDto>),
    /// Random atoms anywhere in the domain.
    Random(RandomContamination),
}

/// Solver overrides.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDesc {
    /// Grid size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
    /// Fixed regularization instead of the residual-targeted search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reg_lambda: Option<f64>,
    /// Outer iteration cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_outer_iters: Option<usize>,
    /// Duality-gap tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prox_tol: Option<f64>,
    /// Merge radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub merge_radius: Option<f64>,
    /// Refinement iteration cap.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_max_iters: Option<usize>,
    /// Refinement gradient tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
}

/// Certificate, validation and stability parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDesc {
    /// Far level `λ` of the stability check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Neighborhood radius `δ` of the stability check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Validation grid spacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_res: Option<f64>,
    /// Validation near radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub near_radius: Option<f64>,
    /// Validation far level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub far_level: Option<f64>,
    /// Sign-pattern trials for `C(λ, δ)`.
    #[serde(default = "sixteen")]
    pub trials: usize,
}

fn sixteen() -> usize {
    16
}

impl Default for CertificateDesc {
    fn default() -> Self {
        Self {
            lambda: None,
            delta: None,
            grid_res: None,
            near_radius: None,
            far_level: None,
            trials: 16,
        }
    }
}

/// Thresholds used by `--assert`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectDesc {
    /// Largest support error of a noiseless recovery.
    #[serde(default = "support_tol")]
    pub support_err: f64,
    /// Largest relative weight error of a noiseless recovery.
    #[serde(default = "weight_tol")]
    pub weight_err: f64,
    /// Relative gap between the recovered and true TV norms.
    #[serde(default = "tv_tol")]
    pub tv_rel: f64,
}

fn support_tol() -> f64 {
    1e-5
}

fn weight_tol() -> f64 {
    1e-4
}

fn tv_tol() -> f64 {
    1e-6
}

impl Default for ExpectDesc {
    fn default() -> Self {
        Self {
            support_err: support_tol(),
            weight_err: weight_tol(),
            tv_rel: tv_tol(),
        }
    }
}

/// Seeds of a sweep: a list or an inclusive range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedAxis {
    /// Explicit seeds.
    List(Vec<u64>),
    /// `from..=to`.
    Range {
        /// First seed.
        from: u64,
        /// Last seed.
        to: u64,
    },
}

impl SeedAxis {
    /// Seeds in order.
    pub fn values(&self) -> Vec<u64> {
        match self {
            Self::List(v) => v.clone(),
            Self::Range { from, to } => (*from..=*to).collect(),
        }
    }
}

/// Ranged parameters; every present axis must be non-empty.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDesc {
    /// Seeds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedAxis>,
    /// Operator `m` (and torus degree).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<u32>>,
    /// Window parameter `ρ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<f64>>,
    /// Number of random atoms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<usize>>,
    /// Minimum separation of random atoms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<Vec<f64>>,
    /// Noise level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_eps: Option<Vec<f64>>,
    /// Total variation of random contamination.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contamination_tv: Option<Vec<f64>>,
}

/// One scenario, or a family of them when `sweep` is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Label carried into the outputs.
    #[serde(default = "default_name")]
    pub name: String,
    /// Pipeline for the `sweep` subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<Pipeline>,
    /// Seed of every random choice in the scenario.
    #[serde(default)]
    pub seed: u64,
    /// Kernel space.
    pub space: SpaceDesc,
    /// Measurement family.
    pub operator: OperatorDesc,
    /// Ground truth.
    pub truth: TruthDesc,
    /// Contamination.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contamination: Option<ContaminationDesc>,
    /// Noise level `ε`.
    #[serde(default)]
    pub noise_eps: f64,
    /// Solver overrides.
    #[serde(default)]
    pub solver: SolverDesc,
    /// Certificate and stability parameters.
    #[serde(default)]
    pub certificate: CertificateDesc,
    /// Assertion thresholds.
    #[serde(default)]
    pub expect: ExpectDesc,
    /// Output directory; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    /// Ranged parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepDesc>,
}

fn default_name() -> String {
    "scenario".into()
}

impl ScenarioConfig {
    /// Parse a config from JSON text, reporting `line:column` on schema errors.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config {
            line: Some(e.line()),
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|(path, message)| {
            let line = locate(text, &path);
            let at = line.map(|l| format!(" at line {l}")).unwrap_or_default();
            Error::Config {
                line,
                message: format!("{path}: {message}{at}"),
            }
        })?;
        Ok(cfg)
    }

    /// Read and parse a config file.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config { line, message } => Error::Config {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })
    }

    /// Core kernel space.
    pub fn kernel_space(&self) -> KernelSpace {
        match self.space {
            SpaceDesc::Torus { degree } => KernelSpace::TrigTorus { degree },
            SpaceDesc::PaleyWiener => KernelSpace::PaleyWiener,
            SpaceDesc::Bargmann { radius } => KernelSpace::Bargmann { radius },
        }
    }

    /// Core measurement operator.
    pub fn measurement_operator(&self) -> MeasurementOperator {
        match (self.operator, self.space) {
            (OperatorDesc::TorusFourier { m, normalized }, SpaceDesc::Torus { degree }) => {
                MeasurementOperator::torus(m, degree, normalized)
            }
            (OperatorDesc::TorusFourier { m, normalized }, _) => MeasurementOperator::torus(m, m, normalized),
            (OperatorDesc::MollifiedFourier { m, length, rho }, _) => {
                MeasurementOperator::MollifiedFourier { m_meas: m, length, rho }
            }
            (OperatorDesc::BargmannMonomials { trunc }, space) => {
                let radius = match space {
                    SpaceDesc::Bargmann { radius } => radius,
                    _ => 1.0,
                };
                MeasurementOperator::BargmannMonomials {
                    trunc: trunc.unwrap_or_else(|| truncation_n(radius + 1.0)),
                }
            }
        }
    }

    /// Schema checks beyond the JSON shape, as `(field path, message)`.
    pub fn validate(&self) -> Result<(), (String, String)> {
        let bad = |p: &str, m: &str| Err((p.to_string(), m.to_string()));
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;
        match self.space {
            SpaceDesc::Torus { degree } if degree == 0 => return bad("space.degree", "must be positive"),
            SpaceDesc::Bargmann { radius } if !finite_pos(radius) => return bad("space.radius", "must be positive"),
            _ => {}
        }
        match (self.operator, self.space) {
            (OperatorDesc::TorusFourier { m, .. }, SpaceDesc::Torus { degree }) => {
                if m == 0 {
                    return bad("operator.m", "must be positive");
                }
                if m > degree {
                    return bad("operator.m", "exceeds the space degree");
                }
            }
            (OperatorDesc::MollifiedFourier { m, length, rho }, SpaceDesc::PaleyWiener) => {
                if m == 0 {
                    return bad("operator.m", "must be positive");
                }
                if !finite_pos(length) {
                    return bad("operator.length", "must be positive");
                }
                if !(finite_pos(rho) && rho <= 0.5) {
                    return bad("operator.rho", "must lie in (0, 1/2]");
                }
            }
            (OperatorDesc::BargmannMonomials { trunc }, SpaceDesc::Bargmann { .. }) => {
                if trunc == Some(0) {
                    return bad("operator.trunc", "must be positive");
                }
            }
            _ => return bad("operator.kind", "does not measure the configured space"),
        }
        if !(self.noise_eps.is_finite() && self.noise_eps >= 0.0) {
            return bad("noise_eps", "must be a nonnegative number");
        }
        match &self.truth {
            TruthDesc::Atoms(atoms) => {
                for a in atoms {
                    if let Err(m) = a.check(self.space) {
                        return bad("truth.atoms", &m);
                    }
                }
            }
            TruthDesc::Random(r) => {
                if r.s == 0 {
                    return bad("truth.random.s", "must be positive");
                }
                if !(finite_pos(r.weight_min) && r.weight_max >= r.weight_min && r.weight_max.is_finite()) {
                    return bad("truth.random.weight_min", "need 0 < weight_min <= weight_max");
                }
                if r.min_separation.is_some_and(|d| !(d.is_finite() && d >= 0.0)) {
                    return bad("truth.random.min_separation", "must be nonnegative");
                }
                if r.region.is_some_and(|d| !finite_pos(d)) {
                    return bad("truth.random.region", "must be positive");
                }
            }
            TruthDesc::Radar(r) => {
                if !matches!(self.space, SpaceDesc::Bargmann { .. }) {
                    return bad("truth.radar", "radar returns live in the Bargmann space");
                }
                if !finite_pos(r.lambda) {
                    return bad("truth.radar.lambda", "must be positive");
                }
            }
        }
        match &self.contamination {
            Some(ContaminationDesc::Atoms(atoms)) => {
                for a in atoms {
                    if let Err(m) = a.check(self.space) {
                        return bad("contamination.atoms", &m);
                    }
                }
            }
            Some(ContaminationDesc::Random(c)) => {
                if !(c.tv.is_finite() && c.tv >= 0.0) {
                    return bad("contamination.random.tv", "must be nonnegative");
                }
                if c.atoms == 0 {
                    return bad("contamination.random.atoms", "must be positive");
                }
            }
            None => {}
        }
        let c = &self.certificate;
        if c.trials == 0 {
            return bad("certificate.trials", "must be positive");
        }
        if c.lambda.is_some_and(|l| !(l > 0.0 && l < 1.0)) {
            return bad("certificate.lambda", "must lie in (0, 1)");
        }
        for (p, v) in [
            ("certificate.delta", c.delta),
            ("certificate.grid_res", c.grid_res),
            ("certificate.near_radius", c.near_radius),
            ("certificate.far_level", c.far_level),
        ] {
            if v.is_some_and(|x| !finite_pos(x)) {
                return bad(p, "must be positive");
            }
        }
        if let Some(sw) = &self.sweep {
            sweep_checks(self, sw)?;
        }
        Ok(())
    }
}

fn sweep_checks(cfg: &ScenarioConfig, sw: &SweepDesc) -> Result<(), (String, String)> {
    let bad = |p: &str, m: &str| Err((p.to_string(), m.to_string()));
    let lens = [
        ("sweep.seed", sw.seed.as_ref().map(|s| s.values().len())),
        ("sweep.m", sw.m.as_ref().map(Vec::len)),
        ("sweep.rho", sw.rho.as_ref().map(Vec::len)),
        ("sweep.s", sw.s.as_ref().map(Vec::len)),
        ("sweep.min_separation", sw.min_separation.as_ref().map(Vec::len)),
        ("sweep.noise_eps", sw.noise_eps.as_ref().map(Vec::len)),
        ("sweep.contamination_tv", sw.contamination_tv.as_ref().map(Vec::len)),
    ];
    for (p, n) in lens {
        if n == Some(0) {
            return bad(p, "empty range");
        }
    }
    let random = matches!(cfg.truth, TruthDesc::Random(_));
    if (sw.s.is_some() || sw.min_separation.is_some()) && !random {
        return bad("sweep.s", "only random truths can sweep s or min_separation");
    }
    if sw.rho.is_some() && !matches!(cfg.operator, OperatorDesc::MollifiedFourier { .. }) {
        return bad("sweep.rho", "only the mollified operator has rho");
    }
    if sw.m.is_some() && matches!(cfg.operator, OperatorDesc::BargmannMonomials { .. }) {
        return bad("sweep.m", "the monomial operator has no m");
    }
    if matches!(cfg.contamination, Some(ContaminationDesc::Atoms(_))) && sw.contamination_tv.is_some() {
        return bad("sweep.contamination_tv", "needs random contamination");
    }
    let nonneg = |v: &Option<Vec<f64>>| v.as_ref().is_some_and(|v| v.iter().any(|x| !(x.is_finite() && *x >= 0.0)));
    if nonneg(&sw.noise_eps) || nonneg(&sw.contamination_tv) || nonneg(&sw.min_separation) {
        return bad("sweep", "ranged values must be nonnegative numbers");
    }
    if sw.rho.as_ref().is_some_and(|v| v.iter().any(|r| !(*r > 0.0 && *r <= 0.5))) {
        return bad("sweep.rho", "values must lie in (0, 1/2]");
    }
    if sw.m.as_ref().is_some_and(|v| v.contains(&0)) || sw.s.as_ref().is_some_and(|v| v.contains(&0)) {
        return bad("sweep", "m and s must be positive");
    }
    Ok(())
}

// Line of the last key of a dotted path, if it appears in the text.
fn locate(text: &str, path: &str) -> Option<usize> {
    let key = path.rsplit('.').next()?;
    let needle = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}
