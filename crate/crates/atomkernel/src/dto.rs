//! JSON forms of the core types.

use atomkernel_core::certificate::{Certificate, CertificateContext, ValidationReport};
use atomkernel_core::domain::DomainPoint;
use atomkernel_core::measure::{Atom, AtomicMeasure, MatchError};
use atomkernel_core::measurements::{MeasurementOperator, MeasurementVector};
use atomkernel_core::solver::SolverResult;
use atomkernel_core::stability::StabilityReport;
use atomkernel_core::C64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::SpaceDesc;
use crate::Error;

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    /// Real value.
    Real(f64),
    /// Complex value.
    Complex([f64; 2]),
}

impl Num {
    /// As a complex number.
    pub fn c64(self) -> C64 {
        match self {
            Self::Real(x) => C64::new(x, 0.0),
            Self::Complex([re, im]) => C64::new(re, im),
        }
    }
}

/// `{x, c}`: location (number, or `[re, im]` on the plane) and complex weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDto {
    /// Location.
    pub x: Num,
    /// Weight.
    pub c: Num,
}

impl AtomDto {
    /// JSON form of an atom.
    pub fn from_atom(a: &Atom) -> Self {
        let x = match a.location {
            DomainPoint::Plane(z) => Num::Complex([z.re, z.im]),
            p => Num::Real(p.real().unwrap_or(f64::NAN)),
        };
        Self {
            x,
            c: Num::Complex([a.weight.re, a.weight.im]),
        }
    }

    /// Location in the domain of `space`.
    pub fn point(&self, space: SpaceDesc) -> Result<DomainPoint, String> {
        let p = match (space, self.x) {
            (SpaceDesc::Torus { .. }, Num::Real(x)) => DomainPoint::torus(x),
            (SpaceDesc::PaleyWiener, Num::Real(x)) => DomainPoint::line(x),
            (SpaceDesc::Bargmann { .. }, x) => DomainPoint::plane(x.c64()),
            (_, Num::Complex(_)) => return Err("complex location outside the plane".into()),
        };
        p.map_err(|e| e.to_string())
    }

    /// Core atom in the domain of `space`.
    pub fn atom(&self, space: SpaceDesc) -> Result<Atom, String> {
        let w = self.c.c64();
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err("non-finite weight".into());
        }
        Ok(Atom::new(self.point(space)?, w))
    }

    /// Shape check against a space.
    pub fn check(&self, space: SpaceDesc) -> Result<(), String> {
        self.atom(space).map(|_| ())
    }
}

/// Measure from JSON atoms.
pub fn measure_from_dto(atoms: &[AtomDto], space: SpaceDesc) -> Result<AtomicMeasure, Error> {
    let atoms = atoms
        .iter()
        .map(|a| a.atom(space).map_err(Error::Scenario))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AtomicMeasure::new(atoms)?)
}

/// Measure as a JSON array of atoms.
pub fn measure_json(mu: &AtomicMeasure) -> Value {
    Value::Array(
        mu.atoms()
            .iter()
            .map(|a| serde_json::to_value(AtomDto::from_atom(a)).unwrap_or(Value::Null))
            .collect(),
    )
}

/// Measurement family descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpDto {
    /// Torus Fourier family.
    TorusFourier {
        /// Largest frequency.
        m_meas: u32,
        /// Space degree.
        degree: u32,
        /// Orthonormal scaling.
        normalized: bool,
    },
    /// Mollified Fourier family.
    MollifiedFourier {
        /// Largest index.
        m_meas: u32,
        /// Observation length.
        length: f64,
        /// Window parameter.
        rho: f64,
    },
    /// Weighted monomials.
    BargmannMonomials {
        /// Truncation index.
        trunc: usize,
    },
}

impl From<MeasurementOperator> for OpDto {
    fn from(op: MeasurementOperator) -> Self {
        match op {
            MeasurementOperator::TorusFourier {
                m_meas,
                degree,
                normalized,
            } => Self::TorusFourier {
                m_meas,
                degree,
                normalized,
            },
            MeasurementOperator::MollifiedFourier { m_meas, length, rho } => Self::MollifiedFourier { m_meas, length, rho },
            MeasurementOperator::BargmannMonomials { trunc } => Self::BargmannMonomials { trunc },
        }
    }
}

impl From<OpDto> for MeasurementOperator {
    fn from(op: OpDto) -> Self {
        match op {
            OpDto::TorusFourier {
                m_meas,
                degree,
                normalized,
            } => Self::TorusFourier {
                m_meas,
                degree,
                normalized,
            },
            OpDto::MollifiedFourier { m_meas, length, rho } => Self::MollifiedFourier { m_meas, length, rho },
            OpDto::BargmannMonomials { trunc } => Self::BargmannMonomials { trunc },
        }
    }
}

/// `{op, values}` with values as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementVectorDto {
    /// Family.
    pub op: OpDto,
    /// Measurements.
    pub values: Vec<[f64; 2]>,
}

impl From<&MeasurementVector> for MeasurementVectorDto {
    fn from(mv: &MeasurementVector) -> Self {
        Self {
            op: mv.op.into(),
            values: mv.values.iter().map(|v| [v.re, v.im]).collect(),
        }
    }
}

impl MeasurementVectorDto {
    /// Back to the core type, checking the length.
    pub fn to_core(&self) -> Result<MeasurementVector, Error> {
        let values = self.values.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        Ok(MeasurementVector::new(self.op.into(), values)?)
    }
}

/// Solver result summary (the dual variable is left out).
pub fn solver_json(r: &SolverResult) -> Value {
    json!({
        "measure": measure_json(&r.measure),
        "tv_value": r.tv_value,
        "residual_norm": r.residual_norm,
        "dual_sup": r.dual_sup,
        "iterations": r.iterations,
        "converged": r.converged,
        "lambda": r.lambda,
    })
}

/// Recovery error.
pub fn match_json(e: &MatchError) -> Value {
    json!({
        "support_err": e.support_err,
        "weight_err": e.weight_err,
        "unmatched_mass": e.unmatched_mass,
    })
}

/// Certificate summary.
pub fn certificate_json(c: &Certificate) -> Value {
    let context = match c.context {
        CertificateContext::Torus { m, fejer_n } => json!({ "kind": "torus", "m": m, "fejer_n": fejer_n }),
        CertificateContext::PaleyWiener { m, length, rho } => {
            json!({ "kind": "paley_wiener", "m": m, "length": length, "rho": rho })
        }
        CertificateContext::Bargmann {
            trunc,
            phi_defect,
            sigma_down,
            sigma_up,
            coeff_bound_ok,
            truncation_defect,
        } => json!({
            "kind": "bargmann",
            "trunc": trunc,
            "phi_defect": phi_defect,
            "sigma_down": sigma_down,
            "sigma_up": sigma_up,
            "coeff_bound_ok": coeff_bound_ok,
            "truncation_defect": truncation_defect,
        }),
    };
    let pairs = |v: &[C64]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
    json!({
        "context": context,
        "omega": pairs(&c.omega),
        "alpha": pairs(&c.alpha),
        "beta": pairs(&c.beta),
        "nu_norm": c.nu_norm(),
        "condition_number": c.condition_number,
        "separation_ok": c.separation_ok,
    })
}

/// Validation report.
pub fn validation_json(r: &ValidationReport) -> Value {
    json!({
        "passed": r.passed(),
        "interp_residual": r.interp_residual,
        "deriv_residual": r.deriv_residual,
        "offgrid_sup": r.offgrid_sup,
        "grid_sup": r.grid_sup,
        "near_bound_ok": r.near_bound_ok,
        "far_bound_ok": r.far_bound_ok,
        "hessian_ok": r.hessian_ok,
        "hessian_max_eig": r.hessian_max_eig,
        "near_margin": r.near_margin,
        "far_margin": r.far_margin,
        "near_points": r.near_points,
        "far_points": r.far_points,
    })
}

/// Stability report.
pub fn stability_json(r: &StabilityReport) -> Value {
    json!({
        "lambda": r.lambda,
        "delta": r.delta,
        "c_upper": r.c_upper,
        "bound_rhs": r.bound_rhs,
        "observed_mass": r.observed_mass,
        "satisfied": r.satisfied,
        "eps": r.eps,
        "tv_mu_c": r.tv_mu_c,
        "f_a_upper": r.f_a_upper,
        "f_a_lower": r.f_a_lower,
    })
}
