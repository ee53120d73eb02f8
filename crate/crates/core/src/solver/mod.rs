//! Total-variation minimization over atomic measures.
//!
//! The constrained program `min ‖μ‖_TV s.t. ‖M(K*μ) − b‖ ≤ ε` is reached
//! through the penalized Beurling-LASSO `½‖M(K*μ) − b‖² + λ‖μ‖_TV`: a grid
//! LASSO seeds the support, a continuous stage moves and adds atoms until the
//! dual `|A(x)^H r|/λ` is at most one everywhere, and an outer search tunes
//! `λ` until the residual lands in `[0.9ε, ε]`.

mod grid;
mod refine;

use alloc::vec::Vec;

pub use grid::{beurling_lasso, extract_atoms, soft, GridLasso, SearchDomain};

use crate::linalg::norm2;
use crate::measure::AtomicMeasure;
use crate::measurements::{adjoint_function, MeasurementOperator, MeasurementVector};
use crate::rkhs::KernelSpace;
use crate::{Error, Result, C64};
use refine::{Problem, State};

/// Residual used for `ε = 0`, relative to `‖b‖`.
pub const NOISELESS_REL_EPS: f64 = 1e-9;
/// FISTA iterations spent on the grid seed; the continuous stage corrects it.
pub const SEED_ITERS: usize = 500;
/// Slack on `max|ψ| ≤ 1` accepted as dual feasibility.
pub const DUAL_TOL: f64 = 1e-6;
/// Relative objective decrease below which an inner round counts as stalled.
const STALL_REL: f64 = 1e-7;
/// Stalled rounds in a row after which the inner loop gives up.
const STALL_ROUNDS: usize = 5;

/// Continuous-stage limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineConfig {
    /// Damped Gauss-Newton iterations per continuous round.
    pub max_iters: usize,
    /// Stop once steps fall below this (relative weights, grid cells for positions).
    pub grad_tol: f64,
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Grid points (per axis on the disc).
    pub grid_size: usize,
    /// Fixed regularization; `None` searches `λ` to meet `eps`.
    pub reg_lambda: Option<f64>,
    /// Residual budget `ε`.
    pub eps: f64,
    /// Continuous rounds (atom insertions) per `λ`, and outer `λ` steps.
    pub max_outer_iters: usize,
    /// Duality-gap tolerance of the grid stage and residual slack of the contract.
    pub prox_tol: f64,
    /// Continuous refinement limits.
    pub refine: RefineConfig,
    /// Atoms closer than this merge; `None` means 1.5 grid cells.
    pub merge_radius: Option<f64>,
    /// Record one trace row per continuous round.
    pub trace: bool,
}

impl SolverConfig {
    /// Defaults for a measurement family: `8(2m+1)` grid points for the
    /// Fourier families, a 64 × 64 lattice on the disc.
    pub fn for_operator(op: &MeasurementOperator) -> Self {
        let grid_size = match *op {
            MeasurementOperator::TorusFourier { m_meas, .. } | MeasurementOperator::MollifiedFourier { m_meas, .. } => {
                8 * (2 * m_meas as usize + 1)
            }
            MeasurementOperator::BargmannMonomials { .. } => 64,
        };
        Self {
            grid_size,
            reg_lambda: None,
            eps: 0.0,
            max_outer_iters: 60,
            prox_tol: 1e-9,
            refine: RefineConfig {
                max_iters: 60,
                grad_tol: 1e-13,
            },
            merge_radius: None,
            trace: false,
        }
    }

    /// Same settings with residual budget `eps`.
    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }
}

/// One convergence-trace row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// Running continuous-round counter.
    pub iter: usize,
    /// `½‖r‖² + λ‖μ‖_TV`.
    pub objective: f64,
    /// `‖r‖`.
    pub residual: f64,
    /// `max|ψ|` for the current dual.
    pub dual_sup: f64,
}

/// Recovered measure and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    /// Recovered measure.
    pub measure: AtomicMeasure,
    /// `‖measure‖_TV`.
    pub tv_value: f64,
    /// `‖M(K*measure) − b‖`.
    pub residual_norm: f64,
    /// `max|M*ν|` for the returned dual variable.
    pub dual_sup: f64,
    /// Continuous rounds run in total.
    pub iterations: usize,
    /// Residual within budget and dual feasible.
    pub converged: bool,
    /// Regularization of the returned solution.
    pub lambda: f64,
    /// Dual variable `ν = r/λ`.
    pub dual: Vec<C64>,
    /// Optional convergence trace.
    pub trace: Vec<TraceRow>,
}

struct Outcome {
    state: State,
    residual: f64,
    peak: f64,
    dual_ok: bool,
    rounds: usize,
}

struct Ctx<'a> {
    prob: Problem<'a>,
    cfg: &'a SolverConfig,
    merge: f64,
    trace: Vec<TraceRow>,
    rounds: usize,
}

impl Ctx<'_> {
    fn at_lambda(&mut self, mut st: State, lambda: f64) -> Result<Outcome> {
        let cap = 2 * self.prob.op.len() + 8;
        let mut peak = 0.0;
        let mut dual_ok = false;
        let mut rounds = 0;
        let mut best: (f64, Option<(State, f64)>) = (f64::INFINITY, None);
        let mut stalled = 0;
        for _ in 0..self.cfg.max_outer_iters.max(1) {
            rounds += 1;
            self.rounds += 1;
            self.prob.weights_cd(&mut st, lambda, 2000)?;
            self.prob
                .joint_lm(&mut st, lambda, self.cfg.refine.max_iters, self.cfg.refine.grad_tol)?;
            let merged = State::from_measure(&st.measure().normalize(self.merge));
            if merged.pos.len() < st.pos.len() {
                st = merged;
                self.prob.weights_cd(&mut st, lambda, 2000)?;
                self.prob
                    .joint_lm(&mut st, lambda, self.cfg.refine.max_iters, self.cfg.refine.grad_tol)?;
            }
            let r = self.prob.residual(&st)?;
            let found = self.prob.peaks(&r)?;
            peak = found.first().map_or(0.0, |p| p.value) / lambda;
            if self.cfg.trace {
                let tv: f64 = st.w.iter().map(|w| w.norm()).sum();
                let rn = norm2(&r);
                self.trace.push(TraceRow {
                    iter: self.rounds,
                    objective: 0.5 * rn * rn + lambda * tv,
                    residual: rn,
                    dual_sup: peak,
                });
            }
            if peak <= 1.0 + DUAL_TOL {
                dual_ok = true;
                break;
            }
            if st.pos.len() >= cap {
                break;
            }
            let rn = norm2(&r);
            let obj = 0.5 * rn * rn + lambda * st.w.iter().map(|w| w.norm()).sum::<f64>();
            if obj < best.0 * (1.0 - STALL_REL) {
                stalled = 0;
            } else {
                stalled += 1;
            }
            if obj < best.0 {
                best = (obj, Some((st.clone(), peak)));
            }
            if stalled >= STALL_ROUNDS {
                // insertions keep being merged away without lowering the objective
                if let Some((b, p)) = best.1.take() {
                    st = b;
                    peak = p;
                }
                break;
            }
            for p in found.iter().filter(|p| p.value > lambda * (1.0 + DUAL_TOL)) {
                st.pos.push(p.at);
                st.w.push(C64::new(0.0, 0.0));
            }
        }
        let residual = norm2(&self.prob.residual(&st)?);
        Ok(Outcome {
            state: st,
            residual,
            peak,
            dual_ok,
            rounds,
        })
    }
}

fn seed_state(prob: &Problem<'_>, lambda: f64, cfg: &SolverConfig, merge: f64) -> Result<State> {
    let g = beurling_lasso(prob.grid_mat, prob.b, lambda, SEED_ITERS, cfg.prox_tol)?;
    Ok(State::from_measure(&extract_atoms(prob.grid, &g.coeffs, 1e-4, merge)))
}

/// Solve `min ‖μ‖_TV` subject to `‖M(K*μ) − b‖ ≤ ε` (or the penalized
/// problem at a fixed `λ` when `reg_lambda` is set).
pub fn solve(
    op: &MeasurementOperator,
    space: &KernelSpace,
    b: &MeasurementVector,
    cfg: &SolverConfig,
) -> Result<SolverResult> {
    op.check(space)?;
    if b.op != *op {
        return Err(Error::WrongOperator("measurements come from a different family"));
    }
    if !(cfg.eps >= 0.0) || !cfg.eps.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("eps {} must be nonnegative", cfg.eps)));
    }
    let min_grid = match *op {
        MeasurementOperator::BargmannMonomials { .. } => 8,
        _ => 8 * op.len(),
    };
    if cfg.grid_size < min_grid {
        return Err(Error::InvalidParameter(alloc::format!(
            "grid of {} points, need at least {min_grid}",
            cfg.grid_size
        )));
    }
    let bv = &b.values;
    let bnorm = norm2(bv);
    let zero_dual = || alloc::vec![C64::new(0.0, 0.0); op.len()];
    if cfg.reg_lambda.is_none() && bnorm <= cfg.eps || bnorm == 0.0 {
        return Ok(SolverResult {
            measure: AtomicMeasure::empty(),
            tv_value: 0.0,
            residual_norm: bnorm,
            dual_sup: 0.0,
            iterations: 0,
            converged: true,
            lambda: 0.0,
            dual: zero_dual(),
            trace: Vec::new(),
        });
    }
    let domain = SearchDomain::for_setting(op, space)?;
    let grid = domain.grid(cfg.grid_size);
    let grid_mat = op.matrix(&grid)?;
    let cell = domain.cell(cfg.grid_size);
    let merge = cfg.merge_radius.unwrap_or(1.5 * cell);
    let prob = Problem {
        op,
        domain,
        b: bv,
        grid: &grid,
        grid_mat: &grid_mat,
        cell,
    };
    let lambda_max = prob.peak(bv)?.value;
    let mut ctx = Ctx {
        prob,
        cfg,
        merge,
        trace: Vec::new(),
        rounds: 0,
    };

    if let Some(lambda) = cfg.reg_lambda {
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("regularization {lambda} must be positive")));
        }
        let st = seed_state(&ctx.prob, lambda, cfg, merge)?;
        let out = ctx.at_lambda(st, lambda)?;
        return finish(&ctx, out, lambda, true);
    }

    let eps = cfg.eps.max(NOISELESS_REL_EPS * bnorm);
    let lo_target = 0.9 * eps;
    let aim = 0.95 * eps;
    let mut lambda = 0.02 * lambda_max;
    let mut warm = seed_state(&ctx.prob, lambda, cfg, merge)?;
    let mut lo: Option<(f64, Outcome)> = None;
    let mut hi: Option<(f64, f64)> = Some((lambda_max, bnorm));
    for _ in 0..cfg.max_outer_iters.max(1) {
        let out = ctx.at_lambda(warm.clone(), lambda)?;
        let res = out.residual;
        if res <= eps {
            if res >= lo_target {
                return finish(&ctx, out, lambda, res <= eps);
            }
            warm = out.state.clone();
            lo = Some((lambda, out));
        } else {
            warm = out.state.clone();
            hi = Some((lambda, res));
            if let Some((l, o)) = &lo {
                warm = o.state.clone();
                let _ = l;
            }
        }
        let next = match (&lo, hi) {
            (Some((l_lo, o_lo)), Some((l_hi, r_hi))) => {
                // residual grows roughly linearly in λ between the brackets
                let (r_lo, r_h) = (o_lo.residual, r_hi);
                let t = if r_h > r_lo { (aim - r_lo) / (r_h - r_lo) } else { 0.5 };
                let guess = l_lo + t.clamp(0.05, 0.95) * (l_hi - l_lo);
                if guess.is_finite() { guess } else { 0.5 * (l_lo + l_hi) }
            }
            (None, Some((l_hi, r_hi))) => l_hi * (aim / r_hi).clamp(1e-3, 0.9),
            (Some((l_lo, o_lo)), None) => l_lo * (aim / o_lo.residual.max(f64::MIN_POSITIVE)).min(10.0),
            (None, None) => lambda * 0.1,
        };
        if next < 1e-14 * lambda_max {
            return Err(Error::Infeasible { residual: res, eps });
        }
        lambda = next;
    }
    match lo {
        Some((l, o)) => finish(&ctx, o, l, true),
        None => Err(Error::Infeasible {
            residual: hi.map_or(bnorm, |h| h.1),
            eps,
        }),
    }
}

/// Atoms lighter than this fraction of the heaviest are dropped from results.
pub const NEGLIGIBLE_REL_WEIGHT: f64 = 1e-12;

fn finish(ctx: &Ctx<'_>, mut out: Outcome, lambda: f64, feasible: bool) -> Result<SolverResult> {
    let top = out.state.w.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let keep: Vec<bool> = out.state.w.iter().map(|w| w.norm() > NEGLIGIBLE_REL_WEIGHT * top).collect();
    let mut k = keep.iter();
    out.state.pos.retain(|_| *k.next().unwrap_or(&false));
    let mut k = keep.iter();
    out.state.w.retain(|_| *k.next().unwrap_or(&false));
    let r = ctx.prob.residual(&out.state)?;
    let residual_norm = norm2(&r);
    let measure = out.state.measure();
    Ok(SolverResult {
        tv_value: measure.tv_norm(),
        measure,
        residual_norm,
        dual_sup: out.peak,
        iterations: ctx.rounds.max(out.rounds),
        converged: feasible && out.dual_ok,
        lambda,
        dual: r.iter().map(|v| v / lambda).collect(),
        trace: ctx.trace.clone(),
    })
}

/// Sup of `|M*ν|` on the result's dual and sign agreement at recovered atoms.
///
/// `ok` iff the sup is at most `1 + 1e-6` and `|ψ(x_i) − c_i/|c_i|| ≤ 1e-3`.
pub fn dual_optimality_check(
    result: &SolverResult,
    op: &MeasurementOperator,
    space: &KernelSpace,
    grid_size: usize,
) -> Result<(f64, bool)> {
    let psi = adjoint_function(op, &result.dual)?;
    let domain = SearchDomain::for_setting(op, space)?;
    let grid = domain.grid(grid_size);
    let grid_mat = op.matrix(&grid)?;
    // |ψ(x)| = |a(x)^H ν|, which is the peak search with r = ν
    let prob = Problem {
        op,
        domain,
        b: &result.dual,
        grid: &grid,
        grid_mat: &grid_mat,
        cell: domain.cell(grid_size),
    };
    let sup = prob.peak(&result.dual)?.value;
    let mut ok = sup <= 1.0 + DUAL_TOL;
    for a in result.measure.atoms() {
        let v = psi.eval(&a.location)?;
        if (v - a.weight / a.weight.norm()).norm() > 1e-3 {
            ok = false;
        }
    }
    Ok((sup, ok))
}

/// Optimal value of the constrained program, as found by [`solve`].
pub fn tv_min_value(op: &MeasurementOperator, space: &KernelSpace, b: &MeasurementVector, eps: f64) -> Result<f64> {
    let cfg = SolverConfig::for_operator(op).with_eps(eps);
    Ok(solve(op, space, b, &cfg)?.tv_value)
}
