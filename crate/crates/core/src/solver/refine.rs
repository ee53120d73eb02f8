//! Continuous stage: weights by coordinate descent, joint damped Gauss-Newton
//! on positions and weights, and atom insertion where the dual exceeds one.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::grid::{soft, SearchDomain};
use crate::domain::DomainPoint;
use crate::linalg::{norm2, solve, CMatrix};
use crate::measure::{Atom, AtomicMeasure};
use crate::measurements::MeasurementOperator;
use crate::{Result, C64};

/// Fixed data of one recovery problem.
pub(crate) struct Problem<'a> {
    pub op: &'a MeasurementOperator,
    pub domain: SearchDomain,
    pub b: &'a [C64],
    pub grid: &'a [DomainPoint],
    pub grid_mat: &'a CMatrix,
    pub cell: f64,
}

/// Atoms under optimization.
#[derive(Debug, Clone, Default)]
pub(crate) struct State {
    pub pos: Vec<DomainPoint>,
    pub w: Vec<C64>,
}

impl State {
    pub fn from_measure(mu: &AtomicMeasure) -> Self {
        Self {
            pos: mu.locations(),
            w: mu.weights(),
        }
    }

    pub fn measure(&self) -> AtomicMeasure {
        AtomicMeasure::new(self.pos.iter().zip(&self.w).map(|(p, w)| Atom::new(*p, *w)).collect()).unwrap_or_default()
    }

    fn prune(&mut self) {
        let keep: Vec<bool> = self.w.iter().map(|w| w.norm() > 0.0).collect();
        let mut k = keep.iter();
        self.pos.retain(|_| *k.next().unwrap_or(&false));
        let mut k = keep.iter();
        self.w.retain(|_| *k.next().unwrap_or(&false));
    }
}

/// Largest value of `|ψ|` found and where.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Peak {
    pub at: DomainPoint,
    pub value: f64,
}

impl Problem<'_> {
    pub fn residual(&self, st: &State) -> Result<Vec<C64>> {
        let mut r = self.b.to_vec();
        for (p, w) in st.pos.iter().zip(&st.w) {
            for (ri, a) in r.iter_mut().zip(self.op.column(p)?) {
                *ri -= w * a;
            }
        }
        Ok(r)
    }

    fn objective(&self, st: &State, lambda: f64) -> Result<f64> {
        let r = self.residual(st)?;
        Ok(0.5 * norm2(&r).powi(2) + lambda * st.w.iter().map(|w| w.norm()).sum::<f64>())
    }

    /// Exact-coordinate LASSO sweeps on the weights at fixed positions.
    pub fn weights_cd(&self, st: &mut State, lambda: f64, max_sweeps: usize) -> Result<()> {
        let cols = st.pos.iter().map(|p| self.op.column(p)).collect::<Result<Vec<_>>>()?;
        let norms: Vec<f64> = cols.iter().map(|c| norm2(c).powi(2)).collect();
        let mut r = self.residual(st)?;
        for _ in 0..max_sweeps {
            let mut change = 0.0f64;
            let mut size = 0.0f64;
            for i in 0..cols.len() {
                if norms[i] == 0.0 {
                    st.w[i] = C64::new(0.0, 0.0);
                    continue;
                }
                let corr: C64 = cols[i].iter().zip(&r).map(|(a, v)| a.conj() * v).sum();
                let new = soft(st.w[i] + corr / norms[i], lambda / norms[i]);
                let d = new - st.w[i];
                if d != C64::new(0.0, 0.0) {
                    for (ri, a) in r.iter_mut().zip(&cols[i]) {
                        *ri -= d * a;
                    }
                }
                st.w[i] = new;
                change = change.max(d.norm());
                size = size.max(new.norm());
            }
            if change <= 1e-15 * size.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        st.prune();
        Ok(())
    }

    /// Levenberg-Marquardt on `½‖A(x)w − b‖² + λΣ|w_i|` over positions and weights.
    pub fn joint_lm(&self, st: &mut State, lambda: f64, max_iters: usize, step_tol: f64) -> Result<()> {
        let s = st.pos.len();
        if s == 0 {
            return Ok(());
        }
        let d = self.domain.dim();
        let np = s * (d + 2);
        let mut mu = 1e-3;
        let mut f = self.objective(st, lambda)?;
        for _ in 0..max_iters {
            let r = self.residual(st)?;
            let mut jac: Vec<Vec<C64>> = Vec::with_capacity(np);
            for (p, w) in st.pos.iter().zip(&st.w) {
                let (col, grads) = self.op.column_jet(p)?;
                for g in grads.iter().take(d) {
                    jac.push(g.iter().map(|v| v * w).collect());
                }
                jac.push(col.clone());
                jac.push(col.iter().map(|v| v * C64::new(0.0, 1.0)).collect());
            }
            // residual here is A(x)w − b = −r
            let mut h = alloc::vec![alloc::vec![0.0f64; np]; np];
            let mut g = alloc::vec![0.0f64; np];
            for k in 0..np {
                g[k] = -jac[k].iter().zip(&r).map(|(a, v)| (a.conj() * v).re).sum::<f64>();
                for l in k..np {
                    let v: f64 = jac[k].iter().zip(&jac[l]).map(|(a, b)| (a.conj() * b).re).sum();
                    h[k][l] = v;
                    h[l][k] = v;
                }
            }
            for (i, w) in st.w.iter().enumerate() {
                let a = w.norm();
                if a == 0.0 {
                    continue;
                }
                let base = i * (d + 2) + d;
                let u = [w.re / a, w.im / a];
                for x in 0..2 {
                    g[base + x] += lambda * u[x];
                    for y in 0..2 {
                        let id = if x == y { 1.0 } else { 0.0 };
                        h[base + x][base + y] += lambda / a * (id - u[x] * u[y]);
                    }
                }
            }
            let mut accepted = false;
            let mut step_small = false;
            while mu < 1e14 {
                let sys = CMatrix::from_fn(np, np, |i, j| {
                    let extra = if i == j { mu * (h[i][i] + 1e-300) } else { 0.0 };
                    C64::new(h[i][j] + extra, 0.0)
                });
                let rhs: Vec<C64> = g.iter().map(|v| C64::new(-v, 0.0)).collect();
                let Ok(delta) = solve(&sys, &rhs) else {
                    mu *= 10.0;
                    continue;
                };
                let mut trial = st.clone();
                let mut max_pos = 0.0f64;
                let mut max_w = 0.0f64;
                for i in 0..s {
                    let base = i * (d + 2);
                    let mut c = self.domain.coords(&st.pos[i]);
                    for x in 0..d {
                        c[x] += delta[base + x].re;
                        max_pos = max_pos.max(delta[base + x].re.abs());
                    }
                    trial.pos[i] = self.domain.point(c);
                    let dw = C64::new(delta[base + d].re, delta[base + d + 1].re);
                    trial.w[i] = st.w[i] + dw;
                    max_w = max_w.max(dw.norm() / st.w[i].norm().max(f64::MIN_POSITIVE));
                }
                let f_new = self.objective(&trial, lambda)?;
                if f_new <= f {
                    step_small = max_pos <= step_tol * self.cell && max_w <= step_tol;
                    *st = trial;
                    f = f_new;
                    mu = (mu / 3.0).max(1e-12);
                    accepted = true;
                    break;
                }
                mu *= 4.0;
            }
            if !accepted || step_small {
                break;
            }
        }
        Ok(())
    }

    fn eta(&self, x: &DomainPoint, r: &[C64]) -> Result<f64> {
        let col = self.op.column(x)?;
        Ok(col.iter().zip(r).map(|(a, v)| a.conj() * v).sum::<C64>().norm())
    }

    /// Largest `|A(x)^H r|` over the grid, refined around the best candidates.
    pub fn peak(&self, r: &[C64]) -> Result<Peak> {
        let all = self.peaks(r)?;
        Ok(all.first().copied().unwrap_or(Peak {
            at: self.grid.first().copied().unwrap_or(DomainPoint::Torus(0.0)),
            value: 0.0,
        }))
    }

    /// Refined local maxima of `|A(x)^H r|` from up to six separated grid
    /// candidates, largest first.
    pub fn peaks(&self, r: &[C64]) -> Result<Vec<Peak>> {
        let vals: Vec<f64> = self.grid_mat.adjoint_mul_vec(r).iter().map(|v| v.norm()).collect();
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
        let mut cands: Vec<usize> = Vec::new();
        for &i in &order {
            if cands.len() >= 6 {
                break;
            }
            let far = cands.iter().all(|&j| {
                crate::domain::distance(&self.grid[i], &self.grid[j]).unwrap_or(f64::INFINITY) > 2.5 * self.cell
            });
            if far {
                cands.push(i);
            }
        }
        let mut out = cands
            .into_iter()
            .map(|i| self.zoom(self.grid[i], vals[i], r))
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| b.value.total_cmp(&a.value));
        Ok(out)
    }

    fn zoom(&self, start: DomainPoint, value: f64, r: &[C64]) -> Result<Peak> {
        let mut best = Peak { at: start, value };
        let mut h = self.cell;
        let d = self.domain.dim();
        for _ in 0..26 {
            let c0 = self.domain.coords(&best.at);
            let range: &[i32] = &[-4, -3, -2, -1, 0, 1, 2, 3, 4];
            let mut next = best;
            for &i in range {
                for &j in if d == 2 { range } else { &[0][..] } {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let p = self.domain.point([c0[0] + f64::from(i) * h / 4.0, c0[1] + f64::from(j) * h / 4.0]);
                    let v = self.eta(&p, r)?;
                    if v > next.value {
                        next = Peak { at: p, value: v };
                    }
                }
            }
            best = next;
            h /= 4.0;
            if h < 1e-15 * self.cell.max(1.0) {
                break;
            }
        }
        Ok(best)
    }
}
