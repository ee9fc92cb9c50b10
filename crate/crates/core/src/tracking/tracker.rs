use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::homotopy::{HomotopyEval, HomotopyProblem};
use crate::linalg::{condition_number, max_abs, solve, CVector};
use crate::Complex;

/// Smallest `t` the endgame will retreat to before giving up on a path.
const ENDGAME_FLOOR: f64 = 1e-14;
/// Each endgame retreat divides the current `t` by this factor.
const ENDGAME_RETREAT: f64 = 100.0;
/// Newton iteration cap for the final solve at `t = 0`.
const ENDGAME_NEWTON_ITERS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub step_expand_after: usize,
    pub step_expand_factor: f64,
    pub step_cut_factor: f64,
    pub divergence_norm: f64,
    pub endgame_t: f64,
    pub final_tol: f64,
    pub singular_cond: f64,
    /// Residual bound for endpoints that fail `final_tol` at an ill-conditioned root.
    pub singular_tol: f64,
    pub max_steps: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            newton_tol: 1e-10,
            max_newton_iters: 3,
            initial_step: 0.05,
            min_step: 1e-14,
            max_step: 0.1,
            step_expand_after: 4,
            step_expand_factor: 2.0,
            step_cut_factor: 0.5,
            divergence_norm: 1e8,
            endgame_t: 1e-6,
            final_tol: 1e-12,
            singular_cond: 1e12,
            singular_tol: 1e-8,
            max_steps: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid tracker configuration: {0}")]
pub struct ConfigError(pub String);

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError(m.to_string()));
        let positive = [
            ("newton_tol", self.newton_tol),
            ("final_tol", self.final_tol),
            ("divergence_norm", self.divergence_norm),
            ("endgame_t", self.endgame_t),
            ("singular_cond", self.singular_cond),
            ("singular_tol", self.singular_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive and finite"));
            }
        }
        if !(0.0 < self.min_step
            && self.min_step < self.initial_step
            && self.initial_step <= self.max_step
            && self.max_step < 1.0)
        {
            return bad("steps must satisfy 0 < min_step < initial_step <= max_step < 1");
        }
        if !(self.step_cut_factor > 0.0 && self.step_cut_factor < 1.0) {
            return bad("step_cut_factor must lie in (0, 1)");
        }
        if !(self.step_expand_factor >= 1.0 && self.step_expand_factor.is_finite()) {
            return bad("step_expand_factor must be at least 1");
        }
        if self.singular_tol < self.final_tol {
            return bad("singular_tol must not be below final_tol");
        }
        if self.endgame_t >= 1.0 {
            return bad("endgame_t must be below 1");
        }
        if self.max_newton_iters == 0 || self.max_steps == 0 || self.step_expand_after == 0 {
            return bad("iteration and step counts must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathStatus {
    Converged,
    Singular,
    Diverged,
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathOutcome {
    pub status: PathStatus,
    pub endpoint: Vec<Complex>,
    pub t_final: f64,
    /// `|H(endpoint, t_final)|_inf`.
    pub residual: f64,
    /// Residual relative to the size of the terms; the endgame tolerances apply to this.
    pub relative_residual: f64,
    pub condition_estimate: f64,
    pub steps: usize,
    pub rejected_steps: usize,
    pub start_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonResult {
    pub point: Vec<Complex>,
    /// `|H(point, t)|_inf`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set when a linear solve failed.
    pub condition_estimate: Option<f64>,
    /// `|dz|_inf` of each update, in order.
    pub step_norms: Vec<f64>,
}

fn inf_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Plain Newton iteration on `H(., t)`.
///
/// Stops once `|H| < tol` after an update, or the update satisfies
/// `|dz|_inf <= tol (1 + |z|_inf)`, or after `max_iters` updates.
pub fn newton_correct(
    h: &dyn HomotopyProblem,
    t: f64,
    z: &[Complex],
    tol: f64,
    max_iters: usize,
) -> NewtonResult {
    let n = h.dim();
    let mut ev = HomotopyEval::zeros(n);
    let mut z = CVector::from_column_slice(z);
    h.evaluate(z.as_slice(), t, &mut ev);
    let mut residual = inf_norm(&ev.value);
    let mut step_norms = Vec::new();
    let mut converged = false;
    let mut condition_estimate = None;
    for _ in 0..max_iters {
        let Some(dz) = solve(&ev.jz, &ev.value) else {
            condition_estimate = Some(condition_number(&ev.jz));
            break;
        };
        z -= &dz;
        let dz_norm = inf_norm(&dz);
        step_norms.push(dz_norm);
        h.evaluate(z.as_slice(), t, &mut ev);
        residual = inf_norm(&ev.value);
        if !residual.is_finite() {
            break;
        }
        if residual < tol || dz_norm <= tol * (1.0 + max_abs(z.as_slice())) {
            converged = true;
            break;
        }
    }
    NewtonResult {
        point: z.as_slice().to_vec(),
        residual,
        iterations: step_norms.len(),
        converged,
        condition_estimate,
        step_norms,
    }
}

/// Tangent `dz/dt = -J_z^{-1} J_t` of the solution path through `(z, t)`.
fn tangent(h: &dyn HomotopyProblem, z: &CVector, t: f64, ev: &mut HomotopyEval) -> Option<CVector> {
    h.evaluate(z.as_slice(), t, ev);
    solve(&ev.jz, &ev.jt).map(|d| -d)
}

/// Classical Runge-Kutta step of the Davidenko equation from `t` to `t + dt`.
fn rk4_predict(
    h: &dyn HomotopyProblem,
    z: &CVector,
    t: f64,
    dt: f64,
    ev: &mut HomotopyEval,
) -> Option<CVector> {
    let half = Complex::new(dt / 2.0, 0.0);
    let full = Complex::new(dt, 0.0);
    let k1 = tangent(h, z, t, ev)?;
    let k2 = tangent(h, &(z + &k1 * half), t + dt / 2.0, ev)?;
    let k3 = tangent(h, &(z + &k2 * half), t + dt / 2.0, ev)?;
    let k4 = tangent(h, &(z + &k3 * full), t + dt, ev)?;
    let incr = (k1 + (k2 + k3) * Complex::new(2.0, 0.0) + k4) * Complex::new(dt / 6.0, 0.0);
    let next = z + incr;
    next.iter()
        .all(|c| c.re.is_finite() && c.im.is_finite())
        .then_some(next)
}

struct Walker<'a> {
    h: &'a dyn HomotopyProblem,
    cfg: &'a TrackerConfig,
    z: CVector,
    t: f64,
    step: f64,
    streak: usize,
    accepted: usize,
    rejected: usize,
    ev: HomotopyEval,
    trace: Option<Vec<(f64, Vec<Complex>)>>,
}

enum Walk {
    Reached,
    Diverged,
    Truncated,
}

impl Walker<'_> {
    /// Follows the path down to `target` (> 0) with adaptive steps.
    fn walk_to(&mut self, target: f64) -> Walk {
        loop {
            if max_abs(self.z.as_slice()) > self.cfg.divergence_norm {
                return Walk::Diverged;
            }
            if self.t <= target {
                return Walk::Reached;
            }
            if self.accepted + self.rejected >= self.cfg.max_steps {
                return Walk::Truncated;
            }
            let t_next = (self.t - self.step).max(target);
            let dt = t_next - self.t;
            let corrected =
                rk4_predict(self.h, &self.z, self.t, dt, &mut self.ev).and_then(|pred| {
                    let r = newton_correct(
                        self.h,
                        t_next,
                        pred.as_slice(),
                        self.cfg.newton_tol,
                        self.cfg.max_newton_iters,
                    );
                    r.converged.then_some(r.point)
                });
            match corrected {
                Some(p) => {
                    self.z = CVector::from_vec(p);
                    self.t = t_next;
                    self.accepted += 1;
                    if let Some(trace) = &mut self.trace {
                        trace.push((self.t, self.z.as_slice().to_vec()));
                    }
                    self.streak += 1;
                    if self.streak >= self.cfg.step_expand_after {
                        self.step =
                            (self.step * self.cfg.step_expand_factor).min(self.cfg.max_step);
                        self.streak = 0;
                    }
                }
                None => {
                    self.rejected += 1;
                    self.streak = 0;
                    self.step *= self.cfg.step_cut_factor;
                    if self.step < self.cfg.min_step {
                        return Walk::Truncated;
                    }
                }
            }
        }
    }

    fn outcome(&self, status: PathStatus, f: Finish, t: f64) -> PathOutcome {
        PathOutcome {
            status,
            endpoint: f.point,
            t_final: t,
            residual: f.residual,
            relative_residual: f.relative,
            condition_estimate: f.cond,
            steps: self.accepted,
            rejected_steps: self.rejected,
            start_index: 0,
        }
    }

    fn here(&mut self, status: PathStatus) -> PathOutcome {
        self.h.evaluate(self.z.as_slice(), self.t, &mut self.ev);
        let f = Finish {
            point: self.z.as_slice().to_vec(),
            residual: inf_norm(&self.ev.value),
            relative: self
                .h
                .relative_residual(&self.ev.value, self.z.as_slice(), self.t),
            cond: condition_number(&self.ev.jz),
            quadratic: false,
        };
        self.outcome(status, f, self.t)
    }
}

/// Result of the Newton solve at `t = 0`.
struct Finish {
    point: Vec<Complex>,
    residual: f64,
    relative: f64,
    cond: f64,
    quadratic: bool,
}

fn finish_at_zero(w: &mut Walker<'_>) -> Finish {
    // Near a singular endpoint the prediction can be worse than the point we are at.
    w.h.evaluate(w.z.as_slice(), 0.0, &mut w.ev);
    let here = (w.z.clone(), inf_norm(&w.ev.value));
    let mut z = rk4_predict(w.h, &w.z, w.t, -w.t, &mut w.ev).unwrap_or_else(|| w.z.clone());
    w.h.evaluate(z.as_slice(), 0.0, &mut w.ev);
    let predicted = inf_norm(&w.ev.value);
    let mut best = if predicted.is_finite() && predicted <= here.1 {
        (z.clone(), predicted)
    } else {
        here
    };
    z = best.0.clone();
    w.h.evaluate(z.as_slice(), 0.0, &mut w.ev);
    let mut steps = Vec::new();
    // Iterate until the update stalls at rounding level, keeping the best iterate.
    for _ in 0..ENDGAME_NEWTON_ITERS {
        let Some(dz) = solve(&w.ev.jz, &w.ev.value) else {
            break;
        };
        z -= &dz;
        let dz_norm = inf_norm(&dz);
        steps.push(dz_norm);
        if max_abs(z.as_slice()) > w.cfg.divergence_norm {
            break;
        }
        w.h.evaluate(z.as_slice(), 0.0, &mut w.ev);
        let res = inf_norm(&w.ev.value);
        if !res.is_finite() {
            break;
        }
        if res < best.1 || !best.1.is_finite() {
            best = (z.clone(), res);
        }
        if dz_norm <= 4.0 * f64::EPSILON * (1.0 + max_abs(z.as_slice())) {
            break;
        }
    }
    let (point, residual) = (best.0.as_slice().to_vec(), best.1);
    w.h.evaluate(&point, 0.0, &mut w.ev);
    let cond = condition_number(&w.ev.jz);
    let relative = w.h.relative_residual(&w.ev.value, &point, 0.0);
    Finish {
        quadratic: converges_quadratically(&steps, max_abs(&point)),
        point,
        residual,
        relative,
        cond,
    }
}

/// True unless the Newton updates shrink at a linear rate while still
/// significant, which happens at singular roots.
fn converges_quadratically(steps: &[f64], scale: f64) -> bool {
    let floor = 1e-11 * (1.0 + scale);
    let linear = steps
        .windows(2)
        .filter(|w| w[0] > floor && w[1] > floor && w[1] > 0.2 * w[0])
        .count();
    linear < 2
}

/// Tracks one solution path from `t = 1` to `t = 0`.
///
/// RK4 predictor on the Davidenko equation, Newton corrector, step halving on
/// failure and doubling after a run of successes. Below `endgame_t` the path
/// is finished by Newton's method at `t = 0`; if that fails the tracker
/// retreats to smaller `t` and retries, which also exposes slow divergence.
pub fn track_path(h: &dyn HomotopyProblem, start: &[Complex], cfg: &TrackerConfig) -> PathOutcome {
    track(h, start, cfg, false).0
}

/// [`track_path`] that also returns `(t, z)` after every accepted step.
pub fn track_path_traced(
    h: &dyn HomotopyProblem,
    start: &[Complex],
    cfg: &TrackerConfig,
) -> (PathOutcome, Vec<(f64, Vec<Complex>)>) {
    track(h, start, cfg, true)
}

fn track(
    h: &dyn HomotopyProblem,
    start: &[Complex],
    cfg: &TrackerConfig,
    traced: bool,
) -> (PathOutcome, Vec<(f64, Vec<Complex>)>) {
    assert_eq!(start.len(), h.dim(), "start point dimension");
    let mut w = Walker {
        h,
        cfg,
        z: CVector::from_column_slice(start),
        t: 1.0,
        step: cfg.initial_step,
        streak: 0,
        accepted: 0,
        rejected: 0,
        ev: HomotopyEval::zeros(h.dim()),
        trace: traced.then(Vec::new),
    };
    let outcome = walk_and_finish(&mut w);
    (outcome, w.trace.take().unwrap_or_default())
}

fn walk_and_finish(w: &mut Walker<'_>) -> PathOutcome {
    let cfg = w.cfg;
    let mut target = cfg.endgame_t;
    let mut best: Option<Finish> = None;
    loop {
        match w.walk_to(target) {
            Walk::Diverged => return w.here(PathStatus::Diverged),
            Walk::Truncated => {
                if w.t <= cfg.endgame_t {
                    keep_best(&mut best, finish_at_zero(w));
                }
                return settle(w, best);
            }
            Walk::Reached => {}
        }
        let f = finish_at_zero(w);
        if max_abs(&f.point) > cfg.divergence_norm {
            return w.outcome(PathStatus::Diverged, f, 0.0);
        }
        if f.relative <= cfg.final_tol {
            let status = if f.cond <= cfg.singular_cond && f.quadratic {
                PathStatus::Converged
            } else {
                PathStatus::Singular
            };
            return w.outcome(status, f, 0.0);
        }
        keep_best(&mut best, f);
        if target <= ENDGAME_FLOOR {
            return settle(w, best);
        }
        target = (target / ENDGAME_RETREAT).max(ENDGAME_FLOOR);
        // The retreat continues from where the walk stopped with a fresh step.
        w.step = w.step.min(w.t);
    }
}

fn keep_best(best: &mut Option<Finish>, f: Finish) {
    if f.relative.is_finite() && best.as_ref().is_none_or(|b| f.relative < b.relative) {
        *best = Some(f);
    }
}

/// Endpoint of a path whose endgame never met `final_tol`: singular if the
/// best attempt is ill-conditioned and nearly solves `H(., 0)`.
fn settle(w: &mut Walker<'_>, best: Option<Finish>) -> PathOutcome {
    match best {
        Some(f) if f.relative <= w.cfg.singular_tol && f.cond > w.cfg.singular_cond.sqrt() => {
            w.outcome(PathStatus::Singular, f, 0.0)
        }
        _ => w.here(PathStatus::Truncated),
    }
}

/// Tracks every start point; output order follows `starts`.
pub fn track_all(
    h: &dyn HomotopyProblem,
    starts: &[Vec<Complex>],
    cfg: &TrackerConfig,
) -> Vec<PathOutcome> {
    starts
        .par_iter()
        .enumerate()
        .map(|(i, s)| PathOutcome {
            start_index: i,
            ..track_path(h, s, cfg)
        })
        .collect()
}
