//! Piecewise-Lipschitz initial data.
//!
//! Initial velocity is Lipschitz; initial density is piecewise Lipschitz
//! with at most one jump of the first kind per run. This module also builds
//! the initial second Riemann invariant `u0 + eps^2 p(g0)` and checks the
//! two jump hypotheses that prevent vacuum at an increasing density jump:
//!
//! - eps-condition: `u0(x_j) + eps^2 p(g0(x_j^-)) > u0(x)` for all `x > x_j`
//! - 0-condition:   `u0(x_j) > u0(x)` for all `x > x_j`

use std::sync::Arc;

use crate::error::{Result, SolverError};
use crate::interp::linspace;
use crate::pressure::PressureModel;

/// Which one-sided value to take at a jump. `Auto` resolves to the right
/// limit at a jump and is side-independent everywhere else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    Auto,
}

/// Built-in closed-form profiles selectable from scenario configs.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprFn {
    Const(f64),
    /// `intercept + slope * x`
    Linear {
        intercept: f64,
        slope: f64,
    },
    NegTanh,
    Tanh,
    /// `amp * exp(-((x-center)/width)^2)`
    GaussBump {
        amp: f64,
        center: f64,
        width: f64,
    },
}

impl ExprFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ExprFn::Const(c) => *c,
            ExprFn::Linear { intercept, slope } => intercept + slope * x,
            ExprFn::NegTanh => -x.tanh(),
            ExprFn::Tanh => x.tanh(),
            ExprFn::GaussBump { amp, center, width } => {
                let r = (x - center) / width;
                amp * (-r * r).exp()
            }
        }
    }
}

#[derive(Debug, Clone)]
enum SegmentEval {
    Expr(ExprFn),
    /// linear interpolation between `(x, y)` samples, constant outside
    Table(Arc<Vec<(f64, f64)>>),
    /// `u0(x) + eps^2 p(g0(x))`, evaluated segment-consistently so the
    /// one-sided values at the density jump come out right
    Invariant {
        u0: Arc<PiecewiseLipschitzFn>,
        g0: Arc<PiecewiseLipschitzFn>,
        model: PressureModel,
        eps_sq: f64,
    },
}

impl SegmentEval {
    fn eval(&self, seg_idx: usize, x: f64) -> f64 {
        match self {
            SegmentEval::Expr(e) => e.eval(x),
            SegmentEval::Table(pts) => eval_linear_table(pts, x),
            SegmentEval::Invariant {
                u0,
                g0,
                model,
                eps_sq,
            } => {
                let g = g0.eval_on_segment(seg_idx, x);
                u0.eval_clamped(x, Side::Auto) + eps_sq * model.p(g).expect("positive density")
            }
        }
    }
}

fn eval_linear_table(pts: &[(f64, f64)], x: f64) -> f64 {
    let n = pts.len();
    if x <= pts[0].0 {
        return pts[0].1;
    }
    if x >= pts[n - 1].0 {
        return pts[n - 1].1;
    }
    let i = match pts.binary_search_by(|p| p.0.partial_cmp(&x).unwrap()) {
        Ok(i) => return pts[i].1,
        Err(i) => i - 1,
    };
    let (x0, y0) = pts[i];
    let (x1, y1) = pts[i + 1];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Scalar function of one variable, Lipschitz on each side of a finite set
/// of first-kind jumps, defined on a working window and extended by its
/// boundary values outside it.
#[derive(Debug, Clone)]
pub struct PiecewiseLipschitzFn {
    window: (f64, f64),
    jumps: Vec<f64>,
    one_sided: Vec<(f64, f64)>,
    segments: Vec<SegmentEval>,
}

impl PiecewiseLipschitzFn {
    /// Jump-free profile from a closed-form expression.
    pub fn smooth(expr: ExprFn, window: (f64, f64)) -> Self {
        PiecewiseLipschitzFn {
            window,
            jumps: Vec::new(),
            one_sided: Vec::new(),
            segments: vec![SegmentEval::Expr(expr)],
        }
    }

    /// Single step: `left` for `x < x0`, `right` for `x > x0`.
    pub fn step(x0: f64, left: f64, right: f64, window: (f64, f64)) -> Self {
        PiecewiseLipschitzFn {
            window,
            jumps: vec![x0],
            one_sided: vec![(left, right)],
            segments: vec![
                SegmentEval::Expr(ExprFn::Const(left)),
                SegmentEval::Expr(ExprFn::Const(right)),
            ],
        }
    }

    /// Jump-free profile linearly interpolating `(x, y)` samples.
    pub fn from_table(mut pts: Vec<(f64, f64)>, window: (f64, f64)) -> Result<Self> {
        if pts.len() < 2 {
            return Err(SolverError::Config(
                "table needs at least two points".into(),
            ));
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in pts.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(SolverError::Config(
                    "table abscissae must be distinct".into(),
                ));
            }
        }
        Ok(PiecewiseLipschitzFn {
            window,
            jumps: Vec::new(),
            one_sided: Vec::new(),
            segments: vec![SegmentEval::Table(Arc::new(pts))],
        })
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    /// `(left limit, right limit)` at jump `i`.
    pub fn one_sided(&self, i: usize) -> (f64, f64) {
        self.one_sided[i]
    }

    fn segment_index(&self, x: f64, side: Side) -> usize {
        // number of jumps strictly left of x = index of the segment x lies in
        let mut idx = self.jumps.partition_point(|&j| j < x);
        // exactly on a jump, Right and Auto take the right segment
        if side != Side::Left && idx < self.jumps.len() && self.jumps[idx] == x {
            idx += 1;
        }
        idx
    }

    /// One-sided evaluation; errors outside the working window.
    pub fn eval(&self, x: f64, side: Side) -> Result<f64> {
        if x < self.window.0 || x > self.window.1 {
            return Err(SolverError::OutsideWindow {
                x,
                lo: self.window.0,
                hi: self.window.1,
            });
        }
        Ok(self.eval_unchecked(x, side))
    }

    /// Evaluation with the argument clamped into the window (constant
    /// extension beyond it).
    pub fn eval_clamped(&self, x: f64, side: Side) -> f64 {
        self.eval_unchecked(x.clamp(self.window.0, self.window.1), side)
    }

    fn eval_unchecked(&self, x: f64, side: Side) -> f64 {
        let idx = self.segment_index(x, side);
        self.segments[idx].eval(idx, x)
    }

    /// Evaluate segment `idx`'s formula at `x`, extrapolating past its jump
    /// boundaries (the window clamp still applies). Trace integrators use
    /// this so Runge-Kutta stages never read across a density jump.
    pub fn eval_on_segment(&self, idx: usize, x: f64) -> f64 {
        self.segments[idx].eval(idx, x.clamp(self.window.0, self.window.1))
    }

    pub fn n_segments(&self) -> usize {
        self.segments.len()
    }

    /// Max absolute within-segment difference quotient on a dense grid;
    /// pairs straddling a jump are skipped.
    pub fn lipschitz_constant(&self, window: (f64, f64), n: usize) -> f64 {
        let grid = linspace(window.0, window.1, n.max(2));
        let mut best: f64 = 0.0;
        for w in grid.windows(2) {
            if self.jumps.iter().any(|&j| w[0] < j && j <= w[1]) {
                continue;
            }
            let df = self.eval_clamped(w[1], Side::Auto) - self.eval_clamped(w[0], Side::Auto);
            best = best.max((df / (w[1] - w[0])).abs());
        }
        best
    }

    /// Extremes over a window, on a dense grid plus one-sided jump values.
    pub fn range_on(&self, window: (f64, f64), n: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for x in linspace(window.0, window.1, n.max(2)) {
            let v = self.eval_clamped(x, Side::Auto);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        for (i, &j) in self.jumps.iter().enumerate() {
            if j >= window.0 && j <= window.1 {
                let (l, r) = self.one_sided[i];
                lo = lo.min(l).min(r);
                hi = hi.max(l).max(r);
            }
        }
        (lo, hi)
    }
}

/// Initial state `(u0, g0)`: Lipschitz velocity, positive piecewise-Lipschitz
/// density.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub u0: Arc<PiecewiseLipschitzFn>,
    pub g0: Arc<PiecewiseLipschitzFn>,
}

impl InitialData {
    pub fn new(u0: PiecewiseLipschitzFn, g0: PiecewiseLipschitzFn) -> Result<Self> {
        if !u0.jumps().is_empty() {
            return Err(SolverError::ScenarioRejected(
                "initial velocity must be continuous (no jumps)".into(),
            ));
        }
        let (g_min, _) = g0.range_on(g0.window(), 2048);
        if !(g_min > 0.0) {
            return Err(SolverError::ScenarioRejected(format!(
                "initial density must stay positive; sampled minimum {g_min}"
            )));
        }
        Ok(InitialData {
            u0: Arc::new(u0),
            g0: Arc::new(g0),
        })
    }
}

/// Outcome of one jump-condition check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionVerdict {
    pub jump: f64,
    pub kind: ConditionKind,
    pub holds: bool,
    /// Infimum of the strict-inequality gap over the checked window.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    Epsilon,
    Zero,
}

/// Margins below this count as a failed strict inequality.
pub const STRICTNESS_TOL: f64 = 1e-12;

/// Default number of grid points for condition infima and bound constants.
pub const DEFAULT_N_COND: usize = 4096;

/// Initial second Riemann invariant `Z0 = u0 + eps^2 p(g0)`, sharing `g0`'s
/// jumps with one-sided values computed from `g0`'s one-sided values.
pub fn riemann_invariant_initial(
    data: &InitialData,
    model: &PressureModel,
    epsilon: f64,
) -> Result<PiecewiseLipschitzFn> {
    let eps_sq = epsilon * epsilon;
    let g0 = &data.g0;
    let mut one_sided = Vec::with_capacity(g0.jumps().len());
    for (i, &j) in g0.jumps().iter().enumerate() {
        let (gl, gr) = g0.one_sided(i);
        let u = data.u0.eval_clamped(j, Side::Auto);
        one_sided.push((u + eps_sq * model.p(gl)?, u + eps_sq * model.p(gr)?));
    }
    let segments = (0..g0.n_segments())
        .map(|_| SegmentEval::Invariant {
            u0: data.u0.clone(),
            g0: g0.clone(),
            model: model.clone(),
            eps_sq,
        })
        .collect();
    Ok(PiecewiseLipschitzFn {
        window: g0.window(),
        jumps: g0.jumps().to_vec(),
        one_sided,
        segments,
    })
}

fn condition_margin(
    data: &InitialData,
    jump: f64,
    pressure_term: f64,
    window: (f64, f64),
    n_cond: usize,
) -> f64 {
    // sup of u0 over (jump, window.right] on a uniform grid; the constant
    // extension past the window is covered by the grid's last point
    let left_value = data.u0.eval_clamped(jump, Side::Auto) + pressure_term;
    let n = n_cond.max(2);
    let mut sup = f64::NEG_INFINITY;
    let h = (window.1 - jump) / n as f64;
    for k in 1..=n {
        let x = jump + h * k as f64;
        sup = sup.max(data.u0.eval_clamped(x, Side::Auto));
    }
    left_value - sup
}

/// Check the eps-condition at every increasing density jump. Only meaningful
/// for the `FiniteZero` pressure class; the log-type class needs no condition
/// for its density lower bound.
pub fn check_epsilon_condition(
    data: &InitialData,
    model: &PressureModel,
    epsilon: f64,
    window: (f64, f64),
    n_cond: usize,
) -> Result<Vec<ConditionVerdict>> {
    let eps_sq = epsilon * epsilon;
    let mut out = Vec::new();
    for (i, &j) in data.g0.jumps().iter().enumerate() {
        let (gl, gr) = data.g0.one_sided(i);
        if !(gl < gr) {
            continue;
        }
        let margin = condition_margin(data, j, eps_sq * model.p(gl)?, window, n_cond);
        out.push(ConditionVerdict {
            jump: j,
            kind: ConditionKind::Epsilon,
            holds: margin > STRICTNESS_TOL,
            margin,
        });
    }
    Ok(out)
}

/// Check the 0-condition (the eps-condition without the pressure term) at
/// every increasing density jump.
pub fn check_zero_condition(
    data: &InitialData,
    window: (f64, f64),
    n_cond: usize,
) -> Vec<ConditionVerdict> {
    let mut out = Vec::new();
    for (i, &j) in data.g0.jumps().iter().enumerate() {
        let (gl, gr) = data.g0.one_sided(i);
        if !(gl < gr) {
            continue;
        }
        let margin = condition_margin(data, j, 0.0, window, n_cond);
        out.push(ConditionVerdict {
            jump: j,
            kind: ConditionKind::Zero,
            holds: margin > STRICTNESS_TOL,
            margin,
        });
    }
    out
}

/// Constants of the density lower bound `g >= g0_min / (1 + g0_max * growth * tau)`.
#[derive(Debug, Clone, Copy)]
pub struct BoundConstants {
    /// min of `g0` on the window
    pub g0_min: f64,
    /// max of `g0` on the window
    pub g0_max: f64,
    /// sup of (positive part of the slope of the continuous part of `Z0`) / `g0`
    pub growth: f64,
}

/// Compute the bound constants on a window. The slope of `Z0` is estimated
/// by centered differences strictly inside segments (the jump part of `Z0`
/// is excluded by construction).
pub fn bound_constants(
    data: &InitialData,
    model: &PressureModel,
    epsilon: f64,
    window: (f64, f64),
    n_cond: usize,
) -> Result<BoundConstants> {
    let (g0_min, g0_max) = data.g0.range_on(window, n_cond.max(2));
    let z0 = riemann_invariant_initial(data, model, epsilon)?;
    let width = window.1 - window.0;
    let step = (1e-6 * width).max(f64::EPSILON * (1.0 + window.1.abs()));
    let near_jump =
        |x: f64| z0.jumps().iter().any(|&j| (x - j).abs() <= 2.0 * step);
    let ratio_at = |x: f64| {
        if near_jump(x) {
            return 0.0;
        }
        let slope = (z0.eval_clamped(x + step, Side::Auto) - z0.eval_clamped(x - step, Side::Auto))
            / (2.0 * step);
        slope.max(0.0) / data.g0.eval_clamped(x, Side::Auto)
    };
    // dense scan for the sup, then a golden refinement around the argmax so
    // the bound constant is not under-resolved (the density bound can be
    // attained almost exactly, leaving no slack for grid error)
    let grid = linspace(window.0, window.1, n_cond.max(2));
    let mut growth: f64 = 0.0;
    let mut argmax = window.0;
    for &x in &grid {
        let r = ratio_at(x);
        if r > growth {
            growth = r;
            argmax = x;
        }
    }
    if growth > 0.0 {
        let h = grid[1] - grid[0];
        let (_, neg_max) = crate::interp::golden_min(|x| -ratio_at(x), argmax - h, argmax + h, 60);
        growth = growth.max(-neg_max);
    }
    Ok(BoundConstants {
        g0_min,
        g0_max,
        growth,
    })
}
