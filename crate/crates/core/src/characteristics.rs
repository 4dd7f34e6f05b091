//! Forward integration of the genuinely nonlinear characteristic family in
//! Lagrangian coordinates.
//!
//! After the Lagrangian change of variables the density jump sits still at
//! `y = x_jump`, the second invariant is frozen (`Z(y,tau) = Z0(y)`), and the
//! velocity is transported along curves
//!
//! ```text
//!   dy/dtau = -(eps^2 / g0(y)) g^2 p'(g),    g = p^{-1}((Z0(y) - v)/eps^2),
//! ```
//!
//! with `v` constant along each curve. The scaled gradient
//! `a = g p'(g) J^{-1} v_y` obeys `a(tau) = a0 / (1 + a0 * int_0^tau I(g))`,
//! so the life-span of the foot `xi` is the time the curvature integral
//! reaches `-1/a0(xi)`.

use std::sync::{Arc, OnceLock};

use crate::error::{Result, SolverError};
use crate::initial_data::{
    bound_constants, check_epsilon_condition, check_zero_condition, riemann_invariant_initial,
    BoundConstants, InitialData, PiecewiseLipschitzFn, Side,
};
use crate::interp::{golden_min, illinois_root};
use crate::pressure::{LimitClass, PressureModel};

/// Numerical parameters shared by every solver stage.
#[derive(Debug, Clone)]
pub struct Numerics {
    /// Macro steps of the characteristic integrator per unit time.
    pub ode_steps_per_unit_time: f64,
    /// Position tolerance for foot finding and flow-map inversion.
    pub tol_foot: f64,
    /// Relative tolerance of pressure inversion round trips.
    pub tol_inv: f64,
    /// Gradient denominators at or below this count as blown up.
    pub delta_blow: f64,
    /// Generic lattice resolution for scans and reports.
    pub grid_n: usize,
    /// Hard integration horizon; life spans beyond it report as `> t_max`.
    pub t_max: f64,
    /// Grid points used for condition infima and bound constants.
    pub n_cond: usize,
    /// Simpson panels per unit time for the flow-map quadrature.
    pub n_quad: usize,
    /// Centered-difference step for `u0'`, relative to the window width.
    pub v0_diff_step_rel: f64,
    /// Samplers refuse times past this fraction of the blow-up estimate.
    pub horizon_frac: f64,
    /// Substeps keep `h * |d mu/d y|` below this stability threshold.
    pub step_rate_limit: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            ode_steps_per_unit_time: 1000.0,
            tol_foot: 1e-10,
            tol_inv: 1e-12,
            delta_blow: 1e-6,
            grid_n: 101,
            t_max: 4.0,
            n_cond: 4096,
            n_quad: 256,
            v0_diff_step_rel: 1e-6,
            horizon_frac: 0.999,
            step_rate_limit: 0.02,
        }
    }
}

/// Immutable bundle of pressure law, initial data, `eps`, window and
/// numerics. Construction validates admissibility and the jump hypotheses;
/// a rejected scenario never reaches the integrator.
#[derive(Debug)]
pub struct Scenario {
    pub model: PressureModel,
    pub data: InitialData,
    pub epsilon: f64,
    pub window: (f64, f64),
    pub numerics: Numerics,
    z0: PiecewiseLipschitzFn,
    jump: Option<f64>,
    bounds: BoundConstants,
    eps_margin: Option<f64>,
    blowup_estimate: OnceLock<f64>,
    boundary_trace: OnceLock<Option<Arc<CharacteristicTrace>>>,
}

/// A sampled forward characteristic.
#[derive(Debug, Clone)]
pub struct CharacteristicTrace {
    /// Lagrangian label at `tau = 0`.
    pub foot: f64,
    /// Velocity transported along the curve.
    pub carried_v: f64,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub densities: Vec<f64>,
    /// Running `int_0^tau I(g) ds`.
    pub curvature_integral: Vec<f64>,
    pub crossed_jump_at: Option<f64>,
}

impl CharacteristicTrace {
    pub fn end_position(&self) -> f64 {
        *self.positions.last().unwrap()
    }

    pub fn end_curvature_integral(&self) -> f64 {
        *self.curvature_integral.last().unwrap()
    }

    /// Linear interpolation of the sampled position.
    pub fn position_at(&self, tau: f64) -> f64 {
        let ts = &self.times;
        if tau <= ts[0] {
            return self.positions[0];
        }
        if tau >= *ts.last().unwrap() {
            return *self.positions.last().unwrap();
        }
        let i = ts.partition_point(|&t| t < tau) - 1;
        let w = (tau - ts[i]) / (ts[i + 1] - ts[i]);
        self.positions[i] * (1.0 - w) + self.positions[i + 1] * w
    }
}

/// Per-foot life spans and their minimum.
#[derive(Debug, Clone)]
pub struct BlowupResult {
    /// `(foot, life span)`; `+inf` marks globally existing feet.
    pub times: Vec<(f64, f64)>,
    /// Feet whose integration failed, with the reason.
    pub skipped: Vec<(f64, String)>,
    /// Minimum life span over the scanned feet (after local refinement).
    pub t_b: f64,
    /// Foot achieving the minimum, when finite.
    pub argmin: Option<f64>,
}

/// Relative tolerance of the blow-up-time root refinement.
const BLOWUP_REL_TOL: f64 = 1e-8;
/// Densities past this cap freeze the trace position: the path has entered a
/// mass concentration and only the curvature integral still matters (it is
/// constant in `g` for the log law and negligible for power laws up there).
const DENSITY_FREEZE: f64 = 1e12;

impl Scenario {
    pub fn new(
        model: PressureModel,
        data: InitialData,
        epsilon: f64,
        window: (f64, f64),
        numerics: Numerics,
    ) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(SolverError::Config(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if data.g0.jumps().len() > 1 {
            return Err(SolverError::ScenarioRejected(
                "at most one density jump per scenario; run one scenario per jump".into(),
            ));
        }
        let z0 = riemann_invariant_initial(&data, &model, epsilon)?;
        let bounds = bound_constants(&data, &model, epsilon, window, numerics.n_cond)?;

        // sanity gate on the density range a run can visit: the known lower
        // bound with our constants, and the exponential upper envelope with a
        // gradient scale from the initial slope
        let slope_scale = data.u0.lipschitz_constant(window, numerics.n_cond).max(1.0);
        let lower = 0.5 * bounds.g0_min / (1.0 + bounds.g0_max * bounds.growth * numerics.t_max);
        let upper = bounds.g0_max * (slope_scale * numerics.t_max).min(25.0).exp();
        let report = model.validate_admissibility((lower, 2.0 * upper), 256);
        if !report.passed {
            let (rho, cond) = report.violations[0];
            return Err(SolverError::ScenarioRejected(format!(
                "pressure law fails admissibility at rho = {rho}: {cond:?}"
            )));
        }

        // jump hypotheses
        let mut eps_margin = None;
        let has_increasing_jump = data
            .g0
            .jumps()
            .iter()
            .enumerate()
            .any(|(i, _)| data.g0.one_sided(i).0 < data.g0.one_sided(i).1);
        if has_increasing_jump {
            match model.limit_class() {
                LimitClass::FiniteZero => {
                    let verdicts =
                        check_epsilon_condition(&data, &model, epsilon, window, numerics.n_cond)?;
                    if let Some(v) = verdicts.iter().find(|v| !v.holds) {
                        return Err(SolverError::ScenarioRejected(format!(
                            "eps-condition fails at jump x = {} (margin {:.6e})",
                            v.jump, v.margin
                        )));
                    }
                    eps_margin = verdicts.first().map(|v| v.margin);
                }
                LimitClass::MinusInfinity => {
                    let verdicts = check_zero_condition(&data, window, numerics.n_cond);
                    if let Some(v) = verdicts.iter().find(|v| !v.holds) {
                        log::warn!(
                            "0-condition fails at jump x = {} (margin {:.6e}); the fixed-eps solve \
                             is fine but vanishing-pressure limits are not covered",
                            v.jump,
                            v.margin
                        );
                    }
                }
            }
        }

        let jump = data.g0.jumps().first().copied();
        Ok(Scenario {
            model,
            data,
            epsilon,
            window,
            numerics,
            z0,
            jump,
            bounds,
            eps_margin,
            blowup_estimate: OnceLock::new(),
            boundary_trace: OnceLock::new(),
        })
    }

    pub fn z0(&self) -> &PiecewiseLipschitzFn {
        &self.z0
    }

    pub fn jump(&self) -> Option<f64> {
        self.jump
    }

    pub fn bounds(&self) -> BoundConstants {
        self.bounds
    }

    /// Margin of the eps-condition at the jump (FiniteZero class only).
    pub fn eps_condition_margin(&self) -> Option<f64> {
        self.eps_margin
    }

    pub fn v0(&self, y: f64) -> f64 {
        self.data.u0.eval_clamped(y, Side::Auto)
    }

    /// Centered-difference slope of the initial velocity.
    pub fn v0_prime(&self, y: f64) -> f64 {
        let step = self.numerics.v0_diff_step_rel * (self.window.1 - self.window.0);
        (self.v0(y + step) - self.v0(y - step)) / (2.0 * step)
    }

    /// `g0 p'(g0) u0'` at a foot; the Riccati initial value.
    pub fn gradient_seed(&self, foot: f64) -> Result<f64> {
        let side = match self.jump {
            Some(j) if foot == j => Side::Left,
            _ => Side::Auto,
        };
        let g0 = self.data.g0.eval_clamped(foot, side);
        let (_, dp, _) = self.model.evaluate(g0)?;
        Ok(g0 * dp * self.v0_prime(foot))
    }

    /// Segment index of the branch containing label `y` (ties resolve left,
    /// matching a trace that starts on the jump and moves left).
    fn branch_of(&self, y: f64) -> usize {
        match self.jump {
            Some(j) if y > j => 1,
            _ => 0,
        }
    }

    /// Density seen on `branch` at position `y` by a curve carrying `v`.
    fn branch_density(&self, branch: usize, y: f64, v: f64) -> Result<f64> {
        let q = (self.z0.eval_on_segment(branch, y) - v) / (self.epsilon * self.epsilon);
        self.model.p_inverse(q).map_err(|e| match e {
            SolverError::OutOfRange { q, .. } => SolverError::VacuumEncountered { q, y },
            other => other,
        })
    }

    /// `(dy/dtau, I(g))` on a branch.
    fn branch_rhs(&self, branch: usize, y: f64, v: f64) -> Result<(f64, f64)> {
        let g = self.branch_density(branch, y, v)?;
        let (_, dp, _) = self.model.evaluate(g)?;
        let g0 = self.data.g0.eval_on_segment(branch, y);
        let mu = -(self.epsilon * self.epsilon / g0) * g * g * dp;
        Ok((mu, self.model.curvature(g)?))
    }

    /// Speed of the genuinely nonlinear family in Lagrangian coordinates,
    /// `-(eps^2/g0(y)) g^2 p'(g)` with the density recovered from the frozen
    /// invariant; always `<= 0`.
    pub fn characteristic_speed(&self, y: f64, v: f64) -> Result<f64> {
        Ok(self.branch_rhs(self.branch_of(y), y, v)?.0)
    }

    /// Best-known blow-up time (cached); `t_max` when the data is rarefactive.
    pub fn blowup_estimate(&self) -> f64 {
        *self.blowup_estimate.get_or_init(|| {
            let feet: Vec<f64> = crate::interp::linspace(self.window.0, self.window.1, 129);
            match global_blowup_time(self, &feet) {
                Ok(res) => res.t_b.min(self.numerics.t_max),
                Err(_) => self.numerics.t_max,
            }
        })
    }

    /// Largest time the point samplers accept without an explicit override.
    pub fn horizon(&self) -> f64 {
        let est = self.blowup_estimate();
        (self.numerics.horizon_frac * est).min(self.numerics.t_max)
    }

    pub fn check_horizon(&self, tau: f64) -> Result<()> {
        let h = self.horizon();
        if tau > h {
            return Err(SolverError::HorizonExceeded { tau, horizon: h });
        }
        Ok(())
    }

    /// Characteristic emitted from the jump point at `tau = 0`, separating
    /// the region influenced by the jump from the far side. `None` without
    /// a jump.
    pub fn boundary_trace(&self) -> Option<Arc<CharacteristicTrace>> {
        self.boundary_trace
            .get_or_init(|| {
                let j = self.jump?;
                let t_end = self.numerics.t_max;
                trace_forward(self, j, t_end).ok().map(Arc::new)
            })
            .clone()
    }
}

/// Integration state of one characteristic; cheap to clone, which the root
/// refinements exploit.
#[derive(Clone)]
struct TraceCursor<'a> {
    scn: &'a Scenario,
    v: f64,
    branch: usize,
    y: f64,
    q: f64,
    t: f64,
    crossed_at: Option<f64>,
}

impl<'a> TraceCursor<'a> {
    fn start(scn: &'a Scenario, foot: f64) -> Self {
        TraceCursor {
            scn,
            v: scn.v0(foot),
            branch: scn.branch_of(foot),
            y: foot,
            q: 0.0,
            t: 0.0,
            crossed_at: None,
        }
    }

    fn rhs(&self, y: f64) -> Result<(f64, f64)> {
        self.scn.branch_rhs(self.branch, y, self.v)
    }

    /// `|d mu / d y|` estimate used to pick stable substeps.
    fn local_rate(&self) -> Result<f64> {
        let d = 1e-7 * (1.0 + self.y.abs());
        let (f0, _) = self.rhs(self.y)?;
        let (f1, _) = self.rhs(self.y - d)?;
        Ok(((f1 - f0) / d).abs())
    }

    /// One Runge-Kutta step of size `h`; returns `(y, q)` without committing.
    fn rk4(&self, h: f64) -> Result<(f64, f64)> {
        let (k1, c1) = self.rhs(self.y)?;
        let (k2, c2) = self.rhs(self.y + 0.5 * h * k1)?;
        let (k3, c3) = self.rhs(self.y + 0.5 * h * k2)?;
        let (k4, c4) = self.rhs(self.y + h * k3)?;
        let y = self.y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let q = self.q + h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4);
        Ok((y, q))
    }

    /// Advance exactly `dt`, subdividing for stability and locating the jump
    /// crossing by bisection when the path reaches the stationary jump.
    fn advance(&mut self, dt: f64) -> Result<()> {
        let mut remaining = dt;
        let jump = self.scn.jump();
        let mut guard = 0usize;
        while remaining > 1e-300 {
            guard += 1;
            if guard > 4_000_000 {
                return Err(SolverError::BracketFailure {
                    y: self.y,
                    tau: self.t,
                });
            }
            // inside a concentration the position is frozen and only the
            // curvature integral keeps accumulating
            let g_here = self.scn.branch_density(self.branch, self.y, self.v)?;
            if g_here >= DENSITY_FREEZE {
                self.q += self.scn.model.curvature(g_here)? * remaining;
                self.t += remaining;
                return Ok(());
            }
            let rate = self.local_rate()?;
            let n_sub = ((remaining * rate / self.scn.numerics.step_rate_limit).ceil() as usize)
                .clamp(1, 32_768);
            let hs = remaining / n_sub as f64;
            let (y_new, q_new) = self.rk4(hs)?;
            // crossing only happens while on the right branch of the jump
            if let Some(j) = jump {
                if self.branch == 1 && y_new < j {
                    // bisect the step fraction that lands exactly on the jump
                    let (mut lo, mut hi) = (0.0_f64, hs);
                    for _ in 0..64 {
                        let mid = 0.5 * (lo + hi);
                        let (ym, _) = self.rk4(mid)?;
                        if ym < j {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    let (_, q_c) = self.rk4(lo)?;
                    self.t += lo;
                    self.y = j;
                    self.q = q_c;
                    self.branch = 0;
                    self.crossed_at = Some(self.t);
                    // vacuum check on the far side before continuing
                    self.scn.branch_density(0, j, self.v)?;
                    remaining -= lo;
                    continue;
                }
            }
            self.y = y_new;
            self.q = q_new;
            self.t += hs;
            remaining -= hs;
        }
        Ok(())
    }
}

/// Integrate a characteristic recording state at the given sample times
/// (strictly increasing, starting at 0).
pub fn integrate_trace(
    scn: &Scenario,
    foot: f64,
    sample_times: &[f64],
) -> Result<CharacteristicTrace> {
    assert!(!sample_times.is_empty() && sample_times[0] == 0.0);
    let t_end = *sample_times.last().unwrap();
    if t_end > scn.numerics.t_max {
        return Err(SolverError::HorizonExceeded {
            tau: t_end,
            horizon: scn.numerics.t_max,
        });
    }
    let h_macro = 1.0 / scn.numerics.ode_steps_per_unit_time;
    let mut cursor = TraceCursor::start(scn, foot);
    let mut times = Vec::with_capacity(sample_times.len());
    let mut positions = Vec::with_capacity(sample_times.len());
    let mut densities = Vec::with_capacity(sample_times.len());
    let mut integral = Vec::with_capacity(sample_times.len());
    let mut record = |c: &TraceCursor| -> Result<()> {
        times.push(c.t);
        positions.push(c.y);
        densities.push(scn.branch_density(c.branch, c.y, c.v)?);
        integral.push(c.q);
        Ok(())
    };
    record(&cursor)?;
    for w in sample_times.windows(2) {
        let gap = w[1] - w[0];
        let n_macro = (gap / h_macro).ceil().max(1.0) as usize;
        let h = gap / n_macro as f64;
        for _ in 0..n_macro {
            cursor.advance(h)?;
        }
        // squash accumulated rounding so samples line up exactly
        cursor.t = w[1];
        record(&cursor)?;
    }
    Ok(CharacteristicTrace {
        foot,
        carried_v: cursor.v,
        times,
        positions,
        densities,
        curvature_integral: integral,
        crossed_jump_at: cursor.crossed_at,
    })
}

/// Forward characteristic from `(xi, 0)` to `tau_end`, sampled on the macro
/// step grid.
pub fn trace_forward(scn: &Scenario, foot: f64, tau_end: f64) -> Result<CharacteristicTrace> {
    if !(tau_end >= 0.0) {
        return Err(SolverError::Config(format!(
            "tau_end must be nonnegative, got {tau_end}"
        )));
    }
    let h = 1.0 / scn.numerics.ode_steps_per_unit_time;
    let n = (tau_end / h).ceil().max(1.0) as usize;
    let mut samples: Vec<f64> = (0..=n).map(|k| tau_end * k as f64 / n as f64).collect();
    if tau_end == 0.0 {
        samples = vec![0.0];
    }
    integrate_trace(scn, foot, &samples)
}

/// Find the foot whose characteristic passes through `(y, tau)`.
///
/// The end position is monotone in the foot before blow-up and curves only
/// move left, so `[y, y + drift]` brackets the root once `drift` is large
/// enough; the bracket is grown geometrically from a local speed estimate.
pub fn find_foot(scn: &Scenario, y: f64, tau: f64) -> Result<(f64, CharacteristicTrace)> {
    if tau > scn.numerics.t_max {
        return Err(SolverError::HorizonExceeded {
            tau,
            horizon: scn.numerics.t_max,
        });
    }
    if tau == 0.0 {
        let trace = trace_forward(scn, y, 0.0)?;
        return Ok((y, trace));
    }
    let end_pos = |foot: f64| -> Result<f64> {
        let mut cursor = TraceCursor::start(scn, foot);
        let h = 1.0 / scn.numerics.ode_steps_per_unit_time;
        let n = (tau / h).ceil().max(1.0) as usize;
        let hs = tau / n as f64;
        for _ in 0..n {
            cursor.advance(hs)?;
        }
        Ok(cursor.y)
    };
    let f = |foot: f64| -> Result<f64> { Ok(end_pos(foot)? - y) };

    let speed = scn
        .characteristic_speed(y, scn.v0(y))
        .map(f64::abs)
        .unwrap_or(0.0);
    let mut delta = (2.0 * speed * tau).max(1e-9 * (1.0 + y.abs()));
    let fa = f(y)?;
    if fa > scn.numerics.tol_foot {
        return Err(SolverError::BracketFailure { y, tau });
    }
    if fa.abs() <= scn.numerics.tol_foot {
        let trace = trace_forward(scn, y, tau)?;
        return Ok((y, trace));
    }
    let mut hi = y + delta;
    let mut fb = f(hi)?;
    let mut grow = 0;
    while fb < 0.0 {
        grow += 1;
        if grow > 80 {
            return Err(SolverError::BracketFailure { y, tau });
        }
        delta *= 2.0;
        hi = y + delta;
        fb = f(hi)?;
    }
    let root = illinois_root(
        f,
        y,
        hi,
        fa,
        fb,
        scn.numerics.tol_foot * 1e-3,
        scn.numerics.tol_foot,
        200,
    )?;
    let trace = trace_forward(scn, root, tau)?;
    Ok((root, trace))
}

/// Scaled gradient `g p'(g) J^{-1} v_y` along a trace, one value per sample,
/// from the closed Riccati solution.
pub fn scaled_gradient_along(scn: &Scenario, trace: &CharacteristicTrace) -> Result<Vec<f64>> {
    let a0 = scn.gradient_seed(trace.foot)?;
    let mut out = Vec::with_capacity(trace.times.len());
    for (k, &q) in trace.curvature_integral.iter().enumerate() {
        let denom = 1.0 + a0 * q;
        if denom <= scn.numerics.delta_blow {
            return Err(SolverError::BlowupReached {
                tau: trace.times[k],
            });
        }
        out.push(a0 / denom);
    }
    Ok(out)
}

/// Life span of the characteristic from `xi`: `+inf` for nonnegative initial
/// slope, otherwise the root of `int_0^T I(g) = -1/a0`, refined to relative
/// 1e-8. `HorizonExceeded` reports targets not bracketed by `t_max`.
pub fn blowup_time_for_foot(scn: &Scenario, foot: f64) -> Result<f64> {
    let a0 = scn.gradient_seed(foot)?;
    if a0 >= 0.0 {
        return Ok(f64::INFINITY);
    }
    let target = -1.0 / a0;
    let h = 1.0 / scn.numerics.ode_steps_per_unit_time;
    let mut cursor = TraceCursor::start(scn, foot);
    while cursor.q < target {
        if cursor.t >= scn.numerics.t_max {
            return Err(SolverError::HorizonExceeded {
                tau: scn.numerics.t_max,
                horizon: scn.numerics.t_max,
            });
        }
        let before = cursor.clone();
        let step = h.min(scn.numerics.t_max - cursor.t);
        cursor.advance(step)?;
        if cursor.q >= target {
            // refine inside [before.t, before.t + step]
            let (mut lo, mut hi) = (0.0_f64, step);
            for _ in 0..64 {
                let mid = 0.5 * (lo + hi);
                let mut probe = before.clone();
                probe.advance(mid)?;
                if probe.q >= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if (hi - lo) <= BLOWUP_REL_TOL * (before.t + hi) {
                    break;
                }
            }
            return Ok(before.t + 0.5 * (lo + hi));
        }
    }
    Ok(cursor.t)
}

/// Minimum life span over a foot grid, with one golden-section refinement
/// around the grid argmin. Per-foot failures are recorded, not fatal.
pub fn global_blowup_time(scn: &Scenario, foot_grid: &[f64]) -> Result<BlowupResult> {
    if foot_grid.is_empty() {
        return Err(SolverError::Config("foot grid must be nonempty".into()));
    }
    let mut times = Vec::with_capacity(foot_grid.len());
    let mut skipped = Vec::new();
    let mut best = f64::INFINITY;
    let mut best_idx = None;
    for (i, &xi) in foot_grid.iter().enumerate() {
        match blowup_time_for_foot(scn, xi) {
            Ok(t) => {
                if t < best {
                    best = t;
                    best_idx = Some(i);
                }
                times.push((xi, t));
            }
            Err(SolverError::HorizonExceeded { .. }) => {
                times.push((xi, f64::INFINITY));
                skipped.push((xi, format!("> t_max = {}", scn.numerics.t_max)));
            }
            Err(e) => skipped.push((xi, e.to_string())),
        }
    }
    let mut argmin = best_idx.map(|i| foot_grid[i]);
    if let Some(i) = best_idx {
        if best.is_finite() && foot_grid.len() >= 2 {
            let lo = foot_grid[i.saturating_sub(1)];
            let hi = foot_grid[(i + 1).min(foot_grid.len() - 1)];
            if hi > lo {
                let (x_ref, t_ref) = golden_min(
                    |xi| blowup_time_for_foot(scn, xi).unwrap_or(f64::INFINITY),
                    lo,
                    hi,
                    60,
                );
                if t_ref < best {
                    best = t_ref;
                    argmin = Some(x_ref);
                }
            }
        }
    }
    Ok(BlowupResult {
        times,
        skipped,
        t_b: best,
        argmin,
    })
}
