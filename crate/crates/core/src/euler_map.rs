//! Map the Lagrangian solution back to Eulerian coordinates.
//!
//! The flow map is `x(y, t) = y + int_0^t v(y, s) ds`, strictly increasing in
//! `y` before blow-up, so Eulerian samples are one inversion away. Two
//! implementations live here:
//!
//! - direct per-point operations ([`flow_x`], [`invert_x`],
//!   [`sample_eulerian`], [`discontinuity_curve`]) that nest root solves and
//!   quadrature; exact but slow, meant for spot checks, and
//! - [`SolutionMesh`], which integrates a dense ensemble of characteristics
//!   once, inverts the foot and flow maps per time slice, and serves lattice
//!   sweeps, characteristic curves, and weak-form quadrature at interpolation
//!   accuracy; the experiment harness runs on it.

use rayon::prelude::*;

use crate::characteristics::{find_foot, integrate_trace, Scenario};
use crate::error::{Result, SolverError};
use crate::initial_data::Side;
use crate::interp::{cumulative_quad, illinois_root, linspace, Pchip};

/// One Eulerian sample.
#[derive(Debug, Clone, Copy)]
pub struct EulerSample {
    pub rho: f64,
    pub u: f64,
    pub u_x: f64,
    /// `u - eps^2 rho p'(rho)`, the genuinely nonlinear speed
    pub lambda1: f64,
    /// `u`, the contact speed
    pub lambda2: f64,
}

/// `x(y, t)` by composite Simpson quadrature of the transported velocity.
pub fn flow_x(scn: &Scenario, y: f64, t: f64) -> Result<f64> {
    scn.check_horizon(t)?;
    flow_x_unchecked(scn, y, t)
}

fn flow_x_unchecked(scn: &Scenario, y: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(y);
    }
    let panels = ((scn.numerics.n_quad as f64 * t).ceil() as usize).max(2);
    let nodes = 2 * panels + 1;
    let h = t / (nodes - 1) as f64;
    let mut vs = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let s = h * k as f64;
        let v = if s == 0.0 {
            scn.v0(y)
        } else {
            let (foot, _) = find_foot(scn, y, s)?;
            scn.v0(foot)
        };
        vs.push(v);
    }
    let mut acc = vs[0] + vs[nodes - 1];
    for (k, v) in vs.iter().enumerate().take(nodes - 1).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(y + acc * h / 3.0)
}

/// Invert the flow map at time `t`; `bracket` defaults to the maximal drift
/// interval around `x`.
pub fn invert_x(scn: &Scenario, x: f64, t: f64, bracket: Option<(f64, f64)>) -> Result<f64> {
    scn.check_horizon(t)?;
    if t == 0.0 {
        return Ok(x);
    }
    let (a, b) = match bracket {
        Some(p) => p,
        None => {
            let (v_lo, v_hi) = scn.data.u0.range_on(scn.window, scn.numerics.n_cond);
            let pad = v_lo.abs().max(v_hi.abs()) * t + 1e-6;
            (x - pad, x + pad)
        }
    };
    let f = |y: f64| -> Result<f64> { Ok(flow_x_unchecked(scn, y, t)? - x) };
    let fa = f(a)?;
    let fb = f(b)?;
    if fa > 0.0 || fb < 0.0 {
        return Err(SolverError::BracketFailure { y: x, tau: t });
    }
    illinois_root(
        f,
        a,
        b,
        fa,
        fb,
        scn.numerics.tol_foot,
        scn.numerics.tol_foot,
        200,
    )
}

/// Eulerian sample at `(x, t)` via flow inversion; see
/// [`crate::fields::sample_lagrangian`] for the Lagrangian side.
pub fn sample_eulerian(scn: &Scenario, x: f64, t: f64) -> Result<EulerSample> {
    let y = invert_x(scn, x, t, None)?;
    let f = crate::fields::sample_lagrangian(scn, y, t)?;
    let (_, dp, _) = scn.model.evaluate(f.g)?;
    let eps_sq = scn.epsilon * scn.epsilon;
    Ok(EulerSample {
        rho: f.g,
        u: f.v,
        u_x: f.grad,
        lambda1: f.v - eps_sq * f.g * dp,
        lambda2: f.v,
    })
}

/// The moving discontinuity: Eulerian image of the stationary Lagrangian
/// jump, together with the one-sided velocities along it (equal up to
/// tolerance; the contact carries no velocity jump).
#[derive(Debug, Clone)]
pub struct DiscontinuityCurve {
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub u_left: Vec<f64>,
    pub u_right: Vec<f64>,
}

/// Track the discontinuity curve over a uniform `t_grid`.
pub fn discontinuity_curve(scn: &Scenario, t_grid: &[f64]) -> Result<DiscontinuityCurve> {
    let jump = scn
        .jump()
        .ok_or_else(|| SolverError::Config("scenario has no density jump to track".into()))?;
    let t_end = *t_grid.last().unwrap();
    scn.check_horizon(t_end)?;
    // refined uniform grid for the cumulative quadrature
    let n_fine = 4 * (t_grid.len() - 1).max(1);
    let h = t_end / n_fine as f64;
    let mut v_line = Vec::with_capacity(n_fine + 1);
    for k in 0..=n_fine {
        let s = h * k as f64;
        let v = if s == 0.0 {
            scn.v0(jump)
        } else {
            let (foot, _) = find_foot(scn, jump, s)?;
            scn.v0(foot)
        };
        v_line.push(v);
    }
    let cum = cumulative_quad(&v_line, h);
    let mut xs = Vec::with_capacity(t_grid.len());
    let mut u_left = Vec::with_capacity(t_grid.len());
    let mut u_right = Vec::with_capacity(t_grid.len());
    let off = 1e-9;
    for &t in t_grid {
        let idx = (t / h).round() as usize;
        let idx = idx.min(n_fine);
        xs.push(jump + cum[idx]);
        let vl = if t == 0.0 {
            scn.v0(jump - off)
        } else {
            scn.v0(find_foot(scn, jump - off, t)?.0)
        };
        let vr = if t == 0.0 {
            scn.v0(jump + off)
        } else {
            scn.v0(find_foot(scn, jump + off, t)?.0)
        };
        u_left.push(vl);
        u_right.push(vr);
    }
    Ok(DiscontinuityCurve {
        ts: t_grid.to_vec(),
        xs,
        u_left,
        u_right,
    })
}

/// Genuinely nonlinear characteristic through `(x_seed, t_seed)`, integrated
/// backward to `t = 0` and returned as `(t, x)` samples. Convenience wrapper
/// that builds a mesh; sweeps should build one [`SolutionMesh`] and call
/// [`SolutionMesh::char1_backward`] directly.
pub fn char1_curve(
    scn: &Scenario,
    x_seed: f64,
    t_seed: f64,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut cfg = MeshConfig::default();
    cfg.n_time = (2 * n_samples.max(2)).max(400) & !1;
    let mesh = SolutionMesh::build(scn, t_seed, &cfg, &[])?;
    let k_seed = mesh.n_slices() - 1;
    let pts = mesh.char1_backward(x_seed, k_seed & !1usize)?;
    Ok(pts.into_iter().map(|(k, x)| (mesh.time_of(k), x)).collect())
}

// ---------------------------------------------------------------------------
// dense solution mesh
// ---------------------------------------------------------------------------

/// Resolution knobs of the dense mesh.
#[derive(Debug, Clone)]
pub struct MeshConfig {
    /// Fine time steps (snapshots at `k * t_end / n_time`); keep it even.
    pub n_time: usize,
    /// Uniform characteristic feet per side of the jump.
    pub feet_per_side: usize,
    /// Extra geometrically clustered feet per side of the jump.
    pub cluster_per_side: usize,
    /// Flow-map row resolution across the padded window.
    pub n_y: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig {
            n_time: 800,
            feet_per_side: 900,
            cluster_per_side: 140,
            n_y: 561,
        }
    }
}

/// Inverse foot map of one time slice: position -> foot, split at the
/// boundary characteristic and at the jump line where its slope jumps.
struct InverseFoot {
    /// far side feet (left of the boundary characteristic)
    left: Option<Pchip>,
    /// feet fed through the jump (`[y1, jump]`)
    mid: Option<Pchip>,
    /// feet right of the jump (or the whole axis without a jump)
    plus: Pchip,
    /// position of the boundary characteristic
    y1: f64,
    /// foot currently sitting on the jump line
    #[allow(dead_code)]
    xi_star: f64,
}

impl InverseFoot {
    fn eval(&self, y: f64, jump: Option<f64>) -> f64 {
        match jump {
            None => self.plus.eval(y),
            Some(j) => {
                if y >= j {
                    self.plus.eval(y)
                } else if y >= self.y1 {
                    match &self.mid {
                        Some(p) => p.eval(y),
                        None => self.plus.eval(y),
                    }
                } else {
                    match &self.left {
                        Some(p) => p.eval(y),
                        None => self.plus.eval(y),
                    }
                }
            }
        }
    }
}

/// Dense in-memory solution over `[0, t_end]`: inverse foot maps and flow
/// rows per fine time slice. All queries take a slice index `k` (time
/// `k * dt`), keeping curve integration and quadrature on stored slices.
pub struct SolutionMesh<'a> {
    pub scn: &'a Scenario,
    pub t_end: f64,
    pub dt: f64,
    n_time: usize,
    #[allow(dead_code)]
    y_grid: Vec<f64>,
    inv_foot: Vec<InverseFoot>,
    /// per-slice flow rows `x(y_m, t_k)` as interpolants in `y`
    x_rows: Vec<Pchip>,
    /// per-slice inverses `y(x, t_k)`
    x_inv: Vec<Pchip>,
    /// global foot array (left family then right family) and the split index
    feet: Vec<f64>,
    right_start: usize,
    /// curvature integrals at requested report slices: `q_cols[r][i]` is the
    /// integral of foot `i` at `report_slices[r]`
    report_slices: Vec<usize>,
    q_cols: Vec<Vec<f64>>,
    /// image of the jump per slice (empty without a jump)
    x2: Vec<f64>,
    /// image of the boundary characteristic per slice
    x_boundary: Vec<f64>,
}

impl<'a> SolutionMesh<'a> {
    /// Integrate the ensemble and build every per-slice interpolant.
    /// `report_slices` lists slice indices where gradient data is retained.
    pub fn build(
        scn: &'a Scenario,
        t_end: f64,
        cfg: &MeshConfig,
        report_slices: &[usize],
    ) -> Result<Self> {
        scn.check_horizon(t_end)?;
        let n_time = cfg.n_time.max(2) & !1; // even
        let dt = t_end / n_time as f64;
        let times: Vec<f64> = (0..=n_time).map(|k| dt * k as f64).collect();

        // padded row grid: everything the window can flow to
        let (v_lo, v_hi) = scn.data.u0.range_on(scn.window, scn.numerics.n_cond);
        let pad = v_lo.abs().max(v_hi.abs()) * t_end + 0.5;
        let y_lo = scn.window.0 - pad;
        let y_hi = scn.window.1 + pad;
        let mut y_grid = linspace(y_lo, y_hi, cfg.n_y.max(9));
        if let Some(j) = scn.jump() {
            // the jump must be a grid node; snap the nearest node onto it so
            // no near-duplicate pair sneaks into the monotone rows
            let spacing = y_grid[1] - y_grid[0];
            let nearest = y_grid
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - j).abs().partial_cmp(&(b.1 - j).abs()).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            if (y_grid[nearest] - j).abs() < 0.25 * spacing {
                y_grid[nearest] = j;
            } else {
                y_grid.push(j);
                y_grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
            }
        }

        // feet: cover the row grid plus the rightward drift of the feet
        let drift_probe = integrate_trace(scn, y_hi, &times)?;
        let mut right_pad = 2.0 * (y_hi - drift_probe.end_position()).abs() + 1e-6;
        let mut guard = 0;
        while integrate_trace(scn, y_hi + right_pad, &times)?.end_position() < y_hi {
            right_pad *= 2.0;
            guard += 1;
            if guard > 40 {
                return Err(SolverError::BracketFailure {
                    y: y_hi,
                    tau: t_end,
                });
            }
        }
        let (left_feet, right_feet) = foot_grids(scn, y_lo, y_hi + right_pad, cfg);
        let right_start = left_feet.len();
        let mut feet = left_feet;
        feet.extend_from_slice(&right_feet);

        // integrate the whole ensemble (embarrassingly parallel)
        let traces: Result<Vec<_>> = feet
            .par_iter()
            .map(|&foot| integrate_trace(scn, foot, &times))
            .collect();
        let traces = traces?;

        // crossing map tau_c(foot) for the right family
        let jump = scn.jump();
        let crossing: Option<Pchip> = jump.map(|j| {
            let mut ts = vec![0.0];
            let mut fs = vec![j];
            for tr in &traces[right_start..] {
                if let Some(tc) = tr.crossed_jump_at {
                    if tc > *ts.last().unwrap() {
                        ts.push(tc);
                        fs.push(tr.foot);
                    }
                }
            }
            if ts.len() < 2 {
                // nothing crossed within t_end; extend linearly using the
                // initial speed so xi_star stays defined
                let rate = scn
                    .characteristic_speed(j, scn.v0(j))
                    .map(f64::abs)
                    .unwrap_or(1.0)
                    .max(1e-300);
                ts.push(t_end.max(1e-9));
                fs.push(j + rate * t_end.max(1e-9));
            }
            Pchip::new(ts, fs)
        });

        // per-slice inverse foot maps
        let mut inv_foot = Vec::with_capacity(n_time + 1);
        for k in 0..=n_time {
            let t_k = times[k];
            let xi_star = match &crossing {
                Some(c) => c.eval(t_k).max(jump.unwrap()),
                None => f64::NAN,
            };
            inv_foot.push(build_slice_inverse(
                scn,
                &traces,
                &feet,
                right_start,
                k,
                t_k,
                xi_star,
            )?);
        }

        // transported velocity rows and cumulative flow rows
        let n_y = y_grid.len();
        let mut v_rows: Vec<Vec<f64>> = Vec::with_capacity(n_time + 1);
        for (k, inv) in inv_foot.iter().enumerate() {
            let _ = k;
            let row: Vec<f64> = y_grid.iter().map(|&y| scn.v0(inv.eval(y, jump))).collect();
            v_rows.push(row);
        }
        // the jump row feeds the discontinuity-curve comparison; replace its
        // interpolated feet with directly solved ones
        if let Some(j) = jump {
            let m_jump = y_grid
                .iter()
                .position(|&y| y == j)
                .expect("jump is a grid node");
            let direct: Result<Vec<f64>> = (0..=n_time)
                .into_par_iter()
                .map(|k| {
                    if k == 0 {
                        Ok(scn.v0(j))
                    } else {
                        Ok(scn.v0(find_foot(scn, j, times[k])?.0))
                    }
                })
                .collect();
            for (k, v) in direct?.into_iter().enumerate() {
                v_rows[k][m_jump] = v;
            }
        }
        let mut x_col = vec![vec![0.0; n_time + 1]; n_y];
        for (m, col) in x_col.iter_mut().enumerate() {
            let v_hist: Vec<f64> = v_rows.iter().map(|r| r[m]).collect();
            let cum = cumulative_quad(&v_hist, dt);
            for k in 0..=n_time {
                col[k] = y_grid[m] + cum[k];
            }
        }
        let mut x_rows = Vec::with_capacity(n_time + 1);
        let mut x_inv = Vec::with_capacity(n_time + 1);
        for k in 0..=n_time {
            let row: Vec<f64> = (0..n_y).map(|m| x_col[m][k]).collect();
            for w in row.windows(2) {
                if w[1] <= w[0] {
                    return Err(SolverError::BracketFailure {
                        y: w[0],
                        tau: times[k],
                    });
                }
            }
            x_rows.push(Pchip::new(y_grid.clone(), row.clone()));
            x_inv.push(Pchip::new(row, y_grid.clone()));
        }

        // jump image and boundary-characteristic image per slice
        let mut x2 = Vec::new();
        let mut x_boundary = Vec::new();
        if jump.is_some() {
            for k in 0..=n_time {
                x2.push(x_rows[k].eval(jump.unwrap()));
                x_boundary.push(x_rows[k].eval(inv_foot[k].y1));
            }
        }

        // retained gradient columns
        let mut report = report_slices.to_vec();
        report.sort_unstable();
        report.dedup();
        let q_cols: Vec<Vec<f64>> = report
            .iter()
            .map(|&k| {
                traces
                    .iter()
                    .map(|tr| tr.curvature_integral[k.min(n_time)])
                    .collect()
            })
            .collect();

        Ok(SolutionMesh {
            scn,
            t_end,
            dt,
            n_time,
            y_grid,
            inv_foot,
            x_rows,
            x_inv,
            feet,
            right_start,
            report_slices: report,
            q_cols,
            x2,
            x_boundary,
        })
    }

    pub fn n_slices(&self) -> usize {
        self.n_time + 1
    }

    pub fn time_of(&self, k: usize) -> f64 {
        self.dt * k as f64
    }

    /// Slice index of a time on the mesh grid (must land on it).
    pub fn slice_of(&self, t: f64) -> usize {
        let k = (t / self.dt).round() as usize;
        assert!(
            (self.time_of(k) - t).abs() <= 1e-9 * (1.0 + t.abs()),
            "time {t} is not on the mesh grid (dt = {})",
            self.dt
        );
        k.min(self.n_time)
    }

    /// Foot of the backward characteristic through `(y, t_k)`.
    pub fn foot_at(&self, y: f64, k: usize) -> f64 {
        self.inv_foot[k].eval(y, self.scn.jump())
    }

    /// Lagrangian label at `(x, t_k)`.
    pub fn label_of(&self, x: f64, k: usize) -> f64 {
        self.x_inv[k].eval(x)
    }

    /// Flow image of label `y` at slice `k`.
    pub fn x_of_label(&self, y: f64, k: usize) -> f64 {
        self.x_rows[k].eval(y)
    }

    /// Transported velocity at `(x, t_k)`.
    pub fn u_at(&self, x: f64, k: usize) -> f64 {
        self.scn.v0(self.foot_at(self.label_of(x, k), k))
    }

    /// Image of the jump at slice `k`.
    pub fn x2_at(&self, k: usize) -> Option<f64> {
        self.x2.get(k).copied()
    }

    /// Image of the boundary characteristic at slice `k`.
    pub fn x_boundary_at(&self, k: usize) -> Option<f64> {
        self.x_boundary.get(k).copied()
    }

    /// Density and speeds at `(x, t_k)`; `side` picks the branch on the
    /// discontinuity itself.
    pub fn euler_at_side(&self, x: f64, k: usize, side: Side) -> Result<EulerSample> {
        let mut y = self.label_of(x, k);
        // an explicit side pins queries at the discontinuity onto the correct
        // branch even when the flow inversion lands a rounding error across
        if let Some(j) = self.scn.jump() {
            let stray = (y - j).abs() < 1e-9;
            match side {
                Side::Left if stray && y > j => y = j,
                Side::Right if stray && y < j => y = j,
                _ => {}
            }
        }
        let foot = self.foot_at(y, k);
        let v = self.scn.v0(foot);
        let z = self.scn.z0().eval_clamped(y, side);
        let eps_sq = self.scn.epsilon * self.scn.epsilon;
        let g = self
            .scn
            .model
            .p_inverse((z - v) / eps_sq)
            .map_err(|e| match e {
                SolverError::OutOfRange { q, .. } => SolverError::VacuumEncountered { q, y },
                other => other,
            })?;
        let (_, dp, _) = self.scn.model.evaluate(g)?;
        let u_x = match self.gradient_at_foot(foot, k) {
            Some(a) => a / (g * dp),
            None => f64::NAN,
        };
        Ok(EulerSample {
            rho: g,
            u: v,
            u_x,
            lambda1: v - eps_sq * g * dp,
            lambda2: v,
        })
    }

    pub fn euler_at(&self, x: f64, k: usize) -> Result<EulerSample> {
        self.euler_at_side(x, k, Side::Auto)
    }

    /// Scaled gradient `a0/(1 + a0 q)` at a foot for a report slice; `None`
    /// when `k` was not retained.
    fn gradient_at_foot(&self, foot: f64, k: usize) -> Option<f64> {
        let r = self.report_slices.iter().position(|&s| s == k)?;
        let col = &self.q_cols[r];
        let (lo, hi) = if foot <= self.scn.jump().unwrap_or(f64::INFINITY) {
            (0, self.right_start)
        } else {
            (self.right_start, self.feet.len())
        };
        let slice = &self.feet[lo..hi];
        let q = if slice.len() < 2 {
            *col.get(lo)?
        } else {
            let i = slice
                .partition_point(|&f| f < foot)
                .clamp(1, slice.len() - 1);
            let (f0, f1) = (slice[i - 1], slice[i]);
            let (q0, q1) = (col[lo + i - 1], col[lo + i]);
            if f1 > f0 {
                q0 + (q1 - q0) * (foot - f0) / (f1 - f0)
            } else {
                q0
            }
        };
        let a0 = self.scn.gradient_seed(foot).ok()?;
        let denom = 1.0 + a0 * q;
        if denom <= self.scn.numerics.delta_blow {
            return None;
        }
        Some(a0 / denom)
    }

    /// Genuinely nonlinear characteristic through `(x_seed, k_seed)`
    /// integrated backward to slice 0 with RK4 on the stored slices
    /// (`k_seed` must be even). Returns one position per even slice,
    /// earliest first as `(k, x)`.
    pub fn char1_backward(&self, x_seed: f64, k_seed: usize) -> Result<Vec<(usize, f64)>> {
        assert!(k_seed % 2 == 0, "seed slice must be even");
        let lambda1 = |x: f64, k: usize| -> Result<f64> { Ok(self.euler_at_fast(x, k)?.0) };
        let mut out = Vec::with_capacity(k_seed / 2 + 1);
        let mut x = x_seed;
        out.push((k_seed, x));
        let h = -2.0 * self.dt;
        let mut k = k_seed;
        while k >= 2 {
            let k1 = lambda1(x, k)?;
            let k2 = lambda1(x + 0.5 * h * k1, k - 1)?;
            let k3 = lambda1(x + 0.5 * h * k2, k - 1)?;
            let k4 = lambda1(x + h * k3, k - 2)?;
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            k -= 2;
            out.push((k, x));
        }
        out.reverse();
        Ok(out)
    }

    /// Contact characteristic through `(x_seed, k_seed)`: the flow line of
    /// its Lagrangian label. Returns `(k, x)` for even slices up to `k_seed`.
    pub fn char2_backward(&self, x_seed: f64, k_seed: usize) -> Result<Vec<(usize, f64)>> {
        let y = self.label_of(x_seed, k_seed);
        Ok((0..=k_seed)
            .step_by(2)
            .map(|k| (k, self.x_of_label(y, k)))
            .collect())
    }

    /// `(lambda1, u)` without the gradient (cheap path for curve stages).
    fn euler_at_fast(&self, x: f64, k: usize) -> Result<(f64, f64)> {
        let y = self.label_of(x, k);
        let foot = self.foot_at(y, k);
        let v = self.scn.v0(foot);
        let z = self.scn.z0().eval_clamped(y, Side::Auto);
        let eps_sq = self.scn.epsilon * self.scn.epsilon;
        let g = self
            .scn
            .model
            .p_inverse((z - v) / eps_sq)
            .map_err(|e| match e {
                SolverError::OutOfRange { q, .. } => SolverError::VacuumEncountered { q, y },
                other => other,
            })?;
        let (_, dp, _) = self.scn.model.evaluate(g)?;
        Ok((v - eps_sq * g * dp, v))
    }
}

/// Uniform plus geometrically clustered feet on each side of the jump.
fn foot_grids(scn: &Scenario, lo: f64, hi: f64, cfg: &MeshConfig) -> (Vec<f64>, Vec<f64>) {
    let n = cfg.feet_per_side.max(16);
    match scn.jump() {
        None => (linspace(lo, hi, 2 * n), Vec::new()),
        Some(j) => {
            let mut left = linspace(lo, j, n);
            let mut right = linspace(j, hi, n);
            right.remove(0); // the jump label itself belongs to the left family
            let d_min: f64 = 1e-10;
            let c = cfg.cluster_per_side.max(2);
            for side in [-1.0, 1.0] {
                let d_max = if side < 0.0 {
                    (j - lo) * 0.5
                } else {
                    (hi - j) * 0.5
                };
                for i in 0..c {
                    let t = i as f64 / (c - 1) as f64;
                    let d = d_min * (d_max / d_min).powf(t);
                    if side < 0.0 {
                        left.push(j - d);
                    } else {
                        right.push(j + d);
                    }
                }
            }
            left.sort_by(|a, b| a.partial_cmp(b).unwrap());
            left.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * (1.0 + a.abs()));
            right.sort_by(|a, b| a.partial_cmp(b).unwrap());
            right.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * (1.0 + a.abs()));
            (left, right)
        }
    }
}

fn build_slice_inverse(
    scn: &Scenario,
    traces: &[crate::characteristics::CharacteristicTrace],
    feet: &[f64],
    right_start: usize,
    k: usize,
    t_k: f64,
    xi_star: f64,
) -> Result<InverseFoot> {
    let jump = scn.jump();
    // drop ties introduced by clustered feet barely apart; None when the
    // whole piece collapses (an empty region at this time)
    let monotone = |xs: Vec<f64>, ys: Vec<f64>| -> Option<Pchip> {
        let mut px = Vec::with_capacity(xs.len());
        let mut py = Vec::with_capacity(ys.len());
        for (x, y) in xs.into_iter().zip(ys) {
            if let Some(&last) = px.last() {
                if x <= last + 1e-13 * (1.0 + f64::abs(last)) {
                    continue;
                }
            }
            px.push(x);
            py.push(y);
        }
        if px.len() < 2 {
            return None;
        }
        Some(Pchip::new(px, py))
    };
    let required = |p: Option<Pchip>, at: f64| -> Result<Pchip> {
        p.ok_or(SolverError::BracketFailure { y: at, tau: t_k })
    };

    match jump {
        None => {
            let pos: Vec<f64> = traces.iter().map(|tr| tr.positions[k]).collect();
            let plus = required(monotone(pos, feet.to_vec()), 0.0)?;
            Ok(InverseFoot {
                left: None,
                mid: None,
                plus,
                y1: f64::NEG_INFINITY,
                xi_star: f64::NAN,
            })
        }
        Some(j) => {
            // left family: feet <= jump; its last trace is the boundary curve
            let left_pos: Vec<f64> = traces[..right_start]
                .iter()
                .map(|tr| tr.positions[k])
                .collect();
            let y1 = *left_pos.last().unwrap();
            let left = required(monotone(left_pos, feet[..right_start].to_vec()), j)?;

            // right family splits into crossed (position < jump) and not
            let mut mid_pos = vec![y1];
            let mut mid_feet = vec![j];
            let mut plus_pos = vec![j];
            let mut plus_feet = vec![xi_star];
            for (i, tr) in traces[right_start..].iter().enumerate() {
                let p = tr.positions[k];
                let crossed = tr.crossed_jump_at.map(|tc| tc <= t_k).unwrap_or(false);
                if crossed && p < j {
                    mid_pos.push(p);
                    mid_feet.push(feet[right_start + i]);
                } else if p > j {
                    plus_pos.push(p);
                    plus_feet.push(feet[right_start + i]);
                }
            }
            // positions were collected foot-ascending; they are already
            // position-ascending by monotonicity of the flow
            mid_pos.push(j);
            mid_feet.push(xi_star);
            let mid = monotone(mid_pos, mid_feet);
            let plus = required(monotone(plus_pos, plus_feet), j)?;
            Ok(InverseFoot {
                left: Some(left),
                mid,
                plus,
                y1,
                xi_star,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristics::{Numerics, Scenario};
    use crate::initial_data::{ExprFn, InitialData, PiecewiseLipschitzFn};
    use crate::pressure::PressureModel;
    use approx::assert_relative_eq;

    const W: (f64, f64) = (-5.0, 5.0);

    fn constant_state(model: PressureModel, c: f64, rho: f64, eps: f64) -> Scenario {
        let data = InitialData::new(
            PiecewiseLipschitzFn::smooth(ExprFn::Const(c), W),
            PiecewiseLipschitzFn::smooth(ExprFn::Const(rho), W),
        )
        .unwrap();
        Scenario::new(model, data, eps, W, Numerics::default()).unwrap()
    }

    fn log_step_scenario(eps: f64) -> Scenario {
        let data = InitialData::new(
            PiecewiseLipschitzFn::smooth(ExprFn::NegTanh, W),
            PiecewiseLipschitzFn::step(0.0, 1.0, 2.0, W),
        )
        .unwrap();
        Scenario::new(PressureModel::log_law(), data, eps, W, Numerics::default()).unwrap()
    }

    #[test]
    fn flow_map_constant_state() {
        let s = constant_state(PressureModel::log_law(), 0.4, 1.0, 0.1);
        assert_relative_eq!(
            flow_x(&s, 0.3, 1.5).unwrap(),
            0.3 + 0.4 * 1.5,
            max_relative = 1e-10
        );
        // u0 = 0 keeps every label in place
        let s = constant_state(PressureModel::log_law(), 0.0, 2.0, 0.1);
        assert_relative_eq!(flow_x(&s, -0.7, 2.0).unwrap(), -0.7, epsilon = 1e-12);
    }

    #[test]
    fn invert_round_trip() {
        let s = log_step_scenario(0.1);
        for &(y, t) in &[(0.3, 0.4), (-0.6, 0.7), (0.0, 0.5)] {
            let x = flow_x(&s, y, t).unwrap();
            let back = invert_x(&s, x, t, None).unwrap();
            assert_relative_eq!(back, y, epsilon = 1e-8);
        }
        assert_relative_eq!(invert_x(&s, 0.22, 0.0, None).unwrap(), 0.22);
    }

    #[test]
    fn eulerian_sample_constant_state() {
        // log law rho=1, c=0: lambda1 = -eps^2, lambda2 = 0
        let s = constant_state(PressureModel::log_law(), 0.0, 1.0, 0.1);
        let e = sample_eulerian(&s, 0.5, 0.8).unwrap();
        assert_relative_eq!(e.rho, 1.0, max_relative = 1e-10);
        assert_relative_eq!(e.u, 0.0, epsilon = 1e-12);
        assert_relative_eq!(e.lambda1, -0.01, max_relative = 1e-9);
        assert_relative_eq!(e.lambda2, 0.0, epsilon = 1e-12);
        assert!(e.lambda1 < e.lambda2);
    }

    #[test]
    fn eulerian_sample_matches_initial_data() {
        let s = log_step_scenario(0.1);
        for &x in &[-1.0, 0.4, 2.0] {
            let e = sample_eulerian(&s, x, 0.0).unwrap();
            assert_relative_eq!(e.u, s.v0(x), max_relative = 1e-12);
        }
    }

    #[test]
    fn discontinuity_curve_examples() {
        // constant velocity translates the jump at speed c
        let data = InitialData::new(
            PiecewiseLipschitzFn::smooth(ExprFn::Const(0.3), W),
            PiecewiseLipschitzFn::step(0.0, 1.0, 2.0, W),
        )
        .unwrap();
        let s = Scenario::new(PressureModel::log_law(), data, 0.1, W, Numerics::default()).unwrap();
        let grid = crate::interp::linspace(0.0, 1.0, 11);
        let c = discontinuity_curve(&s, &grid).unwrap();
        for (i, &t) in c.ts.iter().enumerate() {
            assert_relative_eq!(c.xs[i], 0.3 * t, epsilon = 1e-9);
            assert!((c.u_left[i] - c.u_right[i]).abs() <= 1e-6);
        }

        // default scenario: the curve stays within O(eps^2) of the origin
        let s = log_step_scenario(0.1);
        let grid = crate::interp::linspace(0.0, 0.5, 26);
        let c = discontinuity_curve(&s, &grid).unwrap();
        for (i, &t) in c.ts.iter().enumerate() {
            assert!(c.xs[i].abs() <= 0.01 * (1.0 + t), "x2({t}) = {}", c.xs[i]);
            assert!((c.u_left[i] - c.u_right[i]).abs() <= 1e-6);
        }
        // finite-difference slope of the curve equals u on the curve
        for i in 1..c.ts.len() - 1 {
            let slope = (c.xs[i + 1] - c.xs[i - 1]) / (c.ts[i + 1] - c.ts[i - 1]);
            let u_mid = 0.5 * (c.u_left[i] + c.u_right[i]);
            assert!((slope - u_mid).abs() < 1e-4, "slope {slope} vs u {u_mid}");
        }
    }

    #[test]
    fn mesh_agrees_with_direct_samplers() {
        let s = log_step_scenario(0.15);
        let mesh = SolutionMesh::build(&s, 0.5, &MeshConfig::default(), &[400, 800]).unwrap();
        for &(x, t) in &[(0.3, 0.25), (-0.4, 0.5), (1.2, 0.5), (-0.02, 0.25)] {
            let k = mesh.slice_of(t);
            let direct = sample_eulerian(&s, x, t).unwrap();
            let fast = mesh.euler_at(x, k).unwrap();
            // row-resolution interpolation noise sits orders of magnitude
            // below every eps^2 signal the mesh is used to measure
            assert_relative_eq!(fast.u, direct.u, epsilon = 5e-7);
            assert_relative_eq!(fast.rho, direct.rho, max_relative = 5e-5);
            assert_relative_eq!(fast.lambda1, direct.lambda1, epsilon = 5e-7);
            assert_relative_eq!(fast.u_x, direct.u_x, max_relative = 2e-4, epsilon = 1e-8);
        }
        // jump image matches the direct curve tracker
        let grid = crate::interp::linspace(0.0, 0.5, 51);
        let c = discontinuity_curve(&s, &grid).unwrap();
        for (i, &t) in c.ts.iter().enumerate() {
            let k = mesh.slice_of(t);
            assert_relative_eq!(mesh.x2_at(k).unwrap(), c.xs[i], epsilon = 1e-8);
        }
    }

    #[test]
    fn char1_wrapper_is_straight_for_constant_state() {
        let s = constant_state(PressureModel::log_law(), 0.2, 1.0, 0.1);
        let curve = char1_curve(&s, 0.5, 0.8, 100).unwrap();
        // slope c - eps^2 rho p'(rho) = 0.2 - 0.01
        let (t0, x0) = curve[0];
        assert_eq!(t0, 0.0);
        assert_relative_eq!(x0, 0.5 - 0.19 * 0.8, max_relative = 1e-9);
        let (t_end, x_end) = *curve.last().unwrap();
        assert_relative_eq!(t_end, 0.8);
        assert_relative_eq!(x_end, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn mesh_characteristic_triangle_constant_state() {
        // width of the triangle from (0, 1) is exactly eps^2 rho p'(rho) * 1
        let s = constant_state(PressureModel::log_law(), 0.0, 1.0, 0.1);
        let mesh = SolutionMesh::build(&s, 1.0, &MeshConfig::default(), &[]).unwrap();
        let k_seed = mesh.n_slices() - 1;
        let c1 = mesh.char1_backward(0.0, k_seed).unwrap();
        let c2 = mesh.char2_backward(0.0, k_seed).unwrap();
        let width = c1
            .iter()
            .zip(&c2)
            .map(|((_, x1), (_, x2))| (x1 - x2).abs())
            .fold(0.0f64, f64::max);
        assert_relative_eq!(width, 0.01, max_relative = 1e-8);

        // gamma = 2, rho = 2: eps^2 * rho * p'(rho) = eps^2 * 8
        let s = constant_state(PressureModel::gamma_law(2.0).unwrap(), 0.0, 2.0, 0.1);
        let mesh = SolutionMesh::build(&s, 1.0, &MeshConfig::default(), &[]).unwrap();
        let c1 = mesh.char1_backward(0.0, k_seed).unwrap();
        let c2 = mesh.char2_backward(0.0, k_seed).unwrap();
        let width = c1
            .iter()
            .zip(&c2)
            .map(|((_, x1), (_, x2))| (x1 - x2).abs())
            .fold(0.0f64, f64::max);
        assert_relative_eq!(width, 0.08, max_relative = 1e-8);
    }

    #[test]
    fn mesh_velocity_is_continuous_across_the_curve() {
        let s = log_step_scenario(0.1);
        let mesh = SolutionMesh::build(&s, 0.5, &MeshConfig::default(), &[]).unwrap();
        for k in (0..mesh.n_slices()).step_by(80) {
            let x2 = mesh.x2_at(k).unwrap();
            let ul = mesh.u_at(x2 - 1e-9, k);
            let ur = mesh.u_at(x2 + 1e-9, k);
            assert!(
                (ul - ur).abs() <= 1e-6,
                "velocity jump {} at slice {k}",
                (ul - ur).abs()
            );
        }
    }

    #[test]
    fn mesh_density_jump_persists() {
        // the log law keeps the density ratio across the contact at exactly
        // the initial ratio (the invariant jump is eps^2 ln 2)
        let s = log_step_scenario(0.1);
        let mesh = SolutionMesh::build(&s, 0.5, &MeshConfig::default(), &[]).unwrap();
        for k in (0..mesh.n_slices()).step_by(100) {
            let x2 = mesh.x2_at(k).unwrap();
            let l = mesh.euler_at_side(x2, k, Side::Left).unwrap();
            let r = mesh.euler_at_side(x2, k, Side::Right).unwrap();
            assert_relative_eq!(r.rho / l.rho, 2.0, max_relative = 1e-6);
            assert!(r.rho - l.rho > 0.5, "jump must stay bounded away from zero");
        }
    }

    #[test]
    fn mesh_hyperbolicity_on_lattice() {
        let s = log_step_scenario(0.2);
        let mesh = SolutionMesh::build(&s, 0.5, &MeshConfig::default(), &[]).unwrap();
        for k in (0..mesh.n_slices()).step_by(160) {
            for x in crate::interp::linspace(-3.0, 3.0, 31) {
                let e = mesh.euler_at(x, k).unwrap();
                assert!(e.lambda1 < e.lambda2, "strict hyperbolicity at ({x}, {k})");
            }
        }
    }
}
