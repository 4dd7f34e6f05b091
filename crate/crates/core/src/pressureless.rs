//! Closed-form solution of the pressureless Euler system, the `eps -> 0`
//! reference. In Lagrangian coordinates the label never moves relative to
//! the flow (`v = u0(y)`), the deformation is `1 + u0'(y) t`, and everything
//! else follows by substitution:
//!
//! ```text
//!   J(y,t)   = 1 + u0'(y) t          rho(y,t) = g0(y) / J(y,t)
//!   u_x(y,t) = u0'(y) / J(y,t)       T_b      = inf { -1/u0'(y) }
//! ```

use crate::error::{Result, SolverError};
use crate::initial_data::{InitialData, Side};
use crate::interp::{golden_min, illinois_root, linspace};

/// Closed-form pressureless solution for one set of initial data.
#[derive(Debug, Clone)]
pub struct PressurelessSolution {
    data: InitialData,
    #[allow(dead_code)]
    window: (f64, f64),
    diff_step: f64,
    /// min of `u0'` on the window and its location
    min_slope: f64,
    argmin_slope: f64,
    /// max of `|u0|` on the window (flow-map inversion brackets)
    max_abs_u0: f64,
    /// gradient denominators at or below this count as blown up
    delta_blow: f64,
}

/// Closed-form fields at a Lagrangian label.
#[derive(Debug, Clone, Copy)]
pub struct BarFields {
    pub g: f64,
    pub v: f64,
    pub j: f64,
    pub u_x: f64,
}

impl PressurelessSolution {
    pub fn new(data: InitialData, window: (f64, f64)) -> Self {
        Self::with_params(data, window, 1e-6, 1e-6)
    }

    pub fn with_params(
        data: InitialData,
        window: (f64, f64),
        diff_step_rel: f64,
        delta_blow: f64,
    ) -> Self {
        let diff_step = diff_step_rel * (window.1 - window.0);
        let slope = |y: f64| {
            (data.u0.eval_clamped(y + diff_step, Side::Auto)
                - data.u0.eval_clamped(y - diff_step, Side::Auto))
                / (2.0 * diff_step)
        };
        // dense scan plus golden refinement around the grid argmin
        let grid = linspace(window.0, window.1, 4096);
        let mut min_slope = f64::INFINITY;
        let mut argmin = window.0;
        for &y in &grid {
            let s = slope(y);
            if s < min_slope {
                min_slope = s;
                argmin = y;
            }
        }
        let h = grid[1] - grid[0];
        let (y_ref, s_ref) = golden_min(slope, argmin - h, argmin + h, 80);
        if s_ref < min_slope {
            min_slope = s_ref;
            argmin = y_ref;
        }
        let mut max_abs_u0: f64 = 0.0;
        for &y in &grid {
            max_abs_u0 = max_abs_u0.max(data.u0.eval_clamped(y, Side::Auto).abs());
        }
        PressurelessSolution {
            data,
            window,
            diff_step,
            min_slope,
            argmin_slope: argmin,
            max_abs_u0,
            delta_blow,
        }
    }

    pub fn data(&self) -> &InitialData {
        &self.data
    }

    pub fn min_slope(&self) -> f64 {
        self.min_slope
    }

    fn u0(&self, y: f64) -> f64 {
        self.data.u0.eval_clamped(y, Side::Auto)
    }

    fn u0_prime(&self, y: f64) -> f64 {
        (self.u0(y + self.diff_step) - self.u0(y - self.diff_step)) / (2.0 * self.diff_step)
    }

    /// Exact fields at label `y`, time `t`; errors once `1 + u0' t` has
    /// dropped to the blow-up floor.
    pub fn fields_bar(&self, y: f64, t: f64, side: Side) -> Result<BarFields> {
        let sp = self.u0_prime(y);
        let j = 1.0 + sp * t;
        if j <= self.delta_blow {
            return Err(SolverError::BlowupReached { tau: t });
        }
        Ok(BarFields {
            g: self.data.g0.eval_clamped(y, side) / j,
            v: self.u0(y),
            j,
            u_x: sp / j,
        })
    }

    /// `inf { -1/u0'(y) }`, `+inf` when the data is rarefactive.
    pub fn blowup_time_bar(&self) -> f64 {
        if self.min_slope >= 0.0 {
            f64::INFINITY
        } else {
            -1.0 / self.min_slope
        }
    }

    pub fn blowup_argmin(&self) -> f64 {
        self.argmin_slope
    }

    /// Discontinuity path through `(x0, 0)`: the straight characteristic
    /// `x0 + u0(x0) t`.
    pub fn discontinuity_bar(&self, x0: f64, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
        let tb = self.blowup_time_bar();
        let c = self.u0(x0);
        t_grid
            .iter()
            .map(|&t| {
                if t >= tb {
                    Err(SolverError::BlowupReached { tau: t })
                } else {
                    Ok((t, x0 + c * t))
                }
            })
            .collect()
    }

    /// Largest `s <= t_cap` with `inf_y u_x(y, tau) >= -m` for all `tau <= s`.
    /// The infimum sits at the minimal slope pre-blow-up, so the time is
    /// `1/a - 1/m` (clamped) when `min u0' = -a < 0`.
    pub fn threshold_time_bar(&self, m: f64, t_cap: f64) -> f64 {
        assert!(m > 0.0, "threshold must be positive");
        if self.min_slope >= 0.0 {
            return t_cap;
        }
        let a = -self.min_slope;
        if m <= a {
            return 0.0;
        }
        (1.0 / a - 1.0 / m).min(t_cap)
    }

    /// Label whose straight characteristic passes through `(x, t)`; valid
    /// pre-blow-up where `y + u0(y) t` is strictly increasing.
    pub fn label_of(&self, x: f64, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(x);
        }
        let pad = self.max_abs_u0 * t + 1.0;
        let (a, b) = (x - pad, x + pad);
        let f = |y: f64| -> Result<f64> { Ok(y + self.u0(y) * t - x) };
        let fa = f(a)?;
        let fb = f(b)?;
        illinois_root(f, a, b, fa, fb, 1e-13 * (1.0 + x.abs()), 1e-12, 200)
    }

    /// Eulerian samples via the label inversion.
    pub fn u_bar_at(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.u0(self.label_of(x, t)?))
    }

    pub fn rho_bar_at(&self, x: f64, t: f64, side: Side) -> Result<f64> {
        let y = self.label_of(x, t)?;
        Ok(self.fields_bar(y, t, side)?.g)
    }

    pub fn u_x_bar_at(&self, x: f64, t: f64) -> Result<f64> {
        let y = self.label_of(x, t)?;
        Ok(self.fields_bar(y, t, Side::Auto)?.u_x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::{ExprFn, PiecewiseLipschitzFn};
    use approx::assert_relative_eq;

    const W: (f64, f64) = (-5.0, 5.0);

    fn solution(u0: ExprFn, g0: f64) -> PressurelessSolution {
        let data = InitialData::new(
            PiecewiseLipschitzFn::smooth(u0, W),
            PiecewiseLipschitzFn::smooth(ExprFn::Const(g0), W),
        )
        .unwrap();
        PressurelessSolution::new(data, W)
    }

    #[test]
    fn fields_examples() {
        // constant velocity: (g0, c, 1, 0)
        let s = solution(ExprFn::Const(0.7), 1.3);
        let f = s.fields_bar(0.2, 2.0, Side::Auto).unwrap();
        assert_relative_eq!(f.g, 1.3, max_relative = 1e-12);
        assert_relative_eq!(f.v, 0.7);
        assert_relative_eq!(f.j, 1.0, max_relative = 1e-9);
        assert!(f.u_x.abs() < 1e-9);

        // u0 = -y at t = 0.5: (2, -y, 0.5, -2)
        let s = solution(
            ExprFn::Linear {
                intercept: 0.0,
                slope: -1.0,
            },
            1.0,
        );
        let f = s.fields_bar(0.3, 0.5, Side::Auto).unwrap();
        assert_relative_eq!(f.g, 2.0, max_relative = 1e-9);
        assert_relative_eq!(f.v, -0.3, max_relative = 1e-12);
        assert_relative_eq!(f.j, 0.5, max_relative = 1e-9);
        assert_relative_eq!(f.u_x, -2.0, max_relative = 1e-9);

        // t = 0 reproduces the data
        let f = s.fields_bar(-1.2, 0.0, Side::Auto).unwrap();
        assert_relative_eq!(f.g, 1.0);
        assert_relative_eq!(f.v, 1.2, max_relative = 1e-12);
        assert_eq!(f.j, 1.0);

        // mass relation and gradient identity hold exactly
        for &(y, t) in &[(0.1, 0.3), (-0.7, 0.9), (1.5, 0.2)] {
            let f = s.fields_bar(y, t, Side::Auto).unwrap();
            assert_relative_eq!(f.g * f.j, 1.0, max_relative = 1e-12);
            assert_relative_eq!(f.u_x * f.j, s.u0_prime(y), max_relative = 1e-12);
        }
    }

    #[test]
    fn blowup_time_examples() {
        let s = solution(ExprFn::NegTanh, 1.0);
        assert_relative_eq!(s.blowup_time_bar(), 1.0, max_relative = 1e-9);
        assert!(s.blowup_argmin().abs() < 1e-4);

        // precision limited by difference-quotient cancellation noise
        let s = solution(
            ExprFn::Linear {
                intercept: 0.0,
                slope: -0.5,
            },
            1.0,
        );
        assert_relative_eq!(s.blowup_time_bar(), 2.0, max_relative = 1e-9);

        let s = solution(ExprFn::Tanh, 1.0);
        assert!(s.blowup_time_bar().is_infinite());
    }

    #[test]
    fn discontinuity_examples() {
        let grid: Vec<f64> = crate::interp::linspace(0.0, 0.9, 10);
        // u0(0) = 0 pins the curve at the origin
        let s = solution(ExprFn::NegTanh, 1.0);
        for (t, x) in s.discontinuity_bar(0.0, &grid).unwrap() {
            assert_eq!(x, 0.0, "t={t}");
        }
        // constant velocity translates it
        let s = solution(ExprFn::Const(0.4), 1.0);
        for (t, x) in s.discontinuity_bar(-1.0, &grid).unwrap() {
            assert_relative_eq!(x, -1.0 + 0.4 * t);
        }
        // past blow-up errors
        let s = solution(
            ExprFn::Linear {
                intercept: 0.0,
                slope: -1.0,
            },
            1.0,
        );
        assert!(s.discontinuity_bar(0.0, &[1.5]).is_err());
    }

    #[test]
    fn threshold_time_examples() {
        // a = 1: tau_M = 1 - 1/M
        let s = solution(
            ExprFn::Linear {
                intercept: 0.0,
                slope: -1.0,
            },
            1.0,
        );
        assert_relative_eq!(
            s.threshold_time_bar(9.0, 2.0),
            8.0 / 9.0,
            max_relative = 1e-9
        );
        assert_eq!(s.threshold_time_bar(1.0, 2.0), 0.0);

        // rarefactive: always the cap
        let s = solution(ExprFn::Tanh, 1.0);
        assert_eq!(s.threshold_time_bar(0.5, 2.0), 2.0);

        // monotone in the threshold
        let s = solution(ExprFn::NegTanh, 1.0);
        let mut prev = 0.0;
        for m in [1.5, 2.0, 5.0, 50.0, 1e3] {
            let t = s.threshold_time_bar(m, 2.0);
            assert!(t >= prev);
            prev = t;
        }
        // large threshold approaches min(T_b, cap)
        assert!((s.threshold_time_bar(1e3, 2.0) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn characteristics_solver_collapses_onto_oracle_at_tiny_eps() {
        // log law at eps = 1e-4: the transported velocity differs from the
        // frozen pressureless one only through an O(eps^2) foot displacement
        use crate::characteristics::{find_foot, Numerics, Scenario};
        use crate::pressure::PressureModel;
        let data = InitialData::new(
            PiecewiseLipschitzFn::smooth(ExprFn::NegTanh, W),
            PiecewiseLipschitzFn::smooth(ExprFn::Const(1.0), W),
        )
        .unwrap();
        let bar = PressurelessSolution::new(data.clone(), W);
        let scn =
            Scenario::new(PressureModel::log_law(), data, 1e-4, W, Numerics::default()).unwrap();
        let mut sup = 0.0f64;
        for &tau in &[0.1, 0.3, 0.5] {
            for y in crate::interp::linspace(-2.0, 2.0, 21) {
                let (foot, _) = find_foot(&scn, y, tau).unwrap();
                let v_eps = scn.v0(foot);
                let v_bar = bar.fields_bar(y, tau, Side::Auto).unwrap().v;
                sup = sup.max((v_eps - v_bar).abs());
            }
        }
        assert!(sup <= 1e-6, "sup |v_eps - v_bar| = {sup:.3e}");
    }

    #[test]
    fn label_inversion_round_trip() {
        let s = solution(ExprFn::NegTanh, 1.0);
        for &(x, t) in &[(0.0, 0.5), (-1.3, 0.25), (2.0, 0.8)] {
            let y = s.label_of(x, t).unwrap();
            assert_relative_eq!(y + s.u0(y) * t, x, epsilon = 1e-10);
            assert_relative_eq!(s.u_bar_at(x, t).unwrap(), s.u0(y), max_relative = 1e-12);
        }
    }
}
