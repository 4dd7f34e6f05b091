//! Acceptance suite: one test per claim, each printing a PASS line with the
//! measured numbers (run with `--nocapture` to see them on success).

use std::time::Instant;

use approx::assert_relative_eq;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use aw_rascle::characteristics::{find_foot, trace_forward, Numerics, Scenario};
use aw_rascle::config::Config;
use aw_rascle::euler_map::{MeshConfig, SolutionMesh};
use aw_rascle::experiments::{
    run_blowup, run_convergence, weak_residual, ScenarioTemplate, SweepConfig,
};
use aw_rascle::fields::{
    check_bound_rows, gradient_infimum_over_feet, sample_lagrangian, threshold_time,
    verify_density_bounds,
};
use aw_rascle::initial_data::{
    check_epsilon_condition, check_zero_condition, ExprFn, InitialData, PiecewiseLipschitzFn, Side,
};
use aw_rascle::interp::linspace;
use aw_rascle::pressure::PressureModel;

const W: (f64, f64) = (-5.0, 5.0);

fn data(u0: ExprFn, g0: PiecewiseLipschitzFn) -> InitialData {
    InitialData::new(PiecewiseLipschitzFn::smooth(u0, W), g0).unwrap()
}

fn step_g0() -> PiecewiseLipschitzFn {
    PiecewiseLipschitzFn::step(0.0, 1.0, 2.0, W)
}

fn const_g0(c: f64) -> PiecewiseLipschitzFn {
    PiecewiseLipschitzFn::smooth(ExprFn::Const(c), W)
}

/// 1. Log-law blow-up time is exactly 1 for every eps.
#[test]
fn criterion_01_log_law_exact_blowup() {
    let start = Instant::now();
    let template = ScenarioTemplate {
        model: PressureModel::log_law(),
        data: data(ExprFn::NegTanh, step_g0()),
        window: W,
        numerics: Numerics::default(),
    };
    let feet = linspace(-2.0, 2.0, 201);
    let report = run_blowup(&template, &[0.2, 0.1, 0.05], &feet).unwrap();
    for row in &report.rows {
        assert!(
            (row.t_b_eps - 1.0).abs() <= 1e-3,
            "T_b^eps at eps {} was {}",
            row.epsilon,
            row.t_b_eps
        );
        assert!(
            (row.t_b_bar - 1.0).abs() <= 1e-6,
            "pressureless T_b {}",
            row.t_b_bar
        );
        assert!(row.gap.abs() <= 1e-3);
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed <= 60.0, "runtime {elapsed:.1}s exceeds 60s");
    println!(
        "PASS criterion-01 log-law blow-up: T_b^eps = {:?}, runtime {elapsed:.1}s",
        report.rows.iter().map(|r| r.t_b_eps).collect::<Vec<_>>()
    );
}

/// 2. O(eps^2) convergence of u, lambda_1, lambda_2 and the discontinuity
///    curve on the production lattice.
#[test]
fn criterion_02_quadratic_convergence_rates() {
    let start = Instant::now();
    let cfg = Config::default().sweep_config().unwrap();
    assert_eq!(cfg.epsilons, vec![0.2, 0.1, 0.05, 0.025, 0.0125]);
    assert_eq!((cfg.lattice_nx, cfg.lattice_nt), (201, 101));
    assert_eq!(cfg.t_star, 0.5);
    let report = run_convergence(&cfg).unwrap();
    assert!(
        report.skipped.is_empty(),
        "skipped eps: {:?}",
        report.skipped
    );
    let mut slopes = Vec::new();
    for (name, fit) in [
        ("u", &report.fit_u),
        ("lambda1", &report.fit_lambda1),
        ("lambda2", &report.fit_lambda2),
        ("x2", &report.fit_x2),
    ] {
        let f = fit.as_ref().unwrap();
        assert!(
            (1.7..=2.3).contains(&f.slope),
            "{name} slope {} outside [1.7, 2.3]",
            f.slope
        );
        assert!(f.r_squared >= 0.98, "{name} R^2 {}", f.r_squared);
        slopes.push((name, f.slope));
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed <= 600.0, "runtime {elapsed:.1}s exceeds 10min");
    println!("PASS criterion-02 rates: {slopes:?}, runtime {elapsed:.1}s");
}

/// 3. Constant-state characteristic triangle width is exactly
///    `eps^2 rho p'(rho) * t`.
#[test]
fn criterion_03_triangle_identity() {
    let eps = 0.1;
    let cases = [
        (PressureModel::log_law(), 1.0, 1.0),               // rho p' = 1
        (PressureModel::gamma_law(2.0).unwrap(), 2.0, 8.0), // rho p' = 2*4
    ];
    for (model, rho, rho_dp) in cases {
        let scn = Scenario::new(
            model.clone(),
            data(ExprFn::Const(0.0), const_g0(rho)),
            eps,
            W,
            Numerics::default(),
        )
        .unwrap();
        let mesh = SolutionMesh::build(&scn, 1.0, &MeshConfig::default(), &[]).unwrap();
        let k_seed = mesh.n_slices() - 1;
        let c1 = mesh.char1_backward(0.0, k_seed).unwrap();
        let c2 = mesh.char2_backward(0.0, k_seed).unwrap();
        let width = c1
            .iter()
            .zip(&c2)
            .map(|((_, a), (_, b))| (a - b).abs())
            .fold(0.0f64, f64::max);
        let expect = eps * eps * rho_dp;
        assert_relative_eq!(width, expect, max_relative = 1e-8);
        println!(
            "PASS criterion-03 triangle: width {width:.12e} = eps^2 rho p'(rho) (rho = {rho})"
        );
    }
}

/// 4. Density lower bounds hold on a 101 x 51 lattice for both pressure
///    classes; a corrupted sample set fails.
#[test]
fn criterion_04_density_lower_bounds() {
    // 101 x 51 lattice, plus two probes inside the jump-influence wedge
    // (whose width is O(eps^2), far below the lattice spacing)
    let mut y_grid = linspace(W.0, W.1, 101);
    y_grid.extend_from_slice(&[-0.003, -0.001]);
    y_grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // log-type class on the default scenario
    let scn = Scenario::new(
        PressureModel::log_law(),
        data(ExprFn::NegTanh, step_g0()),
        0.1,
        W,
        Numerics::default(),
    )
    .unwrap();
    let tau_grid = linspace(0.0, 0.9 * scn.horizon(), 51);
    let report = verify_density_bounds(&scn, &y_grid, &tau_grid).unwrap();
    assert!(report.passed, "log law worst ratio {}", report.worst_ratio);
    assert!(report.worst_ratio >= 1.0 - 1e-8);
    let log_worst = report.worst_ratio;
    // the OmegaI-specific bound must actually have been exercised
    assert!(
        report
            .rows
            .iter()
            .any(|r| r.region == aw_rascle::fields::Region::OmegaI),
        "lattice never sampled OmegaI"
    );

    // finite-zero class on the same data (eps-condition holds)
    let scn = Scenario::new(
        PressureModel::gamma_law(1.0).unwrap(),
        data(ExprFn::NegTanh, step_g0()),
        0.2,
        W,
        Numerics::default(),
    )
    .unwrap();
    let tau_grid = linspace(0.0, 0.9 * scn.horizon(), 51);
    let report2 = verify_density_bounds(&scn, &y_grid, &tau_grid).unwrap();
    assert!(
        report2.passed,
        "gamma law worst ratio {}",
        report2.worst_ratio
    );

    // negative control: a corrupted density must fail the check
    let mut rows = report2.rows.clone();
    let i = rows.len() / 2;
    rows[i].g *= 1e-4;
    rows[i].ratio = rows[i].g / rows[i].bound;
    let (_, _, passed) = check_bound_rows(&rows);
    assert!(!passed, "corrupted run must fail");
    println!(
        "PASS criterion-04 bounds: worst ratios log {log_worst:.9}, gamma {:.9}, negative control fails",
        report2.worst_ratio
    );
}

/// 5. Invariant suite on 1000 random pre-blow-up samples.
#[test]
fn criterion_05_invariant_suite() {
    let scn = Scenario::new(
        PressureModel::log_law(),
        data(ExprFn::NegTanh, step_g0()),
        0.1,
        W,
        Numerics::default(),
    )
    .unwrap();
    let horizon = scn.horizon();
    let mut rng = ChaCha8Rng::seed_from_u64(20240811);
    let tol_inv = scn.numerics.tol_inv;

    let mut checked = 0usize;
    for _ in 0..1000 {
        let y: f64 = rng.gen_range(W.0..W.1);
        let tau: f64 = rng.gen_range(0.0..0.9 * horizon);
        let s = sample_lagrangian(&scn, y, tau).unwrap();
        // mass relation J g = g0
        let g0 = scn.data.g0.eval_clamped(y, Side::Auto);
        assert!(
            (s.j * s.g - g0).abs() <= 1e-10 * g0,
            "mass relation at ({y}, {tau})"
        );
        // frozen invariant
        let z0 = scn.z0().eval_clamped(y, Side::Auto);
        assert!(
            (s.z - z0).abs() <= 10.0 * tol_inv * (1.0 + z0.abs()),
            "invariant at ({y}, {tau}): {} vs {}",
            s.z,
            z0
        );
        // transported velocity equals the foot's initial velocity exactly
        let (foot, _) = find_foot(&scn, y, tau).unwrap();
        assert_eq!(s.v, scn.v0(foot));
        checked += 1;
    }

    // foot map monotone on sorted batches
    for batch in 0..8 {
        let tau: f64 = rng.gen_range(0.05..0.9 * horizon);
        let mut ys: Vec<f64> = (0..32).map(|_| rng.gen_range(-2.0..2.0)).collect();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = f64::NEG_INFINITY;
        for &y in &ys {
            let (foot, _) = find_foot(&scn, y, tau).unwrap();
            assert!(foot > prev, "foot map not monotone in batch {batch}");
            prev = foot;
        }
    }

    // strict hyperbolicity and velocity continuity across the curve
    let mesh = SolutionMesh::build(
        &scn,
        0.9_f64.min(0.9 * horizon),
        &MeshConfig::default(),
        &[],
    )
    .unwrap();
    for _ in 0..200 {
        let x: f64 = rng.gen_range(-3.0..3.0);
        let k = 2 * rng.gen_range(0..mesh.n_slices() / 2);
        let e = mesh.euler_at(x, k).unwrap();
        assert!(e.lambda1 < e.lambda2);
    }
    let mut max_u_jump: f64 = 0.0;
    for k in (0..mesh.n_slices()).step_by(40) {
        let x2 = mesh.x2_at(k).unwrap();
        max_u_jump = max_u_jump.max((mesh.u_at(x2 - 1e-9, k) - mesh.u_at(x2 + 1e-9, k)).abs());
    }
    assert!(max_u_jump <= 1e-6, "velocity jump {max_u_jump}");
    println!("PASS criterion-05 invariants: {checked} samples, max |[u]| = {max_u_jump:.3e}");
}

/// 6. Closed-form gradient matches a two-foot finite difference of
///    `g p'(g) J^{-1} v_y` at 20 mid-time checkpoints in the smooth region.
#[test]
fn criterion_06_riccati_vs_finite_differences() {
    let scn = Scenario::new(
        PressureModel::log_law(),
        data(ExprFn::NegTanh, step_g0()),
        0.1,
        W,
        Numerics::default(),
    )
    .unwrap();
    let delta = 1e-4;
    let feet = [-1.2, -0.9, -0.6, 0.5, 1.0];
    let times = [0.1, 0.2, 0.3, 0.45];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &foot in &feet {
        for &tau in &times {
            let tr_mid = trace_forward(&scn, foot, tau).unwrap();
            let alpha = *aw_rascle::characteristics::scaled_gradient_along(&scn, &tr_mid)
                .unwrap()
                .last()
                .unwrap();

            // finite difference from two neighbouring characteristics:
            // J^{-1} v_y = (g/g0) dv/dy, scaled by g p'(g)
            let tr_l = trace_forward(&scn, foot - delta, tau).unwrap();
            let tr_r = trace_forward(&scn, foot + delta, tau).unwrap();
            let dv = tr_r.carried_v - tr_l.carried_v;
            let dy = tr_r.end_position() - tr_l.end_position();
            let g = *tr_mid.densities.last().unwrap();
            let (_, dp, _) = scn.model.evaluate(g).unwrap();
            let g0 = scn.data.g0.eval_clamped(tr_mid.end_position(), Side::Auto);
            let alpha_fd = g * dp * (g / g0) * (dv / dy);

            let rel = ((alpha - alpha_fd) / alpha_fd.abs().max(1e-12)).abs();
            worst = worst.max(rel);
            count += 1;
            assert!(
                rel <= 1e-3,
                "foot {foot}, tau {tau}: {alpha} vs {alpha_fd} (rel {rel:.2e})"
            );
        }
    }
    assert_eq!(count, 20);
    println!("PASS criterion-06 gradient consistency: worst relative deviation {worst:.2e} over 20 checkpoints");
}

/// 7. Level-set calculus for the uniform-compression log-law case.
#[test]
fn criterion_07_level_sets() {
    let scn = Scenario::new(
        PressureModel::log_law(),
        data(
            ExprFn::Linear {
                intercept: 0.0,
                slope: -1.0,
            },
            const_g0(1.0),
        ),
        0.1,
        W,
        Numerics::default(),
    )
    .unwrap();
    let feet = linspace(-2.0, 2.0, 33);
    let tau_grid = linspace(0.0, 2.0, 201);

    // m(tau) = -1/(1-tau): the threshold -9 is hit at tau = 8/9
    let t9 = threshold_time(&scn, 9.0, 2.0, &feet, &tau_grid).unwrap();
    assert!((t9 - 8.0 / 9.0).abs() <= 2e-3, "tau_M(9) = {t9}");

    // monotone in the threshold
    let mut prev = 0.0;
    for m in [1.5, 3.0, 9.0, 50.0] {
        let t = threshold_time(&scn, m, 2.0, &feet, &tau_grid).unwrap();
        assert!(t >= prev - 1e-9);
        prev = t;
    }

    // large threshold approaches min(T_b^eps, T) = 1
    let t_inf = threshold_time(&scn, 1e3, 2.0, &feet, &tau_grid).unwrap();
    assert!((t_inf - 1.0).abs() <= 2e-3, "tau_M(1e3) = {t_inf}");

    // spot value of the infimum itself
    let m_half = gradient_infimum_over_feet(&scn, 0.5, &feet).unwrap();
    assert_relative_eq!(m_half, -2.0, max_relative = 1e-7);
    println!("PASS criterion-07 level sets: tau_M(9) = {t9:.6}, tau_M(1e3) = {t_inf:.6}, m(0.5) = {m_half:.9}");
}

/// 8. Weak-form consistency: constant states are exact to quadrature, and
///    refinement shrinks default-scenario residuals by at least 3x.
#[test]
fn criterion_08_weak_form() {
    // constant state at high resolution
    let scn = Scenario::new(
        PressureModel::log_law(),
        data(ExprFn::Const(0.3), const_g0(1.5)),
        0.1,
        W,
        Numerics::default(),
    )
    .unwrap();
    let report = weak_residual(&scn, (-3.0, 3.0), 0.4, 8, 42, 512).unwrap();
    assert!(
        report.mass_residual <= 1e-8,
        "constant-state mass {}",
        report.mass_residual
    );
    assert!(
        report.momentum_residual <= 1e-8,
        "constant-state momentum {}",
        report.momentum_residual
    );

    // refinement study on the default scenario
    let scn = Scenario::new(
        PressureModel::log_law(),
        data(ExprFn::NegTanh, step_g0()),
        0.1,
        W,
        Numerics::default(),
    )
    .unwrap();
    let coarse = weak_residual(&scn, (-3.0, 3.0), 0.4, 8, 42, 64).unwrap();
    let fine = weak_residual(&scn, (-3.0, 3.0), 0.4, 8, 42, 128).unwrap();
    let r_mass = coarse.mass_residual / fine.mass_residual;
    let r_mom = coarse.momentum_residual / fine.momentum_residual;
    assert!(r_mass >= 3.0, "mass refinement ratio {r_mass}");
    assert!(r_mom >= 3.0, "momentum refinement ratio {r_mom}");
    println!(
        "PASS criterion-08 weak form: constant-state residuals ({:.2e}, {:.2e}), refinement ratios ({r_mass:.1}x, {r_mom:.1}x)",
        report.mass_residual, report.momentum_residual
    );
}

/// Adaptive embedded Runge-Kutta (Fehlberg 4(5)) oracle for the gamma-law
/// life span: an independent integration route for the same target
/// `int_0^T I(g) = -1/a0`. Kept deliberately separate from the production
/// fixed-step integrator.
mod oracle {
    pub struct GammaOneTrace {
        pub eps: f64,
        pub foot: f64,
    }

    impl GammaOneTrace {
        // gamma = 1, g0 = 1, u0 = -tanh: g = 1 + (tanh xi - tanh y)/eps^2
        fn rhs(&self, s: [f64; 2]) -> [f64; 2] {
            let y = s[0].clamp(-5.0, 5.0);
            let g = 1.0 + (self.foot.tanh() - y.tanh()) / (self.eps * self.eps);
            [-self.eps * self.eps * g * g, 2.0 / g]
        }

        /// time at which the curvature integral reaches `cosh^2(foot)`
        pub fn blowup_time(&self) -> f64 {
            let target = self.foot.cosh().powi(2);
            let mut t = 0.0;
            let mut s = [self.foot, 0.0];
            let mut h = 1e-4;
            loop {
                let (s_new, err) = rkf45_step(|v| self.rhs(v), s, h);
                let tol = 1e-12 + 1e-10 * s[0].abs().max(1.0);
                if err > tol {
                    h *= 0.5;
                    continue;
                }
                if s_new[1] >= target {
                    // bisect inside the step
                    let (mut lo, mut hi) = (0.0, h);
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        let (probe, _) = rkf45_step(|v| self.rhs(v), s, mid);
                        if probe[1] >= target {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    return t + 0.5 * (lo + hi);
                }
                s = s_new;
                t += h;
                if err < 0.1 * tol {
                    h = (h * 1.7).min(5e-3);
                }
                if t > 3.0 {
                    return f64::INFINITY;
                }
            }
        }
    }

    fn rkf45_step<F: Fn([f64; 2]) -> [f64; 2]>(f: F, s: [f64; 2], h: f64) -> ([f64; 2], f64) {
        let ax = |a: [f64; 2], b: [f64; 2], c: f64| [a[0] + c * b[0], a[1] + c * b[1]];
        let k1 = f(s);
        let k2 = f(ax(s, k1, h * 0.25));
        let k3 = f(ax(ax(s, k1, h * 3.0 / 32.0), k2, h * 9.0 / 32.0));
        let k4 = f(ax(
            ax(ax(s, k1, h * 1932.0 / 2197.0), k2, -h * 7200.0 / 2197.0),
            k3,
            h * 7296.0 / 2197.0,
        ));
        let k5 = f(ax(
            ax(
                ax(ax(s, k1, h * 439.0 / 216.0), k2, -8.0 * h),
                k3,
                h * 3680.0 / 513.0,
            ),
            k4,
            -h * 845.0 / 4104.0,
        ));
        let k6 = f(ax(
            ax(
                ax(
                    ax(ax(s, k1, -h * 8.0 / 27.0), k2, 2.0 * h),
                    k3,
                    -h * 3544.0 / 2565.0,
                ),
                k4,
                h * 1859.0 / 4104.0,
            ),
            k5,
            -h * 11.0 / 40.0,
        ));
        let mut s5 = s;
        let mut s4 = s;
        for i in 0..2 {
            s5[i] += h
                * (16.0 / 135.0 * k1[i] + 6656.0 / 12825.0 * k3[i] + 28561.0 / 56430.0 * k4[i]
                    - 9.0 / 50.0 * k5[i]
                    + 2.0 / 55.0 * k6[i]);
            s4[i] += h
                * (25.0 / 216.0 * k1[i] + 1408.0 / 2565.0 * k3[i] + 2197.0 / 4104.0 * k4[i]
                    - k5[i] / 5.0);
        }
        let err = ((s5[0] - s4[0]).abs()).max((s5[1] - s4[1]).abs());
        (s5, err)
    }
}

/// 9. One-sided life-span inequality for the gamma = 1 law, whose curvature
///    functional is decreasing (no limit claim): `T_b <= T_b^eps + 1e-3` for
///    every swept eps. Expected values frozen from an independent adaptive
///    integration (also re-derived at runtime by the in-test oracle).
#[test]
fn criterion_09_lifespan_one_sided_gamma_one() {
    // frozen oracle values (adaptive integration of the trace equations)
    let frozen: [(f64, f64); 2] = [(0.005, 0.9993603), (0.0025, 0.9997458)];
    for (eps, expected) in frozen {
        // re-derive via the in-test adaptive oracle at the known argmin basin
        let mut best = f64::INFINITY;
        for foot in linspace(-0.05, 0.0, 41) {
            let t = oracle::GammaOneTrace { eps, foot }.blowup_time();
            best = best.min(t);
        }
        assert!(
            (best - expected).abs() <= 2e-5,
            "oracle disagrees with frozen value at eps {eps}: {best} vs {expected}"
        );
    }

    let mut numerics = Numerics::default();
    numerics.ode_steps_per_unit_time = 1e4;
    let template = ScenarioTemplate {
        model: PressureModel::gamma_law(1.0).unwrap(),
        data: data(ExprFn::NegTanh, const_g0(1.0)),
        window: W,
        numerics,
    };
    let feet = linspace(-0.3, 0.1, 401);
    let report = run_blowup(&template, &[0.005, 0.0025, 0.00125], &feet).unwrap();
    assert!(
        !report.limit_claimed,
        "gamma law must not claim the full limit"
    );
    assert!(!report.conditions.monotone_i);
    assert!(report.conditions.integral_diverges);
    for row in &report.rows {
        assert!(
            row.t_b_bar <= row.t_b_eps + 1e-3,
            "one-sided inequality at eps {}: T_b {} vs T_b^eps {}",
            row.epsilon,
            row.t_b_bar,
            row.t_b_eps
        );
    }
    // solver agrees with the frozen oracle values
    for (eps, expected) in frozen {
        let row = report.rows.iter().find(|r| r.epsilon == eps).unwrap();
        assert!(
            (row.t_b_eps - expected).abs() <= 2e-5,
            "solver vs oracle at eps {eps}: {} vs {expected}",
            row.t_b_eps
        );
    }
    println!(
        "PASS criterion-09 one-sided life span: T_b^eps = {:?}",
        report.rows.iter().map(|r| r.t_b_eps).collect::<Vec<_>>()
    );
}

/// 10. Condition gating: the three eps-condition examples reproduce their
///     verdicts and the CLI rejects the failing one with exit code 3.
#[test]
fn criterion_10_condition_gating() {
    let g1 = PressureModel::gamma_law(1.0).unwrap();
    let n = 4096;

    let v = check_epsilon_condition(&data(ExprFn::NegTanh, step_g0()), &g1, 0.1, W, n).unwrap();
    assert!(v[0].holds && (v[0].margin - 0.01).abs() <= 2e-3);

    let v = check_epsilon_condition(&data(ExprFn::Const(0.0), step_g0()), &g1, 0.1, W, n).unwrap();
    assert!(v[0].holds && (v[0].margin - 0.01).abs() <= 1e-12);

    let v = check_epsilon_condition(&data(ExprFn::Tanh, step_g0()), &g1, 0.1, W, n).unwrap();
    assert!(!v[0].holds && v[0].margin < 0.0);

    // 0-condition verdicts
    assert!(check_zero_condition(&data(ExprFn::NegTanh, step_g0()), W, n)[0].holds);
    assert!(!check_zero_condition(&data(ExprFn::Const(0.0), step_g0()), W, n)[0].holds);

    // the failing scenario aborts the CLI with exit code 3
    let out = tempfile::tempdir().unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_awr"))
        .args([
            "--experiment",
            "solve",
            "--out-dir",
            out.path().to_str().unwrap(),
            "--override",
            "pressure.pressure=gamma:1",
            "--override",
            "initial_data.u0=expr:tanh",
        ])
        .status()
        .unwrap();
    assert_eq!(
        status.code(),
        Some(3),
        "eps-condition violation must exit 3"
    );
    println!("PASS criterion-10 gating: verdicts reproduced, CLI exits 3 on violation");
}

/// Gate behaviour of the sweep: every eps with a life span above
/// `t_star` participates; pushing `t_star` past an eps' life span skips
/// exactly that eps and reports it.
#[test]
fn sweep_skips_eps_whose_lifespan_is_too_short() {
    // gamma = 1 smooth data blows up around 0.93 at eps = 0.2
    let template = ScenarioTemplate {
        model: PressureModel::gamma_law(1.0).unwrap(),
        data: data(ExprFn::NegTanh, const_g0(1.0)),
        window: W,
        numerics: Numerics::default(),
    };
    // life spans: ~0.929 at eps = 0.2, ~0.969 at eps = 0.1
    let cfg = SweepConfig {
        template,
        epsilons: vec![0.2, 0.1],
        t_star: 0.95,
        lattice_nx: 21,
        lattice_nt: 5,
        seeds: vec![],
        mesh: MeshConfig {
            n_time: 64,
            feet_per_side: 150,
            cluster_per_side: 12,
            n_y: 101,
        },
    };
    let report = run_convergence(&cfg).unwrap();
    assert!(
        report.skipped.iter().any(|(e, _)| *e == 0.2),
        "{:?}",
        report.skipped
    );
    assert!(report.rows.iter().any(|r| r.epsilon == 0.1));
    println!("PASS sweep gate: eps = 0.2 skipped at t_star = 0.95, eps = 0.1 kept");
}
