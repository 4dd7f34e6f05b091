//! Batch entry point: parse a scenario/experiment config, run the named
//! experiment, emit CSV reports plus `manifest.json`, and fold the outcome
//! into an exit code (0 = all checks passed, 2 = config error, 3 = scenario
//! rejected, 1 = anything else).

use std::path::{Path, PathBuf};

use crate::characteristics::Scenario;
use crate::config::Config;
use crate::error::{Result, SolverError};
use crate::euler_map::{discontinuity_curve, SolutionMesh};
use crate::experiments::{run_blowup, run_convergence, weak_residual, RateFit};
use crate::fields::verify_density_bounds;
use crate::initial_data::Side;
use crate::interp::linspace;
use crate::report::{write_csv, Check, Field, RunManifest};

/// Slope window accepted for the quadratic convergence claims.
pub const SLOPE_BAND: (f64, f64) = (1.7, 2.3);
/// Minimal fit quality for the rate claims.
pub const MIN_R_SQUARED: f64 = 0.98;
/// Required residual shrink factor under grid halving.
pub const WEAK_REFINE_FACTOR: f64 = 3.0;

pub fn run(config: &Config, experiment: &str, out_dir: &Path) -> Result<RunManifest> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| SolverError::Config(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut manifest = RunManifest::new(config.digest(), experiment, config.seed);
    match experiment {
        "solve" => solve(config, out_dir, &mut manifest)?,
        "bounds" => bounds(config, out_dir, &mut manifest)?,
        "blowup" => blowup(config, out_dir, &mut manifest)?,
        "converge" => converge(config, out_dir, &mut manifest)?,
        "weak" => weak(config, out_dir, &mut manifest)?,
        "all" => {
            solve(config, out_dir, &mut manifest)?;
            bounds(config, out_dir, &mut manifest)?;
            blowup(config, out_dir, &mut manifest)?;
            converge(config, out_dir, &mut manifest)?;
            weak(config, out_dir, &mut manifest)?;
        }
        other => {
            return Err(SolverError::Config(format!(
                "unknown experiment '{other}' (solve|bounds|blowup|converge|weak|all)"
            )));
        }
    }
    let path = manifest.write(out_dir)?;
    manifest.outputs.push(path.display().to_string());
    Ok(manifest)
}

fn scenario_of(config: &Config) -> Result<Scenario> {
    config.scenario()
}

/// Fields and curves of the configured scenario on the evaluation lattice.
fn solve(config: &Config, out_dir: &Path, manifest: &mut RunManifest) -> Result<()> {
    let scn = scenario_of(config)?;
    let bar = config.template()?.pressureless();
    let t_end = config.t_star.min(0.95 * scn.horizon());
    let nt = config.lattice_nt.max(2);
    let mut mesh_cfg = config.mesh_config();
    let per = (mesh_cfg.n_time / (nt - 1)).max(2) & !1usize;
    mesh_cfg.n_time = per * (nt - 1);
    let slices: Vec<usize> = (0..nt).map(|j| j * per).collect();
    let mesh = SolutionMesh::build(&scn, t_end, &mesh_cfg, &slices)?;

    let xs = linspace(config.window.0, config.window.1, config.lattice_nx.max(2));
    let mut rows = Vec::new();
    let mut hyperbolic = true;
    for &k in &slices {
        let t = mesh.time_of(k);
        for &x in &xs {
            let e = mesh.euler_at(x, k)?;
            hyperbolic &= e.lambda1 < e.lambda2 || e.rho <= 0.0;
            let (br, bu, bux) = match bar.label_of(x, t) {
                Ok(y) => {
                    let f = bar.fields_bar(y, t, Side::Auto)?;
                    (f.g, f.v, f.u_x)
                }
                Err(_) => (f64::NAN, f64::NAN, f64::NAN),
            };
            rows.push(vec![
                Field::Num(x),
                Field::Num(t),
                Field::Num(e.rho),
                Field::Num(e.u),
                Field::Num(e.u_x),
                Field::Num(e.lambda1),
                Field::Num(e.lambda2),
                Field::Num(br),
                Field::Num(bu),
                Field::Num(bux),
            ]);
        }
    }
    let fields_path = out_dir.join("fields.csv");
    write_csv(
        &fields_path,
        &[
            "x", "t", "rho", "u", "u_x", "lambda1", "lambda2", "bar_rho", "bar_u", "bar_u_x",
        ],
        rows,
    )?;
    manifest.push_output(&fields_path);
    manifest.push_check(Check::new(
        "strict_hyperbolicity",
        hyperbolic,
        "lambda1 < lambda2 at every lattice sample".into(),
    ));

    // curves: the tracked discontinuity, its pressureless counterpart, and
    // one genuinely nonlinear characteristic from the configured seed
    if scn.jump().is_some() {
        let t_grid = linspace(0.0, t_end, nt);
        let curve = discontinuity_curve(&scn, &t_grid)?;
        let jump = scn.jump().unwrap();
        let speed = bar.data().u0.eval_clamped(jump, Side::Auto);
        let k_seed = {
            let want = config.seed_t.min(t_end);
            let k = (want / mesh.dt).round() as usize;
            (k & !1usize).min(mesh.n_slices() - 1)
        };
        let char1 = mesh.char1_backward(config.seed_x, k_seed)?;
        let mut u_jump_gap: f64 = 0.0;
        let mut rows = Vec::new();
        for (i, &t) in curve.ts.iter().enumerate() {
            u_jump_gap = u_jump_gap.max((curve.u_left[i] - curve.u_right[i]).abs());
            let x1 = char1
                .iter()
                .find(|(k, _)| mesh.time_of(*k) >= t)
                .map(|(_, x)| *x)
                .unwrap_or(f64::NAN);
            rows.push(vec![
                Field::Num(t),
                Field::Num(curve.xs[i]),
                Field::Num(jump + speed * t),
                Field::Num(x1),
            ]);
        }
        let curves_path = out_dir.join("curves.csv");
        write_csv(
            &curves_path,
            &["t", "x2_eps", "x_bar", "x1_from_seed"],
            rows,
        )?;
        manifest.push_output(&curves_path);
        manifest.push_check(Check::new(
            "contact_velocity_continuous",
            u_jump_gap <= 1e-6,
            format!("max |[u]| across the curve = {u_jump_gap:.3e}"),
        ));
    }
    Ok(())
}

/// Density lower bounds on a lattice inside the safety horizon.
fn bounds(config: &Config, out_dir: &Path, manifest: &mut RunManifest) -> Result<()> {
    let scn = scenario_of(config)?;
    let n = config.grid_n.max(3);
    let y_grid = linspace(config.window.0, config.window.1, n);
    let t_hi = config.bounds_t_frac * scn.horizon().min(config.t_max);
    let tau_grid = linspace(0.0, t_hi, (n + 1) / 2);
    let report = verify_density_bounds(&scn, &y_grid, &tau_grid)?;
    let path = out_dir.join("bounds.csv");
    write_csv(
        &path,
        &["y", "tau", "region", "g", "bound", "ratio"],
        report.rows.iter().map(|r| {
            vec![
                Field::Num(r.y),
                Field::Num(r.tau),
                Field::Str(r.region.as_str().into()),
                Field::Num(r.g),
                Field::Num(r.bound),
                Field::Num(r.ratio),
            ]
        }),
    )?;
    manifest.push_output(&path);
    manifest.push_check(Check::new(
        "density_lower_bounds",
        report.passed,
        format!(
            "worst ratio {:.12} over {} samples",
            report.worst_ratio,
            report.rows.len()
        ),
    ));
    Ok(())
}

/// Life-span sweep against the pressureless reference.
fn blowup(config: &Config, out_dir: &Path, manifest: &mut RunManifest) -> Result<()> {
    let template = config.template()?;
    let feet = linspace(
        config.foot_span.0,
        config.foot_span.1,
        config.foot_grid_n.max(3),
    );
    let report = run_blowup(&template, &config.blowup_eps_list, &feet)?;
    let path = out_dir.join("blowup.csv");
    write_csv(
        &path,
        &["epsilon", "T_b_eps", "T_b_bar", "gap"],
        report.rows.iter().map(|r| {
            vec![
                Field::Num(r.epsilon),
                Field::Num(r.t_b_eps),
                Field::Num(r.t_b_bar),
                Field::Num(r.gap),
            ]
        }),
    )?;
    manifest.push_output(&path);
    manifest.push_check(Check::new(
        "lifespan_one_sided",
        report.liminf_ok,
        "T_b <= T_b^eps + 1e-3 for every swept eps".into(),
    ));
    if let Some(ok) = report.limit_ok {
        manifest.push_check(Check::new(
            "lifespan_limit",
            ok,
            "curvature hypotheses hold: gaps shrink to within 1e-3".into(),
        ));
    } else {
        manifest.notes.push(
            "curvature hypotheses fail for this law; only the one-sided bound is claimed".into(),
        );
    }
    Ok(())
}

fn check_fit(manifest: &mut RunManifest, name: &str, fit: &Result<RateFit>) {
    match fit {
        Ok(f) => {
            let ok =
                (SLOPE_BAND.0..=SLOPE_BAND.1).contains(&f.slope) && f.r_squared >= MIN_R_SQUARED;
            manifest.push_check(Check::new(
                name,
                ok,
                format!("slope {:.4}, R^2 {:.6}", f.slope, f.r_squared),
            ));
        }
        Err(e) => {
            manifest.notes.push(format!("{name}: degenerate fit ({e})"));
        }
    }
}

/// The vanishing-pressure convergence sweep.
fn converge(config: &Config, out_dir: &Path, manifest: &mut RunManifest) -> Result<()> {
    let cfg = config.sweep_config()?;
    let report = run_convergence(&cfg)?;
    let path = out_dir.join("convergence.csv");
    write_csv(
        &path,
        &[
            "epsilon",
            "sup_err_u",
            "sup_err_lambda1",
            "sup_err_lambda2",
            "sup_err_x2",
            "triangle_width",
        ],
        report.rows.iter().map(|r| {
            vec![
                Field::Num(r.epsilon),
                Field::Num(r.sup_err_u),
                Field::Num(r.sup_err_lambda1),
                Field::Num(r.sup_err_lambda2),
                Field::Num(r.sup_err_x2),
                Field::Num(r.triangle_width),
            ]
        }),
    )?;
    manifest.push_output(&path);
    for (eps, why) in &report.skipped {
        manifest.notes.push(format!("eps = {eps} skipped: {why}"));
    }
    for r in &report.rows {
        manifest.notes.push(format!(
            "eps = {}: off-curve rho sup = {:.6e} (no rate claimed)",
            r.epsilon, r.sup_err_rho_offcurve
        ));
    }
    check_fit(manifest, "rate_u", &report.fit_u);
    check_fit(manifest, "rate_lambda1", &report.fit_lambda1);
    check_fit(manifest, "rate_lambda2", &report.fit_lambda2);
    check_fit(manifest, "rate_x2", &report.fit_x2);
    check_fit(manifest, "rate_triangle", &report.fit_triangle);

    // errors should shrink along the decreasing eps list; columns that do
    // not apply (x2 without a jump) report NaN and are skipped
    let monotone = |get: fn(&crate::experiments::ConvergenceRow) -> f64| {
        report
            .rows
            .windows(2)
            .all(|w| {
                let (a, b) = (get(&w[0]), get(&w[1]));
                a.is_nan() || b.is_nan() || b <= a * 1.05
            })
    };
    manifest.push_check(Check::new(
        "errors_nonincreasing",
        monotone(|r| r.sup_err_u) && monotone(|r| r.sup_err_lambda1) && monotone(|r| r.sup_err_x2),
        "sup errors decrease along the eps list".into(),
    ));
    Ok(())
}

/// Weak-form consistency residuals at two grid resolutions.
fn weak(config: &Config, out_dir: &Path, manifest: &mut RunManifest) -> Result<()> {
    let scn = scenario_of(config)?;
    let x_box = (config.weak_x0, config.weak_x1);
    let coarse = weak_residual(
        &scn,
        x_box,
        config.weak_t1,
        config.weak_n_test,
        config.seed,
        config.weak_grid_n,
    )?;
    let fine = weak_residual(
        &scn,
        x_box,
        config.weak_t1,
        config.weak_n_test,
        config.seed,
        2 * config.weak_grid_n,
    )?;
    let path = out_dir.join("weak.csv");
    write_csv(
        &path,
        &["grid_n", "mass_residual", "momentum_residual"],
        vec![
            vec![
                Field::Int(config.weak_grid_n as i64),
                Field::Num(coarse.mass_residual),
                Field::Num(coarse.momentum_residual),
            ],
            vec![
                Field::Int(2 * config.weak_grid_n as i64),
                Field::Num(fine.mass_residual),
                Field::Num(fine.momentum_residual),
            ],
        ],
    )?;
    manifest.push_output(&path);
    let r_mass = coarse.mass_residual / fine.mass_residual.max(f64::MIN_POSITIVE);
    let r_mom = coarse.momentum_residual / fine.momentum_residual.max(f64::MIN_POSITIVE);
    manifest.push_check(Check::new(
        "weak_residual_refinement",
        r_mass >= WEAK_REFINE_FACTOR && r_mom >= WEAK_REFINE_FACTOR,
        format!("halving shrinks residuals by (mass {r_mass:.2}x, momentum {r_mom:.2}x)"),
    ));
    Ok(())
}

/// Map an error to the documented process exit code.
pub fn exit_code_for(err: &SolverError) -> i32 {
    match err {
        SolverError::Config(_) => 2,
        SolverError::ScenarioRejected(_) => 3,
        _ => 1,
    }
}

/// Convenience used by `main` and the CLI tests.
pub fn run_to_exit_code(
    config_path: Option<&Path>,
    experiment: &str,
    out_dir: Option<PathBuf>,
    seed: Option<u64>,
    grid_n: Option<usize>,
    overrides: &[String],
) -> i32 {
    let mut config = match config_path {
        Some(p) => match Config::from_file(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code_for(&e);
            }
        },
        None => Config::default(),
    };
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(g) = grid_n {
        config.grid_n = g;
    }
    for o in overrides {
        if let Err(e) = config.apply_override(o) {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    }
    let out = out_dir.unwrap_or_else(|| PathBuf::from(&config.out_dir));
    match run(&config, experiment, &out) {
        Ok(manifest) => {
            for check in &manifest.checks {
                println!(
                    "{} {} - {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            for note in &manifest.notes {
                println!("note: {note}");
            }
            println!(
                "{}: {} checks, manifest at {}/manifest.json",
                if manifest.passed { "ok" } else { "FAILED" },
                manifest.checks.len(),
                out.display()
            );
            if manifest.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
