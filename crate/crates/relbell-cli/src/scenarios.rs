//! Scenario runners: each turns a finalized config into a CSV document.
//!
//! Grid points are evaluated concurrently but buffered and emitted in grid
//! order, so output bytes depend only on the config. The boosted cone sweep
//! and the plain cone sweep share one row routine, which guarantees that a
//! zero-boost row of one is bit-identical to the matching row of the other.

use rayon::prelude::*;

use relbell::{
    chsh_s, compensation_residual, cone_averages, solve_compensating_field, AcceptanceCone,
    AveragingMode, ChshSettings, FrameConfig, MomentumShell, QuadratureSpec, Vec3,
};

use crate::config::{azimuth_deg_to_rad, polar_deg_to_rad, Mode, Scenario, ScenarioConfig};
use crate::error::CliError;
use crate::output::{fmt12, fmt_residual, render};

/// Run one scenario to completion, returning the rendered CSV document.
pub fn run(scenario: Scenario, config: &ScenarioConfig) -> Result<String, CliError> {
    match scenario {
        Scenario::SphereSweep => sphere_sweep(config),
        Scenario::ConeSweep => cone_sweep(config),
        Scenario::BoostedConeSweep => boosted_cone_sweep(config),
        Scenario::Optimize => optimize(config),
        Scenario::Compensate => compensate(config),
    }
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn settings(config: &ScenarioConfig) -> Result<ChshSettings, CliError> {
    let s = &config.settings;
    ChshSettings::new(vec3(s.a1), vec3(s.a2), vec3(s.b1), vec3(s.b2))
        .map_err(|e| CliError::config(format!("settings: {e}")))
}

fn frame(config: &ScenarioConfig) -> Result<FrameConfig, CliError> {
    FrameConfig::along_z(config.physics.beta)
        .map_err(|e| CliError::config(format!("physics.beta: {e}")))
}

fn quadrature(config: &ScenarioConfig) -> Result<QuadratureSpec, CliError> {
    QuadratureSpec::new(config.quadrature.n_theta, config.quadrature.n_phi)
        .map_err(|e| CliError::config(format!("quadrature: {e}")))
}

fn check_degrees_in(pts: &[f64], lo: f64, hi: f64, label: &str) -> Result<(), CliError> {
    for &x in pts {
        if !(lo..=hi).contains(&x) {
            return Err(CliError::config(format!(
                "{label}: angle {x} outside [{lo}, {hi}] degrees"
            )));
        }
    }
    Ok(())
}

fn check_list(pts: &[f64], label: &str) -> Result<(), CliError> {
    if pts.is_empty() {
        return Err(CliError::config(format!("{label}: list must be non-empty")));
    }
    if pts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::config(format!(
            "{label}: list must be strictly increasing"
        )));
    }
    Ok(())
}

/// Pointwise CHSH value over the momentum-direction grid.
fn sphere_sweep(config: &ScenarioConfig) -> Result<String, CliError> {
    let settings = settings(config)?;
    let frame = frame(config)?;
    let shell = MomentumShell::new(config.physics.speed_b, config.physics.mass_b)
        .map_err(|e| CliError::config(format!("physics: {e}")))?;

    let thetas = config.sweep.theta_deg.points("sweep.theta_deg")?;
    let phis = config.sweep.phi_deg.points("sweep.phi_deg")?;
    check_degrees_in(&thetas, 0.0, 180.0, "sweep.theta_deg")?;
    check_degrees_in(&phis, 0.0, 360.0, "sweep.phi_deg")?;

    // Probe one point up front so setting errors surface deterministically,
    // not from whichever worker fails first.
    chsh_s(&settings, 0.0, 0.0, &shell, &frame)?;

    let grid: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&t| phis.iter().map(move |&p| (t, p)))
        .collect();
    let values = grid
        .par_iter()
        .map(|&(t, p)| {
            chsh_s(
                &settings,
                polar_deg_to_rad(t),
                azimuth_deg_to_rad(p),
                &shell,
                &frame,
            )
        })
        .collect::<Result<Vec<f64>, _>>()?;

    let rows: Vec<String> = grid
        .iter()
        .zip(&values)
        .map(|(&(t, p), &s)| format!("{},{},{}", fmt12(t), fmt12(p), fmt12(s)))
        .collect();
    Ok(render(config, "theta_deg,phi_deg,s", &rows))
}

/// Both cone averages for one (speed, boost, acceptance angle) cell. A zero
/// acceptance angle means the cone has collapsed to the +z pole, where the
/// average is the pointwise value.
fn cone_row(
    settings: &ChshSettings,
    speed: f64,
    mass: f64,
    beta: f64,
    theta_prime_deg: f64,
    quad: QuadratureSpec,
) -> Result<(f64, f64), CliError> {
    let shell = MomentumShell::new(speed, mass)
        .map_err(|e| CliError::config(format!("speed {speed}: {e}")))?;
    let frame =
        FrameConfig::along_z(beta).map_err(|e| CliError::config(format!("beta {beta}: {e}")))?;
    if theta_prime_deg == 0.0 {
        let s = chsh_s(settings, 0.0, 0.0, &shell, &frame)?;
        return Ok((s, s));
    }
    let cone = AcceptanceCone::new(polar_deg_to_rad(theta_prime_deg))
        .map_err(|e| CliError::config(format!("theta_prime {theta_prime_deg}: {e}")))?;
    let averages = cone_averages(settings, &shell, &frame, cone, quad)?;
    Ok((averages.s_literal, averages.s_correlators))
}

/// Cone-averaged CHSH values versus acceptance angle, one curve per speed.
fn cone_sweep(config: &ScenarioConfig) -> Result<String, CliError> {
    let settings = settings(config)?;
    let quad = quadrature(config)?;
    let beta = config.physics.beta;
    let mass = config.physics.mass_b;

    let speeds = &config.sweep.speeds;
    check_list(speeds, "sweep.speeds")?;
    let angles = config
        .sweep
        .theta_prime_deg
        .points("sweep.theta_prime_deg")?;
    check_degrees_in(&angles, 0.0, 180.0, "sweep.theta_prime_deg")?;

    let grid: Vec<(f64, f64)> = speeds
        .iter()
        .flat_map(|&v| angles.iter().map(move |&tp| (v, tp)))
        .collect();
    let values = grid
        .par_iter()
        .map(|&(v, tp)| cone_row(&settings, v, mass, beta, tp, quad))
        .collect::<Result<Vec<(f64, f64)>, _>>()?;

    let rows: Vec<String> = grid
        .iter()
        .zip(&values)
        .map(|(&(v, tp), &(lit, cor))| {
            format!("{},{},{},{}", fmt12(v), fmt12(tp), fmt12(lit), fmt12(cor))
        })
        .collect();
    Ok(render(
        config,
        "speed_b,theta_prime_deg,s_literal,s_correlators",
        &rows,
    ))
}

/// Cone-averaged CHSH values versus acceptance angle at fixed particle
/// speed, one curve per observer boost.
fn boosted_cone_sweep(config: &ScenarioConfig) -> Result<String, CliError> {
    let settings = settings(config)?;
    let quad = quadrature(config)?;
    let speed = config.physics.speed_b;
    let mass = config.physics.mass_b;

    let betas = &config.sweep.betas;
    check_list(betas, "sweep.betas")?;
    let angles = config
        .sweep
        .theta_prime_deg
        .points("sweep.theta_prime_deg")?;
    check_degrees_in(&angles, 0.0, 180.0, "sweep.theta_prime_deg")?;

    let grid: Vec<(f64, f64)> = betas
        .iter()
        .flat_map(|&b| angles.iter().map(move |&tp| (b, tp)))
        .collect();
    let values = grid
        .par_iter()
        .map(|&(b, tp)| cone_row(&settings, speed, mass, b, tp, quad))
        .collect::<Result<Vec<(f64, f64)>, _>>()?;

    let rows: Vec<String> = grid
        .iter()
        .zip(&values)
        .map(|(&(b, tp), &(lit, cor))| {
            format!("{},{},{},{}", fmt12(b), fmt12(tp), fmt12(lit), fmt12(cor))
        })
        .collect();
    Ok(render(
        config,
        "beta,theta_prime_deg,s_literal,s_correlators",
        &rows,
    ))
}

/// Search for the particle-b field directions that maximize the CHSH value,
/// pointwise at `optimize.v_dir` or averaged over an acceptance cone.
fn optimize(config: &ScenarioConfig) -> Result<String, CliError> {
    let settings = settings(config)?;
    let frame = frame(config)?;
    let quad = quadrature(config)?;
    let opt = &config.optimize;

    let dir = vec3(opt.v_dir)
        .normalized()
        .map_err(|_| CliError::config("optimize.v_dir must be a nonzero vector"))?;
    let v_com = config.physics.speed_b * dir;

    // A zero acceptance angle collapses to the pointwise problem, matching
    // the cone sweeps' convention.
    let cone = match opt.cone_theta_prime_deg {
        None => None,
        Some(d) if d != 0.0 => {
            check_degrees_in(&[d], 0.0, 180.0, "optimize.cone_theta_prime_deg")?;
            Some(
                AcceptanceCone::new(polar_deg_to_rad(d))
                    .map_err(|e| CliError::config(format!("optimize.cone_theta_prime_deg: {e}")))?,
            )
        }
        Some(_) => None,
    };
    if opt.max_iter == 0 {
        return Err(CliError::config("optimize.max_iter must be >= 1"));
    }
    let mode = match config.output.mode {
        Mode::Literal => AveragingMode::Literal,
        Mode::Correlator => AveragingMode::Correlators,
    };

    let result = relbell::optimize_directions_with(
        settings.a1(),
        settings.a2(),
        v_com,
        &frame,
        cone,
        quad,
        mode,
        opt.tol,
        opt.max_iter,
    )?;

    let row = format!(
        "{},{},{},{},{},{},{},{},{}",
        fmt12(result.best_s),
        fmt12(result.best_b1.x),
        fmt12(result.best_b1.y),
        fmt12(result.best_b1.z),
        fmt12(result.best_b2.x),
        fmt12(result.best_b2.y),
        fmt12(result.best_b2.z),
        result.iterations,
        result.converged,
    );
    Ok(render(
        config,
        "best_s,best_b1_x,best_b1_y,best_b1_z,best_b2_x,best_b2_y,best_b2_z,iterations,converged",
        &[row],
    ))
}

/// Solve for lab-frame fields whose rest-frame images hit the target axes,
/// and report the forward-check residual of each solution.
fn compensate(config: &ScenarioConfig) -> Result<String, CliError> {
    let frame = frame(config)?;
    let comp = &config.compensate;
    let v_com = vec3(comp.v_com);
    let speed = v_com.norm();
    if speed.is_nan() || speed >= 1.0 {
        return Err(CliError::config(format!(
            "compensate.v_com: speed {speed} must be < 1"
        )));
    }
    if comp.targets.is_empty() {
        return Err(CliError::config("compensate.targets must be non-empty"));
    }

    let mut rows = Vec::with_capacity(comp.targets.len());
    for (i, raw) in comp.targets.iter().enumerate() {
        let target = vec3(*raw)
            .normalized()
            .map_err(|_| CliError::config(format!("compensate.targets[{i}] must be nonzero")))?;
        if !frame.is_rest() {
            let beta_hat = frame
                .beta()
                .normalized()
                .expect("moving frame has nonzero beta");
            let misalignment = target.dot(beta_hat).abs();
            if misalignment > 1e-9 {
                return Err(CliError::config(format!(
                    "compensate.targets[{i}] is not orthogonal to the frame boost \
                     (|target . beta_hat| = {misalignment:.3e}); rest-frame spin axes \
                     are only defined transverse to the boost"
                )));
            }
        }
        let field = solve_compensating_field(target, v_com, &frame)?;
        let residual = compensation_residual(field, target, v_com, &frame)?;
        rows.push(format!(
            "{},{},{},{},{},{},{}",
            fmt12(target.x),
            fmt12(target.y),
            fmt12(target.z),
            fmt12(field.x),
            fmt12(field.y),
            fmt12(field.z),
            fmt_residual(residual),
        ));
    }
    Ok(render(
        config,
        "target_x,target_y,target_z,field_x,field_y,field_z,residual",
        &rows,
    ))
}
